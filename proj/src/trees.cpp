#include "mta/trees.hpp"

#include <algorithm>
#include <istream>
#include <ostream>
#include <sstream>

namespace mta {

RankedAlphabet::RankedAlphabet(
    const std::vector<std::pair<std::string, unsigned>>& symbols) {
    if (symbols.empty())
        throw std::invalid_argument("alphabet must not be empty");
    bool has_nullary = false;
    for (const auto& [name, rank] : symbols) {
        if (name.empty() || name == "_" ||
            name.find_first_of(" \t\r\n") != std::string::npos)
            throw std::invalid_argument("bad symbol name '" + name + "'");
        if (index_.count(name))
            throw std::invalid_argument("duplicate symbol '" + name + "'");
        index_.emplace(name, static_cast<SymbolId>(names_.size()));
        names_.push_back(name);
        ranks_.push_back(rank);
        has_nullary = has_nullary || rank == 0;
    }
    if (!has_nullary)
        throw std::invalid_argument("alphabet needs at least one nullary symbol");
}

std::optional<SymbolId> RankedAlphabet::find(const std::string& name) const {
    auto it = index_.find(name);
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

unsigned RankedAlphabet::max_rank() const {
    unsigned m = 0;
    for (unsigned r : ranks_) m = std::max(m, r);
    return m;
}

TreeStats tree_stats(const RankedAlphabet& alphabet, const Tree& t) {
    TreeStats s;
    s.symbol_counts.assign(alphabet.size(), 0);
    struct Rec {
        const RankedAlphabet& alphabet;
        TreeStats& s;
        unsigned walk(const Tree& n) {
            ++s.size;
            if (n.symbol == kBoxSymbol) {
                ++s.box_count;
                if (!n.children.empty())
                    throw std::invalid_argument("box must be a leaf");
                return 0;
            }
            if (n.symbol >= alphabet.size())
                throw std::invalid_argument("tree symbol outside the alphabet");
            if (n.children.size() != alphabet.rank(n.symbol))
                throw std::invalid_argument("tree arity mismatch");
            ++s.symbol_counts[n.symbol];
            unsigned h = 0;
            for (const Tree& c : n.children) h = std::max(h, walk(c) + 1);
            return h;
        }
    } rec{alphabet, s};
    s.height = rec.walk(t);
    return s;
}

std::size_t DagStore::KeyHash::operator()(
    const std::pair<SymbolId, std::vector<NodeId>>& k) const {
    std::size_t h = 0x9e3779b97f4a7c15ULL ^ k.first;
    for (NodeId c : k.second) {
        h ^= c + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    }
    return h;
}

DagStore::DagStore(RankedAlphabet alphabet) : alphabet_(std::move(alphabet)) {}

NodeId DagStore::intern(SymbolId symbol, const std::vector<NodeId>& children) {
    if (symbol == kBoxSymbol) {
        if (!children.empty())
            throw std::invalid_argument("box takes no successors");
    } else {
        if (symbol >= alphabet_.size())
            throw std::invalid_argument("symbol outside the alphabet");
        if (children.size() != alphabet_.rank(symbol))
            throw std::invalid_argument("arity mismatch for '" +
                                        alphabet_.name(symbol) + "'");
    }
    for (NodeId c : children)
        if (c >= nodes_.size())
            throw std::invalid_argument("undefined successor node");

    auto key = std::make_pair(symbol, children);
    auto it = pool_.find(key);
    if (it != pool_.end()) return it->second;

    Node n;
    n.symbol = symbol;
    n.children = children;
    n.height = 0;
    n.box_paths = symbol == kBoxSymbol ? 1 : 0;
    n.unfold_size = 1;
    for (NodeId c : children) {
        n.height = std::max(n.height, nodes_[c].height + 1);
        n.box_paths = static_cast<std::uint8_t>(
            std::min(2, n.box_paths + nodes_[c].box_paths));
        if (n.unfold_size > std::numeric_limits<std::uint64_t>::max() -
                                nodes_[c].unfold_size)
            n.unfold_size = std::numeric_limits<std::uint64_t>::max();
        else
            n.unfold_size += nodes_[c].unfold_size;
    }
    const NodeId id = static_cast<NodeId>(nodes_.size());
    nodes_.push_back(std::move(n));
    pool_.emplace(std::move(key), id);
    return id;
}

NodeId DagStore::box() { return intern(kBoxSymbol, {}); }

NodeId DagStore::intern_tree(const Tree& t) {
    std::vector<NodeId> kids;
    kids.reserve(t.children.size());
    for (const Tree& c : t.children) kids.push_back(intern_tree(c));
    return intern(t.symbol, kids);
}

std::vector<NodeId> DagStore::reachable(NodeId root) const {
    std::vector<NodeId> order;
    std::vector<bool> seen(root + 1, false);
    std::vector<NodeId> stack{root};
    seen[root] = true;
    while (!stack.empty()) {
        NodeId v = stack.back();
        stack.pop_back();
        order.push_back(v);
        for (NodeId c : nodes_[v].children)
            if (!seen[c]) {
                seen[c] = true;
                stack.push_back(c);
            }
    }
    std::sort(order.begin(), order.end());
    return order;
}

std::uint64_t DagStore::dag_size(NodeId root) const {
    return reachable(root).size();
}

Tree DagStore::unfold(NodeId root, std::uint64_t max_nodes) const {
    if (unfold_size(root) > max_nodes)
        throw BoundExceededError("unfolding has " +
                                 (unfold_size(root) == std::numeric_limits<std::uint64_t>::max()
                                      ? std::string("more than 2^64 - 1")
                                      : std::to_string(unfold_size(root))) +
                                 " nodes, bound is " + std::to_string(max_nodes));
    Tree t;
    t.symbol = nodes_[root].symbol;
    t.children.reserve(nodes_[root].children.size());
    for (NodeId c : nodes_[root].children)
        t.children.push_back(unfold(c, max_nodes));
    return t;
}

NodeId DagStore::concat(NodeId context, NodeId g) {
    if (!is_context(context))
        throw std::invalid_argument("concat requires a context with exactly one box path");
    std::unordered_map<NodeId, NodeId> memo;
    struct Rec {
        DagStore& store;
        NodeId g;
        std::unordered_map<NodeId, NodeId>& memo;
        NodeId rebuild(NodeId v) {
            if (store.nodes_[v].symbol == kBoxSymbol) return g;
            if (!store.contains_box(v)) return v;
            auto it = memo.find(v);
            if (it != memo.end()) return it->second;
            std::vector<NodeId> kids;
            kids.reserve(store.nodes_[v].children.size());
            for (NodeId c : store.nodes_[v].children) kids.push_back(rebuild(c));
            NodeId r = store.intern(store.nodes_[v].symbol, kids);
            memo.emplace(v, r);
            return r;
        }
    } rec{*this, g, memo};
    return rec.rebuild(context);
}

std::vector<NodeId> DagStore::sub_dags(NodeId root) const {
    std::vector<NodeId> order = reachable(root);
    std::stable_sort(order.begin(), order.end(), [&](NodeId a, NodeId b) {
        if (nodes_[a].height != nodes_[b].height)
            return nodes_[a].height < nodes_[b].height;
        return a < b;
    });
    return order;
}

std::string DagStore::term_string(NodeId root) const {
    const Node& n = nodes_[root];
    std::string s = n.symbol == kBoxSymbol ? "_" : alphabet_.name(n.symbol);
    if (n.children.empty()) return s;
    s += "(";
    for (std::size_t i = 0; i < n.children.size(); ++i) {
        if (i) s += ",";
        s += term_string(n.children[i]);
    }
    s += ")";
    return s;
}

void print_dag(const DagStore& store, NodeId root, std::ostream& out) {
    const std::vector<NodeId> order = store.reachable(root);
    std::unordered_map<NodeId, std::size_t> renum;
    renum.reserve(order.size());
    for (std::size_t i = 0; i < order.size(); ++i) renum.emplace(order[i], i);
    for (NodeId v : order) {
        const SymbolId sym = store.symbol(v);
        out << "node " << renum[v] << ' '
            << (sym == kBoxSymbol ? "_" : store.alphabet().name(sym));
        for (NodeId c : store.children(v)) out << ' ' << renum[c];
        out << '\n';
    }
    out << "root " << renum[root] << '\n';
}

namespace {

// Splits a line into tokens, recording the 1-based column of each.
std::vector<std::pair<std::string, int>> tokenize(const std::string& line) {
    std::vector<std::pair<std::string, int>> toks;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r'))
            ++i;
        if (i >= line.size()) break;
        std::size_t start = i;
        while (i < line.size() && line[i] != ' ' && line[i] != '\t' && line[i] != '\r')
            ++i;
        toks.emplace_back(line.substr(start, i - start), static_cast<int>(start + 1));
    }
    return toks;
}

bool parse_index(const std::string& tok, std::uint64_t& out) {
    if (tok.empty() || tok.find_first_not_of("0123456789") != std::string::npos)
        return false;
    try {
        out = std::stoull(tok);
    } catch (const std::out_of_range&) {
        return false;
    }
    return true;
}

} // namespace

NodeId parse_dag(DagStore& store, std::istream& in, const std::string& source_name) {
    std::unordered_map<std::uint64_t, NodeId> by_file_id;
    std::optional<NodeId> root;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto toks = tokenize(line);
        if (toks.empty()) continue;
        const auto& [kw, kwcol] = toks[0];
        if (kw == "node") {
            if (root)
                throw ParseError(source_name, lineno, kwcol, "node after root line");
            if (toks.size() < 3)
                throw ParseError(source_name, lineno, kwcol,
                                 "expected: node <id> <label> <succ>...");
            std::uint64_t fid;
            if (!parse_index(toks[1].first, fid))
                throw ParseError(source_name, lineno, toks[1].second,
                                 "bad node id '" + toks[1].first + "'");
            if (by_file_id.count(fid))
                throw ParseError(source_name, lineno, toks[1].second,
                                 "duplicate node id " + toks[1].first);
            const std::string& label = toks[2].first;
            SymbolId sym;
            unsigned rank;
            if (label == "_") {
                sym = kBoxSymbol;
                rank = 0;
            } else {
                auto found = store.alphabet().find(label);
                if (!found)
                    throw ParseError(source_name, lineno, toks[2].second,
                                     "unknown symbol '" + label + "'");
                sym = *found;
                rank = store.alphabet().rank(sym);
            }
            if (toks.size() - 3 != rank)
                throw ParseError(source_name, lineno, toks[2].second,
                                 "'" + label + "' takes " + std::to_string(rank) +
                                     " successor(s), got " +
                                     std::to_string(toks.size() - 3));
            std::vector<NodeId> kids;
            for (std::size_t i = 3; i < toks.size(); ++i) {
                std::uint64_t cid;
                if (!parse_index(toks[i].first, cid))
                    throw ParseError(source_name, lineno, toks[i].second,
                                     "bad successor id '" + toks[i].first + "'");
                auto it = by_file_id.find(cid);
                if (it == by_file_id.end())
                    throw ParseError(source_name, lineno, toks[i].second,
                                     "successor " + toks[i].first +
                                         " not defined yet (nodes must be topological)");
                kids.push_back(it->second);
            }
            by_file_id.emplace(fid, store.intern(sym, kids));
        } else if (kw == "root") {
            if (root)
                throw ParseError(source_name, lineno, kwcol, "second root line");
            if (toks.size() != 2)
                throw ParseError(source_name, lineno, kwcol, "expected: root <id>");
            std::uint64_t fid;
            if (!parse_index(toks[1].first, fid) || !by_file_id.count(fid))
                throw ParseError(source_name, lineno, toks[1].second,
                                 "root refers to undefined node '" + toks[1].first + "'");
            root = by_file_id[fid];
        } else {
            throw ParseError(source_name, lineno, kwcol,
                             "unexpected keyword '" + kw + "'");
        }
    }
    if (!root)
        throw ParseError(source_name, lineno + 1, 1, "missing root line");
    return *root;
}

NodeId chain_dag(DagStore& store, SymbolId leaf, SymbolId branch, unsigned n) {
    if (n == 0) throw std::invalid_argument("chain needs at least one node");
    if (store.alphabet().rank(leaf) != 0 || store.alphabet().rank(branch) != 2)
        throw std::invalid_argument("chain needs a nullary and a binary symbol");
    NodeId v = store.intern(leaf, {});
    for (unsigned i = 1; i < n; ++i) v = store.intern(branch, {v, v});
    return v;
}

} // namespace mta
