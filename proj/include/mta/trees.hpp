#ifndef MTA_TREES_HPP
#define MTA_TREES_HPP

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "mta/errors.hpp"

namespace mta {

using SymbolId = std::uint32_t;
using NodeId = std::uint32_t;

// Hole marker for contexts; a leaf in the DAG, never part of an alphabet.
inline constexpr SymbolId kBoxSymbol = std::numeric_limits<SymbolId>::max();

// Finite ranked alphabet with declaration order preserved. At least one
// nullary symbol is required, otherwise no trees exist.
class RankedAlphabet {
public:
    RankedAlphabet() = default;
    explicit RankedAlphabet(const std::vector<std::pair<std::string, unsigned>>& symbols);

    std::size_t size() const { return names_.size(); }
    const std::string& name(SymbolId id) const { return names_[id]; }
    unsigned rank(SymbolId id) const { return ranks_[id]; }
    std::optional<SymbolId> find(const std::string& name) const;
    unsigned max_rank() const;

    bool operator==(const RankedAlphabet& o) const {
        return names_ == o.names_ && ranks_ == o.ranks_;
    }
    bool operator!=(const RankedAlphabet& o) const { return !(*this == o); }

private:
    std::vector<std::string> names_;
    std::vector<unsigned> ranks_;
    std::unordered_map<std::string, SymbolId> index_;
};

// Explicit tree; used for unfoldings and as the plain-recursion side of
// DAG-vs-tree checks. symbol may be kBoxSymbol for context holes.
struct Tree {
    SymbolId symbol = 0;
    std::vector<Tree> children;

    bool operator==(const Tree& o) const {
        return symbol == o.symbol && children == o.children;
    }
};

struct TreeStats {
    std::uint64_t size = 0;
    unsigned height = 0;
    std::vector<std::uint64_t> symbol_counts; // indexed by SymbolId
    std::uint64_t box_count = 0;
};

TreeStats tree_stats(const RankedAlphabet& alphabet, const Tree& t);

// Hash-consing store for ordered DAGs over one alphabet. Interning assigns
// ids in creation order, so every node's successors have smaller ids and a
// (symbol, successors) pair exists at most once: equal subtrees share one
// node, and id equality is structural equality. Single-writer; reads are safe
// concurrently once building is done.
class DagStore {
public:
    explicit DagStore(RankedAlphabet alphabet);
    DagStore(const DagStore&) = delete;
    DagStore& operator=(const DagStore&) = delete;

    const RankedAlphabet& alphabet() const { return alphabet_; }
    std::size_t node_count() const { return nodes_.size(); }

    NodeId intern(SymbolId symbol, const std::vector<NodeId>& children);
    NodeId box();
    NodeId intern_tree(const Tree& t);

    SymbolId symbol(NodeId v) const { return nodes_[v].symbol; }
    const std::vector<NodeId>& children(NodeId v) const { return nodes_[v].children; }
    unsigned height(NodeId v) const { return nodes_[v].height; }
    bool contains_box(NodeId v) const { return nodes_[v].box_paths > 0; }
    // A context has exactly one box node and a unique root-to-box path.
    bool is_context(NodeId v) const { return nodes_[v].box_paths == 1; }
    bool is_tree(NodeId v) const { return nodes_[v].box_paths == 0; }

    // Nodes reachable from root in ascending id order (successors first).
    std::vector<NodeId> reachable(NodeId root) const;
    // Number of distinct nodes reachable from root, the DAG's size.
    std::uint64_t dag_size(NodeId root) const;
    // Size of the unfolded tree; saturates at the uint64 maximum.
    std::uint64_t unfold_size(NodeId root) const { return nodes_[root].unfold_size; }

    Tree unfold(NodeId root, std::uint64_t max_nodes = 1000000) const;

    // Substitutes g for the box of context; g may be a tree or a context.
    NodeId concat(NodeId context, NodeId g);

    // Reachable nodes ordered by nondecreasing height, ties by node id.
    std::vector<NodeId> sub_dags(NodeId root) const;

    std::string term_string(NodeId root) const; // f(a,g(a)) notation, for diagnostics

private:
    struct Node {
        SymbolId symbol;
        std::vector<NodeId> children;
        unsigned height;
        std::uint8_t box_paths; // saturates at 2
        std::uint64_t unfold_size;
    };

    struct KeyHash {
        std::size_t operator()(const std::pair<SymbolId, std::vector<NodeId>>& k) const;
    };

    RankedAlphabet alphabet_;
    std::vector<Node> nodes_;
    std::unordered_map<std::pair<SymbolId, std::vector<NodeId>>, NodeId, KeyHash> pool_;
};

// Text format: one `node <id> <label> <succ>...` line per node with
// successors already defined, then `root <id>`. `_` is the box label.
void print_dag(const DagStore& store, NodeId root, std::ostream& out);
NodeId parse_dag(DagStore& store, std::istream& in, const std::string& source_name);

// Chain DAG whose unfolding is the perfect binary tree with 2^n - 1 nodes:
// v_1 is the leaf symbol, v_{i+1} = branch(v_i, v_i), the root is v_n.
NodeId chain_dag(DagStore& store, SymbolId leaf, SymbolId branch, unsigned n);

} // namespace mta

#endif
