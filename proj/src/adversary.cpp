#include "mta/adversary.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

namespace mta {

HardFamilySpec::HardFamilySpec(Field field_in, unsigned n_in, RankedAlphabet alphabet_in,
                               const std::string& sigma0_name, const std::string& sigma1_name)
    : field(field_in), n(n_in), alphabet(std::move(alphabet_in)) {
    if (n == 0) throw std::invalid_argument("the family needs n >= 1");
    auto s0 = alphabet.find(sigma0_name);
    auto s1 = alphabet.find(sigma1_name);
    if (!s0 || alphabet.rank(*s0) != 0)
        throw std::invalid_argument("'" + sigma0_name + "' must be a nullary symbol");
    if (!s1 || alphabet.rank(*s1) != 1)
        throw std::invalid_argument("'" + sigma1_name + "' must be a unary symbol");
    if (*s0 == *s1) throw std::invalid_argument("chain symbols must be distinct");
    sigma0 = *s0;
    sigma1 = *s1;
    for (SymbolId s = 0; s < alphabet.size(); ++s)
        if (s != sigma0 && s != sigma1) heavy_symbols.push_back(s);
}

namespace {

std::size_t pow_size(std::size_t base, unsigned exp) {
    std::size_t r = 1;
    for (unsigned i = 0; i < exp; ++i) {
        if (base != 0 && r > (std::size_t(1) << 40) / base)
            throw std::invalid_argument("heavy matrix too large");
        r *= base;
    }
    return r;
}

Matrix cyclic_step(const Field& f, unsigned n) {
    Matrix p(f, n, n);
    for (unsigned i = 0; i < n; ++i) p.at(i, (i + 1) % n) = Scalar::one(f);
    return p;
}

} // namespace

Mta build_hard_automaton(const HardFamilySpec& spec, const HeavyEntries& entries) {
    const Field& f = spec.field;
    unsigned n = spec.n;
    std::size_t dim = 2 * std::size_t(n);
    for (const auto& [s, b] : entries)
        if (std::find(spec.heavy_symbols.begin(), spec.heavy_symbols.end(), s) ==
            spec.heavy_symbols.end())
            throw std::invalid_argument("entry for a symbol that is not heavy");

    Scalar one = Scalar::one(f);
    Matrix e1_row(f, 1, n);
    e1_row.at(0, 0) = one;
    Matrix pick_first(f, 1, 2);
    pick_first.at(0, 0) = one;
    Matrix both(f, 1, 2);
    both.at(0, 0) = one;
    both.at(0, 1) = one;
    // [I; -I]: first block tracks the value, second carries its negation so
    // that a second heavy node cancels the two copies.
    Matrix split(f, 2 * std::size_t(n), n);
    for (unsigned i = 0; i < n; ++i) {
        split.at(i, i) = one;
        split.at(n + i, i) = -one;
    }

    std::vector<Matrix> mus(spec.alphabet.size());
    mus[spec.sigma0] = kron(pick_first, e1_row);
    mus[spec.sigma1] = kron(Matrix::identity(f, 2), cyclic_step(f, n));
    for (SymbolId s : spec.heavy_symbols) {
        auto it = entries.find(s);
        if (it == entries.end())
            throw std::invalid_argument("missing entries for heavy symbol '" +
                                        spec.alphabet.name(s) + "'");
        unsigned k = spec.alphabet.rank(s);
        const Matrix& b = it->second;
        if (b.rows() != pow_size(n, k) || b.cols() != n || b.field() != f)
            throw std::invalid_argument("entries for '" + spec.alphabet.name(s) +
                                        "' have the wrong shape or field");
        std::vector<Matrix> factors(k, split);
        mus[s] = kron(both, kron_all(factors, f) * b);
    }
    Matrix gamma_blocks(f, 2, 1);
    gamma_blocks.at(0, 0) = one;
    Matrix e1_col(f, n, 1);
    e1_col.at(0, 0) = one;
    return Mta(f, spec.alphabet, dim, std::move(mus), kron(gamma_blocks, e1_col));
}

namespace {

struct HardPattern {
    enum Kind { Chain, SingleHeavy, MultiHeavy } kind;
    unsigned chain_length = 0; // Chain: number of unary steps
    SymbolId symbol = 0;       // SingleHeavy: the heavy symbol
    std::size_t row = 0;       // SingleHeavy: flattened child-residue tuple
    std::size_t col = 0;       // SingleHeavy: (n - j) mod n for j steps above
};

HardPattern classify(const HardFamilySpec& spec, const DagStore& store, NodeId tree) {
    if (!(store.alphabet() == spec.alphabet))
        throw std::invalid_argument("tree is over a different alphabet");
    if (!store.is_tree(tree)) throw std::invalid_argument("expected a tree, got a context");
    // Heavy-node count of the unfolding, saturated at 2.
    std::vector<NodeId> order = store.reachable(tree);
    std::unordered_map<NodeId, unsigned> heavies;
    for (NodeId v : order) {
        unsigned c = (store.symbol(v) != spec.sigma0 && store.symbol(v) != spec.sigma1) ? 1 : 0;
        for (NodeId ch : store.children(v)) c = std::min(2u, c + heavies.at(ch));
        heavies.emplace(v, c);
    }
    unsigned total = heavies.at(tree);
    if (total == 0) return {HardPattern::Chain, store.height(tree), 0, 0, 0};
    if (total >= 2) return {HardPattern::MultiHeavy, 0, 0, 0, 0};
    unsigned j = 0;
    NodeId v = tree;
    while (store.symbol(v) == spec.sigma1) {
        ++j;
        v = store.children(v)[0];
    }
    SymbolId s = store.symbol(v);
    unsigned n = spec.n;
    std::size_t row = 0;
    for (NodeId child : store.children(v)) row = row * n + store.height(child) % n;
    std::size_t col = (n - j % n) % n;
    return {HardPattern::SingleHeavy, 0, s, row, col};
}

} // namespace

Scalar hard_series_value(const HardFamilySpec& spec, const HeavyEntries& entries,
                         const DagStore& store, NodeId tree) {
    HardPattern p = classify(spec, store, tree);
    switch (p.kind) {
        case HardPattern::Chain:
            return p.chain_length % spec.n == 0 ? Scalar::one(spec.field)
                                                : Scalar::zero(spec.field);
        case HardPattern::MultiHeavy: return Scalar::zero(spec.field);
        case HardPattern::SingleHeavy: {
            auto it = entries.find(p.symbol);
            if (it == entries.end())
                throw std::invalid_argument("missing entries for heavy symbol '" +
                                            spec.alphabet.name(p.symbol) + "'");
            return it->second.at(p.row, p.col);
        }
    }
    throw std::logic_error("unreachable");
}

AdversarialTeacher::AdversarialTeacher(HardFamilySpec spec, std::uint64_t seed)
    : spec_(std::move(spec)), rng_(seed) {}

std::size_t AdversarialTeacher::total_entries() const {
    std::size_t total = 0;
    for (SymbolId s : spec_.heavy_symbols)
        total += pow_size(spec_.n, spec_.alphabet.rank(s)) * spec_.n;
    return total;
}

Scalar AdversarialTeacher::draw_nonzero() {
    for (;;) {
        Scalar v = Scalar::from_long(spec_.field, rng_.int_range(1, 7));
        if (!v.is_zero()) return v;
    }
}

Scalar AdversarialTeacher::reveal(const EntryKey& key) {
    auto it = revealed_.find(key);
    if (it != revealed_.end()) return it->second;
    Scalar v = draw_nonzero();
    revealed_.emplace(key, v);
    return v;
}

std::optional<AdversarialTeacher::EntryKey> AdversarialTeacher::first_unrevealed() const {
    for (SymbolId s : spec_.heavy_symbols) {
        std::size_t rows = pow_size(spec_.n, spec_.alphabet.rank(s));
        for (std::size_t row = 0; row < rows; ++row)
            for (std::size_t col = 0; col < spec_.n; ++col)
                if (!revealed_.count({s, row, col})) return EntryKey{s, row, col};
    }
    return std::nullopt;
}

void AdversarialTeacher::commit_remaining() {
    while (auto key = first_unrevealed()) reveal(*key);
}

Mta AdversarialTeacher::committed_automaton() const {
    if (!fully_revealed()) throw std::logic_error("entries are still unrevealed");
    HeavyEntries entries;
    for (SymbolId s : spec_.heavy_symbols) {
        std::size_t rows = pow_size(spec_.n, spec_.alphabet.rank(s));
        Matrix b(spec_.field, rows, spec_.n);
        for (std::size_t row = 0; row < rows; ++row)
            for (std::size_t col = 0; col < spec_.n; ++col)
                b.at(row, col) = revealed_.at({s, row, col});
        entries.emplace(s, std::move(b));
    }
    return build_hard_automaton(spec_, entries);
}

Scalar AdversarialTeacher::answer_membership(DagStore& store, NodeId tree) {
    HardPattern p = classify(spec_, store, tree);
    switch (p.kind) {
        case HardPattern::Chain:
            return p.chain_length % spec_.n == 0 ? Scalar::one(spec_.field)
                                                 : Scalar::zero(spec_.field);
        case HardPattern::MultiHeavy: return Scalar::zero(spec_.field);
        case HardPattern::SingleHeavy: return reveal({p.symbol, p.row, p.col});
    }
    throw std::logic_error("unreachable");
}

std::optional<NodeId> AdversarialTeacher::answer_equivalence(DagStore& store,
                                                             const Mta& hypothesis) {
    auto key = first_unrevealed();
    if (!key) {
        EquivResult res = check_equiv(committed_automaton(), hypothesis, store);
        if (res.equivalent) return std::nullopt;
        return res.counterexample;
    }
    auto [s, row, col] = *key;
    unsigned n = spec_.n;
    unsigned k = spec_.alphabet.rank(s);
    // Single-heavy tree reading exactly this entry: chain children encode the
    // row digits, and n - col unary steps on top select the column.
    std::vector<std::size_t> digits(k, 0);
    std::size_t x = row;
    for (unsigned d = k; d-- > 0;) {
        digits[d] = x % n;
        x /= n;
    }
    std::vector<NodeId> kids;
    kids.reserve(k);
    for (unsigned d = 0; d < k; ++d) {
        NodeId chain = store.intern(spec_.sigma0, {});
        for (std::size_t i = 0; i < digits[d]; ++i) chain = store.intern(spec_.sigma1, {chain});
        kids.push_back(chain);
    }
    NodeId tree = store.intern(s, kids);
    for (std::size_t i = 0, steps = n - col; i < steps; ++i)
        tree = store.intern(spec_.sigma1, {tree});
    // Fix the entry to disagree with the hypothesis at this tree.
    Scalar predicted = eval(hypothesis, store, tree);
    Scalar value = Scalar::from_long(spec_.field, rng_.int_range(1, 7));
    if (value == predicted) value = predicted + Scalar::one(spec_.field);
    revealed_.emplace(*key, value);
    return tree;
}

std::uint64_t query_lower_bound(const HardFamilySpec& spec) {
    unsigned __int128 r = 2 * static_cast<unsigned __int128>(spec.n);
    unsigned m = spec.alphabet.max_rank();
    unsigned __int128 sum = 0;
    for (SymbolId s = 0; s < spec.alphabet.size(); ++s) {
        unsigned __int128 term = 1;
        for (unsigned i = 0; i <= spec.alphabet.rank(s); ++i) term *= r;
        sum += term;
    }
    unsigned __int128 overhead = r * r + r;
    if (sum <= overhead) return 0;
    unsigned __int128 bound = (sum - overhead) >> (m + 1);
    if (bound > std::numeric_limits<std::uint64_t>::max())
        return std::numeric_limits<std::uint64_t>::max();
    return static_cast<std::uint64_t>(bound);
}

} // namespace mta
