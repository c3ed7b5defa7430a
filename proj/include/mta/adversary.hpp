#ifndef MTA_ADVERSARY_HPP
#define MTA_ADVERSARY_HPP

#include <map>

#include "mta/learner.hpp"
#include "mta/rng.hpp"

namespace mta {

// A family of dimension-2n automata whose series is almost everywhere zero:
// a designated nullary symbol starts a counter, a designated unary symbol
// steps it cyclically, and every other ("heavy") symbol carries a hidden
// coefficient matrix B of shape n^rank x n. Trees with zero heavy nodes
// evaluate by counter position, trees with two or more heavy nodes cancel to
// zero, and trees with exactly one heavy node read a single B entry - so an
// oracle answer reveals at most one entry at a time.
struct HardFamilySpec {
    Field field;
    unsigned n = 1;
    RankedAlphabet alphabet;
    SymbolId sigma0 = 0;
    SymbolId sigma1 = 0;
    std::vector<SymbolId> heavy_symbols;

    HardFamilySpec(Field field, unsigned n, RankedAlphabet alphabet,
                   const std::string& sigma0_name, const std::string& sigma1_name);
};

// Coefficient matrix per heavy symbol.
using HeavyEntries = std::map<SymbolId, Matrix>;

// The block automaton: mu(sigma0) = [1 0] (x) e1, mu(sigma1) = I2 (x) P for
// the cyclic step P, mu(heavy) = [1 1] (x) ([I; -I]^{(x)k} B(heavy)), and
// final vector [1 0]^T (x) e1^T. Every heavy symbol needs a B matrix of
// shape n^rank x n over the spec field.
Mta build_hard_automaton(const HardFamilySpec& spec, const HeavyEntries& entries);

// Closed-form value by pattern classification, without touching matrices:
// a pure chain of j unary steps gives 1 when j is divisible by n and 0
// otherwise; two or more heavy nodes give 0; exactly one heavy node under j
// unary steps with chain children of lengths i_1..i_k reads
// B[(i_1 mod n, ..., i_k mod n)][(n - j) mod n].
Scalar hard_series_value(const HardFamilySpec& spec, const HeavyEntries& entries,
                         const DagStore& store, NodeId tree);

// Teacher that commits to B entries only when an answer depends on them.
// Pattern queries (chain or multi-heavy trees) are answered from the closed
// form for free; a single-heavy query draws the touched entry from a seeded
// generator over a small nonzero range and records it. Equivalence queries
// before full revelation pick the lexicographically first unrevealed entry
// (symbol declaration order, then row, then column), fix it to a value
// different from the hypothesis's weight on the corresponding single-heavy
// tree, and return that tree; afterwards they answer truthfully against the
// committed automaton.
class AdversarialTeacher final : public Teacher {
public:
    AdversarialTeacher(HardFamilySpec spec, std::uint64_t seed);

    const Field& field() const override { return spec_.field; }
    const RankedAlphabet& alphabet() const override { return spec_.alphabet; }
    const HardFamilySpec& family() const { return spec_; }

    std::size_t total_entries() const;
    std::size_t revealed_count() const { return revealed_.size(); }
    bool fully_revealed() const { return revealed_.size() == total_entries(); }

    // Draws every still-unknown entry, freezing the target series.
    void commit_remaining();
    // Automaton over the revealed entries; requires full revelation.
    Mta committed_automaton() const;

protected:
    Scalar answer_membership(DagStore& store, NodeId tree) override;
    std::optional<NodeId> answer_equivalence(DagStore& store, const Mta& hypothesis) override;

private:
    using EntryKey = std::tuple<SymbolId, std::size_t, std::size_t>;

    Scalar draw_nonzero();
    Scalar reveal(const EntryKey& key);
    std::optional<EntryKey> first_unrevealed() const;

    HardFamilySpec spec_;
    Rng rng_;
    std::map<EntryKey, Scalar> revealed_;
};

// floor((sum_sigma r^(rank+1) - r^2 - r) / 2^(m+1)) with r = 2n and m the
// largest rank; any learner needs at least this many queries against the
// family, and 0 is reported for degenerate alphabets.
std::uint64_t query_lower_bound(const HardFamilySpec& spec);

} // namespace mta

#endif
