#ifndef MTA_CIRCUITS_HPP
#define MTA_CIRCUITS_HPP

#include <iosfwd>
#include <optional>

#include "mta/automaton.hpp"
#include "mta/rng.hpp"

namespace mta {

using GateId = std::uint32_t;

enum class GateOp : std::uint8_t { Zero, One, Var, Add, Mul, Sub };

struct Gate {
    GateOp op;
    GateId lhs = 0;
    GateId rhs = 0;
    std::uint32_t var = 0;

    bool operator==(const Gate& o) const {
        return op == o.op && lhs == o.lhs && rhs == o.rhs && var == o.var;
    }
};

// Arithmetic circuit as a gate list in topological order with one designated
// output. The builder hash-conses gates, so structurally equal subcircuits
// share one gate.
class Circuit {
public:
    GateId zero();
    GateId one();
    GateId var(std::uint32_t index);
    GateId add(GateId a, GateId b);
    GateId mul(GateId a, GateId b);
    GateId sub(GateId a, GateId b);

    void set_output(GateId g);
    GateId output() const;

    std::size_t size() const { return gates_.size(); }
    const Gate& gate(GateId g) const { return gates_[g]; }
    unsigned gate_height(GateId g) const { return heights_[g]; }
    unsigned height() const; // of the output gate

    bool has_vars() const;
    bool has_sub() const;
    std::uint32_t var_count() const; // one past the largest used index

    // Reachable-from-output gates only, renumbered; output preserved.
    Circuit trimmed() const;

private:
    GateId push(Gate g);

    struct GateHash {
        std::size_t operator()(const Gate& g) const;
    };

    std::vector<Gate> gates_;
    std::vector<unsigned> heights_;
    std::unordered_map<Gate, GateId, GateHash> pool_;
    std::optional<GateId> output_;
};

// log2 bound on the magnitude of every gate value (saturating), assuming
// each variable needs at most var_bits bits.
std::uint64_t bit_size_bound(const Circuit& c, std::uint64_t var_bits = 1);
// Bound on the total degree in the variables (saturating).
std::uint64_t degree_bound(const Circuit& c);

// Exact evaluation over the integers. Throws BoundExceededError when the
// estimated bit size exceeds max_bits.
mpz_class eval_exact(const Circuit& c, const std::vector<mpz_class>& vars = {},
                     std::uint64_t max_bits = 1000000);

// Evaluation modulo a word-sized prime.
std::uint64_t eval_mod(const Circuit& c, std::uint64_t p,
                       const std::vector<std::uint64_t>& vars = {});

struct AcitCertificate {
    std::uint64_t prime;
    std::vector<std::uint64_t> assignment;
    std::uint64_t residue; // nonzero evaluation of the circuit mod prime
};

struct AcitTestResult {
    bool certainly_nonzero;
    std::optional<AcitCertificate> certificate; // present iff nonzero
    unsigned trials;
    unsigned per_trial_bits; // soundness gained per trial
};

// Randomized zero test. Each trial samples a uniform prime from [2^62, 2^63)
// and uniform variable residues, then evaluates modulo the prime. A nonzero
// residue proves the circuit nonzero. A circuit of height h has values of
// magnitude at most 2^(2^h), hence at most 2^h prime divisors, while the
// sampled range holds at least 2^55 primes: a trial misses a nonzero value
// with probability at most 2^(h-55) (one bit more is charged when variables
// are present, covering the Schwartz-Zippel failure). Trials repeat until
// the bounds multiply to at most 2^-confidence_bits.
AcitTestResult acit_random_test(const Circuit& c, unsigned confidence_bits, Rng& rng);

// Circuit whose value is the sum of the automaton's weights over all trees
// of height < levels. Rational entries are carried as (numerator,
// denominator) gate pairs; the output is the numerator, which is zero
// exactly when the sum is. Requires the rational field.
Circuit sum_series_circuit(const Mta& a, unsigned levels);

// Variable-free circuit that is zero iff the automata are weight-equal:
// the sum over all trees of height < dim(a)+dim(b) of the squared weight
// difference, assembled from the three pairwise-product automata.
Circuit equiv_to_acit(const Mta& a, const Mta& b);

// Two subtraction-free circuits (positive and negative track) with
// value(c) = value(pos) - value(neg).
std::pair<Circuit, Circuit> split_subtraction(const Circuit& c);

// Circuit with per-gate heights satisfying: children of a height-i gate both
// have height i-1, + gates sit at even heights, x gates at odd heights,
// inputs at height 0, and the output height is even.
struct NormalizedCircuit {
    Circuit circuit;
    std::vector<unsigned> heights; // indexed by gate id
    unsigned output_height = 0;
};

// Pads a {+, x}-circuit with relay gates (x1 towers at odd target heights,
// +0 towers at even ones) so every path from a leaf to a gate has the same
// length and the parity discipline above holds. The value is unchanged.
// Subtraction or variable gates are rejected.
NormalizedCircuit normalize_circuit(const Circuit& c);

void validate_normalized(const NormalizedCircuit& nc);

// Alphabet {s0/0, s1/1, s2/2} used by the circuit-to-automaton reduction.
RankedAlphabet acit_alphabet();

// Automaton with one state per gate: on the canonical ladder tree of the
// output's height it evaluates to the circuit's value, on every other tree
// to 0. Input-1 gates feed s0, + gates feed s1 (coefficient 2 when both
// children coincide), x gates feed s2.
Mta acit_to_mta(const NormalizedCircuit& nc);

// Canonical ladder tree: t_0 = s0, t_{i+1} = s1(t_i) for odd i and
// s2(t_i, t_i) for even i; the store alphabet must be acit_alphabet().
NodeId canonical_ladder(DagStore& store, unsigned height);

// Text format: `gate <id> zero|one|var <i>|add <l> <r>|mul <l> <r>|sub <l> <r>`
// lines in topological order, then `output <id>`.
void print_circuit(const Circuit& c, std::ostream& out);
Circuit parse_circuit(std::istream& in, const std::string& source_name);

} // namespace mta

#endif
