#ifndef MTA_AUTOMATON_HPP
#define MTA_AUTOMATON_HPP

#include <iosfwd>
#include <unordered_map>

#include "mta/algebra.hpp"
#include "mta/trees.hpp"

namespace mta {

// Multiplicity tree automaton: dimension n, one transition matrix per symbol
// of shape n^rank x n, and an n x 1 final vector. The weight of a tree t is
// mu(t) * final, where mu extends multilinearly: mu(s(t_1..t_k)) =
// (mu(t_1) (x) ... (x) mu(t_k)) * mu(s). Dimension 0 is legal and gives the
// zero series.
class Mta {
public:
    Mta(Field field, RankedAlphabet alphabet, std::size_t dim,
        std::vector<Matrix> transitions, Matrix final_vector);

    static Mta zero_automaton(const Field& field, const RankedAlphabet& alphabet);

    const Field& field() const { return field_; }
    const RankedAlphabet& alphabet() const { return alphabet_; }
    std::size_t dim() const { return dim_; }
    const Matrix& mu(SymbolId s) const { return transitions_[s]; }
    const Matrix& final_vector() const { return final_; }

    // Representation size: sum over symbols of n^(rank+1), plus n.
    std::uint64_t representation_size() const;

private:
    Field field_;
    RankedAlphabet alphabet_;
    std::size_t dim_;
    std::vector<Matrix> transitions_;
    Matrix final_;
};

// Row index of the tuple (digits in [0, base)) under the row-major
// flattening that matches kron: the last coordinate varies fastest.
std::size_t flatten_index(const std::vector<std::size_t>& digits, std::size_t base);

// (v_1 (x) ... (x) v_k) * mu for row vectors v_i, walking only tuples whose
// kron coefficient is nonzero. For k = 0 this is row 0 of mu.
Matrix apply_transition(const Matrix& mu, const std::vector<const Matrix*>& child_rows);

struct RunResult {
    std::unordered_map<NodeId, Matrix> vectors; // per reachable node, 1 x n
    std::size_t applications = 0;               // one per distinct node
};

// Evaluates mu on every node of the DAG bottom-up; each distinct node is
// computed exactly once.
RunResult run_dag(const Mta& a, const DagStore& store, NodeId root);

Scalar eval(const Mta& a, const DagStore& store, NodeId root);

// The n x n matrix of a context: mu(box) = I, and plugging a tree into the
// context satisfies mu(c[t]) = mu(t) * mu_context(c).
Matrix mu_context(const Mta& a, const DagStore& store, NodeId context);

// Product automaton of dimension n1*n2 recognizing the pointwise product.
// The row permutation that reorders the paired Kronecker factors is realized
// by index arithmetic: row ((i1,j1),...,(ik,jk)) of the result is row
// ((i1,...,ik),(j1,...,jk)) of mu_a (x) mu_b. No permutation matrix is built.
Mta product(const Mta& a, const Mta& b);

// Direct sum of dimension n1+n2; rows of mixed block tuples are zero, so
// mu(t) = [mu_a(t) | mu_b(t)] for every tree. With negate_second the final
// vector is [gamma_a; -gamma_b] and the weight is the difference of weights.
Mta direct_sum(const Mta& a, const Mta& b, bool negate_second);

// Automaton of dimension n whose series is 1 on the perfect binary tree of
// height n-1 (over {leaf, branch}) and 0 on every other tree.
Mta perfect_tree_indicator(const Field& field, const RankedAlphabet& alphabet,
                           SymbolId leaf, SymbolId branch, std::size_t n);

// Text format: `mta <field> <n>`, `sym <name> <rank>` lines in declaration
// order, per-symbol `trans <name>` blocks with n^rank rows of n scalars, and
// `final` with n scalars.
void print_mta(const Mta& a, std::ostream& out);
Mta parse_mta(std::istream& in, const std::string& source_name);

} // namespace mta

#endif
