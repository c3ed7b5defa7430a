#ifndef MTA_EQUIVALENCE_HPP
#define MTA_EQUIVALENCE_HPP

#include <optional>

#include "mta/automaton.hpp"

namespace mta {

// Basis of the space spanned by {mu(t) : t a tree}, with one witness tree
// DAG per basis vector. Witnesses are subtree-closed: every sub-DAG of a
// witness is an earlier witness, so witness i has at most i nodes.
struct ForwardBasis {
    std::vector<Matrix> vectors;   // 1 x n rows in discovery order
    std::vector<NodeId> witnesses; // canonical DAGs in the given store
};

// Worklist closure seeded by the nullary symbols in declaration order;
// candidate tuples are scanned per symbol in declaration order and
// lexicographically, restarting after every growth but skipping already
// processed (symbol, tuple) pairs. At most dim(a) vectors result.
ForwardBasis forward_basis(const Mta& a, DagStore& store);

struct EquivResult {
    bool equivalent;
    std::optional<NodeId> counterexample; // tree DAG with differing weights
};

// Decides weight-equality of two automata over the same field and alphabet
// by building the difference direct sum and checking every forward-basis
// vector against the stacked final vector. A returned counterexample is the
// witness of the first violating basis vector, hence has at most
// dim(a) + dim(b) nodes; it is never unfolded.
EquivResult check_equiv(const Mta& a, const Mta& b, DagStore& store);

// Enumerates every tree of height < height_bound (layer by layer, evaluating
// each tree once via shared sub-DAGs) and compares weights, stopping at the
// first disagreement. Throws BoundExceededError once more than tree_budget
// trees have been enumerated.
bool brute_force_equiv(const Mta& a, const Mta& b, DagStore& store,
                       unsigned height_bound, std::uint64_t tree_budget = 1000000);

} // namespace mta

#endif
