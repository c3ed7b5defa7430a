#ifndef MTA_LEARNER_HPP
#define MTA_LEARNER_HPP

#include <functional>
#include <iosfwd>
#include <optional>

#include "mta/equivalence.hpp"

namespace mta {

struct QueryStats {
    std::uint64_t membership_queries = 0;    // distinct table entries asked
    std::uint64_t equivalence_queries = 0;
    std::uint64_t largest_counterexample = 0; // DAG node count
    std::uint64_t scalar_ops = 0;             // field operations consumed
};

// Oracle for a tree series: pointwise values and hypothesis checking. The
// raw call counters track every call received; the learner separately counts
// distinct table entries (cache misses).
class Teacher {
public:
    virtual ~Teacher() = default;

    virtual const Field& field() const = 0;
    virtual const RankedAlphabet& alphabet() const = 0;

    Scalar membership(DagStore& store, NodeId tree) {
        ++membership_calls_;
        return answer_membership(store, tree);
    }
    // nullopt means the hypothesis matches; otherwise a counterexample DAG
    // whose unfolded value differs from the hypothesis's.
    std::optional<NodeId> equivalence(DagStore& store, const Mta& hypothesis) {
        ++equivalence_calls_;
        return answer_equivalence(store, hypothesis);
    }

    std::uint64_t membership_calls() const { return membership_calls_; }
    std::uint64_t equivalence_calls() const { return equivalence_calls_; }

protected:
    virtual Scalar answer_membership(DagStore& store, NodeId tree) = 0;
    virtual std::optional<NodeId> answer_equivalence(DagStore& store,
                                                     const Mta& hypothesis) = 0;

private:
    std::uint64_t membership_calls_ = 0;
    std::uint64_t equivalence_calls_ = 0;
};

// Answers queries from a fixed target automaton; counterexamples come from
// check_equiv, so they are subtree-closed DAGs of at most dim(target) +
// dim(hypothesis) nodes.
class SimulatedTeacher final : public Teacher {
public:
    explicit SimulatedTeacher(Mta target) : target_(std::move(target)) {}

    const Field& field() const override { return target_.field(); }
    const RankedAlphabet& alphabet() const override { return target_.alphabet(); }
    const Mta& target() const { return target_; }

protected:
    Scalar answer_membership(DagStore& store, NodeId tree) override;
    std::optional<NodeId> answer_equivalence(DagStore& store, const Mta& hypothesis) override;

private:
    Mta target_;
};

// Observation table: rows are trees, columns are contexts (columns[0] is
// always the box), table(i, j) = f(columns[j][rows[i]]). The rows stay
// linearly independent throughout learning.
struct ObservationState {
    std::vector<NodeId> rows;
    std::vector<NodeId> columns;
    Matrix table;
};

// Supplies table entries: hankel(t, c) = f(c[t]).
using HankelFn = std::function<Scalar(NodeId tree, NodeId context)>;

// Extends the rows with one-step trees sigma(rows...) whose value rows are
// independent of the current ones, until every such row lies in the span.
// Symbols are tried in declaration order and index tuples lexicographically;
// each row addition restarts the scan (already-checked combinations are
// skipped, which is sound because added rows only grow the span).
void close_observation(DagStore& store, ObservationState& obs, const HankelFn& hankel);

// Reads an automaton off a closed table: one state per row, final weights
// from the box column, transitions solved from mu(sigma) * table = values of
// the one-step extensions.
Mta build_hypothesis(DagStore& store, const Field& field, const ObservationState& obs,
                     const HankelFn& hankel);

struct BadSubtree {
    NodeId node;                  // sigma(children...)
    SymbolId symbol;
    std::vector<NodeId> children; // each already explained by the table
    std::size_t column;           // index into obs.columns witnessing the gap
};

// First node of z (nondecreasing height, ties by id) whose value row over
// the columns differs from the run-vector prediction mu(node) * table, plus
// the first disagreeing column. Throws TeacherInconsistencyError when every
// node checks out, since then z cannot be a counterexample.
BadSubtree find_bad_subtree(const Mta& hypothesis, DagStore& store,
                            const ObservationState& obs, NodeId z, const HankelFn& hankel);

// For the gap c at sigma(tau_1..tau_k): adds the columns
// c[sigma(rows_{i_1},..,rows_{i_{j-1}}, box, tau_{j+1},..,tau_k)] for every
// position j and row tuple (lexicographic, deduplicated), then appends each
// tau_j whose extended row is independent. Throws TeacherInconsistencyError
// when no row gets added.
void absorb_counterexample(DagStore& store, ObservationState& obs, const BadSubtree& found,
                           const HankelFn& hankel);

// Exact learning loop: start from the zero hypothesis, then alternate
// closure, hypothesis building and equivalence queries, absorbing each
// counterexample, until the teacher accepts. The store must use the
// teacher's alphabet. Optional transcript lines: `MQ <root-id> <value>` per
// distinct table entry, `EQ <dim> -> YES|CEX <size>` per hypothesis.
std::pair<Mta, QueryStats> lmta(Teacher& teacher, DagStore& store,
                                std::ostream* transcript = nullptr);

// Minimal equivalent automaton, obtained by learning from a simulated
// teacher for a.
Mta minimize(const Mta& a, DagStore& store);

} // namespace mta

#endif
