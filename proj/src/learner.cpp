#include "mta/learner.hpp"

#include <algorithm>
#include <ostream>
#include <set>
#include <stdexcept>

namespace mta {

Scalar SimulatedTeacher::answer_membership(DagStore& store, NodeId tree) {
    return eval(target_, store, tree);
}

std::optional<NodeId> SimulatedTeacher::answer_equivalence(DagStore& store,
                                                           const Mta& hypothesis) {
    EquivResult res = check_equiv(target_, hypothesis, store);
    if (res.equivalent) return std::nullopt;
    return res.counterexample;
}

namespace {

// Lexicographic successor over [0, base)^k; false after the last tuple.
bool next_tuple(std::vector<std::size_t>& tuple, std::size_t base) {
    for (std::size_t i = tuple.size(); i-- > 0;) {
        if (++tuple[i] < base) return true;
        tuple[i] = 0;
    }
    return false;
}

Matrix value_row(const Field& f, DagStore& store, const ObservationState& obs, NodeId t,
                 const HankelFn& hankel) {
    Matrix r(f, 1, obs.columns.size());
    for (std::size_t j = 0; j < obs.columns.size(); ++j) r.at(0, j) = hankel(t, obs.columns[j]);
    return r;
}

void append_row(ObservationState& obs, NodeId t, const Matrix& row) {
    const Field& f = obs.table.field();
    Matrix nt(f, obs.table.rows() + 1, obs.table.cols());
    for (std::size_t i = 0; i < obs.table.rows(); ++i)
        for (std::size_t j = 0; j < obs.table.cols(); ++j) nt.at(i, j) = obs.table.at(i, j);
    for (std::size_t j = 0; j < obs.table.cols(); ++j)
        nt.at(obs.table.rows(), j) = row.at(0, j);
    obs.table = std::move(nt);
    obs.rows.push_back(t);
}

void append_column(ObservationState& obs, NodeId ctx, const HankelFn& hankel) {
    const Field& f = obs.table.field();
    Matrix nt(f, obs.table.rows(), obs.table.cols() + 1);
    for (std::size_t i = 0; i < obs.table.rows(); ++i) {
        for (std::size_t j = 0; j < obs.table.cols(); ++j) nt.at(i, j) = obs.table.at(i, j);
        nt.at(i, obs.table.cols()) = hankel(obs.rows[i], ctx);
    }
    obs.table = std::move(nt);
    obs.columns.push_back(ctx);
}

RowBasis basis_of_rows(const ObservationState& obs) {
    RowBasis basis(obs.table.field(), obs.table.cols());
    for (std::size_t i = 0; i < obs.table.rows(); ++i)
        if (!basis.add_row(obs.table.row(i)))
            throw std::logic_error("observation rows must stay linearly independent");
    return basis;
}

} // namespace

void close_observation(DagStore& store, ObservationState& obs, const HankelFn& hankel) {
    const Field& f = obs.table.field();
    const RankedAlphabet& sigma = store.alphabet();
    // Checked combinations are skipped for the rest of this call: a row that
    // was in the span stays there as the span only grows.
    std::set<std::pair<SymbolId, std::vector<std::size_t>>> processed;
    RowBasis basis = basis_of_rows(obs);
    bool grew = true;
    while (grew) {
        grew = false;
        for (SymbolId s = 0; s < sigma.size() && !grew; ++s) {
            unsigned k = sigma.rank(s);
            if (k > 0 && obs.rows.empty()) continue;
            std::vector<std::size_t> tuple(k, 0);
            for (;;) {
                auto key = std::make_pair(s, tuple);
                if (!processed.count(key)) {
                    processed.insert(key);
                    std::vector<NodeId> kids;
                    kids.reserve(k);
                    for (std::size_t i : tuple) kids.push_back(obs.rows[i]);
                    NodeId t = store.intern(s, kids);
                    Matrix row = value_row(f, store, obs, t, hankel);
                    if (basis.add_row(row)) {
                        append_row(obs, t, row);
                        grew = true;
                        break;
                    }
                }
                if (!next_tuple(tuple, obs.rows.size())) break;
            }
        }
    }
}

Mta build_hypothesis(DagStore& store, const Field& field, const ObservationState& obs,
                     const HankelFn& hankel) {
    const RankedAlphabet& sigma = store.alphabet();
    std::size_t n = obs.rows.size();
    Matrix gamma(field, n, 1);
    for (std::size_t i = 0; i < n; ++i) gamma.at(i, 0) = obs.table.at(i, 0);
    std::vector<Matrix> mus;
    mus.reserve(sigma.size());
    for (SymbolId s = 0; s < sigma.size(); ++s) {
        unsigned k = sigma.rank(s);
        std::size_t rows = 1;
        for (unsigned i = 0; i < k; ++i) rows *= n;
        Matrix targets(field, rows, obs.columns.size());
        if (rows > 0 && (k == 0 || n > 0)) {
            std::vector<std::size_t> tuple(k, 0);
            std::size_t ridx = 0;
            do {
                std::vector<NodeId> kids;
                kids.reserve(k);
                for (std::size_t i : tuple) kids.push_back(obs.rows[i]);
                NodeId t = store.intern(s, kids);
                for (std::size_t j = 0; j < obs.columns.size(); ++j)
                    targets.at(ridx, j) = hankel(t, obs.columns[j]);
                ++ridx;
            } while (next_tuple(tuple, n));
        }
        mus.push_back(solve_row_equation(obs.table, targets));
    }
    return Mta(field, sigma, n, std::move(mus), std::move(gamma));
}

BadSubtree find_bad_subtree(const Mta& hypothesis, DagStore& store,
                            const ObservationState& obs, NodeId z, const HankelFn& hankel) {
    RunResult run = run_dag(hypothesis, store, z);
    for (NodeId tau : store.sub_dags(z)) {
        Matrix predicted = run.vectors.at(tau) * obs.table;
        for (std::size_t j = 0; j < obs.columns.size(); ++j) {
            if (hankel(tau, obs.columns[j]) != predicted.at(0, j)) {
                const auto& kids = store.children(tau);
                return BadSubtree{tau, store.symbol(tau),
                                  std::vector<NodeId>(kids.begin(), kids.end()), j};
            }
        }
    }
    throw TeacherInconsistencyError(
        "claimed counterexample agrees with the table at every subtree");
}

void absorb_counterexample(DagStore& store, ObservationState& obs, const BadSubtree& found,
                           const HankelFn& hankel) {
    if (found.column >= obs.columns.size())
        throw std::invalid_argument("witness column out of range");
    NodeId outer = obs.columns[found.column];
    std::size_t k = found.children.size();
    for (std::size_t j = 1; j <= k; ++j) {
        if (obs.rows.empty() && j > 1) continue;
        std::vector<std::size_t> tuple(j - 1, 0);
        do {
            std::vector<NodeId> kids;
            kids.reserve(k);
            for (std::size_t i : tuple) kids.push_back(obs.rows[i]);
            kids.push_back(store.box());
            for (std::size_t l = j; l < k; ++l) kids.push_back(found.children[l]);
            NodeId ctx = store.concat(outer, store.intern(found.symbol, kids));
            if (std::find(obs.columns.begin(), obs.columns.end(), ctx) == obs.columns.end())
                append_column(obs, ctx, hankel);
        } while (next_tuple(tuple, obs.rows.size()));
    }
    // A nullary violation has no children; the node itself is the candidate.
    std::vector<NodeId> candidates = found.children;
    if (candidates.empty()) candidates.push_back(found.node);
    RowBasis basis = basis_of_rows(obs);
    bool added = false;
    for (NodeId tau : candidates) {
        Matrix row = value_row(obs.table.field(), store, obs, tau, hankel);
        if (basis.add_row(row)) {
            append_row(obs, tau, row);
            added = true;
        }
    }
    if (!added)
        throw TeacherInconsistencyError(
            "no subtree of the counterexample extends the table rows");
}

std::pair<Mta, QueryStats> lmta(Teacher& teacher, DagStore& store, std::ostream* transcript) {
    if (!(store.alphabet() == teacher.alphabet()))
        throw std::invalid_argument("store alphabet must match the teacher's");
    const Field field = teacher.field();
    QueryStats stats;
    std::uint64_t ops_before = scalar_op_count();
    std::unordered_map<NodeId, Scalar> cache;
    HankelFn hankel = [&](NodeId tree, NodeId context) -> Scalar {
        NodeId root = store.concat(context, tree);
        auto it = cache.find(root);
        if (it != cache.end()) return it->second;
        Scalar v = teacher.membership(store, root);
        ++stats.membership_queries;
        if (transcript) *transcript << "MQ " << root << ' ' << v.to_string() << '\n';
        cache.emplace(root, v);
        return v;
    };
    auto ask = [&](const Mta& hypothesis) {
        ++stats.equivalence_queries;
        auto cex = teacher.equivalence(store, hypothesis);
        if (transcript) {
            *transcript << "EQ " << hypothesis.dim() << " -> ";
            if (cex)
                *transcript << "CEX " << store.dag_size(*cex) << '\n';
            else
                *transcript << "YES\n";
        }
        if (cex)
            stats.largest_counterexample =
                std::max<std::uint64_t>(stats.largest_counterexample, store.dag_size(*cex));
        return cex;
    };

    Mta hypothesis = Mta::zero_automaton(field, teacher.alphabet());
    auto cex = ask(hypothesis);
    if (cex) {
        Scalar w = hankel(*cex, store.box());
        if (w.is_zero())
            throw TeacherInconsistencyError(
                "counterexample to the zero hypothesis has weight zero");
        ObservationState obs{{}, {store.box()}, Matrix(field, 0, 1)};
        append_row(obs, *cex, Matrix::row_vector(field, {w}));
        for (;;) {
            close_observation(store, obs, hankel);
            hypothesis = build_hypothesis(store, field, obs, hankel);
            cex = ask(hypothesis);
            if (!cex) break;
            BadSubtree bad = find_bad_subtree(hypothesis, store, obs, *cex, hankel);
            absorb_counterexample(store, obs, bad, hankel);
        }
    }
    stats.scalar_ops = scalar_op_count() - ops_before;
    return {hypothesis, stats};
}

Mta minimize(const Mta& a, DagStore& store) {
    SimulatedTeacher teacher(a);
    return lmta(teacher, store).first;
}

} // namespace mta
