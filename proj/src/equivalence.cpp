#include "mta/equivalence.hpp"

#include <map>
#include <set>

namespace mta {

namespace {

// Advances a tuple over [0, bound)^k in lexicographic order; returns false
// after the last tuple.
bool next_tuple(std::vector<std::size_t>& tuple, std::size_t bound) {
    for (std::size_t l = tuple.size(); l-- > 0;) {
        if (++tuple[l] < bound) return true;
        tuple[l] = 0;
    }
    return false;
}

} // namespace

ForwardBasis forward_basis(const Mta& a, DagStore& store) {
    if (a.alphabet() != store.alphabet())
        throw std::invalid_argument("automaton and store alphabets differ");
    const Field& f = a.field();
    ForwardBasis fb;
    RowBasis basis(f, a.dim());
    std::set<std::pair<SymbolId, std::vector<std::size_t>>> processed;

    bool grew = true;
    while (grew) {
        grew = false;
        for (SymbolId s = 0; s < a.alphabet().size() && !grew; ++s) {
            const unsigned k = a.alphabet().rank(s);
            if (k > 0 && fb.vectors.empty()) continue;
            std::vector<std::size_t> tuple(k, 0);
            do {
                auto key = std::make_pair(s, tuple);
                if (processed.count(key)) continue;
                processed.insert(std::move(key));
                std::vector<const Matrix*> kids;
                std::vector<NodeId> kid_witnesses;
                kids.reserve(k);
                for (std::size_t idx : tuple) {
                    kids.push_back(&fb.vectors[idx]);
                    kid_witnesses.push_back(fb.witnesses[idx]);
                }
                Matrix v = apply_transition(a.mu(s), kids);
                if (basis.add_row(v)) {
                    fb.vectors.push_back(std::move(v));
                    fb.witnesses.push_back(store.intern(s, kid_witnesses));
                    grew = true;
                    break;
                }
            } while (next_tuple(tuple, fb.vectors.size()));
        }
    }
    return fb;
}

EquivResult check_equiv(const Mta& a, const Mta& b, DagStore& store) {
    const Mta diff = direct_sum(a, b, /*negate_second=*/true);
    const ForwardBasis fb = forward_basis(diff, store);
    for (std::size_t i = 0; i < fb.vectors.size(); ++i) {
        const Matrix w = fb.vectors[i] * diff.final_vector();
        if (!w.at(0, 0).is_zero())
            return EquivResult{false, fb.witnesses[i]};
    }
    return EquivResult{true, std::nullopt};
}

bool brute_force_equiv(const Mta& a, const Mta& b, DagStore& store,
                       unsigned height_bound, std::uint64_t tree_budget) {
    if (a.field() != b.field())
        throw FieldMismatchError("comparing automata over different fields");
    if (a.alphabet() != b.alphabet() || a.alphabet() != store.alphabet())
        throw std::invalid_argument("comparing automata over different alphabets");
    const RankedAlphabet& al = store.alphabet();

    std::uint64_t enumerated = 0;
    std::unordered_map<NodeId, Matrix> va, vb;
    auto visit = [&](SymbolId s, const std::vector<NodeId>& kids) {
        if (++enumerated > tree_budget)
            throw BoundExceededError("tree budget of " + std::to_string(tree_budget) +
                                     " exceeded during enumeration");
        const NodeId v = store.intern(s, kids);
        std::vector<const Matrix*> ka, kb;
        for (NodeId c : kids) {
            ka.push_back(&va.at(c));
            kb.push_back(&vb.at(c));
        }
        va.emplace(v, apply_transition(a.mu(s), ka));
        vb.emplace(v, apply_transition(b.mu(s), kb));
        const Scalar wa = (va.at(v) * a.final_vector()).at(0, 0);
        const Scalar wb = (vb.at(v) * b.final_vector()).at(0, 0);
        return std::make_pair(v, wa == wb);
    };

    std::vector<NodeId> lower;      // trees of height < h - 1
    std::vector<NodeId> last_level; // trees of height exactly h - 1
    for (SymbolId s = 0; s < al.size(); ++s) {
        if (al.rank(s) != 0) continue;
        auto [v, same] = visit(s, {});
        if (!same) return false;
        last_level.push_back(v);
    }
    for (unsigned h = 1; h < height_bound; ++h) {
        std::vector<NodeId> next_level;
        for (SymbolId s = 0; s < al.size(); ++s) {
            const unsigned k = al.rank(s);
            if (k == 0) continue;
            // Tuples with at least one child on the last level, partitioned
            // by the first position that uses it: earlier positions draw from
            // strictly lower levels, later positions from both.
            std::vector<NodeId> lower_and_last = lower;
            lower_and_last.insert(lower_and_last.end(), last_level.begin(),
                                  last_level.end());
            for (unsigned first = 0; first < k; ++first) {
                std::vector<const std::vector<NodeId>*> pools(k);
                for (unsigned l = 0; l < k; ++l)
                    pools[l] = l < first ? &lower
                             : l == first ? &last_level
                                          : &lower_and_last;
                bool empty = false;
                for (auto* p : pools) empty = empty || p->empty();
                if (empty) continue;
                std::vector<std::size_t> tuple(k, 0);
                bool more = true;
                while (more) {
                    std::vector<NodeId> kids(k);
                    for (unsigned l = 0; l < k; ++l) kids[l] = (*pools[l])[tuple[l]];
                    auto [v, same] = visit(s, kids);
                    if (!same) return false;
                    next_level.push_back(v);
                    more = false;
                    for (std::size_t l = k; l-- > 0;) {
                        if (++tuple[l] < pools[l]->size()) {
                            more = true;
                            break;
                        }
                        tuple[l] = 0;
                    }
                }
            }
        }
        lower.insert(lower.end(), last_level.begin(), last_level.end());
        last_level = std::move(next_level);
        if (last_level.empty()) break;
    }
    return true;
}

} // namespace mta
