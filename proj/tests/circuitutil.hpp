#ifndef MTA_TESTS_CIRCUITUTIL_HPP
#define MTA_TESTS_CIRCUITUTIL_HPP

#include <utility>
#include <vector>

#include "mta/circuits.hpp"
#include "mta/rng.hpp"

namespace testutil {

// Random gate DAG over the constants (and optionally variables / subtraction).
inline mta::Circuit random_circuit(mta::Rng& rng, unsigned ops, bool allow_sub,
                                   std::uint32_t vars = 0) {
    mta::Circuit c;
    std::vector<mta::GateId> pool{c.zero(), c.one()};
    for (std::uint32_t v = 0; v < vars; ++v) pool.push_back(c.var(v));
    for (unsigned i = 0; i < ops; ++i) {
        const mta::GateId a = pool[rng.below(pool.size())];
        const mta::GateId b = pool[rng.below(pool.size())];
        switch (rng.below(allow_sub ? 3u : 2u)) {
            case 0: pool.push_back(c.add(a, b)); break;
            case 1: pool.push_back(c.mul(a, b)); break;
            default: pool.push_back(c.sub(a, b)); break;
        }
    }
    c.set_output(pool.back());
    return c;
}

// Variable-free circuit with a nonzero value.
inline mta::Circuit random_nonzero_circuit(mta::Rng& rng, unsigned ops) {
    for (;;) {
        mta::Circuit c = random_circuit(rng, ops, true);
        if (eval_exact(c) != 0) return c;
    }
}

// Two structurally independent gates with the same value: operands of + and x
// are emitted in opposite orders on the two tracks, subtrees recursively so.
inline std::pair<mta::GateId, mta::GateId> two_ways(mta::Circuit& c, mta::Rng& rng,
                                                    unsigned depth) {
    if (depth == 0 || rng.below(5) == 0) {
        const mta::GateId g = rng.below(2) ? c.one() : c.zero();
        return {g, g};
    }
    const auto [a1, a2] = two_ways(c, rng, depth - 1);
    const auto [b1, b2] = two_ways(c, rng, depth - 1);
    switch (rng.below(3)) {
        case 0: return {c.add(a1, b1), c.add(b2, a2)};
        case 1: return {c.mul(a1, b1), c.mul(b2, a2)};
        default: return {c.sub(a1, b1), c.sub(a2, b2)};
    }
}

// Circuit of height <= depth+1 whose value is exactly zero, by cancelling the
// two tracks against each other.
inline mta::Circuit zero_circuit(mta::Rng& rng, unsigned depth) {
    mta::Circuit c;
    const auto [x, y] = two_ways(c, rng, depth);
    c.set_output(c.sub(x, y));
    return c;
}

// Layered {+, x} circuit already in normalized form: level 0 holds the
// constants, odd levels multiply, even levels add, every child one level down.
inline mta::NormalizedCircuit random_normalized(mta::Rng& rng, unsigned height,
                                                unsigned max_width) {
    mta::Circuit c;
    std::vector<mta::GateId> level{c.zero(), c.one()};
    for (unsigned h = 1; h <= height; ++h) {
        std::vector<mta::GateId> next;
        const unsigned width = 1 + static_cast<unsigned>(rng.below(max_width));
        for (unsigned i = 0; i < width; ++i) {
            const mta::GateId a = level[rng.below(level.size())];
            const mta::GateId b = level[rng.below(level.size())];
            next.push_back(h % 2 == 1 ? c.mul(a, b) : c.add(a, b));
        }
        level = std::move(next);
    }
    c.set_output(level[rng.below(level.size())]);
    std::vector<unsigned> heights(c.size());
    for (mta::GateId g = 0; g < c.size(); ++g) heights[g] = c.gate_height(g);
    mta::NormalizedCircuit nc{std::move(c), std::move(heights), height};
    validate_normalized(nc);
    return nc;
}

} // namespace testutil

#endif
