#include "mta/circuits.hpp"

#include <algorithm>
#include <istream>
#include <limits>
#include <ostream>
#include <stdexcept>

namespace mta {

std::size_t Circuit::GateHash::operator()(const Gate& g) const {
    std::size_t h = static_cast<std::size_t>(g.op);
    h = h * 1000003u ^ g.lhs;
    h = h * 1000003u ^ g.rhs;
    h = h * 1000003u ^ g.var;
    return h;
}

GateId Circuit::push(Gate g) {
    if (g.op == GateOp::Add || g.op == GateOp::Mul || g.op == GateOp::Sub) {
        if (g.lhs >= gates_.size() || g.rhs >= gates_.size())
            throw std::invalid_argument("gate operand does not exist");
    }
    auto it = pool_.find(g);
    if (it != pool_.end()) return it->second;
    auto id = static_cast<GateId>(gates_.size());
    if (gates_.size() >= std::numeric_limits<GateId>::max())
        throw std::length_error("too many gates");
    unsigned h = 0;
    if (g.op == GateOp::Add || g.op == GateOp::Mul || g.op == GateOp::Sub)
        h = 1 + std::max(heights_[g.lhs], heights_[g.rhs]);
    gates_.push_back(g);
    heights_.push_back(h);
    pool_.emplace(g, id);
    return id;
}

GateId Circuit::zero() { return push({GateOp::Zero, 0, 0, 0}); }
GateId Circuit::one() { return push({GateOp::One, 0, 0, 0}); }
GateId Circuit::var(std::uint32_t index) { return push({GateOp::Var, 0, 0, index}); }
GateId Circuit::add(GateId a, GateId b) { return push({GateOp::Add, a, b, 0}); }
GateId Circuit::mul(GateId a, GateId b) { return push({GateOp::Mul, a, b, 0}); }
GateId Circuit::sub(GateId a, GateId b) { return push({GateOp::Sub, a, b, 0}); }

void Circuit::set_output(GateId g) {
    if (g >= gates_.size()) throw std::invalid_argument("output gate does not exist");
    output_ = g;
}

GateId Circuit::output() const {
    if (!output_) throw std::invalid_argument("circuit has no output");
    return *output_;
}

unsigned Circuit::height() const { return heights_[output()]; }

bool Circuit::has_vars() const {
    for (const Gate& g : gates_)
        if (g.op == GateOp::Var) return true;
    return false;
}

bool Circuit::has_sub() const {
    for (const Gate& g : gates_)
        if (g.op == GateOp::Sub) return true;
    return false;
}

std::uint32_t Circuit::var_count() const {
    std::uint32_t n = 0;
    for (const Gate& g : gates_)
        if (g.op == GateOp::Var) n = std::max(n, g.var + 1);
    return n;
}

Circuit Circuit::trimmed() const {
    GateId out = output();
    std::vector<bool> keep(gates_.size(), false);
    std::vector<GateId> stack{out};
    keep[out] = true;
    while (!stack.empty()) {
        GateId v = stack.back();
        stack.pop_back();
        const Gate& g = gates_[v];
        if (g.op == GateOp::Add || g.op == GateOp::Mul || g.op == GateOp::Sub) {
            for (GateId c : {g.lhs, g.rhs}) {
                if (!keep[c]) {
                    keep[c] = true;
                    stack.push_back(c);
                }
            }
        }
    }
    Circuit t;
    std::vector<GateId> renum(gates_.size(), 0);
    for (GateId v = 0; v < gates_.size(); ++v) {
        if (!keep[v]) continue;
        const Gate& g = gates_[v];
        switch (g.op) {
            case GateOp::Zero: renum[v] = t.zero(); break;
            case GateOp::One: renum[v] = t.one(); break;
            case GateOp::Var: renum[v] = t.var(g.var); break;
            case GateOp::Add: renum[v] = t.add(renum[g.lhs], renum[g.rhs]); break;
            case GateOp::Mul: renum[v] = t.mul(renum[g.lhs], renum[g.rhs]); break;
            case GateOp::Sub: renum[v] = t.sub(renum[g.lhs], renum[g.rhs]); break;
        }
    }
    t.set_output(renum[out]);
    return t;
}

namespace {

constexpr std::uint64_t kSaturate = std::numeric_limits<std::uint64_t>::max() / 4;

std::uint64_t sat_add(std::uint64_t a, std::uint64_t b) {
    return std::min(kSaturate, a + std::min(b, kSaturate - std::min(a, kSaturate)));
}

} // namespace

std::uint64_t bit_size_bound(const Circuit& c, std::uint64_t var_bits) {
    std::vector<std::uint64_t> bits(c.size(), 0);
    std::uint64_t worst = 0;
    for (GateId v = 0; v < c.size(); ++v) {
        const Gate& g = c.gate(v);
        switch (g.op) {
            case GateOp::Zero:
            case GateOp::One: bits[v] = 0; break;
            case GateOp::Var: bits[v] = std::max<std::uint64_t>(var_bits, 1); break;
            case GateOp::Add:
            case GateOp::Sub: bits[v] = sat_add(std::max(bits[g.lhs], bits[g.rhs]), 1); break;
            case GateOp::Mul: bits[v] = sat_add(bits[g.lhs], bits[g.rhs]); break;
        }
        worst = std::max(worst, bits[v]);
    }
    return worst;
}

std::uint64_t degree_bound(const Circuit& c) {
    std::vector<std::uint64_t> deg(c.size(), 0);
    for (GateId v = 0; v < c.size(); ++v) {
        const Gate& g = c.gate(v);
        switch (g.op) {
            case GateOp::Zero:
            case GateOp::One: deg[v] = 0; break;
            case GateOp::Var: deg[v] = 1; break;
            case GateOp::Add:
            case GateOp::Sub: deg[v] = std::max(deg[g.lhs], deg[g.rhs]); break;
            case GateOp::Mul: deg[v] = sat_add(deg[g.lhs], deg[g.rhs]); break;
        }
    }
    return c.size() ? deg[c.output()] : 0;
}

mpz_class eval_exact(const Circuit& c, const std::vector<mpz_class>& vars,
                     std::uint64_t max_bits) {
    std::uint64_t var_bits = 1;
    for (const mpz_class& v : vars)
        if (v != 0) var_bits = std::max<std::uint64_t>(var_bits, mpz_sizeinbase(v.get_mpz_t(), 2));
    std::uint64_t need = bit_size_bound(c, var_bits);
    if (need > max_bits)
        throw BoundExceededError("exact evaluation needs up to " + std::to_string(need) +
                                 " bits, limit is " + std::to_string(max_bits));
    GateId out = c.output();
    std::vector<mpz_class> val(c.size());
    for (GateId v = 0; v < c.size(); ++v) {
        const Gate& g = c.gate(v);
        switch (g.op) {
            case GateOp::Zero: val[v] = 0; break;
            case GateOp::One: val[v] = 1; break;
            case GateOp::Var:
                if (g.var >= vars.size())
                    throw std::invalid_argument("no value for circuit variable " +
                                                std::to_string(g.var));
                val[v] = vars[g.var];
                break;
            case GateOp::Add: val[v] = val[g.lhs] + val[g.rhs]; break;
            case GateOp::Sub: val[v] = val[g.lhs] - val[g.rhs]; break;
            case GateOp::Mul: val[v] = val[g.lhs] * val[g.rhs]; break;
        }
    }
    return val[out];
}

std::uint64_t eval_mod(const Circuit& c, std::uint64_t p,
                       const std::vector<std::uint64_t>& vars) {
    if (p < 2 || p >= (1ull << 63)) throw std::invalid_argument("modulus out of range");
    GateId out = c.output();
    std::vector<std::uint64_t> val(c.size());
    for (GateId v = 0; v < c.size(); ++v) {
        const Gate& g = c.gate(v);
        switch (g.op) {
            case GateOp::Zero: val[v] = 0; break;
            case GateOp::One: val[v] = 1 % p; break;
            case GateOp::Var:
                if (g.var >= vars.size())
                    throw std::invalid_argument("no value for circuit variable " +
                                                std::to_string(g.var));
                val[v] = vars[g.var] % p;
                break;
            case GateOp::Add: val[v] = (val[g.lhs] + val[g.rhs]) % p; break;
            case GateOp::Sub: val[v] = (val[g.lhs] + p - val[g.rhs]) % p; break;
            case GateOp::Mul: val[v] = mul_mod(val[g.lhs], val[g.rhs], p); break;
        }
    }
    return val[out];
}

namespace {

std::uint64_t sample_prime(Rng& rng) {
    for (;;) {
        std::uint64_t x = rng.range(1ull << 62, (1ull << 63) - 1);
        if (is_prime_u64(x)) return x;
    }
}

} // namespace

AcitTestResult acit_random_test(const Circuit& c, unsigned confidence_bits, Rng& rng) {
    Circuit t = c.trimmed();
    unsigned h = t.height();
    bool with_vars = t.has_vars();
    // A height-h circuit computes values below 2^(2^h), so a nonzero value has
    // fewer than 2^h prime divisors among the >= 2^55 primes in the sampled
    // range; variables cost one more bit for the polynomial root bound.
    int budget = (with_vars ? 54 : 55) - static_cast<int>(std::min(h, 64u));
    if (budget < 1)
        throw std::domain_error("circuit height " + std::to_string(h) +
                                " leaves no per-trial soundness in the sampled prime range");
    auto bits = static_cast<unsigned>(budget);
    unsigned trials = std::max(1u, (confidence_bits + bits - 1) / bits);
    std::uint32_t nvars = t.var_count();
    for (unsigned i = 0; i < trials; ++i) {
        std::uint64_t p = sample_prime(rng);
        std::vector<std::uint64_t> assignment(nvars);
        for (auto& a : assignment) a = rng.below(p);
        std::uint64_t r = eval_mod(t, p, assignment);
        if (r != 0)
            return {true, AcitCertificate{p, std::move(assignment), r}, i + 1, bits};
    }
    return {false, std::nullopt, trials, bits};
}

namespace {

// (numerator, denominator) gate pair; the denominator is kept nonzero by
// construction, so the pair is zero exactly when the numerator gate is.
struct RatGate {
    GateId num, den;
};

class PairBuilder {
public:
    explicit PairBuilder(Circuit& c) : c_(c), zero_(c.zero()), one_(c.one()) {}

    GateId zero_gate() const { return zero_; }
    GateId one_gate() const { return one_; }

    GateId gadd(GateId a, GateId b) {
        if (a == zero_) return b;
        if (b == zero_) return a;
        return c_.add(a, b);
    }

    GateId gmul(GateId a, GateId b) {
        if (a == zero_ || b == zero_) return zero_;
        if (a == one_) return b;
        if (b == one_) return a;
        return c_.mul(a, b);
    }

    // Double-and-add binary expansion; negatives via 0 - |v|.
    GateId integer(const mpz_class& v) {
        if (v == 0) return zero_;
        if (v < 0) {
            mpz_class m = -v;
            return c_.sub(zero_, integer(m));
        }
        std::size_t len = mpz_sizeinbase(v.get_mpz_t(), 2);
        GateId acc = one_;
        for (std::size_t i = len - 1; i-- > 0;) {
            acc = gadd(acc, acc);
            if (mpz_tstbit(v.get_mpz_t(), static_cast<mp_bitcnt_t>(i))) acc = gadd(acc, one_);
        }
        return acc;
    }

    RatGate constant(const Scalar& s) {
        if (!s.field().is_rationals())
            throw std::invalid_argument("circuit constants must be rational");
        return {integer(mpz_class(s.rat().get_num())), integer(mpz_class(s.rat().get_den()))};
    }

    RatGate padd(const RatGate& a, const RatGate& b) {
        return {gadd(gmul(a.num, b.den), gmul(b.num, a.den)), gmul(a.den, b.den)};
    }

    RatGate pmul(const RatGate& a, const RatGate& b) {
        return {gmul(a.num, b.num), gmul(a.den, b.den)};
    }

    // Balanced binary combination keeps the height logarithmic in the count.
    RatGate psum(const std::vector<RatGate>& terms) {
        if (terms.empty()) return {zero_, one_};
        return balance(terms, 0, terms.size(), true);
    }

    RatGate pprod(const std::vector<RatGate>& terms) {
        if (terms.empty()) return {one_, one_};
        return balance(terms, 0, terms.size(), false);
    }

private:
    RatGate balance(const std::vector<RatGate>& terms, std::size_t lo, std::size_t hi,
                    bool additive) {
        if (hi - lo == 1) return terms[lo];
        std::size_t mid = lo + (hi - lo) / 2;
        RatGate l = balance(terms, lo, mid, additive);
        RatGate r = balance(terms, mid, hi, additive);
        return additive ? padd(l, r) : pmul(l, r);
    }

    Circuit& c_;
    GateId zero_, one_;
};

// Pair whose value is the sum of a's weights over all trees of height
// strictly below `levels`, built by one forward pass per level: level i
// holds, per state j, the sum of mu(t)_j over trees of height < i.
RatGate series_pair(PairBuilder& pb, const Mta& a, unsigned levels) {
    if (!a.field().is_rationals())
        throw std::invalid_argument("series circuits require the rational field");
    std::size_t r = a.dim();
    if (levels == 0 || r == 0) return {pb.zero_gate(), pb.one_gate()};
    const RankedAlphabet& sigma = a.alphabet();

    // Constant tables: nullary row and, per rank k >= 1, the full matrix sum
    // over symbols of that rank.
    std::vector<RatGate> base(r, RatGate{pb.zero_gate(), pb.one_gate()});
    for (std::size_t j = 0; j < r; ++j) {
        std::vector<RatGate> terms;
        for (SymbolId s = 0; s < sigma.size(); ++s)
            if (sigma.rank(s) == 0) terms.push_back(pb.constant(a.mu(s).at(0, j)));
        base[j] = pb.psum(terms);
    }
    std::vector<unsigned> ranks;
    for (SymbolId s = 0; s < sigma.size(); ++s)
        if (sigma.rank(s) > 0 &&
            std::find(ranks.begin(), ranks.end(), sigma.rank(s)) == ranks.end())
            ranks.push_back(sigma.rank(s));
    std::sort(ranks.begin(), ranks.end());
    // rank_sum[k][row][col]: pair for the (row, col) entry of sum of mu(s).
    std::unordered_map<unsigned, std::vector<std::vector<RatGate>>> rank_sum;
    for (unsigned k : ranks) {
        std::size_t rows = 0;
        std::vector<std::vector<RatGate>>& tab = rank_sum[k];
        for (SymbolId s = 0; s < sigma.size(); ++s)
            if (sigma.rank(s) == k) rows = a.mu(s).rows();
        tab.assign(rows, std::vector<RatGate>(r, RatGate{pb.zero_gate(), pb.one_gate()}));
        for (std::size_t row = 0; row < rows; ++row) {
            for (std::size_t j = 0; j < r; ++j) {
                std::vector<RatGate> terms;
                for (SymbolId s = 0; s < sigma.size(); ++s)
                    if (sigma.rank(s) == k) terms.push_back(pb.constant(a.mu(s).at(row, j)));
                tab[row][j] = pb.psum(terms);
            }
        }
    }

    std::vector<RatGate> g = base;
    for (unsigned level = 1; level < levels; ++level) {
        std::vector<std::vector<RatGate>> terms(r);
        for (std::size_t j = 0; j < r; ++j) terms[j].push_back(base[j]);
        for (unsigned k : ranks) {
            const auto& tab = rank_sum[k];
            std::vector<std::size_t> digits(k, 0);
            for (std::size_t row = 0; row < tab.size(); ++row) {
                // Decode the row-major tuple (last coordinate fastest).
                std::size_t x = row;
                for (std::size_t d = k; d-- > 0;) {
                    digits[d] = x % r;
                    x /= r;
                }
                std::vector<RatGate> factors;
                factors.reserve(k);
                for (std::size_t d = 0; d < k; ++d) factors.push_back(g[digits[d]]);
                RatGate coeff = pb.pprod(factors);
                for (std::size_t j = 0; j < r; ++j)
                    terms[j].push_back(pb.pmul(coeff, tab[row][j]));
            }
        }
        for (std::size_t j = 0; j < r; ++j) g[j] = pb.psum(terms[j]);
    }

    std::vector<RatGate> weighted(r);
    for (std::size_t j = 0; j < r; ++j)
        weighted[j] = pb.pmul(g[j], pb.constant(a.final_vector().at(j, 0)));
    return pb.psum(weighted);
}

} // namespace

Circuit sum_series_circuit(const Mta& a, unsigned levels) {
    Circuit c;
    PairBuilder pb(c);
    RatGate s = series_pair(pb, a, levels);
    c.set_output(s.num);
    return c.trimmed();
}

Circuit equiv_to_acit(const Mta& a, const Mta& b) {
    if (!a.field().is_rationals() || !b.field().is_rationals())
        throw std::invalid_argument("the equivalence circuit requires the rational field");
    if (!(a.alphabet() == b.alphabet()))
        throw std::invalid_argument("alphabet mismatch");
    auto levels = static_cast<unsigned>(a.dim() + b.dim());
    Circuit c;
    PairBuilder pb(c);
    if (levels == 0) {
        c.set_output(pb.zero_gate());
        return c.trimmed();
    }
    // sum (f_a - f_b)^2 over T^{<levels} = S(a x a) + S(b x b) - 2 S(a x b);
    // agreement on that slice decides equality outright.
    RatGate paa = series_pair(pb, product(a, a), levels);
    RatGate pbb = series_pair(pb, product(b, b), levels);
    RatGate pab = series_pair(pb, product(a, b), levels);
    RatGate head = pb.padd(paa, pbb);
    RatGate twice{pb.gmul(pb.integer(2), pab.num), pab.den};
    GateId num = c.sub(pb.gmul(head.num, twice.den), pb.gmul(twice.num, head.den));
    c.set_output(num);
    return c.trimmed();
}

std::pair<Circuit, Circuit> split_subtraction(const Circuit& c) {
    Circuit t = c.trimmed();
    Circuit cc;
    std::vector<std::pair<GateId, GateId>> tr(t.size());
    for (GateId v = 0; v < t.size(); ++v) {
        const Gate& g = t.gate(v);
        switch (g.op) {
            case GateOp::Zero: tr[v] = {cc.zero(), cc.zero()}; break;
            case GateOp::One: tr[v] = {cc.one(), cc.zero()}; break;
            case GateOp::Var: tr[v] = {cc.var(g.var), cc.zero()}; break;
            case GateOp::Add:
                tr[v] = {cc.add(tr[g.lhs].first, tr[g.rhs].first),
                         cc.add(tr[g.lhs].second, tr[g.rhs].second)};
                break;
            case GateOp::Sub:
                tr[v] = {cc.add(tr[g.lhs].first, tr[g.rhs].second),
                         cc.add(tr[g.lhs].second, tr[g.rhs].first)};
                break;
            case GateOp::Mul: {
                auto [p1, n1] = tr[g.lhs];
                auto [p2, n2] = tr[g.rhs];
                tr[v] = {cc.add(cc.mul(p1, p2), cc.mul(n1, n2)),
                         cc.add(cc.mul(p1, n2), cc.mul(n1, p2))};
                break;
            }
        }
    }
    Circuit pos = cc;
    pos.set_output(tr[t.output()].first);
    Circuit neg = cc;
    neg.set_output(tr[t.output()].second);
    return {pos.trimmed(), neg.trimmed()};
}

NormalizedCircuit normalize_circuit(const Circuit& c) {
    Circuit t = c.trimmed();
    if (t.has_sub())
        throw std::invalid_argument("subtraction gates cannot be normalized");
    if (t.has_vars())
        throw std::invalid_argument("variable gates cannot be normalized");
    Circuit nc;
    std::vector<GateId> ztower{nc.zero()};
    std::vector<GateId> otower{nc.one()};
    auto ensure_towers = [&](unsigned h) {
        while (ztower.size() <= h) {
            auto hh = static_cast<unsigned>(ztower.size());
            ztower.push_back(hh % 2 == 1 ? nc.mul(ztower.back(), ztower.back())
                                         : nc.add(ztower.back(), ztower.back()));
        }
        while (otower.size() <= h) {
            auto hh = static_cast<unsigned>(otower.size());
            otower.push_back(hh % 2 == 1 ? nc.mul(otower.back(), otower.back())
                                         : nc.add(otower.back(), ztower[hh - 1]));
        }
    };
    // Relay g from height `from` up to height `to`: multiply by 1 to reach an
    // odd height, add 0 to reach an even one.
    auto lift = [&](GateId g, unsigned from, unsigned to) {
        if (to > 0) ensure_towers(to - 1);
        while (from < to) {
            g = (from + 1) % 2 == 1 ? nc.mul(g, otower[from]) : nc.add(g, ztower[from]);
            ++from;
        }
        return g;
    };
    std::vector<GateId> map(t.size());
    std::vector<unsigned> hh(t.size(), 0);
    for (GateId v = 0; v < t.size(); ++v) {
        const Gate& g = t.gate(v);
        switch (g.op) {
            case GateOp::Zero: map[v] = nc.zero(); break;
            case GateOp::One: map[v] = nc.one(); break;
            case GateOp::Add:
            case GateOp::Mul: {
                unsigned child = std::max(hh[g.lhs], hh[g.rhs]);
                bool want_odd_child = g.op == GateOp::Add;
                if ((child % 2 == 1) != want_odd_child) ++child;
                GateId l = lift(map[g.lhs], hh[g.lhs], child);
                GateId r = lift(map[g.rhs], hh[g.rhs], child);
                map[v] = g.op == GateOp::Add ? nc.add(l, r) : nc.mul(l, r);
                hh[v] = child + 1;
                break;
            }
            default: throw std::invalid_argument("unexpected gate in normalization");
        }
    }
    GateId out = map[t.output()];
    unsigned ho = hh[t.output()];
    if (ho % 2 == 1) {
        ensure_towers(ho);
        out = nc.add(out, ztower[ho]);
        ++ho;
    }
    nc.set_output(out);
    Circuit fin = nc.trimmed();
    NormalizedCircuit res;
    res.heights.resize(fin.size());
    for (GateId v = 0; v < fin.size(); ++v) res.heights[v] = fin.gate_height(v);
    res.output_height = fin.gate_height(fin.output());
    res.circuit = std::move(fin);
    validate_normalized(res);
    return res;
}

void validate_normalized(const NormalizedCircuit& nc) {
    const Circuit& c = nc.circuit;
    GateId out = c.output();
    if (nc.heights.size() != c.size())
        throw std::invalid_argument("height table does not cover the circuit");
    for (GateId v = 0; v < c.size(); ++v) {
        const Gate& g = c.gate(v);
        unsigned h = nc.heights[v];
        switch (g.op) {
            case GateOp::Zero:
            case GateOp::One:
                if (h != 0) throw std::invalid_argument("input gate above height 0");
                break;
            case GateOp::Add:
                if (h % 2 != 0) throw std::invalid_argument("addition gate at odd height");
                [[fallthrough]];
            case GateOp::Mul:
                if (g.op == GateOp::Mul && h % 2 != 1)
                    throw std::invalid_argument("multiplication gate at even height");
                if (nc.heights[g.lhs] != h - 1 || nc.heights[g.rhs] != h - 1)
                    throw std::invalid_argument("gate children are not one level down");
                break;
            default: throw std::invalid_argument("normalized circuits allow only inputs, + and x");
        }
    }
    if (nc.heights[out] % 2 != 0 || nc.output_height != nc.heights[out])
        throw std::invalid_argument("output height must be even");
}

RankedAlphabet acit_alphabet() {
    return RankedAlphabet({{"s0", 0}, {"s1", 1}, {"s2", 2}});
}

Mta acit_to_mta(const NormalizedCircuit& nc) {
    validate_normalized(nc);
    const Circuit& c = nc.circuit;
    std::size_t r = c.size();
    Field f = Field::rationals();
    RankedAlphabet sigma = acit_alphabet();
    Matrix m0(f, 1, r);
    Matrix m1(f, r, r);
    Matrix m2(f, r * r, r);
    for (GateId v = 0; v < r; ++v) {
        const Gate& g = c.gate(v);
        switch (g.op) {
            case GateOp::One: m0.at(0, v) = Scalar::one(f); break;
            case GateOp::Zero: break;
            case GateOp::Add:
                m1.at(g.lhs, v) = m1.at(g.lhs, v) + Scalar::one(f);
                m1.at(g.rhs, v) = m1.at(g.rhs, v) + Scalar::one(f);
                break;
            case GateOp::Mul:
                m2.at(static_cast<std::size_t>(g.lhs) * r + g.rhs, v) = Scalar::one(f);
                break;
            default: break;
        }
    }
    Matrix gamma(f, r, 1);
    gamma.at(c.output(), 0) = Scalar::one(f);
    return Mta(f, sigma, r, {m0, m1, m2}, gamma);
}

NodeId canonical_ladder(DagStore& store, unsigned height) {
    RankedAlphabet expected = acit_alphabet();
    if (!(store.alphabet() == expected))
        throw std::invalid_argument("store alphabet must be the circuit alphabet");
    SymbolId s0 = *store.alphabet().find("s0");
    SymbolId s1 = *store.alphabet().find("s1");
    SymbolId s2 = *store.alphabet().find("s2");
    NodeId t = store.intern(s0, {});
    for (unsigned i = 0; i < height; ++i)
        t = i % 2 == 0 ? store.intern(s2, {t, t}) : store.intern(s1, {t});
    return t;
}

void print_circuit(const Circuit& c, std::ostream& out) {
    GateId o = c.output();
    for (GateId v = 0; v < c.size(); ++v) {
        const Gate& g = c.gate(v);
        out << "gate " << v << ' ';
        switch (g.op) {
            case GateOp::Zero: out << "zero"; break;
            case GateOp::One: out << "one"; break;
            case GateOp::Var: out << "var " << g.var; break;
            case GateOp::Add: out << "add " << g.lhs << ' ' << g.rhs; break;
            case GateOp::Mul: out << "mul " << g.lhs << ' ' << g.rhs; break;
            case GateOp::Sub: out << "sub " << g.lhs << ' ' << g.rhs; break;
        }
        out << '\n';
    }
    out << "output " << o << '\n';
}

namespace {

std::vector<std::pair<std::string, int>> split_tokens(const std::string& line) {
    std::vector<std::pair<std::string, int>> toks;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
        if (i >= line.size()) break;
        std::size_t start = i;
        while (i < line.size() && line[i] != ' ' && line[i] != '\t' && line[i] != '\r') ++i;
        toks.emplace_back(line.substr(start, i - start), static_cast<int>(start + 1));
    }
    return toks;
}

bool parse_u64(const std::string& tok, std::uint64_t& out) {
    if (tok.empty() || tok.find_first_not_of("0123456789") != std::string::npos) return false;
    try {
        out = std::stoull(tok);
    } catch (const std::out_of_range&) {
        return false;
    }
    return true;
}

} // namespace

Circuit parse_circuit(std::istream& in, const std::string& source_name) {
    Circuit c;
    std::unordered_map<std::uint64_t, GateId> by_file_id;
    std::optional<GateId> out;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto toks = split_tokens(line);
        if (toks.empty()) continue;
        const auto& [kw, kwcol] = toks[0];
        auto fail = [&](int col, const std::string& msg) -> ParseError {
            return ParseError(source_name, lineno, col, msg);
        };
        if (kw == "gate") {
            if (out) throw fail(kwcol, "gate after output line");
            if (toks.size() < 3) throw fail(kwcol, "expected: gate <id> <op> ...");
            std::uint64_t fid;
            if (!parse_u64(toks[1].first, fid))
                throw fail(toks[1].second, "bad gate id '" + toks[1].first + "'");
            if (by_file_id.count(fid))
                throw fail(toks[1].second, "duplicate gate id " + toks[1].first);
            const std::string& op = toks[2].first;
            auto operand = [&](std::size_t idx) -> GateId {
                std::uint64_t ref;
                if (!parse_u64(toks[idx].first, ref))
                    throw fail(toks[idx].second, "bad gate reference '" + toks[idx].first + "'");
                auto it = by_file_id.find(ref);
                if (it == by_file_id.end())
                    throw fail(toks[idx].second, "gate " + toks[idx].first +
                                                     " not defined yet (gates must be topological)");
                return it->second;
            };
            GateId g;
            if (op == "zero" || op == "one") {
                if (toks.size() != 3) throw fail(toks[2].second, "'" + op + "' takes no operands");
                g = op == "zero" ? c.zero() : c.one();
            } else if (op == "var") {
                if (toks.size() != 4) throw fail(toks[2].second, "expected: var <index>");
                std::uint64_t idx;
                if (!parse_u64(toks[3].first, idx) ||
                    idx > std::numeric_limits<std::uint32_t>::max())
                    throw fail(toks[3].second, "bad variable index '" + toks[3].first + "'");
                g = c.var(static_cast<std::uint32_t>(idx));
            } else if (op == "add" || op == "mul" || op == "sub") {
                if (toks.size() != 5)
                    throw fail(toks[2].second, "expected: " + op + " <lhs> <rhs>");
                GateId l = operand(3), r = operand(4);
                g = op == "add" ? c.add(l, r) : op == "mul" ? c.mul(l, r) : c.sub(l, r);
            } else {
                throw fail(toks[2].second, "unknown gate op '" + op + "'");
            }
            by_file_id.emplace(fid, g);
        } else if (kw == "output") {
            if (out) throw fail(kwcol, "second output line");
            if (toks.size() != 2) throw fail(kwcol, "expected: output <id>");
            std::uint64_t fid;
            if (!parse_u64(toks[1].first, fid) || !by_file_id.count(fid))
                throw fail(toks[1].second,
                           "output refers to undefined gate '" + toks[1].first + "'");
            out = by_file_id[fid];
        } else {
            throw fail(kwcol, "unexpected keyword '" + kw + "'");
        }
    }
    if (!out) throw ParseError(source_name, lineno + 1, 1, "missing output line");
    c.set_output(*out);
    return c;
}

} // namespace mta
