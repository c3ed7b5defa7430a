#include <doctest.h>

#include <stdexcept>

#include "mta/adversary.hpp"
#include "mta/equivalence.hpp"
#include "testutil.hpp"

using namespace mta;
using testutil::agf_alphabet;
using testutil::make_matrix;
using testutil::num;

namespace {

// {a/0, g/1, f/2} with a starting the counter, g stepping it, f heavy.
HardFamilySpec agf_spec(unsigned n) {
    return HardFamilySpec(Field::rationals(), n, agf_alphabet(), "a", "g");
}

// Chain with extra unary symbols so several symbols end up heavy.
RankedAlphabet cshq_alphabet() {
    return RankedAlphabet({{"c", 0}, {"s", 1}, {"h", 1}, {"q", 2}});
}

NodeId chain(DagStore& store, const HardFamilySpec& spec, std::size_t steps) {
    NodeId t = store.intern(spec.sigma0, {});
    for (std::size_t i = 0; i < steps; ++i) t = store.intern(spec.sigma1, {t});
    return t;
}

} // namespace

TEST_CASE("the family spec validates its symbols") {
    CHECK_THROWS_AS(HardFamilySpec(Field::rationals(), 0, agf_alphabet(), "a", "g"),
                    std::invalid_argument);
    CHECK_THROWS_WITH_AS(HardFamilySpec(Field::rationals(), 2, agf_alphabet(), "g", "g"),
                         "'g' must be a nullary symbol", std::invalid_argument);
    CHECK_THROWS_WITH_AS(HardFamilySpec(Field::rationals(), 2, agf_alphabet(), "a", "f"),
                         "'f' must be a unary symbol", std::invalid_argument);
    CHECK_THROWS_AS(HardFamilySpec(Field::rationals(), 2, agf_alphabet(), "a", "x"),
                    std::invalid_argument);

    const HardFamilySpec spec = agf_spec(2);
    CHECK(spec.sigma0 == 0);
    CHECK(spec.sigma1 == 1);
    CHECK(spec.heavy_symbols == std::vector<SymbolId>{2});
    const HardFamilySpec multi(Field::rationals(), 3, cshq_alphabet(), "c", "s");
    CHECK(multi.heavy_symbols == std::vector<SymbolId>{2, 3});
}

TEST_CASE("the hard automaton has the expected blocks for n = 2") {
    const Field q = Field::rationals();
    const HardFamilySpec spec = agf_spec(2);
    HeavyEntries entries;
    entries.emplace(2, make_matrix(q, 4, 2, {1, 2, 3, 4, 5, 6, 7, 8}));
    const Mta hard = build_hard_automaton(spec, entries);

    CHECK(hard.dim() == 4);
    CHECK(hard.mu(0) == make_matrix(q, 1, 4, {1, 0, 0, 0}));
    CHECK(hard.mu(1) == make_matrix(q, 4, 4,
                                    {0, 1, 0, 0,
                                     1, 0, 0, 0,
                                     0, 0, 0, 1,
                                     0, 0, 1, 0}));
    CHECK(hard.final_vector() == make_matrix(q, 4, 1, {1, 0, 0, 0}));

    // mu(f) = [1 1] (x) ([I;-I] (x) [I;-I]) B, a 16 x 4 matrix whose two
    // horizontal halves coincide and whose rows carry sign-combined B rows.
    const Matrix split = make_matrix(q, 4, 2, {1, 0, 0, 1, -1, 0, 0, -1});
    const Matrix expect = kron(make_matrix(q, 1, 2, {1, 1}),
                               kron(split, split) *
                                   make_matrix(q, 4, 2, {1, 2, 3, 4, 5, 6, 7, 8}));
    CHECK(hard.mu(2) == expect);
}

TEST_CASE("building the hard automaton validates the entry map") {
    const Field q = Field::rationals();
    const HardFamilySpec spec = agf_spec(2);
    CHECK_THROWS_WITH_AS(build_hard_automaton(spec, {}),
                         "missing entries for heavy symbol 'f'", std::invalid_argument);

    HeavyEntries wrong_shape;
    wrong_shape.emplace(2, make_matrix(q, 2, 2, {1, 2, 3, 4}));
    CHECK_THROWS_AS(build_hard_automaton(spec, wrong_shape), std::invalid_argument);

    HeavyEntries not_heavy;
    not_heavy.emplace(2, make_matrix(q, 4, 2, {1, 2, 3, 4, 5, 6, 7, 8}));
    not_heavy.emplace(0, make_matrix(q, 1, 2, {1, 2}));
    CHECK_THROWS_WITH_AS(build_hard_automaton(spec, not_heavy),
                         "entry for a symbol that is not heavy", std::invalid_argument);
}

TEST_CASE("chains evaluate to the counter-divisibility indicator") {
    const HardFamilySpec spec = agf_spec(3);
    HeavyEntries entries;
    entries.emplace(2, make_matrix(spec.field, 9, 3, std::vector<long>(27, 1)));
    const Mta hard = build_hard_automaton(spec, entries);
    DagStore store(agf_alphabet());
    for (std::size_t j = 0; j <= 8; ++j) {
        const NodeId t = chain(store, spec, j);
        const Scalar want = j % 3 == 0 ? num(1) : num(0);
        CHECK(eval(hard, store, t) == want);
        CHECK(hard_series_value(spec, entries, store, t) == want);
    }
}

TEST_CASE("a single heavy node reads one coefficient entry") {
    const Field q = Field::rationals();
    const HardFamilySpec spec = agf_spec(2);
    const Matrix b = make_matrix(q, 4, 2, {1, 2, 3, 4, 5, 6, 7, 8});
    HeavyEntries entries;
    entries.emplace(2, b);
    const Mta hard = build_hard_automaton(spec, entries);
    DagStore store(agf_alphabet());

    // g^j(f(chain d1, chain d2)) reads row d1*2 + d2, column (2 - j) mod 2,
    // covering the whole matrix as the digits and step count vary.
    for (std::size_t d1 = 0; d1 < 2; ++d1)
        for (std::size_t d2 = 0; d2 < 2; ++d2)
            for (std::size_t j = 0; j <= 3; ++j) {
                NodeId t = store.intern(2, {chain(store, spec, d1), chain(store, spec, d2)});
                for (std::size_t i = 0; i < j; ++i) t = store.intern(1, {t});
                const Scalar want = b.at(d1 * 2 + d2, (2 - j % 2) % 2);
                CHECK(eval(hard, store, t) == want);
                CHECK(hard_series_value(spec, entries, store, t) == want);
            }

    // Chain lengths only matter modulo n: a length-3 chain is digit 1.
    const NodeId deep = store.intern(2, {chain(store, spec, 3), chain(store, spec, 0)});
    CHECK(eval(hard, store, deep) == b.at(2, 0));
}

TEST_CASE("two heavy nodes cancel to zero") {
    const Field q = Field::rationals();
    const HardFamilySpec spec = agf_spec(2);
    HeavyEntries entries;
    entries.emplace(2, make_matrix(q, 4, 2, {1, 2, 3, 4, 5, 6, 7, 8}));
    const Mta hard = build_hard_automaton(spec, entries);
    DagStore store(agf_alphabet());

    const NodeId leaf = chain(store, spec, 0);
    const NodeId one_heavy = store.intern(2, {leaf, leaf});
    const NodeId two = store.intern(2, {one_heavy, leaf});
    const NodeId three = store.intern(2, {one_heavy, one_heavy});
    const NodeId wrapped = store.intern(1, {store.intern(2, {leaf, one_heavy})});
    for (NodeId t : {two, three, wrapped}) {
        CHECK(eval(hard, store, t) == num(0));
        CHECK(hard_series_value(spec, entries, store, t) == num(0));
    }
}

TEST_CASE("the closed form matches the automaton on random trees") {
    Rng rng(311);
    for (unsigned n : {1u, 2u, 3u}) {
        const HardFamilySpec spec(Field::rationals(), n, cshq_alphabet(), "c", "s");
        HeavyEntries entries;
        for (SymbolId s : spec.heavy_symbols) {
            std::size_t rows = 1;
            for (unsigned i = 0; i < spec.alphabet.rank(s); ++i) rows *= n;
            Matrix b(spec.field, rows, n);
            for (std::size_t i = 0; i < rows; ++i)
                for (std::size_t j = 0; j < n; ++j)
                    b.at(i, j) = Scalar::from_long(spec.field, rng.int_range(-4, 4));
            entries.emplace(s, b);
        }
        const Mta hard = build_hard_automaton(spec, entries);
        DagStore store(cshq_alphabet());
        for (int trial = 0; trial < 200; ++trial) {
            const NodeId t =
                store.intern_tree(testutil::random_tree(rng, spec.alphabet, 5));
            CHECK(eval(hard, store, t) == hard_series_value(spec, entries, store, t));
        }
    }
}

TEST_CASE("the closed form rejects foreign stores and contexts") {
    const HardFamilySpec spec = agf_spec(2);
    HeavyEntries empty;
    DagStore other(cshq_alphabet());
    const NodeId c = other.intern(0, {});
    CHECK_THROWS_WITH_AS(hard_series_value(spec, empty, other, c),
                         "tree is over a different alphabet", std::invalid_argument);

    DagStore store(agf_alphabet());
    CHECK_THROWS_WITH_AS(hard_series_value(spec, empty, store, store.box()),
                         "expected a tree, got a context", std::invalid_argument);

    // A single-heavy tree needs the touched symbol's entries.
    const NodeId a = store.intern(0, {});
    CHECK_THROWS_WITH_AS(hard_series_value(spec, empty, store, store.intern(2, {a, a})),
                         "missing entries for heavy symbol 'f'", std::invalid_argument);
}

TEST_CASE("the teacher answers pattern queries without revealing entries") {
    AdversarialTeacher teacher(agf_spec(2), 99);
    CHECK(teacher.total_entries() == 8);
    DagStore store(agf_alphabet());
    const HardFamilySpec& spec = teacher.family();

    CHECK(teacher.membership(store, chain(store, spec, 0)) == num(1));
    CHECK(teacher.membership(store, chain(store, spec, 1)) == num(0));
    CHECK(teacher.membership(store, chain(store, spec, 4)) == num(1));
    const NodeId leaf = chain(store, spec, 0);
    const NodeId heavy = store.intern(2, {leaf, leaf});
    CHECK(teacher.membership(store, store.intern(2, {heavy, leaf})) == num(0));
    CHECK(teacher.revealed_count() == 0);
    CHECK(teacher.membership_calls() == 4);
}

TEST_CASE("single-heavy queries reveal entries once and stay consistent") {
    AdversarialTeacher teacher(agf_spec(2), 99);
    DagStore store(agf_alphabet());
    const HardFamilySpec& spec = teacher.family();
    const NodeId t = store.intern(2, {chain(store, spec, 1), chain(store, spec, 0)});

    const Scalar first = teacher.membership(store, t);
    CHECK(!first.is_zero()); // drawn from a small nonzero range
    CHECK(teacher.revealed_count() == 1);
    CHECK(teacher.membership(store, t) == first);
    CHECK(teacher.revealed_count() == 1);

    // The unary wrapper selects the other column: a fresh entry.
    teacher.membership(store, store.intern(1, {t}));
    CHECK(teacher.revealed_count() == 2);

    CHECK_THROWS_WITH_AS(teacher.committed_automaton(),
                         "entries are still unrevealed", std::logic_error);
    teacher.commit_remaining();
    CHECK(teacher.fully_revealed());
    const Mta committed = teacher.committed_automaton();
    CHECK(eval(committed, store, t) == first);

    Rng rng(55);
    for (int trial = 0; trial < 50; ++trial) {
        const NodeId u = store.intern_tree(testutil::random_tree(rng, spec.alphabet, 4));
        CHECK(teacher.membership(store, u) == eval(committed, store, u));
    }
}

TEST_CASE("equivalence queries force one disagreeing entry at a time") {
    AdversarialTeacher teacher(agf_spec(2), 7);
    DagStore store(agf_alphabet());
    const Mta zero = Mta::zero_automaton(Field::rationals(), agf_alphabet());

    for (std::size_t round = 1; round <= 8; ++round) {
        const auto cex = teacher.equivalence(store, zero);
        REQUIRE(cex.has_value());
        CHECK(teacher.revealed_count() == round);
        // The forced value genuinely disagrees with the hypothesis (zero).
        CHECK(!teacher.membership(store, *cex).is_zero());
    }
    CHECK(teacher.fully_revealed());

    // From now on the teacher is an honest oracle for the committed automaton.
    const auto cex = teacher.equivalence(store, zero);
    REQUIRE(cex.has_value());
    CHECK(!teacher.membership(store, *cex).is_zero());
    const Mta committed = teacher.committed_automaton();
    DagStore fresh(agf_alphabet());
    CHECK_FALSE(check_equiv(committed, zero, fresh).equivalent);
}

TEST_CASE("forced entries disagree with nonzero hypotheses too") {
    const Field q = Field::rationals();
    const HardFamilySpec spec = agf_spec(2);
    HeavyEntries fives;
    Matrix b(q, 4, 2);
    for (std::size_t i = 0; i < 4; ++i)
        for (std::size_t j = 0; j < 2; ++j) b.at(i, j) = num(5);
    fives.emplace(2, b);
    const Mta guess = build_hard_automaton(spec, fives);

    AdversarialTeacher teacher(spec, 13);
    DagStore store(agf_alphabet());
    const auto cex = teacher.equivalence(store, guess);
    REQUIRE(cex.has_value());
    CHECK(teacher.revealed_count() == 1);
    CHECK(teacher.membership(store, *cex) != eval(guess, store, *cex));
}

TEST_CASE("the learner defeats the adversary only by revealing everything") {
    for (unsigned n : {1u, 2u}) {
        AdversarialTeacher teacher(agf_spec(n), 1000 + n);
        DagStore store(agf_alphabet());
        const auto [learned, stats] = lmta(teacher, store);

        CHECK(teacher.fully_revealed());
        CHECK(stats.membership_queries == teacher.membership_calls());
        const Mta committed = teacher.committed_automaton();
        DagStore fresh(agf_alphabet());
        CHECK(check_equiv(learned, committed, fresh).equivalent);

        const std::uint64_t total =
            teacher.membership_calls() + teacher.equivalence_calls();
        CHECK(total >= teacher.total_entries());
        CHECK(total >= query_lower_bound(teacher.family()));
    }
}

TEST_CASE("the query lower bound matches its closed form") {
    CHECK(query_lower_bound(agf_spec(1)) == 1);  // (14 - 6) / 8
    CHECK(query_lower_bound(agf_spec(2)) == 8);  // (84 - 20) / 8

    // Without heavy symbols the bound degenerates to zero.
    const HardFamilySpec bare(Field::rationals(), 1,
                              RankedAlphabet({{"a", 0}, {"g", 1}}), "a", "g");
    CHECK(query_lower_bound(bare) == 0);

    // Large n stays exact: r = 2^21 with ranks 0,1,2 gives r^3 / 8 = 2^60.
    const HardFamilySpec big(Field::rationals(), 1u << 20, agf_alphabet(), "a", "g");
    CHECK(query_lower_bound(big) == (std::uint64_t(1) << 60));
}
