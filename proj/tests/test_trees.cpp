#include <doctest.h>

#include <limits>
#include <sstream>
#include <string>

#include "mta/trees.hpp"
#include "testutil.hpp"

using namespace mta;
using testutil::agf_alphabet;

TEST_CASE("ranked alphabets") {
    const RankedAlphabet alpha = agf_alphabet();
    CHECK(alpha.size() == 3);
    CHECK(alpha.name(0) == "a");
    CHECK(alpha.rank(2) == 2);
    CHECK(alpha.max_rank() == 2);
    REQUIRE(alpha.find("g").has_value());
    CHECK(*alpha.find("g") == 1);
    CHECK_FALSE(alpha.find("h").has_value());

    CHECK_THROWS_AS(RankedAlphabet({{"a", 0}, {"a", 1}}), std::invalid_argument);
    CHECK_THROWS_AS(RankedAlphabet({{"g", 1}}), std::invalid_argument); // no nullary
    CHECK_THROWS_AS(RankedAlphabet(std::vector<std::pair<std::string, unsigned>>{}),
                    std::invalid_argument);
    CHECK_THROWS_AS(RankedAlphabet({{"two words", 0}}), std::invalid_argument);
}

TEST_CASE("interning shares equal subtrees") {
    DagStore store(agf_alphabet());
    const NodeId a1 = store.intern(0, {});
    const NodeId a2 = store.intern(0, {});
    CHECK(a1 == a2);
    const NodeId f1 = store.intern(2, {a1, a1});
    const NodeId f2 = store.intern(2, {a2, a2});
    CHECK(f1 == f2);
    CHECK(store.node_count() == 2);

    const NodeId g1 = store.intern(1, {f1});
    CHECK(g1 > f1); // successors always get smaller ids
    CHECK(store.symbol(g1) == 1);
    CHECK(store.children(g1) == std::vector<NodeId>{f1});

    CHECK(store.height(a1) == 0);
    CHECK(store.height(f1) == 1);
    CHECK(store.height(g1) == 2);
    CHECK(store.unfold_size(g1) == 4);

    CHECK_THROWS_AS(store.intern(1, {a1, a1}), std::invalid_argument); // arity
    CHECK_THROWS_AS(store.intern(7, {}), std::invalid_argument);       // no such symbol
    CHECK_THROWS_AS(store.intern(2, {a1, 99}), std::invalid_argument); // undefined child
}

TEST_CASE("intern_tree matches piecewise interning") {
    DagStore store(agf_alphabet());
    const Tree t = testutil::node(
        2, {testutil::node(1, {testutil::leaf(0)}), testutil::leaf(0)});
    const NodeId v = store.intern_tree(t);
    const NodeId a = store.intern(0, {});
    const NodeId ga = store.intern(1, {a});
    CHECK(v == store.intern(2, {ga, a}));
    CHECK(store.unfold(v) == t);
}

TEST_CASE("boxes and contexts") {
    DagStore store(agf_alphabet());
    const NodeId box = store.box();
    CHECK(store.box() == box);
    CHECK(store.symbol(box) == kBoxSymbol);
    CHECK(store.height(box) == 0);
    CHECK(store.is_context(box));
    CHECK_FALSE(store.is_tree(box));

    const NodeId a = store.intern(0, {});
    const NodeId c = store.intern(2, {box, a});
    CHECK(store.is_context(c));
    CHECK(store.contains_box(c));
    const NodeId two = store.intern(2, {box, box});
    CHECK(store.contains_box(two));
    CHECK_FALSE(store.is_context(two)); // two box paths
    CHECK_FALSE(store.is_context(a));
    CHECK(store.is_tree(a));

    // Sharing multiplies paths: both children reach the same box node.
    const NodeId gbox = store.intern(1, {box});
    const NodeId shared = store.intern(2, {gbox, gbox});
    CHECK_FALSE(store.is_context(shared));
}

TEST_CASE("concat plugs the hole") {
    DagStore store(agf_alphabet());
    const NodeId box = store.box();
    const NodeId a = store.intern(0, {});
    const NodeId c = store.intern(2, {box, a});     // f(_, a)
    const NodeId ga = store.intern(1, {a});

    const NodeId t = store.concat(c, ga);
    CHECK(t == store.intern(2, {ga, a}));
    CHECK(store.is_tree(t));

    // Context-into-context composition keeps exactly one hole.
    const NodeId gbox = store.intern(1, {box});
    const NodeId cc = store.concat(c, gbox); // f(g(_), a)
    CHECK(store.is_context(cc));
    CHECK(store.term_string(cc) == "f(g(_),a)");
    CHECK(store.concat(cc, a) == store.intern(2, {store.intern(1, {a}), a}));

    CHECK(store.concat(box, ga) == ga);
    CHECK_THROWS_AS(store.concat(a, ga), std::invalid_argument);  // no hole
    CHECK_THROWS_AS(store.concat(store.intern(2, {box, box}), a),
                    std::invalid_argument); // two holes
}

TEST_CASE("chain dag and unfolding") {
    DagStore store(agf_alphabet());
    const NodeId g3 = chain_dag(store, 0, 2, 3);
    CHECK(store.dag_size(g3) == 3);
    CHECK(store.height(g3) == 2);
    CHECK(store.unfold_size(g3) == 7);

    const Tree t = store.unfold(g3);
    const TreeStats stats = tree_stats(store.alphabet(), t);
    CHECK(stats.size == 7);
    CHECK(stats.height == 2);
    CHECK(stats.symbol_counts[0] == 4);
    CHECK(stats.symbol_counts[2] == 3);
    CHECK(stats.box_count == 0);

    CHECK_THROWS_AS(store.unfold(g3, 6), BoundExceededError);

    // Unfold sizes saturate instead of wrapping around.
    const NodeId g70 = chain_dag(store, 0, 2, 70);
    CHECK(store.unfold_size(g70) == std::numeric_limits<std::uint64_t>::max());
    CHECK_THROWS_AS(store.unfold(g70), BoundExceededError);

    CHECK_THROWS_AS(chain_dag(store, 0, 2, 0), std::invalid_argument);
    CHECK_THROWS_AS(chain_dag(store, 0, 1, 2), std::invalid_argument);
}

TEST_CASE("reachable is ascending, sub_dags sorted by height") {
    DagStore store(agf_alphabet());
    const NodeId a = store.intern(0, {});
    const NodeId ga = store.intern(1, {a});
    const NodeId faa = store.intern(2, {a, a});
    const NodeId top = store.intern(2, {ga, faa});

    CHECK(store.reachable(top) == std::vector<NodeId>{a, ga, faa, top});
    CHECK(store.reachable(ga) == std::vector<NodeId>{a, ga});
    CHECK(store.dag_size(top) == 4);

    // ga and faa share height 1; ties break by id.
    CHECK(store.sub_dags(top) == std::vector<NodeId>{a, ga, faa, top});
}

TEST_CASE("dag text round trip") {
    DagStore store(agf_alphabet());
    const NodeId box = store.box();
    const NodeId a = store.intern(0, {});
    const NodeId c = store.intern(2, {store.intern(1, {box}), a});

    std::ostringstream out;
    print_dag(store, c, out);

    DagStore fresh(agf_alphabet());
    std::istringstream in(out.str());
    const NodeId back = parse_dag(fresh, in, "mem");
    CHECK(fresh.term_string(back) == store.term_string(c));
    CHECK(fresh.is_context(back));
    CHECK(fresh.dag_size(back) == store.dag_size(c));
}

TEST_CASE("dag parser reports positions") {
    auto parse = [](const std::string& text) {
        DagStore store(agf_alphabet());
        std::istringstream in(text);
        return parse_dag(store, in, "t.dag");
    };
    CHECK_NOTHROW(parse("node 0 a\nnode 1 g 0\nroot 1\n"));
    CHECK_NOTHROW(parse("node 7 a\nnode 3 f 7 7\nroot 3\n")); // sparse ids

    auto fails = [&](const std::string& text, int line) {
        try {
            parse(text);
            FAIL_CHECK("expected ParseError for: " << text);
        } catch (const ParseError& e) {
            CHECK(e.line() == line);
            CHECK(e.source() == "t.dag");
            CHECK(std::string(e.what()).find("t.dag:") == 0);
        }
    };
    fails("node 0 a\nnode 0 g 0\nroot 0\n", 2);     // duplicate id
    fails("node 0 a\nnode 1 g 2\nroot 1\n", 2);     // undefined successor
    fails("node 0 a\nnode 1 g 0 0\nroot 1\n", 2);   // arity mismatch
    fails("node 0 h\nroot 0\n", 1);                 // unknown symbol
    fails("node 0 _ 0\nroot 0\n", 1);               // box with successors
    fails("node 0 a\n", 2);                         // missing root
    fails("node 0 a\nroot 0\nnode 1 g 0\n", 3);     // node after root
    fails("node 0 a\nroot 0\nroot 0\n", 3);         // second root
    fails("root 5\n", 1);                           // root never defined
    fails("node x a\nroot 0\n", 1);                 // bad id token
    fails("banana\n", 1);                           // unknown keyword
}

TEST_CASE("term strings") {
    DagStore store(agf_alphabet());
    const NodeId a = store.intern(0, {});
    const NodeId t = store.intern(2, {a, store.intern(1, {a})});
    CHECK(store.term_string(t) == "f(a,g(a))");
    CHECK(store.term_string(store.box()) == "_");
}
