#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "srg/core.hpp"

using namespace srg;

TEST_CASE("int set basics") {
    auto fin = IntSet::finite({3, 1, 3});
    CHECK(fin.support == std::vector<int>{1, 3});
    CHECK(fin.contains(1));
    CHECK(!fin.contains(2));
    CHECK(fin.top() == 3);
    CHECK(fin.min_elem() == 1);

    auto cof = IntSet::at_least(1);
    CHECK(cof.cofinite);
    CHECK(!cof.contains(0));
    CHECK(cof.contains(7));
    CHECK(cof.top() == 1);
    CHECK(cof.min_elem() == 1);
    CHECK(cof.is_simple());

    auto holey = IntSet::cofinite_excluding({0, 2, 5});
    CHECK(holey.top() == 6);
    CHECK(holey.min_elem() == 1);
    CHECK(!holey.is_simple());

    CHECK(IntSet::all().top() == 0);
    CHECK(IntSet::all().is_full());
    CHECK_THROWS(IntSet::finite({-1}));
}

TEST_CASE("pair tops") {
    Pair dom(IntSet::all(), IntSet::at_least(1));
    CHECK(dom.s_top == 0);
    CHECK(dom.r_top == 1);
    CHECK(dom.t_top == 1);

    Pair p(IntSet::finite({1, 3}), IntSet::cofinite_excluding({0, 2, 5}));
    CHECK(p.s_top == 3);
    CHECK(p.r_top == 6);

    CHECK_THROWS(Pair(IntSet::finite({}), IntSet::all()));
}

TEST_CASE("triviality") {
    CHECK(is_trivial(Pair(IntSet::finite({0, 2}), IntSet::finite({0}))));
    CHECK(is_trivial(Pair(IntSet::all(), IntSet::all())));
    CHECK(!is_trivial(Pair(IntSet::finite({0}), IntSet::finite({1}))));
    CHECK(!is_trivial(Pair(IntSet::all(), IntSet::at_least(1))));
    CHECK(!is_trivial(Pair(IntSet::finite({0}), IntSet::finite({0, 1}))));
}

TEST_CASE("structure parameter") {
    auto m = [](std::vector<int> s, std::vector<int> r) {
        return max_structured(Pair(IntSet::finite(std::move(s)), IntSet::finite(std::move(r))));
    };
    CHECK(m({0, 3}, {3}) == 3);
    CHECK(m({0, 2, 4}, {2}) == 2);
    CHECK(m({0, 2}, {1, 2}) == 1);
    CHECK(!m({1}, {2}).has_value());  // unbounded
    CHECK(max_structured(Pair(IntSet::all(), IntSet::at_least(1))) == 1);
    CHECK(max_structured(Pair(IntSet::finite({2}), IntSet::at_least(2))) == 1);
}

TEST_CASE("complexity base") {
    auto c = [](IntSet s, IntSet r) { return c_sigma_rho(Pair(std::move(s), std::move(r))); };
    // 1-structured: s_top + r_top + 2
    CHECK(c(IntSet::all(), IntSet::at_least(1)) == 3);            // domination
    CHECK(c(IntSet::finite({0, 3}), IntSet::finite({3, 4})) == 9);
    CHECK(c(IntSet::at_least(1), IntSet::at_least(1)) == 4);       // total domination
    // unbounded / structured >= 3: max + 1
    CHECK(c(IntSet::finite({0}), IntSet::finite({1})) == 2);       // perfect code
    CHECK(c(IntSet::finite({1}), IntSet::finite({1})) == 2);
    CHECK(c(IntSet::finite({0, 3}), IntSet::finite({3})) == 4);
    // exactly 2-structured with equal even tops: max + 2
    CHECK(c(IntSet::finite({0, 2}), IntSet::finite({0, 2})) == 4);
    CHECK(c(IntSet::finite({0, 2, 4}), IntSet::finite({2, 4})) == 6);
    // exactly 2-structured but tops unequal or odd: max + 1
    CHECK(c(IntSet::finite({0, 2}), IntSet::finite({1, 3})) == 4);
    CHECK(c(IntSet::finite({0, 2, 4}), IntSet::finite({0, 2})) == 5);
    CHECK_THROWS(c(IntSet::all(), IntSet::all()));
}

TEST_CASE("state inversion") {
    Pair p(IntSet::finite({1, 3}), IntSet::at_least(1));  // s_top 3, r_top 1
    CHECK(invert_state(sig(1), p) == sig(2));
    CHECK(invert_state(rho(0), p) == rho(1));
    CHECK(invert_state(invert_state(sig(3), p), p) == sig(3));
    CHECK_THROWS(invert_state(sig(4), p));
    StateString x{sig(0), rho(1)};
    CHECK(invert_string(x, p) == StateString{sig(3), rho(0)});
    CHECK(to_string(x) == "s0 r1");
}

TEST_CASE("weight vector") {
    auto [w, tot] = weight_vector({sig(2), rho(0), rho(3)});
    CHECK(w == std::vector<int>{2, 0, 3});
    CHECK(tot == 5);
}

TEST_CASE("language") {
    Language l;
    l.portal_count = 2;
    l.insert({sig(0), rho(1)});
    l.insert({rho(0), rho(0)});
    CHECK(l.strings.size() == 2);
    CHECK_THROWS(l.insert({sig(0)}));
    Language bigger = l;
    bigger.insert({sig(1), sig(1)});
    CHECK(l.subset_of(bigger));
    CHECK(!bigger.subset_of(l));
}

TEST_CASE("instance construction") {
    Pair p(IntSet::finite({0}), IntSet::finite({1}));
    Instance g(p);
    auto vs = g.add_vertices(3);
    g.add_edge(vs[0], vs[1]);
    g.add_edge(vs[1], vs[2]);
    g.add_edge(vs[1], vs[0]);  // duplicate, ignored
    CHECK(g.edges.size() == 2);
    CHECK(g.has_edge(1, 0));
    CHECK(!g.has_edge(0, 2));
    CHECK_THROWS(g.add_edge(0, 0));
    CHECK_THROWS(g.add_edge(0, 9));

    int aux = g.family.ensure(IntSet::all(), IntSet::finite({}), 2);
    CHECK(aux == 1);
    CHECK(g.family.ensure(IntSet::all(), IntSet::finite({})) == 1);
    int w = g.add_vertex(aux);
    CHECK(g.label_of(w) == aux);
    CHECK(g.label_of(0) == 0);
    g.validate();

    g.add_constraint({0, 2}, masks_with_weight(2, 1));
    CHECK(g.constraints[0].accepts(0b01));
    CHECK(!g.constraints[0].accepts(0b11));
    CHECK(g.arity() == 2);
    CHECK(g.size_measure() == 4 + 2);
    auto scoped = g.scoped_vertices();
    CHECK(scoped[0]);
    CHECK(!scoped[1]);
    CHECK_THROWS(g.add_constraint({0, 0}, {0}));
}

TEST_CASE("c-bound enforcement") {
    Pair p(IntSet::all(), IntSet::at_least(1));
    Instance g(p);
    int aux = g.family.ensure(IntSet::finite({0}), IntSet::all(), 1);
    g.add_vertex(aux);
    g.validate();
    g.add_vertex(aux);
    CHECK_THROWS(g.validate());
}

TEST_CASE("path decomposition checks") {
    Pair p(IntSet::all(), IntSet::at_least(1));
    Instance g(p);
    g.add_vertices(4);
    g.add_edge(0, 1);
    g.add_edge(1, 2);
    g.add_edge(2, 3);

    PathDecomposition pd;
    pd.bags = {{0, 1}, {1, 2}, {2, 3}};
    CHECK(validate_path_decomposition(g, pd) == 1);

    PathDecomposition missing;
    missing.bags = {{0, 1}, {1, 2}};
    auto v = check_path_decomposition(g, missing);
    REQUIRE(v.has_value());
    CHECK(v->condition == "T.1");

    PathDecomposition gap;
    gap.bags = {{0, 1}, {2, 3}, {1, 2}};
    v = check_path_decomposition(g, gap);
    REQUIRE(v.has_value());
    CHECK(v->condition == "T.3");

    PathDecomposition no_edge;
    no_edge.bags = {{0}, {1}, {2}, {3}};
    v = check_path_decomposition(g, no_edge);
    REQUIRE(v.has_value());
    CHECK(v->condition == "T.2");

    g.add_constraint({0, 3}, {0, 1, 2});
    v = check_path_decomposition(g, pd);
    REQUIRE(v.has_value());
    CHECK(v->condition == "scope");
    PathDecomposition big = PathDecomposition::single_bag(4);
    CHECK(validate_path_decomposition(g, big) == 3);
}

TEST_CASE("trivial closed forms") {
    Pair all2(IntSet::all(), IntSet::all());
    Instance g(all2);
    g.add_vertices(5);
    g.add_edge(0, 1);
    CHECK(trivial_count(all2, g) == 32);

    // rho = {0}: solutions are unions of components whose degrees all lie in sigma.
    Pair p(IntSet::finite({0, 2}), IntSet::finite({0}));
    Instance h(p);
    h.add_vertices(7);
    h.add_edge(0, 1);  // P3 component: degrees 1,2,1 -> not eligible
    h.add_edge(1, 2);
    h.add_edge(3, 4);  // triangle: all degree 2 -> eligible
    h.add_edge(4, 5);
    h.add_edge(3, 5);
    // vertex 6 isolated: degree 0 -> eligible
    CHECK(trivial_count(p, h) == 4);
    CHECK_THROWS(trivial_count(Pair(IntSet::finite({0}), IntSet::finite({1})), h));
}
