#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <srg/providers.hpp>

using namespace srg;

namespace {

Pair domination() { return Pair(IntSet::all(), IntSet::at_least(1)); }
Pair total_domination() { return Pair(IntSet::at_least(1), IntSet::at_least(1)); }
Pair perfect_code() { return Pair(IntSet::finite({0}), IntSet::finite({1})); }

void expect_provider(const PortalGadget& g, int leaf = 16, long budget = 400000000l) {
    auto res = certify_gadget_split(g, leaf, budget);
    INFO(res.witness);
    CHECK(res.cls != GadgetClass::Fail);
    if (g.parsimonious_claim) CHECK(res.cls == GadgetClass::ParsimoniousRealizer);
}

}  // namespace

TEST_CASE("single sigma/rho state gadgets") {
    expect_provider(build_provider(SigmaRho{1, 1}, domination()));
    expect_provider(build_provider(SigmaRho{0, 2}, domination()));
    expect_provider(build_provider(SigmaRho{0, 1}, perfect_code()));
    expect_provider(build_provider(SigmaRho{2, 1}, total_domination()));
    // r = 0 variant uses a plain clique.
    Pair p(IntSet::finite({0, 2}), IntSet::finite({0, 2}));
    expect_provider(build_provider(SigmaRho{2, 0}, p));
    CHECK_THROWS(build_provider(SigmaRho{1, 1}, perfect_code()));
}

TEST_CASE("all-rho-states gadget") {
    expect_provider(build_provider(RhoLadder{}, domination()));
    expect_provider(build_provider(RhoLadder{}, perfect_code()));
    expect_provider(build_provider(RhoLadder{}, Pair(IntSet::finite({1, 3}), IntSet::finite({0, 2}))));
}

TEST_CASE("regular bipartite scaffold") {
    PortalGadget g = build_provider(CirculantKind{5, 3}, domination());
    CHECK(g.inst.n == 10);
    auto adj = g.inst.adjacency();
    for (int v = 0; v < 10; ++v) CHECK(adj[v].size() == 3);
    for (int i = 0; i < 5; ++i) CHECK(g.inst.has_edge(i, 5 + i));  // the built-in matching
    // Complete bipartite at d == n.
    PortalGadget h = build_provider(CirculantKind{3, 3}, domination());
    CHECK(h.inst.edges.size() == 9);
}

TEST_CASE("all-sigma block gadget") {
    PortalGadget g = build_provider(LrBlock{1}, domination());
    CHECK(g.portals.size() == 4);
    CHECK(g.declared->strings.size() == 7);  // empty pattern + C(4,2) patterns
    // Portal closed neighborhoods are pairwise disjoint.
    auto adj = g.inst.adjacency();
    std::set<int> seen;
    for (int u : g.portals) {
        std::set<int> cn(adj[u].begin(), adj[u].end());
        cn.insert(u);
        for (int v : cn) CHECK(!seen.count(v));
        seen.insert(cn.begin(), cn.end());
    }
    expect_provider(g);
}

TEST_CASE("three-portal coupled gadget") {
    Pair p(IntSet::finite({1}), IntSet::finite({1}));
    expect_provider(build_provider(TripleLsr{1, 1}, p));
    expect_provider(build_provider(TripleLsr{1, 1}, total_domination()));
    CHECK_THROWS(build_provider(TripleLsr{0, 1}, domination()));
}

TEST_CASE("uniform multi-portal gadget") {
    Pair p(IntSet::finite({0, 1}), IntSet::finite({1}));
    PortalGadget g = build_provider(DeltaTriple{0, 1, 1, 1}, p);
    CHECK(g.portals.size() == 1);
    expect_provider(g);
    PortalGadget h = build_provider(DeltaTriple{0, 1, 1, 2}, p);
    CHECK(h.portals.size() == 2);
    expect_provider(h);
}

TEST_CASE("balance gadget, modulus 1") {
    expect_provider(build_provider(RhoMSigma0{false}, domination()));
    expect_provider(build_provider(RhoMSigma0{false}, total_domination()));
}

TEST_CASE("balance gadget, modulus 2") {
    Pair p(IntSet::finite({0, 2}), IntSet::finite({1}));
    expect_provider(build_provider(RhoMSigma0{false}, p));
    expect_provider(build_provider(RhoMSigma0{true}, p));
    Pair q(IntSet::finite({1}), IntSet::finite({0, 2}));
    expect_provider(build_provider(RhoMSigma0{false}, q));
    expect_provider(build_provider(RhoMSigma0{true}, q));
}

TEST_CASE("two-portal ladder gadgets") {
    Pair p(IntSet::finite({1}), IntSet::finite({0, 1}));
    expect_provider(build_provider(PairLadder{}, p));
    expect_provider(build_provider(MixedPair{}, p));
    expect_provider(build_provider(PairLadder{}, total_domination()));
    expect_provider(build_provider(MixedPair{}, total_domination()));
}

TEST_CASE("even-states gadgets") {
    Pair p(IntSet::finite({1}), IntSet::finite({0, 2}));
    expect_provider(build_provider(EvenSingle{}, p));
    Pair q(IntSet::finite({2}), IntSet::finite({0, 2}));
    expect_provider(build_provider(EvenAll{}, q));
    CHECK_THROWS(build_provider(EvenAll{}, p));  // odd sigma top
}

TEST_CASE("pinned two-state gadgets") {
    for (bool hw : {false, true}) {
        PortalGadget g = build_provider(ParsimoniousSR{1, 1, hw}, domination());
        CHECK(g.parsimonious_claim);
        expect_provider(g);
    }
    PortalGadget h = build_provider(ParsimoniousSR{0, 1, false}, perfect_code());
    expect_provider(h);
    CHECK_THROWS(build_provider(ParsimoniousSR{0, 0, true},
                                Pair(IntSet::finite({0, 2}), IntSet::finite({0, 2}))));
}

TEST_CASE("cofinite auxiliary gadgets") {
    PortalGadget g = build_provider(CofSigmaAux{}, domination());
    CHECK(g.parsimonious_claim);
    expect_provider(g);
    expect_provider(build_provider(CofSigmaAux{}, total_domination()));
    PortalGadget h = build_provider(CofRhoAux{}, domination());
    CHECK(h.parsimonious_claim);
    expect_provider(h);
    expect_provider(build_provider(CofRhoAux{}, total_domination()));
    CHECK_THROWS(build_provider(CofSigmaAux{}, perfect_code()));
    CHECK_THROWS(build_provider(CofRhoAux{}, perfect_code()));
}

TEST_CASE("prescribed bipartite degrees") {
    Pair p = domination();
    auto res = build_degree_bipartite(p, {3, 1, 2}, {2, 2, 2}, 3);
    auto adj = res.graph.adjacency();
    CHECK(adj[res.left[0]].size() == 3);
    CHECK(adj[res.left[1]].size() == 1);
    CHECK(adj[res.left[2]].size() == 2);
    for (int i = 0; i < 3; ++i) CHECK(adj[res.right[i]].size() == 2);
    for (size_t i = 3; i < res.left.size(); ++i) CHECK(adj[res.left[i]].size() == 3);
    for (size_t i = 3; i < res.right.size(); ++i) CHECK(adj[res.right[i]].size() == 3);
    // Edges only run between the two sides.
    std::set<int> ls(res.left.begin(), res.left.end());
    for (auto [a, b] : res.graph.edges) CHECK(ls.count(a) + ls.count(b) == 1);
    CHECK_THROWS(build_degree_bipartite(p, {1}, {2}, 2));   // sums differ
    CHECK_THROWS(build_degree_bipartite(p, {5}, {5}, 3));   // demand above padding degree
}
