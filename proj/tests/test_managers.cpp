#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sstream>
#include <srg/managers.hpp>

using namespace srg;

namespace {

void expect_certified(const Manager& m, bool count_check = true) {
    ManagerCertificate c = certify_manager(m, count_check);
    INFO(c.detail);
    CHECK(c.ok);
}

}  // namespace

TEST_CASE("relation-chain counter agrees with brute force") {
    Pair p(IntSet::finite({0, 1}), IntSet::finite({0, 1}));
    Instance g(p);
    g.add_vertices(4);
    g.add_edge(0, 1);
    g.add_edge(1, 2);
    g.add_edge(2, 3);
    // Cover all vertices with two overlapping all-accepting relations.
    g.add_constraint({0, 1, 2}, masks_with_weight_at_least(3, 0));
    g.add_constraint({2, 3}, masks_with_weight_at_least(2, 0));
    CHECK(count_via_relations(g) == count_sets(g));

    // Restricting a relation restricts the count accordingly.
    Instance h = g;
    h.constraints[1] = Constraint{{2, 3}, {Int(3)}, {}};
    Int total = count_via_relations(h);
    CHECK(total < count_via_relations(g));
    CHECK(total == count_sets(h));

    // Uncovered vertices are rejected rather than miscounted.
    Instance bad(p);
    bad.add_vertices(2);
    bad.add_constraint({0}, {Int(0), Int(1)});
    CHECK_THROWS(count_via_relations(bad));
}

TEST_CASE("neighbor-split manager from rho ladders") {
    Pair p(IntSet::finite({0}), IntSet::finite({1}));  // perfect code
    for (int rank = 1; rank <= 2; ++rank) {
        Manager m = build_manager(ManagerCase::RCase, p, rank);
        CHECK((int)m.alphabet.size() == p.r_top + 1);
        CHECK(m.rank() == rank);
        expect_certified(m);
    }
    // Structure-only checks stay cheap at higher ranks.
    expect_certified(build_manager(ManagerCase::RCase, p, 6), false);

    Pair dom(IntSet::all(), IntSet::at_least(1));
    Manager md = build_manager(ManagerCase::RCase, dom, 1);
    CHECK((int)md.alphabet.size() == dom.r_top + 1);
    expect_certified(md);
}

TEST_CASE("neighbor-split manager for even pairs") {
    Pair p(IntSet::finite({0, 2}), IntSet::finite({0, 2}));
    Manager m = build_manager(ManagerCase::EvenCase, p, 1);
    CHECK((int)m.alphabet.size() == (p.s_top + p.r_top) / 2 + 2);
    expect_certified(m);

    Pair q(IntSet::finite({2}), IntSet::finite({0, 2}));
    Manager mq = build_manager(ManagerCase::EvenCase, q, 1);
    CHECK((int)mq.alphabet.size() == (q.s_top + q.r_top) / 2 + 2);
    expect_certified(mq);
    expect_certified(build_manager(ManagerCase::EvenCase, q, 4), false);
    CHECK_THROWS(build_manager(ManagerCase::EvenCase,
                               Pair(IntSet::finite({0}), IntSet::finite({1})), 1));
}

TEST_CASE("neighbor-split manager from the all-sigma block provider") {
    Pair p(IntSet::finite({1}), IntSet::finite({1}));  // total perfect code
    Manager m = build_manager(ManagerCase::SCase, p, 1);
    CHECK((int)m.alphabet.size() == p.s_top + 1);
    for (const State& a : m.alphabet) CHECK(a.flavor == Flavor::Sigma);
    expect_certified(m);
    CHECK_THROWS(build_manager(ManagerCase::SCase,
                               Pair(IntSet::finite({1}), IntSet::finite({0})), 1));
}

TEST_CASE("neighbor-split manager for unstructured pairs") {
    Pair p(IntSet::finite({1}), IntSet::finite({0, 1}));
    Manager m = build_manager(ManagerCase::ACase, p, 1);
    CHECK((int)m.alphabet.size() == p.s_top + p.r_top + 2);
    expect_certified(m);
}

TEST_CASE("unstructured manager at rank two, structure only") {
    Pair p(IntSet::finite({1}), IntSet::finite({0, 1}));
    Manager m = build_manager(ManagerCase::ACase, p, 2);
    CHECK(m.rank() == 2);
    expect_certified(m, false);
}

TEST_CASE("unstructured manager with sigma = {0}") {
    Pair p(IntSet::finite({0}), IntSet::finite({0, 1}));
    Manager m = build_manager(ManagerCase::ACase, p, 2);
    CHECK((int)m.alphabet.size() == p.s_top + p.r_top + 2);
    expect_certified(m);
}

TEST_CASE("unstructured manager with r_top = s_top = 0 is empty") {
    Pair p(IntSet::finite({0}), IntSet::all());
    Manager m = build_manager(ManagerCase::ACase, p, 3);
    CHECK(m.inst.n == 3);
    CHECK(m.inst.edges.empty());
    CHECK((int)m.alphabet.size() == 2);
    expect_certified(m);
}

TEST_CASE("alphabet stays closed under state inversion") {
    struct Probe { ManagerCase mc; Pair p; };
    std::vector<Probe> probes{
        {ManagerCase::RCase, Pair(IntSet::finite({0}), IntSet::finite({2}))},
        {ManagerCase::EvenCase, Pair(IntSet::finite({2}), IntSet::finite({0, 2}))},
        {ManagerCase::SCase, Pair(IntSet::finite({1}), IntSet::finite({1}))},
        {ManagerCase::ACase, Pair(IntSet::finite({1}), IntSet::finite({0, 1}))},
    };
    for (const auto& pr : probes) {
        Manager m = build_manager(pr.mc, pr.p, 1);
        for (const State& a : m.alphabet) {
            State inv = invert_state(a, pr.p);
            CHECK(std::find(m.alphabet.begin(), m.alphabet.end(), inv) != m.alphabet.end());
        }
    }
}

TEST_CASE("manager serialization round trip") {
    Pair p(IntSet::finite({0}), IntSet::finite({1}));
    Manager m = build_manager(ManagerCase::RCase, p, 2);
    std::string text = serialize_manager(m);
    SrgFile f = parse_srg(text);
    CHECK(f.inst.n == m.inst.n);
    CHECK(f.inst.edges == m.inst.edges);
    CHECK(f.portals == m.distinguished);
    REQUIRE(f.blocks.size() == 4);
    CHECK(f.blocks[0].vertices == m.blocks[0]);
    CHECK(f.blocks[1].barred);
    CHECK(f.blocks[1].vertices == m.cblocks[0]);
}

TEST_CASE("block sizes never exceed the declared bound") {
    Pair p(IntSet::finite({1}), IntSet::finite({0, 1}));
    for (int rank : {1, 2, 3}) {
        Manager m = build_manager(ManagerCase::ACase, p, rank);
        for (int i = 0; i < rank; ++i) {
            CHECK((int)m.blocks[i].size() <= m.block_bound);
            CHECK((int)m.cblocks[i].size() <= m.block_bound);
        }
    }
}
