#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <srg/sat.hpp>

using namespace srg;

namespace {

long brute_sat_count(const SatInstance& phi) {
    long total = 0;
    for (long a = 0; a < (1L << phi.n); ++a) {
        bool ok = true;
        for (const auto& cl : phi.clauses) {
            bool sat = false;
            for (int lit : cl)
                if ((bool)((a >> (std::abs(lit) - 1)) & 1) == (lit > 0)) {
                    sat = true;
                    break;
                }
            if (!sat) {
                ok = false;
                break;
            }
        }
        if (ok) ++total;
    }
    return total;
}

// Shared compile context: perfect-code pair, rho-ladder manager, groups of
// two alphabet letters with one variable each.
struct Ctx {
    Pair p{IntSet::finite({0}), IntSet::finite({1})};
    EncodingMap enc;
    Ctx() {
        Manager probe = build_manager(ManagerCase::RCase, p, 1);
        enc = choose_parameters(probe.alphabet, p, 2, 1);
    }
    CompiledSat compile(const SatInstance& phi) const {
        Manager mgr = build_manager(ManagerCase::RCase, p, required_rank(phi, enc));
        return compile_sat(phi, mgr, enc);
    }
};

}  // namespace

TEST_CASE("dimacs parsing") {
    SatInstance phi = parse_dimacs("c comment\np cnf 3 2\n1 -2 0\n2 3 0\n");
    CHECK(phi.n == 3);
    REQUIRE(phi.clauses.size() == 2);
    CHECK(phi.clauses[0] == std::vector<int>{1, -2});
    CHECK(phi.clauses[1] == std::vector<int>{2, 3});
    CHECK_THROWS(parse_dimacs("p cnf 1 1\n2 0\n"));     // literal out of range
    CHECK_THROWS(parse_dimacs("1 0\n"));                // missing header
    CHECK_THROWS(parse_dimacs("p cnf 1 1\n1\n"));       // unterminated clause
}

TEST_CASE("constant-weight encoding selection") {
    Pair p(IntSet::finite({0}), IntSet::finite({1}));
    std::vector<State> A{rho(0), rho(1)};
    // g=1 leaves singleton weight classes; the q formula hits zero.
    CHECK_THROWS(choose_parameters(A, p, 1));
    EncodingMap enc = choose_parameters(A, p, 2, 1);
    CHECK(enc.weight == 1);
    REQUIRE(enc.codewords.size() == 2);
    CHECK(enc.codewords[0] != enc.codewords[1]);
    for (const auto& c : enc.codewords) {
        CHECK(c.size() == 2);
        CHECK(c[0].count + c[1].count == 1);
    }
    // Too many assignments for the class size.
    CHECK_THROWS(choose_parameters(A, p, 2, 2));
}

TEST_CASE("encoding inverts codewords on simple cofinite sets") {
    Pair p(IntSet::at_least(1), IntSet::at_least(1));  // total domination
    std::vector<State> A{sig(0), sig(1), rho(0), rho(1)};
    EncodingMap enc = choose_parameters(A, p, 1, 1);
    // Both sets are simple cofinite: every codeword letter is inverted twice
    // on its own flavor, and the class keeps its size.
    CHECK(enc.codewords.size() == 2);
}

TEST_CASE("compiled formulas count satisfying assignments") {
    Ctx ctx;
    struct Case { std::string dimacs; };
    std::vector<std::string> formulas{
        "p cnf 1 1\n1 0\n",
        "p cnf 1 2\n1 0\n-1 0\n",
        "p cnf 2 1\n1 2 0\n",
        "p cnf 2 2\n1 2 0\n-1 -2 0\n",
        "p cnf 3 2\n1 -2 0\n2 3 0\n",
        "p cnf 2 3\n1 0\n-1 2 0\n-2 1 0\n",
    };
    for (const auto& text : formulas) {
        SatInstance phi = parse_dimacs(text);
        CompiledSat cs = ctx.compile(phi);
        INFO(text);
        CHECK(count_via_relations(cs.inst) == Int(brute_sat_count(phi)));
    }
}

TEST_CASE("every solution gives row vertices exactly top-many neighbors") {
    Ctx ctx;
    SatInstance phi = parse_dimacs("p cnf 2 1\n1 2 0\n");
    Manager mgr = build_manager(ManagerCase::RCase, ctx.p, required_rank(phi, ctx.enc));
    CompiledSat cs = compile_sat(phi, mgr, ctx.enc);
    Int base = count_via_relations(cs.inst);
    REQUIRE(base == 3);
    // Pinning any distinguished row vertex to "exactly s_top selected
    // neighbors if selected, r_top if not" must not change the count.
    auto adj = cs.inst.adjacency();
    // The manager copies are spliced first with all-fresh vertices, so copy j
    // occupies the contiguous range starting at j * mgr.inst.n.
    std::vector<int> ws;
    for (int j = 0; j <= cs.m; ++j)
        for (int k = 0; k < mgr.rank(); ++k)
            ws.push_back(j * mgr.inst.n + mgr.distinguished[k]);
    for (int w : ws) {
        REQUIRE(w < cs.inst.n);
        std::vector<int> scope{w};
        for (int x : adj[w]) scope.push_back(x);
        REQUIRE(scope.size() <= 62);
        std::vector<Int> masks;
        for (uint64_t msk = 0; msk < (1ull << scope.size()); ++msk) {
            int cnt = 0;
            for (size_t z = 1; z < scope.size(); ++z) cnt += (msk >> z) & 1;
            int top = (msk & 1) ? ctx.p.s_top : ctx.p.r_top;
            if (cnt == top) masks.push_back(Int((unsigned long)msk));
        }
        Instance pinned = cs.inst;
        pinned.add_constraint(scope, std::move(masks));
        CHECK(count_via_relations(pinned) == base);
    }
}

TEST_CASE("emitted decomposition validates with the promised width") {
    Ctx ctx;
    SatInstance phi = parse_dimacs("p cnf 3 2\n1 -2 0\n2 3 0\n");
    CompiledSat cs = ctx.compile(phi);
    int width = validate_path_decomposition(cs.inst, cs.pd);
    CHECK(width <= ctx.enc.g * cs.t + cs.width_constant);
    CHECK(cs.t == 3);
    CHECK(cs.m == 2);
}

TEST_CASE("compiler rejects mismatched parameters") {
    Ctx ctx;
    SatInstance phi = parse_dimacs("p cnf 2 1\n1 2 0\n");
    Manager wrong = build_manager(ManagerCase::RCase, ctx.p, 1);
    CHECK_THROWS(compile_sat(phi, wrong, ctx.enc));
}
