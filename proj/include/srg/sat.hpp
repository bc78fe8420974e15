#pragma once
// CNF -> graph compiler: encodes a SAT formula as a (sigma,rho) domination
// instance with relational constraints, built around copies of a manager
// gadget. Satisfying assignments correspond one-to-one to solutions, and the
// emitted path decomposition has width g*t plus a formula-independent term.

#include <cmath>
#include <cstdint>
#include <functional>
#include <istream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "managers.hpp"

namespace srg {

struct SatInstance {
    int n = 0;                              // variable count
    std::vector<std::vector<int>> clauses;  // DIMACS literals (no trailing 0)
};

inline SatInstance parse_dimacs(std::istream& in) {
    SatInstance out;
    int declared_clauses = -1;
    std::vector<int> cur;
    std::string tok;
    bool header = false;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && (line[0] == 'c' || line[0] == '%')) continue;
        std::istringstream ls(line);
        if (!header) {
            std::string first;
            if (!(ls >> first)) continue;
            if (first == "p") {
                std::string kind;
                if (!(ls >> kind >> out.n >> declared_clauses) || kind != "cnf")
                    throw std::runtime_error("dimacs: bad problem line");
                header = true;
                continue;
            }
            throw std::runtime_error("dimacs: expected problem line, got '" + first + "'");
        }
        int lit;
        std::istringstream body(line);
        while (body >> lit) {
            if (lit == 0) {
                out.clauses.push_back(cur);
                cur.clear();
            } else {
                if (std::abs(lit) > out.n)
                    throw std::runtime_error("dimacs: literal out of range");
                cur.push_back(lit);
            }
        }
    }
    if (!header) throw std::runtime_error("dimacs: missing problem line");
    if (!cur.empty()) throw std::runtime_error("dimacs: clause not terminated by 0");
    if (declared_clauses >= 0 && (int)out.clauses.size() != declared_clauses)
        throw std::runtime_error("dimacs: clause count mismatch");
    return out;
}

inline SatInstance parse_dimacs(const std::string& text) {
    std::istringstream in(text);
    return parse_dimacs(in);
}

// ---------------------------------------------------------------------------
// Encoding of q-variable assignment groups as constant-weight codewords over
// the manager alphabet.

struct EncodingMap {
    int g = 1;       // group width in manager states
    int q = 0;       // variables per group; all 2^q assignments are encoded
    int weight = 0;  // common weight of the pre-inversion codeword class
    std::vector<State> alphabet;
    std::vector<StateString> codewords;    // e: assignment index -> codeword
    std::map<StateString, long> decode;    // inverse of e
};

namespace sat_detail {

inline int state_weight(const State& s) { return s.count; }

inline State invert_sigma_only(const State& s, const Pair& p) {
    if (s.flavor != Flavor::Sigma) return s;
    if (s.count > p.s_top) throw std::runtime_error("sigma state above top");
    return sig(p.s_top - s.count);
}
inline State invert_rho_only(const State& s, const Pair& p) {
    if (s.flavor != Flavor::Rho) return s;
    if (s.count > p.r_top) throw std::runtime_error("rho state above top");
    return rho(p.r_top - s.count);
}
inline bool simple_cofinite(const IntSet& s) { return s.cofinite && s.is_simple(); }

}  // namespace sat_detail

// Picks the largest constant-weight class of A^g, applies the per-set state
// inversion when sigma or rho is simple cofinite, and fixes an injective
// encoding of 2^q assignments. The q formula is the asymptotic choice; callers
// at desk scale usually force a small q instead.
inline EncodingMap choose_parameters(const std::vector<State>& alphabet, const Pair& p,
                                     int g, std::optional<int> force_q = std::nullopt) {
    if (g < 1) throw std::runtime_error("group width must be positive");
    if (alphabet.empty()) throw std::runtime_error("empty alphabet");
    EncodingMap enc;
    enc.g = g;
    enc.alphabet = alphabet;

    std::map<int, std::vector<StateString>> by_weight;
    StateString cur(g, alphabet.front());
    auto rec = [&](auto&& self, int pos, int wt) -> void {
        if (pos == g) {
            by_weight[wt].push_back(cur);
            return;
        }
        for (const State& s : alphabet) {
            cur[pos] = s;
            self(self, pos + 1, wt + sat_detail::state_weight(s));
        }
    };
    rec(rec, 0, 0);
    size_t best = 0;
    for (const auto& [w, cls] : by_weight)
        if (cls.size() > best) {
            best = cls.size();
            enc.weight = w;
        }
    std::vector<StateString> codes = by_weight[enc.weight];

    int max_a = 0;
    for (const State& s : alphabet) max_a = std::max(max_a, s.count);
    if (force_q) {
        enc.q = *force_q;
    } else {
        double bits = g * std::log2((double)alphabet.size()) - std::log2(g * max_a + 1.0);
        enc.q = (int)std::floor(bits);
    }
    if (enc.q < 1) throw std::runtime_error("group too narrow: q < 1, raise g or force q");
    if ((size_t)1 << enc.q > codes.size())
        throw std::runtime_error("cannot encode 2^q assignments in the codeword class");

    if (sat_detail::simple_cofinite(p.sigma))
        for (auto& c : codes)
            for (auto& s : c) s = sat_detail::invert_sigma_only(s, p);
    if (sat_detail::simple_cofinite(p.rho))
        for (auto& c : codes)
            for (auto& s : c) s = sat_detail::invert_rho_only(s, p);
    std::sort(codes.begin(), codes.end());

    enc.codewords.assign(codes.begin(), codes.begin() + ((size_t)1 << enc.q));
    for (long a = 0; a < (long)enc.codewords.size(); ++a)
        enc.decode.emplace(enc.codewords[a], a);
    if (enc.decode.size() != enc.codewords.size())
        throw std::runtime_error("encoding not injective");
    return enc;
}

// ---------------------------------------------------------------------------
// The compiler.

struct CompiledSat {
    Instance inst;
    PathDecomposition pd;
    int t = 0;               // variable groups (rows)
    int m = 0;               // clauses (manager columns minus one)
    int width_constant = 0;  // K with width(pd) <= g*t + K
};

// Manager rank needed to compile phi with this encoding.
inline int required_rank(const SatInstance& phi, const EncodingMap& enc) {
    int t = std::max(1, (phi.n + enc.q - 1) / enc.q);
    return t * enc.g;
}

inline CompiledSat compile_sat(const SatInstance& phi, const Manager& mgr,
                               const EncodingMap& enc) {
    const auto& pe = mgr.inst.family.pairs.at(0);
    Pair p(pe.sigma, pe.rho);
    if (!p.sigma.is_simple() || !p.rho.is_simple())
        throw std::runtime_error("compile_sat: sets must be finite or simple cofinite");
    {
        std::set<State> ma(mgr.alphabet.begin(), mgr.alphabet.end());
        for (const State& s : enc.alphabet)
            if (!ma.count(s)) throw std::runtime_error("compile_sat: alphabet mismatch");
    }
    const int g = enc.g, q = enc.q;
    const int t = std::max(1, (phi.n + q - 1) / q);
    const int m = (int)phi.clauses.size();
    if (mgr.rank() != t * g) throw std::runtime_error("compile_sat: manager rank must be t*g");

    CompiledSat out;
    out.t = t;
    out.m = m;
    Instance& G = out.inst;
    G = Instance(p);

    // Manager columns J^0..J^m. w[j][k] is the distinguished vertex for flat
    // row index k = (i-1)*g + (l-1); blocks/cblocks follow the copy.
    auto splice_all = [&](const Instance& proto) {
        return manager_detail::splice(G, proto, {}, {});
    };
    std::vector<std::vector<int>> jmap(m + 1);
    for (int j = 0; j <= m; ++j) jmap[j] = splice_all(mgr.inst);
    auto wv = [&](int j, int i, int l) {  // i in [1..t], l in [1..g]
        return jmap[j][mgr.distinguished[(i - 1) * g + (l - 1)]];
    };
    // Per flat index: neighbors of the distinguished vertex inside its own
    // B / Bbar block, in manager coordinates.
    std::vector<std::vector<int>> nb(mgr.rank()), nbb(mgr.rank());
    {
        auto adj = mgr.inst.adjacency();
        for (int k = 0; k < mgr.rank(); ++k) {
            std::set<int> b(mgr.blocks[k].begin(), mgr.blocks[k].end());
            std::set<int> cb(mgr.cblocks[k].begin(), mgr.cblocks[k].end());
            for (int x : adj[mgr.distinguished[k]]) {
                if (b.count(x)) nb[k].push_back(x);
                if (cb.count(x)) nbb[k].push_back(x);
            }
        }
    }
    auto nb_of = [&](int j, int i, int l, bool barred) {
        const auto& src = (barred ? nbb : nb)[(i - 1) * g + (l - 1)];
        std::vector<int> outv;
        for (int x : src) outv.push_back(jmap[j][x]);
        return outv;
    };

    // Clause-column vertices c_i^j with pinned {sigma_smin, rho_rmin}
    // providers, plus the endpoint HW relations.
    PortalGadget qproto = build_provider(ParsimoniousSR{p.s_min(), p.r_min(), false}, p);
    std::vector<std::vector<int>> c(m + 1);            // c[j][i], j in [1..m]
    std::vector<std::vector<std::vector<int>>> qmap(m + 1);
    for (int j = 1; j <= m; ++j) {
        c[j].resize(t + 1);
        qmap[j].resize(t + 1);
        for (int i = 0; i <= t; ++i) {
            c[j][i] = G.add_vertex();
            qmap[j][i] = manager_detail::splice(G, qproto.inst, qproto.portals, {c[j][i]});
        }
        G.add_constraint({c[j][0]}, {Int(0)});
        G.add_constraint({c[j][t]}, {Int(1)});
    }

    // Assignment semantics. Group F_i holds variables (i-1)*q+1 .. i*q; slots
    // past phi.n are padding and must stay false for parsimony.
    auto assignment_valid = [&](int i, long a) {
        int real = std::max(0, std::min(q, phi.n - (i - 1) * q));
        return (a >> real) == 0;
    };
    auto group_satisfies = [&](int i, long a, int j) {
        for (int lit : phi.clauses[j - 1]) {
            int var = std::abs(lit);
            if ((var - 1) / q != i - 1) continue;
            bool val = (a >> ((var - 1) % q)) & 1;
            if (val == (lit > 0)) return true;
        }
        return false;
    };

    // Materializes one relation: scope segments are (vertex-list, owner w)
    // groups whose selected counts form states; accept() sees the decoded
    // states and the raw selection bits.
    struct Segment {
        int w;                   // index into scope of the state's vertex
        std::vector<int> nbrs;   // indices into scope of its counted block nbrs
    };
    auto materialize = [&](std::vector<int> scope,
                           const std::function<bool(const std::vector<bool>&)>& accept) {
        if (scope.size() > 24)
            throw std::runtime_error("relation scope too large to enumerate");
        std::vector<Int> masks;
        for (uint64_t msk = 0; msk < (1ull << scope.size()); ++msk) {
            std::vector<bool> bits(scope.size());
            for (size_t z = 0; z < scope.size(); ++z) bits[z] = (msk >> z) & 1;
            if (accept(bits)) masks.push_back(Int((unsigned long)msk));
        }
        G.add_constraint(std::move(scope), std::move(masks));
    };
    auto state_of = [](bool sel, int cnt) { return sel ? sig(cnt) : rho(cnt); };

    // R_i^j for j in [1..m]: scope = c_{i-1}, c_i, then per l the quadruple
    // (w^{j-1}, NBbar(w^{j-1}), w^j, NB(w^j)).
    for (int j = 1; j <= m; ++j)
        for (int i = 1; i <= t; ++i) {
            std::vector<int> scope{c[j][i - 1], c[j][i]};
            std::vector<Segment> prev(g), curseg(g);
            for (int l = 1; l <= g; ++l) {
                prev[l - 1].w = (int)scope.size();
                scope.push_back(wv(j - 1, i, l));
                for (int x : nb_of(j - 1, i, l, true)) {
                    prev[l - 1].nbrs.push_back((int)scope.size());
                    scope.push_back(x);
                }
                curseg[l - 1].w = (int)scope.size();
                scope.push_back(wv(j, i, l));
                for (int x : nb_of(j, i, l, false)) {
                    curseg[l - 1].nbrs.push_back((int)scope.size());
                    scope.push_back(x);
                }
            }
            materialize(scope, [&, i, j, prev, curseg](const std::vector<bool>& bits) {
                StateString a(g, sig(0));
                for (int l = 0; l < g; ++l) {
                    int cnt = 0;
                    for (int z : curseg[l].nbrs) cnt += bits[z];
                    a[l] = state_of(bits[curseg[l].w], cnt);
                }
                auto it = enc.decode.find(a);
                if (it == enc.decode.end() || !assignment_valid(i, it->second)) return false;
                for (int l = 0; l < g; ++l) {
                    int cnt = 0;
                    for (int z : prev[l].nbrs) cnt += bits[z];
                    State ab = state_of(bits[prev[l].w], cnt);
                    if (!(ab == invert_state(a[l], p))) return false;
                }
                bool cp = bits[0], cc = bits[1];
                if (cp) return cc;
                return cc == group_satisfies(i, it->second, j);
            });
        }
    // R_i^0 over (w^0, NB) and R_i^{m+1} over (w^m, NBbar).
    for (int i = 1; i <= t; ++i) {
        for (int side = 0; side < 2; ++side) {
            bool barred = side == 1;
            int j = barred ? m : 0;
            std::vector<int> scope;
            std::vector<Segment> seg(g);
            for (int l = 1; l <= g; ++l) {
                seg[l - 1].w = (int)scope.size();
                scope.push_back(wv(j, i, l));
                for (int x : nb_of(j, i, l, barred)) {
                    seg[l - 1].nbrs.push_back((int)scope.size());
                    scope.push_back(x);
                }
            }
            materialize(scope, [&, i, barred, seg](const std::vector<bool>& bits) {
                StateString a(g, sig(0));
                for (int l = 0; l < g; ++l) {
                    int cnt = 0;
                    for (int z : seg[l].nbrs) cnt += bits[z];
                    State s = state_of(bits[seg[l].w], cnt);
                    if (barred) {
                        int top = s.flavor == Flavor::Sigma ? p.s_top : p.r_top;
                        if (s.count > top) return false;
                        s = invert_state(s, p);
                    }
                    a[l] = s;
                }
                auto it = enc.decode.find(a);
                return it != enc.decode.end() && assignment_valid(i, it->second);
            });
        }
    }

    // Node-search path decomposition: stages j in [0..m+1], rounds i in
    // [1..t]. Y_i^j gathers the scope of R_i^j, the blocks feeding it, and
    // the providers of c_{i-1}^j and c_i^j. Row t of the previous stage is
    // kept in every bag of a stage: it guards the single bridge between the
    // B- and Bbar-chains of that manager copy.
    auto block_of = [&](int j, int i, int l, bool barred) {
        const auto& src = (barred ? mgr.cblocks : mgr.blocks)[(i - 1) * g + (l - 1)];
        std::vector<int> outv;
        for (int x : src) outv.push_back(jmap[j][x]);
        return outv;
    };
    auto yset = [&](int j, int i) {
        std::set<int> y;
        for (int l = 1; l <= g; ++l) {
            if (j >= 1) {
                y.insert(wv(j - 1, i, l));
                for (int x : block_of(j - 1, i, l, true)) y.insert(x);
            }
            if (j <= m) {
                y.insert(wv(j, i, l));
                for (int x : block_of(j, i, l, false)) y.insert(x);
            }
        }
        if (j >= 1 && j <= m) {
            for (int ci : {i - 1, i}) {
                y.insert(c[j][ci]);
                for (int x : qmap[j][ci]) y.insert(x);
            }
        }
        return y;
    };
    std::vector<std::vector<std::set<int>>> Y(m + 2);
    for (int j = 0; j <= m + 1; ++j) {
        Y[j].resize(t + 1);
        for (int i = 1; i <= t; ++i) Y[j][i] = yset(j, i);
    }
    size_t max_y = 0;
    for (int j = 0; j <= m + 1; ++j)
        for (int i = 1; i <= t; ++i) max_y = std::max(max_y, Y[j][i].size());
    for (int j = 0; j <= m + 1; ++j)
        for (int i = 1; i <= t; ++i) {
            std::set<int> bag = Y[j][i];
            if (i + 1 <= t) bag.insert(Y[j][i + 1].begin(), Y[j][i + 1].end());
            if (j >= 1) bag.insert(Y[j - 1][t].begin(), Y[j - 1][t].end());
            if (j <= m)
                for (int z = 1; z < i; ++z)
                    for (int l = 1; l <= g; ++l) bag.insert(wv(j, z, l));
            if (j >= 1)
                for (int z = i + 1; z <= t; ++z)
                    for (int l = 1; l <= g; ++l) bag.insert(wv(j - 1, z, l));
            out.pd.bags.emplace_back(bag.begin(), bag.end());
        }
    out.width_constant = (int)(3 * max_y);

    // Order the constraints along the decomposition (first covering bag,
    // ties by original position). Exact counters that sweep the constraint
    // list then enjoy the same locality as a decomposition-based DP; without
    // this, every manager column stays live until the R relations.
    {
        std::vector<std::set<int>> bagsets;
        for (const auto& b : out.pd.bags) bagsets.emplace_back(b.begin(), b.end());
        auto first_bag = [&](const Constraint& cn) {
            for (size_t bi = 0; bi < bagsets.size(); ++bi) {
                bool ok = true;
                for (int v : cn.scope)
                    if (!bagsets[bi].count(v)) {
                        ok = false;
                        break;
                    }
                if (ok) return bi;
            }
            throw std::runtime_error("constraint scope not covered by any bag");
        };
        std::vector<std::pair<size_t, size_t>> keyed;
        for (size_t ci = 0; ci < G.constraints.size(); ++ci)
            keyed.emplace_back(first_bag(G.constraints[ci]), ci);
        std::stable_sort(keyed.begin(), keyed.end());
        std::vector<Constraint> ordered;
        ordered.reserve(G.constraints.size());
        for (auto [bi, ci] : keyed) ordered.push_back(std::move(G.constraints[ci]));
        G.constraints = std::move(ordered);
    }
    int width = validate_path_decomposition(G, out.pd);
    if (width > g * t + out.width_constant)
        throw std::runtime_error("decomposition wider than the declared bound");
    return out;
}

}  // namespace srg
