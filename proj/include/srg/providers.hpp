#ifndef SRG_PROVIDERS_HPP
#define SRG_PROVIDERS_HPP

// Constructive gadget builders. Each builder emits a PortalGadget with a
// declared language; certify_gadget / certify_gadget_split verify the claim
// against ground truth. The central primitives:
//   * switch gadget: lets an anchor vertex be either selected with s selected
//     neighbors or unselected with r selected neighbors (two complementary
//     global solutions), optionally pinned to exactly those two by a relation;
//   * regular bipartite scaffolds and a greedy bipartite degree-sequence
//     builder used to wire prescribed degree patterns;
//   * a two-sided "balance" gadget whose single portal supports exactly the
//     states rho_0, rho_m, sigma_0 (m the structure modulus of the pair);
//   * composite gadgets stacking the above into multi-portal languages.

#include "core.hpp"
#include "oracle.hpp"

#include <functional>
#include <variant>

namespace srg {

// ---------------------------------------------------------------------------
// Provider kinds.

struct SigmaRho { int s, r; };                         // {sigma_s, rho_r}, single portal
struct RhoLadder {};                                   // {rho_0 .. rho_rtop}
struct CirculantKind { int n, d; };                    // d-regular bipartite scaffold
struct LrBlock { int r; };                             // all-sigma strings, weight 0 or 2r
struct TripleLsr { int s, r; };                        // 3 portals, 3 coupled states
struct DeltaTriple { int s_low, s_high, r, k; };       // delta portals, uniform states
struct RhoMSigma0 { bool two_portal; };                // {rho_0, rho_m, sigma_0}
struct PairLadder {};                                  // {r0r0, r0s0, s0s0, s1s1}
struct MixedPair {};                                   // {r0s0, r1s0, s0s0, s1s1}
struct EvenSingle {};                                  // {rho_0, rho_2, sigma_0, sigma_2}
struct EvenAll {};                                     // all even states
struct ParsimoniousSR { int s, r; bool hw_only; };     // pinned switch gadget
struct CofSigmaAux {};                                 // {sigma_0, sigma_1, rho_0}, sigma cofinite
struct CofRhoAux {};                                   // {sigma_0, rho_0, rho_1}, rho cofinite

using ProviderKind =
    std::variant<SigmaRho, RhoLadder, CirculantKind, LrBlock, TripleLsr, DeltaTriple,
                 RhoMSigma0, PairLadder, MixedPair, EvenSingle, EvenAll, ParsimoniousSR,
                 CofSigmaAux, CofRhoAux>;

namespace build_detail {

// ---------------------------------------------------------------------------
// Switch gadget anchored at an existing vertex v. If r >= 1: two mirror halves
// X (containing v) and Y, each a row of r cliques of order s+1, joined by
// index-wise bicliques; selecting exactly X gives v state sigma_s, selecting
// exactly Y gives rho_r. If r == 0: a clique of order s+1 through v (select
// all or nothing). Returns the two complementary solutions (X includes v).
struct SwitchParts {
    std::vector<int> with_anchor;     // selected when the anchor is selected
    std::vector<int> without_anchor;  // selected when the anchor is not
};

inline SwitchParts attach_switch(Instance& g, int v, int s, int r) {
    SwitchParts parts;
    if (r == 0) {
        std::vector<int> clique{v};
        for (int j = 0; j < s; ++j) clique.push_back(g.add_vertex());
        for (size_t a = 0; a < clique.size(); ++a)
            for (size_t b = a + 1; b < clique.size(); ++b) g.add_edge(clique[a], clique[b]);
        parts.with_anchor = clique;
        return parts;
    }
    // x[i][j], y[i][j]: i-th clique, j-th slot; v takes x[0][0].
    std::vector<std::vector<int>> x(r, std::vector<int>(s + 1));
    std::vector<std::vector<int>> y(r, std::vector<int>(s + 1));
    for (int i = 0; i < r; ++i)
        for (int j = 0; j <= s; ++j) {
            x[i][j] = (i == 0 && j == 0) ? v : g.add_vertex();
            y[i][j] = g.add_vertex();
        }
    for (int i = 0; i < r; ++i)
        for (int j = 0; j <= s; ++j)
            for (int j2 = j + 1; j2 <= s; ++j2) {
                g.add_edge(x[i][j], x[i][j2]);
                g.add_edge(y[i][j], y[i][j2]);
            }
    // Same-slot bicliques between the two halves.
    for (int j = 0; j <= s; ++j)
        for (int i = 0; i < r; ++i)
            for (int i2 = 0; i2 < r; ++i2) g.add_edge(x[i][j], y[i2][j]);
    for (int i = 0; i < r; ++i)
        for (int j = 0; j <= s; ++j) {
            parts.with_anchor.push_back(x[i][j]);
            parts.without_anchor.push_back(y[i][j]);
        }
    return parts;
}

// Switch gadget pinned to its two intended solutions: either by one relation
// over all its vertices, or by pairwise exactly-one-selected relations across
// the two halves (the latter needs r >= 1).
inline void attach_switch_pinned(Instance& g, int v, int s, int r, bool hw_only) {
    SwitchParts parts = attach_switch(g, v, s, r);
    if (hw_only) {
        if (r == 0) throw std::runtime_error("pairwise pinning needs r >= 1");
        for (int a : parts.with_anchor)
            for (int b : parts.without_anchor)
                g.add_constraint({a, b}, masks_with_weight(2, 1));
        return;
    }
    std::vector<int> scope = parts.with_anchor;
    scope.insert(scope.end(), parts.without_anchor.begin(), parts.without_anchor.end());
    Int m_with = 0, m_without = 0;
    for (size_t i = 0; i < parts.with_anchor.size(); ++i) mpz_setbit(m_with.get_mpz_t(), i);
    for (size_t i = 0; i < parts.without_anchor.size(); ++i)
        mpz_setbit(m_without.get_mpz_t(), parts.with_anchor.size() + i);
    g.add_constraint(std::move(scope), {m_with, m_without});
}

// d-regular bipartite scaffold on 2n vertices: sides v_0..v_{n-1} and
// w_0..w_{n-1}, edge {v_i, w_j} iff (i - j) mod n in [0, d). Contains the
// matching {v_i, w_i} whenever d >= 1.
inline std::pair<std::vector<int>, std::vector<int>> add_circulant(Instance& g, int n, int d) {
    if (d > n) throw std::runtime_error("degree exceeds side size");
    std::vector<int> vs = g.add_vertices(n), ws = g.add_vertices(n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (((i - j) % n + n) % n < d) g.add_edge(vs[i], ws[j]);
    return {vs, ws};
}

// d-regular graph on an existing even-sized vertex set.
inline void make_regular(Instance& g, const std::vector<int>& verts, int d) {
    int n = (int)verts.size() / 2;
    if ((int)verts.size() % 2 || d > n) throw std::runtime_error("cannot build regular graph");
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (((i - j) % n + n) % n < d) g.add_edge(verts[i], verts[n + j]);
}

// Greedy bipartite builder for prescribed degrees: repeatedly take a
// right-side vertex with remaining demand d and connect it to the d
// highest-demand left vertices. Returns false if some demand cannot be met.
inline bool wire_bipartite(Instance& g, std::vector<std::pair<int, int>> left,
                           std::vector<std::pair<int, int>> right) {
    long sl = 0, sr = 0;
    for (auto& [v, c] : left) sl += c;
    for (auto& [v, c] : right) sr += c;
    if (sl != sr) return false;
    for (auto& [w, d] : right) {
        if (d == 0) continue;
        std::stable_sort(left.begin(), left.end(),
                         [](const auto& a, const auto& b) { return a.second > b.second; });
        if ((int)left.size() < d || left[d - 1].second <= 0) return false;
        for (int i = 0; i < d; ++i) {
            g.add_edge(left[i].first, w);
            --left[i].second;
        }
        d = 0;
    }
    for (auto& [v, c] : left)
        if (c != 0) return false;
    return true;
}

// Three-part coupled gadget with anchors (va, vb, vc): each part is a row of
// r cliques of order s+1, parts pairwise joined slot-wise; the edges va-vb
// and va-vc are removed. Selecting part X gives (sigma_{s-1}, sigma_{s-1},
// rho_{r-1}); part Y gives (rho_r, rho_r, rho_r); part Z gives
// (rho_{r-1}, rho_r, sigma_s).
inline void attach_triple(Instance& g, int va, int vb, int vc, int s, int r) {
    if (s < 1 || r < 1) throw std::runtime_error("triple gadget needs s, r >= 1");
    auto grid = [&](int anchor1, int anchor2) {
        // rows i in [0,r), slots j in [0,s]; anchors occupy (0,0) and (0,1).
        std::vector<std::vector<int>> m(r, std::vector<int>(s + 1));
        for (int i = 0; i < r; ++i)
            for (int j = 0; j <= s; ++j)
                m[i][j] = (i == 0 && j == 0 && anchor1 >= 0) ? anchor1
                          : (i == 0 && j == 1 && anchor2 >= 0) ? anchor2
                                                               : g.add_vertex();
        for (int i = 0; i < r; ++i)
            for (int j = 0; j <= s; ++j)
                for (int j2 = j + 1; j2 <= s; ++j2) g.add_edge(m[i][j], m[i][j2]);
        return m;
    };
    auto X = grid(va, vb), Y = grid(-1, -1), Z = grid(vc, -1);
    auto join = [&](const std::vector<std::vector<int>>& a,
                    const std::vector<std::vector<int>>& b) {
        for (int j = 0; j <= s; ++j)
            for (int i = 0; i < r; ++i)
                for (int i2 = 0; i2 < r; ++i2) g.add_edge(a[i][j], b[i2][j]);
    };
    join(X, Y);
    join(X, Z);
    join(Y, Z);
    auto remove_edge = [&](int u, int v) {
        if (u > v) std::swap(u, v);
        auto it = std::lower_bound(g.edges.begin(), g.edges.end(), std::make_pair(u, v));
        if (it == g.edges.end() || *it != std::make_pair(u, v))
            throw std::runtime_error("edge to remove is absent");
        g.edges.erase(it);
    };
    remove_edge(va, vb);  // same clique, slots 0 and 1
    remove_edge(va, vc);  // cross-part slot-0 biclique
}

// Multi-anchor uniformizer: given delta = k * (s_high - s_low) existing
// anchors, builds a gadget whose anchors jointly support the uniform states
// (rho_r)^delta, (rho_{r-1})^delta, (sigma_s)^delta.
inline void attach_delta(Instance& g, const std::vector<int>& anchors, int s_low, int s_high,
                         int r, int k, int s) {
    int step = s_high - s_low;
    if (step <= 0 || (int)anchors.size() != k * step)
        throw std::runtime_error("anchor count must be k * (s_high - s_low)");
    int delta = (int)anchors.size();
    std::vector<int> A = g.add_vertices(delta), B = g.add_vertices(delta);
    for (int i = 0; i < delta; ++i) attach_triple(g, A[i], B[i], anchors[i], s, r);
    auto hang_switch_row = [&](const std::vector<int>& row) {
        std::vector<int> hub = g.add_vertices(k);
        for (int d = 0; d < k; ++d) attach_switch(g, hub[d], s_low, r);
        for (int i = 0; i < delta; ++i) g.add_edge(row[i], hub[i / step]);
    };
    hang_switch_row(A);
    hang_switch_row(B);
}

// Finite sub-pair extraction: a cofinite set is replaced by {t, t+1} for the
// smallest t with both t and t+1 present; the structure modulus is preserved.
inline std::vector<int> finite_core(const IntSet& s) {
    if (!s.cofinite) return s.support;
    int t = 0;
    while (!(s.contains(t) && s.contains(t + 1))) ++t;
    return {t, t + 1};
}

// Integer combination: finds z with sum z_i * gen_i = -m (gens nonzero).
inline std::vector<long> combination_for(const std::vector<long>& gens, long m) {
    if (gens.empty()) throw std::runtime_error("no generators");
    std::function<long(long, long, long&, long&)> egcd = [&](long a, long b, long& x,
                                                             long& y) -> long {
        if (b == 0) {
            x = 1;
            y = 0;
            return a;
        }
        long x1, y1;
        long d = egcd(b, a % b, x1, y1);
        x = y1;
        y = x1 - (a / b) * y1;
        return d;
    };
    std::vector<long> coef(gens.size(), 0);
    long gcur = gens[0];
    coef[0] = 1;
    for (size_t i = 1; i < gens.size(); ++i) {
        long x, y;
        long d = egcd(gcur, gens[i], x, y);
        for (size_t j = 0; j < i; ++j) coef[j] *= x;
        coef[i] = y;
        gcur = d;
    }
    if (gcur == 0 || m % gcur != 0) throw std::runtime_error("modulus not representable");
    long scale = -(m / gcur);
    for (auto& c : coef) c *= scale;
    return coef;
}

// The balance gadget: two mirrored sides L and R wired by a bipartite graph
// whose degree pattern encodes one solution of the combination above. Portal
// states: rho_0 (nothing selected), rho_m (R selected), sigma_0 (L selected).
// With two_portal (requires m = 2) the portal is split into two degree-1
// portals, giving the pairwise-equal states r0r0 / r1r1 / s0s0.
inline std::vector<int> attach_balance(Instance& g, const Pair& p, bool two_portal,
                                       std::vector<int> preset_portals = {}) {
    if (p.r_top < 1) throw std::runtime_error("balance gadget needs r_top >= 1");
    auto m_opt = max_structured(p);
    if (!m_opt) throw std::runtime_error("structure modulus undefined for two singletons");
    int m = *m_opt;
    if (m > 2) throw std::runtime_error("balance gadget needs modulus 1 or 2");
    if (two_portal && m != 2) throw std::runtime_error("portal split needs modulus 2");

    std::vector<int> sig = finite_core(p.sigma), rho = finite_core(p.rho);
    long s1 = sig.front(), r1 = rho.front();
    std::vector<long> gens;
    std::vector<std::pair<char, int>> gen_src;  // ('r', i) or ('s', j), index into core
    for (size_t i = 1; i < rho.size(); ++i) {
        gens.push_back(rho[i] - r1);
        gen_src.push_back({'r', (int)i});
    }
    for (size_t j = 1; j < sig.size(); ++j) {
        gens.push_back(sig[j] - s1);
        gen_src.push_back({'s', (int)j});
    }
    std::vector<long> z = combination_for(gens, m);

    // Degrees per side. Left mirrors positive coefficients, right negative.
    long a0 = rho.back() - r1;  // demand of the padding vertices
    long maxdeg = m;
    for (size_t t = 0; t < gens.size(); ++t) maxdeg = std::max(maxdeg, gens[t]);
    maxdeg = std::max(maxdeg, a0);

    // s >= 1 and r >= 1 inside the cores, needed for the uniformizer.
    int s_any = (int)sig.back();
    int r_any = 0;
    for (long x : rho)
        if (x >= 1) {
            r_any = (int)x;
            break;
        }

    for (long k = std::max<long>(1, maxdeg); k < std::max<long>(1, maxdeg) + 50; ++k) {
        Instance trial = g;
        std::vector<std::pair<int, int>> left, right;
        std::vector<int> portals = preset_portals;
        size_t want = two_portal ? 2 : 1;
        if (portals.size() > want) throw std::runtime_error("too many preset portals");
        while (portals.size() < want) portals.push_back(trial.add_vertex());
        for (int q : portals) left.push_back({q, two_portal ? 1 : m});
        std::vector<int> plain;                              // anchors of switch gadgets
        std::vector<std::pair<std::vector<int>, int>> rows;  // uniformizer rows: (anchors, j)
        auto add_group = [&](std::vector<std::pair<int, int>>& side, char kind, int idx,
                             long count) {
            if (count <= 0) return;
            if (kind == 'r') {
                long deg = rho[idx] - r1;
                for (long c = 0; c < count; ++c) {
                    int v = trial.add_vertex();
                    side.push_back({v, (int)deg});
                    plain.push_back(v);
                }
            } else {
                long b = (sig[idx] - s1) * count;
                std::vector<int> anchors;
                for (long c = 0; c < b; ++c) {
                    int v = trial.add_vertex();
                    side.push_back({v, 1});
                    anchors.push_back(v);
                }
                rows.push_back({std::move(anchors), idx});
            }
        };
        for (size_t t = 0; t < gens.size(); ++t) {
            auto [kind, idx] = gen_src[t];
            add_group(left, kind, idx, std::max<long>(z[t], 0));
            add_group(right, kind, idx, std::max<long>(-z[t], 0));
        }
        for (long c = 0; c < k; ++c) {  // padding on both sides
            int v = trial.add_vertex();
            left.push_back({v, (int)a0});
            plain.push_back(v);
            int w = trial.add_vertex();
            right.push_back({w, (int)a0});
            plain.push_back(w);
        }
        if (!wire_bipartite(trial, left, right)) continue;
        for (int v : plain) attach_switch(trial, v, (int)s1, (int)r1);
        for (auto& [anchors, idx] : rows) {
            int y = (int)(anchors.size() / (sig[idx] - s1));
            attach_delta(trial, anchors, (int)s1, sig[idx], r_any, y, s_any);
        }
        g = std::move(trial);
        return portals;
    }
    throw std::runtime_error("bipartite wiring failed for all padding sizes");
}

// Ladder: clique of order s_top+1 with one edge removed; two pendant portals
// attached to the endpoints of the missing edge; every clique vertex carries
// r_top balance gadgets so it can be fed 0..r_top selected neighbors.
inline std::vector<int> attach_ladder(Instance& g, const Pair& p,
                                      std::optional<std::pair<int, int>> preset = std::nullopt) {
    if (p.s_top < 1) throw std::runtime_error("ladder needs s_top >= 1");
    if (p.r_top >= 1 && max_structured(p) != std::optional<int>(1))
        throw std::runtime_error("ladder needs structure modulus 1 when r_top >= 1");
    std::vector<int> K = g.add_vertices(p.s_top + 1);
    for (size_t a = 0; a < K.size(); ++a)
        for (size_t b = a + 1; b < K.size(); ++b)
            if (!(a == 0 && b == 1)) g.add_edge(K[a], K[b]);
    int u1 = preset ? preset->first : g.add_vertex();
    int u2 = preset ? preset->second : g.add_vertex();
    g.add_edge(u1, K[0]);
    g.add_edge(u2, K[1]);
    for (int v : K)
        for (int c = 0; c < p.r_top; ++c) attach_balance(g, p, false, {v});
    return {u1, u2};
}

// Even-states gadget attached at an existing portal u: a balance gadget at u
// (states rho_0, rho_2, sigma_0) plus a complete bipartite graph K on
// s_top + s_top vertices minus one edge, whose missing-edge endpoints are tied
// to u; each opposite pair of K carries r_top two-portal balance gadgets.
// Contributes the states rho_0, rho_2, sigma_0, sigma_2 at u.
inline void attach_even_single(Instance& g, const Pair& p, int u) {
    if (p.s_top < 1) throw std::runtime_error("even-states gadget needs s_top >= 1");
    attach_balance(g, p, false, {u});
    std::vector<int> W1 = g.add_vertices(p.s_top), W2 = g.add_vertices(p.s_top);
    for (int a = 0; a < p.s_top; ++a)
        for (int b = 0; b < p.s_top; ++b)
            if (!(a == 0 && b == 0)) g.add_edge(W1[a], W2[b]);
    g.add_edge(u, W1[0]);
    g.add_edge(u, W2[0]);
    for (int i = 0; i < p.s_top; ++i)
        for (int c = 0; c < p.r_top; ++c) attach_balance(g, p, true, {W1[i], W2[i]});
}

inline Language lang_of(int portals, std::vector<StateString> strings) {
    Language l;
    l.portal_count = portals;
    for (auto& s : strings) l.insert(std::move(s));
    return l;
}

}  // namespace build_detail

// ---------------------------------------------------------------------------
// Bipartite graph with a prescribed degree sequence plus equal padding on
// both sides (pad vertices have degree a). Returns the instance, the two
// sides, and the padding size used.
struct DegreeBipartiteResult {
    Instance graph;
    std::vector<int> left, right;
    int pad;
};

inline DegreeBipartiteResult build_degree_bipartite(const Pair& base, std::vector<int> cs,
                                                    std::vector<int> ds, int a) {
    long sc = 0, sd = 0;
    for (int c : cs) {
        sc += c;
        if (c > a) throw std::runtime_error("padding degree below demand");
    }
    for (int d : ds) {
        sd += d;
        if (d > a) throw std::runtime_error("padding degree below demand");
    }
    if (sc != sd) throw std::runtime_error("degree sums differ");
    for (int pad = a;; ++pad) {
        Instance g(base);
        std::vector<std::pair<int, int>> left, right;
        std::vector<int> lv, rv;
        for (int c : cs) {
            int v = g.add_vertex();
            lv.push_back(v);
            left.push_back({v, c});
        }
        for (int i = 0; i < pad; ++i) {
            int v = g.add_vertex();
            lv.push_back(v);
            left.push_back({v, a});
        }
        for (int d : ds) {
            int v = g.add_vertex();
            rv.push_back(v);
            right.push_back({v, d});
        }
        for (int i = 0; i < pad; ++i) {
            int v = g.add_vertex();
            rv.push_back(v);
            right.push_back({v, a});
        }
        if (build_detail::wire_bipartite(g, left, right))
            return {std::move(g), std::move(lv), std::move(rv), pad};
        if (pad > a + 100) throw std::runtime_error("degree sequence not realizable");
    }
}

// ---------------------------------------------------------------------------
// The main builder.

inline PortalGadget build_provider(const ProviderKind& kind, const Pair& p) {
    using namespace build_detail;

    if (auto* k = std::get_if<SigmaRho>(&kind)) {
        if (!p.sigma.contains(k->s) || !p.rho.contains(k->r))
            throw std::runtime_error("states outside the pair");
        Instance g(p);
        int u = g.add_vertex();
        attach_switch(g, u, k->s, k->r);
        PortalGadget out(std::move(g), {u});
        out.declare(lang_of(1, {{sig(k->s)}, {rho(k->r)}}));
        return out;
    }

    if (std::get_if<RhoLadder>(&kind)) {
        int s = p.s_min(), r = p.r_min();
        Instance g(p);
        int u = g.add_vertex();
        for (int i = 0; i < p.r_top; ++i) {
            int ui = g.add_vertex();
            g.add_edge(u, ui);
            attach_switch(g, ui, s, r);
        }
        std::vector<StateString> L;
        for (int j = 0; j <= p.r_top; ++j) L.push_back({rho(j)});
        PortalGadget out(std::move(g), {u});
        out.declare(lang_of(1, std::move(L)));
        return out;
    }

    if (auto* k = std::get_if<CirculantKind>(&kind)) {
        Instance g(p);
        add_circulant(g, k->n, k->d);
        return PortalGadget(std::move(g), {});
    }

    if (auto* k = std::get_if<LrBlock>(&kind)) {
        int r = k->r;
        if (r < 1 || !p.rho.contains(r)) throw std::runtime_error("needs r >= 1 in rho");
        int s = -1;
        for (int c = r; c <= std::max(p.s_top, r) + 1; ++c)
            if (p.sigma.contains(c)) {
                s = c;
                break;
            }
        if (s < 0) throw std::runtime_error("needs some s >= r in sigma");
        Instance g(p);
        std::vector<int> U = g.add_vertices(4 * r);
        int nblocks = 2 * s + 2;
        // One sub-gadget per 2r-subset A of the portals.
        std::vector<int> sel(4 * r, 0);
        std::fill(sel.begin(), sel.begin() + 2 * r, 1);
        std::sort(sel.begin(), sel.end());
        std::vector<std::vector<int>> subsets;
        do {
            std::vector<int> A;
            for (int i = 0; i < 4 * r; ++i)
                if (sel[i]) A.push_back(i);
            subsets.push_back(std::move(A));
        } while (std::next_permutation(sel.begin(), sel.end()));
        for (const auto& A : subsets) {
            std::vector<std::vector<int>> V(nblocks), W(nblocks);
            for (int q = 0; q < nblocks; ++q) {
                V[q] = g.add_vertices(r);
                W[q] = g.add_vertices(q < 2 ? r - 1 : r);
            }
            for (int q = 0; q < nblocks; ++q)
                for (int a : V[q])
                    for (int b : W[q]) g.add_edge(a, b);
            // s-regular graph on all V-vertices, minus a matching between
            // blocks 0 and 1 (whose vertices shall have degree s-1).
            std::vector<int> vall;
            for (int q = 0; q < nblocks; q += 2) vall.insert(vall.end(), V[q].begin(), V[q].end());
            size_t half = vall.size();
            for (int q = 1; q < nblocks; q += 2) vall.insert(vall.end(), V[q].begin(), V[q].end());
            // Blocks 0 and 1 occupy the first r slots of each side; the
            // scaffold has the slot-wise matching, which we skip.
            {
                int n2 = (int)half;
                for (int i = 0; i < n2; ++i)
                    for (int j = 0; j < n2; ++j)
                        if (((i - j) % n2 + n2) % n2 < s && !(i == j && i < r))
                            g.add_edge(vall[i], vall[(size_t)n2 + j]);
            }
            std::vector<int> wall;
            for (int q = 0; q < nblocks; ++q) wall.insert(wall.end(), W[q].begin(), W[q].end());
            make_regular(g, wall, s);
            for (int pidx = 0; pidx < 2 * r; ++pidx) {
                if (pidx < r)
                    g.add_edge(U[A[pidx]], V[0][pidx]);
                else
                    g.add_edge(U[A[pidx]], V[1][pidx - r]);
            }
        }
        std::vector<StateString> L;
        L.push_back(StateString(4 * r, sig(0)));
        for (const auto& A : subsets) {
            StateString x(4 * r, sig(0));
            for (int i : A) x[i] = sig(1);
            L.push_back(std::move(x));
        }
        PortalGadget out(std::move(g), U);
        out.declare(lang_of(4 * r, std::move(L)));
        return out;
    }

    if (auto* k = std::get_if<TripleLsr>(&kind)) {
        if (!p.sigma.contains(k->s) || !p.rho.contains(k->r) || k->s < 1 || k->r < 1)
            throw std::runtime_error("needs s, r >= 1 inside the pair");
        Instance g(p);
        int a = g.add_vertex(), b = g.add_vertex(), c = g.add_vertex();
        attach_triple(g, a, b, c, k->s, k->r);
        PortalGadget out(std::move(g), {a, b, c});
        out.declare(lang_of(3, {{sig(k->s - 1), sig(k->s - 1), rho(k->r - 1)},
                                {rho(k->r), rho(k->r), rho(k->r)},
                                {rho(k->r - 1), rho(k->r), sig(k->s)}}));
        return out;
    }

    if (auto* k = std::get_if<DeltaTriple>(&kind)) {
        if (!p.sigma.contains(k->s_low) || !p.sigma.contains(k->s_high) ||
            !p.rho.contains(k->r) || k->r < 1)
            throw std::runtime_error("states outside the pair");
        int s = -1;
        for (int c = 1; c <= p.s_top + 1; ++c)
            if (p.sigma.contains(c)) {
                s = c;
                break;
            }
        if (s < 0) throw std::runtime_error("needs a positive element in sigma");
        Instance g(p);
        int delta = k->k * (k->s_high - k->s_low);
        std::vector<int> C = g.add_vertices(delta);
        attach_delta(g, C, k->s_low, k->s_high, k->r, k->k, s);
        PortalGadget out(std::move(g), C);
        out.declare(lang_of(delta, {StateString(delta, rho(k->r)),
                                    StateString(delta, rho(k->r - 1)),
                                    StateString(delta, sig(s))}));
        return out;
    }

    if (auto* k = std::get_if<RhoMSigma0>(&kind)) {
        Instance g(p);
        auto portals = attach_balance(g, p, k->two_portal);
        int m = *max_structured(p);
        PortalGadget out(std::move(g), portals);
        if (k->two_portal)
            out.declare(lang_of(2, {{rho(0), rho(0)}, {rho(1), rho(1)}, {sig(0), sig(0)}}));
        else
            out.declare(lang_of(1, {{rho(0)}, {rho(m)}, {sig(0)}}));
        return out;
    }

    if (std::get_if<PairLadder>(&kind)) {
        Instance g(p);
        auto portals = attach_ladder(g, p);
        PortalGadget out(std::move(g), portals);
        out.declare(lang_of(2, {{rho(0), rho(0)},
                                {rho(0), sig(0)},
                                {sig(0), rho(0)},
                                {sig(0), sig(0)},
                                {sig(1), sig(1)}}));
        return out;
    }

    if (std::get_if<MixedPair>(&kind)) {
        Instance g(p);
        int u1 = g.add_vertex(), u2 = g.add_vertex();
        if (p.r_top >= 1) {
            attach_balance(g, p, false, {u1});
            attach_balance(g, p, false, {u2});
        }
        attach_ladder(g, p, std::make_pair(u1, u2));
        PortalGadget out(std::move(g), {u1, u2});
        // The construction is symmetric in the two portals, so the language is
        // declared closed under swapping them.
        std::vector<StateString> L{
            {rho(0), sig(0)}, {sig(0), rho(0)}, {sig(0), sig(0)}, {sig(1), sig(1)}};
        if (p.r_top >= 1) {
            L.push_back({rho(1), sig(0)});
            L.push_back({sig(0), rho(1)});
        }
        out.declare(lang_of(2, std::move(L)));
        return out;
    }

    if (std::get_if<EvenSingle>(&kind)) {
        Instance g(p);
        int u = g.add_vertex();
        attach_even_single(g, p, u);
        PortalGadget out(std::move(g), {u});
        out.declare(lang_of(1, {{rho(0)}, {rho(2)}, {sig(0)}, {sig(2)}}));
        return out;
    }

    if (std::get_if<EvenAll>(&kind)) {
        if (max_structured(p) != std::optional<int>(2) || p.s_top % 2 || p.r_top % 2 ||
            p.r_top < 1)
            throw std::runtime_error("needs even tops and structure modulus exactly 2");
        Instance g(p);
        int u = g.add_vertex();
        for (int c = 0; c < p.t_top / 2; ++c) {
            if (p.s_top >= 1)
                attach_even_single(g, p, u);
            else
                attach_balance(g, p, false, {u});
        }
        std::vector<StateString> L;
        for (int j = 0; j <= p.r_top; j += 2) L.push_back({rho(j)});
        for (int j = 0; j <= p.s_top; j += 2) L.push_back({sig(j)});
        PortalGadget out(std::move(g), {u});
        out.declare(lang_of(1, std::move(L)));
        return out;
    }

    if (auto* k = std::get_if<ParsimoniousSR>(&kind)) {
        if (!p.sigma.contains(k->s) || !p.rho.contains(k->r))
            throw std::runtime_error("states outside the pair");
        Instance g(p);
        int u = g.add_vertex();
        attach_switch_pinned(g, u, k->s, k->r, k->hw_only);
        PortalGadget out(std::move(g), {u});
        out.declare(lang_of(1, {{sig(k->s)}, {rho(k->r)}}), true);
        return out;
    }

    if (std::get_if<CofSigmaAux>(&kind)) {
        if (!p.sigma.cofinite) throw std::runtime_error("needs cofinite sigma");
        Instance g(p);
        int u = g.add_vertex(), w = g.add_vertex();
        g.add_edge(u, w);
        std::vector<int> vs = g.add_vertices(p.t_top);
        for (int v : vs) {
            g.add_edge(w, v);
            attach_switch_pinned(g, v, p.s_top, p.r_min(), false);
        }
        // Pin {u, w, v_1..v_ttop} to the three intended selections.
        std::vector<int> scope{u, w};
        scope.insert(scope.end(), vs.begin(), vs.end());
        auto mask_of = [&](bool su, bool sw, int nv) {
            Int m = 0;
            if (su) mpz_setbit(m.get_mpz_t(), 0);
            if (sw) mpz_setbit(m.get_mpz_t(), 1);
            for (int i = 0; i < nv; ++i) mpz_setbit(m.get_mpz_t(), 2 + i);
            return m;
        };
        Int m_rho0 = mask_of(false, false, p.r_top);
        Int m_sig0 = mask_of(true, false, std::max(0, p.r_top - 1));
        Int m_sig1 = mask_of(true, true, p.t_top);
        g.add_constraint(std::move(scope), {m_rho0, m_sig0, m_sig1});
        PortalGadget out(std::move(g), {u});
        out.declare(lang_of(1, {{sig(0)}, {sig(1)}, {rho(0)}}), true);
        return out;
    }

    if (std::get_if<CofRhoAux>(&kind)) {
        if (!p.rho.cofinite) throw std::runtime_error("needs cofinite rho");
        Instance g(p);
        int u = g.add_vertex(), w = g.add_vertex();
        g.add_edge(u, w);
        attach_switch_pinned(g, w, p.s_min(), p.r_top, false);
        g.add_constraint({u, w}, {0b00, 0b01, 0b10});
        PortalGadget out(std::move(g), {u});
        out.declare(lang_of(1, {{sig(0)}, {rho(0)}, {rho(1)}}), true);
        return out;
    }

    throw std::runtime_error("unknown provider kind");
}

}  // namespace srg

#endif
