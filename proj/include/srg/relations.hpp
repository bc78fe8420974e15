#ifndef SRG_RELATIONS_HPP
#define SRG_RELATIONS_HPP

// Relation realization: replacing relational constraints on an instance by
// graph gadgets. The pipeline has three stages:
//   1. arbitrary relations  -> HW=1 and EQ relations (count-preserving),
//   2. EQ relations         -> HW=1 relations        (count-preserving),
//   3. HW=1 relations       -> plain graph gadgets   (existence-preserving;
//      needs finite sigma and rho with 0 not in rho).
// Each replacement splices a portal gadget onto the constraint's scope and
// duplicates a covering bag of the path decomposition, so the width grows by
// at most an additive constant per stage. A backtracking existence solver
// (guided by the decomposition order) is included for end-to-end checks on
// outputs that no longer carry relations.

#include "managers.hpp"
#include "providers.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <vector>

namespace srg {

enum class RealizationStage { ToHw1Eq, EqToHw1, Hw1ToGraph, ForcedSelect };

struct RealizationReport {
    int arity = 0;
    std::vector<Int> relation;  // accepted masks of the replaced relation
    RealizationStage stage = RealizationStage::ToHw1Eq;
    bool parsimonious = false;
    int gadget_interior = 0;  // vertices added by the splice
};

namespace relation_detail {

// Smallest r in rho with r >= 1 (exists iff rho != {0} and rho non-empty).
inline int positive_rho_min(const Pair& p) {
    if (p.rho.empty() || (!p.rho.cofinite && p.rho.support == std::vector<int>{0}))
        throw std::runtime_error("relation realization needs rho != {0}");
    int r = 1;
    while (!p.rho.contains(r)) ++r;
    return r;
}

inline bool is_hw1_constraint(const Constraint& c) {
    auto want = masks_with_weight((int)c.scope.size(), 1);
    std::sort(want.begin(), want.end());
    return c.weights.empty() && c.accepted == want;
}

inline bool is_eq_constraint(const Constraint& c) {
    Int full = 0;
    for (size_t i = 0; i < c.scope.size(); ++i) mpz_setbit(full.get_mpz_t(), i);
    std::vector<Int> want{Int(0), full};
    std::sort(want.begin(), want.end());
    return c.weights.empty() && c.accepted == want;
}

}  // namespace relation_detail

// Single-portal gadget with exactly two solutions (portal selected with s
// selected neighbors / unselected with r >= 1), pinned by pairwise
// exactly-one-selected relations only. The seed of every realizer below.
inline PortalGadget build_hw1_provider(const Pair& p) {
    int r = relation_detail::positive_rho_min(p);
    return build_provider(ParsimoniousSR{p.s_min(), r, true}, p);
}

// Realizes an arbitrary relation (given as accepted masks over d portals)
// using only HW=1 and EQ relations, one witness per accepted mask. Portals
// gain no new edges, only relation memberships.
inline PortalGadget realize_arbitrary(int d, std::vector<Int> accepted, const Pair& p) {
    if (d < 1) throw std::runtime_error("realize_arbitrary: arity must be positive");
    std::sort(accepted.begin(), accepted.end());
    accepted.erase(std::unique(accepted.begin(), accepted.end()), accepted.end());
    if (accepted.empty()) throw std::runtime_error("realize_arbitrary: empty relation");
    for (const Int& m : accepted)
        if (m < 0 || (m >> d) != 0) throw std::runtime_error("realize_arbitrary: mask out of range");

    PortalGadget prov = build_hw1_provider(p);
    Instance g(p);
    std::vector<int> portals = g.add_vertices(d);

    // Per accepted mask i: a pivot copy t_i and one copy s_{i,j} per position
    // j outside the mask, all tied together by an EQ relation.
    std::vector<int> pivots;
    std::vector<std::vector<int>> off_copy(accepted.size());  // mask index -> s-vertices
    std::vector<std::vector<int>> off_pos(accepted.size());   // their positions j
    for (size_t i = 0; i < accepted.size(); ++i) {
        int t = g.add_vertex();
        manager_detail::splice(g, prov.inst, prov.portals, {t});
        pivots.push_back(t);
        std::vector<int> eq_scope;
        for (int j = 0; j < d; ++j) {
            if (mpz_tstbit(accepted[i].get_mpz_t(), j)) continue;
            int s = g.add_vertex();
            manager_detail::splice(g, prov.inst, prov.portals, {s});
            off_copy[i].push_back(s);
            off_pos[i].push_back(j);
            eq_scope.push_back(s);
        }
        eq_scope.push_back(t);
        Int full = 0;
        for (size_t b = 0; b < eq_scope.size(); ++b) mpz_setbit(full.get_mpz_t(), b);
        g.add_constraint(std::move(eq_scope), {Int(0), full});
    }
    g.add_constraint(pivots, masks_with_weight((int)pivots.size(), 1));
    for (int j = 0; j < d; ++j) {
        std::vector<int> scope{portals[j]};
        for (size_t i = 0; i < accepted.size(); ++i)
            for (size_t a = 0; a < off_pos[i].size(); ++a)
                if (off_pos[i][a] == j) scope.push_back(off_copy[i][a]);
        g.add_constraint(std::move(scope), masks_with_weight((int)scope.size(), 1));
    }

    std::vector<StateString> strings;
    for (const Int& m : accepted) {
        StateString x;
        for (int j = 0; j < d; ++j)
            x.push_back(mpz_tstbit(m.get_mpz_t(), j) ? sig(0) : rho(0));
        strings.push_back(std::move(x));
    }
    PortalGadget out(std::move(g), std::move(portals));
    out.declare(build_detail::lang_of(d, std::move(strings)), true);
    return out;
}

// Realizes the all-equal relation on k portals using only binary HW=1
// relations: a hub with two pinned solutions, exactly-one-selected against
// each portal. Exactly two witnesses (all selected / none selected).
inline PortalGadget realize_eq(int k, const Pair& p) {
    if (k < 1) throw std::runtime_error("realize_eq: arity must be positive");
    relation_detail::positive_rho_min(p);  // precondition: rho != {0}
    Instance g(p);
    std::vector<int> portals = g.add_vertices(k);
    if (k >= 2) {
        PortalGadget prov = build_hw1_provider(p);
        int hub = g.add_vertex();
        manager_detail::splice(g, prov.inst, prov.portals, {hub});
        for (int u : portals) g.add_constraint({u, hub}, masks_with_weight(2, 1));
    }
    std::vector<StateString> strings{StateString(k, rho(0)), StateString(k, sig(0))};
    PortalGadget out(std::move(g), std::move(portals));
    out.declare(build_detail::lang_of(k, std::move(strings)), true);
    return out;
}

namespace relation_detail {

// Single-portal provider whose portal is selected in every partial solution,
// with at least s_min selected neighbors inside; the state sigma_{s_min} is
// attainable. Needs finite non-empty sigma, rho with 0 not in rho.
inline Instance build_always_selected_provider(const Pair& p, int& portal) {
    if (p.sigma.cofinite || p.rho.cofinite)
        throw std::runtime_error("forced selection needs finite sigma and rho");
    if (p.rho.contains(0)) throw std::runtime_error("forced selection needs 0 not in rho");
    const int smin = p.s_min(), rmin = p.r_min();
    Instance g(p);
    if (smin >= 1 && smin < rmin) {
        // Clique of order s_min + 1: an unselected member would need r_min
        // selected neighbors but can see at most s_min.
        std::vector<int> c = g.add_vertices(smin + 1);
        for (size_t a = 0; a < c.size(); ++a)
            for (size_t b = a + 1; b < c.size(); ++b) g.add_edge(c[a], c[b]);
        portal = c[0];
        return g;
    }
    if (smin >= rmin && rmin >= 1) {
        // Clique plus an independent set of degree-r_min observers covering
        // every clique vertex: an unselected clique vertex starves one
        // observer below r_min.
        std::vector<int> c = g.add_vertices(smin + 1);
        for (size_t a = 0; a < c.size(); ++a)
            for (size_t b = a + 1; b < c.size(); ++b) g.add_edge(c[a], c[b]);
        int q = (smin + 1 + rmin - 1) / rmin;
        std::vector<int> obs = g.add_vertices(q);
        for (int i = 0; i < q; ++i)
            for (int t = 0; t < rmin; ++t) g.add_edge(obs[i], c[(i * rmin + t) % (smin + 1)]);
        portal = c[0];
        return g;
    }
    // s_min = 0, r_min >= 1: complete bipartite K_{r_min, r_top+1}; an
    // unselected A-vertex forces all of B selected, overfeeding it.
    std::vector<int> a = g.add_vertices(rmin);
    std::vector<int> b = g.add_vertices(p.r_top + 1);
    for (int x : a)
        for (int y : b) g.add_edge(x, y);
    portal = a[0];
    return g;
}

}  // namespace relation_detail

// Single-portal relation-free gadget whose portal, once its own degree
// constraint is enforced by a host graph, is always selected with exactly
// s_top selected neighbors inside (so outside neighbors must stay
// unselected). Standalone, the realized language satisfies: sigma_{s_top}
// is realized; every selected string has count >= s_top (sigma finite then
// pins enforced portals to exactly s_top with nothing from outside); every
// unselected string has count > r_top (so an enforced portal can never be
// unselected). Needs finite non-empty sigma, rho with 0 not in rho.
inline PortalGadget build_forced_selected(const Pair& p) {
    int pportal = -1;
    Instance proto = relation_detail::build_always_selected_provider(p, pportal);
    Instance g(p);
    int copies = p.s_top - p.s_min() + 1;
    std::vector<int> anchors;
    for (int i = 0; i < copies; ++i) {
        int u = g.add_vertex();
        manager_detail::splice(g, proto, {pportal}, {u});
        anchors.push_back(u);
    }
    for (size_t a = 0; a < anchors.size(); ++a)
        for (size_t b = a + 1; b < anchors.size(); ++b) g.add_edge(anchors[a], anchors[b]);
    PortalGadget out(std::move(g), {anchors[0]});
    out.declare(build_detail::lang_of(1, {{sig(p.s_top)}}));
    return out;
}

// Relation-free realizer of the exactly-one-selected language on k portals
// (one sigma_0, rest rho_0). Needs finite non-empty sigma, rho, 0 not in
// rho. Not parsimonious in general.
inline PortalGadget realize_hw1_decision(int k, const Pair& p) {
    if (k < 1) throw std::runtime_error("realize_hw1_decision: arity must be positive");
    if (p.sigma.cofinite || p.rho.cofinite)
        throw std::runtime_error("realize_hw1_decision needs finite sigma and rho");
    if (p.rho.contains(0)) throw std::runtime_error("realize_hw1_decision needs 0 not in rho");
    PortalGadget forced = build_forced_selected(p);
    Instance g(p);
    std::vector<int> portals = g.add_vertices(k);
    auto feed = [&](int v, int count) {
        // `count` always-selected anchors adjacent to v.
        for (int i = 0; i < count; ++i) {
            int x = g.add_vertex();
            manager_detail::splice(g, forced.inst, forced.portals, {x});
            g.add_edge(v, x);
        }
    };
    const std::vector<int>& re = p.rho.support;
    bool interval = re.front() == 1 && re.back() == (int)re.size();
    if (re == std::vector<int>{1}) {
        // rho = {1}: a watcher with one pre-selected neighbor needs exactly
        // one more from the portals.
        int v1 = g.add_vertex(), v2 = g.add_vertex();
        feed(v1, 1);
        g.add_edge(v1, v2);
        for (int u : portals) g.add_edge(v2, u);
    } else if (interval) {
        // rho = [1..r], r >= 2: v1 is saturated at r, so v2 is unselected and
        // needs >= 1 portal; w already sees r-1 and caps portals at one.
        int r = re.back();
        int v1 = g.add_vertex(), v2 = g.add_vertex(), w = g.add_vertex();
        feed(v1, r);
        g.add_edge(v1, v2);
        feed(w, r - 1);
        for (int u : portals) {
            g.add_edge(v2, u);
            g.add_edge(w, u);
        }
    } else {
        // Some r in rho has r >= 2 and r-1 not in rho: v sits at the gap and
        // needs >= 1 portal; w sees r_top - 1 and caps portals at one.
        int r = -1;
        for (int x : re)
            if (x >= 2 && !p.rho.contains(x - 1)) {
                r = x;
                break;
            }
        if (r < 0) throw std::runtime_error("realize_hw1_decision: no admissible rho case");
        int v = g.add_vertex(), w = g.add_vertex();
        feed(v, r - 1);
        feed(w, p.r_top - 1);
        for (int u : portals) {
            g.add_edge(v, u);
            g.add_edge(w, u);
        }
    }
    std::vector<StateString> strings;
    for (int i = 0; i < k; ++i) {
        StateString x(k, rho(0));
        x[i] = sig(0);
        strings.push_back(std::move(x));
    }
    PortalGadget out(std::move(g), std::move(portals));
    out.declare(build_detail::lang_of(k, std::move(strings)));
    return out;
}

// ---------------------------------------------------------------------------
// Instance-level passes.

struct RelationRemovalResult {
    Instance inst;
    PathDecomposition pd;
    int width_in = -1;
    int width_out = -1;
    int width_constant = 0;  // certified additive bound: width_out <= width_in + width_constant
    std::vector<RealizationReport> reports;
};

namespace relation_detail {

// Replaces every constraint rejected by `keep` with a gadget spliced onto its
// scope, duplicating a covering bag per replacement (the duplicate holds the
// original bag plus the gadget's interior vertices). Constraints the gadget
// itself carries are appended; kept constraints stay in order.
template <class Keep, class Build>
inline void replace_pass(Instance& g, PathDecomposition& pd, RealizationStage stage,
                         Keep keep, Build build_gadget, std::vector<RealizationReport>& reports,
                         int& max_added) {
    std::vector<Constraint> old = std::move(g.constraints);
    g.constraints.clear();
    std::vector<std::set<int>> bagsets;
    for (const auto& b : pd.bags) bagsets.emplace_back(b.begin(), b.end());
    // bag index -> interior vertex groups to append as duplicated bags
    std::map<size_t, std::vector<std::vector<int>>> inserts;
    for (Constraint& c : old) {
        if (keep(c)) {
            g.constraints.push_back(std::move(c));
            continue;
        }
        if (!c.weights.empty())
            throw std::runtime_error("relation removal: weighted constraint unsupported");
        size_t bag = bagsets.size();
        for (size_t bi = 0; bi < bagsets.size(); ++bi) {
            bool ok = true;
            for (int v : c.scope)
                if (!bagsets[bi].count(v)) {
                    ok = false;
                    break;
                }
            if (ok) {
                bag = bi;
                break;
            }
        }
        if (bag == bagsets.size())
            throw std::runtime_error("relation removal: scope not covered by any bag");
        PortalGadget gad = build_gadget(c);
        int before = g.n;
        manager_detail::splice(g, gad.inst, gad.portals, c.scope);
        std::vector<int> fresh;
        for (int v = before; v < g.n; ++v) fresh.push_back(v);
        max_added = std::max(max_added, (int)fresh.size());
        inserts[bag].push_back(std::move(fresh));
        reports.push_back(RealizationReport{(int)c.scope.size(), c.accepted, stage,
                                            gad.parsimonious_claim, g.n - before});
    }
    std::vector<std::vector<int>> bags;
    for (size_t bi = 0; bi < pd.bags.size(); ++bi) {
        bags.push_back(pd.bags[bi]);
        auto it = inserts.find(bi);
        if (it == inserts.end()) continue;
        for (const auto& fresh : it->second) {
            std::vector<int> dup = pd.bags[bi];
            dup.insert(dup.end(), fresh.begin(), fresh.end());
            bags.push_back(std::move(dup));
        }
    }
    pd.bags = std::move(bags);
}

inline void require_plain(const Instance& in) {
    if (in.dagger) throw std::runtime_error("relation removal: dagger instances unsupported");
    if (!in.vertex_weights.empty())
        throw std::runtime_error("relation removal: vertex weights unsupported");
    for (int v = 0; v < in.n; ++v)
        if (in.label_of(v) != 0)
            throw std::runtime_error("relation removal: labeled vertices unsupported");
}

}  // namespace relation_detail

// Count-preserving stage: arbitrary relations down to HW=1 only (first
// arbitrary -> HW=1 + EQ, then EQ -> binary HW=1). Valid whenever rho != {0}.
inline RelationRemovalResult remove_relations_to_hw1(const Instance& in,
                                                     const PathDecomposition& pd_in) {
    relation_detail::require_plain(in);
    RelationRemovalResult res;
    res.inst = in;
    res.pd = pd_in;
    res.width_in = validate_path_decomposition(in, pd_in);
    const Pair p = res.inst.family.base_pair();
    int max_added = 0;
    relation_detail::replace_pass(
        res.inst, res.pd, RealizationStage::ToHw1Eq,
        [](const Constraint& c) {
            return relation_detail::is_hw1_constraint(c) || relation_detail::is_eq_constraint(c);
        },
        [&](const Constraint& c) { return realize_arbitrary((int)c.scope.size(), c.accepted, p); },
        res.reports, max_added);
    relation_detail::replace_pass(
        res.inst, res.pd, RealizationStage::EqToHw1,
        [](const Constraint& c) { return relation_detail::is_hw1_constraint(c); },
        [&](const Constraint& c) {
            if (!relation_detail::is_eq_constraint(c))
                throw std::runtime_error("unexpected constraint shape after arbitrary stage");
            return realize_eq((int)c.scope.size(), p);
        },
        res.reports, max_added);
    res.width_constant = 2 * max_added;  // one duplicate per stage may stack interiors
    res.width_out = validate_path_decomposition(res.inst, res.pd);
    if (res.width_out > res.width_in + res.width_constant)
        throw std::runtime_error("relation removal: width bound violated");
    return res;
}

// Full decision pipeline: arbitrary relations -> plain graph. Preserves
// solution existence (the last stage is not parsimonious). Needs finite
// sigma and rho with 0 not in rho.
inline RelationRemovalResult remove_relations_decision(const Instance& in,
                                                       const PathDecomposition& pd_in) {
    RelationRemovalResult res = remove_relations_to_hw1(in, pd_in);
    const Pair p = res.inst.family.base_pair();
    if (p.sigma.cofinite || p.rho.cofinite)
        throw std::runtime_error("decision relation removal needs finite sigma and rho");
    if (p.rho.contains(0)) throw std::runtime_error("decision relation removal needs 0 not in rho");
    int max_added = 0;
    relation_detail::replace_pass(
        res.inst, res.pd, RealizationStage::Hw1ToGraph, [](const Constraint&) { return false; },
        [&](const Constraint& c) {
            if (!relation_detail::is_hw1_constraint(c))
                throw std::runtime_error("unexpected constraint shape after HW=1 stage");
            return realize_hw1_decision((int)c.scope.size(), p);
        },
        res.reports, max_added);
    res.width_constant += max_added;
    res.width_out = validate_path_decomposition(res.inst, res.pd);
    if (res.width_out > res.width_in + res.width_constant)
        throw std::runtime_error("relation removal: width bound violated");
    if (!res.inst.constraints.empty())
        throw std::runtime_error("relation removal: constraints remain");
    return res;
}

// ---------------------------------------------------------------------------
// Existence solver: backtracking over vertices in decomposition order with
// degree-interval pruning. Returns nullopt when the node budget runs out.
// Intended for relation-free pipeline outputs, where the gadgets force most
// of the search; also accepts constraints (checked once fully decided).

inline std::optional<bool> exists_solution(const Instance& inst, const PathDecomposition& pd,
                                           long long node_budget = 50'000'000) {
    validate_path_decomposition(inst, pd);
    for (int v = 0; v < inst.n; ++v)
        if (inst.label_of(v) != 0)
            throw std::runtime_error("exists_solution: labeled vertices unsupported");
    const int n = inst.n;
    std::vector<int> order;
    {
        std::vector<char> seen(n, 0);
        for (const auto& bag : pd.bags)
            for (int v : bag)
                if (!seen[v]) {
                    seen[v] = 1;
                    order.push_back(v);
                }
    }
    std::vector<int> pos(n);
    for (int i = 0; i < n; ++i) pos[order[i]] = i;
    std::vector<std::vector<int>> adj(n);
    for (auto [u, v] : inst.edges) {
        adj[u].push_back(v);
        adj[v].push_back(u);
    }
    // Constraints keyed by the decision position of their last scope vertex.
    std::vector<std::vector<const Constraint*>> due(n + 1);
    for (const auto& c : inst.constraints) {
        int last = 0;
        for (int v : c.scope) last = std::max(last, pos[v] + 1);
        due[last].push_back(&c);
    }

    std::vector<int> sel(n, -1);        // -1 undecided, 0 out, 1 in
    std::vector<int> got(n, 0);         // selected decided neighbors
    std::vector<int> open(n, 0);        // undecided neighbors
    for (int v = 0; v < n; ++v) open[v] = (int)adj[v].size();

    auto feasible = [&](int v) {
        // Can got[v]..got[v]+open[v] still meet v's set?
        const auto& ent = inst.family.pairs.at(inst.label_of(v));
        const IntSet& s = sel[v] == 1 ? ent.sigma : ent.rho;
        for (int c = got[v]; c <= got[v] + open[v]; ++c)
            if (s.contains(c)) return true;
        return false;
    };

    long long nodes = 0;
    std::function<bool(int)> go = [&](int i) -> bool {
        if (++nodes > node_budget) throw nodes;
        if (i == n) return true;
        int v = order[i];
        for (int choice : {1, 0}) {
            sel[v] = choice;
            bool ok = feasible(v);
            if (ok)
                for (int w : adj[v]) {
                    --open[w];
                    if (choice) ++got[w];
                    if (sel[w] != -1 && !feasible(w)) ok = false;
                }
            else
                for (int w : adj[v]) {
                    --open[w];
                    if (choice) ++got[w];
                }
            if (ok)
                for (const Constraint* c : due[i + 1]) {
                    Int mask = 0;
                    for (size_t b = 0; b < c->scope.size(); ++b)
                        if (sel[c->scope[b]] == 1) mpz_setbit(mask.get_mpz_t(), b);
                    if (!c->accepts(mask)) {
                        ok = false;
                        break;
                    }
                }
            if (ok && go(i + 1)) return true;
            for (int w : adj[v]) {
                ++open[w];
                if (choice) --got[w];
            }
            sel[v] = -1;
        }
        return false;
    };
    try {
        return go(0);
    } catch (long long&) {
        return std::nullopt;
    }
}

}  // namespace srg

#endif  // SRG_RELATIONS_HPP
