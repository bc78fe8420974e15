#ifndef SRG_ORACLE_HPP
#define SRG_ORACLE_HPP

// Ground truth by exhaustive enumeration over all 2^n selections: solution
// counts (plain, labeled, weighted, dagger), realized portal languages with
// witness multiplicities, single-portal extension tables, and gadget
// certification (provider / realizer / parsimonious realizer).

#include "core.hpp"

#include <functional>

namespace srg {

inline constexpr int kDefaultOracleCap = 26;

struct PortalGadget {
    Instance inst;
    std::vector<int> portals;
    std::optional<Language> declared;
    bool parsimonious_claim = false;

    PortalGadget() = default;
    PortalGadget(Instance i, std::vector<int> p) : inst(std::move(i)), portals(std::move(p)) {
        std::set<int> uniq(portals.begin(), portals.end());
        if (uniq.size() != portals.size()) throw std::runtime_error("duplicate portal");
    }
    void declare(Language lang, bool parsimonious = false) {
        if (lang.portal_count != (int)portals.size())
            throw std::runtime_error("declared language portal count mismatch");
        declared = std::move(lang);
        parsimonious_claim = parsimonious;
    }
};

namespace detail {

struct EnumContext {
    const Instance& inst;
    std::vector<uint64_t> adj;        // adjacency bitmask per vertex
    std::vector<bool> exempt;         // portal or dagger-scoped
    std::vector<uint64_t> scope_mask; // per constraint
    bool weighted;

    EnumContext(const Instance& in, const std::vector<int>& portals)
        : inst(in), adj(in.n, 0), exempt(in.n, false), weighted(in.weighted()) {
        if (in.n > 62) throw std::runtime_error("instance too large for enumeration");
        for (auto [u, v] : in.edges) {
            adj[u] |= 1ull << v;
            adj[v] |= 1ull << u;
        }
        for (int p : portals) exempt.at(p) = true;
        if (in.dagger)
            for (const auto& c : in.constraints)
                for (int v : c.scope) exempt[v] = true;
        for (const auto& c : in.constraints) {
            uint64_t m = 0;
            for (int v : c.scope) m |= 1ull << v;
            scope_mask.push_back(m);
        }
    }

    // Degree-feasibility of all non-exempt vertices plus relation membership.
    // Returns the selection's weight (0 denotes infeasible; for unweighted
    // instances the weight is 1).
    Rat evaluate(uint64_t mask) const {
        for (int v = 0; v < inst.n; ++v) {
            if (exempt[v]) continue;
            const auto& e = inst.family.pairs[inst.label_of(v)];
            int cnt = __builtin_popcountll(adj[v] & mask);
            const IntSet& need = (mask >> v) & 1 ? e.sigma : e.rho;
            if (!need.contains(cnt)) return Rat(0);
        }
        Rat w(1);
        for (size_t ci = 0; ci < inst.constraints.size(); ++ci) {
            const auto& c = inst.constraints[ci];
            Int sub = 0;
            for (size_t i = 0; i < c.scope.size(); ++i)
                if ((mask >> c.scope[i]) & 1) mpz_setbit(sub.get_mpz_t(), i);
            if (c.weights.empty()) {
                if (!c.accepts(sub)) return Rat(0);
            } else {
                Rat f = c.weight_of(sub);
                if (f == 0) return Rat(0);
                w *= f;
            }
        }
        if (!inst.vertex_weights.empty()) {
            for (const auto& [v, wt] : inst.vertex_weights)
                if ((mask >> v) & 1) w *= wt;
        }
        return w;
    }
};

}  // namespace detail

// Exact (weighted) number of solutions by enumeration of all 2^n subsets.
inline Rat count_sets_weighted(const Instance& inst, int cap = kDefaultOracleCap) {
    inst.validate();
    if (inst.n > cap) throw std::runtime_error("oracle cap exceeded");
    detail::EnumContext ctx(inst, {});
    Rat total(0);
    for (uint64_t mask = 0; mask < (1ull << inst.n); ++mask) total += ctx.evaluate(mask);
    return total;
}

inline Int count_sets(const Instance& inst, int cap = kDefaultOracleCap) {
    Rat r = count_sets_weighted(inst, cap);
    if (r.get_den() != 1) throw std::runtime_error("weighted count is not an integer");
    return r.get_num();
}

// Realized language with per-string witness multiplicities (weighted sums
// when the gadget carries weights).
struct RealizedLanguage {
    Language language;
    std::map<StateString, Rat> multiplicity;
    std::map<StateString, std::vector<int>> witness;  // one selection per string
};

inline RealizedLanguage realized_language(const PortalGadget& g, int cap = kDefaultOracleCap) {
    g.inst.validate();
    if (g.inst.n > cap) throw std::runtime_error("oracle cap exceeded");
    detail::EnumContext ctx(g.inst, g.portals);
    RealizedLanguage out;
    out.language.portal_count = (int)g.portals.size();
    for (uint64_t mask = 0; mask < (1ull << g.inst.n); ++mask) {
        Rat w = ctx.evaluate(mask);
        if (w == 0) continue;
        StateString x;
        x.reserve(g.portals.size());
        for (int p : g.portals) {
            int cnt = __builtin_popcountll(ctx.adj[p] & mask);
            x.push_back(State{(mask >> p) & 1 ? Flavor::Sigma : Flavor::Rho, cnt});
        }
        out.multiplicity[x] += w;
        if (!out.witness.count(x)) {
            std::vector<int> wit;
            for (int v = 0; v < g.inst.n; ++v)
                if ((mask >> v) & 1) wit.push_back(v);
            out.witness[x] = std::move(wit);
        }
        out.language.strings.insert(std::move(x));
    }
    return out;
}

// Extension table of a single-portal gadget: state -> witness multiplicity.
struct ExtTable {
    std::map<State, Rat> ext;
    Rat operator()(const State& s) const {
        auto it = ext.find(s);
        return it == ext.end() ? Rat(0) : it->second;
    }
};

inline ExtTable ext_table(const PortalGadget& g, int cap = kDefaultOracleCap) {
    if (g.portals.size() != 1) throw std::runtime_error("ext_table requires a single portal");
    auto rl = realized_language(g, cap);
    ExtTable t;
    for (const auto& [x, m] : rl.multiplicity) t.ext[x[0]] += m;
    return t;
}

// ---------------------------------------------------------------------------
// Divide-and-conquer language computation. Many gadgets are "spiders": small
// sub-gadgets hanging off a few hub vertices. Exhaustive enumeration over all
// vertices is then wasteful; instead we fix the portals, recursively split the
// rest at high-degree vertices, enumerate small components, and convolve the
// per-component contribution tables (counts of selected neighbors reported to
// the fixed vertices).

namespace split_detail {

struct Ctx {
    const Instance& inst;
    std::vector<std::vector<int>> adj;
    std::vector<bool> exempt;   // portal or dagger-scoped
    std::vector<char> sel;      // -1 unknown, 0/1 fixed
    std::vector<bool> cdone;    // constraint already evaluated
    int leaf_limit;
    long budget;

    Ctx(const Instance& in, const std::vector<int>& portals, int leaf, long bud)
        : inst(in), adj(in.adjacency()), exempt(in.n, false), sel(in.n, -1),
          cdone(in.constraints.size(), false), leaf_limit(leaf), budget(bud) {
        for (int p : portals) exempt.at(p) = true;
        if (in.dagger)
            for (const auto& c : in.constraints)
                for (int v : c.scope) exempt[v] = true;
    }

    void spend(long amount) {
        budget -= amount;
        if (budget < 0) throw std::runtime_error("split evaluation limit exceeded");
    }

    // Contribution table: counts of selected sub-vertices adjacent to each
    // vertex of `report`, mapped to accumulated weight plus one witness
    // selection (vertices decided in the covered subgraph).
    struct Cell {
        Rat w;
        std::optional<std::vector<int>> wit;
    };
    using Table = std::map<std::vector<int>, Cell>;

    static void absorb(Cell& into, const Rat& w, const std::vector<int>& wit) {
        if (!into.wit && w != 0) into.wit = wit;
        into.w += w;
    }

    Rat constraint_factor(const Constraint& c) const {
        Int sub = 0;
        for (size_t i = 0; i < c.scope.size(); ++i)
            if (sel[c.scope[i]] == 1) mpz_setbit(sub.get_mpz_t(), i);
        return c.weight_of(sub);
    }

    // Evaluate any not-yet-done constraint whose scope is now fully assigned.
    // Returns the combined factor (0 kills the branch). Marks them done.
    Rat settle_constraints(std::vector<int>& touched) {
        Rat f(1);
        for (size_t ci = 0; ci < inst.constraints.size(); ++ci) {
            if (cdone[ci]) continue;
            const auto& c = inst.constraints[ci];
            bool full = true;
            for (int v : c.scope)
                if (sel[v] < 0) {
                    full = false;
                    break;
                }
            if (!full) continue;
            cdone[ci] = true;
            touched.push_back((int)ci);
            f *= constraint_factor(c);
            if (f == 0) return f;
        }
        return f;
    }

    // Connected components of `sub` under edges and pending constraint scopes.
    std::vector<std::vector<int>> components(const std::vector<int>& sub) const {
        std::map<int, int> idx;
        for (size_t i = 0; i < sub.size(); ++i) idx[sub[i]] = (int)i;
        std::vector<int> parent(sub.size());
        std::iota(parent.begin(), parent.end(), 0);
        std::function<int(int)> find = [&](int x) {
            while (parent[x] != x) x = parent[x] = parent[parent[x]];
            return x;
        };
        auto unite = [&](int a, int b) { parent[find(a)] = find(b); };
        for (int v : sub)
            for (int w : adj[v])
                if (idx.count(w)) unite(idx[v], idx[w]);
        for (size_t ci = 0; ci < inst.constraints.size(); ++ci) {
            if (cdone[ci]) continue;
            int first = -1;
            for (int v : inst.constraints[ci].scope)
                if (idx.count(v)) {
                    if (first < 0)
                        first = idx[v];
                    else
                        unite(first, idx[v]);
                }
        }
        std::map<int, std::vector<int>> groups;
        for (size_t i = 0; i < sub.size(); ++i) groups[find((int)i)].push_back(sub[i]);
        std::vector<std::vector<int>> out;
        for (auto& [root, vs] : groups) out.push_back(std::move(vs));
        return out;
    }

    // Membership check for a decided non-exempt vertex with `cnt` selected
    // neighbors in total.
    bool feasible(int v, int cnt) const {
        const auto& e = inst.family.pairs[inst.label_of(v)];
        return (sel[v] == 1 ? e.sigma : e.rho).contains(cnt);
    }

    int fixed_selected_neighbors(int v) const {
        int c = 0;
        for (int w : adj[v])
            if (sel[w] == 1) ++c;
        return c;
    }

    Rat vertex_factor(int v) const {
        if (sel[v] != 1) return Rat(1);
        auto it = inst.vertex_weights.find(v);
        return it == inst.vertex_weights.end() ? Rat(1) : it->second;
    }

    // Solve one connected piece. `report` lists fixed vertices whose selected
    // neighbor counts (from within `sub`) the caller still needs.
    Table solve(const std::vector<int>& sub, const std::vector<int>& report) {
        if ((int)sub.size() <= leaf_limit) return enumerate(sub, report);
        // Fix the vertex with the most neighbors inside sub.
        int pick = sub[0], best = -1;
        for (int v : sub) {
            int d = 0;
            for (int w : adj[v])
                if (sel[w] < 0) ++d;
            if (d > best) {
                best = d;
                pick = v;
            }
        }
        std::vector<int> rest;
        for (int v : sub)
            if (v != pick) rest.push_back(v);
        std::vector<int> rep2 = report;
        rep2.push_back(pick);
        Table out;
        for (int choice = 0; choice < 2; ++choice) {
            sel[pick] = (char)choice;
            std::vector<int> touched;
            Rat base = settle_constraints(touched);
            if (base != 0) {
                base *= vertex_factor(pick);
                Table acc;
                std::vector<int> seed;
                if (choice == 1) seed.push_back(pick);
                acc[std::vector<int>(rep2.size(), 0)] = Cell{base, std::move(seed)};
                bool dead = false;
                for (const auto& comp : components(rest)) {
                    Table part = solve(comp, rep2);
                    if (part.empty()) {
                        dead = true;
                        break;
                    }
                    Table merged;
                    for (const auto& [va, ca] : acc)
                        for (const auto& [vb, cb] : part) {
                            std::vector<int> vs(va.size());
                            for (size_t i = 0; i < va.size(); ++i) vs[i] = va[i] + vb[i];
                            std::vector<int> wit = *ca.wit;
                            wit.insert(wit.end(), cb.wit->begin(), cb.wit->end());
                            absorb(merged[std::move(vs)], ca.w * cb.w, wit);
                        }
                    acc = std::move(merged);
                    spend((long)acc.size());
                }
                if (!dead) {
                    int base_cnt = fixed_selected_neighbors(pick);
                    for (const auto& [vec, cell] : acc) {
                        if (!exempt[pick] && !feasible(pick, base_cnt + vec.back())) continue;
                        std::vector<int> proj(vec.begin(), vec.end() - 1);
                        if (choice == 1)
                            for (size_t i = 0; i < report.size(); ++i)
                                if (has_edge_to(pick, report[i])) ++proj[i];
                        absorb(out[std::move(proj)], cell.w, *cell.wit);
                    }
                }
            }
            for (int ci : touched) cdone[ci] = false;
            sel[pick] = -1;
        }
        return out;
    }

    bool has_edge_to(int v, int w) const {
        for (int x : adj[v])
            if (x == w) return true;
        return false;
    }

    Table enumerate(const std::vector<int>& sub, const std::vector<int>& report) {
        int k = (int)sub.size();
        if (k > 30) throw std::runtime_error("split leaf too large");
        spend(1l << k);
        std::map<int, int> idx;
        for (int i = 0; i < k; ++i) idx[sub[i]] = i;
        // Pending constraints whose unknown scope fits inside sub.
        std::vector<int> cs;
        for (size_t ci = 0; ci < inst.constraints.size(); ++ci) {
            if (cdone[ci]) continue;
            bool mine = false, ok = true;
            for (int v : inst.constraints[ci].scope) {
                if (idx.count(v))
                    mine = true;
                else if (sel[v] < 0)
                    ok = false;
            }
            if (mine && !ok)
                throw std::runtime_error("constraint scope crosses component split");
            if (mine || ok) {
                // Constraints entirely over already-fixed vertices are settled
                // by the caller; only take those touching sub.
                if (mine) cs.push_back((int)ci);
            }
        }
        Table out;
        for (uint64_t mask = 0; mask < (1ull << k); ++mask) {
            for (int i = 0; i < k; ++i) sel[sub[i]] = (char)((mask >> i) & 1);
            Rat w(1);
            bool ok = true;
            for (int i = 0; i < k && ok; ++i) {
                int v = sub[i];
                if (sel[v] == 1) w *= vertex_factor(v);
                if (exempt[v]) continue;
                if (!feasible(v, fixed_selected_neighbors(v))) ok = false;
            }
            for (size_t j = 0; j < cs.size() && ok; ++j) {
                Rat f = constraint_factor(inst.constraints[cs[j]]);
                if (f == 0)
                    ok = false;
                else
                    w *= f;
            }
            if (ok && w != 0) {
                std::vector<int> vec(report.size(), 0);
                for (size_t i = 0; i < report.size(); ++i)
                    for (int x : adj[report[i]])
                        if (idx.count(x) && sel[x] == 1) ++vec[i];
                std::vector<int> wit;
                for (int i = 0; i < k; ++i)
                    if ((mask >> i) & 1) wit.push_back(sub[i]);
                absorb(out[std::move(vec)], w, wit);
            }
            for (int i = 0; i < k; ++i) sel[sub[i]] = -1;
        }
        return out;
    }
};

}  // namespace split_detail

// Realized language via portal fixing + recursive component splitting.
// Equivalent to realized_language() but handles much larger gadgets whose
// components (after removing portals and hubs) are small.
inline RealizedLanguage realized_language_split(const PortalGadget& g, int leaf_limit = 16,
                                                long budget = 200000000l) {
    g.inst.validate();
    int p = (int)g.portals.size();
    if (p > 20) throw std::runtime_error("too many portals for split evaluation");
    split_detail::Ctx ctx(g.inst, g.portals, leaf_limit, budget);
    RealizedLanguage out;
    out.language.portal_count = p;
    std::vector<bool> is_portal(g.inst.n, false);
    for (int v : g.portals) is_portal[v] = true;
    std::vector<int> rest;
    for (int v = 0; v < g.inst.n; ++v)
        if (!is_portal[v]) rest.push_back(v);
    for (uint64_t pi = 0; pi < (1ull << p); ++pi) {
        for (int i = 0; i < p; ++i) ctx.sel[g.portals[i]] = (char)((pi >> i) & 1);
        std::vector<int> touched;
        Rat base = ctx.settle_constraints(touched);  // portal-only constraints
        if (base != 0) {
            for (int i = 0; i < p; ++i) base *= ctx.vertex_factor(g.portals[i]);
            split_detail::Ctx::Table acc;
            std::vector<int> seed;
            for (int i = 0; i < p; ++i)
                if ((pi >> i) & 1) seed.push_back(g.portals[i]);
            acc[std::vector<int>(p, 0)] = split_detail::Ctx::Cell{base, std::move(seed)};
            bool dead = false;
            for (const auto& comp : ctx.components(rest)) {
                auto part = ctx.solve(comp, g.portals);
                if (part.empty()) {
                    dead = true;
                    break;
                }
                split_detail::Ctx::Table merged;
                for (const auto& [va, ca] : acc)
                    for (const auto& [vb, cb] : part) {
                        std::vector<int> vs(va.size());
                        for (size_t i = 0; i < va.size(); ++i) vs[i] = va[i] + vb[i];
                        std::vector<int> wit = *ca.wit;
                        wit.insert(wit.end(), cb.wit->begin(), cb.wit->end());
                        split_detail::Ctx::absorb(merged[std::move(vs)], ca.w * cb.w, wit);
                    }
                acc = std::move(merged);
                ctx.spend((long)acc.size());
            }
            if (!dead) {
                for (const auto& [vec, cell] : acc) {
                    StateString x;
                    x.reserve(p);
                    for (int i = 0; i < p; ++i) {
                        int portal_base = 0;
                        for (int w2 : ctx.adj[g.portals[i]])
                            if (is_portal[w2] && ctx.sel[w2] == 1) ++portal_base;
                        x.push_back(State{(pi >> i) & 1 ? Flavor::Sigma : Flavor::Rho,
                                          vec[i] + portal_base});
                    }
                    out.multiplicity[x] += cell.w;
                    if (!out.witness.count(x) && cell.wit) {
                        std::vector<int> wit = *cell.wit;
                        std::sort(wit.begin(), wit.end());
                        out.witness[x] = std::move(wit);
                    }
                    out.language.strings.insert(std::move(x));
                }
            }
        }
        for (int ci : touched) ctx.cdone[ci] = false;
        for (int i = 0; i < p; ++i) ctx.sel[g.portals[i]] = -1;
    }
    return out;
}

enum class GadgetClass { Provider, Realizer, ParsimoniousRealizer, Fail };

struct CertifyResult {
    GadgetClass cls;
    std::string witness;  // offending string on Fail
};

// Provider: declared subset of realized. Realizer: equal. Parsimonious
// realizer: equal with every declared string witnessed exactly once.
inline CertifyResult classify_gadget(const PortalGadget& g, const RealizedLanguage& rl) {
    if (!g.declared) throw std::runtime_error("no declared language");
    for (const auto& s : g.declared->strings)
        if (!rl.language.strings.count(s))
            return {GadgetClass::Fail, "declared string not realized: " + to_string(s)};
    bool equal = rl.language.strings == g.declared->strings;
    if (!equal) return {GadgetClass::Provider, ""};
    for (const auto& s : g.declared->strings)
        if (rl.multiplicity.at(s) != 1)
            return {GadgetClass::Realizer, "multiple witnesses: " + to_string(s)};
    return {GadgetClass::ParsimoniousRealizer, ""};
}

inline CertifyResult certify_gadget(const PortalGadget& g, int cap = kDefaultOracleCap) {
    return classify_gadget(g, realized_language(g, cap));
}

// Certification through the divide-and-conquer engine, for gadgets beyond the
// enumeration cap.
inline CertifyResult certify_gadget_split(const PortalGadget& g, int leaf_limit = 16,
                                          long budget = 200000000l) {
    return classify_gadget(g, realized_language_split(g, leaf_limit, budget));
}

// Convenience: requires certification at the claimed level, else throws.
inline void require_certified(const PortalGadget& g, int cap = kDefaultOracleCap) {
    auto res = certify_gadget(g, cap);
    if (res.cls == GadgetClass::Fail)
        throw std::runtime_error("gadget certification failed: " + res.witness);
    if (g.parsimonious_claim && res.cls != GadgetClass::ParsimoniousRealizer)
        throw std::runtime_error("gadget is not a parsimonious realizer: " + res.witness);
}

}  // namespace srg

#endif
