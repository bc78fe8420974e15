#ifndef SRG_CORE_HPP
#define SRG_CORE_HPP

// Core vocabulary for generalized-domination instances: finite/cofinite
// integer sets, (sigma,rho) pairs with their derived structure parameters,
// portal state alphabets, graphs with relational constraints, and path
// decompositions.

#include <gmpxx.h>

#include <algorithm>
#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace srg {

using Int = mpz_class;
using Rat = mpq_class;

inline Int pow2(unsigned long e) {
    Int r;
    mpz_ui_pow_ui(r.get_mpz_t(), 2, e);
    return r;
}

// A finite or cofinite subset of the non-negative integers.
// `support` lists members (finite) or excluded elements (cofinite);
// always sorted and duplicate-free.
struct IntSet {
    bool cofinite = false;
    std::vector<int> support;

    static IntSet finite(std::vector<int> elems) {
        IntSet s;
        s.cofinite = false;
        s.support = canon(std::move(elems));
        return s;
    }
    static IntSet cofinite_excluding(std::vector<int> holes) {
        IntSet s;
        s.cofinite = true;
        s.support = canon(std::move(holes));
        return s;
    }
    static IntSet all() { return cofinite_excluding({}); }
    // {k, k+1, k+2, ...}
    static IntSet at_least(int k) {
        std::vector<int> holes(k);
        std::iota(holes.begin(), holes.end(), 0);
        return cofinite_excluding(std::move(holes));
    }

    bool contains(int x) const {
        if (x < 0) return false;
        bool in_support = std::binary_search(support.begin(), support.end(), x);
        return cofinite ? !in_support : in_support;
    }
    bool empty() const { return !cofinite && support.empty(); }
    bool is_full() const { return cofinite && support.empty(); }

    int min_elem() const {
        if (empty()) throw std::runtime_error("min of empty set");
        if (!cofinite) return support.front();
        int x = 0;
        while (!contains(x)) ++x;
        return x;
    }

    // Largest element of a finite set; for a cofinite set, largest excluded
    // value + 1 (0 when nothing is excluded). Every x >= top() of a cofinite
    // set is a member.
    int top() const {
        if (empty()) throw std::runtime_error("undefined top: empty set");
        if (cofinite) return support.empty() ? 0 : support.back() + 1;
        return support.back();
    }

    bool is_singleton() const { return !cofinite && support.size() == 1; }

    // A set is "simple" if finite or if cofinite with all of 0..top-1 absent
    // (i.e. equal to Z>=top).
    bool is_simple() const {
        if (!cofinite) return true;
        for (size_t i = 0; i < support.size(); ++i)
            if (support[i] != (int)i) return false;
        return true;
    }

    bool operator==(const IntSet&) const = default;

private:
    static std::vector<int> canon(std::vector<int> v) {
        for (int x : v)
            if (x < 0) throw std::runtime_error("negative element in set");
        std::sort(v.begin(), v.end());
        v.erase(std::unique(v.begin(), v.end()), v.end());
        return v;
    }
};

// A (sigma, rho) pair together with its derived structure parameters.
struct Pair {
    IntSet sigma, rho;
    int s_top = 0, r_top = 0, t_top = 0;

    Pair() = default;
    Pair(IntSet sig, IntSet rh) : sigma(std::move(sig)), rho(std::move(rh)) {
        if (sigma.empty() || rho.empty())
            throw std::runtime_error("base pair requires non-empty sigma and rho");
        s_top = sigma.top();
        r_top = rho.top();
        t_top = std::max(s_top, r_top);
    }
    int s_min() const { return sigma.min_elem(); }
    int r_min() const { return rho.min_elem(); }
    bool operator==(const Pair&) const = default;
};

// True iff every instance has a closed-form solution count: rho = {0}
// (solutions are unions of fully-selected components) or both sets are all
// of Z>=0 (every subset is a solution).
inline bool is_trivial(const Pair& p) {
    if (!p.rho.cofinite && p.rho.support == std::vector<int>{0}) return true;
    return p.sigma.is_full() && p.rho.is_full();
}

// Largest m such that all of sigma lies in one residue class mod m and all
// of rho lies in one residue class mod m. nullopt means unbounded (every m
// works; happens exactly when both sets are singletons).
inline std::optional<int> max_structured(const Pair& p) {
    // A cofinite set contains two consecutive integers, so only m = 1 works.
    if (p.sigma.cofinite || p.rho.cofinite) return 1;
    long g = 0;
    auto fold = [&g](const std::vector<int>& v) {
        for (int x : v) g = std::gcd(g, (long)(x - v.front()));
    };
    fold(p.sigma.support);
    fold(p.rho.support);
    if (g == 0) return std::nullopt;
    return (int)g;
}

// Per-pair complexity base: three cases keyed on the structure parameter
// and the parity/equality of the tops.
inline int c_sigma_rho(const Pair& p) {
    if (is_trivial(p)) throw std::runtime_error("trivial pair");
    auto m = max_structured(p);
    bool structured2 = !m.has_value() || *m >= 2;  // structured for some m >= 2
    if (!structured2) return p.s_top + p.r_top + 2;
    bool exactly2 = m.has_value() && *m == 2;
    if (exactly2 && p.s_top == p.r_top && p.s_top % 2 == 0)
        return std::max(p.s_top, p.r_top) + 2;
    return std::max(p.s_top, p.r_top) + 1;
}

// Portal states: sigma_c = selected with c selected neighbors so far,
// rho_c = unselected with c selected neighbors.
enum class Flavor : uint8_t { Sigma = 0, Rho = 1 };

struct State {
    Flavor flavor = Flavor::Rho;
    int count = 0;
    auto operator<=>(const State&) const = default;
};

inline State sig(int c) { return State{Flavor::Sigma, c}; }
inline State rho(int c) { return State{Flavor::Rho, c}; }

inline std::string to_string(const State& s) {
    return (s.flavor == Flavor::Sigma ? "s" : "r") + std::to_string(s.count);
}

using StateString = std::vector<State>;

inline std::string to_string(const StateString& x) {
    std::string out;
    for (size_t i = 0; i < x.size(); ++i) {
        if (i) out += ' ';
        out += to_string(x[i]);
    }
    return out;
}

// Reflection within the truncated alphabet: sigma_s -> sigma_{s_top-s},
// rho_r -> rho_{r_top-r}. An involution.
inline State invert_state(const State& s, const Pair& p) {
    int t = (s.flavor == Flavor::Sigma) ? p.s_top : p.r_top;
    if (s.count < 0 || s.count > t)
        throw std::runtime_error("state count out of truncated range");
    return State{s.flavor, t - s.count};
}

inline StateString invert_string(const StateString& x, const Pair& p) {
    StateString out;
    out.reserve(x.size());
    for (const auto& s : x) out.push_back(invert_state(s, p));
    return out;
}

// Per-position neighbor counts of a state string and their sum.
inline std::pair<std::vector<int>, long> weight_vector(const StateString& x) {
    std::vector<int> w;
    w.reserve(x.size());
    long tot = 0;
    for (const auto& s : x) {
        w.push_back(s.count);
        tot += s.count;
    }
    return {w, tot};
}

// A set of equal-length state strings over some portal list.
struct Language {
    int portal_count = 0;
    std::set<StateString> strings;

    bool operator==(const Language&) const = default;

    void insert(StateString s) {
        if ((int)s.size() != portal_count)
            throw std::runtime_error("string length != portal count");
        strings.insert(std::move(s));
    }
    bool subset_of(const Language& other) const {
        if (portal_count != other.portal_count) return false;
        for (const auto& s : strings)
            if (!other.strings.count(s)) return false;
        return true;
    }
};

// Indexed list of vertex-type pairs. Index 0 is the base (sigma, rho) with
// both sets non-empty; auxiliary indices may use empty sets and may carry a
// usage bound (at most `bound` vertices per instance may use that index).
struct PairFamily {
    struct Entry {
        IntSet sigma, rho;
        std::optional<int> bound;
        bool operator==(const Entry&) const = default;
    };
    std::vector<Entry> pairs;

    PairFamily() = default;
    explicit PairFamily(const Pair& base) {
        pairs.push_back(Entry{base.sigma, base.rho, std::nullopt});
    }
    const Entry& base() const { return pairs.at(0); }
    Pair base_pair() const { return Pair(pairs.at(0).sigma, pairs.at(0).rho); }
    // Returns the index of the given auxiliary pair, adding it if absent.
    int ensure(const IntSet& s, const IntSet& r, std::optional<int> bound = std::nullopt) {
        for (size_t i = 0; i < pairs.size(); ++i)
            if (pairs[i].sigma == s && pairs[i].rho == r) {
                if (bound && (!pairs[i].bound || *pairs[i].bound < *bound))
                    pairs[i].bound = bound;
                return (int)i;
            }
        pairs.push_back(Entry{s, r, bound});
        return (int)pairs.size() - 1;
    }
    bool operator==(const PairFamily&) const = default;
};

// A relational constraint: an ordered scope and the list of accepted
// selection bitmasks over that ordering (bit i = scope[i] selected).
// Masks are arbitrary-precision so scopes may exceed machine word size.
// Optional weights turn membership into a rational factor per accepted mask.
struct Constraint {
    std::vector<int> scope;
    std::vector<Int> accepted;
    std::map<Int, Rat> weights;  // empty = unweighted

    bool accepts(const Int& mask) const {
        return std::find(accepted.begin(), accepted.end(), mask) != accepted.end();
    }
    Rat weight_of(const Int& mask) const {
        if (weights.empty()) return Rat(accepts(mask) ? 1 : 0);
        auto it = weights.find(mask);
        return it == weights.end() ? Rat(0) : it->second;
    }
    bool operator==(const Constraint&) const = default;
};

// Builds the mask with the given scope positions set.
inline Int mask_of_positions(const std::vector<int>& positions) {
    Int m = 0;
    for (int i : positions) mpz_setbit(m.get_mpz_t(), i);
    return m;
}

// Hamming-weight helpers for building accepted-mask lists (k < 63).
inline std::vector<Int> masks_with_weight(int k, int w) {
    std::vector<Int> out;
    for (uint64_t m = 0; m < (1ull << k); ++m)
        if (__builtin_popcountll(m) == w) out.push_back(Int((unsigned long)m));
    return out;
}
inline std::vector<Int> masks_with_weight_at_least(int k, int w) {
    std::vector<Int> out;
    for (uint64_t m = 0; m < (1ull << k); ++m)
        if (__builtin_popcountll(m) >= w) out.push_back(Int((unsigned long)m));
    return out;
}
inline std::vector<Int> masks_with_weight_at_most(int k, int w) {
    std::vector<Int> out;
    for (uint64_t m = 0; m < (1ull << k); ++m)
        if (__builtin_popcountll(m) <= w) out.push_back(Int((unsigned long)m));
    return out;
}

// Simple undirected graph + relational constraints + vertex pair-labels +
// optional exact-rational vertex weights + optional dagger mode (vertices in
// any constraint scope are exempt from their sigma/rho degree constraints).
struct Instance {
    int n = 0;
    std::vector<std::pair<int, int>> edges;  // normalized u < v, unique
    std::vector<Constraint> constraints;
    PairFamily family;
    std::vector<int> labels;  // vertex -> family index; may be shorter than n (default 0)
    std::map<int, Rat> vertex_weights;
    bool dagger = false;

    explicit Instance(const Pair& base) : family(base) {}
    explicit Instance(PairFamily fam) : family(std::move(fam)) {}
    Instance() = default;

    int add_vertex(int label = 0) {
        if (label != 0) {
            labels.resize(n, 0);
            labels.push_back(label);
        } else if (!labels.empty()) {
            labels.push_back(0);
        }
        return n++;
    }
    std::vector<int> add_vertices(int k, int label = 0) {
        std::vector<int> out;
        out.reserve(k);
        for (int i = 0; i < k; ++i) out.push_back(add_vertex(label));
        return out;
    }
    void add_edge(int u, int v) {
        if (u == v) throw std::runtime_error("self loop");
        if (u < 0 || v < 0 || u >= n || v >= n) throw std::runtime_error("edge endpoint out of range");
        if (u > v) std::swap(u, v);
        auto e = std::make_pair(u, v);
        auto it = std::lower_bound(edges.begin(), edges.end(), e);
        if (it != edges.end() && *it == e) return;
        edges.insert(it, e);
    }
    bool has_edge(int u, int v) const {
        if (u > v) std::swap(u, v);
        return std::binary_search(edges.begin(), edges.end(), std::make_pair(u, v));
    }
    int label_of(int v) const { return v < (int)labels.size() ? labels[v] : 0; }
    void set_label(int v, int idx) {
        labels.resize(std::max<size_t>(labels.size(), n), 0);
        labels.at(v) = idx;
    }
    void add_constraint(std::vector<int> scope, std::vector<Int> accepted,
                        std::map<Int, Rat> weights = {}) {
        std::set<int> uniq(scope.begin(), scope.end());
        if (uniq.size() != scope.size()) throw std::runtime_error("duplicate vertex in scope");
        for (int v : scope)
            if (v < 0 || v >= n) throw std::runtime_error("scope vertex out of range");
        std::sort(accepted.begin(), accepted.end());
        accepted.erase(std::unique(accepted.begin(), accepted.end()), accepted.end());
        for (const Int& m : accepted)
            if (m < 0 || (m >> (int)scope.size()) != 0) throw std::runtime_error("accepted mask out of range");
        constraints.push_back(Constraint{std::move(scope), std::move(accepted), std::move(weights)});
    }

    bool weighted() const {
        if (!vertex_weights.empty()) return true;
        for (const auto& c : constraints)
            if (!c.weights.empty()) return true;
        return false;
    }
    // Instance size: vertices plus total accepted-tuple count.
    long size_measure() const {
        long s = n;
        for (const auto& c : constraints) s += (long)c.accepted.size();
        return s;
    }
    int arity() const {
        int a = 0;
        for (const auto& c : constraints) a = std::max(a, (int)c.scope.size());
        return a;
    }
    // Vertices lying in at least one constraint scope.
    std::vector<bool> scoped_vertices() const {
        std::vector<bool> s(n, false);
        for (const auto& c : constraints)
            for (int v : c.scope) s[v] = true;
        return s;
    }
    std::vector<std::vector<int>> adjacency() const {
        std::vector<std::vector<int>> adj(n);
        for (auto [u, v] : edges) {
            adj[u].push_back(v);
            adj[v].push_back(u);
        }
        return adj;
    }
    // Checks labels are in family range and c-bounds are respected.
    void validate() const {
        for (int v = 0; v < n; ++v) {
            int l = label_of(v);
            if (l < 0 || l >= (int)family.pairs.size())
                throw std::runtime_error("label out of family range");
        }
        std::vector<int> usage(family.pairs.size(), 0);
        for (int v = 0; v < n; ++v) usage[label_of(v)]++;
        for (size_t i = 0; i < family.pairs.size(); ++i)
            if (family.pairs[i].bound && usage[i] > *family.pairs[i].bound)
                throw std::runtime_error("c-bound exceeded for pair index " + std::to_string(i));
        if (!family.pairs.empty() &&
            (family.base().sigma.empty() || family.base().rho.empty()))
            throw std::runtime_error("base pair must have non-empty sets");
    }
};

// Ordered bag list. Constraint scopes are treated as cliques: each scope
// must be fully contained in some bag.
struct PathDecomposition {
    std::vector<std::vector<int>> bags;

    int width() const {
        size_t w = 0;
        for (const auto& b : bags) w = std::max(w, b.size());
        return (int)w - 1;
    }
    static PathDecomposition single_bag(int n) {
        PathDecomposition pd;
        std::vector<int> all(n);
        std::iota(all.begin(), all.end(), 0);
        pd.bags.push_back(std::move(all));
        return pd;
    }
};

struct PdViolation {
    std::string condition;  // "T.1", "T.2", "T.3", "scope"
    std::string witness;
};

// Returns width on success, or a report naming the first violated condition.
inline std::optional<PdViolation> check_path_decomposition(const Instance& inst,
                                                           const PathDecomposition& pd) {
    int nb = (int)pd.bags.size();
    std::vector<int> first(inst.n, -1), last(inst.n, -1);
    std::vector<std::set<int>> bagsets(nb);
    for (int i = 0; i < nb; ++i) {
        for (int v : pd.bags[i]) {
            if (v < 0 || v >= inst.n)
                return PdViolation{"T.1", "bag vertex out of range: " + std::to_string(v)};
            if (first[v] < 0) first[v] = i;
            last[v] = i;
            bagsets[i].insert(v);
        }
    }
    for (int v = 0; v < inst.n; ++v)
        if (first[v] < 0)
            return PdViolation{"T.1", "vertex not covered: " + std::to_string(v)};
    // contiguity
    for (int v = 0; v < inst.n; ++v)
        for (int i = first[v]; i <= last[v]; ++i)
            if (!bagsets[i].count(v))
                return PdViolation{"T.3", "vertex " + std::to_string(v) +
                                              " missing from bag " + std::to_string(i)};
    auto covered = [&](const std::vector<int>& vs) {
        for (int i = 0; i < nb; ++i) {
            bool ok = true;
            for (int v : vs)
                if (!bagsets[i].count(v)) {
                    ok = false;
                    break;
                }
            if (ok) return true;
        }
        return false;
    };
    for (auto [u, v] : inst.edges)
        if (!covered({u, v}))
            return PdViolation{"T.2", "edge not covered: " + std::to_string(u) + "-" +
                                          std::to_string(v)};
    for (const auto& c : inst.constraints)
        if (!covered(c.scope))
            return PdViolation{"scope", "constraint scope not covered"};
    return std::nullopt;
}

inline int validate_path_decomposition(const Instance& inst, const PathDecomposition& pd) {
    if (auto v = check_path_decomposition(inst, pd))
        throw std::runtime_error("invalid path decomposition: " + v->condition + " (" +
                                 v->witness + ")");
    return pd.width();
}

// Closed-form count for trivial pairs. For (Z>=0, Z>=0): 2^n. For rho = {0}:
// 2^c where c counts connected components whose vertices all have degree in
// sigma (solutions are unions of fully-selected such components).
inline Int trivial_count(const Pair& p, const Instance& inst) {
    if (!is_trivial(p)) throw std::runtime_error("pair is not trivial");
    if (p.sigma.is_full() && p.rho.is_full()) return pow2(inst.n);
    auto adj = inst.adjacency();
    std::vector<int> comp(inst.n, -1);
    int nc = 0;
    for (int v = 0; v < inst.n; ++v) {
        if (comp[v] >= 0) continue;
        std::vector<int> stack{v};
        comp[v] = nc;
        while (!stack.empty()) {
            int u = stack.back();
            stack.pop_back();
            for (int w : adj[u])
                if (comp[w] < 0) {
                    comp[w] = nc;
                    stack.push_back(w);
                }
        }
        ++nc;
    }
    std::vector<bool> good(nc, true);
    for (int v = 0; v < inst.n; ++v)
        if (!p.sigma.contains((int)adj[v].size())) good[comp[v]] = false;
    int c = 0;
    for (int i = 0; i < nc; ++i)
        if (good[i]) ++c;
    return pow2(c);
}

}  // namespace srg

#endif
