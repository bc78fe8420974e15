#ifndef SRG_DP_HPP
#define SRG_DP_HPP

// Path-decomposition dynamic programming counter. Per bag vertex the state
// is (selected?, selected-neighbor counter). Counters for a cofinite set
// saturate at its top (all larger values are members, so the outcomes
// coincide); for a finite set a counter pushed past the top kills the state
// immediately. This keeps the live state space at s_top + r_top + 2 values
// per vertex.

#include "core.hpp"

#include <unordered_map>

namespace srg {

namespace dp_detail {

struct VertexInfo {
    const IntSet* sigma;
    const IntSet* rho;
    bool exempt;  // dagger-scoped: no degree constraint
};

inline uint8_t enc(bool sel, int cnt) { return (uint8_t)((sel ? 0x80 : 0) | cnt); }
inline bool enc_sel(uint8_t e) { return e & 0x80; }
inline int enc_cnt(uint8_t e) { return e & 0x7f; }

struct VecHash {
    size_t operator()(const std::vector<uint8_t>& v) const {
        size_t h = 1469598103934665603ull;
        for (uint8_t x : v) {
            h ^= x;
            h *= 1099511628211ull;
        }
        return h;
    }
};

}  // namespace dp_detail

inline Rat count_dp_weighted(const Instance& inst, const PathDecomposition& pd) {
    using namespace dp_detail;
    inst.validate();
    validate_path_decomposition(inst, pd);

    std::vector<VertexInfo> info(inst.n);
    auto scoped = inst.scoped_vertices();
    for (int v = 0; v < inst.n; ++v) {
        const auto& e = inst.family.pairs[inst.label_of(v)];
        info[v] = VertexInfo{&e.sigma, &e.rho, inst.dagger && scoped[v]};
        if ((!e.sigma.empty() && e.sigma.top() > 120) || (!e.rho.empty() && e.rho.top() > 120))
            throw std::runtime_error("set top too large for dp counters");
    }

    // Deduplicated bag vertex lists plus a trailing empty bag so every vertex
    // gets forgotten.
    std::vector<std::vector<int>> bags;
    for (const auto& b : pd.bags) {
        std::vector<int> s = b;
        std::sort(s.begin(), s.end());
        s.erase(std::unique(s.begin(), s.end()), s.end());
        bags.push_back(std::move(s));
    }
    bags.push_back({});
    int nb = (int)bags.size();

    // Assign each edge / constraint to the first bag containing it entirely.
    std::vector<std::vector<std::pair<int, int>>> edges_at(nb);
    std::vector<std::vector<int>> cons_at(nb);
    auto bag_contains = [&](int i, int v) {
        return std::binary_search(bags[i].begin(), bags[i].end(), v);
    };
    for (auto [u, v] : inst.edges)
        for (int i = 0; i < nb; ++i)
            if (bag_contains(i, u) && bag_contains(i, v)) {
                edges_at[i].push_back({u, v});
                break;
            }
    for (size_t ci = 0; ci < inst.constraints.size(); ++ci) {
        bool placed = false;
        for (int i = 0; i < nb && !placed; ++i) {
            bool all = true;
            for (int v : inst.constraints[ci].scope)
                if (!bag_contains(i, v)) {
                    all = false;
                    break;
                }
            if (all) {
                cons_at[i].push_back((int)ci);
                placed = true;
            }
        }
        if (!placed) throw std::runtime_error("constraint scope never covered");
    }

    // Membership of a final counter value, respecting saturation.
    auto feasible = [&](int v, bool sel, int cnt) {
        if (info[v].exempt) return true;
        const IntSet& s = sel ? *info[v].sigma : *info[v].rho;
        if (s.empty()) return false;
        if (s.cofinite && cnt >= s.top()) return true;
        return s.contains(cnt);
    };
    // Counter bump; returns false when the state dies (finite set overflow).
    auto bump = [&](int v, bool sel, int& cnt) {
        if (info[v].exempt) return true;
        const IntSet& s = sel ? *info[v].sigma : *info[v].rho;
        if (s.empty()) return false;
        int top = s.top();
        if (s.cofinite) {
            cnt = std::min(cnt + 1, top);
            return true;
        }
        ++cnt;
        return cnt <= top;
    };

    using Table = std::unordered_map<std::vector<uint8_t>, Rat, VecHash>;
    Table table;
    table[{}] = Rat(1);
    std::vector<int> prev;  // vertices of previous bag, sorted

    for (int bi = 0; bi < nb; ++bi) {
        const auto& cur = bags[bi];
        // Positions of kept vertices in prev, and of new vertices in cur.
        std::vector<int> keep_pos;   // index into prev for each kept cur vertex
        std::vector<int> newv;       // vertices introduced here
        std::vector<int> cur_src;    // per cur position: index into prev or -1
        for (int v : cur) {
            auto it = std::lower_bound(prev.begin(), prev.end(), v);
            if (it != prev.end() && *it == v) {
                cur_src.push_back((int)(it - prev.begin()));
            } else {
                cur_src.push_back(-1);
                newv.push_back(v);
            }
        }
        std::vector<int> forget_pos;  // positions in prev being dropped
        for (size_t i = 0; i < prev.size(); ++i)
            if (!std::binary_search(cur.begin(), cur.end(), prev[i]))
                forget_pos.push_back((int)i);

        Table next;
        for (const auto& [key, val] : table) {
            // Forget check.
            bool ok = true;
            for (int p : forget_pos)
                if (!feasible(prev[p], enc_sel(key[p]), enc_cnt(key[p]))) {
                    ok = false;
                    break;
                }
            if (!ok) continue;
            // Branch over selections of introduced vertices.
            int k = (int)newv.size();
            for (uint64_t br = 0; br < (1ull << k); ++br) {
                Rat w = val;
                std::vector<uint8_t> nk(cur.size());
                int ni = 0;
                for (size_t i = 0; i < cur.size(); ++i) {
                    if (cur_src[i] >= 0) {
                        nk[i] = key[cur_src[i]];
                    } else {
                        bool sel = (br >> ni) & 1;
                        ++ni;
                        nk[i] = enc(sel, 0);
                        if (sel) {
                            auto it = inst.vertex_weights.find(cur[i]);
                            if (it != inst.vertex_weights.end()) w *= it->second;
                        }
                    }
                }
                auto acc = next.find(nk);
                if (acc == next.end())
                    next.emplace(std::move(nk), w);
                else
                    acc->second += w;
            }
        }

        // Edge updates within this bag.
        auto pos_of = [&](int v) {
            return (int)(std::lower_bound(cur.begin(), cur.end(), v) - cur.begin());
        };
        for (auto [u, v] : edges_at[bi]) {
            int pu = pos_of(u), pv = pos_of(v);
            Table upd;
            for (auto& [key, val] : next) {
                std::vector<uint8_t> nk = key;
                bool alive = true;
                if (enc_sel(nk[pv])) {
                    int c = enc_cnt(nk[pu]);
                    alive = bump(u, enc_sel(nk[pu]), c);
                    nk[pu] = enc(enc_sel(nk[pu]), c);
                }
                if (alive && enc_sel(nk[pu])) {
                    int c = enc_cnt(nk[pv]);
                    alive = bump(v, enc_sel(nk[pv]), c);
                    nk[pv] = enc(enc_sel(nk[pv]), c);
                }
                if (!alive) continue;
                auto acc = upd.find(nk);
                if (acc == upd.end())
                    upd.emplace(std::move(nk), val);
                else
                    acc->second += val;
            }
            next = std::move(upd);
        }

        // Constraints fully covered by this bag: weight/filter once.
        for (int ci : cons_at[bi]) {
            const auto& c = inst.constraints[ci];
            Table upd;
            for (auto& [key, val] : next) {
                Int sub = 0;
                for (size_t i = 0; i < c.scope.size(); ++i)
                    if (enc_sel(key[pos_of(c.scope[i])])) mpz_setbit(sub.get_mpz_t(), i);
                Rat f = c.weight_of(sub);
                if (f == 0) continue;
                Rat w = val * f;
                auto acc = upd.find(key);
                if (acc == upd.end())
                    upd.emplace(key, w);
                else
                    acc->second += w;
            }
            next = std::move(upd);
        }

        table = std::move(next);
        prev = cur;
    }

    Rat total(0);
    for (const auto& [key, val] : table) total += val;
    return total;
}

inline Int count_dp(const Instance& inst, const PathDecomposition& pd) {
    Rat r = count_dp_weighted(inst, pd);
    if (r.get_den() != 1) throw std::runtime_error("weighted count is not an integer");
    return r.get_num();
}

}  // namespace srg

#endif
