#pragma once
// Manager gadgets: graphs with distinguished vertices u_1..u_l whose blocks
// hand each u_i a prescribed split of selected neighbors (s from B_i and
// s_top - s from Bbar_i for sigma_s; r and r_top - r for rho_r), with a
// unique solution per state vector. Four construction families are provided,
// two direct ones built from single-portal providers and two built from a
// grid-of-providers blueprint driven by an L_beta^(2d) provider.

#include <algorithm>
#include <cstdlib>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "io.hpp"
#include "oracle.hpp"
#include "providers.hpp"

namespace srg {

enum class ManagerCase { RCase, EvenCase, SCase, ACase };

inline std::string to_string(ManagerCase c) {
    switch (c) {
        case ManagerCase::RCase: return "RCase";
        case ManagerCase::EvenCase: return "EvenCase";
        case ManagerCase::SCase: return "SCase";
        case ManagerCase::ACase: return "ACase";
    }
    return "?";
}

struct Manager {
    Instance inst;
    std::vector<int> distinguished;             // u_1..u_l
    std::vector<std::vector<int>> blocks;       // B_i
    std::vector<std::vector<int>> cblocks;      // Bbar_i
    std::vector<State> alphabet;                // A, closed under inversion
    std::vector<int> relation_block;            // constraint idx -> block (1-based)
    int block_bound = 0;                        // b

    int rank() const { return (int)distinguished.size(); }
};

namespace manager_detail {

// ---------------------------------------------------------------------------
// Witness tables: one concrete selection per realized portal-state string of a
// gadget, used to pin provider copies to canonical solutions via relations.

struct WitnessTable {
    PortalGadget proto;
    std::map<StateString, std::vector<bool>> sel;  // per proto vertex
};

inline WitnessTable make_witness_table(PortalGadget proto, int leaf_limit = 22,
                                       long budget = 4000000000L) {
    RealizedLanguage rl = realized_language_split(proto, leaf_limit, budget);
    if (proto.declared) {
        CertifyResult res = classify_gadget(proto, rl);
        if (res.cls == GadgetClass::Fail)
            throw std::runtime_error("witness table: gadget failed certification: " +
                                     res.witness);
    }
    WitnessTable out;
    out.proto = std::move(proto);
    for (const auto& [str, wit] : rl.witness) {
        std::vector<bool> bits(out.proto.inst.n, false);
        for (int v : wit) bits.at(v) = true;
        out.sel.emplace(str, std::move(bits));
    }
    return out;
}

inline const std::vector<bool>& witness_for(const WitnessTable& w, const StateString& s) {
    auto it = w.sel.find(s);
    if (it == w.sel.end())
        throw std::runtime_error("no witness for state string " + to_string(s));
    return it->second;
}

// True if the portals are pairwise non-adjacent and share no neighbors, the
// precondition for identifying portals of distinct copies on common vertices.
inline bool portal_closed_neighborhoods_disjoint(const Instance& g,
                                                 const std::vector<int>& portals) {
    std::set<int> pset(portals.begin(), portals.end());
    std::map<int, int> owner;  // neighbor -> portal
    for (auto [u, v] : g.edges) {
        bool pu = pset.count(u), pv = pset.count(v);
        if (pu && pv) return false;
        if (pu || pv) {
            int p = pu ? u : v, w = pu ? v : u;
            auto [it, fresh] = owner.emplace(w, p);
            if (!fresh && it->second != p) return false;
        }
    }
    return true;
}

// Splices a copy of proto into g: portal k lands on targets[k] (targets may
// repeat, identifying portals), every other vertex becomes a fresh vertex.
// Returns the proto-vertex -> g-vertex map.
inline std::vector<int> splice(Instance& g, const Instance& proto,
                               const std::vector<int>& pportals,
                               const std::vector<int>& targets) {
    if (pportals.size() != targets.size())
        throw std::runtime_error("splice: portal/target size mismatch");
    if (!proto.vertex_weights.empty() || proto.dagger)
        throw std::runtime_error("splice: weighted or dagger proto unsupported");
    for (int v = 0; v < proto.n; ++v)
        if (proto.label_of(v) != 0) throw std::runtime_error("splice: labeled proto unsupported");
    std::vector<int> map(proto.n, -1);
    for (size_t k = 0; k < pportals.size(); ++k) {
        int pv = pportals[k];
        if (map[pv] != -1 && map[pv] != targets[k])
            throw std::runtime_error("splice: conflicting portal targets");
        map[pv] = targets[k];
    }
    for (int v = 0; v < proto.n; ++v)
        if (map[v] == -1) map[v] = g.add_vertex();
    for (auto [u, v] : proto.edges) g.add_edge(map[u], map[v]);
    for (const auto& c : proto.constraints) {
        std::vector<int> scope;
        scope.reserve(c.scope.size());
        for (int v : c.scope) scope.push_back(map[v]);
        g.add_constraint(std::move(scope), c.accepted, c.weights);
    }
    return map;
}

// Interior vertices of a spliced copy (proto order, portals skipped).
inline std::vector<int> interiors_of(const WitnessTable& w, const std::vector<int>& map) {
    std::set<int> pset(w.proto.portals.begin(), w.proto.portals.end());
    std::vector<int> out;
    for (int v = 0; v < w.proto.inst.n; ++v)
        if (!pset.count(v)) out.push_back(map[v]);
    return out;
}

// Appends the interior selection bits of one provider copy (witness of the
// given state string) to a mask under construction. `pos` is the next free
// bit index and advances by the interior count. Portal bits are validated
// against the expected values instead of being emitted.
inline void append_witness_bits(Int& mask, int& pos, const WitnessTable& w,
                                const StateString& str) {
    const std::vector<bool>& bits = witness_for(w, str);
    std::set<int> pset(w.proto.portals.begin(), w.proto.portals.end());
    for (size_t k = 0; k < w.proto.portals.size(); ++k) {
        bool expect_sel = str.at(k).flavor == Flavor::Sigma;
        if (bits[w.proto.portals[k]] != expect_sel)
            throw std::runtime_error("witness portal selection disagrees with its state");
    }
    for (int v = 0; v < w.proto.inst.n; ++v) {
        if (pset.count(v)) continue;
        if (bits[v]) mpz_setbit(mask.get_mpz_t(), pos);
        ++pos;
    }
}

// ---------------------------------------------------------------------------
// Direct managers: each block is one (or t_top) single-portal provider copies
// pinned by one relation over the copy plus u_i, with exactly one accepted
// mask per alphabet state.

// Builds the per-side relation mask for "copies take the given states".
inline Int side_mask(const WitnessTable& w, const std::vector<StateString>& copy_states,
                     bool u_selected) {
    Int m = 0;
    if (u_selected) mpz_setbit(m.get_mpz_t(), 0);
    int pos = 1;
    for (const auto& st : copy_states) append_witness_bits(m, pos, w, st);
    return m;
}

struct DirectSideStates {
    // For alphabet state a: the state string (length 1) of each copy.
    std::vector<std::vector<StateString>> per_state;
};

// Attaches `copies` provider copies at u, all pinned together by a single
// relation over u plus every interior, and returns the block vertex list.
inline std::vector<int> attach_direct_side(Instance& g, const WitnessTable& w, int u,
                                           const std::vector<State>& alphabet,
                                           const std::vector<std::vector<StateString>>& states) {
    int copies = states.empty() ? 0 : (int)states.front().size();
    std::vector<int> block;
    std::vector<int> scope{u};
    for (int c = 0; c < copies; ++c) {
        auto map = splice(g, w.proto.inst, w.proto.portals, {u});
        auto in = interiors_of(w, map);
        block.insert(block.end(), in.begin(), in.end());
        scope.insert(scope.end(), in.begin(), in.end());
    }
    std::vector<Int> masks;
    for (size_t ai = 0; ai < alphabet.size(); ++ai)
        masks.push_back(side_mask(w, states[ai], alphabet[ai].flavor == Flavor::Sigma));
    g.add_constraint(std::move(scope), std::move(masks));
    return block;
}

// ---------------------------------------------------------------------------
// Blueprint manager: the grid construction driven by an L_beta^(2d) provider.

struct SideTrace {
    std::vector<StateString> jstr;  // z in [1..t_top]
    std::vector<bool> wrap;         // z in [1..t_top]: row-z F^{s_top} copy on
    int mu_out = 0;
};

// One block of the selection process on one side. `gives` is how many
// neighbors u_i receives from this side; mu_in is the width of the prefix of
// row vertices still waiting for their last neighbor.
inline SideTrace simulate_side(const State& a, int gives, int mu_in, int d, int t_top) {
    SideTrace tr;
    tr.jstr.assign(t_top + 1, {});
    tr.wrap.assign(t_top + 1, false);
    int mu = mu_in;
    bool sel = a.flavor == Flavor::Sigma;
    if (gives > t_top) throw std::runtime_error("simulate_side: gives exceeds t_top");
    for (int z = 1; z <= t_top; ++z) {
        bool give = z <= gives;
        StateString s(2 * d, sig(0));
        if (sel) {
            if (give) {
                s[0] = sig(1);
                for (int j = 1; j <= d - 1; ++j) s[j] = (j <= mu) ? sig(1) : sig(0);
                for (int j = 1; j <= d; ++j) s[d - 1 + j] = (j >= mu + 2) ? sig(1) : sig(0);
                if (mu + 1 == d) {
                    tr.wrap[z] = true;
                    mu = 0;
                } else {
                    mu += 1;
                }
            } else {
                s[0] = sig(0);
                for (int j = 1; j <= d - 1; ++j) s[j] = (j <= mu) ? sig(1) : sig(0);
                for (int j = 1; j <= d; ++j) s[d - 1 + j] = (j >= mu + 1) ? sig(1) : sig(0);
            }
        } else {
            s[0] = give ? rho(1) : rho(0);
            for (int j = 1; j <= d - 1; ++j) s[j] = (j <= mu) ? sig(1) : sig(0);
            for (int j = 1; j <= d; ++j) s[d - 1 + j] = (j >= mu + 1) ? sig(1) : sig(0);
        }
        tr.jstr[z] = std::move(s);
    }
    tr.mu_out = mu;
    return tr;
}

struct ChainState {
    int mu = 0, mub = 0;    // lacking-prefix widths at the block boundary
    bool f = true, fb = true;  // boundary F^{s_top} copies selected state
    int ns = 0;             // #S(x*[1..i-1]) mod d
    int pad_sigma = -1;     // remaining sigma_0 padding blocks (-1 before aux)
    auto operator<=>(const ChainState&) const = default;
};

// Layout of one block relation: scope ordering plus the provider copies whose
// interiors fill it, so masks can be assembled consistently.
struct RelLayout {
    int u = -1;
    std::vector<int> grid;  // rows z = 0..t_top, j ascending
    std::vector<int> scope;
    std::set<Int> masks;
};

struct BlueprintBuild {
    Instance g;
    std::vector<int> us;
    int ell = 0, ell_star = 0, d = 0, beta = 0;
    // rows: global row index k = 0 (initial) .. ell_star * t_top (final);
    // side 1's final row aliases side 0's final row reversed.
    std::vector<std::vector<std::vector<int>>> row;   // [side][k][j]
    std::vector<std::vector<std::vector<std::vector<int>>>> fmap;  // [side][k][y-1]
    std::vector<std::vector<std::vector<std::vector<int>>>> jmap;  // [side][i-1][z-1]
    std::vector<RelLayout> rel;  // 2 per block: index 2(i-1) = X_i, +1 = Xbar_i
};

// Assembles the relation mask for one side of one block from a trace.
inline Int block_mask(const WitnessTable& w, const RelLayout& L, const State& a,
                      bool f_in, const SideTrace& tr, std::optional<bool> final_f,
                      int d, int t_top, int s_top) {
    Int m = 0;
    if (a.flavor == Flavor::Sigma) mpz_setbit(m.get_mpz_t(), 0);
    int pos = 1;
    for (size_t k = 0; k < L.grid.size(); ++k) mpz_setbit(m.get_mpz_t(), pos + (int)k);
    pos += (int)L.grid.size();
    StateString f_on(2 * d, sig(0)), f_off(2 * d, sig(0));
    for (int j = 0; j < d; ++j) f_on[j] = sig(1);
    for (int z = 0; z <= t_top; ++z)
        for (int y = 1; y <= s_top; ++y) {
            bool on;
            if (y < s_top)
                on = true;
            else if (z == 0)
                on = f_in;
            else if (z == t_top && final_f)
                on = *final_f;
            else
                on = tr.wrap[z];
            append_witness_bits(m, pos, w, on ? f_on : f_off);
        }
    for (int z = 1; z <= t_top; ++z) append_witness_bits(m, pos, w, tr.jstr[z]);
    if (pos != (int)L.scope.size()) throw std::runtime_error("block mask size mismatch");
    return m;
}

// Builds the blueprint graph (grid vertices, fill providers F, J-providers),
// then walks every boundary state reachable from any x in A^rank to emit the
// per-block relation masks, maintaining the mu + mub invariant.
inline Manager build_blueprint(const WitnessTable& w, int d, int beta, const Pair& p,
                               int rank, const std::vector<State>& alphabet) {
    if ((int)w.proto.portals.size() != 2 * d)
        throw std::runtime_error("blueprint: provider must have 2d portals");
    if (beta != 0 && beta != 1) throw std::runtime_error("blueprint: beta must be 0 or 1");
    if (p.s_top < 1) throw std::runtime_error("blueprint: needs s_top >= 1");
    if (rank < 1) throw std::runtime_error("blueprint: rank must be positive");
    if (!portal_closed_neighborhoods_disjoint(w.proto.inst, w.proto.portals))
        throw std::runtime_error("blueprint: portal closed neighborhoods not disjoint");

    const int t_top = p.t_top, s_top = p.s_top;
    BlueprintBuild B;
    B.ell = rank;
    B.ell_star = (beta == 1) ? rank + d : rank + d - (rank % d);
    B.d = d;
    B.beta = beta;
    B.g = Instance(p);
    B.us = B.g.add_vertices(B.ell_star);
    const int kfin = B.ell_star * t_top;

    // Grid rows; the final row is shared between the sides, reversed.
    B.row.assign(2, {});
    for (int side = 0; side < 2; ++side) {
        B.row[side].resize(kfin + 1);
        for (int k = 0; k <= kfin; ++k) {
            if (side == 1 && k == kfin) {
                B.row[1][k].resize(d);
                for (int j = 0; j < d; ++j) B.row[1][k][j] = B.row[0][k][d - 1 - j];
            } else {
                B.row[side][k] = B.g.add_vertices(d);
            }
        }
    }
    // Fill providers: s_top copies per row; the final row's are shared.
    auto f_targets = [&](int side, int k) {
        std::vector<int> t;
        for (int rep = 0; rep < 2; ++rep)
            for (int j = 0; j < d; ++j) t.push_back(B.row[side][k][j]);
        return t;
    };
    B.fmap.assign(2, {});
    for (int side = 0; side < 2; ++side) {
        B.fmap[side].resize(kfin + 1);
        for (int k = 0; k <= kfin; ++k) {
            if (side == 1 && k == kfin) {
                B.fmap[1][k] = B.fmap[0][k];
                continue;
            }
            for (int y = 1; y <= s_top; ++y)
                B.fmap[side][k].push_back(
                    splice(B.g, w.proto.inst, w.proto.portals, f_targets(side, k)));
        }
    }
    // J-providers: portals u_i, prev row positions 1..d-1, current row 1..d.
    B.jmap.assign(2, {});
    for (int side = 0; side < 2; ++side) {
        B.jmap[side].resize(B.ell_star);
        for (int i = 1; i <= B.ell_star; ++i)
            for (int z = 1; z <= t_top; ++z) {
                int kprev = (i - 1) * t_top + z - 1, kcur = kprev + 1;
                std::vector<int> t{B.us[i - 1]};
                for (int j = 0; j < d - 1; ++j) t.push_back(B.row[side][kprev][j]);
                for (int j = 0; j < d; ++j) t.push_back(B.row[side][kcur][j]);
                B.jmap[side][i - 1].push_back(splice(B.g, w.proto.inst, w.proto.portals, t));
            }
    }
    // Relation layouts: u_i, grid rows of X_i, then F and J interiors.
    B.rel.resize(2 * B.ell_star);
    for (int i = 1; i <= B.ell_star; ++i)
        for (int side = 0; side < 2; ++side) {
            RelLayout& L = B.rel[2 * (i - 1) + side];
            L.u = B.us[i - 1];
            for (int z = 0; z <= t_top; ++z) {
                int k = (i - 1) * t_top + z;
                for (int j = 0; j < d; ++j) L.grid.push_back(B.row[side][k][j]);
            }
            L.scope.push_back(L.u);
            L.scope.insert(L.scope.end(), L.grid.begin(), L.grid.end());
            std::set<int> pset(w.proto.portals.begin(), w.proto.portals.end());
            auto push_copy = [&](const std::vector<int>& map) {
                for (int v = 0; v < w.proto.inst.n; ++v)
                    if (!pset.count(v)) L.scope.push_back(map[v]);
            };
            for (int z = 0; z <= t_top; ++z) {
                int k = (i - 1) * t_top + z;
                for (int y = 1; y <= s_top; ++y) push_copy(B.fmap[side][k][y - 1]);
            }
            for (int z = 1; z <= t_top; ++z) push_copy(B.jmap[side][i - 1][z - 1]);
        }

    // Reachable-boundary-state walk over all x in A^rank (padded per beta),
    // emitting one mask per block transition.
    std::set<ChainState> cur{ChainState{}};
    for (int i = 1; i <= B.ell_star; ++i) {
        std::set<ChainState> nxt;
        for (const ChainState& st : cur) {
            std::vector<State> choices;
            ChainState base = st;
            if (i <= rank) {
                choices = alphabet;
            } else {
                if (base.pad_sigma < 0)
                    base.pad_sigma = (beta == 1) ? d - (base.ns % d) : B.ell_star - rank;
                choices = {base.pad_sigma > 0 ? sig(0) : rho(0)};
            }
            for (const State& a : choices) {
                ChainState ns = base;
                int gives, cgives;
                if (a.flavor == Flavor::Sigma) {
                    gives = a.count;
                    cgives = p.s_top - a.count;
                    ns.ns = (ns.ns + 1) % d;
                } else {
                    if (beta == 0) throw std::runtime_error("blueprint: rho state with beta=0");
                    gives = a.count;
                    cgives = p.r_top - a.count;
                }
                if (i > rank && ns.pad_sigma > 0) --ns.pad_sigma;
                SideTrace trB = simulate_side(a, gives, st.mu, d, t_top);
                SideTrace trC = simulate_side(a, cgives, st.mub, d, t_top);
                // Invariant: mu + mub tracks s_top * #S(x*[1..i]) modulo d.
                if ((trB.mu_out + trC.mu_out) % d != (s_top * ns.ns) % d)
                    throw std::runtime_error("blueprint: boundary invariant violated");
                std::optional<bool> final_f;
                if (i == B.ell_star) {
                    int sum = trB.mu_out + trC.mu_out;
                    if (sum != 0 && sum != d)
                        throw std::runtime_error("blueprint: bad terminal boundary");
                    final_f = (sum == 0);
                    if (sum == 0) {
                        // The shared final-row F copy hands every identified
                        // vertex its last neighbor, so the final J step on
                        // each side must not cover the row again. A wrapped
                        // step already covers nothing; every other step is
                        // rewritten to touch no row vertex (both lacking
                        // prefixes are empty here, so nothing is dropped).
                        for (SideTrace* tr : {&trB, &trC}) {
                            if (!tr->wrap[t_top]) {
                                StateString& s = tr->jstr[t_top];
                                for (int q = 1; q < 2 * d; ++q) s[q] = sig(0);
                            }
                        }
                    } else {
                        if (trB.wrap[t_top] || trC.wrap[t_top])
                            throw std::runtime_error("blueprint: wrap at complementary ending");
                    }
                }
                B.rel[2 * (i - 1)].masks.insert(
                    block_mask(w, B.rel[2 * (i - 1)], a, st.f, trB, final_f, d, t_top, s_top));
                B.rel[2 * (i - 1) + 1].masks.insert(
                    block_mask(w, B.rel[2 * (i - 1) + 1], a, st.fb, trC, final_f, d, t_top, s_top));
                if (i < B.ell_star) {
                    ns.mu = trB.mu_out;
                    ns.mub = trC.mu_out;
                    ns.f = trB.wrap[t_top];
                    ns.fb = trC.wrap[t_top];
                    nxt.insert(ns);
                }
            }
        }
        cur = std::move(nxt);
    }

    Manager m;
    m.alphabet = alphabet;
    m.distinguished.assign(B.us.begin(), B.us.begin() + rank);
    for (int i = 1; i <= B.ell_star; ++i)
        for (int side = 0; side < 2; ++side) {
            RelLayout& L = B.rel[2 * (i - 1) + side];
            B.g.add_constraint(L.scope,
                               std::vector<Int>(L.masks.begin(), L.masks.end()));
            m.relation_block.push_back(std::min(i, rank));
        }

    // Blocks: B_i is X_i minus X_{i+1} minus u_i; the last pair of blocks
    // absorbs the tail, with the shared final row living on the barred side.
    const int delta = w.proto.inst.n;
    m.block_bound = (B.ell_star - rank + 1) * (s_top + 1) * (t_top + 1) * delta;
    std::set<int> pset(w.proto.portals.begin(), w.proto.portals.end());
    auto copy_interiors = [&](const std::vector<int>& map, std::vector<int>& out) {
        for (int v = 0; v < w.proto.inst.n; ++v)
            if (!pset.count(v)) out.push_back(map[v]);
    };
    m.blocks.assign(rank, {});
    m.cblocks.assign(rank, {});
    for (int side = 0; side < 2; ++side) {
        auto& bl = side == 0 ? m.blocks : m.cblocks;
        for (int i = 1; i <= B.ell_star; ++i) {
            int bi = std::min(i, rank) - 1;
            for (int z = 1; z <= t_top; ++z)
                copy_interiors(B.jmap[side][i - 1][z - 1], bl[bi]);
            int klo = (i - 1) * t_top, khi = i * t_top - 1;
            if (i == B.ell_star && side == 1) khi = kfin;  // shared final row
            for (int k = klo; k <= khi; ++k) {
                if (side == 1 && k == kfin) {
                    // Row vertices are aliases of side 0; add them here only.
                    for (int j = 0; j < d; ++j) bl[bi].push_back(B.row[0][k][j]);
                    for (int y = 1; y <= s_top; ++y)
                        copy_interiors(B.fmap[0][k][y - 1], bl[bi]);
                    continue;
                }
                for (int j = 0; j < d; ++j) bl[bi].push_back(B.row[side][k][j]);
                for (int y = 1; y <= s_top; ++y)
                    copy_interiors(B.fmap[side][k][y - 1], bl[bi]);
            }
        }
    }
    for (int i = rank; i < B.ell_star; ++i) m.blocks[rank - 1].push_back(B.us[i]);
    m.inst = std::move(B.g);
    for (auto& bl : m.blocks) std::sort(bl.begin(), bl.end());
    for (auto& bl : m.cblocks) std::sort(bl.begin(), bl.end());
    for (int i = 0; i < rank; ++i)
        if ((int)m.blocks[i].size() > m.block_bound || (int)m.cblocks[i].size() > m.block_bound)
            throw std::runtime_error("blueprint: block size exceeds bound");
    return m;
}

}  // namespace manager_detail

// ---------------------------------------------------------------------------
// L_beta^(2d) languages and the compound 4-portal provider for the ACase.

inline Language lbeta_language(int d, int beta, bool allow_rho1 = true) {
    Language L;
    L.portal_count = 2 * d;
    std::vector<State> letters{rho(0), sig(0), sig(1)};
    if (allow_rho1) letters.push_back(rho(1));
    StateString cur(2 * d, rho(0));
    auto rec = [&](auto&& self, int pos) -> void {
        if (pos == 2 * d) {
            int nsig1 = 0, nrho = 0;
            for (const State& s : cur) {
                if (s == sig(1)) ++nsig1;
                if (s.flavor == Flavor::Rho) ++nrho;
            }
            if ((nsig1 == 0 || nsig1 == d) && nrho <= beta) L.insert(cur);
            return;
        }
        for (const State& s : letters) {
            cur[pos] = s;
            self(self, pos + 1);
        }
    };
    rec(rec, 0);
    return L;
}

// Four portals joined by one two-portal Z-provider copy per unordered pair:
// an L_1^(4)-provider (without rho_1 states when r_top = 0).
inline PortalGadget build_l1_provider(const Pair& p) {
    if (p.s_top < 1) throw std::runtime_error("L_1^(4) provider needs s_top >= 1");
    PortalGadget z = build_provider(MixedPair{}, p);
    Instance g(p);
    std::vector<int> us = g.add_vertices(4);
    for (int i = 0; i < 4; ++i)
        for (int j = i + 1; j < 4; ++j)
            manager_detail::splice(g, z.inst, z.portals, {us[i], us[j]});
    PortalGadget out(std::move(g), us);
    out.declare(lbeta_language(2, 1, p.r_top >= 1));
    return out;
}

// ---------------------------------------------------------------------------
// Manager builders.

inline Manager build_manager_from_provider(PortalGadget provider, int d, int beta,
                                           const Pair& p, int rank,
                                           std::vector<State> alphabet) {
    auto w = manager_detail::make_witness_table(std::move(provider));
    return manager_detail::build_blueprint(w, d, beta, p, rank, alphabet);
}

inline Manager build_manager(ManagerCase mc, const Pair& p, int rank) {
    using namespace manager_detail;
    if (rank < 1) throw std::runtime_error("manager rank must be positive");

    // Direct construction: one pinned provider copy per side per u_i (or
    // t_top copies for the sigma = {0} ACase branch), each side one relation.
    auto direct = [&](const WitnessTable& w, const std::vector<State>& alphabet,
                      const std::vector<std::vector<StateString>>& bstates,
                      const std::vector<std::vector<StateString>>& cstates) {
        Manager m;
        m.inst = Instance(p);
        m.alphabet = alphabet;
        int copies = bstates.empty() ? 0 : (int)bstates.front().size();
        m.block_bound = copies * (w.proto.inst.n - 1);
        for (int i = 0; i < rank; ++i) {
            int u = m.inst.add_vertex();
            m.distinguished.push_back(u);
            m.blocks.push_back(attach_direct_side(m.inst, w, u, alphabet, bstates));
            m.relation_block.push_back(i + 1);
            m.cblocks.push_back(attach_direct_side(m.inst, w, u, alphabet, cstates));
            m.relation_block.push_back(i + 1);
        }
        return m;
    };
    // State lists for a side handing `give(a)` neighbors out of `copies`
    // single-portal copies whose per-copy states are drawn from lo/hi.
    auto spread = [&](const std::vector<State>& alphabet, int copies,
                      auto&& give) {
        std::vector<std::vector<StateString>> out;
        for (const State& a : alphabet) {
            std::vector<StateString> per;
            int g = give(a);
            for (int c = 0; c < copies; ++c) {
                if (a.flavor == Flavor::Sigma)
                    per.push_back({sig(c < g ? 1 : 0)});
                else
                    per.push_back({rho(c < g ? 1 : 0)});
            }
            out.push_back(std::move(per));
        }
        return out;
    };

    if (mc == ManagerCase::RCase) {
        // Two pinned rho-ladder copies per u_i; only rho states are offered,
        // the ladder state rho_j directly encodes j neighbors from that side.
        auto w = make_witness_table(build_provider(RhoLadder{}, p));
        std::vector<State> alphabet;
        for (int r = 0; r <= p.r_top; ++r) alphabet.push_back(rho(r));
        std::vector<std::vector<StateString>> bs, cs;
        for (const State& a : alphabet) {
            bs.push_back({{rho(a.count)}});
            cs.push_back({{rho(p.r_top - a.count)}});
        }
        return direct(w, alphabet, bs, cs);
    }

    if (mc == ManagerCase::EvenCase) {
        auto ms = max_structured(p);
        if (!ms || *ms != 2 || p.r_top < 1)
            throw std::runtime_error("EvenCase needs maximum structure modulus 2, r_top >= 1");
        auto w = make_witness_table(build_provider(EvenAll{}, p));
        std::vector<State> alphabet;
        for (int s = 0; s <= p.s_top; s += 2) alphabet.push_back(sig(s));
        for (int r = 0; r <= p.r_top; r += 2) alphabet.push_back(rho(r));
        std::vector<std::vector<StateString>> bs, cs;
        for (const State& a : alphabet) {
            int top = a.flavor == Flavor::Sigma ? p.s_top : p.r_top;
            bs.push_back({{State{a.flavor, a.count}}});
            cs.push_back({{State{a.flavor, top - a.count}}});
        }
        return direct(w, alphabet, bs, cs);
    }

    if (mc == ManagerCase::SCase) {
        int c = -1;
        for (int x = 1; x <= p.s_top; ++x)
            if (p.rho.contains(x)) {
                c = x;
                break;
            }
        if (c < 0) throw std::runtime_error("SCase needs c in rho with 1 <= c <= s_top");
        std::vector<State> alphabet;
        for (int s = 0; s <= p.s_top; ++s) alphabet.push_back(sig(s));
        PortalGadget L = build_provider(LrBlock{c}, p);
        return build_manager_from_provider(std::move(L), 2 * c, 0, p, rank, alphabet);
    }

    // ACase.
    auto ms = max_structured(p);
    if (!ms || *ms != 1)
        throw std::runtime_error("ACase needs maximum structure modulus 1");
    if (p.rho == IntSet::finite({0})) throw std::runtime_error("ACase needs rho != {0}");
    std::vector<State> alphabet;
    for (int s = 0; s <= p.s_top; ++s) alphabet.push_back(sig(s));
    for (int r = 0; r <= p.r_top; ++r) alphabet.push_back(rho(r));
    if (p.s_top >= 1) {
        // Blueprint over the compound provider; covers r_top = 0 as well
        // since rho_1 states are then never requested.
        return build_manager_from_provider(build_l1_provider(p), 2, 1, p, rank, alphabet);
    }
    if (p.r_top == 0) {
        // sigma = {0} or all of Z>=0, rho containing 0 with r_top = 0: the
        // distinguished vertices alone form the manager.
        Manager m;
        m.inst = Instance(p);
        m.alphabet = alphabet;
        m.distinguished = m.inst.add_vertices(rank);
        m.blocks.assign(rank, {});
        m.cblocks.assign(rank, {});
        m.block_bound = 0;
        return m;
    }
    // sigma = {0}: t_top single-portal {rho_0, rho_1, sigma_0} copies per side.
    auto w = make_witness_table(build_provider(RhoMSigma0{false}, p));
    auto bs = spread(alphabet, p.t_top,
                     [&](const State& a) { return a.flavor == Flavor::Sigma ? 0 : a.count; });
    auto cs = spread(alphabet, p.t_top, [&](const State& a) {
        return a.flavor == Flavor::Sigma ? 0 : p.r_top - a.count;
    });
    return direct(w, alphabet, bs, cs);
}

// ---------------------------------------------------------------------------
// Exact solution counting for relation-covered instances. Constraints are
// processed in order; the only branching is over their accepted masks, so the
// cost is governed by mask counts, not vertex counts. Requires every vertex
// to appear in at least one constraint scope.

inline Int count_via_relations(const Instance& inst) {
    inst.validate();
    if (inst.weighted() || inst.dagger)
        throw std::runtime_error("count_via_relations: weighted or dagger unsupported");
    const int K = (int)inst.constraints.size();
    std::vector<std::vector<int>> nbr(inst.n);
    for (auto [u, v] : inst.edges) {
        nbr[u].push_back(v);
        nbr[v].push_back(u);
    }
    std::vector<int> first(inst.n, -1), last_cover(inst.n, -1), check_at(inst.n, -1);
    for (int k = 0; k < K; ++k)
        for (int v : inst.constraints[k].scope) {
            if (first[v] < 0) first[v] = k;
            last_cover[v] = k;
        }
    for (int v = 0; v < inst.n; ++v)
        if (first[v] < 0)
            throw std::runtime_error("count_via_relations: vertex " + std::to_string(v) +
                                     " not covered by any constraint");
    for (int k = 0; k < K; ++k)
        for (int v : inst.constraints[k].scope) {
            check_at[v] = std::max(check_at[v], k);
            for (int u : nbr[v]) check_at[u] = std::max(check_at[u], k);
        }
    std::vector<int> alive_until(inst.n);
    for (int v = 0; v < inst.n; ++v) {
        int a = std::max(last_cover[v], check_at[v]);
        for (int u : nbr[v]) a = std::max(a, check_at[u]);
        alive_until[v] = a;
    }
    std::vector<std::vector<int>> check_list(K), retire_list(K);
    for (int v = 0; v < inst.n; ++v) {
        check_list[check_at[v]].push_back(v);
        retire_list[alive_until[v]].push_back(v);
    }

    using Key = std::vector<std::pair<int, uint8_t>>;  // sorted (vertex, selected)
    std::map<Key, Int> cur{{Key{}, Int(1)}};
    for (int k = 0; k < K; ++k) {
        const Constraint& c = inst.constraints[k];
        std::map<Key, Int> next;
        for (const auto& [key, cnt] : cur) {
            std::map<int, uint8_t> dec(key.begin(), key.end());
            for (const Int& m : c.accepted) {
                std::map<int, uint8_t> nd = dec;
                bool ok = true;
                for (size_t idx = 0; idx < c.scope.size(); ++idx) {
                    uint8_t bit = mpz_tstbit(m.get_mpz_t(), idx) ? 1 : 0;
                    auto [it, fresh] = nd.emplace(c.scope[idx], bit);
                    if (!fresh && it->second != bit) {
                        ok = false;
                        break;
                    }
                }
                if (!ok) continue;
                for (int v : check_list[k]) {
                    int deg = 0;
                    for (int u : nbr[v]) deg += nd.at(u);
                    const auto& e = inst.family.pairs[inst.label_of(v)];
                    const IntSet& need = nd.at(v) ? e.sigma : e.rho;
                    if (!need.contains(deg)) {
                        ok = false;
                        break;
                    }
                }
                if (!ok) continue;
                for (int v : retire_list[k]) nd.erase(v);
                next[Key(nd.begin(), nd.end())] += cnt;
            }
        }
        cur = std::move(next);
        if (cur.empty()) return 0;
    }
    Int total = 0;
    for (const auto& [key, cnt] : cur) {
        if (!key.empty()) throw std::runtime_error("count_via_relations: vertices left alive");
        total += cnt;
    }
    return total;
}

// ---------------------------------------------------------------------------
// Certification against Definition-style manager requirements: block
// partition and size bound, neighborhood containment, inter-block edge
// pattern, inversion-closed alphabet, and (optionally) a unique solution with
// exact block splits for every state vector.

struct ManagerCertificate {
    bool ok = false;
    std::string detail;
};

inline ManagerCertificate certify_manager(const Manager& m, bool count_check = true) {
    auto fail = [](std::string s) { return ManagerCertificate{false, std::move(s)}; };
    const int l = m.rank();
    if ((int)m.blocks.size() != l || (int)m.cblocks.size() != l)
        return fail("block list size mismatch");
    const auto& pe = m.inst.family.pairs.at(0);
    Pair p(pe.sigma, pe.rho);

    for (const State& a : m.alphabet) {
        State inv = invert_state(a, p);
        if (std::find(m.alphabet.begin(), m.alphabet.end(), inv) == m.alphabet.end())
            return fail("alphabet not closed under inversion at " + to_string(a));
    }

    // side[v]: 0 = B_i, 1 = Bbar_i, 2 = distinguished; idx[v] = block index.
    std::vector<int> side(m.inst.n, -1), idx(m.inst.n, -1);
    for (int i = 0; i < l; ++i) {
        int u = m.distinguished[i];
        if (side.at(u) != -1) return fail("distinguished vertex repeated");
        side[u] = 2;
        idx[u] = i;
    }
    for (int s = 0; s < 2; ++s)
        for (int i = 0; i < l; ++i)
            for (int v : (s == 0 ? m.blocks : m.cblocks)[i]) {
                if (side.at(v) != -1) return fail("vertex in two blocks: " + std::to_string(v));
                side[v] = s;
                idx[v] = i;
            }
    for (int v = 0; v < m.inst.n; ++v)
        if (side[v] == -1) return fail("vertex in no block: " + std::to_string(v));
    for (int i = 0; i < l; ++i)
        if ((int)m.blocks[i].size() > m.block_bound ||
            (int)m.cblocks[i].size() > m.block_bound)
            return fail("block size exceeds bound b");

    for (auto [u, v] : m.inst.edges) {
        if (side[u] == 2 && side[v] == 2) return fail("edge between distinguished vertices");
        if (side[u] == 2 || side[v] == 2) {
            int d = side[u] == 2 ? u : v, w = side[u] == 2 ? v : u;
            if (idx[w] != idx[d])
                return fail("distinguished vertex " + std::to_string(d) +
                            " has a neighbor outside its blocks");
            continue;
        }
        bool okEdge = (side[u] == side[v] && std::abs(idx[u] - idx[v]) <= 1) ||
                      (side[u] != side[v] && idx[u] == l - 1 && idx[v] == l - 1);
        if (!okEdge)
            return fail("edge violates block pattern: " + std::to_string(u) + "-" +
                        std::to_string(v));
    }

    if (!count_check) return ManagerCertificate{true, "structure verified (counting skipped)"};

    // Unique solution with exact splits for every x in A^l. The probe pins
    // u_i's selection and its per-side selected-neighbor counts, then counts
    // solutions by walking the block relations.
    std::vector<std::vector<int>> nbr(m.inst.n);
    for (auto [u, v] : m.inst.edges) {
        nbr[u].push_back(v);
        nbr[v].push_back(u);
    }
    std::vector<size_t> xidx(l, 0);
    while (true) {
        Instance probe = m.inst;
        probe.constraints.clear();
        std::vector<std::vector<Constraint>> pins(l + 1);
        bool feasible = true;
        for (int i = 0; i < l && feasible; ++i) {
            const State& a = m.alphabet[xidx[i]];
            int u = m.distinguished[i];
            int top = a.flavor == Flavor::Sigma ? p.s_top : p.r_top;
            pins[i + 1].push_back(Constraint{
                {u}, {Int(a.flavor == Flavor::Sigma ? 1 : 0)}, {}});
            for (int s = 0; s < 2; ++s) {
                const auto& bl = (s == 0 ? m.blocks : m.cblocks)[i];
                std::set<int> bset(bl.begin(), bl.end());
                std::vector<int> scope;
                for (int w : nbr[u])
                    if (bset.count(w)) scope.push_back(w);
                int need = s == 0 ? a.count : top - a.count;
                if (need > (int)scope.size()) {
                    feasible = false;
                    break;
                }
                if (scope.empty()) continue;
                if (scope.size() > 62) throw std::runtime_error("split pin scope too large");
                pins[i + 1].push_back(
                    Constraint{scope, masks_with_weight((int)scope.size(), need), {}});
            }
        }
        Int count = -1;
        if (feasible) {
            for (size_t k = 0; k < m.inst.constraints.size(); ++k) {
                probe.constraints.push_back(m.inst.constraints[k]);
                int b = m.relation_block.at(k);
                bool lastOfBlock = k + 1 == m.inst.constraints.size() ||
                                   m.relation_block[k + 1] != b;
                if (lastOfBlock)
                    for (auto& c : pins[b]) probe.constraints.push_back(c);
            }
            if (m.inst.constraints.empty())
                for (int i = 1; i <= l; ++i)
                    for (auto& c : pins[i]) probe.constraints.push_back(c);
            count = count_via_relations(probe);
        }
        if (count != 1) {
            std::string xs;
            for (int i = 0; i < l; ++i) xs += (i ? " " : "") + to_string(m.alphabet[xidx[i]]);
            return fail("state vector [" + xs + "] has " +
                        (feasible ? count.get_str() : std::string("0 (infeasible split)")) +
                        " solutions, expected 1");
        }
        int pos = l - 1;
        while (pos >= 0 && ++xidx[pos] == m.alphabet.size()) xidx[pos--] = 0;
        if (pos < 0) break;
    }
    return ManagerCertificate{true, "certified at rank " + std::to_string(l)};
}

// Serializes a manager as `srg v1` with portal lines for the distinguished
// vertices and block annotation lines.
inline std::string serialize_manager(const Manager& m) {
    SrgFile f;
    f.inst = m.inst;
    f.portals = m.distinguished;
    for (int i = 0; i < m.rank(); ++i) {
        f.blocks.push_back(BlockAnnotation{i + 1, false, m.blocks[i]});
        f.blocks.push_back(BlockAnnotation{i + 1, true, m.cblocks[i]});
    }
    return serialize_srg(f);
}

}  // namespace srg
