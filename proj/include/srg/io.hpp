#ifndef SRG_IO_HPP
#define SRG_IO_HPP

// Line-oriented "srg v1" instance format. Whitespace-separated tokens,
// `#` starts a comment. Lines:
//   pair <idx> sigma <finite|cofinite> <ints...>
//   pair <idx> rho <finite|cofinite> <ints...>
//   pairbound <idx> <c>
//   vertices <n>
//   edge <u> <v>
//   label <v> <pairidx>
//   rel <k> <v1..vk> accepts <hex masks...>
//   wrel <k> <v1..vk> <hexmask>=<num>[/<den>] ...
//   vweight <v> <num>[/<den>]
//   dagger on|off
//   bag <v...>
//   portal <v...>
//   lang <s<i>|r<i> tokens...>      (one declared string per line)
//   langpars on
//   block <i> <B|Bbar> <v...>

#include "core.hpp"
#include "oracle.hpp"

#include <sstream>

namespace srg {

struct BlockAnnotation {
    int index;
    bool barred;
    std::vector<int> vertices;
};

struct SrgFile {
    Instance inst;
    std::optional<PathDecomposition> pd;
    std::vector<int> portals;
    std::vector<StateString> lang;
    bool lang_pars = false;
    std::vector<BlockAnnotation> blocks;

    PortalGadget gadget() const {
        PortalGadget g(inst, portals);
        if (!lang.empty() || !portals.empty()) {
            Language L;
            L.portal_count = (int)portals.size();
            for (const auto& s : lang) L.insert(s);
            g.declare(std::move(L), lang_pars);
        }
        return g;
    }
};

namespace io_detail {

inline Rat parse_rat(const std::string& tok) {
    auto slash = tok.find('/');
    if (slash == std::string::npos) return Rat(Int(tok));
    Rat r(Int(tok.substr(0, slash)), Int(tok.substr(slash + 1)));
    r.canonicalize();
    return r;
}

inline std::string rat_str(const Rat& r) {
    std::string s = r.get_num().get_str();
    if (r.get_den() != 1) s += "/" + r.get_den().get_str();
    return s;
}

inline State parse_state(const std::string& tok) {
    if (tok.size() < 2 || (tok[0] != 's' && tok[0] != 'r'))
        throw std::runtime_error("bad state token: " + tok);
    return State{tok[0] == 's' ? Flavor::Sigma : Flavor::Rho, std::stoi(tok.substr(1))};
}

}  // namespace io_detail

inline SrgFile parse_srg(std::istream& in) {
    using namespace io_detail;
    // Buffered pieces, assembled at the end so line order is irrelevant.
    std::map<int, IntSet> sigmas, rhos;
    std::map<int, int> bounds;
    int n = -1;
    std::vector<std::pair<int, int>> edges;
    std::vector<std::pair<int, int>> labels;
    struct RawRel {
        std::vector<int> scope;
        std::vector<Int> accepted;
        std::map<Int, Rat> weights;
    };
    std::vector<RawRel> rels;
    std::map<int, Rat> vweights;
    bool dagger = false;
    std::vector<std::vector<int>> bagl;
    bool any_bag = false;
    SrgFile out;

    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line.resize(hash);
        std::istringstream ls(line);
        std::string cmd;
        if (!(ls >> cmd)) continue;
        auto fail = [&](const std::string& msg) -> std::runtime_error {
            return std::runtime_error("srg parse error at line " + std::to_string(lineno) +
                                      ": " + msg);
        };
        try {
            if (cmd == "pair") {
                int idx;
                std::string which, kind;
                ls >> idx >> which >> kind;
                std::vector<int> xs;
                int x;
                while (ls >> x) xs.push_back(x);
                IntSet s = kind == "finite"     ? IntSet::finite(xs)
                           : kind == "cofinite" ? IntSet::cofinite_excluding(xs)
                                                : throw fail("bad set kind " + kind);
                if (which == "sigma")
                    sigmas[idx] = s;
                else if (which == "rho")
                    rhos[idx] = s;
                else
                    throw fail("expected sigma or rho");
            } else if (cmd == "pairbound") {
                int idx, c;
                ls >> idx >> c;
                bounds[idx] = c;
            } else if (cmd == "vertices") {
                ls >> n;
            } else if (cmd == "edge") {
                int u, v;
                ls >> u >> v;
                edges.push_back({u, v});
            } else if (cmd == "label") {
                int v, l;
                ls >> v >> l;
                labels.push_back({v, l});
            } else if (cmd == "rel" || cmd == "wrel") {
                int k;
                ls >> k;
                RawRel r;
                for (int i = 0; i < k; ++i) {
                    int v;
                    if (!(ls >> v)) throw fail("short scope");
                    r.scope.push_back(v);
                }
                if (cmd == "rel") {
                    std::string kw;
                    ls >> kw;
                    if (kw != "accepts") throw fail("expected 'accepts'");
                    std::string tok;
                    while (ls >> tok) r.accepted.push_back(Int(tok, 16));
                } else {
                    std::string tok;
                    while (ls >> tok) {
                        auto eq = tok.find('=');
                        if (eq == std::string::npos) throw fail("bad weight token");
                        Int m(tok.substr(0, eq), 16);
                        r.accepted.push_back(m);
                        r.weights[m] = parse_rat(tok.substr(eq + 1));
                    }
                }
                rels.push_back(std::move(r));
            } else if (cmd == "vweight") {
                int v;
                std::string tok;
                ls >> v >> tok;
                vweights[v] = parse_rat(tok);
            } else if (cmd == "dagger") {
                std::string s;
                ls >> s;
                dagger = (s == "on");
            } else if (cmd == "bag") {
                any_bag = true;
                std::vector<int> b;
                int v;
                while (ls >> v) b.push_back(v);
                bagl.push_back(std::move(b));
            } else if (cmd == "portal") {
                int v;
                while (ls >> v) out.portals.push_back(v);
            } else if (cmd == "lang") {
                StateString s;
                std::string tok;
                while (ls >> tok) s.push_back(parse_state(tok));
                out.lang.push_back(std::move(s));
            } else if (cmd == "langpars") {
                std::string s;
                ls >> s;
                out.lang_pars = (s == "on");
            } else if (cmd == "block") {
                BlockAnnotation b;
                std::string which;
                ls >> b.index >> which;
                b.barred = (which == "Bbar");
                int v;
                while (ls >> v) b.vertices.push_back(v);
                out.blocks.push_back(std::move(b));
            } else {
                throw fail("unknown directive " + cmd);
            }
        } catch (const std::invalid_argument&) {
            throw fail("bad number");
        }
    }
    if (n < 0) throw std::runtime_error("srg parse error: missing 'vertices' line");
    if (!sigmas.count(0) || !rhos.count(0))
        throw std::runtime_error("srg parse error: missing base pair 0");
    PairFamily fam;
    int max_idx = 0;
    for (const auto& [i, _] : sigmas) max_idx = std::max(max_idx, i);
    for (const auto& [i, _] : rhos) max_idx = std::max(max_idx, i);
    for (int i = 0; i <= max_idx; ++i) {
        if (!sigmas.count(i) || !rhos.count(i))
            throw std::runtime_error("srg parse error: pair " + std::to_string(i) +
                                     " missing sigma or rho");
        std::optional<int> b;
        if (bounds.count(i)) b = bounds[i];
        fam.pairs.push_back(PairFamily::Entry{sigmas[i], rhos[i], b});
    }
    Instance inst(std::move(fam));
    try {
        inst.n = n;
        for (auto [u, v] : edges) inst.add_edge(u, v);
        for (auto [v, l] : labels) inst.set_label(v, l);
        for (auto& r : rels) inst.add_constraint(r.scope, r.accepted, r.weights);
        inst.vertex_weights = std::move(vweights);
        inst.dagger = dagger;
        inst.validate();
    } catch (const std::runtime_error& e) {
        throw std::runtime_error(std::string("srg parse error: ") + e.what());
    }
    out.inst = std::move(inst);
    if (any_bag) {
        PathDecomposition pd;
        pd.bags = std::move(bagl);
        out.pd = std::move(pd);
    }
    return out;
}

inline SrgFile parse_srg(const std::string& text) {
    std::istringstream in(text);
    return parse_srg(in);
}

inline std::string serialize_srg(const SrgFile& f) {
    using namespace io_detail;
    std::ostringstream os;
    os << "# srg v1\n";
    for (size_t i = 0; i < f.inst.family.pairs.size(); ++i) {
        const auto& e = f.inst.family.pairs[i];
        auto emit = [&](const char* which, const IntSet& s) {
            os << "pair " << i << ' ' << which << ' ' << (s.cofinite ? "cofinite" : "finite");
            for (int x : s.support) os << ' ' << x;
            os << '\n';
        };
        emit("sigma", e.sigma);
        emit("rho", e.rho);
        if (e.bound) os << "pairbound " << i << ' ' << *e.bound << '\n';
    }
    os << "vertices " << f.inst.n << '\n';
    if (f.inst.dagger) os << "dagger on\n";
    for (int v = 0; v < f.inst.n; ++v)
        if (f.inst.label_of(v) != 0) os << "label " << v << ' ' << f.inst.label_of(v) << '\n';
    for (auto [u, v] : f.inst.edges) os << "edge " << u << ' ' << v << '\n';
    for (const auto& c : f.inst.constraints) {
        os << (c.weights.empty() ? "rel " : "wrel ") << c.scope.size();
        for (int v : c.scope) os << ' ' << v;
        if (c.weights.empty()) {
            os << " accepts";
            for (const Int& m : c.accepted) os << ' ' << m.get_str(16);
        } else {
            for (const Int& m : c.accepted)
                os << ' ' << m.get_str(16) << '=' << rat_str(c.weights.at(m));
        }
        os << '\n';
    }
    for (const auto& [v, w] : f.inst.vertex_weights)
        os << "vweight " << v << ' ' << rat_str(w) << '\n';
    if (!f.portals.empty()) {
        os << "portal";
        for (int v : f.portals) os << ' ' << v;
        os << '\n';
    }
    for (const auto& s : f.lang) {
        os << "lang";
        for (const auto& st : s) os << ' ' << to_string(st);
        os << '\n';
    }
    if (f.lang_pars) os << "langpars on\n";
    for (const auto& b : f.blocks) {
        os << "block " << b.index << ' ' << (b.barred ? "Bbar" : "B");
        for (int v : b.vertices) os << ' ' << v;
        os << '\n';
    }
    if (f.pd)
        for (const auto& b : f.pd->bags) {
            os << "bag";
            for (int v : b) os << ' ' << v;
            os << '\n';
        }
    return os.str();
}

inline std::string serialize_instance(const Instance& inst,
                                      const std::optional<PathDecomposition>& pd = std::nullopt) {
    SrgFile f;
    f.inst = inst;
    f.pd = pd;
    return serialize_srg(f);
}

inline std::string serialize_gadget(const PortalGadget& g,
                                    const std::optional<PathDecomposition>& pd = std::nullopt) {
    SrgFile f;
    f.inst = g.inst;
    f.pd = pd;
    f.portals = g.portals;
    if (g.declared)
        for (const auto& s : g.declared->strings) f.lang.push_back(s);
    f.lang_pars = g.parsimonious_claim;
    return serialize_srg(f);
}

}  // namespace srg

#endif
