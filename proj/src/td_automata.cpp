#include "isg/td_automata.hpp"

#include <algorithm>
#include <bit>
#include <chrono>
#include <fstream>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <tuple>
#include <unordered_map>
#include <utility>

#include "json.hpp"

#include "isg/buckets.hpp"
#include "isg/errors.hpp"
#include "isg/oracle.hpp"

namespace isg {

// --- capped multisets --------------------------------------------------------

Multiset cap_multiset(const Multiset& m, int tau) {
    if (tau < 0) throw ContractViolation("tau must be nonnegative");
    Multiset out = m;
    for (int& x : out) {
        if (x < 0) throw ContractViolation("negative multiplicity");
        x = std::min(x, tau);
    }
    return out;
}

Multiset multiset_of(const std::vector<int>& states, int num_states, int tau) {
    Multiset m(static_cast<std::size_t>(num_states), 0);
    for (int s : states) {
        if (s < 0 || s >= num_states) throw ContractViolation("state out of range: " + std::to_string(s));
        ++m[static_cast<std::size_t>(s)];
    }
    return cap_multiset(m, tau);
}

std::uint64_t multiset_code(const Multiset& m, int tau) {
    std::uint64_t code = 0, base = 1;
    for (int x : m) {
        if (x < 0 || x > tau) throw ContractViolation("multiset is not capped");
        code += static_cast<std::uint64_t>(x) * base;
        base *= static_cast<std::uint64_t>(tau) + 1;
    }
    return code;
}

namespace {

constexpr std::uint64_t kMaxMultisets = 1'000'000;

std::uint64_t multiset_count(int num_states, int tau) {
    std::uint64_t c = 1;
    for (int i = 0; i < num_states; ++i) {
        c *= static_cast<std::uint64_t>(tau) + 1;
        if (c > kMaxMultisets) throw CapExceeded("too many capped multisets");
    }
    return c;
}

Multiset decode_multiset(std::uint64_t code, int num_states, int tau) {
    Multiset m(static_cast<std::size_t>(num_states), 0);
    for (int& x : m) {
        x = static_cast<int>(code % (static_cast<std::uint64_t>(tau) + 1));
        code /= static_cast<std::uint64_t>(tau) + 1;
    }
    return m;
}

}  // namespace

std::vector<Multiset> all_multisets(int num_states, int tau) {
    if (num_states < 0 || tau < 0) throw ContractViolation("bad multiset universe");
    std::uint64_t c = multiset_count(num_states, tau);
    std::vector<Multiset> out;
    out.reserve(c);
    for (std::uint64_t code = 0; code < c; ++code) out.push_back(decode_multiset(code, num_states, tau));
    return out;
}

// --- forests -------------------------------------------------------------------

VertexSet TreedepthDecomposition::vertices() const {
    VertexSet s;
    for (std::size_t v = 0; v < parent.size(); ++v)
        if (parent[v] != kNoVertex) s.insert(static_cast<int>(v));
    return s;
}

int TreedepthDecomposition::depth_of(int v) const {
    const int n = static_cast<int>(parent.size());
    if (v < 0 || v >= n || !contains(v)) throw ContractViolation("vertex " + std::to_string(v) + " is not in the forest");
    int h = 1;
    for (int u = parent[static_cast<std::size_t>(v)]; u != kRoot; u = parent[static_cast<std::size_t>(u)]) {
        if (u < 0 || u >= n || !contains(u)) throw ContractViolation("parent outside the forest");
        if (++h > n) throw ContractViolation("parent map has a cycle");
    }
    return h;
}

int TreedepthDecomposition::depth() const {
    int best = 0;
    for (std::size_t v = 0; v < parent.size(); ++v)
        if (parent[v] != kNoVertex) best = std::max(best, depth_of(static_cast<int>(v)));
    return best;
}

std::vector<int> TreedepthDecomposition::path_to(int v) const {
    depth_of(v);
    std::vector<int> path;
    for (int u = v; u != kRoot; u = parent[static_cast<std::size_t>(u)]) path.push_back(u);
    std::reverse(path.begin(), path.end());
    return path;
}

bool TreedepthDecomposition::is_ancestor(int a, int v) const {
    for (int u = v; u >= 0; u = parent[static_cast<std::size_t>(u)])
        if (u == a) return true;
    return false;
}

std::vector<int> TreedepthDecomposition::children(int v) const {
    std::vector<int> out;
    for (std::size_t u = 0; u < parent.size(); ++u)
        if (parent[u] == v) out.push_back(static_cast<int>(u));
    return out;
}

std::vector<int> TreedepthDecomposition::roots() const { return children(kRoot); }

bool is_treedepth_decomposition(const Graph& g, const TreedepthDecomposition& f) {
    if (static_cast<int>(f.parent.size()) != g.n()) return false;
    for (int v = 0; v < g.n(); ++v) {
        if (!f.contains(v)) continue;
        try {
            f.depth_of(v);
        } catch (const ContractViolation&) {
            return false;
        }
    }
    for (auto [u, v] : g.edges())
        if (f.contains(u) && f.contains(v) && !f.is_ancestor(u, v) && !f.is_ancestor(v, u)) return false;
    return true;
}

namespace {

bool subtree_touches(const Graph& g, const TreedepthDecomposition& f, int u, int p) {
    for (int w = 0; w < g.n(); ++w)
        if (f.contains(w) && g.adjacent(w, p) && f.is_ancestor(u, w)) return true;
    return false;
}

}  // namespace

bool is_proper(const Graph& g, const TreedepthDecomposition& f) {
    for (int u = 0; u < g.n(); ++u) {
        if (!f.contains(u)) continue;
        int p = f.parent[static_cast<std::size_t>(u)];
        if (p != kRoot && !subtree_touches(g, f, u, p)) return false;
    }
    return true;
}

TreedepthDecomposition make_proper(const Graph& g, TreedepthDecomposition f) {
    if (!is_treedepth_decomposition(g, f)) throw ContractViolation("make_proper needs a valid decomposition");
    for (bool changed = true; changed;) {
        changed = false;
        for (int u = 0; u < g.n() && !changed; ++u) {
            if (!f.contains(u)) continue;
            int p = f.parent[static_cast<std::size_t>(u)];
            if (p == kRoot || subtree_touches(g, f, u, p)) continue;
            f.parent[static_cast<std::size_t>(u)] = f.parent[static_cast<std::size_t>(p)];
            changed = true;
        }
    }
    return f;
}

// --- labellers -----------------------------------------------------------------

int default_symbol(int d, int h, const std::vector<bool>& f) {
    if (d < 1 || d > 20) throw ContractViolation("label depth bound out of range");
    if (h < 1 || h > d) throw ContractViolation("depth " + std::to_string(h) + " exceeds the bound " + std::to_string(d));
    if (static_cast<int>(f.size()) > d) throw ContractViolation("adjacency vector longer than d");
    int bits = 0;
    for (std::size_t i = 0; i < f.size(); ++i)
        if (f[i]) bits |= 1 << i;
    return (h - 1) * (1 << d) + bits;
}

std::string default_symbol_name(int d, int symbol) {
    if (symbol < 0 || symbol >= d * (1 << d)) throw ContractViolation("symbol out of range");
    std::string s = std::to_string(symbol / (1 << d) + 1) + ":";
    for (int i = 0; i < d; ++i) s += ((symbol >> i) & 1) ? '1' : '0';
    return s;
}

int parse_default_symbol(int d, const std::string& name) {
    auto colon = name.find(':');
    if (colon == std::string::npos || colon == 0) throw ConfigurationError("bad symbol name '" + name + "'");
    int h = 0;
    try {
        std::size_t used = 0;
        h = std::stoi(name.substr(0, colon), &used);
        if (used != colon) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
        throw ConfigurationError("bad symbol depth in '" + name + "'");
    }
    std::string bits = name.substr(colon + 1);
    if (static_cast<int>(bits.size()) != d || h < 1 || h > d)
        throw ConfigurationError("symbol '" + name + "' does not fit depth " + std::to_string(d));
    std::vector<bool> f;
    for (char c : bits) {
        if (c != '0' && c != '1') throw ConfigurationError("bad adjacency bits in '" + name + "'");
        f.push_back(c == '1');
    }
    return default_symbol(d, h, f);
}

Labeller default_labeller(int d) {
    if (d < 1 || d > 20) throw ContractViolation("label depth bound out of range");
    Labeller lab;
    lab.alphabet_size = d * (1 << d);
    lab.label = [d](const Graph& g, const std::vector<int>& path) {
        const int h = static_cast<int>(path.size());
        if (h < 1 || h > d) throw ContractViolation("depth " + std::to_string(h) + " exceeds the bound " + std::to_string(d));
        const int v = path.back();
        std::vector<bool> f(static_cast<std::size_t>(h - 1));
        for (int i = 0; i + 1 < h; ++i) f[static_cast<std::size_t>(i)] = g.adjacent(v, path[static_cast<std::size_t>(i)]);
        return default_symbol(d, h, f);
    };
    return lab;
}

std::vector<int> label_forest(const Graph& g, const TreedepthDecomposition& f, const Labeller& lab) {
    std::vector<int> labels(static_cast<std::size_t>(g.n()), -1);
    for (int v = 0; v < g.n(); ++v)
        if (f.contains(v)) labels[static_cast<std::size_t>(v)] = lab.label(g, f.path_to(v));
    return labels;
}

std::vector<int> default_labelling(const Graph& g, const TreedepthDecomposition& f, int d) {
    return label_forest(g, f, default_labeller(d));
}

// --- threshold automata ----------------------------------------------------------

int ThresholdAutomaton::step(int symbol, const Multiset& children) const {
    if (symbol < 0 || symbol >= alphabet_size)
        throw ConfigurationError("symbol " + std::to_string(symbol) + " is outside the alphabet");
    if (static_cast<int>(children.size()) != num_states()) throw ContractViolation("multiset over the wrong state set");
    if (!delta) throw ConfigurationError("automaton has no transition function");
    int q = delta(symbol, children);
    if (q < 0 || q >= num_states()) throw ConfigurationError("transition leads outside the state set");
    return q;
}

BuiltinAutomaton parse_builtin_automaton(const std::string& s) {
    if (s == "edgeless") return BuiltinAutomaton::Edgeless;
    if (s == "matching" || s == "induced-matching") return BuiltinAutomaton::InducedMatching;
    throw ContractViolation("unknown builtin automaton '" + s + "'");
}

ThresholdAutomaton builtin_automaton(BuiltinAutomaton kind, int d) {
    if (d < 1 || d > 20) throw ContractViolation("depth bound out of range");
    enum { kOk = 0, kBad = 1 };
    ThresholdAutomaton a;
    a.states = {"ok", "bad"};
    a.alphabet_size = d * (1 << d);
    const int width = 1 << d;
    if (kind == BuiltinAutomaton::Edgeless) {
        a.tau = 1;
        a.delta = [width](int symbol, const Multiset& m) {
            return (symbol % width != 0 || m[kBad] > 0) ? kBad : kOk;
        };
        a.accept = {{0, 0}, {1, 0}};
    } else {
        a.tau = 2;
        a.delta = [width](int symbol, const Multiset& m) {
            const int h = symbol / width + 1, bits = symbol % width;
            if (m[kBad] > 0) return kBad;
            if (h == 1) return m[kOk] <= 1 ? kOk : kBad;
            if (h == 2) return (bits == 1 && m[kOk] == 0) ? kOk : kBad;
            return kBad;
        };
        a.accept = {{0, 0}, {1, 0}, {2, 0}};
    }
    return a;
}

namespace {

using nlohmann::json;

int state_index(const std::map<std::string, int>& ids, const json& j) {
    if (!j.is_string()) throw ConfigurationError("state names must be strings");
    auto it = ids.find(j.get<std::string>());
    if (it == ids.end()) throw ConfigurationError("unknown state '" + j.get<std::string>() + "'");
    return it->second;
}

Multiset parse_multiset(const std::map<std::string, int>& ids, const json& j, int num_states, int tau) {
    if (!j.is_array()) throw ConfigurationError("a multiset is a list of state names");
    std::vector<int> states;
    for (const json& s : j) states.push_back(state_index(ids, s));
    return multiset_of(states, num_states, tau);
}

int parse_symbol(const json& j, int d, int alphabet) {
    int s = 0;
    if (j.is_number_integer()) s = j.get<int>();
    else if (j.is_string()) s = parse_default_symbol(d, j.get<std::string>());
    else throw ConfigurationError("a symbol is an integer or a name 'h:bits'");
    if (s < 0 || s >= alphabet) throw ConfigurationError("symbol " + std::to_string(s) + " is outside the alphabet");
    return s;
}

json multiset_json(const ThresholdAutomaton& a, const Multiset& m) {
    json out = json::array();
    for (int q = 0; q < a.num_states(); ++q)
        for (int k = 0; k < m[static_cast<std::size_t>(q)]; ++k) out.push_back(a.states[static_cast<std::size_t>(q)]);
    return out;
}

}  // namespace

ThresholdAutomaton automaton_from_json(const std::string& text, int d) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigurationError(std::string("automaton file is not JSON: ") + e.what());
    }
    try {
        ThresholdAutomaton a;
        if (!j.contains("states") || !j["states"].is_array() || j["states"].empty())
            throw ConfigurationError("'states' must be a nonempty list");
        std::map<std::string, int> ids;
        for (const json& s : j["states"]) {
            if (!s.is_string()) throw ConfigurationError("state names must be strings");
            if (!ids.emplace(s.get<std::string>(), static_cast<int>(ids.size())).second)
                throw ConfigurationError("duplicate state '" + s.get<std::string>() + "'");
            a.states.push_back(s.get<std::string>());
        }
        if (!j.contains("tau") || !j["tau"].is_number_integer() || j["tau"].get<int>() < 0)
            throw ConfigurationError("'tau' must be a nonnegative integer");
        a.tau = j["tau"].get<int>();
        a.alphabet_size = d * (1 << d);
        if (j.contains("alphabet")) {
            if (!j["alphabet"].is_number_integer() || j["alphabet"].get<int>() <= 0)
                throw ConfigurationError("'alphabet' must be a positive integer");
            a.alphabet_size = j["alphabet"].get<int>();
        }
        const int nq = a.num_states();
        multiset_count(nq, a.tau);

        auto table = std::make_shared<std::map<std::pair<int, std::uint64_t>, int>>();
        if (!j.contains("delta") || !j["delta"].is_array()) throw ConfigurationError("'delta' must be a list");
        for (const json& e : j["delta"]) {
            if (!e.is_array() || e.size() != 3) throw ConfigurationError("a transition is [symbol, multiset, state]");
            int sym = parse_symbol(e[0], d, a.alphabet_size);
            std::uint64_t code = multiset_code(parse_multiset(ids, e[1], nq, a.tau), a.tau);
            int to = state_index(ids, e[2]);
            auto [it, fresh] = table->emplace(std::make_pair(sym, code), to);
            if (!fresh && it->second != to)
                throw ConfigurationError("conflicting transitions for symbol " + std::to_string(sym));
        }
        std::optional<int> fallback;
        if (j.contains("default")) fallback = state_index(ids, j["default"]);
        const int tau = a.tau;
        a.delta = [table, fallback, tau](int symbol, const Multiset& m) {
            auto it = table->find({symbol, multiset_code(m, tau)});
            if (it != table->end()) return it->second;
            if (fallback) return *fallback;
            throw ConfigurationError("no transition for symbol " + std::to_string(symbol));
        };
        if (!j.contains("accept") || !j["accept"].is_array()) throw ConfigurationError("'accept' must be a list");
        for (const json& m : j["accept"]) a.accept.insert(parse_multiset(ids, m, nq, a.tau));
        return a;
    } catch (const json::exception& e) {
        throw ConfigurationError(std::string("malformed automaton: ") + e.what());
    } catch (const ContractViolation& e) {
        throw ConfigurationError(std::string("malformed automaton: ") + e.what());
    }
}

ThresholdAutomaton load_automaton_file(const std::string& path, int d) {
    std::ifstream in(path);
    if (!in) throw ConfigurationError("cannot open automaton file " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return automaton_from_json(ss.str(), d);
}

std::string automaton_to_json(const ThresholdAutomaton& a, int d) {
    const bool named = d >= 1 && d <= 20 && a.alphabet_size == d * (1 << d);
    json j;
    j["states"] = a.states;
    j["tau"] = a.tau;
    j["alphabet"] = a.alphabet_size;
    j["delta"] = json::array();
    std::vector<Multiset> multis = all_multisets(a.num_states(), a.tau);
    for (int s = 0; s < a.alphabet_size; ++s) {
        for (const Multiset& m : multis) {
            int q = 0;
            try {
                q = a.step(s, m);
            } catch (const ConfigurationError&) {
                continue;
            }
            json sym = named ? json(default_symbol_name(d, s)) : json(s);
            j["delta"].push_back(json::array({sym, multiset_json(a, m), a.states[static_cast<std::size_t>(q)]}));
        }
    }
    j["accept"] = json::array();
    for (const Multiset& m : a.accept) j["accept"].push_back(multiset_json(a, m));
    return j.dump(2);
}

RunResult run_automaton(const ThresholdAutomaton& a, const TreedepthDecomposition& f, const std::vector<int>& labels) {
    const int n = static_cast<int>(f.parent.size());
    if (static_cast<int>(labels.size()) != n) throw ContractViolation("labels must be indexed by vertex");
    std::vector<int> order, depth(static_cast<std::size_t>(n), 0);
    for (int v = 0; v < n; ++v)
        if (f.contains(v)) {
            order.push_back(v);
            depth[static_cast<std::size_t>(v)] = f.depth_of(v);
        }
    std::stable_sort(order.begin(), order.end(), [&](int x, int y) {
        return depth[static_cast<std::size_t>(x)] > depth[static_cast<std::size_t>(y)];
    });
    std::vector<std::vector<int>> child_states(static_cast<std::size_t>(n));
    std::vector<int> root_states;
    RunResult res;
    res.run.assign(static_cast<std::size_t>(n), -1);
    for (int v : order) {
        int q = a.step(labels[static_cast<std::size_t>(v)],
                       multiset_of(child_states[static_cast<std::size_t>(v)], a.num_states(), a.tau));
        res.run[static_cast<std::size_t>(v)] = q;
        int p = f.parent[static_cast<std::size_t>(v)];
        if (p == kRoot) root_states.push_back(q);
        else child_states[static_cast<std::size_t>(p)].push_back(q);
    }
    res.roots = multiset_of(root_states, a.num_states(), a.tau);
    res.accepted = a.accepts(res.roots);
    return res;
}

// --- solver ----------------------------------------------------------------------

int closure_size_bound(int d, int num_states, int tau) {
    if (d < 1) throw ContractViolation("d must be positive");
    const long long qt = static_cast<long long>(num_states) * tau;
    const long long cap = 1'000'000;
    // |C(u)| <= sum_{i=0}^{d-j} (|Q| tau)^i for u at depth j; the closure of v
    // is the union of C(u) over the ancestors of v.
    long long total = 0;
    for (int j = 1; j <= d; ++j) {
        long long pw = 1, sum = 0;
        for (int i = 0; i <= d - j; ++i) {
            sum = std::min(cap, sum + pw);
            pw = std::min(cap, pw * std::max<long long>(qt, 1));
        }
        total = std::min(cap, total + sum);
    }
    long long stated = static_cast<long long>(d) * d;
    for (int i = 0; i + 1 < d; ++i) stated = std::min(cap, stated * std::max<long long>(qt, 1));
    return static_cast<int>(std::min(total, stated));
}

namespace {

struct Partial {
    VertexSet A, X;
    std::vector<int> parent, depth, state, label;
    std::vector<Multiset> Mu;
    Multiset M;
};

struct Outcome {
    Weight gain = 0;
    VertexSet added;
    std::vector<std::pair<int, int>> placements;  // (vertex, parent)
};

struct KeyHash {
    std::size_t operator()(const std::vector<std::uint64_t>& k) const {
        std::uint64_t h = 1469598103934665603ULL;
        for (std::uint64_t x : k) {
            h ^= x + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
            h *= 1099511628211ULL;
        }
        return static_cast<std::size_t>(h);
    }
};

int level_of(int size) { return std::bit_width(static_cast<unsigned>(size)); }

// Multisets M with delta(symbol, M) in an allowed state mask, and whether a
// capped multiset can still grow into one of them.
struct Targets {
    std::vector<char> ok, ext;
};

class Engine {
public:
    Engine(const Graph& g, const ThresholdAutomaton& a, const Labeller& lab, const TdSolveOptions& o)
        : g_(g), a_(a), lab_(lab), o_(o), nq_(a.num_states()), tau_(a.tau),
          count_(multiset_count(a.num_states(), a.tau)), bound_(closure_size_bound(o.d, nq_, tau_)),
          start_(std::chrono::steady_clock::now()) {
        stats_.closure_bound = bound_;
        base_.assign(static_cast<std::size_t>(nq_), 1);
        for (int q = 1; q < nq_; ++q) base_[static_cast<std::size_t>(q)] = base_[static_cast<std::size_t>(q - 1)] * static_cast<std::uint64_t>(tau_ + 1);
    }

    TdResult run() {
        const int n = g_.n();
        TdResult res;
        res.found = false;
        std::optional<Outcome> best;
        Partial w;
        w.parent.assign(static_cast<std::size_t>(n), kNoVertex);
        w.depth.assign(static_cast<std::size_t>(n), 0);
        w.state.assign(static_cast<std::size_t>(n), -1);
        w.label.assign(static_cast<std::size_t>(n), -1);
        w.Mu.assign(static_cast<std::size_t>(n), Multiset{});

        for (const Multiset& m : a_.accept) {
            w.M = m;
            Multiset need = m;
            choose_roots(w, 0, need, [&] {
                ++stats_.top_level_candidates;
                if (o_.validate) check_partial(w);
                Partial p = w;
                Outcome out;
                out.added = p.A;
                for (int v : p.A) {
                    out.gain = add_weight(out.gain, g_.weight(v));
                    out.placements.emplace_back(v, p.parent[static_cast<std::size_t>(v)]);
                }
                VertexSet rest = g_.all() - p.A;
                cleanup(p, rest);
                if (o_.validate) check_partial(p);
                descend(p, rest - p.X, 0, -1, false, out);
                if (!best || out.gain > best->gain || (out.gain == best->gain && preferred_on_tie(out.added, best->added)))
                    best = std::move(out);
            });
        }
        stats_.elapsed_ms = elapsed_ms();
        if (!best) {
            res.stats = stats_;
            return res;
        }
        res.found = true;
        res.forest = TreedepthDecomposition::empty(n);
        for (auto [v, p] : best->placements) res.forest.parent[static_cast<std::size_t>(v)] = p;
        res.S = res.forest.vertices();
        res.weight = g_.weight_of(res.S);
        if (res.S != best->added || res.weight != best->gain)
            throw InvariantFailure("assembled solution does not match its recorded gain");
        if (!is_treedepth_decomposition(g_, res.forest) || res.forest.depth() > o_.d)
            throw InvariantFailure("output forest is not a treedepth decomposition of depth <= d");
        if (!run_automaton(a_, res.forest, label_forest(g_, res.forest, lab_)).accepted)
            throw InvariantFailure("the automaton rejects the output");
        res.stats = stats_;
        return res;
    }

private:
    double elapsed_ms() const {
        return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start_).count();
    }

    void tick() {
        if (stats_.calls + stats_.placements > o_.node_budget)
            throw BudgetExceeded("node budget of " + std::to_string(o_.node_budget) + " exceeded");
        if (((stats_.calls + stats_.placements) & 255) == 0 && elapsed_ms() > o_.time_budget_s * 1000)
            throw BudgetExceeded("time budget of " + std::to_string(o_.time_budget_s) + " s exceeded");
    }

    std::uint64_t code(const Multiset& m) const { return multiset_code(m, tau_); }

    const Targets& targets(int symbol, std::uint32_t allowed) {
        auto key = (static_cast<std::uint64_t>(symbol) << 32) | allowed;
        auto it = targets_.find(key);
        if (it != targets_.end()) return it->second;
        Targets t;
        t.ok.assign(count_, 0);
        t.ext.assign(count_, 0);
        for (std::uint64_t c = 0; c < count_; ++c) {
            try {
                int q = a_.step(symbol, decode_multiset(c, nq_, tau_));
                t.ok[c] = (allowed >> q) & 1U;
            } catch (const ConfigurationError&) {
                // undefined transitions are never used by the search
            }
        }
        for (std::uint64_t c = count_; c-- > 0;) {
            if (t.ok[c]) {
                t.ext[c] = 1;
                continue;
            }
            Multiset m = decode_multiset(c, nq_, tau_);
            for (int q = 0; q < nq_ && !t.ext[c]; ++q)
                if (m[static_cast<std::size_t>(q)] < tau_ && t.ext[c + base_[static_cast<std::size_t>(q)]]) t.ext[c] = 1;
        }
        return targets_.emplace(key, std::move(t)).first->second;
    }

    // Grows the subtree of u below the ancestors `anc`. When `path` is set, u
    // lies on the way to `target`: its first child is the next vertex on that
    // way and is exempt from the per-state limit. `done` receives the state of
    // u with the subtree in place.
    void grow(Partial& w, int u, std::vector<int>& anc, const VertexSet& ancset, const VertexSet& domain,
              std::uint32_t allowed, int target, int& placed, const std::function<void(int)>& done) {
        ++stats_.placements;
        tick();
        const int h = static_cast<int>(anc.size()) + 1;
        if (allowed == 0 || h > o_.d || placed >= bound_) return;
        if (!domain.contains(u) || w.A.contains(u) || !(g_.nbr(u) & w.A).subset_of(ancset)) return;
        const bool on_path = target >= 0 && u != target;
        if (on_path && h == o_.d) return;

        const auto uz = static_cast<std::size_t>(u);
        anc.push_back(u);
        int symbol = lab_.label(g_, anc);
        anc.pop_back();
        const Targets& tg = targets(symbol, allowed);
        if (!tg.ext[0]) return;

        w.A.insert(u);
        w.parent[uz] = anc.empty() ? kRoot : anc.back();
        w.depth[uz] = h;
        w.label[uz] = symbol;
        ++placed;

        Multiset cnt(static_cast<std::size_t>(nq_), 0), extra(static_cast<std::size_t>(nq_), 0);
        VertexSet below = ancset;
        below.insert(u);

        std::function<void(int)> more = [&](int min_id) {
            if (tg.ok[code(cnt)]) {
                w.Mu[uz] = cnt;
                int q = a_.step(symbol, cnt);
                w.state[uz] = q;
                done(q);
                w.state[uz] = -1;
            }
            if (h == o_.d) return;
            std::uint32_t child_allowed = 0;
            for (int q = 0; q < nq_; ++q) {
                const auto qz = static_cast<std::size_t>(q);
                if (extra[qz] >= tau_) continue;
                std::uint64_t c = code(cnt) + (cnt[qz] < tau_ ? base_[qz] : 0);
                if (tg.ext[c]) child_allowed |= 1U << q;
            }
            if (child_allowed == 0) return;
            VertexSet cand = domain - w.A;
            anc.push_back(u);
            for (int x = cand.next(min_id - 1); x >= 0; x = cand.next(x)) {
                grow(w, x, anc, below, domain, child_allowed, -1, placed, [&](int q) {
                    const auto qz = static_cast<std::size_t>(q);
                    int before = cnt[qz];
                    cnt[qz] = std::min(tau_, cnt[qz] + 1);
                    ++extra[qz];
                    anc.pop_back();
                    more(x + 1);
                    anc.push_back(u);
                    --extra[qz];
                    cnt[qz] = before;
                });
            }
            anc.pop_back();
        };

        if (on_path) {
            std::uint32_t child_allowed = 0;
            for (int q = 0; q < nq_; ++q) {
                const auto qz = static_cast<std::size_t>(q);
                std::uint64_t c = cnt[qz] < tau_ ? base_[qz] : 0;
                if (tg.ext[c]) child_allowed |= 1U << q;
            }
            VertexSet cand = domain - w.A;
            anc.push_back(u);
            for (int x : cand) {
                grow(w, x, anc, below, domain, child_allowed, target, placed, [&](int q) {
                    const auto qz = static_cast<std::size_t>(q);
                    cnt[qz] = std::min(tau_, 1);
                    anc.pop_back();
                    more(0);
                    anc.push_back(u);
                    cnt[qz] = 0;
                });
            }
            anc.pop_back();
        } else {
            more(0);
        }

        --placed;
        w.A.erase(u);
        w.parent[uz] = kNoVertex;
        w.depth[uz] = 0;
        w.label[uz] = -1;
        w.Mu[uz].clear();
    }

    void choose_roots(Partial& w, int min_id, Multiset& need, const std::function<void()>& done) {
        std::uint32_t allowed = 0;
        for (int q = 0; q < nq_; ++q)
            if (need[static_cast<std::size_t>(q)] > 0) allowed |= 1U << q;
        if (allowed == 0) {
            done();
            return;
        }
        VertexSet cand = g_.all() - w.A;
        std::vector<int> anc;
        for (int r = cand.next(min_id - 1); r >= 0; r = cand.next(r)) {
            int placed = 0;
            grow(w, r, anc, VertexSet{}, g_.all(), allowed, -1, placed, [&](int q) {
                --need[static_cast<std::size_t>(q)];
                choose_roots(w, r + 1, need, done);
                ++need[static_cast<std::size_t>(q)];
            });
        }
    }

    // Moves to X every vertex of s whose A-neighbors contain a depth-d vertex
    // or two vertices that are not in ancestor-descendant relation.
    void cleanup(Partial& p, const VertexSet& s) {
        for (int x : s) {
            VertexSet nb = g_.nbr(x) & p.A;
            if (nb.empty()) continue;
            int deepest = -1;
            for (int y : nb)
                if (deepest < 0 || p.depth[static_cast<std::size_t>(y)] > p.depth[static_cast<std::size_t>(deepest)]) deepest = y;
            bool bad = p.depth[static_cast<std::size_t>(deepest)] == o_.d;
            for (int y : nb) {
                if (bad) break;
                bool anc = false;
                for (int z = deepest; z >= 0; z = p.parent[static_cast<std::size_t>(z)])
                    if (z == y) anc = true;
                if (!anc) bad = true;
            }
            if (bad) {
                p.X.insert(x);
                ++stats_.cleaned;
            }
        }
    }

    int cap_of(const Partial& p, int x) const {
        int c = 0;
        for (int y : g_.nbr(x) & p.A) c = std::max(c, p.depth[static_cast<std::size_t>(y)]);
        return c;
    }

    PotentialTerms beta(const Partial& p, const VertexSet& dset) {
        std::vector<std::uint64_t> cost(static_cast<std::size_t>(g_.n()), 0);
        for (int x : dset) cost[static_cast<std::size_t>(x)] = static_cast<std::uint64_t>(o_.d + 1 - cap_of(p, x));
        return potential_terms(path_buckets(g_, dset, o_.t).index, cost, false);
    }

    int pivot(const VertexSet& dset) {
        if (dset.size() == 1) return dset.first();
        auto it = pivots_.find(dset);
        if (it != pivots_.end()) return it->second;
        PathBuckets pb = path_buckets(g_, dset, o_.t);
        const auto tt = static_cast<std::uint64_t>(2 * o_.t);
        HeavyRule rule{Rational(1, tt), false, Rational(1, tt), true};
        std::optional<int> v = heavy_vertex(g_, pb.index, rule);
        if (!v) throw StructuralViolation("no 1/(2t)-heavy vertex in G[D]; the graph is not P_t-free", dset.to_vector());
        pivots_.emplace(dset, *v);
        return *v;
    }

    std::vector<std::uint64_t> memo_key(const Partial& p, const VertexSet& dset) const {
        std::vector<std::uint64_t> key{dset.word(0), dset.word(1), code(p.M)};
        for (int a : open_neighborhood(g_, dset) & p.A) {
            std::vector<int> chain;
            for (int z = a; z >= 0; z = p.parent[static_cast<std::size_t>(z)]) chain.push_back(z);
            key.push_back(chain.size());
            for (int z : chain) key.push_back(static_cast<std::uint64_t>(z));
            key.push_back(code(p.Mu[static_cast<std::size_t>(a)]));
        }
        return key;
    }

    // Recursive calls on every component of G[rest], merged into out.
    void descend(const Partial& p, const VertexSet& rest, int success_run, int level, bool from_success,
                 Outcome& out, const PotentialTerms* parent_terms = nullptr) {
        for (const VertexSet& comp : connected_components(g_, rest)) {
            int run = 0;
            if (level_of(comp.size()) == level) {
                run = success_run + (from_success ? 1 : 0);
                if (from_success && parent_terms) {
                    ++stats_.potential_checks;
                    PotentialTerms child = beta(p, comp);
                    PotentialComparison cmp = compare_potentials(*parent_terms, child);
                    if (!cmp.non_increasing || (!cmp.strict && child.keys.size() >= parent_terms->keys.size()))
                        throw InvariantFailure("potential did not decrease across a same-level success edge");
                }
            }
            stats_.max_success_per_path = std::max(stats_.max_success_per_path, run);
            Outcome sub = call(p, comp, run);
            out.gain = add_weight(out.gain, sub.gain);
            out.added |= sub.added;
            out.placements.insert(out.placements.end(), sub.placements.begin(), sub.placements.end());
        }
    }

    Outcome call(const Partial& p, const VertexSet& dset, int success_run) {
        ++stats_.calls;
        tick();
        std::vector<std::uint64_t> key;
        if (o_.memoize) {
            key = memo_key(p, dset);
            auto it = memo_.find(key);
            if (it != memo_.end()) {
                ++stats_.memo_hits;
                return it->second;
            }
        }
        const int level = level_of(dset.size());
        const int v = pivot(dset);
        std::optional<PotentialTerms> terms;
        if (o_.validate && level > 1) terms = beta(p, dset);

        Outcome best;
        {
            ++stats_.failure_children;
            Partial f = p;
            f.X.insert(v);
            VertexSet rest = dset - f.X;
            if (o_.validate) check_partial(f);
            descend(f, rest, success_run, level, false, best);
        }

        Partial w = p;
        std::vector<int> attach{kRoot};
        for (int a : open_neighborhood(g_, dset) & p.A)
            if (p.depth[static_cast<std::size_t>(a)] < o_.d) attach.push_back(a);
        for (int a : attach) {
            const Multiset& room = a == kRoot ? p.M : p.Mu[static_cast<std::size_t>(a)];
            std::uint32_t allowed = 0;
            for (int q = 0; q < nq_; ++q)
                if (room[static_cast<std::size_t>(q)] == tau_) allowed |= 1U << q;
            if (allowed == 0) continue;
            std::vector<int> anc;
            for (int z = a; z >= 0; z = p.parent[static_cast<std::size_t>(z)]) anc.push_back(z);
            std::reverse(anc.begin(), anc.end());
            VertexSet ancset = VertexSet::from_range(anc.begin(), anc.end());
            for (int top : dset) {
                int placed = 0;
                grow(w, top, anc, ancset, dset, allowed, v, placed, [&](int) {
                    ++stats_.success_children;
                    Partial s = w;
                    VertexSet gamma = s.A - p.A;
                    Outcome out;
                    out.added = gamma;
                    for (int x : gamma) {
                        out.gain = add_weight(out.gain, g_.weight(x));
                        out.placements.emplace_back(x, s.parent[static_cast<std::size_t>(x)]);
                    }
                    VertexSet rest = dset - s.A;
                    cleanup(s, rest);
                    if (o_.validate) check_partial(s);
                    descend(s, rest - s.X, success_run, level, true, out, terms ? &*terms : nullptr);
                    if (out.gain > best.gain || (out.gain == best.gain && preferred_on_tie(out.added, best.added)))
                        best = std::move(out);
                });
            }
        }
        if (o_.memoize) memo_.emplace(std::move(key), best);
        return best;
    }

    // The three multiset equations, the forest conditions and disjointness.
    void check_partial(const Partial& p) {
        ++stats_.invariant_checks;
        if (p.A.intersects(p.X)) throw InvariantFailure("A and X overlap");
        if (!a_.accepts(p.M)) throw InvariantFailure("root multiset guess is not accepting");
        TreedepthDecomposition f = TreedepthDecomposition::empty(g_.n());
        for (int u : p.A) f.parent[static_cast<std::size_t>(u)] = p.parent[static_cast<std::size_t>(u)];
        if (!is_treedepth_decomposition(g_, f) || f.depth() > o_.d)
            throw InvariantFailure("partial forest is not a treedepth decomposition of depth <= d");
        std::vector<std::vector<int>> kids(static_cast<std::size_t>(g_.n()));
        std::vector<int> roots;
        for (int u : p.A) {
            const auto uz = static_cast<std::size_t>(u);
            if (p.depth[uz] != f.depth_of(u)) throw InvariantFailure("stale depth");
            if (p.label[uz] != lab_.label(g_, f.path_to(u))) throw InvariantFailure("stale label");
            if (p.state[uz] != a_.step(p.label[uz], p.Mu[uz])) throw InvariantFailure("state differs from its transition");
            int par = p.parent[uz];
            if (par == kRoot) roots.push_back(p.state[uz]);
            else kids[static_cast<std::size_t>(par)].push_back(p.state[uz]);
        }
        if (multiset_of(roots, nq_, tau_) != p.M) throw InvariantFailure("root states do not match M");
        for (int u : p.A)
            if (multiset_of(kids[static_cast<std::size_t>(u)], nq_, tau_) != p.Mu[static_cast<std::size_t>(u)])
                throw InvariantFailure("children states of " + std::to_string(u) + " do not match M_u");
    }

    const Graph& g_;
    const ThresholdAutomaton& a_;
    const Labeller& lab_;
    const TdSolveOptions& o_;
    const int nq_;
    const int tau_;
    const std::uint64_t count_;
    const int bound_;
    std::vector<std::uint64_t> base_;
    std::chrono::steady_clock::time_point start_;
    TdStats stats_;
    std::unordered_map<std::uint64_t, Targets> targets_;
    std::unordered_map<VertexSet, int> pivots_;
    std::unordered_map<std::vector<std::uint64_t>, Outcome, KeyHash> memo_;
};

}  // namespace

TdResult solve_td_automaton(const Graph& g, const ThresholdAutomaton& a, const Labeller& lab,
                            const TdSolveOptions& opts) {
    if (!g.has_masks()) throw ContractViolation("graph too large for vertex masks");
    if (opts.d < 1) throw ContractViolation("d must be positive");
    if (opts.t < 2) throw ContractViolation("P_t-free mode needs t >= 2");
    if (a.num_states() < 1 || a.num_states() > 32) throw ContractViolation("automaton needs 1 to 32 states");
    if (lab.alphabet_size != a.alphabet_size)
        throw ContractViolation("labeller alphabet does not match the automaton alphabet");
    for (const Multiset& m : a.accept)
        if (static_cast<int>(m.size()) != a.num_states() || cap_multiset(m, a.tau) != m)
            throw ConfigurationError("accepting multiset is not a capped multiset over the states");
    if (opts.check_precondition && g.n() <= kPathOracleCap && has_induced_path_with(g, opts.t))
        throw StructuralViolation("input contains an induced path on " + std::to_string(opts.t) + " vertices",
                                  find_induced_path_with(g, opts.t));
    Engine e(g, a, lab, opts);
    return e.run();
}

// --- oracle ----------------------------------------------------------------------

namespace {

struct TdEnumerator {
    const Graph& g;
    TreedepthDecomposition f;
    std::vector<std::tuple<VertexSet, int, int>> stack;  // (component, parent, depth budget)
    const std::function<bool()>& visit;

    // Root choice per component, recursively: exactly the proper decompositions.
    bool go() {
        if (stack.empty()) return visit();
        auto [comp, par, budget] = stack.back();
        stack.pop_back();
        bool stop = false;
        if (budget > 0) {
            for (int r : comp) {
                f.parent[static_cast<std::size_t>(r)] = par;
                std::size_t mark = stack.size();
                VertexSet rest = comp;
                rest.erase(r);
                for (const VertexSet& c : connected_components(g, rest)) stack.emplace_back(c, r, budget - 1);
                stop = go();
                stack.resize(mark);
                f.parent[static_cast<std::size_t>(r)] = kNoVertex;
                if (stop) break;
            }
        }
        stack.emplace_back(comp, par, budget);
        return stop;
    }
};

}  // namespace

TdOracleResult brute_td_automaton(const Graph& g, int d, const ThresholdAutomaton& a, const Labeller& lab) {
    if (g.n() > kTdOracleCap) throw CapExceeded("td-automaton oracle is limited to " + std::to_string(kTdOracleCap) + " vertices");
    if (d < 1) throw ContractViolation("d must be positive");
    TdOracleResult best;
    const std::uint64_t total = std::uint64_t{1} << g.n();
    for (std::uint64_t mask = 0; mask < total; ++mask) {
        VertexSet s = VertexSet::from_words(mask, 0);
        Weight w = g.weight_of(s);
        if (best.found && w <= best.weight) continue;
        std::function<bool()> visit;
        TdEnumerator en{g, TreedepthDecomposition::empty(g.n()), {}, visit};
        visit = [&] {
            if (!run_automaton(a, en.f, label_forest(g, en.f, lab)).accepted) return false;
            best.found = true;
            best.weight = w;
            best.witness = s;
            best.forest = en.f;
            return true;
        };
        for (const VertexSet& c : connected_components(g, s)) en.stack.emplace_back(c, kRoot, d);
        en.go();
    }
    return best;
}

}  // namespace isg
