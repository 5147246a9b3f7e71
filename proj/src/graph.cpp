#include "isg/graph.hpp"

#include <algorithm>
#include <fstream>
#include <limits>
#include <queue>
#include <set>
#include <sstream>

#include "isg/oracle.hpp"

namespace isg {

std::string VertexSet::to_string() const {
    std::string s = "{";
    bool first_item = true;
    for (int v : *this) {
        if (!first_item) s += ",";
        s += std::to_string(v);
        first_item = false;
    }
    return s + "}";
}

Weight add_weight(Weight a, Weight b) {
    if (a > std::numeric_limits<Weight>::max() - b) throw std::overflow_error("weight overflow");
    return a + b;
}

Graph::Graph(int n, const std::vector<std::pair<int, int>>& edges, std::vector<Weight> weights)
    : n_(n), adj_(n), weights_(std::move(weights)) {
    if (n < 0 || n > (1 << 16)) throw ContractViolation("vertex count out of range");
    if (weights_.empty()) weights_.assign(n, 1);
    if (static_cast<int>(weights_.size()) != n) throw ContractViolation("weights length differs from n");
    for (auto [u, v] : edges) {
        if (u < 0 || v < 0 || u >= n || v >= n) throw ContractViolation("edge endpoint out of range");
        if (u == v) throw ContractViolation("self-loop");
        adj_[u].push_back(v);
        adj_[v].push_back(u);
    }
    for (auto& a : adj_) {
        std::sort(a.begin(), a.end());
        if (std::adjacent_find(a.begin(), a.end()) != a.end()) throw ContractViolation("duplicate edge");
    }
    m_ = edges.size();
    if (has_masks()) {
        masks_.resize(n);
        for (int v = 0; v < n; ++v)
            for (int u : adj_[v]) masks_[v].insert(u);
    }
}

bool Graph::adjacent(int u, int v) const {
    if (has_masks()) return masks_[u].contains(v);
    return std::binary_search(adj_[u].begin(), adj_[u].end(), v);
}

void Graph::require_masks() const {
    if (!has_masks()) throw ContractViolation("operation requires n <= 128");
}

std::vector<std::pair<int, int>> Graph::edges() const {
    std::vector<std::pair<int, int>> out;
    out.reserve(m_);
    for (int u = 0; u < n_; ++u)
        for (int v : adj_[u])
            if (u < v) out.emplace_back(u, v);
    return out;
}

Weight Graph::weight_of(const VertexSet& s) const {
    Weight total = 0;
    for (int v : s) total = add_weight(total, weights_[v]);
    return total;
}

namespace {

bool parse_int(const std::string& tok, long long& out) {
    if (tok.empty()) return false;
    std::size_t pos = 0;
    try {
        out = std::stoll(tok, &pos);
    } catch (...) {
        return false;
    }
    return pos == tok.size();
}

}  // namespace

Graph parse_graph(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    bool have_header = false, have_weights = false;
    long long n = 0, m = 0;
    std::vector<Weight> weights;
    std::vector<std::pair<int, int>> edges;
    std::set<std::pair<int, int>> seen;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        std::istringstream ls(line);
        std::vector<std::string> tok;
        for (std::string t; ls >> t;) tok.push_back(t);
        if (tok.empty() || tok[0][0] == '#') continue;
        if (!have_header) {
            if (tok.size() != 2 || !parse_int(tok[0], n) || !parse_int(tok[1], m))
                throw ParseError(lineno, "malformed header, expected \"n m\"");
            if (n < 0 || n > (1 << 16)) throw ParseError(lineno, "vertex count out of range");
            if (m < 0) throw ParseError(lineno, "negative edge count");
            have_header = true;
            continue;
        }
        if (tok[0] == "w") {
            if (have_weights) throw ParseError(lineno, "duplicate weight line");
            if (!edges.empty()) throw ParseError(lineno, "weight line after edges");
            if (static_cast<long long>(tok.size()) != n + 1)
                throw ParseError(lineno, "expected " + std::to_string(n) + " weights");
            for (std::size_t i = 1; i < tok.size(); ++i) {
                if (!tok[i].empty() && tok[i][0] == '-') throw ParseError(lineno, "negative weight");
                std::size_t pos = 0;
                unsigned long long w = 0;
                try {
                    w = std::stoull(tok[i], &pos);
                } catch (...) {
                    pos = 0;
                }
                if (pos != tok[i].size() || tok[i].empty()) throw ParseError(lineno, "malformed weight");
                weights.push_back(w);
            }
            have_weights = true;
            continue;
        }
        if (tok[0] == "e") {
            long long u = 0, v = 0;
            if (tok.size() != 3 || !parse_int(tok[1], u) || !parse_int(tok[2], v))
                throw ParseError(lineno, "malformed edge line, expected \"e u v\"");
            if (u < 0 || v < 0 || u >= n || v >= n) throw ParseError(lineno, "edge endpoint out of range");
            if (u == v) throw ParseError(lineno, "self-loop");
            if (u > v) std::swap(u, v);
            if (!seen.insert({int(u), int(v)}).second) throw ParseError(lineno, "duplicate edge");
            edges.emplace_back(int(u), int(v));
            continue;
        }
        throw ParseError(lineno, "unrecognized line");
    }
    if (!have_header) throw ParseError(lineno, "missing header");
    if (static_cast<long long>(edges.size()) != m)
        throw ParseError(lineno, "declared " + std::to_string(m) + " edges, found " + std::to_string(edges.size()));
    return Graph(static_cast<int>(n), edges, weights);
}

std::string serialize_graph(const Graph& g) {
    std::ostringstream out;
    out << g.n() << ' ' << g.m() << '\n';
    bool unit = std::all_of(g.weights().begin(), g.weights().end(), [](Weight w) { return w == 1; });
    if (!unit && g.n() > 0) {
        out << 'w';
        for (Weight w : g.weights()) out << ' ' << w;
        out << '\n';
    }
    for (auto [u, v] : g.edges()) out << "e " << u << ' ' << v << '\n';
    return out.str();
}

Graph read_graph_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_graph(buf.str());
}

void write_graph_file(const Graph& g, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << serialize_graph(g);
}

InducedSubgraph induced_subgraph(const Graph& g, const std::vector<int>& vertices) {
    std::vector<int> index(g.n(), -1);
    InducedSubgraph out;
    out.to_parent = vertices;
    std::sort(out.to_parent.begin(), out.to_parent.end());
    out.to_parent.erase(std::unique(out.to_parent.begin(), out.to_parent.end()), out.to_parent.end());
    std::vector<Weight> w;
    for (std::size_t i = 0; i < out.to_parent.size(); ++i) {
        int v = out.to_parent[i];
        if (v < 0 || v >= g.n()) throw ContractViolation("vertex out of range");
        index[v] = static_cast<int>(i);
        w.push_back(g.weight(v));
    }
    std::vector<std::pair<int, int>> edges;
    for (int v : out.to_parent)
        for (int u : g.neighbors(v))
            if (index[u] >= 0 && v < u) edges.emplace_back(index[v], index[u]);
    out.graph = Graph(static_cast<int>(out.to_parent.size()), edges, w);
    return out;
}

InducedSubgraph induced_subgraph(const Graph& g, const VertexSet& s) {
    if (s.any() && s.last() >= g.n()) throw ContractViolation("vertex out of range");
    return induced_subgraph(g, s.to_vector());
}

VertexSet component_of(const Graph& g, const VertexSet& s, int v) {
    VertexSet comp = VertexSet::single(v);
    VertexSet frontier = comp;
    while (frontier.any()) {
        VertexSet grow;
        for (int u : frontier) grow |= g.nbr(u);
        grow &= s;
        grow -= comp;
        comp |= grow;
        frontier = grow;
    }
    return comp;
}

std::vector<VertexSet> connected_components(const Graph& g, const VertexSet& s) {
    if (s.any() && s.last() >= g.n()) throw ContractViolation("vertex out of range");
    std::vector<VertexSet> out;
    VertexSet rest = s;
    while (rest.any()) {
        VertexSet c = component_of(g, rest, rest.first());
        out.push_back(c);
        rest -= c;
    }
    return out;
}

bool is_connected(const Graph& g, const VertexSet& s) {
    if (s.empty()) return true;
    return component_of(g, s, s.first()) == s;
}

VertexSet open_neighborhood(const Graph& g, const VertexSet& s) {
    VertexSet out;
    for (int v : s) out |= g.nbr(v);
    return out - s;
}

VertexSet closed_neighborhood(const Graph& g, const VertexSet& s) {
    VertexSet out = s;
    for (int v : s) out |= g.nbr(v);
    return out;
}

std::vector<int> shortest_path_between(const Graph& g, const VertexSet& within, const VertexSet& from,
                                       const VertexSet& to) {
    std::vector<int> parent(g.n(), -2);
    std::queue<int> q;
    for (int v : from & within) {
        parent[v] = -1;
        q.push(v);
    }
    while (!q.empty()) {
        int v = q.front();
        q.pop();
        if (to.contains(v)) {
            std::vector<int> path;
            for (int x = v; x != -1; x = parent[x]) path.push_back(x);
            std::reverse(path.begin(), path.end());
            return path;
        }
        for (int u : g.nbr(v) & within) {
            if (parent[u] != -2) continue;
            parent[u] = v;
            q.push(u);
        }
    }
    return {};
}

DegeneracyResult greedy_degeneracy_ordering(const Graph& g) {
    DegeneracyResult r;
    int n = g.n();
    r.ordering.positions.assign(n, 0);
    std::vector<int> deg(n);
    std::set<std::pair<int, int>> queue;
    for (int v = 0; v < n; ++v) {
        deg[v] = g.degree(v);
        queue.insert({deg[v], v});
    }
    std::vector<bool> removed(n, false);
    int next_pos = n;
    while (!queue.empty()) {
        auto [dv, v] = *queue.begin();
        queue.erase(queue.begin());
        r.d = std::max(r.d, dv);
        removed[v] = true;
        r.ordering.positions[v] = next_pos--;
        for (int u : g.neighbors(v)) {
            if (removed[u]) continue;
            queue.erase({deg[u], u});
            --deg[u];
            queue.insert({deg[u], u});
        }
    }
    return r;
}

DegeneracyResult greedy_degeneracy_ordering(const Graph& g, const VertexSet& s) {
    DegeneracyResult r;
    r.ordering.positions.assign(g.n(), 0);
    VertexSet rest = s;
    int next_pos = s.size();
    while (rest.any()) {
        int best = -1, best_deg = kMaxSetVertices + 1;
        for (int v : rest) {
            int dv = (g.nbr(v) & rest).size();
            if (dv < best_deg) {
                best_deg = dv;
                best = v;
            }
        }
        r.d = std::max(r.d, best_deg);
        r.ordering.positions[best] = next_pos--;
        rest.erase(best);
    }
    return r;
}

int degeneracy(const Graph& g, const VertexSet& s) {
    // Peeling without recording the order: any vertex of degree <= d can be
    // removed first, so the greedy min-degree result equals the smallest d
    // for which repeated removal of degree-<=d vertices empties the set.
    VertexSet rest = s;
    int d = 0;
    while (rest.any()) {
        bool progress = false;
        for (int v : rest) {
            if ((g.nbr(v) & rest).size() <= d) {
                rest.erase(v);
                progress = true;
            }
        }
        if (!progress) ++d;
    }
    return d;
}

bool validate_degeneracy_ordering(const Graph& g, const VertexSet& s, const DegeneracyOrdering& eta, int d) {
    if (static_cast<int>(eta.positions.size()) != g.n())
        throw ContractViolation("ordering size differs from vertex count");
    for (int v : s)
        if (eta.positions[v] <= 0) throw ContractViolation("vertex " + std::to_string(v) + " has no position");
    for (int v : s) {
        int earlier = 0;
        for (int u : g.neighbors(v)) {
            if (!s.contains(u)) continue;
            if (eta.positions[u] == eta.positions[v]) return false;
            if (eta.positions[u] < eta.positions[v]) ++earlier;
        }
        if (earlier > d) return false;
    }
    return true;
}

bool validate_degeneracy_ordering(const Graph& g, const DegeneracyOrdering& eta, int d) {
    if (static_cast<int>(eta.positions.size()) != g.n())
        throw ContractViolation("ordering size differs from vertex count");
    for (int v = 0; v < g.n(); ++v) {
        if (eta.positions[v] <= 0) throw ContractViolation("vertex " + std::to_string(v) + " has no position");
        int earlier = 0;
        for (int u : g.neighbors(v)) {
            if (eta.positions[u] == eta.positions[v]) return false;
            if (eta.positions[u] < eta.positions[v]) ++earlier;
        }
        if (earlier > d) return false;
    }
    return true;
}

GenKind parse_gen_kind(const std::string& s) {
    if (s == "random-gnp-rejection") return GenKind::RandomGnpRejection;
    if (s == "random-chordal") return GenKind::RandomChordal;
    if (s == "random-interval") return GenKind::RandomInterval;
    if (s == "path") return GenKind::Path;
    if (s == "cycle") return GenKind::Cycle;
    if (s == "grid") return GenKind::Grid;
    throw ContractViolation("unknown generator kind: " + s);
}

std::string gen_kind_name(GenKind k) {
    switch (k) {
        case GenKind::RandomGnpRejection: return "random-gnp-rejection";
        case GenKind::RandomChordal: return "random-chordal";
        case GenKind::RandomInterval: return "random-interval";
        case GenKind::Path: return "path";
        case GenKind::Cycle: return "cycle";
        case GenKind::Grid: return "grid";
    }
    return "?";
}

namespace {

std::vector<Weight> draw_weights(int n, Weight lo, Weight hi, std::mt19937_64& rng) {
    if (lo > hi) throw ContractViolation("min weight exceeds max weight");
    std::uniform_int_distribution<Weight> dist(lo, hi);
    std::vector<Weight> w(n);
    for (auto& x : w) x = dist(rng);
    return w;
}

bool connected_graph(const Graph& g) {
    if (g.n() == 0) return true;
    std::vector<bool> seen(g.n(), false);
    std::vector<int> stack{0};
    seen[0] = true;
    int count = 1;
    while (!stack.empty()) {
        int v = stack.back();
        stack.pop_back();
        for (int u : g.neighbors(v))
            if (!seen[u]) {
                seen[u] = true;
                ++count;
                stack.push_back(u);
            }
    }
    return count == g.n();
}

Graph random_chordal(const GenParams& p, std::mt19937_64& rng) {
    // Each new vertex is attached to a clique of earlier vertices, so it is
    // simplicial when added and the reverse insertion order is a perfect
    // elimination ordering.
    std::vector<std::pair<int, int>> edges;
    std::vector<std::vector<int>> adj(p.n);
    std::bernoulli_distribution extend(p.p);
    for (int v = 1; v < p.n; ++v) {
        std::uniform_int_distribution<int> pick(0, v - 1);
        int u = pick(rng);
        std::vector<int> clique{u};
        std::vector<int> cand = adj[u];
        std::shuffle(cand.begin(), cand.end(), rng);
        for (int w : cand) {
            bool ok = std::all_of(clique.begin(), clique.end(), [&](int c) {
                return std::find(adj[c].begin(), adj[c].end(), w) != adj[c].end();
            });
            if (ok && extend(rng)) clique.push_back(w);
        }
        for (int c : clique) {
            edges.emplace_back(std::min(c, v), std::max(c, v));
            adj[c].push_back(v);
            adj[v].push_back(c);
        }
    }
    return Graph(p.n, edges);
}

Graph random_interval(const GenParams& p, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> left(0.0, static_cast<double>(p.n));
    std::uniform_real_distribution<double> len(0.5, 0.5 + p.p * p.n);
    std::vector<std::pair<double, double>> iv(p.n);
    for (auto& x : iv) {
        x.first = left(rng);
        x.second = x.first + len(rng);
    }
    std::vector<std::pair<int, int>> edges;
    for (int i = 0; i < p.n; ++i)
        for (int j = i + 1; j < p.n; ++j)
            if (iv[i].first <= iv[j].second && iv[j].first <= iv[i].second) edges.emplace_back(i, j);
    return Graph(p.n, edges);
}

Graph random_gnp(const GenParams& p, std::mt19937_64& rng) {
    std::bernoulli_distribution coin(p.p);
    std::vector<std::pair<int, int>> edges;
    for (int i = 0; i < p.n; ++i)
        for (int j = i + 1; j < p.n; ++j)
            if (coin(rng)) edges.emplace_back(i, j);
    return Graph(p.n, edges);
}

bool satisfies_target(const Graph& g, const GenParams& p) {
    switch (p.target) {
        case Freeness::None: return true;
        case Freeness::PtFree: return !has_induced_path_with(g, p.t);
        case Freeness::CgtFree: return !has_induced_cycle_longer_than(g, p.t);
    }
    return true;
}

}  // namespace

Graph generate_instance(GenKind kind, const GenParams& p, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    if (p.n < 0) throw ContractViolation("n must be nonnegative");
    Graph g;
    switch (kind) {
        case GenKind::Path: {
            std::vector<std::pair<int, int>> e;
            for (int i = 0; i + 1 < p.n; ++i) e.emplace_back(i, i + 1);
            g = Graph(p.n, e);
            break;
        }
        case GenKind::Cycle: {
            if (p.n < 3) throw ContractViolation("cycle needs n >= 3");
            std::vector<std::pair<int, int>> e;
            for (int i = 0; i + 1 < p.n; ++i) e.emplace_back(i, i + 1);
            e.emplace_back(0, p.n - 1);
            g = Graph(p.n, e);
            break;
        }
        case GenKind::Grid: {
            int r = p.rows, c = p.cols;
            if (r <= 0 || c <= 0) throw ContractViolation("grid needs rows and cols");
            std::vector<std::pair<int, int>> e;
            for (int i = 0; i < r; ++i)
                for (int j = 0; j < c; ++j) {
                    int v = i * c + j;
                    if (j + 1 < c) e.emplace_back(v, v + 1);
                    if (i + 1 < r) e.emplace_back(v, v + c);
                }
            g = Graph(r * c, e);
            break;
        }
        case GenKind::RandomChordal:
            g = random_chordal(p, rng);
            break;
        case GenKind::RandomInterval:
        case GenKind::RandomGnpRejection: {
            bool ok = false;
            for (int attempt = 0; attempt < p.max_attempts && !ok; ++attempt) {
                g = kind == GenKind::RandomInterval ? random_interval(p, rng) : random_gnp(p, rng);
                ok = (!p.connected || connected_graph(g)) &&
                     (kind == GenKind::RandomInterval || satisfies_target(g, p));
            }
            if (!ok)
                throw BudgetExceeded("no conforming " + gen_kind_name(kind) + " instance within " +
                                     std::to_string(p.max_attempts) + " attempts");
            break;
        }
    }
    if (p.min_weight != 1 || p.max_weight != 1) {
        auto w = draw_weights(g.n(), p.min_weight, p.max_weight, rng);
        g = Graph(g.n(), g.edges(), w);
    }
    return g;
}

Graph with_random_weights(const Graph& g, Weight lo, Weight hi, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    return Graph(g.n(), g.edges(), draw_weights(g.n(), lo, hi, rng));
}

}  // namespace isg
