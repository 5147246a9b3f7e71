#include "isg/blob.hpp"

#include <algorithm>

#include "isg/errors.hpp"

namespace isg {

bool blobs_adjacent(const Graph& g, const VertexSet& a, const VertexSet& b) {
    return a.intersects(b) || open_neighborhood(g, a).intersects(b);
}

BlobGraph blob_graph(const Graph& g, const std::vector<FamilyMember>& family) {
    if (!g.has_masks()) throw ContractViolation("blob_graph requires n <= 128");
    for (std::size_t i = 0; i < family.size(); ++i) {
        const VertexSet& x = family[i].vertices;
        if (x.empty() || !x.subset_of(g.all()) || !is_connected(g, x))
            throw ContractViolation("family member " + std::to_string(i) + " does not induce a connected subgraph");
    }
    const int n = static_cast<int>(family.size());
    std::vector<VertexSet> closed(family.size());
    for (int i = 0; i < n; ++i) closed[i] = closed_neighborhood(g, family[i].vertices);
    std::vector<std::pair<int, int>> edges;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            if (closed[i].intersects(family[j].vertices)) edges.emplace_back(i, j);
    std::vector<Weight> w;
    for (const FamilyMember& m : family) w.push_back(m.weight);
    BlobGraph b;
    b.graph = Graph(n, edges, w);
    b.members = family;
    return b;
}

std::vector<VertexSet> connected_subsets(const Graph& g, int max_size, std::size_t limit) {
    if (!g.has_masks()) throw ContractViolation("connected_subsets requires n <= 128");
    std::vector<VertexSet> out;
    if (max_size <= 0) return out;
    // Each connected set is grown from its smallest vertex; a vertex enters
    // the extension only through the first set member it is adjacent to.
    auto grow = [&](auto&& self, const VertexSet& sub, VertexSet ext, const VertexSet& seen, int root) -> void {
        if (out.size() >= limit) throw BudgetExceeded("more than " + std::to_string(limit) + " connected subsets");
        out.push_back(sub);
        if (sub.size() == max_size) return;
        while (ext.any()) {
            int w = ext.first();
            ext.erase(w);
            VertexSet fresh = g.nbr(w) - seen;
            VertexSet above;
            for (int u : fresh)
                if (u > root) above.insert(u);
            VertexSet s2 = sub;
            s2.insert(w);
            self(self, s2, ext | above, seen | above, root);
        }
    };
    for (int v = 0; v < g.n(); ++v) {
        VertexSet ext;
        for (int u : g.nbr(v))
            if (u > v) ext.insert(u);
        grow(grow, VertexSet::single(v), ext, g.closed_nbr(v), v);
    }
    std::sort(out.begin(), out.end(), [](const VertexSet& a, const VertexSet& b) {
        if (a.size() != b.size()) return a.size() < b.size();
        return a < b;
    });
    return out;
}

std::vector<FamilyMember> singleton_family(const Graph& g) {
    std::vector<FamilyMember> f;
    for (int v = 0; v < g.n(); ++v) f.push_back({VertexSet::single(v), g.weight(v)});
    return f;
}

std::vector<FamilyMember> induced_cycle_family(const Graph& g) {
    if (!g.has_masks()) throw ContractViolation("induced_cycle_family requires n <= 128");
    std::vector<VertexSet> cycles;
    // Induced paths s, p1, ..., pk over vertices above s; closing back to s
    // gives an induced cycle, counted once by requiring p1 < pk.
    std::vector<int> path;
    auto extend = [&](auto&& self, int s, const VertexSet& on, const VertexSet& blocked) -> void {
        int last = path.back();
        for (int v : g.nbr(last) - blocked) {
            if (v <= s) continue;
            bool closes = g.adjacent(v, s);
            if (closes) {
                if (path.size() >= 2 && path[1] < v) {
                    VertexSet c = on;
                    c.insert(v);
                    cycles.push_back(c);
                }
                continue;
            }
            // v must see only `last` among the path vertices.
            if ((g.nbr(v) & on).size() != 1) continue;
            path.push_back(v);
            VertexSet on2 = on;
            on2.insert(v);
            self(self, s, on2, blocked | g.closed_nbr(last));
            path.pop_back();
        }
    };
    for (int s = 0; s < g.n(); ++s) {
        for (int p1 : g.nbr(s)) {
            if (p1 <= s) continue;
            path = {s, p1};
            VertexSet on{s, p1};
            extend(extend, s, on, on);
        }
    }
    std::sort(cycles.begin(), cycles.end(), [](const VertexSet& a, const VertexSet& b) {
        if (a.size() != b.size()) return a.size() < b.size();
        return a < b;
    });
    std::vector<FamilyMember> f;
    for (const VertexSet& c : cycles) f.push_back({c, 1});
    return f;
}

std::vector<FamilyMember> connected_family(const Graph& g, int c) {
    std::vector<FamilyMember> f;
    for (const VertexSet& s : connected_subsets(g, c)) f.push_back({s, static_cast<Weight>(s.size())});
    return f;
}

bool is_induced_packing(const Graph& g, const std::vector<FamilyMember>& family, const std::vector<int>& chosen) {
    VertexSet all;
    std::vector<VertexSet> want;
    for (int i : chosen) {
        if (i < 0 || i >= static_cast<int>(family.size())) return false;
        const VertexSet& x = family[static_cast<std::size_t>(i)].vertices;
        if (x.intersects(all)) return false;
        all |= x;
        want.push_back(x);
    }
    std::vector<VertexSet> got = connected_components(g, all);
    std::sort(want.begin(), want.end());
    std::sort(got.begin(), got.end());
    return want == got;
}

PackingResult solve_max_induced_packing(const Graph& g, const std::vector<FamilyMember>& family, int t, Mode mode,
                                        const SolveOptions& base) {
    if (family.size() > static_cast<std::size_t>(kMaxSetVertices))
        throw ContractViolation("packing families are limited to 128 members");
    BlobGraph b = blob_graph(g, family);
    PackingResult out;
    if (family.empty()) return out;
    SolveOptions o = base;
    o.d = 0;
    o.t = t;
    o.mode = mode;
    SolveResult r = solve_max_degenerate(b.graph, o);
    out.chosen = r.S.to_vector();
    out.weight = r.weight;
    out.stats = r.stats;
    if (!is_induced_packing(g, family, out.chosen))
        throw InvariantFailure("packing components do not match the chosen members");
    return out;
}

ClassPredicate edgeless_class() {
    return [](const Graph& h) { return h.m() == 0; };
}

ClassPredicate forest_class() {
    return [](const Graph& h) {
        std::size_t comps = connected_components(h, h.all()).size();
        return h.m() + comps == static_cast<std::size_t>(h.n());
    };
}

ClassPredicate max_degree_class(int k) {
    return [k](const Graph& h) {
        for (int v = 0; v < h.n(); ++v)
            if (h.degree(v) > k) return false;
        return true;
    };
}

VertexSet approx_largest_induced_class(const Graph& g, double eps, const ClassPredicate& member, int c, int t,
                                       Mode mode, const SolveOptions& base) {
    if (!(eps > 0 && eps < 1)) throw ContractViolation("eps must lie in (0, 1)");
    if (c < 1) throw ContractViolation("c must be positive");
    std::vector<FamilyMember> family;
    for (const VertexSet& s : connected_subsets(g, c))
        if (member(induced_subgraph(g, s).graph)) family.push_back({s, static_cast<Weight>(s.size())});
    PackingResult p = solve_max_induced_packing(g, family, t, mode, base);
    VertexSet x;
    for (int i : p.chosen) x |= family[static_cast<std::size_t>(i)].vertices;
    for (const VertexSet& comp : connected_components(g, x))
        if (!member(induced_subgraph(g, comp).graph))
            throw InvariantFailure("a component of the packing falls outside the class");
    return x;
}

}  // namespace isg
