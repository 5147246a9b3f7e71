#include "isg/separators.hpp"

#include <algorithm>
#include <functional>
#include <numeric>

namespace isg {

namespace {

// Component of G[s] with the most A-vertices; ties go to the component with
// the smallest vertex because connected_components is ordered that way.
VertexSet heaviest_component(const Graph& g, const VertexSet& s, const VertexSet& a) {
    VertexSet best;
    int best_count = -1;
    for (const auto& c : connected_components(g, s)) {
        int cnt = (c & a).size();
        if (cnt > best_count) {
            best_count = cnt;
            best = c;
        }
    }
    return best;
}

VertexSet window(const std::vector<int>& path, int t) {
    VertexSet x;
    int k = static_cast<int>(path.size());
    for (int i = std::max(0, k - t); i < k; ++i) x.insert(path[i]);
    return x;
}

}  // namespace

bool is_balanced_separator(const Graph& g, const VertexSet& within, const VertexSet& a, const VertexSet& x,
                           int t) {
    if (x.empty() || x.size() > t || !x.subset_of(within) || !is_connected(g, x)) return false;
    VertexSet rest = within - closed_neighborhood(g, x);
    int total = (a & within).size();
    for (const auto& c : connected_components(g, rest))
        if (2 * (c & a).size() > total) return false;
    return true;
}

SeparatorResult connected_balanced_separator(const Graph& g, int t, const VertexSet& a_in,
                                             const VertexSet& within) {
    if (t < 1) throw ContractViolation("t must be positive");
    if (within.empty()) throw ContractViolation("separator of an empty graph");
    if (!is_connected(g, within)) throw ContractViolation("separator requires a connected graph");
    VertexSet a = a_in & within;
    if (a.empty()) throw ContractViolation("A must be a nonempty subset of the graph");

    auto finish = [&](const std::vector<int>& path) {
        SeparatorResult r;
        r.path = path;
        r.X = window(path, t);
        r.closed_nbhd = closed_neighborhood(g, r.X) & within;
        r.components = connected_components(g, within - r.closed_nbhd);
        return r;
    };

    std::vector<int> last_path;
    const int limit = within.size();
    for (int start : within) {
        std::vector<int> path{start};
        VertexSet blocked = g.closed_nbr(start);  // N[v_1 .. v_k]
        VertexSet older;                          // N[v_1 .. v_{k-1}]
        VertexSet active = heaviest_component(g, within - blocked, a);
        for (int iter = 0; iter <= limit; ++iter) {
            if (is_balanced_separator(g, within, a, window(path, t), t)) return finish(path);
            if ((active & a).empty()) break;
            VertexSet cand = (g.nbr(path.back()) & open_neighborhood(g, active) & within) - older;
            if (cand.empty()) break;
            int next = cand.first();
            older = blocked;
            blocked |= g.closed_nbr(next);
            path.push_back(next);
            active = heaviest_component(g, active - g.nbr(next), a);
        }
        last_path = path;
    }
    throw StructuralViolation("connected balanced separator not found (input not C_{>t}-free / P_t-free?)",
                              last_path);
}

SeparatorResult connected_balanced_separator(const Graph& g, int t, const VertexSet& a) {
    return connected_balanced_separator(g, t, a, g.all());
}

std::optional<C3wbsWitness> is_c3wbs(const Graph& g, const VertexSet& x, const VertexSet& within) {
    if (x.empty() || !x.subset_of(within) || !is_connected(g, x))
        throw ContractViolation("is_c3wbs requires G[X] connected and nonempty");
    const int n = within.size();
    VertexSet nx = closed_neighborhood(g, x) & within;
    auto comps = connected_components(g, within - nx);
    std::stable_sort(comps.begin(), comps.end(),
                     [](const VertexSet& p, const VertexSet& q) { return p.size() > q.size(); });
    // Each class needs |N[X]| + (class size) >= 0.1 n, i.e. 10 * (...) >= n.
    auto enough = [&](int class_size) { return 10 * (nx.size() + class_size) >= n; };

    // Greedy grouping from the proof: two minimal prefixes, then the rest.
    {
        std::vector<int> cls(comps.size(), 2);
        std::size_t i = 0;
        int s1 = 0, s2 = 0, s3 = 0;
        while (i < comps.size() && !enough(s1)) {
            s1 += comps[i].size();
            cls[i++] = 0;
        }
        while (i < comps.size() && !enough(s2)) {
            s2 += comps[i].size();
            cls[i++] = 1;
        }
        for (; i < comps.size(); ++i) s3 += comps[i].size();
        if (enough(s1) && enough(s2) && enough(s3)) {
            C3wbsWitness w;
            for (std::size_t j = 0; j < comps.size(); ++j) w.classes[cls[j]].push_back(comps[j]);
            return w;
        }
    }

    // Exact search: items in non-increasing size, symmetric classes pruned by
    // only opening the first still-empty class, and a remaining-mass bound.
    const int need = std::max(0, (n + 9) / 10 - nx.size());
    std::vector<int> suffix(comps.size() + 1, 0);
    for (int j = static_cast<int>(comps.size()) - 1; j >= 0; --j) suffix[j] = suffix[j + 1] + comps[j].size();
    std::vector<int> assign(comps.size(), 0);
    int sums[3] = {0, 0, 0};
    long long nodes = 0;
    const long long node_cap = comps.size() <= 15 ? (1LL << 40) : 2'000'000;
    std::function<bool(std::size_t)> rec = [&](std::size_t j) -> bool {
        if (++nodes > node_cap) return false;
        int deficit = 0;
        for (int c = 0; c < 3; ++c) deficit += std::max(0, need - sums[c]);
        if (deficit == 0) {
            for (std::size_t r = j; r < comps.size(); ++r) assign[r] = 0;
            return true;
        }
        if (j == comps.size() || suffix[j] < deficit) return false;
        bool opened_empty = false;
        for (int c = 0; c < 3; ++c) {
            if (sums[c] == 0) {
                if (opened_empty) continue;
                opened_empty = true;
            }
            assign[j] = c;
            sums[c] += comps[j].size();
            bool ok = rec(j + 1);
            sums[c] -= comps[j].size();
            if (ok) return true;
        }
        return false;
    };
    if (!rec(0)) return std::nullopt;
    C3wbsWitness w;
    for (std::size_t j = 0; j < comps.size(); ++j) w.classes[assign[j]].push_back(comps[j]);
    return w;
}

std::optional<C3wbsWitness> is_c3wbs(const Graph& g, const VertexSet& x) { return is_c3wbs(g, x, g.all()); }

VertexSet low_tw_balanced_separator(const Graph& h, const VertexSet& a_in, int k) {
    if (k < 0 || k > 6) throw CapExceeded("low_tw_balanced_separator: k must be in [0, 6]");
    if (h.n() > 40) throw CapExceeded("low_tw_balanced_separator: n exceeds 40");
    VertexSet all = h.all();
    VertexSet a = a_in & all;
    const int total = a.size();
    auto ok = [&](const VertexSet& x) {
        for (const auto& c : connected_components(h, all - x))
            if (2 * (c & a).size() > total) return false;
        return true;
    };
    std::vector<int> idx;
    for (int size = 0; size <= std::min(k, h.n()); ++size) {
        idx.resize(size);
        std::iota(idx.begin(), idx.end(), 0);
        while (true) {
            VertexSet x = VertexSet::from_range(idx.begin(), idx.end());
            if (ok(x)) return x;
            int i = size - 1;
            while (i >= 0 && idx[i] == h.n() - size + i) --i;
            if (i < 0) break;
            ++idx[i];
            for (int j = i + 1; j < size; ++j) idx[j] = idx[j - 1] + 1;
        }
    }
    throw StructuralViolation("no balanced separator of size <= " + std::to_string(k));
}

}  // namespace isg
