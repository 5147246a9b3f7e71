#include "isg/oracle.hpp"

#include <chrono>
#include <functional>

namespace isg {

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

bool better(Weight w, const VertexSet& s, Weight best_w, const VertexSet& best) {
    return w > best_w || (w == best_w && preferred_on_tie(s, best));
}

void require_cap(const Graph& g, int cap, const char* what) {
    if (g.n() > cap)
        throw CapExceeded(std::string(what) + ": n = " + std::to_string(g.n()) + " exceeds cap " +
                          std::to_string(cap));
}

}  // namespace

OracleResult brute_mwis(const Graph& g) {
    require_cap(g, kMwisOracleCap, "brute_mwis");
    auto t0 = Clock::now();
    OracleResult best;
    // Plain include/exclude recursion on the smallest undecided vertex.
    std::function<void(VertexSet, VertexSet, Weight)> rec = [&](VertexSet cand, VertexSet chosen, Weight w) {
        if (cand.empty()) {
            if (better(w, chosen, best.weight, best.witness)) {
                best.weight = w;
                best.witness = chosen;
            }
            return;
        }
        int v = cand.first();
        VertexSet with = chosen;
        with.insert(v);
        rec(cand - g.closed_nbr(v), with, add_weight(w, g.weight(v)));
        cand.erase(v);
        rec(cand, chosen, w);
    };
    rec(g.all(), VertexSet{}, 0);
    best.elapsed_ms = ms_since(t0);
    return best;
}

DegenerateOracleResult brute_max_degenerate(const Graph& g, int d) {
    require_cap(g, kDegenerateOracleCap, "brute_max_degenerate");
    if (d < 0) throw ContractViolation("d must be nonnegative");
    auto t0 = Clock::now();
    DegenerateOracleResult best;
    const std::uint64_t total = std::uint64_t{1} << g.n();
    for (std::uint64_t mask = 0; mask < total; ++mask) {
        VertexSet s = VertexSet::from_words(mask, 0);
        Weight w = g.weight_of(s);
        if (!better(w, s, best.weight, best.witness) && mask != 0) continue;
        if (degeneracy(g, s) > d) continue;
        best.weight = w;
        best.witness = s;
    }
    best.ordering = greedy_degeneracy_ordering(g, best.witness).ordering;
    best.elapsed_ms = ms_since(t0);
    return best;
}

namespace {

// Depth-first search over induced paths. `blocked` holds the closed
// neighborhoods of all path vertices except the last one; a vertex may extend
// the path iff it neighbors the last vertex and is not blocked.
struct PathSearch {
    const Graph& g;
    int stop_at;  // stop once a path with this many vertices is found (0 = never)
    int best = 0;
    std::vector<int> path, best_path;

    bool rec(int last, const VertexSet& blocked) {
        if (static_cast<int>(path.size()) > best) {
            best = static_cast<int>(path.size());
            best_path = path;
            if (stop_at > 0 && best >= stop_at) return true;
        }
        VertexSet next_blocked = blocked | g.closed_nbr(last);
        for (int x : g.nbr(last) - blocked) {
            path.push_back(x);
            bool done = rec(x, next_blocked);
            path.pop_back();
            if (done) return true;
        }
        return false;
    }

    void run() {
        for (int s = 0; s < g.n(); ++s) {
            path = {s};
            if (rec(s, VertexSet{})) return;
        }
    }
};

// Induced cycles are searched from their smallest vertex s: grow an induced
// path s, v2, ..., vk through vertices larger than s; a new vertex adjacent
// to s closes the cycle and cannot be extended further.
struct CycleSearch {
    const Graph& g;
    int longer_than;  // stop once a cycle with more than this many vertices is found (-1 = never)
    int best = 0;
    std::vector<int> path, best_cycle;

    // `blocked` holds vertices up to s and the closed neighborhoods of the
    // path vertices other than s and `last`.
    bool rec(int s, int last, const VertexSet& blocked) {
        VertexSet next_blocked = blocked;
        if (last != s) next_blocked |= g.closed_nbr(last);
        for (int x : g.nbr(last) - blocked) {
            if (path.size() >= 2 && g.adjacent(x, s)) {
                if (static_cast<int>(path.size()) + 1 > best) {
                    best = static_cast<int>(path.size()) + 1;
                    best_cycle = path;
                    best_cycle.push_back(x);
                }
                if (longer_than >= 0 && best > longer_than) return true;
                continue;
            }
            path.push_back(x);
            bool done = rec(s, x, next_blocked);
            path.pop_back();
            if (done) return true;
        }
        return false;
    }

    void run() {
        for (int s = 0; s < g.n(); ++s) {
            path = {s};
            VertexSet blocked = VertexSet::range(s + 1);
            if (rec(s, s, blocked)) return;
        }
    }
};

}  // namespace

int brute_longest_induced_path(const Graph& g, int cap) {
    require_cap(g, cap, "brute_longest_induced_path");
    PathSearch ps{g, 0, 0, {}, {}};
    ps.run();
    return ps.best;
}

int brute_longest_induced_cycle(const Graph& g, int cap) {
    require_cap(g, cap, "brute_longest_induced_cycle");
    CycleSearch cs{g, -1, 0, {}, {}};
    cs.run();
    return cs.best;
}

std::vector<int> find_induced_path_with(const Graph& g, int k) {
    if (!g.has_masks()) throw ContractViolation("induced path search requires n <= 128");
    if (k <= 0) return {};
    PathSearch ps{g, k, 0, {}, {}};
    ps.run();
    return ps.best >= k ? ps.best_path : std::vector<int>{};
}

std::vector<int> find_induced_cycle_longer_than(const Graph& g, int t) {
    if (!g.has_masks()) throw ContractViolation("induced cycle search requires n <= 128");
    CycleSearch cs{g, t, 0, {}, {}};
    cs.run();
    return cs.best > t ? cs.best_cycle : std::vector<int>{};
}

bool has_induced_path_with(const Graph& g, int k) {
    return k <= 0 || !find_induced_path_with(g, k).empty();
}

bool has_induced_cycle_longer_than(const Graph& g, int t) {
    return !find_induced_cycle_longer_than(g, t).empty();
}

bool is_pt_free(const Graph& g, int t) { return !has_induced_path_with(g, t); }
bool is_cgt_free(const Graph& g, int t) { return !has_induced_cycle_longer_than(g, t); }

PackingOracleResult brute_max_packing(const Graph& g, const std::vector<VertexSet>& family,
                                      const std::vector<Weight>& weights) {
    const int k = static_cast<int>(family.size());
    if (k > kPackingOracleCap)
        throw CapExceeded("brute_max_packing: |F| = " + std::to_string(k) + " exceeds cap " +
                          std::to_string(kPackingOracleCap));
    if (weights.size() != family.size()) throw ContractViolation("weights length differs from family size");
    for (const auto& member : family)
        if (member.empty() || !is_connected(g, member))
            throw ContractViolation("family member " + member.to_string() + " is not connected");
    std::vector<std::uint32_t> conflict(k, 0);
    for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j)
            if (i != j && closed_neighborhood(g, family[i]).intersects(family[j])) conflict[i] |= 1U << j;
    PackingOracleResult best;
    VertexSet best_idx;
    for (std::uint32_t mask = 0; mask < (1U << k); ++mask) {
        Weight w = 0;
        bool ok = true;
        for (int i = 0; i < k && ok; ++i) {
            if (!((mask >> i) & 1U)) continue;
            if (conflict[i] & mask) ok = false;
            else w = add_weight(w, weights[i]);
        }
        if (!ok) continue;
        VertexSet idx = VertexSet::from_words(mask, 0);
        if (mask == 0 || better(w, idx, best.weight, best_idx)) {
            best.weight = w;
            best_idx = idx;
        }
    }
    best.chosen = best_idx.to_vector();
    return best;
}

}  // namespace isg
