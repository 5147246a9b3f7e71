#include "isg/branching.hpp"

#include <algorithm>
#include <boost/multiprecision/cpp_int.hpp>
#include <chrono>
#include <limits>
#include <string>
#include <unordered_map>

#include "isg/errors.hpp"
#include "isg/oracle.hpp"
#include "isg/separators.hpp"

namespace isg {

Mode parse_mode(const std::string& s) {
    if (s == "pt" || s == "pt-free") return Mode::PtFree;
    if (s == "cgt" || s == "cgt-free") return Mode::CgtFree;
    throw ContractViolation("unknown mode: " + s);
}

std::string mode_name(Mode m) { return m == Mode::PtFree ? "pt" : "cgt"; }

// --- levels ----------------------------------------------------------------

LevelTable::LevelTable(int n) {
    using boost::multiprecision::cpp_int;
    root_ = isg::root_level(n);
    cpp_int p100 = 1, p99 = 1;
    for (int l = 0; l <= root_; ++l) {
        cpp_int c = (p100 - 1) / p99;
        cap_.push_back(c > cpp_int(std::numeric_limits<long long>::max()) ? std::numeric_limits<long long>::max()
                                                                           : static_cast<long long>(c));
        p100 *= 100;
        p99 *= 99;
    }
}

long long LevelTable::capacity(int level) const {
    if (level < 0) return 0;
    if (level >= static_cast<int>(cap_.size())) return std::numeric_limits<long long>::max();
    return cap_[static_cast<std::size_t>(level)];
}

int root_level(int n) {
    using boost::multiprecision::cpp_int;
    cpp_int p100 = 1, p99 = 1;
    int l = 0;
    while (p100 < cpp_int(n + 1) * p99) {
        p100 *= 100;
        p99 *= 99;
        ++l;
    }
    return l;
}

// --- subproblems -------------------------------------------------------------

Subproblem Subproblem::root(const Graph& g) {
    Subproblem r;
    r.W = g.all();
    r.level = root_level(g.n());
    r.eta.assign(static_cast<std::size_t>(g.n()), 0);
    r.zeta.assign(static_cast<std::size_t>(g.n()), 1);
    return r;
}

int quota(const Graph& g, const std::vector<int>& eta, int v, int p, int d) {
    int earlier = 0;
    for (int u : g.neighbors(v))
        if (eta[static_cast<std::size_t>(u)] > 0 && eta[static_cast<std::size_t>(u)] < p) ++earlier;
    return d - earlier;
}

Offending find_offending(const Graph& g, const Subproblem& r, int d) {
    Offending out;
    for (int v : r.A) {
        int ev = r.eta[static_cast<std::size_t>(v)];
        int count = 0;
        for (int u : g.neighbors(v)) {
            if (r.A.contains(u) && r.eta[static_cast<std::size_t>(u)] < ev) ++count;
            else if (r.W.contains(u) && r.zeta[static_cast<std::size_t>(u)] <= ev) ++count;
        }
        if (count > d) out.in_a.insert(v);
    }
    for (int v : r.W) {
        int z = r.zeta[static_cast<std::size_t>(v)];
        if (z > g.n() || quota(g, r.eta, v, z, d) < 0) out.in_w.insert(v);
    }
    return out;
}

bool is_clean(const Graph& g, const Subproblem& r, int d) {
    Offending o = find_offending(g, r, d);
    return o.in_a.empty() && o.in_w.empty();
}

std::optional<Subproblem> filter_step(const Graph& g, const Subproblem& r, int d) {
    Offending o = find_offending(g, r, d);
    if (o.in_a.any()) return std::nullopt;
    if (o.in_w.empty()) return r;
    return delete_vertices(r, o.in_w);
}

namespace {

std::vector<VertexSet> components_by_size(const Graph& g, const VertexSet& w) {
    std::vector<VertexSet> comps = connected_components(g, w);
    std::stable_sort(comps.begin(), comps.end(),
                     [](const VertexSet& a, const VertexSet& b) { return a.size() > b.size(); });
    return comps;
}

}  // namespace

bool is_splittable(const Graph& g, const Subproblem& r, const LevelTable& levels) {
    if (r.level < 1) return false;
    long long cap = levels.capacity(r.level - 1);
    for (const VertexSet& c : connected_components(g, r.W))
        if (c.size() > cap) return false;
    return true;
}

std::vector<Subproblem> split_subproblem(const Graph& g, const Subproblem& r, const LevelTable& levels) {
    if (!is_splittable(g, r, levels)) throw ContractViolation("split_subproblem: subproblem is not splittable");
    long long cap = levels.capacity(r.level - 1);
    std::vector<VertexSet> comps = components_by_size(g, r.W);
    VertexSet first;
    long long sum = 0;
    std::size_t j = 0;
    while (j < comps.size() && sum + comps[j].size() <= cap) {
        sum += comps[j].size();
        first |= comps[j];
        ++j;
    }
    std::vector<VertexSet> parts{first};
    if (j < comps.size()) parts.push_back(r.W - first);
    std::sort(parts.begin(), parts.end(), [](const VertexSet& a, const VertexSet& b) { return a.first() < b.first(); });
    std::vector<Subproblem> out;
    for (const VertexSet& p : parts) {
        Subproblem c = r;
        c.level = r.level - 1;
        c.W = p;
        for (int v : r.W - p) c.zeta[static_cast<std::size_t>(v)] = 0;
        out.push_back(std::move(c));
    }
    return out;
}

Subproblem delete_vertices(const Subproblem& r, const VertexSet& z) {
    if (!z.subset_of(r.W)) throw ContractViolation("delete_vertices: Z is not a subset of W");
    Subproblem out = r;
    out.X |= z;
    out.W -= z;
    for (int v : z) out.zeta[static_cast<std::size_t>(v)] = 0;
    return out;
}

Subproblem take_vertices(const Graph& g, const Subproblem& r, const VertexSet& z,
                         const std::vector<std::pair<int, int>>& positions, const std::vector<LeftNeighbors>& left,
                         int d) {
    if (!z.subset_of(r.W)) throw ContractViolation("take_vertices: Z is not a subset of W");
    std::vector<int> eta = r.eta;
    VertexSet placed;
    for (auto [v, p] : positions) {
        if (!z.contains(v)) throw ContractViolation("take_vertices: position given for a vertex outside Z");
        if (placed.contains(v)) throw ContractViolation("take_vertices: duplicate position for a vertex");
        if (p < 1 || p > g.n()) throw ContractViolation("take_vertices: position outside [1, n]");
        if (p < r.zeta[static_cast<std::size_t>(v)])
            throw ContractViolation("take_vertices: position below the lower bound zeta");
        placed.insert(v);
        eta[static_cast<std::size_t>(v)] = p;
    }
    if (placed != z) throw ContractViolation("take_vertices: positions do not cover Z");
    VertexSet a2 = r.A | z;
    for (int v : z)
        for (int u : g.neighbors(v))
            if (a2.contains(u) && eta[static_cast<std::size_t>(u)] == eta[static_cast<std::size_t>(v)])
                throw ContractViolation("take_vertices: position guess is not edge-injective");
    std::vector<VertexSet> du(static_cast<std::size_t>(g.n()));
    VertexSet seen;
    for (const LeftNeighbors& ln : left) {
        if (!z.contains(ln.u)) throw ContractViolation("take_vertices: left neighbors given for a vertex outside Z");
        if (seen.contains(ln.u)) throw ContractViolation("take_vertices: duplicate left neighbor set");
        if (!ln.du.subset_of(r.W - z)) throw ContractViolation("take_vertices: left neighbors outside W \\ Z");
        if (ln.du.size() > quota(g, eta, ln.u, eta[static_cast<std::size_t>(ln.u)], d))
            throw ContractViolation("take_vertices: left neighbor set exceeds the quota");
        seen.insert(ln.u);
        du[static_cast<std::size_t>(ln.u)] = ln.du;
    }
    Subproblem out = r;
    out.A = a2;
    out.W = r.W - z;
    out.eta = std::move(eta);
    for (int v : z) {
        out.zeta[static_cast<std::size_t>(v)] = 0;
        int bound = 1 + out.eta[static_cast<std::size_t>(v)];
        for (int w : g.neighbors(v)) {
            if (!out.W.contains(w) || du[static_cast<std::size_t>(v)].contains(w)) continue;
            int& zw = out.zeta[static_cast<std::size_t>(w)];
            zw = std::max(zw, bound);
        }
    }
    return out;
}

// --- branch tuples -----------------------------------------------------------

namespace {

// Subsets of `items` (sorted) with at most k elements, in ascending bitmask
// order: the empty set, then the subsets whose highest item is items[0],
// then items[1], and so on.
template <class F>
bool for_small_subsets(const std::vector<int>& items, int k, F&& f) {
    if (k < 0) return true;
    auto rec = [&](auto&& self, std::size_t below, int room, const VertexSet& base) -> bool {
        if (!f(base)) return false;
        if (room == 0) return true;
        for (std::size_t h = 0; h < below; ++h) {
            VertexSet s = base;
            s.insert(items[h]);
            if (!self(self, h, room - 1, s)) return false;
        }
        return true;
    };
    return rec(rec, items.size(), k, VertexSet{});
}

}  // namespace

void enumerate_branch_tuples(const Graph& g, const Subproblem& r, int pivot, int d, LeftGuessDomain domain,
                             PositionDomain positions, const std::function<bool(const BranchTuple&)>& visit) {
    if (!r.W.contains(pivot)) throw ContractViolation("enumerate_branch_tuples: pivot is not active");
    const int n = g.n();
    const bool tight = positions == PositionDomain::Tight;
    int dmax = quota(g, r.eta, pivot, r.zeta[static_cast<std::size_t>(pivot)], d);
    std::vector<int> nbrs = (g.nbr(pivot) & r.W).to_vector();

    for_small_subsets(nbrs, dmax, [&](const VertexSet& dset) {
        VertexSet dprime = dset;
        dprime.insert(pivot);
        std::vector<int> dp = dprime.to_vector();
        std::vector<int> eta = r.eta;
        std::vector<std::pair<int, int>> pos(dp.size());

        // Whether u sits right after its latest earlier neighbor in A + D'.
        auto is_tight = [&](int u) {
            int eu = eta[static_cast<std::size_t>(u)];
            int latest = 0;
            for (int v : g.nbr(u) & (r.A | dprime)) {
                int ev = eta[static_cast<std::size_t>(v)];
                if (ev < eu) latest = std::max(latest, ev);
            }
            return eu == latest + 1;
        };

        // Left-neighbor sets over dp in vertex order, the last varying fastest.
        std::function<bool(std::size_t, std::vector<LeftNeighbors>&)> lefts =
            [&](std::size_t i, std::vector<LeftNeighbors>& acc) -> bool {
            if (i == dp.size()) {
                BranchTuple tup{dset, pos, acc};
                return visit(tup);
            }
            int u = dp[i];
            int eu = eta[static_cast<std::size_t>(u)];
            int cap = quota(g, eta, u, eu, d);
            if (cap < 0) return true;
            if (u == pivot) {
                if (tight && !is_tight(u)) return true;
                acc.push_back({u, VertexSet{}});
                bool ok = lefts(i + 1, acc);
                acc.pop_back();
                return ok;
            }
            VertexSet pool = r.W - dprime;
            if (domain == LeftGuessDomain::NeighborsOnly) pool &= g.nbr(u);
            if (tight)
                for (int w : pool)
                    if (r.zeta[static_cast<std::size_t>(w)] >= eu) pool.erase(w);
            bool u_tight = !tight || is_tight(u);
            return for_small_subsets(pool.to_vector(), cap, [&](const VertexSet& du) {
                if (du.empty() && !u_tight) return true;
                acc.push_back({u, du});
                bool ok = lefts(i + 1, acc);
                acc.pop_back();
                return ok;
            });
        };

        std::function<bool(std::size_t)> place = [&](std::size_t i) -> bool {
            if (i == dp.size()) {
                std::vector<LeftNeighbors> acc;
                return lefts(0, acc);
            }
            int u = dp[i];
            for (int p = std::max(1, r.zeta[static_cast<std::size_t>(u)]); p <= n; ++p) {
                bool clash = false;
                for (int v : g.neighbors(u))
                    if (eta[static_cast<std::size_t>(v)] == p && (r.A.contains(v) || dprime.contains(v))) {
                        clash = true;
                        break;
                    }
                if (clash) continue;
                eta[static_cast<std::size_t>(u)] = p;
                pos[i] = {u, p};
                bool ok = place(i + 1);
                eta[static_cast<std::size_t>(u)] = 0;
                if (!ok) return false;
            }
            return true;
        };
        return place(0);
    });
}

std::vector<BranchTuple> branch_tuples(const Graph& g, const Subproblem& r, int pivot, int d, LeftGuessDomain domain,
                                       PositionDomain positions) {
    std::vector<BranchTuple> out;
    enumerate_branch_tuples(g, r, pivot, d, domain, positions, [&](const BranchTuple& t) {
        out.push_back(t);
        return true;
    });
    return out;
}

std::vector<int> tight_relabel(const Graph& g, const VertexSet& s, const std::vector<int>& eta) {
    std::vector<int> order = s.to_vector();
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        return std::pair(eta[static_cast<std::size_t>(a)], a) < std::pair(eta[static_cast<std::size_t>(b)], b);
    });
    std::vector<int> out(static_cast<std::size_t>(g.n()), 0);
    for (int v : order) {
        int latest = 0;
        for (int u : g.nbr(v) & s)
            if (eta[static_cast<std::size_t>(u)] < eta[static_cast<std::size_t>(v)])
                latest = std::max(latest, out[static_cast<std::size_t>(u)]);
        out[static_cast<std::size_t>(v)] = latest + 1;
    }
    return out;
}

// --- strategies --------------------------------------------------------------

Strategy::Strategy(const Graph& g, Mode mode, int t, const LevelTable& levels, SecondaryConfig secondary,
                   bool check_link_lengths)
    : g_(g), mode_(mode), t_(t), levels_(levels), secondary_(secondary), check_link_lengths_(check_link_lengths) {}

Rational Strategy::primary_eps() const {
    if (secondary_.primary_eps) return *secondary_.primary_eps;
    return Rational(1, 100'000'000ULL * static_cast<std::uint64_t>(t_));
}

namespace {

bool relaxed(const SecondaryConfig& c) {
    return c.force_secondary || c.distance_factor != 8 || c.primary_eps.has_value();
}

}  // namespace

std::optional<int> Strategy::pt_pivot(const VertexSet& w) {
    auto it = pivot_cache_.find(w);
    if (it != pivot_cache_.end()) return it->second;
    PathBuckets pb = path_buckets(g_, w, t_);
    std::optional<int> p = heavy_vertex(g_, Rational(1, 3 * static_cast<std::uint64_t>(t_)), pb);
    pivot_cache_.emplace(w, p);
    return p;
}

std::optional<int> Strategy::tripod_pivot(const VertexSet& w, bool best_effort) {
    auto& cache = best_effort ? best_effort_cache_ : pivot_cache_;
    auto it = cache.find(w);
    if (it != cache.end()) return it->second;
    TripodBuckets tb = tripod_buckets(g_, w, t_);
    std::optional<int> p;
    HeavyRule rule = tripod_heavy_rule(primary_eps());
    if (!best_effort) {
        p = heavy_vertex(g_, tb.index, rule);
    } else {
        HeavyScores sc = score_heavy(g_, tb.index, rule);
        std::uint64_t best = 0;
        for (int v : w)
            if (!p || sc.qualifying[static_cast<std::size_t>(v)] > best) {
                p = v;
                best = sc.qualifying[static_cast<std::size_t>(v)];
            }
    }
    cache.emplace(w, p);
    return p;
}

std::optional<SecondaryContext> Strategy::establish(const VertexSet& w) {
    std::vector<VertexSet> comps = components_by_size(g_, w);
    if (comps.empty()) return std::nullopt;
    SecondaryContext ctx;
    ctx.C1 = comps.front();
    const VertexSet& c1 = ctx.C1;
    VertexSet x = connected_balanced_separator(g_, t_, c1, c1).X;
    const int threshold = secondary_.distance_factor * t_;
    for (;;) {
        ctx.K = closed_neighborhood(g_, x) & c1;
        std::optional<VertexSet> c2;
        for (const VertexSet& c : components_by_size(g_, c1 - ctx.K))
            if (10 * c.size() >= 4 * c1.size()) {
                c2 = c;
                break;
            }
        if (!c2) return std::nullopt;
        ctx.C2 = *c2;
        ctx.Y = connected_balanced_separator(g_, t_, ctx.C2, ctx.C2).X;
        ctx.L = closed_neighborhood(g_, ctx.Y) & ctx.C2;
        std::vector<int> path = shortest_path_between(g_, c1, x, ctx.Y);
        if (path.empty()) return std::nullopt;
        if (static_cast<int>(path.size()) - 1 > threshold) break;
        VertexSet grown = x | ctx.Y | VertexSet::from_range(path.begin(), path.end());
        if (grown == x) return std::nullopt;
        x = grown;
    }
    ctx.X = x;
    std::optional<VertexSet> d0;
    for (const VertexSet& dcomp : connected_components(g_, ctx.C2 - ctx.L)) {
        if (!open_neighborhood(g_, dcomp).intersects(ctx.K)) continue;
        if (d0) return std::nullopt;
        d0 = dcomp;
    }
    if (!d0) return std::nullopt;
    ctx.D0 = *d0;
    ctx.B = ctx.C2 - ctx.D0;
    return ctx;
}

Action Strategy::secondary_action(const Subproblem& r, int context) {
    const SecondaryContext& ctx = contexts_[static_cast<std::size_t>(context)];
    Action a;
    a.kind = ActionKind::Branch;
    a.context = context;
    auto fail = [&](const std::string& msg) -> Action {
        if (!relaxed(secondary_)) throw StructuralViolation("secondary strategy: " + msg);
        ++fallbacks_;
        Action f;
        f.kind = ActionKind::Branch;
        f.pivot = *tripod_pivot(r.W, true);
        f.source = PivotSource::Fallback;
        return f;
    };
    std::optional<VertexSet> chip;
    try {
        chip = find_chip(g_, r.W, ctx.C2, ctx.B, ctx.K);
    } catch (const StructuralViolation& e) {
        if (!relaxed(secondary_)) throw;
        return fail(e.what());
    }
    if (!chip) return fail("no chip in a subproblem that is not splittable");
    VertexSet boundary = open_neighborhood(g_, *chip) & r.W;
    if (boundary.size() == 1) {
        a.pivot = boundary.first();
        a.source = PivotSource::ChipNeighbor;
        return a;
    }
    if (boundary.empty()) return fail("chip without neighbors");
    try {
        LinkBuckets lb = c_link_buckets(g_, r.W, *chip, t_, check_link_lengths_);
        a.pivot = secondary_heavy_vertex(g_, lb, t_);
    } catch (const StructuralViolation& e) {
        if (!relaxed(secondary_)) throw;
        return fail(e.what());
    }
    a.source = PivotSource::SecondaryHeavy;
    return a;
}

Action Strategy::choose(const Subproblem& r, int context) {
    Action a;
    if (r.level == 0) {
        a.kind = ActionKind::Leaf;
        return a;
    }
    bool splittable = is_splittable(g_, r, levels_);
    if (context >= 0) {
        if (!splittable) return secondary_action(r, context);
        a.exited_secondary = true;
    }
    if (splittable) {
        a.kind = ActionKind::Split;
        return a;
    }
    a.kind = ActionKind::Branch;
    if (mode_ == Mode::PtFree) {
        if (auto p = pt_pivot(r.W)) {
            a.pivot = *p;
            a.source = PivotSource::PathHeavy;
        } else if (r.W.size() == 1) {
            a.pivot = r.W.first();
            a.source = PivotSource::SingleVertex;
        } else {
            throw StructuralViolation("no 1/(3t)-heavy vertex in G[W]; the graph is not P_t-free",
                                      r.W.to_vector());
        }
        return a;
    }
    if (!secondary_.force_secondary) {
        if (auto p = tripod_pivot(r.W, false)) {
            a.pivot = *p;
            a.source = PivotSource::TripodHeavy;
            return a;
        }
    }
    std::optional<SecondaryContext> ctx = establish(r.W);
    if (!ctx) {
        if (!relaxed(secondary_))
            throw StructuralViolation("no primary heavy vertex and no secondary context; the graph is not C_{>t}-free",
                                      r.W.to_vector());
        ++fallbacks_;
        a.pivot = *tripod_pivot(r.W, true);
        a.source = PivotSource::Fallback;
        return a;
    }
    contexts_.push_back(*ctx);
    Action s = secondary_action(r, static_cast<int>(contexts_.size()) - 1);
    s.entered_secondary = s.source != PivotSource::Fallback;
    if (!s.entered_secondary) s.context = -1;
    return s;
}

Action choose_action_pt(const Graph& g, const Subproblem& r, int t) {
    LevelTable levels(g.n());
    Strategy s(g, Mode::PtFree, t, levels);
    return s.choose(r, -1);
}

Action choose_action_cgt(const Graph& g, const Subproblem& r, int t, const SecondaryConfig& cfg) {
    LevelTable levels(g.n());
    Strategy s(g, Mode::CgtFree, t, levels, cfg);
    return s.choose(r, -1);
}

// --- potentials --------------------------------------------------------------

std::vector<std::uint64_t> potential_costs(const Graph& g, const Subproblem& r, int d) {
    std::vector<std::uint64_t> cost(static_cast<std::size_t>(g.n()), 0);
    for (int u : r.W) {
        int q = quota(g, r.eta, u, r.zeta[static_cast<std::size_t>(u)], d);
        cost[static_cast<std::size_t>(u)] = q < -1 ? 0 : static_cast<std::uint64_t>(1 + q);
    }
    return cost;
}

PotentialTerms potential_mu(const Graph& g, const Subproblem& r, const BucketIndex& index, int d) {
    return potential_terms(index, potential_costs(g, r, d), true);
}

PotentialTerms potential_mu(const Graph& g, const Subproblem& r, int d, Mode mode, int t) {
    if (mode == Mode::PtFree) return potential_mu(g, r, path_buckets(g, r.W, t).index, d);
    return potential_mu(g, r, tripod_buckets(g, r.W, t).index, d);
}

// --- solver ------------------------------------------------------------------

namespace {

std::uint64_t sat_add(std::uint64_t a, std::uint64_t b) {
    return a > std::numeric_limits<std::uint64_t>::max() - b ? std::numeric_limits<std::uint64_t>::max() : a + b;
}

}  // namespace

std::uint64_t NodeCounts::total() const { return sat_add(sat_add(sat_add(sat_add(leaf, filter), split), branch), free); }

NodeCounts& NodeCounts::operator+=(const NodeCounts& o) {
    leaf = sat_add(leaf, o.leaf);
    filter = sat_add(filter, o.filter);
    split = sat_add(split, o.split);
    branch = sat_add(branch, o.branch);
    free = sat_add(free, o.free);
    return *this;
}

namespace {

// Best complete extension of a subproblem, relative to its A.
struct Outcome {
    VertexSet added;
    std::vector<std::pair<int, int>> positions;  // over `added`
    Weight weight = 0;
    int max_success = 0;
    int max_split = 0;
    NodeCounts tree;
};

class Engine {
public:
    Engine(const Graph& g, const SolveOptions& o)
        : g_(g),
          o_(o),
          levels_(g.n()),
          strategy_(g, o.mode, o.t, levels_, o.secondary, o.validate),
          start_(std::chrono::steady_clock::now()) {
        stats_.root_level = levels_.root_level();
    }

    Outcome run(const Subproblem& root) {
        Outcome out = normal(root, -1);
        finish_stats();
        stats_.tree = out.tree;
        stats_.max_success_per_path = out.max_success;
        stats_.max_split_per_path = out.max_split;
        return out;
    }

    SolveStats& stats() { return stats_; }

    void finish_stats() {
        stats_.elapsed_ms =
            std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start_).count();
        stats_.memo_entries = memo_.size();
        stats_.secondary_fallbacks = strategy_.secondary_fallbacks();
    }

private:
    void tick() {
        if (stats_.explored.total() > o_.node_budget) {
            finish_stats();
            throw SolveBudgetExceeded("node budget of " + std::to_string(o_.node_budget) + " exceeded", stats_);
        }
        if ((++ticks_ & 255U) == 0) {
            double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
            if (secs > o_.time_budget_s) {
                finish_stats();
                throw SolveBudgetExceeded("time budget of " + std::to_string(o_.time_budget_s) + " s exceeded",
                                          stats_);
            }
        }
    }

    // Everything the subtree below a clean node depends on: level, active
    // set, lower bounds on W, the positions and earlier-neighbor counts of the
    // A-vertices adjacent to W, and the strategy context.
    std::string memo_key(const Subproblem& r, int ctx) const {
        std::string k;
        auto put = [&](std::uint32_t v) { k.append(reinterpret_cast<const char*>(&v), sizeof v); };
        put(static_cast<std::uint32_t>(r.level));
        put(static_cast<std::uint32_t>(ctx + 1));
        for (int i = 0; i < 2; ++i) {
            std::uint64_t wd = r.W.word(i);
            k.append(reinterpret_cast<const char*>(&wd), sizeof wd);
        }
        for (int w : r.W) k.push_back(static_cast<char>(r.zeta[static_cast<std::size_t>(w)]));
        for (int a : open_neighborhood(g_, r.W) & r.A) {
            int ea = r.eta[static_cast<std::size_t>(a)];
            int c = 0;
            for (int u : g_.neighbors(a))
                if (r.A.contains(u) && r.eta[static_cast<std::size_t>(u)] < ea) ++c;
            k.push_back(static_cast<char>(a));
            k.push_back(static_cast<char>(ea));
            k.push_back(static_cast<char>(c));
        }
        return k;
    }

    void check_recomposition(const Subproblem& r, const Outcome& out) {
        Subproblem full = r;
        full.A |= out.added;
        for (auto [v, p] : out.positions) full.eta[static_cast<std::size_t>(v)] = p;
        full.W = VertexSet{};
        full.level = 0;
        ++stats_.split_recompositions_checked;
        if (find_offending(g_, full, o_.d).in_a.any())
            throw InvariantFailure("split recomposition is not clean at a level-" + std::to_string(r.level) +
                                   " split node");
    }

    void check_potential(const Subproblem& parent, const Subproblem& child, bool success) {
        if (!potential_active_) return;
        PotentialTerms mp = potential_mu(g_, parent, o_.d, o_.mode, o_.t);
        PotentialTerms mc = potential_mu(g_, child, o_.d, o_.mode, o_.t);
        ++stats_.potential_checks;
        PotentialComparison cmp = compare_potentials(mp, mc);
        if (!cmp.non_increasing) throw InvariantFailure("potential increased along a same-level edge");
        bool parent_zero = std::all_of(mp.sums.begin(), mp.sums.end(), [](std::uint64_t s) { return s == 0; });
        if (success && !cmp.strict && !parent_zero)
            throw InvariantFailure("potential did not decrease across a success branch");
    }

    Outcome normal(const Subproblem& r, int ctx) {
        std::string key;
        if (o_.memoize) {
            key = memo_key(r, ctx);
            auto it = memo_.find(key);
            if (it != memo_.end()) {
                ++stats_.memo_hits;
                return it->second;
            }
        }
        tick();
        if (r.level >= 1 && r.W.size() <= levels_.capacity(r.level - 1)) return split_chain(r, std::move(key));
        Action a = strategy_.choose(r, ctx);
        Outcome out;
        switch (a.kind) {
            case ActionKind::Leaf:
                ++stats_.explored.leaf;
                out.tree.leaf = 1;
                break;
            case ActionKind::Split: {
                ++stats_.explored.split;
                out.tree.split = 1;
                int split_depth = 0;
                for (const Subproblem& c : split_subproblem(g_, r, levels_)) {
                    tick();
                    ++stats_.explored.free;
                    Outcome co = normal(c, -1);
                    out.added |= co.added;
                    out.positions.insert(out.positions.end(), co.positions.begin(), co.positions.end());
                    out.weight = add_weight(out.weight, co.weight);
                    out.max_success = std::max(out.max_success, co.max_success);
                    split_depth = std::max(split_depth, co.max_split);
                    out.tree += co.tree;
                    ++out.tree.free;
                }
                out.max_split = 1 + split_depth;
                std::sort(out.positions.begin(), out.positions.end());
                if (o_.validate) check_recomposition(r, out);
                break;
            }
            case ActionKind::Branch:
                out = branch(r, a);
                break;
        }
        if (o_.memoize && memo_.size() < kMemoLimit) memo_.emplace(std::move(key), out);
        return out;
    }

    // A split whose parts are all of W has a single child that differs only
    // in the level, so a run of them is walked in one step. The skipped split
    // and free nodes still count towards the tree statistics.
    Outcome split_chain(const Subproblem& r, std::string key) {
        Subproblem c = r;
        int steps = 0;
        while (c.level >= 1 && c.W.size() <= levels_.capacity(c.level - 1)) {
            --c.level;
            ++steps;
        }
        ++stats_.explored.split;
        ++stats_.explored.free;
        stats_.chained_splits += static_cast<std::uint64_t>(steps - 1);
        Outcome out = normal(c, -1);
        out.tree.split = sat_add(out.tree.split, static_cast<std::uint64_t>(steps));
        out.tree.free = sat_add(out.tree.free, static_cast<std::uint64_t>(steps));
        out.max_split += steps;
        if (o_.memoize && memo_.size() < kMemoLimit) memo_.emplace(std::move(key), out);
        return out;
    }

    Outcome branch(const Subproblem& r, const Action& a) {
        ++stats_.explored.branch;
        if (a.entered_secondary) ++stats_.secondary_entries;
        const int nu = a.pivot;
        bool saved_potential = potential_active_;
        potential_active_ = o_.validate_potentials && a.context < 0;

        Subproblem fail_child = delete_vertices(r, VertexSet::single(nu));
        check_potential(r, fail_child, false);
        Outcome best = normal(fail_child, a.context);
        NodeCounts tree = best.tree;
        ++tree.branch;
        int max_success = best.max_success;
        int max_split = best.max_split;

        enumerate_branch_tuples(g_, r, nu, o_.d, o_.left_guess, o_.positions, [&](const BranchTuple& tup) {
            tick();
            ++stats_.explored.filter;
            ++stats_.success_children;
            ++tree.filter;
            VertexSet dprime = tup.D;
            dprime.insert(nu);
            Subproblem z = take_vertices(g_, r, dprime, tup.positions, tup.left, o_.d);
            std::optional<Subproblem> y = filter_step(g_, z, o_.d);
            if (!y) {
                ++stats_.dead_filters;
                max_success = std::max(max_success, 1);
                return true;
            }
            if (o_.validate) check_success_quota(r, *y, nu);
            check_potential(r, *y, true);
            tick();
            ++stats_.explored.free;
            ++tree.free;
            Outcome co = normal(*y, a.context);
            tree += co.tree;
            max_success = std::max(max_success, 1 + co.max_success);
            max_split = std::max(max_split, co.max_split);
            Weight w = add_weight(co.weight, g_.weight_of(dprime));
            VertexSet added = co.added | dprime;
            if (w > best.weight || (w == best.weight && added != best.added && preferred_on_tie(added, best.added))) {
                best.added = added;
                best.weight = w;
                best.positions = co.positions;
                best.positions.insert(best.positions.end(), tup.positions.begin(), tup.positions.end());
                std::sort(best.positions.begin(), best.positions.end());
            }
            return true;
        });
        potential_active_ = saved_potential;
        best.tree = tree;
        best.max_success = max_success;
        best.max_split = max_split;
        return best;
    }

    void check_success_quota(const Subproblem& x, const Subproblem& y, int nu) {
        for (int u : g_.nbr(nu) & y.W) {
            ++stats_.quota_checks;
            int before = quota(g_, x.eta, u, x.zeta[static_cast<std::size_t>(u)], o_.d);
            int after = quota(g_, y.eta, u, y.zeta[static_cast<std::size_t>(u)], o_.d);
            if (after > before - 1)
                throw InvariantFailure("success branch on " + std::to_string(nu) + " did not lower the quota of " +
                                       std::to_string(u));
        }
    }

    static constexpr std::size_t kMemoLimit = 8'000'000;

    const Graph& g_;
    SolveOptions o_;
    LevelTable levels_;
    Strategy strategy_;
    SolveStats stats_;
    std::unordered_map<std::string, Outcome> memo_;
    std::chrono::steady_clock::time_point start_;
    std::uint64_t ticks_ = 0;
    bool potential_active_ = false;
};

void check_precondition(const Graph& g, const SolveOptions& o) {
    if (o.mode == Mode::PtFree) {
        if (o.t < 2) throw ContractViolation("P_t-free mode needs t >= 2");
        if (g.n() <= kPathOracleCap && has_induced_path_with(g, o.t))
            throw StructuralViolation("input contains an induced path on " + std::to_string(o.t) + " vertices",
                                      find_induced_path_with(g, o.t));
    } else {
        if (o.t < 6 || o.t % 2 != 0) throw ContractViolation("C_{>t}-free mode needs an even t >= 6");
        if (g.n() <= kCycleOracleCap && has_induced_cycle_longer_than(g, o.t))
            throw StructuralViolation("input contains an induced cycle longer than " + std::to_string(o.t),
                                      find_induced_cycle_longer_than(g, o.t));
    }
}

}  // namespace

SolveResult solve_max_degenerate(const Graph& g, const SolveOptions& opts) {
    if (!g.has_masks()) throw ContractViolation("the branching solver supports at most 128 vertices");
    if (opts.d < 0) throw ContractViolation("d must be nonnegative");
    if (opts.check_precondition) check_precondition(g, opts);
    Engine engine(g, opts);
    Outcome out = engine.run(Subproblem::root(g));

    SolveResult res;
    res.S = out.added;
    res.weight = out.weight;
    res.eta.assign(static_cast<std::size_t>(g.n()), 0);
    for (auto [v, p] : out.positions) res.eta[static_cast<std::size_t>(v)] = p;
    // Edge-injective positions rank into a permutation with the same
    // earlier-neighbor relation.
    std::vector<std::pair<int, int>> order(out.positions.begin(), out.positions.end());
    std::sort(order.begin(), order.end(), [](auto a, auto b) { return std::tie(a.second, a.first) < std::tie(b.second, b.first); });
    res.ordering.positions.assign(static_cast<std::size_t>(g.n()), 0);
    for (std::size_t i = 0; i < order.size(); ++i)
        res.ordering.positions[static_cast<std::size_t>(order[i].first)] = static_cast<int>(i + 1);
    res.stats = engine.stats();
    if (opts.validate && !validate_degeneracy_ordering(g, res.S, res.ordering, opts.d))
        throw InvariantFailure("returned ordering does not witness d-degeneracy");
    return res;
}

SolveResult solve_max_degenerate(const Graph& g, int d, int t, Mode mode) {
    SolveOptions o;
    o.d = d;
    o.t = t;
    o.mode = mode;
    return solve_max_degenerate(g, o);
}

SolveResult solve_mwis(const Graph& g, int t, Mode mode) { return solve_max_degenerate(g, 0, t, mode); }

}  // namespace isg
