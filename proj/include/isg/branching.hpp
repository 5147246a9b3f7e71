#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "isg/buckets.hpp"
#include "isg/graph.hpp"
#include "isg/rational.hpp"

namespace isg {

enum class Mode { PtFree, CgtFree };
Mode parse_mode(const std::string& s);
std::string mode_name(Mode m);

// --- levels ----------------------------------------------------------------

// Exact level arithmetic for the 0.99 thresholds. capacity(l) is the largest
// size s with s < 0.99^{-l}.
class LevelTable {
public:
    explicit LevelTable(int n);
    int root_level() const { return root_; }
    long long capacity(int level) const;

private:
    int root_;
    std::vector<long long> cap_;
};

// ceil(-log_{0.99}(n + 1)), computed exactly.
int root_level(int n);

// --- subproblems -------------------------------------------------------------

// Positions are 1-based; eta[v] == 0 means v is not in A. zeta is meaningful
// on W only.
struct Subproblem {
    VertexSet A, X, W;
    int level = 0;
    std::vector<int> eta;
    std::vector<int> zeta;

    static Subproblem root(const Graph& g);
    friend bool operator==(const Subproblem&, const Subproblem&) = default;
};

// d - |{u in N(v) with 0 < eta[u] < p}|.
int quota(const Graph& g, const std::vector<int>& eta, int v, int p, int d);

struct Offending {
    VertexSet in_a;
    VertexSet in_w;
};
Offending find_offending(const Graph& g, const Subproblem& r, int d);
bool is_clean(const Graph& g, const Subproblem& r, int d);

// nullopt when an A-vertex offends; otherwise the offending W-vertices are deleted.
std::optional<Subproblem> filter_step(const Graph& g, const Subproblem& r, int d);

bool is_splittable(const Graph& g, const Subproblem& r, const LevelTable& levels);
std::vector<Subproblem> split_subproblem(const Graph& g, const Subproblem& r, const LevelTable& levels);

Subproblem delete_vertices(const Subproblem& r, const VertexSet& z);

struct LeftNeighbors {
    int u;
    VertexSet du;
    friend bool operator==(const LeftNeighbors&, const LeftNeighbors&) = default;
};

// Takes Z at the given positions (pairs (vertex, position), covering Z) with
// the given left neighbor sets. Throws ContractViolation naming the broken
// guess condition.
Subproblem take_vertices(const Graph& g, const Subproblem& r, const VertexSet& z,
                         const std::vector<std::pair<int, int>>& positions, const std::vector<LeftNeighbors>& left,
                         int d);

// --- branch tuples -----------------------------------------------------------

// Left neighbor sets range over all of W \ D' (the definition) or over
// N(u) cap (W \ D'), which yields the same children because D_u only
// matters through N(u) \ D_u.
enum class LeftGuessDomain { AllActive, NeighborsOnly };

// Position guesses range over [zeta, n] (the definition) or, with Tight,
// only over values a tight ordering can take: a vertex with no guessed left
// neighbors sits right after its latest known earlier neighbor (position 1
// when there is none). Every d-degeneracy ordering relabels to a tight one
// with the same order on each edge, so the lucky tuple of the tight
// relabelling is always enumerated. Tight also drops left neighbors w with
// zeta(w) >= eta(u), which can never precede u.
enum class PositionDomain { Full, Tight };

struct BranchTuple {
    VertexSet D;
    std::vector<std::pair<int, int>> positions;  // over D' = D + pivot, by vertex
    std::vector<LeftNeighbors> left;             // over D', by vertex; the pivot's set is empty
};

// Calls visit for every tuple in the deterministic order (D by ascending
// bitmask, positions lexicographically ascending, left sets by ascending
// bitmask); stops early when visit returns false.
void enumerate_branch_tuples(const Graph& g, const Subproblem& r, int pivot, int d, LeftGuessDomain domain,
                             PositionDomain positions, const std::function<bool(const BranchTuple&)>& visit);
std::vector<BranchTuple> branch_tuples(const Graph& g, const Subproblem& r, int pivot, int d,
                                       LeftGuessDomain domain = LeftGuessDomain::NeighborsOnly,
                                       PositionDomain positions = PositionDomain::Full);

// Relabels a degeneracy ordering of G[S] to the tight one with the same
// order on every edge: 1 + the largest label among earlier neighbors.
std::vector<int> tight_relabel(const Graph& g, const VertexSet& s, const std::vector<int>& eta);

// --- strategies --------------------------------------------------------------

struct SecondaryConfig {
    // Primary heaviness threshold for the tripod buckets; nullopt means 10^-8 / t.
    std::optional<Rational> primary_eps;
    // The secondary context requires dist(X, Y) > distance_factor * t.
    int distance_factor = 8;
    // Skip the primary heavy-vertex test (exercises the secondary strategy on
    // small graphs together with a small distance factor).
    bool force_secondary = false;
};

// Fixed sets of one secondary-strategy invocation.
struct SecondaryContext {
    VertexSet X, K, C1, C2, Y, L, D0, B;
};

enum class ActionKind { Leaf, Split, Branch };
enum class PivotSource { None, PathHeavy, SingleVertex, TripodHeavy, ChipNeighbor, SecondaryHeavy, Fallback };

struct Action {
    ActionKind kind = ActionKind::Leaf;
    int pivot = -1;
    PivotSource source = PivotSource::None;
    int context = -1;  // secondary context for the children, -1 when primary
    bool entered_secondary = false;
    bool exited_secondary = false;
};

// Pivot rules for both graph classes, with per-W caches. `context` is the
// secondary context id of the current node (-1 in primary mode).
class Strategy {
public:
    Strategy(const Graph& g, Mode mode, int t, const LevelTable& levels, SecondaryConfig secondary = {},
             bool check_link_lengths = false);

    Action choose(const Subproblem& r, int context);

    const SecondaryContext& context(int id) const { return contexts_[static_cast<std::size_t>(id)]; }
    std::size_t context_count() const { return contexts_.size(); }
    std::uint64_t secondary_fallbacks() const { return fallbacks_; }
    Rational primary_eps() const;

private:
    std::optional<int> pt_pivot(const VertexSet& w);
    std::optional<int> tripod_pivot(const VertexSet& w, bool best_effort);
    std::optional<SecondaryContext> establish(const VertexSet& w);
    Action secondary_action(const Subproblem& r, int context);

    const Graph& g_;
    Mode mode_;
    int t_;
    const LevelTable& levels_;
    SecondaryConfig secondary_;
    bool check_link_lengths_;
    std::vector<SecondaryContext> contexts_;
    std::unordered_map<VertexSet, std::optional<int>> pivot_cache_;
    std::unordered_map<VertexSet, std::optional<int>> best_effort_cache_;
    std::uint64_t fallbacks_ = 0;
};

Action choose_action_pt(const Graph& g, const Subproblem& r, int t);
Action choose_action_cgt(const Graph& g, const Subproblem& r, int t, const SecondaryConfig& cfg = {});

// --- potentials --------------------------------------------------------------

// Per-vertex costs 1 + gamma(eta, u, zeta(u)) over W (clamped at 0).
std::vector<std::uint64_t> potential_costs(const Graph& g, const Subproblem& r, int d);
// The primary potential over G[W]: path buckets (pairs) or tripod buckets (triples).
PotentialTerms potential_mu(const Graph& g, const Subproblem& r, const BucketIndex& index, int d);
PotentialTerms potential_mu(const Graph& g, const Subproblem& r, int d, Mode mode, int t);

// --- solver ------------------------------------------------------------------

struct NodeCounts {
    std::uint64_t leaf = 0, filter = 0, split = 0, branch = 0, free = 0;
    std::uint64_t total() const;
    NodeCounts& operator+=(const NodeCounts& o);  // saturating
};

struct SolveStats {
    NodeCounts explored;      // nodes actually visited
    NodeCounts tree;          // nodes of the full subproblem tree (memo hits expanded)
    std::uint64_t memo_hits = 0;
    std::uint64_t chained_splits = 0;  // single-child splits walked without a visit

    std::uint64_t memo_entries = 0;
    std::uint64_t success_children = 0;
    std::uint64_t dead_filters = 0;
    std::uint64_t secondary_entries = 0;
    std::uint64_t secondary_fallbacks = 0;
    std::uint64_t quota_checks = 0;
    std::uint64_t potential_checks = 0;
    std::uint64_t split_recompositions_checked = 0;
    int max_success_per_path = 0;
    int max_split_per_path = 0;
    int root_level = 0;
    double elapsed_ms = 0;
};

struct SolveOptions {
    Mode mode = Mode::PtFree;
    int d = 0;
    int t = 6;
    std::uint64_t node_budget = 1'000'000;
    double time_budget_s = 300;
    bool validate = false;
    bool validate_potentials = false;
    bool memoize = true;
    bool check_precondition = true;
    LeftGuessDomain left_guess = LeftGuessDomain::NeighborsOnly;
    PositionDomain positions = PositionDomain::Full;
    SecondaryConfig secondary;
};

struct SolveResult {
    VertexSet S;
    Weight weight = 0;
    std::vector<int> eta;           // raw positions on S (0 elsewhere)
    DegeneracyOrdering ordering;    // positions 1..|S| on S
    SolveStats stats;
};

// Budget overruns carry the statistics gathered so far.
struct SolveBudgetExceeded : BudgetExceeded {
    SolveStats stats;
    SolveBudgetExceeded(const std::string& msg, SolveStats s) : BudgetExceeded(msg), stats(s) {}
};

SolveResult solve_max_degenerate(const Graph& g, const SolveOptions& opts);
SolveResult solve_max_degenerate(const Graph& g, int d, int t, Mode mode);
SolveResult solve_mwis(const Graph& g, int t, Mode mode);

// --- lucky replay ------------------------------------------------------------

struct LuckyReport {
    bool ok = true;
    int depth = 0;            // deepest node reached
    std::uint64_t nodes = 0;  // lucky nodes visited
    std::uint64_t branch_nodes = 0;
    std::uint64_t success_steps = 0;
    std::string failure;
};

// Conditions of the lucky predicate for a fixed (S*, eta*).
bool is_lucky(const Graph& g, const Subproblem& r, const VertexSet& s_star, const std::vector<int>& eta_star);

// Follows the recursion of the solver from the root along lucky children
// (every child of a split, the failure child when the pivot is outside S*,
// the tuple built from eta* otherwise) and checks each reached node.
LuckyReport replay_lucky(const Graph& g, const SolveOptions& opts, const VertexSet& s_star,
                         const std::vector<int>& eta_star);

}  // namespace isg
