#pragma once

#include <cstdint>
#include <functional>
#include <set>
#include <string>
#include <vector>

#include "isg/graph.hpp"

namespace isg {

// --- capped multisets --------------------------------------------------------

// Multiplicity per state, indexed by state id.
using Multiset = std::vector<int>;

Multiset cap_multiset(const Multiset& m, int tau);
// Multiset of a list of states (with repetition), capped at tau.
Multiset multiset_of(const std::vector<int>& states, int num_states, int tau);
// Base-(tau + 1) code of a capped multiset; a dense index into Multi(Q, tau).
std::uint64_t multiset_code(const Multiset& m, int tau);
// All capped multisets over num_states states, in code order.
std::vector<Multiset> all_multisets(int num_states, int tau);

// --- forests -------------------------------------------------------------------

inline constexpr int kNoVertex = -2;  // parent entry of a vertex outside the forest
inline constexpr int kRoot = -1;

// A rooted forest on a subset of V(G), as a parent array of size n.
struct TreedepthDecomposition {
    std::vector<int> parent;

    static TreedepthDecomposition empty(int n) { return {std::vector<int>(static_cast<std::size_t>(n), kNoVertex)}; }
    bool contains(int v) const { return parent[static_cast<std::size_t>(v)] != kNoVertex; }
    VertexSet vertices() const;
    // Number of vertices on the path from v to its root. Throws on cycles.
    int depth_of(int v) const;
    int depth() const;
    // Ancestors of v from the root down to v itself.
    std::vector<int> path_to(int v) const;
    bool is_ancestor(int a, int v) const;  // a is v or an ancestor of v
    std::vector<int> children(int v) const;
    std::vector<int> roots() const;
    friend bool operator==(const TreedepthDecomposition&, const TreedepthDecomposition&) = default;
};

// Acyclic, and every edge of G[vertices] joins an ancestor and a descendant.
bool is_treedepth_decomposition(const Graph& g, const TreedepthDecomposition& f);
// Every non-root u has a descendant (possibly u) adjacent to parent(u).
bool is_proper(const Graph& g, const TreedepthDecomposition& f);
// Reattaches offending vertices to their grandparent until proper.
TreedepthDecomposition make_proper(const Graph& g, TreedepthDecomposition f);

// --- labellers -----------------------------------------------------------------

// A label depends only on the root-to-v path (given root first, v last) and
// the subgraph of G induced by it.
struct Labeller {
    int alphabet_size = 0;
    std::function<int(const Graph&, const std::vector<int>& path)> label;
};

// Symbols (h, f) with h the depth and f(i) = 1 iff v is adjacent to its
// depth-i ancestor; code (h - 1) * 2^d + sum_i f(i) 2^(i-1).
Labeller default_labeller(int d);
int default_symbol(int d, int h, const std::vector<bool>& f);
std::string default_symbol_name(int d, int symbol);  // "h:f(1)..f(d)", e.g. "2:10"
int parse_default_symbol(int d, const std::string& name);

std::vector<int> label_forest(const Graph& g, const TreedepthDecomposition& f, const Labeller& lab);
std::vector<int> default_labelling(const Graph& g, const TreedepthDecomposition& f, int d);

// --- threshold automata ----------------------------------------------------------

struct ThresholdAutomaton {
    std::vector<std::string> states;
    int alphabet_size = 0;
    int tau = 0;
    // Transition on a symbol and a capped child multiset. Tables that miss an
    // entry throw ConfigurationError when the entry is needed.
    std::function<int(int, const Multiset&)> delta;
    std::set<Multiset> accept;

    int num_states() const { return static_cast<int>(states.size()); }
    int step(int symbol, const Multiset& children) const;
    bool accepts(const Multiset& roots) const { return accept.count(roots) > 0; }
};

enum class BuiltinAutomaton { Edgeless, InducedMatching };
BuiltinAutomaton parse_builtin_automaton(const std::string& s);
// Both work over the default alphabet for depth d. Edgeless rejects as soon
// as a label shows an ancestor adjacency; induced-matching accepts exactly
// the forests whose trees are a root alone or a root with one child adjacent
// to it.
ThresholdAutomaton builtin_automaton(BuiltinAutomaton kind, int d);

// JSON form: {"states": [names], "alphabet": size or [names], "tau": int,
// "delta": [[symbol, [state names], state], ...], "accept": [[state names], ...]}.
// A symbol is an integer code or a default symbol name "h:bits" for depth d.
ThresholdAutomaton automaton_from_json(const std::string& text, int d);
ThresholdAutomaton load_automaton_file(const std::string& path, int d);
// The full transition table, with default symbol names for depth d.
std::string automaton_to_json(const ThresholdAutomaton& a, int d);

struct RunResult {
    std::vector<int> run;  // state per forest vertex (-1 outside)
    Multiset roots;        // capped root multiset
    bool accepted = false;
};
// Bottom-up evaluation; labels are indexed by vertex.
RunResult run_automaton(const ThresholdAutomaton& a, const TreedepthDecomposition& f, const std::vector<int>& labels);

// --- solver ----------------------------------------------------------------------

struct TdSolveOptions {
    int d = 2;
    int t = 6;
    std::uint64_t node_budget = 20'000'000;
    double time_budget_s = 300;
    bool validate = false;  // partial-solution equations and potential monitoring
    bool memoize = true;
    bool check_precondition = true;  // P_t-freeness via the oracle when n <= 24
};

struct TdStats {
    std::uint64_t calls = 0;             // recursive calls (component subproblems)
    std::uint64_t placements = 0;        // vertices tried while growing closures and root trees
    std::uint64_t memo_hits = 0;
    std::uint64_t top_level_candidates = 0;
    std::uint64_t success_children = 0;  // partial solutions built in success branches
    std::uint64_t failure_children = 0;
    std::uint64_t cleaned = 0;           // vertices moved to X by cleanup
    std::uint64_t invariant_checks = 0;
    std::uint64_t potential_checks = 0;
    int max_success_per_path = 0;        // same-level success edges on one root path
    int closure_bound = 0;
    double elapsed_ms = 0;
};

struct TdResult {
    bool found = true;  // false when no accepted solution exists at all
    VertexSet S;
    Weight weight = 0;
    TreedepthDecomposition forest;
    TdStats stats;
};

// Largest size of a closure the success branches guess: the per-depth bound
// from the closure construction, capped by d^2 (|Q| tau)^(d-1).
int closure_size_bound(int d, int num_states, int tau);

TdResult solve_td_automaton(const Graph& g, const ThresholdAutomaton& a, const Labeller& lab,
                            const TdSolveOptions& opts);

// Reference: every S and every proper decomposition of G[S] of depth <= d
// (built as root choice per component, recursively), keeping accepted ones.
struct TdOracleResult {
    bool found = false;
    Weight weight = 0;
    VertexSet witness;
    TreedepthDecomposition forest;
};
inline constexpr int kTdOracleCap = 12;
TdOracleResult brute_td_automaton(const Graph& g, int d, const ThresholdAutomaton& a, const Labeller& lab);

}  // namespace isg
