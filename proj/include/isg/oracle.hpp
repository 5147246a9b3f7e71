#pragma once

#include <vector>

#include "isg/graph.hpp"

namespace isg {

struct OracleResult {
    bool found = true;  // false when no feasible solution exists
    Weight weight = 0;
    VertexSet witness;  // preferred among optima (see preferred_on_tie)
    double elapsed_ms = 0;
};

inline constexpr int kMwisOracleCap = 24;
inline constexpr int kDegenerateOracleCap = 16;
inline constexpr int kPathOracleCap = 24;
inline constexpr int kCycleOracleCap = 20;
inline constexpr int kPackingOracleCap = 18;

OracleResult brute_mwis(const Graph& g);

struct DegenerateOracleResult : OracleResult {
    DegeneracyOrdering ordering;  // greedy ordering of G[witness]
};
DegenerateOracleResult brute_max_degenerate(const Graph& g, int d);

// Number of vertices on a longest induced path / cycle (0 when the graph has
// no cycle). `cap` guards the exponential search and defaults to the
// documented oracle caps; tests on blob graphs pass a larger cap explicitly.
int brute_longest_induced_path(const Graph& g, int cap = kPathOracleCap);
int brute_longest_induced_cycle(const Graph& g, int cap = kCycleOracleCap);

// Early-exit checks used by generators and precondition checks.
bool has_induced_path_with(const Graph& g, int k);          // some induced path with >= k vertices
bool has_induced_cycle_longer_than(const Graph& g, int t);  // some induced cycle with > t vertices
std::vector<int> find_induced_path_with(const Graph& g, int k);
std::vector<int> find_induced_cycle_longer_than(const Graph& g, int t);

bool is_pt_free(const Graph& g, int t);
bool is_cgt_free(const Graph& g, int t);

struct PackingOracleResult {
    Weight weight = 0;
    std::vector<int> chosen;  // indices into the family, ascending
};
// Exact maximum-weight induced packing over `family` (members must induce
// connected subgraphs); members are compatible when disjoint and non-adjacent.
PackingOracleResult brute_max_packing(const Graph& g, const std::vector<VertexSet>& family,
                                      const std::vector<Weight>& weights);

}  // namespace isg
