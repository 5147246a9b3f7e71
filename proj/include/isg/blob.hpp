#pragma once

#include <functional>
#include <vector>

#include "isg/branching.hpp"
#include "isg/graph.hpp"

namespace isg {

struct FamilyMember {
    VertexSet vertices;  // must induce a connected subgraph
    Weight weight = 1;
    friend bool operator==(const FamilyMember&, const FamilyMember&) = default;
};

// Two vertex sets are adjacent in the blob graph when they intersect or some
// edge of G joins them.
bool blobs_adjacent(const Graph& g, const VertexSet& a, const VertexSet& b);

// One node per member (duplicates stay distinct), carrying the member weight.
// members[i] is the vertex set behind node i.
struct BlobGraph {
    Graph graph;
    std::vector<FamilyMember> members;
};
BlobGraph blob_graph(const Graph& g, const std::vector<FamilyMember>& family);

// Every connected vertex subset with at most max_size vertices, ordered by
// size and then by bitmask. Throws BudgetExceeded past `limit` subsets.
std::vector<VertexSet> connected_subsets(const Graph& g, int max_size, std::size_t limit = 1'000'000);

// Ready-made families. Weights are 1 unless the graph's vertex weights are
// used (singletons) or the size is used (connected_up_to).
std::vector<FamilyMember> singleton_family(const Graph& g);
std::vector<FamilyMember> induced_cycle_family(const Graph& g);
std::vector<FamilyMember> connected_family(const Graph& g, int c);

struct PackingResult {
    std::vector<int> chosen;  // ascending member indices
    Weight weight = 0;
    SolveStats stats;
};

// Maximum-weight induced packing through MWIS on the blob graph of the
// family. The family is limited to 128 members. The result is checked: the
// components of G[union of chosen] are exactly the chosen members.
PackingResult solve_max_induced_packing(const Graph& g, const std::vector<FamilyMember>& family, int t, Mode mode,
                                        const SolveOptions& base = {});

// True when the chosen members are pairwise disjoint, non-adjacent, and so
// are exactly the components of G[their union].
bool is_induced_packing(const Graph& g, const std::vector<FamilyMember>& family, const std::vector<int>& chosen);

using ClassPredicate = std::function<bool(const Graph&)>;
ClassPredicate edgeless_class();
ClassPredicate forest_class();
ClassPredicate max_degree_class(int k);

// Largest induced subgraph whose components lie in the class: packs the
// connected subsets of at most c vertices that satisfy the predicate,
// weighted by size. The size guarantee holds only when c is the class's
// hyperfiniteness constant for eps; feasibility is checked regardless.
VertexSet approx_largest_induced_class(const Graph& g, double eps, const ClassPredicate& member, int c, int t,
                                       Mode mode, const SolveOptions& base = {});

}  // namespace isg
