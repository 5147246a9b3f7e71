#pragma once

#include <optional>
#include <vector>

#include "isg/graph.hpp"

namespace isg {

struct SeparatorResult {
    VertexSet X;
    VertexSet closed_nbhd;              // N[X] inside the working set
    std::vector<VertexSet> components;  // components of the working set minus N[X]
    std::vector<int> path;              // the grown induced path X was cut from
};

// Gyarfas-style connected balanced separator of G[within]: |X| <= t, G[X]
// connected, and each component of G[within] - N[X] holds at most |A|/2
// vertices of A. The result is checked before returning; if no start vertex
// produces a valid separator, a StructuralViolation carrying the last grown
// path is thrown.
SeparatorResult connected_balanced_separator(const Graph& g, int t, const VertexSet& a,
                                             const VertexSet& within);
SeparatorResult connected_balanced_separator(const Graph& g, int t, const VertexSet& a);

// Checks the separator postcondition directly.
bool is_balanced_separator(const Graph& g, const VertexSet& within, const VertexSet& a, const VertexSet& x,
                           int t);

struct C3wbsWitness {
    std::vector<VertexSet> classes[3];  // each class is a family of components
};

// Decides whether X is a connected three-way balanced separator of G[within]
// and returns a partition witnessing it. Empty classes are allowed.
std::optional<C3wbsWitness> is_c3wbs(const Graph& g, const VertexSet& x, const VertexSet& within);
std::optional<C3wbsWitness> is_c3wbs(const Graph& g, const VertexSet& x);

// Smallest X (|X| <= k, first in increasing size then lexicographic order)
// such that every component of H - X has at most |A|/2 vertices of A.
// Capped at k <= 6 and n <= 40; throws StructuralViolation when none exists.
VertexSet low_tw_balanced_separator(const Graph& h, const VertexSet& a, int k);

}  // namespace isg
