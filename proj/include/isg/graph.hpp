#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "isg/errors.hpp"
#include "isg/vertex_set.hpp"

namespace isg {

using Weight = std::uint64_t;

// Checked addition; throws std::overflow_error instead of wrapping.
Weight add_weight(Weight a, Weight b);

class Graph {
public:
    Graph() = default;
    // Builds a graph and validates it: endpoints in range, no self-loops,
    // no duplicate edges. Weights default to 1 when `weights` is empty.
    Graph(int n, const std::vector<std::pair<int, int>>& edges, std::vector<Weight> weights = {});

    int n() const { return n_; }
    std::size_t m() const { return m_; }
    const std::vector<int>& neighbors(int v) const { return adj_[v]; }
    int degree(int v) const { return static_cast<int>(adj_[v].size()); }
    Weight weight(int v) const { return weights_[v]; }
    const std::vector<Weight>& weights() const { return weights_; }
    bool adjacent(int u, int v) const;

    // Bitmask views; only available when n <= kMaxSetVertices.
    bool has_masks() const { return n_ <= kMaxSetVertices; }
    const VertexSet& nbr(int v) const { return masks_[v]; }
    VertexSet closed_nbr(int v) const {
        VertexSet s = masks_[v];
        s.insert(v);
        return s;
    }
    VertexSet all() const { return VertexSet::range(n_); }

    std::vector<std::pair<int, int>> edges() const;
    Weight weight_of(const VertexSet& s) const;

    friend bool operator==(const Graph& a, const Graph& b) {
        return a.n_ == b.n_ && a.adj_ == b.adj_ && a.weights_ == b.weights_;
    }

private:
    void require_masks() const;

    int n_ = 0;
    std::size_t m_ = 0;
    std::vector<std::vector<int>> adj_;
    std::vector<Weight> weights_;
    std::vector<VertexSet> masks_;
};

// Instance text format: "n m", optional "w w0 .. w_{n-1}", then m lines
// "e u v" with u < v. Lines starting with '#' are ignored.
Graph parse_graph(const std::string& text);
std::string serialize_graph(const Graph& g);
Graph read_graph_file(const std::string& path);
void write_graph_file(const Graph& g, const std::string& path);

struct InducedSubgraph {
    Graph graph;
    std::vector<int> to_parent;  // vertex i of `graph` is to_parent[i] in G
};
InducedSubgraph induced_subgraph(const Graph& g, const VertexSet& s);
InducedSubgraph induced_subgraph(const Graph& g, const std::vector<int>& vertices);

// Components of G[S], ordered by smallest member.
std::vector<VertexSet> connected_components(const Graph& g, const VertexSet& s);
// The component of G[S] containing v (v must be in S).
VertexSet component_of(const Graph& g, const VertexSet& s, int v);
bool is_connected(const Graph& g, const VertexSet& s);
VertexSet open_neighborhood(const Graph& g, const VertexSet& s);
VertexSet closed_neighborhood(const Graph& g, const VertexSet& s);
// Shortest path (as vertex list) from a vertex of `from` to a vertex of `to`
// inside G[within]; empty when none exists.
std::vector<int> shortest_path_between(const Graph& g, const VertexSet& within,
                                       const VertexSet& from, const VertexSet& to);

// Position map over V(G); position 0 means "not assigned".
struct DegeneracyOrdering {
    std::vector<int> positions;
};

struct DegeneracyResult {
    int d = 0;
    DegeneracyOrdering ordering;
};

// Repeatedly removes a minimum-degree vertex (smallest index on ties); the
// removed vertex gets the last free position, so every vertex has at most d
// neighbors placed before it.
DegeneracyResult greedy_degeneracy_ordering(const Graph& g);
// Same on G[S]; positions outside S are 0 and positions inside S are 1..|S|.
DegeneracyResult greedy_degeneracy_ordering(const Graph& g, const VertexSet& s);
int degeneracy(const Graph& g, const VertexSet& s);

// True iff the ordering is edge-injective and each vertex has at most d
// neighbors at strictly smaller positions. Throws ContractViolation when a
// vertex has no position.
bool validate_degeneracy_ordering(const Graph& g, const DegeneracyOrdering& eta, int d);
// Variant restricted to G[S]; vertices outside S are ignored.
bool validate_degeneracy_ordering(const Graph& g, const VertexSet& s,
                                  const DegeneracyOrdering& eta, int d);

enum class GenKind { RandomGnpRejection, RandomChordal, RandomInterval, Path, Cycle, Grid };
enum class Freeness { None, PtFree, CgtFree };

struct GenParams {
    int n = 10;
    double p = 0.5;          // edge probability (gnp) or clique-extension probability (chordal)
    Freeness target = Freeness::None;
    int t = 6;
    bool connected = true;
    int rows = 0, cols = 0;  // grid
    Weight min_weight = 1, max_weight = 1;
    int max_attempts = 10000;
};

GenKind parse_gen_kind(const std::string& s);
std::string gen_kind_name(GenKind k);

// Deterministic for a fixed seed. Rejection-based kinds throw
// BudgetExceeded when no conforming instance is found within the attempt
// budget.
Graph generate_instance(GenKind kind, const GenParams& params, std::uint64_t seed);

// Replaces weights with uniform draws from [lo, hi].
Graph with_random_weights(const Graph& g, Weight lo, Weight hi, std::uint64_t seed);

}  // namespace isg
