#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include "isg/graph.hpp"
#include "isg/rational.hpp"

namespace isg {

// Key of a bucket: a sorted pair (third entry -1) or a sorted triple.
using BucketKey = std::array<int, 3>;

// Buckets of witness structures over vertex pairs or triples. Witnesses are
// stored once; buckets refer to them by index, so a tripod can sit in many
// buckets without being copied.
struct BucketIndex {
    int arity = 2;
    std::uint64_t universe = 0;         // number of possible keys, C(|V|, arity)
    VertexSet vertices;                 // the vertex set of the graph view
    std::vector<VertexSet> witnesses;   // vertex set of each witness
    std::vector<BucketKey> keys;        // nonempty buckets, sorted
    std::vector<std::vector<int>> members;  // witness indices per key

    std::size_t bucket_count() const { return keys.size(); }
    std::size_t total_memberships() const;
    std::size_t max_bucket_size() const;
    // Witness indices for a key, or nullptr when that bucket is empty.
    const std::vector<int>* find(BucketKey key) const;
};

BucketKey make_key(int u, int v);
BucketKey make_key(int u, int v, int w);

// --- P_t-free: induced path buckets -------------------------------------

struct PathBuckets {
    BucketIndex index;
    std::vector<std::vector<int>> paths;  // vertex order of each witness (endpoints first/last)
};

// All induced paths of G[W] with 2 to t-1 vertices, bucketed by endpoints.
PathBuckets path_buckets(const Graph& g, const VertexSet& w, int t);
PathBuckets path_buckets(const Graph& g, int t);

// --- C_{>t}-free: connectors, tripods, bags ------------------------------

struct Tripod {
    std::vector<int> center;               // 1 vertex (identified) or 3 (triangle), sorted
    std::array<std::vector<int>, 3> legs;  // each from its center vertex to its tip; sorted by tip
    std::array<int, 3> tips() const { return {legs[0].back(), legs[1].back(), legs[2].back()}; }
    VertexSet vertex_set() const;
    friend bool operator==(const Tripod&, const Tripod&) = default;
    friend auto operator<=>(const Tripod&, const Tripod&) = default;
};

struct Connector : Tripod {};

struct TripodBags {
    std::array<VertexSet, 3> bags;  // bag of legs[i]'s tip
};

inline constexpr std::uint64_t kDefaultWitnessBudget = 10'000'000;

// All tripods of G[W] (legs of at most t/2 + 1 vertices) in canonical form.
std::vector<Tripod> enumerate_tripods(const Graph& g, const VertexSet& w, int t,
                                      std::uint64_t budget = kDefaultWitnessBudget);
std::vector<Tripod> enumerate_tripods(const Graph& g, int t, std::uint64_t budget = kDefaultWitnessBudget);

// Bags via T* inside G[W]. Throws StructuralViolation (with an induced long
// cycle as certificate) when one component of G[W] - T* holds two long tips.
TripodBags tripod_bags(const Graph& g, const VertexSet& w, const Tripod& tr, int t);
TripodBags tripod_bags(const Graph& g, const Tripod& tr, int t);

struct TripodBuckets {
    BucketIndex index;
    std::vector<Tripod> tripods;
    std::vector<TripodBags> bags;
};
TripodBuckets tripod_buckets(const Graph& g, const VertexSet& w, int t,
                             std::uint64_t budget = kDefaultWitnessBudget);
TripodBuckets tripod_buckets(const Graph& g, int t, std::uint64_t budget = kDefaultWitnessBudget);

// Inclusion-minimal connected superset of {u, v, w} (shortest u-v path, then
// a shortest path from w to it, then trimming), decomposed into a connector.
Connector minimal_connector(const Graph& g, int u, int v, int w);

// --- secondary strategy: chips and C'-links ------------------------------

// The component of G[W cap C2] containing a vertex of B and a vertex with a
// neighbor in K cap W. Throws StructuralViolation when there are two.
std::optional<VertexSet> find_chip(const Graph& g, const VertexSet& w, const VertexSet& c2, const VertexSet& b,
                                   const VertexSet& k);

struct LinkBuckets {
    BucketIndex index;
    VertexSet boundary;  // N_H(C')
    std::vector<std::vector<int>> links;
};
// C'-links of H = G[W] between pairs of N_H(C'), at most t vertices each.
// With `check_lengths`, a link on t+1 vertices raises StructuralViolation.
LinkBuckets c_link_buckets(const Graph& g, const VertexSet& w, const VertexSet& chip, int t,
                           bool check_lengths = false);

// --- heavy vertices -------------------------------------------------------

// How a vertex qualifies: it must hit strictly more than `witness_ratio` of
// the witnesses in a bucket (or at least that share when
// `witness_inclusive`), in more than / at least `bucket_ratio` of the
// `universe` keys.
struct HeavyRule {
    Rational witness_ratio;
    bool witness_inclusive = false;
    Rational bucket_ratio;
    bool bucket_inclusive = false;
};

HeavyRule pt_heavy_rule(Rational eps);        // strict / strict
HeavyRule tripod_heavy_rule(Rational eps);    // strict / at least
HeavyRule secondary_heavy_rule(int t);        // >= 1/t of links in >= 1/(2t) of buckets

struct HeavyScores {
    std::vector<std::uint64_t> qualifying;  // per vertex of the graph, qualifying bucket count
};

// Qualifying bucket counts for every vertex of index.vertices.
HeavyScores score_heavy(const Graph& g, const BucketIndex& index, const HeavyRule& rule);

// Vertex of index.vertices meeting the rule with the most qualifying buckets
// (smallest index on ties), or none.
std::optional<int> heavy_vertex(const Graph& g, const BucketIndex& index, const HeavyRule& rule);
std::optional<int> heavy_vertex(const Graph& g, Rational eps, const PathBuckets& pb);
std::optional<int> heavy_vertex(const Graph& g, Rational eps, const TripodBuckets& tb);
// Throws StructuralViolation when no vertex qualifies.
int secondary_heavy_vertex(const Graph& g, const LinkBuckets& lb, int t);

// --- potentials -----------------------------------------------------------

// Per-bucket sums of sum_{witness} sum_{u in witness} cost[u], kept exact.
// The logarithmic potential is derived from them only for reporting.
struct PotentialTerms {
    std::vector<BucketKey> keys;
    std::vector<std::uint64_t> sums;
    bool plus_one = true;  // log2(1 + sum) for the primary forms, log2(sum) for the secondary one
    double log2_value() const;
};
PotentialTerms potential_terms(const BucketIndex& index, const std::vector<std::uint64_t>& cost,
                               bool plus_one = true);

// Termwise comparison: every child term is at most the parent term (a
// missing child key counts as an emptied bucket). `strict` is set when some
// term decreased.
struct PotentialComparison {
    bool non_increasing = true;
    bool strict = false;
};
PotentialComparison compare_potentials(const PotentialTerms& parent, const PotentialTerms& child);

}  // namespace isg
