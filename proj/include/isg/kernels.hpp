#pragma once

#include <cstdint>
#include <vector>

#include "isg/buckets.hpp"

namespace isg {

// Heavy-vertex scoring: for every vertex x of index.vertices, the number of
// buckets in which N[x] meets enough witnesses under `rule`. Three versions
// with identical results: a direct reference, a single-threaded
// accumulation kernel, and its OpenMP counterpart (threads <= 0 means the
// OpenMP default).
std::vector<std::uint64_t> heavy_scores_reference(const Graph& g, const BucketIndex& index, const HeavyRule& rule);
std::vector<std::uint64_t> heavy_scores_serial(const Graph& g, const BucketIndex& index, const HeavyRule& rule);
std::vector<std::uint64_t> heavy_scores_parallel(const Graph& g, const BucketIndex& index, const HeavyRule& rule,
                                                 int threads = 0);

// Memberships above which score_heavy switches to the parallel kernel.
inline constexpr std::size_t kParallelScoringThreshold = 1 << 15;

bool witness_share_qualifies(const HeavyRule& rule, std::uint64_t hits, std::uint64_t bucket_size);
bool bucket_share_qualifies(const HeavyRule& rule, std::uint64_t qualifying, std::uint64_t universe);

}  // namespace isg
