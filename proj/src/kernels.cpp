#include "isg/kernels.hpp"

#include <omp.h>

namespace isg {

bool witness_share_qualifies(const HeavyRule& rule, std::uint64_t hits, std::uint64_t bucket_size) {
    return rule.witness_inclusive ? rule.witness_ratio.at_most_ratio(hits, bucket_size)
                                  : rule.witness_ratio.below_ratio(hits, bucket_size);
}

bool bucket_share_qualifies(const HeavyRule& rule, std::uint64_t qualifying, std::uint64_t universe) {
    return rule.bucket_inclusive ? rule.bucket_ratio.at_most_ratio(qualifying, universe)
                                 : rule.bucket_ratio.below_ratio(qualifying, universe);
}

std::vector<std::uint64_t> heavy_scores_reference(const Graph& g, const BucketIndex& index, const HeavyRule& rule) {
    std::vector<std::uint64_t> out(g.n(), 0);
    for (int x : index.vertices) {
        VertexSet nx = g.closed_nbr(x) & index.vertices;
        for (const auto& members : index.members) {
            std::uint64_t hits = 0;
            for (int wi : members)
                if (nx.intersects(index.witnesses[wi])) ++hits;
            if (witness_share_qualifies(rule, hits, members.size())) ++out[x];
        }
    }
    return out;
}

namespace {

// x meets witness w inside the view iff x lies in N[w] restricted to the view.
std::vector<VertexSet> witness_reach(const Graph& g, const BucketIndex& index) {
    std::vector<VertexSet> reach(index.witnesses.size());
    for (std::size_t i = 0; i < reach.size(); ++i)
        reach[i] = closed_neighborhood(g, index.witnesses[i]) & index.vertices;
    return reach;
}

void score_bucket(const BucketIndex& index, const std::vector<VertexSet>& reach, const HeavyRule& rule,
                  std::size_t b, std::vector<std::uint32_t>& cnt, std::vector<std::uint64_t>& out) {
    const auto& members = index.members[b];
    VertexSet touched;
    for (int wi : members) {
        touched |= reach[wi];
        for (int x : reach[wi]) ++cnt[x];
    }
    for (int x : touched) {
        if (witness_share_qualifies(rule, cnt[x], members.size())) ++out[x];
        cnt[x] = 0;
    }
    // A vertex meeting no witness can still qualify under an inclusive zero ratio.
    if (witness_share_qualifies(rule, 0, members.size()))
        for (int x : index.vertices - touched) ++out[x];
}

}  // namespace

std::vector<std::uint64_t> heavy_scores_serial(const Graph& g, const BucketIndex& index, const HeavyRule& rule) {
    auto reach = witness_reach(g, index);
    std::vector<std::uint64_t> out(g.n(), 0);
    std::vector<std::uint32_t> cnt(g.n(), 0);
    for (std::size_t b = 0; b < index.members.size(); ++b) score_bucket(index, reach, rule, b, cnt, out);
    return out;
}

std::vector<std::uint64_t> heavy_scores_parallel(const Graph& g, const BucketIndex& index, const HeavyRule& rule,
                                                 int threads) {
    auto reach = witness_reach(g, index);
    std::vector<std::uint64_t> out(g.n(), 0);
    const long long buckets = static_cast<long long>(index.members.size());
    const int nthreads = threads > 0 ? threads : omp_get_max_threads();
#pragma omp parallel num_threads(nthreads)
    {
        std::vector<std::uint64_t> local(g.n(), 0);
        std::vector<std::uint32_t> cnt(g.n(), 0);
#pragma omp for schedule(dynamic, 16) nowait
        for (long long b = 0; b < buckets; ++b)
            score_bucket(index, reach, rule, static_cast<std::size_t>(b), cnt, local);
#pragma omp critical
        for (int v = 0; v < g.n(); ++v) out[v] += local[v];
    }
    return out;
}

}  // namespace isg
