#include "isg/buckets.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>

#include "isg/errors.hpp"
#include "isg/kernels.hpp"

namespace isg {

namespace {

std::uint64_t choose(std::uint64_t n, int k) {
    if (n < static_cast<std::uint64_t>(k)) return 0;
    if (k == 2) return n * (n - 1) / 2;
    return n * (n - 1) * (n - 2) / 6;
}

std::uint64_t pack(const BucketKey& k) {
    return (static_cast<std::uint64_t>(k[0]) << 16) | (static_cast<std::uint64_t>(k[1]) << 8) |
           static_cast<std::uint64_t>(k[2] + 1);
}

BucketKey unpack(std::uint64_t p) {
    return {static_cast<int>(p >> 16), static_cast<int>((p >> 8) & 0xff), static_cast<int>(p & 0xff) - 1};
}

void require_masks(const Graph& g) {
    if (!g.has_masks()) throw ContractViolation("bucket structures need n <= 128");
}

// Groups (key, witness) entries into a BucketIndex.
BucketIndex build_index(int arity, const VertexSet& vertices, std::vector<VertexSet> witnesses,
                        std::vector<std::pair<std::uint64_t, int>> entries) {
    BucketIndex idx;
    idx.arity = arity;
    idx.vertices = vertices;
    idx.universe = choose(static_cast<std::uint64_t>(vertices.size()), arity);
    idx.witnesses = std::move(witnesses);
    std::sort(entries.begin(), entries.end());
    entries.erase(std::unique(entries.begin(), entries.end()), entries.end());
    for (std::size_t i = 0; i < entries.size();) {
        std::size_t j = i;
        std::vector<int> mem;
        while (j < entries.size() && entries[j].first == entries[i].first) mem.push_back(entries[j++].second);
        idx.keys.push_back(unpack(entries[i].first));
        idx.members.push_back(std::move(mem));
        i = j;
    }
    return idx;
}

// Induced paths of G[W] starting at `start` with at most max_vertices
// vertices; `visit` sees every one, including the single vertex.
void induced_paths_from(const Graph& g, const VertexSet& w, int start, int max_vertices,
                        const std::function<void(const std::vector<int>&)>& visit) {
    std::vector<int> path{start};
    // blocked: closed neighborhoods of all path vertices except the last.
    std::function<void(const VertexSet&)> rec = [&](const VertexSet& blocked) {
        visit(path);
        if (static_cast<int>(path.size()) >= max_vertices) return;
        int last = path.back();
        VertexSet nb = blocked | g.closed_nbr(last);
        VertexSet cand = (g.nbr(last) & w) - blocked;
        for (int x : cand) {
            path.push_back(x);
            rec(nb);
            path.pop_back();
        }
    };
    rec(VertexSet{});
}

}  // namespace

std::size_t BucketIndex::total_memberships() const {
    std::size_t s = 0;
    for (const auto& m : members) s += m.size();
    return s;
}

std::size_t BucketIndex::max_bucket_size() const {
    std::size_t s = 0;
    for (const auto& m : members) s = std::max(s, m.size());
    return s;
}

const std::vector<int>* BucketIndex::find(BucketKey key) const {
    auto it = std::lower_bound(keys.begin(), keys.end(), key);
    if (it == keys.end() || *it != key) return nullptr;
    return &members[static_cast<std::size_t>(it - keys.begin())];
}

BucketKey make_key(int u, int v) {
    if (u > v) std::swap(u, v);
    return {u, v, -1};
}

BucketKey make_key(int u, int v, int w) {
    std::array<int, 3> a{u, v, w};
    std::sort(a.begin(), a.end());
    return a;
}

// ---------------------------------------------------------------------------

PathBuckets path_buckets(const Graph& g, const VertexSet& w, int t) {
    require_masks(g);
    PathBuckets pb;
    std::vector<VertexSet> wit;
    std::vector<std::pair<std::uint64_t, int>> entries;
    for (int s : w) {
        induced_paths_from(g, w, s, t - 1, [&](const std::vector<int>& p) {
            if (p.size() < 2 || p.back() < p.front()) return;
            int id = static_cast<int>(wit.size());
            wit.push_back(VertexSet::from_range(p.begin(), p.end()));
            pb.paths.push_back(p);
            entries.emplace_back(pack(make_key(p.front(), p.back())), id);
        });
    }
    pb.index = build_index(2, w, std::move(wit), std::move(entries));
    return pb;
}

PathBuckets path_buckets(const Graph& g, int t) { return path_buckets(g, g.all(), t); }

// ---------------------------------------------------------------------------

VertexSet Tripod::vertex_set() const {
    VertexSet s = VertexSet::from_range(center.begin(), center.end());
    for (const auto& leg : legs) s |= VertexSet::from_range(leg.begin(), leg.end());
    return s;
}

namespace {

struct Leg {
    std::vector<int> seq;
    VertexSet inner;     // leg minus its center vertex
    VertexSet inner_nb;  // N[inner]
    int tip() const { return seq.back(); }
};

std::vector<Leg> legs_from(const Graph& g, const VertexSet& w, int c, int h, const VertexSet& avoid_nb) {
    std::vector<Leg> out;
    induced_paths_from(g, w, c, h, [&](const std::vector<int>& p) {
        Leg leg;
        leg.seq = p;
        leg.inner = VertexSet::from_range(p.begin() + 1, p.end());
        if (leg.inner.intersects(avoid_nb)) return;
        leg.inner_nb = closed_neighborhood(g, leg.inner);
        out.push_back(std::move(leg));
    });
    std::sort(out.begin(), out.end(), [](const Leg& a, const Leg& b) {
        return a.tip() != b.tip() ? a.tip() < b.tip() : a.seq < b.seq;
    });
    return out;
}

bool compatible(const Leg& a, const Leg& b) { return !a.inner.intersects(b.inner_nb); }

Tripod make_tripod(std::vector<int> center, const Leg& a, const Leg& b, const Leg& c) {
    Tripod tr;
    std::sort(center.begin(), center.end());
    tr.center = std::move(center);
    tr.legs = {a.seq, b.seq, c.seq};
    std::sort(tr.legs.begin(), tr.legs.end(),
              [](const std::vector<int>& x, const std::vector<int>& y) { return x.back() < y.back(); });
    return tr;
}

// Tripods whose smallest center vertex is c.
void tripods_at(const Graph& g, const VertexSet& w, int c, int h, std::vector<Tripod>& out,
                std::atomic<std::uint64_t>& produced, std::uint64_t budget) {
    auto bump = [&] {
        if (produced.fetch_add(1, std::memory_order_relaxed) + 1 > budget)
            throw BudgetExceeded("tripod enumeration exceeded its budget of " + std::to_string(budget));
    };
    // Identified center.
    auto legs = legs_from(g, w, c, h, VertexSet{});
    for (std::size_t i = 0; i < legs.size(); ++i)
        for (std::size_t j = i + 1; j < legs.size(); ++j) {
            if (legs[j].tip() == legs[i].tip() || !compatible(legs[i], legs[j])) continue;
            if (legs[i].inner.empty() && legs[j].inner.empty()) continue;
            for (std::size_t k = j + 1; k < legs.size(); ++k) {
                if (legs[k].tip() == legs[j].tip()) continue;
                if (!compatible(legs[i], legs[k]) || !compatible(legs[j], legs[k])) continue;
                bump();
                out.push_back(make_tripod({c}, legs[i], legs[j], legs[k]));
            }
        }
    // Triangle centers c < b < d.
    for (int b : g.nbr(c) & w) {
        if (b < c) continue;
        for (int d : g.nbr(c) & g.nbr(b) & w) {
            if (d < b) continue;
            auto la = legs_from(g, w, c, h, g.closed_nbr(b) | g.closed_nbr(d));
            auto lb = legs_from(g, w, b, h, g.closed_nbr(c) | g.closed_nbr(d));
            auto ld = legs_from(g, w, d, h, g.closed_nbr(c) | g.closed_nbr(b));
            for (const auto& x : la)
                for (const auto& y : lb) {
                    if (!compatible(x, y)) continue;
                    for (const auto& z : ld) {
                        if (!compatible(x, z) || !compatible(y, z)) continue;
                        bump();
                        out.push_back(make_tripod({c, b, d}, x, y, z));
                    }
                }
        }
    }
}

}  // namespace

std::vector<Tripod> enumerate_tripods(const Graph& g, const VertexSet& w, int t, std::uint64_t budget) {
    require_masks(g);
    if (t < 2) throw ContractViolation("tripods need t >= 2");
    const int h = t / 2 + 1;
    std::vector<int> centers = w.to_vector();
    std::vector<std::vector<Tripod>> per(centers.size());
    std::atomic<std::uint64_t> produced{0};
    std::atomic<bool> failed{false};
    std::string failure;
    const long long nc = static_cast<long long>(centers.size());
#pragma omp parallel for schedule(dynamic, 1) if (nc >= 24)
    for (long long i = 0; i < nc; ++i) {
        if (failed.load()) continue;
        try {
            tripods_at(g, w, centers[i], h, per[i], produced, budget);
        } catch (const BudgetExceeded& e) {
#pragma omp critical
            failure = e.what();
            failed = true;
        }
    }
    if (failed) throw BudgetExceeded(failure);
    std::vector<Tripod> all;
    for (auto& v : per) all.insert(all.end(), std::make_move_iterator(v.begin()), std::make_move_iterator(v.end()));
    std::sort(all.begin(), all.end());
    all.erase(std::unique(all.begin(), all.end()), all.end());
    return all;
}

std::vector<Tripod> enumerate_tripods(const Graph& g, int t, std::uint64_t budget) {
    return enumerate_tripods(g, g.all(), t, budget);
}

TripodBags tripod_bags(const Graph& g, const VertexSet& w, const Tripod& tr, int t) {
    require_masks(g);
    const std::size_t h = static_cast<std::size_t>(t / 2 + 1);
    VertexSet long_tips;
    for (const auto& leg : tr.legs)
        if (leg.size() == h) long_tips.insert(leg.back());
    VertexSet tstar = (closed_neighborhood(g, tr.vertex_set() - long_tips) & w) - long_tips;
    VertexSet rest = w - tstar;
    TripodBags out;
    for (int i = 0; i < 3; ++i) {
        int b = tr.legs[i].back();
        if (!long_tips.contains(b)) {
            out.bags[i] = VertexSet::single(b);
            continue;
        }
        out.bags[i] = component_of(g, rest, b);
        for (int j = 0; j < i; ++j) {
            int other = tr.legs[j].back();
            if (!long_tips.contains(other) || !out.bags[i].contains(other)) continue;
            // Two long legs closed up through G - T*: report the cycle's vertices.
            std::vector<int> cert = tr.legs[j];
            cert.insert(cert.end(), tr.center.begin(), tr.center.end());
            cert.insert(cert.end(), tr.legs[i].begin(), tr.legs[i].end());
            auto p = shortest_path_between(g, out.bags[i], VertexSet::single(b), VertexSet::single(other));
            cert.insert(cert.end(), p.begin(), p.end());
            std::sort(cert.begin(), cert.end());
            cert.erase(std::unique(cert.begin(), cert.end()), cert.end());
            throw StructuralViolation("two long tips share a component of G - T*: the graph has a long induced cycle",
                                      cert);
        }
    }
    return out;
}

TripodBags tripod_bags(const Graph& g, const Tripod& tr, int t) { return tripod_bags(g, g.all(), tr, t); }

TripodBuckets tripod_buckets(const Graph& g, const VertexSet& w, int t, std::uint64_t budget) {
    TripodBuckets tb;
    tb.tripods = enumerate_tripods(g, w, t, budget);
    std::vector<VertexSet> wit;
    std::vector<std::pair<std::uint64_t, int>> entries;
    for (std::size_t i = 0; i < tb.tripods.size(); ++i) {
        tb.bags.push_back(tripod_bags(g, w, tb.tripods[i], t));
        wit.push_back(tb.tripods[i].vertex_set());
        const auto& bags = tb.bags.back().bags;
        for (int u : bags[0])
            for (int v : bags[1])
                for (int x : bags[2]) {
                    entries.emplace_back(pack(make_key(u, v, x)), static_cast<int>(i));
                    if (entries.size() > budget)
                        throw BudgetExceeded("tripod bucket memberships exceeded " + std::to_string(budget));
                }
    }
    tb.index = build_index(3, w, std::move(wit), std::move(entries));
    return tb;
}

TripodBuckets tripod_buckets(const Graph& g, int t, std::uint64_t budget) {
    return tripod_buckets(g, g.all(), t, budget);
}

// ---------------------------------------------------------------------------

Connector minimal_connector(const Graph& g, int u, int v, int w) {
    require_masks(g);
    if (u == v || v == w || u == w) throw ContractViolation("connector tips must be distinct");
    VertexSet all = g.all();
    auto p = shortest_path_between(g, all, VertexSet::single(u), VertexSet::single(v));
    if (p.empty()) throw ContractViolation("tips are not in one component");
    VertexSet b = VertexSet::from_range(p.begin(), p.end());
    auto q = shortest_path_between(g, all, VertexSet::single(w), b);
    if (q.empty()) throw ContractViolation("tips are not in one component");
    b |= VertexSet::from_range(q.begin(), q.end());
    const VertexSet tips{u, v, w};
    for (bool changed = true; changed;) {
        changed = false;
        for (int x : b - tips) {
            VertexSet smaller = b;
            smaller.erase(x);
            if (is_connected(g, smaller)) {
                b = smaller;
                changed = true;
                break;
            }
        }
    }

    auto walk = [&](int start, const VertexSet& exclude) {
        std::vector<int> leg{start};
        VertexSet seen = exclude;
        seen.insert(start);
        for (;;) {
            VertexSet nx = (g.nbr(leg.back()) & b) - seen;
            if (nx.empty()) break;
            leg.push_back(nx.first());
            seen.insert(nx.first());
        }
        return leg;
    };

    Connector c;
    std::vector<std::vector<int>> legs;
    std::optional<std::array<int, 3>> triangle;
    for (int x : b) {
        for (int y : g.nbr(x) & b) {
            if (y < x) continue;
            VertexSet common = g.nbr(x) & g.nbr(y) & b;
            int z = common.next(y);
            if (z >= 0) {
                triangle = std::array<int, 3>{x, y, z};
                break;
            }
        }
        if (triangle) break;
    }
    if (triangle) {
        VertexSet center{(*triangle)[0], (*triangle)[1], (*triangle)[2]};
        c.center.assign(triangle->begin(), triangle->end());
        for (int a : *triangle) legs.push_back(walk(a, center));
    } else {
        int hub = -1;
        for (int x : b)
            if ((g.nbr(x) & b).size() >= 3) hub = x;
        if (hub < 0)  // a path; its inner tip is the center
            for (int x : tips)
                if ((g.nbr(x) & b).size() == 2) hub = x;
        if (hub < 0) throw InvariantFailure("minimal connector has no center");
        c.center = {hub};
        VertexSet center = VertexSet::single(hub);
        for (int y : g.nbr(hub) & b) {
            auto leg = walk(y, center);
            leg.insert(leg.begin(), hub);
            legs.push_back(leg);
        }
        if (legs.size() == 2) legs.push_back({hub});
    }
    if (legs.size() != 3) throw InvariantFailure("minimal connector does not have three legs");
    std::sort(legs.begin(), legs.end(), [](const auto& x, const auto& y) { return x.back() < y.back(); });
    for (int i = 0; i < 3; ++i) c.legs[i] = legs[i];
    VertexSet got{c.legs[0].back(), c.legs[1].back(), c.legs[2].back()};
    if (got != tips || c.vertex_set() != b) throw InvariantFailure("minimal connector decomposition mismatch");
    return c;
}

// ---------------------------------------------------------------------------

std::optional<VertexSet> find_chip(const Graph& g, const VertexSet& w, const VertexSet& c2, const VertexSet& b,
                                   const VertexSet& k) {
    require_masks(g);
    VertexSet near_k = open_neighborhood(g, k & w);
    std::optional<VertexSet> chip;
    for (const auto& comp : connected_components(g, w & c2)) {
        if (!comp.intersects(b) || !comp.intersects(near_k)) continue;
        if (chip)
            throw StructuralViolation("two chips: the graph has a long induced cycle", {chip->first(), comp.first()});
        chip = comp;
    }
    return chip;
}

LinkBuckets c_link_buckets(const Graph& g, const VertexSet& w, const VertexSet& chip, int t, bool check_lengths) {
    require_masks(g);
    LinkBuckets lb;
    lb.boundary = open_neighborhood(g, chip) & w;
    if (lb.boundary.size() < 2) throw ContractViolation("C'-links need at least two boundary vertices");
    std::vector<VertexSet> wit;
    std::vector<std::pair<std::uint64_t, int>> entries;
    const int max_inner = check_lengths ? t - 1 : t - 2;
    for (int u : lb.boundary) {
        std::vector<int> path{u};
        VertexSet nu = g.closed_nbr(u);
        // prev: closed neighborhoods of the inner vertices before the last one.
        std::function<void(const VertexSet&)> rec = [&](const VertexSet& prev) {
            int last = path.back();
            int inner = static_cast<int>(path.size()) - 1;
            for (int v : (g.nbr(last) & lb.boundary) - prev) {
                if (v <= u) continue;
                if (inner > t - 2) {
                    path.push_back(v);
                    throw StructuralViolation("C'-link with more than t vertices", path);
                }
                path.push_back(v);
                int id = static_cast<int>(wit.size());
                wit.push_back(VertexSet::from_range(path.begin(), path.end()));
                lb.links.push_back(path);
                entries.emplace_back(pack(make_key(u, v)), id);
                path.pop_back();
            }
            if (inner >= max_inner) return;
            VertexSet nb = prev | g.closed_nbr(last);
            for (int x : (g.nbr(last) & chip) - prev - nu) {
                path.push_back(x);
                rec(nb);
                path.pop_back();
            }
        };
        for (int c1 : g.nbr(u) & chip) {
            path.push_back(c1);
            rec(VertexSet{});
            path.pop_back();
        }
    }
    lb.index = build_index(2, w, std::move(wit), std::move(entries));
    std::uint64_t pairs = choose(static_cast<std::uint64_t>(lb.boundary.size()), 2);
    lb.index.universe = pairs;
    if (lb.index.bucket_count() != pairs) {
        for (int u : lb.boundary)
            for (int v : lb.boundary)
                if (u < v && !lb.index.find(make_key(u, v)))
                    throw StructuralViolation("empty C'-link bucket", {u, v});
    }
    return lb;
}

// ---------------------------------------------------------------------------

HeavyRule pt_heavy_rule(Rational eps) { return {eps, false, eps, false}; }
HeavyRule tripod_heavy_rule(Rational eps) { return {eps, false, eps, true}; }
HeavyRule secondary_heavy_rule(int t) {
    Rational eps(1, 2 * static_cast<std::uint64_t>(t));
    return {eps, false, eps, true};
}

HeavyScores score_heavy(const Graph& g, const BucketIndex& index, const HeavyRule& rule) {
    if (index.total_memberships() >= kParallelScoringThreshold)
        return {heavy_scores_parallel(g, index, rule)};
    return {heavy_scores_serial(g, index, rule)};
}

std::optional<int> heavy_vertex(const Graph& g, const BucketIndex& index, const HeavyRule& rule) {
    auto scores = score_heavy(g, index, rule);
    std::optional<int> best;
    for (int x : index.vertices) {
        if (!bucket_share_qualifies(rule, scores.qualifying[x], index.universe)) continue;
        if (!best || scores.qualifying[x] > scores.qualifying[*best]) best = x;
    }
    return best;
}

std::optional<int> heavy_vertex(const Graph& g, Rational eps, const PathBuckets& pb) {
    return heavy_vertex(g, pb.index, pt_heavy_rule(eps));
}

std::optional<int> heavy_vertex(const Graph& g, Rational eps, const TripodBuckets& tb) {
    return heavy_vertex(g, tb.index, tripod_heavy_rule(eps));
}

int secondary_heavy_vertex(const Graph& g, const LinkBuckets& lb, int t) {
    auto x = heavy_vertex(g, lb.index, secondary_heavy_rule(t));
    if (!x) throw StructuralViolation("no heavy vertex for the C'-link buckets");
    return *x;
}

// ---------------------------------------------------------------------------

double PotentialTerms::log2_value() const {
    double s = 0;
    for (auto v : sums) {
        double x = static_cast<double>(v) + (plus_one ? 1.0 : 0.0);
        if (x > 0) s += std::log2(x);
    }
    return s;
}

PotentialTerms potential_terms(const BucketIndex& index, const std::vector<std::uint64_t>& cost, bool plus_one) {
    PotentialTerms p;
    p.plus_one = plus_one;
    p.keys = index.keys;
    p.sums.reserve(index.keys.size());
    std::vector<std::uint64_t> per_witness(index.witnesses.size());
    for (std::size_t i = 0; i < per_witness.size(); ++i)
        for (int u : index.witnesses[i]) per_witness[i] = add_weight(per_witness[i], cost[u]);
    for (const auto& mem : index.members) {
        std::uint64_t s = 0;
        for (int wi : mem) s = add_weight(s, per_witness[wi]);
        p.sums.push_back(s);
    }
    return p;
}

PotentialComparison compare_potentials(const PotentialTerms& parent, const PotentialTerms& child) {
    PotentialComparison r;
    std::size_t i = 0;
    auto term_positive = [&](std::uint64_t s) { return parent.plus_one || s > 1; };
    for (std::size_t j = 0; j < child.keys.size(); ++j) {
        while (i < parent.keys.size() && parent.keys[i] < child.keys[j]) {
            if (term_positive(parent.sums[i])) r.strict = true;
            ++i;
        }
        if (i == parent.keys.size() || parent.keys[i] != child.keys[j]) {
            r.non_increasing = false;
            continue;
        }
        if (child.sums[j] > parent.sums[i]) r.non_increasing = false;
        if (child.sums[j] < parent.sums[i]) r.strict = true;
        ++i;
    }
    for (; i < parent.keys.size(); ++i)
        if (term_positive(parent.sums[i])) r.strict = true;
    return r;
}

}  // namespace isg
