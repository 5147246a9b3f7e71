#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "corpus.hpp"
#include "isg/branching.hpp"
#include "isg/errors.hpp"
#include "isg/oracle.hpp"

using namespace isg;
using namespace isg::corpus;

namespace {

Graph complete(int n, std::vector<Weight> w = {}) {
    std::vector<std::pair<int, int>> e;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) e.emplace_back(i, j);
    return Graph(n, e, std::move(w));
}

Graph star(int leaves) {
    std::vector<std::pair<int, int>> e;
    for (int i = 1; i <= leaves; ++i) e.emplace_back(0, i);
    return Graph(leaves + 1, e);
}

SolveOptions opts(Mode mode, int d, int t) {
    SolveOptions o;
    o.mode = mode;
    o.d = d;
    o.t = t;
    o.validate = true;
    o.node_budget = 50'000'000;
    return o;
}

// Path MWIS by the textbook recurrence, for graphs that are paths 0-1-..-(n-1).
Weight path_mwis(const Graph& g) {
    Weight take = 0, skip = 0;
    for (int v = 0; v < g.n(); ++v) {
        Weight nt = skip + g.weight(v);
        skip = std::max(skip, take);
        take = nt;
    }
    return std::max(take, skip);
}

// Reference tuple count: iterate every D, every position vector in
// [1, n]^{D'} and every family of left sets drawn from all subsets of W \ D',
// keeping the combinations that satisfy the three tuple conditions.
std::size_t brute_tuple_count(const Graph& g, const Subproblem& r, int nu, int d, bool neighbors_only) {
    const int n = g.n();
    std::vector<int> w = r.W.to_vector();
    std::size_t count = 0;
    for (std::uint32_t dm = 0; dm < (1u << w.size()); ++dm) {
        VertexSet D;
        for (std::size_t i = 0; i < w.size(); ++i)
            if (dm >> i & 1) D.insert(w[i]);
        if (D.contains(nu) || !D.subset_of(g.nbr(nu))) continue;
        if (D.size() > quota(g, r.eta, nu, r.zeta[nu], d)) continue;
        VertexSet dp = D;
        dp.insert(nu);
        std::vector<int> dv = dp.to_vector();
        std::vector<int> p(dv.size(), 1);
        for (;;) {
            std::vector<int> eta = r.eta;
            bool ok = true;
            for (std::size_t i = 0; i < dv.size(); ++i) {
                eta[dv[i]] = p[i];
                ok = ok && p[i] >= r.zeta[dv[i]];
            }
            for (int u : dp)
                for (int v : g.neighbors(u))
                    if ((r.A.contains(v) || dp.contains(v)) && eta[v] == eta[u]) ok = false;
            if (ok) {
                std::size_t prod = 1;
                for (int u : dv) {
                    int cap = quota(g, eta, u, eta[u], d);
                    if (cap < 0) {
                        prod = 0;
                        break;
                    }
                    if (u == nu) continue;
                    VertexSet pool = r.W - dp;
                    if (neighbors_only) pool &= g.nbr(u);
                    std::size_t c = 0;
                    std::vector<int> pv = pool.to_vector();
                    for (std::uint32_t m = 0; m < (1u << pv.size()); ++m)
                        if (std::popcount(m) <= cap) ++c;
                    prod *= c;
                }
                count += prod;
            }
            std::size_t i = 0;
            while (i < p.size() && p[i] == n) p[i++] = 1;
            if (i == p.size()) break;
            ++p[i];
        }
    }
    return count;
}

// A random clean subproblem reached by taking a few vertices at random
// positions and filtering.
Subproblem random_clean(const Graph& g, int d, std::mt19937_64& rng) {
    Subproblem r = Subproblem::root(g);
    for (int step = 0; step < 2 && r.W.any(); ++step) {
        std::vector<int> w = r.W.to_vector();
        int v = w[rng() % w.size()];
        int lo = std::max(1, r.zeta[v]);
        if (lo > g.n()) break;
        int p = lo + static_cast<int>(rng() % static_cast<std::uint64_t>(g.n() - lo + 1));
        bool clash = false;
        for (int u : g.nbr(v) & r.A) clash = clash || r.eta[u] == p;
        if (clash) continue;
        Subproblem z = take_vertices(g, r, VertexSet::single(v), {{v, p}}, {{v, {}}}, d);
        auto f = filter_step(g, z, d);
        if (f) r = *f;
    }
    return r;
}

}  // namespace

TEST(Levels, MatchFloatingPointAwayFromBoundaries) {
    for (int n : {1, 2, 5, 10, 14, 50, 128}) {
        double exact = -std::log(static_cast<double>(n + 1)) / std::log(0.99);
        EXPECT_EQ(root_level(n), static_cast<int>(std::ceil(exact - 1e-9))) << n;
    }
    LevelTable lt(128);
    for (int l = 0; l < lt.root_level(); ++l) {
        long double bound = std::pow(0.99L, -static_cast<long double>(l));
        EXPECT_LT(static_cast<long double>(lt.capacity(l)), bound);
        EXPECT_GE(static_cast<long double>(lt.capacity(l) + 1), bound);
    }
    EXPECT_EQ(LevelTable(0).root_level(), 0);
}

TEST(Quota, Examples) {
    Graph g = star(3);
    std::vector<int> eta(4, 0);
    EXPECT_EQ(quota(g, eta, 0, 5, 2), 2);
    eta[1] = 1;
    eta[2] = 3;
    EXPECT_EQ(quota(g, eta, 0, 4, 2), 0);
    EXPECT_EQ(quota(g, eta, 0, 4, 1), -1);
    EXPECT_EQ(quota(g, eta, 0, 3, 1), 0);
}

TEST(Offending, Examples) {
    Graph g = star(3);
    Subproblem r = Subproblem::root(g);
    Offending o = find_offending(g, r, 1);
    EXPECT_TRUE(o.in_a.empty());
    EXPECT_TRUE(o.in_w.empty());

    Subproblem hi = r;
    hi.zeta[2] = g.n() + 1;
    EXPECT_EQ(find_offending(g, hi, 1).in_w, VertexSet{2});

    // Center taken at position 2 while all three leaves may still come before it.
    Subproblem c = r;
    c.A = {0};
    c.W = {1, 2, 3};
    c.eta[0] = 2;
    c.zeta[0] = 0;
    EXPECT_EQ(find_offending(g, c, 2).in_a, VertexSet{0});
    EXPECT_FALSE(filter_step(g, c, 2).has_value());
    EXPECT_TRUE(find_offending(g, c, 3).in_a.empty());
}

TEST(Filter, DeletesOffendingActiveVertices) {
    Graph g = star(3);
    Subproblem r = Subproblem::root(g);
    EXPECT_EQ(*filter_step(g, r, 0), r);
    // Center 0 taken at position 1; leaves 1 and 2 already pushed after it.
    Graph h(4, {{0, 1}, {0, 2}});
    Subproblem c = Subproblem::root(h);
    c.A = {0};
    c.W = {1, 2, 3};
    c.eta[0] = 1;
    c.zeta[0] = 0;
    c.zeta[1] = 2;
    c.zeta[2] = 2;
    auto f = filter_step(h, c, 0);
    ASSERT_TRUE(f.has_value());
    EXPECT_EQ(f->W, VertexSet{3});
    EXPECT_EQ(f->X, (VertexSet{1, 2}));
    EXPECT_TRUE(is_clean(h, *f, 0));
    // With d = 1 both leaves may follow the center.
    EXPECT_EQ(*filter_step(h, c, 1), c);
}

TEST(Split, Examples) {
    // One small component: the single child keeps W.
    Graph p3 = path_graph(3);
    LevelTable lt(p3.n());
    Subproblem r = Subproblem::root(p3);
    auto kids = split_subproblem(p3, r, lt);
    ASSERT_EQ(kids.size(), 1u);
    EXPECT_EQ(kids[0].W, r.W);
    EXPECT_EQ(kids[0].level, r.level - 1);

    // Eight isolated vertices at a level whose lower capacity is 5: greedy takes 5.
    Graph e8(8, {});
    Subproblem s = Subproblem::root(e8);
    LevelTable l8(8);
    int level = 1;
    while (l8.capacity(level - 1) < 5) ++level;
    ASSERT_EQ(l8.capacity(level - 1), 5);
    s.level = level;
    auto parts = split_subproblem(e8, s, l8);
    ASSERT_EQ(parts.size(), 2u);
    EXPECT_EQ(parts[0].W, (VertexSet{0, 1, 2, 3, 4}));
    EXPECT_EQ(parts[1].W, (VertexSet{5, 6, 7}));
    EXPECT_EQ(parts[1].level, level - 1);

    s.level = 0;
    EXPECT_THROW(split_subproblem(e8, s, l8), ContractViolation);
}

TEST(DeleteTake, Examples) {
    Graph g = path_graph(8);
    Subproblem r = Subproblem::root(g);
    EXPECT_EQ(delete_vertices(r, {}), r);
    EXPECT_TRUE(delete_vertices(r, r.W).W.empty());
    EXPECT_THROW(delete_vertices(delete_vertices(r, {7}), VertexSet{7}), ContractViolation);

    Graph iso(3, {{1, 2}});
    Subproblem ri = Subproblem::root(iso);
    Subproblem t0 = take_vertices(iso, ri, {0}, {{0, 2}}, {{0, {}}}, 1);
    EXPECT_EQ(t0.A, VertexSet{0});
    EXPECT_EQ(t0.zeta[1], 1);
    EXPECT_EQ(t0.zeta[2], 1);

    r.zeta[2] = 3;
    r.zeta[1] = 3;
    Subproblem t1 = take_vertices(g, r, {1}, {{1, 5}}, {{1, {}}}, 1);
    EXPECT_THROW(take_vertices(g, r, {1}, {{1, 2}}, {{1, {}}}, 1), ContractViolation);
    EXPECT_THROW(take_vertices(g, r, {1}, {{1, 9}}, {{1, {}}}, 1), ContractViolation);
    EXPECT_EQ(t1.zeta[2], 6);
    EXPECT_EQ(t1.zeta[0], 6);
    Subproblem t2 = take_vertices(g, r, {1}, {{1, 4}}, {{1, {2}}}, 1);
    EXPECT_EQ(t2.zeta[2], 3);
    EXPECT_EQ(t2.zeta[0], 5);

    EXPECT_THROW(take_vertices(g, r, {1, 2}, {{1, 4}, {2, 4}}, {}, 1), ContractViolation);
    EXPECT_THROW(take_vertices(g, r, {1}, {{1, 4}}, {{1, {0, 2}}}, 1), ContractViolation);
    EXPECT_THROW(take_vertices(g, r, {1}, {{1, 4}}, {{1, {1}}}, 1), ContractViolation);
    EXPECT_THROW(take_vertices(g, r, {1}, {}, {}, 1), ContractViolation);
}

TEST(BranchTuples, StarHandCount) {
    // Center 0 with two active leaves, d = 1, n = 3.
    Graph g = star(2);
    Subproblem r = Subproblem::root(g);
    // D empty: 3 positions. D = {leaf}: 6 edge-injective position pairs, and
    // each leaf has no other neighbor to guess, so 6 per leaf.
    EXPECT_EQ(branch_tuples(g, r, 0, 1).size(), 15u);
    // Over all of W \ D' the leaf placed before the center may name the other
    // leaf: 3 + 2 * (3 * 2 + 3 * 1).
    EXPECT_EQ(branch_tuples(g, r, 0, 1, LeftGuessDomain::AllActive).size(), 21u);
    // d = 0 collapses to the pivot position.
    auto t0 = branch_tuples(g, r, 0, 0);
    ASSERT_EQ(t0.size(), 3u);
    for (const auto& t : t0) {
        EXPECT_TRUE(t.D.empty());
        EXPECT_TRUE(t.left[0].du.empty());
    }
}

TEST(BranchTuples, OrderIsDeterministic) {
    Graph g = star(2);
    auto ts = branch_tuples(g, Subproblem::root(g), 0, 1);
    for (std::size_t i = 1; i < ts.size(); ++i) {
        const auto& a = ts[i - 1];
        const auto& b = ts[i];
        if (a.D == b.D) {
            EXPECT_LE(a.positions, b.positions);
        } else {
            EXPECT_TRUE(a.D < b.D);
        }
    }
}

TEST(BranchTuples, MatchBruteForceOnRandomSubproblems) {
    std::mt19937_64 rng(99);
    for (int it = 0; it < 40; ++it) {
        Graph g = pt_free(it, 5 + it % 2);
        int d = it % 3;
        Subproblem r = random_clean(g, d, rng);
        if (r.W.empty()) continue;
        for (int nu : r.W) {
            EXPECT_EQ(branch_tuples(g, r, nu, d).size(), brute_tuple_count(g, r, nu, d, true));
            EXPECT_EQ(branch_tuples(g, r, nu, d, LeftGuessDomain::AllActive).size(),
                      brute_tuple_count(g, r, nu, d, false));
            auto tight = branch_tuples(g, r, nu, d, LeftGuessDomain::NeighborsOnly, PositionDomain::Tight);
            EXPECT_LE(tight.size(), branch_tuples(g, r, nu, d).size());
        }
    }
}

TEST(TightRelabel, KeepsEdgeOrderAndDegeneracy) {
    for (int s = 0; s < 20; ++s) {
        Graph g = pt_free(s, 9);
        auto o = brute_max_degenerate(g, 2);
        auto tight = tight_relabel(g, o.witness, o.ordering.positions);
        for (int v : o.witness)
            for (int u : g.nbr(v) & o.witness)
                EXPECT_EQ(o.ordering.positions[u] < o.ordering.positions[v], tight[u] < tight[v]);
        EXPECT_TRUE(validate_degeneracy_ordering(g, o.witness, DegeneracyOrdering{tight}, 2));
    }
}

TEST(ChooseAction, Examples) {
    Graph g = path_graph(4);
    Subproblem r = Subproblem::root(g);
    Subproblem leaf = r;
    leaf.level = 0;
    leaf.W = {};
    EXPECT_EQ(choose_action_pt(g, leaf, 6).kind, ActionKind::Leaf);
    EXPECT_EQ(choose_action_pt(g, r, 6).kind, ActionKind::Split);
    EXPECT_EQ(choose_action_cgt(g, leaf, 6).kind, ActionKind::Leaf);

    // A level where the connected W does not fit one level lower.
    Subproblem b = r;
    b.level = 1;
    Action a = choose_action_pt(g, b, 6);
    ASSERT_EQ(a.kind, ActionKind::Branch);
    PathBuckets pb = path_buckets(g, g.all(), 6);
    EXPECT_EQ(a.pivot, *heavy_vertex(g, Rational(1, 18), pb));

    Action c = choose_action_cgt(g, b, 6);
    ASSERT_EQ(c.kind, ActionKind::Branch);
    EXPECT_EQ(c.source, PivotSource::TripodHeavy);
}

TEST(Solve, SpecExamples) {
    Graph c5 = cycle_graph(5);
    EXPECT_EQ(solve_max_degenerate(c5, opts(Mode::PtFree, 0, 5)).weight, 2u);
    EXPECT_EQ(solve_max_degenerate(c5, opts(Mode::PtFree, 1, 5)).weight, 4u);

    auto k3 = solve_max_degenerate(complete(3, {4, 9, 9}), opts(Mode::PtFree, 0, 6));
    EXPECT_EQ(k3.weight, 9u);
    EXPECT_EQ(k3.S, VertexSet{1});

    Graph p4(4, {{0, 1}, {1, 2}, {2, 3}}, {1, 10, 10, 1});
    auto r = solve_max_degenerate(p4, opts(Mode::PtFree, 0, 5));
    EXPECT_EQ(r.weight, 11u);
    EXPECT_EQ(r.S, (VertexSet{0, 2}));

    Graph e6(6, {});
    auto e = solve_mwis(e6, 6, Mode::PtFree);
    EXPECT_EQ(e.S, e6.all());
    EXPECT_EQ(e.weight, 6u);
}

TEST(Solve, RejectsInputsOutsideTheClass) {
    try {
        solve_mwis(path_graph(6), 6, Mode::PtFree);
        FAIL() << "expected a violation";
    } catch (const StructuralViolation& e) {
        EXPECT_EQ(e.certificate.size(), 6u);
    }
    EXPECT_THROW(solve_mwis(cycle_graph(8), 6, Mode::CgtFree), StructuralViolation);
    EXPECT_THROW(solve_mwis(path_graph(4), 5, Mode::CgtFree), ContractViolation);
}

TEST(Solve, BudgetAbortsWithStats) {
    SolveOptions o = opts(Mode::PtFree, 1, 6);
    o.node_budget = 10;
    try {
        solve_max_degenerate(pt_free(1, 9), o);
        FAIL() << "expected a budget abort";
    } catch (const SolveBudgetExceeded& e) {
        EXPECT_GT(e.stats.explored.total(), 10u);
    }
}

TEST(Solve, MwisMatchesOracle) {
    for (int s = 0; s < 30; ++s) {
        Graph g = pt_free(1000 + s, size_for(s, 6, 13));
        auto r = solve_max_degenerate(g, opts(Mode::PtFree, 0, 6));
        auto b = brute_mwis(g);
        EXPECT_EQ(r.weight, b.weight) << "seed " << s;
        EXPECT_EQ(r.S, b.witness) << "seed " << s;
        EXPECT_LE(r.stats.max_split_per_path, r.stats.root_level);
    }
    for (int s = 0; s < 20; ++s) {
        Graph g = chordal(2000 + s, size_for(s, 6, 12));
        auto r = solve_max_degenerate(g, opts(Mode::CgtFree, 0, 6));
        EXPECT_EQ(r.weight, brute_mwis(g).weight) << "seed " << s;
    }
}

TEST(Solve, DegenerateMatchesOracle) {
    for (int s = 0; s < 16; ++s) {
        int d = 1 + s % 2;
        Graph g = s % 4 < 2 ? pt_free(3000 + s, size_for(s, 5, d == 1 ? 9 : 7)) : chordal(3000 + s, size_for(s, 5, 7));
        Mode mode = s % 4 < 2 ? Mode::PtFree : Mode::CgtFree;
        auto r = solve_max_degenerate(g, opts(mode, d, 6));
        auto b = brute_max_degenerate(g, d);
        EXPECT_EQ(r.weight, b.weight) << "seed " << s;
        EXPECT_EQ(r.S, b.witness) << "seed " << s;
        EXPECT_TRUE(validate_degeneracy_ordering(g, r.S, r.ordering, d));
    }
}

TEST(Solve, TightPositionsAgreeWithFullPositions) {
    for (int s = 0; s < 16; ++s) {
        int d = 1 + s % 2;
        Graph g = pt_free(4000 + s, size_for(s, 5, 7));
        SolveOptions full = opts(Mode::PtFree, d, 6);
        SolveOptions tight = full;
        tight.positions = PositionDomain::Tight;
        auto a = solve_max_degenerate(g, full);
        auto b = solve_max_degenerate(g, tight);
        EXPECT_EQ(a.S, b.S) << "seed " << s;
        EXPECT_LE(b.stats.explored.total(), a.stats.explored.total());
    }
    for (int s = 0; s < 10; ++s) {
        Graph g = pt_free(4100 + s, size_for(s, 8, 11));
        SolveOptions tight = opts(Mode::PtFree, 2, 6);
        tight.positions = PositionDomain::Tight;
        EXPECT_EQ(solve_max_degenerate(g, tight).weight, brute_max_degenerate(g, 2).weight) << "seed " << s;
    }
}

TEST(Solve, LeftGuessDomainsAgree) {
    for (int s = 0; s < 8; ++s) {
        Graph g = pt_free(5000 + s, size_for(s, 5, 6));
        SolveOptions a = opts(Mode::PtFree, 1, 6);
        SolveOptions b = a;
        b.left_guess = LeftGuessDomain::AllActive;
        EXPECT_EQ(solve_max_degenerate(g, a).S, solve_max_degenerate(g, b).S);
    }
}

TEST(Solve, MemoizationPreservesTheTree) {
    for (int s = 0; s < 10; ++s) {
        int d = s % 2;
        Graph g = pt_free(6000 + s, size_for(s, 5, 7));
        SolveOptions a = opts(Mode::PtFree, d, 6);
        SolveOptions b = a;
        b.memoize = false;
        auto ra = solve_max_degenerate(g, a);
        auto rb = solve_max_degenerate(g, b);
        EXPECT_EQ(ra.S, rb.S);
        EXPECT_EQ(ra.eta, rb.eta);
        EXPECT_EQ(ra.stats.tree.total(), rb.stats.tree.total());
        EXPECT_EQ(ra.stats.tree.branch, rb.stats.tree.branch);
        EXPECT_EQ(ra.stats.tree.filter, rb.stats.tree.filter);
        EXPECT_EQ(ra.stats.max_success_per_path, rb.stats.max_success_per_path);
        EXPECT_EQ(ra.stats.max_split_per_path, rb.stats.max_split_per_path);
        EXPECT_EQ(ra.stats.max_split_per_path, ra.stats.root_level);
    }
}

TEST(Solve, PotentialsAreMonotone) {
    for (int s = 0; s < 6; ++s) {
        Graph g = pt_free(7000 + s, size_for(s, 5, 8));
        SolveOptions o = opts(Mode::PtFree, s % 2, 6);
        o.validate_potentials = true;
        auto r = solve_max_degenerate(g, o);
        EXPECT_GT(r.stats.potential_checks, 0u);
        EXPECT_EQ(r.weight, brute_max_degenerate(g, s % 2).weight);
    }
    Graph c = chordal(7100, 8);
    SolveOptions o = opts(Mode::CgtFree, 0, 6);
    o.validate_potentials = true;
    EXPECT_GT(solve_max_degenerate(c, o).stats.potential_checks, 0u);
}

TEST(Potential, Examples) {
    Graph k2(2, {{0, 1}});
    Subproblem r = Subproblem::root(k2);
    PotentialTerms mu = potential_mu(k2, r, 1, Mode::PtFree, 6);
    ASSERT_EQ(mu.sums.size(), 1u);
    EXPECT_EQ(mu.sums[0], 4u);  // one path, both endpoints cost 1 + d
    EXPECT_DOUBLE_EQ(mu.log2_value(), std::log2(5.0));
    Subproblem empty = delete_vertices(r, r.W);
    EXPECT_EQ(potential_mu(k2, empty, 1, Mode::PtFree, 6).log2_value(), 0.0);
}

TEST(Lucky, ReplayFollowsOracleOptimum) {
    for (int s = 0; s < 12; ++s) {
        int d = s % 3;
        Graph g = pt_free(8000 + s, size_for(s, 5, d == 0 ? 11 : 8));
        auto b = brute_max_degenerate(g, d);
        SolveOptions o = opts(Mode::PtFree, d, 6);
        LuckyReport rep = replay_lucky(g, o, b.witness, b.ordering.positions);
        EXPECT_TRUE(rep.ok) << rep.failure;
        EXPECT_GT(rep.nodes, 0u);

        o.positions = PositionDomain::Tight;
        LuckyReport tight = replay_lucky(g, o, b.witness, tight_relabel(g, b.witness, b.ordering.positions));
        EXPECT_TRUE(tight.ok) << tight.failure;
        EXPECT_EQ(tight.success_steps, rep.success_steps);
    }
}

TEST(Lucky, PredicateExamples) {
    Graph g = path_graph(3);
    Subproblem r = Subproblem::root(g);
    std::vector<int> eta{1, 0, 2};
    EXPECT_TRUE(is_lucky(g, r, {0, 2}, eta));
    EXPECT_FALSE(is_lucky(g, delete_vertices(r, {0}), {0, 2}, eta));
    Subproblem t = take_vertices(g, r, {0}, {{0, 1}}, {{0, {}}}, 0);
    EXPECT_TRUE(is_lucky(g, t, {0, 2}, eta));
    Subproblem wrong = take_vertices(g, r, {0}, {{0, 2}}, {{0, {}}}, 0);
    EXPECT_FALSE(is_lucky(g, wrong, {0, 2}, eta));
}

TEST(Secondary, ForcedOnPathsMatchesDynamicProgramming) {
    for (int n : {40, 64, 100}) {
        Graph g = with_random_weights(path_graph(n), 1, 50, static_cast<std::uint64_t>(n));
        SolveOptions o = opts(Mode::CgtFree, 0, 6);
        o.secondary.force_secondary = true;
        o.secondary.distance_factor = 0;
        auto r = solve_max_degenerate(g, o);
        EXPECT_EQ(r.weight, path_mwis(g)) << n;
        EXPECT_GT(r.stats.secondary_entries, 0u) << n;
    }
}

TEST(Secondary, ContextOnALongPath) {
    Graph g = path_graph(40);
    LevelTable lt(g.n());
    SecondaryConfig cfg;
    cfg.force_secondary = true;
    cfg.distance_factor = 0;
    Strategy st(g, Mode::CgtFree, 6, lt, cfg);
    Subproblem r = Subproblem::root(g);
    r.level = 1;
    Action a = st.choose(r, -1);
    ASSERT_EQ(a.kind, ActionKind::Branch);
    EXPECT_TRUE(a.entered_secondary);
    EXPECT_EQ(a.context, 0);
    const SecondaryContext& ctx = st.context(0);
    EXPECT_TRUE(ctx.X.subset_of(ctx.K));
    EXPECT_FALSE(ctx.C2.intersects(ctx.K));
    EXPECT_GE(10 * ctx.C2.size(), 4 * ctx.C1.size());
    EXPECT_EQ(ctx.B, ctx.C2 - ctx.D0);
    EXPECT_TRUE(ctx.L.subset_of(ctx.B));
    // On a path the chip touches K in exactly one vertex.
    EXPECT_EQ(a.source, PivotSource::ChipNeighbor);
    EXPECT_TRUE(ctx.K.contains(a.pivot));

    // Short paths have no component of C1 - N[X] with 0.4 |C1| vertices.
    Graph p14 = path_graph(14);
    LevelTable l14(14);
    Strategy st14(p14, Mode::CgtFree, 6, l14, cfg);
    Subproblem r14 = Subproblem::root(p14);
    r14.level = 1;
    Action f = st14.choose(r14, -1);
    EXPECT_EQ(f.source, PivotSource::Fallback);
    EXPECT_EQ(st14.secondary_fallbacks(), 1u);
}
