#include <string>

#include "isg/branching.hpp"
#include "isg/errors.hpp"

namespace isg {

bool is_lucky(const Graph& g, const Subproblem& r, const VertexSet& s_star, const std::vector<int>& eta_star) {
    auto es = [&](int v) { return eta_star[static_cast<std::size_t>(v)]; };
    if (!r.A.subset_of(s_star) || r.X.intersects(s_star)) return false;
    for (int v : r.A)
        if (r.eta[static_cast<std::size_t>(v)] != es(v)) return false;
    for (int u : r.W) {
        int z = r.zeta[static_cast<std::size_t>(u)];
        if (s_star.contains(u) && z > es(u)) return false;
        for (int v : g.nbr(u) & r.A)
            if (z <= es(v) && !(s_star.contains(u) && es(u) < es(v))) return false;
    }
    return true;
}

namespace {

struct Replay {
    const Graph& g;
    const SolveOptions& o;
    const VertexSet& s_star;
    const std::vector<int>& eta_star;
    LevelTable levels;
    Strategy strategy;
    LuckyReport report;

    Replay(const Graph& g_, const SolveOptions& o_, const VertexSet& s, const std::vector<int>& e)
        : g(g_), o(o_), s_star(s), eta_star(e), levels(g_.n()), strategy(g_, o_.mode, o_.t, levels, o_.secondary) {}

    bool fail(const std::string& msg, int depth) {
        report.ok = false;
        report.failure = msg + " at depth " + std::to_string(depth);
        return false;
    }

    bool visit(const Subproblem& r, int ctx, int depth) {
        ++report.nodes;
        report.depth = std::max(report.depth, depth);
        if (report.nodes > o.node_budget) throw BudgetExceeded("lucky replay exceeded the node budget");
        if (!is_lucky(g, r, s_star, eta_star)) return fail("reached a node that is not lucky", depth);
        Action a = strategy.choose(r, ctx);
        if (a.kind == ActionKind::Leaf) return true;
        if (a.kind == ActionKind::Split) {
            for (const Subproblem& c : split_subproblem(g, r, levels))
                if (!visit(c, -1, depth + 1)) return false;
            return true;
        }
        ++report.branch_nodes;
        const int nu = a.pivot;
        if (!s_star.contains(nu)) return visit(delete_vertices(r, VertexSet::single(nu)), a.context, depth + 1);

        auto es = [&](int v) { return eta_star[static_cast<std::size_t>(v)]; };
        VertexSet dset;
        for (int u : g.nbr(nu) & r.W & s_star)
            if (es(u) < es(nu)) dset.insert(u);
        VertexSet dprime = dset;
        dprime.insert(nu);
        std::vector<std::pair<int, int>> positions;
        for (int u : dprime) positions.emplace_back(u, es(u));
        std::vector<LeftNeighbors> left;
        for (int u : dprime) {
            VertexSet du;
            for (int w : ((g.nbr(u) & r.W & s_star) - dprime))
                if (es(w) < es(u)) du.insert(w);
            left.push_back({u, du});
        }
        if (dset.size() > quota(g, r.eta, nu, r.zeta[static_cast<std::size_t>(nu)], o.d))
            return fail("lucky D exceeds the pivot quota", depth);

        bool listed = false;
        enumerate_branch_tuples(g, r, nu, o.d, o.left_guess, o.positions, [&](const BranchTuple& t) {
            if (t.D == dset && t.positions == positions && t.left == left) listed = true;
            return !listed;
        });
        if (!listed) return fail("lucky tuple is not among the enumerated success children", depth);

        Subproblem z = take_vertices(g, r, dprime, positions, left, o.d);
        if (!is_lucky(g, z, s_star, eta_star)) return fail("lucky success child is not lucky", depth);
        std::optional<Subproblem> y = filter_step(g, z, o.d);
        if (!y) return fail("filter killed a lucky success child", depth);
        if ((z.W - y->W).intersects(s_star)) return fail("filter removed a vertex of S*", depth);
        ++report.success_steps;
        return visit(*y, a.context, depth + 3);
    }
};

}  // namespace

LuckyReport replay_lucky(const Graph& g, const SolveOptions& opts, const VertexSet& s_star,
                         const std::vector<int>& eta_star) {
    if (static_cast<int>(eta_star.size()) != g.n()) throw ContractViolation("eta* must be indexed by vertex");
    DegeneracyOrdering ord{eta_star};
    if (!validate_degeneracy_ordering(g, s_star, ord, opts.d))
        throw ContractViolation("eta* is not a d-degeneracy ordering of G[S*]");
    Replay rp(g, opts, s_star, eta_star);
    rp.visit(Subproblem::root(g), -1, 0);
    return rp.report;
}

}  // namespace isg
