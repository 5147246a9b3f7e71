#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "isg/blob.hpp"
#include "isg/branching.hpp"
#include "isg/buckets.hpp"
#include "isg/errors.hpp"
#include "isg/oracle.hpp"
#include "isg/separators.hpp"
#include "isg/td_automata.hpp"

using namespace isg;
using nlohmann::json;

namespace {

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Disagreement with an oracle; reported with exit code 1 like solver failures.
struct Mismatch : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct InstanceOpts {
    std::string path;
    std::string kind;
    int n = 10;
    double p = 0.5;
    std::string target = "none";
    int t = 6;
    int rows = 0, cols = 0;
    std::uint64_t seed = 1;
    Weight wmin = 1, wmax = 1;
    bool disconnected = false;
};

Freeness parse_freeness(const std::string& s) {
    if (s == "none") return Freeness::None;
    if (s == "pt") return Freeness::PtFree;
    if (s == "cgt") return Freeness::CgtFree;
    throw UsageError("unknown target class '" + s + "' (none, pt, cgt)");
}

Graph generate(const InstanceOpts& o) {
    GenParams p;
    p.n = o.n;
    p.p = o.p;
    p.target = parse_freeness(o.target);
    p.t = o.t;
    p.connected = !o.disconnected;
    p.rows = o.rows;
    p.cols = o.cols;
    p.min_weight = o.wmin;
    p.max_weight = o.wmax;
    return generate_instance(parse_gen_kind(o.kind), p, o.seed);
}

Graph load_instance(const InstanceOpts& o) {
    if (!o.path.empty() && !o.kind.empty()) throw UsageError("give either an instance file or --kind, not both");
    if (o.path.empty() && o.kind.empty()) throw UsageError("no instance: give a file or --kind");
    if (!o.path.empty()) return read_graph_file(o.path);
    return generate(o);
}

void add_generator_flags(CLI::App* c, InstanceOpts& o) {
    c->add_option("--kind", o.kind, "generator: random-gnp-rejection, random-chordal, random-interval, path, cycle, grid");
    c->add_option("--n", o.n, "vertex count")->check(CLI::Range(0, 128));
    c->add_option("--p", o.p, "edge or extension probability")->check(CLI::Range(0.0, 1.0));
    c->add_option("--target", o.target, "rejection target: none, pt, cgt");
    c->add_option("--rows", o.rows, "grid rows");
    c->add_option("--cols", o.cols, "grid columns");
    c->add_option("--seed", o.seed, "generator seed");
    c->add_option("--wmin", o.wmin, "smallest random weight");
    c->add_option("--wmax", o.wmax, "largest random weight");
    c->add_flag("--disconnected", o.disconnected, "do not insist on a connected instance");
}

void add_instance_flags(CLI::App* c, InstanceOpts& o) {
    c->add_option("instance", o.path, "instance file");
    add_generator_flags(c, o);
}

std::string join(const VertexSet& s) {
    std::string out;
    for (int v : s) out += (out.empty() ? "" : " ") + std::to_string(v);
    return out;
}

json set_json(const VertexSet& s) { return json(s.to_vector()); }

void write_json(const json& j, const std::string& path) {
    if (path.empty() || path == "-") {
        std::cout << j.dump(2) << "\n";
        return;
    }
    std::ofstream out(path);
    if (!out) throw UsageError("cannot write " + path);
    out << j.dump(2) << "\n";
}

json nodes_json(const NodeCounts& c) {
    return {{"leaf", c.leaf}, {"filter", c.filter}, {"split", c.split}, {"branch", c.branch}, {"free", c.free}};
}

// --- solve / oracle ----------------------------------------------------------

struct SolveFlags {
    std::string problem = "mwis";
    int d = 0;
    int t = 6;
    std::string mode = "pt";
    std::uint64_t budget_nodes = 1'000'000;
    double budget_secs = 300;
    bool check_oracle = false;
    std::string stats_json;
    bool validate = false;
    bool validate_potentials = false;
    std::string positions = "full";
    bool no_memo = false;
};

SolveOptions solve_options(const SolveFlags& f) {
    SolveOptions o;
    if (f.problem == "mwis") o.d = 0;
    else if (f.problem == "degenerate") o.d = f.d;
    else throw UsageError("unknown problem '" + f.problem + "' (mwis, degenerate)");
    if (o.d < 0) throw UsageError("--d must be nonnegative");
    o.mode = parse_mode(f.mode);
    o.t = f.t;
    o.node_budget = f.budget_nodes;
    o.time_budget_s = f.budget_secs;
    o.validate = f.validate;
    o.validate_potentials = f.validate_potentials;
    o.memoize = !f.no_memo;
    if (f.positions == "full") o.positions = PositionDomain::Full;
    else if (f.positions == "tight") o.positions = PositionDomain::Tight;
    else throw UsageError("unknown position domain '" + f.positions + "' (full, tight)");
    return o;
}

json solve_stats(const Graph& g, const std::string& problem, const SolveOptions& o, const SolveStats& s) {
    json j;
    j["n"] = g.n();
    j["m"] = g.m();
    j["problem"] = problem;
    j["d"] = o.d;
    j["t"] = o.t;
    j["mode"] = mode_name(o.mode);
    j["nodes"] = nodes_json(s.explored);
    j["treeNodes"] = nodes_json(s.tree);
    j["memoHits"] = s.memo_hits;
    j["successChildren"] = s.success_children;
    j["secondaryEntries"] = s.secondary_entries;
    j["maxSuccessPerPath"] = s.max_success_per_path;
    j["maxSplitPerPath"] = s.max_split_per_path;
    j["rootLevel"] = s.root_level;
    j["timing"] = {{"elapsedMs", s.elapsed_ms}};
    return j;
}

std::optional<Weight> oracle_weight(const Graph& g, int d) {
    if (d == 0) {
        if (g.n() > kMwisOracleCap) return std::nullopt;
        return brute_mwis(g).weight;
    }
    if (g.n() > kDegenerateOracleCap) return std::nullopt;
    return brute_max_degenerate(g, d).weight;
}

int run_solve(const InstanceOpts& inst, const SolveFlags& f) {
    Graph g = load_instance(inst);
    SolveOptions o = solve_options(f);
    json stats;
    try {
        SolveResult r = solve_max_degenerate(g, o);
        std::cout << "weight: " << r.weight << "\n";
        std::cout << "solution: " << join(r.S) << "\n";
        stats = solve_stats(g, f.problem, o, r.stats);
        stats["weight"] = r.weight;
        stats["solution"] = set_json(r.S);
        stats["status"] = "ok";
        bool mismatch = false;
        if (f.check_oracle) {
            std::optional<Weight> w = oracle_weight(g, o.d);
            if (!w) {
                std::cout << "oracle-match: skipped (n above the oracle cap)\n";
            } else {
                std::cout << "oracle-match: " << (*w == r.weight ? "true" : "false") << "\n";
                stats["oracleMatch"] = *w == r.weight;
                mismatch = *w != r.weight;
            }
        }
        if (!f.stats_json.empty()) write_json(stats, f.stats_json);
        if (mismatch) throw Mismatch("solver weight differs from the oracle");
    } catch (const SolveBudgetExceeded& e) {
        if (!f.stats_json.empty()) {
            stats = solve_stats(g, f.problem, o, e.stats);
            stats["status"] = "budget";
            write_json(stats, f.stats_json);
        }
        throw;
    }
    return 0;
}

struct OracleFlags {
    std::string problem = "mwis";
    int d = 0;
};

int run_oracle(const InstanceOpts& inst, const OracleFlags& f) {
    Graph g = load_instance(inst);
    if (f.problem == "mwis" || f.problem == "degenerate") {
        int d = f.problem == "mwis" ? 0 : f.d;
        OracleResult r = d == 0 ? brute_mwis(g) : static_cast<OracleResult>(brute_max_degenerate(g, d));
        std::cout << "weight: " << r.weight << "\n";
        std::cout << "solution: " << join(r.witness) << "\n";
    } else if (f.problem == "longest-path") {
        std::cout << "length: " << brute_longest_induced_path(g) << "\n";
    } else if (f.problem == "longest-cycle") {
        std::cout << "length: " << brute_longest_induced_cycle(g) << "\n";
    } else {
        throw UsageError("unknown oracle problem '" + f.problem + "' (mwis, degenerate, longest-path, longest-cycle)");
    }
    return 0;
}

// --- separator / buckets -----------------------------------------------------

VertexSet parse_vertex_list(const std::string& s, const Graph& g) {
    if (s.empty()) return g.all();
    VertexSet out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        int v = 0;
        try {
            v = std::stoi(item);
        } catch (const std::exception&) {
            throw UsageError("bad vertex '" + item + "'");
        }
        if (v < 0 || v >= g.n()) throw UsageError("vertex " + item + " out of range");
        out.insert(v);
    }
    return out;
}

int run_separator(const InstanceOpts& inst, int t, const std::string& a_list) {
    Graph g = load_instance(inst);
    VertexSet a = parse_vertex_list(a_list, g);
    SeparatorResult r = connected_balanced_separator(g, t, a);
    json j;
    j["X"] = set_json(r.X);
    j["path"] = r.path;
    j["components"] = json::array();
    int balance = 0;
    for (const VertexSet& c : r.components) {
        j["components"].push_back(set_json(c));
        balance = std::max(balance, (c & a).size());
    }
    j["balance"] = balance;
    j["halfA"] = a.size() / 2.0;
    j["valid"] = is_balanced_separator(g, g.all(), a, r.X, t);
    write_json(j, "-");
    return 0;
}

int run_buckets(const InstanceOpts& inst, int t, const std::string& mode_s, const std::string& eps_s) {
    Graph g = load_instance(inst);
    Mode mode = parse_mode(mode_s);
    Rational eps = eps_s.empty() ? Rational(1, static_cast<std::uint64_t>(2 * t)) : parse_rational(eps_s);
    BucketIndex index;
    HeavyRule rule;
    if (mode == Mode::PtFree) {
        index = path_buckets(g, t).index;
        rule = pt_heavy_rule(eps);
    } else {
        index = tripod_buckets(g, t).index;
        rule = tripod_heavy_rule(eps);
    }
    json j;
    j["mode"] = mode_name(mode);
    j["t"] = t;
    j["eps"] = eps.to_string();
    j["arity"] = index.arity;
    j["universe"] = index.universe;
    j["buckets"] = index.bucket_count();
    j["witnesses"] = index.witnesses.size();
    j["memberships"] = index.total_memberships();
    j["maxBucketSize"] = index.max_bucket_size();
    HeavyScores scores = score_heavy(g, index, rule);
    j["scores"] = scores.qualifying;
    std::optional<int> h = heavy_vertex(g, index, rule);
    j["heavyVertex"] = h ? json(*h) : json(nullptr);
    write_json(j, "-");
    return 0;
}

// --- packing -----------------------------------------------------------------

struct PackingFlags {
    std::string family = "singletons";
    int c = 3;
    int t = 6;
    std::string mode = "pt";
    std::uint64_t budget_nodes = 1'000'000;
    double budget_secs = 300;
    bool check_oracle = false;
};

int run_packing(const InstanceOpts& inst, const PackingFlags& f) {
    Graph g = load_instance(inst);
    std::vector<FamilyMember> fam;
    if (f.family == "singletons") fam = singleton_family(g);
    else if (f.family == "cycles") fam = induced_cycle_family(g);
    else if (f.family == "connected-le-c") fam = connected_family(g, f.c);
    else throw UsageError("unknown family '" + f.family + "' (singletons, cycles, connected-le-c)");
    SolveOptions base;
    base.node_budget = f.budget_nodes;
    base.time_budget_s = f.budget_secs;
    PackingResult r = solve_max_induced_packing(g, fam, f.t, parse_mode(f.mode), base);
    json j;
    j["family"] = f.family;
    j["members"] = fam.size();
    j["weight"] = r.weight;
    j["chosenIndices"] = r.chosen;
    j["chosen"] = json::array();
    for (int i : r.chosen) j["chosen"].push_back(set_json(fam[static_cast<std::size_t>(i)].vertices));
    j["nodes"] = nodes_json(r.stats.explored);
    j["timing"] = {{"elapsedMs", r.stats.elapsed_ms}};
    bool mismatch = false;
    if (f.check_oracle && fam.size() > static_cast<std::size_t>(kPackingOracleCap)) {
        j["oracleMatch"] = nullptr;
    } else if (f.check_oracle) {
        std::vector<VertexSet> sets;
        std::vector<Weight> ws;
        for (const FamilyMember& m : fam) {
            sets.push_back(m.vertices);
            ws.push_back(m.weight);
        }
        Weight w = brute_max_packing(g, sets, ws).weight;
        j["oracleMatch"] = w == r.weight;
        mismatch = w != r.weight;
    }
    write_json(j, "-");
    if (mismatch) throw Mismatch("packing weight differs from the oracle");
    return 0;
}

// --- automaton ---------------------------------------------------------------

struct AutomatonFlags {
    std::string file;
    std::string builtin;
    int d = 2;
    int t = 6;
    std::uint64_t budget_nodes = 20'000'000;
    double budget_secs = 300;
    bool validate = false;
    bool no_memo = false;
    bool check_oracle = false;
    bool dump = false;
    std::string stats_json;
};

int run_automaton_cmd(const InstanceOpts& inst, const AutomatonFlags& f) {
    if (f.file.empty() == f.builtin.empty()) throw UsageError("give exactly one of --automaton and --builtin");
    ThresholdAutomaton a = f.file.empty() ? builtin_automaton(parse_builtin_automaton(f.builtin), f.d)
                                          : load_automaton_file(f.file, f.d);
    if (f.dump) {
        std::cout << automaton_to_json(a, f.d) << "\n";
        return 0;
    }
    Graph g = load_instance(inst);
    Labeller lab = default_labeller(f.d);
    TdSolveOptions o;
    o.d = f.d;
    o.t = f.t;
    o.node_budget = f.budget_nodes;
    o.time_budget_s = f.budget_secs;
    o.validate = f.validate;
    o.memoize = !f.no_memo;
    TdResult r = solve_td_automaton(g, a, lab, o);
    json stats;
    stats["n"] = g.n();
    stats["m"] = g.m();
    stats["problem"] = "automaton";
    stats["d"] = f.d;
    stats["t"] = f.t;
    stats["found"] = r.found;
    stats["weight"] = r.weight;
    stats["solution"] = set_json(r.S);
    stats["calls"] = r.stats.calls;
    stats["placements"] = r.stats.placements;
    stats["memoHits"] = r.stats.memo_hits;
    stats["topLevelCandidates"] = r.stats.top_level_candidates;
    stats["successChildren"] = r.stats.success_children;
    stats["cleaned"] = r.stats.cleaned;
    stats["closureBound"] = r.stats.closure_bound;
    stats["maxSuccessPerPath"] = r.stats.max_success_per_path;
    stats["timing"] = {{"elapsedMs", r.stats.elapsed_ms}};
    if (!r.found) {
        std::cout << "no solution\n";
    } else {
        std::cout << "weight: " << r.weight << "\n";
        std::cout << "solution: " << join(r.S) << "\n";
        std::string forest;
        for (int v : r.S) forest += (forest.empty() ? "" : " ") + std::to_string(v) + ":" + std::to_string(r.forest.parent[static_cast<std::size_t>(v)]);
        std::cout << "forest: " << forest << "\n";
    }
    bool mismatch = false;
    if (f.check_oracle) {
        if (g.n() > kTdOracleCap) {
            std::cout << "oracle-match: skipped (n above the oracle cap)\n";
        } else {
            TdOracleResult b = brute_td_automaton(g, f.d, a, lab);
            bool ok = b.found == r.found && b.weight == r.weight;
            std::cout << "oracle-match: " << (ok ? "true" : "false") << "\n";
            stats["oracleMatch"] = ok;
            mismatch = !ok;
        }
    }
    if (!f.stats_json.empty()) write_json(stats, f.stats_json);
    if (mismatch) throw Mismatch("automaton solver differs from the oracle");
    return 0;
}

// --- batch -------------------------------------------------------------------

// Spec: {"instances": [{"kind", "n": int or [ints], "p", "target", "t",
// "seeds": [..], "wmin", "wmax"}], "solvers": [{"problem", "d", "t", "mode",
// "budgetNodes", "budgetSecs", "positions", "validate", "checkOracle"}]}.
// Every instance row is run with every solver.
json batch_row(const json& inst, int n, std::uint64_t seed, const json& solver) {
    json row;
    row["instance"] = {{"kind", inst.value("kind", "random-gnp-rejection")}, {"n", n}, {"seed", seed}};
    row["solver"] = solver;
    InstanceOpts io;
    io.kind = inst.value("kind", "random-gnp-rejection");
    io.n = n;
    io.seed = seed;
    io.p = inst.value("p", 0.5);
    io.target = inst.value("target", "none");
    io.t = inst.value("t", 6);
    io.wmin = inst.value("wmin", Weight{1});
    io.wmax = inst.value("wmax", Weight{1});
    SolveFlags f;
    f.problem = solver.value("problem", "mwis");
    f.d = solver.value("d", 0);
    f.t = solver.value("t", 6);
    f.mode = solver.value("mode", "pt");
    f.budget_nodes = solver.value("budgetNodes", std::uint64_t{1'000'000});
    f.budget_secs = solver.value("budgetSecs", 300.0);
    f.positions = solver.value("positions", "full");
    f.validate = solver.value("validate", false);
    bool check = solver.value("checkOracle", false);
    Graph g;
    SolveOptions o;
    try {
        g = generate(io);
        o = solve_options(f);
        SolveResult r = solve_max_degenerate(g, o);
        json stats = solve_stats(g, f.problem, o, r.stats);
        stats.update(row);
        row = stats;
        row["weight"] = r.weight;
        row["solution"] = set_json(r.S);
        row["status"] = "ok";
        if (check) {
            std::optional<Weight> w = oracle_weight(g, o.d);
            row["oracleMatch"] = w ? json(*w == r.weight) : json(nullptr);
            if (w && *w != r.weight) row["status"] = "mismatch";
        }
    } catch (const SolveBudgetExceeded& e) {
        json stats = solve_stats(g, f.problem, o, e.stats);
        stats.update(row);
        row = stats;
        row["status"] = "budget";
    } catch (const BudgetExceeded& e) {
        row["status"] = "budget";
        row["error"] = e.what();
    } catch (const StructuralViolation& e) {
        row["status"] = "violation";
        row["error"] = e.what();
    } catch (const std::exception& e) {
        row["status"] = "error";
        row["error"] = e.what();
    }
    return row;
}

int run_batch(const std::string& spec_path, const std::string& out, const std::string& csv) {
    std::ifstream in(spec_path);
    if (!in) throw UsageError("cannot open batch spec " + spec_path);
    json spec;
    try {
        spec = json::parse(in);
    } catch (const json::exception& e) {
        throw UsageError(std::string("batch spec is not JSON: ") + e.what());
    }
    if (!spec.contains("instances") || !spec.contains("solvers")) throw UsageError("batch spec needs instances and solvers");
    json rows = json::array();
    for (const json& inst : spec["instances"]) {
        std::vector<int> ns;
        if (inst.contains("n") && inst["n"].is_array()) ns = inst["n"].get<std::vector<int>>();
        else ns.push_back(inst.value("n", 10));
        std::vector<std::uint64_t> seeds = inst.value("seeds", std::vector<std::uint64_t>{1});
        for (int n : ns)
            for (std::uint64_t seed : seeds)
                for (const json& solver : spec["solvers"]) rows.push_back(batch_row(inst, n, seed, solver));
    }
    json result = {{"rows", rows}};
    write_json(result, out);
    if (!csv.empty()) {
        std::ofstream c(csv);
        if (!c) throw UsageError("cannot write " + csv);
        c << "kind,n,seed,problem,d,t,mode,status,weight,oracleMatch,maxSuccessPerPath,maxSplitPerPath,rootLevel,elapsedMs\n";
        for (const json& r : rows) {
            auto get = [&](const char* k) { return r.contains(k) ? r[k].dump() : std::string(); };
            c << r["instance"]["kind"].get<std::string>() << "," << r["instance"]["n"] << "," << r["instance"]["seed"]
              << "," << r["solver"].value("problem", "mwis") << "," << get("d") << "," << get("t") << ","
              << r["solver"].value("mode", "pt") << "," << r["status"].get<std::string>() << "," << get("weight")
              << "," << get("oracleMatch") << "," << get("maxSuccessPerPath") << "," << get("maxSplitPerPath") << ","
              << get("rootLevel") << ","
              << (r.contains("timing") ? r["timing"]["elapsedMs"].dump() : std::string()) << "\n";
        }
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Induced subgraph solvers for P_t-free and long-hole-free graphs"};
    app.require_subcommand(1);

    InstanceOpts gen_opts;
    std::string gen_out;
    auto* gen = app.add_subcommand("gen", "generate an instance");
    add_generator_flags(gen, gen_opts);
    gen->add_option("--t", gen_opts.t, "t for the rejection target");
    gen->add_option("--out", gen_out, "output file (stdout when omitted)");

    InstanceOpts solve_inst;
    SolveFlags sf;
    auto* solve = app.add_subcommand("solve", "maximum-weight independent set or d-degenerate induced subgraph");
    add_instance_flags(solve, solve_inst);
    solve->add_option("--problem", sf.problem, "mwis or degenerate");
    solve->add_option("--d", sf.d, "degeneracy bound for --problem degenerate");
    solve->add_option("--t", sf.t, "forbidden path / long-hole length");
    solve->add_option("--mode", sf.mode, "pt or cgt");
    solve->add_option("--budget-nodes", sf.budget_nodes, "explored node budget");
    solve->add_option("--budget-secs", sf.budget_secs, "time budget in seconds");
    solve->add_flag("--check-oracle", sf.check_oracle, "compare with the exhaustive oracle when n is small");
    solve->add_option("--stats-json", sf.stats_json, "write statistics JSON here ('-' for stdout)");
    solve->add_flag("--validate", sf.validate, "in-run invariant assertions");
    solve->add_flag("--validate-potentials", sf.validate_potentials, "also monitor the potentials");
    solve->add_option("--positions", sf.positions, "position guesses: full or tight");
    solve->add_flag("--no-memo", sf.no_memo, "disable memoization");

    InstanceOpts oracle_inst;
    OracleFlags of;
    auto* oracle = app.add_subcommand("oracle", "exhaustive reference solvers");
    add_instance_flags(oracle, oracle_inst);
    oracle->add_option("--problem", of.problem, "mwis, degenerate, longest-path, longest-cycle");
    oracle->add_option("--d", of.d, "degeneracy bound");

    InstanceOpts sep_inst;
    int sep_t = 6;
    std::string sep_a;
    auto* sep = app.add_subcommand("separator", "connected balanced separator");
    add_instance_flags(sep, sep_inst);
    sep->add_option("--t", sep_t, "path length bound")->required();
    sep->add_option("--a", sep_a, "comma-separated vertex set A (all vertices when omitted)");

    InstanceOpts bk_inst;
    int bk_t = 6;
    std::string bk_mode = "pt", bk_eps;
    auto* bk = app.add_subcommand("buckets", "bucket statistics and heavy-vertex scores");
    add_instance_flags(bk, bk_inst);
    bk->add_option("--t", bk_t, "path length bound");
    bk->add_option("--mode", bk_mode, "pt (path buckets) or cgt (tripod buckets)");
    bk->add_option("--eps", bk_eps, "heaviness threshold (default 1/(2t))");

    InstanceOpts pk_inst;
    PackingFlags pf;
    auto* pk = app.add_subcommand("packing", "maximum-weight induced packing");
    add_instance_flags(pk, pk_inst);
    pk->add_option("--family", pf.family, "singletons, cycles, connected-le-c");
    pk->add_option("--c", pf.c, "member size bound for connected-le-c");
    pk->add_option("--t", pf.t, "forbidden path / long-hole length");
    pk->add_option("--mode", pf.mode, "pt or cgt");
    pk->add_option("--budget-nodes", pf.budget_nodes, "explored node budget");
    pk->add_option("--budget-secs", pf.budget_secs, "time budget in seconds");
    pk->add_flag("--check-oracle", pf.check_oracle, "compare with the exhaustive oracle when n is small");

    InstanceOpts au_inst;
    AutomatonFlags af;
    auto* au = app.add_subcommand("automaton", "largest induced subgraph accepted by a threshold automaton");
    add_instance_flags(au, au_inst);
    au->add_option("--automaton", af.file, "automaton JSON file");
    au->add_option("--builtin", af.builtin, "edgeless or matching");
    au->add_option("--d", af.d, "treedepth bound");
    au->add_option("--t", af.t, "forbidden path length");
    au->add_option("--budget-nodes", af.budget_nodes, "node budget");
    au->add_option("--budget-secs", af.budget_secs, "time budget in seconds");
    au->add_flag("--validate", af.validate, "partial-solution and potential assertions");
    au->add_flag("--no-memo", af.no_memo, "disable memoization");
    au->add_flag("--check-oracle", af.check_oracle, "compare with the exhaustive oracle when n is small");
    au->add_flag("--dump", af.dump, "print the automaton as JSON and exit");
    au->add_option("--stats-json", af.stats_json, "write statistics JSON here ('-' for stdout)");

    std::string batch_spec, batch_out, batch_csv;
    auto* batch = app.add_subcommand("batch", "run a grid of instances and solver configurations");
    batch->add_option("spec", batch_spec, "batch spec JSON")->required();
    batch->add_option("--out", batch_out, "rows JSON (stdout when omitted)");
    batch->add_option("--csv", batch_csv, "also write the rows as CSV");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    }

    try {
        if (*gen) {
            if (gen_opts.kind.empty()) throw UsageError("gen needs --kind");
            Graph g = generate(gen_opts);
            if (gen_out.empty()) std::cout << serialize_graph(g);
            else write_graph_file(g, gen_out);
            return 0;
        }
        if (*solve) return run_solve(solve_inst, sf);
        if (*oracle) return run_oracle(oracle_inst, of);
        if (*sep) return run_separator(sep_inst, sep_t, sep_a);
        if (*bk) return run_buckets(bk_inst, bk_t, bk_mode, bk_eps);
        if (*pk) return run_packing(pk_inst, pf);
        if (*au) return run_automaton_cmd(au_inst, af);
        if (*batch) return run_batch(batch_spec, batch_out, batch_csv);
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const ParseError& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return 2;
    } catch (const ContractViolation& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const ConfigurationError& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return 2;
    } catch (const StructuralViolation& e) {
        std::cerr << "structural violation: " << e.what();
        if (!e.certificate.empty()) {
            std::cerr << " (certificate:";
            for (int v : e.certificate) std::cerr << " " << v;
            std::cerr << ")";
        }
        std::cerr << "\n";
        return 1;
    } catch (const BudgetExceeded& e) {
        std::cerr << "budget exceeded: " << e.what() << "\n";
        return 1;
    } catch (const Mismatch& e) {
        std::cerr << "mismatch: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
