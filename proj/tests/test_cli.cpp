#include <gtest/gtest.h>

#include <sys/wait.h>

#include <algorithm>
#include <array>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "json.hpp"

#include "isg/graph.hpp"

using nlohmann::json;

namespace {

struct Outcome {
    int code = -1;
    std::string out;
};

std::string cli() {
    const char* p = std::getenv("ISG_CLI");
    return p ? p : "isg";
}

Outcome run(const std::string& args) {
    Outcome r;
    std::string cmd = cli() + " " + args + " 2>/dev/null";
    FILE* pipe = popen(cmd.c_str(), "r");
    if (!pipe) return r;
    std::array<char, 4096> buf{};
    while (std::fgets(buf.data(), static_cast<int>(buf.size()), pipe)) r.out += buf.data();
    int status = pclose(pipe);
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

class Cli : public ::testing::Test {
protected:
    void SetUp() override {
        dir_ = std::filesystem::temp_directory_path() /
               ("isg_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
        std::filesystem::create_directories(dir_);
    }
    void TearDown() override { std::filesystem::remove_all(dir_); }

    std::string file(const std::string& name, const std::string& content) const {
        std::string p = (dir_ / name).string();
        std::ofstream(p) << content;
        return p;
    }
    std::string path(const std::string& name) const { return (dir_ / name).string(); }

    std::filesystem::path dir_;
};

std::string slurp(const std::string& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST_F(Cli, FiveCycle) {
    std::string c5 = file("c5.txt", "5 5\ne 0 1\ne 1 2\ne 2 3\ne 3 4\ne 0 4\n");
    Outcome r = run("solve --problem mwis --t 5 --mode pt " + c5);
    EXPECT_EQ(r.code, 0);
    EXPECT_NE(r.out.find("weight: 2\n"), std::string::npos) << r.out;
}

TEST_F(Cli, GenRoundTrip) {
    std::string g = path("g.txt");
    ASSERT_EQ(run("gen --kind random-interval --n 10 --seed 7 --out " + g).code, 0);
    std::string text = slurp(g);
    EXPECT_EQ(isg::serialize_graph(isg::parse_graph(text)), text);
    Outcome again = run("gen --kind random-interval --n 10 --seed 7");
    EXPECT_EQ(again.out, text);
}

TEST_F(Cli, CheckOracle) {
    Outcome r = run("solve --kind random-gnp-rejection --target pt --t 6 --n 12 --p 0.5 --seed 4 --wmax 50 --check-oracle");
    EXPECT_EQ(r.code, 0);
    EXPECT_NE(r.out.find("oracle-match: true"), std::string::npos) << r.out;
    Outcome d = run("solve --problem degenerate --d 1 --kind random-interval --n 10 --seed 2 --mode cgt --check-oracle");
    EXPECT_EQ(d.code, 0);
    EXPECT_NE(d.out.find("oracle-match: true"), std::string::npos) << d.out;
}

TEST_F(Cli, ExitCodes) {
    std::string c5 = file("c5.txt", "5 5\ne 0 1\ne 1 2\ne 2 3\ne 3 4\ne 0 4\n");
    EXPECT_EQ(run("solve --no-such-flag " + c5).code, 2);
    EXPECT_EQ(run("solve").code, 2);
    EXPECT_EQ(run("solve " + c5 + " --kind path").code, 2);
    EXPECT_EQ(run("solve --problem cliques " + c5).code, 2);
    EXPECT_EQ(run("solve " + file("bad.txt", "2 1\ne 0 5\n")).code, 2);
    EXPECT_EQ(run("solve --kind path --n 9 --t 6").code, 1);
    EXPECT_EQ(run("solve --kind random-interval --n 12 --mode cgt --budget-nodes 3").code, 1);
    EXPECT_EQ(run("--help").code, 0);
}

TEST_F(Cli, StatsDeterministic) {
    std::string a = path("a.json"), b = path("b.json");
    std::string args = "solve --problem degenerate --d 1 --kind random-chordal --n 11 --p 0.5 --seed 9 --mode cgt --stats-json ";
    ASSERT_EQ(run(args + a).code, 0);
    ASSERT_EQ(run(args + b).code, 0);
    json ja = json::parse(slurp(a)), jb = json::parse(slurp(b));
    for (const char* key : {"n", "m", "problem", "weight", "solution", "nodes", "maxSuccessPerPath", "maxSplitPerPath"})
        EXPECT_TRUE(ja.contains(key)) << key;
    for (const char* key : {"leaf", "filter", "split", "branch", "free"}) EXPECT_TRUE(ja["nodes"].contains(key)) << key;
    ASSERT_TRUE(ja["timing"].contains("elapsedMs"));
    ja.erase("timing");
    jb.erase("timing");
    EXPECT_EQ(ja.dump(), jb.dump());
}

TEST_F(Cli, Separator) {
    Outcome r = run("separator --kind random-gnp-rejection --target pt --t 6 --n 14 --seed 3 --a 0,1,2,3,4,5");
    ASSERT_EQ(r.code, 0);
    json j = json::parse(r.out);
    EXPECT_TRUE(j["valid"].get<bool>());
    EXPECT_LE(j["X"].size(), 6u);
    EXPECT_LE(j["balance"].get<double>(), j["halfA"].get<double>());
}

TEST_F(Cli, Buckets) {
    Outcome r = run("buckets --kind random-gnp-rejection --target pt --t 6 --n 10 --seed 5");
    ASSERT_EQ(r.code, 0);
    json j = json::parse(r.out);
    EXPECT_EQ(j["universe"].get<int>(), 45);
    EXPECT_EQ(j["buckets"].get<int>(), 45);
    EXPECT_FALSE(j["heavyVertex"].is_null());
}

TEST_F(Cli, Packing) {
    Outcome r = run("packing --family cycles --kind random-interval --n 10 --seed 7 --mode cgt --check-oracle");
    ASSERT_EQ(r.code, 0);
    json j = json::parse(r.out);
    EXPECT_TRUE(j["oracleMatch"].get<bool>());
    EXPECT_EQ(j["chosen"].size(), j["chosenIndices"].size());
    EXPECT_EQ(run("packing --family stars --kind path --n 4").code, 2);
}

TEST_F(Cli, Automaton) {
    std::string inst = "--kind random-gnp-rejection --target pt --t 6 --n 10 --seed 3 --wmax 9";
    Outcome m = run("automaton --builtin matching --d 2 --check-oracle --validate " + inst);
    EXPECT_EQ(m.code, 0);
    EXPECT_NE(m.out.find("oracle-match: true"), std::string::npos) << m.out;

    Outcome dump = run("automaton --builtin edgeless --d 1 --dump");
    ASSERT_EQ(dump.code, 0);
    std::string a = file("edgeless.json", dump.out);
    Outcome e = run("automaton --automaton " + a + " --d 1 --check-oracle " + inst);
    EXPECT_EQ(e.code, 0);
    EXPECT_NE(e.out.find("oracle-match: true"), std::string::npos) << e.out;
    Outcome mwis = run("solve " + inst);
    EXPECT_EQ(e.out.substr(0, e.out.find('\n')), mwis.out.substr(0, mwis.out.find('\n')));

    std::string none = file("none.json", R"({"states": ["q"], "tau": 1, "default": "q", "delta": [], "accept": []})");
    Outcome n = run("automaton --automaton " + none + " --d 1 " + inst);
    EXPECT_EQ(n.code, 0);
    EXPECT_NE(n.out.find("no solution"), std::string::npos);

    EXPECT_EQ(run("automaton " + inst).code, 2);
    EXPECT_EQ(run("automaton --automaton " + file("broken.json", "{") + " " + inst).code, 2);
}

TEST_F(Cli, Batch) {
    std::string spec = file("spec.json", R"({
      "instances": [{"kind": "random-gnp-rejection", "n": [8, 9, 10], "p": 0.5, "target": "pt", "t": 6, "seeds": [1], "wmax": 20}],
      "solvers": [{"problem": "mwis", "mode": "pt", "checkOracle": true}]
    })");
    Outcome r = run("batch " + spec);
    ASSERT_EQ(r.code, 0);
    json rows = json::parse(r.out)["rows"];
    ASSERT_EQ(rows.size(), 3u);
    for (const json& row : rows) {
        EXPECT_EQ(row["status"], "ok");
        EXPECT_TRUE(row["oracleMatch"].get<bool>());
        EXPECT_TRUE(row.contains("maxSuccessPerPath"));
    }

    std::string tight = file("tight.json", R"({
      "instances": [{"kind": "random-interval", "n": 10, "seeds": [1, 2]}],
      "solvers": [{"problem": "degenerate", "d": 1, "mode": "cgt", "budgetNodes": 5}]
    })");
    std::string csv = path("rows.csv");
    Outcome b = run("batch " + tight + " --csv " + csv);
    ASSERT_EQ(b.code, 0);
    for (const json& row : json::parse(b.out)["rows"]) EXPECT_EQ(row["status"], "budget");
    std::string text = slurp(csv);
    EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 3);
}
