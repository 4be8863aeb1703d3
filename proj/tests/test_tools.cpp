// End-to-end checks of the command-line tool: generation, running,
// verification, rendering, and batch experiments, driven as subprocesses.

#include <catch2/catch_amalgamated.hpp>

#include <mutvis/simulator.hpp>
#include <mutvis/trace_io.hpp>

#include "fixtures.hpp"

#include <json.hpp>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#ifndef MUTVIS_CLI_PATH
#error "MUTVIS_CLI_PATH must point at the built command-line binary"
#endif

namespace fs = std::filesystem;
using namespace mutvis;

namespace {

struct CmdResult {
    int status = -1;
    std::string output; // stdout and stderr combined
};

CmdResult run_cli(const std::string& args) {
    const std::string cmd = std::string(MUTVIS_CLI_PATH) + " " + args + " 2>&1";
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    std::string out;
    char buf[4096];
    std::size_t n;
    while ((n = std::fread(buf, 1, sizeof buf, pipe)) > 0) out.append(buf, n);
    const int rc = pclose(pipe);
    CmdResult res;
    res.output = out;
    res.status = WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
    return res;
}

// Fresh scratch directory shared by the cases in this file.
const fs::path& scratch() {
    static const fs::path dir = [] {
        const fs::path d = fs::temp_directory_path() / "mutvis_cli_tests";
        fs::remove_all(d);
        fs::create_directories(d);
        return d;
    }();
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream is(p);
    REQUIRE(is.good());
    std::stringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

std::size_t count_occurrences(const std::string& text, const std::string& needle) {
    std::size_t count = 0;
    for (auto at = text.find(needle); at != std::string::npos;
         at = text.find(needle, at + needle.size())) {
        ++count;
    }
    return count;
}

} // namespace

TEST_CASE("gen writes configuration files matching the reference layouts") {
    const fs::path out = scratch() / "cycle4.json";
    const CmdResult res = run_cli("gen cycle4 --out " + out.string());
    REQUIRE(res.status == 0);
    const auto j = nlohmann::json::parse(slurp(out));
    const Configuration expect = fixtures::cycle4();
    REQUIRE(j.at("robots").size() == expect.size());
    for (std::size_t i = 0; i < expect.size(); ++i) {
        CHECK(j.at("robots")[i].at("id").get<int>() == expect[i].id);
        CHECK(j.at("robots")[i].at("x").get<double>() == expect[i].position.x);
        CHECK(j.at("robots")[i].at("y").get<double>() == expect[i].position.y);
        CHECK(j.at("robots")[i].at("bit").get<int>() == 0);
    }

    const CmdResult grid = run_cli("gen grid --k 3");
    REQUIRE(grid.status == 0);
    CHECK(nlohmann::json::parse(grid.output).at("robots").size() == 9);

    CHECK(run_cli("gen line").status != 0);    // --n missing
    CHECK(run_cli("gen blob --n 4").status != 0);
}

TEST_CASE("run simulates, reports a summary, and writes a loadable trace") {
    const fs::path trace = scratch() / "line3.jsonl";
    const CmdResult res =
        run_cli("run --gen line:3 --out " + trace.string() + " --seed 7");
    REQUIRE(res.status == 0);
    CHECK(res.output.find("outcome=reached_general_position") != std::string::npos);
    CHECK(res.output.find("completion_round=1") != std::string::npos);

    std::ifstream is(trace);
    const Trace tr = read_trace(is);
    CHECK(tr.spec.seed == 7);
    CHECK(tr.outcome.completion_round == 1);
    REQUIRE(tr.rounds.size() == 1);
}

TEST_CASE("run flags override configuration file values") {
    const fs::path cfg = scratch() / "grid.json";
    REQUIRE(run_cli("gen grid --k 3 --out " + cfg.string()).status == 0);
    const fs::path trace = scratch() / "grid_rr.jsonl";
    const CmdResult res = run_cli("run --config " + cfg.string() + " --out " +
                                  trace.string() +
                                  " --seed 11 --scheduler rr:2 --post-rounds 2");
    REQUIRE(res.status == 0);
    std::ifstream is(trace);
    const Trace tr = read_trace(is);
    CHECK(tr.spec.seed == 11);
    CHECK(tr.spec.scheduler.kind == ActivationKind::round_robin);
    CHECK(tr.spec.scheduler.block == 2);
    CHECK(tr.spec.post_completion_rounds == 2);
}

TEST_CASE("run distinguishes budget exhaustion from success in its exit code") {
    const fs::path trace = scratch() / "budget.jsonl";
    const CmdResult res =
        run_cli("run --gen line:10 --out " + trace.string() + " --max-rounds 2");
    CHECK(res.status == 2);
    CHECK(res.output.find("outcome=max_rounds_exceeded") != std::string::npos);
    CHECK(run_cli("run --gen line:3 --out " + trace.string() + " --max-rounds 0")
              .status != 0); // usage error
    CHECK(run_cli("run --gen line:3").status != 0); // --out missing
}

TEST_CASE("verify passes a fresh default run and writes a JSON report") {
    const fs::path trace = scratch() / "grid3.jsonl";
    REQUIRE(run_cli("run --gen grid:3 --out " + trace.string() + " --post-rounds 3")
                .status == 0);
    const fs::path report = scratch() / "report.json";
    const CmdResult res = run_cli("verify --trace " + trace.string() + " --report " +
                                  report.string());
    REQUIRE(res.status == 0);
    CHECK(count_occurrences(res.output, "PASS") == 6);
    const auto j = nlohmann::json::parse(slurp(report));
    CHECK(j.at("all_passed").get<bool>());
    REQUIRE(j.at("monitors").size() == 6);
    for (const auto& m : j.at("monitors")) {
        CHECK(m.at("verdict").get<std::string>() == "PASS");
        CHECK(m.at("violations").empty());
    }
}

TEST_CASE("verify fails forged traces and honors monitor selection") {
    // Forge a collision: both interior robots of a diamond stop on one point.
    Trace forged;
    forged.spec.initial = {{0, {0, 0}, 0}, {1, {4, 0}, 0}, {2, {2, 3}, 0}};
    RoundRecord rec;
    rec.round = 0;
    rec.activated = {0, 1};
    for (std::size_t i : {0u, 1u}) {
        ExecutedMove mv;
        mv.robot = i;
        mv.decision.action = MoveAction::move;
        mv.decision.destination = {2.0, 1.0};
        mv.executed = {2.0, 1.0};
        rec.moves.push_back(mv);
    }
    rec.after = forged.spec.initial;
    rec.after[0].position = {2.0, 1.0};
    rec.after[1].position = {2.0, 1.0};
    forged.rounds.push_back(rec);
    forged.outcome.kind = OutcomeKind::fault;
    forged.outcome.message = "robots 0 and 1 collided";
    const fs::path path = scratch() / "forged.jsonl";
    {
        std::ofstream os(path);
        write_trace(forged, os);
    }
    const CmdResult all = run_cli("verify --trace " + path.string());
    CHECK(all.status == 1);
    CHECK(all.output.find("collision_free        FAIL") != std::string::npos);

    // Selecting only a passing monitor must return success.
    const CmdResult sel =
        run_cli("verify --trace " + path.string() + " --monitor quiescence");
    CHECK(sel.status == 0);
    CHECK(sel.output.find("SKIPPED") != std::string::npos);

    CHECK(run_cli("verify --trace " + path.string() + " --monitor nonsense").status !=
          0);
}

TEST_CASE("verify treats an inapplicable hull claim as skipped, not failed") {
    const fs::path trace = scratch() / "line4.jsonl";
    REQUIRE(run_cli("run --gen line:4 --out " + trace.string()).status == 0);
    const CmdResult res =
        run_cli("verify --trace " + trace.string() + " --monitor hull");
    REQUIRE(res.status == 0);
    CHECK(res.output.find("hull_invariance") != std::string::npos);
    CHECK(res.output.find("SKIPPED") != std::string::npos);
}

TEST_CASE("verify rejects malformed trace files") {
    const fs::path bad = scratch() / "bad.jsonl";
    {
        std::ofstream os(bad);
        os << "this is not a trace\n";
    }
    const CmdResult res = run_cli("verify --trace " + bad.string());
    CHECK(res.status != 0);
    CHECK(res.output.find("error:") != std::string::npos);
}

TEST_CASE("render draws the initial line and the separated final state") {
    const fs::path trace = scratch() / "render_line3.jsonl";
    REQUIRE(run_cli("run --gen line:3 --out " + trace.string()).status == 0);

    const fs::path initial = scratch() / "initial.svg";
    REQUIRE(run_cli("render --trace " + trace.string() + " --round 0 --out " +
                    initial.string())
                .status == 0);
    const std::string svg0 = slurp(initial);
    CHECK(count_occurrences(svg0, "class=\"robot\"") == 3);
    CHECK(count_occurrences(svg0, "class=\"colline\"") == 1);
    CHECK(count_occurrences(svg0, "class=\"moved\"") == 0);

    const fs::path final_svg = scratch() / "final.svg";
    REQUIRE(run_cli("render --trace " + trace.string() + " --round 1 --out " +
                    final_svg.string())
                .status == 0);
    const std::string svg1 = slurp(final_svg);
    CHECK(count_occurrences(svg1, "class=\"robot\"") == 3);
    CHECK(count_occurrences(svg1, "class=\"colline\"") == 0);
    CHECK(count_occurrences(svg1, "class=\"moved\"") == 1); // the escape hop
}

TEST_CASE("render writes one file per recorded round under --all") {
    const fs::path trace = scratch() / "render_all.jsonl";
    REQUIRE(run_cli("run --gen line:5 --out " + trace.string() + " --post-rounds 1")
                .status == 0);
    const fs::path dir = scratch() / "frames";
    const CmdResult res =
        run_cli("render --trace " + trace.string() + " --all --out " + dir.string());
    REQUIRE(res.status == 0);
    CHECK(fs::exists(dir / "round_0001.svg"));
    CHECK(fs::exists(dir / "round_0002.svg"));
    CHECK_FALSE(fs::exists(dir / "round_0003.svg"));

    CHECK(run_cli("render --trace " + trace.string() + " --round 9 --out " +
                  (scratch() / "oob.svg").string())
              .status != 0);
    CHECK(run_cli("render --trace " + trace.string() + " --out x.svg").status != 0);
}

TEST_CASE("experiment sweeps a batch grid into a CSV") {
    const fs::path batch = scratch() / "batch.json";
    {
        std::ofstream os(batch);
        os << R"({"generators": ["line:3", "grid:3"], "schedulers": ["full", "rr:1"],)"
           << R"( "seeds": [1, 2], "post_rounds": 2})" << "\n";
    }
    const fs::path csv_path = scratch() / "results.csv";
    const CmdResult res = run_cli("experiment --batch " + batch.string() + " --out " +
                                  csv_path.string());
    REQUIRE(res.status == 0);
    const std::string csv = slurp(csv_path);
    CHECK(count_occurrences(csv, "\n") == 9); // header + 2*2*2 cells
    CHECK(csv.rfind("config,scheduler,delta,seed,completion_round,max_triples", 0) ==
          0);
    CHECK(csv.find("grid:3,full,0,1,1,8") != std::string::npos);
    CHECK(csv.find("-1") == std::string::npos); // every cell completed

    const fs::path empty = scratch() / "empty.json";
    {
        std::ofstream os(empty);
        os << R"({"generators": [], "schedulers": ["full"], "seeds": [1]})" << "\n";
    }
    CHECK(run_cli("experiment --batch " + empty.string()).status != 0);
}

TEST_CASE("experiment reports the cycle census collapsing for closed chains") {
    const fs::path batch = scratch() / "cycle_batch.json";
    {
        std::ofstream os(batch);
        os << R"({"generators": ["cycle4"], "schedulers": ["full"], "seeds": [1]})"
           << "\n";
    }
    const CmdResult res = run_cli("experiment --batch " + batch.string());
    REQUIRE(res.status == 0);
    CHECK(res.output.find("cycle4,full,0,1,1,16,PASS") != std::string::npos);
}
