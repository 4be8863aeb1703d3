// Command-line front end: generate starting configurations, run simulations,
// verify traces with the monitor suite, render SVG snapshots, and batch
// experiment grids to CSV.

#include <CLI11.hpp>

#include <mutvis/render.hpp>
#include <mutvis/simulator.hpp>
#include <mutvis/trace_io.hpp>
#include <mutvis/verify.hpp>

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace {

using mutvis::detail::ordered_json;

ordered_json load_json_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot open '" + path + "'");
    try {
        return ordered_json::parse(is);
    } catch (const nlohmann::json::exception& e) {
        throw std::runtime_error("bad JSON in '" + path + "': " + e.what());
    }
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot write '" + path + "'");
    os << content;
}

mutvis::Trace load_trace(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot open '" + path + "'");
    return mutvis::read_trace(is);
}

// Scheduler strings: full | rr:<k> | random:<p>:<F> | script:<file>.
// A script file is JSON: {"window": W, "rounds": [[robot ids], ...]}.
mutvis::ActivationPolicy parse_scheduler(const std::string& s) {
    try {
        if (s == "full") return mutvis::ActivationPolicy::full_sync();
        if (s.rfind("rr:", 0) == 0) {
            return mutvis::ActivationPolicy::round_robin(std::stoi(s.substr(3)));
        }
        if (s.rfind("random:", 0) == 0) {
            const std::string rest = s.substr(7);
            const auto colon = rest.find(':');
            if (colon == std::string::npos) throw std::invalid_argument(s);
            return mutvis::ActivationPolicy::random_fair(
                std::stod(rest.substr(0, colon)), std::stoi(rest.substr(colon + 1)));
        }
        if (s.rfind("script:", 0) == 0) {
            const ordered_json j = load_json_file(s.substr(7));
            return mutvis::ActivationPolicy::scripted(
                j.at("rounds").get<std::vector<std::vector<std::size_t>>>(),
                j.at("window").get<int>());
        }
    } catch (const std::runtime_error&) {
        throw;
    } catch (const std::exception&) {
        // fall through to the usage message
    }
    throw std::runtime_error("bad scheduler '" + s +
                             "' (expected full | rr:<k> | random:<p>:<F> | script:<file>)");
}

ordered_json robots_json(const mutvis::Configuration& c) {
    ordered_json arr = ordered_json::array();
    for (const auto& r : c) {
        arr.push_back({{"id", r.id},
                       {"x", r.position.x},
                       {"y", r.position.y},
                       {"bit", r.bit}});
    }
    return arr;
}

// A configuration file needs a robots array; every other key of the trace
// header schema (seed, max_rounds, post_completion_rounds, tolerances,
// scheduler, adversary, frames) is optional and falls back to defaults.
// A trace header line itself is a valid configuration file.
mutvis::SimulationSpec load_spec_file(const std::string& path) {
    const ordered_json j = load_json_file(path);
    mutvis::SimulationSpec spec;
    if (!j.contains("robots")) {
        throw std::runtime_error("'" + path + "' has no robots array");
    }
    try {
        spec.initial = mutvis::detail::robots_from_json(j.at("robots"));
        if (j.contains("seed")) spec.seed = j.at("seed").get<std::uint64_t>();
        if (j.contains("max_rounds")) {
            spec.max_rounds = j.at("max_rounds").get<std::uint64_t>();
        }
        if (j.contains("post_completion_rounds")) {
            spec.post_completion_rounds =
                j.at("post_completion_rounds").get<std::uint64_t>();
        }
        if (j.contains("tolerances")) {
            const auto& t = j.at("tolerances");
            spec.tol.eps_col = t.value("eps_col", spec.tol.eps_col);
            spec.tol.eps_dist = t.value("eps_dist", spec.tol.eps_dist);
        }
        if (j.contains("scheduler")) {
            spec.scheduler = mutvis::detail::scheduler_from_json(j.at("scheduler"));
        }
        if (j.contains("adversary")) {
            spec.adversary = mutvis::detail::adversary_from_json(j.at("adversary"));
        }
        if (j.contains("frames")) {
            spec.frames =
                mutvis::detail::frames_from_json(j.at("frames").get<std::string>());
        }
    } catch (const nlohmann::json::exception& e) {
        throw std::runtime_error("bad configuration in '" + path + "': " + e.what());
    }
    return spec;
}

const std::vector<std::string>& monitor_names() {
    static const std::vector<std::string> names = {
        "no_new_collinearity", "height_bound",          "collision_free",
        "hull_invariance",     "quiescence",            "progress"};
    return names;
}

// Accept a full monitor name or any unambiguous prefix ("hull", "prog", ...).
std::string resolve_monitor(const std::string& sel) {
    std::vector<std::string> hits;
    for (const auto& name : monitor_names()) {
        if (name == sel) return name;
        if (name.rfind(sel, 0) == 0) hits.push_back(name);
    }
    if (hits.size() == 1) return hits[0];
    throw std::runtime_error("unknown or ambiguous monitor '" + sel + "'");
}

ordered_json report_json(const mutvis::VerificationReport& rep,
                         const std::vector<std::string>& selected) {
    ordered_json monitors = ordered_json::array();
    for (const auto& m : rep.monitors) {
        if (std::find(selected.begin(), selected.end(), m.name) == selected.end()) {
            continue;
        }
        ordered_json mj;
        mj["name"] = m.name;
        mj["verdict"] = mutvis::verdict_name(m.verdict);
        if (!m.note.empty()) mj["note"] = m.note;
        ordered_json viols = ordered_json::array();
        for (const auto& v : m.violations) {
            viols.push_back({{"round", v.round},
                             {"robots", v.robots},
                             {"values", v.values},
                             {"message", v.message}});
        }
        mj["violations"] = viols;
        if (!m.triples_per_round.empty()) mj["triples_per_round"] = m.triples_per_round;
        if (!m.cycles_per_round.empty()) mj["cycles_per_round"] = m.cycles_per_round;
        if (!m.first_terminal_round.empty()) {
            mj["first_terminal_round"] = m.first_terminal_round;
        }
        monitors.push_back(mj);
    }
    bool all_ok = true;
    for (const auto& m : rep.monitors) {
        if (std::find(selected.begin(), selected.end(), m.name) != selected.end() &&
            m.verdict == mutvis::Verdict::fail) {
            all_ok = false;
        }
    }
    ordered_json j;
    j["monitors"] = monitors;
    j["all_passed"] = all_ok;
    return j;
}

const char* outcome_word(mutvis::OutcomeKind k) {
    switch (k) {
    case mutvis::OutcomeKind::reached_general_position:
        return "reached_general_position";
    case mutvis::OutcomeKind::max_rounds_exceeded: return "max_rounds_exceeded";
    case mutvis::OutcomeKind::fault: return "fault";
    }
    return "fault";
}

int do_run(const mutvis::SimulationSpec& spec, const std::string& out_path) {
    const mutvis::Trace tr = mutvis::run(spec);
    std::ostringstream os;
    mutvis::write_trace(tr, os);
    write_text_file(out_path, os.str());

    std::size_t move_count = 0;
    for (const auto& rec : tr.rounds) {
        for (const auto& mv : rec.moves) {
            if (mv.decision.action == mutvis::MoveAction::move) ++move_count;
        }
    }
    std::cout << "outcome=" << outcome_word(tr.outcome.kind);
    if (tr.outcome.kind == mutvis::OutcomeKind::reached_general_position) {
        std::cout << " completion_round=" << tr.outcome.completion_round;
    }
    std::cout << " rounds_recorded=" << tr.rounds.size()
              << " move_decisions=" << move_count << '\n';
    switch (tr.outcome.kind) {
    case mutvis::OutcomeKind::reached_general_position: return 0;
    case mutvis::OutcomeKind::max_rounds_exceeded: return 2;
    case mutvis::OutcomeKind::fault:
        std::cerr << "fault after " << tr.rounds.size()
                  << " recorded rounds: " << tr.outcome.message << '\n';
        return 1;
    }
    return 1;
}

int do_verify(const std::string& trace_path, std::vector<std::string> selections,
              const std::string& report_path) {
    const mutvis::Trace tr = load_trace(trace_path);
    std::vector<std::string> selected;
    if (selections.empty()) {
        selected = monitor_names();
    } else {
        for (const auto& s : selections) selected.push_back(resolve_monitor(s));
    }
    const mutvis::VerificationReport rep = mutvis::run_all_monitors(tr);

    bool any_fail = false;
    for (const auto& name : selected) {
        const mutvis::MonitorReport* m = rep.find(name);
        std::cout << name << std::string(22 - std::min<std::size_t>(21, name.size()), ' ')
                  << mutvis::verdict_name(m->verdict);
        if (!m->violations.empty()) std::cout << "  violations=" << m->violations.size();
        if (!m->note.empty()) std::cout << "  (" << m->note << ')';
        std::cout << '\n';
        if (m->verdict == mutvis::Verdict::fail) any_fail = true;
    }
    if (!report_path.empty()) {
        write_text_file(report_path, report_json(rep, selected).dump(2) + "\n");
    }
    return any_fail ? 1 : 0;
}

int do_render(const std::string& trace_path, std::optional<std::uint64_t> round,
              bool all, const std::string& out_path) {
    const mutvis::Trace tr = load_trace(trace_path);
    const auto bounds = mutvis::detail::boundaries(tr);
    if (round) {
        if (*round >= bounds.size()) {
            throw std::runtime_error(
                "round " + std::to_string(*round) + " out of range (trace has " +
                std::to_string(bounds.size() - 1) + " rounds)");
        }
        const mutvis::Configuration* prev =
            *round > 0 ? &bounds[*round - 1] : nullptr;
        write_text_file(out_path,
                        mutvis::render_svg(bounds[*round], prev, tr.spec.tol));
        std::cout << "wrote " << out_path << '\n';
        return 0;
    }
    // --all: one file per recorded round, showing the state that round ends in.
    std::filesystem::create_directories(out_path);
    for (std::size_t k = 1; k < bounds.size(); ++k) {
        char name[32];
        std::snprintf(name, sizeof name, "round_%04zu.svg", k);
        const auto file = std::filesystem::path(out_path) / name;
        write_text_file(file.string(),
                        mutvis::render_svg(bounds[k], &bounds[k - 1], tr.spec.tol));
    }
    std::cout << "wrote " << bounds.size() - 1 << " files to " << out_path << '\n';
    if (all && bounds.size() == 1) {
        std::cerr << "trace has no recorded rounds; only --round 0 would render\n";
    }
    return 0;
}

int do_experiment(const std::string& batch_path, const std::string& out_path) {
    const ordered_json batch = load_json_file(batch_path);
    std::vector<std::string> generators, schedulers;
    std::vector<std::uint64_t> seeds;
    std::vector<double> deltas = {0.0};
    try {
        generators = batch.at("generators").get<std::vector<std::string>>();
        schedulers = batch.at("schedulers").get<std::vector<std::string>>();
        seeds = batch.at("seeds").get<std::vector<std::uint64_t>>();
        if (batch.contains("deltas")) {
            deltas = batch.at("deltas").get<std::vector<double>>();
        }
    } catch (const nlohmann::json::exception& e) {
        throw std::runtime_error("bad batch spec: " + std::string(e.what()));
    }
    if (generators.empty() || schedulers.empty() || seeds.empty() || deltas.empty()) {
        throw std::runtime_error(
            "batch needs non-empty generators, schedulers, and seeds");
    }

    std::ostringstream csv;
    csv << "config,scheduler,delta,seed,completion_round,max_triples";
    for (const auto& name : monitor_names()) csv << ',' << name;
    csv << '\n';

    bool any_bad = false;
    for (const auto& gen : generators) {
        for (const auto& sched : schedulers) {
            for (const double delta : deltas) {
                for (const std::uint64_t seed : seeds) {
                    mutvis::SimulationSpec spec;
                    spec.initial = mutvis::generate(gen, seed);
                    spec.scheduler = parse_scheduler(sched);
                    spec.adversary = delta > 0.0
                                         ? mutvis::MotionAdversary::truncate(delta)
                                         : mutvis::MotionAdversary::rigid();
                    spec.seed = seed;
                    if (batch.contains("max_rounds")) {
                        spec.max_rounds = batch.at("max_rounds").get<std::uint64_t>();
                    }
                    if (batch.contains("post_rounds")) {
                        spec.post_completion_rounds =
                            batch.at("post_rounds").get<std::uint64_t>();
                    }
                    const mutvis::Trace tr = mutvis::run(spec);
                    const mutvis::VerificationReport rep = mutvis::run_all_monitors(tr);
                    const mutvis::MonitorReport* progress = rep.find("progress");
                    std::size_t max_triples = 0;
                    for (const std::size_t c : progress->triples_per_round) {
                        max_triples = std::max(max_triples, c);
                    }
                    const bool reached = tr.outcome.kind ==
                                         mutvis::OutcomeKind::reached_general_position;
                    if (!reached) any_bad = true;
                    csv << gen << ',' << sched << ',' << delta << ',' << seed << ','
                        << (reached
                                ? std::to_string(tr.outcome.completion_round)
                                : std::string("-1"))
                        << ',' << max_triples;
                    for (const auto& name : monitor_names()) {
                        const mutvis::MonitorReport* m = rep.find(name);
                        csv << ',' << mutvis::verdict_name(m->verdict);
                        // The height-decay bound is a diagnostic, not a gate:
                        // once triangles shrink to the floating-point floor,
                        // clamped minimum hops legitimately outrun it. The
                        // safety and progress monitors decide the exit code.
                        if (m->verdict == mutvis::Verdict::fail &&
                            name != "height_bound") {
                            any_bad = true;
                        }
                    }
                    csv << '\n';
                }
            }
        }
    }
    if (out_path.empty()) {
        std::cout << csv.str();
    } else {
        write_text_file(out_path, csv.str());
        std::cout << "wrote " << out_path << '\n';
    }
    return any_bad ? 1 : 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Simulator and verification harness for swarms of opaque point "
                 "robots seeking mutual visibility"};
    app.require_subcommand(1);

    // ---- gen ----
    auto* gen = app.add_subcommand("gen", "Write a starting configuration file");
    std::string gen_pattern;
    int gen_n = 0, gen_k = 0;
    std::uint64_t gen_seed = 1;
    std::string gen_out;
    gen->add_option("pattern", gen_pattern,
                    "line | grid | star | cycle4 | random")
        ->required();
    gen->add_option("--n", gen_n, "robot count (line, random)");
    gen->add_option("--k", gen_k, "grid side length");
    gen->add_option("--seed", gen_seed, "seed (random pattern)");
    gen->add_option("--out", gen_out, "output path (default: stdout)");

    // ---- run ----
    auto* run_cmd = app.add_subcommand("run", "Simulate and write a JSONL trace");
    std::string run_config, run_gen, run_out, run_sched = "full",
                run_frames = "identity";
    std::uint64_t run_seed = 1, run_max_rounds = 100000, run_post = 0;
    double run_delta = 0.0, run_tol = 1e-9;
    run_cmd->add_option("--config", run_config, "configuration JSON file");
    run_cmd->add_option("--gen", run_gen, "generate the start instead (e.g. line:5)");
    run_cmd->add_option("--out", run_out, "trace output path")->required();
    run_cmd->add_option("--seed", run_seed, "run seed");
    run_cmd->add_option("--max-rounds", run_max_rounds, "round budget")
        ->check(CLI::PositiveNumber);
    run_cmd->add_option("--post-rounds", run_post,
                        "extra rounds recorded after completion");
    run_cmd->add_option("--scheduler", run_sched,
                        "full | rr:<k> | random:<p>:<F> | script:<file>");
    run_cmd->add_option("--delta", run_delta,
                        "guaranteed progress distance (enables motion truncation)")
        ->check(CLI::PositiveNumber);
    run_cmd->add_option("--frames", run_frames, "identity | random");
    run_cmd->add_option("--tol", run_tol, "collinearity tolerance")
        ->check(CLI::PositiveNumber);

    // ---- verify ----
    auto* verify_cmd = app.add_subcommand("verify", "Run trace monitors");
    std::string verify_trace, verify_report;
    std::vector<std::string> verify_monitors;
    verify_cmd->add_option("--trace", verify_trace, "JSONL trace path")->required();
    verify_cmd->add_option("--monitor", verify_monitors,
                           "monitor name or prefix (default: all)");
    verify_cmd->add_option("--report", verify_report, "write a JSON report here");

    // ---- render ----
    auto* render_cmd = app.add_subcommand("render", "Render SVG snapshots");
    std::string render_trace, render_out;
    std::uint64_t render_round = 0;
    bool render_all = false;
    render_cmd->add_option("--trace", render_trace, "JSONL trace path")->required();
    auto* round_opt = render_cmd->add_option(
        "--round", render_round, "0 = initial state, k = state after round k");
    render_cmd->add_flag("--all", render_all, "one SVG per recorded round");
    render_cmd->add_option("--out", render_out,
                           "output file (--round) or directory (--all)")
        ->required();

    // ---- experiment ----
    auto* exp_cmd = app.add_subcommand("experiment", "Run a batch grid to CSV");
    std::string exp_batch, exp_out;
    exp_cmd->add_option("--batch", exp_batch, "batch JSON file")->required();
    exp_cmd->add_option("--out", exp_out, "CSV output path (default: stdout)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*gen) {
            std::string name;
            if (gen_pattern == "line" || gen_pattern == "random") {
                if (gen_n <= 0) throw std::runtime_error("--n is required for " + gen_pattern);
                name = gen_pattern + ":" + std::to_string(gen_n);
            } else if (gen_pattern == "grid") {
                if (gen_k <= 0) throw std::runtime_error("--k is required for grid");
                name = "grid:" + std::to_string(gen_k);
            } else if (gen_pattern == "star" || gen_pattern == "cycle4") {
                name = gen_pattern;
            } else {
                throw std::runtime_error("unknown pattern '" + gen_pattern + "'");
            }
            ordered_json j;
            j["robots"] = robots_json(mutvis::generate(name, gen_seed));
            const std::string text = j.dump(2) + "\n";
            if (gen_out.empty()) {
                std::cout << text;
            } else {
                write_text_file(gen_out, text);
                std::cout << "wrote " << gen_out << '\n';
            }
            return 0;
        }
        if (*run_cmd) {
            if (run_config.empty() == run_gen.empty()) {
                throw std::runtime_error("pass exactly one of --config and --gen");
            }
            mutvis::SimulationSpec spec;
            if (!run_config.empty()) {
                spec = load_spec_file(run_config);
            } else {
                spec.initial = mutvis::generate(run_gen, run_seed);
            }
            if (run_cmd->count("--seed")) spec.seed = run_seed;
            if (run_cmd->count("--max-rounds")) spec.max_rounds = run_max_rounds;
            if (run_cmd->count("--post-rounds")) spec.post_completion_rounds = run_post;
            if (run_cmd->count("--scheduler")) {
                spec.scheduler = parse_scheduler(run_sched);
            }
            if (run_cmd->count("--delta")) {
                spec.adversary = mutvis::MotionAdversary::truncate(run_delta);
            }
            if (run_cmd->count("--frames")) {
                spec.frames = mutvis::detail::frames_from_json(run_frames);
            }
            if (run_cmd->count("--tol")) spec.tol.eps_col = run_tol;
            return do_run(spec, run_out);
        }
        if (*verify_cmd) {
            return do_verify(verify_trace, verify_monitors, verify_report);
        }
        if (*render_cmd) {
            if (round_opt->count() == 0 && !render_all) {
                throw std::runtime_error("pass --round <k> or --all");
            }
            if (round_opt->count() > 0 && render_all) {
                throw std::runtime_error("--round and --all are exclusive");
            }
            std::optional<std::uint64_t> round;
            if (round_opt->count() > 0) round = render_round;
            return do_render(render_trace, round, render_all, render_out);
        }
        if (*exp_cmd) {
            return do_experiment(exp_batch, exp_out);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
