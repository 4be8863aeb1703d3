#pragma once

// Trace serialization: one JSON object per line. A trace file is a header
// line echoing the full simulation setup, one line per executed round, and
// an outcome trailer. Doubles are written in shortest round-trip form, so
// re-serializing a parsed trace reproduces the file byte for byte.

#include <mutvis/simulator.hpp>

#include <json.hpp>

#include <istream>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <string>

namespace mutvis {

struct TraceFormatError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

namespace detail {

using ordered_json = nlohmann::ordered_json;

inline ordered_json num_or_null(double v) {
    if (std::isfinite(v)) return v;
    return nullptr;
}

inline double null_or_num(const ordered_json& j) {
    if (j.is_null()) return std::numeric_limits<double>::infinity();
    return j.get<double>();
}

inline const char* kind_name(ActivationKind k) {
    switch (k) {
    case ActivationKind::full_sync: return "full_sync";
    case ActivationKind::round_robin: return "round_robin";
    case ActivationKind::random_fair: return "random_fair";
    case ActivationKind::scripted: return "scripted";
    }
    return "full_sync";
}

inline ActivationKind parse_kind(const std::string& s) {
    if (s == "full_sync") return ActivationKind::full_sync;
    if (s == "round_robin") return ActivationKind::round_robin;
    if (s == "random_fair") return ActivationKind::random_fair;
    if (s == "scripted") return ActivationKind::scripted;
    throw TraceFormatError("unknown scheduler kind: " + s);
}

inline ordered_json spec_json(const SimulationSpec& spec) {
    ordered_json j;
    j["type"] = "header";
    j["version"] = 1;
    j["seed"] = spec.seed;
    j["max_rounds"] = spec.max_rounds;
    j["post_completion_rounds"] = spec.post_completion_rounds;
    j["tolerances"] = {{"eps_col", spec.tol.eps_col}, {"eps_dist", spec.tol.eps_dist}};
    ordered_json sched;
    sched["kind"] = kind_name(spec.scheduler.kind);
    switch (spec.scheduler.kind) {
    case ActivationKind::full_sync: break;
    case ActivationKind::round_robin: sched["block"] = spec.scheduler.block; break;
    case ActivationKind::random_fair:
        sched["include_p"] = spec.scheduler.include_p;
        sched["window"] = spec.scheduler.window;
        break;
    case ActivationKind::scripted:
        sched["window"] = spec.scheduler.window;
        sched["rounds"] = spec.scheduler.script;
        break;
    }
    j["scheduler"] = sched;
    ordered_json adv;
    adv["kind"] = spec.adversary.kind == AdversaryKind::rigid ? "rigid" : "truncate";
    if (spec.adversary.kind == AdversaryKind::truncate) {
        adv["delta"] = spec.adversary.delta;
    }
    j["adversary"] = adv;
    j["frames"] = spec.frames == FrameMode::identity ? "identity" : "random";
    ordered_json robots = ordered_json::array();
    for (const auto& r : spec.initial) {
        robots.push_back({{"id", r.id},
                          {"x", r.position.x},
                          {"y", r.position.y},
                          {"bit", r.bit}});
    }
    j["robots"] = robots;
    return j;
}

inline ActivationPolicy scheduler_from_json(const ordered_json& sched) {
    ActivationPolicy pol;
    pol.kind = parse_kind(sched.at("kind").get<std::string>());
    switch (pol.kind) {
    case ActivationKind::full_sync: break;
    case ActivationKind::round_robin:
        pol.block = sched.at("block").get<int>();
        break;
    case ActivationKind::random_fair:
        pol.include_p = sched.at("include_p").get<double>();
        pol.window = sched.at("window").get<int>();
        break;
    case ActivationKind::scripted:
        pol.window = sched.at("window").get<int>();
        pol.script = sched.at("rounds").get<std::vector<std::vector<std::size_t>>>();
        break;
    }
    return pol;
}

inline MotionAdversary adversary_from_json(const ordered_json& adv) {
    const std::string akind = adv.at("kind").get<std::string>();
    if (akind == "rigid") return MotionAdversary::rigid();
    if (akind == "truncate") {
        return MotionAdversary::truncate(adv.at("delta").get<double>());
    }
    throw TraceFormatError("unknown adversary kind: " + akind);
}

inline FrameMode frames_from_json(const std::string& s) {
    if (s == "identity") return FrameMode::identity;
    if (s == "random") return FrameMode::random_per_round;
    throw TraceFormatError("unknown frame mode: " + s);
}

inline Configuration robots_from_json(const ordered_json& arr) {
    Configuration c;
    for (const auto& r : arr) {
        c.push_back({r.at("id").get<int>(),
                     {r.at("x").get<double>(), r.at("y").get<double>()},
                     r.at("bit").get<int>()});
    }
    return c;
}

inline SimulationSpec spec_from_json(const ordered_json& j) {
    SimulationSpec spec;
    spec.seed = j.at("seed").get<std::uint64_t>();
    spec.max_rounds = j.at("max_rounds").get<std::uint64_t>();
    spec.post_completion_rounds = j.at("post_completion_rounds").get<std::uint64_t>();
    spec.tol.eps_col = j.at("tolerances").at("eps_col").get<double>();
    spec.tol.eps_dist = j.at("tolerances").at("eps_dist").get<double>();
    spec.scheduler = scheduler_from_json(j.at("scheduler"));
    spec.adversary = adversary_from_json(j.at("adversary"));
    spec.frames = frames_from_json(j.at("frames").get<std::string>());
    spec.initial = robots_from_json(j.at("robots"));
    return spec;
}

inline ordered_json round_json(const RoundRecord& rec) {
    ordered_json j;
    j["type"] = "round";
    j["round"] = rec.round;
    j["activated"] = rec.activated;
    ordered_json moves = ordered_json::array();
    for (const auto& m : rec.moves) {
        ordered_json mj;
        mj["robot"] = m.robot;
        mj["action"] = m.decision.action == MoveAction::move ? "move" : "stay";
        mj["new_bit"] = m.decision.new_bit;
        if (m.decision.action == MoveAction::move) {
            mj["move"] = m.decision.type == MoveType::type0 ? "type0" : "type1";
            mj["dest"] = {m.decision.destination.x, m.decision.destination.y};
            mj["executed"] = {m.executed.x, m.executed.y};
            mj["v"] = m.decision.inputs.v;
            mj["d"] = num_or_null(m.decision.inputs.d);
            mj["D"] = num_or_null(m.decision.inputs.D);
            mj["U"] = num_or_null(m.decision.inputs.U);
            mj["sigma"] = num_or_null(m.decision.inputs.sigma);
            mj["sigma_used"] = m.decision.sigma_used;
            mj["attempts"] = m.decision.attempts;
        }
        moves.push_back(mj);
    }
    j["moves"] = moves;
    ordered_json cfg = ordered_json::array();
    for (const auto& r : rec.after) {
        cfg.push_back({r.position.x, r.position.y, r.bit});
    }
    j["config"] = cfg;
    return j;
}

inline RoundRecord round_from_json(const ordered_json& j,
                                   const Configuration& reference_ids) {
    RoundRecord rec;
    rec.round = j.at("round").get<std::uint64_t>();
    rec.activated = j.at("activated").get<std::vector<std::size_t>>();
    for (const auto& mj : j.at("moves")) {
        ExecutedMove m;
        m.robot = mj.at("robot").get<std::size_t>();
        const bool moved = mj.at("action").get<std::string>() == "move";
        m.decision.action = moved ? MoveAction::move : MoveAction::stay;
        m.decision.new_bit = mj.at("new_bit").get<int>();
        if (moved) {
            m.decision.type = mj.at("move").get<std::string>() == "type1"
                                  ? MoveType::type1
                                  : MoveType::type0;
            m.decision.destination = {mj.at("dest")[0].get<double>(),
                                      mj.at("dest")[1].get<double>()};
            m.executed = {mj.at("executed")[0].get<double>(),
                          mj.at("executed")[1].get<double>()};
            m.decision.inputs.v = mj.at("v").get<std::size_t>();
            m.decision.inputs.d = null_or_num(mj.at("d"));
            m.decision.inputs.D = null_or_num(mj.at("D"));
            m.decision.inputs.U = null_or_num(mj.at("U"));
            m.decision.inputs.sigma = null_or_num(mj.at("sigma"));
            m.decision.sigma_used = mj.at("sigma_used").get<double>();
            m.decision.attempts = mj.at("attempts").get<int>();
        }
        rec.moves.push_back(m);
    }
    const auto& cfg = j.at("config");
    if (cfg.size() != reference_ids.size()) {
        throw TraceFormatError("round config size mismatch");
    }
    for (std::size_t i = 0; i < cfg.size(); ++i) {
        rec.after.push_back({reference_ids[i].id,
                             {cfg[i][0].get<double>(), cfg[i][1].get<double>()},
                             cfg[i][2].get<int>()});
    }
    // Stays have no executed field; fill from the resulting configuration.
    for (auto& m : rec.moves) {
        if (m.decision.action == MoveAction::stay) {
            m.executed = rec.after[m.robot].position;
            m.decision.destination = m.executed;
        }
    }
    return rec;
}

inline const char* outcome_name(OutcomeKind k) {
    switch (k) {
    case OutcomeKind::reached_general_position: return "reached_general_position";
    case OutcomeKind::max_rounds_exceeded: return "max_rounds_exceeded";
    case OutcomeKind::fault: return "fault";
    }
    return "fault";
}

} // namespace detail

inline void write_trace(const Trace& tr, std::ostream& os) {
    os << detail::spec_json(tr.spec).dump() << '\n';
    for (const auto& rec : tr.rounds) {
        os << detail::round_json(rec).dump() << '\n';
    }
    detail::ordered_json j;
    j["type"] = "outcome";
    j["kind"] = detail::outcome_name(tr.outcome.kind);
    if (tr.outcome.kind == OutcomeKind::reached_general_position) {
        j["completion_round"] = tr.outcome.completion_round;
    }
    if (tr.outcome.kind == OutcomeKind::fault) {
        j["message"] = tr.outcome.message;
    }
    j["rounds_recorded"] = tr.rounds.size();
    os << j.dump() << '\n';
}

inline Trace read_trace(std::istream& is) {
    Trace tr;
    std::string line;
    bool have_header = false, have_outcome = false;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        detail::ordered_json j;
        try {
            j = detail::ordered_json::parse(line);
        } catch (const nlohmann::json::exception& e) {
            throw TraceFormatError(std::string("bad trace line: ") + e.what());
        }
        try {
            const std::string type = j.at("type").get<std::string>();
            if (type == "header") {
                if (have_header) throw TraceFormatError("duplicate header");
                tr.spec = detail::spec_from_json(j);
                have_header = true;
            } else if (type == "round") {
                if (!have_header) throw TraceFormatError("round before header");
                if (have_outcome) throw TraceFormatError("round after outcome");
                tr.rounds.push_back(detail::round_from_json(j, tr.spec.initial));
            } else if (type == "outcome") {
                if (!have_header) throw TraceFormatError("outcome before header");
                const std::string kind = j.at("kind").get<std::string>();
                if (kind == "reached_general_position") {
                    tr.outcome.kind = OutcomeKind::reached_general_position;
                    tr.outcome.completion_round =
                        j.at("completion_round").get<std::uint64_t>();
                } else if (kind == "max_rounds_exceeded") {
                    tr.outcome.kind = OutcomeKind::max_rounds_exceeded;
                } else if (kind == "fault") {
                    tr.outcome.kind = OutcomeKind::fault;
                    tr.outcome.message = j.value("message", "");
                } else {
                    throw TraceFormatError("unknown outcome kind: " + kind);
                }
                have_outcome = true;
            } else {
                throw TraceFormatError("unknown line type: " + type);
            }
        } catch (const nlohmann::json::exception& e) {
            throw TraceFormatError(std::string("malformed trace field: ") + e.what());
        }
    }
    if (!have_header) throw TraceFormatError("trace has no header");
    if (!have_outcome) throw TraceFormatError("trace has no outcome");
    return tr;
}

} // namespace mutvis
