#pragma once

// Round-based execution. Each round a fair scheduler activates a nonempty
// subset of robots; every activated robot reads the same start-of-round
// configuration through its own frame, decides, and all motions and memory
// updates apply atomically at the end of the round. A motion adversary may
// stop a moving robot anywhere past a guaranteed progress distance delta,
// never changing its direction.

#include <mutvis/algorithm.hpp>
#include <mutvis/choice.hpp>
#include <mutvis/geometry.hpp>
#include <mutvis/vision.hpp>

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace mutvis {

struct SimulationFault : std::runtime_error {
    std::uint64_t round;
    SimulationFault(const std::string& msg, std::uint64_t r)
        : std::runtime_error(msg), round(r) {}
};

struct CollisionFault : SimulationFault {
    using SimulationFault::SimulationFault;
};

enum class ActivationKind { full_sync, round_robin, random_fair, scripted };

struct ActivationPolicy {
    ActivationKind kind = ActivationKind::full_sync;
    int block = 1;          // round_robin: robots activated per round
    double include_p = 0.5; // random_fair: per-robot inclusion probability
    int window = 1;         // fairness window for random_fair / scripted
    std::vector<std::vector<std::size_t>> script; // scripted rounds, cycled

    static ActivationPolicy full_sync() { return {}; }
    static ActivationPolicy round_robin(int block) {
        ActivationPolicy p;
        p.kind = ActivationKind::round_robin;
        p.block = block;
        return p;
    }
    static ActivationPolicy random_fair(double include_p, int window) {
        ActivationPolicy p;
        p.kind = ActivationKind::random_fair;
        p.include_p = include_p;
        p.window = window;
        return p;
    }
    static ActivationPolicy scripted(std::vector<std::vector<std::size_t>> script,
                                     int window) {
        ActivationPolicy p;
        p.kind = ActivationKind::scripted;
        p.script = std::move(script);
        p.window = window;
        return p;
    }
};

// Stateful activation source. Deterministic given (policy, n, seed); fair by
// construction: every robot is activated at least once in every window of
// fairness_window() consecutive rounds.
class Scheduler {
public:
    Scheduler(ActivationPolicy policy, std::size_t n, std::uint64_t seed)
        : policy_(std::move(policy)), n_(n), seed_(seed), idle_(n, 0) {
        if (n_ == 0) throw std::invalid_argument("Scheduler: no robots");
        switch (policy_.kind) {
        case ActivationKind::full_sync:
            break;
        case ActivationKind::round_robin:
            if (policy_.block < 1) {
                throw std::invalid_argument("Scheduler: block must be positive");
            }
            policy_.block = static_cast<int>(
                std::min<std::size_t>(static_cast<std::size_t>(policy_.block), n_));
            break;
        case ActivationKind::random_fair:
            if (!(policy_.include_p > 0.0 && policy_.include_p <= 1.0)) {
                throw std::invalid_argument("Scheduler: inclusion probability in (0,1]");
            }
            if (policy_.window < 1) {
                throw std::invalid_argument("Scheduler: window must be positive");
            }
            break;
        case ActivationKind::scripted:
            validate_script();
            break;
        }
    }

    int fairness_window() const {
        switch (policy_.kind) {
        case ActivationKind::full_sync: return 1;
        case ActivationKind::round_robin:
            return static_cast<int>((n_ + policy_.block - 1) / policy_.block);
        case ActivationKind::random_fair:
        case ActivationKind::scripted: return policy_.window;
        }
        return 1;
    }

    std::vector<std::size_t> next(std::uint64_t round) {
        std::vector<std::size_t> act;
        switch (policy_.kind) {
        case ActivationKind::full_sync:
            for (std::size_t i = 0; i < n_; ++i) act.push_back(i);
            break;
        case ActivationKind::round_robin: {
            const std::size_t b = static_cast<std::size_t>(policy_.block);
            const std::size_t start = (round * b) % n_;
            for (std::size_t k = 0; k < b; ++k) act.push_back((start + k) % n_);
            std::sort(act.begin(), act.end());
            break;
        }
        case ActivationKind::random_fair: {
            for (std::size_t i = 0; i < n_; ++i) {
                ChoiceStream draw(seed_, ChoiceTag::scheduler, i, round);
                const bool forced = idle_[i] >= policy_.window - 1;
                if (forced || draw.unit_real() < policy_.include_p) act.push_back(i);
            }
            if (act.empty()) {
                // Nobody drawn: activate the longest-idle robot.
                std::size_t pick = 0;
                for (std::size_t i = 1; i < n_; ++i) {
                    if (idle_[i] > idle_[pick]) pick = i;
                }
                act.push_back(pick);
            }
            break;
        }
        case ActivationKind::scripted:
            act = policy_.script[round % policy_.script.size()];
            break;
        }
        for (std::size_t i = 0; i < n_; ++i) ++idle_[i];
        for (std::size_t i : act) idle_[i] = 0;
        return act;
    }

private:
    void validate_script() {
        const auto& sc = policy_.script;
        if (sc.empty()) throw std::invalid_argument("Scheduler: empty script");
        if (policy_.window < 1) {
            throw std::invalid_argument("Scheduler: window must be positive");
        }
        for (const auto& r : sc) {
            if (r.empty()) throw std::invalid_argument("Scheduler: empty scripted round");
            for (std::size_t k = 0; k + 1 < r.size(); ++k) {
                if (r[k] >= r[k + 1]) {
                    throw std::invalid_argument("Scheduler: scripted round not sorted/unique");
                }
            }
            if (r.back() >= n_) {
                throw std::invalid_argument("Scheduler: scripted robot out of range");
            }
        }
        // The script is cycled, so a window never needs to look further than
        // one full pass; check every cyclic start position.
        const std::size_t w = std::min<std::size_t>(
            static_cast<std::size_t>(policy_.window), sc.size());
        for (std::size_t s = 0; s < sc.size(); ++s) {
            std::vector<bool> seen(n_, false);
            for (std::size_t k = 0; k < w; ++k) {
                for (std::size_t i : sc[(s + k) % sc.size()]) seen[i] = true;
            }
            for (std::size_t i = 0; i < n_; ++i) {
                if (!seen[i]) {
                    throw std::invalid_argument(
                        "Scheduler: script violates its fairness window");
                }
            }
        }
    }

    ActivationPolicy policy_;
    std::size_t n_;
    std::uint64_t seed_;
    std::vector<int> idle_;
};

enum class AdversaryKind { rigid, truncate };

struct MotionAdversary {
    AdversaryKind kind = AdversaryKind::rigid;
    double delta = 0.0; // guaranteed progress distance

    static MotionAdversary rigid() { return {}; }
    static MotionAdversary truncate(double delta) {
        if (!(delta > 0.0)) {
            throw std::invalid_argument("MotionAdversary: delta must be positive");
        }
        return {AdversaryKind::truncate, delta};
    }
};

// Where a move actually ends: the full destination under rigid motion, or a
// point at least delta along the way (direction preserved) under truncation.
inline Point execute_motion(const MotionAdversary& adv, Point from, Point to,
                            std::uint64_t seed, std::size_t robot,
                            std::uint64_t round) {
    if (adv.kind == AdversaryKind::rigid) return to;
    const double full = distance(from, to);
    if (full <= adv.delta) return to;
    ChoiceStream s(seed, ChoiceTag::adversary, robot, round);
    const double len = adv.delta + s.unit_real() * (full - adv.delta);
    const double f = len / full;
    return {from.x + f * (to.x - from.x), from.y + f * (to.y - from.y)};
}

enum class FrameMode { identity, random_per_round };

// The frame a robot observes through in a given round. Random mode draws a
// fresh similarity (scale in [0.5, 2), any rotation, possible reflection)
// per robot per round: robots agree on nothing.
inline Similarity frame_for(FrameMode mode, std::uint64_t seed, std::size_t robot,
                            std::uint64_t round) {
    if (mode == FrameMode::identity) return Similarity::identity();
    ChoiceStream s(seed, ChoiceTag::frame, robot, round);
    const double scale = 0.5 * std::exp(s.unit_real() * std::log(4.0));
    const double theta = s.unit_real() * k_two_pi;
    const bool reflected = s.unit_real() < 0.5;
    const Point shift{2.0 * s.unit_real() - 1.0, 2.0 * s.unit_real() - 1.0};
    return Similarity::make(scale, theta, reflected, shift);
}

struct SimulationSpec {
    Configuration initial;
    ActivationPolicy scheduler{};
    MotionAdversary adversary{};
    FrameMode frames = FrameMode::identity;
    std::uint64_t seed = 1;
    std::uint64_t max_rounds = 100000;
    std::uint64_t post_completion_rounds = 0;
    Tolerances tol{};
};

struct ExecutedMove {
    std::size_t robot = 0;
    MoveDecision decision{};
    Point executed{}; // where the robot actually ended up
};

struct RoundRecord {
    std::uint64_t round = 0;
    std::vector<std::size_t> activated;
    std::vector<ExecutedMove> moves; // one entry per activated robot
    Configuration after;             // configuration at the end of the round
};

enum class OutcomeKind { reached_general_position, max_rounds_exceeded, fault };

struct Outcome {
    OutcomeKind kind = OutcomeKind::max_rounds_exceeded;
    std::uint64_t completion_round = 0; // first general-position configuration
    std::string message;                // fault description
};

struct Trace {
    SimulationSpec spec;
    std::vector<RoundRecord> rounds;
    Outcome outcome;
};

// One synchronous round: activated robots all read `config` as it stands,
// then every motion and memory update lands at once.
inline RoundRecord step_round(Configuration& config, std::uint64_t round,
                              Scheduler& sched, const SimulationSpec& spec) {
    RoundRecord rec;
    rec.round = round;
    rec.activated = sched.next(round);
    const Configuration before = config;
    for (std::size_t i : rec.activated) {
        const Similarity frame = frame_for(spec.frames, spec.seed, i, round);
        ChoiceStream draws(spec.seed, ChoiceTag::algorithm, i, round);
        const MoveDecision dec = robot_step(before, i, frame, draws, spec.tol);
        Point executed = before[i].position;
        if (dec.action == MoveAction::move) {
            executed = execute_motion(spec.adversary, before[i].position,
                                      dec.destination, spec.seed, i, round);
        }
        rec.moves.push_back({i, dec, executed});
        config[i].position = executed;
        config[i].bit = dec.new_bit;
    }
    for (std::size_t i = 0; i < config.size(); ++i) {
        for (std::size_t j = i + 1; j < config.size(); ++j) {
            if (distance(config[i].position, config[j].position) <= spec.tol.eps_dist) {
                throw CollisionFault("robots " + std::to_string(i) + " and " +
                                         std::to_string(j) + " collided",
                                     round);
            }
        }
    }
    rec.after = config;
    return rec;
}

// Full run: rounds until the configuration first has no three collinear
// robots (then `post_completion_rounds` more, recorded), or until the
// round budget runs out. Algorithm and collision failures become a fault
// outcome with the partial trace kept.
inline Trace run(const SimulationSpec& spec) {
    Trace tr;
    tr.spec = spec;
    if (spec.initial.empty()) {
        throw std::invalid_argument("run: empty initial configuration");
    }
    for (std::size_t i = 0; i < spec.initial.size(); ++i) {
        if (spec.initial[i].id != static_cast<int>(i)) {
            throw std::invalid_argument("run: robot ids must equal their indices");
        }
    }
    Configuration config = spec.initial;
    Scheduler sched(spec.scheduler, config.size(), spec.seed);
    std::optional<std::uint64_t> completion;
    if (classify_configuration(config, spec.tol) == ConfigClass::general_position) {
        completion = 0;
    }
    std::uint64_t post = 0;
    try {
        for (std::uint64_t t = 0;; ++t) {
            if (completion && post >= spec.post_completion_rounds) break;
            if (!completion && t >= spec.max_rounds) {
                tr.outcome.kind = OutcomeKind::max_rounds_exceeded;
                return tr;
            }
            tr.rounds.push_back(step_round(config, t, sched, spec));
            if (completion) {
                ++post;
            } else if (classify_configuration(config, spec.tol) ==
                       ConfigClass::general_position) {
                completion = t + 1;
            }
        }
    } catch (const SimulationFault& e) {
        tr.outcome.kind = OutcomeKind::fault;
        tr.outcome.message = e.what();
        return tr;
    } catch (const AlgorithmError& e) {
        tr.outcome.kind = OutcomeKind::fault;
        tr.outcome.message = e.what();
        return tr;
    }
    tr.outcome.kind = OutcomeKind::reached_general_position;
    tr.outcome.completion_round = *completion;
    return tr;
}

// Named starting configurations:
//   "line:N"   N robots on a segment
//   "grid:K"   K x K lattice
//   "star"     four arms of three robots around a center
//   "cycle4"   four lines closing into a rectangle of junctions
//   "random:N" N robots, one planted collinear group, the rest in general
//              position (seeded)
inline Configuration generate(const std::string& name, std::uint64_t seed) {
    auto starts_with = [&](const char* p) { return name.rfind(p, 0) == 0; };
    auto int_arg = [&](std::size_t at) {
        const std::string s = name.substr(at);
        std::size_t used = 0;
        const int v = std::stoi(s, &used);
        if (used != s.size() || v < 1) {
            throw std::invalid_argument("generate: bad count in '" + name + "'");
        }
        return v;
    };
    Configuration c;
    if (starts_with("line:")) {
        const int n = int_arg(5);
        for (int i = 0; i < n; ++i) c.push_back({i, {double(i), 0.0}, 0});
        return c;
    }
    if (starts_with("grid:")) {
        const int k = int_arg(5);
        for (int y = 0; y < k; ++y)
            for (int x = 0; x < k; ++x)
                c.push_back({k * y + x, {double(x), double(y)}, 0});
        return c;
    }
    if (name == "star") {
        c.push_back({0, {0, 0}, 0});
        int id = 1;
        const double dirs[4][2] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
        for (auto& d : dirs)
            for (int r = 1; r <= 3; ++r) c.push_back({id++, {d[0] * r, d[1] * r}, 0});
        return c;
    }
    if (name == "cycle4") {
        const double pts[12][2] = {{-1, 0}, {1, 0}, {3, 0},  {5, 0},
                                   {3, -2}, {3, 5}, {-1, 3}, {1, 3},
                                   {3, 3},  {5, 3}, {1, -2}, {1, 5}};
        for (int i = 0; i < 12; ++i) c.push_back({i, {pts[i][0], pts[i][1]}, 0});
        return c;
    }
    if (starts_with("random:")) {
        const int n = int_arg(7);
        if (n < 4) throw std::invalid_argument("generate: random needs at least 4 robots");
        ChoiceStream g(seed, ChoiceTag::generator, 0, 0);
        const int planted = 3 + static_cast<int>(g.pick(3)) % std::max(1, n - 3);
        const double ang = g.unit_real() * k_pi;
        const Direction dir{std::cos(ang), std::sin(ang)};
        const Point anchor{10.0 * g.unit_real() - 5.0, 10.0 * g.unit_real() - 5.0};
        double t = -0.5 * planted;
        int id = 0;
        for (int k = 0; k < planted && id < n; ++k) {
            c.push_back({id++, advance(anchor, dir, t), 0});
            t += 0.75 + 1.25 * g.unit_real();
        }
        int guard = 0;
        while (id < n) {
            if (++guard > 100000) {
                throw std::runtime_error("generate: could not place random robots");
            }
            const Point cand{16.0 * g.unit_real() - 8.0, 16.0 * g.unit_real() - 8.0};
            bool ok = true;
            for (const auto& r : c) {
                if (distance(cand, r.position) < 0.5) { ok = false; break; }
            }
            for (std::size_t a = 0; ok && a < c.size(); ++a) {
                for (std::size_t b = a + 1; ok && b < c.size(); ++b) {
                    ok = perp_distance(cand, c[a].position, c[b].position) > 0.1;
                }
            }
            if (ok) c.push_back({id++, cand, 0});
        }
        return c;
    }
    throw std::invalid_argument("generate: unknown configuration '" + name + "'");
}

} // namespace mutvis
