#pragma once

// Runtime monitors: every safety and progress claim the algorithm is built
// on, re-derived from the raw positions in a trace. Monitors never trust the
// simulator's cached classifications — vision, collinearity, hulls, heights,
// and terminality are all recomputed here.

#include <mutvis/geometry.hpp>
#include <mutvis/simulator.hpp>
#include <mutvis/vision.hpp>

#include <algorithm>
#include <array>
#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace mutvis {

enum class Verdict { pass, fail, skipped, inconclusive };

inline const char* verdict_name(Verdict v) {
    switch (v) {
    case Verdict::pass: return "PASS";
    case Verdict::fail: return "FAIL";
    case Verdict::skipped: return "SKIPPED";
    case Verdict::inconclusive: return "INCONCLUSIVE";
    }
    return "FAIL";
}

struct Violation {
    std::uint64_t round = 0;        // round the violating transition ends in
    std::vector<std::size_t> robots; // witnesses
    std::vector<double> values;      // measured quantities, monitor-specific
    std::string message;
};

struct MonitorReport {
    std::string name;
    Verdict verdict = Verdict::pass;
    std::vector<Violation> violations;
    std::string note; // context: why skipped, what was vacuous, ...

    // Summary metrics (filled by the monitors that measure them; indexed by
    // configuration boundary: entry 0 is the initial configuration).
    std::vector<std::size_t> triples_per_round;
    std::vector<std::size_t> cycles_per_round;
    std::vector<std::int64_t> first_terminal_round; // per robot, -1 = never
};

// How far hull vertices may drift per coordinate before the hull counts as
// changed.
inline constexpr double k_hull_match_tol = 1e-9;

// Per-round fraction of a triangle height the three movers may jointly eat:
// each hop is less than one eighty-first of every height it can see.
inline constexpr double k_height_decay = 3.0 / 81.0;

namespace detail {

// Configurations at round boundaries: entry 0 is the initial configuration,
// entry t+1 the state after round t.
inline std::vector<Configuration> boundaries(const Trace& tr) {
    std::vector<Configuration> b;
    b.reserve(tr.rounds.size() + 1);
    b.push_back(tr.spec.initial);
    for (const auto& rec : tr.rounds) b.push_back(rec.after);
    return b;
}

using Triple = std::array<std::size_t, 3>;

inline std::set<Triple> collinear_triples(const Configuration& c, const Tolerances& tol) {
    std::set<Triple> out;
    for (std::size_t i = 0; i < c.size(); ++i) {
        for (std::size_t j = i + 1; j < c.size(); ++j) {
            for (std::size_t k = j + 1; k < c.size(); ++k) {
                if (is_collinear(c[i].position, c[j].position, c[k].position, tol)) {
                    out.insert({i, j, k});
                }
            }
        }
    }
    return out;
}

inline bool distinct_positions(const Configuration& c, const Tolerances& tol) {
    for (std::size_t i = 0; i < c.size(); ++i) {
        for (std::size_t j = i + 1; j < c.size(); ++j) {
            if (distance(c[i].position, c[j].position) <= tol.eps_dist) return false;
        }
    }
    return true;
}

inline std::vector<std::vector<bool>> visibility_matrix(const Configuration& c,
                                                        const Tolerances& tol) {
    std::vector<std::vector<bool>> m(c.size(), std::vector<bool>(c.size(), false));
    for (std::size_t i = 0; i < c.size(); ++i) {
        for (std::size_t j : visible_set(c, i, tol)) {
            m[i][j] = true;
        }
    }
    return m;
}

inline void fail_degenerate(MonitorReport& rep, std::uint64_t round) {
    rep.verdict = Verdict::fail;
    rep.violations.push_back(
        {round, {}, {}, "degenerate configuration: coincident robots"});
}

} // namespace detail

// Collinear triples may dissolve but never form: the set of collinear
// triples at each boundary is contained in the previous one.
inline MonitorReport monitor_no_new_collinearity(const Trace& tr) {
    MonitorReport rep;
    rep.name = "no_new_collinearity";
    const auto bounds = detail::boundaries(tr);
    const Tolerances& tol = tr.spec.tol;

    std::set<detail::Triple> prev;
    for (std::size_t t = 0; t < bounds.size(); ++t) {
        if (!detail::distinct_positions(bounds[t], tol)) {
            detail::fail_degenerate(rep, t);
            return rep;
        }
        const auto cur = detail::collinear_triples(bounds[t], tol);
        rep.triples_per_round.push_back(cur.size());
        if (t > 0) {
            for (const auto& triple : cur) {
                if (!prev.count(triple)) {
                    rep.verdict = Verdict::fail;
                    rep.violations.push_back({tr.rounds[t - 1].round,
                                              {triple[0], triple[1], triple[2]},
                                              {},
                                              "triple became collinear"});
                }
            }
        }
        prev = cur;
    }
    return rep;
}

// Triangles of mutually visible robots flatten slowly: each of the three
// vertex heights loses at most a 3/81 fraction (plus distance tolerance)
// per round.
inline MonitorReport monitor_height_bound(const Trace& tr) {
    MonitorReport rep;
    rep.name = "height_bound";
    const auto bounds = detail::boundaries(tr);
    const Tolerances& tol = tr.spec.tol;

    for (std::size_t t = 0; t + 1 < bounds.size(); ++t) {
        const Configuration& cur = bounds[t];
        const Configuration& nxt = bounds[t + 1];
        if (!detail::distinct_positions(cur, tol) ||
            !detail::distinct_positions(nxt, tol)) {
            detail::fail_degenerate(rep, t);
            return rep;
        }
        const auto vis = detail::visibility_matrix(cur, tol);
        for (std::size_t i = 0; i < cur.size(); ++i) {
            for (std::size_t j = i + 1; j < cur.size(); ++j) {
                for (std::size_t k = j + 1; k < cur.size(); ++k) {
                    if (!vis[i][j] || !vis[i][k] || !vis[j][k]) continue;
                    if (is_collinear(cur[i].position, cur[j].position,
                                     cur[k].position, tol)) {
                        continue;
                    }
                    const std::size_t ids[3] = {i, j, k};
                    for (int v = 0; v < 3; ++v) {
                        const std::size_t a = ids[v];
                        const std::size_t b = ids[(v + 1) % 3];
                        const std::size_t c = ids[(v + 2) % 3];
                        const double before = perp_distance(
                            cur[a].position, cur[b].position, cur[c].position);
                        const double after = perp_distance(
                            nxt[a].position, nxt[b].position, nxt[c].position);
                        if (!(after > (1.0 - k_height_decay) * before - tol.eps_dist)) {
                            rep.verdict = Verdict::fail;
                            rep.violations.push_back({tr.rounds[t].round,
                                                      {a, b, c},
                                                      {before, after},
                                                      "height collapsed too fast"});
                        }
                    }
                }
            }
        }
    }
    return rep;
}

// No two robots ever share a point: positions are pairwise distinct at every
// boundary, and within a round no two movers aim at or stop on a common
// point. On traces declared rigid, the executed point must equal the
// intended destination exactly.
inline MonitorReport monitor_collision_free(const Trace& tr) {
    MonitorReport rep;
    rep.name = "collision_free";
    const auto bounds = detail::boundaries(tr);
    const Tolerances& tol = tr.spec.tol;

    for (std::size_t t = 0; t < bounds.size(); ++t) {
        const Configuration& c = bounds[t];
        for (std::size_t i = 0; i < c.size(); ++i) {
            for (std::size_t j = i + 1; j < c.size(); ++j) {
                if (distance(c[i].position, c[j].position) <= tol.eps_dist) {
                    rep.verdict = Verdict::fail;
                    rep.violations.push_back(
                        {t == 0 ? 0 : tr.rounds[t - 1].round,
                         {i, j},
                         {distance(c[i].position, c[j].position)},
                         t == 0 ? "initial positions coincide" : "positions coincide"});
                }
            }
        }
    }

    for (const auto& rec : tr.rounds) {
        std::vector<const ExecutedMove*> movers;
        for (const auto& mv : rec.moves) {
            if (mv.decision.action == MoveAction::move) movers.push_back(&mv);
        }
        for (std::size_t a = 0; a < movers.size(); ++a) {
            for (std::size_t b = a + 1; b < movers.size(); ++b) {
                if (distance(movers[a]->decision.destination,
                             movers[b]->decision.destination) <= tol.eps_dist) {
                    rep.verdict = Verdict::fail;
                    rep.violations.push_back({rec.round,
                                              {movers[a]->robot, movers[b]->robot},
                                              {},
                                              "intended destinations coincide"});
                }
                if (distance(movers[a]->executed, movers[b]->executed) <= tol.eps_dist) {
                    rep.verdict = Verdict::fail;
                    rep.violations.push_back({rec.round,
                                              {movers[a]->robot, movers[b]->robot},
                                              {},
                                              "executed stops coincide"});
                }
            }
            if (tr.spec.adversary.kind == AdversaryKind::rigid &&
                !exactly_equal(movers[a]->executed, movers[a]->decision.destination)) {
                rep.verdict = Verdict::fail;
                rep.violations.push_back({rec.round,
                                          {movers[a]->robot},
                                          {},
                                          "rigid move stopped short of its destination"});
            }
        }
    }
    return rep;
}

// The convex hull never changes: its vertex point set matches the initial
// one at every boundary. Meaningless when everything starts on one line (the
// hull must grow as robots step off it), so such traces are skipped.
inline MonitorReport monitor_hull_invariance(const Trace& tr) {
    MonitorReport rep;
    rep.name = "hull_invariance";
    const auto bounds = detail::boundaries(tr);
    const Tolerances& tol = tr.spec.tol;

    if (!detail::distinct_positions(bounds[0], tol)) {
        detail::fail_degenerate(rep, 0);
        return rep;
    }
    if (classify_configuration(bounds[0], tol) == ConfigClass::all_collinear) {
        rep.verdict = Verdict::skipped;
        rep.note = "initial configuration is a single line; hull growth is expected";
        return rep;
    }

    auto points_of = [](const Configuration& c) {
        std::vector<Point> pts;
        pts.reserve(c.size());
        for (const auto& r : c) pts.push_back(r.position);
        return pts;
    };
    const std::vector<Point> initial_hull = convex_hull(points_of(bounds[0]), tol);

    for (std::size_t t = 1; t < bounds.size(); ++t) {
        const std::vector<Point> hull = convex_hull(points_of(bounds[t]), tol);
        bool same = hull.size() == initial_hull.size();
        if (same) {
            std::vector<bool> used(initial_hull.size(), false);
            for (const Point& v : hull) {
                bool matched = false;
                for (std::size_t u = 0; u < initial_hull.size(); ++u) {
                    if (!used[u] && std::abs(v.x - initial_hull[u].x) <= k_hull_match_tol &&
                        std::abs(v.y - initial_hull[u].y) <= k_hull_match_tol) {
                        used[u] = true;
                        matched = true;
                        break;
                    }
                }
                if (!matched) { same = false; break; }
            }
        }
        if (!same) {
            rep.verdict = Verdict::fail;
            rep.violations.push_back(
                {tr.rounds[t - 1].round,
                 {},
                 {double(initial_hull.size()), double(hull.size())},
                 "hull vertex set changed"});
        }
    }
    return rep;
}

// Once the configuration first has no collinear triple, every later decision
// is a stay. Only decidable for runs that reached that state.
inline MonitorReport monitor_quiescence(const Trace& tr) {
    MonitorReport rep;
    rep.name = "quiescence";
    if (tr.outcome.kind != OutcomeKind::reached_general_position) {
        rep.verdict = Verdict::skipped;
        rep.note = "run did not reach a general-position configuration";
        return rep;
    }
    const std::uint64_t completion = tr.outcome.completion_round;
    std::size_t observed = 0;
    for (const auto& rec : tr.rounds) {
        if (rec.round < completion) continue;
        ++observed;
        for (const auto& mv : rec.moves) {
            if (mv.decision.action != MoveAction::stay) {
                rep.verdict = Verdict::fail;
                rep.violations.push_back(
                    {rec.round, {mv.robot}, {}, "move decision after completion"});
            }
        }
    }
    if (observed == 0) {
        rep.note = "no rounds recorded at or after completion; vacuously clean";
    }
    return rep;
}

// Eventual terminality: a completed run must end with every robot terminal,
// stay in general position once it gets there, and never let a robot revert
// from terminal while the collinear-triple set is shrinking. Also measures
// per-robot first-terminal rounds, triple counts, and the census of closed
// chains of collinear lines.
inline MonitorReport monitor_progress(const Trace& tr) {
    MonitorReport rep;
    rep.name = "progress";
    const auto bounds = detail::boundaries(tr);
    const Tolerances& tol = tr.spec.tol;
    const std::size_t n = bounds[0].size();

    rep.first_terminal_round.assign(n, -1);
    std::vector<std::vector<bool>> terminal;
    std::vector<std::set<detail::Triple>> triples;
    for (std::size_t t = 0; t < bounds.size(); ++t) {
        if (!detail::distinct_positions(bounds[t], tol)) {
            detail::fail_degenerate(rep, t);
            return rep;
        }
        terminal.push_back(terminal_flags(bounds[t], tol));
        triples.push_back(detail::collinear_triples(bounds[t], tol));
        rep.triples_per_round.push_back(triples.back().size());
        rep.cycles_per_round.push_back(line_structure(bounds[t], tol).cycles.size());
        for (std::size_t i = 0; i < n; ++i) {
            if (terminal[t][i] && rep.first_terminal_round[i] < 0) {
                rep.first_terminal_round[i] = static_cast<std::int64_t>(t);
            }
        }
    }

    // Derived permanence: while no new collinear triple forms, a terminal
    // robot cannot become non-terminal.
    for (std::size_t t = 0; t + 1 < bounds.size(); ++t) {
        const bool contained = std::includes(triples[t].begin(), triples[t].end(),
                                             triples[t + 1].begin(), triples[t + 1].end());
        if (!contained) continue;
        for (std::size_t i = 0; i < n; ++i) {
            if (terminal[t][i] && !terminal[t + 1][i]) {
                rep.verdict = Verdict::fail;
                rep.violations.push_back(
                    {tr.rounds[t].round, {i}, {}, "terminal robot reverted"});
            }
        }
    }

    if (tr.outcome.kind == OutcomeKind::fault) {
        rep.verdict = Verdict::fail;
        rep.violations.push_back({tr.rounds.empty() ? 0 : tr.rounds.back().round,
                                  {},
                                  {},
                                  "run faulted: " + tr.outcome.message});
        return rep;
    }
    if (tr.outcome.kind == OutcomeKind::max_rounds_exceeded) {
        if (rep.verdict == Verdict::pass) {
            rep.verdict = Verdict::inconclusive;
            rep.note = "round budget exhausted before completion";
        }
        return rep;
    }

    const std::uint64_t completion = tr.outcome.completion_round;
    for (std::size_t t = 0; t < bounds.size(); ++t) {
        if (t < completion) continue;
        if (classify_configuration(bounds[t], tol) != ConfigClass::general_position) {
            rep.verdict = Verdict::fail;
            rep.violations.push_back(
                {t == 0 ? 0 : tr.rounds[t - 1].round,
                 {},
                 {},
                 "collinear triple present at or after completion"});
        }
        for (std::size_t i = 0; i < n; ++i) {
            if (!terminal[t][i]) {
                rep.verdict = Verdict::fail;
                rep.violations.push_back(
                    {t == 0 ? 0 : tr.rounds[t - 1].round,
                     {i},
                     {},
                     "robot not terminal at or after completion"});
            }
        }
    }
    return rep;
}

struct VerificationReport {
    std::vector<MonitorReport> monitors;

    bool all_passed() const {
        for (const auto& m : monitors) {
            if (m.verdict == Verdict::fail) return false;
        }
        return true;
    }
    const MonitorReport* find(const std::string& name) const {
        for (const auto& m : monitors) {
            if (m.name == name) return &m;
        }
        return nullptr;
    }
};

inline VerificationReport run_all_monitors(const Trace& tr) {
    VerificationReport rep;
    rep.monitors.push_back(monitor_no_new_collinearity(tr));
    rep.monitors.push_back(monitor_height_bound(tr));
    rep.monitors.push_back(monitor_collision_free(tr));
    rep.monitors.push_back(monitor_hull_invariance(tr));
    rep.monitors.push_back(monitor_quiescence(tr));
    rep.monitors.push_back(monitor_progress(tr));
    return rep;
}

} // namespace mutvis
