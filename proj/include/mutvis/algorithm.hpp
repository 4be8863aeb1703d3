#pragma once

// The per-robot decision rule. Everything here runs on a Snapshot, i.e. in
// the robot's own frame with itself at the origin: robots share no global
// coordinates, no chirality, and no unit of length.
//
// Decision summary for an activated robot:
//   - terminal in its own view          -> stay
//   - sees at most two robots           -> perpendicular escape, hop D/81,
//                                          memory bit := 1
//   - bit 0                             -> escape along the bisector of the
//                                          widest angular gap narrower than
//                                          pi, hop sigma, bit := 1
//   - bit 1                             -> slide along one of the lines it
//                                          lies inside, hop sigma, bit := 0
// with sigma = min(d, D) / 3^(4v) from the local view (v visible robots,
// D the closest pairwise distance, d the smallest non-collinear triple
// height).
//
// The raw sigma formula underflows fast: it shrinks geometrically in v and
// in successive generations of fresh triangle heights, and for a dozen
// visible robots it lands below one ulp of the coordinates, producing
// destinations that equal the current position or sit inside the
// collinearity tolerance band forever. To keep escapes real on finite
// floats, escape hops are floored at a multiple of the collinearity band
// radius, capped at D/729, and every candidate destination is validated
// against all visible pairs; rejected candidates retry on a fixed schedule
// of headings inside the chosen gap and growing magnitudes. Slides get a
// representability floor only. The formula value is always reported
// alongside the hop actually commanded.

#include <mutvis/choice.hpp>
#include <mutvis/geometry.hpp>
#include <mutvis/vision.hpp>

#include <cfloat>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <stdexcept>
#include <vector>

namespace mutvis {

inline constexpr double k_escape_floor_factor = 256.0; // x eps_col x view radius
inline constexpr double k_validation_margin = 4.0;     // x the collinearity band
inline constexpr int k_max_escape_attempts = 48;       // 8 headings x 6 magnitudes
inline constexpr double k_rep_floor_ulps = 64.0;       // slide representability floor
inline constexpr double k_subpi_margin = 1e-6;         // gap < pi - margin qualifies
inline constexpr double k_gap_tie_window = 1e-9;       // radians: equal-width gaps
inline constexpr double k_line_merge_angle = 1e-7;     // radians: same-line headings

struct AlgorithmError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class MoveAction { stay, move };
enum class MoveType { type0, type1 }; // type0 = escape off a line, type1 = slide along one

struct DisplacementInputs {
    std::size_t v = 0; // visible robots
    double d = std::numeric_limits<double>::infinity(); // min non-collinear triple height
    double D = std::numeric_limits<double>::infinity(); // min pairwise distance (observer included)
    double U = 0.0;     // min(d, D)
    double sigma = 0.0; // nominal hop bound chosen by the rule
};

struct MoveDecision {
    MoveAction action = MoveAction::stay;
    MoveType type = MoveType::type0; // meaningful only when action == move
    Point destination{};             // global coordinates; current position when staying
    int new_bit = 0;
    DisplacementInputs inputs{};
    double sigma_used = 0.0; // commanded hop length, local units
    int attempts = 0;        // destination candidates tried before acceptance
};

// Terminal from the robot's own viewpoint: it does not sit strictly between
// any two robots it can see. (Matches global terminality: the nearest
// collinear robot on each side is never blocked.)
inline bool snapshot_terminal(const Snapshot& snap, const Tolerances& tol) {
    const Point origin{0.0, 0.0};
    const auto& vis = snap.visible;
    for (std::size_t i = 0; i < vis.size(); ++i) {
        for (std::size_t j = i + 1; j < vis.size(); ++j) {
            if (is_collinear(vis[i].p, origin, vis[j].p, tol) &&
                is_between(vis[i].p, origin, vis[j].p, tol)) {
                return false;
            }
        }
    }
    return true;
}

namespace detail {

inline bool triple_collinear(Point a, Point b, Point c, const Tolerances& tol) {
    return is_collinear(a, b, c, tol) || is_collinear(b, c, a, tol) ||
           is_collinear(c, a, b, tol);
}

inline double triple_height(Point a, Point b, Point c) {
    return std::min({perp_distance(a, b, c), perp_distance(b, c, a),
                     perp_distance(c, a, b)});
}

inline double view_radius(const Snapshot& snap) {
    double r = 0.0;
    const auto& vis = snap.visible;
    for (const auto& lp : vis) r = std::max(r, norm(lp.p));
    for (std::size_t i = 0; i < vis.size(); ++i)
        for (std::size_t j = i + 1; j < vis.size(); ++j)
            r = std::max(r, distance(vis[i].p, vis[j].p));
    return r;
}

} // namespace detail

// The v, d, D, U, sigma quantities measured from a local view, observer
// included as a point. Triples within the collinearity tolerance do not
// contribute to d.
inline DisplacementInputs displacement_general(const Snapshot& snap,
                                               const Tolerances& tol) {
    DisplacementInputs in;
    in.v = snap.visible.size();
    std::vector<Point> pts{{0.0, 0.0}};
    for (const auto& lp : snap.visible) pts.push_back(lp.p);
    for (std::size_t i = 0; i < pts.size(); ++i)
        for (std::size_t j = i + 1; j < pts.size(); ++j)
            in.D = std::min(in.D, distance(pts[i], pts[j]));
    for (std::size_t i = 0; i < pts.size(); ++i)
        for (std::size_t j = i + 1; j < pts.size(); ++j)
            for (std::size_t k = j + 1; k < pts.size(); ++k) {
                if (detail::triple_collinear(pts[i], pts[j], pts[k], tol)) continue;
                in.d = std::min(in.d, detail::triple_height(pts[i], pts[j], pts[k]));
            }
    in.U = std::min(in.d, in.D);
    in.sigma = in.U / std::pow(81.0, static_cast<double>(in.v));
    return in;
}

// Widest gap narrower than pi; ties within k_gap_tie_window are broken by a
// uniform draw over the tied gaps ordered by start direction. The draw is
// consumed only when there is an actual tie.
inline AngularGap gap_selection(const std::vector<AngularGap>& gaps,
                                ChoiceSource& choices) {
    std::vector<AngularGap> cands;
    for (const auto& g : gaps) {
        if (g.angle < k_pi - k_subpi_margin) cands.push_back(g);
    }
    if (cands.empty()) {
        throw AlgorithmError("gap_selection: no gap narrower than pi");
    }
    double best = 0.0;
    for (const auto& g : cands) best = std::max(best, g.angle);
    std::vector<AngularGap> tied;
    for (const auto& g : cands) {
        if (best - g.angle <= k_gap_tie_window) tied.push_back(g);
    }
    std::sort(tied.begin(), tied.end(),
              [](const AngularGap& a, const AngularGap& b) { return a.start < b.start; });
    const std::size_t idx =
        tied.size() > 1 ? choices.pick(static_cast<std::uint32_t>(tied.size())) : 0;
    return tied[idx];
}

// A line through the observer that it can actually certify from its view:
// some visible pair straddles it. Directions are canonical angles in
// [0, pi).
struct LocalLine {
    Direction direction{};
    double angle = 0.0;
};

inline std::vector<LocalLine> detectable_lines(const Snapshot& snap,
                                               const Tolerances& tol) {
    const Point origin{0.0, 0.0};
    const auto& vis = snap.visible;
    std::vector<LocalLine> raw;
    for (std::size_t i = 0; i < vis.size(); ++i) {
        for (std::size_t j = i + 1; j < vis.size(); ++j) {
            const Point p = vis[i].p, q = vis[j].p;
            if (!(is_collinear(p, origin, q, tol) && is_between(p, origin, q, tol))) {
                continue;
            }
            Point dv = q - p;
            if (dv.y < 0.0 || (dv.y == 0.0 && dv.x < 0.0)) dv = -1.0 * dv;
            const double len = norm(dv);
            double ang = std::atan2(dv.y, dv.x); // [0, pi] after canonicalization
            if (ang >= k_pi) ang -= k_pi;
            raw.push_back({{dv.x / len, dv.y / len}, ang});
        }
    }
    if (raw.empty()) return {};
    std::sort(raw.begin(), raw.end(),
              [](const LocalLine& a, const LocalLine& b) { return a.angle < b.angle; });
    std::vector<LocalLine> merged;
    for (const auto& l : raw) {
        if (merged.empty() || l.angle - merged.back().angle > k_line_merge_angle) {
            merged.push_back(l);
        }
    }
    // Directions just under pi wrap around to just above 0.
    if (merged.size() > 1 &&
        (merged.front().angle + k_pi) - merged.back().angle <= k_line_merge_angle) {
        merged.pop_back();
    }
    return merged;
}

namespace detail {

// A candidate escape destination must clear the collinearity band of every
// visible pair by a safety margin.
inline bool escape_clears_all_pairs(Point dest, const Snapshot& snap,
                                    const Tolerances& tol) {
    const auto& vis = snap.visible;
    for (std::size_t i = 0; i < vis.size(); ++i) {
        for (std::size_t j = i + 1; j < vis.size(); ++j) {
            const Point p = vis[i].p, q = vis[j].p;
            if (std::abs(orientation(dest, p, q)) <=
                k_validation_margin * tol.eps_col * distance(p, dest) * distance(q, dest)) {
                return false;
            }
        }
    }
    return true;
}

struct EscapeResult {
    Point dest{};
    int attempts = 0;
};

// Fixed retry schedule: 8 headings inside the gap (bisector first, then
// symmetric offsets up to 7/16 of the gap) times 6 magnitudes (doubling,
// capped). Deterministic: consumes no random draws.
inline std::optional<EscapeResult> find_escape(const Snapshot& snap,
                                               const AngularGap& gap, double sigma0,
                                               double cap, const Tolerances& tol) {
    static constexpr double fracs[8] = {0.0,        1.0 / 8,  -1.0 / 8, 1.0 / 4,
                                        -1.0 / 4,   3.0 / 8,  -3.0 / 8, 7.0 / 16};
    int attempts = 0;
    for (int level = 0; level < k_max_escape_attempts / 8; ++level) {
        const double sigma = std::min(sigma0 * static_cast<double>(1 << level), cap);
        for (double f : fracs) {
            ++attempts;
            const double ang = gap.start + gap.angle * (0.5 + f);
            const Point dest{sigma * std::cos(ang), sigma * std::sin(ang)};
            if ((dest.x != 0.0 || dest.y != 0.0) &&
                escape_clears_all_pairs(dest, snap, tol)) {
                return EscapeResult{dest, attempts};
            }
        }
    }
    return std::nullopt;
}

} // namespace detail

// Full decision for one activated robot, given its snapshot and its own
// memory bit. Draw order is fixed: the two-visible branch consumes one side
// pick; the escape branch consumes one pick only on a gap tie; the slide
// branch consumes a line pick then a side pick. Escape retries consume no
// draws.
inline MoveDecision compute_destination(const Snapshot& snap, int bit,
                                        ChoiceSource& choices, const Tolerances& tol) {
    MoveDecision out;
    out.destination = snap.to_global({0.0, 0.0});
    out.new_bit = bit;
    const std::size_t v = snap.visible.size();

    if (v <= 2) {
        if (v < 2) return out; // nobody to be between: terminal
        const Point p = snap.visible[0].p, q = snap.visible[1].p;
        if (!(is_collinear(p, {0.0, 0.0}, q, tol) &&
              is_between(p, {0.0, 0.0}, q, tol))) {
            return out; // terminal
        }
        DisplacementInputs in;
        in.v = v;
        in.D = std::min({norm(p), norm(q), distance(p, q)});
        in.U = in.D;
        in.sigma = in.D / 81.0;
        const Point u = (1.0 / distance(p, q)) * (q - p);
        double start = std::atan2(u.y, u.x);
        if (start < 0.0) start += k_two_pi;
        if (choices.pick(2) == 1) {
            start += k_pi;
            if (start >= k_two_pi) start -= k_two_pi;
        }
        // The half-plane on the chosen side, bisected by the perpendicular.
        const AngularGap gap{start, k_pi};
        auto esc = detail::find_escape(snap, gap, in.sigma, in.sigma, tol);
        if (!esc) throw AlgorithmError("compute_destination: no perpendicular escape");
        out.action = MoveAction::move;
        out.type = MoveType::type0;
        out.new_bit = 1;
        out.inputs = in;
        out.sigma_used = norm(esc->dest);
        out.attempts = esc->attempts;
        out.destination = snap.to_global(esc->dest);
        return out;
    }

    if (snapshot_terminal(snap, tol)) return out;

    DisplacementInputs in = displacement_general(snap, tol);
    if (bit == 0) {
        std::vector<Point> targets;
        targets.reserve(v);
        for (const auto& lp : snap.visible) targets.push_back(lp.p);
        const AngularGap gap = gap_selection(angular_gaps({0.0, 0.0}, targets), choices);
        const double cap = in.D / 729.0;
        double sigma0 = std::max(in.sigma, k_escape_floor_factor * tol.eps_col *
                                               detail::view_radius(snap));
        sigma0 = std::min(sigma0, cap);
        if (!(sigma0 > 0.0)) {
            throw AlgorithmError("compute_destination: escape hop underflowed");
        }
        auto esc = detail::find_escape(snap, gap, sigma0, cap, tol);
        if (!esc) throw AlgorithmError("compute_destination: escape search exhausted");
        out.action = MoveAction::move;
        out.type = MoveType::type0;
        out.new_bit = 1;
        out.inputs = in;
        out.sigma_used = norm(esc->dest);
        out.attempts = esc->attempts;
        out.destination = snap.to_global(esc->dest);
        return out;
    }

    const auto lines = detectable_lines(snap, tol);
    if (lines.empty()) {
        throw AlgorithmError("compute_destination: bit set but no line detected");
    }
    const std::uint32_t li = choices.pick(static_cast<std::uint32_t>(lines.size()));
    Direction dir = lines[li].direction;
    if (choices.pick(2) == 1) dir = {-dir.dx, -dir.dy};
    // Representability floor: the hop must survive the trip through the
    // robot's frame and back without rounding to zero.
    const double scale_guard = norm(snap.observer_image) + norm(snap.frame.shift) +
                               detail::view_radius(snap) + 1.0;
    double sigma = std::max(in.sigma, k_rep_floor_ulps * DBL_EPSILON * scale_guard);
    sigma = std::min(sigma, in.D / 81.0);
    out.action = MoveAction::move;
    out.type = MoveType::type1;
    out.new_bit = 0;
    out.inputs = in;
    out.sigma_used = sigma;
    out.attempts = 1;
    out.destination = snap.to_global({sigma * dir.dx, sigma * dir.dy});
    return out;
}

// Convenience wrapper: look through `frame`, then decide.
inline MoveDecision robot_step(const Configuration& config, std::size_t idx,
                               const Similarity& frame, ChoiceSource& choices,
                               const Tolerances& tol) {
    const Snapshot snap = local_snapshot(config, idx, frame, tol);
    return compute_destination(snap, config[idx].bit, choices, tol);
}

} // namespace mutvis
