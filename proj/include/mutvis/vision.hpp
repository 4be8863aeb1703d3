#pragma once

// Configurations of point robots and everything derived from looking at
// them: obstructed visibility, maximal collinear groups, terminality, the
// junction/line incidence structure with its cycle census, and per-robot
// local-frame snapshots.

#include <mutvis/geometry.hpp>

#include <algorithm>
#include <cstddef>
#include <functional>
#include <set>
#include <stdexcept>
#include <vector>

namespace mutvis {

struct RobotState {
    int id = 0;
    Point position{};
    int bit = 0; // 1-bit persistent memory, readable only by the robot itself
};

using Configuration = std::vector<RobotState>;

enum class ConfigClass {
    general_position,    // no three robots collinear (or fewer than 3 robots)
    partially_collinear, // some collinear triple, but not all on one line
    all_collinear,       // three or more robots, all on a single line
};

namespace detail {

inline void require_distinct(const Configuration& config, const Tolerances& tol) {
    for (std::size_t i = 0; i < config.size(); ++i) {
        for (std::size_t j = i + 1; j < config.size(); ++j) {
            if (distance(config[i].position, config[j].position) <= tol.eps_dist) {
                throw std::invalid_argument("configuration has coincident robots");
            }
        }
    }
}

} // namespace detail

// Indices of robots the robot at `idx` can see: every other robot except
// those hidden behind a third robot sitting strictly between observer and
// target. Opaque robots block sight along their exact line only.
inline std::vector<std::size_t> visible_set(const Configuration& config,
                                            std::size_t idx,
                                            const Tolerances& tol) {
    detail::require_distinct(config, tol);
    const Point self = config[idx].position;
    std::vector<std::size_t> out;
    for (std::size_t j = 0; j < config.size(); ++j) {
        if (j == idx) continue;
        const Point target = config[j].position;
        bool blocked = false;
        for (std::size_t k = 0; k < config.size() && !blocked; ++k) {
            if (k == idx || k == j) continue;
            const Point mid = config[k].position;
            blocked = is_collinear(self, mid, target, tol) &&
                      is_between(self, mid, target, tol);
        }
        if (!blocked) out.push_back(j);
    }
    return out;
}

// Visible robots ordered counter-clockwise by direction from the observer,
// starting at the smallest angle. Ties (same direction, nearer first) cannot
// occur: the nearer of two aligned robots blocks the farther.
inline std::vector<std::size_t> panorama(const Configuration& config,
                                         std::size_t idx,
                                         const Tolerances& tol) {
    auto vis = visible_set(config, idx, tol);
    const Point self = config[idx].position;
    std::stable_sort(vis.begin(), vis.end(), [&](std::size_t a, std::size_t b) {
        return direction_angle(self, config[a].position) <
               direction_angle(self, config[b].position);
    });
    return vis;
}

// A maximal group of three or more robots on one line. Members are ordered
// by their projection along the canonical direction; the anchor is the
// first member's position.
struct CollinearLine {
    std::vector<std::size_t> members;
    Point anchor{};
    Direction direction{};
};

namespace detail {

inline CollinearLine build_line(const Configuration& config,
                                std::vector<std::size_t> members) {
    // Extreme pair -> direction; canonical sign so equal lines compare equal.
    std::size_t ea = members[0], eb = members[1];
    double best = distance(config[ea].position, config[eb].position);
    for (std::size_t i = 0; i < members.size(); ++i) {
        for (std::size_t j = i + 1; j < members.size(); ++j) {
            const double d = distance(config[members[i]].position,
                                      config[members[j]].position);
            if (d > best) { best = d; ea = members[i]; eb = members[j]; }
        }
    }
    Point dvec = config[eb].position - config[ea].position;
    if (dvec.x < 0.0 || (dvec.x == 0.0 && dvec.y < 0.0)) dvec = -1.0 * dvec;
    const double len = norm(dvec);
    const Direction dir{dvec.x / len, dvec.y / len};
    auto proj = [&](std::size_t m) {
        const Point rel = config[m].position - config[ea].position;
        return rel.x * dir.dx + rel.y * dir.dy;
    };
    std::sort(members.begin(), members.end(),
              [&](std::size_t a, std::size_t b) { return proj(a) < proj(b); });
    const Point anchor = config[members.front()].position;
    return {std::move(members), anchor, dir};
}

} // namespace detail

// All maximal collinear groups of size >= 3. Built by closing each robot
// pair over the collinearity predicate, then merging groups that share two
// or more robots (tolerance can make pair closures disagree at the margin).
inline std::vector<CollinearLine> collinear_lines(const Configuration& config,
                                                  const Tolerances& tol) {
    detail::require_distinct(config, tol);
    const std::size_t n = config.size();
    std::set<std::vector<std::size_t>> groups;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            std::vector<std::size_t> g{i, j};
            for (std::size_t k = 0; k < n; ++k) {
                if (k == i || k == j) continue;
                if (is_collinear(config[i].position, config[j].position,
                                 config[k].position, tol)) {
                    g.push_back(k);
                }
            }
            if (g.size() < 3) continue;
            std::sort(g.begin(), g.end());
            groups.insert(std::move(g));
        }
    }
    // Merge groups sharing >= 2 members until stable.
    std::vector<std::vector<std::size_t>> merged(groups.begin(), groups.end());
    bool changed = true;
    while (changed) {
        changed = false;
        for (std::size_t a = 0; a < merged.size() && !changed; ++a) {
            for (std::size_t b = a + 1; b < merged.size() && !changed; ++b) {
                std::vector<std::size_t> common;
                std::set_intersection(merged[a].begin(), merged[a].end(),
                                      merged[b].begin(), merged[b].end(),
                                      std::back_inserter(common));
                if (common.size() >= 2) {
                    std::vector<std::size_t> u;
                    std::set_union(merged[a].begin(), merged[a].end(),
                                   merged[b].begin(), merged[b].end(),
                                   std::back_inserter(u));
                    merged[a] = std::move(u);
                    merged.erase(merged.begin() + static_cast<std::ptrdiff_t>(b));
                    changed = true;
                }
            }
        }
    }
    std::sort(merged.begin(), merged.end());
    std::vector<CollinearLine> lines;
    lines.reserve(merged.size());
    for (auto& g : merged) lines.push_back(detail::build_line(config, std::move(g)));
    return lines;
}

// Indices (into `lines`) of the lines containing robot `idx`.
inline std::vector<std::size_t> lines_through(const std::vector<CollinearLine>& lines,
                                              std::size_t idx) {
    std::vector<std::size_t> out;
    for (std::size_t li = 0; li < lines.size(); ++li) {
        if (std::find(lines[li].members.begin(), lines[li].members.end(), idx) !=
            lines[li].members.end()) {
            out.push_back(li);
        }
    }
    return out;
}

// A robot is terminal when it is not strictly between any two other robots;
// equivalently it is an extreme member of every collinear group it belongs
// to (robots in general position are trivially terminal).
inline bool is_terminal(const Configuration& config, std::size_t idx,
                        const Tolerances& tol) {
    const Point self = config[idx].position;
    for (std::size_t j = 0; j < config.size(); ++j) {
        if (j == idx) continue;
        for (std::size_t k = j + 1; k < config.size(); ++k) {
            if (k == idx) continue;
            const Point a = config[j].position, b = config[k].position;
            if (is_collinear(a, self, b, tol) && is_between(a, self, b, tol)) {
                return false;
            }
        }
    }
    return true;
}

inline std::vector<bool> terminal_flags(const Configuration& config,
                                        const Tolerances& tol) {
    detail::require_distinct(config, tol);
    std::vector<bool> out(config.size());
    for (std::size_t i = 0; i < config.size(); ++i) out[i] = is_terminal(config, i, tol);
    return out;
}

inline ConfigClass classify_configuration(const Configuration& config,
                                          const Tolerances& tol) {
    detail::require_distinct(config, tol);
    const std::size_t n = config.size();
    if (n <= 2) return ConfigClass::general_position;
    bool any_triple = false;
    for (std::size_t i = 0; i < n && !any_triple; ++i)
        for (std::size_t j = i + 1; j < n && !any_triple; ++j)
            for (std::size_t k = j + 1; k < n && !any_triple; ++k)
                any_triple = is_collinear(config[i].position, config[j].position,
                                          config[k].position, tol);
    if (!any_triple) return ConfigClass::general_position;
    // All on one line iff everything is collinear with the farthest pair.
    std::size_t ea = 0, eb = 1;
    double best = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            const double d = distance(config[i].position, config[j].position);
            if (d > best) { best = d; ea = i; eb = j; }
        }
    for (std::size_t k = 0; k < n; ++k) {
        if (k == ea || k == eb) continue;
        if (!is_collinear(config[ea].position, config[eb].position,
                          config[k].position, tol)) {
            return ConfigClass::partially_collinear;
        }
    }
    return ConfigClass::all_collinear;
}

// Line/junction incidence with a cycle census. A junction is a robot lying
// on two or more lines and interior to at least one of them; a line
// qualifies for the cycle graph when it carries two or more junctions.
struct LineStructure {
    std::vector<CollinearLine> lines;
    std::vector<std::size_t> junctions;            // robot indices, ascending
    std::vector<std::vector<std::size_t>> incidence; // robot -> line indices
    std::vector<std::vector<std::size_t>> cycles;  // each: >= 3 line indices
    std::vector<std::pair<std::size_t, std::size_t>> two_cycle_candidates;
};

namespace detail {

struct CycleEdge {
    std::size_t a, b;   // qualifying-line node ids (positions in `qual`)
    std::size_t junction; // robot index joining them
};

// Canonical form of a cycle of node ids: minimal over rotations of the
// sequence and of its reversal.
inline std::vector<std::size_t> canonical_cycle(std::vector<std::size_t> c) {
    auto best = c;
    auto consider = [&](const std::vector<std::size_t>& cand) {
        if (cand < best) best = cand;
    };
    for (int pass = 0; pass < 2; ++pass) {
        for (std::size_t r = 0; r < c.size(); ++r) {
            std::rotate(c.begin(), c.begin() + 1, c.end());
            consider(c);
        }
        std::reverse(c.begin(), c.end());
    }
    return best;
}

} // namespace detail

inline LineStructure line_structure(const Configuration& config,
                                    const Tolerances& tol) {
    LineStructure out;
    out.lines = collinear_lines(config, tol);
    out.incidence.resize(config.size());
    for (std::size_t i = 0; i < config.size(); ++i) {
        out.incidence[i] = lines_through(out.lines, i);
    }
    for (std::size_t i = 0; i < config.size(); ++i) {
        if (out.incidence[i].size() < 2) continue;
        bool interior_somewhere = false;
        for (std::size_t li : out.incidence[i]) {
            const auto& m = out.lines[li].members;
            if (m.front() != i && m.back() != i) { interior_somewhere = true; break; }
        }
        if (interior_somewhere) out.junctions.push_back(i);
    }

    // Cycle graph over qualifying lines; edges labeled by the junction.
    std::vector<std::size_t> qual;
    for (std::size_t li = 0; li < out.lines.size(); ++li) {
        std::size_t count = 0;
        for (std::size_t j : out.junctions) {
            const auto& m = out.lines[li].members;
            if (std::find(m.begin(), m.end(), j) != m.end()) ++count;
        }
        if (count >= 2) qual.push_back(li);
    }
    auto node_of = [&](std::size_t li) {
        return std::find(qual.begin(), qual.end(), li) - qual.begin();
    };
    std::vector<detail::CycleEdge> edges;
    for (std::size_t j : out.junctions) {
        std::vector<std::size_t> on;
        for (std::size_t li : out.incidence[j]) {
            if (std::find(qual.begin(), qual.end(), li) != qual.end()) {
                on.push_back(static_cast<std::size_t>(node_of(li)));
            }
        }
        for (std::size_t a = 0; a < on.size(); ++a)
            for (std::size_t b = a + 1; b < on.size(); ++b)
                edges.push_back({on[a], on[b], j});
    }
    for (const auto& e : edges) {
        auto pair = std::minmax(qual[e.a], qual[e.b]);
        auto cand = std::make_pair(pair.first, pair.second);
        if (std::find(out.two_cycle_candidates.begin(), out.two_cycle_candidates.end(),
                      cand) == out.two_cycle_candidates.end()) {
            out.two_cycle_candidates.push_back(cand);
        }
    }
    std::sort(out.two_cycle_candidates.begin(), out.two_cycle_candidates.end());

    // Simple cycles of length >= 3 with all link junctions distinct, no
    // chords, deduplicated canonically. Graphs here are tiny.
    std::set<std::vector<std::size_t>> seen;
    const std::size_t nn = qual.size();
    std::vector<std::size_t> path;
    std::vector<std::size_t> used_junctions;
    auto adjacent = [&](std::size_t u, std::size_t v) {
        for (const auto& e : edges) {
            if ((e.a == u && e.b == v) || (e.a == v && e.b == u)) return true;
        }
        return false;
    };
    auto emit = [&](const std::vector<std::size_t>& nodes) {
        // Chord check: non-consecutive nodes must not be adjacent.
        const std::size_t m = nodes.size();
        for (std::size_t i = 0; i < m; ++i) {
            for (std::size_t j = i + 1; j < m; ++j) {
                const bool consecutive = (j == i + 1) || (i == 0 && j == m - 1);
                if (!consecutive && adjacent(nodes[i], nodes[j])) return;
            }
        }
        std::vector<std::size_t> as_lines;
        for (std::size_t nid : nodes) as_lines.push_back(qual[nid]);
        auto canon = detail::canonical_cycle(std::move(as_lines));
        if (seen.insert(canon).second) out.cycles.push_back(canon);
    };
    // DFS rooted at each node; only extend with nodes > root to fix the
    // starting point, and close back to the root.
    std::function<void(std::size_t)> extend = [&](std::size_t root) {
        const std::size_t cur = path.back();
        for (const auto& e : edges) {
            std::size_t nxt;
            if (e.a == cur) nxt = e.b;
            else if (e.b == cur) nxt = e.a;
            else continue;
            if (std::find(used_junctions.begin(), used_junctions.end(), e.junction) !=
                used_junctions.end()) {
                continue;
            }
            if (nxt == root && path.size() >= 3) {
                emit(path);
                continue;
            }
            if (nxt <= root) continue;
            if (std::find(path.begin(), path.end(), nxt) != path.end()) continue;
            path.push_back(nxt);
            used_junctions.push_back(e.junction);
            extend(root);
            used_junctions.pop_back();
            path.pop_back();
        }
    };
    for (std::size_t root = 0; root < nn; ++root) {
        path.assign(1, root);
        used_junctions.clear();
        extend(root);
    }
    std::sort(out.cycles.begin(), out.cycles.end());
    return out;
}

// A robot's view in its own coordinate chart: itself at the origin, every
// visible robot mapped through the similarity `frame`.
struct LocalPoint {
    std::size_t index = 0; // index into the global configuration
    Point p{};             // local-frame coordinates
};

struct Snapshot {
    std::size_t observer = 0;
    Point observer_image{}; // frame.apply(observer's global position)
    Similarity frame;
    std::vector<LocalPoint> visible; // sorted by global index

    Point to_global(Point local) const { return frame.invert(local + observer_image); }
};

// Visibility is physical, so it is evaluated in global coordinates; only
// the reported positions pass through the robot's frame.
inline Snapshot local_snapshot(const Configuration& config, std::size_t idx,
                               const Similarity& frame, const Tolerances& tol) {
    Snapshot snap;
    snap.observer = idx;
    snap.frame = frame;
    snap.observer_image = frame.apply(config[idx].position);
    for (std::size_t j : visible_set(config, idx, tol)) {
        snap.visible.push_back({j, frame.apply(config[j].position) - snap.observer_image});
    }
    return snap;
}

} // namespace mutvis
