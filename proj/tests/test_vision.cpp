#include <mutvis/vision.hpp>

#include <catch2/catch_amalgamated.hpp>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "testutil.hpp"

#include <random>
#include <set>

using namespace mutvis;

namespace {

std::vector<std::size_t> sorted(std::vector<std::size_t> v) {
    std::sort(v.begin(), v.end());
    return v;
}

// Independent visibility oracle: j is hidden from i iff some third robot
// passes the distance-sum betweenness test on segment (i, j).
std::vector<std::size_t> oracle_visible(const Configuration& c, std::size_t i) {
    std::vector<std::size_t> out;
    for (std::size_t j = 0; j < c.size(); ++j) {
        if (j == i) continue;
        bool blocked = false;
        for (std::size_t k = 0; k < c.size() && !blocked; ++k) {
            if (k == i || k == j) continue;
            blocked = oracle::between_by_distance(c[i].position, c[k].position,
                                                  c[j].position);
        }
        if (!blocked) out.push_back(j);
    }
    return out;
}

} // namespace

TEST_CASE("obstructed visibility") {
    Tolerances tol;
    SECTION("3x3 grid, pinned views") {
        auto c = fixtures::grid(3);
        REQUIRE(visible_set(c, 0, tol) == std::vector<std::size_t>{1, 3, 4, 5, 7});
        REQUIRE(visible_set(c, 1, tol).size() == 7); // edge-mid loses only (1,2)
        REQUIRE(visible_set(c, 4, tol).size() == 8); // center sees everyone
    }
    SECTION("four crossing lines, pinned view of a junction") {
        auto c = fixtures::cycle4();
        auto vis = visible_set(c, 2, tol); // robot at (3,0)
        REQUIRE(vis.size() == 9);
        // Hidden: (-1,0) behind (1,0), and (3,5) behind (3,3).
        REQUIRE(std::find(vis.begin(), vis.end(), 0) == vis.end());
        REQUIRE(std::find(vis.begin(), vis.end(), 5) == vis.end());
    }
    SECTION("star center sees only the innermost ring") {
        auto c = fixtures::star43();
        REQUIRE(visible_set(c, 0, tol) == std::vector<std::size_t>{1, 4, 7, 10});
    }
    SECTION("matches the distance-sum oracle everywhere") {
        for (const auto& c : {fixtures::grid(3), fixtures::grid(4),
                              fixtures::cycle4(), fixtures::star43(),
                              fixtures::line(6)}) {
            for (std::size_t i = 0; i < c.size(); ++i) {
                REQUIRE(visible_set(c, i, tol) == oracle_visible(c, i));
            }
        }
        std::mt19937_64 rng(21);
        int done = 0;
        while (done < 40) {
            auto pts = testutil::random_points(rng, 12);
            // Skip configurations with a triple near the tolerance boundary,
            // where the two formulations may legitimately disagree.
            if (oracle::min_triple_height(pts, 0.0) < 1e-3) continue;
            Configuration c;
            int id = 0;
            for (auto p : pts) c.push_back({id++, p, 0});
            for (std::size_t i = 0; i < c.size(); ++i) {
                REQUIRE(visible_set(c, i, tol) == oracle_visible(c, i));
            }
            ++done;
        }
    }
    SECTION("coincident robots are rejected") {
        Configuration c{{0, {0, 0}, 0}, {1, {0, 0}, 0}};
        REQUIRE_THROWS_AS(visible_set(c, 0, tol), std::invalid_argument);
    }
}

TEST_CASE("panorama ordering") {
    Tolerances tol;
    auto c = fixtures::grid(3);
    // From corner (0,0): angles 0, atan(1/2), pi/4, atan(2), pi/2.
    REQUIRE(panorama(c, 0, tol) == std::vector<std::size_t>{1, 5, 4, 7, 3});
}

TEST_CASE("collinear line extraction") {
    Tolerances tol;
    SECTION("single segment") {
        auto lines = collinear_lines(fixtures::line(5), tol);
        REQUIRE(lines.size() == 1);
        REQUIRE(lines[0].members == std::vector<std::size_t>{0, 1, 2, 3, 4});
        REQUIRE(exactly_equal(lines[0].anchor, {0, 0}));
        REQUIRE(lines[0].direction.dx == 1.0);
        REQUIRE(lines[0].direction.dy == 0.0);
    }
    SECTION("3x3 grid has three rows, three columns, two diagonals") {
        auto lines = collinear_lines(fixtures::grid(3), tol);
        std::set<std::vector<std::size_t>> got;
        for (const auto& l : lines) got.insert(sorted(l.members));
        std::set<std::vector<std::size_t>> want{
            {0, 1, 2}, {3, 4, 5}, {6, 7, 8}, // rows
            {0, 3, 6}, {1, 4, 7}, {2, 5, 8}, // columns
            {0, 4, 8}, {2, 4, 6},            // diagonals
        };
        REQUIRE(got == want);
    }
    SECTION("four crossing lines") {
        auto lines = collinear_lines(fixtures::cycle4(), tol);
        std::set<std::vector<std::size_t>> got;
        for (const auto& l : lines) got.insert(sorted(l.members));
        std::set<std::vector<std::size_t>> want{
            {0, 1, 2, 3}, {2, 4, 5, 8}, {6, 7, 8, 9}, {1, 7, 10, 11}};
        REQUIRE(got == want);
        // Members run along the line: the left vertical goes bottom to top.
        for (const auto& l : lines) {
            if (sorted(l.members) == std::vector<std::size_t>{1, 7, 10, 11}) {
                REQUIRE(l.members == std::vector<std::size_t>{10, 1, 7, 11});
                REQUIRE(exactly_equal(l.anchor, {1, -2}));
                REQUIRE(l.direction.dy == 1.0);
            }
        }
    }
    SECTION("recovers randomly planted lines exactly") {
        std::mt19937_64 rng(22);
        std::uniform_real_distribution<double> angle(0.0, k_pi);
        std::uniform_real_distribution<double> offset(-5.0, 5.0);
        std::uniform_int_distribution<int> members(3, 6);
        for (int it = 0; it < 60; ++it) {
            // Two lines at random angles through distinct anchor points,
            // far enough apart that no accidental alignments appear.
            Configuration c;
            std::set<std::vector<std::size_t>> want;
            int id = 0;
            for (int li = 0; li < 2; ++li) {
                const double a = angle(rng);
                const Point anchor{offset(rng) + 40.0 * li, offset(rng)};
                const Direction d{std::cos(a), std::sin(a)};
                std::vector<std::size_t> ids;
                const int m = members(rng);
                for (int s = 0; s < m; ++s) {
                    const double t = 1.5 * s + 0.25 * (li + 1);
                    ids.push_back(static_cast<std::size_t>(id));
                    c.push_back({id++, advance(anchor, d, t), 0});
                }
                want.insert(ids); // ids ascend along the planted line
            }
            auto lines = collinear_lines(c, tol);
            std::set<std::vector<std::size_t>> got;
            for (const auto& l : lines) got.insert(sorted(l.members));
            REQUIRE(got == want);
        }
    }
    SECTION("general position yields no lines") {
        Configuration c{{0, {0, 0}, 0}, {1, {1, 0}, 0}, {2, {0, 1}, 0}, {3, {2, 3}, 0}};
        REQUIRE(collinear_lines(c, tol).empty());
    }
}

TEST_CASE("terminality") {
    Tolerances tol;
    SECTION("grid corners are the only terminal robots") {
        auto flags = terminal_flags(fixtures::grid(3), tol);
        for (std::size_t i = 0; i < flags.size(); ++i) {
            REQUIRE(flags[i] == (i == 0 || i == 2 || i == 6 || i == 8));
        }
    }
    SECTION("crossing-line junctions are the non-terminal robots") {
        auto flags = terminal_flags(fixtures::cycle4(), tol);
        const std::set<std::size_t> junctions{1, 2, 7, 8};
        for (std::size_t i = 0; i < flags.size(); ++i) {
            REQUIRE(flags[i] == !junctions.contains(i));
        }
    }
    SECTION("star: only arm tips are terminal") {
        auto flags = terminal_flags(fixtures::star43(), tol);
        const std::set<std::size_t> tips{3, 6, 9, 12};
        for (std::size_t i = 0; i < flags.size(); ++i) {
            REQUIRE(flags[i] == tips.contains(i));
        }
    }
    SECTION("general position: everyone terminal") {
        Configuration c{{0, {0, 0}, 0}, {1, {4, 1}, 0}, {2, {1, 3}, 0}};
        auto flags = terminal_flags(c, tol);
        REQUIRE(std::all_of(flags.begin(), flags.end(), [](bool b) { return b; }));
    }
}

TEST_CASE("configuration classes") {
    Tolerances tol;
    REQUIRE(classify_configuration(fixtures::line(4), tol) == ConfigClass::all_collinear);
    REQUIRE(classify_configuration(fixtures::grid(3), tol) ==
            ConfigClass::partially_collinear);
    Configuration gp{{0, {0, 0}, 0}, {1, {4, 1}, 0}, {2, {1, 3}, 0}};
    REQUIRE(classify_configuration(gp, tol) == ConfigClass::general_position);
    Configuration two{{0, {0, 0}, 0}, {1, {1, 1}, 0}};
    REQUIRE(classify_configuration(two, tol) == ConfigClass::general_position);
}

TEST_CASE("line structure and cycle census") {
    Tolerances tol;
    SECTION("grid: five junctions, no cycles, one two-cycle candidate") {
        auto ls = line_structure(fixtures::grid(3), tol);
        REQUIRE(ls.junctions == std::vector<std::size_t>{1, 3, 4, 5, 7});
        REQUIRE(ls.cycles.empty());
        REQUIRE(ls.two_cycle_candidates.size() == 1);
        // The candidate joins middle row {3,4,5} and middle column {1,4,7}.
        const auto [la, lb] = ls.two_cycle_candidates[0];
        std::set<std::vector<std::size_t>> pair{ls.lines[la].members,
                                                ls.lines[lb].members};
        std::set<std::vector<std::size_t>> want{{3, 4, 5}, {1, 4, 7}};
        REQUIRE(pair == want);
    }
    SECTION("four crossing lines close into one 4-cycle") {
        auto ls = line_structure(fixtures::cycle4(), tol);
        REQUIRE(ls.junctions == std::vector<std::size_t>{1, 2, 7, 8});
        REQUIRE(ls.cycles.size() == 1);
        REQUIRE(ls.cycles[0].size() == 4);
        std::set<std::size_t> in_cycle(ls.cycles[0].begin(), ls.cycles[0].end());
        REQUIRE(in_cycle == std::set<std::size_t>{0, 1, 2, 3});
        REQUIRE(ls.two_cycle_candidates.size() == 4);
    }
    SECTION("star: single junction, nothing qualifies") {
        auto ls = line_structure(fixtures::star43(), tol);
        REQUIRE(ls.junctions == std::vector<std::size_t>{0});
        REQUIRE(ls.cycles.empty());
        REQUIRE(ls.two_cycle_candidates.empty());
    }
    SECTION("segment: no junctions") {
        auto ls = line_structure(fixtures::line(6), tol);
        REQUIRE(ls.lines.size() == 1);
        REQUIRE(ls.junctions.empty());
        REQUIRE(ls.cycles.empty());
    }
}

TEST_CASE("local snapshots") {
    Tolerances tol;
    auto c = fixtures::grid(3);
    SECTION("identity frame subtracts the observer") {
        auto snap = local_snapshot(c, 4, Similarity::identity(), tol);
        REQUIRE(snap.visible.size() == 8);
        for (const auto& [idx, p] : snap.visible) {
            REQUIRE(testutil::near_point(p, c[idx].position - c[4].position));
        }
        REQUIRE(testutil::near_point(snap.to_global({0.25, -0.5}),
                                     {1.25, 0.5}));
    }
    SECTION("similarity frames keep the view shape") {
        std::mt19937_64 rng(23);
        std::uniform_real_distribution<double> th(0.0, k_two_pi);
        std::uniform_real_distribution<double> sc(0.2, 5.0);
        std::uniform_real_distribution<double> sh(-9.0, 9.0);
        std::bernoulli_distribution refl(0.5);
        for (int it = 0; it < 50; ++it) {
            auto frame = Similarity::make(sc(rng), th(rng), refl(rng),
                                          {sh(rng), sh(rng)});
            auto plain = local_snapshot(c, 0, Similarity::identity(), tol);
            auto seen = local_snapshot(c, 0, frame, tol);
            REQUIRE(seen.visible.size() == plain.visible.size());
            for (std::size_t i = 0; i < seen.visible.size(); ++i) {
                REQUIRE(seen.visible[i].index == plain.visible[i].index);
                // Distances scale uniformly; the observer sits at the origin.
                REQUIRE(testutil::near(norm(seen.visible[i].p),
                                       frame.scale * norm(plain.visible[i].p), 1e-12));
            }
            // Mapping a local destination back lands where it should.
            const Point dest_local = seen.visible[0].p;
            REQUIRE(testutil::near_point(seen.to_global(dest_local),
                                         c[plain.visible[0].index].position, 1e-9));
        }
    }
}
