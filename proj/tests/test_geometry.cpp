#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <vector>

#include <regionlab/geometry.hpp>
#include <regionlab/rng.hpp>
#include <regionlab/synth.hpp>

using namespace regionlab;

namespace {

Ring square(double x0, double y0, double side) {
    return {{x0, y0}, {x0 + side, y0}, {x0 + side, y0 + side}, {x0, y0 + side}};
}

RegionGeometry regular_polygon(int sides, double radius) {
    Ring ring;
    for (int i = 0; i < sides; ++i) {
        const double angle = 2.0 * std::numbers::pi * i / sides;
        ring.push_back({radius * std::cos(angle), radius * std::sin(angle)});
    }
    return make_region({"poly", ""}, {{ring, {}}});
}

} // namespace

TEST_CASE("unit square has area 1, perimeter 4, centroid at its middle") {
    const RegionGeometry r = make_region({"sq", ""}, {{square(2.0, 3.0, 1.0), {}}});
    REQUIRE(r.area == Catch::Approx(1.0).margin(1e-12));
    REQUIRE(r.perimeter == Catch::Approx(4.0).margin(1e-12));
    REQUIRE(r.centroid.x == Catch::Approx(2.5).margin(1e-12));
    REQUIRE(r.centroid.y == Catch::Approx(3.5).margin(1e-12));
}

TEST_CASE("ring orientation does not change area or centroid") {
    Ring cw = square(0.0, 0.0, 2.0);
    std::reverse(cw.begin(), cw.end());
    const RegionGeometry r = make_region({"sq", ""}, {{cw, {}}});
    REQUIRE(r.area == Catch::Approx(4.0).margin(1e-12));
    REQUIRE(r.centroid.x == Catch::Approx(1.0).margin(1e-12));
}

TEST_CASE("triangle area matches the half-base-times-height formula") {
    const Ring tri{{0.0, 0.0}, {4.0, 0.0}, {0.0, 3.0}};
    const RegionGeometry r = make_region({"tri", ""}, {{tri, {}}});
    REQUIRE(r.area == Catch::Approx(6.0).margin(1e-12));
    REQUIRE(r.perimeter == Catch::Approx(12.0).margin(1e-12));
    REQUIRE(r.centroid.x == Catch::Approx(4.0 / 3.0).margin(1e-12));
    REQUIRE(r.centroid.y == Catch::Approx(1.0).margin(1e-12));
}

TEST_CASE("holes subtract area and add boundary length") {
    const RegionGeometry r =
        make_region({"donut", ""}, {{square(0.0, 0.0, 3.0), {square(1.0, 1.0, 1.0)}}});
    REQUIRE(r.area == Catch::Approx(8.0).margin(1e-12));
    REQUIRE(r.perimeter == Catch::Approx(16.0).margin(1e-12));
}

TEST_CASE("multipart geometry sums parts") {
    const RegionGeometry r = make_region(
        {"both", ""}, {{square(0.0, 0.0, 1.0), {}}, {square(5.0, 0.0, 2.0), {}}});
    REQUIRE(r.area == Catch::Approx(5.0).margin(1e-12));
    REQUIRE(r.perimeter == Catch::Approx(12.0).margin(1e-12));
    // Area-weighted centroid: (0.5*1 + 6*4)/5 in x.
    REQUIRE(r.centroid.x == Catch::Approx((0.5 * 1.0 + 6.0 * 4.0) / 5.0).margin(1e-12));
}

TEST_CASE("shoelace area agrees with a Monte-Carlo hit count on a random polygon") {
    // Star-shaped polygon around the origin with random radii; the sampling
    // estimate provides an implementation-independent oracle.
    Rng rng(11);
    Ring ring;
    const int sides = 17;
    for (int i = 0; i < sides; ++i) {
        const double angle = 2.0 * std::numbers::pi * i / sides;
        const double radius = rng.uniform(0.5, 2.0);
        ring.push_back({radius * std::cos(angle), radius * std::sin(angle)});
    }
    const RegionGeometry r = make_region({"star", ""}, {{ring, {}}});
    const int samples = 200000;
    int hits = 0;
    for (int s = 0; s < samples; ++s) {
        const Point p{rng.uniform(-2.0, 2.0), rng.uniform(-2.0, 2.0)};
        if (detail::ring_contains(r.rings[0], p))
            ++hits;
    }
    const double mc_area = 16.0 * hits / samples;
    const double mc_se = 16.0 * std::sqrt(0.25 / samples);
    REQUIRE(std::abs(mc_area - r.area) < 5.0 * mc_se + 0.01);
}

TEST_CASE("degenerate rings are rejected") {
    REQUIRE_THROWS(make_region({"bad", ""}, {{Ring{{0, 0}, {1, 0}}, {}}}));
    REQUIRE_THROWS(make_region({"bad", ""}, {{Ring{{0, 0}, {1, 0}, {1, 0}, {0, 0}}, {}}}));
    REQUIRE_THROWS(make_region({"empty", ""}, {}));
}

TEST_CASE("compactness of a square is pi over four") {
    const RegionGeometry r = make_region({"sq", ""}, {{square(0.0, 0.0, 3.0), {}}});
    REQUIRE(ipq(r) == Catch::Approx(std::numbers::pi / 4.0).margin(1e-9));
}

TEST_CASE("compactness of regular polygons follows the closed form") {
    // A regular n-gon has IPQ = (pi/n) / tan(pi/n); it approaches 1 as n grows.
    for (int sides : {3, 5, 8, 64}) {
        const double expected =
            (std::numbers::pi / sides) / std::tan(std::numbers::pi / sides);
        REQUIRE(ipq(regular_polygon(sides, 2.0)) == Catch::Approx(expected).margin(1e-9));
    }
    REQUIRE(ipq(regular_polygon(1024, 1.0)) >= 0.9999);
}

TEST_CASE("compactness never exceeds one on random convex shapes") {
    Rng rng(12);
    for (int t = 0; t < 20; ++t) {
        const int sides = 3 + static_cast<int>(rng.uniform_index(15));
        REQUIRE(ipq(regular_polygon(sides, rng.uniform(0.1, 5.0))) <= 1.0 + 1e-12);
    }
}

TEST_CASE("dissolving a 2x2 block of unit squares leaves the outer boundary") {
    std::vector<RegionGeometry> cells;
    for (int r = 0; r < 2; ++r)
        for (int c = 0; c < 2; ++c)
            cells.push_back(make_region({"c" + std::to_string(r * 2 + c), ""},
                                        {{square(c, r, 1.0), {}}}));
    const RegionGeometry merged = dissolve(cells, {"m", ""});
    REQUIRE(merged.area == Catch::Approx(4.0).margin(1e-12));
    REQUIRE(merged.perimeter == 8.0); // interior edges cancel exactly
    REQUIRE(merged.centroid.x == Catch::Approx(1.0).margin(1e-12));
}

TEST_CASE("dissolving a full grid row yields a rectangle's compactness") {
    const auto cells = grid_geometries(1, 5);
    const RegionGeometry merged = dissolve(cells, {"row", ""});
    REQUIRE(merged.area == Catch::Approx(5.0).margin(1e-12));
    REQUIRE(merged.perimeter == Catch::Approx(12.0).margin(1e-12));
    REQUIRE(ipq(merged) ==
            Catch::Approx(4.0 * std::numbers::pi * 5.0 / 144.0).margin(1e-12));
}

TEST_CASE("dissolve keeps interior holes formed by a ring of cells") {
    // Eight cells surrounding an empty middle produce a donut whose hole
    // boundary stays part of the perimeter.
    std::vector<RegionGeometry> cells;
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c) {
            if (r == 1 && c == 1)
                continue;
            cells.push_back(make_region({"c" + std::to_string(r * 3 + c), ""},
                                        {{square(c, r, 1.0), {}}}));
        }
    const RegionGeometry merged = dissolve(cells, {"ring", ""});
    REQUIRE(merged.area == Catch::Approx(8.0).margin(1e-12));
    REQUIRE(merged.perimeter == Catch::Approx(16.0).margin(1e-12));
}
