#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "tankflow/errors.hpp"
#include "tankflow/geometry.hpp"

#include <cmath>
#include <numbers>

using namespace tankflow;

namespace {
constexpr double kPi = std::numbers::pi;
}

TEST_CASE("polar conversion of a 3-4-5 point") {
    const PolarPoint p = cart_to_polar({3.0, 4.0});
    CHECK(p.r == doctest::Approx(5.0).epsilon(1e-15));
    CHECK(p.phi == doctest::Approx(std::atan2(4.0, 3.0)).epsilon(1e-15));
    const CartPoint q = polar_to_cart(p);
    CHECK(std::abs(q.x - 3.0) < 1e-14);
    CHECK(std::abs(q.y - 4.0) < 1e-14);
    CHECK(cart_to_polar({0.0, -1.0}).phi == doctest::Approx(1.5 * kPi));
}

TEST_CASE("stirrer velocity examples") {
    const CartPoint v = stirrer_velocity({0.04, 0.0}, 0.625);
    CHECK(std::abs(v.x) < 1e-16);
    CHECK(v.y == doctest::Approx(-0.025).epsilon(1e-14));
    const CartPoint w = stirrer_velocity({0.0, 0.02}, 0.625);
    CHECK(w.x == doctest::Approx(0.0125).epsilon(1e-14));
    CHECK(std::abs(w.y) < 1e-16);
}

TEST_CASE("fluid domain classification") {
    const GeometryConfig geo;
    CHECK(in_fluid_domain({0.02, 0.02}, geo));
    CHECK_FALSE(in_fluid_domain({0.0, 0.0}, geo));
    CHECK_FALSE(in_fluid_domain({0.02, 0.0}, geo));
    CHECK_FALSE(in_fluid_domain({0.0, -0.03}, geo));
    CHECK(in_fluid_domain({0.05, 0.0}, geo));
    CHECK_FALSE(in_fluid_domain(polar_to_cart({0.09, kPi / 4}), geo));
    CHECK(in_fluid_domain(polar_to_cart({0.09, kPi / 4 + 0.1}), geo));
    CHECK_FALSE(in_fluid_domain({0.1, 0.0}, geo));
    CHECK_FALSE(in_fluid_domain({0.2, 0.0}, geo));
    const GeometryConfig ann = GeometryConfig::annulus_benchmark();
    CHECK_FALSE(in_fluid_domain({0.03, 0.0}, ann));
    CHECK(in_fluid_domain({0.05, 0.0}, ann));
}

TEST_CASE("geometry validation") {
    GeometryConfig geo;
    CHECK_NOTHROW(geo.validate());
    geo.r_baffle = 0.03;
    CHECK_THROWS_AS(geo.validate(), ConfigError);
    geo = GeometryConfig{};
    geo.r_reactor = -1;
    CHECK_THROWS_AS(geo.validate(), ConfigError);
}

TEST_CASE("domain samples are interior, deterministic and seed dependent") {
    const GeometryConfig geo;
    const Partition part{0.07, 0.0851, 0.3, 0.01};
    for (const char* id : {"full", "sym", "inner", "inner_ray", "outer", "outer_1", "outer_2", "band"}) {
        const Region reg = region_by_id(id, geo, part);
        const auto a = sample_domain(reg, 500, geo, 11);
        const auto b = sample_domain(reg, 500, geo, 11);
        const auto c = sample_domain(reg, 500, geo, 12);
        REQUIRE(a.size() == 500);
        bool same = true, differ = false;
        for (std::size_t i = 0; i < a.size(); ++i) {
            CHECK(in_fluid_domain(a[i], geo));
            const double r = std::hypot(a[i].x, a[i].y);
            CHECK(r >= reg.r_min - 1e-15);
            CHECK(r <= reg.r_max + 1e-15);
            if (reg.angular == AngularRange::Quarter) CHECK(std::abs(std::atan2(a[i].y, a[i].x)) <= kPi / 4 + 1e-15);
            if (reg.angular == AngularRange::Ray) CHECK(a[i].y == 0.0);
            same = same && a[i].x == b[i].x && a[i].y == b[i].y;
            differ = differ || a[i].x != c[i].x;
        }
        CHECK(same);
        CHECK(differ);
    }
    CHECK_THROWS_AS(region_by_id("nowhere", geo, part), ConfigError);
    CHECK_THROWS_AS(region_by_id("inner", geo, Partition{}), ConfigError);
}

TEST_CASE("domain sampling is area uniform") {
    const GeometryConfig geo = GeometryConfig::annulus_benchmark();
    const auto pts = sample_domain(region_by_id("full", geo, {}), 40000, geo, 5);
    int inside = 0;
    for (const auto& p : pts) inside += std::hypot(p.x, p.y) < 0.07;
    const double expected = (0.07 * 0.07 - 0.04 * 0.04) / (0.1 * 0.1 - 0.04 * 0.04);
    CHECK(static_cast<double>(inside) / pts.size() == doctest::Approx(expected).epsilon(0.02));
}

TEST_CASE("boundary samples lie on their boundary") {
    const GeometryConfig geo;
    const Partition part{0.07, 0.0851, 0.3, 0.01};
    for (Boundary b : {Boundary::Wall, Boundary::Stirrer, Boundary::Baffle, Boundary::Symmetry, Boundary::Interface,
                       Boundary::Continuity, Boundary::Derivative, Boundary::OverlapIn, Boundary::OverlapOut}) {
        for (bool quarter : {false, true}) {
            const auto pts = sample_boundary(b, 300, geo, part, quarter, 3);
            REQUIRE(pts.size() == 300);
            for (const auto& p : pts) {
                CHECK(distance_to_boundary(p, b, geo, part, quarter) < 1e-12);
                CHECK(in_closed_domain(p, geo, 1e-12));
                if (quarter && b != Boundary::Symmetry) CHECK(std::abs(std::atan2(p.y, p.x)) <= kPi / 4 + 1e-12);
            }
        }
    }
    for (const auto& p : sample_boundary(Boundary::Symmetry, 50, geo, part, true, 1))
        CHECK(std::atan2(p.y, p.x) == doctest::Approx(kPi / 4).epsilon(1e-14));
    for (const auto& p : sample_boundary(Boundary::Wall, 200, geo, part, true, 1))
        CHECK(std::hypot(p.x, p.y) > part.r_split);
    for (const auto& p : sample_boundary(Boundary::Baffle, 200, geo, part, true, 1))
        CHECK(std::hypot(p.x, p.y) <= part.r_split);
    CHECK_THROWS_AS(sample_boundary(Boundary::Interface, 5, geo, Partition{}, false, 1), ConfigError);
}

TEST_CASE("boundary grids are deduplicated and on the boundary") {
    const GeometryConfig geo;
    const auto pts = boundary_grid(Boundary::Stirrer, 512, geo, {}, false);
    CHECK(pts.size() >= 500);
    int at_origin = 0;
    for (const auto& p : pts) {
        CHECK(distance_to_boundary(p, Boundary::Stirrer, geo, {}, false) < 1e-12);
        at_origin += std::hypot(p.x, p.y) < 1e-15;
    }
    CHECK(at_origin == 1);
}

TEST_CASE("reflection into the symmetry sector") {
    for (double phi = 0.0; phi < 2 * kPi; phi += 0.0731) {
        int k = -1;
        const PolarPoint q = reflect_to_quarter({0.05, phi}, &k);
        CHECK(q.phi >= -kPi / 4);
        CHECK(q.phi < kPi / 4);
        CHECK(k >= 0);
        CHECK(k < 4);
        CHECK(std::abs(wrap_angle(q.phi + k * kPi / 2 - phi)) < 1e-12);
    }
    int k = -1;
    CHECK(reflect_to_quarter({1.0, 1.0}, &k).phi == doctest::Approx(1.0 - kPi / 2));
    CHECK(k == 1);
}
