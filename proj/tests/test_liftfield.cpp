#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "tankflow/errors.hpp"
#include "tankflow/liftfield.hpp"

#include <cmath>
#include <numbers>

using namespace tankflow;

namespace {

constexpr double kOmega = 0.625;

/// First derivatives from values, second derivatives from the jet gradient.
template <class F>
void check_jet_fd(F jet_at, const CartPoint& p, double h, double tol) {
    const Jet j = jet_at(p);
    auto at = [&](double dx, double dy) { return jet_at(CartPoint{p.x + dx, p.y + dy}); };
    const double fx = (at(h, 0).v - at(-h, 0).v) / (2 * h);
    const double fy = (at(0, h).v - at(0, -h).v) / (2 * h);
    const double fxx = (at(h, 0).a - at(-h, 0).a) / (2 * h);
    const double fxy = (at(0, h).a - at(0, -h).a) / (2 * h);
    const double fyx = (at(h, 0).b - at(-h, 0).b) / (2 * h);
    const double fyy = (at(0, h).b - at(0, -h).b) / (2 * h);
    const double sd = std::max({std::abs(j.a), std::abs(j.b), 1e-3});
    const double s2 = std::max({std::abs(j.aa), std::abs(j.ab), std::abs(j.bb), 1e-2});
    CHECK(std::abs(j.a - fx) < tol * sd);
    CHECK(std::abs(j.b - fy) < tol * sd);
    CHECK(std::abs(j.aa - fxx) < tol * s2);
    CHECK(std::abs(j.ab - fxy) < tol * s2);
    CHECK(std::abs(j.ab - fyx) < tol * s2);
    CHECK(std::abs(j.bb - fyy) < tol * s2);
}

} // namespace

TEST_CASE("wall weight of a half level") {
    CHECK(s_weight(0.5, 8) == doctest::Approx(0.99609375).epsilon(1e-15));
    CHECK(s_weight(1.0, 8) == 1.0);
    CHECK(s_weight(0.0, 8) == 0.0);
    const Radial s = s_weight(Radial{0.3, -2.0, 0.5}, 8);
    const double h = 1e-6;
    const double d = (s_weight(0.3 + h, 8) - s_weight(0.3 - h, 8)) / (2 * h);
    CHECK(s.fr == doctest::Approx(-2.0 * d).epsilon(1e-7));
}

TEST_CASE("lifting speed matches the stirrer and vanishes at r_star") {
    const LiftingConfig cfg;
    CHECK(lifting_speed(0.02, cfg).f == doctest::Approx(0.02));
    CHECK(lifting_speed(0.04 + 1e-15, cfg).f == doctest::Approx(0.04).epsilon(1e-12));
    CHECK(std::abs(lifting_speed(0.0875, cfg).f) < 1e-16);
    const LiftingFunction lift(cfg);
    const GeometryConfig geo;
    for (const auto& p : sample_boundary(Boundary::Stirrer, 100, geo, {}, false, 9)) {
        const CartPoint v = lift.velocity(p, kOmega), ref = stirrer_velocity(p, kOmega);
        CHECK(std::abs(v.x - ref.x) < 1e-12);
        CHECK(std::abs(v.y - ref.y) < 1e-12);
    }
    LiftingConfig bad;
    bad.r_star = 0.01;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
}

TEST_CASE("lifting jets agree with finite differences") {
    const GeometryConfig geo;
    for (bool scaled : {false, true}) {
        LiftingConfig cfg;
        cfg.wall_scaled = scaled;
        const LiftingFunction lift =
            scaled ? LiftingFunction(cfg, make_distance_field(FieldKind::WallSpline, geo, {})) : LiftingFunction(cfg);
        for (CartPoint p : {CartPoint{0.02, 0.013}, CartPoint{0.05, -0.03}, CartPoint{-0.07, 0.04}}) {
            check_jet_fd([&](const CartPoint& q) { return lift.vx(q, kOmega); }, p, 1e-6, 1e-6);
            check_jet_fd([&](const CartPoint& q) { return lift.vy(q, kOmega); }, p, 1e-6, 1e-6);
            const double r = std::hypot(p.x, p.y), phi = std::atan2(p.y, p.x);
            const Jet vp = lift.vphi(r, kOmega);
            const double expected = -p.x * std::sin(phi) * 0.0 + (-std::sin(phi) * lift.vx(p, kOmega).v +
                                                                   std::cos(phi) * lift.vy(p, kOmega).v);
            CHECK(vp.v == doctest::Approx(expected).epsilon(1e-12));
            CHECK(vp.b == 0.0);
        }
    }
}

TEST_CASE("wall-scaled lifting function vanishes on the wall") {
    const GeometryConfig geo;
    LiftingConfig cfg;
    cfg.wall_scaled = true;
    const LiftingFunction lift(cfg, make_distance_field(FieldKind::WallSpline, geo, {}));
    CHECK(std::abs(lift.speed(0.1, kOmega).f) < 1e-15);
    CHECK(lift.speed(0.03, kOmega).f == doctest::Approx(kOmega * 0.03));
    CHECK_THROWS_AS(LiftingFunction{cfg}, ConfigError);
}

TEST_CASE("strong and hybrid fields vanish on their zero sets") {
    const GeometryConfig geo;
    SampleSet s;
    s.boundary[Boundary::Stirrer] = boundary_grid(Boundary::Stirrer, 512, geo, {}, false);
    s.boundary[Boundary::Wall] = boundary_grid(Boundary::Wall, 512, geo, {}, false);
    const auto probes = sample_domain(region_by_id("full", geo, {}), 10000, geo, 77);
    const DistanceField strong = build_distance_field(FieldKind::Strong, s, probes);
    const DistanceField hybrid = build_distance_field(FieldKind::Hybrid, s, probes);
    for (const auto& p : s.boundary[Boundary::Stirrer]) {
        CHECK(std::abs(strong.value(p)) < 1e-9);
        CHECK(std::abs(hybrid.value(p)) < 1e-9);
    }
    for (const auto& p : s.boundary[Boundary::Wall]) CHECK(std::abs(strong.value(p)) < 1e-9);
    double mx = 0.0;
    int positive = 0;
    for (const auto& p : probes) {
        const double g = strong.value(p);
        // unclamped: slight overshoot below zero next to the zero set
        CHECK(g > -0.02);
        CHECK(g <= 1.0 + 1e-12);
        mx = std::max(mx, g);
        positive += g > 0.0;
    }
    CHECK(mx == doctest::Approx(1.0));
    CHECK(positive > 9900);
    CHECK(hybrid.value({0.1 * std::cos(0.3), 0.1 * std::sin(0.3)}) > 0.5);
}

TEST_CASE("field jets agree with finite differences") {
    const GeometryConfig geo;
    const DistanceField strong = make_distance_field(FieldKind::Strong, geo, {});
    for (CartPoint p : {CartPoint{0.05, 0.02}, CartPoint{-0.03, 0.06}, CartPoint{0.06, -0.06}}) {
        check_jet_fd([&](const CartPoint& q) { return strong.cartesian_jet(q); }, p, 1e-5, 1e-4);
        CHECK(std::abs(strong.cartesian_jet(p).v - strong.value(p)) < 1e-10);
        const Jet pj = strong.polar_jet(p);
        const double r = std::hypot(p.x, p.y), phi = std::atan2(p.y, p.x), h = 1e-5;
        auto at = [&](double dr, double dp) { return strong.polar_jet(polar_to_cart({r + dr, phi + dp})); };
        CHECK(pj.a == doctest::Approx((at(h, 0).v - at(-h, 0).v) / (2 * h)).epsilon(1e-4));
        CHECK(pj.b == doctest::Approx((at(0, h).v - at(0, -h).v) / (2 * h)).epsilon(1e-4));
        CHECK(pj.aa == doctest::Approx((at(h, 0).a - at(-h, 0).a) / (2 * h)).epsilon(1e-4));
        CHECK(pj.ab == doctest::Approx((at(h, 0).b - at(-h, 0).b) / (2 * h)).epsilon(1e-4));
        CHECK(pj.bb == doctest::Approx((at(0, h).b - at(0, -h).b) / (2 * h)).epsilon(1e-4));
    }
}

TEST_CASE("overlap field is one inside, zero outside and monotone") {
    const GeometryConfig geo;
    const Partition part{0.075, 0.0, 0.3, 0.01};
    const DistanceField g = make_distance_field(FieldKind::Overlap, geo, part);
    for (const auto& p : sample_boundary(Boundary::OverlapIn, 200, geo, part, false, 2))
        CHECK(std::abs(g.value(p) - 1.0) < 1e-12);
    for (const auto& p : sample_boundary(Boundary::OverlapOut, 200, geo, part, false, 2))
        CHECK(std::abs(g.value(p)) < 1e-12);
    double prev = 1.0;
    for (int i = 0; i <= 100; ++i) {
        const double v = g.radial_eval(0.07 + 0.01 * i / 100.0).f;
        CHECK(v <= prev + 1e-15);
        CHECK(v >= 0.0);
        CHECK(v <= 1.0);
        prev = v;
    }
    CHECK(g.radial_eval(0.075).f == doctest::Approx(0.5).epsilon(1e-3));
}

TEST_CASE("unknown field kind is a configuration error") {
    CHECK_THROWS_AS(field_kind_from_name("sdf"), ConfigError);
    CHECK(field_kind_from_name("hybrid") == FieldKind::Hybrid);
}
