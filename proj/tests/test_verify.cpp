#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "tankflow/verify.hpp"

using namespace tankflow;

TEST_CASE("verify suite passes") {
    for (const auto& c : run_verify_suite()) {
        CAPTURE(c.name);
        CAPTURE(c.value);
        CAPTURE(c.detail);
        CHECK(c.passed);
    }
}

TEST_CASE("rigid rotation check catches a convective sign error") {
    const CartesianResidual broken = [](const Jet& vx, const Jet& vy, const Jet& p, const FluidProps& f) {
        std::array<double, 3> r = ns_cartesian(vx, vy, p, f);
        r[0] -= 2 * f.rho * vy.v * vx.b;
        return r;
    };
    CHECK_FALSE(check_rigid_rotation(broken).passed);
    CHECK(check_rigid_rotation().passed);
}
