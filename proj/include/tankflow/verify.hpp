#pragma once

#include "tankflow/physics.hpp"

#include <array>
#include <functional>
#include <string>
#include <vector>

namespace tankflow {

struct CheckResult {
    std::string name;
    bool passed = false;
    double value = 0.0;     ///< measured quantity
    double tolerance = 0.0; ///< pass if value < tolerance
    std::string detail;
};

using CartesianResidual = std::function<std::array<double, 3>(const Jet&, const Jet&, const Jet&, const FluidProps&)>;

/// Rigid rotation with p = rho omega^2 r^2 / 2 at 1000 tank points; residual is replaceable for fault injection.
CheckResult check_rigid_rotation(const CartesianResidual& residual = {});
CheckResult check_rigid_rotation_polar();
/// Couette flow in the polar and inner-ODE residuals.
CheckResult check_couette_residuals();
/// Network and ansatz jets against central differences.
CheckResult check_input_derivatives(int configs, std::uint64_t seed);
/// Loss gradients against central differences on reduced presets.
CheckResult check_loss_gradients(std::uint64_t seed);
/// Strong and hybrid ansatz reproduce the stirrer (and wall) velocity.
CheckResult check_strong_bc(int param_sets, std::uint64_t seed);
/// Overlap blend equals the inner model on the inner edge and the outer model on the outer edge.
CheckResult check_overlap_endpoints(std::uint64_t seed);
/// Identical fields give zero error; a pressure offset does not change the pressure error.
CheckResult check_metric_identities();
CheckResult check_reynolds_map();

/// The suite run by the verify command.
std::vector<CheckResult> run_verify_suite();

} // namespace tankflow
