#pragma once

#include <functional>
#include <string>
#include <vector>

namespace tankflow {

struct LbfgsOptions {
    int max_iterations = 1000;
    int history = 50;
    double gtol = 1e-12;        ///< stop when max |g| falls below
    double ftol = 0.0;          ///< relative change over ftol_window iterations; 0 disables
    int ftol_window = 10;
    double c1 = 1e-4;
    double c2 = 0.9;
    int max_line_search = 30;

    void validate() const;
};

enum class StopReason { MaxIterations, GradientTolerance, ObjectiveTolerance, LineSearchFailure, Callback };

std::string stop_reason_name(StopReason r);

struct LbfgsResult {
    StopReason reason = StopReason::MaxIterations;
    int iterations = 0;
    int evaluations = 0;
    double f = 0.0;
    double gnorm = 0.0;
};

/// f(x, g) returns the objective and writes the gradient.
using Objective = std::function<double(const std::vector<double>&, std::vector<double>&)>;
/// Called after every accepted step; return false to stop.
using IterationCallback = std::function<bool(int iteration, double f, const std::vector<double>& x)>;

/// Unconstrained L-BFGS with a strong-Wolfe line search. x is updated in place.
LbfgsResult lbfgs_minimize(const Objective& f, std::vector<double>& x, const LbfgsOptions& opt,
                           const IterationCallback& cb = {});

} // namespace tankflow
