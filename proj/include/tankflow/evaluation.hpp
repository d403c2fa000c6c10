#pragma once

#include "tankflow/geometry.hpp"
#include "tankflow/model.hpp"
#include "tankflow/physics.hpp"

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace tankflow {

struct ReferencePoint {
    double x = 0.0;
    double y = 0.0;
    double vx = 0.0;
    double vy = 0.0;
    double p = 0.0;
};

struct ReferenceSolution {
    std::vector<ReferencePoint> points;
    std::string source;
    double re = 0.0;

    std::vector<CartPoint> positions() const;
};

/// CSV with header x,y,v_x,v_y,p. Rows outside the closed fluid domain are rejected.
ReferenceSolution load_reference(const std::string& path, const GeometryConfig& geo, double tol = 1e-9);
void save_reference(const std::string& path, const ReferenceSolution& ref);

/// Indices of an evaluation subset of size min(n_eval, size), drawn without replacement.
std::vector<std::size_t> eval_subset(std::size_t size, int n_eval, std::uint64_t seed);

/// Subtract each set's own maximum.
void align_pressure(std::vector<double>& predicted, std::vector<double>& reference);

struct ErrorReport {
    double v_l1 = 0.0; ///< fractions, not percent
    double v_l2 = 0.0;
    double p_l1 = 0.0;
    double p_l2 = 0.0;
    double v_norm = 0.0;
    double p_norm = 0.0;
    std::size_t n_eval = 0;
    std::uint64_t seed = 0;
    double omega = 0.0;
    std::vector<std::size_t> indices;
    std::vector<double> f_err_v, f_err_p;
};

/// Normalized l1/l2 errors of |v| and aligned |p| over an evaluation subset.
ErrorReport error_metrics(const std::vector<Velocity>& predicted, const ReferenceSolution& ref, int n_eval,
                          std::uint64_t seed, double omega, double r_stirrer);

void write_report_csv(const std::string& path, const std::vector<std::pair<std::string, ErrorReport>>& rows);

/// Field export with optional reference and error columns.
void write_field_csv(const std::string& path, const std::vector<CartPoint>& pts, const std::vector<Velocity>& pred,
                     const ReferenceSolution* ref = nullptr);

struct CouetteValue {
    double v_phi = 0.0; ///< positive speed in the rotation sense of the inner cylinder
    double dv_phi = 0.0;
    double p = 0.0;     ///< p(R_i) = 0
    double dp = 0.0;
};

/// Flow between a rotating inner cylinder (radius r_i, speed omega * r_i) and a fixed outer wall.
CouetteValue couette_analytic(double r, double r_i, double r_o, double omega, double rho = 1000.0);

/// Reference sampled from the analytic annulus flow, clockwise like the stirrer.
ReferenceSolution couette_reference(const GeometryConfig& geo, double omega, const FluidProps& fluid, int n,
                                    std::uint64_t seed);
Velocity couette_velocity(const CartPoint& p, const GeometryConfig& geo, double omega, const FluidProps& fluid);

struct ProfileRow {
    double r = 0.0;
    double vmag = 0.0;
    Velocity v;
    double f_err = 0.0;
    bool has_err = false;
};

using Oracle = std::function<Velocity(const CartPoint&)>;

/// Prediction along the ray at angle phi; errors filled when an oracle is given.
std::vector<ProfileRow> extract_profile(const Model& model, const double* theta, double phi, double r0, double r1,
                                        int n, double omega, const Oracle& oracle = {});
void write_profile_csv(const std::string& path, const std::vector<ProfileRow>& rows);

} // namespace tankflow
