#pragma once

#include "tankflow/geometry.hpp"
#include "tankflow/jet.hpp"

#include <string>
#include <vector>

namespace tankflow {

/// f(r) with first and second radial derivatives.
struct Radial {
    double f = 0.0;
    double fr = 0.0;
    double frr = 0.0;
};

enum class FieldKind { Strong, Hybrid, Overlap, WallSpline };

std::string field_kind_name(FieldKind k);
FieldKind field_kind_from_name(const std::string& name);

/// Smooth approximate distance field built by polyharmonic (r^3) RBF interpolation.
/// Planar kinds are normalized by the interior maximum but not clamped, so they stay smooth;
/// radial kinds are clamped to [0, 1] outside their transition band (overlap: quintic smoothstep in r).
class DistanceField {
public:
    DistanceField() = default;

    FieldKind kind() const { return kind_; }
    bool radial() const { return kind_ == FieldKind::Overlap || kind_ == FieldKind::WallSpline; }

    double value(const CartPoint& p) const;
    /// Jet w.r.t. (x, y).
    Jet cartesian_jet(const CartPoint& p) const;
    /// Jet w.r.t. (r, phi) at the point's own polar angle.
    Jet polar_jet(const CartPoint& p) const;
    /// Radial kinds only.
    Radial radial_eval(double r) const;

    /// Reciprocal condition estimate of the interpolation system.
    double rcond() const { return rcond_; }
    std::size_t n_centers() const { return centers_.size(); }
    /// Radii where a radial field is pinned to 1 and 0.
    double r_one() const { return r_one_; }
    double r_zero() const { return r_zero_; }

    friend DistanceField build_distance_field(FieldKind, const SampleSet&, const std::vector<CartPoint>&);

private:
    double raw(const CartPoint& p, double* grad, double* hess) const;
    double raw_radial(double r, double* d1, double* d2) const;

    FieldKind kind_ = FieldKind::Strong;
    double length_ = 1.0;
    double scale_ = 1.0;
    double radial_lo_ = 0.0, radial_span_ = 1.0;
    std::vector<CartPoint> centers_;
    std::vector<double> centers_r_;
    std::vector<double> coef_;
    double poly_[3] = {0, 0, 0};
    double r_one_ = 0.0, r_zero_ = 0.0;
    double rcond_ = 1.0;
};

/// Build a field from labeled boundary samples and interior probes.
/// strong: zero on stirrer and wall; hybrid: zero on stirrer;
/// overlap: one on overlap_in, zero on overlap_out; wall_spline: one at the stirrer radius, zero on the wall.
DistanceField build_distance_field(FieldKind kind, const SampleSet& samples, const std::vector<CartPoint>& probes);

/// Deterministic construction from the geometry alone.
DistanceField make_distance_field(FieldKind kind, const GeometryConfig& geo, const Partition& part,
                                  int n_boundary = 512, int n_probes = 10000);

struct LiftingConfig {
    double r_stirrer = 0.040;
    double r_star = 0.0875;
    int mu = 8;
    bool wall_scaled = false;

    void validate() const;
};

/// Tangential speed of the unscaled lifting function at unit angular velocity (linear in omega).
Radial lifting_speed(double r, const LiftingConfig& cfg);

/// s = 1 - (1 - l)^mu for a level l in [0, 1].
double s_weight(double level, int mu);
Radial s_weight(const Radial& level, int mu);

/// Lifting function: matches the stirrer velocity for r <= r_stirrer and decays outward.
/// When wall-scaled, a wall-spline field must be supplied.
class LiftingFunction {
public:
    LiftingFunction() = default;
    explicit LiftingFunction(LiftingConfig cfg, DistanceField wall_spline = {});

    /// Clockwise tangential speed magnitude times the wall weight.
    Radial speed(double r, double omega) const;
    /// Cartesian components as jets in (x, y).
    Jet vx(const CartPoint& p, double omega) const;
    Jet vy(const CartPoint& p, double omega) const;
    /// Polar phi-component as a jet in (r, phi); the r-component is zero.
    Jet vphi(double r, double omega) const;
    CartPoint velocity(const CartPoint& p, double omega) const;

    const LiftingConfig& config() const { return cfg_; }

private:
    Radial speed_over_r(double r, double omega) const;
    LiftingConfig cfg_;
    DistanceField wall_;
};

} // namespace tankflow
