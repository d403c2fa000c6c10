#include "tankflow/liftfield.hpp"

#include "tankflow/errors.hpp"
#include "tankflow/rng.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>

namespace tankflow {

namespace {

constexpr int kRadialNodes = 9;
constexpr int kAnchorTarget = 800;
constexpr double kMinRcond = 1e-16;

const std::vector<CartPoint>& require(const SampleSet& s, Boundary b) {
    auto it = s.boundary.find(b);
    if (it == s.boundary.end() || it->second.empty())
        throw ConfigError("distance field needs samples on boundary '" + boundary_name(b) + "'");
    return it->second;
}

double max_radius(const std::vector<CartPoint>& pts) {
    double m = 0.0;
    for (const auto& p : pts) m = std::max(m, std::hypot(p.x, p.y));
    return m;
}

// median, so a circle of samples gives its radius to the last bit
double typical_radius(const std::vector<CartPoint>& pts) {
    std::vector<double> r;
    for (const auto& p : pts) r.push_back(std::hypot(p.x, p.y));
    std::nth_element(r.begin(), r.begin() + static_cast<std::ptrdiff_t>(r.size() / 2), r.end());
    return r[r.size() / 2];
}

double min_dist(const CartPoint& p, const std::vector<CartPoint>& set) {
    double d = std::numeric_limits<double>::infinity();
    for (const auto& q : set) d = std::min(d, std::hypot(p.x - q.x, p.y - q.y));
    return d;
}

} // namespace

std::string field_kind_name(FieldKind k) {
    switch (k) {
    case FieldKind::Strong: return "strong";
    case FieldKind::Hybrid: return "hybrid";
    case FieldKind::Overlap: return "overlap";
    case FieldKind::WallSpline: return "wall_spline";
    }
    return "unknown";
}

FieldKind field_kind_from_name(const std::string& name) {
    for (FieldKind k : {FieldKind::Strong, FieldKind::Hybrid, FieldKind::Overlap, FieldKind::WallSpline})
        if (field_kind_name(k) == name) return k;
    throw ConfigError("unknown distance field kind '" + name + "'");
}

double DistanceField::raw(const CartPoint& p, double* grad, double* hess) const {
    const double px = p.x / length_, py = p.y / length_;
    double f = poly_[0] + poly_[1] * px + poly_[2] * py;
    double gx = poly_[1], gy = poly_[2], hxx = 0, hxy = 0, hyy = 0;
    for (std::size_t j = 0; j < centers_.size(); ++j) {
        const double dx = px - centers_[j].x, dy = py - centers_[j].y;
        const double rho = std::sqrt(dx * dx + dy * dy);
        const double c = coef_[j];
        f += c * rho * rho * rho;
        if (grad) {
            gx += 3 * c * rho * dx;
            gy += 3 * c * rho * dy;
        }
        if (hess && rho > 0) {
            const double inv = 1.0 / rho;
            hxx += 3 * c * (rho + dx * dx * inv);
            hxy += 3 * c * dx * dy * inv;
            hyy += 3 * c * (rho + dy * dy * inv);
        }
    }
    if (grad) {
        grad[0] = gx / length_;
        grad[1] = gy / length_;
    }
    if (hess) {
        const double l2 = length_ * length_;
        hess[0] = hxx / l2;
        hess[1] = hxy / l2;
        hess[2] = hyy / l2;
    }
    return f;
}

double DistanceField::raw_radial(double r, double* d1, double* d2) const {
    const double t = r / length_;
    double f = poly_[0] + poly_[1] * t, g = poly_[1], h = 0.0;
    for (std::size_t j = 0; j < centers_r_.size(); ++j) {
        const double d = t - centers_r_[j];
        const double a = std::abs(d);
        f += coef_[j] * a * a * a;
        g += 3 * coef_[j] * a * d;
        h += 6 * coef_[j] * a;
    }
    if (d1) *d1 = g / length_;
    if (d2) *d2 = h / (length_ * length_);
    return f;
}

Radial DistanceField::radial_eval(double r) const {
    if (!radial()) throw ConfigError("radial_eval on a planar distance field");
    if (r <= r_one_) return {1.0, 0.0, 0.0};
    if (r >= r_zero_) return {0.0, 0.0, 0.0};
    if (kind_ == FieldKind::Overlap) {
        // quintic smoothstep: exact end values, flat to second order at both edges
        const double w = r_zero_ - r_one_, u = (r - r_one_) / w;
        return {1.0 - u * u * u * (10 - 15 * u + 6 * u * u), -30 * u * u * (1 - u) * (1 - u) / w,
                -60 * u * (1 - u) * (1 - 2 * u) / (w * w)};
    }
    Radial out;
    // normalized so the end nodes map to exactly 1 and 0
    out.f = (raw_radial(r, &out.fr, &out.frr) - radial_lo_) / radial_span_;
    out.fr /= radial_span_;
    out.frr /= radial_span_;
    if (out.f >= 1.0) return {1.0, 0.0, 0.0};
    if (out.f <= 0.0) return {0.0, 0.0, 0.0};
    return out;
}

double DistanceField::value(const CartPoint& p) const {
    if (radial()) return radial_eval(std::hypot(p.x, p.y)).f;
    return raw(p, nullptr, nullptr) / scale_;
}

Jet DistanceField::cartesian_jet(const CartPoint& p) const {
    if (radial()) {
        const Radial q = radial_eval(std::hypot(p.x, p.y));
        return radial_cartesian_jet(p.x, p.y, q.f, q.fr, q.frr);
    }
    double g[2], h[3];
    const double f = raw(p, g, h) / scale_;
    return Jet{f, g[0] / scale_, g[1] / scale_, h[0] / scale_, h[1] / scale_, h[2] / scale_};
}

Jet DistanceField::polar_jet(const CartPoint& p) const {
    const double r = std::hypot(p.x, p.y);
    if (radial()) {
        const Radial q = radial_eval(r);
        return radial_polar_jet(q.f, q.fr, q.frr);
    }
    return cartesian_to_polar_jet(cartesian_jet(p), r, std::atan2(p.y, p.x));
}

DistanceField build_distance_field(FieldKind kind, const SampleSet& samples, const std::vector<CartPoint>& probes) {
    DistanceField field;
    field.kind_ = kind;

    if (field.radial()) {
        if (kind == FieldKind::Overlap) {
            field.r_one_ = typical_radius(require(samples, Boundary::OverlapIn));
            field.r_zero_ = typical_radius(require(samples, Boundary::OverlapOut));
        } else {
            field.r_one_ = max_radius(require(samples, Boundary::Stirrer));
            field.r_zero_ = max_radius(require(samples, Boundary::Wall));
        }
        if (!(field.r_zero_ > field.r_one_)) throw ConfigError("radial field needs r_one < r_zero");
        field.length_ = field.r_zero_;
        if (kind == FieldKind::Overlap) return field;
        const int n = kRadialNodes;
        Eigen::MatrixXd M = Eigen::MatrixXd::Zero(n + 2, n + 2);
        Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n + 2);
        field.centers_r_.resize(n);
        for (int k = 0; k < n; ++k) {
            const double u = static_cast<double>(k) / (n - 1);
            field.centers_r_[k] = (field.r_one_ + u * (field.r_zero_ - field.r_one_)) / field.length_;
            rhs(k) = 1.0 - u;
        }
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < n; ++j) M(i, j) = std::pow(std::abs(field.centers_r_[i] - field.centers_r_[j]), 3);
            M(i, n) = M(n, i) = 1.0;
            M(i, n + 1) = M(n + 1, i) = field.centers_r_[i];
        }
        Eigen::PartialPivLU<Eigen::MatrixXd> lu(M);
        field.rcond_ = lu.rcond();
        if (!(field.rcond_ > kMinRcond))
            throw NumericalError("radial field interpolation is singular (rcond " + std::to_string(field.rcond_) + ")");
        const Eigen::VectorXd sol = lu.solve(rhs);
        field.coef_.assign(sol.data(), sol.data() + n);
        field.poly_[0] = sol(n);
        field.poly_[1] = sol(n + 1);
        field.radial_lo_ = field.raw_radial(field.r_zero_, nullptr, nullptr);
        field.radial_span_ = field.raw_radial(field.r_one_, nullptr, nullptr) - field.radial_lo_;
        return field;
    }

    std::vector<CartPoint> zero = require(samples, Boundary::Stirrer);
    if (kind == FieldKind::Strong) {
        const auto& wall = require(samples, Boundary::Wall);
        zero.insert(zero.end(), wall.begin(), wall.end());
    }
    if (probes.empty()) throw ConfigError("distance field needs interior probes");
    const double L = std::max(max_radius(zero), max_radius(probes));
    field.length_ = L;

    // Interior anchors carry the distance to the nearest zero-set sample.
    const double spacing = 0.7 * std::sqrt(3.141592653589793 * L * L / kAnchorTarget);
    std::vector<CartPoint> anchors;
    std::vector<double> target;
    for (const auto& p : probes) {
        const double dz = min_dist(p, zero);
        if (dz < 0.5 * spacing) continue;
        if (!anchors.empty() && min_dist(p, anchors) < spacing) continue;
        anchors.push_back(p);
        target.push_back(dz);
    }

    const int nz = static_cast<int>(zero.size());
    const int n = nz + static_cast<int>(anchors.size());
    field.centers_.resize(n);
    for (int i = 0; i < nz; ++i) field.centers_[i] = {zero[i].x / L, zero[i].y / L};
    for (int i = nz; i < n; ++i) field.centers_[i] = {anchors[i - nz].x / L, anchors[i - nz].y / L};

    Eigen::MatrixXd M = Eigen::MatrixXd::Zero(n + 3, n + 3);
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n + 3);
    for (int i = 0; i < n; ++i) {
        const auto& ci = field.centers_[i];
        for (int j = 0; j < i; ++j) {
            const auto& cj = field.centers_[j];
            const double rho = std::hypot(ci.x - cj.x, ci.y - cj.y);
            M(i, j) = M(j, i) = rho * rho * rho;
        }
        M(i, n) = M(n, i) = 1.0;
        M(i, n + 1) = M(n + 1, i) = ci.x;
        M(i, n + 2) = M(n + 2, i) = ci.y;
        if (i >= nz) rhs(i) = target[i - nz] / L;
    }
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(M);
    field.rcond_ = lu.rcond();
    if (!(field.rcond_ > kMinRcond))
        throw NumericalError("distance field interpolation is singular (rcond " + std::to_string(field.rcond_) + ")");
    Eigen::VectorXd sol = lu.solve(rhs);
    sol += lu.solve(rhs - M * sol);
    if (!sol.allFinite()) throw NumericalError("distance field solve produced non-finite coefficients");
    field.coef_.assign(sol.data(), sol.data() + n);
    field.poly_[0] = sol(n);
    field.poly_[1] = sol(n + 1);
    field.poly_[2] = sol(n + 2);

    double mx = 0.0;
    for (const auto& p : probes) mx = std::max(mx, field.raw(p, nullptr, nullptr));
    if (!(mx > 0)) throw NumericalError("distance field has no positive interior values");
    field.scale_ = mx;
    return field;
}

DistanceField make_distance_field(FieldKind kind, const GeometryConfig& geo, const Partition& part, int n_boundary,
                                  int n_probes) {
    SampleSet s;
    std::vector<CartPoint> probes;
    switch (kind) {
    case FieldKind::Strong:
        s.boundary[Boundary::Wall] = boundary_grid(Boundary::Wall, n_boundary, geo, {}, false);
        [[fallthrough]];
    case FieldKind::Hybrid:
        s.boundary[Boundary::Stirrer] = boundary_grid(Boundary::Stirrer, n_boundary, geo, {}, false);
        probes = sample_domain(region_by_id("full", geo, {}), n_probes, geo, derive_seed(0, streams::kField));
        break;
    case FieldKind::Overlap:
        s.boundary[Boundary::OverlapIn] = boundary_grid(Boundary::OverlapIn, 64, geo, part, false);
        s.boundary[Boundary::OverlapOut] = boundary_grid(Boundary::OverlapOut, 64, geo, part, false);
        break;
    case FieldKind::WallSpline:
        s.boundary[Boundary::Stirrer] = boundary_grid(Boundary::Stirrer, 64, geo, {}, false);
        s.boundary[Boundary::Wall] = boundary_grid(Boundary::Wall, 64, geo, {}, false);
        break;
    }
    return build_distance_field(kind, s, probes);
}

void LiftingConfig::validate() const {
    if (!(r_stirrer > 0) || !std::isfinite(r_stirrer)) throw ConfigError("lifting r_stirrer must be positive");
    if (!(r_star > r_stirrer) || !std::isfinite(r_star)) throw ConfigError("lifting r_star must exceed r_stirrer");
    if (mu < 1) throw ConfigError("lifting exponent mu must be >= 1");
}

Radial lifting_speed(double r, const LiftingConfig& cfg) {
    if (r < 0) throw DomainError("negative radius");
    const double rs = cfg.r_stirrer;
    if (r <= rs) return {r, 1.0, 0.0};
    const double s2 = cfg.r_star * cfg.r_star;
    const double K = rs * rs / (rs * rs - s2);
    return {K * (r - s2 / r), K * (1 + s2 / (r * r)), -2 * K * s2 / (r * r * r)};
}

double s_weight(double level, int mu) { return 1.0 - std::pow(1.0 - level, mu); }

Radial s_weight(const Radial& level, int mu) {
    const double q = 1.0 - level.f;
    const double qm2 = mu >= 2 ? std::pow(q, mu - 2) : 0.0;
    const double qm1 = std::pow(q, mu - 1);
    return {1.0 - std::pow(q, mu), mu * qm1 * level.fr,
            mu * qm1 * level.frr - mu * (mu - 1) * qm2 * level.fr * level.fr};
}

LiftingFunction::LiftingFunction(LiftingConfig cfg, DistanceField wall_spline)
    : cfg_(cfg), wall_(std::move(wall_spline)) {
    cfg_.validate();
    if (cfg_.wall_scaled && wall_.kind() != FieldKind::WallSpline)
        throw ConfigError("wall-scaled lifting function needs a wall-spline field");
}

Radial LiftingFunction::speed(double r, double omega) const {
    Radial f = lifting_speed(r, cfg_);
    if (cfg_.wall_scaled) {
        const Radial s = s_weight(wall_.radial_eval(r), cfg_.mu);
        f = {f.f * s.f, f.fr * s.f + f.f * s.fr, f.frr * s.f + 2 * f.fr * s.fr + f.f * s.frr};
    }
    return {omega * f.f, omega * f.fr, omega * f.frr};
}

Radial LiftingFunction::speed_over_r(double r, double omega) const {
    Radial q;
    if (r <= cfg_.r_stirrer) {
        q = {1.0, 0.0, 0.0};
    } else {
        const double rs = cfg_.r_stirrer, s2 = cfg_.r_star * cfg_.r_star;
        const double K = rs * rs / (rs * rs - s2);
        q = {K * (1 - s2 / (r * r)), 2 * K * s2 / (r * r * r), -6 * K * s2 / (r * r * r * r)};
    }
    if (cfg_.wall_scaled) {
        const Radial s = s_weight(wall_.radial_eval(r), cfg_.mu);
        q = {q.f * s.f, q.fr * s.f + q.f * s.fr, q.frr * s.f + 2 * q.fr * s.fr + q.f * s.frr};
    }
    return {omega * q.f, omega * q.fr, omega * q.frr};
}

Jet LiftingFunction::vx(const CartPoint& p, double omega) const {
    const Radial q = speed_over_r(std::hypot(p.x, p.y), omega);
    const Jet Q = radial_cartesian_jet(p.x, p.y, q.f, q.fr, q.frr);
    const double y = p.y;
    return Jet{y * Q.v, y * Q.a, Q.v + y * Q.b, y * Q.aa, Q.a + y * Q.ab, 2 * Q.b + y * Q.bb};
}

Jet LiftingFunction::vy(const CartPoint& p, double omega) const {
    const Radial q = speed_over_r(std::hypot(p.x, p.y), omega);
    const Jet Q = radial_cartesian_jet(p.x, p.y, q.f, q.fr, q.frr);
    const double x = p.x;
    return Jet{-x * Q.v, -(Q.v + x * Q.a), -x * Q.b, -(2 * Q.a + x * Q.aa), -(Q.b + x * Q.ab), -x * Q.bb};
}

Jet LiftingFunction::vphi(double r, double omega) const {
    const Radial f = speed(r, omega);
    return radial_polar_jet(-f.f, -f.fr, -f.frr);
}

CartPoint LiftingFunction::velocity(const CartPoint& p, double omega) const {
    const Radial q = speed_over_r(std::hypot(p.x, p.y), omega);
    return {p.y * q.f, -p.x * q.f};
}

} // namespace tankflow
