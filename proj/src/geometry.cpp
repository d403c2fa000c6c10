#include "tankflow/geometry.hpp"

#include "tankflow/errors.hpp"
#include "tankflow/rng.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>

namespace tankflow {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kOnBoundary = 1e-14;

struct Piece {
    bool arc = false;
    CartPoint a, b;           // segment ends
    double radius = 0.0;      // arc about the origin
    double t0 = 0.0, t1 = 0.0;

    double length() const {
        if (arc) return radius * std::abs(t1 - t0);
        return std::hypot(b.x - a.x, b.y - a.y);
    }
    CartPoint at(double u) const {
        if (arc) {
            const double t = t0 + u * (t1 - t0);
            return {radius * std::cos(t), radius * std::sin(t)};
        }
        return {a.x + u * (b.x - a.x), a.y + u * (b.y - a.y)};
    }
    double distance(const CartPoint& p) const {
        if (arc) {
            const double r = std::hypot(p.x, p.y);
            double phi = std::atan2(p.y, p.x);
            const double lo = std::min(t0, t1), hi = std::max(t0, t1);
            while (phi < lo) phi += 2 * kPi;
            while (phi > lo + 2 * kPi) phi -= 2 * kPi;
            if (phi <= hi) return std::abs(r - radius);
            const CartPoint e0 = at(0.0), e1 = at(1.0);
            return std::min(std::hypot(p.x - e0.x, p.y - e0.y), std::hypot(p.x - e1.x, p.y - e1.y));
        }
        const double dx = b.x - a.x, dy = b.y - a.y;
        const double len2 = dx * dx + dy * dy;
        double u = len2 > 0 ? ((p.x - a.x) * dx + (p.y - a.y) * dy) / len2 : 0.0;
        u = std::clamp(u, 0.0, 1.0);
        return std::hypot(p.x - (a.x + u * dx), p.y - (a.y + u * dy));
    }
};

Piece segment(CartPoint a, CartPoint b) {
    Piece p;
    p.a = a;
    p.b = b;
    return p;
}

Piece arc(double radius, double t0, double t1) {
    Piece p;
    p.arc = true;
    p.radius = radius;
    p.t0 = t0;
    p.t1 = t1;
    return p;
}

double baffle_half(const GeometryConfig& geo) { return 0.5 * geo.t_baffle; }

void baffle_faces(const GeometryConfig& geo, std::vector<Piece>& out) {
    const double h = baffle_half(geo);
    const double s_wall = std::sqrt(geo.r_reactor * geo.r_reactor - h * h);
    for (double th : geo.baffle_angles) {
        const CartPoint e{std::cos(th), std::sin(th)}, n{-std::sin(th), std::cos(th)};
        auto pt = [&](double s, double t) { return CartPoint{s * e.x + t * n.x, s * e.y + t * n.y}; };
        out.push_back(segment(pt(geo.r_baffle, -h), pt(geo.r_baffle, h)));
        out.push_back(segment(pt(geo.r_baffle, h), pt(s_wall, h)));
        out.push_back(segment(pt(geo.r_baffle, -h), pt(s_wall, -h)));
    }
}

void wall_arcs(const GeometryConfig& geo, std::vector<Piece>& out) {
    if (geo.annulus || geo.baffle_angles.empty()) {
        out.push_back(arc(geo.r_reactor, 0.0, 2 * kPi));
        return;
    }
    const double delta = std::asin(baffle_half(geo) / geo.r_reactor);
    std::vector<double> th = geo.baffle_angles;
    std::sort(th.begin(), th.end());
    for (std::size_t k = 0; k < th.size(); ++k) {
        const double start = th[k] + delta;
        const double end = (k + 1 < th.size() ? th[k + 1] : th[0] + 2 * kPi) - delta;
        out.push_back(arc(geo.r_reactor, start, end));
    }
}

std::vector<Piece> pieces_for(Boundary b, const GeometryConfig& geo, const Partition& part) {
    std::vector<Piece> out;
    switch (b) {
    case Boundary::Wall:
        wall_arcs(geo, out);
        if (!geo.annulus) baffle_faces(geo, out);
        break;
    case Boundary::Baffle:
        if (geo.annulus) throw ConfigError("annulus geometry has no baffles");
        baffle_faces(geo, out);
        break;
    case Boundary::Stirrer:
        if (geo.annulus) {
            out.push_back(arc(geo.r_stirrer, 0.0, 2 * kPi));
        } else {
            for (double th : geo.blade_angles)
                out.push_back(segment({0.0, 0.0}, {geo.r_stirrer * std::cos(th), geo.r_stirrer * std::sin(th)}));
        }
        break;
    case Boundary::Symmetry: {
        const double lo = std::max(part.r_inter, geo.annulus ? geo.r_stirrer : 0.0);
        const double hi = geo.annulus ? geo.r_reactor : geo.r_baffle;
        const double c = std::cos(kPi / 4), s = std::sin(kPi / 4);
        out.push_back(segment({lo * c, lo * s}, {hi * c, hi * s}));
        break;
    }
    case Boundary::Interface:
        if (part.r_inter <= 0) throw ConfigError("interface boundary requires r_inter > 0");
        out.push_back(arc(part.r_inter, 0.0, 2 * kPi));
        break;
    case Boundary::Continuity:
        if (part.r_split <= 0) throw ConfigError("continuity boundary requires r_split > 0");
        out.push_back(arc(part.r_split, 0.0, 2 * kPi));
        break;
    case Boundary::Derivative:
        if (part.r_split <= 0) throw ConfigError("derivative boundary requires r_split > 0");
        out.push_back(arc(part.r_split, -part.phi_d, part.phi_d));
        break;
    case Boundary::OverlapIn:
    case Boundary::OverlapOut: {
        if (part.overlap_width <= 0 || part.r_inter <= 0)
            throw ConfigError("overlap boundary requires r_inter and overlap_width > 0");
        const double r = part.r_inter + (b == Boundary::OverlapIn ? -0.5 : 0.5) * part.overlap_width;
        out.push_back(arc(r, 0.0, 2 * kPi));
        break;
    }
    }
    return out;
}

bool in_quarter(const CartPoint& p) {
    if (p.x == 0.0 && p.y == 0.0) return true;
    return std::abs(std::atan2(p.y, p.x)) <= kPi / 4 + 1e-12;
}

std::function<bool(const CartPoint&)> acceptor(Boundary b, const GeometryConfig& geo, const Partition& part,
                                               bool quarter) {
    return [b, geo, part, quarter](const CartPoint& p) {
        if (quarter && b != Boundary::Symmetry && !in_quarter(p)) return false;
        const double r = std::hypot(p.x, p.y);
        switch (b) {
        case Boundary::Wall: return part.r_split <= 0 || r > part.r_split;
        case Boundary::Baffle: return part.r_split <= 0 || r <= part.r_split;
        case Boundary::Continuity: return !in_baffle(p, geo, 0.0);
        default: return true;
        }
    };
}

} // namespace

PolarPoint cart_to_polar(const CartPoint& p) {
    double phi = std::atan2(p.y, p.x);
    if (phi < 0) phi += 2 * kPi;
    if (phi >= 2 * kPi) phi -= 2 * kPi;
    return {std::hypot(p.x, p.y), phi};
}

CartPoint polar_to_cart(const PolarPoint& p) { return {p.r * std::cos(p.phi), p.r * std::sin(p.phi)}; }

CartPoint rotate(const CartPoint& p, double angle) {
    const double c = std::cos(angle), s = std::sin(angle);
    return {c * p.x - s * p.y, s * p.x + c * p.y};
}

double wrap_angle(double phi) {
    phi = std::fmod(phi, 2 * kPi);
    if (phi <= -kPi) phi += 2 * kPi;
    if (phi > kPi) phi -= 2 * kPi;
    return phi;
}

GeometryConfig GeometryConfig::stirred_tank() {
    return GeometryConfig{};
}

GeometryConfig GeometryConfig::annulus_benchmark() {
    GeometryConfig g;
    g.annulus = true;
    g.t_baffle = 0.0;
    g.blade_angles.clear();
    g.baffle_angles.clear();
    return g;
}

void GeometryConfig::validate() const {
    auto finite_pos = [](double v) { return std::isfinite(v) && v > 0; };
    if (!finite_pos(r_stirrer) || !finite_pos(r_reactor))
        throw ConfigError("geometry radii must be positive and finite");
    if (annulus) {
        if (!(r_stirrer < r_reactor)) throw ConfigError("annulus requires r_stirrer < r_reactor");
        return;
    }
    if (!finite_pos(r_baffle) || !(r_stirrer < r_baffle && r_baffle < r_reactor))
        throw ConfigError("geometry requires r_stirrer < r_baffle < r_reactor");
    if (!std::isfinite(t_baffle) || t_baffle < 0 || t_baffle >= r_reactor - r_baffle)
        throw ConfigError("baffle thickness out of range");
    if (blade_angles.empty()) throw ConfigError("at least one blade required");
}

std::string boundary_name(Boundary b) {
    switch (b) {
    case Boundary::Wall: return "wall";
    case Boundary::Stirrer: return "stirrer";
    case Boundary::Baffle: return "baffle";
    case Boundary::Symmetry: return "symmetry";
    case Boundary::Interface: return "interface";
    case Boundary::Continuity: return "continuity";
    case Boundary::Derivative: return "derivative";
    case Boundary::OverlapIn: return "overlap_in";
    case Boundary::OverlapOut: return "overlap_out";
    }
    return "unknown";
}

Boundary boundary_from_name(const std::string& name) {
    for (Boundary b : {Boundary::Wall, Boundary::Stirrer, Boundary::Baffle, Boundary::Symmetry, Boundary::Interface,
                       Boundary::Continuity, Boundary::Derivative, Boundary::OverlapIn, Boundary::OverlapOut})
        if (boundary_name(b) == name) return b;
    throw ConfigError("unknown boundary label '" + name + "'");
}

Region region_by_id(const std::string& id, const GeometryConfig& geo, const Partition& part) {
    const double r0 = geo.annulus ? geo.r_stirrer : 0.0;
    const double R = geo.r_reactor;
    auto need = [&](bool ok, const char* what) {
        if (!ok) throw ConfigError(std::string("region '") + id + "' requires " + what);
    };
    if (id == "full") return {id, r0, R, AngularRange::Full};
    if (id == "sym") return {id, r0, R, AngularRange::Quarter};
    if (id == "inner" || id == "inner_ray") {
        need(part.r_inter > geo.r_stirrer, "r_inter > r_stirrer");
        return {id, geo.r_stirrer, part.r_inter, id == "inner" ? AngularRange::Full : AngularRange::Ray};
    }
    if (id == "outer") {
        need(part.r_inter > 0, "r_inter");
        return {id, part.r_inter, R, AngularRange::Quarter};
    }
    if (id == "outer_1" || id == "outer_2") {
        need(part.r_inter > 0 && part.r_split > part.r_inter, "r_inter < r_split");
        if (id == "outer_1") return {id, part.r_inter, part.r_split, AngularRange::Quarter};
        return {id, part.r_split, R, AngularRange::Quarter};
    }
    if (id == "band") {
        need(part.r_inter > 0 && part.overlap_width > 0, "r_inter and overlap_width");
        return {id, part.r_inter - 0.5 * part.overlap_width, part.r_inter + 0.5 * part.overlap_width,
                AngularRange::Quarter};
    }
    throw ConfigError("unknown region id '" + id + "'");
}

bool in_baffle(const CartPoint& p, const GeometryConfig& geo, double tol) {
    if (geo.annulus) return false;
    const double h = baffle_half(geo);
    for (double th : geo.baffle_angles) {
        const double s = p.x * std::cos(th) + p.y * std::sin(th);
        const double t = -p.x * std::sin(th) + p.y * std::cos(th);
        if (s >= geo.r_baffle - tol && std::abs(t) <= h + tol) return true;
    }
    return false;
}

bool in_fluid_domain(const CartPoint& p, const GeometryConfig& geo) {
    const double r = std::hypot(p.x, p.y);
    if (!(r < geo.r_reactor - kOnBoundary)) return false;
    if (geo.annulus) return r > geo.r_stirrer + kOnBoundary;
    if (in_baffle(p, geo, kOnBoundary)) return false;
    for (double th : geo.blade_angles) {
        const Piece blade = segment({0.0, 0.0}, {geo.r_stirrer * std::cos(th), geo.r_stirrer * std::sin(th)});
        if (blade.distance(p) <= kOnBoundary) return false;
    }
    return true;
}

bool in_closed_domain(const CartPoint& p, const GeometryConfig& geo, double tol) {
    const double r = std::hypot(p.x, p.y);
    if (r > geo.r_reactor + tol) return false;
    if (geo.annulus) return r >= geo.r_stirrer - tol;
    return !in_baffle(p, geo, -tol);
}

double distance_to_boundary(const CartPoint& p, Boundary b, const GeometryConfig& geo, const Partition& part,
                            bool /*quarter*/) {
    double d = std::numeric_limits<double>::infinity();
    for (const Piece& pc : pieces_for(b, geo, part)) d = std::min(d, pc.distance(p));
    return d;
}

PolarPoint reflect_to_quarter(const PolarPoint& p, int* k) {
    if (p.phi >= -kPi / 4 && p.phi < kPi / 4) {
        if (k) *k = 0;
        return p;
    }
    double phi = std::fmod(p.phi, 2 * kPi);
    if (phi < 0) phi += 2 * kPi;
    int q = static_cast<int>(std::floor((phi + kPi / 4) / (kPi / 2)));
    double out = phi - q * (kPi / 2);
    if (out >= kPi / 4) {
        out -= kPi / 2;
        ++q;
    } else if (out < -kPi / 4) {
        out += kPi / 2;
        --q;
    }
    q = ((q % 4) + 4) % 4;
    if (k) *k = q;
    return {p.r, out};
}

CartPoint stirrer_velocity(const CartPoint& p, double omega) { return {omega * p.y, -omega * p.x}; }

std::vector<CartPoint> sample_domain(const Region& region, int n, const GeometryConfig& geo, std::uint64_t seed) {
    if (n < 0) throw ConfigError("negative sample count");
    if (!(region.r_max > region.r_min)) throw ConfigError("empty region '" + region.id + "'");
    Rng rng(seed);
    std::vector<CartPoint> out;
    out.reserve(static_cast<std::size_t>(n));
    const double a2 = region.r_min * region.r_min, b2 = region.r_max * region.r_max;
    long attempts = 0;
    while (static_cast<int>(out.size()) < n) {
        if (++attempts > 1000L * n + 1000) throw ConfigError("region '" + region.id + "' has no fluid points");
        double r, phi;
        switch (region.angular) {
        case AngularRange::Ray:
            r = rng.uniform(region.r_min, region.r_max);
            phi = 0.0;
            break;
        case AngularRange::Quarter:
            r = std::sqrt(rng.uniform(a2, b2));
            phi = rng.uniform(-kPi / 4, kPi / 4);
            break;
        default:
            r = std::sqrt(rng.uniform(a2, b2));
            phi = rng.uniform(0.0, 2 * kPi);
            break;
        }
        const CartPoint p = polar_to_cart({r, phi});
        if (in_fluid_domain(p, geo)) out.push_back(p);
    }
    return out;
}

std::vector<CartPoint> sample_boundary(Boundary b, int n, const GeometryConfig& geo, const Partition& part,
                                       bool quarter, std::uint64_t seed) {
    if (n < 0) throw ConfigError("negative sample count");
    const auto pieces = pieces_for(b, geo, part);
    const auto accept = acceptor(b, geo, part, quarter);
    std::vector<double> cum;
    double total = 0.0;
    for (const auto& pc : pieces) {
        total += pc.length();
        cum.push_back(total);
    }
    Rng rng(seed);
    std::vector<CartPoint> out;
    out.reserve(static_cast<std::size_t>(n));
    long attempts = 0;
    while (static_cast<int>(out.size()) < n) {
        if (++attempts > 1000L * n + 1000)
            throw ConfigError("boundary '" + boundary_name(b) + "' is empty for this configuration");
        const double s = rng.uniform() * total;
        const std::size_t i =
            std::min<std::size_t>(std::upper_bound(cum.begin(), cum.end(), s) - cum.begin(), pieces.size() - 1);
        const CartPoint p = pieces[i].at(rng.uniform());
        if (accept(p)) out.push_back(p);
    }
    return out;
}

std::vector<CartPoint> boundary_grid(Boundary b, int n, const GeometryConfig& geo, const Partition& part,
                                     bool quarter) {
    const auto pieces = pieces_for(b, geo, part);
    const auto accept = acceptor(b, geo, part, quarter);
    double total = 0.0;
    for (const auto& pc : pieces) total += pc.length();
    std::vector<CartPoint> out;
    for (const auto& pc : pieces) {
        const bool closed = pc.arc && std::abs(std::abs(pc.t1 - pc.t0) - 2 * kPi) < 1e-12;
        const int k = std::max(2, static_cast<int>(std::lround(n * pc.length() / total)));
        for (int j = 0; j < k; ++j) {
            const double u = closed ? static_cast<double>(j) / k : static_cast<double>(j) / (k - 1);
            const CartPoint p = pc.at(u);
            if (!accept(p)) continue;
            bool dup = false;
            for (const auto& q : out)
                if (std::hypot(p.x - q.x, p.y - q.y) < 1e-12) {
                    dup = true;
                    break;
                }
            if (!dup) out.push_back(p);
        }
    }
    return out;
}

} // namespace tankflow
