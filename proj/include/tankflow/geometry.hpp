#pragma once

#include <cstdint>
#include <map>
#include <numbers>
#include <string>
#include <vector>

namespace tankflow {

struct CartPoint {
    double x = 0.0;
    double y = 0.0;
};

/// Polar point. Canonical form from cart_to_polar has phi in [0, 2*pi).
struct PolarPoint {
    double r = 0.0;
    double phi = 0.0;
};

PolarPoint cart_to_polar(const CartPoint& p);
CartPoint polar_to_cart(const PolarPoint& p);
CartPoint rotate(const CartPoint& p, double angle);

/// Angle wrapped to (-pi, pi].
double wrap_angle(double phi);

struct GeometryConfig {
    double r_stirrer = 0.040;
    double r_baffle = 0.085;
    double r_reactor = 0.100;
    double t_baffle = 0.005;
    std::vector<double> blade_angles{0.0, 0.5 * std::numbers::pi, std::numbers::pi, 1.5 * std::numbers::pi};
    std::vector<double> baffle_angles{0.25 * std::numbers::pi, 0.75 * std::numbers::pi, 1.25 * std::numbers::pi,
                                      1.75 * std::numbers::pi};
    /// Concentric-cylinder variant: the stirrer is the circle r = r_stirrer, no baffles.
    bool annulus = false;

    static GeometryConfig stirred_tank();
    static GeometryConfig annulus_benchmark();
    void validate() const;
};

/// Radii that partition the domain for decomposed models.
struct Partition {
    double r_inter = 0.0;       ///< interface radius (0 = none)
    double r_split = 0.0;       ///< outer sub-split radius (0 = none)
    double phi_d = 0.3;         ///< half-opening of the derivative-continuity arc
    double overlap_width = 0.0; ///< overlap band width (0 = sharp interface)
};

enum class Boundary {
    Wall,
    Stirrer,
    Baffle,
    Symmetry,
    Interface,
    Continuity,
    Derivative,
    OverlapIn,
    OverlapOut,
};

std::string boundary_name(Boundary b);
Boundary boundary_from_name(const std::string& name);

enum class AngularRange { Full, Quarter, Ray };

/// Radial annulus restricted in angle and intersected with the fluid domain.
struct Region {
    std::string id;
    double r_min = 0.0;
    double r_max = 0.0;
    AngularRange angular = AngularRange::Full;
};

/// Regions: full, sym, inner, inner_ray, outer, outer_1, outer_2, band.
Region region_by_id(const std::string& id, const GeometryConfig& geo, const Partition& part);

/// True for interior fluid points; points on blades, baffles or walls are not interior.
bool in_fluid_domain(const CartPoint& p, const GeometryConfig& geo);

/// Interior or within tol of the boundary.
bool in_closed_domain(const CartPoint& p, const GeometryConfig& geo, double tol);

/// True if p lies inside (or on) a baffle rectangle.
bool in_baffle(const CartPoint& p, const GeometryConfig& geo, double tol = 0.0);

/// Distance from p to the named boundary.
double distance_to_boundary(const CartPoint& p, Boundary b, const GeometryConfig& geo, const Partition& part,
                            bool quarter);

/// Map into the sector phi in [-pi/4, pi/4); k is the number of quarter turns removed.
PolarPoint reflect_to_quarter(const PolarPoint& p, int* k = nullptr);

/// Rigid-body velocity of the stirrer at p (clockwise rotation for omega > 0).
CartPoint stirrer_velocity(const CartPoint& p, double omega);

std::vector<CartPoint> sample_domain(const Region& region, int n, const GeometryConfig& geo, std::uint64_t seed);

std::vector<CartPoint> sample_boundary(Boundary b, int n, const GeometryConfig& geo, const Partition& part,
                                       bool quarter, std::uint64_t seed);

/// Deterministic, equispaced points along the boundary including piece endpoints.
std::vector<CartPoint> boundary_grid(Boundary b, int n, const GeometryConfig& geo, const Partition& part,
                                     bool quarter);

struct SampleSet {
    std::vector<CartPoint> domain;
    std::map<Boundary, std::vector<CartPoint>> boundary;
};

} // namespace tankflow
