#pragma once

#include <cmath>

namespace tankflow {

/// Channel layout of a second-order jet in two coordinates (a, b).
namespace ch {
constexpr int v = 0;
constexpr int a = 1;
constexpr int b = 2;
constexpr int aa = 3;
constexpr int ab = 4;
constexpr int bb = 5;
} // namespace ch

/// Number of jet channels for derivative order 0, 1 or 2.
constexpr int channels_for_order(int order) { return order <= 0 ? 1 : (order == 1 ? 3 : 6); }

/// Value, gradient and Hessian of a scalar field w.r.t. two coordinates.
template <class T>
struct JetT {
    T v{}, a{}, b{}, aa{}, ab{}, bb{};

    T& operator[](int c) {
        switch (c) {
        case 0: return v;
        case 1: return a;
        case 2: return b;
        case 3: return aa;
        case 4: return ab;
        default: return bb;
        }
    }
    const T& operator[](int c) const { return const_cast<JetT&>(*this)[c]; }
};

using Jet = JetT<double>;

inline Jet constant_jet(double value) { return Jet{value, 0, 0, 0, 0, 0}; }

/// f(r) with radial derivatives, expressed as a jet in polar coordinates (r, phi).
inline Jet radial_polar_jet(double f, double fr, double frr) { return Jet{f, fr, 0.0, frr, 0.0, 0.0}; }

/// f(r) with radial derivatives, expressed as a jet in Cartesian coordinates at (x, y).
inline Jet radial_cartesian_jet(double x, double y, double f, double fr, double frr) {
    const double r = std::hypot(x, y);
    if (r < 1e-300) return Jet{f, 0, 0, frr, 0, frr};
    const double ex = x / r, ey = y / r;
    const double k = fr / r;
    return Jet{f, fr * ex, fr * ey, frr * ex * ex + k * (1 - ex * ex), (frr - k) * ex * ey,
               frr * ey * ey + k * (1 - ey * ey)};
}

/// Convert a Cartesian jet at polar position (r, phi) into a polar jet.
inline Jet cartesian_to_polar_jet(const Jet& f, double r, double phi) {
    const double c = std::cos(phi), s = std::sin(phi);
    Jet p;
    p.v = f.v;
    const double fr = c * f.a + s * f.b;
    const double ft = -s * f.a + c * f.b;
    p.a = fr;
    p.b = r * ft;
    p.aa = c * c * f.aa + 2 * c * s * f.ab + s * s * f.bb;
    p.ab = r * (-c * s * f.aa + (c * c - s * s) * f.ab + c * s * f.bb) + ft;
    p.bb = r * r * (s * s * f.aa - 2 * c * s * f.ab + c * c * f.bb) - r * fr;
    return p;
}

} // namespace tankflow
