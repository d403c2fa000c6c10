#pragma once

#include "tankflow/jet.hpp"

#include <array>
#include <map>
#include <string>
#include <vector>

namespace tankflow {

struct FluidProps {
    double rho = 1000.0;
    double mu = 0.001;

    void validate() const;
};

/// Re = rho * omega * (2 R_stirrer)^2 / mu.
double reynolds(double omega, const FluidProps& fluid, double r_stirrer);
double omega_for_reynolds(double re, const FluidProps& fluid, double r_stirrer);

/// Steady incompressible Navier-Stokes in Cartesian form: (momentum_x, momentum_y, mass).
template <class T>
std::array<T, 3> ns_cartesian(const JetT<T>& vx, const JetT<T>& vy, const JetT<T>& p, const FluidProps& f) {
    return {f.rho * (vx.v * vx.a + vy.v * vx.b) + p.a - f.mu * (vx.aa + vx.bb),
            f.rho * (vx.v * vy.a + vy.v * vy.b) + p.b - f.mu * (vy.aa + vy.bb), vx.a + vy.b};
}

/// Polar form with jets in (r, phi): (momentum_r, momentum_phi, mass).
template <class T>
std::array<T, 3> ns_polar(const JetT<T>& vr, const JetT<T>& vp, const JetT<T>& p, double r, const FluidProps& f) {
    const double ir = 1.0 / r, ir2 = ir * ir;
    const T lap_r = vr.aa + ir * vr.a + ir2 * vr.bb;
    const T lap_p = vp.aa + ir * vp.a + ir2 * vp.bb;
    const T mom_r = f.rho * (vr.v * vr.a + ir * vp.v * vr.b - ir * vp.v * vp.v) + p.a -
                    f.mu * (lap_r - ir2 * vr.v - 2.0 * ir2 * vp.b);
    const T mom_p = f.rho * (vr.v * vp.a + ir * vp.v * vp.b + ir * vr.v * vp.v) + ir * p.b -
                    f.mu * (lap_p - ir2 * vp.v + 2.0 * ir2 * vr.b);
    const T mass = vr.a + ir * vr.v + ir * vp.b;
    return {mom_r, mom_p, mass};
}

/// Axisymmetric inner-region equations: (v^2/r - p'/rho, v'' + v'/r - v/r^2).
template <class T>
std::array<T, 2> inner_ode(const JetT<T>& vp, const JetT<T>& p, double r, const FluidProps& f) {
    const double ir = 1.0 / r;
    return {ir * vp.v * vp.v - p.a / f.rho, vp.aa + ir * vp.a - ir * ir * vp.v};
}

/// Interface coupling: (v_outer_r, v_outer_phi - v_inner_phi, p_outer - p_inner, d_r v_outer_phi - d_r v_inner_phi).
template <class T>
std::array<T, 4> coupling(const JetT<T>& in_vp, const JetT<T>& in_p, const JetT<T>& out_vr, const JetT<T>& out_vp,
                          const JetT<T>& out_p) {
    return {out_vr.v, out_vp.v - in_vp.v, out_p.v - in_p.v, out_vp.a - in_vp.a};
}

/// Product of a known jet with an unknown jet.
template <class T>
JetT<T> jet_mul(const Jet& g, const JetT<T>& u) {
    JetT<T> r;
    r.v = g.v * u.v;
    r.a = g.a * u.v + g.v * u.a;
    r.b = g.b * u.v + g.v * u.b;
    r.aa = g.aa * u.v + 2.0 * g.a * u.a + g.v * u.aa;
    r.ab = g.ab * u.v + g.a * u.b + g.b * u.a + g.v * u.ab;
    r.bb = g.bb * u.v + 2.0 * g.b * u.b + g.v * u.bb;
    return r;
}

/// g * a + (1 - g) * b.
template <class T>
JetT<T> jet_blend(const Jet& g, const JetT<T>& a, const JetT<T>& b) {
    const JetT<T> ga = jet_mul(g, a);
    const Jet h{1.0 - g.v, -g.a, -g.b, -g.aa, -g.ab, -g.bb};
    const JetT<T> hb = jet_mul(h, b);
    JetT<T> r;
    for (int c = 0; c < 6; ++c) r[c] = ga[c] + hb[c];
    return r;
}

/// Loss weights keyed by residual id; "wall" covers "wall.v_x" and "wall.v_y".
class LossWeights {
public:
    LossWeights() = default;
    explicit LossWeights(std::map<std::string, double> w);

    /// Weight for a residual id, falling back to dotted prefixes. Throws ConfigError if absent.
    double weight(const std::string& id) const;
    bool covers(const std::string& id) const;
    /// Table key that supplies the weight for id.
    std::string key_for(const std::string& id) const;
    const std::map<std::string, double>& table() const { return w_; }
    void set(const std::string& key, double value);

private:
    std::map<std::string, double> w_;
};

struct ResidualBatch {
    std::string id;
    std::vector<double> residuals;
};

struct LossComponent {
    std::string id;
    double mse = 0.0;
    double weight = 0.0;
    std::size_t n = 0;
};

struct LossBreakdown {
    std::vector<LossComponent> components;
    double weighted = 0.0;
    double reg_l1 = 0.0;
    double reg_l2 = 0.0;
    double total = 0.0;
    double log_total = 0.0;

    const LossComponent* find(const std::string& id) const;
};

constexpr double kLogEpsilon = 1e-16;

/// total = sum_i alpha_i * mean(r_i^2) + l1 * |theta|_1 + l2 * |theta|_2^2, objective ln(total + eps).
LossBreakdown assemble_loss(const std::vector<ResidualBatch>& batches, const LossWeights& weights,
                            const std::vector<double>& params, double l1, double l2);

} // namespace tankflow
