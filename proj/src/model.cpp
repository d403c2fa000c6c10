#include "tankflow/model.hpp"

#include "tankflow/errors.hpp"
#include "tankflow/jet.hpp"

#include <cmath>
#include <numbers>

namespace tankflow {

namespace {

constexpr double kPi = std::numbers::pi;

/// P = G * Z for jets stored in row vectors.
void jet_product(const double* G, double* Z, int n, int order) {
    for (int i = 0; i < n; ++i) {
        const double gv = G[i], zv = Z[i];
        if (order >= 1) {
            const double ga = G[n + i], gb = G[2 * n + i], za = Z[n + i], zb = Z[2 * n + i];
            if (order >= 2) {
                const double gaa = G[3 * n + i], gab = G[4 * n + i], gbb = G[5 * n + i];
                Z[3 * n + i] = gaa * zv + 2 * ga * za + gv * Z[3 * n + i];
                Z[4 * n + i] = gab * zv + ga * zb + gb * za + gv * Z[4 * n + i];
                Z[5 * n + i] = gbb * zv + 2 * gb * zb + gv * Z[5 * n + i];
            }
            Z[n + i] = ga * zv + gv * za;
            Z[2 * n + i] = gb * zv + gv * zb;
        }
        Z[i] = gv * zv;
    }
}

/// Adjoint of jet_product with respect to Z, in place on the adjoint row.
void jet_product_adjoint(const double* G, double* A, int n, int order) {
    for (int i = 0; i < n; ++i) {
        const double gv = G[i];
        double zv = gv * A[i];
        if (order >= 1) {
            const double ga = G[n + i], gb = G[2 * n + i];
            const double Pa = A[n + i], Pb = A[2 * n + i];
            zv += ga * Pa + gb * Pb;
            double za = gv * Pa, zb = gv * Pb;
            if (order >= 2) {
                const double gaa = G[3 * n + i], gab = G[4 * n + i], gbb = G[5 * n + i];
                const double Paa = A[3 * n + i], Pab = A[4 * n + i], Pbb = A[5 * n + i];
                zv += gaa * Paa + gab * Pab + gbb * Pbb;
                za += 2 * ga * Paa + gb * Pab;
                zb += ga * Pab + 2 * gb * Pbb;
                A[3 * n + i] = gv * Paa;
                A[4 * n + i] = gv * Pab;
                A[5 * n + i] = gv * Pbb;
            }
            A[n + i] = za;
            A[2 * n + i] = zb;
        }
        A[i] = zv;
    }
}

void put_jet(JetMatrix& M, int row, int i, int n, int C, const Jet& j) {
    for (int c = 0; c < C; ++c) M(row, static_cast<Eigen::Index>(c) * n + i) = j[c];
}

} // namespace

std::vector<InputFeature> cartesian_premap(const GeometryConfig& geo) {
    return {{0, 1.0 / geo.r_reactor, 0.0}, {1, 1.0 / geo.r_reactor, 0.0}};
}

std::vector<InputFeature> polar_premap(const GeometryConfig& geo) {
    const double w = geo.r_reactor - geo.r_stirrer;
    return {{0, 1.0 / w, -geo.r_stirrer / w}, {1, 4.0 / kPi, 0.0}};
}

std::vector<InputFeature> dd_inner_premap(const GeometryConfig& geo, double r_inter) {
    const double w = r_inter - geo.r_stirrer;
    if (!(w > 0)) throw ConfigError("r_inter must exceed r_stirrer");
    return {{0, 1.0 / w, -geo.r_stirrer / w}};
}

std::vector<InputFeature> dd_outer_premap(const GeometryConfig& geo, double r_inter) {
    const double w = 0.5 * (geo.r_reactor - r_inter);
    if (!(w > 0)) throw ConfigError("r_inter must be below r_reactor");
    return {{0, 1.0 / w, (0.5 * geo.r_reactor - 1.5 * r_inter) / w}, {1, 4.0 / kPi, 0.0}};
}

InputFeature omega_feature(double omega_min, double omega_max) {
    if (!(omega_max > omega_min)) throw ConfigError("omega range must be non-empty");
    const double avg = 0.5 * (omega_min + omega_max);
    return {2, 1.0, -avg, omega_max - avg};
}

std::string postmap_name(PostMap p) {
    switch (p) {
    case PostMap::Cartesian: return "cartesian";
    case PostMap::Polar: return "polar";
    case PostMap::DdInner: return "dd_inner";
    case PostMap::DdOuter: return "dd_outer";
    }
    return "unknown";
}

PostMap postmap_from_name(const std::string& name) {
    for (PostMap p : {PostMap::Cartesian, PostMap::Polar, PostMap::DdInner, PostMap::DdOuter})
        if (postmap_name(p) == name) return p;
    throw ConfigError("unknown output scaling '" + name + "'");
}

double v_norm_r_param(double omega) { return 4e-4 * omega * omega + 1.2e-3 * omega; }

double v_norm_phi(double omega, double r_stirrer, double r_inter, double r_star) {
    const double vt = omega * r_stirrer;
    return vt * r_stirrer * (r_inter * r_inter - r_star * r_star) /
           (r_inter * (r_stirrer * r_stirrer - r_star * r_star));
}

int OutputScaling::n_outputs() const {
    switch (kind) {
    case PostMap::DdInner: return 2;
    case PostMap::DdOuter: return split_output ? 4 : 3;
    default: return 3;
    }
}

std::vector<double> OutputScaling::scales(double omega) const {
    const double vt = std::abs(omega) * r_stirrer;
    const double vr = omega_dependent_vr ? v_norm_r_param(std::abs(omega)) : v_r_ref;
    switch (kind) {
    case PostMap::Cartesian: return {vt, vt, rho * vt * vt};
    case PostMap::Polar: return {vr, vt, rho * vt * vt};
    case PostMap::DdInner: return {vt, rho * vt * vt};
    case PostMap::DdOuter: {
        const double vp = std::abs(v_norm_phi(std::abs(omega), r_stirrer, r_inter, r_star));
        std::vector<double> s{vr, vp, rho * (vr * vr + vp * vp)};
        if (split_output) s.push_back(split_scale);
        return s;
    }
    }
    return {};
}

Subnet::Subnet(std::string name, NetworkSpec spec, std::vector<InputFeature> inputs, OutputScaling post,
               std::vector<int> ansatz_outputs, std::size_t offset)
    : name_(std::move(name)), net_(std::move(spec)), inputs_(std::move(inputs)), post_(post),
      ansatz_(std::move(ansatz_outputs)), offset_(offset) {
    if (static_cast<int>(inputs_.size()) != net_.spec().n_in)
        throw ConfigError("subnet '" + name_ + "': input map size does not match network inputs");
    if (post_.n_outputs() != net_.spec().n_out)
        throw ConfigError("subnet '" + name_ + "': output scaling does not match network outputs");
    for (int k : ansatz_)
        if (k < 0 || k >= net_.spec().n_out) throw ConfigError("subnet '" + name_ + "': bad ansatz output");
}

void Subnet::forward(const double* theta, const Eigen::MatrixXd& raw, int order, const JetMatrix* H,
                     const JetMatrix* G, Eval& ev) const {
    const int n = static_cast<int>(raw.cols());
    const int C = channels_for_order(order);
    ev.n = n;
    ev.order = order;
    JetMatrix X = JetMatrix::Zero(static_cast<Eigen::Index>(inputs_.size()), static_cast<Eigen::Index>(C) * n);
    for (std::size_t k = 0; k < inputs_.size(); ++k) {
        const InputFeature& f = inputs_[k];
        X.row(k).head(n) = ((f.scale * raw.row(f.source).array() + f.shift) / f.divisor).matrix();
        if (order >= 1 && f.source < 2) X.row(k).segment(static_cast<Eigen::Index>(1 + f.source) * n, n).setConstant(f.slope());
    }
    net_.forward(theta + offset_, X, n, order, ev.cache);

    const int n_out = net_.spec().n_out;
    ev.scales.resize(n_out, n);
    for (int i = 0; i < n; ++i) {
        const auto s = post_.scales(raw(2, i));
        for (int k = 0; k < n_out; ++k) ev.scales(k, i) = s[static_cast<std::size_t>(k)];
    }
    ev.out = ev.cache.out;
    for (int k = 0; k < n_out; ++k)
        for (int c = 0; c < C; ++c)
            ev.out.row(k).segment(static_cast<Eigen::Index>(c) * n, n).array() *= ev.scales.row(k).array();
    if (ansatz_.empty()) return;
    if (!H || !G || H->rows() != static_cast<Eigen::Index>(ansatz_.size()) || G->rows() != 1 ||
        G->cols() != static_cast<Eigen::Index>(C) * n)
        throw ConfigError("subnet '" + name_ + "': missing or malformed ansatz jets");
    for (std::size_t j = 0; j < ansatz_.size(); ++j) {
        Eigen::RowVectorXd z = ev.out.row(ansatz_[j]);
        const Eigen::RowVectorXd g = G->row(0);
        jet_product(g.data(), z.data(), n, order);
        ev.out.row(ansatz_[j]) = z + H->row(static_cast<Eigen::Index>(j));
    }
}

void Subnet::backward(const double* theta, const Eval& ev, const JetMatrix& out_adj, const JetMatrix* G,
                      double* grad) const {
    const int n = ev.n, C = channels_for_order(ev.order);
    JetMatrix ybar = out_adj;
    for (int k : ansatz_) {
        Eigen::RowVectorXd a = ybar.row(k);
        const Eigen::RowVectorXd g = G->row(0);
        jet_product_adjoint(g.data(), a.data(), n, ev.order);
        ybar.row(k) = a;
    }
    for (int k = 0; k < ybar.rows(); ++k)
        for (int c = 0; c < C; ++c)
            ybar.row(k).segment(static_cast<Eigen::Index>(c) * n, n).array() *= ev.scales.row(k).array();
    net_.backward(theta + offset_, ev.cache, ybar, grad + offset_);
}

std::size_t Model::param_count() const {
    std::size_t n = 0;
    for (const auto& s : subnets) n += s.param_count();
    return n;
}

int Model::subnet_index(const std::string& name) const {
    for (std::size_t i = 0; i < subnets.size(); ++i)
        if (subnets[i].name() == name) return static_cast<int>(i);
    throw ConfigError("model has no subnet '" + name + "'");
}

Eigen::MatrixXd Model::raw_coords(const std::vector<CartPoint>& pts, const std::vector<double>& omegas) const {
    const auto n = static_cast<Eigen::Index>(pts.size());
    if (omegas.size() != pts.size()) throw ConfigError("omega list does not match point list");
    Eigen::MatrixXd raw(3, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const CartPoint& p = pts[static_cast<std::size_t>(i)];
        if (coords == Coords::Cartesian) {
            raw(0, i) = p.x;
            raw(1, i) = p.y;
        } else {
            raw(0, i) = std::hypot(p.x, p.y);
            raw(1, i) = std::atan2(p.y, p.x);
        }
        raw(2, i) = omegas[static_cast<std::size_t>(i)];
    }
    return raw;
}

void Model::ansatz_jets(int s, const std::vector<CartPoint>& pts, const std::vector<double>& omegas, int order,
                        JetMatrix& H, JetMatrix& G) const {
    const Subnet& sub = subnets[static_cast<std::size_t>(s)];
    const int n = static_cast<int>(pts.size());
    const int C = channels_for_order(order);
    const auto na = static_cast<Eigen::Index>(sub.ansatz_outputs().size());
    H.resize(na, static_cast<Eigen::Index>(C) * n);
    G.resize(na ? 1 : 0, static_cast<Eigen::Index>(C) * n);
    if (na == 0) return;
    for (int i = 0; i < n; ++i) {
        const CartPoint& p = pts[static_cast<std::size_t>(i)];
        const double om = omegas[static_cast<std::size_t>(i)];
        if (coords == Coords::Cartesian) {
            put_jet(H, 0, i, n, C, lift.vx(p, om));
            put_jet(H, 1, i, n, C, lift.vy(p, om));
            put_jet(G, 0, i, n, C, g_field.cartesian_jet(p));
        } else {
            const double r = std::hypot(p.x, p.y);
            put_jet(H, 0, i, n, C, lift.vphi(r, om));
            Jet g;
            if (inner_axisymmetric) {
                // 1D in r: distance to the stirrer radius
                const double span = part.r_inter - geo.r_stirrer;
                g = Jet{(r - geo.r_stirrer) / span, 1.0 / span, 0, 0, 0, 0};
            } else {
                g = g_field.polar_jet(p);
            }
            put_jet(G, 0, i, n, C, g);
        }
    }
}

JetMatrix Model::subnet_jets(const double* theta, int s, const std::vector<CartPoint>& pts,
                             const std::vector<double>& omegas, int order) const {
    JetMatrix H, G;
    ansatz_jets(s, pts, omegas, order, H, G);
    Subnet::Eval ev;
    subnets[static_cast<std::size_t>(s)].forward(theta, raw_coords(pts, omegas), order, &H, &G, ev);
    return ev.out;
}

std::vector<Velocity> Model::predict(const double* theta, const std::vector<CartPoint>& pts, double om) const {
    return predict(theta, pts, std::vector<double>(pts.size(), om));
}

std::vector<Velocity> Model::predict(const double* theta, const std::vector<CartPoint>& pts,
                                     const std::vector<double>& omegas) const {
    const int n = static_cast<int>(pts.size());
    std::vector<Velocity> out(pts.size());
    if (n == 0) return out;
    if (coords == Coords::Cartesian) {
        const JetMatrix u = subnet_jets(theta, 0, pts, omegas, 0);
        for (int i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = {u(0, i), u(1, i), u(2, i)};
        return out;
    }

    std::vector<CartPoint> eval(pts.size());
    std::vector<double> rad(pts.size()), ang(pts.size());
    for (std::size_t i = 0; i < pts.size(); ++i) {
        const PolarPoint pp = cart_to_polar(pts[i]);
        rad[i] = pp.r;
        ang[i] = pp.phi;
        eval[i] = pts[i];
        int turns = 0;
        // no round trip for points already in the sector
        const PolarPoint q = reflect_to_quarter(pp, &turns);
        if (symmetric && turns != 0) eval[i] = polar_to_cart(q);
    }

    std::vector<double> vr(pts.size()), vp(pts.size()), pr(pts.size());
    if (layout == Layout::Single) {
        const JetMatrix u = subnet_jets(theta, 0, eval, omegas, 0);
        for (int i = 0; i < n; ++i) {
            vr[i] = u(0, i);
            vp[i] = u(1, i);
            pr[i] = u(2, i);
        }
    } else {
        const int si = subnet_index("inner"), so = subnet_index("outer");
        std::vector<CartPoint> inner_eval = eval;
        if (inner_axisymmetric)
            for (std::size_t i = 0; i < pts.size(); ++i) inner_eval[i] = {rad[i], 0.0};
        const JetMatrix in = subnet_jets(theta, si, inner_eval, omegas, 0);
        const JetMatrix ou = subnet_jets(theta, so, eval, omegas, 0);
        for (int i = 0; i < n; ++i) {
            const double r = rad[static_cast<std::size_t>(i)];
            double o_vp = ou(1, i);
            if (layout == Layout::InnerOuterSplit) {
                if (r > part.r_split) o_vp = ou(3, i);
                else if (r == part.r_split) o_vp = 0.5 * (ou(1, i) + ou(3, i));
            }
            if (layout == Layout::Overlap) {
                const double g = overlap_field.radial_eval(r).f;
                vr[i] = (1 - g) * ou(0, i);
                vp[i] = g * in(0, i) + (1 - g) * o_vp;
                pr[i] = g * in(1, i) + (1 - g) * ou(2, i);
            } else if (r < part.r_inter) {
                vr[i] = 0.0;
                vp[i] = in(0, i);
                pr[i] = in(1, i);
            } else if (r > part.r_inter) {
                vr[i] = ou(0, i);
                vp[i] = o_vp;
                pr[i] = ou(2, i);
            } else {
                vr[i] = 0.5 * ou(0, i);
                vp[i] = 0.5 * (in(0, i) + o_vp);
                pr[i] = 0.5 * (in(1, i) + ou(2, i));
            }
        }
    }
    for (int i = 0; i < n; ++i) {
        const double c = std::cos(ang[i]), s = std::sin(ang[i]);
        out[static_cast<std::size_t>(i)] = {vr[i] * c - vp[i] * s, vr[i] * s + vp[i] * c, pr[i]};
    }
    return out;
}

} // namespace tankflow
