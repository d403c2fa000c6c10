#include "tankflow/evaluation.hpp"

#include "tankflow/errors.hpp"
#include "tankflow/rng.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>

namespace tankflow {

namespace {

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
        const auto b = cell.find_first_not_of(" \t\r");
        const auto e = cell.find_last_not_of(" \t\r");
        out.push_back(b == std::string::npos ? "" : cell.substr(b, e - b + 1));
    }
    return out;
}

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write '" + path + "'");
    return out;
}

} // namespace

std::vector<CartPoint> ReferenceSolution::positions() const {
    std::vector<CartPoint> out;
    out.reserve(points.size());
    for (const auto& p : points) out.push_back({p.x, p.y});
    return out;
}

ReferenceSolution load_reference(const std::string& path, const GeometryConfig& geo, double tol) {
    std::ifstream in(path);
    if (!in) throw LoadError("cannot open reference '" + path + "'");
    std::string line;
    if (!std::getline(in, line)) throw LoadError("reference '" + path + "' is empty");
    const auto head = split_csv(line);
    const std::vector<std::string> cols{"x", "y", "v_x", "v_y", "p"};
    std::vector<int> idx;
    for (const auto& c : cols) {
        auto it = std::find(head.begin(), head.end(), c);
        if (it == head.end()) throw LoadError("reference '" + path + "' has no column '" + c + "'");
        idx.push_back(static_cast<int>(it - head.begin()));
    }
    ReferenceSolution ref;
    ref.source = path;
    int row = 1;
    while (std::getline(in, line)) {
        ++row;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        const auto cells = split_csv(line);
        double v[5];
        for (int k = 0; k < 5; ++k) {
            const auto c = static_cast<std::size_t>(idx[static_cast<std::size_t>(k)]);
            if (c >= cells.size()) throw LoadError("reference row " + std::to_string(row) + ": missing value");
            char* end = nullptr;
            v[k] = std::strtod(cells[c].c_str(), &end);
            if (end == cells[c].c_str() || *end != '\0' || !std::isfinite(v[k]))
                throw LoadError("reference row " + std::to_string(row) + ": bad value in column " + cols[static_cast<std::size_t>(k)]);
        }
        if (!in_closed_domain({v[0], v[1]}, geo, tol))
            throw LoadError("reference row " + std::to_string(row) + ": point outside the fluid domain");
        ref.points.push_back({v[0], v[1], v[2], v[3], v[4]});
    }
    if (ref.points.empty()) throw LoadError("reference '" + path + "' has no rows");
    return ref;
}

void save_reference(const std::string& path, const ReferenceSolution& ref) {
    auto out = open_out(path);
    out << "x,y,v_x,v_y,p\n";
    for (const auto& p : ref.points)
        out << fmt(p.x) << ',' << fmt(p.y) << ',' << fmt(p.vx) << ',' << fmt(p.vy) << ',' << fmt(p.p) << '\n';
}

std::vector<std::size_t> eval_subset(std::size_t size, int n_eval, std::uint64_t seed) {
    std::vector<std::size_t> idx(size);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    if (n_eval <= 0 || static_cast<std::size_t>(n_eval) >= size) return idx;
    Rng rng(derive_seed(seed, streams::kEval, 0));
    const auto m = static_cast<std::size_t>(n_eval);
    for (std::size_t i = 0; i < m; ++i) std::swap(idx[i], idx[i + rng.below(size - i)]);
    idx.resize(m);
    std::sort(idx.begin(), idx.end());
    return idx;
}

void align_pressure(std::vector<double>& predicted, std::vector<double>& reference) {
    if (predicted.empty() || reference.empty()) throw DomainError("pressure alignment needs non-empty sets");
    const double mp = *std::max_element(predicted.begin(), predicted.end());
    const double mr = *std::max_element(reference.begin(), reference.end());
    for (double& x : predicted) x -= mp;
    for (double& x : reference) x -= mr;
}

ErrorReport error_metrics(const std::vector<Velocity>& predicted, const ReferenceSolution& ref, int n_eval,
                          std::uint64_t seed, double omega, double r_stirrer) {
    if (predicted.size() != ref.points.size()) throw DomainError("prediction and reference sizes differ");
    if (ref.points.empty()) throw DomainError("empty reference");
    ErrorReport r;
    r.seed = seed;
    r.omega = omega;
    r.indices = eval_subset(ref.points.size(), n_eval, seed);
    r.n_eval = r.indices.size();
    r.v_norm = std::abs(omega) * r_stirrer;
    if (!(r.v_norm > 0)) throw DomainError("velocity normalizer must be positive");

    std::vector<double> pp, pr;
    for (std::size_t i : r.indices) {
        pp.push_back(predicted[i].p);
        pr.push_back(ref.points[i].p);
    }
    r.p_norm = *std::max_element(pr.begin(), pr.end()) - *std::min_element(pr.begin(), pr.end());
    if (!(r.p_norm > 0)) throw DomainError("reference pressure range is zero");
    align_pressure(pp, pr);

    double sv1 = 0, sv2 = 0, sp1 = 0, sp2 = 0;
    for (std::size_t k = 0; k < r.indices.size(); ++k) {
        const auto& q = predicted[r.indices[k]];
        const auto& o = ref.points[r.indices[k]];
        const double fv = std::hypot(q.vx, q.vy) - std::hypot(o.vx, o.vy);
        const double fp = std::abs(pp[k]) - std::abs(pr[k]);
        r.f_err_v.push_back(fv);
        r.f_err_p.push_back(fp);
        sv1 += std::abs(fv);
        sv2 += fv * fv;
        sp1 += std::abs(fp);
        sp2 += fp * fp;
    }
    const double n = static_cast<double>(r.n_eval);
    r.v_l1 = sv1 / n / r.v_norm;
    r.v_l2 = std::sqrt(sv2 / n) / r.v_norm;
    r.p_l1 = sp1 / n / r.p_norm;
    r.p_l2 = std::sqrt(sp2 / n) / r.p_norm;
    return r;
}

void write_report_csv(const std::string& path, const std::vector<std::pair<std::string, ErrorReport>>& rows) {
    auto out = open_out(path);
    out << "label,omega,n_eval,seed,v_l1_percent,v_l2_percent,p_l1_percent,p_l2_percent,v_norm,p_norm\n";
    for (const auto& [label, r] : rows)
        out << label << ',' << fmt(r.omega) << ',' << r.n_eval << ',' << r.seed << ',' << fmt(100 * r.v_l1) << ','
            << fmt(100 * r.v_l2) << ',' << fmt(100 * r.p_l1) << ',' << fmt(100 * r.p_l2) << ',' << fmt(r.v_norm) << ','
            << fmt(r.p_norm) << '\n';
}

void write_field_csv(const std::string& path, const std::vector<CartPoint>& pts, const std::vector<Velocity>& pred,
                     const ReferenceSolution* ref) {
    if (pts.size() != pred.size() || (ref && ref->points.size() != pts.size()))
        throw DomainError("field export sizes differ");
    auto out = open_out(path);
    out << "x,y,v_x,v_y,p";
    if (ref) out << ",ref_v_x,ref_v_y,ref_p,f_err_v";
    out << '\n';
    for (std::size_t i = 0; i < pts.size(); ++i) {
        out << fmt(pts[i].x) << ',' << fmt(pts[i].y) << ',' << fmt(pred[i].vx) << ',' << fmt(pred[i].vy) << ','
            << fmt(pred[i].p);
        if (ref) {
            const auto& o = ref->points[i];
            out << ',' << fmt(o.vx) << ',' << fmt(o.vy) << ',' << fmt(o.p) << ','
                << fmt(std::hypot(pred[i].vx, pred[i].vy) - std::hypot(o.vx, o.vy));
        }
        out << '\n';
    }
}

CouetteValue couette_analytic(double r, double r_i, double r_o, double omega, double rho) {
    if (!(r_i < r_o) || !(r_i > 0)) throw DomainError("Couette flow needs 0 < r_i < r_o");
    if (r < r_i * (1 - 1e-12) || r > r_o * (1 + 1e-12)) throw DomainError("radius outside the annulus");
    const double a = omega * r_i * r_i / (r_i * r_i - r_o * r_o);
    const double b = -a * r_o * r_o;
    CouetteValue c;
    c.v_phi = a * r + b / r;
    c.dv_phi = a - b / (r * r);
    c.dp = rho * c.v_phi * c.v_phi / r;
    c.p = rho * (0.5 * a * a * (r * r - r_i * r_i) + 2 * a * b * std::log(r / r_i) -
                 0.5 * b * b * (1 / (r * r) - 1 / (r_i * r_i)));
    return c;
}

Velocity couette_velocity(const CartPoint& p, const GeometryConfig& geo, double omega, const FluidProps& fluid) {
    const double r = std::hypot(p.x, p.y);
    const CouetteValue c = couette_analytic(std::clamp(r, geo.r_stirrer, geo.r_reactor), geo.r_stirrer,
                                            geo.r_reactor, omega, fluid.rho);
    // clockwise: v = speed * (sin phi, -cos phi)
    return {c.v_phi * p.y / r, -c.v_phi * p.x / r, c.p};
}

ReferenceSolution couette_reference(const GeometryConfig& geo, double omega, const FluidProps& fluid, int n,
                                    std::uint64_t seed) {
    if (!geo.annulus) throw ConfigError("the Couette oracle needs the annulus geometry");
    ReferenceSolution ref;
    ref.source = "couette";
    ref.re = reynolds(omega, fluid, geo.r_stirrer);
    for (const auto& p : sample_domain(region_by_id("full", geo, {}), n, geo, derive_seed(seed, streams::kEval, 1))) {
        const Velocity v = couette_velocity(p, geo, omega, fluid);
        ref.points.push_back({p.x, p.y, v.vx, v.vy, v.p});
    }
    return ref;
}

std::vector<ProfileRow> extract_profile(const Model& model, const double* theta, double phi, double r0, double r1,
                                        int n, double omega, const Oracle& oracle) {
    if (n < 2) throw ConfigError("profile needs at least two points");
    std::vector<CartPoint> pts;
    for (int i = 0; i < n; ++i) {
        const double r = r0 + (r1 - r0) * i / (n - 1);
        pts.push_back(polar_to_cart({r, phi}));
    }
    const auto v = model.predict(theta, pts, omega);
    std::vector<ProfileRow> rows;
    for (int i = 0; i < n; ++i) {
        ProfileRow row;
        row.r = r0 + (r1 - r0) * i / (n - 1);
        row.v = v[static_cast<std::size_t>(i)];
        row.vmag = std::hypot(row.v.vx, row.v.vy);
        if (oracle) {
            const Velocity o = oracle(pts[static_cast<std::size_t>(i)]);
            row.f_err = row.vmag - std::hypot(o.vx, o.vy);
            row.has_err = true;
        }
        rows.push_back(row);
    }
    return rows;
}

void write_profile_csv(const std::string& path, const std::vector<ProfileRow>& rows) {
    auto out = open_out(path);
    const bool err = !rows.empty() && rows.front().has_err;
    out << "r,v_mag,v_x,v_y,p" << (err ? ",f_err" : "") << '\n';
    for (const auto& r : rows) {
        out << fmt(r.r) << ',' << fmt(r.vmag) << ',' << fmt(r.v.vx) << ',' << fmt(r.v.vy) << ',' << fmt(r.v.p);
        if (err) out << ',' << fmt(r.f_err);
        out << '\n';
    }
}

} // namespace tankflow
