#include "tankflow/builder.hpp"

#include "tankflow/errors.hpp"
#include "tankflow/rng.hpp"

#include <cmath>
#include <memory>
#include <numbers>

namespace tankflow {

namespace {

constexpr double kPi = std::numbers::pi;

/// Stream offsets so different point sets never share a seed.
enum SetId : std::uint64_t {
    kSetDomain = 0,
    kSetInner,
    kSetOuter,
    kSetBand,
    kSetStirrer,
    kSetWall,
    kSetSymmetry,
    kSetInterface,
    kSetContinuity,
    kSetDerivative,
    kSetBaffle,
    kSetCount
};

NetworkSpec sized(NetworkSpec s, int n_in, int n_out) {
    s.n_in = n_in;
    s.n_out = n_out;
    s.validate();
    return s;
}

Eigen::MatrixXd radius_row(const std::vector<CartPoint>& pts) {
    Eigen::MatrixXd aux(1, static_cast<Eigen::Index>(pts.size()));
    for (std::size_t i = 0; i < pts.size(); ++i) aux(0, static_cast<Eigen::Index>(i)) = std::hypot(pts[i].x, pts[i].y);
    return aux;
}

struct Factory {
    ModelPreset preset;
    std::shared_ptr<const Model> model;
    std::vector<ReferencePoint> data;

    // fixed boundary sets, built on first use
    bool have_fixed = false;
    std::vector<TermGroup> fixed;

    std::uint64_t seed(std::uint64_t s, int k, SetId id) const {
        return derive_seed(preset.seed, s, static_cast<std::uint64_t>(k) * kSetCount + id);
    }

    std::vector<double> omegas(int n, int k, SetId id) const {
        return sample_omegas(preset, n, seed(streams::kParam, k, id));
    }

    std::vector<CartPoint> boundary(Boundary b, const std::string& key, int k, SetId id, bool quarter) const {
        const int n = preset.sampling.boundary_count(key);
        if (n == 0) return {};
        return sample_boundary(b, n, model->geo, model->part, quarter, seed(streams::kBoundary, k, id));
    }

    TermGroup group(const std::string& name, Kernel kernel, const std::vector<CartPoint>& pts) const {
        TermGroup g;
        g.name = name;
        g.kernel = kernel;
        g.n = static_cast<int>(pts.size());
        return g;
    }

    std::vector<TermGroup> operator()(int k) {
        const bool fixed_sets = preset.sampling.fixed_boundary;
        std::vector<TermGroup> out = domain_groups(k);
        if (fixed_sets) {
            if (!have_fixed) {
                fixed = boundary_groups(0);
                have_fixed = true;
            }
            out.insert(out.end(), fixed.begin(), fixed.end());
        } else {
            auto b = boundary_groups(k);
            out.insert(out.end(), b.begin(), b.end());
        }
        std::vector<TermGroup> kept;
        for (auto& g : out)
            if (g.n > 0) kept.push_back(std::move(g));
        return kept;
    }

    // ---- domain sets, redrawn at every resample ----

    std::vector<TermGroup> domain_groups(int k) const {
        const Model& m = *model;
        const SamplingPlan& sp = preset.sampling;
        std::vector<TermGroup> out;
        if (m.layout == Layout::Single) {
            const Region reg = region_by_id(m.symmetric ? "sym" : "full", m.geo, m.part);
            const auto pts = sample_domain(reg, sp.domain_points, m.geo, seed(streams::kDomain, k, kSetDomain));
            const auto om = omegas(static_cast<int>(pts.size()), k, kSetDomain);
            if (m.coords == Coords::Cartesian) {
                TermGroup g = group("domain", Kernel::NsCartesian, pts);
                g.uses.push_back(make_use(m, 0, pts, om, 2));
                g.ids = {"momentum_x", "momentum_y", "mass"};
                g.slots = {0, 1, 2};
                out.push_back(std::move(g));
            } else {
                TermGroup g = group("domain", Kernel::NsPolar, pts);
                g.uses.push_back(make_use(m, 0, pts, om, 2));
                g.ids = {"momentum_r", "momentum_phi", "mass"};
                g.slots = {0, 1, 2};
                g.aux = radius_row(pts);
                out.push_back(std::move(g));
            }
            return out;
        }

        const int si = m.subnet_index("inner"), so = m.subnet_index("outer");
        const auto [n_in, n_out] = split_counts(sp.domain_points, sp.inner_outer_ratio);
        Region inner = region_by_id(sp.inner_full_angle ? "inner" : "inner_ray", m.geo, m.part);
        Region outer = region_by_id("outer", m.geo, m.part);
        if (m.layout == Layout::Overlap) {
            inner.r_max = m.part.r_inter - 0.5 * m.part.overlap_width;
            outer.r_min = m.part.r_inter + 0.5 * m.part.overlap_width;
        }

        const auto ip = sample_domain(inner, n_in, m.geo, seed(streams::kDomain, k, kSetInner));
        const auto iom = omegas(static_cast<int>(ip.size()), k, kSetInner);
        TermGroup gi = group("inner", Kernel::InnerOde, ip);
        gi.uses.push_back(make_use(m, si, ip, iom, 2));
        gi.ids = {"momentum_r.inner", "momentum_phi.inner"};
        gi.slots = {0, 1};
        gi.aux = radius_row(ip);
        out.push_back(std::move(gi));

        const auto op = sample_domain(outer, n_out, m.geo, seed(streams::kDomain, k, kSetOuter));
        const auto oom = omegas(static_cast<int>(op.size()), k, kSetOuter);
        const std::vector<std::string> outer_ids{"momentum_r.outer", "momentum_phi.outer", "mass.outer"};
        if (m.layout == Layout::InnerOuterSplit) {
            // classify by radius: v_phi comes from output 1 below the split and output 3 above
            std::vector<CartPoint> p1, p2;
            std::vector<double> o1, o2;
            for (std::size_t i = 0; i < op.size(); ++i) {
                if (std::hypot(op[i].x, op[i].y) <= m.part.r_split) {
                    p1.push_back(op[i]);
                    o1.push_back(oom[i]);
                } else {
                    p2.push_back(op[i]);
                    o2.push_back(oom[i]);
                }
            }
            for (int part = 0; part < 2; ++part) {
                const auto& pts = part == 0 ? p1 : p2;
                if (pts.empty()) continue;
                TermGroup g = group(part == 0 ? "outer_1" : "outer_2", Kernel::NsPolar, pts);
                g.uses.push_back(make_use(m, so, pts, part == 0 ? o1 : o2, 2));
                g.ids = outer_ids;
                g.slots = {0, part == 0 ? 1 : 3, 2};
                g.aux = radius_row(pts);
                out.push_back(std::move(g));
            }
        } else {
            TermGroup g = group("outer", Kernel::NsPolar, op);
            g.uses.push_back(make_use(m, so, op, oom, 2));
            g.ids = outer_ids;
            g.slots = {0, 1, 2};
            g.aux = radius_row(op);
            out.push_back(std::move(g));
        }

        if (m.layout == Layout::Overlap) {
            const auto bp = sample_domain(region_by_id("band", m.geo, m.part), sp.overlap_points, m.geo,
                                          seed(streams::kDomain, k, kSetBand));
            const auto bom = omegas(static_cast<int>(bp.size()), k, kSetBand);
            TermGroup g = group("band", Kernel::Band, bp);
            g.uses.push_back(make_use(m, si, bp, bom, 2));
            g.uses.push_back(make_use(m, so, bp, bom, 2));
            g.ids = outer_ids;
            g.slots = {0, 1, 2, 3, 4};
            g.aux.resize(7, g.n);
            for (int i = 0; i < g.n; ++i) {
                const double r = std::hypot(bp[static_cast<std::size_t>(i)].x, bp[static_cast<std::size_t>(i)].y);
                const Radial w = m.overlap_field.radial_eval(r);
                const Jet j = radial_polar_jet(w.f, w.fr, w.frr);
                g.aux(0, i) = r;
                for (int c = 0; c < 6; ++c) g.aux(1 + c, i) = j[c];
            }
            out.push_back(std::move(g));
        }
        return out;
    }

    // ---- boundary sets ----

    TermGroup dirichlet(const std::string& name, const std::vector<CartPoint>& pts, int subnet, int k, SetId id,
                        const std::vector<std::pair<std::string, int>>& fields, bool stirrer_targets) const {
        const Model& m = *model;
        TermGroup g = group(name, Kernel::Linear, pts);
        if (pts.empty()) return g;
        const auto om = omegas(g.n, k, id);
        g.uses.push_back(make_use(m, subnet, pts, om, 0));
        g.aux = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(fields.size()), g.n);
        for (int i = 0; i < g.n; ++i) {
            if (!stirrer_targets) break;
            const CartPoint& p = pts[static_cast<std::size_t>(i)];
            const CartPoint v = stirrer_velocity(p, om[static_cast<std::size_t>(i)]);
            if (m.coords == Coords::Cartesian) {
                g.aux(0, i) = v.x;
                g.aux(1, i) = v.y;
            } else {
                const double r = std::hypot(p.x, p.y);
                const double c = r > 0 ? p.x / r : 1.0, s = r > 0 ? p.y / r : 0.0;
                g.aux(0, i) = v.x * c + v.y * s;
                g.aux(1, i) = -v.x * s + v.y * c;
            }
        }
        for (std::size_t f = 0; f < fields.size(); ++f)
            g.linear.push_back({fields[f].first, fields[f].second, 0, -1, 0, static_cast<int>(f)});
        return g;
    }

    std::vector<TermGroup> boundary_groups(int k) const {
        const Model& m = *model;
        std::vector<TermGroup> out;
        const bool q = m.symmetric;
        const bool cart = m.coords == Coords::Cartesian;

        if (m.layout == Layout::Single) {
            const std::string vx = cart ? ".v_x" : ".v_r", vy = cart ? ".v_y" : ".v_phi";
            if (preset.bc == BcMode::Weak) {
                const auto st = boundary(Boundary::Stirrer, "stirrer", k, kSetStirrer, q);
                out.push_back(dirichlet("stirrer", st, 0, k, kSetStirrer, {{"impeller" + vx, 0}, {"impeller" + vy, 1}}, true));
            }
            if (preset.bc != BcMode::Strong) {
                const auto wl = boundary(Boundary::Wall, "wall", k, kSetWall, q);
                out.push_back(dirichlet("wall", wl, 0, k, kSetWall, {{"wall" + vx, 0}, {"wall" + vy, 1}}, false));
            }
            if (q) out.push_back(symmetry(0, 3, k));
            if (!data.empty()) out.push_back(data_group());
            return out;
        }

        const int si = m.subnet_index("inner"), so = m.subnet_index("outer");
        const int no = m.subnets[static_cast<std::size_t>(so)].n_outputs();
        const bool split = m.layout == Layout::InnerOuterSplit;
        const int v2 = split ? 3 : 1;

        const auto wl = boundary(Boundary::Wall, "wall", k, kSetWall, true);
        out.push_back(dirichlet("wall", wl, so, k, kSetWall, {{"wall.v_r", 0}, {"wall.v_phi", v2}}, false));
        out.push_back(symmetry(so, no, k));

        const auto ip = boundary(Boundary::Interface, "interface", k, kSetInterface, true);
        if (!ip.empty()) {
            TermGroup g = group("interface", Kernel::Linear, ip);
            const auto om = omegas(g.n, k, kSetInterface);
            if (m.layout == Layout::Overlap) {
                g.uses.push_back(make_use(m, so, ip, om, 0));
                g.linear = {{"coupling.v_r", 0, 0}};
            } else {
                g.uses.push_back(make_use(m, si, ip, om, 1));
                g.uses.push_back(make_use(m, so, ip, om, 1));
                // fields: inner v_phi 0, inner p 1, outer v_r 2, outer v_phi 3, outer p 4
                g.linear = {{"coupling.v_r", 2, 0},
                            {"coupling.v_phi", 3, 0, 0, 0},
                            {"coupling.p", 4, 0, 1, 0},
                            {"coupling.dr_v_phi", 3, 1, 0, 1}};
            }
            out.push_back(std::move(g));
        }

        if (split) {
            const auto bf = boundary(Boundary::Baffle, "baffle", k, kSetBaffle, true);
            out.push_back(dirichlet("baffle", bf, so, k, kSetBaffle, {{"baffle", 1}}, false));
            for (const auto& [b, key, id] : {std::tuple{Boundary::Continuity, "continuity", kSetContinuity},
                                             std::tuple{Boundary::Derivative, "derivative", kSetDerivative}}) {
                const auto pts = boundary(b, key, k, id, true);
                TermGroup g = group(key, Kernel::Linear, pts);
                if (pts.empty()) continue;
                const int order = b == Boundary::Derivative ? 1 : 0;
                g.uses.push_back(make_use(m, so, pts, omegas(g.n, k, id), order));
                g.linear = {{key, 1, order, 3, order}};
                out.push_back(std::move(g));
            }
        }
        return out;
    }

    /// Values at (r, pi/4) must equal values at (r, -pi/4).
    TermGroup symmetry(int subnet, int n_out, int k) const {
        const Model& m = *model;
        const auto up = boundary(Boundary::Symmetry, "symmetry", k, kSetSymmetry, true);
        TermGroup g = group("symmetry", Kernel::Linear, up);
        if (up.empty()) return g;
        std::vector<CartPoint> lo;
        for (const auto& p : up) {
            const double r = std::hypot(p.x, p.y);
            lo.push_back(polar_to_cart({r, -0.25 * kPi}));
        }
        std::vector<CartPoint> hi;
        for (const auto& p : up) hi.push_back(polar_to_cart({std::hypot(p.x, p.y), 0.25 * kPi}));
        const auto om = omegas(g.n, k, kSetSymmetry);
        g.uses.push_back(make_use(m, subnet, hi, om, 0));
        g.uses.push_back(make_use(m, subnet, lo, om, 0));
        g.linear = {{"symmetry.v_r", 0, 0, n_out, 0}, {"symmetry.v_phi", 1, 0, n_out + 1, 0}, {"symmetry.p", 2, 0, n_out + 2, 0}};
        return g;
    }

    TermGroup data_group() const {
        const Model& m = *model;
        std::vector<CartPoint> pts;
        for (const auto& d : data) pts.push_back({d.x, d.y});
        TermGroup g = group("data", Kernel::Linear, pts);
        g.uses.push_back(make_use(m, 0, pts, std::vector<double>(pts.size(), preset.omega), 0));
        g.aux.resize(3, g.n);
        for (int i = 0; i < g.n; ++i) {
            const auto& d = data[static_cast<std::size_t>(i)];
            g.aux(0, i) = d.vx;
            g.aux(1, i) = d.vy;
            g.aux(2, i) = d.p;
        }
        g.linear = {{"data.v_x", 0, 0, -1, 0, 0}, {"data.v_y", 1, 0, -1, 0, 1}, {"data.p", 2, 0, -1, 0, 2}};
        return g;
    }
};

} // namespace

std::pair<int, int> split_counts(int total, double ratio) {
    if (!(ratio > 0)) throw ConfigError("inner/outer ratio must be positive");
    const int inner = static_cast<int>(std::lround(total * ratio / (1.0 + ratio)));
    return {inner, total - inner};
}

std::vector<double> sample_omegas(const ModelPreset& preset, int n, std::uint64_t seed) {
    if (!preset.param) return std::vector<double>(static_cast<std::size_t>(n), preset.omega);
    const auto [lo, hi] = preset.omega_range();
    Rng rng(seed);
    std::vector<double> om(static_cast<std::size_t>(n));
    for (double& w : om) w = rng.uniform(lo, hi);
    return om;
}

Model build_model(const ModelPreset& preset) {
    preset.validate();
    Model m;
    m.coords = preset.coords;
    m.layout = preset.layout;
    m.symmetric = preset.symmetric;
    m.geo = preset.geometry;
    m.part = preset.partition();
    m.omega = preset.omega;
    LiftingConfig lc = preset.lifting;
    lc.r_stirrer = preset.geometry.r_stirrer;

    const bool param = preset.parameterized();
    const auto [om_lo, om_hi] = preset.omega_range();
    auto with_omega = [&](std::vector<InputFeature> in) {
        if (param) in.push_back(omega_feature(om_lo, om_hi));
        return in;
    };
    OutputScaling base;
    base.r_stirrer = preset.geometry.r_stirrer;
    base.rho = preset.fluid.rho;
    base.v_r_ref = preset.v_r_ref;
    base.r_star = preset.lifting.r_star;
    base.r_inter = preset.sampling.r_inter;
    base.omega_dependent_vr = param;
    base.split_scale = preset.split_scale;

    std::size_t offset = 0;
    auto add = [&](const std::string& name, int n_out, std::vector<InputFeature> in, OutputScaling post,
                   std::vector<int> ansatz) {
        const int n_in = static_cast<int>(in.size());
        m.subnets.emplace_back(name, sized(preset.networks.at(name), n_in, n_out), std::move(in), post,
                               std::move(ansatz), offset);
        offset += m.subnets.back().param_count();
    };

    if (preset.layout == Layout::Single) {
        OutputScaling post = base;
        post.kind = preset.coords == Coords::Cartesian ? PostMap::Cartesian : PostMap::Polar;
        std::vector<int> ansatz;
        if (preset.bc != BcMode::Weak) {
            if (preset.coords != Coords::Cartesian) throw ConfigError("strong conditions need Cartesian coordinates");
            ansatz = {0, 1};
            m.g_field = make_distance_field(preset.bc == BcMode::Strong ? FieldKind::Strong : FieldKind::Hybrid,
                                            m.geo, m.part);
            m.lift = lc.wall_scaled ? LiftingFunction(lc, make_distance_field(FieldKind::WallSpline, m.geo, m.part))
                                    : LiftingFunction(lc);
        }
        auto in = preset.coords == Coords::Cartesian ? cartesian_premap(m.geo) : polar_premap(m.geo);
        add("main", 3, with_omega(std::move(in)), post, ansatz);
        return m;
    }

    m.inner_axisymmetric = !preset.sampling.inner_full_angle;
    if (!m.inner_axisymmetric) m.g_field = make_distance_field(FieldKind::Hybrid, m.geo, m.part);
    m.lift = LiftingFunction(lc);
    OutputScaling in_post = base;
    in_post.kind = PostMap::DdInner;
    add("inner", 2, with_omega(dd_inner_premap(m.geo, m.part.r_inter)), in_post, {0});
    OutputScaling out_post = base;
    out_post.kind = PostMap::DdOuter;
    out_post.split_output = preset.layout == Layout::InnerOuterSplit;
    add("outer", out_post.n_outputs(), with_omega(dd_outer_premap(m.geo, m.part.r_inter)), out_post, {});
    if (preset.layout == Layout::Overlap) m.overlap_field = make_distance_field(FieldKind::Overlap, m.geo, m.part);
    return m;
}

std::vector<double> init_params(const Model& model, std::uint64_t seed) {
    std::vector<double> theta(model.param_count(), 0.0);
    for (std::size_t k = 0; k < model.subnets.size(); ++k) {
        const Subnet& s = model.subnets[k];
        s.net().init_glorot(theta.data() + s.offset(), derive_seed(seed, streams::kInit, k));
    }
    return theta;
}

PinnProblem build_problem(const ModelPreset& preset, const Model& model, const ReferenceSolution* labeled) {
    Factory f;
    f.preset = preset;
    f.model = std::make_shared<const Model>(model);
    if (preset.sampling.data_points > 0) {
        if (!labeled) throw ConfigError("preset '" + preset.id + "' needs a labeled data set");
        if (model.coords != Coords::Cartesian) throw ConfigError("labeled data is supported for Cartesian models");
        const auto idx = eval_subset(labeled->points.size(), preset.sampling.data_points,
                                     derive_seed(preset.seed, streams::kData, 0));
        for (std::size_t i : idx) f.data.push_back(labeled->points[i]);
    }
    auto shared = std::make_shared<Factory>(std::move(f));
    return PinnProblem(model, preset.weights, preset.fluid, preset.reg_l1, preset.reg_l2,
                       [shared](int k) { return (*shared)(k); });
}

} // namespace tankflow
