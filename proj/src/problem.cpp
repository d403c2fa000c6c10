#include "tankflow/problem.hpp"

#include "tankflow/dual.hpp"
#include "tankflow/errors.hpp"

#include <cmath>
#include <deque>
#include <map>

namespace tankflow {

namespace {

constexpr int kTangents = 32;
using D = Dual<kTangents>;

struct FieldRef {
    int use = 0;
    int row = 0;
};

std::vector<FieldRef> field_refs(const TermGroup& g, const Model& model) {
    std::vector<FieldRef> f;
    for (std::size_t u = 0; u < g.uses.size(); ++u) {
        const int n_out = model.subnets[static_cast<std::size_t>(g.uses[u].subnet)].n_outputs();
        for (int k = 0; k < n_out; ++k) f.push_back({static_cast<int>(u), k});
    }
    return f;
}

int kernel_arity(Kernel k) {
    switch (k) {
    case Kernel::NsCartesian: return 3;
    case Kernel::NsPolar: return 3;
    case Kernel::InnerOde: return 2;
    case Kernel::Band: return 5;
    case Kernel::Linear: return 0;
    }
    return 0;
}

int kernel_outputs(Kernel k) {
    switch (k) {
    case Kernel::NsCartesian:
    case Kernel::NsPolar:
    case Kernel::Band: return 3;
    case Kernel::InnerOde: return 2;
    case Kernel::Linear: return 0;
    }
    return 0;
}

Jet aux_jet(const TermGroup& g, int row0, int i) {
    Jet j;
    for (int c = 0; c < 6; ++c) j[c] = g.aux(row0 + c, i);
    return j;
}

template <class T>
void run_kernel(const TermGroup& g, int i, const JetT<T>* f, const FluidProps& fl, T* out) {
    switch (g.kernel) {
    case Kernel::NsCartesian: {
        const auto r = ns_cartesian(f[0], f[1], f[2], fl);
        for (int k = 0; k < 3; ++k) out[k] = r[static_cast<std::size_t>(k)];
        break;
    }
    case Kernel::NsPolar: {
        const auto r = ns_polar(f[0], f[1], f[2], g.aux(0, i), fl);
        for (int k = 0; k < 3; ++k) out[k] = r[static_cast<std::size_t>(k)];
        break;
    }
    case Kernel::InnerOde: {
        const auto r = inner_ode(f[0], f[1], g.aux(0, i), fl);
        out[0] = r[0];
        out[1] = r[1];
        break;
    }
    case Kernel::Band: {
        const Jet w = aux_jet(g, 1, i);
        const Jet om{1.0 - w.v, -w.a, -w.b, -w.aa, -w.ab, -w.bb};
        const JetT<T> vr = jet_mul(om, f[2]);
        const JetT<T> vp = jet_blend(w, f[0], f[3]);
        const JetT<T> p = jet_blend(w, f[1], f[4]);
        const auto r = ns_polar(vr, vp, p, g.aux(0, i), fl);
        for (int k = 0; k < 3; ++k) out[k] = r[static_cast<std::size_t>(k)];
        break;
    }
    case Kernel::Linear: break;
    }
}

void validate_group(const TermGroup& g, const Model& model) {
    const auto nf = static_cast<int>(field_refs(g, model).size());
    for (const auto& u : g.uses) {
        if (u.subnet < 0 || u.subnet >= static_cast<int>(model.subnets.size()))
            throw ConfigError("group '" + g.name + "': bad subnet index");
        if (u.raw.cols() != g.n) throw ConfigError("group '" + g.name + "': point count mismatch");
    }
    if (g.kernel == Kernel::Linear) {
        for (const auto& t : g.linear) {
            if (t.a < 0 || t.a >= nf || t.b >= nf) throw ConfigError("group '" + g.name + "': bad field index");
            if (t.target >= g.aux.rows()) throw ConfigError("group '" + g.name + "': bad target row");
        }
        return;
    }
    if (static_cast<int>(g.slots.size()) != kernel_arity(g.kernel) ||
        static_cast<int>(g.ids.size()) != kernel_outputs(g.kernel))
        throw ConfigError("group '" + g.name + "': kernel slots or ids malformed");
    int tangents = 0;
    for (int s : g.slots) {
        if (s < 0 || s >= nf) throw ConfigError("group '" + g.name + "': bad slot");
        const auto fr = field_refs(g, model)[static_cast<std::size_t>(s)];
        tangents += channels_for_order(g.uses[static_cast<std::size_t>(fr.use)].order);
    }
    if (tangents > kTangents) throw ConfigError("group '" + g.name + "': too many tangents");
    const int need_aux = g.kernel == Kernel::Band ? 7 : (g.kernel == Kernel::NsCartesian ? 0 : 1);
    if (g.aux.rows() < need_aux || (need_aux > 0 && g.aux.cols() != g.n))
        throw ConfigError("group '" + g.name + "': aux rows missing");
}

/// Collects residuals per id in first-seen order.
struct Collector {
    std::deque<ResidualBatch> batches;
    std::map<std::string, std::size_t> index;

    std::vector<ResidualBatch> take() { return {batches.begin(), batches.end()}; }

    std::vector<double>& at(const std::string& id) {
        auto it = index.find(id);
        if (it == index.end()) {
            index.emplace(id, batches.size());
            batches.push_back({id, {}});
            return batches.back().residuals;
        }
        return batches[it->second].residuals;
    }
};

} // namespace

SubnetUse make_use(const Model& model, int s, const std::vector<CartPoint>& pts, const std::vector<double>& omegas,
                   int order) {
    SubnetUse u;
    u.subnet = s;
    u.order = order;
    u.raw = model.raw_coords(pts, omegas);
    model.ansatz_jets(s, pts, omegas, order, u.H, u.G);
    return u;
}

std::vector<std::string> group_ids(const TermGroup& g) {
    if (g.kernel != Kernel::Linear) return g.ids;
    std::vector<std::string> ids;
    for (const auto& t : g.linear) ids.push_back(t.id);
    return ids;
}

PinnProblem::PinnProblem(Model model, LossWeights weights, FluidProps fluid, double l1, double l2,
                         BatchFactory factory)
    : model_(std::move(model)), weights_(std::move(weights)), fluid_(fluid), l1_(l1), l2_(l2),
      factory_(std::move(factory)) {
    fluid_.validate();
    if (!(l1_ >= 0) || !(l2_ >= 0)) throw ConfigError("regularization factors must be >= 0");
}

void PinnProblem::resample(int k) {
    if (!factory_) throw ConfigError("problem has no batch factory");
    set_groups(factory_(k));
}

void PinnProblem::set_groups(std::vector<TermGroup> groups) {
    for (const auto& g : groups) validate_group(g, model_);
    groups_ = std::move(groups);
    check_weights();
}

void PinnProblem::check_weights() const {
    for (const auto& g : groups_)
        for (const auto& id : group_ids(g)) weights_.key_for(id);
}

std::vector<ResidualBatch> PinnProblem::residuals(const std::vector<double>& theta) const {
    Collector col;
    for (const auto& g : groups_) {
        const auto refs = field_refs(g, model_);
        std::vector<Subnet::Eval> evs(g.uses.size());
        for (std::size_t u = 0; u < g.uses.size(); ++u) {
            const auto& use = g.uses[u];
            model_.subnets[static_cast<std::size_t>(use.subnet)].forward(
                theta.data(), use.raw, use.order, use.H.rows() ? &use.H : nullptr, use.G.rows() ? &use.G : nullptr,
                evs[u]);
        }
        auto field = [&](int f, int c, int i) {
            const auto& r = refs[static_cast<std::size_t>(f)];
            const auto& ev = evs[static_cast<std::size_t>(r.use)];
            if (c >= channels_for_order(ev.order)) return 0.0;
            return ev.out(r.row, static_cast<Eigen::Index>(c) * g.n + i);
        };
        if (g.kernel == Kernel::Linear) {
            for (const auto& t : g.linear) {
                auto& out = col.at(t.id);
                for (int i = 0; i < g.n; ++i) {
                    double r = field(t.a, t.ca, i);
                    if (t.b >= 0) r -= field(t.b, t.cb, i);
                    if (t.target >= 0) r -= g.aux(t.target, i);
                    out.push_back(r);
                }
            }
            continue;
        }
        const int na = kernel_arity(g.kernel), no = kernel_outputs(g.kernel);
        std::vector<std::vector<double>*> outs;
        for (const auto& id : g.ids) outs.push_back(&col.at(id));
        std::vector<Jet> f(static_cast<std::size_t>(na));
        double res[3];
        for (int i = 0; i < g.n; ++i) {
            for (int s = 0; s < na; ++s)
                for (int c = 0; c < 6; ++c) f[static_cast<std::size_t>(s)][c] = field(g.slots[static_cast<std::size_t>(s)], c, i);
            run_kernel<double>(g, i, f.data(), fluid_, res);
            for (int k = 0; k < no; ++k) outs[static_cast<std::size_t>(k)]->push_back(res[k]);
        }
    }
    return col.take();
}

double PinnProblem::objective(const std::vector<double>& theta, std::vector<double>* grad,
                              LossBreakdown* breakdown) const {
    if (theta.size() != param_count()) throw ConfigError("parameter vector has the wrong length");
    if (!grad) {
        const LossBreakdown bd = assemble_loss(residuals(theta), weights_, theta, l1_, l2_);
        if (breakdown) *breakdown = bd;
        return bd.log_total;
    }

    std::map<std::string, std::size_t> counts;
    for (const auto& g : groups_)
        for (const auto& id : group_ids(g)) counts[id] += static_cast<std::size_t>(g.n);

    grad->assign(theta.size(), 0.0);
    Collector col;
    for (const auto& g : groups_) {
        const auto refs = field_refs(g, model_);
        std::vector<Subnet::Eval> evs(g.uses.size());
        std::vector<JetMatrix> adj(g.uses.size());
        for (std::size_t u = 0; u < g.uses.size(); ++u) {
            const auto& use = g.uses[u];
            model_.subnets[static_cast<std::size_t>(use.subnet)].forward(
                theta.data(), use.raw, use.order, use.H.rows() ? &use.H : nullptr, use.G.rows() ? &use.G : nullptr,
                evs[u]);
            adj[u] = JetMatrix::Zero(evs[u].out.rows(), evs[u].out.cols());
        }
        auto field = [&](int f, int c, int i) {
            const auto& r = refs[static_cast<std::size_t>(f)];
            const auto& ev = evs[static_cast<std::size_t>(r.use)];
            if (c >= channels_for_order(ev.order)) return 0.0;
            return ev.out(r.row, static_cast<Eigen::Index>(c) * g.n + i);
        };
        auto add_adj = [&](int f, int c, int i, double a) {
            const auto& r = refs[static_cast<std::size_t>(f)];
            adj[static_cast<std::size_t>(r.use)](r.row, static_cast<Eigen::Index>(c) * g.n + i) += a;
        };
        auto coef = [&](const std::string& id) {
            return 2.0 * weights_.weight(id) / static_cast<double>(counts.at(id));
        };

        if (g.kernel == Kernel::Linear) {
            for (const auto& t : g.linear) {
                auto& out = col.at(t.id);
                const double cf = coef(t.id);
                for (int i = 0; i < g.n; ++i) {
                    double r = field(t.a, t.ca, i);
                    if (t.b >= 0) r -= field(t.b, t.cb, i);
                    if (t.target >= 0) r -= g.aux(t.target, i);
                    out.push_back(r);
                    add_adj(t.a, t.ca, i, cf * r);
                    if (t.b >= 0) add_adj(t.b, t.cb, i, -cf * r);
                }
            }
        } else {
            const int na = kernel_arity(g.kernel), no = kernel_outputs(g.kernel);
            std::vector<std::vector<double>*> outs;
            std::vector<double> cfs;
            for (const auto& id : g.ids) {
                outs.push_back(&col.at(id));
                cfs.push_back(coef(id));
            }
            std::vector<int> nch(static_cast<std::size_t>(na)), base(static_cast<std::size_t>(na));
            int nt = 0;
            for (int s = 0; s < na; ++s) {
                const auto& r = refs[static_cast<std::size_t>(g.slots[static_cast<std::size_t>(s)])];
                nch[static_cast<std::size_t>(s)] = channels_for_order(g.uses[static_cast<std::size_t>(r.use)].order);
                base[static_cast<std::size_t>(s)] = nt;
                nt += nch[static_cast<std::size_t>(s)];
            }
            std::vector<JetT<D>> f(static_cast<std::size_t>(na));
            D res[3];
            std::array<double, kTangents> acc{};
            for (int i = 0; i < g.n; ++i) {
                for (int s = 0; s < na; ++s) {
                    const auto su = static_cast<std::size_t>(s);
                    for (int c = 0; c < 6; ++c)
                        f[su][c] = c < nch[su] ? D::variable(field(g.slots[su], c, i), base[su] + c) : D(0.0);
                }
                run_kernel<D>(g, i, f.data(), fluid_, res);
                acc.fill(0.0);
                for (int k = 0; k < no; ++k) {
                    const double r = res[k].v;
                    outs[static_cast<std::size_t>(k)]->push_back(r);
                    const double a = cfs[static_cast<std::size_t>(k)] * r;
                    for (int j = 0; j < nt; ++j) acc[static_cast<std::size_t>(j)] += a * res[k].d[static_cast<std::size_t>(j)];
                }
                for (int s = 0; s < na; ++s)
                    for (int c = 0; c < nch[static_cast<std::size_t>(s)]; ++c)
                        add_adj(g.slots[static_cast<std::size_t>(s)], c, i,
                                acc[static_cast<std::size_t>(base[static_cast<std::size_t>(s)] + c)]);
            }
        }
        for (std::size_t u = 0; u < g.uses.size(); ++u) {
            const auto& use = g.uses[u];
            model_.subnets[static_cast<std::size_t>(use.subnet)].backward(theta.data(), evs[u], adj[u],
                                                                       use.G.rows() ? &use.G : nullptr, grad->data());
        }
    }

    const LossBreakdown bd = assemble_loss(col.take(), weights_, theta, l1_, l2_);
    for (std::size_t j = 0; j < theta.size(); ++j) {
        const double t = theta[j];
        (*grad)[j] += l1_ * (t > 0 ? 1.0 : (t < 0 ? -1.0 : 0.0)) + 2.0 * l2_ * t;
    }
    const double inv = 1.0 / (bd.total + kLogEpsilon);
    for (double& x : *grad) x *= inv;
    if (breakdown) *breakdown = bd;
    return bd.log_total;
}

} // namespace tankflow
