#include "tankflow/presets.hpp"

#include "tankflow/errors.hpp"

#include <cmath>
#include <fstream>
#include <set>

namespace tankflow {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

void check_keys(const json& j, const std::set<std::string>& allowed, const std::string& where) {
    if (!j.is_object()) throw ConfigError(where + " must be an object");
    for (auto it = j.begin(); it != j.end(); ++it)
        if (!allowed.count(it.key())) throw ConfigError("unknown key '" + it.key() + "' in " + where);
}

template <class T>
void read(const json& j, const char* key, T& out, const std::string& where) {
    if (!j.contains(key)) return;
    try {
        out = j.at(key).get<T>();
    } catch (const json::exception&) {
        throw ConfigError("bad value for '" + std::string(key) + "' in " + where);
    }
}

ModelPreset base_preset() {
    ModelPreset p;
    p.geometry = GeometryConfig::stirred_tank();
    return p;
}

NetworkSpec hidden(int width) { return NetworkSpec{0, {width, width}, 0, Activation::Tanh}; }

ModelPreset baseline() {
    ModelPreset p = base_preset();
    p.id = "baseline";
    p.description = "Cartesian PINN with weak boundary conditions";
    p.networks = {{"main", hidden(100)}};
    p.weights = LossWeights({{"momentum_x", 1}, {"momentum_y", 1}, {"mass", 1}, {"wall", 1}, {"impeller", 1}});
    p.sampling.domain_points = 2048;
    p.sampling.boundary = {{"stirrer", 1024}, {"wall", 1024}};
    p.epochs = 25000;
    return p;
}

ModelPreset dd() {
    ModelPreset p = base_preset();
    p.id = "dd";
    p.description = "inner ODE subdomain and outer Navier-Stokes subdomain, soft coupling";
    p.coords = Coords::Polar;
    p.bc = BcMode::Hybrid;
    p.layout = Layout::InnerOuter;
    p.symmetric = true;
    p.networks = {{"inner", hidden(25)}, {"outer", hidden(100)}};
    p.weights = LossWeights({{"momentum_r.inner", 1e9},
                             {"momentum_phi.inner", 1e8},
                             {"momentum_r.outer", 5e13},
                             {"momentum_phi.outer", 5e14},
                             {"mass.outer", 5e8},
                             {"coupling.v_r", 1e12},
                             {"coupling.v_phi", 1e12},
                             {"coupling.dr_v_phi", 1e7},
                             {"coupling.p", 1e6},
                             {"wall.v_r", 1e10},
                             {"wall.v_phi", 1e13},
                             {"symmetry.v_r", 1e9},
                             {"symmetry.v_phi", 1e9},
                             {"symmetry.p", 1e5}});
    p.sampling.domain_points = 4096;
    p.sampling.r_inter = 0.07;
    p.sampling.inner_outer_ratio = 0.2;
    p.sampling.boundary = {{"wall", 256}, {"symmetry", 512}, {"interface", 256}};
    p.epochs = 12500;
    return p;
}

ModelPreset dd_param() {
    ModelPreset p = dd();
    p.id = "dd-param";
    p.description = "omega-parameterized decomposed model, soft coupling";
    p.param = ParamSpace{};
    p.weights = LossWeights({{"momentum_r.inner", 1e3},
                             {"momentum_phi.inner", 1e0},
                             {"momentum_r.outer", 1e7},
                             {"momentum_phi.outer", 1e8},
                             {"mass.outer", 1e3},
                             {"coupling.v_r", 1e7},
                             {"coupling.v_phi", 1e9},
                             {"coupling.dr_v_phi", 1e8},
                             {"coupling.p", 1e3},
                             {"wall.v_r", 1e2},
                             {"wall.v_phi", 1e4},
                             {"symmetry.v_r", 1e0},
                             {"symmetry.v_phi", 1e0},
                             {"symmetry.p", 1e2}});
    p.sampling.r_inter = 0.075;
    p.sampling.inner_outer_ratio = 2.3;
    p.sampling.inner_full_angle = true;
    p.epochs = 30000;
    return p;
}

json geometry_json(const GeometryConfig& g) {
    return {{"r_stirrer", g.r_stirrer}, {"r_baffle", g.r_baffle},         {"r_reactor", g.r_reactor},
            {"t_baffle", g.t_baffle},   {"blade_angles", g.blade_angles}, {"baffle_angles", g.baffle_angles},
            {"annulus", g.annulus}};
}

} // namespace

std::string bc_mode_name(BcMode m) {
    switch (m) {
    case BcMode::Weak: return "weak";
    case BcMode::Strong: return "strong";
    case BcMode::Hybrid: return "hybrid";
    }
    return "unknown";
}

BcMode bc_mode_from_name(const std::string& s) {
    for (BcMode m : {BcMode::Weak, BcMode::Strong, BcMode::Hybrid})
        if (bc_mode_name(m) == s) return m;
    throw ConfigError("unknown boundary mode '" + s + "'");
}

std::string coords_name(Coords c) { return c == Coords::Cartesian ? "cartesian" : "polar"; }

Coords coords_from_name(const std::string& s) {
    if (s == "cartesian") return Coords::Cartesian;
    if (s == "polar") return Coords::Polar;
    throw ConfigError("unknown coordinates '" + s + "'");
}

std::string layout_name(Layout l) {
    switch (l) {
    case Layout::Single: return "single";
    case Layout::InnerOuter: return "inner_outer";
    case Layout::InnerOuterSplit: return "inner_outer_split";
    case Layout::Overlap: return "overlap";
    }
    return "unknown";
}

Layout layout_from_name(const std::string& s) {
    for (Layout l : {Layout::Single, Layout::InnerOuter, Layout::InnerOuterSplit, Layout::Overlap})
        if (layout_name(l) == s) return l;
    throw ConfigError("unknown layout '" + s + "'");
}

void ParamSpace::validate() const {
    if (!(re_min > 0) || !(re_max > re_min)) throw ConfigError("parameter space needs 0 < re_min < re_max");
}

int SamplingPlan::boundary_count(const std::string& name) const {
    auto it = boundary.find(name);
    return it == boundary.end() ? 0 : it->second;
}

std::pair<double, double> ModelPreset::omega_range() const {
    if (!param) return {omega, omega};
    return {param->omega_min(fluid, geometry.r_stirrer), param->omega_max(fluid, geometry.r_stirrer)};
}

Partition ModelPreset::partition() const {
    Partition part;
    part.r_inter = sampling.r_inter;
    part.r_split = layout == Layout::InnerOuterSplit ? sampling.r_split : 0.0;
    part.phi_d = sampling.phi_d;
    part.overlap_width = layout == Layout::Overlap ? sampling.overlap_width : 0.0;
    return part;
}

void ModelPreset::validate() const {
    if (id.empty()) throw ConfigError("preset id must not be empty");
    geometry.validate();
    fluid.validate();
    lifting.validate();
    if (!(omega > 0) || !std::isfinite(omega)) throw ConfigError("omega must be positive");
    if (param) param->validate();
    if (epochs < 0) throw ConfigError("epochs must be >= 0");
    if (!(reg_l1 >= 0) || !(reg_l2 >= 0)) throw ConfigError("regularization factors must be >= 0");
    if (sampling.domain_points < 1) throw ConfigError("domain_points must be >= 1");
    if (sampling.resample_every < 1) throw ConfigError("resample_every must be >= 1");
    for (const auto& [k, v] : sampling.boundary) {
        if (v < 0) throw ConfigError("boundary count for '" + k + "' must be >= 0");
        if (k != "stirrer") boundary_from_name(k);
    }
    if (optimizer.history < 1) throw ConfigError("optimizer history must be >= 1");

    const bool single = layout == Layout::Single;
    if (single) {
        if (!networks.count("main") || networks.size() != 1) throw ConfigError("single-network preset needs 'main'");
        if (coords == Coords::Polar && bc != BcMode::Weak)
            throw ConfigError("single polar presets support weak boundary conditions only");
        if (coords == Coords::Cartesian && symmetric) throw ConfigError("Cartesian presets cannot be symmetric");
    } else {
        if (coords != Coords::Polar) throw ConfigError("decomposed presets use polar coordinates");
        if (!networks.count("inner") || !networks.count("outer") || networks.size() != 2)
            throw ConfigError("decomposed presets need 'inner' and 'outer' networks");
        if (!(sampling.r_inter > geometry.r_stirrer && sampling.r_inter < geometry.r_baffle))
            throw ConfigError("r_inter must lie between the stirrer and the baffles");
        if (!(sampling.inner_outer_ratio > 0)) throw ConfigError("inner_outer_ratio must be positive");
        if (!symmetric) throw ConfigError("decomposed presets use the symmetric sector");
        if (geometry.annulus) throw ConfigError("decomposed presets need the baffled tank");
    }
    if (layout == Layout::InnerOuterSplit &&
        !(sampling.r_split > geometry.r_baffle && sampling.r_split < geometry.r_reactor))
        throw ConfigError("r_split must lie between the baffle tips and the wall");
    if (layout == Layout::Overlap) {
        if (!(sampling.overlap_width > 0)) throw ConfigError("overlap_width must be positive");
        if (sampling.overlap_points < 1) throw ConfigError("overlap_points must be >= 1");
        if (!(sampling.r_inter - 0.5 * sampling.overlap_width > geometry.r_stirrer))
            throw ConfigError("overlap band reaches the stirrer");
    }
    if (lifting.wall_scaled && bc != BcMode::Strong) throw ConfigError("wall-scaled lifting is for strong presets");
    for (const auto& [name, spec] : networks) {
        if (spec.hidden.empty()) throw ConfigError("network '" + name + "' needs hidden layers");
        for (int w : spec.hidden)
            if (w < 1) throw ConfigError("network '" + name + "' has an empty layer");
    }
}

std::vector<std::string> preset_ids() {
    return {"baseline", "baseline-data", "baseline-scaled", "baseline-polar", "strong-bc",
            "hybrid-bc", "dd",            "dd-split",        "dd-param",       "dd-param-overlap"};
}

std::vector<std::string> benchmark_preset_ids() { return {"couette"}; }

ModelPreset builtin_preset(const std::string& id) {
    if (id == "baseline") return baseline();
    if (id == "baseline-data") {
        ModelPreset p = baseline();
        p.id = id;
        p.description = "Cartesian PINN with labeled reference data";
        p.weights.set("data", 1.0);
        p.sampling.data_points = 2000;
        return p;
    }
    if (id == "baseline-scaled") {
        ModelPreset p = baseline();
        p.id = id;
        p.description = "Cartesian PINN with scaled loss terms";
        p.weights = LossWeights({{"momentum_x", 50}, {"momentum_y", 50}, {"mass", 50}, {"wall", 5}, {"impeller", 1}});
        return p;
    }
    if (id == "baseline-polar") {
        ModelPreset p = baseline();
        p.id = id;
        p.description = "polar PINN on the symmetric sector";
        p.coords = Coords::Polar;
        p.symmetric = true;
        p.weights = LossWeights({{"momentum_r", 1e6},
                                 {"momentum_phi", 1e6},
                                 {"mass", 1e0},
                                 {"wall.v_r", 1e1},
                                 {"wall.v_phi", 1e1},
                                 {"impeller.v_r", 5e0},
                                 {"impeller.v_phi", 5e0},
                                 {"symmetry.v_r", 1e2},
                                 {"symmetry.v_phi", 1e2},
                                 {"symmetry.p", 1e0}});
        p.epochs = 12500;
        p.sampling.domain_points = 4096;
        p.sampling.boundary = {{"stirrer", 512}, {"wall", 512}, {"symmetry", 1024}};
        return p;
    }
    if (id == "strong-bc" || id == "hybrid-bc") {
        ModelPreset p = baseline();
        p.id = id;
        p.weights = LossWeights({{"momentum_x", 1}, {"momentum_y", 1}, {"mass", 1}});
        p.sampling.boundary.clear();
        if (id == "strong-bc") {
            p.description = "Cartesian PINN with strong stirrer and wall conditions";
            p.bc = BcMode::Strong;
            p.lifting.wall_scaled = true;
        } else {
            p.description = "Cartesian PINN with strong stirrer and weak wall conditions";
            p.bc = BcMode::Hybrid;
            p.weights.set("wall", 1.0);
            p.sampling.boundary = {{"wall", 1024}};
        }
        return p;
    }
    if (id == "dd") return dd();
    if (id == "dd-split") {
        ModelPreset p = dd();
        p.id = id;
        p.description = "decomposed model with the outer region split at the baffle tips";
        p.layout = Layout::InnerOuterSplit;
        p.weights = LossWeights({{"momentum_r.inner", 1e11},
                                 {"momentum_phi.inner", 1e8},
                                 {"momentum_r.outer", 4e16},
                                 {"momentum_phi.outer", 4e16},
                                 {"mass.outer", 4e10},
                                 {"coupling.v_r", 1e0},
                                 {"coupling.v_phi", 1e14},
                                 {"coupling.dr_v_phi", 1e8},
                                 {"coupling.p", 1e6},
                                 {"wall.v_r", 1e14},
                                 {"wall.v_phi", 1e15},
                                 {"symmetry.v_r", 1e0},
                                 {"symmetry.v_phi", 1e10},
                                 {"symmetry.p", 1e5},
                                 {"baffle", 1e14},
                                 {"continuity", 1e13},
                                 {"derivative", 1e8}});
        p.sampling.r_inter = 0.08;
        p.sampling.r_split = 0.0851;
        p.sampling.phi_d = 0.3;
        p.sampling.boundary = {{"wall", 528},      {"symmetry", 512},   {"interface", 256},
                               {"continuity", 256}, {"derivative", 256}, {"baffle", 512}};
        return p;
    }
    if (id == "dd-param") return dd_param();
    if (id == "dd-param-overlap") {
        ModelPreset p = dd_param();
        p.id = id;
        p.description = "omega-parameterized decomposed model with a blended overlap band";
        p.layout = Layout::Overlap;
        p.weights = LossWeights({{"momentum_r.inner", 1e5},
                                 {"momentum_phi.inner", 1e0},
                                 {"momentum_r.outer", 1e9},
                                 {"momentum_phi.outer", 1e9},
                                 {"mass.outer", 1e4},
                                 {"coupling.v_r", 1e7},
                                 {"wall.v_r", 1e4},
                                 {"wall.v_phi", 1e4},
                                 {"symmetry.v_r", 1e0},
                                 {"symmetry.v_phi", 1e0},
                                 {"symmetry.p", 1e2}});
        p.sampling.inner_outer_ratio = 0.125;
        p.sampling.overlap_points = 1536;
        p.sampling.overlap_width = 0.01;
        return p;
    }
    if (id == "couette") {
        ModelPreset p = baseline();
        p.id = id;
        p.description = "Cartesian PINN on the baffle-free annulus (Couette benchmark)";
        p.geometry = GeometryConfig::annulus_benchmark();
        p.lifting.r_stirrer = p.geometry.r_stirrer;
        p.networks = {{"main", hidden(64)}};
        p.weights = LossWeights({{"momentum_x", 1}, {"momentum_y", 1}, {"mass", 1e2}, {"wall", 1e3}, {"impeller", 1e3}});
        p.epochs = 5000;
        return p;
    }
    throw ConfigError("unknown preset '" + id + "'");
}

ordered_json preset_to_json(const ModelPreset& p) {
    ordered_json j;
    j["id"] = p.id;
    j["description"] = p.description;
    j["coordinates"] = coords_name(p.coords);
    j["bc"] = bc_mode_name(p.bc);
    j["layout"] = layout_name(p.layout);
    j["symmetric"] = p.symmetric;
    j["geometry"] = geometry_json(p.geometry);
    j["fluid"] = {{"rho", p.fluid.rho}, {"mu", p.fluid.mu}};
    j["omega"] = p.omega;
    j["lifting"] = {{"r_star", p.lifting.r_star}, {"mu_spline", p.lifting.mu}, {"wall_scaled", p.lifting.wall_scaled}};
    ordered_json nets = ordered_json::object();
    for (const auto& [name, spec] : p.networks)
        nets[name] = {{"hidden", spec.hidden}, {"activation", activation_name(spec.activation)}};
    j["networks"] = nets;
    ordered_json w = ordered_json::object();
    for (const auto& [k, v] : p.weights.table()) w[k] = v;
    j["weights"] = w;
    const SamplingPlan& s = p.sampling;
    ordered_json b = ordered_json::object();
    for (const auto& [k, v] : s.boundary) b[k] = v;
    j["sampling"] = {{"domain_points", s.domain_points},
                     {"resample_every", s.resample_every},
                     {"boundary", b},
                     {"r_inter", s.r_inter},
                     {"inner_outer_ratio", s.inner_outer_ratio},
                     {"overlap_points", s.overlap_points},
                     {"overlap_width", s.overlap_width},
                     {"data_points", s.data_points},
                     {"r_split", s.r_split},
                     {"phi_d", s.phi_d},
                     {"inner_full_angle", s.inner_full_angle},
                     {"fixed_boundary", s.fixed_boundary}};
    j["epochs"] = p.epochs;
    j["seed"] = p.seed;
    j["regularization"] = {{"l1", p.reg_l1}, {"l2", p.reg_l2}};
    j["labeled_set"] = p.labeled_set;
    if (p.param)
        j["param_space"] = {{"re_min", p.param->re_min}, {"re_max", p.param->re_max}};
    else
        j["param_space"] = nullptr;
    j["scaling"] = {{"v_r_ref", p.v_r_ref}, {"split_scale", p.split_scale}};
    j["optimizer"] = {{"name", "lbfgs"},
                      {"history", p.optimizer.history},
                      {"gtol", p.optimizer.gtol},
                      {"ftol", p.optimizer.ftol}};
    return j;
}

ModelPreset preset_from_json(const json& j) {
    check_keys(j,
               {"base", "id", "description", "coordinates", "bc", "layout", "symmetric", "geometry", "fluid", "omega",
                "lifting", "networks", "weights", "sampling", "epochs", "seed", "regularization", "labeled_set",
                "param_space", "scaling", "optimizer"},
               "preset");
    ModelPreset p = j.contains("base") ? builtin_preset(j.at("base").get<std::string>()) : base_preset();
    const std::string w = "preset";
    read(j, "id", p.id, w);
    read(j, "description", p.description, w);
    if (j.contains("coordinates")) p.coords = coords_from_name(j.at("coordinates").get<std::string>());
    if (j.contains("bc")) p.bc = bc_mode_from_name(j.at("bc").get<std::string>());
    if (j.contains("layout")) p.layout = layout_from_name(j.at("layout").get<std::string>());
    read(j, "symmetric", p.symmetric, w);
    if (j.contains("geometry")) {
        const json& g = j.at("geometry");
        check_keys(g, {"preset", "r_stirrer", "r_baffle", "r_reactor", "t_baffle", "blade_angles", "baffle_angles", "annulus"},
                   "geometry");
        if (g.contains("preset")) {
            const auto name = g.at("preset").get<std::string>();
            if (name == "annulus") p.geometry = GeometryConfig::annulus_benchmark();
            else if (name == "stirred_tank") p.geometry = GeometryConfig::stirred_tank();
            else throw ConfigError("unknown geometry preset '" + name + "'");
        }
        read(g, "r_stirrer", p.geometry.r_stirrer, "geometry");
        read(g, "r_baffle", p.geometry.r_baffle, "geometry");
        read(g, "r_reactor", p.geometry.r_reactor, "geometry");
        read(g, "t_baffle", p.geometry.t_baffle, "geometry");
        read(g, "blade_angles", p.geometry.blade_angles, "geometry");
        read(g, "baffle_angles", p.geometry.baffle_angles, "geometry");
        read(g, "annulus", p.geometry.annulus, "geometry");
    }
    p.lifting.r_stirrer = p.geometry.r_stirrer;
    if (j.contains("fluid")) {
        check_keys(j.at("fluid"), {"rho", "mu"}, "fluid");
        read(j.at("fluid"), "rho", p.fluid.rho, "fluid");
        read(j.at("fluid"), "mu", p.fluid.mu, "fluid");
    }
    read(j, "omega", p.omega, w);
    if (j.contains("lifting")) {
        const json& l = j.at("lifting");
        check_keys(l, {"r_star", "mu_spline", "wall_scaled"}, "lifting");
        read(l, "r_star", p.lifting.r_star, "lifting");
        read(l, "mu_spline", p.lifting.mu, "lifting");
        read(l, "wall_scaled", p.lifting.wall_scaled, "lifting");
    }
    if (j.contains("networks")) {
        p.networks.clear();
        for (auto it = j.at("networks").begin(); it != j.at("networks").end(); ++it) {
            check_keys(it.value(), {"hidden", "activation"}, "network '" + it.key() + "'");
            NetworkSpec s = hidden(1);
            read(it.value(), "hidden", s.hidden, "network");
            if (it.value().contains("activation"))
                s.activation = activation_from_name(it.value().at("activation").get<std::string>());
            p.networks[it.key()] = s;
        }
    }
    if (j.contains("weights")) {
        std::map<std::string, double> m;
        read(j, "weights", m, w);
        p.weights = LossWeights(m);
    }
    if (j.contains("sampling")) {
        const json& s = j.at("sampling");
        check_keys(s,
                   {"domain_points", "resample_every", "boundary", "r_inter", "inner_outer_ratio", "overlap_points",
                    "overlap_width", "data_points", "r_split", "phi_d", "inner_full_angle", "fixed_boundary"},
                   "sampling");
        SamplingPlan& sp = p.sampling;
        read(s, "domain_points", sp.domain_points, "sampling");
        read(s, "resample_every", sp.resample_every, "sampling");
        read(s, "boundary", sp.boundary, "sampling");
        read(s, "r_inter", sp.r_inter, "sampling");
        read(s, "inner_outer_ratio", sp.inner_outer_ratio, "sampling");
        read(s, "overlap_points", sp.overlap_points, "sampling");
        read(s, "overlap_width", sp.overlap_width, "sampling");
        read(s, "data_points", sp.data_points, "sampling");
        read(s, "r_split", sp.r_split, "sampling");
        read(s, "phi_d", sp.phi_d, "sampling");
        read(s, "inner_full_angle", sp.inner_full_angle, "sampling");
        read(s, "fixed_boundary", sp.fixed_boundary, "sampling");
    }
    read(j, "epochs", p.epochs, w);
    read(j, "seed", p.seed, w);
    if (j.contains("regularization")) {
        check_keys(j.at("regularization"), {"l1", "l2"}, "regularization");
        read(j.at("regularization"), "l1", p.reg_l1, "regularization");
        read(j.at("regularization"), "l2", p.reg_l2, "regularization");
    }
    read(j, "labeled_set", p.labeled_set, w);
    if (j.contains("param_space")) {
        if (j.at("param_space").is_null()) {
            p.param.reset();
        } else {
            check_keys(j.at("param_space"), {"re_min", "re_max"}, "param_space");
            ParamSpace ps = p.param.value_or(ParamSpace{});
            read(j.at("param_space"), "re_min", ps.re_min, "param_space");
            read(j.at("param_space"), "re_max", ps.re_max, "param_space");
            p.param = ps;
        }
    }
    if (j.contains("scaling")) {
        check_keys(j.at("scaling"), {"v_r_ref", "split_scale"}, "scaling");
        read(j.at("scaling"), "v_r_ref", p.v_r_ref, "scaling");
        read(j.at("scaling"), "split_scale", p.split_scale, "scaling");
    }
    if (j.contains("optimizer")) {
        const json& o = j.at("optimizer");
        check_keys(o, {"name", "history", "gtol", "ftol"}, "optimizer");
        if (o.contains("name") && o.at("name") != "lbfgs") throw ConfigError("only the lbfgs optimizer is available");
        read(o, "history", p.optimizer.history, "optimizer");
        read(o, "gtol", p.optimizer.gtol, "optimizer");
        read(o, "ftol", p.optimizer.ftol, "optimizer");
    }
    p.validate();
    return p;
}

void apply_override(ordered_json& j, const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos || eq == 0) throw ConfigError("override must look like key=value: " + assignment);
    const std::string path = assignment.substr(0, eq), text = assignment.substr(eq + 1);
    ordered_json value = ordered_json::parse(text, nullptr, false);
    if (value.is_discarded()) value = text;
    ordered_json* node = &j;
    std::size_t start = 0;
    while (true) {
        // dotted keys such as weights."wall.v_r"
        if (node->is_object() && node->contains(path.substr(start))) {
            (*node)[path.substr(start)] = value;
            return;
        }
        const auto dot = path.find('.', start);
        const std::string key = path.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
        if (key.empty()) throw ConfigError("bad override path '" + path + "'");
        if (dot == std::string::npos) {
            (*node)[key] = value;
            return;
        }
        if (!node->contains(key) || (*node)[key].is_null()) (*node)[key] = ordered_json::object();
        node = &(*node)[key];
        if (!node->is_object()) throw ConfigError("override path '" + path + "' crosses a non-object");
        start = dot + 1;
    }
}

ModelPreset load_preset_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open preset file '" + path + "'");
    const json j = json::parse(in, nullptr, false);
    if (j.is_discarded()) throw ConfigError("preset file '" + path + "' is not valid JSON");
    return preset_from_json(j);
}

} // namespace tankflow
