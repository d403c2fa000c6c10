#pragma once

#include "tankflow/geometry.hpp"
#include "tankflow/liftfield.hpp"
#include "tankflow/model.hpp"
#include "tankflow/network.hpp"
#include "tankflow/physics.hpp"

#include "json.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace tankflow {

enum class BcMode { Weak, Strong, Hybrid };

std::string bc_mode_name(BcMode m);
BcMode bc_mode_from_name(const std::string& s);
std::string coords_name(Coords c);
Coords coords_from_name(const std::string& s);
std::string layout_name(Layout l);
Layout layout_from_name(const std::string& s);

struct ParamSpace {
    double re_min = 1000.0;
    double re_max = 10000.0;

    double omega_min(const FluidProps& f, double r_stirrer) const { return omega_for_reynolds(re_min, f, r_stirrer); }
    double omega_max(const FluidProps& f, double r_stirrer) const { return omega_for_reynolds(re_max, f, r_stirrer); }
    void validate() const;
};

struct SamplingPlan {
    int domain_points = 2048;
    int resample_every = 1000;
    /// Boundary counts keyed by boundary name (stirrer, wall, symmetry, interface, continuity, derivative, baffle).
    std::map<std::string, int> boundary;
    double r_inter = 0.0;
    /// Ratio of inner to outer domain points.
    double inner_outer_ratio = 0.0;
    int overlap_points = 0;
    double overlap_width = 0.0;
    int data_points = 0;
    double r_split = 0.0;
    double phi_d = 0.3;
    /// Inner points drawn over all angles instead of the ray phi = 0.
    bool inner_full_angle = false;
    bool fixed_boundary = true;

    int boundary_count(const std::string& name) const;
};

struct OptimizerSettings {
    int history = 50;
    double gtol = 1e-12;
    double ftol = 0.0;
};

struct ModelPreset {
    std::string id;
    std::string description;
    Coords coords = Coords::Cartesian;
    BcMode bc = BcMode::Weak;
    Layout layout = Layout::Single;
    bool symmetric = false;
    GeometryConfig geometry;
    FluidProps fluid;
    double omega = 0.625;
    LiftingConfig lifting;
    /// Hidden layer widths and activation per subnet (main, or inner and outer).
    std::map<std::string, NetworkSpec> networks;
    LossWeights weights;
    SamplingPlan sampling;
    int epochs = 25000;
    std::uint64_t seed = 0;
    double reg_l1 = 1e-9;
    double reg_l2 = 1e-9;
    std::string labeled_set;
    std::optional<ParamSpace> param;
    double v_r_ref = 8e-4;
    double split_scale = 1e-3;
    OptimizerSettings optimizer;

    void validate() const;
    bool parameterized() const { return param.has_value(); }
    /// Omega range used for sampling and the omega input map.
    std::pair<double, double> omega_range() const;
    Partition partition() const;
};

std::vector<std::string> preset_ids();
/// Extra presets for benchmarks (not part of the model family).
std::vector<std::string> benchmark_preset_ids();
/// One of the ten shipped presets; ConfigError for unknown ids.
ModelPreset builtin_preset(const std::string& id);

nlohmann::ordered_json preset_to_json(const ModelPreset& p);
/// Strict parse: unknown keys are rejected; absent keys keep the defaults of base (or of the named builtin).
ModelPreset preset_from_json(const nlohmann::json& j);
/// Apply "a.b.c=value" to a preset dump; value is parsed as JSON when possible.
void apply_override(nlohmann::ordered_json& j, const std::string& assignment);

ModelPreset load_preset_file(const std::string& path);

} // namespace tankflow
