#pragma once

#include "tankflow/builder.hpp"
#include "tankflow/lbfgs.hpp"

#include <functional>
#include <string>
#include <vector>

namespace tankflow {

struct HistoryRow {
    int iteration = 0;
    LossBreakdown loss;
};

struct RunRecord {
    std::string preset_id;
    std::uint64_t seed = 0;
    std::vector<HistoryRow> history;
    double seconds = 0.0;
    std::vector<double> theta;
    std::string reason;
    int iterations = 0;
    int resample_events = 0;
};

struct TrainOptions {
    /// Replaces preset.epochs when non-negative.
    int epochs = -1;
    /// Labeled reference for presets with data terms.
    const ReferenceSolution* labeled = nullptr;
    /// Start from these parameters instead of a fresh initialization.
    std::vector<double> initial;
    /// Periodic checkpoint (0 = off); written to checkpoint_path.
    int checkpoint_every = 0;
    std::string checkpoint_path;
    /// Called after every recorded iteration; return false to stop.
    std::function<bool(const HistoryRow&)> progress;
};

/// L-BFGS over the preset's loss with resampling every sampling.resample_every iterations.
/// Throws NumericalError when the loss becomes non-finite.
RunRecord train(const ModelPreset& preset, const TrainOptions& opt = {});

/// Columns: iteration, one per loss component, reg_l1, reg_l2, total, log_total.
void write_history_csv(const std::string& path, const std::vector<HistoryRow>& history);

/// Checkpoint: one JSON header line (preset dump, parameter layout) followed by one value per line.
void save_checkpoint(const std::string& path, const ModelPreset& preset, const Model& model,
                     const std::vector<double>& theta);

struct Checkpoint {
    ModelPreset preset;
    std::vector<double> theta;
};

/// Validates the header against the rebuilt model. Throws LoadError.
Checkpoint load_checkpoint(const std::string& path);

struct SeedResult {
    std::uint64_t seed = 0;
    bool failed = false;
    std::string error;
    ErrorReport report;
    std::vector<ProfileRow> profile;
    double seconds = 0.0;
};

struct RobustnessSummary {
    std::vector<SeedResult> runs;
    int n_ok = 0;
    double mean_v_l1 = 0.0, std_v_l1 = 0.0;
    double mean_v_l2 = 0.0, std_v_l2 = 0.0;
    double mean_p_l1 = 0.0, std_p_l1 = 0.0;
    double mean_p_l2 = 0.0, std_p_l2 = 0.0;
};

struct RobustnessOptions {
    std::vector<std::uint64_t> seeds;
    TrainOptions train;
    int n_eval = 0;
    std::uint64_t eval_seed = 0;
    int profile_points = 101;
    /// Called when a seed finishes.
    std::function<void(const SeedResult&)> on_result;
};

/// Trains one model per seed and evaluates each against the reference (or its oracle for profiles).
/// Failed runs are recorded and left out of the statistics.
RobustnessSummary robustness_run(const ModelPreset& preset, const ReferenceSolution& ref, const Oracle& oracle,
                                 const RobustnessOptions& opt);

/// Keep freed work buffers mapped between iterations (glibc only; no-op elsewhere).
void tune_allocator();

} // namespace tankflow
