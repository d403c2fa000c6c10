#pragma once

#include "tankflow/evaluation.hpp"
#include "tankflow/presets.hpp"
#include "tankflow/problem.hpp"

#include <cstdint>
#include <vector>

namespace tankflow {

/// Subnets, scalings, ansatz fields and assembly rules of a preset.
Model build_model(const ModelPreset& preset);

/// Glorot initialization of every subnet; subnet k uses stream (seed, init, k).
std::vector<double> init_params(const Model& model, std::uint64_t seed);

/// Omegas for n collocation points: constant, or uniform over the parameter space.
std::vector<double> sample_omegas(const ModelPreset& preset, int n, std::uint64_t seed);

/// Problem whose batch factory draws the preset's collocation and boundary sets.
/// labeled is required when the preset has data points.
PinnProblem build_problem(const ModelPreset& preset, const Model& model, const ReferenceSolution* labeled = nullptr);

/// Inner and outer domain point counts for a decomposed preset.
std::pair<int, int> split_counts(int total, double ratio);

} // namespace tankflow
