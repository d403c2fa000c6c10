#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <string>
#include <vector>

namespace tankflow {

enum class Activation { Tanh, Identity };

std::string activation_name(Activation a);
Activation activation_from_name(const std::string& name);

struct NetworkSpec {
    int n_in = 2;
    std::vector<int> hidden{100, 100};
    int n_out = 3;
    Activation activation = Activation::Tanh;

    void validate() const;
    std::size_t param_count() const;
};

/// Jets are stored as (width x channels*n) matrices; column c*n + i holds channel c of point i.
using JetMatrix = Eigen::MatrixXd;

/// Fully connected network propagating value, gradient and Hessian jets in two coordinates.
/// Parameters are a flat vector: per layer the row-major weight matrix followed by the bias.
class Mlp {
public:
    Mlp() = default;
    explicit Mlp(NetworkSpec spec);

    const NetworkSpec& spec() const { return spec_; }
    std::size_t param_count() const { return n_params_; }
    int n_layers() const { return static_cast<int>(widths_.size()) - 1; }
    std::size_t weight_offset(int layer) const { return w_off_[static_cast<std::size_t>(layer)]; }
    std::size_t bias_offset(int layer) const { return b_off_[static_cast<std::size_t>(layer)]; }

    /// Glorot-uniform weights, zero biases.
    void init_glorot(double* params, std::uint64_t seed) const;

    struct Cache {
        int n = 0;
        int order = 0;
        std::vector<JetMatrix> act; ///< act[0] is the input jet, act[l] the output of hidden layer l
        std::vector<JetMatrix> pre; ///< pre-activations of hidden layers
        JetMatrix out;
    };

    /// Forward pass for n points at derivative order 0, 1 or 2.
    void forward(const double* params, const JetMatrix& input, int n, int order, Cache& cache) const;

    /// Accumulates d(sum adj . out)/d(params) into grad.
    void backward(const double* params, const Cache& cache, const JetMatrix& out_adj, double* grad) const;

private:
    NetworkSpec spec_;
    std::vector<int> widths_;
    std::vector<std::size_t> w_off_, b_off_;
    std::size_t n_params_ = 0;
};

} // namespace tankflow
