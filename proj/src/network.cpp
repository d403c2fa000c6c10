#include "tankflow/network.hpp"

#include "tankflow/errors.hpp"
#include "tankflow/jet.hpp"
#include "tankflow/rng.hpp"

#include <cmath>

namespace tankflow {

namespace {

using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

auto block(JetMatrix& m, int c, int n) { return m.middleCols(static_cast<Eigen::Index>(c) * n, n).array(); }
auto block(const JetMatrix& m, int c, int n) { return m.middleCols(static_cast<Eigen::Index>(c) * n, n).array(); }

} // namespace

std::string activation_name(Activation a) { return a == Activation::Tanh ? "tanh" : "identity"; }

Activation activation_from_name(const std::string& name) {
    if (name == "tanh") return Activation::Tanh;
    if (name == "identity") return Activation::Identity;
    throw ConfigError("unknown activation '" + name + "'");
}

void NetworkSpec::validate() const {
    if (n_in < 1 || n_out < 1) throw ConfigError("network needs at least one input and one output");
    for (int w : hidden)
        if (w < 1) throw ConfigError("hidden layer width must be positive");
}

std::size_t NetworkSpec::param_count() const {
    std::size_t n = 0;
    int prev = n_in;
    for (int w : hidden) {
        n += static_cast<std::size_t>(w) * (prev + 1);
        prev = w;
    }
    return n + static_cast<std::size_t>(n_out) * (prev + 1);
}

Mlp::Mlp(NetworkSpec spec) : spec_(std::move(spec)) {
    spec_.validate();
    widths_.push_back(spec_.n_in);
    for (int w : spec_.hidden) widths_.push_back(w);
    widths_.push_back(spec_.n_out);
    std::size_t off = 0;
    for (int l = 0; l < n_layers(); ++l) {
        w_off_.push_back(off);
        off += static_cast<std::size_t>(widths_[l + 1]) * widths_[l];
        b_off_.push_back(off);
        off += static_cast<std::size_t>(widths_[l + 1]);
    }
    n_params_ = off;
}

void Mlp::init_glorot(double* params, std::uint64_t seed) const {
    Rng rng(seed);
    for (int l = 0; l < n_layers(); ++l) {
        const int fan_in = widths_[l], fan_out = widths_[l + 1];
        const double limit = std::sqrt(6.0 / (fan_in + fan_out));
        for (std::size_t k = 0; k < static_cast<std::size_t>(fan_in) * fan_out; ++k)
            params[w_off_[l] + k] = rng.uniform(-limit, limit);
        for (int k = 0; k < fan_out; ++k) params[b_off_[l] + k] = 0.0;
    }
}

void Mlp::forward(const double* params, const JetMatrix& input, int n, int order, Cache& cache) const {
    const int C = channels_for_order(order);
    if (input.rows() != spec_.n_in || input.cols() != static_cast<Eigen::Index>(C) * n)
        throw ConfigError("network input jet has wrong shape");
    const int L = n_layers();
    cache.n = n;
    cache.order = order;
    cache.act.resize(L);
    cache.pre.resize(L - 1);
    cache.act[0] = input;
    for (int l = 0; l < L; ++l) {
        const Eigen::Map<const RowMat> W(params + w_off_[l], widths_[l + 1], widths_[l]);
        const Eigen::Map<const Eigen::VectorXd> b(params + b_off_[l], widths_[l + 1]);
        JetMatrix& z = (l + 1 < L) ? cache.pre[l] : cache.out;
        z.noalias() = W * cache.act[l];
        z.leftCols(n).colwise() += b;
        if (l + 1 == L) break;
        JetMatrix& a = cache.act[l + 1];
        if (spec_.activation == Activation::Identity) {
            a = z;
            continue;
        }
        a.resize(z.rows(), z.cols());
        block(a, ch::v, n) = block(z, ch::v, n).tanh();
        if (order == 0) continue;
        const Eigen::ArrayXXd t = block(a, ch::v, n);
        const Eigen::ArrayXXd t1 = 1.0 - t.square();
        block(a, ch::a, n) = t1 * block(z, ch::a, n);
        block(a, ch::b, n) = t1 * block(z, ch::b, n);
        if (order < 2) continue;
        const Eigen::ArrayXXd t2 = -2.0 * t * t1;
        const auto za = block(z, ch::a, n);
        const auto zb = block(z, ch::b, n);
        block(a, ch::aa, n) = t1 * block(z, ch::aa, n) + t2 * za.square();
        block(a, ch::ab, n) = t1 * block(z, ch::ab, n) + t2 * za * zb;
        block(a, ch::bb, n) = t1 * block(z, ch::bb, n) + t2 * zb.square();
    }
}

void Mlp::backward(const double* params, const Cache& cache, const JetMatrix& out_adj, double* grad) const {
    const int n = cache.n, order = cache.order;
    const int L = n_layers();
    JetMatrix zbar = out_adj;
    for (int l = L - 1; l >= 0; --l) {
        const Eigen::Map<const RowMat> W(params + w_off_[l], widths_[l + 1], widths_[l]);
        Eigen::Map<RowMat> gW(grad + w_off_[l], widths_[l + 1], widths_[l]);
        Eigen::Map<Eigen::VectorXd> gb(grad + b_off_[l], widths_[l + 1]);
        gW.noalias() += zbar * cache.act[l].transpose();
        gb += zbar.leftCols(n).rowwise().sum();
        if (l == 0) break;

        JetMatrix abar = W.transpose() * zbar;
        if (spec_.activation == Activation::Identity) {
            zbar = std::move(abar);
            continue;
        }
        const JetMatrix& z = cache.pre[l - 1];
        const JetMatrix& a = cache.act[l];
        const Eigen::ArrayXXd t = block(a, ch::v, n);
        const Eigen::ArrayXXd t1 = 1.0 - t.square();
        zbar.resize(abar.rows(), abar.cols());
        if (order == 0) {
            block(zbar, ch::v, n) = t1 * block(abar, ch::v, n);
            continue;
        }
        const Eigen::ArrayXXd t2 = -2.0 * t * t1;
        const auto za = block(z, ch::a, n);
        const auto zb = block(z, ch::b, n);
        const auto Av = block(abar, ch::v, n);
        const auto Aa = block(abar, ch::a, n);
        const auto Ab = block(abar, ch::b, n);
        if (order == 1) {
            block(zbar, ch::a, n) = t1 * Aa;
            block(zbar, ch::b, n) = t1 * Ab;
            block(zbar, ch::v, n) = t1 * Av + t2 * (Aa * za + Ab * zb);
            continue;
        }
        const Eigen::ArrayXXd t3 = -2.0 * t1.square() - 2.0 * t * t2;
        const auto Aaa = block(abar, ch::aa, n);
        const auto Aab = block(abar, ch::ab, n);
        const auto Abb = block(abar, ch::bb, n);
        block(zbar, ch::aa, n) = t1 * Aaa;
        block(zbar, ch::ab, n) = t1 * Aab;
        block(zbar, ch::bb, n) = t1 * Abb;
        block(zbar, ch::a, n) = t1 * Aa + t2 * (2.0 * Aaa * za + Aab * zb);
        block(zbar, ch::b, n) = t1 * Ab + t2 * (Aab * za + 2.0 * Abb * zb);
        block(zbar, ch::v, n) =
            t1 * Av +
            t2 * (Aa * za + Ab * zb + Aaa * block(z, ch::aa, n) + Aab * block(z, ch::ab, n) +
                  Abb * block(z, ch::bb, n)) +
            t3 * (Aaa * za.square() + Aab * za * zb + Abb * zb.square());
    }
}

} // namespace tankflow
