#include "tankflow/physics.hpp"

#include "tankflow/errors.hpp"

#include <cmath>

namespace tankflow {

void FluidProps::validate() const {
    if (!(rho > 0) || !std::isfinite(rho)) throw ConfigError("density must be positive");
    if (!(mu > 0) || !std::isfinite(mu)) throw ConfigError("viscosity must be positive");
}

double reynolds(double omega, const FluidProps& fluid, double r_stirrer) {
    const double d = 2 * r_stirrer;
    return fluid.rho * omega * d * d / fluid.mu;
}

double omega_for_reynolds(double re, const FluidProps& fluid, double r_stirrer) {
    const double d = 2 * r_stirrer;
    return re * fluid.mu / (fluid.rho * d * d);
}

LossWeights::LossWeights(std::map<std::string, double> w) : w_(std::move(w)) {
    for (const auto& [k, v] : w_)
        if (!(v >= 0) || !std::isfinite(v)) throw ConfigError("loss weight '" + k + "' must be finite and >= 0");
}

void LossWeights::set(const std::string& key, double value) {
    if (!(value >= 0) || !std::isfinite(value)) throw ConfigError("loss weight '" + key + "' must be finite and >= 0");
    w_[key] = value;
}

std::string LossWeights::key_for(const std::string& id) const {
    std::string key = id;
    while (true) {
        if (w_.count(key)) return key;
        const auto dot = key.rfind('.');
        if (dot == std::string::npos) break;
        key = key.substr(0, dot);
    }
    throw ConfigError("no loss weight for residual '" + id + "'");
}

bool LossWeights::covers(const std::string& id) const {
    try {
        key_for(id);
        return true;
    } catch (const ConfigError&) {
        return false;
    }
}

double LossWeights::weight(const std::string& id) const { return w_.at(key_for(id)); }

const LossComponent* LossBreakdown::find(const std::string& id) const {
    for (const auto& c : components)
        if (c.id == id) return &c;
    return nullptr;
}

LossBreakdown assemble_loss(const std::vector<ResidualBatch>& batches, const LossWeights& weights,
                            const std::vector<double>& params, double l1, double l2) {
    LossBreakdown out;
    for (const auto& b : batches) {
        LossComponent c;
        c.id = b.id;
        c.weight = weights.weight(b.id);
        c.n = b.residuals.size();
        if (c.n == 0) {
            if (c.weight > 0) throw ConfigError("residual '" + b.id + "' has a weight but no points");
        } else {
            double s = 0.0;
            for (double r : b.residuals) s += r * r;
            c.mse = s / static_cast<double>(c.n);
        }
        out.weighted += c.weight * c.mse;
        out.components.push_back(c);
    }
    double a1 = 0.0, a2 = 0.0;
    for (double t : params) {
        a1 += std::abs(t);
        a2 += t * t;
    }
    out.reg_l1 = l1 * a1;
    out.reg_l2 = l2 * a2;
    out.total = out.weighted + out.reg_l1 + out.reg_l2;
    out.log_total = std::log(out.total + kLogEpsilon);
    return out;
}

} // namespace tankflow
