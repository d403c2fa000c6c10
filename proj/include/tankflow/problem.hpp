#pragma once

#include "tankflow/model.hpp"
#include "tankflow/physics.hpp"

#include <functional>
#include <string>
#include <vector>

namespace tankflow {

enum class Kernel {
    Linear,      ///< differences of field channels and targets
    NsCartesian, ///< slots (v_x, v_y, p)
    NsPolar,     ///< slots (v_r, v_phi, p); aux row 0 = r
    InnerOde,    ///< slots (v_phi, p); aux row 0 = r
    Band,        ///< slots (inner v_phi, inner p, outer v_r, outer v_phi, outer p); aux rows r, g jet (6)
};

/// residual = f[a][ca] - f[b][cb] - aux[target]; b and target are optional (-1).
struct LinearTerm {
    std::string id;
    int a = 0;
    int ca = 0;
    int b = -1;
    int cb = 0;
    int target = -1;
};

/// One subnet evaluated on the group's points.
struct SubnetUse {
    int subnet = 0;
    int order = 0;
    Eigen::MatrixXd raw; ///< 3 x n native coordinates and omega
    JetMatrix H, G;      ///< ansatz jets (may be empty)
};

/// Residuals sharing one point set. Fields are all outputs of all uses, in order.
struct TermGroup {
    std::string name;
    Kernel kernel = Kernel::Linear;
    int n = 0;
    std::vector<SubnetUse> uses;
    std::vector<std::string> ids; ///< nonlinear kernels: one id per residual
    std::vector<int> slots;       ///< nonlinear kernels: field indices
    std::vector<LinearTerm> linear;
    Eigen::MatrixXd aux; ///< rows x n
};

/// Build a use of subnet s on points, including its ansatz jets.
SubnetUse make_use(const Model& model, int s, const std::vector<CartPoint>& pts, const std::vector<double>& omegas,
                   int order);

/// Residual ids produced by a group.
std::vector<std::string> group_ids(const TermGroup& g);

/// Weighted physics-informed objective over a set of term groups.
class PinnProblem {
public:
    using BatchFactory = std::function<std::vector<TermGroup>(int resample_index)>;

    PinnProblem(Model model, LossWeights weights, FluidProps fluid, double l1, double l2, BatchFactory factory);

    const Model& model() const { return model_; }
    const LossWeights& weights() const { return weights_; }
    const FluidProps& fluid() const { return fluid_; }
    std::size_t param_count() const { return model_.param_count(); }

    /// Draw the batch for resample index k.
    void resample(int k);
    void set_groups(std::vector<TermGroup> groups);
    const std::vector<TermGroup>& groups() const { return groups_; }

    /// Log-transformed objective; gradient written when grad is non-null.
    double objective(const std::vector<double>& theta, std::vector<double>* grad, LossBreakdown* breakdown = nullptr) const;

    /// Raw residual batches by id.
    std::vector<ResidualBatch> residuals(const std::vector<double>& theta) const;

private:
    void check_weights() const;

    Model model_;
    LossWeights weights_;
    FluidProps fluid_;
    double l1_, l2_;
    BatchFactory factory_;
    std::vector<TermGroup> groups_;
};

} // namespace tankflow
