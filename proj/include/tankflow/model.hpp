#pragma once

#include "tankflow/geometry.hpp"
#include "tankflow/liftfield.hpp"
#include "tankflow/network.hpp"

#include <string>
#include <vector>

namespace tankflow {

/// Affine input feature: (scale * raw[source] + shift) / divisor. Sources 0 and 1 are the model
/// coordinates (x, y) or (r, phi); source 2 is omega and is never differentiated.
struct InputFeature {
    int source = 0;
    double scale = 1.0;
    double shift = 0.0;
    double divisor = 1.0;

    double value(double raw) const { return (scale * raw + shift) / divisor; }
    double slope() const { return scale / divisor; }
};

std::vector<InputFeature> cartesian_premap(const GeometryConfig& geo);
std::vector<InputFeature> polar_premap(const GeometryConfig& geo);
std::vector<InputFeature> dd_inner_premap(const GeometryConfig& geo, double r_inter);
std::vector<InputFeature> dd_outer_premap(const GeometryConfig& geo, double r_inter);
InputFeature omega_feature(double omega_min, double omega_max);

enum class PostMap { Cartesian, Polar, DdInner, DdOuter };

std::string postmap_name(PostMap p);
PostMap postmap_from_name(const std::string& name);

/// Output rescaling; all factors are functions of omega only.
struct OutputScaling {
    PostMap kind = PostMap::Cartesian;
    double r_stirrer = 0.04;
    double rho = 1000.0;
    double v_r_ref = 8e-4;
    double r_star = 0.0875;
    double r_inter = 0.07;
    bool omega_dependent_vr = false;
    /// Extra trailing output (split model) with a fixed absolute scale.
    bool split_output = false;
    double split_scale = 1e-3;

    int n_outputs() const;
    std::vector<double> scales(double omega) const;
};

/// Radial velocity scale of the parameterized models.
double v_norm_r_param(double omega);
/// Tangential velocity scale of the outer subdomain.
double v_norm_phi(double omega, double r_stirrer, double r_inter, double r_star);

/// Network plus input and output maps; selected outputs use u = h + g * (scaled output).
class Subnet {
public:
    Subnet() = default;
    Subnet(std::string name, NetworkSpec spec, std::vector<InputFeature> inputs, OutputScaling post,
           std::vector<int> ansatz_outputs, std::size_t offset);

    const std::string& name() const { return name_; }
    const Mlp& net() const { return net_; }
    std::size_t offset() const { return offset_; }
    std::size_t param_count() const { return net_.param_count(); }
    int n_outputs() const { return net_.spec().n_out; }
    const std::vector<int>& ansatz_outputs() const { return ansatz_; }
    const OutputScaling& post() const { return post_; }
    const std::vector<InputFeature>& inputs() const { return inputs_; }

    struct Eval {
        int n = 0;
        int order = 0;
        Mlp::Cache cache;
        Eigen::MatrixXd scales; ///< n_out x n
        JetMatrix out;          ///< n_out x C*n
    };

    /// raw: 3 x n (coordinate a, coordinate b, omega). H: one row per ansatz output; G: one row.
    void forward(const double* theta, const Eigen::MatrixXd& raw, int order, const JetMatrix* H,
                 const JetMatrix* G, Eval& ev) const;
    void backward(const double* theta, const Eval& ev, const JetMatrix& out_adj, const JetMatrix* G,
                  double* grad) const;

private:
    std::string name_;
    Mlp net_;
    std::vector<InputFeature> inputs_;
    OutputScaling post_;
    std::vector<int> ansatz_;
    std::size_t offset_ = 0;
};

enum class Coords { Cartesian, Polar };
enum class Layout { Single, InnerOuter, InnerOuterSplit, Overlap };

struct Velocity {
    double vx = 0.0;
    double vy = 0.0;
    double p = 0.0;
};

/// Assembly of one or more subnets into a field over the whole tank.
class Model {
public:
    Coords coords = Coords::Cartesian;
    Layout layout = Layout::Single;
    bool symmetric = false;
    /// Inner subnet evaluated on the ray phi = 0 regardless of angle.
    bool inner_axisymmetric = false;
    GeometryConfig geo;
    Partition part;
    double omega = 0.625;
    std::vector<Subnet> subnets;
    /// Ansatz fields: g for the strong-form outputs, lifting h, blend weight.
    DistanceField g_field;
    LiftingFunction lift;
    DistanceField overlap_field;

    std::size_t param_count() const;
    int subnet_index(const std::string& name) const;

    /// Native coordinates (x, y) or (r, phi) with phi taken from the point itself.
    Eigen::MatrixXd raw_coords(const std::vector<CartPoint>& pts, const std::vector<double>& omegas) const;

    /// Ansatz jets for subnet s at the given points, in native coordinates.
    void ansatz_jets(int s, const std::vector<CartPoint>& pts, const std::vector<double>& omegas, int order,
                     JetMatrix& H, JetMatrix& G) const;

    /// Output jets of subnet s with its ansatz applied.
    JetMatrix subnet_jets(const double* theta, int s, const std::vector<CartPoint>& pts,
                          const std::vector<double>& omegas, int order) const;

    /// Physical Cartesian velocity and pressure at arbitrary tank points.
    std::vector<Velocity> predict(const double* theta, const std::vector<CartPoint>& pts,
                                  const std::vector<double>& omegas) const;
    std::vector<Velocity> predict(const double* theta, const std::vector<CartPoint>& pts, double omega) const;
};

} // namespace tankflow
