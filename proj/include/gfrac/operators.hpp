#ifndef GFRAC_OPERATORS_HPP
#define GFRAC_OPERATORS_HPP

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <cstdint>
#include <functional>
#include <string>

namespace gfrac {

/// Uniform box grid with homogeneous Dirichlet boundary, interior nodes only.
struct SpatialGrid {
    int dimension = 1; // 1 or 2
    int n = 2;         // interior points per axis
    double length = 1.0;

    double h() const { return length / (n + 1); }
    int size() const { return dimension == 1 ? n : n * n; }
    double cell_volume() const { return dimension == 1 ? h() : h() * h(); }
};

/// Discrete sine eigenbasis of the finite-difference Dirichlet Laplacian.
/// Eigenvalues lambda_i = (4/h^2) sin^2(i pi / (2(n+1))) per axis ((i pi/L)^2
/// in the mesh limit); eigenfunctions normalized to unit L^2(m) with the
/// cell-volume measure m.
class EigenBasis {
public:
    EigenBasis(const SpatialGrid& grid, double alpha_frac);

    const SpatialGrid& grid() const { return grid_; }
    double alpha_frac() const { return alpha_frac_; }

    /// Eigenvalue of -L_h for the flattened mode index (tensor sums in 2D).
    double eigenvalue(int flat_index) const;

    /// Coefficients m(x e_i) of a nodal vector in the unit-L^2(m) basis.
    Eigen::VectorXd to_coeff(const Eigen::VectorXd& x) const;
    Eigen::VectorXd from_coeff(const Eigen::VectorXd& c) const;

    /// Spectral application of (-L_h)^power.
    Eigen::VectorXd frac_apply(const Eigen::VectorXd& x, double power) const;

    /// H = D((-L_h)^{alpha/2})-dual inner product:
    /// <x,y> = sum_i lambda_i^{-alpha} m(x e_i) m(y e_i).
    double h_inner(const Eigen::VectorXd& x, const Eigen::VectorXd& y) const;

    /// Dense matrix of (-L_h)^power (used for Jacobians of spectral operators).
    Eigen::MatrixXd frac_matrix(double power) const;

private:
    SpatialGrid grid_;
    double alpha_frac_;
    Eigen::MatrixXd sine_;           // S_ij = sin(i j pi/(n+1)), 1-based modes
    std::vector<double> axis_lambda_;
};

/// Free-function form used by the validators.
double h_inner(const EigenBasis& basis, const Eigen::VectorXd& x, const Eigen::VectorXd& y);

enum class Pairing { L2Nodal, HminusOne };

struct HConstants {
    double alpha = 2.0; // growth exponent (> 1)
    double delta = 1.0; // coercivity
    double C1 = 0.0;    // weak-monotonicity defect
    double C2 = 0.0;
};

/// A discrete monotone operator A(t,.) together with the norms and pairing it
/// is monotone/coercive in. apply/jacobian are pure in (t, state) and safe to
/// share across threads.
struct OperatorModel {
    std::string id;
    int dim = 1;
    Pairing pairing = Pairing::L2Nodal;
    HConstants constants;

    std::function<Eigen::VectorXd(double, const Eigen::VectorXd&)> apply;
    std::function<Eigen::SparseMatrix<double>(double, const Eigen::VectorXd&)> jacobian;

    std::function<double(const Eigen::VectorXd&, const Eigen::VectorXd&)> inner_h;
    std::function<double(const Eigen::VectorXd&)> norm_v;
    // computable upper bound for the V*-norm of A(t,u); report-only use
    std::function<double(double, const Eigen::VectorXd&)> dual_norm_bound;
    std::function<double(double)> forcing_bound; // g(t) of (H3)/(H4), default 0

    double norm_h(const Eigen::VectorXd& x) const { return std::sqrt(inner_h(x, x)); }
};

/// Generalized porous medium operator A(u) = (-L_h)^{alpha_frac} Psi(u) - Phi(u)
/// with Psi(t,s) = psi_scale s|s|^{r-1}, Phi(t,s) = phi_scale s, r >= 1.
/// Monotone in the H = (-L_h)^{-alpha_frac/2}-weighted pairing.
OperatorModel porous_medium_operator(const SpatialGrid& grid, double r,
                                     double psi_scale = 1.0, double phi_scale = 0.0,
                                     double frac_power = 1.0);

/// Fast diffusion, 0 < r < 1: Psi_eps(s) = psi_scale s (s^2+eps^2)^{(r-1)/2};
/// eps_reg = 0 allowed (the degenerate slope at 0 is clamped).
OperatorModel fast_diffusion_operator(const SpatialGrid& grid, double r,
                                      double psi_scale = 1.0, double eps_reg = 1e-8,
                                      double frac_power = 1.0);

struct Reaction {
    std::function<double(double, double)> f;    // f(t,s)
    std::function<double(double, double)> dfds;
    double lipschitz = 0.0; // declared C1
};

/// p-Laplace operator A(u) = -div(|grad u|_eps^{p-2} grad u) - f(t,u) with
/// face-centered gradients; built as G^T W(G u) so nodal monotonicity is exact
/// for eps_reg = 0. Jacobian assembled analytically.
OperatorModel p_laplace_operator(const SpatialGrid& grid, double p,
                                 Reaction reaction = {}, double eps_reg = 1e-8);

/// Scalar operators used by relaxation and fixed-point scenarios (d = 1).
OperatorModel relaxation_operator(double lambda);
OperatorModel scalar_cubic_operator(double c1); // A(u) = u^3 - c1 u, C1 = c1

/// Scalar operator from callables (tests, custom scenarios).
OperatorModel scalar_operator(std::function<double(double, double)> a,
                              std::function<double(double, double)> da_du,
                              HConstants constants, std::string id);

// ---- (H1)-(H4) sampling validator ------------------------------------------

struct HConditionReport {
    bool h1_pass = false;
    double h1_final_modulus = 0.0;
    bool h2_pass = false;
    double h2_worst_quotient = 0.0; // min <A(x)-A(y),x-y>/||x-y||_H^2
    bool h3_pass = false;
    double h3_delta_emp = 0.0;
    bool h4_pass = false;
    double h4_constant = 0.0; // sup measured growth ratio
    bool all_pass() const { return h1_pass && h2_pass && h3_pass && h4_pass; }
};

HConditionReport validate_H_conditions(const OperatorModel& op, int samples,
                                       double tol = 1e-9, std::uint64_t seed = 0x5eed);

} // namespace gfrac

#endif
