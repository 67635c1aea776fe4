#ifndef GFRAC_SOLVER_HPP
#define GFRAC_SOLVER_HPP

#include "gfrac/kernels.hpp"
#include "gfrac/memory.hpp"
#include "gfrac/operators.hpp"

#include <Eigen/Dense>
#include <functional>
#include <optional>
#include <vector>

namespace gfrac {

enum class SolveStrategy { NewtonPerStep, WeightedFixedPoint };

struct NewtonOptions {
    int max_iter = 50;
    double abs_tol = 1e-11;
    double rel_tol = 1e-12;
    int max_halvings = 30; // Armijo damping

    bool operator==(const NewtonOptions&) const = default;
};

struct FixedPointOptions {
    double gamma = 1.0; // weight exponent of e^{-gamma t}; must satisfy psi(gamma) > 2 C1
    int max_sweeps = 60;
    double sweep_tol = 1e-10;

    bool operator==(const FixedPointOptions&) const = default;
};

struct SolveConfig {
    double tau = 0.01;
    std::size_t n_steps = 100;
    MemoryBackend backend = MemoryBackend::CQ_BackwardEuler;
    SolveStrategy strategy = SolveStrategy::NewtonPerStep;
    NewtonOptions newton;
    FixedPointOptions fixedpoint;
};

struct StepDiagnostics {
    double residual = 0.0; // dual-norm estimate |R|_H / w0 at acceptance
    int newton_iterations = 0;
    bool converged = true;
};

struct Trajectory {
    std::vector<double> times;                // t_0 .. t_N
    std::vector<Eigen::VectorXd> states;      // u_0 .. u_N
    std::vector<StepDiagnostics> diagnostics; // per step 1..N
    std::vector<double> norm_h;               // |u_n|_H
    std::vector<double> norm_v;               // |u_n|_V
    std::vector<double> energy;               // <A(t_n,u_n), u_n>
    std::size_t memory_ops = 0;               // accumulated memory-sum vector ops

    // residual of the integral form u = u0 - ktilde*(A u) + ktilde*f, when the
    // conjugate kernel is available in closed form, plus the quadrature
    // tolerance the residual is measured against
    std::optional<double> integral_residual;
    std::optional<double> integral_residual_tol;

    const Eigen::VectorXd& back() const { return states.back(); }
};

struct StepResult {
    Eigen::VectorXd u;
    double residual = 0.0;
    int iterations = 0;
    bool converged = true;
};

/// One implicit step: solves w0 (u_n - u0) + A(t_n, u_n) = f_n - sum_{j>=1} w_j (u_{n-j} - u0)
/// by damped Newton with the analytic Jacobian w0 I + dA. v_history holds the
/// shifted states v_j = u_j - u0 for j = 0..n-1 (v_0 = 0).
StepResult step(const MemoryScheme& scheme, const OperatorModel& op,
                const std::vector<Eigen::VectorXd>& v_history, const Eigen::VectorXd& u0,
                double t_n, const Eigen::VectorXd& f_n, const NewtonOptions& opts);

using Forcing = std::function<Eigen::VectorXd(double)>;

/// Full solve of d/dt(k*(u-u0)) + A(t,u) = f on [0, tau*N]. Dispatches on the
/// configured strategy; the weighted fixed point requires psi^k(gamma) > 2 C1.
Trajectory run(const KernelSpec& kernel, const OperatorModel& op, const Eigen::VectorXd& u0,
               const Forcing& forcing, const SolveConfig& cfg);

/// Smallest gamma with psi^k(gamma) >= 2 C1 (1 + 0.25), located by doubling
/// then bisection; gamma = 1 when C1 = 0. Throws NotAttainable when the symbol
/// is bounded below the target (sup estimate reported in the message).
double choose_gamma(const KernelSpec& kernel, double c1);

struct FixedPointResult {
    Trajectory trajectory;
    double rho_hat = 0.0; // largest observed ratio of successive weighted increments
    int sweeps = 0;
    std::vector<double> increments; // weighted increment per sweep
};

/// The proof-mechanics iteration g -> C1 u_g, where u_g solves
/// d/dt(k*(u-u0)) + A(t,u) + C1 u = g + f; contracts with factor
/// 2 C1/psi^k(gamma) in the e^{-gamma t}-weighted l2 norm.
FixedPointResult weighted_fixed_point(const KernelSpec& kernel, const OperatorModel& op,
                                      const Eigen::VectorXd& u0, const Forcing& forcing,
                                      const SolveConfig& cfg);

/// Weighted path distance (sum_n |x_n - y_n|_H^2 e^{-gamma t_n} tau)^{1/2}.
double weighted_path_distance(const Trajectory& a, const Trajectory& b,
                              const OperatorModel& op, double gamma);

} // namespace gfrac

#endif
