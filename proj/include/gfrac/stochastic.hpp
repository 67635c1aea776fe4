#ifndef GFRAC_STOCHASTIC_HPP
#define GFRAC_STOCHASTIC_HPP

#include "gfrac/kernels.hpp"
#include "gfrac/operators.hpp"
#include "gfrac/rng.hpp"
#include "gfrac/solver.hpp"

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <vector>

namespace gfrac {

/// Additive time-fractional noise data: the pair (k1,k2), the effective kernel
/// kappa = ktilde1 * k2 of the stochastic convolution, and the finite-rank
/// diffusion map B. kappa must be locally square integrable (condition on the
/// noise admissibility; for Caputo pairs this is gamma < beta + 1/2).
struct NoiseModel {
    KernelSpec k1, k2;
    std::function<double(double)> kappa_eval;      // kappa(t), t > 0
    std::function<double(double)> kappa_primitive; // int_0^t kappa, exact cells
    bool kappa_closed_form = false;

    std::function<Eigen::MatrixXd(double)> B; // d_state x d_noise
    int d_state = 1;
    int d_noise = 1;
    std::uint64_t master_seed = 0;
};

NoiseModel make_noise_model(const KernelSpec& k1, const KernelSpec& k2,
                            std::function<Eigen::MatrixXd(double)> B, int d_state,
                            int d_noise, std::uint64_t master_seed);

/// Effective kernel samples kappa(t_i), i = 1..n, t_i = i tau.
std::vector<double> effective_kernel(const KernelSpec& k1, const KernelSpec& k2,
                                     double tau, std::size_t n);

/// Exact cell averages kappa_bar_i = (1/tau) int_{t_{i-1}}^{t_i} kappa for
/// i = 1..n (midpoint values on the numeric fallback path).
std::vector<double> effective_kernel_cells(const NoiseModel& model, double tau,
                                           std::size_t n);

/// Discrete stochastic convolution F_n = sum_{j<n} kappa_bar_{n-j} B(t_j) xi_j sqrt(tau)
/// with iid standard normal xi_j derived from (seed, path_id, j); F_0 = 0.
std::vector<Eigen::VectorXd> sample_noise_path(const NoiseModel& model, double tau,
                                               std::size_t n, std::uint64_t path_id);

/// Exact variance of component c of F_n over the noise: tau sum_j kappa_bar^2 |row/col HS|.
double discrete_variance(const NoiseModel& model, double tau, std::size_t n);

struct EnsembleStats {
    std::vector<double> times;
    std::vector<Eigen::VectorXd> mean; // per node
    std::vector<Eigen::VectorXd> var;  // unbiased, per node
    std::vector<Eigen::VectorXd> se;   // standard error of the mean
    std::size_t n_paths = 0;
};

struct SpdeResult {
    EnsembleStats stats;
    std::vector<Trajectory> paths; // filled only when keep_paths
};

/// Pathwise solve of the shifted equation: for each path, u solves
/// d/dt(k1*(u - x0)) + A(t, u + F(t)) = 0 and X = u + F is reported.
/// Paths are independent tasks; `threads` <= 0 means hardware concurrency.
SpdeResult solve_spde(const KernelSpec& k1, const NoiseModel& noise, const OperatorModel& op,
                      const Eigen::VectorXd& x0, const SolveConfig& cfg, std::size_t n_paths,
                      int threads = 1, bool keep_paths = false);

} // namespace gfrac

#endif
