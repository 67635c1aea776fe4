#ifndef GFRAC_MEMORY_HPP
#define GFRAC_MEMORY_HPP

#include "gfrac/kernels.hpp"

#include <Eigen/Dense>
#include <cstddef>
#include <vector>

namespace gfrac {

enum class MemoryBackend { CQ_BackwardEuler, ProductIntegration };

/// Discrete convolution weights realizing the memory derivative on a uniform
/// grid: d/dt(k*v)(t_n) ~ sum_{j=0}^{n} w_j v_{n-j}, valid for histories with
/// v_0 = 0 (the solver always steps v = u - u_0). Immutable and shareable.
struct MemoryScheme {
    MemoryBackend backend = MemoryBackend::CQ_BackwardEuler;
    double tau = 0.0;
    std::size_t n_steps = 0;      // N
    std::vector<double> weights;  // w_0 .. w_N

    double w0() const { return weights.front(); }
};

/// Backward-Euler convolution quadrature: weights are the Taylor coefficients
/// of psi^k((1-zeta)/tau), computed by evaluating the symbol on a scaled
/// circle of M >= 4N roots of unity and inverse FFT. The classical kernel
/// (affine symbol) gets its exact two-term expansion.
MemoryScheme cq_weights(const KernelSpec& kernel, double tau, std::size_t n);

/// Product integration (generalized L1): for v with v_0 = 0,
///   d/dt(k*v)(t_n) ~ sum_{j=1}^n (v_j - v_{j-1}) [K(t_{n-j+1}) - K(t_{n-j})]/tau,
/// stored in convolution form. Exact for v linear in t.
MemoryScheme pi_weights(const KernelSpec& kernel, double tau, std::size_t n);

/// Memory sum at the last entry of the history (v_0 .. v_n). O(n).
double apply_memory(const MemoryScheme& scheme, const std::vector<double>& history);
Eigen::VectorXd apply_memory(const MemoryScheme& scheme,
                             const std::vector<Eigen::VectorXd>& history);

/// Memory derivative at every node of a full scalar trajectory via one FFT
/// convolution; O(N log N).
std::vector<double> apply_memory_all(const MemoryScheme& scheme,
                                     const std::vector<double>& path);

} // namespace gfrac

#endif
