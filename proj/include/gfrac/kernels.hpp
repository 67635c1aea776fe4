#ifndef GFRAC_KERNELS_HPP
#define GFRAC_KERNELS_HPP

#include <complex>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace gfrac {

using cplx = std::complex<double>;

enum class KernelFamily {
    Caputo,          // k(t) = t^{-beta}/Gamma(1-beta)
    TruncatedStable, // k(t) = (t^{-beta} - delta^{-beta})/Gamma(1-beta) on (0,delta]
    DistributedOrder,// k(t) = int_0^1 t^{beta-1}/Gamma(beta) dbeta
    ExpWeighted,     // k(t) = t^{-beta} e^{-lambda t}/Gamma(1-beta)
    GammaSub,        // k(t) = a Gamma(0, b t)
    MultiTerm,       // k(t) = sum_j a_j t^{-beta_j}/Gamma(1-beta_j)
    Classical,       // limit kernel with symbol psi(lambda) = lambda (first derivative)
    Custom
};

std::string family_name(KernelFamily f);

/// A memory kernel together with everything the discretizations need:
/// pointwise values, the exact primitive K = int_0^t k (singular integrals
/// always go through K, never through sampling k at 0), the Laplace transform
/// on Re(lambda) > 0, and the Sonine conjugate where a closed form exists.
struct KernelSpec {
    KernelFamily family = KernelFamily::Custom;
    std::string id;
    std::map<std::string, double> params;

    std::function<double(double)> k_eval;      // t > 0
    std::function<double(double)> k_primitive; // K(t), t >= 0, K(0)=0
    std::function<cplx(cplx)> laplace_k;       // Re(lambda) > 0

    // optional pieces (empty std::function when unavailable)
    std::function<double(double)> k_deriv;
    std::function<double(double)> k_tilde_eval;
    std::function<double(double)> k_tilde_primitive;
    std::function<double(double)> k_tilde_deriv;
    std::function<cplx(cplx)> laplace_k_tilde;

    bool singular_at_zero = true;

    bool has_closed_conjugate() const { return static_cast<bool>(k_tilde_eval); }
};

// ---- construction ---------------------------------------------------------

KernelSpec make_caputo(double beta);
KernelSpec make_truncated_stable(double beta, double delta_trunc);
KernelSpec make_distributed_order();
KernelSpec make_exp_weighted(double beta, double lambda_w);
KernelSpec make_gamma_sub(double a, double b);
KernelSpec make_multi_term(const std::vector<std::pair<double, double>>& terms);
KernelSpec make_classical();

/// Custom kernel from analytic callables. Pass the primitive when known;
/// otherwise it is built by adaptive quadrature (valid for bounded k only).
KernelSpec make_custom(std::function<double(double)> k,
                       std::function<double(double)> primitive = {},
                       bool singular_at_zero = false,
                       std::string id = "custom");

/// Custom kernel from samples (t_i, k_i), t_i strictly increasing, t_0 > 0.
/// Piecewise-linear in between, constant left of t_0, zero right of t_last.
KernelSpec make_custom_samples(const std::vector<double>& t,
                               const std::vector<double>& k,
                               std::string id = "custom");

/// Catalogue dispatcher: family id string plus parameter map, as used by the
/// config files ("caputo" + {beta:0.5}, "multi_term" + {alpha:.., beta:..}).
KernelSpec make_kernel(const std::string& family, const std::map<std::string, double>& params);

/// The six-family catalogue with default parameters, plus the classical limit;
/// used by the verification sweeps.
std::vector<KernelSpec> standard_catalogue();

// ---- symbol ---------------------------------------------------------------

/// Bernstein symbol psi^k(lambda) = lambda * (Lk)(lambda), the Laplace-domain
/// multiplier of the memory derivative; psi(0) = 0. Requires Re(lambda) >= 0.
cplx psi(const KernelSpec& kernel, cplx lambda);
double psi(const KernelSpec& kernel, double lambda);

/// Levy tail M^k((s,inf)) = k(s), s > 0.
double levy_tail(const KernelSpec& kernel, double s);

// ---- Sonine conjugate -----------------------------------------------------

enum class SonineMethod { ClosedForm, NumericVolterra };

struct SonineReport {
    std::vector<double> grid;     // strictly increasing times
    std::vector<double> residual; // |(ktilde * k)(t) - 1|
    double max_residual = 0.0;
    SonineMethod method = SonineMethod::ClosedForm;
};

/// One locally integrable factor of a convolution, with the exact primitive
/// and the derivative away from 0.
struct SingularFactor {
    std::function<double(double)> eval;
    std::function<double(double)> primitive;
    std::function<double(double)> deriv;
};

/// (a * b)(t) = int_0^t a(t-s) b(s) ds for factors with integrable endpoint
/// singularities, via the symmetric integration-by-parts form
///   a(t/2)B(t/2) + b(t/2)A(t/2) + int_0^{t/2} [a'(t-s)B(s) + b'(t-s)A(s)] ds,
/// whose integrand is bounded (A, B the primitives).
double convolve_singular(const SingularFactor& a, const SingularFactor& b, double t);

/// Sonine convolution (ktilde * k)(t) for kernels with a closed-form
/// conjugate; both endpoint singularities are integrated exactly through the
/// primitives.
double sonine_convolution(const KernelSpec& kernel, double t);

/// Conjugate kernel on a uniform grid with step tau, N cells.
/// Closed form: returns ktilde(t_j), j=1..N, residual certified on a
/// log-thinned subset of the nodes. Numeric: piecewise-constant collocation of
/// the first-kind Volterra equation int_0^t ktilde(s) k(t-s) ds = 1 with exact
/// kernel cell integrals (lower-triangular forward substitution); the report
/// carries the recomputed collocation residual.
std::pair<std::vector<double>, SonineReport>
sonine_conjugate(const KernelSpec& kernel, double tau, std::size_t n,
                 double residual_tol = 1e-6);

/// Laplace transform of a piecewise-constant cell function (cells of width tau
/// starting at 0), exact per cell.
cplx laplace_of_cells(const std::vector<double>& cells, double tau, cplx lambda);

// ---- condition (k) verification -------------------------------------------

struct ConditionRecord {
    std::string condition;
    bool pass = false;
    double worst_point = 0.0;
    double worst_value = 0.0;
};

struct KernelConditionsReport {
    std::vector<ConditionRecord> records;
    bool singular_at_zero = false;
    bool all_pass() const;
};

/// Sampled verification of condition (k): nonnegativity, monotonicity,
/// vanishing at infinity, local integrability. Report-only.
KernelConditionsReport verify_kernel_conditions(const KernelSpec& kernel,
                                                const std::vector<double>& grid,
                                                double tol = 1e-12);

/// Log-spaced default grid covering several decades.
std::vector<double> log_grid(double t_min, double t_max, std::size_t n);

} // namespace gfrac

#endif
