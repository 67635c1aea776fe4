#include "gfrac/memory.hpp"
#include "gfrac/errors.hpp"
#include "gfrac/fft.hpp"

#include <cmath>
#include <limits>

namespace gfrac {

namespace {

// one contour pass: weights from M samples of psi on the circle of radius rho
std::vector<double> cq_contour(const KernelSpec& kernel, double tau,
                               std::size_t n, std::size_t m_samples,
                               double* imag_max_out) {
    const std::size_t M = m_samples;
    const double rho = std::pow(std::numeric_limits<double>::epsilon(),
                                1.0 / (2.0 * static_cast<double>(M)));
    std::vector<cplx> f(M);
    for (std::size_t m = 0; m <= M / 2; ++m) {
        double theta = 2.0 * M_PI * static_cast<double>(m) / static_cast<double>(M);
        cplx zeta = rho * cplx(std::cos(theta), std::sin(theta));
        cplx lam = (1.0 - zeta) / tau;
        cplx val;
        try {
            val = psi(kernel, lam);
        } catch (const Error& e) {
            throw SymbolEvaluationFailure(std::string("cq_weights: symbol evaluation failed: ") +
                                          e.what());
        }
        f[m] = val;
        if (m != 0 && m != M / 2) f[M - m] = std::conj(val); // real kernel symmetry
    }
    fft(f, true); // (1/M) sum_m f_m e^{-2pi i jm/M}
    std::vector<double> w(n + 1);
    double imag_max = 0.0, rho_pow = 1.0;
    for (std::size_t j = 0; j <= n; ++j) {
        cplx wj = f[j] / rho_pow;
        w[j] = wj.real();
        imag_max = std::max(imag_max, std::fabs(wj.imag()));
        rho_pow *= rho;
    }
    if (imag_max_out) *imag_max_out = imag_max;
    return w;
}

} // namespace

MemoryScheme cq_weights(const KernelSpec& kernel, double tau, std::size_t n) {
    if (!(tau > 0.0) || n < 1)
        throw ParamOutOfRange("cq_weights: requires tau > 0 and n >= 1");
    MemoryScheme s;
    s.backend = MemoryBackend::CQ_BackwardEuler;
    s.tau = tau;
    s.n_steps = n;

    if (kernel.family == KernelFamily::Classical) {
        // psi(lambda) = lambda, so psi((1-zeta)/tau) = 1/tau - zeta/tau exactly
        s.weights.assign(n + 1, 0.0);
        s.weights[0] = 1.0 / tau;
        s.weights[1] = -1.0 / tau;
        return s;
    }

    const std::size_t M = next_pow2(std::max<std::size_t>(4 * (n + 1), 64));
    double imag_max = 0.0;
    s.weights = cq_contour(kernel, tau, n, M, &imag_max);
    if (imag_max > 1e-10 * std::fabs(s.weights[0]))
        throw SymbolEvaluationFailure("cq_weights: imaginary residue above 1e-10*|w0|");

    // contour-refinement consistency: doubling the sample count (which also
    // moves rho) must leave the weights unchanged to 1e-8 relative
    auto w2 = cq_contour(kernel, tau, n, 2 * M, nullptr);
    double scale = std::fabs(s.weights[0]);
    for (std::size_t j = 0; j <= n; ++j)
        if (std::fabs(s.weights[j] - w2[j]) > 1e-8 * scale)
            throw AliasingError("cq_weights: contour refinement changed weights beyond 1e-8");
    s.weights = std::move(w2); // keep the finer contour's values

    if (!(s.weights[0] > 0.0))
        throw SymbolEvaluationFailure("cq_weights: nonpositive implicit weight w0");
    return s;
}

MemoryScheme pi_weights(const KernelSpec& kernel, double tau, std::size_t n) {
    if (!(tau > 0.0) || n < 1)
        throw ParamOutOfRange("pi_weights: requires tau > 0 and n >= 1");
    if (!kernel.k_primitive)
        throw PrimitiveUnavailable("pi_weights: kernel '" + kernel.id +
                                   "' has no primitive K");
    MemoryScheme s;
    s.backend = MemoryBackend::ProductIntegration;
    s.tau = tau;
    s.n_steps = n;
    std::vector<double> b(n + 1);
    double Kprev = 0.0;
    for (std::size_t i = 0; i <= n; ++i) {
        double Knext = kernel.k_primitive(static_cast<double>(i + 1) * tau);
        b[i] = (Knext - Kprev) / tau;
        Kprev = Knext;
    }
    s.weights.resize(n + 1);
    s.weights[0] = b[0];
    for (std::size_t j = 1; j <= n; ++j) s.weights[j] = b[j] - b[j - 1];
    if (!(s.weights[0] > 0.0))
        throw PrimitiveUnavailable("pi_weights: nonpositive implicit weight K(tau)/tau");
    return s;
}

double apply_memory(const MemoryScheme& scheme, const std::vector<double>& history) {
    if (history.empty()) return 0.0;
    if (history.size() > scheme.n_steps + 1)
        throw HistoryTooLong("apply_memory: history longer than scheme horizon");
    const std::size_t n = history.size() - 1;
    double acc = 0.0;
    for (std::size_t j = 0; j <= n; ++j) acc += scheme.weights[j] * history[n - j];
    return acc;
}

Eigen::VectorXd apply_memory(const MemoryScheme& scheme,
                             const std::vector<Eigen::VectorXd>& history) {
    if (history.empty()) return Eigen::VectorXd();
    if (history.size() > scheme.n_steps + 1)
        throw HistoryTooLong("apply_memory: history longer than scheme horizon");
    const std::size_t n = history.size() - 1;
    Eigen::VectorXd acc = Eigen::VectorXd::Zero(history[0].size());
    for (std::size_t j = 0; j <= n; ++j) acc += scheme.weights[j] * history[n - j];
    return acc;
}

std::vector<double> apply_memory_all(const MemoryScheme& scheme,
                                     const std::vector<double>& path) {
    if (path.size() > scheme.n_steps + 1)
        throw HistoryTooLong("apply_memory_all: path longer than scheme horizon");
    return fft_convolve(scheme.weights, path, path.size());
}

} // namespace gfrac
