// Test-side oracles, independent of the library's numeric paths.
#ifndef GFRAC_TEST_ORACLES_HPP
#define GFRAC_TEST_ORACLES_HPP

#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

namespace oracle {

// adaptive Simpson, deliberately different from the library's Gauss-Kronrod
inline double simpson_rec(const std::function<double(double)>& f, double a, double b,
                          double fa, double fm, double fb, double whole, double tol,
                          int depth) {
    double m = 0.5 * (a + b);
    double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    double flm = f(lm), frm = f(rm);
    double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    if (depth <= 0) return left + right;
    if (std::fabs(left + right - whole) <= 15.0 * tol)
        return left + right + (left + right - whole) / 15.0;
    return simpson_rec(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1) +
           simpson_rec(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1);
}

inline double simpson(const std::function<double(double)>& f, double a, double b,
                      double tol = 1e-10, int depth = 48) {
    double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
    double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return simpson_rec(f, a, b, fa, fm, fb, whole, tol, depth);
}

// Mittag-Leffler E_{1/2}(-x) = e^{x^2} erfc(x); relaxation solution
// u(t) = E_beta(-lambda t^beta) specialized to beta = 1/2, lambda = 1:
inline double ml_half(double x) { return std::exp(x * x) * std::erfc(x); }
inline double relaxation_half_exact(double t) { return ml_half(std::sqrt(t)); }

// Gruenwald-Letnikov coefficients of (1-z)^beta: w_j = w_{j-1} (j-1-beta)/j
inline std::vector<double> gl_coefficients(double beta, std::size_t n) {
    std::vector<double> w(n + 1);
    w[0] = 1.0;
    for (std::size_t j = 1; j <= n; ++j)
        w[j] = w[j - 1] * (static_cast<double>(j) - 1.0 - beta) / static_cast<double>(j);
    return w;
}

// Levy densities of the absolutely continuous catalogue kernels
inline double levy_density_caputo(double beta, double tau) {
    return beta / std::tgamma(1.0 - beta) * std::pow(tau, -1.0 - beta);
}
inline double levy_density_gamma(double a, double b, double tau) {
    return a * std::exp(-b * tau) / tau;
}

// psi oracle: adaptive quadrature of int (1 - e^{-lambda tau}) M(dtau), split
// at 1 with a 1/tau fold of the upper range; the algebraic mass beyond the
// fold horizon enters through the exact tail M((T,inf)) = k(T), where
// 1 - e^{-lambda t} = 1 to machine precision.
inline double psi_from_levy(const std::function<double(double)>& density, double lambda,
                            const std::function<double(double)>& tail_mass,
                            double tol = 1e-12) {
    auto low = [&](double t) { return (1.0 - std::exp(-lambda * t)) * density(t); };
    // substitute t = x^4 near zero to soften the t^{-1-beta} singularity
    auto low_sub = [&](double x) { return low(x * x * x * x) * 4.0 * x * x * x; };
    double head = simpson(low_sub, 1e-12, 1.0, tol);
    const double T = 1e9;
    auto up = [&](double u) { // t = 1/u
        double t = 1.0 / u;
        return (1.0 - std::exp(-lambda * t)) * density(t) * t * t;
    };
    double mid = simpson(up, 1.0 / T, 1.0, tol);
    return head + mid + tail_mass(T);
}

// trapezoid on samples
inline double trapz(const std::vector<double>& y, double tau) {
    double acc = 0.0;
    for (std::size_t i = 1; i < y.size(); ++i) acc += 0.5 * (y[i] + y[i - 1]);
    return acc * tau;
}

} // namespace oracle

#endif
