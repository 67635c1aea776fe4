#ifndef GFRAC_QUADRATURE_HPP
#define GFRAC_QUADRATURE_HPP

#include <complex>
#include <functional>

namespace gfrac {

struct QuadResult {
    double value = 0.0;
    double error = 0.0; // estimated absolute error
};

/// Adaptive Gauss-Kronrod 7-15 on a finite interval. Integrand must be finite
/// on the open interval; mild endpoint behaviour is fine at the working tolerance.
QuadResult integrate(const std::function<double(double)>& f, double a, double b,
                     double abs_tol = 1e-10, double rel_tol = 1e-10,
                     int max_depth = 60);

/// Same, complex-valued integrand (real parameterization).
std::complex<double> integrate_cplx(const std::function<std::complex<double>(double)>& f,
                                    double a, double b,
                                    double abs_tol = 1e-12, double rel_tol = 1e-12,
                                    int max_depth = 60);

/// tanh-sinh (double exponential) rule on (a,b) for integrands with integrable
/// endpoint singularities; never evaluates f at the endpoints themselves.
QuadResult integrate_de(const std::function<double(double)>& f, double a, double b,
                        double tol = 1e-10, int max_level = 12);

/// Semi-infinite integral over (a, inf) of a decaying integrand: maps through
/// x = a + u/(1-u) and applies the adaptive rule.
QuadResult integrate_to_inf(const std::function<double(double)>& f, double a,
                            double abs_tol = 1e-10, double rel_tol = 1e-10);

} // namespace gfrac

#endif
