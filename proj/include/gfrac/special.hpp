#ifndef GFRAC_SPECIAL_HPP
#define GFRAC_SPECIAL_HPP

#include <complex>

namespace gfrac {

using cplx = std::complex<double>;

/// Exponential integral E1(x) = Gamma(0,x), x > 0.
double expint_e1(double x);

/// Scaled exponential integral e^x E1(x); stable for large x where e^x overflows.
double expint_e1_scaled(double x);

/// Lower incomplete gamma  gamma(s,x) = int_0^x t^{s-1} e^{-t} dt,  s > 0, x >= 0.
double gamma_lower(double s, double x);

/// Upper incomplete gamma  Gamma(s,x) = Gamma(s) - gamma(s,x).
/// Supports s < 0 (x > 0 required there) via the recursion
/// Gamma(s,x) = (Gamma(s+1,x) - x^s e^{-x}) / s.
double gamma_upper(double s, double x);

/// Lower incomplete gamma at complex argument z with Re z >= 0, s > 0.
/// Series for moderate |z|, Gamma(s) minus a continued fraction otherwise.
cplx gamma_lower_cplx(double s, cplx z);

} // namespace gfrac

#endif
