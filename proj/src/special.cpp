#include "gfrac/special.hpp"
#include "gfrac/errors.hpp"

#include <cmath>
#include <limits>

namespace gfrac {

namespace {

constexpr double kEulerGamma = 0.57721566490153286060651209008;

// Continued fraction for the scaled upper tail: e^x E1(x) = 1/(x+1-1/(x+3-4/(x+5-...))),
// modified Lentz. Valid for x not small.
double e1_cf_scaled(double x) {
    const double tiny = 1e-300;
    double b = x + 1.0;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i <= 200; ++i) {
        double a = -static_cast<double>(i) * i;
        b += 2.0;
        d = a * d + b;
        if (std::fabs(d) < tiny) d = tiny;
        c = b + a / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < 1e-16) return h;
    }
    throw EvaluationFailure("expint_e1: continued fraction did not converge");
}

} // namespace

double expint_e1(double x) {
    if (x <= 0.0) throw ParamOutOfRange("expint_e1: requires x > 0");
    if (x <= 1.0) {
        // E1(x) = -gamma - ln x + sum_{k>=1} (-1)^{k+1} x^k / (k k!)
        double sum = 0.0, term = 1.0;
        for (int k = 1; k <= 60; ++k) {
            term *= -x / k;
            double add = -term / k;
            sum += add;
            if (std::fabs(add) < 1e-18 * (std::fabs(sum) + 1e-30)) break;
        }
        return -kEulerGamma - std::log(x) + sum;
    }
    return std::exp(-x) * e1_cf_scaled(x);
}

double expint_e1_scaled(double x) {
    if (x <= 0.0) throw ParamOutOfRange("expint_e1_scaled: requires x > 0");
    if (x <= 1.0) return std::exp(x) * expint_e1(x);
    return e1_cf_scaled(x);
}

double gamma_lower(double s, double x) {
    if (s <= 0.0) throw ParamOutOfRange("gamma_lower: requires s > 0");
    if (x < 0.0) throw ParamOutOfRange("gamma_lower: requires x >= 0");
    if (x == 0.0) return 0.0;
    if (x < s + 1.0) {
        // series: gamma(s,x) = x^s e^{-x} sum_n x^n / (s(s+1)...(s+n))
        double sum = 1.0 / s, term = sum;
        for (int n = 1; n <= 500; ++n) {
            term *= x / (s + n);
            sum += term;
            if (std::fabs(term) < 1e-17 * sum) break;
        }
        return std::exp(s * std::log(x) - x) * sum;
    }
    return std::tgamma(s) - gamma_upper(s, x);
}

double gamma_upper(double s, double x) {
    if (x < 0.0) throw ParamOutOfRange("gamma_upper: requires x >= 0");
    if (s <= 0.0) {
        if (x == 0.0) throw ParamOutOfRange("gamma_upper: s <= 0 requires x > 0");
        if (s == 0.0) return expint_e1(x);
        // downward recursion from s+1
        return (gamma_upper(s + 1.0, x) - std::pow(x, s) * std::exp(-x)) / s;
    }
    if (x == 0.0) return std::tgamma(s);
    if (x < s + 1.0) return std::tgamma(s) - gamma_lower(s, x);
    // continued fraction (Lentz): Gamma(s,x) = e^{-x} x^s / (x+1-s- 1(1-s)/(x+3-s- ...))
    const double tiny = 1e-300;
    double b = x + 1.0 - s;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i <= 300; ++i) {
        double a = -i * (i - s);
        b += 2.0;
        d = a * d + b;
        if (std::fabs(d) < tiny) d = tiny;
        c = b + a / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < 1e-16)
            return std::exp(-x + s * std::log(x)) * h;
    }
    throw EvaluationFailure("gamma_upper: continued fraction did not converge");
}

cplx gamma_lower_cplx(double s, cplx z) {
    if (s <= 0.0) throw ParamOutOfRange("gamma_lower_cplx: requires s > 0");
    if (z == cplx(0.0, 0.0)) return {0.0, 0.0};
    if (std::real(z) < 0.0)
        throw ParamOutOfRange("gamma_lower_cplx: requires Re z >= 0");
    // the series cancels like e^{|z| - Re z}, so it is only safe close to the
    // origin; the Lentz continued fraction handles the rest of Re z >= 0
    if (std::abs(z) < 3.0) {
        cplx sum = cplx(1.0 / s, 0.0), term = sum;
        for (int n = 1; n <= 2000; ++n) {
            term *= z / cplx(s + n, 0.0);
            sum += term;
            if (std::abs(term) < 1e-17 * std::abs(sum))
                return std::exp(cplx(s, 0.0) * std::log(z) - z) * sum;
        }
        throw EvaluationFailure("gamma_lower_cplx: series did not converge");
    }
    const double tiny = 1e-300;
    cplx b = z + cplx(1.0 - s, 0.0);
    cplx c = cplx(1.0 / tiny, 0.0);
    cplx d = 1.0 / b;
    cplx h = d;
    for (int i = 1; i <= 5000; ++i) {
        cplx a = cplx(-i * (i - s), 0.0);
        b += 2.0;
        d = a * d + b;
        if (std::abs(d) < tiny) d = tiny;
        c = b + a / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        cplx del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < 1e-16) {
            cplx upper = std::exp(-z + cplx(s, 0.0) * std::log(z)) * h;
            return cplx(std::tgamma(s), 0.0) - upper;
        }
    }
    throw EvaluationFailure("gamma_lower_cplx: continued fraction did not converge");
}

} // namespace gfrac
