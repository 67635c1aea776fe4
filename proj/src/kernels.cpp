#include "gfrac/kernels.hpp"
#include "gfrac/errors.hpp"
#include "gfrac/quadrature.hpp"
#include "gfrac/special.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace gfrac {

namespace {

constexpr double kEulerGamma = 0.57721566490153286060651209008;

std::string fmt_params(const std::map<std::string, double>& p) {
    std::ostringstream os;
    bool first = true;
    for (const auto& [k, v] : p) {
        os << (first ? "" : ",") << k << "=" << v;
        first = false;
    }
    return os.str();
}

void require(bool ok, const std::string& what) {
    if (!ok) throw ParamOutOfRange(what);
}

// (lambda - 1)/log(lambda) with the removable singularity at lambda = 1.
cplx ratio_w_over_log1p(cplx w) {
    // w/log(1+w); series for small w
    if (std::abs(w) < 1e-5)
        return 1.0 + w / 2.0 - w * w / 12.0 + w * w * w / 24.0;
    return w / std::log(cplx(1.0, 0.0) + w);
}

} // namespace

std::string family_name(KernelFamily f) {
    switch (f) {
        case KernelFamily::Caputo: return "caputo";
        case KernelFamily::TruncatedStable: return "truncated_stable";
        case KernelFamily::DistributedOrder: return "distributed_order";
        case KernelFamily::ExpWeighted: return "exp_weighted";
        case KernelFamily::GammaSub: return "gamma_sub";
        case KernelFamily::MultiTerm: return "multi_term";
        case KernelFamily::Classical: return "classical";
        case KernelFamily::Custom: return "custom";
    }
    return "unknown";
}

KernelSpec make_caputo(double beta) {
    require(beta > 0.0 && beta < 1.0, "caputo: beta must lie in (0,1)");
    const double g1mb = std::tgamma(1.0 - beta);
    const double g2mb = std::tgamma(2.0 - beta);
    const double gb = std::tgamma(beta);
    const double g1pb = std::tgamma(1.0 + beta);
    KernelSpec s;
    s.family = KernelFamily::Caputo;
    s.params = {{"beta", beta}};
    s.id = "caputo(" + fmt_params(s.params) + ")";
    s.singular_at_zero = true;
    s.k_eval = [=](double t) { return std::pow(t, -beta) / g1mb; };
    s.k_primitive = [=](double t) { return t <= 0.0 ? 0.0 : std::pow(t, 1.0 - beta) / g2mb; };
    s.k_deriv = [=](double t) { return -beta * std::pow(t, -beta - 1.0) / g1mb; };
    s.laplace_k = [=](cplx lam) { return std::pow(lam, beta - 1.0); };
    s.k_tilde_eval = [=](double t) { return std::pow(t, beta - 1.0) / gb; };
    s.k_tilde_primitive = [=](double t) { return t <= 0.0 ? 0.0 : std::pow(t, beta) / g1pb; };
    s.k_tilde_deriv = [=](double t) { return (beta - 1.0) * std::pow(t, beta - 2.0) / gb; };
    s.laplace_k_tilde = [=](cplx lam) { return std::pow(lam, -beta); };
    return s;
}

KernelSpec make_truncated_stable(double beta, double delta_trunc) {
    require(beta > 0.0 && beta < 1.0, "truncated_stable: beta must lie in (0,1)");
    require(delta_trunc > 0.0, "truncated_stable: delta_trunc must be positive");
    const double g1mb = std::tgamma(1.0 - beta);
    const double d = delta_trunc;
    const double dmb = std::pow(d, -beta);
    KernelSpec s;
    s.family = KernelFamily::TruncatedStable;
    s.params = {{"beta", beta}, {"delta_trunc", d}};
    s.id = "truncated_stable(" + fmt_params(s.params) + ")";
    s.singular_at_zero = true;
    s.k_eval = [=](double t) {
        return t > d ? 0.0 : (std::pow(t, -beta) - dmb) / g1mb;
    };
    s.k_primitive = [=](double t) {
        if (t <= 0.0) return 0.0;
        double m = std::min(t, d);
        return (std::pow(m, 1.0 - beta) / (1.0 - beta) - dmb * m) / g1mb;
    };
    s.k_deriv = [=](double t) {
        return t > d ? 0.0 : -beta * std::pow(t, -beta - 1.0) / g1mb;
    };
    s.laplace_k = [=](cplx lam) {
        // int_0^d e^{-lam t} (t^{-b} - d^{-b}) dt / Gamma(1-b)
        cplx g = gamma_lower_cplx(1.0 - beta, lam * d);
        cplx term1 = std::pow(lam, beta - 1.0) * g;
        cplx term2 = dmb * (1.0 - std::exp(-lam * d)) / lam;
        return (term1 - term2) / g1mb;
    };
    return s;
}

KernelSpec make_distributed_order() {
    KernelSpec s;
    s.family = KernelFamily::DistributedOrder;
    s.id = "distributed_order()";
    s.singular_at_zero = true;
    s.k_eval = [](double t) {
        return integrate([t](double b) { return std::pow(t, b - 1.0) / std::tgamma(b); },
                         0.0, 1.0, 1e-13, 1e-11).value;
    };
    s.k_primitive = [](double t) {
        if (t <= 0.0) return 0.0;
        return integrate([t](double b) { return std::pow(t, b) / std::tgamma(b + 1.0); },
                         0.0, 1.0, 1e-13, 1e-11).value;
    };
    s.k_deriv = [](double t) {
        return integrate([t](double b) { return (b - 1.0) * std::pow(t, b - 2.0) / std::tgamma(b); },
                         0.0, 1.0, 1e-13, 1e-11).value;
    };
    s.laplace_k = [](cplx lam) {
        // int_0^1 lam^{b-1} db = (lam-1)/(lam log lam)
        return ratio_w_over_log1p(lam - 1.0) / lam;
    };
    s.k_tilde_eval = [](double t) { return expint_e1_scaled(t); };
    s.k_tilde_primitive = [](double t) {
        if (t <= 0.0) return 0.0;
        return std::log(t) + kEulerGamma + expint_e1_scaled(t);
    };
    s.k_tilde_deriv = [](double t) { return expint_e1_scaled(t) - 1.0 / t; };
    s.laplace_k_tilde = [](cplx lam) { return 1.0 / ratio_w_over_log1p(lam - 1.0); };
    return s;
}

KernelSpec make_exp_weighted(double beta, double lambda_w) {
    require(beta > 0.0 && beta < 1.0, "exp_weighted: beta must lie in (0,1)");
    require(lambda_w > 0.0, "exp_weighted: lambda_w must be positive");
    const double g1mb = std::tgamma(1.0 - beta);
    const double gb = std::tgamma(beta);
    const double lw = lambda_w;
    const double lw_pow = std::pow(lw, 1.0 - beta);
    KernelSpec s;
    s.family = KernelFamily::ExpWeighted;
    s.params = {{"beta", beta}, {"lambda_w", lw}};
    s.id = "exp_weighted(" + fmt_params(s.params) + ")";
    s.singular_at_zero = true;
    s.k_eval = [=](double t) { return std::pow(t, -beta) * std::exp(-lw * t) / g1mb; };
    s.k_primitive = [=](double t) {
        if (t <= 0.0) return 0.0;
        return std::pow(lw, beta - 1.0) * gamma_lower(1.0 - beta, lw * t) / g1mb;
    };
    s.k_deriv = [=](double t) {
        return -std::exp(-lw * t) * (beta * std::pow(t, -beta - 1.0) + lw * std::pow(t, -beta)) / g1mb;
    };
    s.laplace_k = [=](cplx lam) { return std::pow(lam + lw, beta - 1.0); };
    // Conjugate with Laplace transform (lam+lw)^{1-beta}/lam, so that
    // Lk * Lktilde = 1/lam; certified numerically by the Sonine residual.
    s.k_tilde_eval = [=](double t) {
        return lw_pow * (1.0 + (1.0 - beta) * gamma_upper(beta - 1.0, lw * t) / gb);
    };
    s.k_tilde_primitive = [=](double t) {
        if (t <= 0.0) return 0.0;
        double gu = gamma_upper(beta - 1.0, lw * t);
        double gl = gamma_lower(beta, lw * t);
        return lw_pow * (t + (1.0 - beta) * (t * gu + gl / lw) / gb);
    };
    s.k_tilde_deriv = [=](double t) {
        return -(1.0 - beta) / gb * std::exp(-lw * t) * std::pow(t, beta - 2.0);
    };
    s.laplace_k_tilde = [=](cplx lam) { return std::pow(lam + lw, 1.0 - beta) / lam; };
    return s;
}

KernelSpec make_gamma_sub(double a, double b) {
    require(a > 0.0, "gamma_sub: a must be positive");
    require(b > 0.0, "gamma_sub: b must be positive");
    KernelSpec s;
    s.family = KernelFamily::GammaSub;
    s.params = {{"a", a}, {"b", b}};
    s.id = "gamma_sub(" + fmt_params(s.params) + ")";
    s.singular_at_zero = true;
    s.k_eval = [=](double t) { return a * expint_e1(b * t); };
    s.k_primitive = [=](double t) {
        if (t <= 0.0) return 0.0;
        return a * (t * expint_e1(b * t) + (1.0 - std::exp(-b * t)) / b);
    };
    s.k_deriv = [=](double t) { return -a * std::exp(-b * t) / t; };
    s.laplace_k = [=](cplx lam) { return a * std::log(1.0 + lam / b) / lam; };
    return s;
}

KernelSpec make_multi_term(const std::vector<std::pair<double, double>>& terms) {
    require(!terms.empty(), "multi_term: at least one term required");
    double prev = 0.0;
    for (const auto& [aj, bj] : terms) {
        require(aj > 0.0, "multi_term: weights a_j must be positive");
        require(bj > 0.0 && bj < 1.0, "multi_term: exponents beta_j must lie in (0,1)");
        require(bj > prev, "multi_term: exponents must be strictly increasing");
        prev = bj;
    }
    struct Term {
        double a, beta, g1mb, g2mb;
    };
    std::vector<Term> ts;
    for (const auto& [aj, bj] : terms)
        ts.push_back({aj, bj, std::tgamma(1.0 - bj), std::tgamma(2.0 - bj)});
    KernelSpec s;
    s.family = KernelFamily::MultiTerm;
    for (std::size_t j = 0; j < terms.size(); ++j) {
        s.params["a" + std::to_string(j + 1)] = terms[j].first;
        s.params["beta" + std::to_string(j + 1)] = terms[j].second;
    }
    s.id = "multi_term(" + fmt_params(s.params) + ")";
    s.singular_at_zero = true;
    s.k_eval = [ts](double t) {
        double v = 0.0;
        for (const auto& m : ts) v += m.a * std::pow(t, -m.beta) / m.g1mb;
        return v;
    };
    s.k_primitive = [ts](double t) {
        if (t <= 0.0) return 0.0;
        double v = 0.0;
        for (const auto& m : ts) v += m.a * std::pow(t, 1.0 - m.beta) / m.g2mb;
        return v;
    };
    s.k_deriv = [ts](double t) {
        double v = 0.0;
        for (const auto& m : ts) v += -m.a * m.beta * std::pow(t, -m.beta - 1.0) / m.g1mb;
        return v;
    };
    s.laplace_k = [ts](cplx lam) {
        cplx v = 0.0;
        for (const auto& m : ts) v += m.a * std::pow(lam, m.beta - 1.0);
        return v;
    };
    // Laplace form of the conjugate, 1/sum_j a_j lam^{beta_j}; the time-domain
    // conjugate itself is obtained by the numeric Volterra solve.
    s.laplace_k_tilde = [ts](cplx lam) {
        cplx v = 0.0;
        for (const auto& m : ts) v += m.a * std::pow(lam, m.beta);
        return 1.0 / v;
    };
    return s;
}

KernelSpec make_classical() {
    KernelSpec s;
    s.family = KernelFamily::Classical;
    s.id = "classical()";
    // The unit mass sits at t = 0+ and is carried entirely by the primitive
    // jump K(0+) = 1; k must never be sampled near zero.
    s.singular_at_zero = true;
    s.k_eval = [](double) { return 0.0; };
    s.k_primitive = [](double t) { return t > 0.0 ? 1.0 : 0.0; };
    s.k_deriv = [](double) { return 0.0; };
    s.laplace_k = [](cplx) { return cplx(1.0, 0.0); };
    s.k_tilde_eval = [](double) { return 1.0; };
    s.k_tilde_primitive = [](double t) { return std::max(t, 0.0); };
    s.k_tilde_deriv = [](double) { return 0.0; };
    s.laplace_k_tilde = [](cplx lam) { return 1.0 / lam; };
    return s;
}

KernelSpec make_custom(std::function<double(double)> k,
                       std::function<double(double)> primitive,
                       bool singular_at_zero, std::string id) {
    require(static_cast<bool>(k), "custom: k evaluator required");
    KernelSpec s;
    s.family = KernelFamily::Custom;
    s.id = std::move(id);
    s.singular_at_zero = singular_at_zero;
    s.k_eval = k;
    if (primitive) {
        s.k_primitive = std::move(primitive);
    } else {
        s.k_primitive = [k, singular_at_zero](double t) {
            if (t <= 0.0) return 0.0;
            if (singular_at_zero) return integrate_de(k, 0.0, t, 1e-10).value;
            return integrate(k, 0.0, t, 1e-12, 1e-10).value;
        };
    }
    auto kp = s.k_primitive;
    s.laplace_k = [k, singular_at_zero](cplx lam) {
        double re = std::real(lam);
        if (re <= 0.0)
            throw EvaluationFailure("custom laplace_k: requires Re(lambda) > 0");
        // truncate where the monotone-tail bound k(T) e^{-Re lam T}/Re lam dips
        // below 1e-12 relative to the accumulated magnitude
        double T = 1.0;
        for (int i = 0; i < 60; ++i) {
            double bound = k(T) * std::exp(-re * T) / re;
            if (bound < 1e-12 * std::max(1e-6, std::abs(k(std::min(T, 1.0))))) break;
            T *= 2.0;
            if (T > 1e12)
                throw EvaluationFailure("custom laplace_k: truncation horizon not found");
        }
        auto re_part = [&](double t) { return k(t) * std::exp(-re * t) * std::cos(std::imag(lam) * t); };
        auto im_part = [&](double t) { return -k(t) * std::exp(-re * t) * std::sin(std::imag(lam) * t); };
        double head = std::min(1.0, T);
        double vr, vi;
        if (singular_at_zero) {
            vr = integrate_de(re_part, 0.0, head, 1e-11).value;
            vi = integrate_de(im_part, 0.0, head, 1e-11).value;
        } else {
            vr = integrate(re_part, 0.0, head, 1e-12, 1e-10).value;
            vi = integrate(im_part, 0.0, head, 1e-12, 1e-10).value;
        }
        if (T > head) {
            vr += integrate(re_part, head, T, 1e-12, 1e-10).value;
            vi += integrate(im_part, head, T, 1e-12, 1e-10).value;
        }
        return cplx(vr, vi);
    };
    return s;
}

KernelSpec make_custom_samples(const std::vector<double>& t,
                               const std::vector<double>& k, std::string id) {
    require(t.size() == k.size(), "custom samples: t and k must have equal length");
    require(t.size() >= 2, "custom samples: at least two samples required");
    require(t.front() > 0.0, "custom samples: times must be positive");
    for (std::size_t i = 1; i < t.size(); ++i)
        require(t[i] > t[i - 1], "custom samples: times must be strictly increasing");

    auto tt = t;
    auto kk = k;
    // exact primitive of the piecewise-linear interpolant (constant left of t0)
    std::vector<double> cum(tt.size(), 0.0);
    double acc = kk.front() * tt.front(); // left extension with k(t) = k(t_0)
    cum[0] = acc;
    for (std::size_t i = 1; i < tt.size(); ++i) {
        acc += 0.5 * (kk[i] + kk[i - 1]) * (tt[i] - tt[i - 1]);
        cum[i] = acc;
    }
    auto interp = [tt, kk](double x) -> double {
        if (x <= tt.front()) return kk.front();
        if (x >= tt.back()) return 0.0;
        auto it = std::upper_bound(tt.begin(), tt.end(), x);
        std::size_t i = static_cast<std::size_t>(it - tt.begin());
        double w = (x - tt[i - 1]) / (tt[i] - tt[i - 1]);
        return kk[i - 1] + w * (kk[i] - kk[i - 1]);
    };
    auto primitive = [tt, kk, cum, interp](double x) -> double {
        if (x <= 0.0) return 0.0;
        if (x <= tt.front()) return kk.front() * x;
        if (x >= tt.back()) return cum.back();
        auto it = std::upper_bound(tt.begin(), tt.end(), x);
        std::size_t i = static_cast<std::size_t>(it - tt.begin());
        double kx = interp(x);
        return cum[i - 1] + 0.5 * (kk[i - 1] + kx) * (x - tt[i - 1]);
    };
    KernelSpec s = make_custom(interp, primitive, false, std::move(id));
    return s;
}

KernelSpec make_kernel(const std::string& family,
                       const std::map<std::string, double>& params) {
    std::string f;
    for (char c : family)
        if (c != '_' && c != '-') f += static_cast<char>(std::tolower(c));

    auto get = [&](const char* key) -> double {
        auto it = params.find(key);
        if (it == params.end())
            throw ParamOutOfRange("kernel '" + family + "': missing parameter '" + key + "'");
        return it->second;
    };
    auto expect_only = [&](std::initializer_list<const char*> keys) {
        for (const auto& [k, v] : params) {
            (void)v;
            bool ok = false;
            for (const char* e : keys)
                if (k == e) ok = true;
            if (!ok)
                throw ParamOutOfRange("kernel '" + family + "': unknown parameter '" + k + "'");
        }
    };

    if (f == "caputo") {
        expect_only({"beta"});
        return make_caputo(get("beta"));
    }
    if (f == "truncatedstable" || f == "truncated") {
        expect_only({"beta", "deltatrunc", "delta_trunc", "delta"});
        double d = params.count("delta") ? params.at("delta")
                 : params.count("delta_trunc") ? params.at("delta_trunc")
                                               : get("deltatrunc");
        return make_truncated_stable(get("beta"), d);
    }
    if (f == "distributedorder") {
        expect_only({});
        return make_distributed_order();
    }
    if (f == "expweighted") {
        expect_only({"beta", "lambda_w", "lambdaw"});
        double lw = params.count("lambda_w") ? params.at("lambda_w") : get("lambdaw");
        return make_exp_weighted(get("beta"), lw);
    }
    if (f == "gammasub" || f == "gamma") {
        expect_only({"a", "b"});
        return make_gamma_sub(get("a"), get("b"));
    }
    if (f == "multiterm") {
        // either {alpha, beta} shorthand with unit weights, or a1/beta1, a2/beta2, ...
        if (params.count("alpha") && params.count("beta")) {
            expect_only({"alpha", "beta"});
            double al = get("alpha"), be = get("beta");
            require(al < be, "multi_term: requires alpha < beta");
            return make_multi_term({{1.0, al}, {1.0, be}});
        }
        std::vector<std::pair<double, double>> terms;
        for (int j = 1;; ++j) {
            std::string ak = "a" + std::to_string(j);
            std::string bk = "beta" + std::to_string(j);
            if (!params.count(ak) && !params.count(bk)) break;
            terms.emplace_back(get(ak.c_str()), get(bk.c_str()));
        }
        require(!terms.empty(), "multi_term: supply alpha/beta or a1/beta1,...");
        if (params.size() != 2 * terms.size())
            throw ParamOutOfRange("kernel 'multi_term': unknown extra parameters");
        return make_multi_term(terms);
    }
    if (f == "classical") {
        expect_only({});
        return make_classical();
    }
    throw ParamOutOfRange("unknown kernel family '" + family + "'");
}

std::vector<KernelSpec> standard_catalogue() {
    return {
        make_caputo(0.5),
        make_truncated_stable(0.5, 2.0),
        make_distributed_order(),
        make_exp_weighted(0.5, 1.0),
        make_gamma_sub(1.0, 1.0),
        make_multi_term({{1.0, 0.3}, {1.0, 0.7}}),
        make_classical(),
    };
}

cplx psi(const KernelSpec& kernel, cplx lambda) {
    if (std::real(lambda) < 0.0)
        throw ParamOutOfRange("psi: requires Re(lambda) >= 0");
    if (lambda == cplx(0.0, 0.0)) return {0.0, 0.0};
    return lambda * kernel.laplace_k(lambda);
}

double psi(const KernelSpec& kernel, double lambda) {
    return std::real(psi(kernel, cplx(lambda, 0.0)));
}

double levy_tail(const KernelSpec& kernel, double s) {
    if (s <= 0.0) throw ParamOutOfRange("levy_tail: requires s > 0");
    return kernel.k_eval(s);
}

double convolve_singular(const SingularFactor& a, const SingularFactor& b, double t) {
    if (t <= 0.0) throw ParamOutOfRange("convolve_singular: requires t > 0");
    const double half = 0.5 * t;
    double boundary = a.eval(half) * b.primitive(half) + b.eval(half) * a.primitive(half);
    auto integrand = [&](double s) {
        return a.deriv(t - s) * b.primitive(s) + b.deriv(t - s) * a.primitive(s);
    };
    double integral = integrate(integrand, 0.0, half, 1e-11, 1e-9).value;
    return boundary + integral;
}

double sonine_convolution(const KernelSpec& kernel, double t) {
    if (!(kernel.k_tilde_eval && kernel.k_tilde_primitive && kernel.k_tilde_deriv &&
          kernel.k_deriv))
        throw UnsupportedKernel("sonine_convolution: closed-form conjugate pieces unavailable for " +
                                kernel.id);
    return convolve_singular({kernel.k_tilde_eval, kernel.k_tilde_primitive, kernel.k_tilde_deriv},
                             {kernel.k_eval, kernel.k_primitive, kernel.k_deriv}, t);
}

std::pair<std::vector<double>, SonineReport>
sonine_conjugate(const KernelSpec& kernel, double tau, std::size_t n,
                 double residual_tol) {
    if (!(tau > 0.0) || n < 2)
        throw ParamOutOfRange("sonine_conjugate: requires tau > 0 and n >= 2");

    SonineReport report;
    std::vector<double> values;

    if (kernel.has_closed_conjugate()) {
        report.method = SonineMethod::ClosedForm;
        values.resize(n);
        for (std::size_t j = 1; j <= n; ++j)
            values[j - 1] = kernel.k_tilde_eval(static_cast<double>(j) * tau);
        // residual on a log-thinned subset of the nodes
        std::size_t m = std::min<std::size_t>(n, 64);
        double lo = std::log(tau), hi = std::log(static_cast<double>(n) * tau);
        std::size_t last_idx = 0;
        for (std::size_t i = 0; i < m; ++i) {
            double target = std::exp(lo + (hi - lo) * static_cast<double>(i) /
                                              static_cast<double>(m - 1));
            std::size_t idx = std::max<std::size_t>(
                1, std::min<std::size_t>(n, static_cast<std::size_t>(std::lround(target / tau))));
            if (i > 0 && idx <= last_idx) idx = last_idx + 1;
            if (idx > n) break;
            last_idx = idx;
            double tt = static_cast<double>(idx) * tau;
            double r = std::fabs(sonine_convolution(kernel, tt) - 1.0);
            report.grid.push_back(tt);
            report.residual.push_back(r);
        }
    } else {
        report.method = SonineMethod::NumericVolterra;
        // piecewise-constant collocation of int_0^{t_n} ktilde(s) k(t_n - s) ds = 1
        // with exact cell integrals a_i = K(t_{i+1}) - K(t_i); forward substitution
        std::vector<double> a(n);
        for (std::size_t i = 0; i < n; ++i)
            a[i] = kernel.k_primitive(static_cast<double>(i + 1) * tau) -
                   kernel.k_primitive(static_cast<double>(i) * tau);
        if (!(a[0] > 0.0))
            throw NoConjugate("sonine_conjugate: nonpositive pivot K(tau) (kernel '" +
                              kernel.id + "')");
        values.assign(n, 0.0);
        values[0] = 1.0 / a[0];
        for (std::size_t m2 = 2; m2 <= n; ++m2) {
            double acc = 0.0;
            for (std::size_t j = 1; j < m2; ++j)
                acc += values[j - 1] * a[m2 - j];
            values[m2 - 1] = (1.0 - acc) / a[0];
        }
        double vmax = 0.0;
        for (double v : values) vmax = std::max(vmax, std::fabs(v));
        for (double v : values)
            if (v < -1e-12 * vmax)
                throw NoConjugate("sonine_conjugate: negative conjugate values "
                                  "(numeric complete-positivity violation for '" +
                                  kernel.id + "')");
        // recomputed collocation residual (Kahan), certifying conditioning
        report.grid.resize(n);
        report.residual.resize(n);
        for (std::size_t m2 = 1; m2 <= n; ++m2) {
            double sum = 0.0, comp = 0.0;
            for (std::size_t j = 1; j <= m2; ++j) {
                double term = values[j - 1] * a[m2 - j];
                double y = term - comp;
                double s2 = sum + y;
                comp = (s2 - sum) - y;
                sum = s2;
            }
            report.grid[m2 - 1] = static_cast<double>(m2) * tau;
            report.residual[m2 - 1] = std::fabs(sum - 1.0);
        }
    }

    report.max_residual = 0.0;
    for (double r : report.residual) report.max_residual = std::max(report.max_residual, r);
    if (report.max_residual > residual_tol)
        throw IllConditioned("sonine_conjugate: residual " + std::to_string(report.max_residual) +
                             " exceeds tolerance for '" + kernel.id + "'");
    return {std::move(values), std::move(report)};
}

cplx laplace_of_cells(const std::vector<double>& cells, double tau, cplx lambda) {
    cplx sum = 0.0;
    cplx decay = std::exp(-lambda * tau);
    cplx left = 1.0;
    for (double c : cells) {
        cplx right = left * decay;
        sum += c * (left - right);
        left = right;
    }
    return sum / lambda;
}

bool KernelConditionsReport::all_pass() const {
    return std::all_of(records.begin(), records.end(),
                       [](const ConditionRecord& r) { return r.pass; });
}

std::vector<double> log_grid(double t_min, double t_max, std::size_t n) {
    std::vector<double> g(n);
    double lo = std::log(t_min), hi = std::log(t_max);
    for (std::size_t i = 0; i < n; ++i)
        g[i] = std::exp(lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1));
    return g;
}

KernelConditionsReport verify_kernel_conditions(const KernelSpec& kernel,
                                                const std::vector<double>& grid,
                                                double tol) {
    if (grid.size() < 2)
        throw ParamOutOfRange("verify_kernel_conditions: grid needs >= 2 points");
    KernelConditionsReport rep;
    rep.singular_at_zero = kernel.singular_at_zero;

    std::vector<double> kv(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) kv[i] = kernel.k_eval(grid[i]);

    {
        ConditionRecord r{"nonnegativity", true, grid[0], kv[0]};
        for (std::size_t i = 0; i < kv.size(); ++i)
            if (kv[i] < r.worst_value || i == 0) {
                r.worst_value = kv[i];
                r.worst_point = grid[i];
            }
        r.pass = r.worst_value >= -tol;
        rep.records.push_back(r);
    }
    {
        ConditionRecord r{"monotonicity", true, grid[0], 0.0};
        for (std::size_t i = 1; i < kv.size(); ++i) {
            double rise = kv[i] - kv[i - 1];
            if (rise > r.worst_value) {
                r.worst_value = rise;
                r.worst_point = grid[i];
            }
        }
        double scale = std::fabs(kv.front()) + std::fabs(kv.back()) + 1e-300;
        r.pass = r.worst_value <= tol * scale;
        rep.records.push_back(r);
    }
    {
        // sampled stand-in for k -> 0: decay by at least half over the grid span
        ConditionRecord r{"vanishing_at_infinity", true, grid.back(), kv.back()};
        double ref = kernel.k_eval(std::min(1.0, grid.back()));
        r.pass = kv.back() < 0.5 * ref + tol;
        rep.records.push_back(r);
    }
    {
        ConditionRecord r{"local_integrability", true, 1.0, 0.0};
        double K1 = kernel.k_primitive(std::min(1.0, grid.back()));
        r.worst_value = K1;
        r.pass = std::isfinite(K1) && K1 >= 0.0;
        rep.records.push_back(r);
    }
    return rep;
}

} // namespace gfrac
