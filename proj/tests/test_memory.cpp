#include <doctest.h>

#include "gfrac/errors.hpp"
#include "gfrac/memory.hpp"
#include "oracles.hpp"

#include <cmath>

using namespace gfrac;

TEST_CASE("classical kernel: CQ and PI both reduce to the backward difference") {
    for (auto* maker : {&cq_weights, &pi_weights}) {
        MemoryScheme s = (*maker)(make_classical(), 0.25, 8);
        CHECK(s.weights[0] == doctest::Approx(4.0).epsilon(1e-14));
        CHECK(s.weights[1] == doctest::Approx(-4.0).epsilon(1e-14));
        for (std::size_t j = 2; j <= 8; ++j) CHECK(std::fabs(s.weights[j]) < 1e-12);
        // history {0, a} -> a/tau
        CHECK(apply_memory(s, {0.0, 3.0}) == doctest::Approx(12.0).epsilon(1e-13));
    }
}

TEST_CASE("CQ weights for Caputo are the Gruenwald-Letnikov coefficients") {
    const double beta = 0.5;
    MemoryScheme s = cq_weights(make_caputo(beta), 1.0, 24);
    auto gl = oracle::gl_coefficients(beta, 24);
    for (std::size_t j = 0; j <= 24; ++j)
        CHECK(s.weights[j] == doctest::Approx(gl[j]).epsilon(1e-7));
}

TEST_CASE("CQ partial sums reproduce k(t_n) (unit-jump consistency)") {
    KernelSpec gs = make_gamma_sub(1.0, 1.0);
    const double tau = 0.1;
    const std::size_t N = 100;
    MemoryScheme s = cq_weights(gs, tau, N);
    // v == 1 with v(0)=0 jump: memory sum at t_N equals sum_{j<N} w_j
    std::vector<double> v(N + 1, 1.0);
    v[0] = 0.0;
    double got = apply_memory(s, v);
    CHECK(std::fabs(got - gs.k_eval(static_cast<double>(N) * tau)) < 1e-4);
}

TEST_CASE("PI weights: exact first coefficient and exactness on linear paths") {
    const double beta = 0.5;
    KernelSpec cap = make_caputo(beta);
    MemoryScheme s = pi_weights(cap, 1.0, 8);
    // coefficient of (v_1 - v_0) at n=1 is K(1)/tau = 1/Gamma(1.5)
    CHECK(s.weights[0] == doctest::Approx(1.1283791670955126).epsilon(1e-13));

    // exact for v(t) = c t: memory derivative equals c K(t_n)
    const double tau = 0.125;
    MemoryScheme s2 = pi_weights(cap, tau, 64);
    std::vector<double> v(65);
    for (std::size_t j = 0; j <= 64; ++j) v[j] = 2.0 * static_cast<double>(j) * tau;
    double got = apply_memory(s2, v);
    CHECK(got == doctest::Approx(2.0 * cap.k_primitive(64 * tau)).epsilon(1e-12));

    // v == 0 gives 0
    CHECK(apply_memory(s2, std::vector<double>(65, 0.0)) == 0.0);
}

TEST_CASE("apply_memory converges to the closed-form convolution derivative") {
    // v(t) = t, Caputo: d/dt(k*v)(t) = t^{1-beta}/Gamma(2-beta)
    const double beta = 0.5;
    KernelSpec cap = make_caputo(beta);
    const double T = 1.0;
    double exact = std::pow(T, 1.0 - beta) / std::tgamma(2.0 - beta);
    std::vector<double> errs;
    for (std::size_t N : {32, 64, 128, 256}) {
        double tau = T / static_cast<double>(N);
        MemoryScheme s = cq_weights(cap, tau, N);
        std::vector<double> v(N + 1);
        for (std::size_t j = 0; j <= N; ++j) v[j] = static_cast<double>(j) * tau;
        errs.push_back(std::fabs(apply_memory(s, v) - exact));
    }
    // observed order >= 1
    for (std::size_t i = 1; i < errs.size(); ++i) CHECK(errs[i] < 0.65 * errs[i - 1]);
}

TEST_CASE("backend agreement is first order across the catalogue") {
    // CQ and PI values of the memory derivative of v(t) = t e^{-t} at t=1
    // disagree at O(tau); halving tau halves the gap within [1.6, 2.4]
    for (const auto& kernel : standard_catalogue()) {
        if (kernel.family == KernelFamily::Classical) continue; // identical schemes
        INFO(kernel.id);
        auto value = [&](MemoryBackend backend, std::size_t N) {
            double tau = 1.0 / static_cast<double>(N);
            MemoryScheme s = backend == MemoryBackend::CQ_BackwardEuler
                                 ? cq_weights(kernel, tau, N)
                                 : pi_weights(kernel, tau, N);
            std::vector<double> v(N + 1);
            for (std::size_t j = 0; j <= N; ++j) {
                double t = static_cast<double>(j) * tau;
                v[j] = t * std::exp(-t);
            }
            return apply_memory(s, v);
        };
        double d1 = std::fabs(value(MemoryBackend::CQ_BackwardEuler, 64) -
                              value(MemoryBackend::ProductIntegration, 64));
        double d2 = std::fabs(value(MemoryBackend::CQ_BackwardEuler, 128) -
                              value(MemoryBackend::ProductIntegration, 128));
        double ratio = d1 / d2;
        CHECK(ratio >= 1.6);
        CHECK(ratio <= 2.4);
    }
}

TEST_CASE("discrete transfer function converges to psi") {
    for (const auto& kernel : standard_catalogue()) {
        INFO(kernel.id);
        for (double lam : {1.0, 2.0}) {
            auto transfer = [&](double tau) {
                std::size_t N = 400;
                MemoryScheme s = cq_weights(kernel, tau, N);
                double z = std::exp(-lam * tau);
                double acc = 0.0, zp = 1.0;
                for (std::size_t j = 0; j <= N; ++j) {
                    acc += s.weights[j] * zp;
                    zp *= z;
                }
                return acc;
            };
            double p = psi(kernel, lam);
            double e1 = std::fabs(transfer(0.02) - p);
            double e2 = std::fabs(transfer(0.01) - p);
            CHECK(e2 < 0.7 * e1 + 1e-12);
        }
    }
}

TEST_CASE("CQ weight signs for Bernstein symbols") {
    for (const auto& kernel : standard_catalogue()) {
        INFO(kernel.id);
        MemoryScheme s = cq_weights(kernel, 0.05, 80);
        CHECK(s.weights[0] > 0.0);
        for (std::size_t j = 1; j <= 80; ++j)
            CHECK(s.weights[j] <= 1e-8 * s.weights[0]);
    }
}

TEST_CASE("apply_memory_all matches the per-node sums") {
    KernelSpec cap = make_caputo(0.3);
    const std::size_t N = 200;
    MemoryScheme s = cq_weights(cap, 0.01, N);
    std::vector<double> v(N + 1);
    for (std::size_t j = 0; j <= N; ++j) v[j] = std::sin(0.1 * static_cast<double>(j));
    v[0] = 0.0;
    auto all = apply_memory_all(s, v);
    for (std::size_t n : {std::size_t(1), std::size_t(57), N}) {
        std::vector<double> head(v.begin(), v.begin() + static_cast<long>(n) + 1);
        CHECK(all[n] == doctest::Approx(apply_memory(s, head)).epsilon(1e-11));
    }
}

TEST_CASE("history length guard") {
    MemoryScheme s = cq_weights(make_caputo(0.5), 0.1, 4);
    CHECK_THROWS_AS(apply_memory(s, std::vector<double>(7, 1.0)), HistoryTooLong);
}
