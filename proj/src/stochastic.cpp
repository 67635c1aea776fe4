#include "gfrac/stochastic.hpp"
#include "gfrac/errors.hpp"
#include "gfrac/quadrature.hpp"

#include <cmath>
#include <mutex>
#include <thread>

namespace gfrac {

// ---- Philox ----------------------------------------------------------------

namespace {

constexpr std::uint32_t kPhiloxM0 = 0xD2511F53u;
constexpr std::uint32_t kPhiloxM1 = 0xCD9E8D57u;
constexpr std::uint32_t kPhiloxW0 = 0x9E3779B9u;
constexpr std::uint32_t kPhiloxW1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) {
    std::uint64_t p = static_cast<std::uint64_t>(a) * b;
    hi = static_cast<std::uint32_t>(p >> 32);
    lo = static_cast<std::uint32_t>(p);
}

inline double u64_to_unit(std::uint64_t x) {
    // (0,1): 53 mantissa bits, offset half an ulp away from zero
    return (static_cast<double>(x >> 11) + 0.5) * (1.0 / 9007199254740992.0);
}

} // namespace

std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> ctr,
                                        std::array<std::uint32_t, 2> key) {
    for (int round = 0; round < 10; ++round) {
        std::uint32_t hi0, lo0, hi1, lo1;
        mulhilo(kPhiloxM0, ctr[0], hi0, lo0);
        mulhilo(kPhiloxM1, ctr[2], hi1, lo1);
        ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
        key[0] += kPhiloxW0;
        key[1] += kPhiloxW1;
    }
    return ctr;
}

double CounterNormals::normal(std::uint32_t step, std::uint32_t idx) const {
    std::array<std::uint32_t, 4> ctr = {
        static_cast<std::uint32_t>(path_), static_cast<std::uint32_t>(path_ >> 32),
        step, idx / 2};
    std::array<std::uint32_t, 2> key = {static_cast<std::uint32_t>(seed_),
                                        static_cast<std::uint32_t>(seed_ >> 32)};
    auto r = philox4x32(ctr, key);
    double u1 = u64_to_unit((static_cast<std::uint64_t>(r[0]) << 32) | r[1]);
    double u2 = u64_to_unit((static_cast<std::uint64_t>(r[2]) << 32) | r[3]);
    double rad = std::sqrt(-2.0 * std::log(u1));
    double ang = 2.0 * M_PI * u2;
    return (idx % 2 == 0) ? rad * std::cos(ang) : rad * std::sin(ang);
}

// ---- effective kernel --------------------------------------------------------

namespace {

bool same_kernel(const KernelSpec& a, const KernelSpec& b) {
    return a.family == b.family && a.params == b.params;
}

struct KappaForm {
    std::function<double(double)> eval;
    std::function<double(double)> primitive; // empty on the numeric-cells path
    bool closed = false;
};

KappaForm build_kappa(const KernelSpec& k1, const KernelSpec& k2) {
    KappaForm out;
    if (same_kernel(k1, k2)) {
        // Laplace product Lktilde1 * Lk1 = 1/lambda, so kappa is identically 1
        out.eval = [](double) { return 1.0; };
        out.primitive = [](double t) { return std::max(t, 0.0); };
        out.closed = true;
        return out;
    }
    if (k1.family == KernelFamily::Caputo && k2.family == KernelFamily::Caputo) {
        double beta = k1.params.at("beta");
        double gam = k2.params.at("beta");
        if (beta - gam <= -0.5)
            throw NotSquareIntegrable(
                "effective_kernel: Caputo pair requires gamma < beta + 1/2 (got beta=" +
                std::to_string(beta) + ", gamma=" + std::to_string(gam) + ")");
        double e = beta - gam;
        double g1 = std::tgamma(1.0 + e), g2 = std::tgamma(2.0 + e);
        out.eval = [e, g1](double t) { return std::pow(t, e) / g1; };
        out.primitive = [e, g2](double t) { return t <= 0.0 ? 0.0 : std::pow(t, 1.0 + e) / g2; };
        out.closed = true;
        return out;
    }
    if (k2.family == KernelFamily::Classical && k1.has_closed_conjugate()) {
        out.eval = k1.k_tilde_eval;
        out.primitive = k1.k_tilde_primitive;
        out.closed = true;
        return out;
    }
    if (k1.has_closed_conjugate() && k2.k_deriv) {
        // kappa = ktilde1 * k2 through the symmetric by-parts convolution;
        // primitive via int_0^t ktilde1(t-s) K2(s) ds (single mild singularity)
        KernelSpec a = k1, b = k2;
        out.eval = [a, b](double t) {
            return convolve_singular(
                {a.k_tilde_eval, a.k_tilde_primitive, a.k_tilde_deriv},
                {b.k_eval, b.k_primitive, b.k_deriv}, t);
        };
        out.primitive = [a, b](double t) {
            if (t <= 0.0) return 0.0;
            auto f = [&](double s) { return a.k_tilde_eval(t - s) * b.k_primitive(s); };
            return integrate_de(f, 0.0, t, 1e-10).value;
        };
        out.closed = true;
        return out;
    }
    return out; // numeric-cells fallback, resolved against a grid later
}

// square-integrability probe on (0,1]: midpoint sums at two refinements
void check_l2loc(const std::function<double(double)>& kappa) {
    auto midsum = [&](std::size_t m) {
        double tau = 1.0 / static_cast<double>(m);
        double acc = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
            double v = kappa((static_cast<double>(i) + 0.5) * tau);
            acc += v * v * tau;
        }
        return acc;
    };
    double s1 = midsum(256), s2 = midsum(512);
    if (!(std::isfinite(s2)) || s2 > 1.5 * s1 + 1.0)
        throw NotSquareIntegrable("effective kernel: int_0^1 kappa^2 appears divergent");
}

} // namespace

NoiseModel make_noise_model(const KernelSpec& k1, const KernelSpec& k2,
                            std::function<Eigen::MatrixXd(double)> B, int d_state,
                            int d_noise, std::uint64_t master_seed) {
    if (d_state < 1 || d_noise < 1)
        throw ParamOutOfRange("make_noise_model: dimensions must be positive");
    NoiseModel m;
    m.k1 = k1;
    m.k2 = k2;
    m.B = std::move(B);
    m.d_state = d_state;
    m.d_noise = d_noise;
    m.master_seed = master_seed;
    KappaForm kf = build_kappa(k1, k2);
    m.kappa_closed_form = kf.closed;
    if (kf.closed) {
        m.kappa_eval = kf.eval;
        m.kappa_primitive = kf.primitive;
        check_l2loc(m.kappa_eval);
    }
    {
        Eigen::MatrixXd b0 = m.B(0.0);
        if (b0.rows() != d_state || b0.cols() != d_noise)
            throw DimensionMismatch("make_noise_model: B(0) shape vs declared dimensions");
    }
    return m;
}

std::vector<double> effective_kernel(const KernelSpec& k1, const KernelSpec& k2,
                                     double tau, std::size_t n) {
    if (!(tau > 0.0) || n < 1)
        throw ParamOutOfRange("effective_kernel: requires tau > 0, n >= 1");
    KappaForm kf = build_kappa(k1, k2);
    std::vector<double> out(n);
    if (kf.closed) {
        for (std::size_t i = 1; i <= n; ++i) out[i - 1] = kf.eval(static_cast<double>(i) * tau);
        return out;
    }
    // numeric route: piecewise-constant conjugate cells against exact k2 cells
    auto [cells, rep] = sonine_conjugate(k1, tau, n, 1e-6);
    (void)rep;
    std::vector<double> K2(n + 1);
    for (std::size_t i = 0; i <= n; ++i) K2[i] = k2.k_primitive(static_cast<double>(i) * tau);
    for (std::size_t i = 1; i <= n; ++i) {
        double acc = 0.0;
        for (std::size_t j = 1; j <= i; ++j) acc += cells[j - 1] * (K2[i - j + 1] - K2[i - j]);
        out[i - 1] = acc;
    }
    // L2 probe on the sampled values over (0, min(1, n tau)]
    double s = 0.0;
    std::size_t m = std::min<std::size_t>(n, static_cast<std::size_t>(std::floor(1.0 / tau)));
    for (std::size_t i = 0; i < m; ++i) s += out[i] * out[i] * tau;
    if (!std::isfinite(s))
        throw NotSquareIntegrable("effective_kernel: kappa samples not square-summable");
    return out;
}

std::vector<double> effective_kernel_cells(const NoiseModel& model, double tau, std::size_t n) {
    std::vector<double> cells(n);
    if (model.kappa_closed_form && model.kappa_primitive) {
        double prev = 0.0;
        for (std::size_t i = 1; i <= n; ++i) {
            double cur = model.kappa_primitive(static_cast<double>(i) * tau);
            cells[i - 1] = (cur - prev) / tau;
            prev = cur;
        }
        return cells;
    }
    // numeric path: midpoint values of the sampled effective kernel
    std::vector<double> mids = effective_kernel(model.k1, model.k2, 0.5 * tau, 2 * n);
    for (std::size_t i = 1; i <= n; ++i) cells[i - 1] = mids[2 * i - 2]; // kappa(t_{i-1/2})
    return cells;
}

std::vector<Eigen::VectorXd> sample_noise_path(const NoiseModel& model, double tau,
                                               std::size_t n, std::uint64_t path_id) {
    std::vector<double> kbar = effective_kernel_cells(model, tau, n);
    CounterNormals rng(model.master_seed, path_id);
    const double sq = std::sqrt(tau);
    // increments B(t_j) xi_j sqrt(tau), left-point evaluation of B
    std::vector<Eigen::VectorXd> inc(n);
    for (std::size_t j = 0; j < n; ++j) {
        Eigen::VectorXd xi(model.d_noise);
        for (int c = 0; c < model.d_noise; ++c)
            xi[c] = rng.normal(static_cast<std::uint32_t>(j), static_cast<std::uint32_t>(c));
        inc[j] = model.B(static_cast<double>(j) * tau) * xi * sq;
    }
    std::vector<Eigen::VectorXd> F(n + 1, Eigen::VectorXd::Zero(model.d_state));
    for (std::size_t m = 1; m <= n; ++m) {
        Eigen::VectorXd acc = Eigen::VectorXd::Zero(model.d_state);
        for (std::size_t j = 0; j < m; ++j) acc += kbar[m - 1 - j] * inc[j];
        F[m] = std::move(acc);
    }
    return F;
}

double discrete_variance(const NoiseModel& model, double tau, std::size_t n) {
    std::vector<double> kbar = effective_kernel_cells(model, tau, n);
    double acc = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        double hs = model.B(static_cast<double>(j) * tau).squaredNorm();
        acc += kbar[n - 1 - j] * kbar[n - 1 - j] * hs * tau;
    }
    return acc;
}

SpdeResult solve_spde(const KernelSpec& k1, const NoiseModel& noise, const OperatorModel& op,
                      const Eigen::VectorXd& x0, const SolveConfig& cfg, std::size_t n_paths,
                      int threads, bool keep_paths) {
    if (n_paths < 1) throw ParamOutOfRange("solve_spde: n_paths >= 1 required");
    if (x0.size() != op.dim) throw DimensionMismatch("solve_spde: x0 size vs operator dim");
    const std::size_t N = cfg.n_steps;
    const double tau = cfg.tau;

    SpdeResult result;
    result.stats.times.resize(N + 1);
    for (std::size_t m = 0; m <= N; ++m) result.stats.times[m] = static_cast<double>(m) * tau;

    // per-path solve; X = u + F where u solves the shifted equation
    std::mutex paths_mu;
    auto solve_one = [&](std::uint64_t pid) -> std::vector<Eigen::VectorXd> {
        std::vector<Eigen::VectorXd> F = sample_noise_path(noise, tau, N, pid);
        OperatorModel shifted = op;
        auto base_apply = op.apply;
        auto base_jac = op.jacobian;
        shifted.apply = [base_apply, &F, tau](double t, const Eigen::VectorXd& u) {
            std::size_t idx = static_cast<std::size_t>(std::llround(t / tau));
            return base_apply(t, u + F[idx]);
        };
        shifted.jacobian = [base_jac, &F, tau](double t, const Eigen::VectorXd& u) {
            std::size_t idx = static_cast<std::size_t>(std::llround(t / tau));
            return base_jac(t, u + F[idx]);
        };
        SolveConfig pcfg = cfg;
        pcfg.strategy = SolveStrategy::NewtonPerStep;
        Trajectory traj;
        try {
            traj = run(k1, shifted, x0, {}, pcfg);
        } catch (const Error& e) {
            throw NewtonDiverged("path " + std::to_string(pid) + ": " + e.what());
        }
        std::vector<Eigen::VectorXd> X(N + 1);
        for (std::size_t m = 0; m <= N; ++m) X[m] = traj.states[m] + F[m];
        if (keep_paths) {
            traj.states = X;
            std::lock_guard<std::mutex> lock(paths_mu);
            result.paths.push_back(std::move(traj));
        }
        return X;
    };

    int nthreads = threads > 0 ? threads : static_cast<int>(std::thread::hardware_concurrency());
    nthreads = std::max(1, std::min<int>(nthreads, static_cast<int>(n_paths)));

    struct Accum {
        std::vector<Eigen::VectorXd> sum, sumsq, comp_s, comp_q; // Kahan-compensated
        void init(std::size_t nodes, int dim) {
            sum.assign(nodes, Eigen::VectorXd::Zero(dim));
            sumsq.assign(nodes, Eigen::VectorXd::Zero(dim));
            comp_s = sum;
            comp_q = sumsq;
        }
        void add(const std::vector<Eigen::VectorXd>& X) {
            for (std::size_t m = 0; m < X.size(); ++m)
                for (int i = 0; i < X[m].size(); ++i) {
                    double y = X[m][i] - comp_s[m][i];
                    double t = sum[m][i] + y;
                    comp_s[m][i] = (t - sum[m][i]) - y;
                    sum[m][i] = t;
                    double q = X[m][i] * X[m][i] - comp_q[m][i];
                    double t2 = sumsq[m][i] + q;
                    comp_q[m][i] = (t2 - sumsq[m][i]) - q;
                    sumsq[m][i] = t2;
                }
        }
        void merge(const Accum& o) {
            for (std::size_t m = 0; m < sum.size(); ++m) {
                sum[m] += o.sum[m];
                sumsq[m] += o.sumsq[m];
            }
        }
    };

    std::vector<Accum> partial(static_cast<std::size_t>(nthreads));
    for (auto& a : partial) a.init(N + 1, op.dim);
    std::exception_ptr first_error = nullptr;
    std::mutex err_mu;

    auto worker = [&](int tid) {
        try {
            for (std::uint64_t pid = static_cast<std::uint64_t>(tid); pid < n_paths;
                 pid += static_cast<std::uint64_t>(nthreads))
                partial[static_cast<std::size_t>(tid)].add(solve_one(pid));
        } catch (...) {
            std::lock_guard<std::mutex> lock(err_mu);
            if (!first_error) first_error = std::current_exception();
        }
    };
    if (nthreads == 1) {
        worker(0);
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < nthreads; ++t) pool.emplace_back(worker, t);
        for (auto& th : pool) th.join();
    }
    if (first_error) std::rethrow_exception(first_error);

    Accum total;
    total.init(N + 1, op.dim);
    for (const auto& a : partial) total.merge(a); // fixed thread-index order

    const double np = static_cast<double>(n_paths);
    result.stats.n_paths = n_paths;
    result.stats.mean.resize(N + 1);
    result.stats.var.resize(N + 1);
    result.stats.se.resize(N + 1);
    for (std::size_t m = 0; m <= N; ++m) {
        result.stats.mean[m] = total.sum[m] / np;
        Eigen::VectorXd v(op.dim);
        for (int i = 0; i < op.dim; ++i) {
            double mu = result.stats.mean[m][i];
            double raw = total.sumsq[m][i] - np * mu * mu;
            v[i] = n_paths > 1 ? std::max(0.0, raw / (np - 1.0)) : 0.0;
        }
        result.stats.var[m] = v;
        result.stats.se[m] = (v / np).cwiseSqrt();
    }
    return result;
}

} // namespace gfrac
