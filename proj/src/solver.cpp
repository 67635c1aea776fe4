#include "gfrac/solver.hpp"
#include "gfrac/errors.hpp"

#include <Eigen/SparseLU>
#include <cmath>

namespace gfrac {

namespace {

Eigen::VectorXd zero_like(const Eigen::VectorXd& v) {
    return Eigen::VectorXd::Zero(v.size());
}

// inner run loop with per-node forcing values (used by both strategies)
Trajectory run_nodes(const KernelSpec& kernel, const OperatorModel& op,
                     const Eigen::VectorXd& u0,
                     const std::vector<Eigen::VectorXd>& f_nodes, const SolveConfig& cfg) {
    const std::size_t N = cfg.n_steps;
    const double tau = cfg.tau;
    MemoryScheme scheme = cfg.backend == MemoryBackend::CQ_BackwardEuler
                              ? cq_weights(kernel, tau, N)
                              : pi_weights(kernel, tau, N);

    Trajectory traj;
    traj.times.resize(N + 1);
    traj.states.reserve(N + 1);
    traj.states.push_back(u0);
    traj.diagnostics.resize(N);
    std::vector<Eigen::VectorXd> v_hist;
    v_hist.reserve(N + 1);
    v_hist.push_back(zero_like(u0));

    for (std::size_t n = 1; n <= N; ++n) {
        double t_n = static_cast<double>(n) * tau;
        traj.times[n] = t_n;
        // hard step failures carry t_n in their message and propagate as-is
        StepResult r = step(scheme, op, v_hist, u0, t_n, f_nodes[n], cfg.newton);
        traj.memory_ops += n;
        traj.diagnostics[n - 1] = {r.residual, r.iterations, r.converged};
        v_hist.push_back(r.u - u0);
        traj.states.push_back(std::move(r.u));
    }
    traj.times[0] = 0.0;

    traj.norm_h.resize(N + 1);
    traj.norm_v.resize(N + 1);
    traj.energy.resize(N + 1);
    for (std::size_t n = 0; n <= N; ++n) {
        const auto& u = traj.states[n];
        traj.norm_h[n] = op.norm_h(u);
        traj.norm_v[n] = op.norm_v(u);
        traj.energy[n] = op.inner_h(op.apply(traj.times[n], u), u);
    }
    return traj;
}

// residual of the integral form (exact conjugate cell integrals, left-point
// sampling of g = A - f), reported together with the left-rule tolerance
void attach_integral_residual(Trajectory& traj, const KernelSpec& kernel,
                              const OperatorModel& op,
                              const std::vector<Eigen::VectorXd>& f_nodes,
                              double tau, double newton_abs_tol) {
    if (!kernel.k_tilde_primitive) return;
    const std::size_t N = traj.states.size() - 1;
    std::vector<Eigen::VectorXd> g(N + 1);
    for (std::size_t j = 0; j <= N; ++j)
        g[j] = op.apply(traj.times[j], traj.states[j]) - f_nodes[j];
    std::vector<double> Kt(N + 2);
    for (std::size_t i = 0; i <= N + 1; ++i)
        Kt[i] = kernel.k_tilde_primitive(static_cast<double>(i) * tau);

    double worst = 0.0;
    for (std::size_t n = 1; n <= N; ++n) {
        Eigen::VectorXd acc = zero_like(traj.states[0]);
        for (std::size_t j = 1; j <= n; ++j)
            acc += (Kt[n - j + 1] - Kt[n - j]) * g[j - 1];
        Eigen::VectorXd res = traj.states[n] - traj.states[0] + acc;
        worst = std::max(worst, op.norm_h(res));
    }
    double slope = 0.0;
    for (std::size_t j = 1; j <= N; ++j)
        slope = std::max(slope, op.norm_h(g[j] - g[j - 1]) / tau);
    traj.integral_residual = worst;
    traj.integral_residual_tol = (slope * tau + 10.0 * newton_abs_tol) * Kt[N + 1];
}

} // namespace

StepResult step(const MemoryScheme& scheme, const OperatorModel& op,
                const std::vector<Eigen::VectorXd>& v_history, const Eigen::VectorXd& u0,
                double t_n, const Eigen::VectorXd& f_n, const NewtonOptions& opts) {
    if (v_history.empty()) throw ParamOutOfRange("step: history must contain v_0");
    if (v_history.size() > scheme.n_steps)
        throw HistoryTooLong("step: history exceeds scheme horizon");
    const double w0 = scheme.w0();
    const std::size_t n = v_history.size(); // index of the step being computed

    // lag part sum_{j=1}^{n} w_j v_{n-j}
    Eigen::VectorXd lag = zero_like(u0);
    for (std::size_t j = 1; j <= n; ++j) lag += scheme.weights[j] * v_history[n - j];
    Eigen::VectorXd rhs = f_n - lag;

    Eigen::VectorXd v = v_history.back(); // initial guess: previous state
    auto residual = [&](const Eigen::VectorXd& x) -> Eigen::VectorXd {
        return w0 * x + op.apply(t_n, x + u0) - rhs;
    };
    Eigen::VectorXd R = residual(v);
    double rnorm = op.norm_h(R);
    const double r0 = rnorm;

    StepResult out;
    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
    int it = 0;
    for (; it < opts.max_iter; ++it) {
        if (rnorm / w0 <= opts.abs_tol || rnorm <= opts.rel_tol * r0) break;
        Eigen::SparseMatrix<double> J = op.jacobian(t_n, v + u0);
        for (int i = 0; i < J.rows(); ++i) J.coeffRef(i, i) += w0;
        J.makeCompressed();
        lu.compute(J);
        if (lu.info() != Eigen::Success)
            throw SingularJacobian("step: singular Jacobian at t=" + std::to_string(t_n) +
                                   " (consider raising eps_reg)");
        Eigen::VectorXd dv = lu.solve(-R);
        double damping = 1.0;
        bool improved = false;
        for (int k = 0; k <= opts.max_halvings; ++k) {
            Eigen::VectorXd trial = v + damping * dv;
            Eigen::VectorXd Rt = residual(trial);
            double rt = op.norm_h(Rt);
            if (rt < rnorm) {
                v = std::move(trial);
                R = std::move(Rt);
                rnorm = rt;
                improved = true;
                break;
            }
            damping *= 0.5;
        }
        if (!improved) break; // stagnation: return best iterate flagged below
    }
    out.residual = rnorm / w0;
    out.iterations = it;
    out.converged = (rnorm / w0 <= opts.abs_tol || rnorm <= opts.rel_tol * r0);
    out.u = v + u0;
    return out;
}

Trajectory run(const KernelSpec& kernel, const OperatorModel& op, const Eigen::VectorXd& u0,
               const Forcing& forcing, const SolveConfig& cfg) {
    if (!(cfg.tau > 0.0) || cfg.n_steps < 1)
        throw ParamOutOfRange("run: requires tau > 0 and n_steps >= 1");
    if (u0.size() != op.dim) throw DimensionMismatch("run: u0 size vs operator dim");

    if (cfg.strategy == SolveStrategy::WeightedFixedPoint)
        return weighted_fixed_point(kernel, op, u0, forcing, cfg).trajectory;

    std::vector<Eigen::VectorXd> f_nodes(cfg.n_steps + 1);
    for (std::size_t n = 0; n <= cfg.n_steps; ++n)
        f_nodes[n] = forcing ? forcing(static_cast<double>(n) * cfg.tau) : zero_like(u0);

    Trajectory traj = run_nodes(kernel, op, u0, f_nodes, cfg);
    attach_integral_residual(traj, kernel, op, f_nodes, cfg.tau, cfg.newton.abs_tol);
    return traj;
}

double choose_gamma(const KernelSpec& kernel, double c1) {
    if (c1 < 0.0) throw ParamOutOfRange("choose_gamma: C1 >= 0 required");
    if (c1 == 0.0) return 1.0;
    const double margin = 0.25;
    const double target = 2.0 * c1 * (1.0 + margin);
    double hi = 1.0;
    if (psi(kernel, hi) < target) {
        while (psi(kernel, hi) < target) {
            hi *= 2.0;
            if (hi > std::pow(2.0, 40)) {
                double sup_est = psi(kernel, std::pow(2.0, 40));
                throw NotAttainable("choose_gamma: psi^k appears bounded by ~" +
                                    std::to_string(sup_est) + " < 2*C1 target " +
                                    std::to_string(target));
            }
        }
    }
    double lo = hi / 2.0;
    while (lo > 1e-12 && psi(kernel, lo) >= target) {
        hi = lo;
        lo /= 2.0;
    }
    for (int i = 0; i < 200; ++i) {
        double mid = 0.5 * (lo + hi);
        if (psi(kernel, mid) >= target)
            hi = mid;
        else
            lo = mid;
        if (hi - lo <= 1e-13 * hi) break;
    }
    return hi;
}

double weighted_path_distance(const Trajectory& a, const Trajectory& b,
                              const OperatorModel& op, double gamma) {
    if (a.states.size() != b.states.size())
        throw DimensionMismatch("weighted_path_distance: length mismatch");
    double acc = 0.0;
    double tau = a.times.size() > 1 ? a.times[1] - a.times[0] : 0.0;
    for (std::size_t n = 0; n < a.states.size(); ++n) {
        Eigen::VectorXd d = a.states[n] - b.states[n];
        acc += op.inner_h(d, d) * std::exp(-gamma * a.times[n]) * tau;
    }
    return std::sqrt(acc);
}

FixedPointResult weighted_fixed_point(const KernelSpec& kernel, const OperatorModel& op,
                                      const Eigen::VectorXd& u0, const Forcing& forcing,
                                      const SolveConfig& cfg) {
    const double c1 = op.constants.C1;
    const double gamma = cfg.fixedpoint.gamma;
    const double psi_gamma = psi(kernel, gamma);
    if (!(psi_gamma > 2.0 * c1))
        throw NotAttainable("weighted_fixed_point: psi^k(gamma)=" + std::to_string(psi_gamma) +
                            " does not exceed 2*C1=" + std::to_string(2.0 * c1));
    const double bound = c1 > 0.0 ? 2.0 * c1 / psi_gamma : 0.0;

    const std::size_t N = cfg.n_steps;
    const double tau = cfg.tau;
    std::vector<Eigen::VectorXd> f_nodes(N + 1);
    for (std::size_t n = 0; n <= N; ++n)
        f_nodes[n] = forcing ? forcing(static_cast<double>(n) * tau)
                             : Eigen::VectorXd::Zero(u0.size());

    // inner operator A + C1 I is monotone; its runs use NewtonPerStep
    OperatorModel inner = op;
    inner.id = op.id + "+C1*I";
    inner.constants.C1 = 0.0;
    auto base_apply = op.apply;
    auto base_jac = op.jacobian;
    inner.apply = [base_apply, c1](double t, const Eigen::VectorXd& u) -> Eigen::VectorXd {
        return base_apply(t, u) + c1 * u;
    };
    inner.jacobian = [base_jac, c1](double t, const Eigen::VectorXd& u) {
        Eigen::SparseMatrix<double> J = base_jac(t, u);
        for (int i = 0; i < J.rows(); ++i) J.coeffRef(i, i) += c1;
        return J;
    };

    SolveConfig inner_cfg = cfg;
    inner_cfg.strategy = SolveStrategy::NewtonPerStep;

    std::vector<Eigen::VectorXd> g(N + 1, Eigen::VectorXd::Zero(u0.size()));
    FixedPointResult result;
    double prev_inc = -1.0;
    int violations = 0;
    Trajectory traj;
    for (int sweep = 1; sweep <= cfg.fixedpoint.max_sweeps; ++sweep) {
        std::vector<Eigen::VectorXd> rhs(N + 1);
        for (std::size_t n = 0; n <= N; ++n) rhs[n] = f_nodes[n] + g[n];
        traj = run_nodes(kernel, inner, u0, rhs, inner_cfg);
        double inc2 = 0.0;
        std::vector<Eigen::VectorXd> g_new(N + 1);
        for (std::size_t n = 0; n <= N; ++n) {
            g_new[n] = c1 * traj.states[n];
            Eigen::VectorXd d = g_new[n] - g[n];
            inc2 += op.inner_h(d, d) * std::exp(-gamma * traj.times[n]) * tau;
        }
        double inc = std::sqrt(inc2);
        result.increments.push_back(inc);
        result.sweeps = sweep;
        if (prev_inc > 0.0) {
            double rho = inc / prev_inc;
            result.rho_hat = std::max(result.rho_hat, rho);
            if (rho > bound + 0.1) {
                if (++violations >= 3)
                    throw ContractionViolated(
                        "weighted_fixed_point: measured contraction " + std::to_string(rho) +
                        " above 2*C1/psi + 0.1 three times (discretization too coarse)");
            } else {
                violations = 0;
            }
        }
        g = std::move(g_new);
        prev_inc = inc;
        if (inc < cfg.fixedpoint.sweep_tol) break;
    }
    attach_integral_residual(traj, kernel, op, f_nodes, tau, cfg.newton.abs_tol);
    result.trajectory = std::move(traj);
    return result;
}

} // namespace gfrac
