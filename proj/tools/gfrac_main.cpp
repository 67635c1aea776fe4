#include "gfrac/config.hpp"
#include "gfrac/errors.hpp"
#include "gfrac/io.hpp"
#include "gfrac/kernels.hpp"
#include "gfrac/memory.hpp"
#include "gfrac/operators.hpp"
#include "gfrac/solver.hpp"
#include "gfrac/stochastic.hpp"
#include "gfrac/verify.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

namespace {

using namespace gfrac;

constexpr int kExitOk = 0;
constexpr int kExitCheckFailed = 1;
constexpr int kExitValidation = 2;
constexpr int kExitIo = 3;

int resolve_threads(int flag_value) {
    if (const char* env = std::getenv("GFRAC_THREADS")) {
        int v = std::atoi(env);
        if (v > 0) return v;
    }
    return flag_value;
}

struct KernelArgs {
    std::string family;
    std::optional<double> beta, delta, lambda_w, a, b, alpha;
    std::string file;

    KernelSpec build() const {
        if (family == "custom" || !file.empty()) {
            std::ifstream in(file);
            if (!in) throw IoError("kernel: cannot open sample file '" + file + "'");
            std::vector<double> t, k;
            std::string line;
            while (std::getline(in, line)) {
                if (line.empty() || line[0] == '#' || line[0] == 't') continue;
                double tv, kv;
                if (std::sscanf(line.c_str(), "%lf,%lf", &tv, &kv) == 2) {
                    t.push_back(tv);
                    k.push_back(kv);
                }
            }
            return make_custom_samples(t, k, "custom(" + file + ")");
        }
        std::map<std::string, double> params;
        if (beta) params["beta"] = *beta;
        if (delta) params["delta"] = *delta;
        if (lambda_w) params["lambda_w"] = *lambda_w;
        if (a) params["a"] = *a;
        if (b) params["b"] = *b;
        if (alpha) params["alpha"] = *alpha;
        return make_kernel(family, params);
    }
};

int cmd_kernel(const KernelArgs& args, const std::string& action, const std::string& outdir) {
    KernelSpec kernel = args.build();
    if (action == "inspect") {
        std::printf("kernel: %s  (singular at 0: %s, closed conjugate: %s)\n",
                    kernel.id.c_str(), kernel.singular_at_zero ? "yes" : "no",
                    kernel.has_closed_conjugate() ? "yes" : "no");
        std::printf("%12s %14s %14s %14s\n", "t", "k(t)", "K(t)", "ktilde(t)");
        for (double t : {0.01, 0.1, 0.5, 1.0, 2.0, 5.0, 10.0}) {
            double kt = kernel.k_eval(t);
            double Kt = kernel.k_primitive(t);
            if (kernel.has_closed_conjugate())
                std::printf("%12g %14.6g %14.6g %14.6g\n", t, kt, Kt, kernel.k_tilde_eval(t));
            else
                std::printf("%12g %14.6g %14.6g %14s\n", t, kt, Kt, "-");
        }
        std::printf("%12s %14s\n", "lambda", "psi(lambda)");
        for (double lam : {0.5, 1.0, 2.0, 5.0, 10.0})
            std::printf("%12g %14.8g\n", lam, psi(kernel, lam));
        return kExitOk;
    }
    if (action == "verify") {
        auto grid = log_grid(1e-6, 1e6, 200);
        auto rep = verify_kernel_conditions(kernel, grid);
        atomic_write(outdir + "/kernel_conditions.json", json_kernel_conditions(rep, kernel.id));
        for (const auto& r : rep.records)
            std::printf("%-24s %s  (worst %.3g at t=%.3g)\n", r.condition.c_str(),
                        r.pass ? "pass" : "FAIL", r.worst_value, r.worst_point);
        if (!rep.all_pass()) {
            std::cerr << json_error("ConditionFailed", "kernel conditions not satisfied");
            return kExitValidation;
        }
        return kExitOk;
    }
    if (action == "sonine") {
        double tol = kernel.has_closed_conjugate() ? 1e-6 : 1e-4;
        auto [values, rep] = sonine_conjugate(kernel, 1e-3, 10000, tol);
        (void)values;
        atomic_write(outdir + "/sonine_report.json", json_sonine_report(rep, kernel.id));
        std::printf("sonine %s: method=%s max_residual=%.3e (tol %.0e)\n", kernel.id.c_str(),
                    rep.method == SonineMethod::ClosedForm ? "closed_form" : "numeric_volterra",
                    rep.max_residual, tol);
        return kExitOk;
    }
    throw ConfigError("kernel: unknown action '" + action + "' (inspect|verify|sonine)");
}

int cmd_run(const std::string& config_path, const std::string& outdir_override) {
    ScenarioConfig cfg = load_config(config_path);
    Scenario sc = build_scenario(cfg);
    std::string outdir = outdir_override.empty() ? cfg.output_dir : outdir_override;

    // sampled (H1)-(H4) validation before stepping; the report always lands on disk
    HConditionReport hrep = validate_H_conditions(sc.op, 100);
    atomic_write(outdir + "/" + cfg.output_prefix + "_operator_conditions.json",
                 json_h_conditions(hrep, sc.op.id));
    if (!hrep.h2_pass || !hrep.h3_pass)
        throw ConfigError("run: operator '" + sc.op.id +
                          "' failed the (H2)/(H3) sampling validation");

    Trajectory traj = run(sc.kernel, sc.op, sc.u0, sc.forcing, sc.solve);
    atomic_write(outdir + "/" + cfg.output_prefix + "_trajectory.csv", csv_trajectory(traj));
    atomic_write(outdir + "/" + cfg.output_prefix + "_diagnostics.json",
                 json_trajectory_diagnostics(traj));
    if (cfg.write_weights) {
        MemoryScheme scheme = cfg.backend == MemoryBackend::CQ_BackwardEuler
                                  ? cq_weights(sc.kernel, cfg.tau, cfg.n_steps)
                                  : pi_weights(sc.kernel, cfg.tau, cfg.n_steps);
        atomic_write(outdir + "/" + cfg.output_prefix + "_weights.csv", csv_weights(scheme));
    }
    std::printf("run complete: %zu steps, final |u|_H = %.6g\n", traj.diagnostics.size(),
                traj.norm_h.back());
    return kExitOk;
}

int cmd_spde(const std::string& config_path, const std::string& outdir_override,
             std::optional<std::uint64_t> seed_override, int threads) {
    ScenarioConfig cfg = load_config(config_path);
    if (!cfg.noise) throw ConfigError("spde: config has no noise section");
    if (seed_override) cfg.noise->seed = *seed_override;
    Scenario sc = build_scenario(cfg);
    std::string outdir = outdir_override.empty() ? cfg.output_dir : outdir_override;

    const int d = sc.op.dim;
    const double bconst = cfg.noise->b_const;
    const int dn = cfg.noise->d_noise;
    auto B = [d, dn, bconst](double) {
        Eigen::MatrixXd m = Eigen::MatrixXd::Zero(d, dn);
        for (int i = 0; i < std::min(d, dn); ++i) m(i, i) = bconst;
        return m;
    };
    NoiseModel noise =
        make_noise_model(sc.kernel, *sc.kernel2, B, d, dn, cfg.noise->seed);
    SpdeResult res = solve_spde(sc.kernel, noise, sc.op, sc.u0, sc.solve, cfg.noise->n_paths,
                                threads, cfg.noise->per_path_dump);
    atomic_write(outdir + "/" + cfg.output_prefix + "_ensemble.csv", csv_ensemble(res.stats));
    if (cfg.noise->per_path_dump) {
        if (res.paths.size() > 256)
            throw ConfigError("spde: per_path_dump limited to 256 paths (size guard)");
        for (std::size_t p = 0; p < res.paths.size(); ++p)
            atomic_write(outdir + "/" + cfg.output_prefix + "_path" + std::to_string(p) + ".csv",
                         csv_trajectory(res.paths[p]));
    }
    std::printf("spde complete: %zu paths, %zu steps\n", res.stats.n_paths,
                res.stats.times.size() - 1);
    return kExitOk;
}

int cmd_verify(const std::string& suite, std::optional<double> gamma_opt,
               const std::string& outdir) {
    if (suite.empty()) throw ConfigError("verify: empty suite name");
    bool all = suite == "all";
    if (!all && suite != "dissipativity" && suite != "contraction" && suite != "fourier" &&
        suite != "sonine")
        throw ConfigError("verify: unknown suite '" + suite +
                          "' (dissipativity|contraction|fourier|sonine|all)");
    if (gamma_opt && !(*gamma_opt > 0.0))
        throw ConfigError("verify: gamma must be positive (weighted norms need gamma > 0)");

    std::vector<CheckReport> reports;
    bool ok = true;
    auto note = [&](const CheckReport& r) {
        reports.push_back(r);
        ok = ok && r.pass;
        std::printf("%-44s %-34s margin=% .3e  %s\n", r.check.c_str(), r.kernel.c_str(), r.margin,
                    r.pass ? "pass" : "FAIL");
    };

    if (all || suite == "sonine") {
        for (const auto& kernel : standard_catalogue()) {
            double tol = kernel.has_closed_conjugate() ? 1e-6 : 1e-4;
            CheckReport r;
            r.check = "sonine_identity";
            r.kernel = kernel.id;
            r.tol = tol;
            try {
                auto [vals, rep] = sonine_conjugate(kernel, 1e-3, 10000, tol);
                (void)vals;
                r.lhs = rep.max_residual;
                r.margin = tol - rep.max_residual;
                r.pass = true;
            } catch (const Error& e) {
                r.pass = false;
                r.params["failed"] = 1.0;
                std::fprintf(stderr, "%s\n", e.what());
            }
            note(r);
        }
    }
    if (all || suite == "dissipativity") {
        std::vector<double> gammas = gamma_opt ? std::vector<double>{*gamma_opt}
                                               : std::vector<double>{0.5, 1.0, 5.0};
        auto paths = canonical_paths();
        for (const auto& kernel : standard_catalogue()) {
            for (double g : gammas)
                for (const auto& path : paths)
                    note(check_dissipativity(kernel, g, path, 1.0 / 512.0, 12.0));
        }
        for (const auto& path : paths)
            note(check_dissipativity_exact_classical(gamma_opt ? *gamma_opt : 1.0, path, 12.0));
    }
    if (all || suite == "contraction") {
        note(check_subordination_normalization(1.0));
        for (auto [lam, t] : {std::pair{1.0, 1.0}, {4.0, 1.0}, {1.0, 2.0}})
            note(check_subordination_laplace(t, lam));
        note(check_weighted_contraction(make_caputo(0.5), gamma_opt ? *gamma_opt : 1.0, 1.0));
    }
    if (all || suite == "fourier") {
        for (const auto& [kernel, tau, tol] :
             {std::tuple{make_caputo(0.5), 1.0 / 2048.0, 1e-3},
              std::tuple{make_classical(), 1.0 / 16384.0, 1e-4}}) {
            FourierReport fr = check_fourier_symbol(kernel, {0.0, 0.5, 1.0, 2.0}, tau, tol);
            CheckReport r;
            r.check = "fourier_symbol";
            r.kernel = kernel.id;
            r.tol = tol;
            double worst = fr.zero_mode;
            for (double e : fr.rel_error) worst = std::max(worst, e);
            r.lhs = worst;
            r.margin = tol - worst;
            r.pass = fr.pass;
            note(r);
        }
    }

    atomic_write(outdir + "/verify_" + suite + ".json", json_check_reports(reports));
    return ok ? kExitOk : kExitCheckFailed;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"generalized time-fractional evolution equations: kernels, solvers, verification"};
    app.require_subcommand(1);

    std::string outdir = "out";
    int threads = 1;
    std::optional<std::uint64_t> seed;
    app.add_option("--out", outdir, "output directory");
    app.add_option("--threads", threads, "worker threads (env GFRAC_THREADS overrides)");
    std::uint64_t seed_raw = 0;
    auto* seed_opt = app.add_option("--seed", seed_raw, "master seed override");

    auto* kern = app.add_subcommand("kernel", "inspect or certify a kernel");
    std::string action;
    KernelArgs kargs;
    kern->add_option("action", action, "inspect|verify|sonine")->required();
    kern->add_option("--family", kargs.family, "kernel family id")->required();
    kern->add_option("--beta", [&kargs](auto& v) { kargs.beta = std::stod(v[0]); return true; },
                     "order parameter");
    kern->add_option("--delta", [&kargs](auto& v) { kargs.delta = std::stod(v[0]); return true; },
                     "truncation radius");
    kern->add_option("--lambda-w",
                     [&kargs](auto& v) { kargs.lambda_w = std::stod(v[0]); return true; },
                     "exponential weight rate");
    kern->add_option("--a", [&kargs](auto& v) { kargs.a = std::stod(v[0]); return true; }, "a");
    kern->add_option("--b", [&kargs](auto& v) { kargs.b = std::stod(v[0]); return true; }, "b");
    kern->add_option("--alpha", [&kargs](auto& v) { kargs.alpha = std::stod(v[0]); return true; },
                     "first multi-term exponent");
    kern->add_option("--file", kargs.file, "CSV samples t,k for a custom kernel");

    auto* runc = app.add_subcommand("run", "deterministic scenario run");
    std::string run_config;
    runc->add_option("--config", run_config, "scenario config file")->required();

    auto* spde = app.add_subcommand("spde", "stochastic ensemble run");
    std::string spde_config;
    spde->add_option("--config", spde_config, "scenario config file")->required();

    auto* ver = app.add_subcommand("verify", "structural verification suites");
    std::string suite;
    std::optional<double> gamma;
    ver->add_option("suite", suite, "dissipativity|contraction|fourier|sonine|all")->required();
    ver->add_option("--gamma", [&gamma](auto& v) { gamma = std::stod(v[0]); return true; },
                    "weight exponent override");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : kExitValidation;
    }
    if (seed_opt->count() > 0) seed = seed_raw;
    threads = resolve_threads(threads);

    try {
        if (kern->parsed()) return cmd_kernel(kargs, action, outdir);
        if (runc->parsed()) return cmd_run(run_config, outdir == "out" ? "" : outdir);
        if (spde->parsed())
            return cmd_spde(spde_config, outdir == "out" ? "" : outdir, seed, threads);
        if (ver->parsed()) return cmd_verify(suite, gamma, outdir);
    } catch (const IoError& e) {
        std::cerr << gfrac::json_error("IoError", e.what());
        return kExitIo;
    } catch (const gfrac::Error& e) {
        std::cerr << gfrac::json_error("ValidationError", e.what());
        return kExitValidation;
    } catch (const std::exception& e) {
        std::cerr << gfrac::json_error("InternalError", e.what());
        return kExitValidation;
    }
    return kExitValidation;
}
