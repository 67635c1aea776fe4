#include "gfrac/config.hpp"
#include "gfrac/errors.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <set>

namespace gfrac {

using nlohmann::json;

namespace {

void expect_keys(const json& obj, const std::string& section,
                 const std::set<std::string>& allowed) {
    for (auto it = obj.begin(); it != obj.end(); ++it)
        if (!allowed.count(it.key()))
            throw ConfigError("config section '" + section + "': unknown key '" + it.key() + "'");
}

std::map<std::string, double> param_map(const json& obj, const std::string& section,
                                        const std::set<std::string>& reserved) {
    std::map<std::string, double> out;
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        if (reserved.count(it.key())) continue;
        if (!it.value().is_number())
            throw ConfigError("config section '" + section + "': key '" + it.key() +
                              "' must be numeric");
        out[it.key()] = it.value().get<double>();
    }
    return out;
}

} // namespace

ScenarioConfig parse_config(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config: invalid JSON: ") + e.what());
    }
    if (!j.is_object()) throw ConfigError("config: top level must be an object of sections");
    expect_keys(j, "<top>",
                {"kernel", "kernel2", "memory", "operator", "solver", "initial", "forcing",
                 "noise", "output"});

    ScenarioConfig cfg;

    if (!j.contains("kernel") || !j["kernel"].is_object())
        throw ConfigError("config: section 'kernel' is required");
    {
        const json& k = j["kernel"];
        if (!k.contains("family")) throw ConfigError("config kernel: 'family' required");
        cfg.kernel_family = k["family"].get<std::string>();
        cfg.kernel_params = param_map(k, "kernel", {"family"});
    }
    if (j.contains("kernel2")) {
        const json& k = j["kernel2"];
        if (!k.contains("family")) throw ConfigError("config kernel2: 'family' required");
        cfg.kernel2_family = k["family"].get<std::string>();
        cfg.kernel2_params = param_map(k, "kernel2", {"family"});
    }

    if (j.contains("memory")) {
        const json& m = j["memory"];
        expect_keys(m, "memory", {"backend", "tau", "n_steps"});
        if (m.contains("backend")) {
            std::string b = m["backend"].get<std::string>();
            if (b == "cq")
                cfg.backend = MemoryBackend::CQ_BackwardEuler;
            else if (b == "pi")
                cfg.backend = MemoryBackend::ProductIntegration;
            else
                throw ConfigError("config memory: backend must be 'cq' or 'pi'");
        }
        if (m.contains("tau")) cfg.tau = m["tau"].get<double>();
        if (m.contains("n_steps")) cfg.n_steps = m["n_steps"].get<std::size_t>();
    }
    if (!(cfg.tau > 0.0) || cfg.n_steps < 1)
        throw ConfigError("config memory: requires tau > 0 and n_steps >= 1 (T = tau*n_steps > 0)");

    if (j.contains("operator")) {
        const json& o = j["operator"];
        if (!o.contains("id")) throw ConfigError("config operator: 'id' required");
        cfg.operator_id = o["id"].get<std::string>();
        cfg.operator_params = param_map(o, "operator", {"id"});
    }

    if (j.contains("solver")) {
        const json& s = j["solver"];
        expect_keys(s, "solver",
                    {"strategy", "abs_tol", "rel_tol", "max_iter", "gamma", "max_sweeps",
                     "sweep_tol"});
        if (s.contains("strategy")) {
            std::string st = s["strategy"].get<std::string>();
            if (st == "newton")
                cfg.strategy = SolveStrategy::NewtonPerStep;
            else if (st == "fixed_point")
                cfg.strategy = SolveStrategy::WeightedFixedPoint;
            else
                throw ConfigError("config solver: strategy must be 'newton' or 'fixed_point'");
        }
        if (s.contains("abs_tol")) cfg.newton.abs_tol = s["abs_tol"].get<double>();
        if (s.contains("rel_tol")) cfg.newton.rel_tol = s["rel_tol"].get<double>();
        if (s.contains("max_iter")) cfg.newton.max_iter = s["max_iter"].get<int>();
        if (s.contains("gamma")) {
            cfg.fixedpoint.gamma = s["gamma"].get<double>();
            cfg.gamma_explicit = true;
        }
        if (s.contains("max_sweeps")) cfg.fixedpoint.max_sweeps = s["max_sweeps"].get<int>();
        if (s.contains("sweep_tol")) cfg.fixedpoint.sweep_tol = s["sweep_tol"].get<double>();
        if (cfg.newton.abs_tol <= 0.0 || cfg.newton.rel_tol <= 0.0 ||
            cfg.fixedpoint.sweep_tol <= 0.0)
            throw ConfigError("config solver: tolerances must be positive");
    }

    if (j.contains("initial")) {
        const json& i = j["initial"];
        expect_keys(i, "initial", {"type", "value", "mode"});
        if (i.contains("type")) cfg.initial_type = i["type"].get<std::string>();
        if (i.contains("value")) cfg.initial_value = i["value"].get<double>();
        if (i.contains("mode")) cfg.initial_mode = i["mode"].get<int>();
        if (cfg.initial_type != "zero" && cfg.initial_type != "constant" &&
            cfg.initial_type != "sine")
            throw ConfigError("config initial: type must be zero|constant|sine");
    }

    if (j.contains("forcing")) {
        const json& f = j["forcing"];
        expect_keys(f, "forcing", {"type", "value"});
        if (f.contains("type")) cfg.forcing_type = f["type"].get<std::string>();
        if (f.contains("value")) cfg.forcing_value = f["value"].get<double>();
        if (cfg.forcing_type != "zero" && cfg.forcing_type != "constant")
            throw ConfigError("config forcing: type must be zero|constant");
    }

    if (j.contains("noise")) {
        const json& n = j["noise"];
        expect_keys(n, "noise", {"b_const", "d_noise", "n_paths", "seed", "per_path_dump"});
        ScenarioConfig::Noise noise;
        if (n.contains("b_const")) noise.b_const = n["b_const"].get<double>();
        if (n.contains("d_noise")) noise.d_noise = n["d_noise"].get<int>();
        if (n.contains("n_paths")) noise.n_paths = n["n_paths"].get<std::size_t>();
        if (n.contains("seed")) noise.seed = n["seed"].get<std::uint64_t>();
        if (n.contains("per_path_dump")) noise.per_path_dump = n["per_path_dump"].get<bool>();
        if (noise.d_noise < 1 || noise.n_paths < 1)
            throw ConfigError("config noise: d_noise and n_paths must be positive");
        cfg.noise = noise;
        if (!cfg.kernel2_family)
            throw ConfigError("config: noise section requires a kernel2 section");
    }

    if (j.contains("output")) {
        const json& o = j["output"];
        expect_keys(o, "output", {"dir", "prefix", "write_weights"});
        if (o.contains("dir")) cfg.output_dir = o["dir"].get<std::string>();
        if (o.contains("prefix")) cfg.output_prefix = o["prefix"].get<std::string>();
        if (o.contains("write_weights")) cfg.write_weights = o["write_weights"].get<bool>();
    }
    return cfg;
}

ScenarioConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("config: cannot open '" + path + "'");
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return parse_config(text);
}

std::string serialize_config(const ScenarioConfig& cfg) {
    json j;
    j["kernel"]["family"] = cfg.kernel_family;
    for (const auto& [k, v] : cfg.kernel_params) j["kernel"][k] = v;
    if (cfg.kernel2_family) {
        j["kernel2"]["family"] = *cfg.kernel2_family;
        for (const auto& [k, v] : cfg.kernel2_params) j["kernel2"][k] = v;
    }
    j["memory"]["backend"] = cfg.backend == MemoryBackend::CQ_BackwardEuler ? "cq" : "pi";
    j["memory"]["tau"] = cfg.tau;
    j["memory"]["n_steps"] = cfg.n_steps;
    j["operator"]["id"] = cfg.operator_id;
    for (const auto& [k, v] : cfg.operator_params) j["operator"][k] = v;
    j["solver"]["strategy"] =
        cfg.strategy == SolveStrategy::NewtonPerStep ? "newton" : "fixed_point";
    j["solver"]["abs_tol"] = cfg.newton.abs_tol;
    j["solver"]["rel_tol"] = cfg.newton.rel_tol;
    j["solver"]["max_iter"] = cfg.newton.max_iter;
    if (cfg.gamma_explicit) j["solver"]["gamma"] = cfg.fixedpoint.gamma;
    j["solver"]["max_sweeps"] = cfg.fixedpoint.max_sweeps;
    j["solver"]["sweep_tol"] = cfg.fixedpoint.sweep_tol;
    j["initial"]["type"] = cfg.initial_type;
    j["initial"]["value"] = cfg.initial_value;
    j["initial"]["mode"] = cfg.initial_mode;
    j["forcing"]["type"] = cfg.forcing_type;
    j["forcing"]["value"] = cfg.forcing_value;
    if (cfg.noise) {
        j["noise"]["b_const"] = cfg.noise->b_const;
        j["noise"]["d_noise"] = cfg.noise->d_noise;
        j["noise"]["n_paths"] = cfg.noise->n_paths;
        j["noise"]["seed"] = cfg.noise->seed;
        j["noise"]["per_path_dump"] = cfg.noise->per_path_dump;
    }
    j["output"]["dir"] = cfg.output_dir;
    j["output"]["prefix"] = cfg.output_prefix;
    j["output"]["write_weights"] = cfg.write_weights;
    return j.dump(2) + "\n";
}

Scenario build_scenario(const ScenarioConfig& cfg) {
    Scenario s;
    s.kernel = make_kernel(cfg.kernel_family, cfg.kernel_params);
    if (cfg.kernel2_family)
        s.kernel2 = make_kernel(*cfg.kernel2_family, cfg.kernel2_params);

    auto p = cfg.operator_params;
    auto take = [&p](const char* key, double fallback) {
        auto it = p.find(key);
        if (it == p.end()) return fallback;
        double v = it->second;
        p.erase(it);
        return v;
    };
    auto grid_from = [&]() {
        SpatialGrid g;
        g.dimension = static_cast<int>(take("grid_dim", 1));
        g.n = static_cast<int>(take("grid_n", 32));
        g.length = take("length", 1.0);
        return g;
    };

    if (cfg.operator_id == "relaxation") {
        s.op = relaxation_operator(take("lambda", 1.0));
    } else if (cfg.operator_id == "scalar_cubic") {
        s.op = scalar_cubic_operator(take("c1", 1.0));
    } else if (cfg.operator_id == "porous_medium") {
        SpatialGrid g = grid_from();
        s.op = porous_medium_operator(g, take("r", 2.0), take("psi_scale", 1.0),
                                      take("phi_scale", 0.0), take("frac_power", 1.0));
        s.grid = g;
    } else if (cfg.operator_id == "fast_diffusion") {
        SpatialGrid g = grid_from();
        s.op = fast_diffusion_operator(g, take("r", 0.5), take("psi_scale", 1.0),
                                       take("eps_reg", 1e-8), take("frac_power", 1.0));
        s.grid = g;
    } else if (cfg.operator_id == "p_laplace") {
        SpatialGrid g = grid_from();
        s.op = p_laplace_operator(g, take("p", 2.0), {}, take("eps_reg", 1e-8));
        s.grid = g;
    } else {
        throw ConfigError("config operator: unknown id '" + cfg.operator_id + "'");
    }
    if (!p.empty())
        throw ConfigError("config operator '" + cfg.operator_id + "': unknown parameter '" +
                          p.begin()->first + "'");

    s.u0 = Eigen::VectorXd::Zero(s.op.dim);
    if (cfg.initial_type == "constant") {
        s.u0.setConstant(cfg.initial_value);
    } else if (cfg.initial_type == "sine") {
        if (!s.grid) throw ConfigError("config initial: 'sine' requires a grid operator");
        const SpatialGrid& g = *s.grid;
        for (int i = 0; i < s.op.dim; ++i) {
            if (g.dimension == 1) {
                double x = (i + 1.0) * g.h();
                s.u0[i] = cfg.initial_value *
                          std::sin(cfg.initial_mode * M_PI * x / g.length);
            } else {
                int ix = i % g.n, iy = i / g.n;
                double x = (ix + 1.0) * g.h(), y = (iy + 1.0) * g.h();
                s.u0[i] = cfg.initial_value *
                          std::sin(cfg.initial_mode * M_PI * x / g.length) *
                          std::sin(cfg.initial_mode * M_PI * y / g.length);
            }
        }
    }

    if (cfg.forcing_type == "constant" && cfg.forcing_value != 0.0) {
        int d = s.op.dim;
        double v = cfg.forcing_value;
        s.forcing = [d, v](double) { return Eigen::VectorXd::Constant(d, v); };
    }

    s.solve.tau = cfg.tau;
    s.solve.n_steps = cfg.n_steps;
    s.solve.backend = cfg.backend;
    s.solve.strategy = cfg.strategy;
    s.solve.newton = cfg.newton;
    s.solve.fixedpoint = cfg.fixedpoint;
    if (cfg.strategy == SolveStrategy::WeightedFixedPoint && !cfg.gamma_explicit)
        s.solve.fixedpoint.gamma = choose_gamma(s.kernel, s.op.constants.C1);
    return s;
}

} // namespace gfrac
