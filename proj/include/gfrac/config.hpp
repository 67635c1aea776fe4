#ifndef GFRAC_CONFIG_HPP
#define GFRAC_CONFIG_HPP

#include "gfrac/kernels.hpp"
#include "gfrac/memory.hpp"
#include "gfrac/operators.hpp"
#include "gfrac/solver.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>

namespace gfrac {

/// Scenario description parsed from a config file: named sections, each a flat
/// key-value table. Unknown keys anywhere are hard errors.
struct ScenarioConfig {
    std::string kernel_family;
    std::map<std::string, double> kernel_params;

    // second kernel of the noise pair (required by the noise section)
    std::optional<std::string> kernel2_family;
    std::map<std::string, double> kernel2_params;

    MemoryBackend backend = MemoryBackend::CQ_BackwardEuler;
    double tau = 0.01;
    std::size_t n_steps = 100;

    std::string operator_id = "relaxation";
    std::map<std::string, double> operator_params;

    SolveStrategy strategy = SolveStrategy::NewtonPerStep;
    NewtonOptions newton;
    FixedPointOptions fixedpoint;
    bool gamma_explicit = false; // gamma supplied rather than derived

    std::string initial_type = "zero"; // zero | constant | sine
    double initial_value = 0.0;
    int initial_mode = 1;

    std::string forcing_type = "zero"; // zero | constant
    double forcing_value = 0.0;

    struct Noise {
        double b_const = 1.0;
        int d_noise = 1;
        std::size_t n_paths = 100;
        std::uint64_t seed = 0;
        bool per_path_dump = false;

        bool operator==(const Noise&) const = default;
    };
    std::optional<Noise> noise;

    std::string output_dir = "out";
    std::string output_prefix = "run";
    bool write_weights = false;

    bool operator==(const ScenarioConfig&) const = default;
};

ScenarioConfig parse_config(const std::string& json_text);
ScenarioConfig load_config(const std::string& path);
std::string serialize_config(const ScenarioConfig& cfg);

/// Realized pieces of a scenario.
struct Scenario {
    KernelSpec kernel;
    std::optional<KernelSpec> kernel2;
    OperatorModel op;
    std::optional<SpatialGrid> grid;
    Eigen::VectorXd u0;
    Forcing forcing; // empty for zero forcing
    SolveConfig solve;
};

Scenario build_scenario(const ScenarioConfig& cfg);

} // namespace gfrac

#endif
