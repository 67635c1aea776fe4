#include "gfrac/io.hpp"
#include "gfrac/errors.hpp"

#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace gfrac {

using nlohmann::json;

namespace {

std::string num17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

} // namespace

void atomic_write(const std::string& path, const std::string& content) {
    namespace fs = std::filesystem;
    fs::path target(path);
    if (target.has_parent_path()) {
        std::error_code ec;
        fs::create_directories(target.parent_path(), ec);
        if (ec) throw IoError("atomic_write: cannot create directory for '" + path + "'");
    }
    fs::path tmp = target;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("atomic_write: cannot open '" + tmp.string() + "'");
        out << content;
        if (!out.good()) throw IoError("atomic_write: write failed for '" + tmp.string() + "'");
    }
    std::error_code ec;
    fs::rename(tmp, target, ec);
    if (ec) {
        fs::remove(tmp, ec);
        throw IoError("atomic_write: rename to '" + path + "' failed");
    }
}

std::string csv_trajectory(const Trajectory& traj) {
    std::ostringstream os;
    const int d = traj.states.empty() ? 0 : static_cast<int>(traj.states[0].size());
    os << "t";
    for (int i = 1; i <= d; ++i) os << ",u_" << i;
    os << "\n";
    for (std::size_t n = 0; n < traj.times.size(); ++n) {
        os << num17(traj.times[n]);
        for (int i = 0; i < d; ++i) os << "," << num17(traj.states[n][i]);
        os << "\n";
    }
    return os.str();
}

std::string csv_ensemble(const EnsembleStats& stats) {
    std::ostringstream os;
    const int d = stats.mean.empty() ? 0 : static_cast<int>(stats.mean[0].size());
    os << "t";
    for (int i = 1; i <= d; ++i) os << ",mean_" << i;
    for (int i = 1; i <= d; ++i) os << ",var_" << i;
    for (int i = 1; i <= d; ++i) os << ",se_" << i;
    os << "\n";
    for (std::size_t n = 0; n < stats.times.size(); ++n) {
        os << num17(stats.times[n]);
        for (int i = 0; i < d; ++i) os << "," << num17(stats.mean[n][i]);
        for (int i = 0; i < d; ++i) os << "," << num17(stats.var[n][i]);
        for (int i = 0; i < d; ++i) os << "," << num17(stats.se[n][i]);
        os << "\n";
    }
    return os.str();
}

std::string csv_weights(const MemoryScheme& scheme) {
    std::ostringstream os;
    os << "index,weight\n";
    for (std::size_t j = 0; j < scheme.weights.size(); ++j)
        os << j << "," << num17(scheme.weights[j]) << "\n";
    return os.str();
}

std::string json_trajectory_diagnostics(const Trajectory& traj) {
    json j;
    j["steps"] = traj.diagnostics.size();
    j["memory_ops"] = traj.memory_ops;
    double worst_res = 0.0;
    int max_newton = 0;
    bool all_conv = true;
    for (const auto& d : traj.diagnostics) {
        worst_res = std::max(worst_res, d.residual);
        max_newton = std::max(max_newton, d.newton_iterations);
        all_conv = all_conv && d.converged;
    }
    j["max_step_residual"] = worst_res;
    j["max_newton_iterations"] = max_newton;
    j["all_steps_converged"] = all_conv;
    j["norm_h_final"] = traj.norm_h.empty() ? 0.0 : traj.norm_h.back();
    j["norm_v_final"] = traj.norm_v.empty() ? 0.0 : traj.norm_v.back();
    j["energy_final"] = traj.energy.empty() ? 0.0 : traj.energy.back();
    if (traj.integral_residual) {
        j["integral_form_residual"] = *traj.integral_residual;
        j["integral_form_tol"] = *traj.integral_residual_tol;
    }
    return j.dump(2) + "\n";
}

std::string json_check_reports(const std::vector<CheckReport>& reports) {
    json arr = json::array();
    for (const auto& r : reports) {
        json j;
        j["check"] = r.check;
        j["kernel"] = r.kernel;
        j["params"] = r.params;
        j["lhs"] = r.lhs;
        j["rhs"] = r.rhs;
        j["margin"] = r.margin;
        j["tol"] = r.tol;
        j["pass"] = r.pass;
        arr.push_back(j);
    }
    return arr.dump(2) + "\n";
}

std::string json_h_conditions(const HConditionReport& rep, const std::string& op_id) {
    json j;
    j["operator"] = op_id;
    j["H1"] = {{"pass", rep.h1_pass}, {"final_modulus", rep.h1_final_modulus}};
    j["H2"] = {{"pass", rep.h2_pass}, {"worst_quotient", rep.h2_worst_quotient}};
    j["H3"] = {{"pass", rep.h3_pass}, {"delta_emp", rep.h3_delta_emp}};
    j["H4"] = {{"pass", rep.h4_pass}, {"constant", rep.h4_constant}};
    j["all_pass"] = rep.all_pass();
    return j.dump(2) + "\n";
}

std::string json_kernel_conditions(const KernelConditionsReport& rep,
                                   const std::string& kernel_id) {
    json arr = json::array();
    for (const auto& r : rep.records) {
        json j;
        j["condition"] = r.condition;
        j["pass"] = r.pass;
        j["worst_point"] = r.worst_point;
        j["worst_value"] = r.worst_value;
        j["kernel"] = kernel_id;
        arr.push_back(j);
    }
    return arr.dump(2) + "\n";
}

std::string json_sonine_report(const SonineReport& rep, const std::string& kernel_id) {
    json j;
    j["kernel"] = kernel_id;
    j["method"] = rep.method == SonineMethod::ClosedForm ? "closed_form" : "numeric_volterra";
    j["max_residual"] = rep.max_residual;
    j["grid_points"] = rep.grid.size();
    j["grid_first"] = rep.grid.empty() ? 0.0 : rep.grid.front();
    j["grid_last"] = rep.grid.empty() ? 0.0 : rep.grid.back();
    return j.dump(2) + "\n";
}

std::string json_error(const std::string& type, const std::string& message) {
    json j;
    j["error"] = type;
    j["message"] = message;
    return j.dump() + "\n";
}

} // namespace gfrac
