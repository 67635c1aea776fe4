#ifndef GFRAC_IO_HPP
#define GFRAC_IO_HPP

#include "gfrac/kernels.hpp"
#include "gfrac/memory.hpp"
#include "gfrac/solver.hpp"
#include "gfrac/stochastic.hpp"
#include "gfrac/verify.hpp"

#include <string>

namespace gfrac {

/// Writes content to path via a temp file and atomic rename; no partial files
/// survive a failure.
void atomic_write(const std::string& path, const std::string& content);

/// CSV with full round-trip precision (17 significant digits).
std::string csv_trajectory(const Trajectory& traj);          // t,u_1..u_d
std::string csv_ensemble(const EnsembleStats& stats);        // t,mean_*,var_*,se_*
std::string csv_weights(const MemoryScheme& scheme);         // index,weight

std::string json_trajectory_diagnostics(const Trajectory& traj);
std::string json_check_reports(const std::vector<CheckReport>& reports);
std::string json_h_conditions(const HConditionReport& rep, const std::string& op_id);
std::string json_kernel_conditions(const KernelConditionsReport& rep,
                                   const std::string& kernel_id);
std::string json_sonine_report(const SonineReport& rep, const std::string& kernel_id);
std::string json_error(const std::string& type, const std::string& message);

} // namespace gfrac

#endif
