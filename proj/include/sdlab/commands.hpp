#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "sdlab/config.hpp"
#include "sdlab/constants.hpp"

namespace sdlab::commands {

// Process exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitCap = 3;
inline constexpr int kExitAcceptance = 4;

// Each command writes its CSV files into cfg.out and a short human-readable
// summary to `log`. Returns the paths written.
std::vector<std::string> simulate(const config::ExperimentConfig& cfg, std::ostream& log);
std::vector<std::string> tail(const config::ExperimentConfig& cfg, std::ostream& log);
std::vector<std::string> transition(const config::ExperimentConfig& cfg, std::ostream& log);
std::vector<std::string> clt(const config::ExperimentConfig& cfg, std::ostream& log);
std::vector<std::string> ip(const config::ExperimentConfig& cfg, std::ostream& log);
std::vector<std::string> constants_report(const config::ExperimentConfig& cfg, std::ostream& log);

// Diffusion constants of the configured billiard and observable. The
// drivebelt gets a Monte Carlo mu_M(M) from `mc_samples` draws.
constants::DiffusionConstant billiard_constants(const config::ExperimentConfig& cfg,
                                                std::uint64_t mc_samples = 200'000);

// One row per catalog model, for the configured parameters and observable.
std::vector<constants::DiffusionConstant> constants_table(const config::ExperimentConfig& cfg);

// Maps an exception thrown by a command to its exit code and prints it.
int exit_code_for_current_exception(std::ostream& err);

}  // namespace sdlab::commands
