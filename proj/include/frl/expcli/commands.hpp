#pragma once

// The experiment commands. Each writes its artifacts under config.output_dir
// and reports the files it read and wrote; errors propagate as exceptions
// (ValidationError, BudgetError, SearchError) for the front end to map onto
// exit codes.

#include <map>
#include <ostream>
#include <string>
#include <vector>

#include "frl/expcli/config.hpp"
#include "frl/expcli/manifest.hpp"
#include "frl/stage.hpp"

namespace frl::expcli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitCheckFailed = 1;
inline constexpr int kExitValidation = 2;
inline constexpr int kExitBudget = 3;
inline constexpr int kExitSearch = 4;

/// Schema version written into every CSV preamble.
inline constexpr int kCsvVersion = 1;

struct CommandOutput {
  int exit_code = kExitOk;
  std::vector<std::string> inputs;
  std::vector<std::string> outputs;
};

std::string output_path(const ExperimentConfig& config, const std::string& name);

CommandOutput cmd_search_alphabet(const ExperimentConfig& config, std::ostream& log);
CommandOutput cmd_build(const ExperimentConfig& config, const std::string& alphabets_path,
                        std::ostream& log);
CommandOutput cmd_decay(const ExperimentConfig& config, const std::string& stage_path,
                        std::ostream& log);
CommandOutput cmd_restrict(const ExperimentConfig& config, const std::string& stage_path,
                           std::ostream& log);
CommandOutput cmd_sharpness(const ExperimentConfig& config, const std::string& stage_path,
                            std::ostream& log);
CommandOutput cmd_compare_ternary(const ExperimentConfig& config, std::ostream& log);

/// Runs config.experiments in order and writes manifest.json. Stops at the
/// first command that fails and returns its exit code.
int cmd_run(const ExperimentConfig& config, std::ostream& log);

/// Loads a stage file, rejecting one built from a different configuration.
CantorStage load_stage_checked(const ExperimentConfig& config, const std::string& path);

/// Log-log slopes of ||mu^||_{L^p([-R,R]^d)} over the radii, one per exponent.
std::vector<double> sharpness_slopes(const CantorStage& stage, const std::vector<double>& exponents,
                                     const std::vector<double>& radii);

struct TernaryComparison {
  double alpha = 0.0;  // log 2 / log 3 for both branches
  std::vector<double> exponents;
  std::vector<double> ternary_slopes;
  std::vector<double> random_slopes;
};

/// Depth-k stages with n_j = 3 and B = {0, 2}: zero translations (the ternary
/// measure) against seeded uniform translations.
TernaryComparison compare_ternary(int depth, std::uint64_t seed,
                                  const std::vector<double>& exponents,
                                  const std::vector<double>& radii);

}  // namespace frl::expcli
