#pragma once

// Experiment configuration: TOML (canonical) or JSON, with environment and
// flag overrides applied on top.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "frl/alphabet.hpp"
#include "frl/serialize.hpp"

namespace frl::expcli {

struct ExperimentConfig {
  double alpha = 0.5;
  int d = 1;
  std::optional<double> p;  // 2d / alpha when unset
  int depth = 2;
  std::int64_t n1 = 4;
  double c0 = 1.0;
  std::uint64_t seed = 0;
  std::int64_t node_budget = 1'000'000;
  std::string output_dir = "frl-out";
  std::vector<std::string> experiments = {"search-alphabet", "build", "decay", "restrict",
                                          "sharpness"};
  int threads = 0;  // 0: runtime default

  // [quadrature]
  double quad_rel_tol = 1e-4;
  std::int64_t quad_max_points = std::int64_t{1} << 24;
  double extension_spacing = 0.25;

  // [search]
  double constant_cap = 2.0;
  int max_swaps = 400;
  std::optional<std::int64_t> search_modulus;
  std::optional<std::int64_t> search_target_size;

  // [decay]
  std::optional<double> r_max;  // max(16, N_k) when unset
  int per_annulus = 64;

  // [restrict]
  std::optional<double> restrict_c0;
  int power_iterations = 30;

  // [sharpness]
  std::vector<double> sharpness_p;  // {2d/alpha - 1, 2d/alpha + 1} when empty
  std::vector<double> radii = {8.0, 16.0, 32.0, 64.0};

  double exponent() const { return p ? *p : 2.0 * d / alpha; }
  std::vector<double> sharpness_exponents() const;
  SequencePlan plan() const;
};

inline const std::vector<std::string>& known_experiments() {
  static const std::vector<std::string> names = {"search-alphabet", "build", "decay",
                                                 "restrict", "sharpness", "compare-ternary"};
  return names;
}

/// Throws ValidationError naming the first bad field.
void validate(const ExperimentConfig& config);

ExperimentConfig config_from_json(const Json& doc);
Json config_to_json(const ExperimentConfig& config);

/// Parses TOML text into the same JSON shape config_from_json reads.
Json toml_to_json(const std::string& text);

/// Reads a .json file as JSON and anything else as TOML.
ExperimentConfig load_config_file(const std::string& path);

/// FRL_SEED, when set, replaces the seed.
void apply_environment(ExperimentConfig& config);

/// SHA-256 of the canonical JSON, without output_dir and threads.
std::string config_hash(const ExperimentConfig& config);

/// SHA-256 of the fields that determine alphabets and stages.
std::string construction_hash(const ExperimentConfig& config);

}  // namespace frl::expcli
