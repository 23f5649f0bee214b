#pragma once

// Monte-Carlo and exact checks of E[mu_k(x) | stage k-1] = mu_{k-1}(x) under
// the uniform random-translation model.

#include <cstdint>
#include <vector>

#include "frl/stage.hpp"

namespace frl {

struct MartingaleResult {
  double empirical_mean = 0.0;
  double reference = 0.0;  // mu_{k-1}(x)
  double z_score = 0.0;
  std::vector<double> point;  // x after any boundary perturbation
  double perturbation = 0.0;  // largest coordinate shift applied to x
  std::int64_t trials = 0;
};

/// Moves x off the level-k grid (and into [0,1)^d); returns the largest shift.
double move_off_grid(std::vector<double>& x, std::int64_t scale);

/// Builds the stage-(k-1) skeleton from `seed`, then averages the density of
/// `trials` independent level-k completions at x. Only the translation of the
/// parent containing x affects mu_k(x), so each trial draws just that one.
MartingaleResult martingale_check(const SequencePlan& plan, const std::vector<Alphabet>& alphabets,
                                  int level, std::vector<double> x, std::int64_t trials,
                                  std::uint64_t seed);

/// Exact average of mu_k(x) over all n_k^d equally likely translations of the
/// parent of x, given the skeleton (a stage of depth k-1).
double exact_translate_average(const CantorStage& skeleton, const Alphabet& next,
                               std::span<const double> x);

}  // namespace frl
