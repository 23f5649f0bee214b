#pragma once

// Ball masses of stage measures and the sampled Frostman-type ratio
// sup mu_k(B(x, r)) / r^gamma.

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "frl/stage.hpp"

namespace frl {

/// Volume of the box [lo, hi] (per axis) intersected with the closed ball
/// B(center, radius), d <= 3. Exact in d <= 2, adaptive quadrature in d = 3.
double box_ball_volume(std::span<const double> lo, std::span<const double> hi,
                       std::span<const double> center, double radius);

/// mu_k(B(center, radius)): full cubes contribute 1/T_j, deepest-level
/// boundary cubes contribute their covered volume fraction times 1/T_k.
double ball_mass(const CantorStage& stage, std::span<const double> center, double radius);

/// Number of level-j cubes whose distance to `center` is below `radius`.
std::int64_t covering_count(const CantorStage& stage, int level, std::span<const double> center,
                            double radius);

struct BallSampler {
  std::uint64_t seed = 0;
  std::int64_t random_centers = 256;
  std::int64_t max_node_centers = 4096;  // deepest-level centres, strided beyond this
  int radii_per_octave = 4;
};

struct BallConditionReport {
  double gamma = 0.0;
  double sup_ratio = 0.0;
  std::vector<double> argmax_center;
  double argmax_radius = 0.0;
  std::int64_t samples = 0;
  std::string warning;  // non-empty when gamma >= alpha
};

/// Radii r_i = r_min 2^{i / per_octave} covering [N_k^{-1}/4, 2 sqrt(d)].
std::vector<double> ball_radii(const CantorStage& stage, int radii_per_octave);

BallConditionReport ball_condition_sup(const CantorStage& stage, double gamma,
                                       const BallSampler& sampler = {});

}  // namespace frl
