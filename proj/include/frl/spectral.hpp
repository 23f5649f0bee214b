#pragma once

// Fourier transforms of stage measures and their decay over frequency annuli.

#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "frl/serialize.hpp"
#include "frl/stage.hpp"

namespace frl {

/// mu_k^(xi) = T_k^{-1} sum_{a in A_k} e^{-2 pi i a.xi} prod_i box^(xi_i / N_k),
/// with the phase sum taken level by level down the tree.
cdouble mu_hat(const CantorStage& stage, std::span<const double> xi);

/// mu_hat at every point of `xis` (count * dim, row-major), in parallel.
std::vector<cdouble> mu_hat_batch(const CantorStage& stage, std::span<const double> xis);

struct SpectralProfile {
  int dim = 1;
  std::uint64_t seed = 0;
  std::vector<double> frequencies;  // sampled xi, count * dim
  std::vector<cdouble> values;
  std::vector<double> annulus_lo;
  std::vector<double> annulus_hi;
  std::vector<double> annulus_radius;  // geometric centre sqrt(lo * hi)
  std::vector<double> annulus_sup;
  double fitted_beta = 0.0;
  double fit_min = 0.0;
  double fit_max = 0.0;
  double residual = 0.0;  // rms of the log-log fit
  std::int64_t fit_points = 0;
};

/// Samples per_annulus random frequencies in each annulus [2^m, 2^{m+1})
/// below r_max, refines the best ones by local pattern search, and fits
/// log sup|mu^| = c - beta log r over annuli inside [4, min(r_max, N_k)]
/// (the whole [4, r_max] at depth 0).
SpectralProfile decay_profile(const CantorStage& stage, double r_max, int per_annulus,
                              std::uint64_t seed);

/// ||mu^||_{L^p([-R,R]^d)} for every R by the midpoint rule, starting at
/// spacing 1/4 and halving until two values agree to 1e-3 relative (at most
/// 2^24 points). p = infinity gives the grid sup, at least |mu^(0)| = 1.
std::vector<double> lp_growth_of_muhat(const CantorStage& stage, double p,
                                       std::span<const double> radii);

/// CSV with header `radius,sup_abs_muhat`, one row per annulus.
std::string profile_csv(const SpectralProfile& profile);
/// fitted_beta, fit_range, residual, seed and the annulus count.
Json profile_header(const SpectralProfile& profile);

}  // namespace frl
