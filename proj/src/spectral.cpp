#include "frl/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

#include "frl/kernels.hpp"

namespace frl {

namespace {

cdouble box_factor(const CantorStage& stage, const double* xi) {
  const double inv = 1.0 / static_cast<double>(stage.scale(stage.depth()));
  cdouble out{1.0, 0.0};
  for (int a = 0; a < stage.dim(); ++a) out *= box_hat(xi[a] * inv);
  return out;
}

// Random point of the annulus lo <= |xi| < hi: uniform direction, log-uniform radius.
void annulus_point(std::mt19937_64& rng, int dim, double lo, double hi, double* xi) {
  double norm = 0.0;
  do {
    norm = 0.0;
    for (int a = 0; a < dim; ++a) {
      xi[a] = standard_normal(rng);
      norm += xi[a] * xi[a];
    }
  } while (norm == 0.0);
  norm = std::sqrt(norm);
  const double r = lo * std::pow(hi / lo, uniform_unit(rng));
  for (int a = 0; a < dim; ++a) xi[a] *= r / norm;
}

double euclid(const double* xi, int dim) {
  double s = 0.0;
  for (int a = 0; a < dim; ++a) s += xi[a] * xi[a];
  return std::sqrt(s);
}

// Compass search for a local maximum of |mu^| inside the annulus.
double refine_peak(const CantorStage& stage, std::vector<double> xi, double lo, double hi,
                   double value) {
  const int d = stage.dim();
  double step = 0.25;
  while (step > 1e-3) {
    bool improved = false;
    for (int a = 0; a < d && !improved; ++a) {
      for (const double sign : {1.0, -1.0}) {
        std::vector<double> trial = xi;
        trial[a] += sign * step;
        const double r = euclid(trial.data(), d);
        if (r < lo || r >= hi) continue;
        const double v = std::abs(mu_hat(stage, trial));
        if (v > value) {
          value = v;
          xi = std::move(trial);
          improved = true;
          break;
        }
      }
    }
    if (!improved) step *= 0.5;
  }
  return value;
}

}  // namespace

cdouble mu_hat(const CantorStage& stage, std::span<const double> xi) {
  require(static_cast<int>(xi.size()) == stage.dim(), "frequency dimension mismatch");
  const auto tree = stage.phase_tree();
  const cdouble sum = kernels::serial::tree_phase_sums(tree, xi)[0];
  return sum / static_cast<double>(stage.count(stage.depth())) * box_factor(stage, xi.data());
}

std::vector<cdouble> mu_hat_batch(const CantorStage& stage, std::span<const double> xis) {
  const int d = stage.dim();
  require(xis.size() % static_cast<std::size_t>(d) == 0, "frequency list length not a multiple of d");
  const auto tree = stage.phase_tree();
  auto out = kernels::omp::tree_phase_sums(tree, xis);
  const double inv_t = 1.0 / static_cast<double>(stage.count(stage.depth()));
  for (std::size_t i = 0; i < out.size(); ++i) out[i] *= inv_t * box_factor(stage, &xis[i * d]);
  return out;
}

SpectralProfile decay_profile(const CantorStage& stage, double r_max, int per_annulus,
                              std::uint64_t seed) {
  require(r_max >= 4.0, "decay profile needs r_max >= 4");
  require(per_annulus >= 16, "decay profile needs per_annulus >= 16");
  const int d = stage.dim();
  const int k = stage.depth();

  SpectralProfile profile;
  profile.dim = d;
  profile.seed = seed;
  profile.fit_min = 4.0;
  profile.fit_max = k == 0 ? r_max : std::min(r_max, static_cast<double>(stage.scale(k)));

  for (double lo = 1.0; lo < r_max; lo *= 2.0) {
    profile.annulus_lo.push_back(lo);
    profile.annulus_hi.push_back(std::min(2.0 * lo, r_max));
  }
  const std::size_t bins = profile.annulus_lo.size();

  std::mt19937_64 rng(derive_seed(seed, 0xdeca));
  profile.frequencies.resize(bins * per_annulus * d);
  for (std::size_t b = 0; b < bins; ++b) {
    for (int s = 0; s < per_annulus; ++s) {
      annulus_point(rng, d, profile.annulus_lo[b], profile.annulus_hi[b],
                    &profile.frequencies[(b * per_annulus + s) * d]);
    }
  }
  profile.values = mu_hat_batch(stage, profile.frequencies);

  constexpr int kRefined = 4;  // best samples per annulus handed to the local search
  profile.annulus_sup.assign(bins, 0.0);
#pragma omp parallel for schedule(dynamic, 1)
  for (std::size_t b = 0; b < bins; ++b) {
    std::vector<std::size_t> order(per_annulus);
    std::iota(order.begin(), order.end(), b * per_annulus);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
      return std::abs(profile.values[i]) > std::abs(profile.values[j]);
    });
    double best = 0.0;
    for (int r = 0; r < std::min(kRefined, per_annulus); ++r) {
      const std::size_t i = order[r];
      std::vector<double> xi(profile.frequencies.begin() + i * d,
                             profile.frequencies.begin() + (i + 1) * d);
      best = std::max(best, refine_peak(stage, std::move(xi), profile.annulus_lo[b],
                                        profile.annulus_hi[b], std::abs(profile.values[i])));
    }
    profile.annulus_sup[b] = best;
  }

  std::vector<double> x, y;
  for (std::size_t b = 0; b < bins; ++b) {
    const double lo = profile.annulus_lo[b];
    const double hi = profile.annulus_hi[b];
    profile.annulus_radius.push_back(std::sqrt(lo * hi));
    if (lo >= profile.fit_min * (1.0 - 1e-12) && hi <= profile.fit_max * (1.0 + 1e-12) &&
        profile.annulus_sup[b] > 0.0) {
      x.push_back(-std::log(std::sqrt(lo * hi)));
      y.push_back(std::log(profile.annulus_sup[b]));
    }
  }
  profile.fit_points = static_cast<std::int64_t>(x.size());
  if (x.size() < 3) {
    std::ostringstream msg;
    msg << "only " << x.size() << " annuli inside the fit range [" << profile.fit_min << ", "
        << profile.fit_max << "]; need 3";
    throw ValidationError(msg.str());
  }
  profile.fitted_beta = least_squares_slope(x, y, &profile.residual);
  return profile;
}

std::vector<double> lp_growth_of_muhat(const CantorStage& stage, double p,
                                       std::span<const double> radii) {
  require(!radii.empty(), "radius list must be nonempty");
  require(p >= 1.0, "exponent p must be >= 1");
  for (std::size_t i = 1; i < radii.size(); ++i) {
    require(radii[i] > radii[i - 1], "radius list must be increasing");
  }
  require(radii.front() > 0.0, "radii must be positive");
  const int d = stage.dim();
  const bool sup = std::isinf(p);

  auto norm_at = [&](double r, double spacing) {
    const auto n = static_cast<std::int64_t>(std::ceil(2.0 * r / spacing - 1e-9));
    const double h = 2.0 * r / static_cast<double>(n);
    const std::int64_t total = ipow(n, d);
    std::vector<double> xis(static_cast<std::size_t>(total * d));
    for (std::int64_t flat = 0; flat < total; ++flat) {
      std::int64_t rest = flat;
      for (int a = d - 1; a >= 0; --a) {
        xis[flat * d + a] = -r + (static_cast<double>(rest % n) + 0.5) * h;
        rest /= n;
      }
    }
    const auto values = mu_hat_batch(stage, xis);
    if (sup) {
      double m = 1.0;  // |mu^(0)|
      for (const auto v : values) m = std::max(m, std::abs(v));
      return m;
    }
    return std::pow(kernels::omp::power_sum(values, p) * std::pow(h, d), 1.0 / p);
  };

  std::vector<double> out;
  out.reserve(radii.size());
  constexpr double kRelTol = 1e-3;
  constexpr std::int64_t kMaxPoints = std::int64_t{1} << 24;
  for (const double r : radii) {
    double spacing = 0.25;
    double value = norm_at(r, spacing);
    for (;;) {
      const double finer = spacing / 2.0;
      if (std::pow(2.0 * r / finer, d) > static_cast<double>(kMaxPoints)) break;
      const double next = norm_at(r, finer);
      const bool agreed = std::abs(next - value) <= kRelTol * std::abs(next);
      spacing = finer;
      value = next;
      if (agreed) break;
    }
    out.push_back(value);
  }
  return out;
}

std::string profile_csv(const SpectralProfile& profile) {
  std::ostringstream out;
  out.precision(17);
  out << "radius,sup_abs_muhat\n";
  for (std::size_t b = 0; b < profile.annulus_sup.size(); ++b) {
    out << profile.annulus_radius[b] << ',' << profile.annulus_sup[b] << '\n';
  }
  return out.str();
}

Json profile_header(const SpectralProfile& profile) {
  return {{"fitted_beta", profile.fitted_beta},
          {"fit_range", {profile.fit_min, profile.fit_max}},
          {"residual", profile.residual},
          {"seed", profile.seed},
          {"annuli", profile.annulus_sup.size()},
          {"fit_points", profile.fit_points}};
}

}  // namespace frl
