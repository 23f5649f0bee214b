#include "frl/ball.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace frl {

namespace {

// Antiderivative of sqrt(r^2 - x^2) on [-r, r].
double half_chord_integral(double x, double r) {
  const double u = std::clamp(x / r, -1.0, 1.0);
  return 0.5 * r * r * (u * std::sqrt(std::max(0.0, 1.0 - u * u)) + std::asin(u));
}

// Area of [x0,x1] x [y0,y1] inside the disc of radius r about the origin.
double disc_rect_area(double x0, double x1, double y0, double y1, double r) {
  const double a = std::max(x0, -r);
  const double b = std::min(x1, r);
  if (a >= b || y0 >= y1) return 0.0;
  std::vector<double> cuts = {a, b};
  for (const double y : {y0, y1}) {
    if (std::abs(y) < r) {
      const double x = std::sqrt(r * r - y * y);
      for (const double c : {-x, x}) {
        if (c > a && c < b) cuts.push_back(c);
      }
    }
  }
  std::sort(cuts.begin(), cuts.end());
  double area = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double lo = cuts[i];
    const double hi = cuts[i + 1];
    if (hi <= lo) continue;
    const double mid = 0.5 * (lo + hi);
    const double s = std::sqrt(std::max(0.0, r * r - mid * mid));
    if (std::min(y1, s) <= std::max(y0, -s)) continue;  // empty strip on this piece
    const double chord = half_chord_integral(hi, r) - half_chord_integral(lo, r);
    area += (y1 < s) ? y1 * (hi - lo) : chord;
    area -= (y0 > -s) ? y0 * (hi - lo) : -chord;
  }
  return area;
}

double interval_overlap(double lo, double hi, double c, double r) {
  return std::max(0.0, std::min(hi, c + r) - std::max(lo, c - r));
}

double min_distance_sq(const double* lo, double side, std::span<const double> c) {
  double s = 0.0;
  for (std::size_t k = 0; k < c.size(); ++k) {
    const double d = std::max({lo[k] - c[k], 0.0, c[k] - (lo[k] + side)});
    s += d * d;
  }
  return s;
}

double max_distance_sq(const double* lo, double side, std::span<const double> c) {
  double s = 0.0;
  for (std::size_t k = 0; k < c.size(); ++k) {
    const double d = std::max(std::abs(c[k] - lo[k]), std::abs(lo[k] + side - c[k]));
    s += d * d;
  }
  return s;
}

}  // namespace

double box_ball_volume(std::span<const double> lo, std::span<const double> hi,
                       std::span<const double> center, double radius) {
  const std::size_t d = center.size();
  require(d >= 1 && d <= static_cast<std::size_t>(kMaxDim), "ball geometry supports d <= 3");
  require(lo.size() == d && hi.size() == d, "box/ball dimension mismatch");
  require(radius > 0.0, "radius must be positive");
  if (d == 1) return interval_overlap(lo[0], hi[0], center[0], radius);
  const double x0 = lo[0] - center[0], x1 = hi[0] - center[0];
  const double y0 = lo[1] - center[1], y1 = hi[1] - center[1];
  if (d == 2) return disc_rect_area(x0, x1, y0, y1, radius);

  const double z0 = std::max(lo[2] - center[2], -radius);
  const double z1 = std::min(hi[2] - center[2], radius);
  if (z0 >= z1) return 0.0;
  // Slices are discs of radius sqrt(r^2 - z^2); the slice area has kinks where
  // that radius crosses an edge or corner distance of the rectangle.
  std::vector<double> cuts = {z0, z1};
  const double r2 = radius * radius;
  std::vector<double> dist2 = {x0 * x0, x1 * x1, y0 * y0, y1 * y1};
  for (const double x : {x0, x1}) {
    for (const double y : {y0, y1}) dist2.push_back(x * x + y * y);
  }
  for (const double q : dist2) {
    if (q < r2) {
      const double z = std::sqrt(r2 - q);
      for (const double c : {-z, z}) {
        if (c > z0 && c < z1) cuts.push_back(c);
      }
    }
  }
  std::sort(cuts.begin(), cuts.end());
  auto slice = [&](double z) {
    return disc_rect_area(x0, x1, y0, y1, std::sqrt(std::max(0.0, r2 - z * z)));
  };
  using Quad = boost::math::quadrature::gauss_kronrod<double, 31>;
  double volume = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    if (cuts[i + 1] > cuts[i]) volume += Quad::integrate(slice, cuts[i], cuts[i + 1], 12, 1e-10);
  }
  return volume;
}

double ball_mass(const CantorStage& stage, std::span<const double> center, double radius) {
  const int d = stage.dim();
  require(static_cast<int>(center.size()) == d, "center dimension mismatch");
  require(radius > 0.0, "radius must be positive");
  const int k = stage.depth();
  const double r2 = radius * radius;

  double lo[kMaxDim];
  double hi[kMaxDim];
  auto visit = [&](auto&& self, int level, std::int64_t index) -> double {
    const double side = 1.0 / static_cast<double>(stage.scale(level));
    const auto corners = stage.corners(level);
    for (int a = 0; a < d; ++a) lo[a] = static_cast<double>(corners[index * d + a]) * side;
    if (min_distance_sq(lo, side, center) > r2) return 0.0;
    const double mass = 1.0 / static_cast<double>(stage.count(level));
    if (max_distance_sq(lo, side, center) <= r2) return mass;
    if (level == k) {
      for (int a = 0; a < d; ++a) hi[a] = lo[a] + side;
      const double volume = box_ball_volume({lo, static_cast<std::size_t>(d)},
                                            {hi, static_cast<std::size_t>(d)}, center, radius);
      return mass * std::min(1.0, volume / std::pow(side, d));
    }
    const std::int64_t t = stage.branching(level + 1);
    double sum = 0.0;
    for (std::int64_t c = index * t; c < (index + 1) * t; ++c) sum += self(self, level + 1, c);
    return sum;
  };
  return visit(visit, 0, 0);
}

std::int64_t covering_count(const CantorStage& stage, int level, std::span<const double> center,
                            double radius) {
  const int d = stage.dim();
  require(level >= 0 && level <= stage.depth(), "level out of range");
  require(static_cast<int>(center.size()) == d, "center dimension mismatch");
  const double r2 = radius * radius;
  double lo[kMaxDim];
  auto visit = [&](auto&& self, int j, std::int64_t index) -> std::int64_t {
    const double side = 1.0 / static_cast<double>(stage.scale(j));
    const auto corners = stage.corners(j);
    for (int a = 0; a < d; ++a) lo[a] = static_cast<double>(corners[index * d + a]) * side;
    if (min_distance_sq(lo, side, center) >= r2) return 0;
    if (j == level) return 1;
    const std::int64_t t = stage.branching(j + 1);
    std::int64_t sum = 0;
    for (std::int64_t c = index * t; c < (index + 1) * t; ++c) sum += self(self, j + 1, c);
    return sum;
  };
  return visit(visit, 0, 0);
}

std::vector<double> ball_radii(const CantorStage& stage, int radii_per_octave) {
  require(radii_per_octave >= 1, "radii_per_octave must be positive");
  const double r_min = 0.25 / static_cast<double>(stage.scale(stage.depth()));
  const double r_max = 2.0 * std::sqrt(static_cast<double>(stage.dim()));
  std::vector<double> radii;
  for (int i = 0;; ++i) {
    const double r = r_min * std::exp2(static_cast<double>(i) / radii_per_octave);
    if (r >= r_max * (1.0 - 1e-12)) break;
    radii.push_back(r);
  }
  radii.push_back(r_max);
  return radii;
}

BallConditionReport ball_condition_sup(const CantorStage& stage, double gamma,
                                       const BallSampler& sampler) {
  require(gamma >= 0.0, "gamma must be nonnegative");
  require(sampler.random_centers >= 0 && sampler.max_node_centers >= 0,
          "sample counts must be nonnegative");
  const int d = stage.dim();
  const int k = stage.depth();

  BallConditionReport report;
  report.gamma = gamma;
  if (gamma >= stage.plan().alpha) {
    report.warning = "gamma >= alpha: the sampled ratio may grow with depth";
  }

  std::vector<double> centers;
  const std::int64_t nodes = stage.count(k);
  const std::int64_t use = std::min(nodes, sampler.max_node_centers);
  const double side = 1.0 / static_cast<double>(stage.scale(k));
  const auto corners = stage.corners(k);
  for (std::int64_t s = 0; s < use; ++s) {
    const std::int64_t i = s * nodes / std::max<std::int64_t>(use, 1);
    for (int a = 0; a < d; ++a) {
      centers.push_back((static_cast<double>(corners[i * d + a]) + 0.5) * side);
    }
  }
  std::mt19937_64 rng(derive_seed(sampler.seed, 0xba11));
  for (std::int64_t s = 0; s < sampler.random_centers; ++s) {
    for (int a = 0; a < d; ++a) centers.push_back(uniform_unit(rng));
  }
  const auto radii = ball_radii(stage, sampler.radii_per_octave);
  const auto count = static_cast<std::int64_t>(centers.size()) / d;
  const auto nr = static_cast<std::int64_t>(radii.size());

  std::vector<double> best(static_cast<std::size_t>(count), -1.0);
  std::vector<std::int64_t> best_r(static_cast<std::size_t>(count), 0);
#pragma omp parallel for schedule(dynamic, 4)
  for (std::int64_t c = 0; c < count; ++c) {
    const std::span<const double> x(centers.data() + c * d, static_cast<std::size_t>(d));
    for (std::int64_t i = 0; i < nr; ++i) {
      const double ratio = ball_mass(stage, x, radii[i]) / std::pow(radii[i], gamma);
      if (ratio > best[c]) {
        best[c] = ratio;
        best_r[c] = i;
      }
    }
  }
  std::int64_t arg = 0;
  for (std::int64_t c = 1; c < count; ++c) {
    if (best[c] > best[arg]) arg = c;
  }
  report.samples = count * nr;
  if (count > 0) {
    report.sup_ratio = best[arg];
    report.argmax_center.assign(centers.begin() + arg * d, centers.begin() + (arg + 1) * d);
    report.argmax_radius = radii[best_r[arg]];
  }
  return report;
}

}  // namespace frl
