#include "frl/decoupling.hpp"

#include <cmath>

namespace frl {

cdouble raised_cosine_transform(double s) {
  // E(y) = int_0^1 e^{2 pi i y u} du is the conjugate of box^(y);
  // sin^2(pi u) = 1/2 - e^{2 pi i u}/4 - e^{-2 pi i u}/4.
  auto e = [](double y) { return std::conj(box_hat(y)); };
  return 0.5 * e(s) - 0.25 * e(s + 1.0) - 0.25 * e(s - 1.0);
}

namespace {

// N^{-d} prod_i Phi(x_i / N): the common profile of every f_a up to modulation.
cdouble bump_profile(const double* x, int dim, double scale) {
  cdouble out{std::pow(scale, -dim), 0.0};
  for (int a = 0; a < dim; ++a) out *= raised_cosine_transform(x[a] / scale);
  return out;
}

}  // namespace

DecouplingResult decoupling_check(const CantorStage& stage, int level,
                                  std::span<const cdouble> coefficients, const Cube& j, double p) {
  require(level >= 0 && level <= stage.depth(), "level out of range");
  require(p >= 1.0, "exponent p must be >= 1");
  require(static_cast<std::int64_t>(coefficients.size()) == stage.count(level),
          "one coefficient per level-j node required");
  const int d = stage.dim();
  require(j.dim() == d, "cube dimension mismatch");
  const auto n = stage.scale(level);
  const double scale = static_cast<double>(n);
  require(std::abs(j.side - scale) <= 1e-9 * scale, "decoupling cube side must equal N_j");

  const auto corners = stage.corners(level);
  std::vector<std::int64_t> active;
  double coeff_l2 = 0.0;
  for (std::int64_t a = 0; a < static_cast<std::int64_t>(coefficients.size()); ++a) {
    if (coefficients[a] != cdouble{}) {
      active.push_back(a);
      coeff_l2 += std::norm(coefficients[a]);
    }
  }

  auto f_at = [&](const double* x) {
    cdouble sum{0.0, 0.0};
    for (const auto a : active) {
      double t = 0.0;
      for (int k = 0; k < d; ++k) t += static_cast<double>(corners[a * d + k]) * x[k];
      sum += coefficients[a] * std::conj(unit_phase(t / scale));
    }
    return sum * bump_profile(x, d, scale);
  };

  DecouplingResult result;
  // lhs: every unit cube of J gets its own graded grid.
  const std::int64_t tiles = ipow(n, d);
  double lhs_p = 0.0;
  for (std::int64_t tile = 0; tile < tiles; ++tile) {
    Cube unit;
    unit.side = 1.0;
    unit.corner.resize(static_cast<std::size_t>(d));
    std::int64_t rest = tile;
    for (int a = d - 1; a >= 0; --a) {
      unit.corner[a] = j.corner[a] + static_cast<double>(rest % n);
      rest /= n;
    }
    const TensorGrid grid = graded_grid(unit);
    const auto points = grid.points();
    const auto total = grid.total();
    std::vector<cdouble> values(static_cast<std::size_t>(total));
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < total; ++i) values[i] = f_at(&points[i * d]);
    lhs_p += std::pow(weighted_lp_norm(values, grid, {unit, p, false}), p);
  }
  result.lhs = std::pow(lhs_p, 1.0 / p);

  // rhs: |f_a| = |c_a| |profile|, so sum_a ||f_a||^2 = ||profile||^2 sum_a |c_a|^2.
  const TensorGrid grid = graded_grid(j);
  const auto points = grid.points();
  std::vector<cdouble> profile(static_cast<std::size_t>(grid.total()));
  for (std::int64_t i = 0; i < grid.total(); ++i) profile[i] = bump_profile(&points[i * d], d, scale);
  const double piece = weighted_lp_norm(profile, grid, {j, p, false});
  result.rhs = piece * std::sqrt(coeff_l2);
  result.ratio = result.rhs > 0.0 ? result.lhs / result.rhs : 0.0;
  return result;
}

MixedNormResult mixed_norm_inequality_check(std::span<const double> c, std::size_t rows,
                                            std::size_t cols, double p) {
  require(p > 2.0, "mixed-norm lemma needs p > 2");
  require(rows >= 1 && cols >= 1 && c.size() == rows * cols, "matrix shape mismatch");
  for (const double v : c) require(v >= 0.0, "matrix entries must be nonnegative");
  MixedNormResult out;
  for (std::size_t i = 0; i < rows; ++i) {
    double s = 0.0;
    for (std::size_t k = 0; k < cols; ++k) s += c[i * cols + k] * c[i * cols + k];
    out.lhs += std::pow(s, p / 2.0);
  }
  double outer = 0.0;
  for (std::size_t k = 0; k < cols; ++k) {
    double s = 0.0;
    for (std::size_t i = 0; i < rows; ++i) s += std::pow(c[i * cols + k], p);
    outer += std::pow(s, 2.0 / p);
  }
  out.rhs = std::pow(outer, p / 2.0);
  out.holds = out.lhs <= out.rhs * (1.0 + 1e-12);
  return out;
}

}  // namespace frl
