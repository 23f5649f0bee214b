#include <gtest/gtest.h>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <map>
#include <numbers>
#include <random>

#include "frl/decoupling.hpp"
#include "frl/extension.hpp"
#include "frl/spectral.hpp"
#include "frl/weights.hpp"
#include "oracles.hpp"

using namespace frl;
using boost::math::quadrature::gauss_kronrod;

namespace {

CantorStage stage_for(std::uint64_t seed, int dim, double alpha, std::int64_t n1, int depth) {
  const auto plan = make_sequence_plan(alpha, dim, n1, std::max(depth, 1));
  std::mt19937_64 rng(seed);
  std::vector<Alphabet> sets;
  for (int j = 0; j < plan.depth(); ++j) {
    sets.push_back(oracle::random_alphabet(rng, dim, plan.n_seq[j], plan.t_seq[j]));
  }
  BuildOptions opt;
  opt.seed = seed;
  return build_stage(plan, sets, depth, opt);
}

Cube cube(std::vector<double> corner, double side) { return {std::move(corner), side}; }

double sinc2(double u) {
  if (u == 0.0) return 1.0;
  const double s = std::sin(std::numbers::pi * u) / (std::numbers::pi * u);
  return s * s;
}

/// N int_0^1 e^{-2 pi i m u} sinc^2(u) du by adaptive Gauss-Kronrod.
cdouble axis_kernel(std::int64_t m, double n) {
  auto re = [&](double u) { return std::cos(kTwoPi * m * u) * sinc2(u); };
  auto im = [&](double u) { return -std::sin(kTwoPi * m * u) * sinc2(u); };
  const double a = gauss_kronrod<double, 61>::integrate(re, 0.0, 1.0, 10, 1e-13);
  const double b = gauss_kronrod<double, 61>::integrate(im, 0.0, 1.0, 10, 1e-13);
  return n * cdouble(a, b);
}

}  // namespace

TEST(Extension, OnesMatchesMuHatGrowth) {
  const auto s = stage_for(1, 1, 0.5, 4, 2);
  for (double r : {4.0, 16.0}) {
    const double radii[] = {r};
    const double spectral = lp_growth_of_muhat(s, 5.0, radii)[0];
    const double ext = extension_norm(s, DensityOnStage::ones(s), 5.0, cube({-r}, 2 * r));
    EXPECT_NEAR(ext / spectral, 1.0, 3e-3);
  }
}

TEST(Extension, UnitCubeL2AgainstAdaptiveQuadrature) {
  const auto unit = stage_for(0, 1, 0.5, 4, 0);
  const double exact = std::sqrt(gauss_kronrod<double, 61>::integrate(sinc2, 0.0, 1.0, 15, 1e-14));
  const double ext = extension_norm(unit, DensityOnStage::ones(unit), 2.0, cube({0.0}, 1.0));
  EXPECT_NEAR(ext * ext / (exact * exact), 1.0, 1e-3);
}

TEST(Extension, SingleCubeModulationInvariance) {
  const auto s = stage_for(2, 2, 1.0, 3, 2);
  const double n = static_cast<double>(s.scale(2));
  double first = -1.0;
  for (std::int64_t a = 0; a < s.count(2); ++a) {
    std::vector<cdouble> g(s.count(2), 0.0);
    g[a] = {0.6, -0.8};
    const double v = extension_norm(s, DensityOnStage(s, g), 2.0, cube({0.5, -0.25}, n));
    if (first < 0) first = v;
    EXPECT_NEAR(v / first, 1.0, 1e-6);
  }
}

TEST(Extension, DualityQuadraticForm) {
  for (int dim = 1; dim <= 2; ++dim) {
    const auto s = stage_for(3 + dim, dim, 0.5 * dim, 4, 2);
    const std::int64_t t = s.count(2);
    const double n = static_cast<double>(s.scale(2));
    std::mt19937_64 rng(dim);
    const auto g = oracle::random_coeffs(rng, t);
    const auto corners = s.corners(2);
    std::map<std::int64_t, cdouble> kernel;
    for (std::int64_t m = -s.scale(2); m <= s.scale(2); ++m) kernel[m] = axis_kernel(m, n);
    cdouble form = 0.0;
    for (std::int64_t a = 0; a < t; ++a) {
      for (std::int64_t b = 0; b < t; ++b) {
        cdouble k = 1.0;
        for (int i = 0; i < dim; ++i) k *= kernel.at(corners[a * dim + i] - corners[b * dim + i]);
        form += g[a] * std::conj(g[b]) * k;
      }
    }
    const double expected = form.real() / double(t * t);
    const double ext = extension_norm(s, DensityOnStage(s, g), 2.0,
                                      cube(std::vector<double>(dim, 0.0), n), 1.0 / 64);
    EXPECT_NEAR(ext * ext / expected, 1.0, 1e-4) << "dim " << dim;
  }
}

TEST(Extension, ScalingCovariance) {
  const auto s = stage_for(4, 1, 0.5, 4, 2);
  std::mt19937_64 rng(4);
  const auto g = oracle::random_coeffs(rng, s.count(2));
  auto g3 = g;
  for (auto& v : g3) v *= 3.0;
  const Cube j = cube({-8.0}, 16.0);
  const double a = extension_norm(s, DensityOnStage(s, g), 3.5, j);
  const double b = extension_norm(s, DensityOnStage(s, g3), 3.5, j);
  EXPECT_NEAR(b / a, 3.0, 1e-12);
  EXPECT_NEAR(b / DensityOnStage(s, g3).l2_norm(), a / DensityOnStage(s, g).l2_norm(), 1e-12);
}

TEST(Extension, FftMatchesDirect) {
  const auto s = stage_for(5, 2, 1.0, 3, 2);
  std::mt19937_64 rng(5);
  const auto g = oracle::random_coeffs(rng, s.count(2));
  const auto grid = cube_grid(cube({-4.5, 2.0}, s.scale(2)), 0.25);
  ASSERT_TRUE(fft_applicable(s, grid));
  const auto fft = extension_on_grid(s, g, grid, ExtensionMethod::kFft);
  const auto direct = extension_on_grid(s, g, grid, ExtensionMethod::kDirect);
  double worst = 0.0;
  for (std::size_t i = 0; i < fft.size(); ++i) worst = std::max(worst, std::abs(fft[i] - direct[i]));
  EXPECT_LT(worst, 1e-10);

  const auto values = oracle::random_coeffs(rng, grid.total());
  const auto adj_fft = extension_adjoint(s, values, grid, ExtensionMethod::kFft);
  const auto adj_direct = extension_adjoint(s, values, grid, ExtensionMethod::kDirect);
  cdouble lhs = 0.0, rhs = 0.0;
  for (std::size_t i = 0; i < fft.size(); ++i) lhs += fft[i] * std::conj(values[i]);
  for (std::size_t a = 0; a < g.size(); ++a) {
    rhs += g[a] * std::conj(adj_direct[a]);
    EXPECT_LT(std::abs(adj_fft[a] - adj_direct[a]), 1e-9);
  }
  EXPECT_LT(std::abs(lhs - rhs), 1e-9 * std::abs(lhs));
}

TEST(Extension, NonIntegerGridFallsBackToDirect) {
  const auto s = stage_for(6, 1, 0.5, 4, 2);
  const auto grid = cube_grid(cube({0.0}, 3.3), 0.3);
  EXPECT_FALSE(fft_applicable(s, grid));
  std::vector<cdouble> g(s.count(2), 1.0);
  EXPECT_THROW(extension_on_grid(s, g, grid, ExtensionMethod::kFft), ValidationError);
  EXPECT_EQ(extension_on_grid(s, g, grid).size(), static_cast<std::size_t>(grid.total()));
}

TEST(Restriction, DepthZeroOnesBoundedByOne) {
  const auto unit = stage_for(0, 2, 1.0, 3, 0);
  RestrictionOptions opt;
  opt.cube = cube({0.0, 0.0}, 1.0);
  opt.c0 = 1.0;
  for (const auto& r : restriction_report(unit, 4.0, opt)) {
    EXPECT_LE(r.measured_ratio, 1.0 + 1e-12);
    EXPECT_DOUBLE_EQ(r.c0, 1.0);
  }
}

TEST(Restriction, PowerIterationDominates) {
  for (std::uint64_t seed = 0; seed < 3; ++seed) {
    const auto s = stage_for(seed, 1 + seed % 2, 0.5 * (1 + seed % 2), 4, 2);
    RestrictionOptions opt;
    opt.seed = seed;
    opt.power_iterations = 10;
    const auto reports = restriction_report(s, 5.0, opt);
    ASSERT_EQ(reports.size(), 4u);
    double power = 0.0;
    for (const auto& r : reports) {
      if (r.g_kind == GKind::kPowerIterated) power = r.measured_ratio;
    }
    for (const auto& r : reports) {
      EXPECT_GE(r.measured_ratio, 0.0);
      EXPECT_LE(r.measured_ratio, power * (1 + 1e-12)) << to_string(r.g_kind);
      const double scale = std::pow(double(s.scale(2)), s.dim() / 5.0) / std::sqrt(double(s.count(2)));
      EXPECT_NEAR(r.normalized_ratio, r.measured_ratio / scale, 1e-12 * r.normalized_ratio);
      EXPECT_NEAR(r.paper_bound, std::pow(r.c0, 2) * scale, 1e-12 * r.paper_bound);
    }
  }
}

TEST(Restriction, StrategyNames) {
  for (auto k : {GKind::kOnes, GKind::kRandomSigns, GKind::kKnappConcentrated, GKind::kPowerIterated}) {
    EXPECT_EQ(g_kind_from_string(to_string(k)), k);
  }
  EXPECT_THROW(g_kind_from_string("bogus"), ValidationError);
}

TEST(Restriction, DensityNormalised) {
  const auto s = stage_for(7, 1, 0.5, 4, 2);
  for (auto k : {GKind::kOnes, GKind::kRandomSigns, GKind::kKnappConcentrated}) {
    EXPECT_NEAR(strategy_density(s, k, 1).l2_norm(), 1.0, 1e-12);
  }
}

TEST(Weights, MassClosedForms) {
  EXPECT_NEAR(weight_mass(1), 2.0 / 99.0, 1e-12);
  EXPECT_NEAR(weight_mass(2), 2.0 * std::numbers::pi / (98.0 * 99.0), 1e-12);
  EXPECT_NEAR(weight_mass(3), 4.0 * std::numbers::pi * 2.0 / (97.0 * 98.0 * 99.0), 1e-12);
}

TEST(Weights, NormOfOneIsMass) {
  for (int dim = 1; dim <= 2; ++dim) {
    for (double side : {1.0, 3.0}) {
      const Cube i = cube(std::vector<double>(dim, 0.5), side);
      const auto grid = graded_grid(i);
      std::vector<cdouble> f(grid.total(), 1.0);
      const double v = weighted_lp_norm(f, grid, {i, 1.0, true});
      EXPECT_NEAR(v / weight_mass(dim), 1.0, 1e-6) << dim << " " << side;
      std::vector<cdouble> z(grid.total(), 0.0);
      EXPECT_EQ(weighted_lp_norm(z, grid, {i, 3.0, true}), 0.0);
    }
  }
}

TEST(Weights, TailTruncation) {
  const Cube i = cube({0.0}, 2.0);
  auto f = [](const TensorGrid& g) {
    std::vector<cdouble> v(g.total());
    std::vector<double> x(1);
    for (std::int64_t k = 0; k < g.total(); ++k) {
      g.point(k, x.data());
      v[k] = std::cos(x[0]) + cdouble(0, 0.3);
    }
    return v;
  };
  const auto g4 = graded_grid(i, 4.0);
  const auto g8 = graded_grid(i, 8.0);
  const double a = weighted_lp_norm(f(g4), g4, {i, 3.0, true});
  const double b = weighted_lp_norm(f(g8), g8, {i, 3.0, true});
  EXPECT_NEAR(a / b, 1.0, 1e-4);
}

TEST(Weights, GridMustCoverDilatedCube) {
  const Cube i = cube({0.0}, 1.0);
  const auto narrow = midpoint_grid(cube({-1.0}, 3.0), 0.01);
  std::vector<cdouble> f(narrow.total(), 1.0);
  EXPECT_THROW(weighted_lp_norm(f, narrow, {i, 2.0, true}), ValidationError);
}

TEST(Weights, OverlapConstantAtLeastOne) {
  EXPECT_GE(weight_overlap_constant(1, 1), 1.0);
  EXPECT_GE(weight_overlap_constant(1, 4), weight_overlap_constant(1, 2));
  EXPECT_EQ(weight_overlap_constant(1, 4), weight_overlap_constant(1, 4));
}

TEST(Decoupling, SingleCubeWithinOverlapConstant) {
  const auto s = stage_for(8, 1, 0.5, 4, 1);
  const double n = static_cast<double>(s.scale(1));
  const double p = 4.0;
  const double c2 = weight_overlap_constant(1, s.scale(1));
  for (std::int64_t a = 0; a < s.count(1); ++a) {
    std::vector<cdouble> c(s.count(1), 0.0);
    c[a] = 1.0;
    const auto r = decoupling_check(s, 1, c, cube({0.0}, n), p);
    EXPECT_LE(r.ratio, std::pow(c2, 1.0 / p));
    EXPECT_GT(r.ratio, 0.0);
  }
}

TEST(Decoupling, TwoCubesAtPTwo) {
  const auto plan = plan_from_sequences(1, 0.5, {4}, {2});
  const auto s = build_stage(plan, {Alphabet(1, 4, {{0}, {2}})}, 1, {});
  const double c2 = weight_overlap_constant(1, 4);
  const auto r = decoupling_check(s, 1, std::vector<cdouble>{1.0, {0.0, 1.0}}, cube({-2.0}, 4.0), 2.0);
  EXPECT_LE(r.ratio, std::sqrt(c2));
}

TEST(Decoupling, ShiftOfActiveLabels) {
  // Moving all coefficients across nodes with the same spacing only modulates f.
  const auto plan = plan_from_sequences(1, 0.5, {6}, {3});
  const auto s = build_stage(plan, {Alphabet(1, 6, {{0}, {2}, {4}})}, 1, {});
  const auto a = decoupling_check(s, 1, std::vector<cdouble>{0.5, 1.0, 0.0}, cube({0.0}, 6.0), 3.0);
  const auto b = decoupling_check(s, 1, std::vector<cdouble>{0.0, 0.5, 1.0}, cube({0.0}, 6.0), 3.0);
  EXPECT_NEAR(a.lhs / b.lhs, 1.0, 1e-9);
  EXPECT_NEAR(a.rhs / b.rhs, 1.0, 1e-12);
}

TEST(Decoupling, RandomDrawsGrowGeometrically) {
  const auto s = stage_for(9, 1, 0.5, 4, 2);
  std::mt19937_64 rng(9);
  double worst[3] = {0.0, 0.0, 0.0};
  for (int level = 1; level <= 2; ++level) {
    const double n = static_cast<double>(s.scale(level));
    for (int draw = 0; draw < 100; ++draw) {
      const auto c = oracle::random_coeffs(rng, s.count(level));
      worst[level] = std::max(worst[level], decoupling_check(s, level, c, cube({0.0}, n), 4.0).ratio);
    }
  }
  EXPECT_LE(worst[2], worst[1] * worst[1] * 1.5);
}

TEST(MixedNorm, DegenerateCasesAreEqualities) {
  const double one[] = {2.5};
  const auto r = mixed_norm_inequality_check(one, 1, 1, 3.0);
  EXPECT_NEAR(r.lhs, r.rhs, 1e-12 * r.rhs);
  EXPECT_TRUE(r.holds);
  const double column[] = {1.0, 2.0, 0.5};
  const auto c = mixed_norm_inequality_check(column, 3, 1, 5.0);
  EXPECT_NEAR(c.lhs, c.rhs, 1e-12 * c.rhs);
}

TEST(MixedNorm, RandomSweep) {
  std::mt19937_64 rng(10);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 5000; ++trial) {
    const std::size_t rows = 1 + rng() % 8, cols = 1 + rng() % 8;
    std::vector<double> c(rows * cols);
    for (auto& v : c) v = u(rng) < 0.2 ? 0.0 : u(rng);
    const double p = 2.0 + 6.0 * (1.0 - u(rng));
    ASSERT_TRUE(mixed_norm_inequality_check(c, rows, cols, p).holds) << trial;
  }
  EXPECT_THROW(mixed_norm_inequality_check(std::vector<double>{-1.0}, 1, 1, 3.0), ValidationError);
}
