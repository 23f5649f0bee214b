#include <gtest/gtest.h>

#include <random>

#include "frl/kernels.hpp"
#include "frl/stage.hpp"
#include "oracles.hpp"

using namespace frl;

namespace {

double rel(cdouble a, cdouble b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); }

struct Fixture {
  std::vector<std::int64_t> points;
  std::vector<cdouble> coeffs;
  kernels::LatticeSum sum(int dim) const { return {dim, points, coeffs}; }
};

Fixture lattice(std::mt19937_64& rng, int dim, std::int64_t modulus, std::size_t size) {
  const auto s = oracle::random_alphabet(rng, dim, modulus, size);
  return {s.flat(), oracle::random_coeffs(rng, size)};
}

CantorStage stage(std::uint64_t seed) {
  const auto plan = make_sequence_plan(1.0, 2, 4, 3);
  std::mt19937_64 rng(seed);
  std::vector<Alphabet> sets;
  for (int j = 0; j < 3; ++j) sets.push_back(oracle::random_alphabet(rng, 2, plan.n_seq[j], plan.t_seq[j]));
  BuildOptions opt;
  opt.seed = seed;
  return build_stage(plan, sets, 3, opt);
}

}  // namespace

TEST(Kernels, LatticePowerMeanAgrees) {
  std::mt19937_64 rng(1);
  for (int dim = 1; dim <= 2; ++dim) {
    const auto f = lattice(rng, dim, 9, 6);
    for (double p : {3.0, 4.0, 5.5}) {
      const double a = kernels::serial::lattice_power_mean(f.sum(dim), p, 64);
      const double b = kernels::omp::lattice_power_mean(f.sum(dim), p, 64);
      EXPECT_NEAR(a / b, 1.0, 1e-12);
    }
  }
}

TEST(Kernels, LatticeGradientAgrees) {
  std::mt19937_64 rng(2);
  const auto f = lattice(rng, 2, 7, 5);
  const auto a = kernels::serial::lattice_power_gradient(f.sum(2), 4.5, 48);
  const auto b = kernels::omp::lattice_power_gradient(f.sum(2), 4.5, 48);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_LT(rel(a[i], b[i]), 1e-12);
}

TEST(Kernels, TreePhaseSumsAgree) {
  const auto s = stage(3);
  const auto tree = s.phase_tree();
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-500.0, 500.0);
  std::vector<double> xis(2 * 300);
  for (auto& v : xis) v = u(rng);
  const auto a = kernels::serial::tree_phase_sums(tree, xis);
  const auto b = kernels::omp::tree_phase_sums(tree, xis);
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(a[i], b[i]);
}

TEST(Kernels, NodeSumOnGridAgrees) {
  const auto s = stage(4);
  std::mt19937_64 rng(4);
  const auto w = oracle::random_coeffs(rng, s.count(3));
  const kernels::NodeSum f{2, s.scale(3), s.corners(3), w};
  const kernels::MidpointGrid grid{2, {-3.0, 1.0}, 0.37, 40};
  const auto a = kernels::serial::node_sum_on_grid(f, grid);
  const auto b = kernels::omp::node_sum_on_grid(f, grid);
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_LT(rel(a[i], b[i]), 1e-12);
}

TEST(Kernels, PowerSumAgrees) {
  std::mt19937_64 rng(5);
  const auto v = oracle::random_coeffs(rng, 50000);
  EXPECT_NEAR(kernels::serial::power_sum(v, 3.3) / kernels::omp::power_sum(v, 3.3), 1.0, 1e-12);
}

TEST(Kernels, ThreadCountDoesNotChangeResults) {
  std::mt19937_64 rng(6);
  const auto v = oracle::random_coeffs(rng, 3 * kernels::kReductionChunk + 17);
  const auto f = lattice(rng, 2, 8, 7);
  kernels::set_thread_count(1);
  const double a = kernels::omp::power_sum(v, 2.7);
  const double b = kernels::omp::lattice_power_mean(f.sum(2), 5.0, 80);
  kernels::set_thread_count(4);
  const double c = kernels::omp::power_sum(v, 2.7);
  const double d = kernels::omp::lattice_power_mean(f.sum(2), 5.0, 80);
  kernels::set_thread_count(0);
  EXPECT_EQ(a, c);
  EXPECT_EQ(b, d);
}
