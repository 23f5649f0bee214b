#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "frl/ball.hpp"
#include "frl/martingale.hpp"
#include "frl/serialize.hpp"
#include "frl/stage.hpp"
#include "oracles.hpp"

using namespace frl;

namespace {

Alphabet line(std::int64_t modulus, std::vector<std::int64_t> xs) {
  std::vector<Point> pts;
  for (auto x : xs) pts.push_back({x});
  return Alphabet(1, modulus, pts);
}

CantorStage ternary(int depth, TranslationMode mode = TranslationMode::kZero) {
  const auto plan = plan_from_sequences(1, std::log(2.0) / std::log(3.0),
                                        std::vector<std::int64_t>(depth, 3),
                                        std::vector<std::int64_t>(depth, 2));
  BuildOptions opt;
  opt.translations = mode;
  return build_stage(plan, std::vector<Alphabet>(depth, line(3, {0, 2})), depth, opt);
}

/// Random stage with d <= 2, k <= 3 and random alphabets.
CantorStage random_stage(std::uint64_t seed, int dim, int depth) {
  std::mt19937_64 rng(seed);
  const double alpha = 0.3 * dim + 0.4 * dim * (rng() % 1000) / 1000.0;
  const auto plan = make_sequence_plan(alpha, dim, 3 + static_cast<std::int64_t>(rng() % 4),
                                       std::max(depth, 1));
  std::vector<Alphabet> sets;
  for (int j = 0; j < plan.depth(); ++j) {
    sets.push_back(oracle::random_alphabet(rng, dim, plan.n_seq[j], plan.t_seq[j]));
  }
  BuildOptions opt;
  opt.seed = seed;
  return build_stage(plan, sets, depth, opt);
}

/// mu_k of the interval [a, b] by summing exact overlaps with every cube.
double interval_mass(const CantorStage& s, double a, double b) {
  const int k = s.depth();
  const double side = 1.0 / s.scale(k);
  double total = 0.0;
  for (auto c : s.corners(k)) {
    const double lo = c * side;
    total += std::max(0.0, std::min(b, lo + side) - std::max(a, lo));
  }
  return total / side / s.count(k);
}

}  // namespace

TEST(Stage, DepthZeroIsUnitCube) {
  const auto s = random_stage(1, 2, 0);
  EXPECT_EQ(s.count(0), 1);
  EXPECT_EQ(s.scale(0), 1);
  EXPECT_EQ(measure_of_cube(s, 0, {0, 0}), Rational(1));
  const double x[2] = {0.3, 0.9};
  EXPECT_DOUBLE_EQ(stage_density(s, x), 1.0);
}

TEST(Stage, TernaryFirstStep) {
  const auto s = ternary(1);
  ASSERT_EQ(s.count(1), 2);
  EXPECT_EQ(s.corner(1, 0), Point{0});
  EXPECT_EQ(s.corner(1, 1), Point{2});
  EXPECT_EQ(s.scale(1), 3);
}

TEST(Stage, CountsAndContainment) {
  const auto plan = plan_from_sequences(1, 0.5, {4, 4}, {2, 2});
  const std::vector<Alphabet> sets = {line(4, {0, 1}), line(4, {1, 3})};
  BuildOptions opt;
  opt.seed = 7;
  const auto s = build_stage(plan, sets, 2, opt);
  EXPECT_EQ(s.count(1), 2);
  EXPECT_EQ(s.count(2), 4);
  for (std::int64_t i = 0; i < s.count(2); ++i) {
    const auto child = s.corner(2, i)[0];
    const auto parent = s.corner(1, s.parent(2, i))[0];
    EXPECT_GE(child, parent * 4);
    EXPECT_LE(child + 1, (parent + 1) * 4);
  }
}

TEST(Stage, NestingMassAndDistinctness) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const int dim = 1 + static_cast<int>(seed % 2);
    const auto s = random_stage(seed, dim, 3);
    for (int j = 1; j <= s.depth(); ++j) {
      const auto n = s.plan().n_seq[j - 1];
      std::set<Point> seen;
      Rational mass = 0;
      for (std::int64_t i = 0; i < s.count(j); ++i) {
        const Point c = s.corner(j, i);
        const Point p = s.corner(j - 1, s.parent(j, i));
        int containing = 0;
        for (std::int64_t q = 0; q < s.count(j - 1); ++q) {
          const Point pq = s.corner(j - 1, q);
          bool inside = true;
          for (int a = 0; a < dim; ++a) inside = inside && c[a] >= pq[a] * n && c[a] + 1 <= (pq[a] + 1) * n;
          containing += inside ? 1 : 0;
        }
        EXPECT_EQ(containing, 1);
        for (int a = 0; a < dim; ++a) EXPECT_EQ(c[a] / n, p[a]);
        EXPECT_TRUE(seen.insert(c).second);
        mass += measure_of_cube(s, j, c);
      }
      EXPECT_EQ(mass, Rational(1));
    }
  }
}

TEST(Stage, MeasureOfCube) {
  const auto plan = plan_from_sequences(1, 0.6, {4, 6}, {2, 3});
  const auto s = build_stage(plan, {line(4, {0, 3}), line(6, {0, 1, 4})}, 2, {});
  EXPECT_EQ(measure_of_cube(s, 1, s.corner(1, 0)), Rational(1, 2));
  EXPECT_EQ(measure_of_cube(s, 2, s.corner(2, 5)), Rational(1, 6));
  Point missing = {0};
  while (s.find_node(2, missing)) ++missing[0];
  EXPECT_THROW(measure_of_cube(s, 2, missing), ValidationError);
}

TEST(Stage, Deterministic) {
  EXPECT_EQ(random_stage(5, 2, 3), random_stage(5, 2, 3));
  EXPECT_FALSE(random_stage(5, 2, 3) == random_stage(6, 2, 3));
}

TEST(Stage, TruncationIsPrefix) {
  const auto deep = random_stage(3, 1, 3);
  const auto shallow = deep.truncated(2);
  EXPECT_EQ(shallow.depth(), 2);
  for (int j = 0; j <= 2; ++j) {
    EXPECT_TRUE(std::equal(shallow.corners(j).begin(), shallow.corners(j).end(),
                           deep.corners(j).begin(), deep.corners(j).end()));
  }
}

TEST(Stage, BudgetExceeded) {
  const auto plan = make_sequence_plan(1.0, 2, 8, 3);
  std::vector<Alphabet> sets;
  std::mt19937_64 rng(0);
  for (int j = 0; j < 3; ++j) sets.push_back(oracle::random_alphabet(rng, 2, plan.n_seq[j], plan.t_seq[j]));
  BuildOptions opt;
  opt.node_budget = 100;
  EXPECT_THROW(build_stage(plan, sets, 3, opt), BudgetError);
}

TEST(Stage, AlphabetMismatchRejected) {
  const auto plan = plan_from_sequences(1, 0.5, {4, 4}, {2, 2});
  EXPECT_THROW(build_stage(plan, {line(4, {0, 1}), line(5, {0, 1})}, 2, {}), ValidationError);
  EXPECT_THROW(build_stage(plan, {line(4, {0, 1}), line(4, {0, 1, 2})}, 2, {}), ValidationError);
}

TEST(Stage, DensityIsHalfOpen) {
  const auto s = ternary(1);
  const double inside[1] = {0.0};
  const double edge[1] = {1.0 / 3.0 + 1e-15};
  const double gap[1] = {0.5};
  EXPECT_DOUBLE_EQ(stage_density(s, inside), 1.5);
  EXPECT_DOUBLE_EQ(stage_density(s, edge), 0.0);
  EXPECT_DOUBLE_EQ(stage_density(s, gap), 0.0);
}

TEST(Serialize, StageRoundTrip) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto s = random_stage(seed, 1 + seed % 2, 1 + seed % 3);
    const Json doc = stage_to_json(s, "abc");
    const auto back = stage_from_json(Json::parse(doc.dump()));
    EXPECT_EQ(back, s);
    EXPECT_EQ(stage_digest(back), stage_digest(s));
  }
}

TEST(Serialize, DocumentsRoundTrip) {
  const auto a = line(7, {0, 1, 5});
  EXPECT_EQ(alphabet_from_json(alphabet_to_json(a)), a);
  const auto plan = make_sequence_plan(0.7, 1, 5, 3);
  EXPECT_EQ(plan_from_json(plan_to_json(plan)), plan);
  LambdaPCertificate cert;
  cert.exponent = 5.0;
  cert.constant_lower = 1.3;
  cert.method = CertificateMethod::kQuadrature;
  cert.grid_spacing = 1.0 / 64;
  const auto back = certificate_from_json(certificate_to_json(cert));
  EXPECT_EQ(back.constant_lower, cert.constant_lower);
  EXPECT_EQ(back.method, cert.method);
}

TEST(Serialize, RejectsWrongVersion) {
  Json doc = alphabet_to_json(line(3, {1}));
  doc["format_version"] = 99;
  EXPECT_THROW(alphabet_from_json(doc), ValidationError);
}

TEST(Serialize, Sha256KnownVector) {
  EXPECT_EQ(sha256_hex("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST(Ball, BoxBallVolume) {
  const double lo1[1] = {0.0}, hi1[1] = {1.0}, c1[1] = {0.9};
  EXPECT_NEAR(box_ball_volume(lo1, hi1, c1, 0.3), 0.4, 1e-15);
  const double lo2[2] = {-1, -1}, hi2[2] = {1, 1}, c2[2] = {0, 0};
  EXPECT_NEAR(box_ball_volume(lo2, hi2, c2, 0.5), std::numbers::pi / 4, 1e-13);
  EXPECT_NEAR(box_ball_volume(lo2, hi2, c2, 5.0), 4.0, 1e-13);
  const double lo3[3] = {0, 0, 0}, hi3[3] = {1, 1, 1}, c3[3] = {0, 0, 0};
  EXPECT_NEAR(box_ball_volume(lo3, hi3, c3, 1.0), std::numbers::pi / 6, 1e-9);
  // Quarter disc of radius 1 clipped to the unit square: the whole quarter disc.
  const double lo4[2] = {0, 0}, hi4[2] = {1, 1};
  EXPECT_NEAR(box_ball_volume(lo4, hi4, c2, 1.0), std::numbers::pi / 4, 1e-13);
}

TEST(Ball, BoxBallVolumeMonteCarlo) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int dim = 2; dim <= 3; ++dim) {
    for (int trial = 0; trial < 5; ++trial) {
      std::vector<double> lo(dim), hi(dim), c(dim);
      for (int a = 0; a < dim; ++a) {
        lo[a] = u(rng);
        hi[a] = lo[a] + 0.2 + u(rng);
        c[a] = u(rng);
      }
      const double r = 0.3 + u(rng);
      const int samples = 400000;
      std::int64_t hits = 0;
      double vol = 1.0;
      for (int a = 0; a < dim; ++a) vol *= hi[a] - lo[a];
      for (int i = 0; i < samples; ++i) {
        double d2 = 0.0;
        for (int a = 0; a < dim; ++a) {
          const double x = lo[a] + (hi[a] - lo[a]) * u(rng);
          d2 += (x - c[a]) * (x - c[a]);
        }
        hits += d2 <= r * r ? 1 : 0;
      }
      const double mc = vol * hits / samples;
      EXPECT_NEAR(box_ball_volume(lo, hi, c, r), mc, 5.0 * vol / std::sqrt(double(samples)));
    }
  }
}

TEST(Ball, Examples) {
  const auto unit = ternary(1).truncated(0);
  const double c[1] = {0.5};
  EXPECT_NEAR(ball_mass(unit, c, 0.25), 0.5, 1e-15);
  const auto s = random_stage(2, 2, 2);
  const double c2[2] = {0.3, 0.7};
  EXPECT_NEAR(ball_mass(s, c2, std::sqrt(2.0)), 1.0, 1e-12);
  const auto t = ternary(1);
  const double third[1] = {1.0 / 3.0};
  EXPECT_NEAR(ball_mass(t, third, 1.0 / 6.0), interval_mass(t, 1.0 / 6.0, 0.5), 1e-14);
  EXPECT_NEAR(ball_mass(t, third, 1.0 / 6.0), 0.25, 1e-14);
}

TEST(Ball, MassMatchesDirectIntegration) {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto s = random_stage(seed, 1, 3);
    for (int i = 0; i < 40; ++i) {
      const double x[1] = {u(rng)};
      const double r = std::pow(2.0, -8.0 * u(rng));
      EXPECT_NEAR(ball_mass(s, x, r), interval_mass(s, x[0] - r, x[0] + r), 1e-12);
    }
  }
}

TEST(Ball, CoveringCountBounded) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const int dim = 1 + static_cast<int>(seed % 2);
    const auto s = random_stage(seed, dim, 2);
    for (int j = 0; j <= s.depth(); ++j) {
      for (int i = 0; i < 50; ++i) {
        std::vector<double> x(dim);
        for (auto& v : x) v = u(rng);
        EXPECT_LE(covering_count(s, j, x, 1.0 / s.scale(j)), ipow(3, dim));
      }
    }
  }
}

TEST(BallCondition, LebesgueCases) {
  const auto unit = ternary(1).truncated(0);
  const auto r1 = ball_condition_sup(unit, 1.0, {});
  EXPECT_LE(r1.sup_ratio, 2.0 + 1e-12);
  EXPECT_GT(r1.sup_ratio, 1.5);
  const auto r0 = ball_condition_sup(unit, 0.0, {});
  EXPECT_NEAR(r0.sup_ratio, 1.0, 1e-12);
}

TEST(BallCondition, ArgmaxAttainsRatio) {
  const auto s = random_stage(8, 1, 3);
  const auto r = ball_condition_sup(s, 0.3, {});
  EXPECT_NEAR(ball_mass(s, r.argmax_center, r.argmax_radius) / std::pow(r.argmax_radius, 0.3),
              r.sup_ratio, 1e-12 * r.sup_ratio);
  EXPECT_GE(r.sup_ratio, 0.0);
}

TEST(BallCondition, StableUnderDoubledSampling) {
  const auto plan = make_sequence_plan(0.5, 1, 4, 3);
  std::mt19937_64 rng(21);
  std::vector<Alphabet> sets;
  for (int j = 0; j < 3; ++j) sets.push_back(oracle::random_alphabet(rng, 1, plan.n_seq[j], plan.t_seq[j]));
  BuildOptions opt;
  opt.seed = 21;
  const auto s = build_stage(plan, sets, 3, opt);
  BallSampler a;
  a.random_centers = 256;
  BallSampler b = a;
  b.random_centers = 512;
  const double ra = ball_condition_sup(s, 0.4, a).sup_ratio;
  const double rb = ball_condition_sup(s, 0.4, b).sup_ratio;
  EXPECT_NEAR(rb / ra, 1.0, 0.1);
}

TEST(BallCondition, WarnsAtOrAboveAlpha) {
  const auto s = ternary(2, TranslationMode::kRandom);
  EXPECT_FALSE(ball_condition_sup(s, 0.7, {}).warning.empty());
  EXPECT_TRUE(ball_condition_sup(s, 0.5, {}).warning.empty());
}

TEST(Martingale, ExactTwoTranslateAverage) {
  const auto plan = plan_from_sequences(1, 0.5, {2}, {1});
  const auto skeleton = build_stage(plan, {line(2, {0})}, 0, {});
  const double x[1] = {0.25};
  EXPECT_DOUBLE_EQ(exact_translate_average(skeleton, line(2, {0}), x), 1.0);
  const auto r = martingale_check(plan, {line(2, {0})}, 1, {0.25}, 2000, 3);
  EXPECT_DOUBLE_EQ(r.reference, 1.0);
  EXPECT_LT(std::abs(r.z_score), 5.0);
}

TEST(Martingale, ExactAverageEqualsParentDensity) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto full = random_stage(seed, 1 + seed % 2, 2);
    const auto skeleton = full.truncated(1);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 10; ++i) {
      std::vector<double> x(full.dim());
      for (auto& v : x) v = u(rng);
      move_off_grid(x, full.scale(2));
      EXPECT_NEAR(exact_translate_average(skeleton, full.base_sets()[1], x),
                  stage_density(skeleton, x), 1e-12);
    }
  }
}

TEST(Martingale, OffGridShiftIsTiny) {
  std::vector<double> x = {0.5, 0.25};
  const double shift = move_off_grid(x, 4);
  EXPECT_GT(shift, 0.0);
  EXPECT_LT(shift, 1e-5);
  std::vector<double> y = {0.3};
  EXPECT_EQ(move_off_grid(y, 4), 0.0);
}
