#include "frl/martingale.hpp"

#include <cmath>
#include <random>

namespace frl {

namespace {

struct ParentCell {
  std::optional<std::int64_t> parent;  // node of the skeleton's deepest level containing x
  Point digit;                         // position of x inside that parent, in [n_k)^d
};

ParentCell locate(const CantorStage& skeleton, std::int64_t n, std::span<const double> x) {
  const int j = skeleton.depth();
  const auto scale = skeleton.scale(j) * n;
  Point cell(x.size());
  ParentCell out;
  out.digit.resize(x.size());
  for (std::size_t a = 0; a < x.size(); ++a) {
    const auto fine = std::min(static_cast<std::int64_t>(std::floor(x[a] * scale)), scale - 1);
    cell[a] = fine / n;
    out.digit[a] = fine % n;
  }
  out.parent = skeleton.find_node(j, cell);
  return out;
}

bool hits(const Alphabet& b, const Point& digit, const std::int64_t* v) {
  Point shifted(digit.size());
  const auto n = b.modulus();
  for (std::size_t a = 0; a < digit.size(); ++a) shifted[a] = ((digit[a] - v[a]) % n + n) % n;
  return b.contains(shifted);
}

}  // namespace

double move_off_grid(std::vector<double>& x, std::int64_t scale) {
  const double step = 1e-6 / static_cast<double>(scale);
  double moved = 0.0;
  for (auto& c : x) {
    require(c >= 0.0 && c <= 1.0, "martingale point must lie in [0,1]^d");
    const double u = c * static_cast<double>(scale);
    if (std::abs(u - std::nearbyint(u)) < 1e-9) {
      const double shifted = (c + step < 1.0) ? c + step : c - step;
      moved = std::max(moved, std::abs(shifted - c));
      c = shifted;
    }
  }
  return moved;
}

MartingaleResult martingale_check(const SequencePlan& plan, const std::vector<Alphabet>& alphabets,
                                  int level, std::vector<double> x, std::int64_t trials,
                                  std::uint64_t seed) {
  require(level >= 1 && level <= plan.depth(), "martingale level must lie in [1, plan depth]");
  require(trials >= 1, "martingale check needs at least one trial");
  require(static_cast<int>(x.size()) == plan.dim, "point dimension mismatch");
  require(static_cast<int>(alphabets.size()) >= level, "one alphabet per level required");

  BuildOptions options;
  options.seed = seed;
  const CantorStage skeleton = build_stage(plan, alphabets, level - 1, options);
  const Alphabet& next = alphabets[level - 1];
  const auto n = plan.n_seq[level - 1];
  const int d = plan.dim;

  MartingaleResult result;
  result.trials = trials;
  result.perturbation = move_off_grid(x, skeleton.scale(level - 1) * n);
  result.point = x;
  result.reference = stage_density(skeleton, x);

  const ParentCell cell = locate(skeleton, n, x);
  if (!cell.parent) {
    result.empirical_mean = 0.0;
    result.z_score = 0.0;
    return result;
  }
  const double density = std::pow(static_cast<double>(skeleton.scale(level - 1) * n), d) /
                         static_cast<double>(skeleton.count(level - 1) * plan.t_seq[level - 1]);

  std::int64_t hit_count = 0;
#pragma omp parallel for reduction(+ : hit_count) schedule(static)
  for (std::int64_t m = 0; m < trials; ++m) {
    std::mt19937_64 rng(derive_seed(derive_seed(seed, 0x3a27), static_cast<std::uint64_t>(m)));
    std::int64_t v[kMaxDim];
    for (int a = 0; a < d; ++a) v[a] = static_cast<std::int64_t>(uniform_index(rng, n));
    if (hits(next, cell.digit, v)) ++hit_count;
  }
  const double mt = static_cast<double>(trials);
  const double rate = static_cast<double>(hit_count) / mt;
  result.empirical_mean = density * rate;
  const double sd = trials > 1 ? density * std::sqrt(rate * (1.0 - rate) * mt / (mt - 1.0)) : 0.0;
  const double diff = result.empirical_mean - result.reference;
  if (sd > 0.0) {
    result.z_score = diff / (sd / std::sqrt(mt));
  } else {
    result.z_score = diff == 0.0 ? 0.0 : std::copysign(INFINITY, diff);
  }
  return result;
}

double exact_translate_average(const CantorStage& skeleton, const Alphabet& next,
                               std::span<const double> x) {
  require(static_cast<int>(x.size()) == skeleton.dim(), "point dimension mismatch");
  require(next.dim() == skeleton.dim(), "alphabet dimension mismatch");
  const int d = skeleton.dim();
  const auto n = next.modulus();
  const ParentCell cell = locate(skeleton, n, x);
  if (!cell.parent) return 0.0;
  const int j = skeleton.depth();
  const double density = std::pow(static_cast<double>(skeleton.scale(j) * n), d) /
                         static_cast<double>(skeleton.count(j) * static_cast<std::int64_t>(next.size()));
  const std::int64_t total = ipow(n, d);
  std::int64_t hit_count = 0;
  for (std::int64_t flat = 0; flat < total; ++flat) {
    std::int64_t v[kMaxDim];
    std::int64_t rest = flat;
    for (int a = d - 1; a >= 0; --a) {
      v[a] = rest % n;
      rest /= n;
    }
    if (hits(next, cell.digit, v)) ++hit_count;
  }
  return density * static_cast<double>(hit_count) / static_cast<double>(total);
}

}  // namespace frl
