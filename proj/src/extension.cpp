#include "frl/extension.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <mutex>
#include <random>

#include "frl/alphabet.hpp"

namespace frl {

namespace {

std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

// In-place d-dimensional DFT of extent n per axis; sign is FFTW_FORWARD
// (e^{-2 pi i}) or FFTW_BACKWARD (e^{+2 pi i}), unnormalised.
void fft_in_place(std::vector<cdouble>& data, int dim, std::int64_t n, int sign) {
  int dims[kMaxDim];
  for (int a = 0; a < dim; ++a) dims[a] = static_cast<int>(n);
  auto* buffer = reinterpret_cast<fftw_complex*>(data.data());
  fftw_plan plan;
  {
    std::lock_guard<std::mutex> lock(fftw_planner_mutex());
    plan = fftw_plan_dft(dim, dims, buffer, buffer, sign, FFTW_ESTIMATE);
  }
  if (plan == nullptr) throw Error("FFTW could not create a plan");
  fftw_execute(plan);
  std::lock_guard<std::mutex> lock(fftw_planner_mutex());
  fftw_destroy_plan(plan);
}

std::int64_t fft_ratio(const CantorStage& stage, const kernels::MidpointGrid& grid) {
  const double q = grid.spacing * static_cast<double>(grid.count) /
                   static_cast<double>(stage.scale(stage.depth()));
  const double rounded = std::nearbyint(q);
  if (rounded < 1.0 || std::abs(q - rounded) > 1e-9 * rounded) return 0;
  return static_cast<std::int64_t>(rounded);
}

cdouble box_at(const kernels::MidpointGrid& grid, std::int64_t flat, double inv_scale) {
  cdouble out{1.0, 0.0};
  for (int a = grid.dim - 1; a >= 0; --a) {
    out *= box_hat(grid.coordinate(a, flat % grid.count) * inv_scale);
    flat /= grid.count;
  }
  return out;
}

// FFT bin of node `a` and the node's phase e(-m.origin/N - m q / (2n)).
struct NodeBin {
  std::int64_t index;
  cdouble phase;
};

NodeBin node_bin(const CantorStage& stage, const kernels::MidpointGrid& grid, std::int64_t q,
                 std::int64_t a) {
  const int d = stage.dim();
  const auto n = grid.count;
  const auto big_n = stage.scale(stage.depth());
  const auto corners = stage.corners(stage.depth());
  NodeBin bin{0, {1.0, 0.0}};
  double t = 0.0;
  for (int axis = 0; axis < d; ++axis) {
    const std::int64_t m = corners[a * d + axis];
    bin.index = bin.index * n + (q * m) % n;
    t += static_cast<double>(m) * grid.origin[axis] / static_cast<double>(big_n);
    t += static_cast<double>((q * m) % (2 * n)) / static_cast<double>(2 * n);
  }
  bin.phase = unit_phase(t);
  return bin;
}

void check_grid(const CantorStage& stage, const kernels::MidpointGrid& grid) {
  require(grid.dim == stage.dim(), "grid dimension mismatch");
  require(grid.count >= 1 && grid.spacing > 0.0, "grid must be nonempty");
}

}  // namespace

DensityOnStage::DensityOnStage(const CantorStage& s, std::vector<cdouble> v)
    : stage(&s), values(std::move(v)) {
  require(static_cast<std::int64_t>(values.size()) == s.count(s.depth()),
          "density length must equal T_k");
}

DensityOnStage DensityOnStage::ones(const CantorStage& s) {
  return DensityOnStage(s, std::vector<cdouble>(static_cast<std::size_t>(s.count(s.depth())),
                                                cdouble{1.0, 0.0}));
}

double DensityOnStage::l2_norm() const {
  double s = 0.0;
  for (const auto v : values) s += std::norm(v);
  return std::sqrt(s / static_cast<double>(stage->count(stage->depth())));
}

kernels::MidpointGrid cube_grid(const Cube& cube, double spacing) {
  require(cube.side > 0.0, "cube side must be positive");
  require(spacing > 0.0, "spacing must be positive");
  kernels::MidpointGrid grid;
  grid.dim = cube.dim();
  grid.origin = cube.corner;
  grid.count = std::max<std::int64_t>(1, static_cast<std::int64_t>(std::ceil(cube.side / spacing - 1e-9)));
  grid.spacing = cube.side / static_cast<double>(grid.count);
  return grid;
}

bool fft_applicable(const CantorStage& stage, const kernels::MidpointGrid& grid) {
  return fft_ratio(stage, grid) > 0;
}

std::vector<cdouble> extension_on_grid(const CantorStage& stage, std::span<const cdouble> g,
                                       const kernels::MidpointGrid& grid,
                                       ExtensionMethod method) {
  check_grid(stage, grid);
  const int k = stage.depth();
  require(static_cast<std::int64_t>(g.size()) == stage.count(k), "density length must equal T_k");
  const double inv_t = 1.0 / static_cast<double>(stage.count(k));
  const double inv_scale = 1.0 / static_cast<double>(stage.scale(k));
  const std::int64_t q = fft_ratio(stage, grid);
  const bool use_fft = method == ExtensionMethod::kFft ||
                       (method == ExtensionMethod::kAuto && q > 0);
  require(!use_fft || q > 0, "FFT path needs an integer ratio of grid extent to N_k");

  std::vector<cdouble> out;
  if (use_fft) {
    out.assign(static_cast<std::size_t>(grid.total()), cdouble{});
    for (std::int64_t a = 0; a < static_cast<std::int64_t>(g.size()); ++a) {
      const NodeBin bin = node_bin(stage, grid, q, a);
      out[bin.index] += g[a] * inv_t * bin.phase;
    }
    fft_in_place(out, grid.dim, grid.count, FFTW_FORWARD);
  } else {
    std::vector<cdouble> weights(g.begin(), g.end());
    for (auto& w : weights) w *= inv_t;
    const kernels::NodeSum f{stage.dim(), stage.scale(k), stage.corners(k), weights};
    out = kernels::omp::node_sum_on_grid(f, grid);
  }
  const auto total = static_cast<std::int64_t>(out.size());
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < total; ++i) out[i] *= box_at(grid, i, inv_scale);
  return out;
}

std::vector<cdouble> extension_adjoint(const CantorStage& stage, std::span<const cdouble> values,
                                       const kernels::MidpointGrid& grid,
                                       ExtensionMethod method) {
  check_grid(stage, grid);
  require(static_cast<std::int64_t>(values.size()) == grid.total(), "grid value count mismatch");
  const int k = stage.depth();
  const int d = stage.dim();
  const auto nodes = stage.count(k);
  const double inv_t = 1.0 / static_cast<double>(nodes);
  const double inv_scale = 1.0 / static_cast<double>(stage.scale(k));
  const std::int64_t q = fft_ratio(stage, grid);
  const bool use_fft = method == ExtensionMethod::kFft ||
                       (method == ExtensionMethod::kAuto && q > 0);
  require(!use_fft || q > 0, "FFT path needs an integer ratio of grid extent to N_k");

  const auto total = grid.total();
  std::vector<cdouble> weighted(values.begin(), values.end());
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < total; ++i) weighted[i] *= std::conj(box_at(grid, i, inv_scale));

  std::vector<cdouble> out(static_cast<std::size_t>(nodes));
  if (use_fft) {
    fft_in_place(weighted, d, grid.count, FFTW_BACKWARD);
    for (std::int64_t a = 0; a < nodes; ++a) {
      const NodeBin bin = node_bin(stage, grid, q, a);
      out[a] = inv_t * weighted[bin.index] * std::conj(bin.phase);
    }
    return out;
  }
  const auto corners = stage.corners(k);
#pragma omp parallel for schedule(dynamic, 16)
  for (std::int64_t a = 0; a < nodes; ++a) {
    cdouble sum{0.0, 0.0};
    double x[kMaxDim];
    for (std::int64_t i = 0; i < total; ++i) {
      std::int64_t rest = i;
      double t = 0.0;
      for (int axis = d - 1; axis >= 0; --axis) {
        x[axis] = grid.coordinate(axis, rest % grid.count);
        rest /= grid.count;
        t += static_cast<double>(corners[a * d + axis]) * x[axis] * inv_scale;
      }
      sum += weighted[i] * std::conj(unit_phase(t));
    }
    out[a] = inv_t * sum;
  }
  return out;
}

namespace {

double grid_lp_norm(std::span<const cdouble> values, double p, const kernels::MidpointGrid& grid) {
  return std::pow(kernels::omp::power_sum(values, p) * std::pow(grid.spacing, grid.dim), 1.0 / p);
}

}  // namespace

double extension_norm(const CantorStage& stage, const DensityOnStage& g, double p, const Cube& j,
                      double spacing) {
  require(p >= 1.0, "exponent p must be >= 1");
  require(spacing > 0.0 && spacing <= 0.5, "extension spacing must lie in (0, 1/2]");
  require(j.side > 0.0, "cube side must be positive");
  require(j.dim() == stage.dim(), "cube dimension mismatch");
  require(g.stage == &stage || *g.stage == stage, "density belongs to another stage");
  constexpr double kRelTol = 1e-3;
  constexpr std::int64_t kMaxPoints = std::int64_t{1} << 24;

  auto grid = cube_grid(j, spacing);
  double value = grid_lp_norm(extension_on_grid(stage, g.values, grid), p, grid);
  for (;;) {
    auto finer = grid;
    finer.count *= 2;
    finer.spacing *= 0.5;
    if (finer.total() > kMaxPoints) break;
    const double next = grid_lp_norm(extension_on_grid(stage, g.values, finer), p, finer);
    const bool agreed = std::abs(next - value) <= kRelTol * std::abs(next);
    value = next;
    grid = finer;
    if (agreed) break;
  }
  return value;
}

std::string to_string(GKind kind) {
  switch (kind) {
    case GKind::kOnes: return "ones";
    case GKind::kRandomSigns: return "random_signs";
    case GKind::kKnappConcentrated: return "knapp_concentrated";
    case GKind::kPowerIterated: return "power_iterated";
  }
  return "ones";
}

GKind g_kind_from_string(const std::string& text) {
  for (const GKind kind : {GKind::kOnes, GKind::kRandomSigns, GKind::kKnappConcentrated,
                           GKind::kPowerIterated}) {
    if (to_string(kind) == text) return kind;
  }
  throw ValidationError("unknown g strategy: " + text);
}

double default_restriction_c0(const CantorStage& stage, double p, std::uint64_t seed) {
  LambdaPBudget budget;
  budget.starts = 4;
  budget.iterations = 50;
  budget.tolerance = 1e-6;
  double best = 1.0;
  for (int j = 1; j <= stage.depth(); ++j) {
    const auto cert = lambda_p_constant(stage.base_sets()[j - 1], p, budget,
                                        derive_seed(seed, static_cast<std::uint64_t>(j)));
    best = std::max(best, cert.constant_lower);
  }
  return best * std::exp2(stage.dim());
}

DensityOnStage strategy_density(const CantorStage& stage, GKind kind, std::uint64_t seed) {
  const int k = stage.depth();
  const auto nodes = stage.count(k);
  std::vector<cdouble> g(static_cast<std::size_t>(nodes), cdouble{});
  switch (kind) {
    case GKind::kOnes:
    case GKind::kPowerIterated:
      std::fill(g.begin(), g.end(), cdouble{1.0, 0.0});
      break;
    case GKind::kRandomSigns: {
      std::mt19937_64 rng(derive_seed(seed, 0x5167));
      for (auto& v : g) v = (rng() >> 63) ? 1.0 : -1.0;
      break;
    }
    case GKind::kKnappConcentrated: {
      // Descendants of the first level-1 node; the whole stage at depth 0.
      const auto span = k == 0 ? nodes : nodes / stage.count(1);
      std::fill(g.begin(), g.begin() + span, cdouble{1.0, 0.0});
      break;
    }
  }
  DensityOnStage out(stage, std::move(g));
  const double norm = out.l2_norm();
  for (auto& v : out.values) v /= norm;
  return out;
}

namespace {

// Nonlinear power iteration g <- E*(|Eg|^{p-2} Eg) on a fixed grid; returns
// the best iterate, which never scores below the start.
std::vector<cdouble> power_iterate(const CantorStage& stage, std::vector<cdouble> g, double p,
                                   const kernels::MidpointGrid& grid, int iterations) {
  auto score = [&](const std::vector<cdouble>& values, std::vector<cdouble>* image) {
    *image = extension_on_grid(stage, values, grid);
    double l2 = 0.0;
    for (const auto v : values) l2 += std::norm(v);
    return grid_lp_norm(*image, p, grid) / std::sqrt(l2);
  };
  std::vector<cdouble> image;
  double value = score(g, &image);
  for (int it = 0; it < iterations; ++it) {
    for (auto& v : image) v *= std::pow(std::abs(v), p - 2.0);
    auto next = extension_adjoint(stage, image, grid);
    double norm = 0.0;
    for (const auto v : next) norm += std::norm(v);
    norm = std::sqrt(norm);
    if (norm == 0.0) break;
    for (auto& v : next) v /= norm;
    std::vector<cdouble> next_image;
    const double next_value = score(next, &next_image);
    if (next_value <= value * (1.0 + 1e-9)) {
      if (next_value > value) g = std::move(next);
      break;
    }
    value = next_value;
    g = std::move(next);
    image = std::move(next_image);
  }
  return g;
}

}  // namespace

std::vector<RestrictionReport> restriction_report(const CantorStage& stage, double p,
                                                  const RestrictionOptions& options) {
  require(p > 2.0, "restriction report needs p > 2");
  require(options.power_iterations >= 0, "power_iterations must be nonnegative");
  const int d = stage.dim();
  const int k = stage.depth();
  const double big_n = static_cast<double>(stage.scale(k));
  Cube cube;
  if (options.cube) {
    cube = *options.cube;
    require(cube.dim() == d, "cube dimension mismatch");
    require(std::abs(cube.side - big_n) <= 1e-9 * big_n, "restriction cube side must equal N_k");
  } else {
    cube.corner.assign(static_cast<std::size_t>(d), -0.5 * big_n);
    cube.side = big_n;
  }
  const double c0 = options.c0 ? *options.c0 : default_restriction_c0(stage, p, options.seed);
  require(c0 > 0.0, "C0 must be positive");
  const double scale_factor =
      std::pow(big_n, d / p) / std::sqrt(static_cast<double>(stage.count(k)));

  auto make_report = [&](GKind kind, double norm, double l2) {
    RestrictionReport r;
    r.p = p;
    r.k = k;
    r.cube = cube;
    r.g_kind = kind;
    r.measured_norm = norm;
    r.measured_ratio = norm / l2;
    r.normalized_ratio = r.measured_ratio / scale_factor;
    r.c0 = c0;
    r.paper_bound = std::pow(c0, k) * scale_factor;
    return r;
  };

  const GKind fixed[] = {GKind::kOnes, GKind::kRandomSigns, GKind::kKnappConcentrated};
  std::vector<DensityOnStage> starts;
  std::vector<double> fixed_ratio;
  for (const GKind kind : fixed) {
    starts.push_back(strategy_density(stage, kind, options.seed));
    fixed_ratio.push_back(extension_norm(stage, starts.back(), p, cube, options.spacing) /
                          starts.back().l2_norm());
  }

  std::vector<RestrictionReport> out;
  for (const GKind kind : options.strategies) {
    if (kind != GKind::kPowerIterated) {
      const auto i = static_cast<std::size_t>(kind);
      out.push_back(make_report(kind, fixed_ratio[i] * starts[i].l2_norm(), starts[i].l2_norm()));
      continue;
    }
    std::vector<std::vector<cdouble>> initial;
    for (const auto& s : starts) initial.push_back(s.values);
    std::mt19937_64 rng(derive_seed(options.seed, 0x9a55));
    std::vector<cdouble> gaussian(static_cast<std::size_t>(stage.count(k)));
    for (auto& v : gaussian) v = {standard_normal(rng), standard_normal(rng)};
    initial.push_back(std::move(gaussian));

    const auto grid = cube_grid(cube, options.spacing);
    double best = *std::max_element(fixed_ratio.begin(), fixed_ratio.end());
    for (auto& init : initial) {
      DensityOnStage g(stage, power_iterate(stage, init, p, grid, options.power_iterations));
      best = std::max(best, extension_norm(stage, g, p, cube, options.spacing) / g.l2_norm());
    }
    out.push_back(make_report(kind, best, 1.0));
  }
  return out;
}

}  // namespace frl
