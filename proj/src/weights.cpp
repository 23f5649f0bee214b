#include "frl/weights.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss.hpp>

#include "frl/kernels.hpp"

namespace frl {

double cube_weight(const Cube& cube, std::span<const double> x) {
  require(static_cast<int>(x.size()) == cube.dim(), "point dimension mismatch");
  double s = 0.0;
  for (int a = 0; a < cube.dim(); ++a) {
    const double d = x[a] - cube.center(a);
    s += d * d;
  }
  return std::pow(1.0 + std::sqrt(s) / cube.side, -kWeightExponent);
}

std::int64_t TensorGrid::total() const {
  std::int64_t out = 1;
  for (const auto& axis : nodes) out *= static_cast<std::int64_t>(axis.size());
  return out;
}

double TensorGrid::point(std::int64_t flat, double* x) const {
  double w = 1.0;
  for (int a = dim - 1; a >= 0; --a) {
    const auto n = static_cast<std::int64_t>(nodes[a].size());
    const auto i = flat % n;
    flat /= n;
    x[a] = nodes[a][i];
    w *= weights[a][i];
  }
  return w;
}

std::vector<double> TensorGrid::points() const {
  const auto n = total();
  std::vector<double> out(static_cast<std::size_t>(n * dim));
  for (std::int64_t i = 0; i < n; ++i) point(i, &out[i * dim]);
  return out;
}

namespace {

using Gauss = boost::math::quadrature::gauss<double, 10>;

void add_panel(double a, double b, std::vector<double>& nodes, std::vector<double>& weights) {
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const auto& x = Gauss::abscissa();
  const auto& w = Gauss::weights();
  for (std::size_t i = 0; i < x.size(); ++i) {
    nodes.push_back(mid - half * x[i]);
    weights.push_back(half * w[i]);
    if (x[i] != 0.0) {
      nodes.push_back(mid + half * x[i]);
      weights.push_back(half * w[i]);
    }
  }
}

}  // namespace

TensorGrid graded_grid(const Cube& cube, double extent, double max_panel) {
  require(cube.side > 0.0, "cube side must be positive");
  require(extent > 0.0 && max_panel > 0.0, "grid extent and panel width must be positive");
  const double r = cube.side;
  // Offsets from the centre: 0, geometric down to 2^-14 R, then out to extent R.
  std::vector<double> cuts = {0.0};
  for (int m = 14; m >= 1; --m) cuts.push_back(r * std::ldexp(1.0, -m));
  for (double s = r; s < extent * r; s *= 2.0) cuts.push_back(s);
  cuts.push_back(extent * r);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  std::vector<double> offsets;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double a = cuts[i];
    const double b = cuts[i + 1];
    int pieces = 1;
    if (a < 0.5 * r) pieces = std::max(1, static_cast<int>(std::ceil((b - a) / max_panel)));
    for (int q = 0; q < pieces; ++q) offsets.push_back(a + (b - a) * q / pieces);
  }
  offsets.push_back(extent * r);

  TensorGrid grid;
  grid.dim = cube.dim();
  for (int axis = 0; axis < grid.dim; ++axis) {
    const double c = cube.center(axis);
    std::vector<double> nodes;
    std::vector<double> weights;
    for (std::size_t i = 0; i + 1 < offsets.size(); ++i) {
      add_panel(c + offsets[i], c + offsets[i + 1], nodes, weights);
      add_panel(c - offsets[i + 1], c - offsets[i], nodes, weights);
    }
    grid.nodes.push_back(std::move(nodes));
    grid.weights.push_back(std::move(weights));
    grid.lo.push_back(c - extent * r);
    grid.hi.push_back(c + extent * r);
  }
  return grid;
}

TensorGrid midpoint_grid(const Cube& region, double spacing) {
  require(region.side > 0.0 && spacing > 0.0, "grid side and spacing must be positive");
  const auto n = std::max<std::int64_t>(1, static_cast<std::int64_t>(std::ceil(region.side / spacing - 1e-9)));
  const double h = region.side / static_cast<double>(n);
  TensorGrid grid;
  grid.dim = region.dim();
  for (int axis = 0; axis < grid.dim; ++axis) {
    std::vector<double> nodes(static_cast<std::size_t>(n));
    for (std::int64_t i = 0; i < n; ++i) nodes[i] = region.corner[axis] + (i + 0.5) * h;
    grid.nodes.push_back(std::move(nodes));
    grid.weights.emplace_back(static_cast<std::size_t>(n), h);
    grid.lo.push_back(region.corner[axis]);
    grid.hi.push_back(region.corner[axis] + region.side);
  }
  return grid;
}

double weighted_lp_norm(std::span<const cdouble> f, const TensorGrid& grid,
                        const WeightedNormSpec& spec) {
  const Cube& cube = spec.cube;
  require(cube.side > 0.0, "cube side must be positive");
  require(spec.p >= 1.0, "exponent p must be >= 1");
  require(grid.dim == cube.dim(), "grid dimension mismatch");
  require(static_cast<std::int64_t>(f.size()) == grid.total(), "sample count does not match grid");
  for (int a = 0; a < grid.dim; ++a) {
    const double c = cube.center(a);
    const double slack = 1e-9 * cube.side;
    require(grid.lo[a] <= c - 4.0 * cube.side + slack && grid.hi[a] >= c + 4.0 * cube.side - slack,
            "grid does not cover the cube dilated by 8");
  }
  const auto n = grid.total();
  const std::int64_t chunks = (n + kernels::kReductionChunk - 1) / kernels::kReductionChunk;
  std::vector<double> partial(static_cast<std::size_t>(chunks), 0.0);
#pragma omp parallel for schedule(static)
  for (std::int64_t c = 0; c < chunks; ++c) {
    double x[kMaxDim];
    double s = 0.0;
    const auto end = std::min(n, (c + 1) * kernels::kReductionChunk);
    for (std::int64_t i = c * kernels::kReductionChunk; i < end; ++i) {
      const double w = grid.point(i, x);
      if (f[i] == cdouble{}) continue;
      s += w * std::pow(std::abs(f[i]), spec.p) *
           cube_weight(cube, {x, static_cast<std::size_t>(grid.dim)});
    }
    partial[c] = s;
  }
  double sum = 0.0;
  for (const double s : partial) sum += s;
  if (spec.normalized) sum /= std::pow(cube.side, cube.dim());
  return std::pow(sum, 1.0 / spec.p);
}

double weight_mass(int dim) {
  require(dim >= 1 && dim <= kMaxDim, "weight mass supports 1 <= d <= 3");
  static std::mutex mutex;
  static std::map<int, double> cache;
  std::lock_guard<std::mutex> lock(mutex);
  if (auto it = cache.find(dim); it != cache.end()) return it->second;
  boost::math::quadrature::exp_sinh<double> integrator;
  const double radial = integrator.integrate(
      [dim](double r) { return std::pow(r, dim - 1) * std::pow(1.0 + r, -kWeightExponent); },
      0.0, std::numeric_limits<double>::infinity());
  const double sphere[] = {2.0, 2.0 * std::numbers::pi, 4.0 * std::numbers::pi};
  return cache[dim] = sphere[dim - 1] * radial;
}

namespace {

double overlap_ratio(int dim, std::int64_t m, const double* x) {
  const double half = 0.5 * static_cast<double>(m);
  double rj = 0.0;
  for (int a = 0; a < dim; ++a) rj += x[a] * x[a];
  const double log_wj = -kWeightExponent * std::log1p(std::sqrt(rj) / static_cast<double>(m));
  const std::int64_t cubes = ipow(m, dim);
  double sum = 0.0;
  for (std::int64_t i = 0; i < cubes; ++i) {
    std::int64_t rest = i;
    double r2 = 0.0;
    for (int a = dim - 1; a >= 0; --a) {
      const double c = -half + 0.5 + static_cast<double>(rest % m);
      rest /= m;
      r2 += (x[a] - c) * (x[a] - c);
    }
    sum += std::exp(-kWeightExponent * std::log1p(std::sqrt(r2)) - log_wj);
  }
  return sum;
}

}  // namespace

double weight_overlap_constant(int dim, std::int64_t m) {
  require(dim >= 1 && dim <= kMaxDim, "weight overlap supports 1 <= d <= 3");
  require(m >= 1, "cube side must be a positive integer");
  require(ipow(m, dim) <= 4096, "weight overlap search limited to 4096 unit cubes");
  static std::mutex mutex;
  static std::map<std::pair<int, std::int64_t>, double> cache;
  {
    std::lock_guard<std::mutex> lock(mutex);
    if (auto it = cache.find({dim, m}); it != cache.end()) return it->second;
  }
  // J = [-m/2, m/2]^d. Search [-m/2 - 1, m/2 + 1]^d at spacing 1/16.
  const double reach = 0.5 * static_cast<double>(m) + 1.0;
  const auto n = static_cast<std::int64_t>(std::ceil(2.0 * reach * 16.0)) + 1;
  const double h = 2.0 * reach / static_cast<double>(n - 1);
  const std::int64_t total = ipow(n, dim);
  std::vector<double> values(static_cast<std::size_t>(total));
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < total; ++i) {
    double x[kMaxDim];
    std::int64_t rest = i;
    for (int a = dim - 1; a >= 0; --a) {
      x[a] = -reach + static_cast<double>(rest % n) * h;
      rest /= n;
    }
    values[i] = overlap_ratio(dim, m, x);
  }
  const auto best = std::max_element(values.begin(), values.end()) - values.begin();
  double x[kMaxDim];
  std::int64_t rest = best;
  for (int a = dim - 1; a >= 0; --a) {
    x[a] = -reach + static_cast<double>(rest % n) * h;
    rest /= n;
  }
  double value = values[best];
  for (double step = h / 2.0; step > 1e-7;) {
    bool improved = false;
    for (int a = 0; a < dim && !improved; ++a) {
      for (const double sign : {1.0, -1.0}) {
        x[a] += sign * step;
        const double v = overlap_ratio(dim, m, x);
        if (v > value) {
          value = v;
          improved = true;
          break;
        }
        x[a] -= sign * step;
      }
    }
    if (!improved) step *= 0.5;
  }
  std::lock_guard<std::mutex> lock(mutex);
  return cache[{dim, m}] = value;
}

}  // namespace frl
