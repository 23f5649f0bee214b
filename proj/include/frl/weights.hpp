#pragma once

// Cube-adjusted weights w_I(x) = (1 + |x - c|/R)^{-100} and weighted L^p norms.

#include <cstdint>
#include <span>
#include <vector>

#include "frl/common.hpp"

namespace frl {

inline constexpr double kWeightExponent = 100.0;

/// w_I(x) for the cube I (centre c, side R).
double cube_weight(const Cube& cube, std::span<const double> x);

/// Tensor-product quadrature rule: per-axis nodes and weights.
struct TensorGrid {
  int dim = 1;
  std::vector<std::vector<double>> nodes;
  std::vector<std::vector<double>> weights;
  std::vector<double> lo;  // integration interval per axis
  std::vector<double> hi;

  std::int64_t total() const;
  /// Coordinates of point `flat` (row-major) and its quadrature weight.
  double point(std::int64_t flat, double* x) const;
  /// All points, row-major, total() * dim.
  std::vector<double> points() const;
};

/// Composite Gauss-Legendre rule on [c - extent R, c + extent R] per axis with
/// panels graded geometrically toward the centre c (where w_I peaks) and no
/// wider than `max_panel` within R/2 of it.
TensorGrid graded_grid(const Cube& cube, double extent = 4.0, double max_panel = 0.25);

/// Midpoint rule over `region` with ceil(side / spacing) points per axis.
TensorGrid midpoint_grid(const Cube& region, double spacing);

struct WeightedNormSpec {
  Cube cube;
  double p = 2.0;
  bool normalized = true;  // divide by |I| (the L^p_# norm)
};

/// (|I|^{-1} int |f|^p w_I)^{1/p} from samples of f on `grid` (or without the
/// |I|^{-1} when spec.normalized is false). ValidationError unless the grid
/// covers the cube dilated by 8.
double weighted_lp_norm(std::span<const cdouble> f, const TensorGrid& grid,
                        const WeightedNormSpec& spec);

/// C(d) = int_{R^d} (1 + |x|)^{-100} dx = |I|^{-1} int w_I, by radial quadrature (cached).
double weight_mass(int dim);

/// C2 = sup_x sum_{I} w_I(x) / w_J(x) over the tiling of an m-cube J by
/// unit cubes, by grid search and local refinement (cached per (d, m)).
double weight_overlap_constant(int dim, std::int64_t m);

}  // namespace frl
