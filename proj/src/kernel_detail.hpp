#pragma once

// Per-point bodies shared by the serial and OpenMP kernels, so both builds
// evaluate each point with identical arithmetic and only the loop differs.

#include <cmath>
#include <vector>

#include "frl/kernels.hpp"

namespace frl::kernels::detail {

inline void grid_point(const MidpointGrid& g, std::int64_t flat, double* x) {
  for (int axis = g.dim - 1; axis >= 0; --axis) {
    x[axis] = g.coordinate(axis, flat % g.count);
    flat /= g.count;
  }
}

inline void unit_grid_point(int dim, std::int64_t n, std::int64_t flat, double* x) {
  for (int axis = dim - 1; axis >= 0; --axis) {
    x[axis] = (static_cast<double>(flat % n) + 0.5) / static_cast<double>(n);
    flat /= n;
  }
}

/// e^{+2 pi i a.x} for every term, written into phases.
inline void lattice_phases(const LatticeSum& f, const double* x, cdouble* phases) {
  for (std::size_t a = 0; a < f.size(); ++a) {
    double t = 0.0;
    for (int k = 0; k < f.dim; ++k) {
      t += static_cast<double>(f.points[a * f.dim + k]) * x[k];
    }
    phases[a] = std::conj(unit_phase(t));
  }
}

inline double abs_pow(cdouble v, double p) {
  if (p == 2.0) return std::norm(v);
  return std::pow(std::abs(v), p);
}

/// sum over leaves of e^{-2 pi i a.xi}; `buffers` holds one vector per level.
inline cdouble tree_sum(const PhaseTree& tree, const double* xi,
                        std::vector<std::vector<cdouble>>& buffers) {
  const std::size_t levels = tree.scale.size();
  if (levels == 0) return {1.0, 0.0};
  buffers.resize(levels);
  std::size_t parents = 1;
  const cdouble root{1.0, 0.0};
  for (std::size_t j = 0; j < levels; ++j) {
    const std::int64_t t = tree.branching[j];
    const double inv_scale = 1.0 / static_cast<double>(tree.scale[j]);
    auto& out = buffers[j];
    out.resize(parents * static_cast<std::size_t>(t));
    const auto& digits = tree.digits[j];
    for (std::size_t i = 0; i < out.size(); ++i) {
      double s = 0.0;
      for (int k = 0; k < tree.dim; ++k) {
        s += static_cast<double>(digits[i * tree.dim + k]) * xi[k];
      }
      const cdouble parent = (j == 0) ? root : buffers[j - 1][i / t];
      out[i] = parent * unit_phase(s * inv_scale);
    }
    parents = out.size();
  }
  cdouble sum{0.0, 0.0};
  for (const cdouble v : buffers[levels - 1]) sum += v;
  return sum;
}

inline cdouble node_sum_at(const NodeSum& f, const double* x) {
  const double inv = 1.0 / static_cast<double>(f.denominator);
  cdouble sum{0.0, 0.0};
  for (std::size_t a = 0; a < f.size(); ++a) {
    double t = 0.0;
    for (int k = 0; k < f.dim; ++k) {
      t += static_cast<double>(f.corners[a * f.dim + k]) * x[k];
    }
    sum += f.weights[a] * unit_phase(t * inv);
  }
  return sum;
}

}  // namespace frl::kernels::detail
