#pragma once

// Hot loops of the lab, in two builds: `serial` is the plain reference kept for
// testing and benchmarking, `omp` is the OpenMP version used by the library.
//
// The OpenMP reductions split the index range into fixed-size chunks and add
// the per-chunk partials in chunk order, so results do not depend on the
// number of threads. They may differ from the serial sums in the last bits.

#include <cstdint>
#include <span>
#include <vector>

#include "frl/common.hpp"

namespace frl::kernels {

/// Chunk length of every deterministic OpenMP reduction.
inline constexpr std::int64_t kReductionChunk = 4096;

/// f(x) = sum_a c_a e^{2 pi i a.x} for lattice frequencies a.
struct LatticeSum {
  int dim = 1;
  std::span<const std::int64_t> points;  // size() * dim, row-major
  std::span<const cdouble> coeffs;

  std::size_t size() const { return coeffs.size(); }
};

/// Levels of a Cantor tree, enough to evaluate sum_{leaves} e^{-2 pi i a.xi}.
/// Level j holds digits[j] (count[j] * dim integers in [0, n_j)), and child i
/// of level j hangs off parent i / branching[j].
struct PhaseTree {
  int dim = 1;
  std::vector<std::int64_t> scale;       // N_j for j = 1..k
  std::vector<std::int64_t> branching;   // t_j
  std::vector<std::span<const std::int64_t>> digits;
};

/// Node corners m / N on a common denominator, with complex weights.
struct NodeSum {
  int dim = 1;
  std::int64_t denominator = 1;
  std::span<const std::int64_t> corners;  // size() * dim
  std::span<const cdouble> weights;

  std::size_t size() const { return weights.size(); }
};

/// Midpoint grid: x = origin + (i + 1/2) * spacing, i in [0, count)^dim.
struct MidpointGrid {
  int dim = 1;
  std::vector<double> origin;
  double spacing = 1.0;
  std::int64_t count = 1;  // per axis

  std::int64_t total() const;
  double coordinate(int axis, std::int64_t i) const {
    return origin[axis] + (static_cast<double>(i) + 0.5) * spacing;
  }
};

namespace serial {

/// Mean over the midpoint grid of [0,1]^d with n points per axis of |f|^p.
double lattice_power_mean(const LatticeSum& f, double p, std::int64_t n);

/// grad_a = mean_x |f|^{p-2} f(x) e^{-2 pi i a.x}, the ascent direction of the
/// grid L^p norm.
std::vector<cdouble> lattice_power_gradient(const LatticeSum& f, double p, std::int64_t n);

/// sum over leaves of e^{-2 pi i a.xi}, for each xi (xis is count * dim).
std::vector<cdouble> tree_phase_sums(const PhaseTree& tree, std::span<const double> xis);

/// F(x) = sum_a w_a e^{-2 pi i m_a.x / N} on every grid point, row-major.
std::vector<cdouble> node_sum_on_grid(const NodeSum& f, const MidpointGrid& grid);

/// sum |v_i|^p.
double power_sum(std::span<const cdouble> values, double p);

}  // namespace serial

namespace omp {

double lattice_power_mean(const LatticeSum& f, double p, std::int64_t n);
std::vector<cdouble> lattice_power_gradient(const LatticeSum& f, double p, std::int64_t n);
std::vector<cdouble> tree_phase_sums(const PhaseTree& tree, std::span<const double> xis);
std::vector<cdouble> node_sum_on_grid(const NodeSum& f, const MidpointGrid& grid);
double power_sum(std::span<const cdouble> values, double p);

}  // namespace omp

/// Caps the OpenMP worker count; 0 restores the runtime default.
void set_thread_count(int threads);

}  // namespace frl::kernels
