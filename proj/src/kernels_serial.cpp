#include "frl/kernels.hpp"

#include "kernel_detail.hpp"

namespace frl::kernels {

std::int64_t MidpointGrid::total() const { return ipow(count, dim); }

namespace serial {

double lattice_power_mean(const LatticeSum& f, double p, std::int64_t n) {
  const std::int64_t total = ipow(n, f.dim);
  std::vector<cdouble> phases(f.size());
  double x[kMaxDim];
  double sum = 0.0;
  for (std::int64_t i = 0; i < total; ++i) {
    detail::unit_grid_point(f.dim, n, i, x);
    detail::lattice_phases(f, x, phases.data());
    cdouble value{0.0, 0.0};
    for (std::size_t a = 0; a < f.size(); ++a) value += f.coeffs[a] * phases[a];
    sum += detail::abs_pow(value, p);
  }
  return sum / static_cast<double>(total);
}

std::vector<cdouble> lattice_power_gradient(const LatticeSum& f, double p, std::int64_t n) {
  const std::int64_t total = ipow(n, f.dim);
  std::vector<cdouble> phases(f.size());
  std::vector<cdouble> grad(f.size());
  double x[kMaxDim];
  for (std::int64_t i = 0; i < total; ++i) {
    detail::unit_grid_point(f.dim, n, i, x);
    detail::lattice_phases(f, x, phases.data());
    cdouble value{0.0, 0.0};
    for (std::size_t a = 0; a < f.size(); ++a) value += f.coeffs[a] * phases[a];
    const double mod = std::abs(value);
    if (mod == 0.0) continue;
    const cdouble w = value * std::pow(mod, p - 2.0);
    for (std::size_t a = 0; a < f.size(); ++a) grad[a] += w * std::conj(phases[a]);
  }
  for (auto& g : grad) g /= static_cast<double>(total);
  return grad;
}

std::vector<cdouble> tree_phase_sums(const PhaseTree& tree, std::span<const double> xis) {
  const std::size_t count = xis.size() / tree.dim;
  std::vector<cdouble> out(count);
  std::vector<std::vector<cdouble>> buffers;
  for (std::size_t q = 0; q < count; ++q) {
    out[q] = detail::tree_sum(tree, xis.data() + q * tree.dim, buffers);
  }
  return out;
}

std::vector<cdouble> node_sum_on_grid(const NodeSum& f, const MidpointGrid& grid) {
  const std::int64_t total = grid.total();
  std::vector<cdouble> out(static_cast<std::size_t>(total));
  double x[kMaxDim];
  for (std::int64_t i = 0; i < total; ++i) {
    detail::grid_point(grid, i, x);
    out[i] = detail::node_sum_at(f, x);
  }
  return out;
}

double power_sum(std::span<const cdouble> values, double p) {
  double sum = 0.0;
  for (const cdouble v : values) sum += detail::abs_pow(v, p);
  return sum;
}

}  // namespace serial
}  // namespace frl::kernels
