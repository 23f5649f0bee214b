#include <omp.h>

#include "frl/kernels.hpp"
#include "kernel_detail.hpp"

namespace frl::kernels {

namespace {

std::int64_t chunk_count(std::int64_t total) {
  return (total + kReductionChunk - 1) / kReductionChunk;
}

}  // namespace

void set_thread_count(int threads) {
  if (threads > 0) {
    omp_set_num_threads(threads);
  } else {
    omp_set_num_threads(omp_get_num_procs());
  }
}

namespace omp {

double lattice_power_mean(const LatticeSum& f, double p, std::int64_t n) {
  const std::int64_t total = ipow(n, f.dim);
  const std::int64_t chunks = chunk_count(total);
  std::vector<double> partial(static_cast<std::size_t>(chunks), 0.0);

#pragma omp parallel
  {
    std::vector<cdouble> phases(f.size());
    double x[kMaxDim];
#pragma omp for schedule(static)
    for (std::int64_t c = 0; c < chunks; ++c) {
      const std::int64_t end = std::min(total, (c + 1) * kReductionChunk);
      double sum = 0.0;
      for (std::int64_t i = c * kReductionChunk; i < end; ++i) {
        detail::unit_grid_point(f.dim, n, i, x);
        detail::lattice_phases(f, x, phases.data());
        cdouble value{0.0, 0.0};
        for (std::size_t a = 0; a < f.size(); ++a) value += f.coeffs[a] * phases[a];
        sum += detail::abs_pow(value, p);
      }
      partial[c] = sum;
    }
  }
  double sum = 0.0;
  for (const double s : partial) sum += s;
  return sum / static_cast<double>(total);
}

std::vector<cdouble> lattice_power_gradient(const LatticeSum& f, double p, std::int64_t n) {
  const std::int64_t total = ipow(n, f.dim);
  const std::int64_t chunks = chunk_count(total);
  const std::size_t terms = f.size();
  std::vector<cdouble> partial(static_cast<std::size_t>(chunks) * terms);

#pragma omp parallel
  {
    std::vector<cdouble> phases(terms);
    double x[kMaxDim];
#pragma omp for schedule(static)
    for (std::int64_t c = 0; c < chunks; ++c) {
      const std::int64_t end = std::min(total, (c + 1) * kReductionChunk);
      cdouble* grad = partial.data() + c * terms;
      for (std::int64_t i = c * kReductionChunk; i < end; ++i) {
        detail::unit_grid_point(f.dim, n, i, x);
        detail::lattice_phases(f, x, phases.data());
        cdouble value{0.0, 0.0};
        for (std::size_t a = 0; a < terms; ++a) value += f.coeffs[a] * phases[a];
        const double mod = std::abs(value);
        if (mod == 0.0) continue;
        const cdouble w = value * std::pow(mod, p - 2.0);
        for (std::size_t a = 0; a < terms; ++a) grad[a] += w * std::conj(phases[a]);
      }
    }
  }
  std::vector<cdouble> grad(terms);
  for (std::int64_t c = 0; c < chunks; ++c) {
    for (std::size_t a = 0; a < terms; ++a) grad[a] += partial[c * terms + a];
  }
  for (auto& g : grad) g /= static_cast<double>(total);
  return grad;
}

std::vector<cdouble> tree_phase_sums(const PhaseTree& tree, std::span<const double> xis) {
  const std::int64_t count = static_cast<std::int64_t>(xis.size() / tree.dim);
  std::vector<cdouble> out(static_cast<std::size_t>(count));
#pragma omp parallel
  {
    std::vector<std::vector<cdouble>> buffers;
#pragma omp for schedule(dynamic, 16)
    for (std::int64_t q = 0; q < count; ++q) {
      out[q] = detail::tree_sum(tree, xis.data() + q * tree.dim, buffers);
    }
  }
  return out;
}

std::vector<cdouble> node_sum_on_grid(const NodeSum& f, const MidpointGrid& grid) {
  const std::int64_t total = grid.total();
  std::vector<cdouble> out(static_cast<std::size_t>(total));
#pragma omp parallel
  {
    double x[kMaxDim];
#pragma omp for schedule(static)
    for (std::int64_t i = 0; i < total; ++i) {
      detail::grid_point(grid, i, x);
      out[i] = detail::node_sum_at(f, x);
    }
  }
  return out;
}

double power_sum(std::span<const cdouble> values, double p) {
  const std::int64_t total = static_cast<std::int64_t>(values.size());
  const std::int64_t chunks = chunk_count(total);
  std::vector<double> partial(static_cast<std::size_t>(chunks), 0.0);
#pragma omp parallel for schedule(static)
  for (std::int64_t c = 0; c < chunks; ++c) {
    const std::int64_t end = std::min(total, (c + 1) * kReductionChunk);
    double sum = 0.0;
    for (std::int64_t i = c * kReductionChunk; i < end; ++i) {
      sum += detail::abs_pow(values[i], p);
    }
    partial[c] = sum;
  }
  double sum = 0.0;
  for (const double s : partial) sum += s;
  return sum;
}

}  // namespace omp
}  // namespace frl::kernels
