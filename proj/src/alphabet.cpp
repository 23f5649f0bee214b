#include "frl/alphabet.hpp"

#include <algorithm>
#include <unordered_map>

#include "convolution.hpp"
#include "frl/kernels.hpp"

namespace frl {

Alphabet::Alphabet(int dim, std::int64_t modulus, std::vector<Point> elements)
    : dim_(dim), modulus_(modulus), elements_(std::move(elements)) {
  require(dim >= 1, "alphabet dimension must be positive");
  require(modulus >= 1, "alphabet modulus must be positive");
  require(!elements_.empty(), "alphabet must be nonempty");
  for (const auto& point : elements_) {
    require(static_cast<int>(point.size()) == dim, "alphabet point has wrong dimension");
    for (const auto coordinate : point) {
      require(coordinate >= 0 && coordinate < modulus,
              "alphabet coordinate outside [0, modulus)");
    }
  }
  std::sort(elements_.begin(), elements_.end());
  require(std::adjacent_find(elements_.begin(), elements_.end()) == elements_.end(),
          "alphabet elements must be distinct");
}

bool Alphabet::contains(const Point& point) const {
  return std::binary_search(elements_.begin(), elements_.end(), point);
}

std::vector<std::int64_t> Alphabet::flat() const {
  std::vector<std::int64_t> out;
  out.reserve(elements_.size() * dim_);
  for (const auto& point : elements_) out.insert(out.end(), point.begin(), point.end());
  return out;
}

Alphabet Alphabet::translated(const Point& v) const {
  require(static_cast<int>(v.size()) == dim_, "translation has wrong dimension");
  std::vector<Point> moved = elements_;
  for (auto& point : moved) {
    for (int k = 0; k < dim_; ++k) {
      point[k] = ((point[k] + v[k]) % modulus_ + modulus_) % modulus_;
    }
  }
  return Alphabet(dim_, modulus_, std::move(moved));
}

std::string to_string(CertificateMethod method) {
  return method == CertificateMethod::kExactEvenP ? "exact-even-p" : "quadrature";
}

CertificateMethod certificate_method_from_string(const std::string& text) {
  if (text == "exact-even-p") return CertificateMethod::kExactEvenP;
  if (text == "quadrature") return CertificateMethod::kQuadrature;
  throw ValidationError("unknown certificate method: " + text);
}

namespace {

void check_sum_inputs(const Alphabet& set, std::span<const cdouble> coeffs) {
  require(coeffs.size() == set.size(), "coefficient count does not match alphabet size");
}

std::int64_t points_per_axis(double spacing) {
  require(spacing > 0.0, "quadrature spacing must be positive");
  return static_cast<std::int64_t>(std::ceil(1.0 / spacing - 1e-9));
}

}  // namespace

double exp_sum_lp_norm_on_grid(const Alphabet& set, std::span<const cdouble> coeffs, double p,
                               double spacing) {
  check_sum_inputs(set, coeffs);
  require(p >= 1.0, "exponent p must be >= 1");
  const std::int64_t n = points_per_axis(spacing);
  const auto flat = set.flat();
  const kernels::LatticeSum f{set.dim(), flat, coeffs};
  return std::pow(kernels::omp::lattice_power_mean(f, p, n), 1.0 / p);
}

double exp_sum_lp_norm_exact(const Alphabet& set, std::span<const cdouble> coeffs, int m) {
  check_sum_inputs(set, coeffs);
  require(m >= 1, "convolution order must be >= 1");
  const auto power = detail::convolution_power(set, coeffs, m);
  double energy = 0.0;
  for (const cdouble v : power.values) energy += std::norm(v);
  return std::pow(energy, 1.0 / (2.0 * m));
}

double exp_sum_lp_norm_refined(const Alphabet& set, std::span<const cdouble> coeffs, double p,
                               double spacing, const QuadratureControl& control,
                               double* final_spacing) {
  std::int64_t n = points_per_axis(spacing);
  require(ipow(n, set.dim()) <= control.max_points, "initial quadrature grid exceeds budget");
  double previous = exp_sum_lp_norm_on_grid(set, coeffs, p, 1.0 / static_cast<double>(n));
  double current = previous;
  while (ipow(2 * n, set.dim()) <= control.max_points) {
    n *= 2;
    current = exp_sum_lp_norm_on_grid(set, coeffs, p, 1.0 / static_cast<double>(n));
    if (std::abs(current - previous) <= control.rel_tol * std::abs(current)) break;
    previous = current;
  }
  if (final_spacing != nullptr) *final_spacing = 1.0 / static_cast<double>(n);
  return current;
}

double exp_sum_lp_norm(const Alphabet& set, std::span<const cdouble> coeffs, double p,
                       double spacing, const QuadratureControl& control) {
  check_sum_inputs(set, coeffs);
  require(p >= 1.0, "exponent p must be >= 1");
  require(spacing > 0.0, "quadrature spacing must be positive");
  if (is_even_integer(p)) {
    return exp_sum_lp_norm_exact(set, coeffs, static_cast<int>(std::nearbyint(p)) / 2);
  }
  return exp_sum_lp_norm_refined(set, coeffs, p, spacing, control);
}

std::int64_t additive_energy(const Alphabet& set) {
  // r(s) = #{(a,b) : a + b = s}; energy = sum_s r(s)^2.
  const std::int64_t base = 2 * set.modulus();
  std::unordered_map<std::int64_t, std::int64_t> counts;
  counts.reserve(set.size() * set.size());
  for (const auto& a : set.elements()) {
    for (const auto& b : set.elements()) {
      std::int64_t key = 0;
      for (int k = 0; k < set.dim(); ++k) key = key * base + (a[k] + b[k]);
      ++counts[key];
    }
  }
  std::int64_t energy = 0;
  for (const auto& [key, r] : counts) energy += r * r;
  return energy;
}

double mockenhaupt_exponent(int dim, double alpha, double beta) {
  require(alpha > 0.0 && alpha < dim, "alpha must lie in (0, d)");
  require(beta > 0.0, "beta must be positive");
  return (4.0 * dim - 4.0 * alpha + 2.0 * beta) / beta;
}

}  // namespace frl
