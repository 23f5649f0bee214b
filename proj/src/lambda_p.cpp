#include <algorithm>
#include <limits>
#include <random>

#include "convolution.hpp"
#include "frl/alphabet.hpp"
#include "frl/kernels.hpp"

namespace frl {
namespace detail {

namespace {

// Visits every point of [0, extent)^dim in row-major order.
template <class F>
void for_each_box_point(int dim, std::int64_t extent, F&& visit) {
  std::int64_t point[kMaxDim + 1] = {0, 0, 0, 0};
  const std::int64_t total = ipow(extent, dim);
  for (std::int64_t flat = 0; flat < total; ++flat) {
    std::int64_t rest = flat;
    for (int k = dim - 1; k >= 0; --k) {
      point[k] = rest % extent;
      rest /= extent;
    }
    visit(point, flat);
  }
}

}  // namespace

DenseLattice convolution_power(const Alphabet& set, std::span<const cdouble> coeffs, int m) {
  require(set.dim() <= kMaxDim, "convolution oracle supports d <= 3");
  const int dim = set.dim();
  const std::int64_t span = set.modulus() - 1;
  DenseLattice out{dim, std::max<std::int64_t>(1, m) * span + 1, {}};
  out.values.assign(static_cast<std::size_t>(ipow(out.extent, dim)), cdouble{});
  const std::int64_t zero[kMaxDim] = {0, 0, 0};
  out.values[out.index(zero)] = 1.0;

  std::vector<cdouble> next(out.values.size());
  for (int step = 0; step < m; ++step) {
    std::fill(next.begin(), next.end(), cdouble{});
    const std::int64_t reach = step * span + 1;  // support of the current power
    for_each_box_point(dim, reach, [&](const std::int64_t* w, std::int64_t) {
      const cdouble value = out.values[out.index(w)];
      if (value == cdouble{}) return;
      for (std::size_t a = 0; a < set.size(); ++a) {
        std::int64_t u[kMaxDim];
        for (int k = 0; k < dim; ++k) u[k] = w[k] + set.elements()[a][k];
        next[out.index(u)] += value * coeffs[a];
      }
    });
    out.values.swap(next);
  }
  return out;
}

std::vector<cdouble> even_power_gradient(const Alphabet& set, std::span<const cdouble> coeffs,
                                         int m, double* norm_power) {
  const DenseLattice top = convolution_power(set, coeffs, m);
  DenseLattice below = convolution_power(set, coeffs, m - 1);
  if (norm_power != nullptr) {
    double energy = 0.0;
    for (const cdouble v : top.values) energy += std::norm(v);
    *norm_power = energy;
  }
  const int dim = set.dim();
  const std::int64_t reach = (m - 1) * (set.modulus() - 1) + 1;
  std::vector<cdouble> grad(set.size());
  for_each_box_point(dim, reach, [&](const std::int64_t* w, std::int64_t) {
    const cdouble lower = below.values[below.index(w)];
    if (lower == cdouble{}) return;
    for (std::size_t a = 0; a < set.size(); ++a) {
      std::int64_t u[kMaxDim];
      for (int k = 0; k < dim; ++k) u[k] = w[k] + set.elements()[a][k];
      grad[a] += top.values[top.index(u)] * std::conj(lower);
    }
  });
  return grad;
}

}  // namespace detail

namespace {

double l2_norm(std::span<const cdouble> c) {
  double s = 0.0;
  for (const cdouble v : c) s += std::norm(v);
  return std::sqrt(s);
}

// One objective for the power iteration: returns ||f||_p and fills the ascent
// direction (Fourier coefficients of |f|^{p-2} f restricted to S).
class LpObjective {
 public:
  LpObjective(const Alphabet& set, double p, double grid_spacing)
      : set_(set), p_(p), flat_(set.flat()) {
    if (is_even_integer(p)) {
      m_ = static_cast<int>(std::nearbyint(p)) / 2;
    } else {
      n_ = static_cast<std::int64_t>(std::ceil(1.0 / grid_spacing - 1e-9));
    }
  }

  double evaluate(std::span<const cdouble> c, std::vector<cdouble>* grad) const {
    if (m_ > 0) {
      double power = 0.0;
      auto g = detail::even_power_gradient(set_, c, m_, &power);
      if (grad != nullptr) *grad = std::move(g);
      return std::pow(power, 1.0 / p_);
    }
    const kernels::LatticeSum f{set_.dim(), flat_, c};
    if (grad != nullptr) *grad = kernels::omp::lattice_power_gradient(f, p_, n_);
    return std::pow(kernels::omp::lattice_power_mean(f, p_, n_), 1.0 / p_);
  }

 private:
  const Alphabet& set_;
  double p_;
  std::vector<std::int64_t> flat_;
  int m_ = 0;
  std::int64_t n_ = 0;
};

}  // namespace

LambdaPCertificate lambda_p_constant(const Alphabet& set, double p, const LambdaPBudget& budget,
                                     std::uint64_t seed, double constant_cap) {
  require(p > 2.0, "Lambda(p) constants need p > 2");
  require(budget.starts >= 1 && budget.iterations >= 1, "Lambda(p) budget must be nonzero");

  LambdaPCertificate cert;
  cert.exponent = p;
  cert.constant_cap = constant_cap;
  const bool exact = is_even_integer(p);
  cert.method = exact ? CertificateMethod::kExactEvenP : CertificateMethod::kQuadrature;

  const std::size_t t = set.size();
  const std::vector<cdouble> ones(t, cdouble{1.0, 0.0});
  double spacing = 0.0;
  if (!exact) {
    // Grid fine enough that the all-ones sum (the most concentrated start) has
    // converged; the iteration then runs on this fixed grid.
    exp_sum_lp_norm_refined(set, ones, p, 1.0 / (4.0 * static_cast<double>(set.modulus())),
                            budget.quadrature, &spacing);
    cert.grid_spacing = spacing;
  }
  const LpObjective objective(set, p, spacing);

  std::mt19937_64 rng(seed);
  double best = 1.0;  // any singleton coefficient vector has ratio exactly 1
  std::vector<cdouble> best_c;
  int iterations = 0;
  for (int start = 0; start < budget.starts; ++start) {
    std::vector<cdouble> c(t);
    if (start == 0) {
      c = ones;
    } else {
      for (auto& v : c) v = {standard_normal(rng), standard_normal(rng)};
    }
    double norm = l2_norm(c);
    for (auto& v : c) v /= norm;

    std::vector<cdouble> grad;
    double value = objective.evaluate(c, &grad);
    for (int it = 0; it < budget.iterations; ++it) {
      ++iterations;
      const double gnorm = l2_norm(grad);
      if (gnorm == 0.0) break;
      for (std::size_t a = 0; a < t; ++a) c[a] = grad[a] / gnorm;
      const double next = objective.evaluate(c, &grad);
      const bool stalled = next <= value * (1.0 + budget.tolerance);
      value = std::max(value, next);
      if (stalled) break;
    }
    if (value > best) {
      best = value;
      best_c = c;
    }
  }

  if (!exact && !best_c.empty()) {
    // Re-evaluate the maximiser with refined quadrature; keep the grid value
    // as a floor only if the refined value confirms it.
    best = std::max(1.0, exp_sum_lp_norm_refined(set, best_c, p, spacing, budget.quadrature));
  }
  cert.constant_lower = best;
  cert.iterations = iterations;
  return cert;
}

namespace {

// Greedy objective: how concentrated the all-ones sum over S is. Equal-size
// candidates are compared, so ||1_S||_p^p ranks them the same way as the
// c = 1 Lambda(p) ratio.
double concentration_score(const Alphabet& set, double p, const QuadratureControl& control) {
  if (std::abs(p - 4.0) < 1e-12) return static_cast<double>(additive_energy(set));
  const std::vector<cdouble> ones(set.size(), cdouble{1.0, 0.0});
  if (is_even_integer(p)) {
    return std::pow(exp_sum_lp_norm_exact(set, ones, static_cast<int>(std::nearbyint(p)) / 2), p);
  }
  const double spacing = 1.0 / (4.0 * static_cast<double>(set.modulus()));
  return std::pow(exp_sum_lp_norm_refined(set, ones, p, spacing, control), p);
}

bool strictly_less(double a, double b) { return a < b - 1e-12 * std::max(1.0, std::abs(b)); }

std::vector<Point> all_points(int dim, std::int64_t modulus) {
  std::vector<Point> out;
  const std::int64_t total = ipow(modulus, dim);
  out.reserve(static_cast<std::size_t>(total));
  for (std::int64_t flat = 0; flat < total; ++flat) {
    Point point(dim);
    std::int64_t rest = flat;
    for (int k = dim - 1; k >= 0; --k) {
      point[k] = rest % modulus;
      rest /= modulus;
    }
    out.push_back(std::move(point));
  }
  return out;  // lexicographic order
}

}  // namespace

AlphabetSearchResult search_lambda_p_set(std::int64_t modulus, int dim, double p,
                                         std::int64_t target_size, double constant_cap,
                                         std::uint64_t seed, const SearchBudget& budget) {
  require(dim >= 1 && dim <= kMaxDim, "search supports 1 <= d <= 3");
  require(modulus >= 1, "modulus must be positive");
  require(p > 2.0, "Lambda(p) search needs p > 2");
  require(target_size >= 1 && target_size <= ipow(modulus, dim),
          "target size must lie in [1, N^d]");
  require(constant_cap > 1.0, "constant cap must exceed 1");

  const auto lattice = all_points(dim, modulus);
  const auto& control = budget.certify.quadrature;

  std::vector<Point> chosen;
  std::vector<bool> used(lattice.size(), false);
  while (static_cast<std::int64_t>(chosen.size()) < target_size) {
    double best_score = std::numeric_limits<double>::infinity();
    std::size_t best_index = lattice.size();
    for (std::size_t i = 0; i < lattice.size(); ++i) {
      if (used[i]) continue;
      auto trial = chosen;
      trial.push_back(lattice[i]);
      const double score = concentration_score(Alphabet(dim, modulus, trial), p, control);
      if (best_index == lattice.size() || strictly_less(score, best_score)) {
        best_score = score;
        best_index = i;
      }
    }
    used[best_index] = true;
    chosen.push_back(lattice[best_index]);
  }

  Alphabet current(dim, modulus, chosen);
  double current_score = concentration_score(current, p, control);
  std::uint64_t cert_stream = 0;
  auto certify = [&](const Alphabet& set) {
    return lambda_p_constant(set, p, budget.certify, derive_seed(seed, cert_stream++),
                             constant_cap);
  };
  AlphabetSearchResult result{current, certify(current), false, 0};

  std::mt19937_64 rng(derive_seed(seed, 0xa1fa));
  const std::int64_t total = static_cast<std::int64_t>(lattice.size());
  while (result.certificate.exceeds_cap() && result.swaps_tried < budget.max_swaps &&
         target_size < total) {
    ++result.swaps_tried;
    std::vector<Point> members = current.elements();
    const std::size_t out = uniform_index(rng, members.size());
    Point incoming;
    do {
      incoming = lattice[uniform_index(rng, lattice.size())];
    } while (current.contains(incoming));
    members[out] = incoming;
    Alphabet trial(dim, modulus, std::move(members));
    const double score = concentration_score(trial, p, control);
    if (!strictly_less(score, current_score)) continue;
    current = trial;
    current_score = score;
    auto cert = certify(current);
    if (cert.constant_lower < result.certificate.constant_lower) {
      result.alphabet = current;
      result.certificate = cert;
    }
  }
  result.within_cap = !result.certificate.exceeds_cap();
  return result;
}

}  // namespace frl
