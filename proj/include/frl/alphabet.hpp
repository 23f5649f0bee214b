#pragma once

// Finite frequency sets S in [N]^d, their Lambda(p) constants, and the
// (n_j, t_j) sequences that drive the multiscale construction.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "frl/common.hpp"

namespace frl {

/// A set of distinct lattice points in [0, modulus)^dim, kept sorted
/// lexicographically.
class Alphabet {
 public:
  Alphabet(int dim, std::int64_t modulus, std::vector<Point> elements);

  int dim() const { return dim_; }
  std::int64_t modulus() const { return modulus_; }
  const std::vector<Point>& elements() const { return elements_; }
  std::size_t size() const { return elements_.size(); }
  bool contains(const Point& point) const;

  /// Row-major copy of the coordinates (size() * dim()).
  std::vector<std::int64_t> flat() const;

  /// v + S mod (modulus Z)^d.
  Alphabet translated(const Point& v) const;

  bool operator==(const Alphabet&) const = default;

 private:
  int dim_;
  std::int64_t modulus_;
  std::vector<Point> elements_;
};

enum class CertificateMethod { kExactEvenP, kQuadrature };

std::string to_string(CertificateMethod method);
CertificateMethod certificate_method_from_string(const std::string& text);

/// Empirical lower bound on the Lambda(p) constant of a set.
struct LambdaPCertificate {
  double exponent = 4.0;
  double constant_lower = 1.0;
  double constant_cap = 0.0;   // 0 when no cap was requested
  CertificateMethod method = CertificateMethod::kExactEvenP;
  double grid_spacing = 0.0;   // quadrature only
  int iterations = 0;

  bool exceeds_cap() const { return constant_cap > 0.0 && constant_lower > constant_cap; }
};

struct SequencePlan {
  int dim = 1;
  double alpha = 0.5;
  double p = 4.0;
  double c0 = 1.0;
  double c1 = 1.0;            // max_j t_j / n_j^{2d/p}, recorded after the fact
  double c0_realized = 1.0;   // min_j t_j / n_j^{2d/p}
  std::vector<std::int64_t> n_seq;
  std::vector<std::int64_t> t_seq;

  int depth() const { return static_cast<int>(n_seq.size()); }
  /// N_j = n_1 ... n_j (N_0 = 1).
  std::int64_t scale(int level) const;
  /// T_j = t_1 ... t_j (T_0 = 1).
  std::int64_t count(int level) const;

  bool operator==(const SequencePlan&) const = default;
};

/// Throws ValidationError naming the first violated plan invariant.
void validate_plan(const SequencePlan& plan);

// ---------------------------------------------------------------------------
// Exponential sums

/// Midpoint-rule grid value of ||sum_a c_a e(a.x)||_{L^p([0,1]^d)} with
/// ceil(1/spacing) points per axis. No refinement.
double exp_sum_lp_norm_on_grid(const Alphabet& set, std::span<const cdouble> coeffs, double p,
                               double spacing);

/// Exact ||f||_{2m} via ||c^{*m}||_2^{2/(2m)} (m-fold coefficient convolution on Z^d).
double exp_sum_lp_norm_exact(const Alphabet& set, std::span<const cdouble> coeffs, int m);

struct QuadratureControl {
  double rel_tol = 1e-4;
  std::int64_t max_points = std::int64_t{1} << 24;
};

/// Refined quadrature: halves `spacing` until two successive values agree to
/// rel_tol or the grid would exceed max_points. Reports the final spacing.
double exp_sum_lp_norm_refined(const Alphabet& set, std::span<const cdouble> coeffs, double p,
                               double spacing, const QuadratureControl& control = {},
                               double* final_spacing = nullptr);

/// L^p norm of the exponential sum: exact convolution when p is an even
/// integer (spacing ignored), refined midpoint quadrature otherwise.
double exp_sum_lp_norm(const Alphabet& set, std::span<const cdouble> coeffs, double p,
                       double spacing, const QuadratureControl& control = {});

/// #{(a,b,c,d) in S^4 : a + b = c + d}.
std::int64_t additive_energy(const Alphabet& set);

// ---------------------------------------------------------------------------
// Lambda(p) constants

struct LambdaPBudget {
  int starts = 8;
  int iterations = 200;
  double tolerance = 1e-12;  // relative improvement below which a start stops
  QuadratureControl quadrature{};
};

/// Lower bound on sup_c ||sum c_a e(a.x)||_p / ||c||_2 by nonlinear power
/// iteration from the all-ones vector and seeded random starts.
LambdaPCertificate lambda_p_constant(const Alphabet& set, double p, const LambdaPBudget& budget,
                                     std::uint64_t seed, double constant_cap = 0.0);

struct AlphabetSearchResult {
  Alphabet alphabet;
  LambdaPCertificate certificate;
  bool within_cap = false;
  int swaps_tried = 0;
};

struct SearchBudget {
  int max_swaps = 400;
  LambdaPBudget certify{};
};

/// Greedy insertion (ties broken lexicographically) followed by seeded local
/// swaps until the certified constant is within `constant_cap`. When the swap
/// budget runs out the best set found is returned with within_cap = false.
AlphabetSearchResult search_lambda_p_set(std::int64_t modulus, int dim, double p,
                                         std::int64_t target_size, double constant_cap,
                                         std::uint64_t seed, const SearchBudget& budget = {});

/// n_{j+1} = floor(n_j (j+1)/j), t_j = clip(floor(c0 n_j^{2d/p}), 1, n_j^d), p = 2d/alpha.
SequencePlan make_sequence_plan(double alpha, int dim, std::int64_t n1, int depth,
                                double c0 = 1.0);

/// Plan with given sequences (e.g. constant n_j); c0_realized and c1 are
/// computed from the data and the result is validated.
SequencePlan plan_from_sequences(int dim, double alpha, std::vector<std::int64_t> n_seq,
                                 std::vector<std::int64_t> t_seq, double c0 = 1.0);

/// (4d - 4 alpha + 2 beta) / beta.
double mockenhaupt_exponent(int dim, double alpha, double beta);

}  // namespace frl
