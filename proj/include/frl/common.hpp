#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace frl {

using cdouble = std::complex<double>;

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Largest ambient dimension supported by the cube/ball geometry.
inline constexpr int kMaxDim = 3;

/// Lattice point in Z^d, coordinates stored in order.
using Point = std::vector<std::int64_t>;

// Error taxonomy. The CLI maps each kind onto its own exit code.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ValidationError : public Error {
 public:
  using Error::Error;
};

class BudgetError : public Error {
 public:
  using Error::Error;
};

class SearchError : public Error {
 public:
  using Error::Error;
};

inline void require(bool condition, const std::string& message) {
  if (!condition) throw ValidationError(message);
}

/// e^{-2 pi i t}. The argument is reduced mod 1 before scaling so large t keeps
/// full relative accuracy in the fractional part.
inline cdouble unit_phase(double t) {
  const double frac = t - std::nearbyint(t);
  return {std::cos(kTwoPi * frac), -std::sin(kTwoPi * frac)};
}

/// Transform of the indicator of [0,1]: (1 - e^{-2 pi i s}) / (2 pi i s), 1 at s = 0.
cdouble box_hat(double s);

/// Axis-parallel closed cube corner + [0, side]^d.
struct Cube {
  std::vector<double> corner;
  double side = 1.0;

  int dim() const { return static_cast<int>(corner.size()); }
  double center(int axis) const { return corner[axis] + 0.5 * side; }
};

/// SplitMix64 step, used to derive independent sub-seeds from a master seed.
std::uint64_t splitmix64(std::uint64_t x);

inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  return splitmix64(seed ^ splitmix64(stream + 0x9e3779b97f4a7c15ULL));
}

/// Unbiased integer in [0, n) from a 64-bit generator, by rejection. Used
/// instead of std::uniform_int_distribution so streams match across
/// standard libraries.
template <class Rng>
std::uint64_t uniform_index(Rng& rng, std::uint64_t n) {
  const std::uint64_t limit = (~std::uint64_t{0}) - ((~std::uint64_t{0}) % n);
  std::uint64_t draw = rng();
  while (draw >= limit) draw = rng();
  return draw % n;
}

/// Uniform double in [0, 1) with 53 random bits.
template <class Rng>
double uniform_unit(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// Standard normal deviate (Box-Muller on uniform_unit).
template <class Rng>
double standard_normal(Rng& rng) {
  double u = uniform_unit(rng);
  while (u <= 0.0) u = uniform_unit(rng);
  const double v = uniform_unit(rng);
  return std::sqrt(-2.0 * std::log(u)) * std::cos(kTwoPi * v);
}

std::int64_t ipow(std::int64_t base, int exponent);

/// Least-squares slope of y against x.
double least_squares_slope(std::span<const double> x, std::span<const double> y,
                           double* residual = nullptr);

/// Slope of log(y) against log(x).
double loglog_slope(std::span<const double> x, std::span<const double> y);

/// True when p is an even integer (to within 1e-12).
bool is_even_integer(double p);

}  // namespace frl
