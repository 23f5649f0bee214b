#include "frl/common.hpp"

#include <numeric>

namespace frl {

cdouble box_hat(double s) {
  if (std::abs(s) < 1e-8) {
    // Taylor: 1 - i pi s - (2/3) pi^2 s^2
    const double ps = std::numbers::pi * s;
    return {1.0 - 2.0 * ps * ps / 3.0, -ps};
  }
  // e^{-i pi s} sin(pi s) / (pi s)
  const double ps = std::numbers::pi * s;
  const double frac = s - 2.0 * std::nearbyint(0.5 * s);  // reduce s mod 2
  const double amp = std::sin(std::numbers::pi * frac) / ps;
  const double half_angle = std::numbers::pi * frac;
  return {amp * std::cos(half_angle), -amp * std::sin(half_angle)};
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::int64_t ipow(std::int64_t base, int exponent) {
  std::int64_t out = 1;
  for (int i = 0; i < exponent; ++i) out *= base;
  return out;
}

double least_squares_slope(std::span<const double> x, std::span<const double> y,
                           double* residual) {
  require(x.size() == y.size() && x.size() >= 2, "slope fit needs >= 2 points");
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxx = 0.0;
  double sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  require(sxx > 0.0, "slope fit needs distinct abscissae");
  const double slope = sxy / sxx;
  if (residual != nullptr) {
    double ss = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double r = y[i] - (my + slope * (x[i] - mx));
      ss += r * r;
    }
    *residual = std::sqrt(ss / n);
  }
  return slope;
}

double loglog_slope(std::span<const double> x, std::span<const double> y) {
  std::vector<double> lx(x.size());
  std::vector<double> ly(y.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    lx[i] = std::log(x[i]);
    ly[i] = std::log(y[i]);
  }
  return least_squares_slope(lx, ly);
}

bool is_even_integer(double p) {
  const double r = std::nearbyint(p);
  return std::abs(p - r) < 1e-12 && static_cast<long long>(r) % 2 == 0;
}

}  // namespace frl
