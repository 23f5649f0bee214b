#pragma once

// Brute-force reference computations shared by the unit and acceptance tests.
// Each one is written from the definitions, without the library's fast paths.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <random>
#include <set>
#include <vector>

#include "frl/alphabet.hpp"
#include "frl/stage.hpp"

namespace oracle {

using frl::cdouble;

inline frl::Point add(const frl::Point& a, const frl::Point& b) {
  frl::Point s(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) s[i] = a[i] + b[i];
  return s;
}

/// #{(a,b,c,d) : a + b = c + d} by enumerating all quadruples.
inline std::int64_t energy(const frl::Alphabet& s) {
  const auto& e = s.elements();
  std::int64_t count = 0;
  for (const auto& a : e)
    for (const auto& b : e)
      for (const auto& c : e)
        for (const auto& d : e) count += add(a, b) == add(c, d) ? 1 : 0;
  return count;
}

/// Pairwise sums a + b (a <= b) are all distinct.
inline bool is_sidon(const frl::Alphabet& s) {
  const auto& e = s.elements();
  std::set<frl::Point> sums;
  for (std::size_t i = 0; i < e.size(); ++i)
    for (std::size_t j = i; j < e.size(); ++j)
      if (!sums.insert(add(e[i], e[j])).second) return false;
  return true;
}

/// ||sum c_a e(a.x)||_4 from sum_{a+b=c+d} c_a c_b conj(c_c c_d).
inline double l4_norm(const frl::Alphabet& s, const std::vector<cdouble>& c) {
  const auto& e = s.elements();
  const std::size_t n = e.size();
  cdouble total = 0.0;
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b)
      for (std::size_t x = 0; x < n; ++x)
        for (std::size_t y = 0; y < n; ++y)
          if (add(e[a], e[b]) == add(e[x], e[y])) total += c[a] * c[b] * std::conj(c[x] * c[y]);
  return std::pow(total.real(), 0.25);
}

inline double l2_norm(const std::vector<cdouble>& c) {
  double s = 0.0;
  for (const auto& v : c) s += std::norm(v);
  return std::sqrt(s);
}

/// mu_k^(xi) summed directly over every deepest-level cube.
inline cdouble flat_mu_hat(const frl::CantorStage& stage, const std::vector<double>& xi) {
  const int k = stage.depth();
  const int d = stage.dim();
  const double n = static_cast<double>(stage.scale(k));
  const auto corners = stage.corners(k);
  cdouble sum = 0.0;
  for (std::int64_t i = 0; i < stage.count(k); ++i) {
    double phase = 0.0;
    for (int a = 0; a < d; ++a) phase += static_cast<double>(corners[i * d + a]) / n * xi[a];
    sum += std::polar(1.0, -frl::kTwoPi * phase);
  }
  cdouble box = 1.0;
  for (int a = 0; a < d; ++a) {
    const double s = xi[a] / n;
    box *= s == 0.0 ? cdouble(1.0)
                    : (1.0 - std::polar(1.0, -frl::kTwoPi * s)) / cdouble(0.0, frl::kTwoPi * s);
  }
  return sum / static_cast<double>(stage.count(k)) * box;
}

/// Closed form of mu_k^ when every translation is zero and all levels share B.
inline cdouble product_mu_hat(const frl::CantorStage& stage, const std::vector<double>& xi) {
  const int d = stage.dim();
  cdouble value = 1.0;
  for (int j = 1; j <= stage.depth(); ++j) {
    const auto& b = stage.base_sets()[j - 1];
    cdouble factor = 0.0;
    for (const auto& a : b.elements()) {
      double phase = 0.0;
      for (int i = 0; i < d; ++i) phase += static_cast<double>(a[i]) * xi[i] / stage.scale(j);
      factor += std::polar(1.0, -frl::kTwoPi * phase);
    }
    value *= factor / static_cast<double>(b.size());
  }
  for (int i = 0; i < d; ++i) {
    const double s = xi[i] / stage.scale(stage.depth());
    if (s != 0.0) value *= (1.0 - std::polar(1.0, -frl::kTwoPi * s)) / cdouble(0.0, frl::kTwoPi * s);
  }
  return value;
}

/// Seeded random alphabet: `size` distinct points of [modulus]^dim.
inline frl::Alphabet random_alphabet(std::mt19937_64& rng, int dim, std::int64_t modulus,
                                     std::size_t size) {
  frl::require(static_cast<std::int64_t>(size) <= frl::ipow(modulus, dim), "oracle: alphabet too large");
  std::set<frl::Point> chosen;
  std::uniform_int_distribution<std::int64_t> coord(0, modulus - 1);
  while (chosen.size() < size) {
    frl::Point p(dim);
    for (auto& v : p) v = coord(rng);
    chosen.insert(p);
  }
  return frl::Alphabet(dim, modulus, {chosen.begin(), chosen.end()});
}

inline std::vector<cdouble> random_coeffs(std::mt19937_64& rng, std::size_t n) {
  std::normal_distribution<double> g;
  std::vector<cdouble> c(n);
  for (auto& v : c) v = {g(rng), g(rng)};
  return c;
}

}  // namespace oracle
