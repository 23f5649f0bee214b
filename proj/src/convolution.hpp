#pragma once

// Dense coefficient convolutions on Z^d used by the exact even-p oracle.

#include <span>
#include <vector>

#include "frl/alphabet.hpp"

namespace frl::detail {

/// Values on the box [0, extent)^d, row-major.
struct DenseLattice {
  int dim = 1;
  std::int64_t extent = 1;
  std::vector<cdouble> values;

  std::int64_t index(const std::int64_t* point) const {
    std::int64_t flat = 0;
    for (int k = 0; k < dim; ++k) flat = flat * extent + point[k];
    return flat;
  }
};

/// c^{*m} for coefficients c on the alphabet, m >= 0 (c^{*0} = delta_0).
DenseLattice convolution_power(const Alphabet& set, std::span<const cdouble> coeffs, int m);

/// grad_a = sum_u C_m(u) conj(C_{m-1}(u - a)), the a-th Fourier coefficient of
/// |f|^{2m-2} f.
std::vector<cdouble> even_power_gradient(const Alphabet& set, std::span<const cdouble> coeffs,
                                         int m, double* norm_power = nullptr);

}  // namespace frl::detail
