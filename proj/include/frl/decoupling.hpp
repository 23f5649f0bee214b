#pragma once

// Multiscale decoupling at a single stage level and the mixed-norm inequality.

#include <span>
#include <vector>

#include "frl/stage.hpp"
#include "frl/weights.hpp"

namespace frl {

/// Transform of the raised-cosine profile sin^2(pi u) on [0,1]:
/// int_0^1 sin^2(pi u) e^{2 pi i s u} du.
cdouble raised_cosine_transform(double s);

struct DecouplingResult {
  double lhs = 0.0;  // (sum_{unit I in J} ||f||^p_{L^p(w_I)})^{1/p}
  double rhs = 0.0;  // (sum_a ||f_a||^2_{L^p(w_J)})^{1/2}
  double ratio = 0.0;
};

/// f = sum_a c_a f_a with f_a^ the raised-cosine bump on the level-j cube a,
/// so f_a(x) = e^{2 pi i a.x} N_j^{-d} prod_i Phi(x_i / N_j). Coefficients are
/// indexed by the level-j nodes (zero means inactive). J must be an N_j-cube.
DecouplingResult decoupling_check(const CantorStage& stage, int level,
                                  std::span<const cdouble> coefficients, const Cube& j, double p);

struct MixedNormResult {
  double lhs = 0.0;
  double rhs = 0.0;
  bool holds = false;
};

/// lhs = sum_i (sum_j c_ij^2)^{p/2}, rhs = (sum_j (sum_i c_ij^p)^{2/p})^{p/2}
/// for a nonnegative row-major matrix.
MixedNormResult mixed_norm_inequality_check(std::span<const double> c, std::size_t rows,
                                            std::size_t cols, double p);

}  // namespace frl
