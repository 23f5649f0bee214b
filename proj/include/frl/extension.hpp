#pragma once

// The extension operator g -> (g dmu_k)^ on a cube, its L^p norms, and the
// localized restriction report.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "frl/kernels.hpp"
#include "frl/stage.hpp"

namespace frl {

/// Complex weight per deepest-level node, constant on each N_k^{-1}-cube.
struct DensityOnStage {
  const CantorStage* stage = nullptr;
  std::vector<cdouble> values;

  DensityOnStage(const CantorStage& s, std::vector<cdouble> v);
  static DensityOnStage ones(const CantorStage& s);

  /// ||g||_{L^2(mu_k)} = (T_k^{-1} sum |g(a)|^2)^{1/2}.
  double l2_norm() const;
};

enum class ExtensionMethod { kAuto, kFft, kDirect };

/// Midpoint grid over `cube` with ceil(side / spacing) points per axis.
kernels::MidpointGrid cube_grid(const Cube& cube, double spacing);

/// True when the FFT path applies: grid.count * grid.spacing / N_k is an integer.
bool fft_applicable(const CantorStage& stage, const kernels::MidpointGrid& grid);

/// (g dmu_k)^(x) = T_k^{-1} sum_a g(a) e^{-2 pi i a.x} prod_i box^(x_i / N_k) at
/// every grid point (row-major). kAuto picks the FFT when applicable.
std::vector<cdouble> extension_on_grid(const CantorStage& stage, std::span<const cdouble> g,
                                       const kernels::MidpointGrid& grid,
                                       ExtensionMethod method = ExtensionMethod::kAuto);

/// Adjoint of extension_on_grid for the plain l^2 pairing on grid and nodes:
/// out_a = T_k^{-1} sum_x conj(box(x)) e^{+2 pi i a.x} G(x).
std::vector<cdouble> extension_adjoint(const CantorStage& stage, std::span<const cdouble> values,
                                       const kernels::MidpointGrid& grid,
                                       ExtensionMethod method = ExtensionMethod::kAuto);

/// ||(g dmu_k)^||_{L^p(J)} by the midpoint rule at `spacing`, halved until two
/// values agree to 1e-3 relative (at most 2^24 grid points).
double extension_norm(const CantorStage& stage, const DensityOnStage& g, double p, const Cube& j,
                      double spacing = 0.25);

enum class GKind { kOnes, kRandomSigns, kKnappConcentrated, kPowerIterated };

std::string to_string(GKind kind);
GKind g_kind_from_string(const std::string& text);

struct RestrictionReport {
  double p = 0.0;
  int k = 0;
  Cube cube;
  GKind g_kind = GKind::kOnes;
  double measured_norm = 0.0;
  double measured_ratio = 0.0;   // measured_norm / ||g||_{L^2(mu_k)}
  double normalized_ratio = 0.0; // measured_ratio / (N_k^{d/p} T_k^{-1/2})
  double c0 = 0.0;
  double paper_bound = 0.0;      // c0^k N_k^{d/p} T_k^{-1/2}
};

struct RestrictionOptions {
  std::vector<GKind> strategies = {GKind::kOnes, GKind::kRandomSigns, GKind::kKnappConcentrated,
                                   GKind::kPowerIterated};
  std::optional<double> c0;        // default: default_restriction_c0
  std::optional<Cube> cube;        // default: side N_k centred at the origin
  double spacing = 0.25;
  int power_iterations = 30;
  std::uint64_t seed = 0;
};

/// 2^d times the largest certified Lambda(p) constant among the stage's
/// alphabets (1 when the stage has depth 0).
double default_restriction_c0(const CantorStage& stage, double p, std::uint64_t seed);

/// The density used by one fixed strategy, normalised to ||g||_{L^2(mu_k)} = 1.
DensityOnStage strategy_density(const CantorStage& stage, GKind kind, std::uint64_t seed);

/// One report per requested strategy. power_iterated is the best of nonlinear
/// power iteration started from every fixed strategy (and one Gaussian start),
/// so it dominates the fixed strategies.
std::vector<RestrictionReport> restriction_report(const CantorStage& stage, double p,
                                                  const RestrictionOptions& options = {});

}  // namespace frl
