#pragma once

// Finite stages of the random-translate Cantor construction.
//
// Level j of a stage holds T_j = t_1...t_j cubes of side 1/N_j. Child i of
// level j sits under parent i / t_j, at digit (B_j[i mod t_j] + v(j, parent))
// mod n_j, and its corner numerator over N_j is parent * n_j + digit. Corners
// are kept as exact integers.

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include <boost/rational.hpp>

#include "frl/alphabet.hpp"
#include "frl/kernels.hpp"

namespace frl {

using Rational = boost::rational<std::int64_t>;

enum class TranslationMode { kRandom, kZero };

struct BuildOptions {
  std::uint64_t seed = 0;
  TranslationMode translations = TranslationMode::kRandom;
  std::int64_t node_budget = 1'000'000;
};

class CantorStage {
 public:
  /// Assembles a stage from explicit translation vectors; translations[j-1]
  /// holds T_{j-1} * d entries in [0, n_j). Validates everything.
  CantorStage(SequencePlan plan, std::vector<Alphabet> base_sets,
              std::vector<std::vector<std::int64_t>> translations, int depth,
              std::int64_t node_budget = 1'000'000);

  const SequencePlan& plan() const { return plan_; }
  int depth() const { return depth_; }
  int dim() const { return plan_.dim; }
  const std::vector<Alphabet>& base_sets() const { return base_sets_; }

  /// N_j and T_j for 0 <= j <= depth.
  std::int64_t scale(int level) const { return scale_[level]; }
  std::int64_t count(int level) const { return count_[level]; }
  std::int64_t branching(int level) const { return plan_.t_seq[level - 1]; }

  /// v(j, a) for every parent a of level j, row-major (1 <= j <= depth).
  std::span<const std::int64_t> translations(int level) const { return translations_[level - 1]; }
  /// Digits in [n_j)^d of the level-j nodes (1 <= j <= depth).
  std::span<const std::int64_t> digits(int level) const { return digits_[level - 1]; }
  /// Corner numerators over N_j of the level-j nodes (0 <= j <= depth).
  std::span<const std::int64_t> corners(int level) const { return corners_[level]; }

  Point corner(int level, std::int64_t index) const;
  std::int64_t parent(int level, std::int64_t index) const { return index / branching(level); }

  /// Index of the level-j node with the given corner numerator, if any.
  std::optional<std::int64_t> find_node(int level, const Point& corner) const;

  /// The nested stage of smaller depth (same translations).
  CantorStage truncated(int depth) const;

  kernels::PhaseTree phase_tree() const;

  const std::vector<std::vector<std::int64_t>>& all_translations() const { return translations_; }

  bool operator==(const CantorStage& other) const;

 private:
  SequencePlan plan_;
  std::vector<Alphabet> base_sets_;
  std::vector<std::vector<std::int64_t>> translations_;
  int depth_;
  std::vector<std::int64_t> scale_;
  std::vector<std::int64_t> count_;
  std::vector<std::vector<std::int64_t>> digits_;
  std::vector<std::vector<std::int64_t>> corners_;
};

/// Draws v(j, a) uniformly from [n_j]^d, independently per parent, one seeded
/// stream per level (so shallower stages are prefixes of deeper ones).
CantorStage build_stage(const SequencePlan& plan, const std::vector<Alphabet>& alphabets,
                        int depth, const BuildOptions& options = {});

/// Translations of one level for `parents` parents, drawn as build_stage does.
std::vector<std::int64_t> draw_translations(int dim, std::int64_t modulus, std::int64_t parents,
                                            std::uint64_t seed, int level);

/// Exactly 1/T_j for a node of level j; ValidationError if `corner` is not a node.
Rational measure_of_cube(const CantorStage& stage, int level, const Point& corner);

/// mu_k(x) with half-open cubes: N_k^d / T_k on E_k, else 0.
double stage_density(const CantorStage& stage, std::span<const double> x);

}  // namespace frl
