#include "frl/stage.hpp"

#include <cmath>
#include <limits>
#include <random>
#include <sstream>

namespace frl {

CantorStage::CantorStage(SequencePlan plan, std::vector<Alphabet> base_sets,
                         std::vector<std::vector<std::int64_t>> translations, int depth,
                         std::int64_t node_budget)
    : plan_(std::move(plan)),
      base_sets_(std::move(base_sets)),
      translations_(std::move(translations)),
      depth_(depth) {
  validate_plan(plan_);
  const int d = plan_.dim;
  require(d <= kMaxDim, "stages support d <= 3");
  require(depth_ >= 0 && depth_ <= plan_.depth(), "stage depth exceeds plan depth");
  require(static_cast<int>(base_sets_.size()) >= depth_, "one alphabet per level required");
  base_sets_.erase(base_sets_.begin() + depth_, base_sets_.end());
  require(static_cast<int>(translations_.size()) == depth_, "one translation table per level");

  scale_.assign(1, 1);
  count_.assign(1, 1);
  for (int j = 1; j <= depth_; ++j) {
    const auto n = plan_.n_seq[j - 1];
    const auto t = plan_.t_seq[j - 1];
    require(scale_.back() <= std::numeric_limits<std::int64_t>::max() / n, "N_k overflows");
    scale_.push_back(scale_.back() * n);
    count_.push_back(count_.back() * t);
    if (count_.back() > node_budget) {
      std::ostringstream msg;
      msg << "T_" << j << " = " << count_.back() << " exceeds node budget " << node_budget
          << "; lower depth or n1, or raise node_budget";
      throw BudgetError(msg.str());
    }
    const Alphabet& b = base_sets_[j - 1];
    std::ostringstream where;
    where << " (level " << j << ")";
    require(b.dim() == d, "alphabet dimension mismatch" + where.str());
    require(b.modulus() == n, "alphabet modulus must equal n_j" + where.str());
    require(static_cast<std::int64_t>(b.size()) == t, "alphabet size must equal t_j" + where.str());
    require(static_cast<std::int64_t>(translations_[j - 1].size()) == count_[j - 1] * d,
            "translation table size must be T_{j-1} * d" + where.str());
    for (const auto v : translations_[j - 1]) {
      require(v >= 0 && v < n, "translation coordinates must lie in [0, n_j)" + where.str());
    }
  }

  corners_.assign(1, std::vector<std::int64_t>(static_cast<std::size_t>(d), 0));
  digits_.clear();
  for (int j = 1; j <= depth_; ++j) {
    const auto n = plan_.n_seq[j - 1];
    const auto t = plan_.t_seq[j - 1];
    const auto flat = base_sets_[j - 1].flat();
    const auto& v = translations_[j - 1];
    const auto& above = corners_[j - 1];
    std::vector<std::int64_t> digit(static_cast<std::size_t>(count_[j] * d));
    std::vector<std::int64_t> corner(digit.size());
    for (std::int64_t i = 0; i < count_[j]; ++i) {
      const std::int64_t parent = i / t;
      const std::int64_t e = i % t;
      for (int k = 0; k < d; ++k) {
        const auto dk = (flat[e * d + k] + v[parent * d + k]) % n;
        digit[i * d + k] = dk;
        corner[i * d + k] = above[parent * d + k] * n + dk;
      }
    }
    digits_.push_back(std::move(digit));
    corners_.push_back(std::move(corner));
  }
}

Point CantorStage::corner(int level, std::int64_t index) const {
  const int d = dim();
  const auto& c = corners_[level];
  return Point(c.begin() + index * d, c.begin() + (index + 1) * d);
}

std::optional<std::int64_t> CantorStage::find_node(int level, const Point& corner) const {
  require(level >= 0 && level <= depth_, "level out of range");
  require(static_cast<int>(corner.size()) == dim(), "corner dimension mismatch");
  for (const auto c : corner) {
    if (c < 0 || c >= scale_[level]) return std::nullopt;
  }
  if (level == 0) return 0;
  const auto n = plan_.n_seq[level - 1];
  Point up(corner.size());
  Point digit(corner.size());
  for (std::size_t k = 0; k < corner.size(); ++k) {
    up[k] = corner[k] / n;
    digit[k] = corner[k] % n;
  }
  const auto parent = find_node(level - 1, up);
  if (!parent) return std::nullopt;
  const auto t = branching(level);
  const int d = dim();
  const auto& digits = digits_[level - 1];
  for (std::int64_t i = *parent * t; i < (*parent + 1) * t; ++i) {
    bool same = true;
    for (int k = 0; k < d && same; ++k) same = digits[i * d + k] == digit[k];
    if (same) return i;
  }
  return std::nullopt;
}

CantorStage CantorStage::truncated(int depth) const {
  require(depth >= 0 && depth <= depth_, "truncation depth out of range");
  std::vector<std::vector<std::int64_t>> v(translations_.begin(), translations_.begin() + depth);
  std::vector<Alphabet> b(base_sets_.begin(), base_sets_.begin() + depth);
  return CantorStage(plan_, std::move(b), std::move(v), depth,
                     std::numeric_limits<std::int64_t>::max());
}

kernels::PhaseTree CantorStage::phase_tree() const {
  kernels::PhaseTree tree;
  tree.dim = dim();
  for (int j = 1; j <= depth_; ++j) {
    tree.scale.push_back(scale_[j]);
    tree.branching.push_back(branching(j));
    tree.digits.emplace_back(digits_[j - 1]);
  }
  return tree;
}

bool CantorStage::operator==(const CantorStage& other) const {
  return depth_ == other.depth_ && plan_ == other.plan_ && base_sets_ == other.base_sets_ &&
         translations_ == other.translations_;
}

std::vector<std::int64_t> draw_translations(int dim, std::int64_t modulus, std::int64_t parents,
                                            std::uint64_t seed, int level) {
  std::mt19937_64 rng(derive_seed(seed, static_cast<std::uint64_t>(level)));
  std::vector<std::int64_t> out(static_cast<std::size_t>(parents * dim));
  for (auto& v : out) v = static_cast<std::int64_t>(uniform_index(rng, modulus));
  return out;
}

CantorStage build_stage(const SequencePlan& plan, const std::vector<Alphabet>& alphabets,
                        int depth, const BuildOptions& options) {
  validate_plan(plan);
  require(depth >= 0 && depth <= plan.depth(), "stage depth exceeds plan depth");
  require(static_cast<int>(alphabets.size()) >= depth, "one alphabet per level required");
  std::vector<std::vector<std::int64_t>> translations;
  std::int64_t parents = 1;
  for (int j = 1; j <= depth; ++j) {
    if (parents > options.node_budget) break;  // the constructor reports the budget error
    const auto n = plan.n_seq[j - 1];
    if (options.translations == TranslationMode::kZero) {
      translations.emplace_back(static_cast<std::size_t>(parents * plan.dim), 0);
    } else {
      translations.push_back(draw_translations(plan.dim, n, parents, options.seed, j));
    }
    parents *= plan.t_seq[j - 1];
  }
  if (static_cast<int>(translations.size()) < depth) {
    std::ostringstream msg;
    msg << "stage of depth " << depth << " exceeds node budget " << options.node_budget
        << "; lower depth or n1, or raise node_budget";
    throw BudgetError(msg.str());
  }
  return CantorStage(plan, std::vector<Alphabet>(alphabets.begin(), alphabets.begin() + depth),
                     std::move(translations), depth, options.node_budget);
}

Rational measure_of_cube(const CantorStage& stage, int level, const Point& corner) {
  if (!stage.find_node(level, corner)) throw ValidationError("corner is not a node of the stage");
  return Rational(1, stage.count(level));
}

double stage_density(const CantorStage& stage, std::span<const double> x) {
  require(static_cast<int>(x.size()) == stage.dim(), "point dimension mismatch");
  const int k = stage.depth();
  const auto n = stage.scale(k);
  Point cell(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] >= 0.0 && x[i] < 1.0)) return 0.0;
    cell[i] = std::min<std::int64_t>(static_cast<std::int64_t>(std::floor(x[i] * n)), n - 1);
  }
  if (!stage.find_node(k, cell)) return 0.0;
  return std::pow(static_cast<double>(n), stage.dim()) / static_cast<double>(stage.count(k));
}

}  // namespace frl
