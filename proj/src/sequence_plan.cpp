#include <algorithm>
#include <limits>
#include <sstream>

#include "frl/alphabet.hpp"

namespace frl {

std::int64_t SequencePlan::scale(int level) const {
  require(level >= 0 && level <= depth(), "plan level out of range");
  std::int64_t out = 1;
  for (int j = 0; j < level; ++j) out *= n_seq[j];
  return out;
}

std::int64_t SequencePlan::count(int level) const {
  require(level >= 0 && level <= depth(), "plan level out of range");
  std::int64_t out = 1;
  for (int j = 0; j < level; ++j) out *= t_seq[j];
  return out;
}

void validate_plan(const SequencePlan& plan) {
  require(plan.dim >= 1, "plan dimension must be positive");
  require(plan.alpha > 0.0 && plan.alpha < plan.dim, "plan alpha must lie in (0, d)");
  require(std::abs(plan.p - 2.0 * plan.dim / plan.alpha) < 1e-9 * plan.p,
          "plan p must equal 2d/alpha");
  require(plan.n_seq.size() == plan.t_seq.size(), "n_seq and t_seq lengths differ");
  const double tol = 1e-9;
  for (std::size_t j = 0; j < plan.n_seq.size(); ++j) {
    const auto n = plan.n_seq[j];
    const auto t = plan.t_seq[j];
    std::ostringstream where;
    where << " (level " << j + 1 << ")";
    require(n >= 1, "n_j must be positive" + where.str());
    require(t >= 1 && t <= ipow(n, plan.dim), "t_j must lie in [1, n_j^d]" + where.str());
    if (j > 0) {
      const auto prev = plan.n_seq[j - 1];
      require(n >= prev, "n_j must be nondecreasing" + where.str());
      // n_{j+1} / n_j <= (j+1) / j with 1-based j = index of prev
      const auto jj = static_cast<std::int64_t>(j);
      require(n * jj <= prev * (jj + 1), "slow-growth ratio violated" + where.str());
    }
    const double size = std::pow(static_cast<double>(n), 2.0 * plan.dim / plan.p);
    require(plan.c0_realized * size <= t * (1.0 + tol) && t <= plan.c1 * size * (1.0 + tol),
            "t_j outside [c0 n_j^{2d/p}, c1 n_j^{2d/p}]" + where.str());
  }
}

SequencePlan make_sequence_plan(double alpha, int dim, std::int64_t n1, int depth, double c0) {
  require(dim >= 1, "dimension must be positive");
  require(alpha > 0.0 && alpha < dim, "alpha must lie in (0, d)");
  require(n1 >= 2, "n1 must be at least 2");
  require(depth >= 1, "depth must be at least 1");
  require(c0 > 0.0, "c0 must be positive");

  SequencePlan plan;
  plan.dim = dim;
  plan.alpha = alpha;
  plan.p = 2.0 * dim / alpha;
  plan.c0 = c0;
  std::int64_t n = n1;
  double lo = std::numeric_limits<double>::infinity();
  double hi = 0.0;
  for (int j = 1; j <= depth; ++j) {
    if (j > 1) n = (n * j) / (j - 1);  // floor(n_{j-1} * j / (j-1))
    // n^{2d/p} = n^alpha; the small relative nudge keeps exact powers such as
    // 3^{log 2 / log 3} = 2 from flooring down.
    const double size = std::pow(static_cast<double>(n), alpha);
    const auto raw = static_cast<std::int64_t>(std::floor(c0 * size * (1.0 + 1e-12)));
    const std::int64_t t = std::clamp<std::int64_t>(raw, 1, ipow(n, dim));
    plan.n_seq.push_back(n);
    plan.t_seq.push_back(t);
    lo = std::min(lo, t / size);
    hi = std::max(hi, t / size);
  }
  plan.c0_realized = lo;
  plan.c1 = hi;
  validate_plan(plan);
  return plan;
}

SequencePlan plan_from_sequences(int dim, double alpha, std::vector<std::int64_t> n_seq,
                                 std::vector<std::int64_t> t_seq, double c0) {
  require(alpha > 0.0 && alpha < dim, "alpha must lie in (0, d)");
  require(!n_seq.empty() && n_seq.size() == t_seq.size(), "plan sequences must match");
  SequencePlan plan;
  plan.dim = dim;
  plan.alpha = alpha;
  plan.p = 2.0 * dim / alpha;
  plan.c0 = c0;
  plan.c0_realized = std::numeric_limits<double>::infinity();
  plan.c1 = 0.0;
  for (std::size_t j = 0; j < n_seq.size(); ++j) {
    const double size = std::pow(static_cast<double>(n_seq[j]), alpha);
    plan.c0_realized = std::min(plan.c0_realized, t_seq[j] / size);
    plan.c1 = std::max(plan.c1, t_seq[j] / size);
  }
  plan.n_seq = std::move(n_seq);
  plan.t_seq = std::move(t_seq);
  validate_plan(plan);
  return plan;
}

}  // namespace frl
