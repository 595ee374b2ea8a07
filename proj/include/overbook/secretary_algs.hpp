#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <numbers>
#include <span>
#include <vector>

#include "overbook/error.hpp"
#include "overbook/prophet_algs.hpp"

namespace overbook {

// Partition of positions 1..n into intervals I_0..I_ell with
// I_j = [beta_{j-1} + 1, beta_j] and beta_{-1} = 0.
class BetaVector {
 public:
  BetaVector(std::vector<std::size_t> boundaries, std::size_t n)
      : boundaries_(std::move(boundaries)), n_(n) {
    detail::require(n_ >= 1, ErrorKind::kInvalidArgument, "n must be >= 1");
    detail::require(boundaries_.size() >= 2, ErrorKind::kInvalidArgument,
                    "beta needs at least beta_0 and beta_ell");
    detail::require(std::is_sorted(boundaries_.begin(), boundaries_.end()),
                    ErrorKind::kInvalidArgument, "beta must be nondecreasing");
    detail::require(boundaries_.back() == n_, ErrorKind::kInvalidArgument,
                    "beta_ell must equal n");
  }

  std::size_t n() const noexcept { return n_; }
  std::size_t ell() const noexcept { return boundaries_.size() - 1; }
  std::span<const std::size_t> boundaries() const noexcept { return boundaries_; }

  // Interval containing the 1-based position i: the unique j with
  // beta_{j-1} < i <= beta_j.
  std::size_t interval_index(std::size_t position) const {
    detail::require(position >= 1 && position <= n_, ErrorKind::kOutOfRange,
                    "position must lie in [1, n]");
    auto it = std::lower_bound(boundaries_.begin(), boundaries_.end(), position);
    return static_cast<std::size_t>(it - boundaries_.begin());
  }

  friend bool operator==(const BetaVector&, const BetaVector&) = default;

 private:
  std::vector<std::size_t> boundaries_;
  std::size_t n_;
};

// s = (k - 8 ell) / (2 + 2 ln ell); negative when k < 8 ell.
inline double secretary_slack(std::size_t ell, std::size_t k) {
  return (static_cast<double>(k) - 8.0 * static_cast<double>(ell)) /
         (2.0 + 2.0 * std::log(static_cast<double>(ell)));
}

// 1 - ell e^{-s} - e^{-k/6}, evaluated at s clamped to 0.
inline double secretary_bound(std::size_t ell, std::size_t k) {
  const double s = std::max(0.0, secretary_slack(ell, k));
  return 1.0 - static_cast<double>(ell) * std::exp(-s) - std::exp(-static_cast<double>(k) / 6.0);
}

// beta_0 = floor(n e^{-s} / (2 e ell)), beta_j = floor(j n e^{-s/j} / (2 e ell))
// for 0 < j < ell, beta_ell = n. Negative s is clamped to 0.
inline BetaVector default_beta(std::size_t n, std::size_t ell, std::size_t k) {
  detail::require(n >= 1, ErrorKind::kInvalidArgument, "n must be >= 1");
  detail::require(ell >= 1 && k >= ell, ErrorKind::kInvalidArgument, "need k >= ell >= 1");
  const double s = std::max(0.0, secretary_slack(ell, k));
  const double nd = static_cast<double>(n);
  const double denom = 2.0 * std::numbers::e * static_cast<double>(ell);
  std::vector<std::size_t> beta(ell + 1);
  beta[0] = static_cast<std::size_t>(std::floor(nd * std::exp(-s) / denom));
  for (std::size_t j = 1; j < ell; ++j) {
    const double jd = static_cast<double>(j);
    beta[j] = static_cast<std::size_t>(std::floor(jd * nd * std::exp(-s / jd) / denom));
  }
  beta[ell] = n;
  for (std::size_t j = 0; j < ell; ++j) {
    beta[j] = std::min(beta[j], n);
    if (j > 0) beta[j] = std::max(beta[j], beta[j - 1]);
  }
  return BetaVector(std::move(beta), n);
}

namespace detail {

// Single pass shared by both secretary variants. `top` holds the largest
// min(i, ell) values seen so far, descending. v_i is among the b highest of
// v_1..v_i iff fewer than b earlier values are >= v_i (earlier arrival wins
// ties). Since b <= ell, the truncated container counts exactly.
inline SelectionOutcome run_secretary_pass(std::span<const double> values,
                                           const BetaVector& beta, std::size_t capacity) {
  detail::require(values.size() == beta.n(), ErrorKind::kInvalidArgument,
                  "value count must equal beta.n()");
  const std::size_t ell = beta.ell();
  const auto bounds = beta.boundaries();
  SelectionOutcome out;
  std::vector<double> top;
  top.reserve(ell + 1);
  std::size_t interval = 0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    const std::size_t position = i + 1;
    while (bounds[interval] < position) ++interval;
    const double v = values[i];
    const auto at_least = std::upper_bound(top.begin(), top.end(), v, std::greater<>());
    const auto rank = static_cast<std::size_t>(at_least - top.begin());
    if (rank < interval && out.accepted.size() < capacity) out.accepted.push_back({i, v});
    if (rank < ell) {
      top.insert(at_least, v);
      if (top.size() > ell) top.pop_back();
    }
  }
  detail::finish_outcome(out, ell);
  return out;
}

}  // namespace detail

// Accepts v_i if it is among the b(i) highest values so far and fewer than k
// values have been accepted.
inline SelectionOutcome run_secretary(std::span<const double> values, const BetaVector& beta,
                                      std::size_t k) {
  detail::require(k >= 1, ErrorKind::kInvalidArgument, "k must be >= 1");
  return detail::run_secretary_pass(values, beta, k);
}

// Same rule with no capacity limit.
inline SelectionOutcome run_secretary_unbounded(std::span<const double> values,
                                                const BetaVector& beta) {
  return detail::run_secretary_pass(values, beta, values.size());
}

}  // namespace overbook
