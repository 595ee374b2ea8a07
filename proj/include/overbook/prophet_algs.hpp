#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "overbook/distributions.hpp"
#include "overbook/error.hpp"
#include "overbook/offline_oracle.hpp"
#include "overbook/random.hpp"

namespace overbook {

struct ThresholdRule {
  double threshold = 0.0;
  double threshold_priority = 0.0;  // tie-break rank of the threshold element
  std::size_t capacity = 1;
};

struct Acceptance {
  std::size_t index = 0;
  double value = 0.0;

  friend bool operator==(const Acceptance&, const Acceptance&) = default;
};

// Trace of one online run. Indices are 0-based arrival positions.
struct SelectionOutcome {
  std::vector<Acceptance> accepted;  // in acceptance (= arrival) order
  double threshold_used = 0.0;
  double ell_value = 0.0;

  std::vector<double> accepted_values() const {
    std::vector<double> v;
    v.reserve(accepted.size());
    for (const auto& a : accepted) v.push_back(a.value);
    return v;
  }
};

namespace detail {

inline void finish_outcome(SelectionOutcome& out, std::size_t ell) {
  out.ell_value = top_ell_value(out.accepted_values(), ell);
}

}  // namespace detail

// Accepts the first `capacity` indices with (v_i, priority_i) lexicographically
// above (T, T_priority). Priorities are assumed pairwise distinct and distinct
// from the threshold's priority.
inline SelectionOutcome run_threshold(std::span<const double> values,
                                      std::span<const double> priorities,
                                      const ThresholdRule& rule, std::size_t ell) {
  detail::require(values.size() == priorities.size(), ErrorKind::kInvalidArgument,
                  "values and priorities must have equal length");
  detail::require(rule.capacity >= 1, ErrorKind::kInvalidArgument, "capacity must be >= 1");
  SelectionOutcome out;
  out.threshold_used = rule.threshold;
  for (std::size_t i = 0; i < values.size() && out.accepted.size() < rule.capacity; ++i) {
    const bool above = values[i] > rule.threshold ||
                       (values[i] == rule.threshold && priorities[i] > rule.threshold_priority);
    if (above) out.accepted.push_back({i, values[i]});
  }
  detail::finish_outcome(out, ell);
  return out;
}

// Single-threshold selector: the first k values strictly above T.
inline SelectionOutcome accept_above(std::span<const double> values, double threshold,
                                     std::size_t k, std::size_t ell) {
  SelectionOutcome out;
  out.threshold_used = threshold;
  for (std::size_t i = 0; i < values.size() && out.accepted.size() < k; ++i)
    if (values[i] > threshold) out.accepted.push_back({i, values[i]});
  detail::finish_outcome(out, ell);
  return out;
}

inline std::size_t default_tau(std::size_t ell, std::size_t k) {
  detail::require(ell >= 1 && k >= ell, ErrorKind::kInvalidArgument, "need k >= ell >= 1");
  return (ell + k + 1) / 2;
}

// 1 - 4 ell exp(-min(k - tau, tau - ell)^2 / (8k)); may be negative (vacuous).
inline double alg_tau_bound(std::size_t ell, std::size_t k, std::size_t tau) {
  const double gap = std::min(static_cast<double>(k) - static_cast<double>(tau),
                              static_cast<double>(tau) - static_cast<double>(ell));
  return 1.0 - 4.0 * static_cast<double>(ell) *
                   std::exp(-gap * gap / (8.0 * static_cast<double>(k)));
}

struct TauThreshold {
  double value = 0.0;
  double priority = 0.0;
};

// tau-th largest (sample, priority) pair in lexicographic order.
inline TauThreshold tau_maximal(std::span<const double> samples,
                                std::span<const double> priorities, std::size_t tau) {
  detail::require(tau >= 1 && tau <= samples.size(), ErrorKind::kOutOfRange,
                  "tau must lie in [1, n]");
  std::vector<std::pair<double, double>> pairs(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) pairs[i] = {samples[i], priorities[i]};
  auto nth = pairs.begin() + static_cast<std::ptrdiff_t>(tau - 1);
  std::nth_element(pairs.begin(), nth, pairs.end(), std::greater<>());
  return {nth->first, nth->second};
}

// Single-sample algorithm. The uniform permutation over the 2n entries used
// for tie-breaking is realized as 2n i.i.d. uniform priorities: the first n
// belong to the samples, the last n to the online values.
inline SelectionOutcome alg_tau(std::span<const double> samples, std::span<const double> values,
                                std::size_t tau, std::size_t k, std::size_t ell, Rng& rng) {
  detail::require(samples.size() == values.size(), ErrorKind::kInvalidArgument,
                  "samples and values must have equal length");
  detail::require(tau >= 1 && tau <= samples.size(), ErrorKind::kOutOfRange,
                  "tau must lie in [1, n]");
  const std::size_t n = samples.size();
  std::vector<double> priorities(2 * n);
  for (double& p : priorities) p = uniform01(rng);
  const std::span<const double> all(priorities);
  const auto t = tau_maximal(samples, all.first(n), tau);
  return run_threshold(values, all.subspan(n), ThresholdRule{t.value, t.priority, k}, ell);
}

inline double alg_max_bound(std::size_t k) {
  return 1.0 - 1.5 * std::exp(-static_cast<double>(k) / 6.0);
}

inline double alg_max_atoms_bound(std::size_t k) {
  return 1.0 - 1.5 * std::exp(-(static_cast<double>(k) - 1.0) / 6.0);
}

// Threshold from the distribution of the maximum: Pr[max < T] = (2/3)^(k-1),
// then accept the first k values strictly above T. Requires atomless
// components and k >= 2 (k = 1 puts T at the top of the support).
class MaxDistributionSelector {
 public:
  MaxDistributionSelector(const ProductInstance& instance, std::size_t k) : k_(k) {
    if (k < 2) {
      throw Error(ErrorKind::kDegenerateThreshold,
                  "k = 1 puts the threshold at the essential supremum");
    }
    if (!instance.atomless()) {
      throw Error(ErrorKind::kUseAtomsVariant,
                  "instance has point masses; use the mass-point variant");
    }
    threshold_ = max_quantile(instance, std::pow(2.0 / 3.0, static_cast<double>(k - 1)));
  }

  double threshold() const noexcept { return threshold_; }
  std::size_t capacity() const noexcept { return k_; }

  SelectionOutcome operator()(std::span<const double> values, std::size_t ell) const {
    return accept_above(values, threshold_, k_, ell);
  }

 private:
  std::size_t k_;
  double threshold_ = 0.0;
};

// Mass-point variant: T = inf{t : Pr[max <= t] >= (2/3)^(k-2)}; the first
// value >= T is accepted, then the first k-1 values strictly above T.
class MassPointSelector {
 public:
  MassPointSelector(const ProductInstance& instance, std::size_t k) : k_(k) {
    detail::require(k >= 2, ErrorKind::kInvalidArgument, "mass-point variant needs k >= 2");
    threshold_ = max_quantile(instance, std::pow(2.0 / 3.0, static_cast<double>(k - 2)));
  }

  double threshold() const noexcept { return threshold_; }
  std::size_t capacity() const noexcept { return k_; }

  SelectionOutcome operator()(std::span<const double> values, std::size_t ell) const {
    SelectionOutcome out;
    out.threshold_used = threshold_;
    std::size_t i = 0;
    for (; i < values.size(); ++i) {
      if (values[i] >= threshold_) {
        out.accepted.push_back({i, values[i]});
        ++i;
        break;
      }
    }
    for (; i < values.size() && out.accepted.size() < k_; ++i)
      if (values[i] > threshold_) out.accepted.push_back({i, values[i]});
    detail::finish_outcome(out, ell);
    return out;
  }

 private:
  std::size_t k_;
  double threshold_ = 0.0;
};

inline SelectionOutcome alg_max(const ProductInstance& instance, std::span<const double> values,
                                std::size_t k, std::size_t ell) {
  return MaxDistributionSelector(instance, k)(values, ell);
}

inline SelectionOutcome alg_max_atoms(const ProductInstance& instance,
                                      std::span<const double> values, std::size_t k,
                                      std::size_t ell) {
  return MassPointSelector(instance, k)(values, ell);
}

}  // namespace overbook
