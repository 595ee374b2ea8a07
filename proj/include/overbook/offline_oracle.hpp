#pragma once

#include <algorithm>
#include <cmath>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <numeric>
#include <span>
#include <vector>

#include "overbook/distributions.hpp"
#include "overbook/error.hpp"
#include "overbook/stats.hpp"
#include "overbook/trials.hpp"

namespace overbook {

struct TopEllResult {
  std::vector<std::size_t> indices;  // ascending
  double value = 0.0;
};

namespace detail {

// Sum of the ell largest entries, added in descending order. top_ell() adds
// the same values in the same order, so both produce identical bits.
inline double descending_prefix_sum(std::span<const double> sorted_desc) {
  double s = 0.0;
  for (double x : sorted_desc) s += x;
  return s;
}

}  // namespace detail

// Best subset of min(ell, n) entries; among equal values the lower index wins.
inline TopEllResult top_ell(std::span<const double> values, std::size_t ell) {
  const std::size_t m = std::min(ell, values.size());
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(m), order.end(),
                    [&](std::size_t a, std::size_t b) {
                      if (values[a] != values[b]) return values[a] > values[b];
                      return a < b;
                    });
  TopEllResult out;
  out.indices.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(m));
  std::sort(out.indices.begin(), out.indices.end());
  std::vector<double> chosen(m);
  for (std::size_t j = 0; j < m; ++j) chosen[j] = values[order[j]];
  out.value = detail::descending_prefix_sum(chosen);
  return out;
}

// Value-only variant for hot loops; `scratch` is resized as needed.
inline double top_ell_value(std::span<const double> values, std::size_t ell,
                            std::vector<double>& scratch) {
  const std::size_t m = std::min(ell, values.size());
  scratch.resize(m);
  std::partial_sort_copy(values.begin(), values.end(), scratch.begin(), scratch.end(),
                         std::greater<>());
  return detail::descending_prefix_sum(scratch);
}

inline double top_ell_value(std::span<const double> values, std::size_t ell) {
  std::vector<double> scratch;
  return top_ell_value(values, ell, scratch);
}

// Monte Carlo estimate of E[TOP_ell(v)], v ~ D. Trial t draws from
// derive_seed(seed, t), so the estimate is independent of `jobs`.
inline MeanEstimate prophet_benchmark_mc(const ProductInstance& instance, std::size_t ell,
                                         std::size_t trials, std::uint64_t seed,
                                         unsigned jobs = 1) {
  detail::require(trials >= 1, ErrorKind::kInvalidArgument, "trials must be >= 1");
  detail::require(ell >= 1, ErrorKind::kInvalidArgument, "ell must be >= 1");
  struct Trial {
    const ProductInstance* d;
    std::size_t ell;
    std::vector<double> v, scratch;
    double operator()(std::size_t, Rng& rng) {
      v.resize(d->size());
      d->sample_into(v, rng);
      return top_ell_value(v, ell, scratch);
    }
  };
  const auto xs = run_trials(trials, seed, jobs, Trial{&instance, ell, {}, {}});
  return estimate_mean(xs);
}

inline constexpr std::size_t kOracleStateLimit = 10'000'000;

// E[TOP_ell(v)] by enumerating every outcome of a finite-support instance.
inline double exact_prophet_benchmark(const ProductInstance& instance, std::size_t ell) {
  const auto count = instance.outcome_count();
  detail::require(count.has_value(), ErrorKind::kInvalidArgument,
                  "exact benchmark needs finite-support components");
  if (*count > kOracleStateLimit) {
    throw Error(ErrorKind::kStateSpaceTooLarge,
                "instance has more than 1e7 joint outcomes");
  }
  const std::size_t n = instance.size();
  std::vector<double> v(n);
  std::vector<double> scratch;
  double total = 0.0;
  std::function<void(std::size_t, double)> rec = [&](std::size_t i, double p) {
    if (i == n) {
      total += p * top_ell_value(v, ell, scratch);
      return;
    }
    for (const Atom& a : instance[i].atoms()) {
      v[i] = a.value;
      rec(i + 1, p * a.probability);
    }
  };
  rec(0, 1.0);
  return total;
}

// Position in the arrival sequence, number accepted so far, and the accepted
// multiset truncated to its ell largest values (sorted descending). Only the
// top ell accepted values can influence the objective, so this is sufficient.
struct DpState {
  std::size_t position = 0;
  std::size_t accepted = 0;
  std::vector<double> top;

  friend auto operator<=>(const DpState&, const DpState&) = default;
  friend bool operator==(const DpState&, const DpState&) = default;
};

enum class Decision : std::uint8_t { kReject, kAccept };

struct DpPolicyValue {
  double expected_value = 0.0;
  // Decision per atom of component `position`, aligned with its atoms().
  // States with no remaining capacity are omitted (only rejection is possible).
  std::map<DpState, std::vector<Decision>> policy;

  const std::vector<Decision>* find(const DpState& s) const {
    auto it = policy.find(s);
    return it == policy.end() ? nullptr : &it->second;
  }
};

// Exact value of the best online policy that accepts at most k awards, scored
// on the top ell accepted ones. Backward induction over reachable states;
// equal continuation values are resolved toward acceptance.
inline DpPolicyValue optimal_online_dp(const ProductInstance& instance, std::size_t ell,
                                       std::size_t k) {
  detail::require(instance.finite_support(), ErrorKind::kInvalidArgument,
                  "online DP needs finite-support components");
  detail::require(ell >= 1 && k >= 1, ErrorKind::kInvalidArgument, "ell and k must be >= 1");
  const std::size_t n = instance.size();
  DpPolicyValue out;
  std::map<DpState, double> memo;

  auto insert_top = [ell](std::vector<double> top, double x) {
    auto pos = std::upper_bound(top.begin(), top.end(), x, std::greater<>());
    top.insert(pos, x);
    if (top.size() > ell) top.pop_back();
    return top;
  };

  std::function<double(const DpState&)> value = [&](const DpState& s) -> double {
    if (s.position == n || s.accepted == k) return detail::descending_prefix_sum(s.top);
    if (auto it = memo.find(s); it != memo.end()) return it->second;
    if (memo.size() >= kOracleStateLimit) {
      throw Error(ErrorKind::kStateSpaceTooLarge, "online DP exceeded 1e7 states");
    }
    const auto atoms = instance[s.position].atoms();
    const DpState skip{s.position + 1, s.accepted, s.top};
    const double skip_value = value(skip);
    std::vector<Decision> decisions(atoms.size(), Decision::kReject);
    double ev = 0.0;
    for (std::size_t a = 0; a < atoms.size(); ++a) {
      const DpState take{s.position + 1, s.accepted + 1, insert_top(s.top, atoms[a].value)};
      const double take_value = value(take);
      if (take_value >= skip_value) {
        decisions[a] = Decision::kAccept;
        ev += atoms[a].probability * take_value;
      } else {
        ev += atoms[a].probability * skip_value;
      }
    }
    memo.emplace(s, ev);
    out.policy.emplace(s, std::move(decisions));
    return ev;
  };

  out.expected_value = value(DpState{});
  return out;
}

// Maximum probability of selecting the overall maximum of n values in uniformly
// random order with at most k acceptances.
//
// W(i, b) is the best success probability from positions i+1..n with budget b.
// Record indicators are independent, position j is a record w.p. 1/j, and a
// record at j is the overall maximum w.p. j/n, so
//   W(i, b) = 1/(i+1) * max((i+1)/n + W(i+1, b-1), W(i+1, b))
//           + i/(i+1) * W(i+1, b),
// with W(n, .) = W(., 0) = 0. Writing W(i, b) = (1 - i/n) g(i, b) gives the
// conditional form where accepting yields (i+1)/n + (1 - (i+1)/n) g(i+1, b-1).
inline double secretary_max_prob_dp(std::size_t n, std::size_t k) {
  detail::require(n >= 1, ErrorKind::kInvalidArgument, "n must be >= 1");
  const std::size_t budget = std::min(k, n);
  std::vector<double> next(budget + 1, 0.0);
  std::vector<double> cur(budget + 1, 0.0);
  const double nd = static_cast<double>(n);
  for (std::size_t i = n; i-- > 0;) {
    const double pos = static_cast<double>(i + 1);
    cur[0] = 0.0;
    for (std::size_t b = 1; b <= budget; ++b) {
      const double accept = pos / nd + next[b - 1];
      const double skip = next[b];
      cur[b] = (std::max(accept, skip) + (pos - 1.0) * skip) / pos;
    }
    std::swap(cur, next);
  }
  return next[budget];
}

}  // namespace overbook
