#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <optional>
#include <span>
#include <vector>

#include "overbook/distributions.hpp"
#include "overbook/error.hpp"
#include "overbook/offline_oracle.hpp"
#include "overbook/prophet_algs.hpp"
#include "overbook/random.hpp"

namespace overbook {

enum class MechanismMode { kWelfare, kRevenue };

struct MechanismConfig {
  std::size_t ell = 1;
  std::size_t k = 1;
  double threshold = 0.0;
  MechanismMode mode = MechanismMode::kWelfare;
  std::optional<ValueDistribution> prior;  // required in revenue mode

  void validate() const {
    detail::require(ell >= 1 && k >= ell, ErrorKind::kInvalidArgument,
                    "mechanism needs k >= ell >= 1");
    detail::require(std::isfinite(threshold) && threshold >= 0.0,
                    ErrorKind::kInvalidArgument, "threshold must be finite and >= 0");
    if (mode == MechanismMode::kRevenue) {
      detail::require(prior.has_value(), ErrorKind::kInvalidArgument,
                      "revenue mode needs a prior");
      if (!is_regular(*prior)) {
        throw Error(ErrorKind::kRegularityViolation, "revenue mode needs a regular prior");
      }
    }
  }
};

// Result of one run. Agent indices are 0-based positions in the value vector
// handed to run_two_phase; `payments[j]` is paid by `winners[j]`.
struct AuctionOutcome {
  std::vector<std::size_t> ticket_holders;  // in issue order
  std::vector<std::size_t> winners;         // descending value
  std::vector<double> payments;
  double welfare = 0.0;
  double revenue = 0.0;

  bool wins(std::size_t agent) const {
    return std::find(winners.begin(), winners.end(), agent) != winners.end();
  }
  double payment_of(std::size_t agent) const {
    for (std::size_t j = 0; j < winners.size(); ++j)
      if (winners[j] == agent) return payments[j];
    return 0.0;
  }
};

// Phase 1 issues up to k tickets, in arrival order, to agents whose value
// exceeds T (an agent at exactly T declines). Phase 2 sells ell items to the
// ell highest ticket holders (lower index wins ties); each winner pays
// max(T, (ell+1)-highest ticket-holder value), or T when there are at most
// ell ticket holders.
inline AuctionOutcome run_two_phase(std::span<const double> values,
                                    const MechanismConfig& config) {
  detail::require(config.ell >= 1 && config.k >= config.ell, ErrorKind::kInvalidArgument,
                  "mechanism needs k >= ell >= 1");
  AuctionOutcome out;
  const double t = config.threshold;
  for (std::size_t i = 0; i < values.size() && out.ticket_holders.size() < config.k; ++i)
    if (values[i] > t) out.ticket_holders.push_back(i);

  std::vector<std::size_t> ranked = out.ticket_holders;
  std::sort(ranked.begin(), ranked.end(), [&](std::size_t a, std::size_t b) {
    if (values[a] != values[b]) return values[a] > values[b];
    return a < b;
  });
  const std::size_t m = std::min(config.ell, ranked.size());
  const double price = ranked.size() > config.ell ? std::max(t, values[ranked[config.ell]]) : t;
  out.winners.assign(ranked.begin(), ranked.begin() + static_cast<std::ptrdiff_t>(m));
  out.payments.assign(m, price);
  for (std::size_t w : out.winners) out.welfare += values[w];
  for (double p : out.payments) out.revenue += p;
  return out;
}

// Profile with an explicit arrival order: order[j] is the agent arriving j-th.
struct AuctionProfile {
  std::vector<double> values;
  std::vector<std::size_t> order;
};

// Runs the mechanism on a profile and reports agents by their profile index.
inline AuctionOutcome simulate_profile(const AuctionProfile& profile,
                                       const MechanismConfig& config) {
  std::vector<std::size_t> order = profile.order;
  if (order.empty()) {
    order.resize(profile.values.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
  }
  detail::require(order.size() == profile.values.size(), ErrorKind::kInvalidArgument,
                  "order must be a permutation of the agents");
  std::vector<bool> seen(order.size(), false);
  for (std::size_t a : order) {
    detail::require(a < order.size() && !seen[a], ErrorKind::kInvalidArgument,
                    "order must be a permutation of the agents");
    seen[a] = true;
  }
  std::vector<double> arrival(order.size());
  for (std::size_t j = 0; j < order.size(); ++j) arrival[j] = profile.values[order[j]];
  AuctionOutcome out = run_two_phase(arrival, config);
  for (auto& i : out.ticket_holders) i = order[i];
  for (auto& i : out.winners) i = order[i];
  return out;
}

enum class ThresholdSource { kSampleTau, kMaxDistribution };

struct ThresholdParams {
  std::size_t n = 1;    // number of agents (revenue mode uses F^n)
  std::size_t k = 2;
  std::size_t tau = 1;  // sample source only
};

// Welfare threshold of the generating single-threshold algorithm: the
// tau-highest entry of a fresh sample from D, or the (2/3)^(k-1) quantile of
// the maximum.
inline double welfare_threshold(const ProductInstance& instance, ThresholdSource source,
                                const ThresholdParams& params, Rng& rng) {
  if (source == ThresholdSource::kMaxDistribution)
    return MaxDistributionSelector(instance, params.k).threshold();
  detail::require(params.tau >= 1 && params.tau <= instance.size(), ErrorKind::kOutOfRange,
                  "tau must lie in [1, n]");
  std::vector<double> s = instance.sample(rng);
  auto nth = s.begin() + static_cast<std::ptrdiff_t>(params.tau - 1);
  std::nth_element(s.begin(), nth, s.end(), std::greater<>());
  return *nth;
}

// Revenue threshold for i.i.d. regular agents, computed in value space:
// max(monopoly price, source threshold on F^n). Because the virtual valuation
// is nondecreasing, this equals mapping the source threshold computed on
// max(virtual value, 0) back through the inverse virtual valuation.
inline double revenue_threshold(const ValueDistribution& prior, ThresholdSource source,
                                const ThresholdParams& params, Rng& rng) {
  const double reserve = monopoly_price(prior);
  const ProductInstance instance = ProductInstance::iid(prior, params.n);
  return std::max(reserve, welfare_threshold(instance, source, params, rng));
}

inline double agent_utility(double value, const AuctionOutcome& outcome, std::size_t agent) {
  return outcome.wins(agent) ? value - outcome.payment_of(agent) : 0.0;
}

inline constexpr double kTruthfulnessTolerance = 1e-9;

// True iff reporting truthfully is at least as good (up to 1e-9) for `agent`
// as every report on the grid, with everyone else truthful and the arrival
// order fixed. Quasilinear utilities; losers pay nothing.
inline bool deviation_test(const MechanismConfig& config, std::span<const double> profile,
                           std::size_t agent, std::span<const double> deviation_grid) {
  detail::require(agent < profile.size(), ErrorKind::kOutOfRange, "agent out of range");
  const double value = profile[agent];
  const double truthful = agent_utility(value, run_two_phase(profile, config), agent);
  std::vector<double> reports(profile.begin(), profile.end());
  for (double bid : deviation_grid) {
    reports[agent] = bid;
    const double u = agent_utility(value, run_two_phase(reports, config), agent);
    if (u > truthful + kTruthfulnessTolerance) return false;
  }
  return true;
}

// Sum of the winners' virtual valuations under the prior.
inline double myerson_virtual_surplus(const ValueDistribution& prior,
                                      const AuctionOutcome& outcome,
                                      std::span<const double> profile) {
  double s = 0.0;
  for (std::size_t w : outcome.winners) s += virtual_value(prior, profile[w]);
  return s;
}

// Optimal expected revenue integrand: the top-ell positive virtual values.
inline double optimal_virtual_surplus(const ValueDistribution& prior,
                                      std::span<const double> profile, std::size_t ell,
                                      std::vector<double>& scratch) {
  std::vector<double> phi(profile.size());
  for (std::size_t i = 0; i < profile.size(); ++i)
    phi[i] = std::max(0.0, virtual_value(prior, profile[i]));
  return top_ell_value(phi, ell, scratch);
}

}  // namespace overbook
