#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "overbook/json_io.hpp"
#include "overbook/mechanisms.hpp"

using namespace overbook;

namespace {

MechanismConfig welfare_config(std::size_t ell, std::size_t k, double t) {
  MechanismConfig c;
  c.ell = ell;
  c.k = k;
  c.threshold = t;
  return c;
}

std::vector<double> deviation_grid(double hi, std::size_t points) {
  std::vector<double> g(points);
  for (std::size_t i = 0; i < points; ++i)
    g[i] = hi * static_cast<double>(i) / static_cast<double>(points - 1);
  return g;
}

// Revenue threshold computed in virtual space for uniform[0, 1]: find the
// (2/3)^(k-1) quantile of the max of n i.i.d. copies of max(phi(v), 0) by
// bisection, then map it back through phi^-1(y) = (y + 1) / 2.
double uniform_virtual_space_threshold(std::size_t n, std::size_t k) {
  const double q = std::pow(2.0 / 3.0, static_cast<double>(k - 1));
  // Pr[max(phi, 0) <= y] = (1 + y) / 2 on [0, 1].
  const auto cdf_max = [&](double y) { return std::pow((1.0 + y) / 2.0, static_cast<double>(n)); };
  if (cdf_max(0.0) >= q) return 0.5;
  double lo = 0.0, hi = 1.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (cdf_max(mid) >= q ? hi : lo) = mid;
  }
  return (hi + 1.0) / 2.0;
}

}  // namespace

TEST(TwoPhase, OverbookingTrace) {
  const std::vector<double> v{6, 2, 4, 9};
  const auto o = run_two_phase(v, welfare_config(1, 2, 3.0));
  EXPECT_EQ(o.ticket_holders, (std::vector<std::size_t>{0, 2}));
  EXPECT_EQ(o.winners, (std::vector<std::size_t>{0}));
  EXPECT_EQ(o.payments, (std::vector<double>{4.0}));
  EXPECT_FALSE(o.wins(3));
  EXPECT_EQ(o.welfare, 6.0);
  EXPECT_EQ(o.revenue, 4.0);
}

TEST(TwoPhase, NobodyAboveReserve) {
  const std::vector<double> v{1, 2, 3};
  const auto o = run_two_phase(v, welfare_config(1, 2, 3.0));
  EXPECT_TRUE(o.ticket_holders.empty());
  EXPECT_TRUE(o.winners.empty());
  EXPECT_EQ(o.revenue, 0.0);
  EXPECT_EQ(o.welfare, 0.0);
}

TEST(TwoPhase, UniformPriceIsNextHighest) {
  const std::vector<double> v{10, 9, 8};
  const auto o = run_two_phase(v, welfare_config(2, 3, 1.0));
  EXPECT_EQ(o.winners, (std::vector<std::size_t>{0, 1}));
  EXPECT_EQ(o.payments, (std::vector<double>{8.0, 8.0}));
  EXPECT_EQ(o.revenue, 16.0);
}

TEST(TwoPhase, ReserveWhenFewHolders) {
  const std::vector<double> v{0.2, 0.9, 0.1};
  const auto o = run_two_phase(v, welfare_config(2, 3, 0.5));
  EXPECT_EQ(o.winners, (std::vector<std::size_t>{1}));
  EXPECT_EQ(o.payment_of(1), 0.5);
}

TEST(TwoPhase, WelfareTracesThresholdAlgorithm) {
  Rng rng(21);
  for (int t = 0; t < 3000; ++t) {
    const std::size_t n = 1 + rng() % 30;
    std::vector<double> v(n);
    for (auto& x : v) x = uniform01(rng);
    const std::size_t ell = 1 + rng() % 4, k = ell + rng() % 6;
    const double thr = uniform01(rng);
    const auto o = run_two_phase(v, welfare_config(ell, k, thr));
    EXPECT_EQ(o.welfare, accept_above(v, thr, k, ell).ell_value);
  }
}

TEST(TwoPhase, IndividuallyRational) {
  Rng rng(22);
  for (int t = 0; t < 2000; ++t) {
    std::vector<double> v(1 + rng() % 20);
    for (auto& x : v) x = static_cast<double>(rng() % 10);  // ties
    const std::size_t ell = 1 + rng() % 3, k = ell + rng() % 5;
    const double thr = static_cast<double>(rng() % 6);
    const auto o = run_two_phase(v, welfare_config(ell, k, thr));
    ASSERT_LE(o.ticket_holders.size(), k);
    ASSERT_LE(o.winners.size(), ell);
    for (std::size_t j = 0; j < o.winners.size(); ++j) {
      EXPECT_LE(o.payments[j], v[o.winners[j]]);
      EXPECT_GE(o.payments[j], thr);
    }
  }
}

TEST(SimulateProfile, ReportsProfileIndices) {
  AuctionProfile p{{6, 2, 4, 9}, {3, 0, 1, 2}};
  const auto o = simulate_profile(p, welfare_config(1, 2, 3.0));
  // Arrival order 9, 6, 2, 4: tickets go to agents 3 and 0.
  EXPECT_EQ(o.ticket_holders, (std::vector<std::size_t>{3, 0}));
  EXPECT_EQ(o.winners, (std::vector<std::size_t>{3}));
  EXPECT_EQ(o.payment_of(3), 6.0);
  p.order = {0, 0, 1, 2};
  EXPECT_THROW(simulate_profile(p, welfare_config(1, 2, 3.0)), Error);
}

TEST(WelfareThreshold, Sources) {
  Rng rng(1);
  const auto u = ProductInstance::iid(ValueDistribution::uniform(0.0, 1.0), 2);
  EXPECT_NEAR(welfare_threshold(u, ThresholdSource::kMaxDistribution, {2, 2, 1}, rng),
              std::sqrt(2.0 / 3.0), 1e-12);
  const auto fives = ProductInstance::iid(ValueDistribution::degenerate(5.0), 4);
  EXPECT_EQ(welfare_threshold(fives, ThresholdSource::kSampleTau, {4, 3, 3}, rng), 5.0);
}

TEST(RevenueThreshold, AgreesWithVirtualSpaceRoute) {
  Rng rng(2);
  const auto u = ValueDistribution::uniform(0.0, 1.0);
  EXPECT_NEAR(revenue_threshold(u, ThresholdSource::kMaxDistribution, {2, 2, 1}, rng),
              std::sqrt(2.0 / 3.0), 1e-12);
  for (std::size_t n : {1u, 2u, 5u, 20u, 100u})
    for (std::size_t k : {2u, 3u, 6u, 12u, 30u})
      EXPECT_NEAR(revenue_threshold(u, ThresholdSource::kMaxDistribution, {n, k, 1}, rng),
                  uniform_virtual_space_threshold(n, k), 1e-12)
          << "n=" << n << " k=" << k;
}

TEST(RevenueThreshold, MonopolyFloor) {
  const auto u = ValueDistribution::uniform(0.0, 1.0);
  // tau = n picks the lowest of 20 uniform samples, which is below 1/2
  // except with probability 2^-20.
  Rng rng(3);
  EXPECT_DOUBLE_EQ(revenue_threshold(u, ThresholdSource::kSampleTau, {20, 16, 20}, rng), 0.5);
  for (int i = 0; i < 50; ++i) {
    EXPECT_GE(revenue_threshold(ValueDistribution::exponential(1.0), ThresholdSource::kSampleTau,
                                {10, 4, 5}, rng),
              1.0 - 1e-12);
  }
}

TEST(RevenueMode, NeedsARegularPriorWithDensity) {
  MechanismConfig c = welfare_config(1, 2, 0.5);
  c.mode = MechanismMode::kRevenue;
  EXPECT_THROW(c.validate(), Error);
  c.prior = ValueDistribution::degenerate(1.0);
  EXPECT_THROW(c.validate(), Error);
  c.prior = ValueDistribution::uniform(0.0, 1.0);
  EXPECT_NO_THROW(c.validate());
}

TEST(Truthfulness, TruthfulReportInGrid) {
  const std::vector<double> v{0.3, 0.7, 0.9, 0.1};
  const auto c = welfare_config(1, 2, 0.25);
  std::vector<double> grid = deviation_grid(1.0, 11);
  for (std::size_t a = 0; a < v.size(); ++a) {
    auto g = grid;
    g.push_back(v[a]);
    EXPECT_TRUE(deviation_test(c, v, a, g));
  }
}

TEST(Truthfulness, LowAgentCannotGainByOverbidding) {
  const std::vector<double> v{0.2, 0.8, 0.6};
  const auto c = welfare_config(1, 3, 0.5);
  const std::vector<double> grid{0.55, 0.7, 0.9, 1.0, 5.0};
  EXPECT_TRUE(deviation_test(c, v, 0, grid));
}

TEST(Truthfulness, RandomSweepBothModes) {
  Rng rng(4);
  const auto grid = deviation_grid(1.0, 50);
  for (int t = 0; t < 200; ++t) {
    std::vector<double> v(2 + rng() % 10);
    for (auto& x : v) x = uniform01(rng);
    const std::size_t ell = 1 + rng() % 2, k = ell + rng() % 4;
    auto c = welfare_config(ell, k, uniform01(rng));
    for (std::size_t a = 0; a < v.size(); ++a) ASSERT_TRUE(deviation_test(c, v, a, grid));
    c.mode = MechanismMode::kRevenue;
    c.prior = ValueDistribution::uniform(0.0, 1.0);
    c.threshold = std::max(c.threshold, 0.5);
    for (std::size_t a = 0; a < v.size(); ++a) ASSERT_TRUE(deviation_test(c, v, a, grid));
  }
}

TEST(Truthfulness, DetectsAManipulableRule) {
  // A first-price style variant (winners pay their bids) must fail the test,
  // so the sweep above is not vacuous.
  const std::vector<double> v{0.9, 0.3};
  const auto c = welfare_config(1, 2, 0.1);
  const auto first_price_utility = [&](std::span<const double> bids) {
    const auto o = run_two_phase(bids, c);
    return o.wins(0) ? v[0] - bids[0] : 0.0;
  };
  const double truthful = first_price_utility(v);
  std::vector<double> shaded = v;
  shaded[0] = 0.4;
  EXPECT_GT(first_price_utility(shaded), truthful + kTruthfulnessTolerance);
}

TEST(VirtualSurplus, ClosedForms) {
  const auto u = ValueDistribution::uniform(0.0, 1.0);
  const std::vector<double> v{0.9, 0.1, 0.8};
  AuctionOutcome none;
  EXPECT_EQ(myerson_virtual_surplus(u, none, v), 0.0);
  AuctionOutcome two;
  two.winners = {0, 2};
  two.payments = {0.5, 0.5};
  EXPECT_NEAR(myerson_virtual_surplus(u, two, v), 1.4, 1e-15);
  std::vector<double> scratch;
  EXPECT_NEAR(optimal_virtual_surplus(u, v, 2, scratch), 1.4, 1e-15);
  EXPECT_NEAR(optimal_virtual_surplus(u, std::vector<double>{0.1, 0.2}, 2, scratch), 0.0, 0.0);
}

TEST(VirtualSurplus, ExpectedRevenueIdentity) {
  // Myerson: E[revenue] = E[winners' virtual surplus] for a truthful
  // mechanism with reserve at or above the monopoly price.
  const auto u = ValueDistribution::uniform(0.0, 1.0);
  const std::size_t n = 8, trials = 100000;
  MechanismConfig c = welfare_config(2, 4, 0.6);
  c.mode = MechanismMode::kRevenue;
  c.prior = u;
  std::vector<double> rev(trials), vs(trials);
  for (std::size_t t = 0; t < trials; ++t) {
    Rng rng = trial_rng(5, t);
    std::vector<double> v(n);
    for (auto& x : v) x = u.sample(rng);
    const auto o = run_two_phase(v, c);
    rev[t] = o.revenue;
    vs[t] = myerson_virtual_surplus(u, o, v);
  }
  std::vector<double> diff(trials);
  for (std::size_t t = 0; t < trials; ++t) diff[t] = rev[t] - vs[t];
  const auto d = estimate_mean(diff);
  EXPECT_LE(std::abs(d.mean), 3.0 * d.std_error);
}

TEST(AuctionJson, Shape) {
  const std::vector<double> v{10, 9, 8};
  const Json j = auction_to_json(run_two_phase(v, welfare_config(2, 3, 1.0)));
  EXPECT_EQ(j.at("winners").get<std::vector<std::size_t>>(), (std::vector<std::size_t>{0, 1}));
  EXPECT_EQ(j.at("payments").size(), 2u);
  EXPECT_EQ(j.at("revenue").get<double>(), 16.0);
  const auto p = profile_from_json(Json{{"values", {1.0, 2.0}}, {"order", {1, 0}}});
  EXPECT_EQ(p.order, (std::vector<std::size_t>{1, 0}));
}
