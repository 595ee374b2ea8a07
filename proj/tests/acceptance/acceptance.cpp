// Acceptance gate: one line per criterion, exit status 1 if any fails.
//
// Tolerances: exact checks compare against rational fixtures within 1e-12;
// Monte Carlo checks use a 3-standard-error band.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <string>
#include <thread>
#include <vector>

#include "overbook/overbook.hpp"

namespace {

using namespace overbook;
using namespace overbook::harness;

constexpr double kExactTolerance = 1e-12;
constexpr double kSigmas = 3.0;

int failures = 0;

void report(int id, bool ok, const std::string& title, const std::string& detail) {
  std::printf("[%s] C%d %s: %s\n", ok ? "PASS" : "FAIL", id, title.c_str(), detail.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

double factorial(std::size_t m) { return std::tgamma(static_cast<double>(m) + 1.0); }

unsigned jobs() { return std::max(1u, std::thread::hardware_concurrency()); }

ExperimentSpec make(ExperimentKind kind, std::size_t n, std::size_t ell, std::size_t k,
                    std::uint64_t seed) {
  ExperimentSpec s;
  s.kind = kind;
  s.n = n;
  s.ell = ell;
  s.k = k;
  s.trials = 100000;
  s.seed = seed;
  return s;
}

void criterion_1() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto d = hard_prophet_instance(1, 2);
  const double online = optimal_online_dp(d, 1, 1).expected_value;
  const double offline = exact_prophet_benchmark(d, 1);
  const double bound = 1.0 - 1.0 / factorial(4);
  const double secs = seconds_since(t0);
  const bool ok = std::abs(online - 1.5) <= kExactTolerance &&
                  std::abs(offline - 5.0 / 3.0) <= kExactTolerance &&
                  online / offline <= bound && secs < 1.0;
  report(1, ok, "hard instance k=1",
         fmt("dp=%.15g (1.5) benchmark=%.15g (5/3) ratio=%.15g <= %.6f, %.3fs", online, offline,
             online / offline, bound, secs));
}

void criterion_2() {
  const auto t0 = std::chrono::steady_clock::now();
  // Exact rationals from an independent enumeration oracle.
  struct Fixture {
    std::size_t k;
    double online, offline;
  };
  bool ok = true;
  std::string detail;
  for (const auto& f : {Fixture{2, 44.0 / 15.0, 89.0 / 30.0}, Fixture{3, 1007.0 / 252.0, 2519.0 / 630.0}}) {
    const auto d = hard_prophet_instance(f.k, f.k + 1);
    const double online = optimal_online_dp(d, f.k, f.k).expected_value;
    const double offline = exact_prophet_benchmark(d, f.k);
    const double bound = 1.0 - 1.0 / factorial(2 * f.k + 2);
    ok = ok && std::abs(online - f.online) <= kExactTolerance &&
         std::abs(offline - f.offline) <= kExactTolerance && online / offline <= bound;
    detail += fmt("k=%zu ratio=%.9f <= %.9f; ", f.k, online / offline, bound);
  }
  const double secs = seconds_since(t0);
  ok = ok && secs < 10.0;
  report(2, ok, "hard instance k=2,3", detail + fmt("%.3fs", secs));
}

void criterion_3() {
  auto s = make(ExperimentKind::kProphetTau, 400, 2, 200, 3);
  s.distribution = ValueDistribution::exponential(1.0);
  s.tau = 101;
  const auto r = run_experiment(s, {jobs()});
  const bool ok = r.ratio_estimate >= r.theoretical_bound - kSigmas * r.std_error &&
                  r.elapsed_seconds < 300.0;
  report(3, ok, "alg_tau n=400 exp(1) l=2 k=200 tau=101",
         fmt("ratio=%.6f se=%.2e bound=%.6f, %.1fs", r.ratio_estimate, r.std_error,
             r.theoretical_bound, r.elapsed_seconds));
}

void criterion_4() {
  auto s = make(ExperimentKind::kProphetMax, 100, 1, 12, 4);
  s.distribution = ValueDistribution::uniform(0.0, 1.0);
  const auto r = run_experiment(s, {jobs()});
  auto a = make(ExperimentKind::kProphetMax, 100, 1, 13, 41);
  a.distribution = ValueDistribution::finite_support({{0.0, 0.5}, {1.0, 0.25}, {2.0, 0.25}});
  a.algorithm = "alg_max_atoms";
  const auto ra = run_experiment(a, {jobs()});
  const bool ok = r.ratio_estimate >= r.theoretical_bound - kSigmas * r.std_error &&
                  ra.ratio_estimate >= ra.theoretical_bound - kSigmas * ra.std_error &&
                  r.elapsed_seconds < 60.0 && ra.elapsed_seconds < 60.0;
  report(4, ok, "alg_max n=100 U[0,1] k=12 / mass-point k=13",
         fmt("ratio=%.6f se=%.2e bound=%.6f, %.1fs; atoms ratio=%.6f se=%.2e bound=%.6f, %.1fs",
             r.ratio_estimate, r.std_error, r.theoretical_bound, r.elapsed_seconds,
             ra.ratio_estimate, ra.std_error, ra.theoretical_bound, ra.elapsed_seconds));
}

ExperimentReport secretary_run() {
  auto s = make(ExperimentKind::kSecretary, 2000, 2, 40, 5);
  s.values = ValueSet{ValueSet::Kind::kGeometric, {}, 2.0, {}};
  return run_experiment(s, {jobs()});
}

void criteria_5_6() {
  const auto r = secretary_run();
  const bool ok5 = r.ratio_estimate >= r.theoretical_bound - kSigmas * r.std_error &&
                   r.elapsed_seconds < 300.0;
  report(5, ok5, "secretary n=2000 l=2 k=40 geometric",
         fmt("s=%.4f ratio=%.6f se=%.2e bound=%.6f, %.1fs", r.metrics.at("slack_s"),
             r.ratio_estimate, r.std_error, r.theoretical_bound, r.elapsed_seconds));
  const double p = r.metrics.at("p_capped_differs");
  const double se = r.metrics.at("p_capped_differs_stderr");
  const double bound = r.metrics.at("p_capped_differs_bound");
  report(6, p <= bound + kSigmas * se, "capped vs uncapped differ",
         fmt("Pr=%.6f se=%.2e bound e^{-k/6}=%.6f", p, se, bound));
}

void criterion_7() {
  const auto t0 = std::chrono::steady_clock::now();
  bool ok = true;
  double worst_gap = 1.0;
  for (std::size_t n = 1; n <= 12; ++n) {
    for (std::size_t k = 1; k <= 3; ++k) {
      const double p = secretary_max_prob_dp(n, k);
      const double bound =
          (1.0 + 1.0 / static_cast<double>(n)) * (1.0 - std::exp(-static_cast<double>(k)));
      ok = ok && p <= bound;
      worst_gap = std::min(worst_gap, bound - p);
    }
  }
  const double secs = seconds_since(t0);
  report(7, ok && secs < 1.0, "secretary upper bound n<=12 k<=3",
         fmt("smallest slack %.6f, %.4fs", worst_gap, secs));
}

void criterion_8() {
  auto s = make(ExperimentKind::kMechanismWelfare, 100, 1, 12, 8);
  s.distribution = ValueDistribution::uniform(0.0, 1.0);
  s.source = "alg_max";
  const auto r = run_experiment(s, {jobs()});
  const double mismatches = r.metrics.at("trace_mismatches");
  const bool ok =
      r.ratio_estimate >= alg_max_bound(12) - kSigmas * r.std_error && mismatches == 0.0;
  report(8, ok, "mechanism welfare alg_max n=100 k=12",
         fmt("ratio=%.6f se=%.2e bound=%.6f trace mismatches=%.0f", r.ratio_estimate,
             r.std_error, alg_max_bound(12), mismatches));
}

void criterion_9() {
  auto s = make(ExperimentKind::kMechanismRevenue, 20, 2, 16, 9);
  s.distribution = ValueDistribution::uniform(0.0, 1.0);
  s.source = "alg_tau";
  const auto r = run_experiment(s, {jobs()});
  const double rho = r.theoretical_bound;
  const double rev = r.metrics.at("revenue_mean"), rev_se = r.metrics.at("revenue_stderr");
  const double opt = r.metrics.at("optimal_revenue_mean");
  const double opt_se = r.metrics.at("optimal_revenue_stderr");
  const double vs = r.metrics.at("virtual_surplus_mean");
  const double vs_se = r.metrics.at("virtual_surplus_stderr");
  const double band_ratio = kSigmas * std::hypot(rev_se, rho * opt_se);
  const double band_myerson = kSigmas * std::hypot(rev_se, vs_se);
  const bool ok_ratio = rev >= rho * opt - band_ratio;
  const bool ok_myerson = std::abs(rev - vs) <= band_myerson;
  report(9, ok_ratio && ok_myerson, "mechanism revenue n=20 l=2 k=16",
         fmt("revenue=%.6f optimal=%.6f rho=%.4f%s; |revenue-virtual surplus|=%.2e <= %.2e",
             rev, opt, rho, r.bound_vacuous ? " (vacuous)" : "", std::abs(rev - vs),
             band_myerson));
}

void criterion_10() {
  const std::size_t profiles = 1000, n = 20, ell = 2, k = 16, points = 50;
  const auto prior = ValueDistribution::uniform(0.0, 1.0);
  const auto d = ProductInstance::iid(prior, n);
  std::vector<double> grid(points);
  for (std::size_t i = 0; i < points; ++i)
    grid[i] = 1.2 * static_cast<double>(i) / static_cast<double>(points - 1);
  std::size_t violations = 0, checks = 0;
  for (std::size_t p = 0; p < profiles; ++p) {
    Rng rng = trial_rng(10, p);
    const ThresholdParams params{n, k, default_tau(ell, k)};
    MechanismConfig welfare;
    welfare.ell = ell;
    welfare.k = k;
    welfare.threshold = welfare_threshold(d, ThresholdSource::kSampleTau, params, rng);
    MechanismConfig revenue = welfare;
    revenue.mode = MechanismMode::kRevenue;
    revenue.prior = prior;
    revenue.threshold = revenue_threshold(prior, ThresholdSource::kSampleTau, params, rng);
    const auto v = d.sample(rng);
    for (const auto* cfg : {&welfare, &revenue}) {
      for (std::size_t a = 0; a < n; ++a) {
        ++checks;
        violations += deviation_test(*cfg, v, a, grid) ? 0 : 1;
      }
    }
  }
  report(10, violations == 0, "truthfulness sweep",
         fmt("%zu agent checks x %zu bids, %zu violations", checks, points, violations));
}

void criterion_11() {
  std::vector<ExperimentSpec> specs;
  auto a = make(ExperimentKind::kProphetTau, 100, 2, 40, 11);
  a.distribution = ValueDistribution::exponential(1.0);
  a.trials = 5000;
  auto b = make(ExperimentKind::kSecretary, 300, 1, 12, 11);
  b.values = ValueSet{ValueSet::Kind::kGeometric, {}, 1.5, {}};
  b.trials = 5000;
  auto c = make(ExperimentKind::kMechanismRevenue, 20, 2, 16, 11);
  c.distribution = ValueDistribution::uniform(0.0, 1.0);
  c.trials = 5000;
  specs = {a, b, c};
  const auto render_all = [&](unsigned workers) {
    std::vector<ExperimentReport> reports;
    for (const auto& s : specs) reports.push_back(run_experiment(s, {workers}));
    return render_csv(reports);
  };
  const std::string first = render_all(1);
  const std::string second = render_all(1);
  const std::string parallel = render_all(4);
  report(11, first == second && first == parallel, "bit-identical CSV for a fixed seed",
         fmt("sequential runs %s, 4 workers %s", first == second ? "match" : "DIFFER",
             first == parallel ? "match" : "DIFFER"));
}

}  // namespace

int main() {
  std::printf("acceptance: %u worker thread(s)\n", jobs());
  criterion_1();
  criterion_2();
  criterion_3();
  criterion_4();
  criteria_5_6();
  criterion_7();
  criterion_8();
  criterion_9();
  criterion_10();
  criterion_11();
  std::printf("%d criterion check(s) failed\n", failures);
  return failures == 0 ? 0 : 1;
}
