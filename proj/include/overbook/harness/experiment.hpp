#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <map>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "overbook/distributions.hpp"
#include "overbook/harness/spec.hpp"
#include "overbook/mechanisms.hpp"
#include "overbook/offline_oracle.hpp"
#include "overbook/prophet_algs.hpp"
#include "overbook/random.hpp"
#include "overbook/secretary_algs.hpp"
#include "overbook/stats.hpp"
#include "overbook/trials.hpp"

namespace overbook::harness {

inline constexpr double kConfidenceSigmas = 3.0;

struct ExperimentReport {
  ExperimentSpec spec;
  std::string algorithm;
  std::optional<std::size_t> tau;  // effective tau, when the algorithm has one
  double ratio_estimate = 0.0;
  double std_error = 0.0;
  double theoretical_bound = 0.0;
  bool bound_vacuous = false;
  bool upper_bound = false;  // estimate must not exceed the bound
  bool pass = false;
  double elapsed_seconds = 0.0;
  std::string seed_rule = kSeedDerivationRule;
  std::map<std::string, double> metrics;
  std::vector<std::string> notes;
};

struct RunOptions {
  unsigned jobs = 1;
};

inline bool passes(const ExperimentReport& r) {
  if (r.upper_bound) return r.ratio_estimate <= r.theoretical_bound;
  return r.ratio_estimate + kConfidenceSigmas * r.std_error >= r.theoretical_bound;
}

inline ProductInstance resolve_instance(const ExperimentSpec& spec) {
  if (spec.instance) return *spec.instance;
  return ProductInstance::iid(*spec.distribution, spec.n);
}

namespace detail {

struct PairedRow {
  double alg = 0.0;
  double bench = 0.0;
};

inline std::optional<double> exact_benchmark_if_feasible(const ProductInstance& d,
                                                         std::size_t ell) {
  const auto count = d.outcome_count();
  if (!count || *count > kOracleStateLimit) return std::nullopt;
  return exact_prophet_benchmark(d, ell);
}

// Ratio against the exact benchmark when it is computable, otherwise the
// paired ratio of means against the per-trial offline optimum.
inline void fill_ratio(ExperimentReport& r, const std::vector<PairedRow>& rows,
                       std::optional<double> exact) {
  std::vector<double> a(rows.size()), b(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    a[i] = rows[i].alg;
    b[i] = rows[i].bench;
  }
  if (exact) {
    const auto m = estimate_mean(a);
    r.ratio_estimate = *exact > 0.0 ? m.mean / *exact : 0.0;
    r.std_error = *exact > 0.0 ? m.std_error / *exact : 0.0;
    r.metrics["benchmark_exact"] = *exact;
    r.metrics["algorithm_mean"] = m.mean;
  } else {
    const auto est = estimate_ratio(a, b);
    r.ratio_estimate = est.ratio;
    r.std_error = est.std_error;
    r.metrics["benchmark_mc"] = est.denominator_mean;
    r.metrics["algorithm_mean"] = est.numerator_mean;
  }
}

inline double factorial(std::size_t m) { return std::tgamma(static_cast<double>(m) + 1.0); }

inline void run_prophet_tau(const ExperimentSpec& spec, const RunOptions& opt,
                            ExperimentReport& r) {
  const ProductInstance d = resolve_instance(spec);
  const std::size_t tau = spec.tau.value_or(default_tau(spec.ell, spec.k));
  r.algorithm = "alg_tau";
  r.tau = tau;
  struct Row {
    PairedRow p;
    bool zero_threshold = false;
  };
  struct Trial {
    const ProductInstance* d;
    std::size_t tau, k, ell;
    std::vector<double> s, v, scratch;
    Row operator()(std::size_t, Rng& rng) {
      s.resize(d->size());
      v.resize(d->size());
      d->sample_into(s, rng);
      d->sample_into(v, rng);
      const auto out = alg_tau(s, v, tau, k, ell, rng);
      return {{out.ell_value, top_ell_value(v, ell, scratch)}, out.threshold_used == 0.0};
    }
  };
  const auto rows =
      run_trials(spec.trials, spec.seed, opt.jobs, Trial{&d, tau, spec.k, spec.ell, {}, {}, {}});
  std::vector<PairedRow> paired(rows.size());
  std::size_t zero = 0;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    paired[i] = rows[i].p;
    zero += rows[i].zero_threshold ? 1 : 0;
  }
  fill_ratio(r, paired, exact_benchmark_if_feasible(d, spec.ell));
  r.theoretical_bound = alg_tau_bound(spec.ell, spec.k, tau);
  r.bound_vacuous = r.theoretical_bound <= 0.0;
  r.metrics["zero_threshold_trials"] = static_cast<double>(zero);
  if (zero > 0)
    r.notes.push_back("threshold was 0 in " + std::to_string(zero) +
                      " trials; every positive value clears it");
}

inline void run_prophet_max(const ExperimentSpec& spec, const RunOptions& opt,
                            ExperimentReport& r) {
  const ProductInstance d = resolve_instance(spec);
  const std::string algo = spec.algorithm.value_or(d.atomless() ? "alg_max" : "alg_max_atoms");
  r.algorithm = algo;
  std::vector<PairedRow> rows;
  auto collect = [&](const auto& selector) {
    r.metrics["threshold"] = selector.threshold();
    struct Trial {
      const ProductInstance* d;
      const std::decay_t<decltype(selector)>* sel;
      std::size_t ell;
      std::vector<double> v, scratch;
      PairedRow operator()(std::size_t, Rng& rng) {
        v.resize(d->size());
        d->sample_into(v, rng);
        return {(*sel)(v, ell).ell_value, top_ell_value(v, ell, scratch)};
      }
    };
    rows = run_trials(spec.trials, spec.seed, opt.jobs, Trial{&d, &selector, spec.ell, {}, {}});
  };
  if (algo == "alg_max") {
    collect(MaxDistributionSelector(d, spec.k));
    r.theoretical_bound = alg_max_bound(spec.k);
  } else {
    collect(MassPointSelector(d, spec.k));
    r.theoretical_bound = alg_max_atoms_bound(spec.k);
  }
  fill_ratio(r, rows, exact_benchmark_if_feasible(d, spec.ell));
  r.bound_vacuous = r.theoretical_bound <= 0.0;
}

inline void run_secretary(const ExperimentSpec& spec, const RunOptions& opt,
                          ExperimentReport& r) {
  const std::vector<double> base = materialize(*spec.values, spec.n);
  overbook::detail::require(!base.empty(), ErrorKind::kInvalidSpec, "field 'values': empty multiset");
  if (spec.n != 0 && spec.n != base.size())
    spec_error("n", "does not match the size of the value multiset");
  const std::size_t n = base.size();
  const BetaVector beta = default_beta(n, spec.ell, spec.k);
  const TopEllResult best = top_ell(base, spec.ell);
  // Index of the ell-th largest entry under the lower-index tie rule.
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return base[a] > base[b]; });
  const std::size_t ell_th = order[std::min(spec.ell, n) - 1];

  r.algorithm = "alg_beta";
  struct Row {
    double value = 0.0;
    bool differ = false;
    bool ell_missed = false;
  };
  struct Trial {
    const std::vector<double>* base;
    const BetaVector* beta;
    std::size_t k, ell_th;
    std::vector<std::size_t> idx;
    std::vector<double> v;
    Row operator()(std::size_t, Rng& rng) {
      const std::size_t n = base->size();
      idx.resize(n);
      std::iota(idx.begin(), idx.end(), std::size_t{0});
      // Fisher-Yates with 64-bit draws; bias is at most n / 2^64.
      for (std::size_t i = n; i > 1; --i) std::swap(idx[i - 1], idx[rng() % i]);
      v.resize(n);
      for (std::size_t i = 0; i < n; ++i) v[i] = (*base)[idx[i]];
      const auto capped = overbook::run_secretary(v, *beta, k);
      const auto open = run_secretary_unbounded(v, *beta);
      Row row;
      row.value = capped.ell_value;
      row.differ = !(capped.accepted == open.accepted);
      row.ell_missed = std::none_of(open.accepted.begin(), open.accepted.end(),
                                    [&](const Acceptance& a) { return idx[a.index] == ell_th; });
      return row;
    }
  };
  const auto rows =
      run_trials(spec.trials, spec.seed, opt.jobs, Trial{&base, &beta, spec.k, ell_th, {}, {}});
  std::vector<double> values(rows.size());
  std::size_t differ = 0;
  std::size_t missed = 0;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    values[i] = rows[i].value;
    differ += rows[i].differ ? 1 : 0;
    missed += rows[i].ell_missed ? 1 : 0;
  }
  const auto m = estimate_mean(values);
  r.ratio_estimate = best.value > 0.0 ? m.mean / best.value : 0.0;
  r.std_error = best.value > 0.0 ? m.std_error / best.value : 0.0;
  const double s = secretary_slack(spec.ell, spec.k);
  r.theoretical_bound = secretary_bound(spec.ell, spec.k);
  r.bound_vacuous = s < 0.0 || r.theoretical_bound <= 0.0;
  if (s < 0.0) r.notes.push_back("k < 8 ell: slack s clamped to 0, bound is vacuous");

  const auto pd = estimate_proportion(differ, rows.size());
  const auto pm = estimate_proportion(missed, rows.size());
  r.metrics["benchmark_exact"] = best.value;
  r.metrics["slack_s"] = s;
  r.metrics["p_capped_differs"] = pd.mean;
  r.metrics["p_capped_differs_stderr"] = pd.std_error;
  r.metrics["p_capped_differs_bound"] = std::exp(-static_cast<double>(spec.k) / 6.0);
  r.metrics["p_ell_th_missed"] = pm.mean;
  r.metrics["p_ell_th_missed_stderr"] = pm.std_error;
  r.metrics["p_ell_th_missed_bound"] = static_cast<double>(spec.ell) * std::exp(-std::max(0.0, s));
  for (std::size_t j = 0; j < beta.boundaries().size(); ++j)
    r.metrics["beta_" + std::to_string(j)] = static_cast<double>(beta.boundaries()[j]);
}

inline void run_hard_instance_dp(const ExperimentSpec& spec, ExperimentReport& r) {
  const std::size_t n = spec.n == 0 ? spec.k + 1 : spec.n;
  const ProductInstance d = spec.instance ? *spec.instance : hard_prophet_instance(spec.k, n);
  const double online = optimal_online_dp(d, spec.ell, spec.k).expected_value;
  const double offline = exact_prophet_benchmark(d, spec.ell);
  r.algorithm = "optimal_online_dp";
  r.ratio_estimate = online / offline;
  r.std_error = 0.0;
  r.theoretical_bound = 1.0 - 1.0 / factorial(2 * spec.k + 2);
  r.upper_bound = true;
  r.metrics["online_value"] = online;
  r.metrics["benchmark_exact"] = offline;
}

inline void run_secretary_upper_bound(const ExperimentSpec& spec, ExperimentReport& r) {
  const double nd = static_cast<double>(spec.n);
  r.algorithm = "secretary_max_prob_dp";
  r.ratio_estimate = secretary_max_prob_dp(spec.n, spec.k);
  r.std_error = 0.0;
  r.theoretical_bound = (1.0 + 1.0 / nd) * (1.0 - std::exp(-static_cast<double>(spec.k)));
  r.upper_bound = true;
}

inline ThresholdSource source_of(const ExperimentSpec& spec, const char* fallback) {
  return spec.source.value_or(fallback) == "alg_max" ? ThresholdSource::kMaxDistribution
                                                     : ThresholdSource::kSampleTau;
}

inline void run_mechanism_welfare(const ExperimentSpec& spec, const RunOptions& opt,
                                  ExperimentReport& r) {
  const ProductInstance d = resolve_instance(spec);
  const ThresholdSource source = source_of(spec, "alg_max");
  const std::size_t tau = spec.tau.value_or(default_tau(spec.ell, spec.k));
  std::optional<double> fixed;
  if (source == ThresholdSource::kMaxDistribution) {
    r.algorithm = "two_phase/alg_max";
    fixed = MaxDistributionSelector(d, spec.k).threshold();
    r.theoretical_bound = alg_max_bound(spec.k);
    r.metrics["threshold"] = *fixed;
  } else {
    r.algorithm = "two_phase/alg_tau";
    r.tau = tau;
    r.theoretical_bound = alg_tau_bound(spec.ell, spec.k, tau);
  }
  struct Row {
    PairedRow p;
    bool trace_mismatch = false;
  };
  struct Trial {
    const ProductInstance* d;
    std::optional<double> fixed;
    ThresholdParams params;
    std::size_t ell;
    std::vector<double> v, scratch;
    Row operator()(std::size_t, Rng& rng) {
      const double t = fixed ? *fixed
                             : welfare_threshold(*d, ThresholdSource::kSampleTau, params, rng);
      v.resize(d->size());
      d->sample_into(v, rng);
      MechanismConfig cfg;
      cfg.ell = ell;
      cfg.k = params.k;
      cfg.threshold = t;
      const auto outcome = run_two_phase(v, cfg);
      const double alg = accept_above(v, t, params.k, ell).ell_value;
      return {{outcome.welfare, top_ell_value(v, ell, scratch)}, outcome.welfare != alg};
    }
  };
  const ThresholdParams params{d.size(), spec.k, tau};
  const auto rows =
      run_trials(spec.trials, spec.seed, opt.jobs, Trial{&d, fixed, params, spec.ell, {}, {}});
  std::vector<PairedRow> paired(rows.size());
  std::size_t mismatches = 0;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    paired[i] = rows[i].p;
    mismatches += rows[i].trace_mismatch ? 1 : 0;
  }
  fill_ratio(r, paired, exact_benchmark_if_feasible(d, spec.ell));
  r.bound_vacuous = r.theoretical_bound <= 0.0;
  r.metrics["trace_mismatches"] = static_cast<double>(mismatches);
}

inline void run_mechanism_revenue(const ExperimentSpec& spec, const RunOptions& opt,
                                  ExperimentReport& r) {
  const ValueDistribution& prior = *spec.distribution;
  const ThresholdSource source = source_of(spec, "alg_tau");
  const std::size_t tau = spec.tau.value_or(default_tau(spec.ell, spec.k));
  const double reserve = monopoly_price(prior);
  const ProductInstance d = ProductInstance::iid(prior, spec.n);
  std::optional<double> fixed;
  if (source == ThresholdSource::kMaxDistribution) {
    r.algorithm = "two_phase_revenue/alg_max";
    fixed = std::max(reserve, MaxDistributionSelector(d, spec.k).threshold());
    r.theoretical_bound = alg_max_bound(spec.k);
    r.metrics["threshold"] = *fixed;
  } else {
    r.algorithm = "two_phase_revenue/alg_tau";
    r.tau = tau;
    r.theoretical_bound = alg_tau_bound(spec.ell, spec.k, tau);
  }
  r.metrics["monopoly_price"] = reserve;
  struct Row {
    double revenue = 0.0;
    double optimal = 0.0;
    double virtual_surplus = 0.0;
  };
  struct Trial {
    const ValueDistribution* prior;
    const ProductInstance* d;
    std::optional<double> fixed;
    double reserve;
    ThresholdParams params;
    std::size_t ell;
    std::vector<double> v, scratch;
    Row operator()(std::size_t, Rng& rng) {
      const double t =
          fixed ? *fixed
                : std::max(reserve, welfare_threshold(*d, ThresholdSource::kSampleTau, params, rng));
      v.resize(d->size());
      d->sample_into(v, rng);
      MechanismConfig cfg;
      cfg.ell = ell;
      cfg.k = params.k;
      cfg.threshold = t;
      cfg.mode = MechanismMode::kRevenue;
      const auto outcome = run_two_phase(v, cfg);
      return {outcome.revenue, optimal_virtual_surplus(*prior, v, ell, scratch),
              myerson_virtual_surplus(*prior, outcome, v)};
    }
  };
  const ThresholdParams params{spec.n, spec.k, tau};
  const auto rows = run_trials(spec.trials, spec.seed, opt.jobs,
                               Trial{&prior, &d, fixed, reserve, params, spec.ell, {}, {}});
  std::vector<double> rev(rows.size()), best(rows.size()), virt(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    rev[i] = rows[i].revenue;
    best[i] = rows[i].optimal;
    virt[i] = rows[i].virtual_surplus;
  }
  const auto ratio = estimate_ratio(rev, best);
  r.ratio_estimate = ratio.ratio;
  r.std_error = ratio.std_error;
  r.bound_vacuous = r.theoretical_bound <= 0.0;
  const auto mr = estimate_mean(rev);
  const auto mo = estimate_mean(best);
  const auto mv = estimate_mean(virt);
  r.metrics["revenue_mean"] = mr.mean;
  r.metrics["revenue_stderr"] = mr.std_error;
  r.metrics["optimal_revenue_mean"] = mo.mean;
  r.metrics["optimal_revenue_stderr"] = mo.std_error;
  r.metrics["virtual_surplus_mean"] = mv.mean;
  r.metrics["virtual_surplus_stderr"] = mv.std_error;
}

}  // namespace detail

// Runs one experiment. Results depend only on (spec, seed): trial t always
// uses derive_seed(spec.seed, t), whatever the worker count.
inline ExperimentReport run_experiment(const ExperimentSpec& spec, const RunOptions& opt = {}) {
  validate(spec);
  const auto start = std::chrono::steady_clock::now();
  ExperimentReport r;
  r.spec = spec;
  switch (spec.kind) {
    case ExperimentKind::kProphetTau: detail::run_prophet_tau(spec, opt, r); break;
    case ExperimentKind::kProphetMax: detail::run_prophet_max(spec, opt, r); break;
    case ExperimentKind::kSecretary: detail::run_secretary(spec, opt, r); break;
    case ExperimentKind::kHardInstanceDp: detail::run_hard_instance_dp(spec, r); break;
    case ExperimentKind::kSecretaryUpperBound: detail::run_secretary_upper_bound(spec, r); break;
    case ExperimentKind::kMechanismWelfare: detail::run_mechanism_welfare(spec, opt, r); break;
    case ExperimentKind::kMechanismRevenue: detail::run_mechanism_revenue(spec, opt, r); break;
  }
  r.pass = passes(r);
  r.elapsed_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return r;
}

}  // namespace overbook::harness
