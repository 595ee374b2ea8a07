// overbook: experiment harness and oracle front-end.
//
//   overbook run --config exp.json --out results.csv --format csv --jobs 8
//   overbook oracle dp --instance inst.json --ell 1 --k 1
//   overbook oracle secretary --n 10 --k 2
//   overbook mechanism simulate --config mech.json
//   overbook secretary --values values.csv --ell 2 --k 8
//
// `run` exits 0 iff every report passes, 1 if any fails, 2 on errors.

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "overbook/overbook.hpp"

namespace {

using overbook::Json;
namespace hx = overbook::harness;

int cmd_run(const std::string& config, const std::string& out, const std::string& format,
            unsigned jobs, std::optional<std::uint64_t> seed,
            std::optional<std::size_t> trials) {
  auto specs = hx::specs_from_json(hx::read_json_file(config));
  // CSV value files are looked up next to the config file.
  const auto base = std::filesystem::path(config).parent_path();
  for (auto& spec : specs) {
    if (spec.values && spec.values->kind == hx::ValueSet::Kind::kCsv &&
        std::filesystem::path(spec.values->path).is_relative())
      spec.values->path = (base / spec.values->path).string();
  }
  std::vector<hx::ExperimentReport> reports;
  bool all_pass = true;
  for (auto& spec : specs) {
    if (seed) spec.seed = *seed;
    if (trials) spec.trials = *trials;
    auto r = hx::run_experiment(spec, {jobs});
    std::cerr << (r.pass ? "[PASS] " : "[FAIL] ")
              << (spec.name.empty() ? hx::to_string(spec.kind) : spec.name)
              << "  ratio=" << r.ratio_estimate << " +- " << r.std_error
              << "  bound=" << r.theoretical_bound << (r.bound_vacuous ? " (vacuous)" : "")
              << "  " << r.elapsed_seconds << "s\n";
    all_pass = all_pass && r.pass;
    reports.push_back(std::move(r));
  }
  const auto fmt = format == "json" ? hx::ReportFormat::kJson : hx::ReportFormat::kCsv;
  if (out.empty() || out == "-") {
    std::cout << hx::render(reports, fmt);
  } else {
    hx::emit_report(reports, fmt, out);
  }
  return all_pass ? 0 : 1;
}

overbook::ProductInstance load_instance(const std::string& path, std::size_t hard_k) {
  if (hard_k > 0) return overbook::hard_prophet_instance(hard_k, hard_k + 1);
  return overbook::instance_from_json(hx::read_json_file(path));
}

int cmd_oracle_dp(const std::string& path, std::size_t hard_k, std::size_t ell, std::size_t k,
                  const std::string& policy_out) {
  const auto instance = load_instance(path, hard_k);
  const auto dp = overbook::optimal_online_dp(instance, ell, k);
  const double offline = overbook::exact_prophet_benchmark(instance, ell);
  Json j{{"online_value", dp.expected_value},
         {"benchmark", offline},
         {"ratio", dp.expected_value / offline},
         {"states", dp.policy.size()}};
  if (!policy_out.empty()) {
    std::ofstream f(policy_out);
    if (!f) throw overbook::Error(overbook::ErrorKind::kIo, "cannot write '" + policy_out + "'");
    f << overbook::policy_to_json(instance, dp).dump(2) << "\n";
  }
  std::cout << j.dump(2) << "\n";
  return 0;
}

int cmd_oracle_secretary(std::size_t n, std::size_t k) {
  const double p = overbook::secretary_max_prob_dp(n, k);
  const double bound =
      (1.0 + 1.0 / static_cast<double>(n)) * (1.0 - std::exp(-static_cast<double>(k)));
  std::cout << Json{{"n", n}, {"k", k}, {"probability", p}, {"upper_bound", bound}}.dump(2)
            << "\n";
  return 0;
}

int cmd_mechanism(const std::string& path, const std::string& out) {
  const Json cfg = hx::read_json_file(path);
  overbook::MechanismConfig config;
  config.ell = cfg.value("ell", std::size_t{1});
  config.k = cfg.value("k", std::size_t{1});
  config.mode = cfg.value("mode", std::string("welfare")) == "revenue"
                    ? overbook::MechanismMode::kRevenue
                    : overbook::MechanismMode::kWelfare;
  if (cfg.contains("prior")) config.prior = overbook::distribution_from_json(cfg.at("prior"));

  std::vector<overbook::AuctionProfile> profiles;
  for (const auto& p : cfg.at("profiles")) profiles.push_back(overbook::profile_from_json(p));

  if (cfg.contains("threshold")) {
    config.threshold = cfg.at("threshold").get<double>();
  } else {
    const auto source = cfg.value("source", std::string("alg_max")) == "alg_max"
                            ? overbook::ThresholdSource::kMaxDistribution
                            : overbook::ThresholdSource::kSampleTau;
    const std::size_t n =
        cfg.value("n", profiles.empty() ? std::size_t{1} : profiles.front().values.size());
    overbook::ThresholdParams params{n, config.k,
                                     cfg.value("tau", overbook::default_tau(config.ell, config.k))};
    overbook::Rng rng(cfg.value("seed", std::uint64_t{0}));
    if (config.mode == overbook::MechanismMode::kRevenue) {
      if (!config.prior)
        throw overbook::Error(overbook::ErrorKind::kInvalidArgument, "revenue mode needs 'prior'");
      config.threshold = overbook::revenue_threshold(*config.prior, source, params, rng);
    } else {
      const auto instance =
          cfg.contains("instance")
              ? overbook::instance_from_json(cfg.at("instance"))
              : overbook::ProductInstance::iid(overbook::distribution_from_json(cfg.at("distribution")), n);
      config.threshold = overbook::welfare_threshold(instance, source, params, rng);
    }
  }
  config.validate();

  Json outcomes = Json::array();
  for (const auto& p : profiles) {
    auto o = overbook::simulate_profile(p, config);
    Json row = overbook::auction_to_json(o);
    if (config.prior && config.mode == overbook::MechanismMode::kRevenue) {
      row["virtual_surplus"] = overbook::myerson_virtual_surplus(*config.prior, o, p.values);
    }
    outcomes.push_back(std::move(row));
  }
  const Json result{{"threshold", config.threshold}, {"outcomes", std::move(outcomes)}};
  if (out.empty() || out == "-") {
    std::cout << result.dump(2) << "\n";
  } else {
    std::ofstream f(out);
    if (!f) throw overbook::Error(overbook::ErrorKind::kIo, "cannot write '" + out + "'");
    f << result.dump(2) << "\n";
  }
  return 0;
}

int cmd_secretary(const std::string& path, std::size_t ell, std::size_t k, bool unbounded) {
  const auto values = hx::read_values_csv(path);
  const auto beta = overbook::default_beta(values.size(), ell, k);
  const auto outcome = unbounded ? overbook::run_secretary_unbounded(values, beta)
                                 : overbook::run_secretary(values, beta, k);
  Json j = overbook::outcome_to_json(outcome);
  j["beta"] = std::vector<std::size_t>(beta.boundaries().begin(), beta.boundaries().end());
  std::cout << j.dump(2) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"l-out-of-k prophet/secretary experiments and overbooking mechanisms"};
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "Run experiments from a JSON config");
  std::string config, out, format = "csv";
  unsigned jobs = 1;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> trials;
  run->add_option("--config", config, "Experiment config (JSON)")->required()->check(CLI::ExistingFile);
  run->add_option("--out", out, "Output path (default: stdout)");
  run->add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  run->add_option("--jobs", jobs, "Worker threads")->check(CLI::PositiveNumber);
  run->add_option("--seed", seed, "Override every master seed");
  run->add_option("--trials", trials, "Override every trial count")->check(CLI::PositiveNumber);

  auto* oracle = app.add_subcommand("oracle", "Exact oracles");
  oracle->require_subcommand(1);
  auto* dp = oracle->add_subcommand("dp", "Optimal online DP vs exact prophet benchmark");
  std::string instance_path, policy_out;
  std::size_t hard_k = 0, ell = 1, k = 1, n = 1;
  auto* inst_opt = dp->add_option("--instance", instance_path, "Product instance (JSON array)");
  auto* hard_opt = dp->add_option("--hard", hard_k, "Use the hard instance for this k");
  inst_opt->excludes(hard_opt);
  dp->add_option("--ell", ell)->check(CLI::PositiveNumber);
  dp->add_option("--k", k)->check(CLI::PositiveNumber);
  dp->add_option("--policy-out", policy_out, "Write the policy as JSON");
  auto* sec = oracle->add_subcommand("secretary", "Best probability of selecting the maximum");
  sec->add_option("--n", n)->required()->check(CLI::PositiveNumber);
  sec->add_option("--k", k)->required()->check(CLI::PositiveNumber);

  auto* mech = app.add_subcommand("mechanism", "Two-phase overbooking mechanism");
  mech->require_subcommand(1);
  auto* sim = mech->add_subcommand("simulate", "Run profiles through the mechanism");
  std::string mech_config, mech_out;
  sim->add_option("--config", mech_config)->required()->check(CLI::ExistingFile);
  sim->add_option("--out", mech_out);

  auto* secretary = app.add_subcommand("secretary", "Run the interval secretary rule on a CSV");
  std::string values_path;
  bool unbounded = false;
  secretary->add_option("--values", values_path, "One value per line")->required()->check(CLI::ExistingFile);
  secretary->add_option("--ell", ell)->check(CLI::PositiveNumber);
  secretary->add_option("--k", k)->check(CLI::PositiveNumber);
  secretary->add_flag("--unbounded", unbounded, "Ignore the capacity k");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) return cmd_run(config, out, format, jobs, seed, trials);
    if (*dp) {
      if (instance_path.empty() && hard_k == 0) {
        std::cerr << "oracle dp: give --instance or --hard\n";
        return 2;
      }
      return cmd_oracle_dp(instance_path, hard_k, ell, k, policy_out);
    }
    if (*sec) return cmd_oracle_secretary(n, k);
    if (*sim) return cmd_mechanism(mech_config, mech_out);
    if (*secretary) return cmd_secretary(values_path, ell, k, unbounded);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
