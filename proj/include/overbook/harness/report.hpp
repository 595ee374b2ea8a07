#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <span>
#include <string>
#include <vector>

#include "overbook/harness/experiment.hpp"
#include "overbook/harness/spec.hpp"

namespace overbook::harness {

enum class ReportFormat { kCsv, kJson };

inline constexpr const char* kCsvHeader =
    "experiment,n,ell,k,tau,algorithm,trials,seed,ratio_estimate,stderr,theoretical_bound,pass";

namespace detail {

// %.17g round-trips every double.
inline std::string format_double(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

inline std::size_t effective_n(const ExperimentReport& r) {
  if (r.spec.instance) return r.spec.instance->size();
  if (r.spec.n == 0 && r.spec.kind == ExperimentKind::kHardInstanceDp) return r.spec.k + 1;
  if (r.spec.n == 0 && r.spec.values && r.spec.values->kind == ValueSet::Kind::kExplicit)
    return r.spec.values->values.size();
  return r.spec.n;
}

}  // namespace detail

inline std::string render_csv(std::span<const ExperimentReport> reports) {
  std::string out = std::string(kCsvHeader) + "\n";
  for (const auto& r : reports) {
    const std::string name = r.spec.name.empty() ? to_string(r.spec.kind) : r.spec.name;
    out += detail::csv_field(name) + ',' + std::to_string(detail::effective_n(r)) + ',' +
           std::to_string(r.spec.ell) + ',' + std::to_string(r.spec.k) + ',' +
           (r.tau ? std::to_string(*r.tau) : std::string()) + ',' +
           detail::csv_field(r.algorithm) + ',' + std::to_string(r.spec.trials) + ',' +
           std::to_string(r.spec.seed) + ',' + detail::format_double(r.ratio_estimate) + ',' +
           detail::format_double(r.std_error) + ',' +
           detail::format_double(r.theoretical_bound) + ',' + (r.pass ? "true" : "false") + '\n';
  }
  return out;
}

inline Json report_to_json(const ExperimentReport& r) {
  Json j{{"spec", spec_to_json(r.spec)},
         {"algorithm", r.algorithm},
         {"ratio_estimate", r.ratio_estimate},
         {"stderr", r.std_error},
         {"theoretical_bound", r.theoretical_bound},
         {"bound_vacuous", r.bound_vacuous},
         {"upper_bound", r.upper_bound},
         {"pass", r.pass},
         {"elapsed_seconds", r.elapsed_seconds},
         {"seed_rule", r.seed_rule},
         {"metrics", r.metrics},
         {"notes", r.notes}};
  j["tau"] = r.tau ? Json(*r.tau) : Json(nullptr);
  return j;
}

inline ExperimentReport report_from_json(const Json& j) {
  ExperimentReport r;
  r.spec = spec_from_json(j.at("spec"));
  r.algorithm = j.at("algorithm").get<std::string>();
  if (j.contains("tau") && !j.at("tau").is_null()) r.tau = j.at("tau").get<std::size_t>();
  r.ratio_estimate = j.at("ratio_estimate").get<double>();
  r.std_error = j.at("stderr").get<double>();
  r.theoretical_bound = j.at("theoretical_bound").get<double>();
  r.bound_vacuous = j.value("bound_vacuous", false);
  r.upper_bound = j.value("upper_bound", false);
  r.pass = j.at("pass").get<bool>();
  r.elapsed_seconds = j.value("elapsed_seconds", 0.0);
  r.seed_rule = j.value("seed_rule", std::string(kSeedDerivationRule));
  if (j.contains("metrics")) r.metrics = j.at("metrics").get<std::map<std::string, double>>();
  if (j.contains("notes")) r.notes = j.at("notes").get<std::vector<std::string>>();
  return r;
}

inline Json render_json(std::span<const ExperimentReport> reports) {
  Json arr = Json::array();
  for (const auto& r : reports) arr.push_back(report_to_json(r));
  return arr;
}

inline std::string render(std::span<const ExperimentReport> reports, ReportFormat format) {
  return format == ReportFormat::kCsv ? render_csv(reports) : render_json(reports).dump(2) + "\n";
}

inline void emit_report(std::span<const ExperimentReport> reports, ReportFormat format,
                        const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::kIo, "cannot write '" + path.string() + "'");
  out << render(reports, format);
  if (!out) throw Error(ErrorKind::kIo, "write to '" + path.string() + "' failed");
}

}  // namespace overbook::harness
