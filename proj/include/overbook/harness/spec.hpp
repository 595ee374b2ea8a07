#pragma once

#include <cfloat>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include "overbook/distributions.hpp"
#include "overbook/error.hpp"
#include "overbook/json_io.hpp"

namespace overbook::harness {

enum class ExperimentKind {
  kProphetTau,
  kProphetMax,
  kSecretary,
  kHardInstanceDp,
  kSecretaryUpperBound,
  kMechanismWelfare,
  kMechanismRevenue,
};

inline std::string to_string(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::kProphetTau: return "prophet-tau";
    case ExperimentKind::kProphetMax: return "prophet-max";
    case ExperimentKind::kSecretary: return "secretary";
    case ExperimentKind::kHardInstanceDp: return "hard-instance-dp";
    case ExperimentKind::kSecretaryUpperBound: return "secretary-upper-bound";
    case ExperimentKind::kMechanismWelfare: return "mechanism-welfare";
    case ExperimentKind::kMechanismRevenue: return "mechanism-revenue";
  }
  return "unknown";
}

inline ExperimentKind kind_from_string(const std::string& s) {
  for (auto k : {ExperimentKind::kProphetTau, ExperimentKind::kProphetMax,
                 ExperimentKind::kSecretary, ExperimentKind::kHardInstanceDp,
                 ExperimentKind::kSecretaryUpperBound, ExperimentKind::kMechanismWelfare,
                 ExperimentKind::kMechanismRevenue}) {
    if (to_string(k) == s) return k;
  }
  throw Error(ErrorKind::kInvalidSpec, "field 'kind': unknown experiment kind '" + s + "'");
}

// Fixed value multiset for secretary experiments.
struct ValueSet {
  enum class Kind { kExplicit, kGeometric, kCsv };
  Kind kind = Kind::kExplicit;
  std::vector<double> values;  // explicit
  double ratio = 2.0;          // geometric
  std::string path;            // csv

  friend bool operator==(const ValueSet&, const ValueSet&) = default;
};

struct ExperimentSpec {
  ExperimentKind kind = ExperimentKind::kProphetTau;
  std::string name;
  std::size_t n = 0;
  std::size_t ell = 1;
  std::size_t k = 1;
  std::optional<std::size_t> tau;
  std::optional<ValueDistribution> distribution;  // i.i.d. across the n awards
  std::optional<ProductInstance> instance;        // explicit product instance
  std::optional<ValueSet> values;
  std::optional<std::string> source;     // "alg_tau" | "alg_max"
  std::optional<std::string> algorithm;  // prophet-max: "alg_max" | "alg_max_atoms"
  std::size_t trials = 100000;
  std::uint64_t seed = 0;

  friend bool operator==(const ExperimentSpec&, const ExperimentSpec&) = default;
};

namespace detail {

[[noreturn]] inline void spec_error(const std::string& field, const std::string& what) {
  throw Error(ErrorKind::kInvalidSpec, "field '" + field + "': " + what);
}

}  // namespace detail

// Checks every field constraint; errors name the offending field.
inline void validate(const ExperimentSpec& spec) {
  using detail::spec_error;
  if (spec.trials < 1) spec_error("trials", "must be >= 1");
  if (spec.ell < 1) spec_error("ell", "must be >= 1");
  if (spec.k < spec.ell) spec_error("k", "must be >= ell");
  const bool sampled = spec.kind == ExperimentKind::kProphetTau ||
                       spec.kind == ExperimentKind::kProphetMax ||
                       spec.kind == ExperimentKind::kMechanismWelfare;
  if (sampled) {
    if (!spec.distribution && !spec.instance)
      spec_error("distribution", "either 'distribution' or 'instance' is required");
    if (spec.distribution && spec.instance)
      spec_error("instance", "give only one of 'distribution' and 'instance'");
    if (spec.instance && spec.n != 0 && spec.n != spec.instance->size())
      spec_error("n", "does not match the instance length");
    if (spec.distribution && spec.n < 1) spec_error("n", "must be >= 1");
  }
  if (spec.tau) {
    const std::size_t n = spec.instance ? spec.instance->size() : spec.n;
    if (*spec.tau < 1 || *spec.tau > n) spec_error("tau", "must lie in [1, n]");
  }
  if (spec.source && *spec.source != "alg_tau" && *spec.source != "alg_max")
    spec_error("source", "must be 'alg_tau' or 'alg_max'");
  if (spec.algorithm && *spec.algorithm != "alg_max" && *spec.algorithm != "alg_max_atoms")
    spec_error("algorithm", "must be 'alg_max' or 'alg_max_atoms'");
  switch (spec.kind) {
    case ExperimentKind::kProphetMax:
    case ExperimentKind::kMechanismWelfare:
      if (spec.k < 2 && (spec.kind == ExperimentKind::kProphetMax ||
                         spec.source.value_or("alg_max") == "alg_max"))
        spec_error("k", "distribution-of-max thresholds need k >= 2");
      break;
    case ExperimentKind::kSecretary:
      if (!spec.values) spec_error("values", "secretary experiments need a value multiset");
      if (spec.values->kind == ValueSet::Kind::kGeometric) {
        if (spec.n < 1) spec_error("n", "geometric value sets need n >= 1");
        if (!(spec.values->ratio > 1.0)) spec_error("values.ratio", "must be > 1");
      }
      if (spec.values->kind == ValueSet::Kind::kExplicit && spec.values->values.empty())
        spec_error("values.explicit", "must not be empty");
      break;
    case ExperimentKind::kSecretaryUpperBound:
      if (spec.n < 1) spec_error("n", "must be >= 1");
      break;
    case ExperimentKind::kHardInstanceDp:
      if (spec.n != 0 && spec.n < spec.k + 1) spec_error("n", "must be >= k + 1");
      break;
    case ExperimentKind::kMechanismRevenue:
      if (!spec.distribution) spec_error("distribution", "revenue experiments need an i.i.d. prior");
      if (spec.n < 1) spec_error("n", "must be >= 1");
      if (spec.k < 2 && spec.source.value_or("alg_tau") == "alg_max")
        spec_error("k", "distribution-of-max thresholds need k >= 2");
      break;
    case ExperimentKind::kProphetTau:
      break;
  }
}

inline Json value_set_to_json(const ValueSet& v) {
  switch (v.kind) {
    case ValueSet::Kind::kExplicit: return Json{{"explicit", v.values}};
    case ValueSet::Kind::kGeometric: return Json{{"geometric", {{"ratio", v.ratio}}}};
    case ValueSet::Kind::kCsv: return Json{{"csv", v.path}};
  }
  return Json::object();
}

inline ValueSet value_set_from_json(const Json& j) {
  ValueSet v;
  if (j.is_array()) {
    v.values = j.get<std::vector<double>>();
  } else if (j.contains("explicit")) {
    v.values = j.at("explicit").get<std::vector<double>>();
  } else if (j.contains("geometric")) {
    v.kind = ValueSet::Kind::kGeometric;
    v.ratio = j.at("geometric").value("ratio", 2.0);
  } else if (j.contains("csv")) {
    v.kind = ValueSet::Kind::kCsv;
    v.path = j.at("csv").get<std::string>();
  } else {
    detail::spec_error("values", "expected 'explicit', 'geometric' or 'csv'");
  }
  return v;
}

inline Json spec_to_json(const ExperimentSpec& s) {
  Json j{{"kind", to_string(s.kind)}, {"n", s.n},           {"ell", s.ell},
         {"k", s.k},                  {"trials", s.trials}, {"seed", s.seed}};
  if (!s.name.empty()) j["name"] = s.name;
  if (s.tau) j["tau"] = *s.tau;
  if (s.distribution) j["distribution"] = distribution_to_json(*s.distribution);
  if (s.instance) j["instance"] = instance_to_json(*s.instance);
  if (s.values) j["values"] = value_set_to_json(*s.values);
  if (s.source) j["source"] = *s.source;
  if (s.algorithm) j["algorithm"] = *s.algorithm;
  return j;
}

inline ExperimentSpec spec_from_json(const Json& j) {
  if (!j.is_object()) throw Error(ErrorKind::kInvalidSpec, "experiment must be a JSON object");
  ExperimentSpec s;
  auto field = [&](const char* key, auto& out) {
    if (!j.contains(key)) return;
    try {
      j.at(key).get_to(out);
    } catch (const nlohmann::json::exception&) {
      detail::spec_error(key, "has the wrong type");
    }
  };
  if (!j.contains("kind")) detail::spec_error("kind", "is required");
  s.kind = kind_from_string(j.at("kind").get<std::string>());
  field("name", s.name);
  field("n", s.n);
  field("ell", s.ell);
  field("k", s.k);
  field("trials", s.trials);
  field("seed", s.seed);
  if (j.contains("tau")) {
    std::size_t tau = 0;
    field("tau", tau);
    s.tau = tau;
  }
  try {
    if (j.contains("distribution")) s.distribution = distribution_from_json(j.at("distribution"));
    if (j.contains("instance")) s.instance = instance_from_json(j.at("instance"));
  } catch (const Error& e) {
    detail::spec_error(j.contains("instance") ? "instance" : "distribution", e.what());
  }
  if (j.contains("values")) s.values = value_set_from_json(j.at("values"));
  if (j.contains("source")) s.source = j.at("source").get<std::string>();
  if (j.contains("algorithm")) s.algorithm = j.at("algorithm").get<std::string>();
  return s;
}

// A config file is either a JSON array of experiments or {"experiments": [...]}.
inline std::vector<ExperimentSpec> specs_from_json(const Json& j) {
  const Json& list = j.is_object() && j.contains("experiments") ? j.at("experiments") : j;
  if (!list.is_array()) throw Error(ErrorKind::kInvalidSpec, "config must list experiments");
  std::vector<ExperimentSpec> specs;
  for (const auto& e : list) specs.push_back(spec_from_json(e));
  return specs;
}

inline Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::kIo, "cannot open '" + path + "'");
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorKind::kIo, "'" + path + "' is not valid JSON: " + e.what());
  }
}

// One value per line; blank lines and lines starting with '#' are skipped.
inline std::vector<double> read_values_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::kIo, "cannot open '" + path + "'");
  std::vector<double> values;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    try {
      std::size_t used = 0;
      values.push_back(std::stod(line.substr(first), &used));
    } catch (const std::exception&) {
      throw Error(ErrorKind::kIo, path + ":" + std::to_string(lineno) + ": not a number");
    }
  }
  return values;
}

// ratio^(i - (n-1)) for i = 0..n-1, so the largest entry is 1. Entries that
// would fall below the smallest normal double are replaced by distinct,
// increasing subnormals so that no two entries tie; their contribution to any
// top-ell sum is below 2^-1000.
inline std::vector<double> geometric_values(std::size_t n, double ratio) {
  std::vector<double> v(n);
  std::size_t tiny = 0;
  for (std::size_t i = 0; i < n; ++i) {
    v[i] = std::pow(ratio, static_cast<double>(i) - static_cast<double>(n - 1));
    if (v[i] < DBL_MIN) tiny = i + 1;
  }
  for (std::size_t i = 0; i < tiny; ++i)
    v[i] = DBL_MIN * static_cast<double>(i + 1) / static_cast<double>(tiny + 1);
  return v;
}

inline std::vector<double> materialize(const ValueSet& set, std::size_t n) {
  switch (set.kind) {
    case ValueSet::Kind::kExplicit: return set.values;
    case ValueSet::Kind::kGeometric: return geometric_values(n, set.ratio);
    case ValueSet::Kind::kCsv: return read_values_csv(set.path);
  }
  return {};
}

}  // namespace overbook::harness
