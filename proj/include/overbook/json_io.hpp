#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "overbook/distributions.hpp"
#include "overbook/error.hpp"
#include "overbook/mechanisms.hpp"
#include "overbook/offline_oracle.hpp"
#include "overbook/prophet_algs.hpp"

namespace overbook {

using Json = nlohmann::json;

namespace detail {

template <class T>
T json_field(const Json& j, const char* key, const std::string& where) {
  if (!j.is_object() || !j.contains(key)) {
    throw Error(ErrorKind::kInvalidArgument, where + ": missing field '" + key + "'");
  }
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::kInvalidArgument,
                where + ": field '" + key + "' has the wrong type (" + e.what() + ")");
  }
}

}  // namespace detail

// {"kind": "...", "params": {...}}
inline Json distribution_to_json(const ValueDistribution& d) {
  Json params = Json::object();
  switch (d.kind()) {
    case ValueDistribution::Kind::kFiniteSupport: {
      Json atoms = Json::array();
      for (const Atom& a : d.atoms()) atoms.push_back({a.value, a.probability});
      params["atoms"] = std::move(atoms);
      break;
    }
    case ValueDistribution::Kind::kUniformInterval:
      params["low"] = d.low();
      params["high"] = d.high();
      break;
    case ValueDistribution::Kind::kExponential:
      params["rate"] = d.rate();
      break;
    case ValueDistribution::Kind::kDegenerate:
      params["value"] = d.point();
      break;
  }
  return Json{{"kind", to_string(d.kind())}, {"params", std::move(params)}};
}

inline ValueDistribution distribution_from_json(const Json& j) {
  const auto kind = detail::json_field<std::string>(j, "kind", "distribution");
  const Json params = j.contains("params") ? j.at("params") : Json::object();
  const std::string where = "distribution '" + kind + "'";
  if (kind == "finite-support") {
    std::vector<Atom> atoms;
    for (const auto& a : detail::json_field<Json>(params, "atoms", where)) {
      if (!a.is_array() || a.size() != 2 || !a[0].is_number() || !a[1].is_number()) {
        throw Error(ErrorKind::kInvalidArgument, where + ": atoms must be [value, probability]");
      }
      atoms.push_back({a[0].get<double>(), a[1].get<double>()});
    }
    return ValueDistribution::finite_support(std::move(atoms));
  }
  if (kind == "uniform-interval") {
    return ValueDistribution::uniform(detail::json_field<double>(params, "low", where),
                                      detail::json_field<double>(params, "high", where));
  }
  if (kind == "exponential")
    return ValueDistribution::exponential(detail::json_field<double>(params, "rate", where));
  if (kind == "degenerate")
    return ValueDistribution::degenerate(detail::json_field<double>(params, "value", where));
  throw Error(ErrorKind::kInvalidArgument, "unknown distribution kind '" + kind + "'");
}

inline Json instance_to_json(const ProductInstance& instance) {
  Json arr = Json::array();
  for (const auto& d : instance.components()) arr.push_back(distribution_to_json(d));
  return arr;
}

inline ProductInstance instance_from_json(const Json& j) {
  if (!j.is_array()) {
    throw Error(ErrorKind::kInvalidArgument, "product instance must be a JSON array");
  }
  std::vector<ValueDistribution> comps;
  for (const auto& c : j) comps.push_back(distribution_from_json(c));
  return ProductInstance(std::move(comps));
}

// {accepted: [[index, value]...], threshold: T, ell_value: x}
inline Json outcome_to_json(const SelectionOutcome& o) {
  Json accepted = Json::array();
  for (const auto& a : o.accepted) accepted.push_back({a.index, a.value});
  return Json{{"accepted", std::move(accepted)},
              {"threshold", o.threshold_used},
              {"ell_value", o.ell_value}};
}

inline SelectionOutcome outcome_from_json(const Json& j) {
  SelectionOutcome o;
  for (const auto& a : detail::json_field<Json>(j, "accepted", "selection outcome"))
    o.accepted.push_back({a.at(0).get<std::size_t>(), a.at(1).get<double>()});
  o.threshold_used = detail::json_field<double>(j, "threshold", "selection outcome");
  o.ell_value = detail::json_field<double>(j, "ell_value", "selection outcome");
  return o;
}

inline Json auction_to_json(const AuctionOutcome& o) {
  Json payments = Json::array();
  for (std::size_t j = 0; j < o.winners.size(); ++j)
    payments.push_back({o.winners[j], o.payments[j]});
  return Json{{"ticket_holders", o.ticket_holders},
              {"winners", o.winners},
              {"payments", std::move(payments)},
              {"welfare", o.welfare},
              {"revenue", o.revenue}};
}

inline AuctionProfile profile_from_json(const Json& j) {
  AuctionProfile p;
  p.values = detail::json_field<std::vector<double>>(j, "values", "profile");
  if (j.contains("order")) p.order = j.at("order").get<std::vector<std::size_t>>();
  return p;
}

// List of {state, atom, decision} triples.
inline Json policy_to_json(const ProductInstance& instance, const DpPolicyValue& dp) {
  Json rows = Json::array();
  for (const auto& [state, decisions] : dp.policy) {
    const auto atoms = instance[state.position].atoms();
    for (std::size_t a = 0; a < decisions.size(); ++a) {
      rows.push_back({{"state",
                       {{"position", state.position},
                        {"accepted", state.accepted},
                        {"top", state.top}}},
                      {"atom", atoms[a].value},
                      {"decision", decisions[a] == Decision::kAccept ? "accept" : "reject"}});
    }
  }
  return rows;
}

}  // namespace overbook
