#pragma once

// Versioned JSON form of an AnalysisReport. Field order is fixed so equal
// reports serialize to equal bytes.

#include <json.hpp>

#include "serieslab/analysis/ladder.hpp"

namespace serieslab::analysis {

inline constexpr const char* kReportVersion = "serieslab.report/1";

using Json = nlohmann::ordered_json;

namespace detail {

inline Json number_or_null(const ExtScalar& x) {
  if (!x.is_plain()) return x.to_string(17);
  const double d = x.to_double();
  if (!std::isfinite(d)) return nullptr;
  return d;
}

inline Json statistic_value(const LimitEstimate& e) {
  switch (e.status) {
    case Status::DivergedPos: return "+inf";
    case Status::DivergedNeg: return "-inf";
    case Status::NotConverged: return nullptr;
    case Status::Converged: return number_or_null(e.value);
  }
  return nullptr;
}

inline Json estimate_json(const LimitEstimate& e) {
  Json j;
  j["value"] = statistic_value(e);
  j["uncertainty"] = e.diverged() ? Json(nullptr) : number_or_null(e.uncertainty);
  j["status"] = limits::to_string(e.status);
  j["method"] = limits::to_string(e.method);
  j["grid"] = e.grid.empty() ? Json(nullptr) : Json(e.grid);
  return j;
}

}  // namespace detail

inline Json to_json(const RatePrediction& r) {
  Json j;
  j["template"] = to_string(r.tmpl);
  const bool has_parameter =
      r.tmpl != RateTemplate::SlowLogUnknown && !(r.tmpl == RateTemplate::SlowLogLower && r.parameter.is_zero());
  j["parameter"] = has_parameter ? detail::number_or_null(r.parameter) : Json(nullptr);
  j["parameter_exact"] = r.exact ? Json(expr::to_string(*r.exact)) : Json(nullptr);
  j["w"] = r.w.name();
  j["log_depth"] = r.log_depth;
  j["formula"] = r.formula();
  return j;
}

inline Json to_json(const Verdict& v) {
  Json j;
  j["test"] = v.test;
  j["w"] = v.w;
  j["level"] = v.level;
  j["statistic_value"] = detail::statistic_value(v.statistic);
  j["statistic_exact"] = v.exact ? Json(expr::to_string(*v.exact)) : Json(nullptr);
  j["uncertainty"] = v.statistic.diverged() ? Json(nullptr) : detail::number_or_null(v.statistic.uncertainty);
  j["status"] = limits::to_string(v.statistic.status);
  j["method"] = limits::to_string(v.statistic.method);
  j["grid"] = v.statistic.grid.empty() ? Json(nullptr) : Json(v.statistic.grid);
  j["decision"] = to_string(v.decision);
  j["reason"] = v.reason;
  j["one_sided"] = v.one_sided;
  j["companion"] = v.other ? detail::estimate_json(*v.other) : Json(nullptr);
  j["rate"] = v.rate ? to_json(*v.rate) : Json(nullptr);
  return j;
}

inline Json to_json(const AnalysisReport& r, const Json& oracle = nullptr) {
  Json j;
  j["version"] = kReportVersion;
  Json seq;
  seq["text"] = r.sequence;
  seq["normal_form"] = r.normal_form ? Json(*r.normal_form) : Json(nullptr);
  if (r.normal_form) {
    Json ex = Json::array();
    for (const auto& p : r.exponents) ex.push_back(expr::to_string(p));
    seq["exponents"] = ex;
  } else {
    seq["exponents"] = nullptr;
  }
  seq["n0"] = r.n0;
  j["sequence"] = seq;
  Json params = Json::object();
  for (const auto& [k, v] : r.params) params[k] = expr::to_string(v);
  j["params"] = params;
  j["backend"] = r.backend;
  Json trace = Json::array();
  for (const auto& v : r.trace) trace.push_back(to_json(v));
  j["trace"] = trace;
  Json fin;
  fin["decision"] = to_string(r.final_decision);
  fin["reason"] = r.final_reason;
  if (r.final_index) {
    fin["test"] = r.trace[*r.final_index].test;
    fin["level"] = r.trace[*r.final_index].level;
    fin["rate"] = j["trace"][*r.final_index]["rate"];
  } else {
    fin["test"] = nullptr;
    fin["level"] = nullptr;
    fin["rate"] = nullptr;
  }
  j["final"] = fin;
  j["warnings"] = r.warnings;
  j["oracle"] = oracle;
  return j;
}

}  // namespace serieslab::analysis
