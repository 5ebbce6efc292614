#pragma once

// Scenario configuration (JSON) and the CSV/JSON report writers used by the
// command-line front end. Numeric output is locale-free, 12 significant
// digits, LF line endings, so report files are byte-stable.

#include "distsense/core.hpp"
#include "distsense/estimation.hpp"
#include "distsense/optimizer.hpp"
#include "distsense/schemes.hpp"

#include <nlohmann/json.hpp>

#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace distsense {

using json = nlohmann::json;

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ScenarioConfig {
  std::vector<double> weights;
  double n_total = 0.0;
  std::string scheme_kind;
  std::vector<double> phases;  // empty means all-zero

  struct Sweep {
    std::vector<double> ratios;
    int restarts = 16;
  };
  std::optional<Sweep> sweep;

  struct Simulate {
    long nu = 0;
    int batches = 0;
    std::uint64_t seed = 0;
  };
  std::optional<Simulate> simulate;

  struct Output {
    std::string path;
    std::string format = "csv";
  };
  std::optional<Output> output;

  std::optional<CustomTwoModeParams> custom;
};

namespace detail {

inline const json& require_field(const json& j, const char* field) {
  const auto it = j.find(field);
  if (it == j.end()) {
    throw ConfigError(std::string(field) + ": required field is missing");
  }
  return *it;
}

inline double number_field(const json& j, const std::string& where) {
  if (!j.is_number()) {
    throw ConfigError(where + ": expected a number");
  }
  return j.get<double>();
}

}  // namespace detail

inline ScenarioConfig parse_scenario(const json& j) {
  if (!j.is_object()) {
    throw ConfigError("config: expected a JSON object");
  }
  ScenarioConfig cfg;
  const json& jw = detail::require_field(j, "weights");
  if (!jw.is_array() || jw.empty()) {
    throw ConfigError("weights: expected a non-empty array");
  }
  for (std::size_t i = 0; i < jw.size(); ++i) {
    cfg.weights.push_back(
        detail::number_field(jw[i], "weights[" + std::to_string(i) + "]"));
  }
  cfg.n_total = detail::number_field(detail::require_field(j, "n_total"),
                                     "n_total");
  if (!(cfg.n_total > 0.0)) {
    throw ConfigError("n_total: must be positive");
  }
  const json& jk = detail::require_field(j, "scheme_kind");
  if (!jk.is_string()) {
    throw ConfigError("scheme_kind: expected a string");
  }
  cfg.scheme_kind = jk.get<std::string>();

  if (j.contains("phases")) {
    const json& jp = j["phases"];
    if (!jp.is_array() || jp.size() != jw.size()) {
      throw ConfigError("phases: expected an array matching weights");
    }
    for (std::size_t i = 0; i < jp.size(); ++i) {
      cfg.phases.push_back(
          detail::number_field(jp[i], "phases[" + std::to_string(i) + "]"));
    }
  }

  if (j.contains("sweep")) {
    const json& js = j["sweep"];
    ScenarioConfig::Sweep sweep;
    const json& jr = detail::require_field(js, "ratios");
    if (!jr.is_array() || jr.empty()) {
      throw ConfigError("sweep.ratios: expected a non-empty array");
    }
    double prev = -1.0;
    for (std::size_t i = 0; i < jr.size(); ++i) {
      const std::string where = "sweep.ratios[" + std::to_string(i) + "]";
      const double ratio = detail::number_field(jr[i], where);
      if (ratio < 0.0 || ratio > 1.0) {
        throw ConfigError(where + ": must lie in [0, 1]");
      }
      if (ratio < prev) {
        throw ConfigError(where + ": ratios must be sorted ascending");
      }
      prev = ratio;
      sweep.ratios.push_back(ratio);
    }
    if (js.contains("restarts")) {
      sweep.restarts = static_cast<int>(
          detail::number_field(js["restarts"], "sweep.restarts"));
      if (sweep.restarts < 1) {
        throw ConfigError("sweep.restarts: must be >= 1");
      }
    }
    cfg.sweep = sweep;
  }

  if (j.contains("simulate")) {
    const json& js = j["simulate"];
    ScenarioConfig::Simulate sim;
    sim.nu = static_cast<long>(
        detail::number_field(detail::require_field(js, "nu"), "simulate.nu"));
    if (sim.nu < 1) {
      throw ConfigError("simulate.nu: must be >= 1");
    }
    sim.batches = static_cast<int>(detail::number_field(
        detail::require_field(js, "batches"), "simulate.batches"));
    if (sim.batches < 2) {
      throw ConfigError("simulate.batches: must be >= 2");
    }
    if (js.contains("seed")) {
      sim.seed = js["seed"].get<std::uint64_t>();
    }
    cfg.simulate = sim;
  }

  if (j.contains("output")) {
    const json& jo = j["output"];
    ScenarioConfig::Output out;
    out.path = detail::require_field(jo, "path").get<std::string>();
    if (jo.contains("format")) {
      out.format = jo["format"].get<std::string>();
      if (out.format != "csv" && out.format != "json") {
        throw ConfigError("output.format: must be 'csv' or 'json'");
      }
    }
    cfg.output = out;
  }

  if (j.contains("custom")) {
    const json& jc = j["custom"];
    CustomTwoModeParams p;
    p.r1 = detail::number_field(detail::require_field(jc, "r1"), "custom.r1");
    p.varphi1 = jc.value("varphi1", 0.0);
    p.r2 = detail::number_field(detail::require_field(jc, "r2"), "custom.r2");
    p.varphi2 = jc.value("varphi2", 0.0);
    p.alpha1_re = jc.value("alpha1_re", 0.0);
    p.alpha1_im = jc.value("alpha1_im", 0.0);
    p.alpha2_re = jc.value("alpha2_re", 0.0);
    p.alpha2_im = jc.value("alpha2_im", 0.0);
    p.theta = jc.value("theta", 0.0);
    cfg.custom = p;
  }
  return cfg;
}

inline ScenarioConfig load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw ConfigError("cannot open config file '" + path + "'");
  }
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw ConfigError("config parse error: " + std::string(e.what()));
  }
  return parse_scenario(j);
}

inline SchemeSpec to_scheme_spec(const ScenarioConfig& cfg) {
  try {
    const SchemeKind kind = scheme_kind_from_string(cfg.scheme_kind);
    WeightVector w(cfg.weights);
    return SchemeSpec(kind, std::move(w), cfg.n_total, cfg.custom);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
}

inline Vec scenario_phases(const ScenarioConfig& cfg) {
  if (cfg.phases.empty()) {
    return Vec::Zero(static_cast<long>(cfg.weights.size()));
  }
  return Eigen::Map<const Vec>(cfg.phases.data(),
                               static_cast<long>(cfg.phases.size()));
}

// 12 significant digits, '.' decimal, no locale.
inline std::string format_value(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

struct BoundsRow {
  std::string name;
  double value = 0.0;
  std::string formula_ref;
};

inline std::string bounds_rows_to_csv(const std::vector<BoundsRow>& rows) {
  std::ostringstream os;
  os << "name,value,formula_ref\n";
  for (const auto& row : rows) {
    os << row.name << ',' << format_value(row.value) << ','
       << row.formula_ref << '\n';
  }
  return os.str();
}

inline json bounds_rows_to_json(const std::vector<BoundsRow>& rows) {
  json arr = json::array();
  for (const auto& row : rows) {
    arr.push_back({{"name", row.name},
                   {"value", row.value},
                   {"formula_ref", row.formula_ref}});
  }
  return json{{"report", arr}};
}

inline std::string sweep_rows_to_csv(const std::vector<SweepRow>& rows) {
  std::ostringstream os;
  os << "ratio,qcrb,theta_opt,r1,r2,a1,a2,converged\n";
  for (const auto& row : rows) {
    os << format_value(row.ratio) << ',' << format_value(row.qcrb) << ','
       << format_value(row.params.theta) << ',' << format_value(row.params.r1)
       << ',' << format_value(row.params.r2) << ','
       << format_value(row.params.a1_mag) << ','
       << format_value(row.params.a2_mag) << ','
       << (row.converged ? 1 : 0) << '\n';
  }
  return os.str();
}

inline json simulate_report_to_json(const SaturabilityReport& r) {
  return json{{"var_ratio_to_crb", r.var_ratio_to_crb},
              {"bias", r.bias},
              {"nu", r.nu},
              {"batches", r.batches},
              {"seed", r.seed},
              {"crb", r.crb}};
}

// Validating reader for the simulate report; emitted files must re-parse.
inline SaturabilityReport parse_simulate_report(const json& j) {
  SaturabilityReport r;
  r.var_ratio_to_crb = detail::number_field(
      detail::require_field(j, "var_ratio_to_crb"), "var_ratio_to_crb");
  r.bias = detail::number_field(detail::require_field(j, "bias"), "bias");
  r.nu = static_cast<long>(
      detail::number_field(detail::require_field(j, "nu"), "nu"));
  r.batches = static_cast<int>(
      detail::number_field(detail::require_field(j, "batches"), "batches"));
  r.seed = detail::require_field(j, "seed").get<std::uint64_t>();
  r.crb = detail::number_field(detail::require_field(j, "crb"), "crb");
  return r;
}

}  // namespace distsense
