// Command-line front end: bound tables, two-mode ratio sweeps, Monte Carlo
// saturability runs, and the photon-number GHZ comparison table.
//
// Exit codes: 0 success, 2 configuration error, 3 numerical failure.

#include "distsense/distsense.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>
#include <thread>
#include <vector>

namespace {

using namespace distsense;

int thread_budget() {
  if (const char* env = std::getenv("DISTSENSE_THREADS")) {
    const int requested = std::atoi(env);
    if (requested >= 1) {
      return requested;
    }
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw ConfigError("cannot open output file '" + path + "'");
  }
  out << text;
}

void emit(const std::optional<ScenarioConfig::Output>& output,
          const std::string& csv_text, const json& json_report) {
  if (!output) {
    std::cout << csv_text;
    return;
  }
  if (output->format == "json") {
    write_text(output->path, json_report.dump(2) + "\n");
  } else {
    write_text(output->path, csv_text);
  }
}

int cmd_bounds(const std::string& config_path) {
  const ScenarioConfig cfg = load_scenario(config_path);
  const SchemeSpec spec = to_scheme_spec(cfg);
  const WeightVector& w = spec.weights;
  const Vec phases = scenario_phases(cfg);

  std::vector<BoundsRow> rows;
  rows.push_back({"sql", sql_bound(w, cfg.n_total),
                  "sum_i w_i^2/(4 N_i) with N_i = |w_i| N"});
  rows.push_back({"product_squeezed", product_squeezed_bound(w, cfg.n_total),
                  "sum_i w_i^2/(8 N_i (N_i+1)) at the g-proportional split"});
  rows.push_back({"proposed", proposed_bound(w, cfg.n_total),
                  "sum_g |w_g|_1^2/(8 N_g (N_g+1)) at the group split"});
  rows.push_back({"heisenberg_envelope", heisenberg_envelope(w, cfg.n_total),
                  "(|w+|_1^(2/3) + |w-|_1^(2/3))^3/(8 N^2)"});
  const SchemeReport report = evaluate_scheme(spec, phases, w);
  rows.push_back({"scheme_qcrb", report.qcrb, "w^T H^+ w"});
  if (report.homodyne_ccrb) {
    rows.push_back({"scheme_homodyne_ccrb", *report.homodyne_ccrb,
                    "w^T F^+ w at refined homodyne angles"});
  }
  emit(cfg.output, bounds_rows_to_csv(rows), bounds_rows_to_json(rows));
  return 0;
}

int cmd_sweep(const std::string& config_path, const std::string& out_path) {
  const ScenarioConfig cfg = load_scenario(config_path);
  if (!cfg.sweep) {
    throw ConfigError("sweep: config lacks a sweep block");
  }
  if (cfg.weights.size() != 2) {
    throw ConfigError("sweep: exactly two weights required");
  }
  WeightVector w(cfg.weights);
  const auto& grid = cfg.sweep->ratios;
  const int restarts = cfg.sweep->restarts;

  std::vector<SweepRow> rows(grid.size());
  const int threads =
      std::max(1, std::min<int>(thread_budget(),
                                static_cast<int>(grid.size())));
  const auto run_range = [&](std::size_t begin, std::size_t stride) {
    for (std::size_t i = begin; i < grid.size(); i += stride) {
      const std::vector<double> single{grid[i]};
      rows[i] = sweep_ratio(w, cfg.n_total, single, restarts).front();
    }
  };
  if (threads == 1) {
    run_range(0, 1);
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) {
      pool.emplace_back(run_range, static_cast<std::size_t>(t),
                        static_cast<std::size_t>(threads));
    }
    for (auto& th : pool) {
      th.join();
    }
  }
  write_text(out_path, sweep_rows_to_csv(rows));
  return 0;
}

int cmd_simulate(const std::string& config_path, const std::string& out_path) {
  const ScenarioConfig cfg = load_scenario(config_path);
  if (!cfg.simulate) {
    throw ConfigError("simulate: config lacks a simulate block");
  }
  const SchemeSpec spec = to_scheme_spec(cfg);
  if (!build_probe(spec).is_zero_mean()) {
    throw ConfigError("simulate: displacement schemes are not supported");
  }
  const Vec phases = scenario_phases(cfg);
  const double bound = proposed_bound(spec.weights, cfg.n_total);
  const SaturabilityReport report = run_saturability(
      spec, spec.weights, phases, cfg.simulate->nu, cfg.simulate->batches,
      cfg.simulate->seed, bound, thread_budget());
  write_text(out_path, simulate_report_to_json(report).dump(2) + "\n");
  return 0;
}

int cmd_noon(int n) {
  std::cout << "kind,n_bar,mean_photon_1,mean_photon_2,correlation,"
               "qfim_diag,qfim_offdiag,bound\n";
  for (const GhzKind kind : {GhzKind::noon, GhzKind::nnoo}) {
    const FockStateTwoMode state = ghz_state(kind, n);
    const double c = fock_photon_correlation(state);
    const FisherMatrix h = fock_qfim(state);
    const double sign = kind == GhzKind::noon ? -1.0 : 1.0;
    const WeightVector w(std::vector<double>{1.0, sign});
    std::cout << (kind == GhzKind::noon ? "noon" : "nnoo") << ',' << n << ','
              << format_value(fock_mean_photon(state, 0)) << ','
              << format_value(fock_mean_photon(state, 1)) << ','
              << format_value(c) << ',' << format_value(h.matrix()(0, 0))
              << ',' << format_value(h.matrix()(0, 1)) << ','
              << format_value(fock_bound(state, w)) << '\n';
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Distributed Gaussian phase-sensing bounds and simulations"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_path;
  int noon_n = 1;

  auto* bounds_cmd =
      app.add_subcommand("bounds", "tabulate the bound hierarchy");
  bounds_cmd->add_option("--config", config_path, "scenario config (JSON)")
      ->required();

  auto* sweep_cmd =
      app.add_subcommand("sweep", "two-mode squeezing-ratio sweep");
  sweep_cmd->add_option("--config", config_path, "scenario config (JSON)")
      ->required();
  sweep_cmd->add_option("--out", out_path, "output CSV path")->required();

  auto* simulate_cmd =
      app.add_subcommand("simulate", "Monte Carlo saturability run");
  simulate_cmd->add_option("--config", config_path, "scenario config (JSON)")
      ->required();
  simulate_cmd->add_option("--out", out_path, "output JSON path")->required();

  auto* noon_cmd =
      app.add_subcommand("noon", "photon-number GHZ comparison table");
  noon_cmd->add_option("--n", noon_n, "photon number")
      ->required()
      ->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n";
    return 2;
  }

  try {
    if (bounds_cmd->parsed()) {
      return cmd_bounds(config_path);
    }
    if (sweep_cmd->parsed()) {
      return cmd_sweep(config_path, out_path);
    }
    if (simulate_cmd->parsed()) {
      return cmd_simulate(config_path, out_path);
    }
    if (noon_cmd->parsed()) {
      return cmd_noon(noon_n);
    }
  } catch (const distsense::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const distsense::UnsupportedInputError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const distsense::NotEstimableError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 3;
  } catch (const distsense::NumericalFailureError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
