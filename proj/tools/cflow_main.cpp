// Command-line front end: simulate scenarios, run convergence sweeps,
// reproduce the canned experiments, and compare snapshot files in W2.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "cflow/csv.hpp"
#include "cflow/experiments.hpp"
#include "cflow/wasserstein.hpp"

namespace {

using cflow::Errc;
using nlohmann::json;

// Exit codes: 0 success, 1 run ended without converging, 2 invalid input,
// 3 runtime failure, 4 size mismatch.
int exit_code(Errc code) {
  switch (code) {
    case Errc::InvalidConfig:
    case Errc::InvalidArgument:
    case Errc::InvalidSweep:
    case Errc::UnknownFigure:
    case Errc::InvalidResolution:
    case Errc::DimensionMismatch:
    case Errc::Io: return 2;
    case Errc::SizeMismatch:
    case Errc::SizeTooLarge: return 4;
    default: return 3;
  }
}

int report_error(const cflow::Error& err) {
  json j{{"error", std::string(cflow::to_string(err.code()))}, {"message", err.what()}};
  std::cerr << j.dump() << "\n";
  return exit_code(err.code());
}

std::string fixed12(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12f", v);
  return buf;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Particle simulator for interaction dynamics confined to positive-reach sets"};
  app.require_subcommand(1);

  std::string scenario_path;
  std::string out_dir = ".";
  unsigned workers = 0;

  auto* simulate = app.add_subcommand("simulate", "Run a scenario file and write trace/snapshot CSVs");
  simulate->add_option("scenario", scenario_path, "Scenario JSON file")->required()->check(CLI::ExistingFile);
  simulate->add_option("--out-dir", out_dir, "Directory for relative output paths");
  simulate->add_option("--workers", workers, "Force-evaluation threads (overrides the scenario)");

  std::vector<double> eps_list;
  auto* sweep_eps = app.add_subcommand("sweep-eps", "Epsilon sweep: terminal penalty moment vs eps");
  sweep_eps->add_option("scenario", scenario_path, "Base scenario (epsilon scheme)")->required()->check(CLI::ExistingFile);
  sweep_eps->add_option("--eps", eps_list, "Penalty values")->required();
  sweep_eps->add_option("--workers", workers, "Force-evaluation threads");

  std::vector<double> taus;
  double ref_tau = 0.0;
  auto* sweep_tau = app.add_subcommand("sweep-tau", "Step-size sweep: W2 error against a reference run");
  sweep_tau->add_option("scenario", scenario_path, "Base scenario (projected scheme, fixed final time)")
      ->required()
      ->check(CLI::ExistingFile);
  sweep_tau->add_option("--taus", taus, "Step sizes")->required();
  sweep_tau->add_option("--ref", ref_tau, "Reference step size")->required();
  sweep_tau->add_option("--workers", workers, "Force-evaluation threads");

  std::string figure;
  std::vector<std::uint64_t> seeds;
  auto* reproduce = app.add_subcommand("reproduce", "Run a canned experiment and print its summary");
  reproduce->add_option("figure", figure, "fig2, fig3, fig4 or fig5")->required();
  reproduce->add_option("--seed", seeds, "Seed override (repeatable for fig4)");
  reproduce->add_option("--out-dir", out_dir, "Directory for trace/snapshot CSVs");
  reproduce->add_option("--workers", workers, "Force-evaluation threads");

  std::string file_a, file_b;
  auto* w2 = app.add_subcommand("w2", "W2 distance between the last snapshots of two snapshot CSVs");
  w2->add_option("a", file_a)->required()->check(CLI::ExistingFile);
  w2->add_option("b", file_b)->required()->check(CLI::ExistingFile);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*simulate) {
      cflow::Scenario sc = cflow::load_scenario(scenario_path);
      if (workers > 0) sc.config.workers = workers;
      const cflow::Trace trace = cflow::run(sc.config, sc.domain, sc.potential, cflow::initial_state(sc));
      cflow::write_outputs(sc, trace, out_dir);
      json j{{"scenario", sc.name},
             {"termination", cflow::to_string(trace.termination)},
             {"tau", trace.tau},
             {"steps", trace.rows.empty() ? 0 : trace.rows.back().step},
             {"final_time", trace.final_state.time}};
      if (!trace.failure.empty()) j["failure"] = trace.failure;
      std::cout << j.dump(2) << "\n";
      switch (trace.termination) {
        case cflow::Termination::Converged:
        case cflow::Termination::FixedTimeReached: return 0;
        case cflow::Termination::MaxSteps: return 1;
        case cflow::Termination::Failed: return 3;
      }
    }
    if (*sweep_eps) {
      cflow::Scenario sc = cflow::load_scenario(scenario_path);
      if (workers > 0) sc.config.workers = workers;
      std::cout << cflow::to_json(cflow::sweep_eps(sc, eps_list)).dump(2) << "\n";
      return 0;
    }
    if (*sweep_tau) {
      cflow::Scenario sc = cflow::load_scenario(scenario_path);
      if (workers > 0) sc.config.workers = workers;
      std::cout << cflow::to_json(cflow::sweep_tau(sc, taus, ref_tau)).dump(2) << "\n";
      return 0;
    }
    if (*reproduce) {
      cflow::ReproduceOptions options;
      options.out_dir = std::filesystem::path(out_dir);
      options.workers = workers > 0 ? workers : 1;
      options.seeds = seeds;
      std::cout << cflow::reproduce(figure, options).dump(2) << "\n";
      return 0;
    }
    if (*w2) {
      const auto a = cflow::read_snapshots_csv(file_a);
      const auto b = cflow::read_snapshots_csv(file_b);
      if (a.empty() || b.empty()) throw cflow::Error(Errc::Io, "snapshot file holds no points");
      std::cout << fixed12(cflow::w2_assignment(a.back().positions, b.back().positions)) << "\n";
      return 0;
    }
  } catch (const cflow::Error& err) {
    return report_error(err);
  } catch (const std::exception& err) {
    std::cerr << json{{"error", "Internal"}, {"message", err.what()}}.dump() << "\n";
    return 3;
  }
  return 0;
}
