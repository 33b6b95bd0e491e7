#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "cflow/scenario.hpp"

namespace cflow {

struct LogLogFit {
  double slope = 0.0;
  double intercept = 0.0;
  double residual = 0.0;  // root-mean-square residual in log space
};

/// Least-squares line through (log x, log y); needs >= 2 points.
LogLogFit fit_loglog(std::span<const double> x, std::span<const double> y);

struct SweepRow {
  double control = 0.0;            // eps or tau
  std::optional<double> metric;    // terminal penalty moment (eps) / final energy (tau)
  std::optional<double> w2_error;  // tau sweeps only
  std::string status;              // termination or failure text
};

struct SweepReport {
  std::string control_name;
  std::vector<SweepRow> rows;
  std::optional<LogLogFit> fit;
  /// Observed orders log(e_k / e_{k+1}) / log(tau_k / tau_{k+1}); empty when
  /// either error is below 1e-14.
  std::vector<std::optional<double>> orders;
};

nlohmann::json to_json(const SweepReport& report);

/// Runs the epsilon flow to gradient-norm convergence for every eps (>= 3
/// distinct values) from one initial state and fits log m(eps) against
/// log eps, m = (1/N) sum d_M(x_i)^2 at termination.
SweepReport sweep_eps(const Scenario& base, std::vector<double> eps_list);

/// Runs the projected scheme to the base scenario's fixed final time for
/// every tau and for the reference step, all from one initial state, and
/// reports W2 errors against the reference and observed orders.
SweepReport sweep_tau(const Scenario& base, std::vector<double> taus, double reference_tau);

/// Single-linkage clusters with link length `threshold`.
std::size_t count_clusters(std::span<const Point> positions, double threshold);

/// Canned scenario JSON for the reproducible experiments: fig2, fig3a,
/// fig3b, fig4, fig5.
nlohmann::json canned_scenario_json(std::string_view name);
std::vector<std::string> canned_scenario_names();

struct ReproduceOptions {
  std::optional<std::filesystem::path> out_dir;  // write traces/snapshots when set
  unsigned workers = 1;
  std::vector<std::uint64_t> seeds;  // overrides the canned seed(s) when nonempty
};

/// Runs one of fig2, fig3, fig4, fig5 and returns its summary.
nlohmann::json reproduce(std::string_view figure, const ReproduceOptions& options = {});

/// Writes trace and snapshot CSVs named by the scenario's output paths,
/// relative to `dir` when the paths are relative.
void write_outputs(const Scenario& scenario, const Trace& trace, const std::filesystem::path& dir);

}  // namespace cflow
