#include "cflow/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "cflow/csv.hpp"
#include "cflow/wasserstein.hpp"

namespace cflow {

using nlohmann::json;

namespace {

constexpr double kIndeterminateError = 1e-14;

// Canned experiment scenarios. The grid extents, jitters and fig3 seed are
// choices of this project; the remaining parameters are the published ones.
const char* const kFig2 = R"({
  "version": 1,
  "name": "fig2_1d",
  "domain": {"kind": "interval_union", "intervals": [[-1, 1], [1.5, 1.5]]},
  "potential": {"kind": "quadratic"},
  "scheme": {"kind": "epsilon", "eps": 0.1},
  "tau": "auto",
  "tol": 1e-9,
  "stopping": {"rule": "grad_norm"},
  "max_steps": 2000000,
  "snapshot_every": 100,
  "seed": 7,
  "initial": {"kind": "uniform_box", "lower": [-1.75], "upper": [1.75], "count": 100},
  "outputs": {"trace": "fig2_1d_trace.csv", "snapshots": "fig2_1d_snapshots.csv"}
})";

const char* const kFig3a = R"({
  "version": 1,
  "name": "fig3a_disc_short_range",
  "domain": {"kind": "disc", "center": [0, 0], "radius": 1},
  "potential": {"kind": "inverse_quadratic", "sign": 1, "scale": 10},
  "scheme": {"kind": "projected"},
  "tau": "auto",
  "tol": 1e-12,
  "stopping": {"rule": "fixed_time", "final_time": 200},
  "max_steps": 2000000,
  "snapshot_every": 100,
  "seed": 3,
  "initial": {"kind": "perturbed_grid", "lower": [-0.7, -0.7], "upper": [0.7, 0.7], "dims": [14, 14], "jitter": 0.05},
  "outputs": {"trace": "fig3a_trace.csv", "snapshots": "fig3a_snapshots.csv"}
})";

const char* const kFig3b = R"({
  "version": 1,
  "name": "fig3b_disc_long_range",
  "domain": {"kind": "disc", "center": [0, 0], "radius": 1},
  "potential": {"kind": "inverse_quadratic", "sign": 1, "scale": 1},
  "scheme": {"kind": "projected"},
  "tau": "auto",
  "tol": 1e-12,
  "stopping": {"rule": "fixed_time", "final_time": 200},
  "max_steps": 2000000,
  "snapshot_every": 100,
  "seed": 3,
  "initial": {"kind": "perturbed_grid", "lower": [-0.7, -0.7], "upper": [0.7, 0.7], "dims": [14, 14], "jitter": 0.05},
  "outputs": {"trace": "fig3b_trace.csv", "snapshots": "fig3b_snapshots.csv"}
})";

const char* const kFig4 = R"({
  "version": 1,
  "name": "fig4_bean_interior",
  "domain": {"kind": "bean_interior", "n": 4096, "reach": 0.035},
  "potential": {"kind": "inverse_quadratic", "sign": 1, "scale": 1},
  "scheme": {"kind": "projected"},
  "tau": "auto",
  "tol": 2e-10,
  "stopping": {"rule": "energy_rate"},
  "max_steps": 5000000,
  "snapshot_every": 1000,
  "seed": 11,
  "initial": {"kind": "projected_perturbed_grid", "lower": [-0.95, -0.42], "upper": [0.95, 0.42], "dims": [14, 14], "jitter": 0.03},
  "outputs": {"trace": "fig4_trace.csv", "snapshots": "fig4_snapshots.csv"}
})";

const char* const kFig5 = R"({
  "version": 1,
  "name": "fig5_bean_boundary",
  "domain": {"kind": "bean_boundary", "n": 4096, "reach": 0.035},
  "potential": {"kind": "inverse_quadratic", "sign": -1, "scale": 1},
  "scheme": {"kind": "projected"},
  "tau": "auto",
  "tol": 1e-9,
  "stopping": {"rule": "fixed_time", "final_time": 28},
  "max_steps": 2000000,
  "snapshot_every": 100,
  "seed": 13,
  "initial": {"kind": "projected_perturbed_grid", "lower": [-0.95, -0.42], "upper": [0.95, 0.42], "dims": [14, 14], "jitter": 0.03},
  "outputs": {"trace": "fig5_trace.csv", "snapshots": "fig5_snapshots.csv"}
})";

std::vector<double> sorted_controls(std::vector<double> values, const char* what) {
  if (values.size() < 3) throw Error(Errc::InvalidSweep, std::string(what) + " sweep needs at least 3 values");
  for (double v : values)
    if (!(v > 0.0) || !std::isfinite(v)) throw Error(Errc::InvalidSweep, std::string(what) + " values must be positive");
  std::sort(values.begin(), values.end(), std::greater<>());
  for (std::size_t k = 0; k + 1 < values.size(); ++k) {
    if (!(values[k] > values[k + 1])) throw Error(Errc::InvalidSweep, std::string(what) + " values must be distinct");
  }
  return values;
}

void fit_rows(SweepReport& report, bool use_w2) {
  std::vector<double> x, y;
  for (const SweepRow& r : report.rows) {
    const auto& v = use_w2 ? r.w2_error : r.metric;
    if (v && *v > 0.0) {
      x.push_back(r.control);
      y.push_back(*v);
    }
  }
  if (x.size() >= 3) report.fit = fit_loglog(x, y);
}

json trace_json(const Trace& trace) {
  json j;
  j["termination"] = to_string(trace.termination);
  if (!trace.failure.empty()) j["failure"] = trace.failure;
  j["tau"] = trace.tau;
  j["steps"] = trace.rows.empty() ? 0 : trace.rows.back().step;
  j["final_time"] = trace.final_state.time;
  if (!trace.rows.empty()) {
    j["final_energy"] = trace.rows.back().energy;
    j["final_grad_norm"] = trace.rows.back().grad_norm;
    j["final_mean_sq_dist"] = trace.rows.back().mean_sq_dist;
  }
  return j;
}

Scenario canned(std::string_view name, std::optional<std::uint64_t> seed, unsigned workers) {
  Scenario sc = parse_scenario(canned_scenario_json(name));
  if (seed) sc.config.seed = *seed;
  sc.config.workers = workers;
  return sc;
}

Trace run_scenario(const Scenario& sc, const ReproduceOptions& options, const std::string& suffix = "") {
  Trace trace = run(sc.config, sc.domain, sc.potential, initial_state(sc));
  if (options.out_dir) {
    Scenario named = sc;
    if (!suffix.empty()) {
      named.outputs.trace = sc.name + suffix + "_trace.csv";
      named.outputs.snapshots = sc.name + suffix + "_snapshots.csv";
    }
    write_outputs(named, trace, *options.out_dir);
  }
  return trace;
}

// Sorted 1D positions split where consecutive gaps exceed `threshold`.
json clusters_1d(std::vector<double> xs, double threshold) {
  std::sort(xs.begin(), xs.end());
  json out = json::array();
  std::size_t start = 0;
  for (std::size_t k = 1; k <= xs.size(); ++k) {
    if (k == xs.size() || xs[k] - xs[k - 1] > threshold) {
      const double mean = std::accumulate(xs.begin() + long(start), xs.begin() + long(k), 0.0) / double(k - start);
      out.push_back({{"count", k - start}, {"min", xs[start]}, {"max", xs[k - 1]}, {"mean", mean}});
      start = k;
    }
  }
  return out;
}

json summarize_fig2(const Scenario& sc, const Trace& trace) {
  json s = trace_json(trace);
  std::vector<double> xs;
  bool in_bounds = true;
  for (const Point& p : trace.final_state.positions) {
    xs.push_back(p[0]);
    const bool inside = (p[0] >= -1.1 && p[0] <= 1.1) || (p[0] >= 1.4 && p[0] <= 1.6);
    in_bounds = in_bounds && inside;
  }
  s["scenario"] = sc.name;
  s["clusters"] = clusters_1d(xs, 0.05);
  s["penalty_moment"] = trace.rows.empty() ? 0.0 : trace.rows.back().mean_sq_dist;
  s["eps"] = std::get<EpsilonFlow>(sc.config.scheme).eps;
  s["all_in_band"] = in_bounds;
  s["energy_nonincreasing"] = energy_nonincreasing(trace);
  return s;
}

json summarize_fig3(const Scenario& sc, const Trace& trace) {
  json s = trace_json(trace);
  s["scenario"] = sc.name;
  s["potential"] = sc.potential.describe();
  const auto& disc = *sc.domain.as<ClosedDisc>();
  std::vector<double> angles;
  for (const Point& p : trace.final_state.positions) {
    const Point rel = p - disc.center;
    if (norm(rel) >= disc.radius - kOnDomainTol) angles.push_back(std::atan2(rel[1], rel[0]));
  }
  const double n = double(trace.final_state.size());
  s["boundary_fraction"] = double(angles.size()) / n;
  if (angles.size() >= 2) {
    std::sort(angles.begin(), angles.end());
    const double uniform_gap = 2.0 * std::numbers::pi / double(angles.size());
    double max_dev = 0.0, sum_sq = 0.0;
    for (std::size_t k = 0; k < angles.size(); ++k) {
      const double gap = k + 1 < angles.size() ? angles[k + 1] - angles[k]
                                               : angles.front() + 2.0 * std::numbers::pi - angles.back();
      const double dev = std::abs(gap - uniform_gap) / uniform_gap;
      max_dev = std::max(max_dev, dev);
      sum_sq += dev * dev;
    }
    s["gap_discrepancy_max"] = max_dev;
    s["gap_discrepancy_rms"] = std::sqrt(sum_sq / double(angles.size()));
  }
  return s;
}

json summarize_fig4(const Scenario& sc, const Trace& trace) {
  json s = trace_json(trace);
  s["seed"] = sc.config.seed;
  s["particles"] = trace.final_state.size();
  s["energy_with_self"] = interaction_energy(trace.final_state, sc.potential);
  s["energy_without_self"] = interaction_energy_without_self(trace.final_state, sc.potential);
  s["boundary_fraction"] = [&] {
    const auto& boundary = sc.domain.as<PolygonRegion>()->boundary;
    const Domain curve = Domain::polyline(boundary.vertices, true, boundary.declared_reach);
    std::size_t on = 0;
    for (const Point& p : trace.final_state.positions) on += on_domain(curve, p) ? 1 : 0;
    return double(on) / double(trace.final_state.size());
  }();
  return s;
}

json summarize_fig5(const Scenario& sc, const Trace& trace) {
  json s = trace_json(trace);
  s["scenario"] = sc.name;
  s["seed"] = sc.config.seed;
  constexpr double kLink = 0.05;
  json history = json::array();
  for (const Snapshot& snap : trace.snapshots) {
    history.push_back({{"time", snap.time}, {"clusters", count_clusters(snap.positions, kLink)}});
  }
  s["cluster_link_length"] = kLink;
  s["cluster_history"] = history;
  s["final_clusters"] = count_clusters(trace.final_state.positions, kLink);
  return s;
}

}  // namespace

LogLogFit fit_loglog(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw Error(Errc::InvalidArgument, "fit needs >= 2 paired points");
  const double n = double(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    mx += std::log(x[k]);
    my += std::log(y[k]);
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    const double dx = std::log(x[k]) - mx;
    sxx += dx * dx;
    sxy += dx * (std::log(y[k]) - my);
  }
  if (!(sxx > 0.0)) throw Error(Errc::InvalidArgument, "fit needs distinct abscissae");
  LogLogFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double rss = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    const double r = std::log(y[k]) - (fit.intercept + fit.slope * std::log(x[k]));
    rss += r * r;
  }
  fit.residual = std::sqrt(rss / n);
  return fit;
}

json to_json(const SweepReport& report) {
  json rows = json::array();
  for (const SweepRow& r : report.rows) {
    json row{{report.control_name, r.control}, {"status", r.status}};
    row["metric"] = r.metric ? json(*r.metric) : json(nullptr);
    if (report.control_name == "tau") row["w2_error"] = r.w2_error ? json(*r.w2_error) : json(nullptr);
    rows.push_back(row);
  }
  json j{{"control", report.control_name}, {"rows", rows}};
  if (report.fit) {
    j["slope"] = report.fit->slope;
    j["intercept"] = report.fit->intercept;
    j["residual"] = report.fit->residual;
  } else {
    j["slope"] = nullptr;
  }
  if (report.control_name == "tau") {
    json orders = json::array();
    for (const auto& p : report.orders) orders.push_back(p ? json(*p) : json("indeterminate"));
    j["orders"] = orders;
  }
  return j;
}

SweepReport sweep_eps(const Scenario& base, std::vector<double> eps_list) {
  if (!std::holds_alternative<EpsilonFlow>(base.config.scheme)) {
    throw Error(Errc::InvalidSweep, "eps sweep needs the epsilon scheme");
  }
  eps_list = sorted_controls(std::move(eps_list), "eps");
  const ParticleState initial = initial_state(base);

  SweepReport report;
  report.control_name = "eps";
  for (double eps : eps_list) {
    SchemeConfig cfg = base.config;
    cfg.scheme = EpsilonFlow{eps};
    cfg.stopping = Stopping{StopRule::GradNorm, 0.0};
    SweepRow row;
    row.control = eps;
    try {
      const Trace trace = run(cfg, base.domain, base.potential, initial);
      row.status = trace.failure.empty() ? to_string(trace.termination) : trace.failure;
      if (trace.termination == Termination::Converged) row.metric = trace.rows.back().mean_sq_dist;
    } catch (const Error& err) {
      row.status = err.what();
    }
    report.rows.push_back(row);
  }
  fit_rows(report, false);
  return report;
}

SweepReport sweep_tau(const Scenario& base, std::vector<double> taus, double reference_tau) {
  if (!std::holds_alternative<ProjectedFlow>(base.config.scheme)) {
    throw Error(Errc::InvalidSweep, "tau sweep needs the projected scheme");
  }
  if (base.config.stopping.rule != StopRule::FixedTime) {
    throw Error(Errc::InvalidSweep, "tau sweep needs a fixed final time");
  }
  taus = sorted_controls(std::move(taus), "tau");
  if (!(reference_tau > 0.0)) throw Error(Errc::InvalidSweep, "reference tau must be positive");
  if (std::find(taus.begin(), taus.end(), reference_tau) != taus.end()) {
    throw Error(Errc::InvalidSweep, "tau list contains the reference tau");
  }
  if (reference_tau > taus.back() / 8.0) throw Error(Errc::InvalidSweep, "reference tau must be <= min(tau)/8");

  const ParticleState initial = initial_state(base);
  SchemeConfig ref_cfg = base.config;
  ref_cfg.tau = reference_tau;
  ref_cfg.max_steps = std::max(ref_cfg.max_steps, std::size_t(std::ceil(base.config.stopping.final_time / reference_tau)) + 1);
  const Trace reference = run(ref_cfg, base.domain, base.potential, initial);
  if (reference.termination != Termination::FixedTimeReached) {
    throw Error(Errc::InvalidSweep, "reference run did not reach the final time: " +
                                        (reference.failure.empty() ? to_string(reference.termination) : reference.failure));
  }

  SweepReport report;
  report.control_name = "tau";
  for (double tau : taus) {
    SchemeConfig cfg = base.config;
    cfg.tau = tau;
    SweepRow row;
    row.control = tau;
    try {
      const Trace trace = run(cfg, base.domain, base.potential, initial);
      row.status = trace.failure.empty() ? to_string(trace.termination) : trace.failure;
      if (trace.termination == Termination::FixedTimeReached) {
        row.metric = trace.rows.back().energy;
        row.w2_error = w2_assignment(trace.final_state.positions, reference.final_state.positions);
      }
    } catch (const Error& err) {
      row.status = err.what();
    }
    report.rows.push_back(row);
  }
  for (std::size_t k = 0; k + 1 < report.rows.size(); ++k) {
    const auto& a = report.rows[k];
    const auto& b = report.rows[k + 1];
    if (a.w2_error && b.w2_error && *a.w2_error >= kIndeterminateError && *b.w2_error >= kIndeterminateError) {
      report.orders.push_back(std::log(*a.w2_error / *b.w2_error) / std::log(a.control / b.control));
    } else {
      report.orders.push_back(std::nullopt);
    }
  }
  fit_rows(report, true);
  return report;
}

std::size_t count_clusters(std::span<const Point> positions, double threshold) {
  const std::size_t n = positions.size();
  std::vector<std::size_t> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::size_t i) {
    while (parent[i] != i) i = parent[i] = parent[parent[i]];
    return i;
  };
  std::size_t clusters = n;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (norm(positions[i] - positions[j]) <= threshold) {
        const std::size_t a = find(i), b = find(j);
        if (a != b) {
          parent[a] = b;
          --clusters;
        }
      }
    }
  }
  return clusters;
}

std::vector<std::string> canned_scenario_names() { return {"fig2", "fig3a", "fig3b", "fig4", "fig5"}; }

json canned_scenario_json(std::string_view name) {
  if (name == "fig2") return json::parse(kFig2);
  if (name == "fig3a") return json::parse(kFig3a);
  if (name == "fig3b") return json::parse(kFig3b);
  if (name == "fig4") return json::parse(kFig4);
  if (name == "fig5") return json::parse(kFig5);
  throw Error(Errc::UnknownFigure, "no canned scenario '" + std::string(name) + "'");
}

void write_outputs(const Scenario& scenario, const Trace& trace, const std::filesystem::path& dir) {
  auto resolve = [&](const std::string& p) {
    const std::filesystem::path path(p);
    return path.is_absolute() ? path : dir / path;
  };
  write_file_atomic(resolve(scenario.outputs.trace), trace_csv(trace));
  write_file_atomic(resolve(scenario.outputs.snapshots), snapshots_csv(trace.snapshots));
}

json reproduce(std::string_view figure, const ReproduceOptions& options) {
  auto seed_at = [&](std::size_t k) -> std::optional<std::uint64_t> {
    if (k < options.seeds.size()) return options.seeds[k];
    return std::nullopt;
  };

  if (figure == "fig2") {
    const Scenario sc = canned("fig2", seed_at(0), options.workers);
    json s = summarize_fig2(sc, run_scenario(sc, options));
    s["figure"] = "fig2";
    return s;
  }
  if (figure == "fig3") {
    json runs = json::array();
    for (const char* name : {"fig3a", "fig3b"}) {
      const Scenario sc = canned(name, seed_at(0), options.workers);
      runs.push_back(summarize_fig3(sc, run_scenario(sc, options)));
    }
    return json{{"figure", "fig3"}, {"runs", runs}};
  }
  if (figure == "fig4") {
    std::vector<std::uint64_t> seeds = options.seeds;
    if (seeds.empty()) seeds = {11, 13};
    json runs = json::array();
    for (std::uint64_t seed : seeds) {
      const Scenario sc = canned("fig4", seed, options.workers);
      runs.push_back(summarize_fig4(sc, run_scenario(sc, options, "_seed" + std::to_string(seed))));
    }
    return json{{"figure", "fig4"}, {"runs", runs}};
  }
  if (figure == "fig5") {
    const Scenario sc = canned("fig5", seed_at(0), options.workers);
    json s = summarize_fig5(sc, run_scenario(sc, options));
    s["figure"] = "fig5";
    return s;
  }
  throw Error(Errc::UnknownFigure, "unknown figure '" + std::string(figure) + "' (expected fig2, fig3, fig4, fig5)");
}

}  // namespace cflow
