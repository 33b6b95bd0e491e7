#include "cflow/scenario.hpp"

#include <algorithm>
#include <fstream>
#include <initializer_list>
#include <string_view>

namespace cflow {

using nlohmann::json;

namespace {

[[noreturn]] void invalid(const std::string& what) { throw Error(Errc::InvalidConfig, what); }

void check_keys(const json& j, std::string_view context, std::initializer_list<std::string_view> allowed) {
  if (!j.is_object()) invalid(std::string(context) + ": expected an object");
  for (const auto& [key, value] : j.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      invalid(std::string(context) + ": unknown key '" + key + "'");
    }
  }
}

const json& require(const json& j, std::string_view context, const char* key) {
  if (!j.contains(key)) invalid(std::string(context) + ": missing key '" + key + "'");
  return j.at(key);
}

double number(const json& j, std::string_view context, const char* key) {
  const json& v = require(j, context, key);
  if (!v.is_number()) invalid(std::string(context) + "." + key + ": expected a number");
  return v.get<double>();
}

double number_or(const json& j, std::string_view context, const char* key, double fallback) {
  return j.contains(key) ? number(j, context, key) : fallback;
}

std::uint64_t integer(const json& j, std::string_view context, const char* key) {
  const json& v = require(j, context, key);
  if (!v.is_number_integer() || (v.is_number_integer() && !v.is_number_unsigned() && v.get<std::int64_t>() < 0)) {
    invalid(std::string(context) + "." + key + ": expected a nonnegative integer");
  }
  return v.get<std::uint64_t>();
}

std::string string(const json& j, std::string_view context, const char* key) {
  const json& v = require(j, context, key);
  if (!v.is_string()) invalid(std::string(context) + "." + key + ": expected a string");
  return v.get<std::string>();
}

std::vector<Point> points(const json& j, std::string_view context) {
  if (!j.is_array()) invalid(std::string(context) + ": expected an array of points");
  std::vector<Point> out;
  for (const json& p : j) out.push_back(parse_point(p));
  return out;
}

GridSpec parse_grid(const json& j, std::string_view context) {
  check_keys(j, context, {"kind", "lower", "upper", "dims", "jitter"});
  GridSpec g;
  g.lower = parse_point(require(j, context, "lower"));
  g.upper = parse_point(require(j, context, "upper"));
  const json& dims = require(j, context, "dims");
  if (!dims.is_array() || dims.size() != std::size_t(g.lower.dim)) {
    invalid(std::string(context) + ".dims: expected one count per dimension");
  }
  for (std::size_t k = 0; k < dims.size(); ++k) {
    if (!dims[k].is_number_unsigned()) invalid(std::string(context) + ".dims: expected positive integers");
    g.dims[k] = dims[k].get<std::size_t>();
  }
  g.jitter = number_or(j, context, "jitter", 0.0);
  return g;
}

InitialSpec parse_initial(const json& j) {
  constexpr std::string_view ctx = "initial";
  if (!j.is_object()) invalid("initial: expected an object");
  const std::string kind = string(j, ctx, "kind");
  if (kind == "uniform_box") {
    check_keys(j, ctx, {"kind", "lower", "upper", "count"});
    return UniformBox{parse_point(require(j, ctx, "lower")), parse_point(require(j, ctx, "upper")),
                      std::size_t(integer(j, ctx, "count"))};
  }
  if (kind == "perturbed_grid") return PerturbedGrid{parse_grid(j, ctx)};
  if (kind == "projected_perturbed_grid") return ProjectedPerturbedGrid{parse_grid(j, ctx)};
  if (kind == "points") {
    check_keys(j, ctx, {"kind", "points"});
    return ExplicitPoints{points(require(j, ctx, "points"), "initial.points")};
  }
  invalid("initial.kind: unknown sampler '" + kind + "'");
}

Scheme parse_scheme(const json& j) {
  constexpr std::string_view ctx = "scheme";
  if (!j.is_object()) invalid("scheme: expected an object");
  const std::string kind = string(j, ctx, "kind");
  if (kind == "epsilon") {
    check_keys(j, ctx, {"kind", "eps"});
    return EpsilonFlow{number(j, ctx, "eps")};
  }
  if (kind == "projected") {
    check_keys(j, ctx, {"kind"});
    return ProjectedFlow{};
  }
  invalid("scheme.kind: unknown scheme '" + kind + "'");
}

Stopping parse_stopping(const json& j) {
  constexpr std::string_view ctx = "stopping";
  if (!j.is_object()) invalid("stopping: expected an object");
  const std::string rule = string(j, ctx, "rule");
  if (rule == "grad_norm" || rule == "energy_rate") {
    check_keys(j, ctx, {"rule"});
    return Stopping{rule == "grad_norm" ? StopRule::GradNorm : StopRule::EnergyRate, 0.0};
  }
  if (rule == "fixed_time") {
    check_keys(j, ctx, {"rule", "final_time"});
    return Stopping{StopRule::FixedTime, number(j, ctx, "final_time")};
  }
  invalid("stopping.rule: unknown rule '" + rule + "'");
}

}  // namespace

Point parse_point(const json& j) {
  if (!j.is_array() || j.empty() || j.size() > 2) invalid("point: expected an array of 1 or 2 numbers");
  for (const json& c : j)
    if (!c.is_number()) invalid("point: coordinates must be numbers");
  return j.size() == 1 ? Point(j[0].get<double>()) : Point(j[0].get<double>(), j[1].get<double>());
}

Domain parse_domain(const json& j) {
  constexpr std::string_view ctx = "domain";
  if (!j.is_object()) invalid("domain: expected an object");
  const std::string kind = string(j, ctx, "kind");
  try {
    if (kind == "interval_union") {
      check_keys(j, ctx, {"kind", "intervals"});
      const json& list = require(j, ctx, "intervals");
      if (!list.is_array()) invalid("domain.intervals: expected an array");
      std::vector<Interval> intervals;
      for (const json& iv : list) {
        if (!iv.is_array() || iv.size() != 2 || !iv[0].is_number() || !iv[1].is_number()) {
          invalid("domain.intervals: expected [a, b] pairs");
        }
        intervals.push_back(Interval{iv[0].get<double>(), iv[1].get<double>()});
      }
      return Domain::interval_union(std::move(intervals));
    }
    if (kind == "disc") {
      check_keys(j, ctx, {"kind", "center", "radius"});
      return Domain::disc(parse_point(require(j, ctx, "center")), number(j, ctx, "radius"));
    }
    if (kind == "bean_boundary" || kind == "bean_interior") {
      check_keys(j, ctx, {"kind", "n", "reach"});
      const int n = int(integer(j, ctx, "n"));
      const double r = number_or(j, ctx, "reach", kBeanDefaultReach);
      return kind == "bean_boundary" ? sample_bean_boundary(n, r) : sample_bean_region(n, r);
    }
    if (kind == "circle") {
      check_keys(j, ctx, {"kind", "n", "center", "radius"});
      const Point center = j.contains("center") ? parse_point(j.at("center")) : Point(0.0, 0.0);
      return sample_circle(int(integer(j, ctx, "n")), center, number_or(j, ctx, "radius", 1.0));
    }
    if (kind == "polyline") {
      check_keys(j, ctx, {"kind", "vertices", "closed", "reach"});
      const json& closed = require(j, ctx, "closed");
      if (!closed.is_boolean()) invalid("domain.closed: expected a boolean");
      return Domain::polyline(points(require(j, ctx, "vertices"), "domain.vertices"), closed.get<bool>(),
                              number(j, ctx, "reach"));
    }
    if (kind == "region") {
      check_keys(j, ctx, {"kind", "vertices", "reach"});
      return Domain::region(points(require(j, ctx, "vertices"), "domain.vertices"), number(j, ctx, "reach"));
    }
  } catch (const Error& err) {
    if (err.code() == Errc::InvalidConfig) throw;
    invalid(std::string("domain: ") + err.what());
  }
  invalid("domain.kind: unknown kind '" + kind + "'");
}

Potential parse_potential(const json& j) {
  constexpr std::string_view ctx = "potential";
  if (!j.is_object()) invalid("potential: expected an object");
  const std::string kind = string(j, ctx, "kind");
  if (kind == "quadratic") {
    check_keys(j, ctx, {"kind"});
    return Potential::quadratic();
  }
  if (kind == "inverse_quadratic") {
    check_keys(j, ctx, {"kind", "sign", "scale"});
    try {
      return Potential::inverse_quadratic(number(j, ctx, "sign"), number(j, ctx, "scale"));
    } catch (const Error& err) {
      if (err.code() == Errc::InvalidConfig) throw;
      invalid(std::string("potential: ") + err.what());
    }
  }
  invalid("potential.kind: unknown kind '" + kind + "'");
}

Scenario parse_scenario(const json& j) {
  constexpr std::string_view ctx = "scenario";
  check_keys(j, ctx,
             {"version", "name", "domain", "potential", "scheme", "tau", "tol", "stopping", "max_steps",
              "snapshot_every", "seed", "workers", "tube_radius", "initial", "outputs"});
  if (integer(j, ctx, "version") != kScenarioVersion) {
    invalid("scenario.version: expected " + std::to_string(kScenarioVersion));
  }

  SchemeConfig config;
  config.scheme = parse_scheme(require(j, ctx, "scheme"));
  const json& tau = require(j, ctx, "tau");
  if (tau.is_string()) {
    if (tau.get<std::string>() != "auto") invalid("scenario.tau: expected a number or \"auto\"");
  } else if (tau.is_number()) {
    config.tau = tau.get<double>();
  } else {
    invalid("scenario.tau: expected a number or \"auto\"");
  }
  config.tol = number(j, ctx, "tol");
  config.stopping = parse_stopping(require(j, ctx, "stopping"));
  config.max_steps = std::size_t(integer(j, ctx, "max_steps"));
  config.snapshot_every = std::size_t(integer(j, ctx, "snapshot_every"));
  config.seed = integer(j, ctx, "seed");
  config.workers = j.contains("workers") ? unsigned(integer(j, ctx, "workers")) : 1u;
  config.tube_radius = number_or(j, ctx, "tube_radius", kInfinity);
  try {
    validate(config);
  } catch (const Error& err) {
    invalid(err.what());
  }

  const json& out = require(j, ctx, "outputs");
  check_keys(out, "outputs", {"trace", "snapshots"});
  OutputPaths outputs{string(out, "outputs", "trace"), string(out, "outputs", "snapshots")};

  return Scenario{string(j, ctx, "name"),
                  parse_domain(require(j, ctx, "domain")),
                  parse_potential(require(j, ctx, "potential")),
                  config,
                  parse_initial(require(j, ctx, "initial")),
                  std::move(outputs)};
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::Io, "cannot open scenario file " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& err) {
    invalid(path.string() + ": " + err.what());
  }
  return parse_scenario(j);
}

ParticleState initial_state(const Scenario& scenario) {
  return sample_initial(scenario.initial, scenario.domain, scenario.config.seed);
}

}  // namespace cflow
