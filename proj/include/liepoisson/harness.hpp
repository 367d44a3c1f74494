#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "liepoisson/core.hpp"
#include "liepoisson/integrators.hpp"
#include "liepoisson/models.hpp"
#include "liepoisson/poisson.hpp"

// Study front end: configure model + integrator, run trajectories, estimate
// convergence orders and Poisson defects, compare integrator families, and
// serialize reports as CSV or JSON. Reports are deterministic; wall time is
// measured around stepping only and appears only in compare tables.

namespace liepoisson {

enum class StudyKind { run, order, defect, compare };
enum class OutputFormat { csv, json };

struct StudyConfig {
  std::string model = "rigidbody";
  Vec3 inertia = Vec3(1.0, 2.0, 3.0);
  std::string integrator = "midpoint";
  std::string scaling = "full";  // retraction-?: "half" or "full"
  Vec3 mu0 = Vec3(1.0, 0.5, -0.3);
  double h = 0.05;
  int steps = 100;
  std::vector<double> h_list;
  SolverSettings solver;
  double ref_tol = 1e-12;
  double fd_step = 1e-6;
  std::string out;  // empty = stdout
  OutputFormat format = OutputFormat::csv;
  StudyKind kind = StudyKind::run;
  std::vector<std::string> compare_integrators;
};

// ---------------------------------------------------------------------------
// Registry

inline const std::vector<std::string>& registered_integrators() {
  static const std::vector<std::string> names = {
      "euler",        "midpoint",     "dep-rigid",  "dlp",
      "retraction-h", "retraction-l", "collective", "dgrad-mean",
      "dgrad-mid",    "hj1",          "hj2",        "reference"};
  return names;
}

inline StepMap build_integrator(const StudyConfig& cfg) {
  if (cfg.model != "rigidbody") {
    throw ConfigError("unknown model '" + cfg.model + "' (available: rigidbody)");
  }
  RetractionScaling scaling;
  if (cfg.scaling == "half") {
    scaling = RetractionScaling::half;
  } else if (cfg.scaling == "full") {
    scaling = RetractionScaling::full;
  } else {
    throw ConfigError("unknown scaling '" + cfg.scaling + "' (half|full)");
  }

  RigidBody body(cfg.inertia);
  const PoissonSystem sys = rigid_body_system(body);
  const SolverSettings& s = cfg.solver;
  const std::string& n = cfg.integrator;

  if (n == "euler") return explicit_euler_step(sys, s);
  if (n == "midpoint") return midpoint_step(sys, s);
  if (n == "dep-rigid") return discrete_ep_rigid_step(body, s);
  if (n == "dlp") return lie_euler_lp_step(body, s);
  if (n == "retraction-h") {
    return retraction_lp_step(body, RetractionVariant::hamiltonian, scaling, s);
  }
  if (n == "retraction-l") {
    return retraction_lp_step(body, RetractionVariant::lagrangian, scaling, s);
  }
  if (n == "collective") return collective_step(body, s);
  if (n == "dgrad-mean") {
    return discrete_gradient_step(sys, DiscreteGradientKind::mean_value, s);
  }
  if (n == "dgrad-mid") {
    return discrete_gradient_step(sys, DiscreteGradientKind::midpoint, s);
  }
  if (n == "hj1") return hj_generating_step(body, 1, s);
  if (n == "hj2") return hj_generating_step(body, 2, s);
  if (n == "reference") {
    const double tol = cfg.ref_tol;
    return make_plain_step_map("reference", sys, s, [sys, tol](const VecX& z, double h) {
      return reference_flow(sys, z, h, tol);
    });
  }
  std::string known;
  for (const auto& r : registered_integrators()) known += (known.empty() ? "" : ", ") + r;
  throw ConfigError("unknown integrator '" + n + "' (available: " + known + ")");
}

// ---------------------------------------------------------------------------
// Engines

/// Repeated StepMap application with per-step diagnostics. The internal state
/// is lifted once and carried across steps; `steps` may be zero, which yields
/// a trajectory containing only the initial state. Wall time accumulates
/// around `advance` calls only.
inline Trajectory integrate(const StepMap& map, const VecX& mu0, double h, int steps,
                            double* wall_seconds = nullptr) {
  if (!(h > 0.0)) throw std::domain_error("integrate: h must be positive");
  if (steps < 0) throw std::domain_error("integrate: steps must be nonnegative");
  Trajectory traj;
  traj.times.reserve(steps + 1);
  traj.states.reserve(steps + 1);
  traj.diagnostics.reserve(steps + 1);

  const auto record = [&](int k, const VecX& mu) {
    StepDiagnostics d;
    d.hamiltonian = map.system.hamiltonian(mu);
    for (const auto& c : map.system.casimirs) d.casimirs.push_back(c.value(mu));
    d.orbit_radius = mu.norm();
    traj.times.push_back(k * h);
    traj.states.push_back(mu);
    traj.diagnostics.push_back(std::move(d));
  };

  VecX state = map.lift(mu0);
  record(0, map.read_out(state));
  double acc = 0.0;
  for (int k = 1; k <= steps; ++k) {
    const auto t0 = std::chrono::steady_clock::now();
    try {
      state = map.advance(state, h);
    } catch (const NonConvergenceError& e) {
      throw NonConvergenceError("step " + std::to_string(k) + ": " + e.what(),
                                e.residual, e.iterations);
    }
    acc += std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    record(k, map.read_out(state));
  }
  if (wall_seconds) *wall_seconds = acc;
  return traj;
}

struct LogLogFit {
  double slope = 0.0;
  double residual = 0.0;  // RMS residual of the straight-line fit in log-log
  int points_used = 0;
};

/// Least-squares slope of log(value) against log(h). Points at or below
/// `floor` are excluded; fewer than three usable points is a diagnostic
/// error, not a number.
inline LogLogFit fit_loglog(const std::vector<std::pair<double, double>>& points,
                            double floor) {
  std::vector<std::pair<double, double>> logs;
  for (const auto& [h, v] : points) {
    if (v > floor) logs.emplace_back(std::log(h), std::log(v));
  }
  if (logs.size() < 3) {
    char msg[96];
    std::snprintf(msg, sizeof msg,
                  "log-log fit: fewer than 3 points above the floor %.1e", floor);
    throw StudyError(msg);
  }
  double mx = 0.0, my = 0.0;
  for (const auto& [x, y] : logs) {
    mx += x;
    my += y;
  }
  mx /= logs.size();
  my /= logs.size();
  double sxx = 0.0, sxy = 0.0;
  for (const auto& [x, y] : logs) {
    sxx += (x - mx) * (x - mx);
    sxy += (x - mx) * (y - my);
  }
  const double slope = sxy / sxx;
  const double intercept = my - slope * mx;
  double ss = 0.0;
  for (const auto& [x, y] : logs) {
    const double r = y - (slope * x + intercept);
    ss += r * r;
  }
  return {slope, std::sqrt(ss / logs.size()), static_cast<int>(logs.size())};
}

inline constexpr double kConvergenceErrorFloor = 1e-13;
inline constexpr double kDefectFloor = 1e-8;  // finite-difference Jacobian noise

/// Terminal error against reference_flow at T for each step size. Step counts
/// are rounded so every run lands exactly at T.
inline std::vector<std::pair<double, double>> convergence_points(
    const StepMap& map, const VecX& mu0, double T, const std::vector<double>& h_list,
    double ref_tol = 1e-12) {
  const VecX target = reference_flow(map.system, mu0, T, ref_tol);
  std::vector<std::pair<double, double>> points;
  for (const double h : h_list) {
    const int steps = std::max(1, static_cast<int>(std::llround(T / h)));
    const double h_eff = T / steps;
    const Trajectory traj = integrate(map, mu0, h_eff, steps);
    points.emplace_back(h_eff, (traj.states.back() - target).norm());
  }
  return points;
}

/// Poisson defect of the step map at the base point for each step size.
inline std::vector<std::pair<double, double>> defect_points(
    const StepMap& map, const VecX& z, const std::vector<double>& h_list,
    double fd_step = 1e-6) {
  std::vector<std::pair<double, double>> points;
  for (const double h : h_list) points.emplace_back(h, poisson_defect(map, z, h, fd_step));
  return points;
}

// ---------------------------------------------------------------------------
// Reports

struct StudyRow {
  int step = 0;
  double t = 0.0;
  Vec3 mu = Vec3::Zero();
  double hamiltonian = 0.0;
  double casimir = 0.0;
  double orbit_err = 0.0;
};

struct StudySummary {
  double h_drift_max = 0.0;
  double casimir_drift_max = 0.0;
  double orbit_err_max = 0.0;
  std::optional<double> slope;
  std::optional<double> slope_residual;
};

struct RunReport {
  StudyConfig config;
  std::vector<StudyRow> rows;
  StudySummary summary;
  Trajectory trajectory;
};

struct SweepReport {
  StudyConfig config;
  std::string value_name;  // "terminal_error" or "defect"
  std::vector<std::pair<double, double>> points;
  StudySummary summary;
};

struct CompareRow {
  std::string integrator;
  double terminal_error = 0.0;
  double h_drift = 0.0;
  double casimir_drift = 0.0;
  double orbit_err = 0.0;
  double wall_seconds = 0.0;
};

struct CompareReport {
  StudyConfig config;
  std::vector<CompareRow> rows;
};

inline void validate_config(const StudyConfig& cfg) {
  if (!(cfg.h > 0.0)) throw ConfigError("h must be positive");
  if (cfg.steps < 1) throw ConfigError("steps must be at least 1");
  if (!(cfg.solver.tolerance > 0.0)) throw ConfigError("tolerance must be positive");
  if (cfg.solver.max_iterations < 1) throw ConfigError("max-iter must be at least 1");
  if (!(cfg.inertia.minCoeff() > 0.0)) throw ConfigError("inertia components must be positive");
  const auto& names = registered_integrators();
  if (std::find(names.begin(), names.end(), cfg.integrator) == names.end() &&
      cfg.kind != StudyKind::compare) {
    throw ConfigError("unknown integrator '" + cfg.integrator + "'");
  }
}

inline void validate_h_list(const std::vector<double>& h_list) {
  if (h_list.size() < 3) throw ConfigError("h-list needs at least 3 entries");
  for (std::size_t i = 0; i < h_list.size(); ++i) {
    if (!(h_list[i] > 0.0)) throw ConfigError("h-list entries must be positive");
    if (i > 0 && !(h_list[i] < h_list[i - 1])) {
      throw ConfigError("h-list must be strictly decreasing");
    }
  }
}

inline RunReport run_trajectory(const StudyConfig& cfg) {
  validate_config(cfg);
  const StepMap map = build_integrator(cfg);
  const Trajectory traj = integrate(map, to_dynamic(cfg.mu0), cfg.h, cfg.steps);

  RunReport report;
  report.config = cfg;
  report.trajectory = traj;
  const double h0 = traj.diagnostics.front().hamiltonian;
  const double c0 = traj.diagnostics.front().casimirs.empty()
                        ? 0.0
                        : traj.diagnostics.front().casimirs.front();
  const double r0 = traj.diagnostics.front().orbit_radius;
  for (std::size_t k = 0; k < traj.states.size(); ++k) {
    const auto& d = traj.diagnostics[k];
    StudyRow row;
    row.step = static_cast<int>(k);
    row.t = traj.times[k];
    row.mu = to_vec3(traj.states[k]);
    row.hamiltonian = d.hamiltonian;
    row.casimir = d.casimirs.empty() ? 0.0 : d.casimirs.front();
    row.orbit_err = std::abs(d.orbit_radius - r0);
    report.rows.push_back(row);
    report.summary.h_drift_max =
        std::max(report.summary.h_drift_max, std::abs(d.hamiltonian - h0));
    report.summary.casimir_drift_max =
        std::max(report.summary.casimir_drift_max, std::abs(row.casimir - c0));
    report.summary.orbit_err_max = std::max(report.summary.orbit_err_max, row.orbit_err);
  }
  return report;
}

/// Convergence-order study over a decreasing h list at T = cfg.h * cfg.steps.
inline SweepReport convergence_order(const StudyConfig& cfg,
                                     const std::vector<double>& h_list) {
  validate_config(cfg);
  validate_h_list(h_list);
  const StepMap map = build_integrator(cfg);
  const double T = cfg.h * cfg.steps;
  SweepReport report;
  report.config = cfg;
  report.value_name = "terminal_error";
  report.points = convergence_points(map, to_dynamic(cfg.mu0), T, h_list, cfg.ref_tol);
  const LogLogFit fit = fit_loglog(report.points, kConvergenceErrorFloor);
  report.summary.slope = fit.slope;
  report.summary.slope_residual = fit.residual;
  return report;
}

/// Poisson-defect study at the configured base point.
inline SweepReport defect_study(const StudyConfig& cfg, const std::vector<double>& h_list) {
  validate_config(cfg);
  validate_h_list(h_list);
  const StepMap map = build_integrator(cfg);
  SweepReport report;
  report.config = cfg;
  report.value_name = "defect";
  report.points = defect_points(map, to_dynamic(cfg.mu0), h_list, cfg.fd_step);
  const LogLogFit fit = fit_loglog(report.points, kDefectFloor);
  report.summary.slope = fit.slope;
  report.summary.slope_residual = fit.residual;
  return report;
}

/// Side-by-side table over integrators sharing model and initial state.
inline CompareReport compare(const std::vector<StudyConfig>& cfgs) {
  if (cfgs.empty()) throw ConfigError("compare: needs at least one config");
  for (const auto& cfg : cfgs) {
    if (cfg.model != cfgs.front().model || cfg.inertia != cfgs.front().inertia ||
        cfg.mu0 != cfgs.front().mu0) {
      throw ConfigError("compare: configs must share model and initial state");
    }
  }
  CompareReport report;
  report.config = cfgs.front();
  for (const auto& cfg : cfgs) {
    validate_config(cfg);
    const StepMap map = build_integrator(cfg);
    double wall = 0.0;
    const Trajectory traj = integrate(map, to_dynamic(cfg.mu0), cfg.h, cfg.steps, &wall);
    const VecX target =
        reference_flow(map.system, to_dynamic(cfg.mu0), cfg.h * cfg.steps, cfg.ref_tol);

    CompareRow row;
    row.integrator = cfg.integrator;
    row.terminal_error = (traj.states.back() - target).norm();
    const auto& d0 = traj.diagnostics.front();
    for (std::size_t k = 0; k < traj.states.size(); ++k) {
      const auto& d = traj.diagnostics[k];
      row.h_drift = std::max(row.h_drift, std::abs(d.hamiltonian - d0.hamiltonian));
      if (!d.casimirs.empty()) {
        row.casimir_drift =
            std::max(row.casimir_drift, std::abs(d.casimirs[0] - d0.casimirs[0]));
      }
      row.orbit_err = std::max(row.orbit_err, std::abs(d.orbit_radius - d0.orbit_radius));
    }
    row.wall_seconds = wall;
    report.rows.push_back(row);
  }
  return report;
}

// ---------------------------------------------------------------------------
// Serialization

inline std::string fmt17(double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string to_string(StudyKind kind) {
  switch (kind) {
    case StudyKind::run: return "run";
    case StudyKind::order: return "order";
    case StudyKind::defect: return "defect";
    case StudyKind::compare: return "compare";
  }
  return "run";
}

inline nlohmann::ordered_json config_json(const StudyConfig& cfg) {
  nlohmann::ordered_json j;
  j["model"] = cfg.model;
  j["inertia"] = {cfg.inertia[0], cfg.inertia[1], cfg.inertia[2]};
  j["integrator"] = cfg.integrator;
  j["scaling"] = cfg.scaling;
  j["mu0"] = {cfg.mu0[0], cfg.mu0[1], cfg.mu0[2]};
  j["h"] = cfg.h;
  j["steps"] = cfg.steps;
  j["h_list"] = cfg.h_list;
  j["tolerance"] = cfg.solver.tolerance;
  j["max_iterations"] = cfg.solver.max_iterations;
  j["fd_step"] = cfg.fd_step;
  j["ref_tol"] = cfg.ref_tol;
  j["kind"] = to_string(cfg.kind);
  j["version"] = kVersion;
  return j;
}

inline nlohmann::ordered_json summary_json(const StudySummary& s, bool with_drifts) {
  nlohmann::ordered_json j;
  if (with_drifts) {
    j["h_drift_max"] = s.h_drift_max;
    j["casimir_drift_max"] = s.casimir_drift_max;
    j["orbit_err_max"] = s.orbit_err_max;
  }
  if (s.slope) j["slope"] = *s.slope;
  if (s.slope_residual) j["slope_residual"] = *s.slope_residual;
  return j;
}

inline void write_csv(std::ostream& os, const RunReport& r) {
  os << "step,t,mu1,mu2,mu3,H,C,orbit_err\n";
  for (const auto& row : r.rows) {
    os << row.step << ',' << fmt17(row.t) << ',' << fmt17(row.mu[0]) << ','
       << fmt17(row.mu[1]) << ',' << fmt17(row.mu[2]) << ',' << fmt17(row.hamiltonian)
       << ',' << fmt17(row.casimir) << ',' << fmt17(row.orbit_err) << '\n';
  }
}

inline nlohmann::ordered_json to_json(const RunReport& r) {
  nlohmann::ordered_json j;
  j["config"] = config_json(r.config);
  auto rows = nlohmann::ordered_json::array();
  for (const auto& row : r.rows) {
    rows.push_back({{"step", row.step},
                    {"t", row.t},
                    {"mu", {row.mu[0], row.mu[1], row.mu[2]}},
                    {"H", row.hamiltonian},
                    {"C", row.casimir},
                    {"orbit_err", row.orbit_err}});
  }
  j["rows"] = std::move(rows);
  j["summary"] = summary_json(r.summary, /*with_drifts=*/true);
  return j;
}

inline void write_csv(std::ostream& os, const SweepReport& r) {
  os << "h," << r.value_name << '\n';
  for (const auto& [h, v] : r.points) os << fmt17(h) << ',' << fmt17(v) << '\n';
}

inline nlohmann::ordered_json to_json(const SweepReport& r) {
  nlohmann::ordered_json j;
  j["config"] = config_json(r.config);
  auto rows = nlohmann::ordered_json::array();
  for (const auto& [h, v] : r.points) rows.push_back({{"h", h}, {r.value_name, v}});
  j["rows"] = std::move(rows);
  j["summary"] = summary_json(r.summary, /*with_drifts=*/false);
  return j;
}

inline void write_csv(std::ostream& os, const CompareReport& r) {
  os << "integrator,terminal_error,h_drift,casimir_drift,orbit_err,wall_seconds\n";
  for (const auto& row : r.rows) {
    os << row.integrator << ',' << fmt17(row.terminal_error) << ',' << fmt17(row.h_drift)
       << ',' << fmt17(row.casimir_drift) << ',' << fmt17(row.orbit_err) << ','
       << fmt17(row.wall_seconds) << '\n';
  }
}

inline nlohmann::ordered_json to_json(const CompareReport& r) {
  nlohmann::ordered_json j;
  j["config"] = config_json(r.config);
  auto rows = nlohmann::ordered_json::array();
  for (const auto& row : r.rows) {
    rows.push_back({{"integrator", row.integrator},
                    {"terminal_error", row.terminal_error},
                    {"h_drift", row.h_drift},
                    {"casimir_drift", row.casimir_drift},
                    {"orbit_err", row.orbit_err},
                    {"wall_seconds", row.wall_seconds}});
  }
  j["rows"] = std::move(rows);
  return j;
}

// ---------------------------------------------------------------------------
// Flat key-value config documents (same keys as the CLI flags)

inline std::vector<double> parse_double_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      const double v = std::stod(item, &used);
      while (used < item.size() && std::isspace(static_cast<unsigned char>(item[used]))) ++used;
      if (used != item.size()) throw std::invalid_argument(item);
      out.push_back(v);
    } catch (const std::exception&) {
      throw ConfigError("cannot parse number list entry '" + item + "'");
    }
  }
  if (out.empty()) throw ConfigError("empty number list");
  return out;
}

inline Vec3 parse_vec3(const std::string& text) {
  const auto v = parse_double_list(text);
  if (v.size() != 3) throw ConfigError("expected 3 comma-separated values, got '" + text + "'");
  return Vec3(v[0], v[1], v[2]);
}

inline void apply_config_entry(StudyConfig& cfg, const std::string& key,
                               const std::string& value) {
  const auto as_double = [&](const char* what) {
    try {
      return std::stod(value);
    } catch (const std::exception&) {
      throw ConfigError(std::string("cannot parse ") + what + " '" + value + "'");
    }
  };
  if (key == "model") {
    cfg.model = value;
  } else if (key == "inertia") {
    cfg.inertia = parse_vec3(value);
  } else if (key == "integrator") {
    cfg.integrator = value;
  } else if (key == "scaling") {
    cfg.scaling = value;
  } else if (key == "mu0") {
    cfg.mu0 = parse_vec3(value);
  } else if (key == "h") {
    cfg.h = as_double("h");
  } else if (key == "steps") {
    cfg.steps = static_cast<int>(as_double("steps"));
  } else if (key == "h-list") {
    cfg.h_list = parse_double_list(value);
  } else if (key == "tol") {
    cfg.solver.tolerance = as_double("tol");
  } else if (key == "max-iter") {
    cfg.solver.max_iterations = static_cast<int>(as_double("max-iter"));
  } else if (key == "fd-step") {
    cfg.fd_step = as_double("fd-step");
  } else if (key == "ref-tol") {
    cfg.ref_tol = as_double("ref-tol");
  } else if (key == "out") {
    cfg.out = value;
  } else if (key == "format") {
    if (value == "csv") {
      cfg.format = OutputFormat::csv;
    } else if (value == "json") {
      cfg.format = OutputFormat::json;
    } else {
      throw ConfigError("unknown format '" + value + "' (csv|json)");
    }
  } else {
    throw ConfigError("unknown config key '" + key + "'");
  }
}

inline void apply_config_file(StudyConfig& cfg, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::string line;
  while (std::getline(in, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const auto trim = [](std::string t) {
      const auto a = t.find_first_not_of(" \t\r");
      const auto b = t.find_last_not_of(" \t\r");
      return a == std::string::npos ? std::string() : t.substr(a, b - a + 1);
    };
    const std::string stripped = trim(line);
    if (stripped.empty()) continue;
    const auto eq = stripped.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config line without '=': " + stripped);
    }
    apply_config_entry(cfg, trim(stripped.substr(0, eq)), trim(stripped.substr(eq + 1)));
  }
}

}  // namespace liepoisson
