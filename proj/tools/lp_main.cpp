// Command-line front end: run trajectories, estimate convergence orders and
// Poisson defects, and compare integrator families on the free rigid body.
//
// Exit codes: 0 success, 2 config error, 3 solver non-convergence or chart
// violation, 4 degenerate study (slope fit at the error floor).

#include <exception>
#include <fstream>
#include <iostream>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>

#include "liepoisson/liepoisson.hpp"

namespace {

using namespace liepoisson;

struct PendingOptions {
  std::string config_file;
  std::vector<std::pair<std::string, std::string>> entries;  // flag order preserved
};

// All value parsing funnels through apply_config_entry so that a config file
// and the command line behave identically; flags override file entries.
void add_common_options(CLI::App* sub, PendingOptions& pending) {
  sub->set_help_flag("--help", "print this help message and exit");
  sub->add_option_function<std::string>(
         "--config", [&pending](const std::string& v) { pending.config_file = v; },
         "flat key=value config document (flags override it)");
  const auto add = [&](const std::string& flag, const std::string& key,
                       const std::string& help) {
    sub->add_option_function<std::string>(
        flag, [&pending, key](const std::string& v) { pending.entries.emplace_back(key, v); },
        help);
  };
  add("--model", "model", "model name (rigidbody)");
  add("--inertia", "inertia", "principal moments I1,I2,I3");
  add("--integrator", "integrator",
      "integrator name; comma-separated list for `compare`");
  add("--scaling", "scaling", "retraction scaling: half|full");
  add("--mu0", "mu0", "initial momentum x,y,z");
  add("--h", "h", "step size");
  add("--steps", "steps", "step count (with --h fixes T = h*steps for studies)");
  add("--h-list", "h-list", "decreasing step sizes a,b,c,... for order/defect studies");
  add("--tol", "tol", "implicit-solver residual tolerance");
  add("--max-iter", "max-iter", "implicit-solver iteration budget");
  add("--fd-step", "fd-step", "finite-difference step for defect Jacobians");
  add("--ref-tol", "ref-tol", "reference-oracle tolerance");
  add("--out", "out", "output path (default stdout)");
  add("--format", "format", "csv|json");
}

StudyConfig resolve_config(const PendingOptions& pending, StudyKind kind) {
  StudyConfig cfg;
  cfg.kind = kind;
  if (!pending.config_file.empty()) apply_config_file(cfg, pending.config_file);
  for (const auto& [key, value] : pending.entries) apply_config_entry(cfg, key, value);
  return cfg;
}

std::ostream& open_output(const StudyConfig& cfg, std::ofstream& file) {
  if (cfg.out.empty()) return std::cout;
  file.open(cfg.out);
  if (!file) throw ConfigError("cannot open output file '" + cfg.out + "'");
  return file;
}

template <typename Report>
void emit(const StudyConfig& cfg, const Report& report) {
  std::ofstream file;
  std::ostream& os = open_output(cfg, file);
  if (cfg.format == OutputFormat::csv) {
    write_csv(os, report);
  } else {
    os << to_json(report).dump(2) << '\n';
  }
}

void run_study(const PendingOptions& pending, StudyKind kind) {
  StudyConfig cfg = resolve_config(pending, kind);
  switch (kind) {
    case StudyKind::run:
      emit(cfg, run_trajectory(cfg));
      break;
    case StudyKind::order:
      if (cfg.h_list.empty()) throw ConfigError("order study needs --h-list");
      emit(cfg, convergence_order(cfg, cfg.h_list));
      break;
    case StudyKind::defect:
      if (cfg.h_list.empty()) throw ConfigError("defect study needs --h-list");
      emit(cfg, defect_study(cfg, cfg.h_list));
      break;
    case StudyKind::compare: {
      std::vector<StudyConfig> cfgs;
      std::stringstream names(cfg.integrator);
      std::string name;
      while (std::getline(names, name, ',')) {
        StudyConfig one = cfg;
        one.integrator = name;
        cfgs.push_back(std::move(one));
      }
      emit(cfg, compare(cfgs));
      break;
    }
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Structure-preserving Lie-Poisson integrator studies on so(3)*"};
  app.set_help_flag("--help", "print this help message and exit");
  app.require_subcommand(1);

  PendingOptions pending;
  StudyKind kind = StudyKind::run;

  auto* run = app.add_subcommand("run", "integrate one trajectory and report diagnostics");
  auto* order = app.add_subcommand("order", "empirical convergence order over --h-list");
  auto* defect = app.add_subcommand("defect", "Poisson-map defect sweep over --h-list");
  auto* cmp = app.add_subcommand("compare", "side-by-side table over integrators");
  for (auto* sub : {run, order, defect, cmp}) add_common_options(sub, pending);
  run->callback([&] { kind = StudyKind::run; });
  order->callback([&] { kind = StudyKind::order; });
  defect->callback([&] { kind = StudyKind::defect; });
  cmp->callback([&] { kind = StudyKind::compare; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    run_study(pending, kind);
  } catch (const liepoisson::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const liepoisson::StudyError& e) {
    std::cerr << "degenerate study: " << e.what() << '\n';
    return 4;
  } catch (const liepoisson::NonConvergenceError& e) {
    std::cerr << "solver failure: " << e.what() << '\n';
    return 3;
  } catch (const liepoisson::SingularMatrixError& e) {
    std::cerr << "solver failure: " << e.what() << '\n';
    return 3;
  } catch (const liepoisson::ChartRadiusError& e) {
    std::cerr << "chart violation: " << e.what() << '\n';
    return 3;
  } catch (const std::domain_error& e) {
    std::cerr << "domain error: " << e.what() << '\n';
    return 3;
  }
  return 0;
}
