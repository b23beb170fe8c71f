// sheathlab: command-line front end for the sheath library.

#include <cstdio>
#include <iostream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11/CLI11.hpp>

#include "sheath/sheath.hpp"

namespace {

using namespace sheath;
using namespace sheath::harness;

constexpr int kExitOk = 0;
constexpr int kExitPrecondition = 2;
constexpr int kExitNumerical = 3;

int exit_code(ErrorKind k) { return is_precondition(k) ? kExitPrecondition : kExitNumerical; }

struct Common {
  std::string config;
  std::string out = "runs";
  std::vector<std::string> sets;
  unsigned jobs = 1;
};

void add_common(CLI::App* sub, Common& c, bool with_jobs = false) {
  sub->add_option("--config", c.config, "INI configuration file")->check(CLI::ExistingFile);
  sub->add_option("--out", c.out, "output root directory")->capture_default_str();
  sub->add_option("--set", c.sets, "override, section.key=value (repeatable)");
  if (with_jobs) sub->add_option("--jobs", c.jobs, "parallel runs")->check(CLI::PositiveNumber);
}

RunConfig load(const Common& c) {
  ConfigTable t = c.config.empty() ? ConfigTable{} : load_ini(c.config);
  for (const auto& s : c.sets) apply_override(t, s);
  return from_table(t);
}

void print_results(const RunOutcome& o) {
  std::printf("run_id=%s\nstatus=%s\n", o.run_id.c_str(), o.status.c_str());
  for (const auto& [k, v] : o.results) std::printf("%s=%s\n", k.c_str(), io::fmt(v).c_str());
  for (const auto& n : o.notes) std::printf("note: %s\n", n.c_str());
  std::printf("dir=%s\n", o.dir.string().c_str());
  if (!o.ok()) std::fprintf(stderr, "error: %s\n", o.message.c_str());
}

int cmd_run(RunKind kind, const Common& c) {
  const RunConfig cfg = load(c);
  const RunOutcome o = run_one(kind, cfg, c.out);
  if (kind == RunKind::Existence && o.ok()) {
    std::printf("regime=%s\n", std::string(to_string(classify_regime(resolve_params(cfg)))).c_str());
    std::printf("exists_monotone=%s\n", o.results.at("exists_monotone") != 0.0 ? "true" : "false");
  }
  print_results(o);
  return o.ok() ? kExitOk : exit_code(*o.error);
}

int cmd_sweep(const Common& c) {
  const RunConfig cfg = load(c);
  const SweepResult res = run_sweep(parse_run_kind(cfg.sweep_mode), cfg, c.out, c.jobs);
  std::size_t failed = 0;
  for (const auto& o : res.outcomes) {
    std::printf("%s %s\n", o.run_id.c_str(), o.status.c_str());
    failed += o.ok() ? 0 : 1;
  }
  std::printf("runs=%zu failed=%zu\naggregate=%s\n", res.outcomes.size(), failed,
              res.aggregate.string().c_str());
  return kExitOk;
}

struct RootsOptions {
  bool limit = false;
  double gmin = 1.05;
  double gmax = 3.0;
  std::size_t samples = 40;
};

int cmd_roots(const RootsOptions& o) {
  if (o.limit) {
    std::printf("%.10f\n", solve_lambda0_limit());
    return kExitOk;
  }
  require(o.gmin > 1.0 && o.gmax >= o.gmin && o.samples >= 1, ErrorKind::InvalidArgument,
          "roots: need 1 < gamma-min <= gamma-max and samples >= 1");
  std::printf("gamma,lambda0\n");
  for (std::size_t i = 0; i < o.samples; ++i) {
    const double g = o.samples == 1 ? o.gmin
                                    : o.gmin + (o.gmax - o.gmin) * double(i) / double(o.samples - 1);
    std::printf("%s,%s\n", io::fmt(g).c_str(), io::fmt(solve_lambda0(g)).c_str());
  }
  return kExitOk;
}

struct FitOptions {
  std::string path;
  std::string probe;
  std::string model = "exponential";
  double beta = 1.0;
  double t_lo = std::numeric_limits<double>::quiet_NaN();
  double t_hi = std::numeric_limits<double>::quiet_NaN();
};

int cmd_fit(const FitOptions& o) {
  const io::Table t = io::read_csv(o.path);
  std::string column = o.probe.empty() ? std::string() : "norm_" + o.probe;
  if (column.empty())
    for (const auto& h : t.header)
      if (h.rfind("norm_", 0) == 0) {
        column = h;
        break;
      }
  require(!column.empty(), ErrorKind::InvalidArgument, "fit: trajectory has no norm_ column");
  require(o.model == "exponential" || o.model == "algebraic", ErrorKind::InvalidArgument,
          "fit: --model must be exponential or algebraic");
  const DecayFit f = fit_decay(t.column("t"), t.column(column),
                               o.model == "algebraic" ? DecayModel::Algebraic : DecayModel::Exponential,
                               o.beta, o.t_lo, o.t_hi);
  std::printf("column=%s\nmodel=%s\nrate=%s\namplitude=%s\nr_squared=%s\nt_lo=%s\nt_hi=%s\npoints=%zu\n",
              column.c_str(), o.model.c_str(), io::fmt(f.rate).c_str(), io::fmt(f.amplitude).c_str(),
              io::fmt(f.r_squared).c_str(), io::fmt(f.t_lo).c_str(), io::fmt(f.t_hi).c_str(), f.points);
  if (f.window_shrunk) std::printf("note: window shrunk at a nonpositive value\n");
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"sheathlab: plasma sheath stationary profiles, stability runs and checks"};
  app.require_subcommand(1);

  Common common;
  auto* existence = app.add_subcommand("existence", "report whether a monotone sheath exists");
  auto* stationary = app.add_subcommand("stationary", "build, export and verify the stationary profile");
  auto* simulate = app.add_subcommand("simulate", "evolve a perturbation and export its trajectory");
  auto* sweep = app.add_subcommand("sweep", "run the [sweep] axes of a config in parallel");
  auto* qform = app.add_subcommand("qform", "check the degenerate energy quadratic form");
  for (auto* s : {existence, stationary, simulate, qform}) add_common(s, common);
  add_common(sweep, common, true);

  RootsOptions roots_opt;
  auto* roots = app.add_subcommand("roots", "critical weight exponent lambda0 over gamma");
  roots->add_flag("--gamma-limit", roots_opt.limit, "print the gamma -> 1 limit only");
  roots->add_option("--gamma-min", roots_opt.gmin)->capture_default_str();
  roots->add_option("--gamma-max", roots_opt.gmax)->capture_default_str();
  roots->add_option("--samples", roots_opt.samples)->capture_default_str();

  FitOptions fit_opt;
  auto* fit = app.add_subcommand("fit", "fit a decay law to a trajectory CSV");
  fit->add_option("trajectory", fit_opt.path, "trajectory.csv")->required()->check(CLI::ExistingFile);
  fit->add_option("--probe", fit_opt.probe, "probe id (default: first norm column)");
  fit->add_option("--model", fit_opt.model)->capture_default_str();
  fit->add_option("--beta", fit_opt.beta, "beta of the algebraic model")->capture_default_str();
  fit->add_option("--t-lo", fit_opt.t_lo);
  fit->add_option("--t-hi", fit_opt.t_hi);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitPrecondition;
  }

  try {
    if (*existence) return cmd_run(RunKind::Existence, common);
    if (*stationary) return cmd_run(RunKind::Stationary, common);
    if (*simulate) return cmd_run(RunKind::Simulate, common);
    if (*qform) return cmd_run(RunKind::QForm, common);
    if (*sweep) return cmd_sweep(common);
    if (*roots) return cmd_roots(roots_opt);
    if (*fit) return cmd_fit(fit_opt);
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitNumerical;
  }
  return kExitPrecondition;
}
