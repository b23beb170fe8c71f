#pragma once

#include <chrono>
#include <ctime>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "sheath/harness/config.hpp"
#include "sheath/io.hpp"
#include "sheath/sagdeev.hpp"

#ifndef SHEATH_GIT_DESCRIBE
#define SHEATH_GIT_DESCRIBE "unknown"
#endif

namespace sheath::harness {

enum class RunKind { Existence, Stationary, Simulate, QForm };

constexpr std::string_view to_string(RunKind k) {
  switch (k) {
    case RunKind::Existence: return "existence";
    case RunKind::Stationary: return "stationary";
    case RunKind::Simulate: return "simulate";
    case RunKind::QForm: return "qform";
  }
  return "?";
}

inline RunKind parse_run_kind(const std::string& s) {
  if (s == "existence") return RunKind::Existence;
  if (s == "stationary") return RunKind::Stationary;
  if (s == "simulate") return RunKind::Simulate;
  if (s == "qform") return RunKind::QForm;
  fail(ErrorKind::Config, "unknown run kind '" + s + "'");
}

/// What a finished run reports: scalar results for aggregation, free-form
/// notes, and the error that stopped it, if any.
struct RunOutcome {
  std::string run_id;
  RunKind kind = RunKind::Simulate;
  std::filesystem::path dir;
  std::string status = "ok";  ///< "ok" or the ErrorKind name
  std::optional<ErrorKind> error;
  std::string message;
  std::map<std::string, double> results;
  std::vector<std::string> notes;
  std::vector<std::string> artifacts;
  double wall_seconds = 0.0;

  bool ok() const { return !error.has_value(); }
};

namespace detail {

inline nlohmann::json config_json(const ConfigTable& table) {
  nlohmann::json j = nlohmann::json::object();
  for (const auto& [key, value] : table) {
    const auto dot = key.find('.');
    j[key.substr(0, dot)][key.substr(dot + 1)] = value;
  }
  return j;
}

inline nlohmann::json derived_json(const RunConfig& cfg) {
  nlohmann::json d = nlohmann::json::object();
  try {
    const PlasmaParams p = resolve_params(cfg);
    const SagdeevContext ctx(p);
    d["u_inf"] = p.u_inf;
    d["regime"] = std::string(to_string(classify_regime(p)));
    d["Gamma"] = degenerate_gamma(p);
    d["lambda0"] = solve_lambda0(p.gamma);
    d["c_inf"] = ctx.c_inf();
    d["V2_at_zero"] = ctx.d2V_at_zero();
  } catch (const Error& e) {
    d["error"] = e.what();
  }
  return d;
}

inline std::string utc_now() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

inline void put_grid(nlohmann::json& j, const Resolved& r) {
  j["L"] = r.grid.length();
  j["M"] = r.grid.cells();
  j["stretching"] = r.grid.stretching() == Stretching::Uniform ? "uniform" : "geometric";
  j["ratio"] = r.grid.ratio();
  j["h_min"] = r.grid.min_spacing();
  j["ny"] = r.transverse.ny;
  j["Ly"] = r.transverse.Ly;
}

inline void stationary_results(RunOutcome& out, const StationaryProfile& prof, const RunConfig& cfg) {
  const PlasmaParams& p = prof.params;
  const ResidualReport rr = profile_residuals(prof, p);
  out.results["res_mass"] = rr.mass;
  out.results["res_momentum"] = rr.momentum;
  out.results["res_energy"] = rr.energy;
  out.results["res_temperature"] = rr.temperature;
  out.results["res_branch"] = rr.branch;
  out.results["res_poisson_closed"] = rr.poisson_closed;
  out.results["res_poisson_discrete"] = rr.poisson_discrete;
  out.results["res_first_integral"] = rr.first_integral;
  out.results["res_bc_left"] = rr.bc_left;
  out.results["res_bc_right"] = rr.bc_right;
  if (p.phi_b == 0.0) return;
  if (prof.regime == Regime::NondegenerateBohm) {
    const SpatialDecayFit fit = verify_nondegenerate_decay(prof, p);
    out.results["decay_rate"] = fit.rate;
    out.results["decay_predicted"] = fit.predicted_rate;
    out.results["decay_rel_error"] = fit.relative_error;
    out.results["decay_r_squared"] = fit.r_squared;
  } else if (prof.regime == Regime::DegenerateBohm && p.phi_b > 0.0) {
    const AsymptoticsReport rep = verify_degenerate_asymptotics(prof, p, cfg.delta0);
    for (std::size_t q = 0; q < rep.literal.size(); ++q)
      for (std::size_t i = 0; i < 4; ++i) {
        if (std::isnan(rep.literal[q][i])) continue;
        const std::string tag = "U" + std::to_string(q) + "_d" + std::to_string(i);
        out.results["asym_literal_" + tag] = rep.literal[q][i];
        out.results["asym_normalized_" + tag] = rep.normalized[q][i];
      }
    out.notes.push_back("asymptotics: U0=-phi U1=n-1 U2=log n U3=u/u_inf-1 U4=(T/T_inf-1)/gamma");
  }
}

inline void simulate_results(RunOutcome& out, const Trajectory& tr, const RunConfig& cfg,
                             const Resolved& r) {
  for (std::size_t q = 0; q < tr.probe_ids.size(); ++q)
    out.results["final_norm_" + tr.probe_ids[q]] = tr.norms[q].back();
  double top = -std::numeric_limits<double>::infinity();
  for (double s : tr.max_speed) top = std::max(top, s);
  out.results["max_speed"] = top;
  out.results["min_n"] = *std::min_element(tr.min_n.begin(), tr.min_n.end());
  out.results["min_T"] = *std::min_element(tr.min_T.begin(), tr.min_T.end());
  out.results["steps"] = static_cast<double>(tr.steps);
  out.results["max_poisson_residual"] = tr.max_poisson_residual;
  out.results["clipped"] = std::count(tr.clipped.begin(), tr.clipped.end(), 1) > 0 ? 1.0 : 0.0;

  std::size_t q = 0;
  if (!cfg.fit.probe.empty()) {
    const auto it = std::find(tr.probe_ids.begin(), tr.probe_ids.end(), cfg.fit.probe);
    if (it == tr.probe_ids.end()) fail(ErrorKind::Config, "key 'fit.probe': no probe '" + cfg.fit.probe + "'");
    q = static_cast<std::size_t>(it - tr.probe_ids.begin());
  }
  const double beta = !std::isnan(cfg.fit.beta) ? cfg.fit.beta
                      : r.probes[q].kind == WeightSpec::Kind::Algebraic ? r.probes[q].beta
                                                                         : 1.0;
  try {
    const DecayFit fit = fit_decay(tr.t, tr.norms[q], cfg.fit.model, beta, cfg.fit.t_lo, cfg.fit.t_hi);
    out.results["fit_rate"] = fit.rate;
    out.results["fit_r_squared"] = fit.r_squared;
    out.results["fit_t_lo"] = fit.t_lo;
    out.results["fit_t_hi"] = fit.t_hi;
    if (fit.window_shrunk) out.notes.push_back("fit window shrunk at a nonpositive norm");
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::FitUnderdetermined) throw;
    out.results["fit_rate"] = std::numeric_limits<double>::quiet_NaN();
    out.results["fit_r_squared"] = std::numeric_limits<double>::quiet_NaN();
    out.notes.push_back(e.what());
  }
}

}  // namespace detail

/// Runs one configuration into `<out_root>/<run-id>/`, writing the CSV
/// artifacts of its kind and, last, manifest.json. Library errors are
/// caught and recorded in the outcome and the manifest.
inline RunOutcome run_one(RunKind kind, const RunConfig& cfg, const std::filesystem::path& out_root) {
  RunOutcome out;
  out.run_id = cfg.run_id;
  out.kind = kind;
  out.dir = out_root / cfg.run_id;
  const auto t0 = std::chrono::steady_clock::now();
  const std::string started = detail::utc_now();
  nlohmann::json grid_json = nlohmann::json::object();

  try {
    std::filesystem::create_directories(out.dir);
    if (kind == RunKind::Existence) {
      const PlasmaParams p = resolve_params(cfg);
      const ExistenceVerdict v = existence_check(p);
      out.results["exists_monotone"] = v.exists_monotone ? 1.0 : 0.0;
      out.results["cond_V"] = v.cond_V;
      out.results["cond_f"] = v.cond_f;
    } else if (kind == RunKind::QForm) {
      const Resolved r = resolve(cfg);
      detail::put_grid(grid_json, r);
      const double beta = std::isnan(cfg.qform.beta) ? r.beta_auto : cfg.qform.beta;
      const QFormReport q = qform_check(cfg.qform.epsilon, beta, r.params, r.grid.nodes());
      io::write_atomic(out.dir / "qform.csv", io::qform_csv(q));
      out.artifacts.push_back("qform.csv");
      out.results["epsilon"] = q.epsilon;
      out.results["beta"] = q.beta;
      out.results["lambda0"] = q.lambda0;
      out.results["epsilon_below_lambda0"] = q.epsilon_below_lambda0;
      out.results["all44"] = q.all44();
      out.results["all45"] = q.all45();
      out.results["all46"] = q.all46();
      out.results["eigen_consistent"] = q.eigen_consistent();
      out.results["c_empirical"] = q.c_empirical;
      out.results["min_scaled_eig"] = q.min_scaled_eig;
    } else {
      const Resolved r = resolve(cfg);
      detail::put_grid(grid_json, r);
      const StationaryProfile prof = build_profile(r.params, r.grid);
      io::write_atomic(out.dir / "profile.csv", io::profile_csv(prof));
      out.artifacts.push_back("profile.csv");
      if (kind == RunKind::Stationary) {
        detail::stationary_results(out, prof, cfg);
      } else {
        const PerturbationState s0 = make_initial(r.initial, prof, r.transverse);
        const Trajectory tr = evolve(s0, prof, r.params, cfg.scheme, r.probes);
        io::write_atomic(out.dir / "trajectory.csv", io::trajectory_csv(tr));
        out.artifacts.push_back("trajectory.csv");
        detail::simulate_results(out, tr, cfg, r);
      }
    }
  } catch (const Error& e) {
    out.error = e.kind();
    out.status = std::string(to_string(e.kind()));
    out.message = e.what();
  }
  out.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  nlohmann::json m;
  m["run_id"] = out.run_id;
  m["kind"] = std::string(to_string(kind));
  m["status"] = out.status;
  if (!out.ok()) {
    m["error"] = {{"kind", out.status},
                  {"precondition", is_precondition(*out.error)},
                  {"message", out.message}};
  }
  m["config"] = detail::config_json(to_table(cfg));
  m["derived"] = detail::derived_json(cfg);
  m["grid"] = grid_json;
  m["results"] = out.results;
  m["notes"] = out.notes;
  m["artifacts"] = out.artifacts;
  m["git_describe"] = SHEATH_GIT_DESCRIBE;
  m["timing"] = {{"started_utc", started}, {"wall_seconds", out.wall_seconds}};
  io::write_atomic(out.dir / "manifest.json", m.dump(2) + "\n");
  return out;
}

/// Reads a manifest back into an outcome (results, status, notes).
inline RunOutcome read_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::InvalidArgument, "cannot open '" + path.string() + "'");
  nlohmann::json m;
  try {
    m = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::InvalidArgument, path.string() + ": " + e.what());
  }
  RunOutcome out;
  out.run_id = m.at("run_id").get<std::string>();
  out.kind = parse_run_kind(m.at("kind").get<std::string>());
  out.dir = path.parent_path();
  out.status = m.at("status").get<std::string>();
  if (out.status != "ok") {
    out.error = ErrorKind::NumericalBranchFailure;
    for (int k = 0; k <= static_cast<int>(ErrorKind::FitUnderdetermined); ++k)
      if (to_string(static_cast<ErrorKind>(k)) == out.status) out.error = static_cast<ErrorKind>(k);
  }
  if (m.contains("error")) out.message = m["error"].value("message", "");
  for (const auto& [k, v] : m.at("results").items())
    out.results[k] = v.is_null() ? std::numeric_limits<double>::quiet_NaN() : v.get<double>();
  for (const auto& n : m.at("notes")) out.notes.push_back(n.get<std::string>());
  for (const auto& a : m.at("artifacts")) out.artifacts.push_back(a.get<std::string>());
  out.wall_seconds = m.at("timing").at("wall_seconds").get<double>();
  return out;
}

}  // namespace sheath::harness
