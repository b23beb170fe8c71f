#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "sheath/diagnostics.hpp"
#include "sheath/dynamics.hpp"
#include "sheath/error.hpp"
#include "sheath/grid.hpp"
#include "sheath/model.hpp"
#include "sheath/stationary.hpp"

namespace sheath::harness {

/// Flat "section.key" -> value table, the exchange format between INI
/// files, --set overrides and RunConfig.
using ConfigTable = std::map<std::string, std::string>;

inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline ConfigTable parse_ini(std::istream& in, const std::string& origin = "config") {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    fail(ErrorKind::Config, origin + ": " + e.message() + " (line " + std::to_string(e.line()) + ")");
  }
  ConfigTable table;
  for (const auto& [section, body] : tree) {
    if (body.empty())
      fail(ErrorKind::Config, origin + ": key '" + section + "' lies outside any section");
    for (const auto& [key, value] : body) table[section + "." + key] = value.data();
  }
  return table;
}

inline ConfigTable load_ini(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::Config, "cannot open config file '" + path + "'");
  return parse_ini(in, path);
}

/// Applies one `section.key=value` override.
inline void apply_override(ConfigTable& table, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0)
    fail(ErrorKind::Config, "override '" + assignment + "' is not of the form key=value");
  std::string key = assignment.substr(0, eq);
  if (key.find('.') == std::string::npos)
    fail(ErrorKind::Config, "override key '" + key + "' needs a section, e.g. params.phi_b");
  table[key] = assignment.substr(eq + 1);
}

inline std::string to_ini(const ConfigTable& table) {
  std::map<std::string, std::vector<std::pair<std::string, std::string>>> sections;
  for (const auto& [k, v] : table) {
    const auto dot = k.find('.');
    sections[k.substr(0, dot)].emplace_back(k.substr(dot + 1), v);
  }
  std::ostringstream out;
  bool first = true;
  for (const auto& [name, entries] : sections) {
    if (!first) out << '\n';
    first = false;
    out << '[' << name << "]\n";
    for (const auto& [k, v] : entries) out << k << " = " << v << '\n';
  }
  return out.str();
}

// ---------------------------------------------------------------- typed config

/// Truncated-domain grid; a NaN length means the regime default.
struct GridSpec {
  double L = std::numeric_limits<double>::quiet_NaN();
  std::size_t M = 512;
  Stretching stretching = Stretching::Geometric;
  double stretch = HalfLineGrid::kDefaultStretch;
  std::size_t ny = 1;
  double Ly = 2.0 * 3.14159265358979323846;

  bool operator==(const GridSpec&) const = default;
};

struct QFormSpec {
  double epsilon = 4.0;
  double beta = std::numeric_limits<double>::quiet_NaN();  ///< NaN: Gamma sqrt(phi_b)
  bool operator==(const QFormSpec&) const = default;
};

struct FitSpec {
  DecayModel model = DecayModel::Exponential;
  std::string probe;  ///< empty: first probe
  double beta = std::numeric_limits<double>::quiet_NaN();  ///< NaN: probe beta or 1
  double t_lo = std::numeric_limits<double>::quiet_NaN();
  double t_hi = std::numeric_limits<double>::quiet_NaN();
  bool operator==(const FitSpec&) const = default;
};

/// Probe weight as configured; NaN beta means Gamma sqrt(phi_b).
struct ProbeSpec {
  std::string id;
  WeightSpec::Kind kind = WeightSpec::Kind::Exponential;
  double alpha = 0.0;
  double beta = std::numeric_limits<double>::quiet_NaN();
  double lambda = 0.5;
  int order = 1;
  bool operator==(const ProbeSpec&) const = default;
};

struct RunConfig {
  std::string run_id = "run";
  std::uint64_t seed = 0;
  PlasmaParams params;
  bool u_inf_bohm = false;  ///< place u_inf exactly on the Bohm threshold
  GridSpec grid;
  SchemeConfig scheme;
  InitialFamily family = InitialFamily::GaussianExp;
  double amplitude = 1e-3;
  double init_lambda = 0.5;
  double init_beta = std::numeric_limits<double>::quiet_NaN();  ///< NaN: Gamma sqrt(phi_b)
  double center = 3.0;
  double width = 2.0;
  double psi_scale = 0.5;
  double zeta_scale = 0.5;
  double transverse_modulation = 0.5;
  double jitter = 0.0;
  std::vector<ProbeSpec> probes;
  double delta0 = kDefaultDelta0;
  QFormSpec qform;
  FitSpec fit;
  /// Sweep axes: "section.key" -> comma-separated values.
  std::map<std::string, std::string> sweep_axes;
  std::string sweep_mode = "simulate";

  bool operator==(const RunConfig& o) const {
    auto pe = [](const PlasmaParams& a, const PlasmaParams& b) {
      return a.m == b.m && a.gamma == b.gamma && a.R == b.R && a.T_inf == b.T_inf &&
             a.u_inf == b.u_inf && a.phi_b == b.phi_b;
    };
    auto se = [](const SchemeConfig& a, const SchemeConfig& b) {
      return a.cfl == b.cfl && a.spatial_order == b.spatial_order && a.rk_stages == b.rk_stages &&
             a.t_end == b.t_end && a.output_cadence == b.output_cadence;
    };
    auto feq = [](double a, double b) { return a == b || (std::isnan(a) && std::isnan(b)); };
    auto ge = [&](const GridSpec& a, const GridSpec& b) {
      return feq(a.L, b.L) && a.M == b.M && a.stretching == b.stretching && a.stretch == b.stretch &&
             a.ny == b.ny && a.Ly == b.Ly;
    };
    auto pre = [&](const ProbeSpec& a, const ProbeSpec& b) {
      return a.id == b.id && a.kind == b.kind && a.alpha == b.alpha && feq(a.beta, b.beta) &&
             a.lambda == b.lambda && a.order == b.order;
    };
    if (probes.size() != o.probes.size()) return false;
    for (std::size_t i = 0; i < probes.size(); ++i)
      if (!pre(probes[i], o.probes[i])) return false;
    return run_id == o.run_id && seed == o.seed && pe(params, o.params) &&
           u_inf_bohm == o.u_inf_bohm && ge(grid, o.grid) && se(scheme, o.scheme) &&
           family == o.family && amplitude == o.amplitude && init_lambda == o.init_lambda &&
           feq(init_beta, o.init_beta) && center == o.center && width == o.width &&
           psi_scale == o.psi_scale && zeta_scale == o.zeta_scale &&
           transverse_modulation == o.transverse_modulation && jitter == o.jitter &&
           delta0 == o.delta0 && qform.epsilon == o.qform.epsilon &&
           feq(qform.beta, o.qform.beta) && fit.model == o.fit.model && fit.probe == o.fit.probe &&
           feq(fit.beta, o.fit.beta) && feq(fit.t_lo, o.fit.t_lo) && feq(fit.t_hi, o.fit.t_hi) &&
           sweep_axes == o.sweep_axes && sweep_mode == o.sweep_mode;
  }
};

namespace detail {

inline double parse_number(const std::string& key, const std::string& text) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    fail(ErrorKind::Config, "key '" + key + "': '" + text + "' is not a number");
  }
  while (used < text.size() && std::isspace(static_cast<unsigned char>(text[used]))) ++used;
  if (used != text.size() || !std::isfinite(v))
    fail(ErrorKind::Config, "key '" + key + "': '" + text + "' is not a finite number");
  return v;
}

inline long long parse_integer(const std::string& key, const std::string& text) {
  const double v = parse_number(key, text);
  if (v != std::floor(v) || std::abs(v) > 9.007199254740992e15)
    fail(ErrorKind::Config, "key '" + key + "': '" + text + "' is not an integer");
  return static_cast<long long>(v);
}

// Number, or NaN for the literal "auto".
inline double parse_auto(const std::string& key, const std::string& text) {
  if (text == "auto") return std::numeric_limits<double>::quiet_NaN();
  return parse_number(key, text);
}

inline std::string auto_or(double v) { return std::isnan(v) ? "auto" : format_double(v); }

}  // namespace detail

/// Strict conversion: unknown keys and malformed values raise a Config
/// error naming the key.
inline RunConfig from_table(const ConfigTable& table) {
  using detail::parse_auto;
  using detail::parse_integer;
  using detail::parse_number;
  RunConfig c;
  std::map<std::string, ProbeSpec> probes;
  for (const auto& [key, value] : table) {
    const auto dot = key.find('.');
    const std::string section = key.substr(0, dot), name = key.substr(dot + 1);
    auto num = [&] { return parse_number(key, value); };
    auto positive_count = [&] {
      const long long v = parse_integer(key, value);
      if (v < 1) fail(ErrorKind::Config, "key '" + key + "' must be >= 1");
      return static_cast<std::size_t>(v);
    };
    bool known = true;
    if (section == "run") {
      if (name == "id") {
        if (value.empty() || value.find_first_of("/\\") != std::string::npos)
          fail(ErrorKind::Config, "key 'run.id' must be a non-empty name without slashes");
        c.run_id = value;
      } else if (name == "seed") {
        const long long v = parse_integer(key, value);
        if (v < 0) fail(ErrorKind::Config, "key 'run.seed' must be >= 0");
        c.seed = static_cast<std::uint64_t>(v);
      } else known = false;
    } else if (section == "params") {
      if (name == "m") c.params.m = num();
      else if (name == "gamma") c.params.gamma = num();
      else if (name == "R") c.params.R = num();
      else if (name == "T_inf") c.params.T_inf = num();
      else if (name == "phi_b") c.params.phi_b = num();
      else if (name == "u_inf") {
        if (value == "bohm" || value == "degenerate") c.u_inf_bohm = true;
        else {
          c.u_inf_bohm = false;
          c.params.u_inf = num();
        }
      } else known = false;
    } else if (section == "grid") {
      if (name == "L") c.grid.L = parse_auto(key, value);
      else if (name == "M") c.grid.M = positive_count();
      else if (name == "stretching") {
        if (value == "uniform") c.grid.stretching = Stretching::Uniform;
        else if (value == "geometric") c.grid.stretching = Stretching::Geometric;
        else fail(ErrorKind::Config, "key 'grid.stretching' must be uniform or geometric");
      } else if (name == "stretch") c.grid.stretch = num();
      else if (name == "ny") c.grid.ny = positive_count();
      else if (name == "Ly") c.grid.Ly = num();
      else known = false;
    } else if (section == "scheme") {
      if (name == "cfl") c.scheme.cfl = num();
      else if (name == "spatial_order") c.scheme.spatial_order = static_cast<int>(parse_integer(key, value));
      else if (name == "rk_stages") c.scheme.rk_stages = static_cast<int>(parse_integer(key, value));
      else if (name == "t_end") c.scheme.t_end = num();
      else if (name == "output_cadence") c.scheme.output_cadence = num();
      else known = false;
    } else if (section == "initial") {
      if (name == "family") {
        if (value == "zero") c.family = InitialFamily::Zero;
        else if (value == "gaussian_exp") c.family = InitialFamily::GaussianExp;
        else if (value == "gaussian_alg") c.family = InitialFamily::GaussianAlg;
        else fail(ErrorKind::Config, "key 'initial.family' must be zero, gaussian_exp or gaussian_alg");
      } else if (name == "amplitude") c.amplitude = num();
      else if (name == "lambda") c.init_lambda = num();
      else if (name == "beta") c.init_beta = parse_auto(key, value);
      else if (name == "center") c.center = num();
      else if (name == "width") c.width = num();
      else if (name == "psi_scale") c.psi_scale = num();
      else if (name == "zeta_scale") c.zeta_scale = num();
      else if (name == "transverse_modulation") c.transverse_modulation = num();
      else if (name == "jitter") c.jitter = num();
      else known = false;
    } else if (section.rfind("probe:", 0) == 0) {
      const std::string id = section.substr(6);
      if (id.empty() || id.find_first_of(",\" ") != std::string::npos)
        fail(ErrorKind::Config, "section '" + section + "' needs a plain probe id");
      ProbeSpec& p = probes[id];
      p.id = id;
      if (name == "kind") {
        if (value == "algebraic") p.kind = WeightSpec::Kind::Algebraic;
        else if (value == "exponential") p.kind = WeightSpec::Kind::Exponential;
        else fail(ErrorKind::Config, "key '" + key + "' must be algebraic or exponential");
      } else if (name == "alpha") p.alpha = num();
      else if (name == "beta") p.beta = parse_auto(key, value);
      else if (name == "lambda") p.lambda = num();
      else if (name == "order") p.order = static_cast<int>(parse_integer(key, value));
      else known = false;
    } else if (section == "stationary") {
      if (name == "delta0") c.delta0 = num();
      else known = false;
    } else if (section == "qform") {
      if (name == "epsilon") c.qform.epsilon = num();
      else if (name == "beta") c.qform.beta = parse_auto(key, value);
      else known = false;
    } else if (section == "fit") {
      if (name == "model") {
        if (value == "exponential") c.fit.model = DecayModel::Exponential;
        else if (value == "algebraic") c.fit.model = DecayModel::Algebraic;
        else fail(ErrorKind::Config, "key 'fit.model' must be exponential or algebraic");
      } else if (name == "probe") c.fit.probe = value;
      else if (name == "beta") c.fit.beta = parse_auto(key, value);
      else if (name == "t_lo") c.fit.t_lo = parse_auto(key, value);
      else if (name == "t_hi") c.fit.t_hi = parse_auto(key, value);
      else known = false;
    } else if (section == "sweep") {
      if (name == "mode") {
        if (value != "simulate" && value != "stationary" && value != "existence")
          fail(ErrorKind::Config, "key 'sweep.mode' must be simulate, stationary or existence");
        c.sweep_mode = value;
      } else {
        // Axis over another key, e.g. "params.phi_b = 0.04, 0.02".
        if (name.find('.') == std::string::npos || name.rfind("sweep.", 0) == 0)
          fail(ErrorKind::Config, "sweep axis '" + key + "' must name another key");
        c.sweep_axes[name] = value;
      }
    } else {
      fail(ErrorKind::Config, "unknown section in key '" + key + "'");
    }
    if (!known) fail(ErrorKind::Config, "unknown key '" + key + "'");
  }
  for (auto& [id, p] : probes) c.probes.push_back(p);
  if (c.probes.empty()) c.probes.push_back(ProbeSpec{"exp", WeightSpec::Kind::Exponential, 0.0,
                                                     std::numeric_limits<double>::quiet_NaN(), 0.5, 1});

  // Ranges that are not caught by the library preconditions.
  if (c.grid.M < HalfLineGrid::kMinCells)
    fail(ErrorKind::Config, "key 'grid.M' must be >= " + std::to_string(HalfLineGrid::kMinCells));
  if (!(c.grid.stretch >= 1.0)) fail(ErrorKind::Config, "key 'grid.stretch' must be >= 1");
  if (!(c.grid.Ly > 0.0)) fail(ErrorKind::Config, "key 'grid.Ly' must be > 0");
  if (!std::isnan(c.grid.L) && !(c.grid.L > 0.0)) fail(ErrorKind::Config, "key 'grid.L' must be > 0");
  try {
    c.scheme.validate();
  } catch (const Error& e) {
    fail(ErrorKind::Config, e.what());
  }
  return c;
}

inline ConfigTable to_table(const RunConfig& c) {
  using detail::auto_or;
  ConfigTable t;
  t["run.id"] = c.run_id;
  t["run.seed"] = std::to_string(c.seed);
  t["params.m"] = format_double(c.params.m);
  t["params.gamma"] = format_double(c.params.gamma);
  t["params.R"] = format_double(c.params.R);
  t["params.T_inf"] = format_double(c.params.T_inf);
  t["params.u_inf"] = c.u_inf_bohm ? "bohm" : format_double(c.params.u_inf);
  t["params.phi_b"] = format_double(c.params.phi_b);
  t["grid.L"] = auto_or(c.grid.L);
  t["grid.M"] = std::to_string(c.grid.M);
  t["grid.stretching"] = c.grid.stretching == Stretching::Uniform ? "uniform" : "geometric";
  t["grid.stretch"] = format_double(c.grid.stretch);
  t["grid.ny"] = std::to_string(c.grid.ny);
  t["grid.Ly"] = format_double(c.grid.Ly);
  t["scheme.cfl"] = format_double(c.scheme.cfl);
  t["scheme.spatial_order"] = std::to_string(c.scheme.spatial_order);
  t["scheme.rk_stages"] = std::to_string(c.scheme.rk_stages);
  t["scheme.t_end"] = format_double(c.scheme.t_end);
  t["scheme.output_cadence"] = format_double(c.scheme.output_cadence);
  t["initial.family"] = std::string(to_string(c.family));
  t["initial.amplitude"] = format_double(c.amplitude);
  t["initial.lambda"] = format_double(c.init_lambda);
  t["initial.beta"] = auto_or(c.init_beta);
  t["initial.center"] = format_double(c.center);
  t["initial.width"] = format_double(c.width);
  t["initial.psi_scale"] = format_double(c.psi_scale);
  t["initial.zeta_scale"] = format_double(c.zeta_scale);
  t["initial.transverse_modulation"] = format_double(c.transverse_modulation);
  t["initial.jitter"] = format_double(c.jitter);
  for (const auto& p : c.probes) {
    const std::string s = "probe:" + p.id + ".";
    t[s + "kind"] = p.kind == WeightSpec::Kind::Algebraic ? "algebraic" : "exponential";
    t[s + "alpha"] = format_double(p.alpha);
    t[s + "beta"] = auto_or(p.beta);
    t[s + "lambda"] = format_double(p.lambda);
    t[s + "order"] = std::to_string(p.order);
  }
  t["stationary.delta0"] = format_double(c.delta0);
  t["qform.epsilon"] = format_double(c.qform.epsilon);
  t["qform.beta"] = auto_or(c.qform.beta);
  t["fit.model"] = std::string(to_string(c.fit.model));
  if (!c.fit.probe.empty()) t["fit.probe"] = c.fit.probe;
  t["fit.beta"] = auto_or(c.fit.beta);
  t["fit.t_lo"] = auto_or(c.fit.t_lo);
  t["fit.t_hi"] = auto_or(c.fit.t_hi);
  if (!c.sweep_axes.empty() || c.sweep_mode != "simulate") {
    t["sweep.mode"] = c.sweep_mode;
    for (const auto& [k, v] : c.sweep_axes) t["sweep." + k] = v;
  }
  return t;
}

// ---------------------------------------------------------------- resolution

/// Concrete parameters with every "auto" replaced.
struct Resolved {
  PlasmaParams params;
  HalfLineGrid grid = HalfLineGrid::uniform(1.0, HalfLineGrid::kMinCells);
  TransverseGrid transverse;
  InitialSpec initial;
  std::vector<WeightSpec> probes;
  double gamma_deg = 0.0;  ///< Gamma of the algebraic asymptotics
  double beta_auto = 1.0;  ///< Gamma sqrt(phi_b), or 1 when phi_b <= 0
};

inline PlasmaParams resolve_params(const RunConfig& c) {
  PlasmaParams p = c.params;
  if (c.u_inf_bohm) p.u_inf = bohm_velocity(p);
  try {
    p.validate();
  } catch (const Error& e) {
    fail(ErrorKind::Config, std::string("params: ") + e.what());
  }
  return p;
}

inline Resolved resolve(const RunConfig& c) {
  Resolved r;
  r.params = resolve_params(c);
  r.gamma_deg = degenerate_gamma(r.params);
  r.beta_auto = r.params.phi_b > 0.0 ? r.gamma_deg * std::sqrt(r.params.phi_b) : 1.0;
  const double L = std::isnan(c.grid.L) ? default_length(r.params) : c.grid.L;
  r.grid = c.grid.stretching == Stretching::Uniform
               ? HalfLineGrid::uniform(L, c.grid.M)
               : HalfLineGrid::stretched(L, c.grid.M, c.grid.stretch);
  r.transverse = TransverseGrid{c.grid.ny, c.grid.Ly};
  InitialSpec& is = r.initial;
  is.family = c.family;
  is.amplitude = c.amplitude;
  is.lambda = c.init_lambda;
  is.beta = std::isnan(c.init_beta) ? r.beta_auto : c.init_beta;
  is.center = c.center;
  is.width = c.width;
  is.psi_scale = c.psi_scale;
  is.zeta_scale = c.zeta_scale;
  is.transverse_modulation = c.transverse_modulation;
  is.jitter = c.jitter;
  is.seed = c.seed;
  for (const auto& p : c.probes) {
    WeightSpec w;
    w.kind = p.kind;
    w.alpha = p.alpha;
    w.beta = std::isnan(p.beta) ? r.beta_auto : p.beta;
    w.lambda = p.lambda;
    w.order = p.order;
    w.id = p.id;
    try {
      w.validate();
    } catch (const Error& e) {
      fail(ErrorKind::Config, "probe:" + p.id + ": " + e.what());
    }
    r.probes.push_back(w);
  }
  return r;
}

}  // namespace sheath::harness
