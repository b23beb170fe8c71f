#pragma once

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <filesystem>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include "sheath/harness/run.hpp"

namespace sheath::harness {

/// One point of the Cartesian product of the sweep axes.
struct SweepPoint {
  std::size_t index = 0;
  std::string run_id;
  std::vector<std::pair<std::string, std::string>> assignment;  ///< axis key -> value
};

inline std::vector<std::string> split_values(const std::string& key, const std::string& list) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= list.size()) {
    auto end = list.find(',', start);
    if (end == std::string::npos) end = list.size();
    std::string v = list.substr(start, end - start);
    v.erase(0, v.find_first_not_of(" \t"));
    v.erase(v.find_last_not_of(" \t") + 1);
    if (v.empty()) fail(ErrorKind::Config, "sweep axis '" + key + "' has an empty value");
    out.push_back(v);
    start = end + 1;
  }
  return out;
}

/// Expands the axes in key order; the last axis varies fastest.
inline std::vector<SweepPoint> expand_sweep(const RunConfig& base) {
  std::vector<std::pair<std::string, std::vector<std::string>>> axes;
  for (const auto& [k, v] : base.sweep_axes) axes.emplace_back(k, split_values("sweep." + k, v));
  std::size_t total = 1;
  for (const auto& a : axes) total *= a.second.size();
  std::vector<SweepPoint> pts(total);
  const std::size_t width = std::max<std::size_t>(3, std::to_string(total - 1).size());
  for (std::size_t i = 0; i < total; ++i) {
    SweepPoint& pt = pts[i];
    pt.index = i;
    const std::string digits = std::to_string(i);
    pt.run_id = base.run_id + "_" + std::string(width - digits.size(), '0') + digits;
    std::size_t rem = i;
    for (std::size_t a = axes.size(); a-- > 0;) {
      const auto& vals = axes[a].second;
      pt.assignment.insert(pt.assignment.begin(), {axes[a].first, vals[rem % vals.size()]});
      rem /= vals.size();
    }
  }
  return pts;
}

/// Config of one sweep point: the template with the axis values applied,
/// the sweep section dropped and the run id replaced.
inline RunConfig point_config(const ConfigTable& base_table, const SweepPoint& pt) {
  ConfigTable t;
  for (const auto& [k, v] : base_table)
    if (k.rfind("sweep.", 0) != 0) t[k] = v;
  for (const auto& [k, v] : pt.assignment) t[k] = v;
  t["run.id"] = pt.run_id;
  return from_table(t);
}

struct SweepResult {
  std::vector<SweepPoint> points;
  std::vector<RunOutcome> outcomes;  ///< ordered by point index
  std::filesystem::path aggregate;
};

inline std::string sweep_csv(const SweepResult& res) {
  std::vector<std::string> axes;
  if (!res.points.empty())
    for (const auto& [k, v] : res.points.front().assignment) axes.push_back(k);
  std::set<std::string> keys;
  for (const auto& o : res.outcomes)
    for (const auto& [k, v] : o.results) keys.insert(k);
  std::string s = "index,run_id,status";
  for (const auto& a : axes) s += "," + a;
  for (const auto& k : keys) s += "," + k;
  s += '\n';
  for (std::size_t i = 0; i < res.outcomes.size(); ++i) {
    const RunOutcome& o = res.outcomes[i];
    s += std::to_string(res.points[i].index) + "," + o.run_id + "," + o.status;
    for (const auto& [k, v] : res.points[i].assignment) s += "," + v;
    for (const auto& k : keys) {
      const auto it = o.results.find(k);
      s += "," + io::fmt(it == o.results.end() ? std::numeric_limits<double>::quiet_NaN() : it->second);
    }
    s += '\n';
  }
  return s;
}

/// Runs every sweep point on up to `jobs` threads. Each run owns its
/// directory; the aggregate is assembled from the written manifests, in
/// index order, so it does not depend on scheduling.
inline SweepResult run_sweep(RunKind kind, const RunConfig& base, const std::filesystem::path& out_root,
                             unsigned jobs) {
  SweepResult res;
  res.points = expand_sweep(base);
  const ConfigTable table = to_table(base);
  // Validate every point before launching anything.
  std::vector<RunConfig> configs;
  configs.reserve(res.points.size());
  for (const auto& pt : res.points) configs.push_back(point_config(table, pt));

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < configs.size();) {
      try {
        run_one(kind, configs[i], out_root);
      } catch (const std::exception&) {
        // Surfaces below as a missing manifest; the sweep carries on.
      }
    }
  };
  jobs = std::clamp<unsigned>(jobs, 1, static_cast<unsigned>(std::max<std::size_t>(1, configs.size())));
  {
    std::vector<std::jthread> pool;
    for (unsigned j = 1; j < jobs; ++j) pool.emplace_back(worker);
    worker();
  }

  for (const auto& pt : res.points) {
    const auto path = out_root / pt.run_id / "manifest.json";
    try {
      res.outcomes.push_back(read_manifest(path));
    } catch (const std::exception& e) {
      RunOutcome o;
      o.run_id = pt.run_id;
      o.kind = kind;
      o.status = "MissingManifest";
      o.error = ErrorKind::NumericalBranchFailure;
      o.message = e.what();
      res.outcomes.push_back(o);
    }
  }
  res.aggregate = out_root / (base.run_id + "_sweep.csv");
  io::write_atomic(res.aggregate, sweep_csv(res));
  return res;
}

}  // namespace sheath::harness
