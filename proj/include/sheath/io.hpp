#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "sheath/diagnostics.hpp"
#include "sheath/dynamics.hpp"
#include "sheath/error.hpp"
#include "sheath/stationary.hpp"

namespace sheath::io {

/// Shortest text that reads back to the same double (17 significant digits).
inline std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

/// Writes through a sibling temporary file and renames it into place, so
/// readers never observe a partial file.
inline void write_atomic(const std::filesystem::path& path, const std::string& content) {
  std::filesystem::create_directories(path.parent_path());
  const auto tmp = std::filesystem::path(path).concat(".tmp");
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) fail(ErrorKind::InvalidArgument, "cannot write '" + tmp.string() + "'");
    out << content;
    out.flush();
    if (!out) fail(ErrorKind::InvalidArgument, "write failed for '" + tmp.string() + "'");
  }
  std::filesystem::rename(tmp, path);
}

inline std::string profile_csv(const StationaryProfile& prof) {
  std::string s = "x1,n,u,T,phi,dphi,d2phi,d3phi\n";
  for (std::size_t j = 0; j < prof.size(); ++j) {
    s += fmt(prof.grid[j]);
    for (const auto* col : {&prof.n, &prof.u, &prof.T, &prof.phi, &prof.dphi, &prof.d2phi, &prof.d3phi}) {
      s += ',';
      s += fmt((*col)[j]);
    }
    s += '\n';
  }
  return s;
}

inline std::string trajectory_csv(const Trajectory& tr) {
  std::string s = "t";
  for (const auto& id : tr.probe_ids) s += ",norm_" + id;
  s += ",E0,min_n,min_T,max_speed\n";
  for (std::size_t i = 0; i < tr.rows(); ++i) {
    s += fmt(tr.t[i]);
    for (const auto& col : tr.norms) s += ',' + fmt(col[i]);
    for (const auto* col : {&tr.E0, &tr.min_n, &tr.min_T, &tr.max_speed}) s += ',' + fmt((*col)[i]);
    s += '\n';
  }
  return s;
}

inline std::string qform_csv(const QFormReport& q) {
  std::string s = "x1,q1,q2,q3,q4,q5,B,S,min_eig_scaled,ok44,ok45,ok46\n";
  for (std::size_t j = 0; j < q.size(); ++j) {
    for (const auto* col : {&q.x1, &q.q1, &q.q2, &q.q3, &q.q4, &q.q5, &q.B, &q.S, &q.min_eig_scaled})
      s += fmt((*col)[j]) + ',';
    s += std::to_string(int(q.ok44[j] != 0)) + ',' + std::to_string(int(q.ok45[j] != 0)) + ',' +
         std::to_string(int(q.ok46[j] != 0)) + '\n';
  }
  return s;
}

/// Column-major numeric table read back from one of the CSV outputs.
struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<double>> columns;

  std::size_t rows() const { return columns.empty() ? 0 : columns.front().size(); }
  std::ptrdiff_t find(const std::string& name) const {
    for (std::size_t i = 0; i < header.size(); ++i)
      if (header[i] == name) return static_cast<std::ptrdiff_t>(i);
    return -1;
  }
  const std::vector<double>& column(const std::string& name) const {
    const auto i = find(name);
    if (i < 0) fail(ErrorKind::InvalidArgument, "csv has no column '" + name + "'");
    return columns[static_cast<std::size_t>(i)];
  }
};

inline Table read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::InvalidArgument, "cannot open '" + path + "'");
  Table t;
  std::string line;
  if (!std::getline(in, line)) fail(ErrorKind::InvalidArgument, "'" + path + "' is empty");
  {
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) t.header.push_back(cell);
  }
  t.columns.assign(t.header.size(), {});
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    std::size_t c = 0;
    while (std::getline(ss, cell, ',')) {
      if (c >= t.header.size()) break;
      char* end = nullptr;
      const double v = std::strtod(cell.c_str(), &end);
      if (end == cell.c_str() || *end != '\0')
        fail(ErrorKind::InvalidArgument,
             path + ":" + std::to_string(lineno) + ": '" + cell + "' is not a number");
      t.columns[c++].push_back(v);
    }
    if (c != t.header.size())
      fail(ErrorKind::InvalidArgument, path + ":" + std::to_string(lineno) + ": wrong column count");
  }
  return t;
}

}  // namespace sheath::io
