#pragma once

#include <charconv>
#include <cstdint>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "kinorrt/dynamics.hpp"
#include "kinorrt/planner.hpp"
#include "kinorrt/types.hpp"

namespace kinorrt {

class IoError : public std::runtime_error {
 public:
  explicit IoError(const std::string& msg) : std::runtime_error(msg) {}
};

namespace detail {

// Shortest round-trippable decimal form.
inline std::string format_double(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

inline double parse_double(std::string_view s, const std::string& where) {
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc{} || res.ptr != s.data() + s.size()) {
    throw IoError(where + ": bad number '" + std::string(s) + "'");
  }
  return v;
}

inline std::uint64_t parse_uint(std::string_view s, const std::string& where) {
  std::uint64_t v = 0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc{} || res.ptr != s.data() + s.size()) {
    throw IoError(where + ": bad integer '" + std::string(s) + "'");
  }
  return v;
}

inline std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t p = line.find(sep, start);
    if (p == std::string_view::npos) {
      out.push_back(line.substr(start));
      break;
    }
    out.push_back(line.substr(start, p - start));
    start = p + 1;
  }
  return out;
}

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) {
    s.remove_prefix(1);
  }
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

inline std::ofstream open_out(const std::string& path) {
  std::ofstream f(path);
  if (!f) throw IoError("cannot open '" + path + "' for writing");
  return f;
}

inline std::ifstream open_in(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw IoError("cannot open '" + path + "' for reading");
  return f;
}

}  // namespace detail

inline constexpr const char* kDatasetHeader =
    "theta0,omega0,theta1,omega1,cost,lam_theta0,lam_omega0,t_f,sim_id";

inline void write_dataset(const std::string& path, const Dataset& data) {
  auto f = detail::open_out(path);
  f << kDatasetHeader << '\n';
  for (const DatasetEntry& e : data) {
    f << detail::format_double(e.x0.theta) << ',' << detail::format_double(e.x0.omega) << ','
      << detail::format_double(e.x1.theta) << ',' << detail::format_double(e.x1.omega) << ','
      << detail::format_double(e.cost) << ',' << detail::format_double(e.params.lam_theta0) << ','
      << detail::format_double(e.params.lam_omega0) << ',' << detail::format_double(e.params.t_f)
      << ',' << e.sim_id << '\n';
  }
  if (!f) throw IoError("write failed for '" + path + "'");
}

inline Dataset read_dataset(const std::string& path) {
  auto f = detail::open_in(path);
  std::string line;
  if (!std::getline(f, line) || detail::trim(line) != kDatasetHeader) {
    throw IoError(path + ": missing or unexpected dataset header");
  }
  Dataset data;
  std::size_t lineno = 1;
  while (std::getline(f, line)) {
    ++lineno;
    const auto t = detail::trim(line);
    if (t.empty()) continue;
    const auto cols = detail::split(t, ',');
    const std::string where = path + ":" + std::to_string(lineno);
    if (cols.size() != 9) throw IoError(where + ": expected 9 columns");
    DatasetEntry e;
    e.x0.theta = detail::parse_double(cols[0], where);
    e.x0.omega = detail::parse_double(cols[1], where);
    e.x1.theta = detail::parse_double(cols[2], where);
    e.x1.omega = detail::parse_double(cols[3], where);
    e.cost = detail::parse_double(cols[4], where);
    e.params.lam_theta0 = detail::parse_double(cols[5], where);
    e.params.lam_omega0 = detail::parse_double(cols[6], where);
    e.params.t_f = detail::parse_double(cols[7], where);
    e.sim_id = static_cast<std::uint32_t>(detail::parse_uint(cols[8], where));
    data.push_back(e);
  }
  return data;
}

inline constexpr const char* kTreeHeader =
    "node_id,parent_id,theta,omega,edge_cost,lam_theta0,lam_omega0,t_f";

namespace detail {

inline void write_tree_row(std::ofstream& f, const Tree& tree, std::size_t id) {
  const TreeNode& n = tree[id];
  f << id << ',' << n.parent << ',' << format_double(n.state.theta) << ','
    << format_double(n.state.omega) << ',' << format_double(n.edge_cost) << ',';
  if (n.edge_params) {
    f << format_double(n.edge_params->lam_theta0) << ',' << format_double(n.edge_params->lam_omega0)
      << ',' << format_double(n.edge_params->t_f);
  } else {
    f << ",,";
  }
  f << '\n';
}

}  // namespace detail

inline void write_tree_csv(const std::string& path, const Tree& tree) {
  auto f = detail::open_out(path);
  f << kTreeHeader << '\n';
  for (std::size_t id = 0; id < tree.size(); ++id) detail::write_tree_row(f, tree, id);
  if (!f) throw IoError("write failed for '" + path + "'");
}

inline void write_path_csv(const std::string& path, const Tree& tree,
                           const std::vector<std::size_t>& node_ids) {
  auto f = detail::open_out(path);
  f << kTreeHeader << '\n';
  for (std::size_t id : node_ids) detail::write_tree_row(f, tree, id);
  if (!f) throw IoError("write failed for '" + path + "'");
}

// Densely sampled edge trajectories for curved-edge plotting: one row per
// integration sample per edge.
inline void write_edge_trajectories_csv(const std::string& path, const Tree& tree, double dt,
                                        CostWeight w) {
  auto f = detail::open_out(path);
  f << "node_id,t,theta,omega\n";
  for (std::size_t id = 0; id < tree.size(); ++id) {
    const TreeNode& n = tree[id];
    if (!n.edge_params) continue;
    const auto traj =
        integrate(PendulumSystem{}, tree[n.parent].state,
                  Costate{n.edge_params->lam_theta0, n.edge_params->lam_omega0},
                  n.edge_params->t_f, dt, w);
    for (const auto& s : traj.samples) {
      f << id << ',' << detail::format_double(s.t) << ',' << detail::format_double(s.x.theta)
        << ',' << detail::format_double(s.x.omega) << '\n';
    }
  }
  if (!f) throw IoError("write failed for '" + path + "'");
}

// Flat key = value file with '#' comments.
using ConfigMap = std::map<std::string, std::string, std::less<>>;

inline ConfigMap read_config_file(const std::string& path) {
  auto f = detail::open_in(path);
  ConfigMap kv;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(f, line)) {
    ++lineno;
    std::string_view s = line;
    const std::size_t hash = s.find('#');
    if (hash != std::string_view::npos) s = s.substr(0, hash);
    s = detail::trim(s);
    if (s.empty()) continue;
    const std::size_t eq = s.find('=');
    if (eq == std::string_view::npos) {
      throw IoError(path + ":" + std::to_string(lineno) + ": expected key = value");
    }
    const auto key = detail::trim(s.substr(0, eq));
    const auto val = detail::trim(s.substr(eq + 1));
    if (key.empty()) throw IoError(path + ":" + std::to_string(lineno) + ": empty key");
    kv[std::string(key)] = std::string(val);
  }
  return kv;
}

}  // namespace kinorrt
