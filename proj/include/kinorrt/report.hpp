#pragma once

#include <string>

#include <json.hpp>

#include "kinorrt/experiment.hpp"
#include "kinorrt/io.hpp"

namespace kinorrt {

namespace detail {

inline nlohmann::json to_json(const Quartiles& q) {
  return {{"q1", q.q1}, {"median", q.median}, {"q3", q.q3}};
}

inline nlohmann::json to_json(const EpochStats& e) {
  return {{"epoch", e.epoch},
          {"raw_entries", e.raw_entries},
          {"clean_entries", e.clean_entries},
          {"held_entries", e.held_entries},
          {"offline_seconds", e.offline_seconds},
          {"steering_error_median", e.steering_error_median},
          {"runs", e.n_runs},
          {"successes", e.n_success},
          {"success_rate", e.success_rate},
          {"nodes", to_json(e.nodes)},
          {"plan_seconds", to_json(e.plan_seconds)}};
}

}  // namespace detail

inline void write_report_json(const std::string& path, const MetricsReport& rep) {
  nlohmann::json j;
  j["pooled"] = {{"success_rate", rep.success_rate},
                 {"nodes", detail::to_json(rep.nodes)},
                 {"plan_seconds", detail::to_json(rep.plan_seconds)},
                 {"steering_error_median", rep.steering_error_median},
                 {"total_offline_seconds", rep.total_offline_seconds}};
  j["epochs"] = nlohmann::json::array();
  for (const EpochStats& e : rep.epochs) j["epochs"].push_back(detail::to_json(e));
  auto f = detail::open_out(path);
  f << j.dump(2) << '\n';
  if (!f) throw IoError("write failed for '" + path + "'");
}

inline constexpr const char* kRunsHeader =
    "epoch,run,seed,success,nodes,iterations,plan_seconds,path_cost";

inline void write_runs_csv(const std::string& path, const std::vector<RunRecord>& runs) {
  auto f = detail::open_out(path);
  f << kRunsHeader << '\n';
  for (const RunRecord& r : runs) {
    f << r.epoch << ',' << r.run << ',' << r.seed << ',' << (r.success ? 1 : 0) << ',' << r.nodes
      << ',' << r.iterations << ',' << detail::format_double(r.plan_seconds) << ','
      << detail::format_double(r.path_cost) << '\n';
  }
  if (!f) throw IoError("write failed for '" + path + "'");
}

// Per-epoch planning times of successful runs, one row per run: the data
// behind a per-epoch boxplot.
inline void write_epoch_times_csv(const std::string& path, const std::vector<RunRecord>& runs) {
  auto f = detail::open_out(path);
  f << "epoch,plan_seconds\n";
  for (const RunRecord& r : runs) {
    if (r.success) f << r.epoch << ',' << detail::format_double(r.plan_seconds) << '\n';
  }
  if (!f) throw IoError("write failed for '" + path + "'");
}

}  // namespace kinorrt
