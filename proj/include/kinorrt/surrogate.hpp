#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "kinorrt/kdtree.hpp"
#include "kinorrt/types.hpp"

namespace kinorrt {

struct SurrogateConfig {
  std::size_t k = 3;
  double cost_floor = 1e-5;
  double cost_ceiling = 1e5;
  // Validity threshold policy: the given percentile of each training entry's
  // summed k-NN distance against the rest of the set, scaled. A positive
  // validity_threshold overrides the calibration.
  double validity_percentile = 99.5;
  double validity_scale = 1.5;
  double validity_threshold = 0.0;
  double t_f_floor = 0.01;  // steering predictions never below one step

  void validate() const {
    if (k < 1) throw std::invalid_argument("surrogate: k must be >= 1");
    if (!(cost_floor > 0.0) || !(cost_ceiling > cost_floor)) {
      throw std::invalid_argument("surrogate: need 0 < cost_floor < cost_ceiling");
    }
    if (validity_percentile <= 0.0 || validity_percentile > 100.0) {
      throw std::invalid_argument("surrogate: validity_percentile out of (0, 100]");
    }
    if (!(validity_scale > 0.0)) throw std::invalid_argument("surrogate: validity_scale must be positive");
    if (!(t_f_floor > 0.0)) throw std::invalid_argument("surrogate: t_f_floor must be positive");
  }
};

// k-nearest-neighbour models over a cleaned dataset: cost-to-go, steering
// parameters, and query validity share one frozen spatial index. Immutable
// after construction; all queries are read-only and thread-safe.
class SurrogateModel {
 public:
  struct Evaluation {
    double mean_cost = 0.0;          // unclamped neighbour average
    SteeringParams mean_params;      // t_f already floored
    double summed_distance = 0.0;
    std::vector<KdTree4::Neighbor> neighbors;
  };

  SurrogateModel(Dataset entries, SurrogateConfig cfg)
      : entries_(std::move(entries)), cfg_(cfg), index_(points(entries_)) {
    cfg_.validate();
    if (entries_.empty()) throw std::invalid_argument("surrogate: empty dataset");
    if (cfg_.k > entries_.size()) {
      throw std::invalid_argument("surrogate: k exceeds dataset size");
    }
    calibrate_threshold();
    compute_param_domain();
  }

  const Dataset& entries() const { return entries_; }
  std::size_t k() const { return cfg_.k; }
  const SurrogateConfig& config() const { return cfg_; }
  double validity_threshold() const { return threshold_; }

  // Per-parameter (lam_theta0, lam_omega0, t_f) bounds observed in the
  // dataset, expanded by 5% of the span; the planner truncates its
  // perturbations to these.
  const std::array<double, 3>& param_domain_lo() const { return par_lo_; }
  const std::array<double, 3>& param_domain_hi() const { return par_hi_; }

  // One k-NN lookup serving all three predictors.
  Evaluation evaluate(const Query& q) const {
    Evaluation ev;
    ev.neighbors = index_.knn(query_point(q), cfg_.k);
    double cost = 0.0, lt = 0.0, lo = 0.0, tf = 0.0;
    for (const auto& nb : ev.neighbors) {
      const DatasetEntry& e = entries_[nb.id];
      cost += e.cost;
      lt += e.params.lam_theta0;
      lo += e.params.lam_omega0;
      tf += e.params.t_f;
      ev.summed_distance += nb.dist;
    }
    const auto n = static_cast<double>(ev.neighbors.size());
    ev.mean_cost = cost / n;
    ev.mean_params = {lt / n, lo / n, std::max(tf / n, cfg_.t_f_floor)};
    return ev;
  }

  // Neighbour-average cost-to-go, saturated into [cost_floor, cost_ceiling].
  double predict_cost(const Query& q) const {
    return clamp_cost(evaluate(q).mean_cost);
  }

  SteeringParams predict_steering(const Query& q) const {
    return evaluate(q).mean_params;
  }

  // A query is valid when its summed k-NN distance stays within the
  // calibrated threshold, i.e. the dataset actually covers it.
  bool is_valid(const Query& q) const {
    return evaluate(q).summed_distance <= threshold_;
  }

  double clamp_cost(double c) const {
    return std::min(std::max(c, cfg_.cost_floor), cfg_.cost_ceiling);
  }

  const KdTree4& index() const { return index_; }

 private:
  static std::vector<QueryPoint> points(const Dataset& d) {
    if (d.empty()) throw std::invalid_argument("surrogate: empty dataset");
    std::vector<QueryPoint> pts;
    pts.reserve(d.size());
    for (const DatasetEntry& e : d) pts.push_back(query_point(e));
    return pts;
  }

  void calibrate_threshold() {
    if (cfg_.validity_threshold > 0.0) {
      threshold_ = cfg_.validity_threshold;
      return;
    }
    std::vector<double> sums;
    sums.reserve(entries_.size());
    for (std::size_t i = 0; i < entries_.size(); ++i) {
      const auto nn = index_.knn(index_.point(i), cfg_.k, i);
      double s = 0.0;
      for (const auto& nb : nn) s += nb.dist;
      sums.push_back(s);
    }
    std::sort(sums.begin(), sums.end());
    // Linear-interpolated percentile.
    const double pos = (cfg_.validity_percentile / 100.0) * static_cast<double>(sums.size() - 1);
    const auto i0 = static_cast<std::size_t>(pos);
    const std::size_t i1 = std::min(i0 + 1, sums.size() - 1);
    const double frac = pos - static_cast<double>(i0);
    threshold_ = cfg_.validity_scale * ((1.0 - frac) * sums[i0] + frac * sums[i1]);
  }

  void compute_param_domain() {
    std::array<double, 3> lo{entries_[0].params.lam_theta0, entries_[0].params.lam_omega0,
                             entries_[0].params.t_f};
    std::array<double, 3> hi = lo;
    for (const DatasetEntry& e : entries_) {
      const std::array<double, 3> v{e.params.lam_theta0, e.params.lam_omega0, e.params.t_f};
      for (int a = 0; a < 3; ++a) {
        lo[a] = std::min(lo[a], v[a]);
        hi[a] = std::max(hi[a], v[a]);
      }
    }
    for (int a = 0; a < 3; ++a) {
      const double pad = 0.05 * (hi[a] - lo[a]);
      par_lo_[a] = lo[a] - pad;
      par_hi_[a] = hi[a] + pad;
    }
  }

  Dataset entries_;
  SurrogateConfig cfg_;
  KdTree4 index_;
  double threshold_ = 0.0;
  std::array<double, 3> par_lo_{};
  std::array<double, 3> par_hi_{};
};

// Spec-shaped constructor name; the model is its own index.
inline SurrogateModel build_index(Dataset entries, SurrogateConfig cfg) {
  return SurrogateModel(std::move(entries), cfg);
}

}  // namespace kinorrt
