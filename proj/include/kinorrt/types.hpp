#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <vector>

namespace kinorrt {

// Pendulum configuration point. The angle lives on the real line and is
// never wrapped: sampling ranges span more than one revolution, and tree
// plots use the unwrapped axis.
struct State {
  double theta = 0.0;  // angle [rad]
  double omega = 0.0;  // angular velocity [rad/s]
};

// Lagrange multipliers of the dynamics constraint.
struct Costate {
  double lam_theta = 0.0;
  double lam_omega = 0.0;
};

// Weight of the time term in the running cost w + u^2/2. Must be positive.
struct CostWeight {
  double w = 1.0;
};

// Low-dimensional action representation: initial costate plus final time.
struct SteeringParams {
  double lam_theta0 = 0.0;
  double lam_omega0 = 0.0;
  double t_f = 0.0;  // [s]
};

// One optimal segment. sim_id ties the intermediate harvests of a single
// simulation together; train/test splits must respect it.
struct DatasetEntry {
  State x0;
  State x1;
  double cost = 0.0;
  SteeringParams params;
  std::uint32_t sim_id = 0;
};

using Dataset = std::vector<DatasetEntry>;

// A (start, end) state pair, the input of the learned models.
struct Query {
  State x0;
  State x1;
};

inline bool is_finite(const State& x) {
  return std::isfinite(x.theta) && std::isfinite(x.omega);
}

inline bool is_finite(const Costate& l) {
  return std::isfinite(l.lam_theta) && std::isfinite(l.lam_omega);
}

inline double state_distance(const State& a, const State& b) {
  return std::hypot(a.theta - b.theta, a.omega - b.omega);
}

using QueryPoint = std::array<double, 4>;

inline QueryPoint query_point(const Query& q) {
  return {q.x0.theta, q.x0.omega, q.x1.theta, q.x1.omega};
}

inline QueryPoint query_point(const DatasetEntry& e) {
  return query_point(Query{e.x0, e.x1});
}

inline double query_point_distance(const QueryPoint& a, const QueryPoint& b) {
  double s = 0.0;
  for (int i = 0; i < 4; ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return std::sqrt(s);
}

// Euclidean distance in the 4-dimensional (x0, x1) query space. Cost and
// steering parameters never enter: local-optimum bias manifests as multiple
// costs at the same query, and those must count as distance zero.
inline double query_distance(const DatasetEntry& a, const DatasetEntry& b) {
  return query_point_distance(query_point(a), query_point(b));
}

inline double query_distance(const Query& a, const Query& b) {
  return query_point_distance(query_point(a), query_point(b));
}

// Closed interval used for sampling ranges. lo == hi is allowed and pins the
// sampled value.
struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  bool valid() const { return std::isfinite(lo) && std::isfinite(hi) && lo <= hi; }
  double width() const { return hi - lo; }
  bool contains(double v) const { return v >= lo && v <= hi; }
};

}  // namespace kinorrt
