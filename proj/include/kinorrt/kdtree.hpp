#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <vector>

#include "kinorrt/types.hpp"

namespace kinorrt {

// Static kd-tree over 4-d query points with tombstoning.
//
// Determinism contract: neighbour ties at equal distance resolve toward the
// lower point id, matching the linear-scan oracle the tests compare against.
// Pruning therefore only skips a subtree when it is strictly farther than
// the current worst neighbour, never at equality.
class KdTree4 {
 public:
  struct Neighbor {
    std::size_t id = 0;
    double dist = 0.0;
  };

  static constexpr std::size_t npos = std::numeric_limits<std::size_t>::max();

  explicit KdTree4(std::vector<QueryPoint> points, const std::vector<bool>* alive_mask = nullptr)
      : pts_(std::move(points)) {
    const std::size_t n = pts_.size();
    if (n == 0) throw std::invalid_argument("KdTree4: empty point set");
    node_of_.assign(n, -1);
    alive_.assign(n, true);
    std::vector<std::uint32_t> ids;
    ids.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
      if (alive_mask && !(*alive_mask)[i]) {
        alive_[i] = false;
        continue;
      }
      ids.push_back(static_cast<std::uint32_t>(i));
    }
    alive_count_ = ids.size();
    nodes_.reserve(ids.size());
    if (!ids.empty()) root_ = build(ids.data(), ids.size(), -1);
  }

  std::size_t size() const { return pts_.size(); }
  std::size_t alive_count() const { return alive_count_; }
  bool alive(std::size_t id) const { return alive_[id]; }
  const QueryPoint& point(std::size_t id) const { return pts_[id]; }

  void remove(std::size_t id) {
    if (!alive_[id]) return;
    alive_[id] = false;
    --alive_count_;
    for (std::int32_t v = node_of_[id]; v >= 0; v = nodes_[v].parent) {
      --nodes_[v].subtree_alive;
    }
  }

  // k nearest alive points to q (excluding exclude_id), sorted by
  // (distance, id). Returns fewer than k when not enough alive points exist.
  std::vector<Neighbor> knn(const QueryPoint& q, std::size_t k, std::size_t exclude_id = npos) const {
    std::vector<Neighbor> out;
    if (k == 0 || root_ < 0) return out;
    Search s{q, k, exclude_id, {}};
    s.heap.reserve(k + 1);
    search(root_, s);
    std::sort(s.heap.begin(), s.heap.end(), cand_less);
    out.reserve(s.heap.size());
    for (const Cand& c : s.heap) out.push_back({c.id, std::sqrt(c.d2)});
    return out;
  }

 private:
  struct Node {
    std::int32_t left = -1;
    std::int32_t right = -1;
    std::int32_t parent = -1;
    std::uint32_t point_id = 0;
    std::uint32_t subtree_alive = 0;
    std::uint8_t axis = 0;
  };

  struct Cand {
    double d2 = 0.0;
    std::size_t id = 0;
  };

  static bool cand_less(const Cand& a, const Cand& b) {
    return a.d2 < b.d2 || (a.d2 == b.d2 && a.id < b.id);
  }

  struct Search {
    QueryPoint q;
    std::size_t k;
    std::size_t exclude;
    std::vector<Cand> heap;  // max-heap by cand_less; top is the worst kept
  };

  std::int32_t build(std::uint32_t* ids, std::size_t n, std::int32_t parent) {
    // Split along the widest axis of the bounding box; ties pick the lowest
    // axis so the structure is deterministic.
    QueryPoint lo = pts_[ids[0]];
    QueryPoint hi = pts_[ids[0]];
    for (std::size_t i = 1; i < n; ++i) {
      const QueryPoint& p = pts_[ids[i]];
      for (int a = 0; a < 4; ++a) {
        lo[a] = std::min(lo[a], p[a]);
        hi[a] = std::max(hi[a], p[a]);
      }
    }
    int axis = 0;
    double best = hi[0] - lo[0];
    for (int a = 1; a < 4; ++a) {
      if (hi[a] - lo[a] > best) {
        best = hi[a] - lo[a];
        axis = a;
      }
    }
    const std::size_t mid = n / 2;
    std::nth_element(ids, ids + mid, ids + n, [&](std::uint32_t a, std::uint32_t b) {
      return pts_[a][axis] < pts_[b][axis] || (pts_[a][axis] == pts_[b][axis] && a < b);
    });

    const auto v = static_cast<std::int32_t>(nodes_.size());
    nodes_.push_back({});
    nodes_[v].parent = parent;
    nodes_[v].point_id = ids[mid];
    nodes_[v].subtree_alive = static_cast<std::uint32_t>(n);
    nodes_[v].axis = static_cast<std::uint8_t>(axis);
    node_of_[ids[mid]] = v;
    if (mid > 0) nodes_[v].left = build(ids, mid, v);
    if (mid + 1 < n) nodes_[v].right = build(ids + mid + 1, n - mid - 1, v);
    return v;
  }

  void consider(std::size_t id, Search& s) const {
    if (!alive_[id] || id == s.exclude) return;
    double d2 = 0.0;
    const QueryPoint& p = pts_[id];
    for (int a = 0; a < 4; ++a) {
      const double d = s.q[a] - p[a];
      d2 += d * d;
    }
    const Cand c{d2, id};
    if (s.heap.size() < s.k) {
      s.heap.push_back(c);
      std::push_heap(s.heap.begin(), s.heap.end(), cand_less);
    } else if (cand_less(c, s.heap.front())) {
      std::pop_heap(s.heap.begin(), s.heap.end(), cand_less);
      s.heap.back() = c;
      std::push_heap(s.heap.begin(), s.heap.end(), cand_less);
    }
  }

  void search(std::int32_t v, Search& s) const {
    const Node& nd = nodes_[v];
    if (nd.subtree_alive == 0) return;
    consider(nd.point_id, s);
    const double delta = s.q[nd.axis] - pts_[nd.point_id][nd.axis];
    const std::int32_t near = delta < 0.0 ? nd.left : nd.right;
    const std::int32_t far = delta < 0.0 ? nd.right : nd.left;
    if (near >= 0) search(near, s);
    if (far >= 0) {
      // Descend at equality too: an equal-distance lower-id point may sit on
      // the far side and must win the tie.
      if (s.heap.size() < s.k || delta * delta <= s.heap.front().d2) search(far, s);
    }
  }

  std::vector<QueryPoint> pts_;
  std::vector<Node> nodes_;
  std::vector<std::int32_t> node_of_;
  std::vector<bool> alive_;
  std::size_t alive_count_ = 0;
  std::int32_t root_ = -1;
};

}  // namespace kinorrt
