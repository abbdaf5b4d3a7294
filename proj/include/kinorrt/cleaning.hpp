#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <stdexcept>
#include <vector>

#include "kinorrt/kdtree.hpp"
#include "kinorrt/rng.hpp"
#include "kinorrt/types.hpp"

namespace kinorrt {

struct CleanConfig {
  double d = 0.05;     // neighbourhood radius in query space
  int k_max = 5000;    // consecutive misses before the stochastic pass stops
  std::uint64_t seed = 0;
  bool exhaustive = false;  // testing oracle mode; stochastic is production

  void validate() const {
    if (!(d > 0.0)) throw std::invalid_argument("clean: d must be positive");
    if (k_max < 1) throw std::invalid_argument("clean: k_max must be >= 1");
  }
};

namespace detail {

class CleanState {
 public:
  explicit CleanState(const Dataset& data) : data_(data) {
    std::vector<QueryPoint> pts;
    pts.reserve(data.size());
    for (const DatasetEntry& e : data) pts.push_back(query_point(e));
    tree_ = std::make_unique<KdTree4>(std::move(pts));
    alive_list_.reserve(data.size());
    pos_.resize(data.size());
    for (std::size_t i = 0; i < data.size(); ++i) {
      alive_list_.push_back(static_cast<std::uint32_t>(i));
      pos_[i] = i;
    }
  }

  std::size_t alive_count() const { return alive_list_.size(); }
  bool alive(std::size_t id) const { return tree_->alive(id); }
  std::size_t pick(Rng& rng) const {
    return alive_list_[rng.uniform_below(alive_list_.size())];
  }

  // Nearest retained entry other than id itself; nullopt when none remain.
  std::optional<KdTree4::Neighbor> nearest(std::size_t id) const {
    auto nn = tree_->knn(tree_->point(id), 1, id);
    if (nn.empty()) return std::nullopt;
    return nn[0];
  }

  // Removes the higher-cost member of the pair; cost ties keep the earlier
  // entry. Duplicate queries are distance-0 pairs, so the higher-cost
  // duplicate goes the same way.
  void remove_higher_cost(std::size_t a, std::size_t b) {
    const double ca = data_[a].cost;
    const double cb = data_[b].cost;
    const std::size_t victim = (ca > cb || (ca == cb && a > b)) ? a : b;
    tree_->remove(victim);
    const std::size_t slot = pos_[victim];
    const std::uint32_t last = alive_list_.back();
    alive_list_[slot] = last;
    pos_[last] = slot;
    alive_list_.pop_back();
    ++removed_since_rebuild_;
    // Keep queries fast once tombstones dominate.
    if (removed_since_rebuild_ > 1024 && removed_since_rebuild_ * 2 > alive_list_.size()) {
      rebuild();
    }
  }

  Dataset retained() const {
    Dataset out;
    out.reserve(alive_list_.size());
    for (std::size_t i = 0; i < data_.size(); ++i) {
      if (tree_->alive(i)) out.push_back(data_[i]);
    }
    return out;
  }

 private:
  void rebuild() {
    std::vector<QueryPoint> pts;
    pts.reserve(data_.size());
    for (const DatasetEntry& e : data_) pts.push_back(query_point(e));
    std::vector<bool> mask(data_.size(), false);
    for (std::uint32_t id : alive_list_) mask[id] = true;
    tree_ = std::make_unique<KdTree4>(std::move(pts), &mask);
    removed_since_rebuild_ = 0;
  }

  const Dataset& data_;
  std::unique_ptr<KdTree4> tree_;
  std::vector<std::uint32_t> alive_list_;
  std::vector<std::size_t> pos_;
  std::size_t removed_since_rebuild_ = 0;
};

inline void clean_stochastic(CleanState& st, const CleanConfig& cfg) {
  Rng rng(cfg.seed);
  int misses = 0;
  while (misses < cfg.k_max && st.alive_count() > 1) {
    const std::size_t i = st.pick(rng);
    const auto nn = st.nearest(i);
    if (nn && nn->dist < cfg.d) {
      misses = 0;
      st.remove_higher_cost(i, nn->id);
    } else {
      ++misses;
    }
  }
}

inline void clean_exhaustive(CleanState& st, const CleanConfig& cfg) {
  const std::size_t n = st.alive_count();
  bool removed = true;
  while (removed) {
    removed = false;
    for (std::size_t i = 0; i < n && st.alive_count() > 1; ++i) {
      if (!st.alive(i)) continue;
      const auto nn = st.nearest(i);
      if (nn && nn->dist < cfg.d) {
        st.remove_higher_cost(i, nn->id);
        removed = true;
      }
    }
  }
}

}  // namespace detail

// Local-optimum debiasing: repeatedly pair each examined entry with its
// nearest retained neighbour in query space and drop the higher-cost member
// of any pair closer than d. The stochastic mode samples entries uniformly
// and stops after k_max consecutive misses; the exhaustive mode sweeps full
// passes until none removes anything. Output entries are a verbatim subset
// of the input, in input order.
inline Dataset clean_dataset(const Dataset& raw, const CleanConfig& cfg) {
  cfg.validate();
  if (raw.empty()) throw std::invalid_argument("clean_dataset: empty input dataset");
  detail::CleanState st(raw);
  if (cfg.exhaustive) {
    detail::clean_exhaustive(st, cfg);
  } else {
    detail::clean_stochastic(st, cfg);
  }
  return st.retained();
}

}  // namespace kinorrt
