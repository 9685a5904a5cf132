// kdtree.hpp
//
// Static 2-D k-d tree over a point set with k-nearest-neighbour queries.
// Neighbours are ordered by (distance, index), so equidistant points
// resolve deterministically toward the lower index.

#pragma once

#include <algorithm>
#include <cstddef>
#include <queue>
#include <span>
#include <utility>
#include <vector>

#include "uavnet/geometry.hpp"

namespace uavnet {

class KdTree2 {
 public:
  explicit KdTree2(std::span<const Vec2> points) : points_(points.begin(), points.end()), order_(points.size()) {
    for (std::size_t i = 0; i < order_.size(); ++i) order_[i] = i;
    build(0, order_.size(), 0);
  }

  std::size_t size() const { return points_.size(); }

  // k nearest points to points[query], the query itself excluded.
  std::vector<std::size_t> nearest_to_member(std::size_t query, std::size_t k) const {
    return nearest(points_[query], k, query);
  }

  // k nearest points to q, skipping index `exclude` (pass size() to keep all).
  std::vector<std::size_t> nearest(Vec2 q, std::size_t k, std::size_t exclude) const {
    Heap heap;
    if (k > 0) search(0, order_.size(), 0, q, k, exclude, heap);
    std::vector<std::size_t> out(heap.size());
    for (std::size_t i = heap.size(); i-- > 0;) {
      out[i] = heap.top().second;
      heap.pop();
    }
    return out;
  }

 private:
  // Max-heap on (squared distance, index): top is the current worst.
  using Candidate = std::pair<double, std::size_t>;
  using Heap = std::priority_queue<Candidate>;

  double coord(std::size_t i, int axis) const { return axis == 0 ? points_[i].x : points_[i].y; }

  // The median of order_[lo, hi) sits at mid; left half below, right above.
  void build(std::size_t lo, std::size_t hi, int axis) {
    if (hi - lo <= 1) return;
    const std::size_t mid = lo + (hi - lo) / 2;
    std::nth_element(order_.begin() + static_cast<std::ptrdiff_t>(lo), order_.begin() + static_cast<std::ptrdiff_t>(mid),
                     order_.begin() + static_cast<std::ptrdiff_t>(hi), [this, axis](std::size_t a, std::size_t b) {
                       const double ca = coord(a, axis), cb = coord(b, axis);
                       return ca < cb || (ca == cb && a < b);
                     });
    build(lo, mid, 1 - axis);
    build(mid + 1, hi, 1 - axis);
  }

  void search(std::size_t lo, std::size_t hi, int axis, Vec2 q, std::size_t k, std::size_t exclude,
              Heap& heap) const {
    if (lo >= hi) return;
    const std::size_t mid = lo + (hi - lo) / 2;
    const std::size_t idx = order_[mid];
    if (idx != exclude) {
      const Candidate c{squared_distance(q, points_[idx]), idx};
      if (heap.size() < k) {
        heap.push(c);
      } else if (c < heap.top()) {
        heap.pop();
        heap.push(c);
      }
    }
    const double diff = (axis == 0 ? q.x : q.y) - coord(idx, axis);
    const bool go_left = diff < 0.0;
    if (go_left) {
      search(lo, mid, 1 - axis, q, k, exclude, heap);
    } else {
      search(mid + 1, hi, 1 - axis, q, k, exclude, heap);
    }
    // Equal distances must still be visited so lower indices can win ties.
    if (heap.size() < k || diff * diff <= heap.top().first) {
      if (go_left) {
        search(mid + 1, hi, 1 - axis, q, k, exclude, heap);
      } else {
        search(lo, mid, 1 - axis, q, k, exclude, heap);
      }
    }
  }

  std::vector<Vec2> points_;
  std::vector<std::size_t> order_;
};

}  // namespace uavnet
