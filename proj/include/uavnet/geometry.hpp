// geometry.hpp

#pragma once

#include <cmath>

namespace uavnet {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Vec2&, const Vec2&) = default;
};

inline double squared_distance(Vec2 a, Vec2 b) {
  const double dx = a.x - b.x;
  const double dy = a.y - b.y;
  return dx * dx + dy * dy;
}

// Single definition of Euclidean distance. Every module that compares
// scores across code paths goes through this function so the rounding is
// identical.
inline double distance(Vec2 a, Vec2 b) { return std::sqrt(squared_distance(a, b)); }

}  // namespace uavnet
