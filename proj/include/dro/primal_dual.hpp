#pragma once

#include "dro/linalg.hpp"

#include <cmath>

namespace dro {

/// A pair (x, p): primal point and scenario weights.
struct PrimalDualPoint {
  Vector x;
  Vector p;

  PrimalDualPoint& operator+=(const PrimalDualPoint& o) {
    x += o.x;
    p += o.p;
    return *this;
  }
  PrimalDualPoint& operator-=(const PrimalDualPoint& o) {
    x -= o.x;
    p -= o.p;
    return *this;
  }
  PrimalDualPoint& operator*=(double s) {
    x *= s;
    p *= s;
    return *this;
  }

  [[nodiscard]] double squared_norm() const { return x.squaredNorm() + p.squaredNorm(); }
  [[nodiscard]] double norm() const { return std::sqrt(squared_norm()); }
  [[nodiscard]] double dot(const PrimalDualPoint& o) const { return x.dot(o.x) + p.dot(o.p); }
};

inline PrimalDualPoint operator+(PrimalDualPoint a, const PrimalDualPoint& b) { return a += b; }
inline PrimalDualPoint operator-(PrimalDualPoint a, const PrimalDualPoint& b) { return a -= b; }
inline PrimalDualPoint operator*(double s, PrimalDualPoint a) { return a *= s; }

}  // namespace dro
