#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

namespace spectro {

/// z = (q, p) in R^{2d}.
struct PhasePoint {
  std::vector<double> q;
  std::vector<double> p;

  PhasePoint() = default;
  PhasePoint(std::vector<double> q_, std::vector<double> p_) : q(std::move(q_)), p(std::move(p_)) {
    if (q.size() != p.size()) throw std::invalid_argument("PhasePoint: dim(q) != dim(p)");
  }
  /// 1D convenience.
  PhasePoint(double q1, double p1) : q{q1}, p{p1} {}

  static PhasePoint zero(int d) {
    return PhasePoint(std::vector<double>(d, 0.0), std::vector<double>(d, 0.0));
  }

  int dim() const { return static_cast<int>(q.size()); }

  /// |z|^2 = |q|^2 + |p|^2.
  double squared_norm() const {
    double s = 0.0;
    for (double v : q) s += v * v;
    for (double v : p) s += v * v;
    return s;
  }

  /// |z_j|^2 = q_j^2 + p_j^2 for one axis.
  double axis_squared_norm(int j) const { return q[j] * q[j] + p[j] * p[j]; }

  friend PhasePoint operator-(const PhasePoint& a, const PhasePoint& b) {
    PhasePoint r = a;
    for (int j = 0; j < r.dim(); ++j) {
      r.q[j] -= b.q[j];
      r.p[j] -= b.p[j];
    }
    return r;
  }

  bool operator==(const PhasePoint& o) const = default;
};

}  // namespace spectro
