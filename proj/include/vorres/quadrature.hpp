#pragma once

#include <cmath>
#include <queue>
#include <span>
#include <vector>

#include "vorres/geometry.hpp"

namespace vorres {

struct TriangleRuleResult {
  double low;   // degree-2, 3 points
  double high;  // degree-5, 7 points
};

template <class F>
TriangleRuleResult apply_triangle_rules(const F& f, const Triangle& t) {
  const double area = std::abs(t.area());
  auto at = [&](double l1, double l2, double l3) {
    return f(Point{l1 * t.a.x + l2 * t.b.x + l3 * t.c.x, l1 * t.a.y + l2 * t.b.y + l3 * t.c.y});
  };
  const double low =
      (at(2.0 / 3, 1.0 / 6, 1.0 / 6) + at(1.0 / 6, 2.0 / 3, 1.0 / 6) + at(1.0 / 6, 1.0 / 6, 2.0 / 3)) /
      3.0;

  static const double s15 = std::sqrt(15.0);
  static const double a1 = (6.0 - s15) / 21.0, b1 = 1.0 - 2.0 * a1;
  static const double a2 = (6.0 + s15) / 21.0, b2 = 1.0 - 2.0 * a2;
  static const double w1 = (155.0 - s15) / 1200.0, w2 = (155.0 + s15) / 1200.0;
  const double high = 0.225 * at(1.0 / 3, 1.0 / 3, 1.0 / 3) +
                      w1 * (at(a1, a1, b1) + at(a1, b1, a1) + at(b1, a1, a1)) +
                      w2 * (at(a2, a2, b2) + at(a2, b2, a2) + at(b2, a2, a2));
  return {area * low, area * high};
}

struct AdaptiveResult {
  double value = 0.0;
  double error = 0.0;
  bool converged = true;
};

// Globally adaptive triangle quadrature: the leaf with the largest
// |high - low| is split into four midpoint children until the summed error
// drops below max(rel_tol * |value|, abs_tol) or refinement is exhausted.
template <class F>
AdaptiveResult adaptive_triangle_quadrature(const F& f, std::span<const Triangle> triangles,
                                            double rel_tol, double abs_tol, int max_depth,
                                            std::size_t max_leaves) {
  struct Leaf {
    Triangle tri;
    double value;
    double error;
    int depth;
    bool operator<(const Leaf& o) const { return error < o.error; }
  };
  std::priority_queue<Leaf> open;
  double value = 0.0, error = 0.0;
  double frozen_value = 0.0, frozen_error = 0.0;
  auto make = [&](const Triangle& t, int depth) {
    const auto r = apply_triangle_rules(f, t);
    return Leaf{t, r.high, std::abs(r.high - r.low), depth};
  };
  for (const Triangle& t : triangles) {
    Leaf l = make(t, 0);
    value += l.value;
    error += l.error;
    open.push(l);
  }
  std::size_t leaves = open.size();
  auto tolerance = [&] { return std::max(rel_tol * std::abs(value), abs_tol); };
  while (!open.empty() && error > tolerance() && frozen_error <= tolerance()) {
    Leaf worst = open.top();
    open.pop();
    if (worst.depth >= max_depth || leaves + 3 > max_leaves) {
      frozen_value += worst.value;
      frozen_error += worst.error;
      if (leaves + 3 > max_leaves) break;
      continue;
    }
    value -= worst.value;
    error -= worst.error;
    const Point ab = 0.5 * (worst.tri.a + worst.tri.b);
    const Point bc = 0.5 * (worst.tri.b + worst.tri.c);
    const Point ca = 0.5 * (worst.tri.c + worst.tri.a);
    const Triangle kids[4] = {{worst.tri.a, ab, ca}, {ab, worst.tri.b, bc},
                              {ca, bc, worst.tri.c}, {ab, bc, ca}};
    for (const Triangle& k : kids) {
      Leaf l = make(k, worst.depth + 1);
      value += l.value;
      error += l.error;
      open.push(l);
    }
    leaves += 3;
  }
  // Re-sum to shed the running-total cancellation.
  double v = 0.0, e = 0.0;
  while (!open.empty()) {
    v += open.top().value;
    e += open.top().error;
    open.pop();
  }
  v += frozen_value;
  e += frozen_error;
  return {v, e, e <= std::max(rel_tol * std::abs(v), abs_tol)};
}

}  // namespace vorres
