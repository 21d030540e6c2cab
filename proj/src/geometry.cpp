#include "vorres/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <string>

#include "vorres/rng.hpp"
#include "vorres/text.hpp"

namespace vorres {
namespace {

constexpr double kSlack = 1e-12;

std::string describe(Point p) {
  return "(" + format_double(p.x) + ", " + format_double(p.y) + ")";
}

double coordinate_scale(std::span<const Point> polygon) {
  double s = 0.0;
  for (Point v : polygon) s = std::max({s, std::abs(v.x), std::abs(v.y)});
  return s;
}

void drop_repeated_vertices(std::vector<Point>& poly, double tol) {
  if (poly.size() < 2) return;
  std::vector<Point> out;
  out.reserve(poly.size());
  for (Point v : poly) {
    if (out.empty() || squared_distance(out.back(), v) > tol * tol) out.push_back(v);
  }
  while (out.size() > 1 && squared_distance(out.front(), out.back()) <= tol * tol)
    out.pop_back();
  poly = std::move(out);
}

bool on_same_side(Point a, Point b, const Window& w, double tol) {
  auto near = [tol](double u, double v) { return std::abs(u - v) <= tol; };
  return (near(a.x, w.xmin()) && near(b.x, w.xmin())) ||
         (near(a.x, w.xmax()) && near(b.x, w.xmax())) ||
         (near(a.y, w.ymin()) && near(b.y, w.ymin())) ||
         (near(a.y, w.ymax()) && near(b.y, w.ymax()));
}

// Uniform bucket grid over the window; buckets hold point indices.
class BucketGrid {
 public:
  BucketGrid(std::span<const Point> points, const Window& window) : window_(window) {
    const double n = static_cast<double>(points.size());
    const double aspect = window.width() / window.height();
    nx_ = std::max<long>(1, std::lround(std::sqrt(n * aspect)));
    ny_ = std::max<long>(1, std::lround(std::sqrt(n / aspect)));
    bw_ = window.width() / static_cast<double>(nx_);
    bh_ = window.height() / static_cast<double>(ny_);
    start_.assign(static_cast<std::size_t>(nx_ * ny_) + 1, 0);
    std::vector<std::size_t> bucket_of(points.size());
    for (std::size_t i = 0; i < points.size(); ++i) {
      bucket_of[i] = bucket(points[i]);
      ++start_[bucket_of[i] + 1];
    }
    std::partial_sum(start_.begin(), start_.end(), start_.begin());
    items_.resize(points.size());
    std::vector<std::size_t> fill(start_.begin(), start_.end() - 1);
    for (std::size_t i = 0; i < points.size(); ++i) items_[fill[bucket_of[i]]++] = i;
  }

  long column(double x) const {
    return std::clamp<long>(static_cast<long>((x - window_.xmin()) / bw_), 0, nx_ - 1);
  }
  long row(double y) const {
    return std::clamp<long>(static_cast<long>((y - window_.ymin()) / bh_), 0, ny_ - 1);
  }
  std::size_t bucket(Point p) const {
    return static_cast<std::size_t>(row(p.y) * nx_ + column(p.x));
  }

  long max_ring() const { return std::max(nx_, ny_); }

  // Lower bound on the distance from p (in bucket bx, by) to any point stored
  // in a bucket at Chebyshev ring k.
  double ring_distance(Point p, long bx, long by, long k) const {
    if (k == 0) return 0.0;
    const double left = p.x - (window_.xmin() + static_cast<double>(bx - k + 1) * bw_);
    const double right = window_.xmin() + static_cast<double>(bx + k) * bw_ - p.x;
    const double down = p.y - (window_.ymin() + static_cast<double>(by - k + 1) * bh_);
    const double up = window_.ymin() + static_cast<double>(by + k) * bh_ - p.y;
    return std::max(0.0, std::min({left, right, down, up}));
  }

  template <class F>
  void for_each_in_ring(long bx, long by, long k, F&& f) const {
    auto visit = [&](long cx, long cy) {
      if (cx < 0 || cy < 0 || cx >= nx_ || cy >= ny_) return;
      const auto b = static_cast<std::size_t>(cy * nx_ + cx);
      for (std::size_t s = start_[b]; s < start_[b + 1]; ++s) f(items_[s]);
    };
    if (k == 0) {
      visit(bx, by);
      return;
    }
    for (long cx = bx - k; cx <= bx + k; ++cx) {
      visit(cx, by - k);
      visit(cx, by + k);
    }
    for (long cy = by - k + 1; cy <= by + k - 1; ++cy) {
      visit(bx - k, cy);
      visit(bx + k, cy);
    }
  }

 private:
  Window window_;
  long nx_ = 1, ny_ = 1;
  double bw_ = 1.0, bh_ = 1.0;
  std::vector<std::size_t> start_;
  std::vector<std::size_t> items_;
};

}  // namespace

Window::Window(double xmin, double xmax, double ymin, double ymax)
    : xmin_(xmin), xmax_(xmax), ymin_(ymin), ymax_(ymax) {
  if (!(xmin < xmax) || !(ymin < ymax) || !std::isfinite(xmin) || !std::isfinite(xmax) ||
      !std::isfinite(ymin) || !std::isfinite(ymax))
    throw DataError("window must satisfy xmin < xmax and ymin < ymax");
}

bool Window::contains(Point p) const {
  return p.x >= xmin_ && p.x <= xmax_ && p.y >= ymin_ && p.y <= ymax_;
}

bool Window::contains_strictly(Point p) const {
  return p.x > xmin_ && p.x < xmax_ && p.y > ymin_ && p.y < ymax_;
}

Window Window::expanded(double margin) const {
  if (margin < 0.0) throw DataError("window margin must be nonnegative");
  return {xmin_ - margin, xmax_ + margin, ymin_ - margin, ymax_ + margin};
}

std::vector<Point> Window::corners() const {
  return {{xmin_, ymin_}, {xmax_, ymin_}, {xmax_, ymax_}, {xmin_, ymax_}};
}

DuplicatePointError::DuplicatePointError(std::size_t first, std::size_t second)
    : DataError("duplicate points at indices " + std::to_string(first) + " and " +
                std::to_string(second)),
      first_(first),
      second_(second) {}

PointOutsideWindowError::PointOutsideWindowError(std::size_t index, Point p)
    : DataError("point " + std::to_string(index) + " " + describe(p) +
                " is not strictly inside the window"),
      index_(index) {}

double polygon_area(std::span<const Point> polygon) {
  const std::size_t n = polygon.size();
  if (n < 3) return 0.0;
  double twice = 0.0;
  for (std::size_t i = 0; i < n; ++i) twice += cross(polygon[i], polygon[(i + 1) % n]);
  return 0.5 * twice;
}

std::vector<Point> clip_half_plane(std::span<const Point> polygon, Point normal,
                                   double offset) {
  const std::size_t n = polygon.size();
  if (n == 0) return {};
  const double scale = coordinate_scale(polygon);
  const double eps =
      kSlack * (std::abs(offset) + std::sqrt(dot(normal, normal)) * std::max(scale, 1e-300));
  std::vector<double> side(n);
  bool all_in = true, all_out = true;
  for (std::size_t i = 0; i < n; ++i) {
    side[i] = dot(normal, polygon[i]) - offset;
    if (side[i] > eps) all_in = false;
    if (side[i] <= eps) all_out = false;
  }
  if (all_in) return {polygon.begin(), polygon.end()};
  if (all_out) return {};

  std::vector<Point> out;
  out.reserve(n + 1);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t j = (i + 1) % n;
    const Point a = polygon[i], b = polygon[j];
    const double sa = side[i], sb = side[j];
    if (sa <= eps) out.push_back(a);
    if ((sa < -eps && sb > eps) || (sa > eps && sb < -eps)) {
      const double t = sa / (sa - sb);
      out.push_back(a + t * (b - a));
    }
  }
  drop_repeated_vertices(out, kSlack * std::max(scale, 1e-300));
  if (out.size() < 3) return {};
  return out;
}

std::vector<Point> clip_to_window(std::span<const Point> polygon, const Window& w) {
  std::vector<Point> p(polygon.begin(), polygon.end());
  p = clip_half_plane(p, {-1.0, 0.0}, -w.xmin());
  p = clip_half_plane(p, {1.0, 0.0}, w.xmax());
  p = clip_half_plane(p, {0.0, -1.0}, -w.ymin());
  p = clip_half_plane(p, {0.0, 1.0}, w.ymax());
  return p;
}

VoronoiDiagram tessellate(std::span<const Point> points, const Window& window) {
  if (points.empty()) throw DataError("tessellation needs at least one point");
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (!window.contains_strictly(points[i])) throw PointOutsideWindowError(i, points[i]);
  }
  {
    std::vector<std::size_t> order(points.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      if (points[a].x != points[b].x) return points[a].x < points[b].x;
      if (points[a].y != points[b].y) return points[a].y < points[b].y;
      return a < b;
    });
    for (std::size_t k = 1; k < order.size(); ++k) {
      if (points[order[k]] == points[order[k - 1]])
        throw DuplicatePointError(std::min(order[k - 1], order[k]),
                                  std::max(order[k - 1], order[k]));
    }
  }

  const BucketGrid grid(points, window);
  const std::vector<Point> frame = window.corners();
  const double tol = kSlack * std::max({window.width(), window.height(),
                                        std::abs(window.xmin()), std::abs(window.xmax()),
                                        std::abs(window.ymin()), std::abs(window.ymax())});

  std::vector<ConvexCell> cells(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    const Point g = points[i];
    std::vector<Point> poly = frame;
    const long bx = grid.column(g.x), by = grid.row(g.y);
    for (long k = 0; k <= grid.max_ring(); ++k) {
      double radius2 = 0.0;
      for (Point v : poly) radius2 = std::max(radius2, squared_distance(v, g));
      const double bound = grid.ring_distance(g, bx, by, k);
      // Points beyond twice the cell radius cannot cut the cell.
      if (k > 0 && bound * bound >= 4.0 * radius2) break;
      grid.for_each_in_ring(bx, by, k, [&](std::size_t j) {
        if (j == i) return;
        const Point h = points[j];
        const Point normal = h - g;
        const Point mid = 0.5 * (g + h);
        if (squared_distance(h, g) >= 4.0 * radius2) return;
        poly = clip_half_plane(poly, normal, dot(normal, mid));
      });
    }
    ConvexCell& cell = cells[i];
    cell.generator = g;
    cell.area = polygon_area(poly);
    for (std::size_t v = 0; v < poly.size(); ++v) {
      if (on_same_side(poly[v], poly[(v + 1) % poly.size()], window, tol)) {
        cell.touches_boundary = true;
        break;
      }
    }
    cell.vertices = std::move(poly);
  }
  return {window, std::move(cells)};
}

std::vector<Triangle> triangulate_polygon(std::span<const Point> polygon) {
  if (polygon.size() < 3) throw DataError("cannot triangulate a polygon with < 3 vertices");
  if (!(polygon_area(polygon) > 0.0)) throw DataError("cannot triangulate a degenerate cell");
  std::vector<Triangle> out;
  out.reserve(polygon.size() - 2);
  for (std::size_t k = 1; k + 1 < polygon.size(); ++k)
    out.push_back({polygon[0], polygon[k], polygon[k + 1]});
  return out;
}

std::vector<Triangle> triangulate_cell(const ConvexCell& cell) {
  return triangulate_polygon(cell.vertices);
}

bool polygon_contains(std::span<const Point> polygon, Point p) {
  const std::size_t n = polygon.size();
  if (n < 3) return false;
  const double scale = std::max(coordinate_scale(polygon), std::max(std::abs(p.x), std::abs(p.y)));
  for (std::size_t i = 0; i < n; ++i) {
    const Point a = polygon[i], b = polygon[(i + 1) % n];
    const double len = std::sqrt(squared_distance(a, b));
    if (cross(b - a, p - a) < -kSlack * len * std::max(scale, 1.0)) return false;
  }
  return true;
}

bool contains(const ConvexCell& cell, Point p) { return polygon_contains(cell.vertices, p); }

std::optional<std::size_t> locate(const VoronoiDiagram& diagram, Point p) {
  for (std::size_t i = 0; i < diagram.size(); ++i)
    if (contains(diagram[i], p)) return i;
  return std::nullopt;
}

void write_polygons(std::ostream& out, const VoronoiDiagram& diagram) {
  for (std::size_t i = 0; i < diagram.size(); ++i) {
    const ConvexCell& c = diagram[i];
    out << i << ',' << format_double(c.generator.x) << ',' << format_double(c.generator.y)
        << ',' << format_double(c.area) << ',' << (c.touches_boundary ? 1 : 0);
    for (Point v : c.vertices) out << ',' << format_double(v.x) << ',' << format_double(v.y);
    out << '\n';
  }
}

std::size_t jitter_duplicates(std::vector<Point>& points, const Window& window,
                              std::uint64_t seed, double scale) {
  Rng rng(derive_seed(seed, {stream::kJitter}));
  const double dx = scale * window.width(), dy = scale * window.height();
  std::size_t moved = 0;
  for (bool again = true; again;) {
    again = false;
    std::vector<std::size_t> order(points.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      if (points[a].x != points[b].x) return points[a].x < points[b].x;
      if (points[a].y != points[b].y) return points[a].y < points[b].y;
      return a < b;
    });
    for (std::size_t k = 1; k < order.size(); ++k) {
      if (!(points[order[k]] == points[order[k - 1]])) continue;
      Point& p = points[order[k]];
      Point q{p.x + rng.uniform(-dx, dx), p.y + rng.uniform(-dy, dy)};
      if (!window.contains_strictly(q)) q = p;
      p = q;
      ++moved;
      again = true;
    }
  }
  return moved;
}

}  // namespace vorres
