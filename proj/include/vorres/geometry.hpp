#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "vorres/error.hpp"

namespace vorres {

struct Point {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point&, const Point&) = default;
};

inline Point operator-(Point a, Point b) { return {a.x - b.x, a.y - b.y}; }
inline Point operator+(Point a, Point b) { return {a.x + b.x, a.y + b.y}; }
inline Point operator*(double s, Point a) { return {s * a.x, s * a.y}; }
inline double dot(Point a, Point b) { return a.x * b.x + a.y * b.y; }
inline double cross(Point a, Point b) { return a.x * b.y - a.y * b.x; }
inline double squared_distance(Point a, Point b) { return dot(a - b, a - b); }

// Axis-aligned observation region. Always has positive area.
class Window {
 public:
  Window() = default;
  Window(double xmin, double xmax, double ymin, double ymax);

  static Window unit_square() { return {}; }

  double xmin() const { return xmin_; }
  double xmax() const { return xmax_; }
  double ymin() const { return ymin_; }
  double ymax() const { return ymax_; }
  double width() const { return xmax_ - xmin_; }
  double height() const { return ymax_ - ymin_; }
  double area() const { return width() * height(); }

  bool contains(Point p) const;
  bool contains_strictly(Point p) const;
  Window expanded(double margin) const;
  // Counterclockwise from (xmin, ymin).
  std::vector<Point> corners() const;

  friend bool operator==(const Window&, const Window&) = default;

 private:
  double xmin_ = 0.0;
  double xmax_ = 1.0;
  double ymin_ = 0.0;
  double ymax_ = 1.0;
};

struct Triangle {
  Point a, b, c;
  double area() const { return 0.5 * cross(b - a, c - a); }
};

struct ConvexCell {
  Point generator;
  std::vector<Point> vertices;  // counterclockwise
  double area = 0.0;
  bool touches_boundary = false;
};

class VoronoiDiagram {
 public:
  VoronoiDiagram(Window window, std::vector<ConvexCell> cells)
      : window_(window), cells_(std::move(cells)) {}

  const Window& window() const { return window_; }
  std::span<const ConvexCell> cells() const { return cells_; }
  const ConvexCell& operator[](std::size_t i) const { return cells_[i]; }
  std::size_t size() const { return cells_.size(); }

 private:
  Window window_;
  std::vector<ConvexCell> cells_;
};

class DuplicatePointError : public DataError {
 public:
  DuplicatePointError(std::size_t first, std::size_t second);
  std::size_t first() const { return first_; }
  std::size_t second() const { return second_; }

 private:
  std::size_t first_, second_;
};

class PointOutsideWindowError : public DataError {
 public:
  PointOutsideWindowError(std::size_t index, Point p);
  std::size_t index() const { return index_; }

 private:
  std::size_t index_;
};

// Signed shoelace area; positive for counterclockwise polygons.
double polygon_area(std::span<const Point> polygon);

// Keeps the part of a convex polygon with dot(normal, p) <= offset.
std::vector<Point> clip_half_plane(std::span<const Point> polygon, Point normal,
                                   double offset);
std::vector<Point> clip_to_window(std::span<const Point> polygon, const Window& window);

// Voronoi cells of `points`, clipped to `window`, index-aligned with the input.
// Throws DuplicatePointError / PointOutsideWindowError.
VoronoiDiagram tessellate(std::span<const Point> points, const Window& window);

// Fan triangulation from vertex 0 (n - 2 triangles).
std::vector<Triangle> triangulate_cell(const ConvexCell& cell);
std::vector<Triangle> triangulate_polygon(std::span<const Point> polygon);

// Inside-or-on test with 1e-12 slack (scaled to the cell size).
bool contains(const ConvexCell& cell, Point p);
bool polygon_contains(std::span<const Point> polygon, Point p);

// Index of the first cell containing p, if any.
std::optional<std::size_t> locate(const VoronoiDiagram& diagram, Point p);

// One line per cell:
// cell_index, generator_x, generator_y, area, touches_boundary, v1x, v1y, ...
void write_polygons(std::ostream& out, const VoronoiDiagram& diagram);

// Moves every point that duplicates an earlier one by a uniform offset of at
// most `scale` window widths, staying strictly inside the window. Returns the
// number of points moved.
std::size_t jitter_duplicates(std::vector<Point>& points, const Window& window,
                              std::uint64_t seed, double scale = 1e-9);

}  // namespace vorres
