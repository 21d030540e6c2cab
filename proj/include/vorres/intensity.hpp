#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "vorres/catalog.hpp"
#include "vorres/geometry.hpp"

namespace vorres {

enum class ModelKind { homogeneous, product_xy, indicator, beta_family, etas, user_grid };

std::string_view to_string(ModelKind kind);
ModelKind parse_model_kind(std::string_view name);

// ETAS conditional intensity with uniform background density 1/|S|:
//   mu/|S| + sum_{t_j < t} K (t - t_j + c)^-p exp(a (M_j - M0)) (r^2 + d)^-q
struct EtasParams {
  double mu = 1.0;
  double K = 0.0;
  double c = 0.01;
  double p = 1.1;
  double a = 1.0;
  double M0 = 0.0;
  double d = 0.001;
  double q = 1.5;

  friend bool operator==(const EtasParams&, const EtasParams&) = default;
};

// Throws ParameterError naming the first out-of-range parameter.
void validate(const EtasParams& params);

// Normalizer making c * (x~ y~)^beta integrate to one over the unit square.
double beta_normalizer(double beta);

// Tabulated rate on a complete rectangular lattice of pixel centers,
// bilinearly interpolated (constant extrapolation beyond the outer centers).
class GridTable {
 public:
  GridTable(std::vector<double> xs, std::vector<double> ys, std::vector<double> rates);

  // CSV with header x_center,y_center,rate.
  static GridTable read_csv(std::istream& in);
  static GridTable read_csv(const std::filesystem::path& path);

  double value(double x, double y) const;
  double max_rate() const;
  std::span<const double> xs() const { return xs_; }
  std::span<const double> ys() const { return ys_; }

 private:
  std::vector<double> xs_, ys_, rates_;  // rates_[iy * nx + ix]
};

class IntensityModel {
 public:
  static IntensityModel homogeneous(double rate, const Window& window);
  // scale * |x|^x_power * |y|^y_power
  static IntensityModel product_xy(double scale, double x_power, double y_power,
                                   const Window& window);
  // rate outside the central square max(|x|, |y|) <= half_width, zero inside.
  static IntensityModel indicator(double rate, double half_width, const Window& window);
  // base + amplitude * c_beta * (x~ y~)^beta with x~ = 1/2 - |x - 1/2| (clamped at 0).
  static IntensityModel beta_family(double beta, const Window& window, double base = 100.0,
                                    double amplitude = 200.0);
  static IntensityModel etas(const EtasParams& params, const Window& window, TimeSpan span);
  static IntensityModel user_grid(std::shared_ptr<const GridTable> grid, const Window& window);

  // Builds a model from named parameters (missing ones take the family defaults).
  static IntensityModel from_params(ModelKind kind, const std::map<std::string, double>& params,
                                    const Window& window, std::optional<TimeSpan> span = {},
                                    std::shared_ptr<const GridTable> grid = nullptr);

  ModelKind kind() const { return kind_; }
  const std::map<std::string, double>& params() const { return params_; }
  double param(const std::string& name) const;
  const Window& window() const { return window_; }
  std::optional<TimeSpan> time_span() const { return span_; }
  const EtasParams& etas_params() const { return etas_; }
  bool is_spatial() const { return kind_ != ModelKind::etas; }

  IntensityModel with_window(const Window& window) const;

  // Spatial kinds only.
  double evaluate(double x, double y) const;
  // Any kind; for ETAS only history events strictly before t contribute.
  double evaluate(double t, double x, double y, std::span<const Event> history) const;

  // Finite upper bound of the intensity over `region` (spatial kinds).
  double upper_bound(const Window& region) const;

  // Axis-aligned lines across which the intensity is not smooth.
  std::vector<double> breaklines_x() const;
  std::vector<double> breaklines_y() const;

 private:
  IntensityModel(ModelKind kind, const Window& window) : kind_(kind), window_(window) {}

  ModelKind kind_;
  Window window_;
  std::optional<TimeSpan> span_;
  std::map<std::string, double> params_;
  EtasParams etas_;
  std::shared_ptr<const GridTable> grid_;
  double c_beta_ = 1.0;
};

struct QuadratureOptions {
  double rel_tol = 1e-4;
  double abs_tol = 1e-13;
  int max_depth = 12;
  std::size_t max_triangles = 1 << 15;
};

struct Integral {
  double value = 0.0;
  double error = 0.0;
  bool converged = true;
};

// Integral over a convex polygon. Spatial kinds integrate lambda(x, y); ETAS
// integrates lambda over the model's time span as well, with `history` the
// catalog whose events drive the triggering terms.
Integral integrate_polygon(const IntensityModel& model, std::span<const Point> polygon,
                           std::span<const Event> history = {}, const QuadratureOptions& opts = {});
Integral integrate_cell(const IntensityModel& model, const ConvexCell& cell,
                        std::span<const Event> history = {}, const QuadratureOptions& opts = {});
Integral integrate_window(const IntensityModel& model, std::span<const Event> history = {},
                          const QuadratureOptions& opts = {});

// nx by ny pixels partitioning a window; pixel index = row * nx + column.
class PixelGrid {
 public:
  PixelGrid(const Window& window, int nx, int ny);
  // sqrt(n) by sqrt(n) pixels; n must be a perfect square.
  static PixelGrid square(const Window& window, int n_pixels);

  const Window& window() const { return window_; }
  int nx() const { return nx_; }
  int ny() const { return ny_; }
  std::size_t size() const { return static_cast<std::size_t>(nx_) * static_cast<std::size_t>(ny_); }
  std::vector<Point> pixel(std::size_t index) const;
  Point center(std::size_t index) const;
  // Pixel holding p (points on shared edges go to the upper/right pixel);
  // nullopt outside the window.
  std::optional<std::size_t> index_of(Point p) const;

 private:
  Window window_;
  int nx_, ny_;
};

std::vector<double> integrate_pixels(const IntensityModel& model, const PixelGrid& grid,
                                     std::span<const Event> history = {},
                                     const QuadratureOptions& opts = {});

// Integral of (r^2 + d)^-q over a polygon, r measured from `center`.
double kernel_mass(std::span<const Point> polygon, Point center, double d, double q,
                   double rel_tol = 1e-9);
// Integral of (t - t_event + c)^-p over span intersected with t > t_event.
double time_mass(double t_event, TimeSpan span, double c, double p);

}  // namespace vorres
