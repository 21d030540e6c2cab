#include "vorres/intensity.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <string>

#include "vorres/error.hpp"
#include "vorres/parallel.hpp"
#include "vorres/quadrature.hpp"
#include "vorres/text.hpp"

namespace vorres {
namespace {

double require_param(const std::map<std::string, double>& params, const std::string& name) {
  auto it = params.find(name);
  if (it == params.end()) throw ParameterError(name, "missing");
  return it->second;
}

double param_or(const std::map<std::string, double>& params, const std::string& name,
                double fallback) {
  auto it = params.find(name);
  return it == params.end() ? fallback : it->second;
}

void require(bool ok, const std::string& name, const std::string& what) {
  if (!ok) throw ParameterError(name, what);
}

double tilde(double u) { return std::max(0.0, 0.5 - std::abs(u - 0.5)); }

// Splits a convex polygon along axis-aligned lines.
std::vector<std::vector<Point>> split_polygon(std::span<const Point> polygon,
                                              std::span<const double> xs,
                                              std::span<const double> ys) {
  std::vector<std::vector<Point>> pieces{{polygon.begin(), polygon.end()}};
  auto cut = [&](double c, bool vertical) {
    std::vector<std::vector<Point>> next;
    for (auto& piece : pieces) {
      double lo = std::numeric_limits<double>::infinity(), hi = -lo;
      for (Point v : piece) {
        const double u = vertical ? v.x : v.y;
        lo = std::min(lo, u);
        hi = std::max(hi, u);
      }
      if (!(c > lo && c < hi)) {
        next.push_back(std::move(piece));
        continue;
      }
      const Point n = vertical ? Point{1.0, 0.0} : Point{0.0, 1.0};
      auto below = clip_half_plane(piece, n, c);
      auto above = clip_half_plane(piece, -1.0 * n, -c);
      if (below.size() >= 3 && polygon_area(below) > 0.0) next.push_back(std::move(below));
      if (above.size() >= 3 && polygon_area(above) > 0.0) next.push_back(std::move(above));
    }
    pieces = std::move(next);
  };
  for (double c : xs) cut(c, true);
  for (double c : ys) cut(c, false);
  return pieces;
}

Integral integrate_spatial(const IntensityModel& model, std::span<const Point> polygon,
                           const QuadratureOptions& opts) {
  if (polygon.size() < 3) return {0.0, 0.0, true};
  const double area = polygon_area(polygon);
  if (!(area > 0.0)) return {0.0, 0.0, true};
  if (model.kind() == ModelKind::homogeneous) return {model.param("rate") * area, 0.0, true};

  const auto pieces = split_polygon(polygon, model.breaklines_x(), model.breaklines_y());
  std::vector<Triangle> triangles;
  for (const auto& piece : pieces) {
    for (std::size_t k = 1; k + 1 < piece.size(); ++k)
      triangles.push_back({piece[0], piece[k], piece[k + 1]});
  }
  auto f = [&model](Point p) { return model.evaluate(p.x, p.y); };
  const auto r = adaptive_triangle_quadrature(f, triangles, opts.rel_tol, opts.abs_tol,
                                              opts.max_depth, opts.max_triangles);
  return {r.value, r.error, r.converged};
}

Integral integrate_etas(const IntensityModel& model, std::span<const Point> polygon,
                        std::span<const Event> history, const QuadratureOptions& opts) {
  const EtasParams& e = model.etas_params();
  const TimeSpan span = *model.time_span();
  const double area = polygon_area(polygon);
  if (!(area > 0.0)) return {0.0, 0.0, true};
  double total = e.mu * span.duration() * area / model.window().area();
  if (e.K > 0.0) {
    const double kernel_tol = std::min(1e-7, opts.rel_tol * 1e-2);
    for (const Event& ev : history) {
      const double tm = time_mass(ev.t, span, e.c, e.p);
      if (tm <= 0.0) continue;
      const double m = ev.mag.value_or(e.M0);
      total += e.K * std::exp(e.a * (m - e.M0)) * tm *
               kernel_mass(polygon, ev.location(), e.d, e.q, kernel_tol);
    }
  }
  return {total, std::abs(total) * 1e-7, true};
}

}  // namespace

std::string_view to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::homogeneous: return "homogeneous";
    case ModelKind::product_xy: return "product_xy";
    case ModelKind::indicator: return "indicator";
    case ModelKind::beta_family: return "beta_family";
    case ModelKind::etas: return "etas";
    case ModelKind::user_grid: return "user_grid";
  }
  return "unknown";
}

ModelKind parse_model_kind(std::string_view name) {
  for (ModelKind k : {ModelKind::homogeneous, ModelKind::product_xy, ModelKind::indicator,
                      ModelKind::beta_family, ModelKind::etas, ModelKind::user_grid}) {
    if (to_string(k) == name) return k;
  }
  throw DataError("unknown model kind '" + std::string(name) + "'");
}

void validate(const EtasParams& e) {
  require(std::isfinite(e.mu) && e.mu >= 0.0, "mu", "must be >= 0");
  require(std::isfinite(e.K) && e.K >= 0.0, "K", "must be >= 0");
  require(std::isfinite(e.c) && e.c > 0.0, "c", "must be > 0");
  require(std::isfinite(e.p) && e.p > 1.0, "p", "must be > 1");
  require(std::isfinite(e.a) && e.a > 0.0, "a", "must be > 0");
  require(std::isfinite(e.M0), "M0", "must be finite");
  require(std::isfinite(e.d) && e.d > 0.0, "d", "must be > 0");
  require(std::isfinite(e.q) && e.q > 1.0, "q", "must be > 1");
}

double beta_normalizer(double beta) {
  const double root = (beta + 1.0) * std::pow(2.0, beta);
  return root * root;
}

GridTable::GridTable(std::vector<double> xs, std::vector<double> ys, std::vector<double> rates)
    : xs_(std::move(xs)), ys_(std::move(ys)), rates_(std::move(rates)) {
  if (xs_.empty() || ys_.empty() || rates_.size() != xs_.size() * ys_.size())
    throw DataError("grid table is not a complete rectangular lattice");
  if (!std::is_sorted(xs_.begin(), xs_.end()) || !std::is_sorted(ys_.begin(), ys_.end()) ||
      std::adjacent_find(xs_.begin(), xs_.end()) != xs_.end() ||
      std::adjacent_find(ys_.begin(), ys_.end()) != ys_.end())
    throw DataError("grid table centers must be strictly increasing");
  for (double r : rates_)
    if (!(r >= 0.0) || !std::isfinite(r)) throw DataError("grid table rates must be finite and >= 0");
}

GridTable GridTable::read_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || trim(line) != "x_center,y_center,rate")
    throw DataError("grid table: expected header 'x_center,y_center,rate'");
  struct Row { double x, y, r; };
  std::vector<Row> rows;
  for (long lineno = 2; std::getline(in, line); ++lineno) {
    if (trim(line).empty()) continue;
    auto f = split(trim(line), ',');
    if (f.size() != 3) throw DataError("grid table line " + std::to_string(lineno) + ": expected 3 fields");
    const std::string where = "grid table line " + std::to_string(lineno);
    rows.push_back({parse_double(f[0], where), parse_double(f[1], where), parse_double(f[2], where)});
  }
  std::vector<double> xs, ys;
  for (const Row& r : rows) {
    xs.push_back(r.x);
    ys.push_back(r.y);
  }
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
  std::sort(ys.begin(), ys.end());
  ys.erase(std::unique(ys.begin(), ys.end()), ys.end());
  if (rows.size() != xs.size() * ys.size())
    throw DataError("grid table is not a complete rectangular lattice");
  std::vector<double> rates(rows.size(), std::numeric_limits<double>::quiet_NaN());
  for (const Row& r : rows) {
    const auto ix = static_cast<std::size_t>(std::lower_bound(xs.begin(), xs.end(), r.x) - xs.begin());
    const auto iy = static_cast<std::size_t>(std::lower_bound(ys.begin(), ys.end(), r.y) - ys.begin());
    double& slot = rates[iy * xs.size() + ix];
    if (!std::isnan(slot)) throw DataError("grid table has a repeated center");
    slot = r.r;
  }
  return {std::move(xs), std::move(ys), std::move(rates)};
}

GridTable GridTable::read_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open grid table " + path.string());
  return read_csv(in);
}

double GridTable::value(double x, double y) const {
  auto bracket = [](std::span<const double> c, double u, std::size_t& i, double& w) {
    if (c.size() == 1 || u <= c.front()) {
      i = 0;
      w = 0.0;
      return;
    }
    if (u >= c.back()) {
      i = c.size() - 2;
      w = 1.0;
      return;
    }
    i = static_cast<std::size_t>(std::upper_bound(c.begin(), c.end(), u) - c.begin()) - 1;
    w = (u - c[i]) / (c[i + 1] - c[i]);
  };
  std::size_t ix, iy;
  double wx, wy;
  bracket(xs_, x, ix, wx);
  bracket(ys_, y, iy, wy);
  const std::size_t nx = xs_.size();
  auto at = [&](std::size_t i, std::size_t j) {
    return rates_[std::min(j, ys_.size() - 1) * nx + std::min(i, nx - 1)];
  };
  const double r0 = (1.0 - wx) * at(ix, iy) + (wx > 0.0 ? wx * at(ix + 1, iy) : 0.0);
  if (wy == 0.0) return r0;
  const double r1 = (1.0 - wx) * at(ix, iy + 1) + (wx > 0.0 ? wx * at(ix + 1, iy + 1) : 0.0);
  return (1.0 - wy) * r0 + wy * r1;
}

double GridTable::max_rate() const { return *std::max_element(rates_.begin(), rates_.end()); }

IntensityModel IntensityModel::homogeneous(double rate, const Window& window) {
  require(std::isfinite(rate) && rate >= 0.0, "rate", "must be finite and >= 0");
  IntensityModel m(ModelKind::homogeneous, window);
  m.params_ = {{"rate", rate}};
  return m;
}

IntensityModel IntensityModel::product_xy(double scale, double x_power, double y_power,
                                          const Window& window) {
  require(std::isfinite(scale) && scale >= 0.0, "scale", "must be finite and >= 0");
  require(x_power >= 0.0, "x_power", "must be >= 0");
  require(y_power >= 0.0, "y_power", "must be >= 0");
  IntensityModel m(ModelKind::product_xy, window);
  m.params_ = {{"scale", scale}, {"x_power", x_power}, {"y_power", y_power}};
  return m;
}

IntensityModel IntensityModel::indicator(double rate, double half_width, const Window& window) {
  require(std::isfinite(rate) && rate >= 0.0, "rate", "must be finite and >= 0");
  require(half_width >= 0.0, "half_width", "must be >= 0");
  IntensityModel m(ModelKind::indicator, window);
  m.params_ = {{"rate", rate}, {"half_width", half_width}};
  return m;
}

IntensityModel IntensityModel::beta_family(double beta, const Window& window, double base,
                                           double amplitude) {
  require(std::isfinite(beta) && beta > 0.0, "beta", "must be > 0");
  require(base >= 0.0, "base", "must be >= 0");
  require(amplitude >= 0.0, "amplitude", "must be >= 0");
  IntensityModel m(ModelKind::beta_family, window);
  m.c_beta_ = beta_normalizer(beta);
  m.params_ = {{"beta", beta}, {"base", base}, {"amplitude", amplitude}, {"c_beta", m.c_beta_}};
  return m;
}

IntensityModel IntensityModel::etas(const EtasParams& params, const Window& window,
                                    TimeSpan span) {
  validate(params);
  if (!(span.t1 > span.t0)) throw ParameterError("time_span", "t1 must exceed t0");
  IntensityModel m(ModelKind::etas, window);
  m.etas_ = params;
  m.span_ = span;
  m.params_ = {{"mu", params.mu}, {"K", params.K}, {"c", params.c}, {"p", params.p},
               {"a", params.a},   {"M0", params.M0}, {"d", params.d}, {"q", params.q},
               {"rho", 1.0 / window.area()}};
  return m;
}

IntensityModel IntensityModel::user_grid(std::shared_ptr<const GridTable> grid,
                                         const Window& window) {
  if (!grid) throw ParameterError("grid", "missing grid table");
  IntensityModel m(ModelKind::user_grid, window);
  m.grid_ = std::move(grid);
  return m;
}

IntensityModel IntensityModel::from_params(ModelKind kind,
                                           const std::map<std::string, double>& p,
                                           const Window& window, std::optional<TimeSpan> span,
                                           std::shared_ptr<const GridTable> grid) {
  switch (kind) {
    case ModelKind::homogeneous: return homogeneous(require_param(p, "rate"), window);
    case ModelKind::product_xy:
      return product_xy(param_or(p, "scale", 200.0), param_or(p, "x_power", 2.0),
                        param_or(p, "y_power", 1.0), window);
    case ModelKind::indicator:
      return indicator(param_or(p, "rate", 100.0), param_or(p, "half_width", 0.35), window);
    case ModelKind::beta_family:
      return beta_family(require_param(p, "beta"), window, param_or(p, "base", 100.0),
                         param_or(p, "amplitude", 200.0));
    case ModelKind::etas: {
      EtasParams e;
      e.mu = require_param(p, "mu");
      e.K = require_param(p, "K");
      e.c = require_param(p, "c");
      e.p = require_param(p, "p");
      e.a = require_param(p, "a");
      e.M0 = require_param(p, "M0");
      e.d = require_param(p, "d");
      e.q = require_param(p, "q");
      if (!span) throw ParameterError("time_span", "ETAS models need a time span");
      return etas(e, window, *span);
    }
    case ModelKind::user_grid: return user_grid(std::move(grid), window);
  }
  throw DataError("unknown model kind");
}

double IntensityModel::param(const std::string& name) const {
  auto it = params_.find(name);
  if (it == params_.end()) throw ParameterError(name, "not defined for this model");
  return it->second;
}

IntensityModel IntensityModel::with_window(const Window& window) const {
  IntensityModel m = *this;
  m.window_ = window;
  if (kind_ == ModelKind::etas) m.params_["rho"] = 1.0 / window.area();
  return m;
}

double IntensityModel::evaluate(double x, double y) const {
  switch (kind_) {
    case ModelKind::homogeneous: return params_.at("rate");
    case ModelKind::product_xy: {
      const double px = params_.at("x_power"), py = params_.at("y_power");
      const double ax = std::abs(x), ay = std::abs(y);
      const double fx = px == 2.0 ? ax * ax : px == 1.0 ? ax : std::pow(ax, px);
      const double fy = py == 1.0 ? ay : py == 2.0 ? ay * ay : std::pow(ay, py);
      return params_.at("scale") * fx * fy;
    }
    case ModelKind::indicator: {
      const double h = params_.at("half_width");
      return std::max(std::abs(x), std::abs(y)) > h ? params_.at("rate") : 0.0;
    }
    case ModelKind::beta_family: {
      const double beta = params_.at("beta");
      const double tx = tilde(x), ty = tilde(y);
      const double shape = (tx > 0.0 && ty > 0.0) ? std::pow(tx * ty, beta) : 0.0;
      return params_.at("base") + params_.at("amplitude") * c_beta_ * shape;
    }
    case ModelKind::user_grid: return grid_->value(x, y);
    case ModelKind::etas:
      throw DataError("ETAS intensity needs a time and a history");
  }
  return 0.0;
}

double IntensityModel::evaluate(double t, double x, double y,
                                std::span<const Event> history) const {
  if (kind_ != ModelKind::etas) return evaluate(x, y);
  const EtasParams& e = etas_;
  const double rho = window_.contains({x, y}) ? 1.0 / window_.area() : 0.0;
  double lambda = e.mu * rho;
  for (const Event& ev : history) {
    if (!(ev.t < t)) continue;
    const double r2 = (x - ev.x) * (x - ev.x) + (y - ev.y) * (y - ev.y);
    const double m = ev.mag.value_or(e.M0);
    lambda += e.K * std::pow(t - ev.t + e.c, -e.p) * std::exp(e.a * (m - e.M0)) *
              std::pow(r2 + e.d, -e.q);
  }
  return lambda;
}

double IntensityModel::upper_bound(const Window& region) const {
  switch (kind_) {
    case ModelKind::homogeneous: return params_.at("rate");
    case ModelKind::product_xy: {
      const double mx = std::max(std::abs(region.xmin()), std::abs(region.xmax()));
      const double my = std::max(std::abs(region.ymin()), std::abs(region.ymax()));
      return params_.at("scale") * std::pow(mx, params_.at("x_power")) *
             std::pow(my, params_.at("y_power"));
    }
    case ModelKind::indicator: return params_.at("rate");
    case ModelKind::beta_family:
      return params_.at("base") +
             params_.at("amplitude") * c_beta_ * std::pow(0.25, params_.at("beta"));
    case ModelKind::user_grid: return grid_->max_rate();
    case ModelKind::etas: break;
  }
  throw DataError("no finite intensity bound for ETAS models");
}

std::vector<double> IntensityModel::breaklines_x() const {
  switch (kind_) {
    case ModelKind::product_xy: return {0.0};
    case ModelKind::indicator: {
      const double h = params_.at("half_width");
      return {-h, h};
    }
    case ModelKind::beta_family: return {0.0, 0.5, 1.0};
    case ModelKind::user_grid: return {grid_->xs().begin(), grid_->xs().end()};
    default: return {};
  }
}

std::vector<double> IntensityModel::breaklines_y() const {
  switch (kind_) {
    case ModelKind::product_xy: return {0.0};
    case ModelKind::indicator: {
      const double h = params_.at("half_width");
      return {-h, h};
    }
    case ModelKind::beta_family: return {0.0, 0.5, 1.0};
    case ModelKind::user_grid: return {grid_->ys().begin(), grid_->ys().end()};
    default: return {};
  }
}

Integral integrate_polygon(const IntensityModel& model, std::span<const Point> polygon,
                           std::span<const Event> history, const QuadratureOptions& opts) {
  if (model.kind() == ModelKind::etas) return integrate_etas(model, polygon, history, opts);
  return integrate_spatial(model, polygon, opts);
}

Integral integrate_cell(const IntensityModel& model, const ConvexCell& cell,
                        std::span<const Event> history, const QuadratureOptions& opts) {
  return integrate_polygon(model, cell.vertices, history, opts);
}

Integral integrate_window(const IntensityModel& model, std::span<const Event> history,
                          const QuadratureOptions& opts) {
  return integrate_polygon(model, model.window().corners(), history, opts);
}

PixelGrid::PixelGrid(const Window& window, int nx, int ny) : window_(window), nx_(nx), ny_(ny) {
  if (nx < 1 || ny < 1) throw DataError("pixel grid needs at least one pixel per axis");
}

PixelGrid PixelGrid::square(const Window& window, int n_pixels) {
  const int k = static_cast<int>(std::lround(std::sqrt(static_cast<double>(n_pixels))));
  if (n_pixels < 1 || k * k != n_pixels)
    throw DataError("pixel count " + std::to_string(n_pixels) + " is not a perfect square");
  return {window, k, k};
}

std::vector<Point> PixelGrid::pixel(std::size_t index) const {
  const int ix = static_cast<int>(index % static_cast<std::size_t>(nx_));
  const int iy = static_cast<int>(index / static_cast<std::size_t>(nx_));
  const double w = window_.width() / nx_, h = window_.height() / ny_;
  const double x0 = ix == 0 ? window_.xmin() : window_.xmin() + ix * w;
  const double x1 = ix == nx_ - 1 ? window_.xmax() : window_.xmin() + (ix + 1) * w;
  const double y0 = iy == 0 ? window_.ymin() : window_.ymin() + iy * h;
  const double y1 = iy == ny_ - 1 ? window_.ymax() : window_.ymin() + (iy + 1) * h;
  return {{x0, y0}, {x1, y0}, {x1, y1}, {x0, y1}};
}

Point PixelGrid::center(std::size_t index) const {
  const auto poly = pixel(index);
  return {0.5 * (poly[0].x + poly[2].x), 0.5 * (poly[0].y + poly[2].y)};
}

std::optional<std::size_t> PixelGrid::index_of(Point p) const {
  if (!window_.contains(p)) return std::nullopt;
  auto cell = [](double u, double lo, double span, int n) {
    return std::clamp(static_cast<int>(std::floor((u - lo) / span * n)), 0, n - 1);
  };
  const int ix = cell(p.x, window_.xmin(), window_.width(), nx_);
  const int iy = cell(p.y, window_.ymin(), window_.height(), ny_);
  return static_cast<std::size_t>(iy) * static_cast<std::size_t>(nx_) + static_cast<std::size_t>(ix);
}

std::vector<double> integrate_pixels(const IntensityModel& model, const PixelGrid& grid,
                                     std::span<const Event> history,
                                     const QuadratureOptions& opts) {
  std::vector<double> out(grid.size());
  parallel_for(grid.size(), [&](std::size_t i) {
    out[i] = integrate_polygon(model, grid.pixel(i), history, opts).value;
  });
  return out;
}

double time_mass(double t_event, TimeSpan span, double c, double p) {
  if (!(t_event < span.t1)) return 0.0;
  const double lo = std::max(span.t0, t_event);
  const double e = 1.0 - p;
  return (std::pow(lo - t_event + c, e) - std::pow(span.t1 - t_event + c, e)) / (p - 1.0);
}

double kernel_mass(std::span<const Point> polygon, Point center, double d, double q,
                   double rel_tol) {
  // Fan of signed triangles from `center`. In polar coordinates about the
  // center, the radial integral is closed form:
  //   int_0^R (r^2 + d)^-q r dr = (d^(1-q) - (R^2 + d)^(1-q)) / (2 (q - 1)).
  // The constant part integrates to (swept angle) * d^(1-q); only the
  // far-edge term (R(u)^2 + d)^(1-q), R(u) = h / cos(u), is done numerically.
  const std::size_t n = polygon.size();
  double swept = 0.0, edge_terms = 0.0;
  const double e = 1.0 - q;
  for (std::size_t i = 0; i < n; ++i) {
    const Point a = polygon[i] - center, b = polygon[(i + 1) % n] - center;
    const double tri = cross(a, b);
    if (tri == 0.0) continue;
    const Point ab = b - a;
    const double len2 = dot(ab, ab);
    if (len2 == 0.0) continue;
    const Point foot = a - (dot(a, ab) / len2) * ab;
    const double h2 = dot(foot, foot);
    if (h2 == 0.0) continue;
    const double ua = std::atan2(cross(foot, a), dot(foot, a));
    const double ub = std::atan2(cross(foot, b), dot(foot, b));
    swept += ub - ua;
    auto g = [h2, d, e](double u) {
      const double cu = std::cos(u);
      return std::exp(e * std::log(h2 / (cu * cu) + d));
    };
    edge_terms += boost::math::quadrature::gauss_kronrod<double, 15>::integrate(g, ua, ub, 12,
                                                                                rel_tol);
  }
  return (swept * std::pow(d, e) - edge_terms) / (2.0 * (q - 1.0));
}

}  // namespace vorres
