#include "vorres/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <ostream>

#include "vorres/text.hpp"

namespace vorres {
namespace {

std::string escape(const std::string& s) {
  std::string out;
  for (char ch : s) {
    switch (ch) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += ch;
    }
  }
  return out;
}

// Fixed 2-decimal coordinates keep files small and stable.
std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string hex_color(double r, double g, double b) {
  char buf[8];
  auto c = [](double v) { return static_cast<int>(std::lround(std::clamp(v, 0.0, 1.0) * 255.0)); };
  std::snprintf(buf, sizeof buf, "#%02x%02x%02x", c(r), c(g), c(b));
  return buf;
}

constexpr double kMargin = 50.0;

void header(std::ostream& out, double width, double height, const std::string& title) {
  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(width) << "\" height=\""
      << num(height) << "\" viewBox=\"0 0 " << num(width) << ' ' << num(height) << "\">\n";
  if (!title.empty())
    out << "<text x=\"" << num(width / 2) << "\" y=\"24\" text-anchor=\"middle\" font-size=\"16\">"
        << escape(title) << "</text>\n";
}

// Maps window coordinates into a square-ish drawing area, y pointing up.
struct MapFrame {
  Window w;
  double scale, ox, oy;

  explicit MapFrame(const Window& window, double size = 600.0) : w(window) {
    scale = size / std::max(w.width(), w.height());
    ox = kMargin;
    oy = kMargin + w.height() * scale;
  }
  double x(double v) const { return ox + (v - w.xmin()) * scale; }
  double y(double v) const { return oy - (v - w.ymin()) * scale; }
  double width() const { return w.width() * scale; }
  double height() const { return w.height() * scale; }
};

void legend(std::ostream& out, double x0, double y0, double height) {
  out << "<defs><linearGradient id=\"ramp\" x1=\"0\" y1=\"1\" x2=\"0\" y2=\"0\">\n";
  for (int i = 0; i <= 6; ++i) {
    const double z = -3.0 + i;
    out << "<stop offset=\"" << num(i / 6.0) << "\" stop-color=\""
        << residual_color(0.5 * std::erfc(-z / std::sqrt(2.0))) << "\"/>\n";
  }
  out << "</linearGradient></defs>\n";
  out << "<path d=\"M" << num(x0) << ' ' << num(y0) << " h20 v" << num(height) << " h-20 Z\" "
      << "fill=\"url(#ramp)\" stroke=\"black\" stroke-width=\"0.5\"/>\n";
  for (int z = -3; z <= 3; ++z) {
    const double y = y0 + height * (3.0 - z) / 6.0;
    out << "<text x=\"" << num(x0 + 26) << "\" y=\"" << num(y + 4) << "\" font-size=\"11\">"
        << (z > 0 ? "+" : "") << z << "</text>\n";
  }
  out << "<text x=\"" << num(x0) << "\" y=\"" << num(y0 - 8) << "\" font-size=\"11\">z</text>\n";
}

void map_footer(std::ostream& out, const MapFrame& f) {
  out << "<path d=\"M" << num(f.x(f.w.xmin())) << ' ' << num(f.y(f.w.ymin())) << " H"
      << num(f.x(f.w.xmax())) << " V" << num(f.y(f.w.ymax())) << " H" << num(f.x(f.w.xmin()))
      << " Z\" fill=\"none\" stroke=\"black\" stroke-width=\"1\"/>\n";
  legend(out, f.x(f.w.xmax()) + 20, kMargin, f.height());
  out << "</svg>\n";
}

// Plot frame for x/y charts with linear axes.
struct Chart {
  double x0, x1, y0, y1;
  double left = 70, top = 40, w = 560, h = 380;

  double px(double v) const { return left + (v - x0) / (x1 - x0) * w; }
  double py(double v) const { return top + h - (v - y0) / (y1 - y0) * h; }

  void axes(std::ostream& out, const std::string& xlabel, const std::string& ylabel) const {
    out << "<path d=\"M" << num(left) << ' ' << num(top) << " V" << num(top + h) << " H"
        << num(left + w) << "\" fill=\"none\" stroke=\"black\"/>\n";
    for (int i = 0; i <= 4; ++i) {
      const double vx = x0 + (x1 - x0) * i / 4.0, vy = y0 + (y1 - y0) * i / 4.0;
      out << "<text x=\"" << num(px(vx)) << "\" y=\"" << num(top + h + 16)
          << "\" text-anchor=\"middle\" font-size=\"11\">" << format_double(std::round(vx * 1000) / 1000)
          << "</text>\n";
      out << "<text x=\"" << num(left - 6) << "\" y=\"" << num(py(vy) + 4)
          << "\" text-anchor=\"end\" font-size=\"11\">" << format_double(std::round(vy * 1000) / 1000)
          << "</text>\n";
    }
    out << "<text x=\"" << num(left + w / 2) << "\" y=\"" << num(top + h + 36)
        << "\" text-anchor=\"middle\" font-size=\"13\">" << escape(xlabel) << "</text>\n";
    out << "<text x=\"16\" y=\"" << num(top + h / 2) << "\" transform=\"rotate(-90 16 "
        << num(top + h / 2) << ")\" text-anchor=\"middle\" font-size=\"13\">" << escape(ylabel)
        << "</text>\n";
  }

  template <class Xs, class Ys>
  void polyline(std::ostream& out, const Xs& xs, const Ys& ys, const std::string& style) const {
    out << "<polyline fill=\"none\" " << style << " points=\"";
    for (std::size_t i = 0; i < xs.size(); ++i) {
      if (!std::isfinite(ys[i])) continue;
      out << num(px(xs[i])) << ',' << num(py(std::clamp(ys[i], y0, y1))) << ' ';
    }
    out << "\"/>\n";
  }
};

}  // namespace

std::string residual_color(double pit, bool excluded) {
  if (excluded) return "#ffffff";
  const double z = std::clamp(residual_color_scale(pit), -3.0, 3.0);
  const double s = std::abs(z) / 3.0;
  // White fades to #b2182b for negative z and #2166ac for positive z.
  if (z < 0) return hex_color(1.0 - s * (1.0 - 0.698), 1.0 - s * (1.0 - 0.094), 1.0 - s * (1.0 - 0.169));
  return hex_color(1.0 - s * (1.0 - 0.129), 1.0 - s * (1.0 - 0.4), 1.0 - s * (1.0 - 0.675));
}

void render_residual_map(std::ostream& out, const VoronoiDiagram& diagram,
                         std::span<const ResidualRecord> records, const std::string& title) {
  if (records.size() != diagram.size())
    throw DataError("residual map: " + std::to_string(records.size()) + " records for " +
                    std::to_string(diagram.size()) + " cells");
  const MapFrame f(diagram.window());
  header(out, f.width() + 2 * kMargin + 70, f.height() + 2 * kMargin, title);
  for (std::size_t i = 0; i < diagram.size(); ++i) {
    out << "<polygon points=\"";
    for (Point p : diagram[i].vertices) out << num(f.x(p.x)) << ',' << num(f.y(p.y)) << ' ';
    out << "\" fill=\"" << residual_color(records[i].pit, records[i].excluded)
        << "\" stroke=\"#555555\" stroke-width=\"0.3\"/>\n";
  }
  for (std::size_t i = 0; i < diagram.size(); ++i) {
    const Point g = diagram[i].generator;
    out << "<circle cx=\"" << num(f.x(g.x)) << "\" cy=\"" << num(f.y(g.y))
        << "\" r=\"0.8\" fill=\"black\"/>\n";
  }
  map_footer(out, f);
}

void render_residual_map(std::ostream& out, const PixelGrid& grid,
                         std::span<const ResidualRecord> records, const std::string& title) {
  if (records.size() != grid.size())
    throw DataError("residual map: " + std::to_string(records.size()) + " records for " +
                    std::to_string(grid.size()) + " pixels");
  const MapFrame f(grid.window());
  header(out, f.width() + 2 * kMargin + 70, f.height() + 2 * kMargin, title);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const auto px = grid.pixel(i);
    const double x0 = f.x(px[0].x), x1 = f.x(px[2].x), y0 = f.y(px[2].y), y1 = f.y(px[0].y);
    out << "<rect x=\"" << num(x0) << "\" y=\"" << num(y0) << "\" width=\"" << num(x1 - x0)
        << "\" height=\"" << num(y1 - y0) << "\" fill=\""
        << residual_color(records[i].pit, records[i].excluded)
        << "\" stroke=\"#555555\" stroke-width=\"0.3\"/>\n";
  }
  map_footer(out, f);
}

void render_histogram(std::ostream& out, const PitHistogram& h, const std::string& title) {
  double top = 1.0;
  for (std::size_t b = 0; b < h.counts.size(); ++b)
    top = std::max({top, static_cast<double>(h.counts[b]), h.band_hi[b]});
  const Chart c{0.0, 1.0, 0.0, top * 1.1};
  header(out, 680, 500, title);
  c.axes(out, "PIT", "count");
  for (std::size_t b = 0; b < h.counts.size(); ++b) {
    const double x0 = c.px(h.edges[b]), x1 = c.px(h.edges[b + 1]);
    const double y = c.py(static_cast<double>(h.counts[b]));
    out << "<rect x=\"" << num(x0) << "\" y=\"" << num(y) << "\" width=\"" << num(x1 - x0)
        << "\" height=\"" << num(c.py(0) - y) << "\" fill=\"#bbbbbb\" stroke=\"black\" stroke-width=\"0.5\"/>\n";
  }
  for (const auto* band : {&h.band_lo, &h.band_hi}) {
    out << "<path d=\"";
    for (std::size_t b = 0; b < band->size(); ++b)
      out << (b == 0 ? 'M' : 'L') << num(c.px(h.edges[b])) << ' ' << num(c.py((*band)[b])) << " L"
          << num(c.px(h.edges[b + 1])) << ' ' << num(c.py((*band)[b])) << ' ';
    out << "\" fill=\"none\" stroke=\"#d6604d\" stroke-width=\"1.5\" stroke-dasharray=\"5,3\"/>\n";
  }
  out << "</svg>\n";
}

void render_quantile_plot(std::ostream& out, const QuantilePlot& plot, const std::string& title) {
  double lo = 0.0, hi = 0.0;
  for (const auto* v : {&plot.reference, &plot.observed, &plot.lower, &plot.upper})
    for (double x : *v)
      if (std::isfinite(x)) lo = std::min(lo, x), hi = std::max(hi, x);
  if (hi <= lo) hi = lo + 1.0;
  const Chart c{lo, hi, lo, hi};
  header(out, 680, 500, title);
  c.axes(out, "reference quantile", "observed residual");
  const std::vector<double> diag{lo, hi};
  c.polyline(out, diag, diag, "stroke=\"#999999\" stroke-dasharray=\"4,3\"");
  c.polyline(out, plot.reference, plot.lower, "stroke=\"#4393c3\" stroke-dasharray=\"5,3\"");
  c.polyline(out, plot.reference, plot.upper, "stroke=\"#4393c3\" stroke-dasharray=\"5,3\"");
  c.polyline(out, plot.reference, plot.observed, "stroke=\"black\" stroke-width=\"1.5\"");
  out << "</svg>\n";
}

void render_power_curves(std::ostream& out, const PowerResult& result, const std::string& title) {
  const auto& prop = result.config.proposed;
  if (prop.empty()) throw DataError("power plot: no proposed values");
  const auto [mn, mx] = std::minmax_element(prop.begin(), prop.end());
  const Chart c{*mn, *mx > *mn ? *mx : *mn + 1.0, 0.0, 1.0};
  header(out, 820, 500, title);
  c.axes(out, "proposed value", "power");
  static const char* palette[] = {"#000000", "#d6604d", "#4393c3", "#1b7837", "#762a83", "#e08214"};
  for (std::size_t k = 0; k < result.config.partitions.size(); ++k) {
    const Partition& part = result.config.partitions[k];
    std::vector<double> xs, ys;
    for (double v : prop) {
      xs.push_back(v);
      ys.push_back(result.power(part, v));
    }
    const std::string color = palette[k % 6];
    c.polyline(out, xs, ys, "stroke=\"" + color + "\" stroke-width=\"1.5\"");
    out << "<text x=\"" << num(c.left + c.w + 12) << "\" y=\"" << num(c.top + 16 + 18.0 * k)
        << "\" font-size=\"12\" fill=\"" << color << "\">" << escape(part.name()) << "</text>\n";
  }
  const std::vector<double> ax{c.x0, c.x1}, ay{result.config.alpha, result.config.alpha};
  c.polyline(out, ax, ay, "stroke=\"#999999\" stroke-dasharray=\"4,3\"");
  out << "</svg>\n";
}

}  // namespace vorres
