#include "vorres/residuals.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <string>

#include "vorres/parallel.hpp"
#include "vorres/rng.hpp"
#include "vorres/special.hpp"
#include "vorres/text.hpp"

namespace vorres {

double GammaReference::cdf(double reduced_area) { return gamma_cdf(reduced_area, shape, rate); }

double GammaReference::quantile(double p) { return gamma_quantile(p, shape, rate); }

double GammaReference::residual_cdf(double raw) { return 1.0 - cdf(1.0 - raw); }

double GammaReference::residual_quantile(double p) { return 1.0 - quantile(1.0 - p); }

std::vector<ResidualRecord> voronoi_residuals(const Catalog& catalog, const IntensityModel& model,
                                              const VoronoiDiagram& diagram,
                                              std::span<const std::size_t> subset) {
  if (diagram.size() != catalog.size())
    throw DataError("diagram has " + std::to_string(diagram.size()) + " cells but catalog has " +
                    std::to_string(catalog.size()) + " events");
  std::vector<std::size_t> ids(subset.begin(), subset.end());
  if (subset.empty()) {
    ids.resize(diagram.size());
    for (std::size_t i = 0; i < ids.size(); ++i) ids[i] = i;
  }
  const std::span<const Event> history =
      model.kind() == ModelKind::etas ? std::span<const Event>(catalog.events)
                                      : std::span<const Event>();
  std::vector<ResidualRecord> out(ids.size());
  parallel_for(ids.size(), [&](std::size_t k) {
    const std::size_t id = ids[k];
    if (id >= diagram.size()) throw DataError("cell index out of range");
    const ConvexCell& cell = diagram[id];
    ResidualRecord& r = out[k];
    r.region_id = id;
    r.kind = RegionKind::voronoi;
    r.count = 1;
    r.integral = integrate_cell(model, cell, history).value;
    r.raw = 1.0 - r.integral;
    r.pit = 1.0 - GammaReference::cdf(r.integral);
    r.excluded = cell.touches_boundary;
  });
  return out;
}

std::vector<ResidualRecord> pixel_residuals(std::span<const Point> points, const PixelGrid& grid,
                                            std::span<const double> integrals,
                                            std::uint64_t seed) {
  if (integrals.size() != grid.size()) throw DataError("pixel integrals do not match the grid");
  std::vector<long> counts(grid.size(), 0);
  for (Point p : points) {
    if (auto i = grid.index_of(p)) ++counts[*i];
  }
  std::vector<ResidualRecord> out(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    ResidualRecord& r = out[i];
    r.region_id = i;
    r.kind = RegionKind::pixel;
    r.count = counts[i];
    r.integral = integrals[i];
    r.raw = static_cast<double>(r.count) - r.integral;
    if (r.integral >= 1e-12) r.pearson = r.raw / std::sqrt(r.integral);
    r.pit = randomized_pit(r.count, r.integral, stream_uniform(seed, i));
  }
  return out;
}

std::vector<ResidualRecord> pixel_residuals(const Catalog& catalog, const IntensityModel& model,
                                            const PixelGrid& grid, std::uint64_t seed,
                                            std::span<const double> integrals) {
  std::vector<double> own;
  if (integrals.empty()) {
    const std::span<const Event> history =
        model.kind() == ModelKind::etas ? std::span<const Event>(catalog.events)
                                        : std::span<const Event>();
    own = integrate_pixels(model, grid, history);
    integrals = own;
  }
  const auto pts = catalog.points();
  return pixel_residuals(pts, grid, integrals, seed);
}

double randomized_pit(long count, double poisson_mean, double v) {
  if (count < 0) throw DataError("negative count");
  const double upper = poisson_cdf(count, poisson_mean);
  const double lower = count == 0 ? 0.0 : poisson_cdf(count - 1, poisson_mean);
  return std::clamp(lower + v * (upper - lower), 0.0, 1.0);
}

double residual_color_scale(double pit) {
  return normal_quantile(std::clamp(pit, 1e-10, 1.0 - 1e-10));
}

std::vector<double> included_pits(std::span<const ResidualRecord> records) {
  std::vector<double> out;
  out.reserve(records.size());
  for (const ResidualRecord& r : records)
    if (!r.excluded) out.push_back(r.pit);
  return out;
}

void write_residuals_csv(std::ostream& out, std::span<const ResidualRecord> records) {
  out << "region_id,kind,count,integral,raw,pearson,pit,excluded\n";
  for (const ResidualRecord& r : records) {
    out << r.region_id << ',' << (r.kind == RegionKind::voronoi ? "voronoi" : "pixel") << ','
        << r.count << ',' << format_double(r.integral) << ',' << format_double(r.raw) << ','
        << (r.pearson ? format_double(*r.pearson) : std::string()) << ',' << format_double(r.pit)
        << ',' << (r.excluded ? 1 : 0) << '\n';
  }
}

std::vector<ResidualRecord> read_residuals_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || trim(line) != "region_id,kind,count,integral,raw,pearson,pit,excluded")
    throw DataError("residual CSV: unexpected header");
  std::vector<ResidualRecord> out;
  for (long lineno = 2; std::getline(in, line); ++lineno) {
    if (trim(line).empty()) continue;
    const auto f = split(trim(line), ',');
    const std::string where = "residual CSV line " + std::to_string(lineno);
    if (f.size() != 8) throw DataError(where + ": expected 8 fields");
    ResidualRecord r;
    r.region_id = static_cast<std::size_t>(parse_long(f[0], where));
    if (f[1] == "voronoi") r.kind = RegionKind::voronoi;
    else if (f[1] == "pixel") r.kind = RegionKind::pixel;
    else throw DataError(where + ": unknown kind");
    r.count = parse_long(f[2], where);
    r.integral = parse_double(f[3], where);
    r.raw = parse_double(f[4], where);
    if (!trim(f[5]).empty()) r.pearson = parse_double(f[5], where);
    r.pit = parse_double(f[6], where);
    r.excluded = parse_long(f[7], where) != 0;
    out.push_back(r);
  }
  return out;
}

double sample_quantile(std::span<const double> sorted, double p) {
  if (sorted.empty()) throw DataError("quantile of an empty sample");
  const double h = (static_cast<double>(sorted.size()) - 1.0) * std::clamp(p, 0.0, 1.0);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

double QuantilePlot::fraction_inside() const {
  if (observed.empty()) return 1.0;
  std::size_t inside = 0;
  for (std::size_t i = 0; i < observed.size(); ++i)
    if (observed[i] >= lower[i] && observed[i] <= upper[i]) ++inside;
  return static_cast<double>(inside) / static_cast<double>(observed.size());
}

QuantilePlot quantile_plot(std::span<const double> observed,
                           const std::vector<std::vector<double>>& simulated, double level) {
  QuantilePlot plot;
  plot.observed.assign(observed.begin(), observed.end());
  std::sort(plot.observed.begin(), plot.observed.end());
  const std::size_t n = plot.observed.size();
  std::vector<std::vector<double>> sims;
  for (const auto& s : simulated) {
    if (s.empty()) continue;
    sims.push_back(s);
    std::sort(sims.back().begin(), sims.back().end());
  }
  const double tail = 0.5 * (1.0 - level);
  std::vector<double> column(sims.size());
  for (std::size_t i = 0; i < n; ++i) {
    const double p = (static_cast<double>(i) + 0.5) / static_cast<double>(n);
    plot.reference.push_back(GammaReference::residual_quantile(p));
    if (sims.empty()) {
      plot.lower.push_back(-std::numeric_limits<double>::infinity());
      plot.upper.push_back(std::numeric_limits<double>::infinity());
      continue;
    }
    for (std::size_t s = 0; s < sims.size(); ++s) column[s] = sample_quantile(sims[s], p);
    std::sort(column.begin(), column.end());
    plot.lower.push_back(sample_quantile(column, tail));
    plot.upper.push_back(sample_quantile(column, 1.0 - tail));
  }
  return plot;
}

}  // namespace vorres
