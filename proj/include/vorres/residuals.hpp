#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "vorres/catalog.hpp"
#include "vorres/geometry.hpp"
#include "vorres/intensity.hpp"

namespace vorres {

enum class RegionKind { voronoi, pixel };

struct ResidualRecord {
  std::size_t region_id = 0;
  RegionKind kind = RegionKind::voronoi;
  long count = 0;
  double integral = 0.0;
  double raw = 0.0;  // count - integral
  std::optional<double> pearson;
  double pit = 0.5;
  bool excluded = false;
};

// Reduced cell areas of a Poisson tessellation are approximately
// Gamma(3.569, 3.569); Voronoi raw residuals are approximately 1 - X.
struct GammaReference {
  static constexpr double shape = 3.569;
  static constexpr double rate = 3.569;

  static double mean() { return shape / rate; }
  static double variance() { return shape / (rate * rate); }
  static double cdf(double reduced_area);
  static double quantile(double p);
  // Distribution function of the raw residual r = 1 - X.
  static double residual_cdf(double raw);
  static double residual_quantile(double p);
};

// One record per listed cell (all cells when `subset` is empty). The catalog
// is the tessellated pattern; for ETAS models it is also the history.
// Boundary cells are marked excluded.
std::vector<ResidualRecord> voronoi_residuals(const Catalog& catalog, const IntensityModel& model,
                                              const VoronoiDiagram& diagram,
                                              std::span<const std::size_t> subset = {});

// Pixel residuals with randomized PIT. Pixel i draws its PIT noise from
// stream_uniform(seed, i). `integrals` may carry precomputed pixel integrals.
std::vector<ResidualRecord> pixel_residuals(const Catalog& catalog, const IntensityModel& model,
                                            const PixelGrid& grid, std::uint64_t seed,
                                            std::span<const double> integrals = {});
std::vector<ResidualRecord> pixel_residuals(std::span<const Point> points,
                                            const PixelGrid& grid,
                                            std::span<const double> integrals,
                                            std::uint64_t seed);

// Randomized PIT for a Poisson count:
//   F(count - 1) + v (F(count) - F(count - 1)), or v F(0) when count = 0.
double randomized_pit(long count, double poisson_mean, double v);

// Standard-normal quantile of the PIT (clamped to [1e-10, 1 - 1e-10]).
double residual_color_scale(double pit);

// PIT values of the records that are not excluded.
std::vector<double> included_pits(std::span<const ResidualRecord> records);

// CSV region_id,kind,count,integral,raw,pearson,pit,excluded
void write_residuals_csv(std::ostream& out, std::span<const ResidualRecord> records);
std::vector<ResidualRecord> read_residuals_csv(std::istream& in);

// Quantile plot of observed residuals against the reference law with
// pointwise simulation limits. Order statistic i sits at probability
// (i - 0.5) / n; each simulated sample contributes its own empirical quantile
// at that probability.
struct QuantilePlot {
  std::vector<double> reference;
  std::vector<double> observed;
  std::vector<double> lower;
  std::vector<double> upper;

  double fraction_inside() const;
};

QuantilePlot quantile_plot(std::span<const double> observed,
                           const std::vector<std::vector<double>>& simulated, double level = 0.95);

// Type-7 sample quantile of a sorted sample.
double sample_quantile(std::span<const double> sorted, double p);

}  // namespace vorres
