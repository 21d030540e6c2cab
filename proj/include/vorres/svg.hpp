#pragma once

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>

#include "vorres/geometry.hpp"
#include "vorres/inference.hpp"
#include "vorres/intensity.hpp"
#include "vorres/residuals.hpp"

namespace vorres {

// Fill color for a residual on the diverging ramp: z = Phi^-1(pit) clamped to
// [-3, 3]; negative (overprediction) toward red, positive toward blue.
std::string residual_color(double pit, bool excluded = false);

// One <polygon> per cell or one <rect> per pixel; records must be aligned
// with the regions (record i colors region i). Throws DataError otherwise.
void render_residual_map(std::ostream& out, const VoronoiDiagram& diagram,
                         std::span<const ResidualRecord> records, const std::string& title = "");
void render_residual_map(std::ostream& out, const PixelGrid& grid,
                         std::span<const ResidualRecord> records, const std::string& title = "");

void render_histogram(std::ostream& out, const PitHistogram& histogram, const std::string& title = "");
void render_quantile_plot(std::ostream& out, const QuantilePlot& plot, const std::string& title = "");
void render_power_curves(std::ostream& out, const PowerResult& result, const std::string& title = "");

// Opens `path` for writing, calls `render`, and throws DataError on failure.
template <class Render>
void write_svg(const std::filesystem::path& path, Render&& render);

}  // namespace vorres

#include <fstream>

#include "vorres/error.hpp"

template <class Render>
void vorres::write_svg(const std::filesystem::path& path, Render&& render) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path.string());
  render(out);
  if (!out) throw DataError("failed writing " + path.string());
}
