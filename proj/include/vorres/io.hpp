#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "vorres/catalog.hpp"
#include "vorres/config.hpp"
#include "vorres/inference.hpp"
#include "vorres/intensity.hpp"
#include "vorres/simulate.hpp"

namespace vorres {

// Days since 1970-01-01T00:00:00Z of an ISO-8601 timestamp:
// YYYY-MM-DD, optionally followed by THH:MM[:SS[.fff]] and Z.
double parse_iso8601_days(std::string_view text);
bool looks_like_iso8601(std::string_view text);

// Sidecar declaration of a catalog file: window, span, magnitude cutoff and
// the epoch that decimal times count from. t0/t1 may be given as ISO-8601
// timestamps; they are then converted with the epoch.
struct CatalogDeclaration {
  Window window;
  TimeSpan span;
  std::optional<double> mag_cutoff;
  std::optional<std::string> epoch;  // ISO-8601; required when times are ISO

  static CatalogDeclaration from_config(const Config& cfg);
  Config to_config() const;
  // `events.csv` pairs with `events.cfg`.
  static std::filesystem::path sidecar_path(const std::filesystem::path& catalog);
};

struct ReadReport {
  std::size_t rows = 0;
  std::size_t dropped_magnitude = 0;
  std::size_t dropped_window = 0;
  std::size_t dropped_time = 0;
  std::size_t tie_adjusted = 0;  // exact duplicate times nudged apart

  std::size_t dropped() const { return dropped_magnitude + dropped_window + dropped_time; }
};

// CSV with header t,x,y[,mag]. Rows below the cutoff, outside the window or
// outside the span are dropped and counted. Malformed rows throw DataError
// naming the line.
Catalog read_catalog(std::istream& in, const CatalogDeclaration& declaration,
                     ReadReport* report = nullptr);
// Reads the sidecar declaration next to `path`.
Catalog read_catalog(const std::filesystem::path& path, ReadReport* report = nullptr);

void write_catalog(std::ostream& out, const Catalog& catalog);
// Writes the CSV and its sidecar declaration.
void write_catalog(const std::filesystem::path& path, const Catalog& catalog);

// Settings for one CLI run, backed by flat key = value text. resolve() fills
// in every default so the saved copy reproduces the run on its own.
class RunConfig {
 public:
  RunConfig() = default;
  explicit RunConfig(Config cfg) : cfg_(std::move(cfg)) {}
  static RunConfig load(const std::filesystem::path& path);

  Config& raw() { return cfg_; }
  const Config& raw() const { return cfg_; }

  void resolve();

  Window window() const;
  TimeSpan span() const;
  std::uint64_t seed() const;
  std::filesystem::path out_dir() const;
  double alpha() const;
  int replicates() const;
  int n_sim() const;
  double margin() const;
  std::vector<Partition> partitions() const;
  MagnitudeLaw magnitude_law() const;
  bool is_etas() const;
  EtasParams etas_params() const;
  IntensityModel model() const;

 private:
  Config cfg_;
};

}  // namespace vorres
