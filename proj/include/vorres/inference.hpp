#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "vorres/intensity.hpp"
#include "vorres/residuals.hpp"
#include "vorres/simulate.hpp"

namespace vorres {

// Sup distance between the empirical distribution of `sample` and the
// standard uniform, including left limits at the order statistics.
double ks_statistic(std::span<const double> sample);

struct KsResult {
  double statistic = 0.0;
  std::size_t n = 0;
  double critical_value = 0.0;
  double alpha = 0.05;
  bool reject = false;
  int n_sim = 0;
};

KsResult ks_test(std::span<const double> sample, double critical_value, double alpha, int n_sim);

// Monte Carlo critical value: the ceil((1 - alpha)(n + 1))-th smallest of
// n simulated statistics (0 when that rank is 0).
double critical_value(std::vector<double> null_statistics, double alpha);

struct Partition {
  enum class Kind { voronoi, pixel };
  Kind kind = Kind::voronoi;
  int pixels = 0;

  static Partition voronoi() { return {}; }
  static Partition pixel(int n) { return {Kind::pixel, n}; }
  // "voronoi", "pixel(36)", "pixel:36" or "pixel36".
  static Partition parse(std::string_view text);
  std::string name() const;

  friend bool operator==(const Partition&, const Partition&) = default;
};

// Patterns are drawn on core.expanded(margin); only the core is analysed.
// With margin 0 the Voronoi analysis drops cells touching the window edge.
struct SamplingScheme {
  Window core;
  double margin = 0.0;

  Window region() const { return core.expanded(margin); }
};

// PIT samples of a pattern under one proposed model, for several partitions.
// Pixel integrals are computed once at construction.
class PitEvaluator {
 public:
  PitEvaluator(IntensityModel proposed, SamplingScheme scheme, std::vector<Partition> partitions);

  bool needs_diagram() const;
  // `diagram` must tessellate sample.catalog when needs_diagram().
  std::vector<std::vector<double>> pits(const BufferedSample& sample,
                                        const VoronoiDiagram* diagram,
                                        std::uint64_t noise_seed) const;
  std::vector<double> statistics(const BufferedSample& sample, const VoronoiDiagram* diagram,
                                 std::uint64_t noise_seed) const;

  const std::vector<Partition>& partitions() const { return partitions_; }

 private:
  IntensityModel proposed_;
  SamplingScheme scheme_;
  std::vector<Partition> partitions_;
  std::vector<std::vector<double>> pixel_integrals_;
};

// K-S statistics of n_sim patterns drawn from `model` and assessed against
// the same model; result[k][s] is partition k, simulation s.
std::vector<std::vector<double>> null_statistics(const IntensityModel& model,
                                                 const SamplingScheme& scheme,
                                                 const std::vector<Partition>& partitions,
                                                 int n_sim, std::uint64_t seed);

double simulated_critical_value(const IntensityModel& model, const Partition& partition,
                                double alpha, int n_sim, std::uint64_t seed,
                                const SamplingScheme& scheme);

enum class Design { homogeneous, beta_family };

std::string_view to_string(Design design);
Design parse_design(std::string_view name);
// homogeneous: rate = value; beta_family: beta = value.
IntensityModel design_model(Design design, double value, const Window& window);

struct PowerConfig {
  Design design = Design::homogeneous;
  double true_value = 500.0;
  std::vector<double> proposed;
  std::vector<Partition> partitions;
  int replicates = 500;
  int n_sim = 999;
  double alpha = 0.05;
  std::uint64_t seed = 1;
  Window core;
  double margin = 0.25;
};

struct PowerEntry {
  Partition partition;
  double proposed = 0.0;
  double power = 0.0;
  int rejections = 0;
  double critical_value = 0.0;
};

struct PowerResult {
  PowerConfig config;
  std::vector<PowerEntry> entries;

  double power(const Partition& partition, double proposed) const;
};

// For each proposed value: critical values from n_sim patterns of the
// proposed model, then the rejection fraction over replicates drawn from the
// true model. Replicate r uses the same true-model pattern for every
// proposed value and partition.
PowerResult power_study(const PowerConfig& config);

// CSV design,partition,proposed_value,power,replicates,alpha,seed
void write_power_csv(std::ostream& out, const PowerResult& result);
PowerResult read_power_csv(std::istream& in);

struct PitHistogram {
  std::vector<double> edges;
  std::vector<long> counts;
  std::vector<double> band_lo;
  std::vector<double> band_hi;
  std::size_t n = 0;
  int n_sim = 0;

  std::size_t bins_outside() const;
};

using PitSampler = std::function<std::vector<double>(std::uint64_t seed)>;

// Bin counts of `sample` plus pointwise (1 - coverage)/2 and (1 + coverage)/2
// limits from n_sim simulated PIT samples, rescaled to the observed size.
PitHistogram pit_histogram(std::span<const double> sample, int bins, const PitSampler& simulate,
                           int n_sim, std::uint64_t seed, double coverage = 0.90);
// Same, from PIT samples simulated beforehand.
PitHistogram pit_histogram(std::span<const double> sample, int bins,
                           const std::vector<std::vector<double>>& simulated,
                           double coverage = 0.90);
// n_sim PIT samples; sample s uses seed derive_seed(seed, {kHistogram, s}).
std::vector<std::vector<double>> simulate_pits(const PitSampler& simulate, int n_sim,
                                               std::uint64_t seed);

// CSV bin_lo,bin_hi,count,band_lo,band_hi
void write_histogram_csv(std::ostream& out, const PitHistogram& histogram);

PitSampler poisson_pit_sampler(const IntensityModel& proposed, const Partition& partition,
                               const SamplingScheme& scheme);
PitSampler etas_pit_sampler(const EtasParams& params, const Window& window, TimeSpan span,
                            const MagnitudeLaw& law, const Partition& partition);

// PITs of an observed catalog under a model for one partition (boundary cells
// dropped for Voronoi; randomized PIT noise from `seed` for pixels).
std::vector<double> catalog_pits(const Catalog& catalog, const IntensityModel& model,
                                 const Partition& partition, std::uint64_t seed);

}  // namespace vorres
