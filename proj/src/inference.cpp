#include "vorres/inference.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <string>

#include "vorres/parallel.hpp"
#include "vorres/rng.hpp"
#include "vorres/text.hpp"

namespace vorres {
namespace {

double ks_or_zero(std::span<const double> sample) {
  return sample.empty() ? 0.0 : ks_statistic(sample);
}

std::vector<double> voronoi_pits_of(const Catalog& catalog, const IntensityModel& model,
                                    const VoronoiDiagram& diagram,
                                    std::span<const std::size_t> subset) {
  if (catalog.empty()) return {};
  return included_pits(voronoi_residuals(catalog, model, diagram, subset));
}

}  // namespace

double ks_statistic(std::span<const double> sample) {
  if (sample.empty()) throw DataError("K-S statistic of an empty sample");
  std::vector<double> u(sample.begin(), sample.end());
  for (double v : u)
    if (!(v >= 0.0 && v <= 1.0)) throw DataError("K-S sample value outside [0, 1]");
  std::sort(u.begin(), u.end());
  const double n = static_cast<double>(u.size());
  double d = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double rank = static_cast<double>(i + 1);
    d = std::max({d, rank / n - u[i], u[i] - (rank - 1.0) / n});
  }
  return d;
}

KsResult ks_test(std::span<const double> sample, double critical, double alpha, int n_sim) {
  KsResult r;
  r.statistic = ks_or_zero(sample);
  r.n = sample.size();
  r.critical_value = critical;
  r.alpha = alpha;
  r.reject = r.statistic > critical;
  r.n_sim = n_sim;
  return r;
}

double critical_value(std::vector<double> stats, double alpha) {
  if (!(alpha > 0.0 && alpha <= 1.0)) throw DataError("alpha must lie in (0, 1]");
  if (stats.empty()) throw DataError("no simulated statistics");
  std::sort(stats.begin(), stats.end());
  const double n = static_cast<double>(stats.size());
  const auto rank = static_cast<long>(std::ceil((1.0 - alpha) * (n + 1.0) - 1e-9));
  if (rank <= 0) return 0.0;
  return stats[static_cast<std::size_t>(std::min<long>(rank, static_cast<long>(stats.size()))) - 1];
}

Partition Partition::parse(std::string_view text) {
  text = trim(text);
  if (text == "voronoi") return voronoi();
  if (text.starts_with("pixel")) {
    std::string_view rest = text.substr(5);
    if (rest.starts_with("(") && rest.ends_with(")")) rest = rest.substr(1, rest.size() - 2);
    else if (rest.starts_with(":")) rest = rest.substr(1);
    const long n = parse_long(rest, "pixel count");
    if (n < 1) throw DataError("pixel count must be positive");
    return pixel(static_cast<int>(n));
  }
  throw DataError("unknown partition '" + std::string(text) + "'");
}

std::string Partition::name() const {
  return kind == Kind::voronoi ? std::string("voronoi") : "pixel(" + std::to_string(pixels) + ")";
}

PitEvaluator::PitEvaluator(IntensityModel proposed, SamplingScheme scheme,
                           std::vector<Partition> partitions)
    : proposed_(std::move(proposed)), scheme_(scheme), partitions_(std::move(partitions)) {
  for (const Partition& p : partitions_) {
    if (p.kind == Partition::Kind::pixel)
      pixel_integrals_.push_back(integrate_pixels(proposed_, PixelGrid::square(scheme_.core, p.pixels)));
    else
      pixel_integrals_.emplace_back();
  }
}

bool PitEvaluator::needs_diagram() const {
  return std::any_of(partitions_.begin(), partitions_.end(),
                     [](const Partition& p) { return p.kind == Partition::Kind::voronoi; });
}

std::vector<std::vector<double>> PitEvaluator::pits(const BufferedSample& sample,
                                                    const VoronoiDiagram* diagram,
                                                    std::uint64_t noise_seed) const {
  std::vector<std::vector<double>> out(partitions_.size());
  std::vector<Point> core_points;
  core_points.reserve(sample.core.size());
  for (std::size_t i : sample.core) core_points.push_back(sample.catalog.events[i].location());
  for (std::size_t k = 0; k < partitions_.size(); ++k) {
    const Partition& p = partitions_[k];
    if (p.kind == Partition::Kind::voronoi) {
      if (sample.catalog.empty()) continue;
      if (diagram == nullptr) throw DataError("Voronoi partition needs a diagram");
      out[k] = voronoi_pits_of(sample.catalog, proposed_, *diagram, sample.core);
    } else {
      const PixelGrid grid = PixelGrid::square(scheme_.core, p.pixels);
      const auto records = pixel_residuals(core_points, grid, pixel_integrals_[k],
                                           derive_seed(noise_seed, {static_cast<std::uint64_t>(k)}));
      out[k] = included_pits(records);
    }
  }
  return out;
}

std::vector<double> PitEvaluator::statistics(const BufferedSample& sample,
                                             const VoronoiDiagram* diagram,
                                             std::uint64_t noise_seed) const {
  const auto all = pits(sample, diagram, noise_seed);
  std::vector<double> out;
  out.reserve(all.size());
  for (const auto& u : all) out.push_back(ks_or_zero(u));
  return out;
}

std::vector<std::vector<double>> null_statistics(const IntensityModel& model,
                                                 const SamplingScheme& scheme,
                                                 const std::vector<Partition>& partitions,
                                                 int n_sim, std::uint64_t seed) {
  const PitEvaluator evaluator(model, scheme, partitions);
  std::vector<std::vector<double>> by_sim(static_cast<std::size_t>(n_sim));
  parallel_for(by_sim.size(), [&](std::size_t s) {
    const std::uint64_t stream = derive_seed(seed, {stream::kNullSimulation, s});
    const BufferedSample sample = buffered_sample(model, scheme.core, scheme.margin, stream);
    std::optional<VoronoiDiagram> diagram;
    if (evaluator.needs_diagram() && !sample.catalog.empty())
      diagram.emplace(tessellate(sample.catalog.points(), sample.catalog.window));
    by_sim[s] = evaluator.statistics(sample, diagram ? &*diagram : nullptr,
                                     derive_seed(stream, {stream::kPitNoise}));
  });
  std::vector<std::vector<double>> out(partitions.size(), std::vector<double>(by_sim.size()));
  for (std::size_t s = 0; s < by_sim.size(); ++s)
    for (std::size_t k = 0; k < partitions.size(); ++k) out[k][s] = by_sim[s][k];
  return out;
}

double simulated_critical_value(const IntensityModel& model, const Partition& partition,
                                double alpha, int n_sim, std::uint64_t seed,
                                const SamplingScheme& scheme) {
  if (n_sim < 1) throw DataError("n_sim must be positive");
  if (alpha >= 1.0) return 0.0;
  auto stats = null_statistics(model, scheme, {partition}, n_sim, seed);
  return critical_value(std::move(stats[0]), alpha);
}

std::string_view to_string(Design design) {
  return design == Design::homogeneous ? "homogeneous" : "beta_family";
}

Design parse_design(std::string_view name) {
  if (name == "homogeneous") return Design::homogeneous;
  if (name == "beta_family" || name == "beta") return Design::beta_family;
  throw DataError("unknown design '" + std::string(name) + "'");
}

IntensityModel design_model(Design design, double value, const Window& window) {
  return design == Design::homogeneous ? IntensityModel::homogeneous(value, window)
                                       : IntensityModel::beta_family(value, window);
}

double PowerResult::power(const Partition& partition, double proposed) const {
  for (const PowerEntry& e : entries)
    if (e.partition == partition && e.proposed == proposed) return e.power;
  throw DataError("no power entry for " + partition.name() + " at " + format_double(proposed));
}

PowerResult power_study(const PowerConfig& cfg) {
  if (cfg.partitions.empty() || cfg.proposed.empty())
    throw DataError("power study needs partitions and proposed values");
  if (cfg.replicates < 1 || cfg.n_sim < 1) throw DataError("replicates and n_sim must be positive");
  const SamplingScheme scheme{cfg.core, cfg.margin};
  const Window region = scheme.region();

  std::vector<PitEvaluator> evaluators;
  std::vector<std::vector<double>> critical(cfg.proposed.size());
  for (std::size_t v = 0; v < cfg.proposed.size(); ++v) {
    const IntensityModel model = design_model(cfg.design, cfg.proposed[v], region);
    evaluators.emplace_back(model, scheme, cfg.partitions);
    const auto stats = null_statistics(model, scheme, cfg.partitions, cfg.n_sim,
                                       derive_seed(cfg.seed, {stream::kNullSimulation, v}));
    for (const auto& s : stats) critical[v].push_back(critical_value(s, cfg.alpha));
  }

  const IntensityModel truth = design_model(cfg.design, cfg.true_value, region);
  const bool diagram_needed = evaluators.front().needs_diagram();
  // rejected[r][v][k]
  std::vector<std::vector<std::vector<char>>> rejected(static_cast<std::size_t>(cfg.replicates));
  parallel_for(rejected.size(), [&](std::size_t r) {
    const std::uint64_t stream = derive_seed(cfg.seed, {stream::kReplicate, r});
    const BufferedSample sample = buffered_sample(truth, cfg.core, cfg.margin, stream);
    std::optional<VoronoiDiagram> diagram;
    if (diagram_needed && !sample.catalog.empty())
      diagram.emplace(tessellate(sample.catalog.points(), sample.catalog.window));
    auto& row = rejected[r];
    row.resize(cfg.proposed.size());
    for (std::size_t v = 0; v < cfg.proposed.size(); ++v) {
      const auto stats = evaluators[v].statistics(
          sample, diagram ? &*diagram : nullptr, derive_seed(stream, {stream::kPitNoise, v}));
      for (std::size_t k = 0; k < stats.size(); ++k) row[v].push_back(stats[k] > critical[v][k]);
    }
  });

  PowerResult result{cfg, {}};
  for (std::size_t k = 0; k < cfg.partitions.size(); ++k) {
    for (std::size_t v = 0; v < cfg.proposed.size(); ++v) {
      PowerEntry e;
      e.partition = cfg.partitions[k];
      e.proposed = cfg.proposed[v];
      for (const auto& row : rejected) e.rejections += row[v][k] ? 1 : 0;
      e.power = static_cast<double>(e.rejections) / static_cast<double>(cfg.replicates);
      e.critical_value = critical[v][k];
      result.entries.push_back(e);
    }
  }
  return result;
}

void write_power_csv(std::ostream& out, const PowerResult& result) {
  out << "design,partition,proposed_value,power,replicates,alpha,seed\n";
  for (const PowerEntry& e : result.entries) {
    out << to_string(result.config.design) << ',' << e.partition.name() << ','
        << format_double(e.proposed) << ',' << format_double(e.power) << ','
        << result.config.replicates << ',' << format_double(result.config.alpha) << ','
        << result.config.seed << '\n';
  }
}

PowerResult read_power_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || trim(line) != "design,partition,proposed_value,power,replicates,alpha,seed")
    throw DataError("power CSV: unexpected header");
  PowerResult result;
  for (long lineno = 2; std::getline(in, line); ++lineno) {
    if (trim(line).empty()) continue;
    const std::string where = "power CSV line " + std::to_string(lineno);
    const auto f = split(trim(line), ',');
    if (f.size() != 7) throw DataError(where + ": expected 7 fields");
    result.config.design = parse_design(f[0]);
    PowerEntry e;
    e.partition = Partition::parse(f[1]);
    e.proposed = parse_double(f[2], where);
    e.power = parse_double(f[3], where);
    result.config.replicates = static_cast<int>(parse_long(f[4], where));
    result.config.alpha = parse_double(f[5], where);
    result.config.seed = static_cast<std::uint64_t>(parse_long(f[6], where));
    e.rejections = static_cast<int>(std::lround(e.power * result.config.replicates));
    result.entries.push_back(e);
    if (std::find(result.config.partitions.begin(), result.config.partitions.end(), e.partition) ==
        result.config.partitions.end())
      result.config.partitions.push_back(e.partition);
    if (std::find(result.config.proposed.begin(), result.config.proposed.end(), e.proposed) ==
        result.config.proposed.end())
      result.config.proposed.push_back(e.proposed);
  }
  return result;
}

std::size_t PitHistogram::bins_outside() const {
  std::size_t k = 0;
  for (std::size_t b = 0; b < counts.size(); ++b) {
    const double c = static_cast<double>(counts[b]);
    if (c < band_lo[b] || c > band_hi[b]) ++k;
  }
  return k;
}

namespace {

std::vector<long> bin_counts(std::span<const double> sample, int bins) {
  std::vector<long> counts(static_cast<std::size_t>(bins), 0);
  for (double u : sample) {
    const int b = std::clamp(static_cast<int>(std::floor(u * bins)), 0, bins - 1);
    ++counts[static_cast<std::size_t>(b)];
  }
  return counts;
}

}  // namespace

std::vector<std::vector<double>> simulate_pits(const PitSampler& simulate, int n_sim,
                                               std::uint64_t seed) {
  std::vector<std::vector<double>> out(static_cast<std::size_t>(std::max(n_sim, 0)));
  parallel_for(out.size(), [&](std::size_t s) {
    out[s] = simulate(derive_seed(seed, {stream::kHistogram, s}));
  });
  return out;
}

PitHistogram pit_histogram(std::span<const double> sample, int bins,
                           const std::vector<std::vector<double>>& simulated, double coverage) {
  if (bins < 2) throw DataError("a PIT histogram needs at least 2 bins");
  PitHistogram h;
  h.n = sample.size();
  h.n_sim = static_cast<int>(simulated.size());
  for (int b = 0; b <= bins; ++b) h.edges.push_back(static_cast<double>(b) / bins);
  h.counts = bin_counts(sample, bins);

  // Band from per-simulation bin proportions, rescaled to the observed size.
  std::vector<std::vector<double>> shares;
  for (const auto& u : simulated) {
    if (u.empty()) continue;
    const auto c = bin_counts(u, bins);
    auto& row = shares.emplace_back(c.size());
    for (std::size_t b = 0; b < c.size(); ++b)
      row[b] = static_cast<double>(c[b]) / static_cast<double>(u.size());
  }
  const double tail = 0.5 * (1.0 - coverage);
  const double n = static_cast<double>(h.n);
  std::vector<double> column(shares.size());
  for (std::size_t b = 0; b < static_cast<std::size_t>(bins); ++b) {
    for (std::size_t s = 0; s < shares.size(); ++s) column[s] = shares[s][b];
    std::sort(column.begin(), column.end());
    h.band_lo.push_back(column.empty() ? 0.0 : n * sample_quantile(column, tail));
    h.band_hi.push_back(column.empty() ? n : n * sample_quantile(column, 1.0 - tail));
  }
  return h;
}

PitHistogram pit_histogram(std::span<const double> sample, int bins, const PitSampler& simulate,
                           int n_sim, std::uint64_t seed, double coverage) {
  if (bins < 2) throw DataError("a PIT histogram needs at least 2 bins");
  return pit_histogram(sample, bins, simulate_pits(simulate, n_sim, seed), coverage);
}

void write_histogram_csv(std::ostream& out, const PitHistogram& h) {
  out << "bin_lo,bin_hi,count,band_lo,band_hi\n";
  for (std::size_t b = 0; b < h.counts.size(); ++b) {
    out << format_double(h.edges[b]) << ',' << format_double(h.edges[b + 1]) << ',' << h.counts[b]
        << ',' << format_double(h.band_lo[b]) << ',' << format_double(h.band_hi[b]) << '\n';
  }
}

PitSampler poisson_pit_sampler(const IntensityModel& proposed, const Partition& partition,
                               const SamplingScheme& scheme) {
  auto evaluator = std::make_shared<PitEvaluator>(proposed, scheme, std::vector{partition});
  auto model = std::make_shared<IntensityModel>(proposed);
  return [evaluator, model, scheme](std::uint64_t seed) {
    const BufferedSample sample = buffered_sample(*model, scheme.core, scheme.margin, seed);
    std::optional<VoronoiDiagram> diagram;
    if (evaluator->needs_diagram() && !sample.catalog.empty())
      diagram.emplace(tessellate(sample.catalog.points(), sample.catalog.window));
    return evaluator->pits(sample, diagram ? &*diagram : nullptr,
                           derive_seed(seed, {stream::kPitNoise}))[0];
  };
}

std::vector<double> catalog_pits(const Catalog& catalog, const IntensityModel& model,
                                 const Partition& partition, std::uint64_t seed) {
  if (partition.kind == Partition::Kind::voronoi) {
    if (catalog.empty()) return {};
    const VoronoiDiagram diagram = tessellate(catalog.points(), catalog.window);
    return voronoi_pits_of(catalog, model, diagram, {});
  }
  const PixelGrid grid = PixelGrid::square(catalog.window, partition.pixels);
  return included_pits(pixel_residuals(catalog, model, grid, seed));
}

PitSampler etas_pit_sampler(const EtasParams& params, const Window& window, TimeSpan span,
                            const MagnitudeLaw& law, const Partition& partition) {
  const IntensityModel model = IntensityModel::etas(params, window, span);
  return [=](std::uint64_t seed) {
    const Catalog sim = sample_etas(params, window, span, law, seed);
    return catalog_pits(sim, model, partition, derive_seed(seed, {stream::kPitNoise}));
  };
}

}  // namespace vorres
