#include "vorres/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numbers>
#include <numeric>
#include <string>

#include "vorres/rng.hpp"
#include "vorres/text.hpp"

namespace vorres {

Catalog sample_poisson(const IntensityModel& model, const Window& region, std::uint64_t seed,
                       TimeSpan span) {
  if (model.kind() == ModelKind::etas)
    throw DataError("sample_poisson does not handle ETAS models; use sample_etas");
  const double bound = model.upper_bound(region);
  if (!std::isfinite(bound) || bound < 0.0)
    throw DataError("intensity upper bound is not finite on the sampling region");
  Rng rng(seed);
  Catalog out;
  out.window = region;
  out.span = span;
  const long n = rng.poisson(bound * region.area());
  out.events.reserve(static_cast<std::size_t>(n));
  for (long i = 0; i < n; ++i) {
    const double x = rng.uniform(region.xmin(), region.xmax());
    const double y = rng.uniform(region.ymin(), region.ymax());
    const double t = rng.uniform(span.t0, span.t1);
    const double accept = rng.uniform();
    if (!region.contains_strictly({x, y})) continue;
    if (accept * bound < model.evaluate(x, y)) out.events.push_back({t, x, y, std::nullopt});
  }
  out.sort_and_separate_ties();
  return out;
}

BufferedSample buffered_sample(const IntensityModel& model, const Window& core, double margin,
                               std::uint64_t seed) {
  const Window region = core.expanded(margin);
  BufferedSample out{sample_poisson(model, region, seed), {}, core};
  for (std::size_t i = 0; i < out.catalog.size(); ++i) {
    if (core.contains(out.catalog.events[i].location())) out.core.push_back(i);
  }
  return out;
}

double MagnitudeLaw::beta() const { return b * std::numbers::ln10; }

double MagnitudeLaw::sample(double u, double M0) const {
  const double bt = beta();
  const double tail = std::isfinite(max_excess) ? -std::expm1(-bt * max_excess) : 1.0;
  return M0 - std::log1p(-u * tail) / bt;
}

double MagnitudeLaw::mean_productivity(double a) const {
  const double bt = beta();
  if (!std::isfinite(max_excess)) {
    if (a >= bt) return std::numeric_limits<double>::infinity();
    return bt / (bt - a);
  }
  const double norm = bt / -std::expm1(-bt * max_excess);
  const double diff = a - bt;
  if (std::abs(diff) < 1e-12) return norm * max_excess;
  return norm * std::expm1(diff * max_excess) / diff;
}

double expected_offspring(const EtasParams& e, double magnitude) {
  const double time_total = std::pow(e.c, 1.0 - e.p) / (e.p - 1.0);
  const double space_total = std::numbers::pi * std::pow(e.d, 1.0 - e.q) / (e.q - 1.0);
  return e.K * std::exp(e.a * (magnitude - e.M0)) * time_total * space_total;
}

double branching_ratio(const EtasParams& e, const MagnitudeLaw& law) {
  return expected_offspring(e, e.M0) * law.mean_productivity(e.a);
}

SupercriticalError::SupercriticalError(double ratio)
    : DataError("supercritical ETAS parameters: branching ratio " + format_double(ratio) +
                " >= 1"),
      ratio_(ratio) {}

EtasRealization simulate_etas(const EtasParams& e, const Window& window, TimeSpan span,
                              const MagnitudeLaw& law, std::uint64_t seed,
                              const std::vector<Event>& ancestors, std::size_t max_events) {
  validate(e);
  if (!(span.t1 > span.t0)) throw ParameterError("time_span", "t1 must exceed t0");
  const double ratio = branching_ratio(e, law);
  if (!(ratio < 1.0)) throw SupercriticalError(ratio);

  Rng rng(seed);
  std::vector<Event> events;
  std::vector<long> parent;
  for (const Event& a : ancestors) {
    events.push_back(a);
    parent.push_back(-1);
  }
  const long n_background = rng.poisson(e.mu * span.duration());
  for (long i = 0; i < n_background; ++i) {
    Event ev;
    ev.t = rng.uniform(span.t0, span.t1);
    ev.x = rng.uniform(window.xmin(), window.xmax());
    ev.y = rng.uniform(window.ymin(), window.ymax());
    ev.mag = law.sample(rng.uniform(), e.M0);
    events.push_back(ev);
    parent.push_back(-1);
  }

  const double inv_p = 1.0 / (e.p - 1.0), inv_q = 1.0 / (e.q - 1.0);
  for (std::size_t next = 0; next < events.size(); ++next) {
    const Event mother = events[next];
    const long kids = rng.poisson(expected_offspring(e, mother.mag.value_or(e.M0)));
    for (long k = 0; k < kids; ++k) {
      // Delay density proportional to (t + c)^-p on t > 0.
      const double delay = e.c * (std::pow(rng.uniform_open(), -inv_p) - 1.0);
      // Radial density proportional to (r^2 + d)^-q r on r > 0.
      const double r = std::sqrt(e.d * (std::pow(rng.uniform_open(), -inv_q) - 1.0));
      const double theta = rng.uniform(0.0, 2.0 * std::numbers::pi);
      Event child;
      child.t = mother.t + delay;
      child.x = mother.x + r * std::cos(theta);
      child.y = mother.y + r * std::sin(theta);
      child.mag = law.sample(rng.uniform(), e.M0);
      if (!(child.t < span.t1) || !window.contains_strictly(child.location())) continue;
      events.push_back(child);
      parent.push_back(static_cast<long>(next));
      if (events.size() > max_events)
        throw DataError("ETAS simulation exceeded " + std::to_string(max_events) + " events");
    }
  }

  std::vector<std::size_t> order(events.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return events[a].t < events[b].t; });
  std::vector<long> rank(events.size());
  for (std::size_t i = 0; i < order.size(); ++i) rank[order[i]] = static_cast<long>(i);

  EtasRealization out;
  out.catalog.window = window;
  out.catalog.span = span;
  out.catalog.mag_cutoff = e.M0;
  out.catalog.events.reserve(events.size());
  out.parent.reserve(events.size());
  for (std::size_t i : order) {
    out.catalog.events.push_back(events[i]);
    out.parent.push_back(parent[i] < 0 ? -1 : rank[static_cast<std::size_t>(parent[i])]);
  }
  return out;
}

Catalog sample_etas(const EtasParams& params, const Window& window, TimeSpan span,
                    const MagnitudeLaw& law, std::uint64_t seed) {
  return simulate_etas(params, window, span, law, seed).catalog;
}

}  // namespace vorres
