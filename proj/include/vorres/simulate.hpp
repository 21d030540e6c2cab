#pragma once

#include <cstdint>
#include <vector>

#include "vorres/catalog.hpp"
#include "vorres/intensity.hpp"

namespace vorres {

// Inhomogeneous Poisson sample on `region` by thinning a homogeneous sample at
// the model's upper bound. Event times are uniform on `span` (spatial models
// carry no time structure) and events come out time-ordered.
Catalog sample_poisson(const IntensityModel& model, const Window& region, std::uint64_t seed,
                       TimeSpan span = {});

struct BufferedSample {
  Catalog catalog;                 // over core.expanded(margin)
  std::vector<std::size_t> core;   // indices of events inside the core window
  Window core_window;
};

BufferedSample buffered_sample(const IntensityModel& model, const Window& core, double margin,
                               std::uint64_t seed);

// Gutenberg-Richter magnitudes: M - M0 ~ Exp(b ln 10) truncated at max_excess.
struct MagnitudeLaw {
  double b = 1.0;
  double max_excess = 4.0;

  double beta() const;
  double sample(double uniform, double M0) const;
  // E[exp(a (M - M0))]
  double mean_productivity(double a) const;
};

// Expected direct offspring of an event with the given magnitude, over the
// whole plane and unbounded time.
double expected_offspring(const EtasParams& params, double magnitude);
// Mean of expected_offspring over the magnitude law.
double branching_ratio(const EtasParams& params, const MagnitudeLaw& law);

class SupercriticalError : public DataError {
 public:
  explicit SupercriticalError(double ratio);
  double ratio() const { return ratio_; }

 private:
  double ratio_;
};

struct EtasRealization {
  Catalog catalog;
  // parent[i] is the catalog index of event i's parent, or -1 for background
  // events and seeded ancestors.
  std::vector<long> parent;
};

// Branching construction: Poisson background on window x span, then each
// event spawns Poisson(expected_offspring) children with inverse-transform
// delays and displacements. Children outside the window or after span.t1 are
// dropped and do not reproduce. `ancestors` are inserted as given.
EtasRealization simulate_etas(const EtasParams& params, const Window& window, TimeSpan span,
                              const MagnitudeLaw& law, std::uint64_t seed,
                              const std::vector<Event>& ancestors = {},
                              std::size_t max_events = 5'000'000);

Catalog sample_etas(const EtasParams& params, const Window& window, TimeSpan span,
                    const MagnitudeLaw& law, std::uint64_t seed);

}  // namespace vorres
