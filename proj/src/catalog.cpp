#include "vorres/catalog.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "vorres/error.hpp"

namespace vorres {

std::vector<Point> Catalog::points() const {
  std::vector<Point> out;
  out.reserve(events.size());
  for (const Event& e : events) out.push_back(e.location());
  return out;
}

std::size_t Catalog::sort_and_separate_ties() {
  std::stable_sort(events.begin(), events.end(),
                   [](const Event& a, const Event& b) { return a.t < b.t; });
  std::size_t nudged = 0;
  for (std::size_t i = 1; i < events.size(); ++i) {
    if (events[i].t <= events[i - 1].t) {
      const double step = std::max(1e-12, std::abs(events[i - 1].t) * 1e-15);
      events[i].t = events[i - 1].t + std::min(step, 1e-10);
      ++nudged;
    }
  }
  return nudged;
}

void Catalog::validate() const {
  for (std::size_t i = 0; i < events.size(); ++i) {
    const Event& e = events[i];
    if (i > 0 && !(e.t > events[i - 1].t))
      throw DataError("event " + std::to_string(i) + " is not strictly after its predecessor");
    if (e.t < span.t0 || e.t > span.t1)
      throw DataError("event " + std::to_string(i) + " lies outside the time span");
    if (!window.contains(e.location()))
      throw DataError("event " + std::to_string(i) + " lies outside the window");
    if (mag_cutoff && e.mag && *e.mag < *mag_cutoff)
      throw DataError("event " + std::to_string(i) + " is below the magnitude cutoff");
  }
}

}  // namespace vorres
