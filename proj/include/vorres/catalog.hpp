#pragma once

#include <optional>
#include <span>
#include <vector>

#include "vorres/geometry.hpp"

namespace vorres {

struct TimeSpan {
  double t0 = 0.0;
  double t1 = 1.0;

  double duration() const { return t1 - t0; }
  friend bool operator==(const TimeSpan&, const TimeSpan&) = default;
};

struct Event {
  double t = 0.0;
  double x = 0.0;
  double y = 0.0;
  std::optional<double> mag;

  Point location() const { return {x, y}; }
  friend bool operator==(const Event&, const Event&) = default;
};

// Time-ordered events observed on window x span.
struct Catalog {
  std::vector<Event> events;
  Window window;
  TimeSpan span;
  std::optional<double> mag_cutoff;

  std::size_t size() const { return events.size(); }
  bool empty() const { return events.empty(); }
  std::vector<Point> points() const;

  // Sorts by time and nudges exact ties apart by < 1e-9 so times are strictly
  // increasing. Returns the number of nudged events.
  std::size_t sort_and_separate_ties();
  // Throws DataError if times are not strictly increasing inside the span or
  // magnitudes fall below the cutoff.
  void validate() const;
};

}  // namespace vorres
