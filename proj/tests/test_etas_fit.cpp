#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "vorres/etas_fit.hpp"
#include "vorres/parallel.hpp"
#include "vorres/rng.hpp"
#include "vorres/simulate.hpp"

using namespace vorres;

namespace {

const Window kWindow(-117, -116, 34, 35);

EtasParams truth(double br = 0.5) {
  EtasParams e{0.6, 0.0, 0.01, 1.2, 1.5, 3.0, 1e-5, 1.6};
  e.K = 1.0;
  e.K = br / branching_ratio(e, MagnitudeLaw{});
  return e;
}

Catalog simulated(const EtasParams& e, double t1, std::uint64_t seed) {
  Catalog c = sample_etas(e, kWindow, {0, t1}, MagnitudeLaw{}, seed);
  c.mag_cutoff = e.M0;
  return c;
}

EtasParams perturbed(const EtasParams& e, Rng& rng) {
  auto f = [&](double v) { return v * (rng.uniform() < 0.5 ? 0.75 : 1.25); };
  EtasParams out = e;
  out.mu = f(e.mu);
  out.K = f(e.K);
  out.c = f(e.c);
  out.p = std::max(1.001 + 1e-9, f(e.p));
  out.a = f(e.a);
  out.d = f(e.d);
  out.q = std::max(1.001 + 1e-9, f(e.q));
  return out;
}

}  // namespace

TEST_CASE("likelihood of an empty catalog is the background mass") {
  Catalog empty;
  empty.window = kWindow;
  empty.span = {0, 250};
  const EtasParams e = truth();
  CHECK(log_likelihood(e, empty) == doctest::Approx(-0.6 * 250).epsilon(1e-12));
}

TEST_CASE("K = 0 reduces to the Poisson likelihood") {
  Catalog c;
  c.window = Window();
  c.span = {0, 10};
  Rng rng(4);
  for (int i = 0; i < 30; ++i) c.events.push_back({rng.uniform(0, 10), rng.uniform(), rng.uniform(), 3.0 + rng.uniform()});
  c.sort_and_separate_ties();
  EtasParams e{3.0, 0.0, 0.01, 1.2, 1.5, 3.0, 1e-3, 1.5};
  CHECK(log_likelihood(e, c) == doctest::Approx(30 * std::log(3.0) - 30.0).epsilon(1e-12));
}

TEST_CASE("likelihood is invariant to a time shift") {
  const EtasParams e = truth();
  Catalog c = simulated(e, 100, 3);
  REQUIRE(c.size() > 20);
  Catalog shifted = c;
  for (Event& ev : shifted.events) ev.t += 1234.5;
  shifted.span = {c.span.t0 + 1234.5, c.span.t1 + 1234.5};
  const double a = log_likelihood(e, c), b = log_likelihood(e, shifted);
  CHECK(std::abs(a - b) <= 1e-9 * std::max(1.0, std::abs(a)));
}

TEST_CASE("compensator agrees with direct space-time quadrature") {
  const EtasParams e = truth();
  const Catalog c = simulated(e, 100, 4);
  const EtasLikelihood ll(c);
  const auto model = IntensityModel::etas(e, c.window, c.span);
  QuadratureOptions opts;
  opts.rel_tol = 1e-6;
  const double direct = integrate_window(model, c.events, opts).value;
  CHECK(ll.expected_count(e) == doctest::Approx(direct).epsilon(1e-3));
  double pixels = 0.0;
  for (double v : integrate_pixels(model, PixelGrid(c.window, 4, 4), c.events, opts)) pixels += v;
  CHECK(ll.expected_count(e) == doctest::Approx(pixels).epsilon(1e-3));
}

TEST_CASE("invalid parameters are rejected") {
  const Catalog c = simulated(truth(), 50, 5);
  EtasParams bad = truth();
  bad.p = 0.9;
  CHECK_THROWS_AS(log_likelihood(bad, c), ParameterError);
  bad = truth();
  bad.mu = -1.0;
  CHECK_THROWS_AS(log_likelihood(bad, c), ParameterError);
  ParamBounds bounds;
  CHECK(bounds.contains(truth()));
  bad = truth();
  bad.q = 3.5;
  CHECK_FALSE(bounds.contains(bad));
}

TEST_CASE("generating parameters beat random perturbations") {
  // Median over catalogs of the count of perturbations beaten, out of 20.
  const EtasParams e = truth(0.6);
  std::vector<int> beaten(12);
  parallel_for(beaten.size(), [&](std::size_t k) {
    const Catalog c = simulated(e, 434, derive_seed(90, {k}));
    const EtasLikelihood ll(c);
    const double at_truth = ll(e);
    Rng rng(derive_seed(91, {k}));
    for (int j = 0; j < 20; ++j)
      if (at_truth > ll(perturbed(e, rng))) ++beaten[k];
  });
  std::sort(beaten.begin(), beaten.end());
  CHECK((beaten[5] + beaten[6]) / 2.0 >= 18);
}

TEST_CASE("fit respects bounds, ascends, and dominates its trace") {
  const EtasParams e = truth();
  const Catalog c = simulated(e, 150, 6);
  FitOptions opts;
  opts.starts = 2;
  opts.trace = true;
  opts.seed = 3;
  const FitResult fit = fit_mle(c, e, opts);
  CHECK(fit.converged);
  CHECK(opts.bounds.contains(fit.params));
  CHECK(fit.params.mu > 0);
  CHECK(fit.params.K > 0);
  CHECK(fit.params.M0 == e.M0);
  CHECK(fit.loglik == doctest::Approx(log_likelihood(fit.params, c)).epsilon(1e-12));
  REQUIRE_FALSE(fit.trace.empty());
  std::vector<double> best(opts.starts, -std::numeric_limits<double>::infinity());
  for (const TracePoint& tp : fit.trace) {
    CHECK(tp.loglik >= best[tp.start]);
    best[tp.start] = tp.loglik;
    CHECK(fit.loglik >= tp.loglik);
  }
  CHECK(fit.loglik >= log_likelihood(e, c) - 1e-9);

  // Refitting from the optimum stays there.
  FitOptions again = opts;
  again.starts = 1;
  again.trace = false;
  const FitResult refit = fit_mle(c, fit.params, again);
  CHECK(refit.loglik == doctest::Approx(fit.loglik).epsilon(1e-6));
  CHECK(refit.loglik >= fit.loglik - 1e-6);
  CHECK(refit.params.mu == doctest::Approx(fit.params.mu).epsilon(1e-2));
  CHECK(refit.params.p == doctest::Approx(fit.params.p).epsilon(1e-2));
}

TEST_CASE("fit of a Poisson catalog drives K to zero") {
  EtasParams e{0.8, 0.0, 0.01, 1.2, 1.5, 3.0, 1e-5, 1.6};
  const Catalog c = simulated(e, 300, 8);
  const double n = static_cast<double>(c.size());
  EtasParams init = truth();
  FitOptions opts;
  opts.starts = 2;
  const FitResult fit = fit_mle(c, init, opts);
  CHECK(std::abs(fit.params.mu - n / 300) <= 3 * std::sqrt(n) / 300);
  // Triggering explains only a sliver of the expected count.
  const EtasLikelihood ll(c);
  CHECK((ll.expected_count(fit.params) - fit.params.mu * 300) / n < 0.05);
}

TEST_CASE("fit reports failure when the evaluation budget is too small") {
  const Catalog c = simulated(truth(), 100, 9);
  FitOptions opts;
  opts.starts = 2;
  opts.max_evaluations = 20;
  const FitResult fit = fit_mle(c, truth(), opts);
  CHECK_FALSE(fit.converged);
  CHECK(std::isfinite(fit.loglik));
  CHECK(fit.evaluations <= 2 * (20 + 10));
}

TEST_CASE("parameter files round trip") {
  const EtasParams e = truth();
  std::stringstream s;
  write_etas_params(s, e, -123.25);
  CHECK(s.str().find("model = etas") != std::string::npos);
  CHECK(s.str().find("loglik = -123.25") != std::string::npos);
  CHECK(read_etas_params(s) == e);
  std::istringstream partial("mu = 1\n");
  CHECK_THROWS_AS(read_etas_params(partial), DataError);
}
