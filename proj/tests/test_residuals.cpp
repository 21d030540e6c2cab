#include <doctest.h>

#include <boost/math/distributions/gamma.hpp>
#include <algorithm>
#include <cmath>
#include <sstream>

#include "vorres/residuals.hpp"
#include "vorres/rng.hpp"
#include "vorres/simulate.hpp"

using namespace vorres;

TEST_CASE("gamma reference constants") {
  CHECK(GammaReference::mean() == doctest::Approx(1.0));
  CHECK(GammaReference::variance() == doctest::Approx(0.2802).epsilon(1e-3));
  const boost::math::gamma_distribution<> g(3.569, 1.0 / 3.569);
  // Integral exactly one: raw 0, pit 1 - G(1).
  const double pit1 = 1.0 - boost::math::cdf(g, 1.0);
  CHECK(pit1 == doctest::Approx(0.42957005).epsilon(1e-7));
  CHECK(GammaReference::residual_cdf(0.0) == doctest::Approx(pit1).epsilon(1e-12));
  for (double p : {0.01, 0.2, 0.5, 0.9})
    CHECK(GammaReference::residual_cdf(GammaReference::residual_quantile(p)) ==
          doctest::Approx(p).epsilon(1e-10));
}

TEST_CASE("voronoi records satisfy the residual identity") {
  const std::vector<Point> pts{{0.25, 0.25}, {0.75, 0.25}, {0.25, 0.75}, {0.75, 0.75}};
  Catalog cat;
  for (Point p : pts) cat.events.push_back({0.0, p.x, p.y, std::nullopt});
  cat.sort_and_separate_ties();
  const auto d = tessellate(cat.points(), Window());
  const auto recs = voronoi_residuals(cat, IntensityModel::homogeneous(4.0, Window()), d);
  REQUIRE(recs.size() == 4);
  for (const auto& r : recs) {
    CHECK(r.count == 1);
    CHECK(r.integral == doctest::Approx(1.0));
    CHECK(r.raw == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(r.raw + r.integral == 1.0);
    CHECK(r.pit == doctest::Approx(0.42957005).epsilon(1e-7));
    CHECK(r.excluded);
    CHECK_FALSE(r.pearson.has_value());
  }
  Catalog short_cat = cat;
  short_cat.events.pop_back();
  CHECK_THROWS_AS(voronoi_residuals(short_cat, IntensityModel::homogeneous(4.0, Window()), d),
                  DataError);
}

TEST_CASE("voronoi pit increases with the raw residual") {
  Rng rng(3);
  Catalog cat;
  for (int i = 0; i < 400; ++i) cat.events.push_back({0.0, rng.uniform(), rng.uniform(), std::nullopt});
  cat.sort_and_separate_ties();
  const auto d = tessellate(cat.points(), Window());
  auto recs = voronoi_residuals(cat, IntensityModel::beta_family(3.0, Window()), d);
  std::sort(recs.begin(), recs.end(), [](const auto& a, const auto& b) { return a.raw < b.raw; });
  for (std::size_t i = 1; i < recs.size(); ++i) CHECK(recs[i].pit >= recs[i - 1].pit);
}

TEST_CASE("pixel residuals and the Pearson pathology") {
  const PixelGrid grid(Window(), 2, 1);
  const std::vector<double> integrals{0.01, 0.01};
  const std::vector<Point> pts{{0.2, 0.5}};
  const auto recs = pixel_residuals(pts, grid, integrals, 1);
  CHECK(recs[0].count == 1);
  CHECK(recs[0].raw == doctest::Approx(0.99).epsilon(1e-14));
  CHECK(*recs[0].pearson == doctest::Approx(9.90).epsilon(1e-14));
  CHECK(recs[1].raw == doctest::Approx(-0.01).epsilon(1e-14));
  CHECK(*recs[1].pearson == doctest::Approx(-0.1).epsilon(1e-14));

  const std::vector<double> four{4.0, 0.0};
  const std::vector<Point> four_pts{{0.1, 0.1}, {0.2, 0.2}, {0.3, 0.3}, {0.4, 0.4}};
  const auto r4 = pixel_residuals(four_pts, grid, four, 1);
  CHECK(r4[0].raw == 0.0);
  CHECK(*r4[0].pearson == 0.0);
  CHECK_FALSE(r4[1].pearson.has_value());
  CHECK_THROWS_AS(pixel_residuals(pts, grid, std::vector<double>{1.0}, 1), DataError);
}

TEST_CASE("randomized PIT") {
  CHECK(randomized_pit(0, 1.0, 0.5) == doctest::Approx(0.18394).epsilon(1e-5));
  CHECK(randomized_pit(1, 1.0, 0.0) == doctest::Approx(0.36788).epsilon(1e-5));
  for (double mean : {0.01, 1.0, 30.0}) CHECK(randomized_pit(0, mean, 0.0) == 0.0);
  CHECK_THROWS_AS(randomized_pit(-1, 1.0, 0.5), DataError);
  // Nondecreasing in v and in count.
  for (long k = 0; k < 10; ++k) {
    double prev = -1.0;
    for (double v = 0.0; v <= 1.0; v += 0.1) {
      const double u = randomized_pit(k, 3.0, v);
      CHECK(u >= prev);
      prev = u;
    }
    CHECK(randomized_pit(k + 1, 3.0, 0.0) >= randomized_pit(k, 3.0, 1.0) - 1e-15);
  }
}

TEST_CASE("color scale") {
  CHECK(residual_color_scale(0.5) == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(residual_color_scale(0.975) == doctest::Approx(1.959964).epsilon(1e-6));
  CHECK(residual_color_scale(0.025) == doctest::Approx(-1.959964).epsilon(1e-6));
  CHECK(std::isfinite(residual_color_scale(0.0)));
  CHECK(std::isfinite(residual_color_scale(1.0)));
}

TEST_CASE("excluded records never reach the PIT sample") {
  std::vector<ResidualRecord> recs(5);
  for (std::size_t i = 0; i < recs.size(); ++i) {
    recs[i].pit = 0.1 * i;
    recs[i].excluded = i % 2 == 0;
  }
  const auto u = included_pits(recs);
  REQUIRE(u.size() == 2);
  CHECK(u[0] == doctest::Approx(0.1));
  CHECK(u[1] == doctest::Approx(0.3));
}

TEST_CASE("residual CSV round trip") {
  std::vector<ResidualRecord> recs(2);
  recs[0] = {0, RegionKind::voronoi, 1, 0.7, 0.3, std::nullopt, 0.61, true};
  recs[1] = {1, RegionKind::pixel, 3, 1.0 / 3, 3 - 1.0 / 3, 4.6188, 0.99, false};
  std::stringstream s;
  write_residuals_csv(s, recs);
  CHECK(s.str().rfind("region_id,kind,count,integral,raw,pearson,pit,excluded\n", 0) == 0);
  const auto back = read_residuals_csv(s);
  REQUIRE(back.size() == 2);
  CHECK(back[0].excluded);
  CHECK_FALSE(back[0].pearson.has_value());
  CHECK(back[1].integral == 1.0 / 3);
  CHECK(*back[1].pearson == 4.6188);
  CHECK(back[1].kind == RegionKind::pixel);
}

TEST_CASE("homogeneous residuals center on the reference law") {
  const Window outer = Window().expanded(0.25);
  const auto model = IntensityModel::homogeneous(500, outer);
  std::vector<double> raw;
  for (std::uint64_t r = 0; r < 200; ++r) {
    const auto s = buffered_sample(model, Window(), 0.25, derive_seed(31, {r}));
    const auto d = tessellate(s.catalog.points(), outer);
    for (const auto& rec : voronoi_residuals(s.catalog, model, d, s.core)) {
      REQUIRE_FALSE(rec.excluded);
      raw.push_back(rec.raw);
    }
  }
  double sum = 0.0, sq = 0.0;
  for (double v : raw) sum += v, sq += v * v;
  const double mean = sum / raw.size(), var = sq / raw.size() - mean * mean;
  CHECK(std::abs(mean) <= 0.01);
  CHECK(std::abs(var - 0.28) <= 0.03);

  // First 5000 pooled cells against the reference residual law.
  REQUIRE(raw.size() >= 5000);
  std::vector<double> head(raw.begin(), raw.begin() + 5000);
  std::sort(head.begin(), head.end());
  double ks = 0.0;
  for (std::size_t i = 0; i < head.size(); ++i) {
    const double f = GammaReference::residual_cdf(head[i]);
    ks = std::max({ks, (i + 1.0) / head.size() - f, f - static_cast<double>(i) / head.size()});
  }
  CHECK(ks <= 0.02);
}

TEST_CASE("quantile plot envelopes") {
  std::vector<std::vector<double>> sims;
  Rng rng(2);
  for (int s = 0; s < 199; ++s) {
    std::vector<double> v(100);
    for (double& x : v) x = GammaReference::residual_quantile(rng.uniform_open());
    sims.push_back(v);
  }
  std::vector<double> obs(100);
  for (double& x : obs) x = GammaReference::residual_quantile(rng.uniform_open());
  const auto plot = quantile_plot(obs, sims);
  CHECK(plot.reference.size() == 100);
  for (std::size_t i = 0; i < 100; ++i) CHECK(plot.lower[i] <= plot.upper[i]);
  CHECK(plot.fraction_inside() >= 0.8);
  std::vector<double> shifted = obs;
  for (double& x : shifted) x += 1.0;
  CHECK(quantile_plot(shifted, sims).fraction_inside() < 0.2);
}

TEST_CASE("type-7 quantiles") {
  const std::vector<double> v{1, 2, 3, 4};
  CHECK(sample_quantile(v, 0.0) == 1.0);
  CHECK(sample_quantile(v, 1.0) == 4.0);
  CHECK(sample_quantile(v, 0.5) == 2.5);
  CHECK(sample_quantile(v, 1.0 / 3) == doctest::Approx(2.0));
}

TEST_CASE("a 0.25 buffer matches a wide-buffer reference for the beta family") {
  auto mean_raw = [](double margin, bool interior_only) {
    const Window outer = Window().expanded(margin);
    const auto model = IntensityModel::beta_family(4.0, outer);
    double sum = 0.0;
    std::size_t n = 0;
    for (std::uint64_t r = 0; r < 60; ++r) {
      const auto s = buffered_sample(model, Window(), margin, derive_seed(41, {r}));
      const auto d = tessellate(s.catalog.points(), outer);
      for (const auto& rec : voronoi_residuals(s.catalog, model, d, s.core))
        if (!interior_only || !rec.excluded) sum += rec.raw, ++n;
    }
    return sum / n;
  };
  const double reference = mean_raw(1.0, false);
  CHECK(std::abs(reference) < 0.02);
  CHECK(std::abs(mean_raw(0.25, false) - reference) < 0.01);
  // Without a buffer the surviving interior cells are too small.
  CHECK(mean_raw(0.0, true) - reference > 0.01);
}
