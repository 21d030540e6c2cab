#include "vorres/etas_fit.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>

#include "vorres/config.hpp"
#include "vorres/parallel.hpp"
#include "vorres/rng.hpp"
#include "vorres/special.hpp"
#include "vorres/text.hpp"

namespace vorres {

bool ParamBounds::contains(const EtasParams& e) const {
  return e.mu > 0.0 && e.K > 0.0 && e.p >= p_lo && e.p <= p_hi && e.q >= q_lo && e.q <= q_hi &&
         e.c >= c_lo && e.c <= c_hi && e.d >= d_lo && e.d <= d_hi && e.a >= a_lo && e.a <= a_hi;
}

EtasLikelihood::EtasLikelihood(const Catalog& catalog, double kernel_tol)
    : catalog_(catalog), kernel_tol_(kernel_tol) {
  catalog_.validate();
  const std::size_t n = catalog_.size();
  t_.reserve(n);
  mag_.reserve(n);
  row_start_.resize(n + 1, 0);
  for (std::size_t i = 0; i < n; ++i) {
    t_.push_back(catalog_.events[i].t);
    mag_.push_back(catalog_.events[i].mag.value_or(std::numeric_limits<double>::quiet_NaN()));
    row_start_[i + 1] = row_start_[i] + i;
  }
  dt_.reserve(row_start_[n]);
  r2_.reserve(row_start_[n]);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      dt_.push_back(t_[i] - t_[j]);
      r2_.push_back(squared_distance(catalog_.events[i].location(), catalog_.events[j].location()));
    }
  }
}

namespace {

std::vector<double> productivities(std::span<const double> mag, const EtasParams& e) {
  std::vector<double> w(mag.size());
  for (std::size_t j = 0; j < mag.size(); ++j)
    w[j] = std::isnan(mag[j]) ? 1.0 : std::exp(e.a * (mag[j] - e.M0));
  return w;
}

}  // namespace

double EtasLikelihood::expected_count(const EtasParams& e) const {
  validate(e);
  const auto w = productivities(mag_, e);
  const auto corners = catalog_.window.corners();
  double triggered = 0.0;
  for (std::size_t j = 0; j < t_.size(); ++j) {
    const double tm = time_mass(t_[j], catalog_.span, e.c, e.p);
    if (tm == 0.0) continue;
    triggered += w[j] * tm *
                 kernel_mass(corners, catalog_.events[j].location(), e.d, e.q, kernel_tol_);
  }
  return e.mu * catalog_.span.duration() + e.K * triggered;
}

double EtasLikelihood::operator()(const EtasParams& e) const {
  const double compensator = expected_count(e);
  const auto w = productivities(mag_, e);
  const double background = e.mu / catalog_.window.area();
  double sum = 0.0;
  for (std::size_t i = 0; i < t_.size(); ++i) {
    const double* dt = dt_.data() + row_start_[i];
    const double* r2 = r2_.data() + row_start_[i];
    double s = 0.0;
    for (std::size_t j = 0; j < i; ++j)
      s += w[j] * std::exp(-e.p * std::log(dt[j] + e.c) - e.q * std::log(r2[j] + e.d));
    const double lambda = background + e.K * s;
    if (!(lambda > 0.0)) return -std::numeric_limits<double>::infinity();
    sum += std::log(lambda);
  }
  return sum - compensator;
}

double log_likelihood(const EtasParams& params, const Catalog& catalog) {
  return EtasLikelihood(catalog)(params);
}

namespace {

constexpr std::size_t kDim = 7;
using Vec = std::array<double, kDim>;

double logit(double u) { return std::log(u / (1.0 - u)); }
double logistic(double x) { return 1.0 / (1.0 + std::exp(-x)); }

// Maps a value inside (lo, hi) to the real line and back.
double to_unbounded(double v, double lo, double hi) {
  const double u = std::clamp((v - lo) / (hi - lo), 1e-12, 1.0 - 1e-12);
  return logit(u);
}
double from_unbounded(double x, double lo, double hi) { return lo + (hi - lo) * logistic(x); }

Vec encode(const EtasParams& e, const ParamBounds& b) {
  return {std::log(std::max(e.mu, 1e-300)),
          std::log(std::max(e.K, 1e-8)),
          to_unbounded(std::log(e.c), std::log(b.c_lo), std::log(b.c_hi)),
          to_unbounded(e.p, b.p_lo, b.p_hi),
          to_unbounded(e.a, b.a_lo, b.a_hi),
          to_unbounded(std::log(e.d), std::log(b.d_lo), std::log(b.d_hi)),
          to_unbounded(e.q, b.q_lo, b.q_hi)};
}

EtasParams decode(const Vec& x, const ParamBounds& b, double M0) {
  EtasParams e;
  e.mu = std::exp(std::clamp(x[0], -700.0, 700.0));
  e.K = std::exp(std::clamp(x[1], -700.0, 700.0));
  e.c = std::exp(from_unbounded(x[2], std::log(b.c_lo), std::log(b.c_hi)));
  e.p = from_unbounded(x[3], b.p_lo, b.p_hi);
  e.a = from_unbounded(x[4], b.a_lo, b.a_hi);
  e.M0 = M0;
  e.d = std::exp(from_unbounded(x[5], std::log(b.d_lo), std::log(b.d_hi)));
  e.q = from_unbounded(x[6], b.q_lo, b.q_hi);
  return e;
}

struct StartOutcome {
  Vec best{};
  double loglik = -std::numeric_limits<double>::infinity();
  int iterations = 0;
  int evaluations = 0;
  bool converged = false;
  std::vector<TracePoint> trace;
};

StartOutcome nelder_mead(const EtasLikelihood& like, const Vec& x0, double M0,
                         const FitOptions& opt, int start) {
  StartOutcome out;
  auto objective = [&](const Vec& x) {
    ++out.evaluations;
    const double ll = like(decode(x, opt.bounds, M0));
    return std::isfinite(ll) ? -ll : std::numeric_limits<double>::max();
  };

  std::array<Vec, kDim + 1> v;
  std::array<double, kDim + 1> f;
  v[0] = x0;
  for (std::size_t i = 0; i < kDim; ++i) {
    v[i + 1] = x0;
    v[i + 1][i] += 0.5;
  }
  for (std::size_t i = 0; i <= kDim; ++i) f[i] = objective(v[i]);

  std::array<std::size_t, kDim + 1> order;
  auto sort_simplex = [&] {
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return f[a] < f[b]; });
    auto v2 = v;
    auto f2 = f;
    for (std::size_t i = 0; i <= kDim; ++i) {
      v[i] = v2[order[i]];
      f[i] = f2[order[i]];
    }
  };
  auto combine = [](const Vec& a, const Vec& b, double t) {  // a + t (b - a)
    Vec r;
    for (std::size_t k = 0; k < kDim; ++k) r[k] = a[k] + t * (b[k] - a[k]);
    return r;
  };

  sort_simplex();
  while (out.evaluations < opt.max_evaluations) {
    double x_spread = 0.0;
    for (std::size_t i = 1; i <= kDim; ++i)
      for (std::size_t k = 0; k < kDim; ++k)
        x_spread = std::max(x_spread, std::abs(v[i][k] - v[0][k]) / std::max(1.0, std::abs(v[0][k])));
    if (f[kDim] - f[0] < opt.ftol && x_spread < opt.xtol) {
      out.converged = true;
      break;
    }
    ++out.iterations;

    Vec centroid{};
    for (std::size_t i = 0; i < kDim; ++i)
      for (std::size_t k = 0; k < kDim; ++k) centroid[k] += v[i][k] / kDim;

    const Vec xr = combine(centroid, v[kDim], -1.0);
    const double fr = objective(xr);
    if (fr < f[0]) {
      const Vec xe = combine(centroid, v[kDim], -2.0);
      const double fe = objective(xe);
      if (fe < fr) v[kDim] = xe, f[kDim] = fe;
      else v[kDim] = xr, f[kDim] = fr;
    } else if (fr < f[kDim - 1]) {
      v[kDim] = xr, f[kDim] = fr;
    } else {
      const bool outside = fr < f[kDim];
      const Vec xc = outside ? combine(centroid, xr, 0.5) : combine(centroid, v[kDim], 0.5);
      const double fc = objective(xc);
      if (fc < (outside ? fr : f[kDim])) {
        v[kDim] = xc, f[kDim] = fc;
      } else {
        for (std::size_t i = 1; i <= kDim; ++i) {
          v[i] = combine(v[0], v[i], 0.5);
          f[i] = objective(v[i]);
        }
      }
    }
    sort_simplex();
    if (opt.trace) out.trace.push_back({decode(v[0], opt.bounds, M0), -f[0], start});
  }
  out.best = v[0];
  out.loglik = -f[0];
  return out;
}

}  // namespace

FitResult fit_mle(const Catalog& catalog, const EtasParams& init, const FitOptions& opt) {
  if (opt.starts < 1) throw DataError("fit needs at least one start");
  validate(init);
  const EtasLikelihood like(catalog);
  const Vec x0 = encode(init, opt.bounds);

  std::vector<StartOutcome> outcomes(static_cast<std::size_t>(opt.starts));
  parallel_for(outcomes.size(), [&](std::size_t s) {
    Vec x = x0;
    if (s > 0) {
      Rng rng(derive_seed(opt.seed, {stream::kStart, s}));
      for (double& xi : x) xi += normal_quantile(rng.uniform_open());
    }
    outcomes[s] = nelder_mead(like, x, init.M0, opt, static_cast<int>(s));
  });

  FitResult result;
  std::size_t best = 0;
  for (std::size_t s = 0; s < outcomes.size(); ++s) {
    if (outcomes[s].loglik > outcomes[best].loglik) best = s;
    result.evaluations += outcomes[s].evaluations;
    result.converged = result.converged || outcomes[s].converged;
    for (TracePoint& tp : outcomes[s].trace) result.trace.push_back(std::move(tp));
  }
  result.params = decode(outcomes[best].best, opt.bounds, init.M0);
  result.loglik = outcomes[best].loglik;
  result.iterations = outcomes[best].iterations;
  return result;
}

void write_etas_params(std::ostream& out, const EtasParams& e, std::optional<double> loglik) {
  Config cfg;
  cfg.set("model", std::string("etas"));
  cfg.set("mu", e.mu);
  cfg.set("K", e.K);
  cfg.set("c", e.c);
  cfg.set("p", e.p);
  cfg.set("a", e.a);
  cfg.set("M0", e.M0);
  cfg.set("d", e.d);
  cfg.set("q", e.q);
  if (loglik) cfg.set("loglik", *loglik);
  cfg.write(out);
}

void write_fit(std::ostream& out, const FitResult& fit) {
  write_etas_params(out, fit.params, fit.loglik);
  out << "converged = " << (fit.converged ? "true" : "false") << '\n'
      << "evaluations = " << fit.evaluations << '\n'
      << "iterations = " << fit.iterations << '\n';
}

EtasParams read_etas_params(std::istream& in) {
  const Config cfg = Config::parse(in, "ETAS parameters");
  EtasParams e;
  e.mu = cfg.get_double("mu");
  e.K = cfg.get_double("K");
  e.c = cfg.get_double("c");
  e.p = cfg.get_double("p");
  e.a = cfg.get_double("a");
  e.M0 = cfg.get_double("M0");
  e.d = cfg.get_double("d");
  e.q = cfg.get_double("q");
  validate(e);
  return e;
}

EtasParams read_etas_params(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  return read_etas_params(in);
}

}  // namespace vorres
