#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <vector>

#include "vorres/catalog.hpp"
#include "vorres/intensity.hpp"

namespace vorres {

// Open intervals for the fitted parameters. mu and K are only required to be
// positive.
struct ParamBounds {
  double p_lo = 1.001, p_hi = 3.0;
  double q_lo = 1.001, q_hi = 3.0;
  double c_lo = 1e-6, c_hi = 10.0;
  double d_lo = 1e-6, d_hi = 10.0;
  double a_lo = 0.01, a_hi = 5.0;

  bool contains(const EtasParams& params) const;
};

// Log-likelihood of one catalog under ETAS with uniform background. Pair
// offsets are computed once, so repeated evaluation costs O(n^2) arithmetic
// plus one angular quadrature per event and window edge.
class EtasLikelihood {
 public:
  explicit EtasLikelihood(const Catalog& catalog, double kernel_tol = 1e-6);

  // M0 is taken from `params`. Returns -inf when some event has zero
  // intensity; throws ParameterError for invalid parameters.
  double operator()(const EtasParams& params) const;

  // Expected number of events over window x span (the compensator).
  double expected_count(const EtasParams& params) const;

  std::size_t size() const { return t_.size(); }

 private:
  Catalog catalog_;
  double kernel_tol_;
  std::vector<double> t_, mag_;
  // Pairs (i, j < i) laid out row by row: row i starts at row_start_[i].
  std::vector<std::size_t> row_start_;
  std::vector<double> dt_, r2_;
  std::vector<std::uint32_t> src_;
};

double log_likelihood(const EtasParams& params, const Catalog& catalog);

struct FitOptions {
  int starts = 8;
  int max_evaluations = 5000;   // per start
  double ftol = 1e-6;           // loglik spread across the simplex
  double xtol = 1e-4;           // simplex spread in the transformed coordinates
  std::uint64_t seed = 1;
  bool trace = false;
  ParamBounds bounds;
};

struct TracePoint {
  EtasParams params;
  double loglik = 0.0;
  int start = 0;
};

struct FitResult {
  EtasParams params;
  double loglik = 0.0;
  int iterations = 0;
  int evaluations = 0;
  bool converged = false;
  std::vector<TracePoint> trace;
};

// Multi-start Nelder-Mead on transformed parameters (log for mu and K, logit
// of the bounded range for the rest; log scale inside the range for c and d).
// Start 0 is `init`; the others are random perturbations of it.
FitResult fit_mle(const Catalog& catalog, const EtasParams& init, const FitOptions& options = {});

// Flat key = value text: mu, K, c, p, a, M0, d, q and, when present, loglik.
void write_etas_params(std::ostream& out, const EtasParams& params,
                       std::optional<double> loglik = {});
void write_fit(std::ostream& out, const FitResult& fit);
EtasParams read_etas_params(std::istream& in);
EtasParams read_etas_params(const std::filesystem::path& path);

}  // namespace vorres
