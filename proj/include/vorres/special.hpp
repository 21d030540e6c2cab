#pragma once

namespace vorres {

// Regularized lower / upper incomplete gamma functions P(a, x), Q(a, x).
double gamma_p(double a, double x);
double gamma_q(double a, double x);

double gamma_cdf(double x, double shape, double rate);
double gamma_quantile(double p, double shape, double rate);

// P(N <= k) for N ~ Poisson(mean); 0 for k < 0.
double poisson_cdf(long k, double mean);

double normal_cdf(double z);
double normal_quantile(double p);

}  // namespace vorres
