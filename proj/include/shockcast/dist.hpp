#pragma once

#include <functional>

namespace shockcast {

// Log densities. sd/scale parameters are standard deviations or scales,
// never variances, unless the name says so.
double normal_lpdf(double x, double mu, double sd);
double half_normal_lpdf(double x, double sd);      // support x >= 0
double half_cauchy_lpdf(double x, double scale);   // support x > 0
double inv_gamma_lpdf(double x, double shape, double rate);
double student_t_lpdf(double x, double nu, double scale);

double normal_cdf(double x);
// Inverse standard normal CDF (Wichura's AS 241, double precision).
double normal_quantile(double p);

// Adaptive Simpson quadrature of f over [a, b] to absolute tolerance tol.
double integrate(const std::function<double(double)>& f, double a, double b, double tol = 1e-10);

// P(T > z) for a standard Student-t with nu degrees of freedom, computed by
// adaptive quadrature of the density (absolute accuracy ~1e-10).
double student_t_tail(double z, double nu);

// Upper-tail quantile: z with P(T > z) = p, p in (0, 0.5].
double student_t_upper_quantile(double p, double nu);

}  // namespace shockcast
