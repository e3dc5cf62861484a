#include "shockcast/dist.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace shockcast {

namespace {
constexpr double kLogTwo = 0.6931471805599453;
constexpr double kLogPi = 1.1447298858494002;
constexpr double kLogTwoPi = 1.8378770664093453;
}  // namespace

double normal_lpdf(double x, double mu, double sd) {
  double z = (x - mu) / sd;
  return -0.5 * kLogTwoPi - std::log(sd) - 0.5 * z * z;
}

double half_normal_lpdf(double x, double sd) {
  if (x < 0.0) return -std::numeric_limits<double>::infinity();
  return kLogTwo + normal_lpdf(x, 0.0, sd);
}

double half_cauchy_lpdf(double x, double scale) {
  if (x <= 0.0) return -std::numeric_limits<double>::infinity();
  double z = x / scale;
  return kLogTwo - kLogPi - std::log(scale) - std::log1p(z * z);
}

double inv_gamma_lpdf(double x, double shape, double rate) {
  if (x <= 0.0) return -std::numeric_limits<double>::infinity();
  return shape * std::log(rate) - std::lgamma(shape) - (shape + 1.0) * std::log(x) - rate / x;
}

double student_t_lpdf(double x, double nu, double scale) {
  double z = x / scale;
  return std::lgamma(0.5 * (nu + 1.0)) - std::lgamma(0.5 * nu) - 0.5 * std::log(nu) -
         0.5 * kLogPi - std::log(scale) - 0.5 * (nu + 1.0) * std::log1p(z * z / nu);
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double normal_quantile(double p) {
  // Wichura (1988), algorithm AS 241, PPND16.
  if (!(p > 0.0 && p < 1.0)) {
    throw std::invalid_argument("normal_quantile: p must lie in (0,1)");
  }
  double q = p - 0.5;
  double r;
  if (std::abs(q) <= 0.425) {
    r = 0.180625 - q * q;
    return q *
           (((((((2.5090809287301226727e3 * r + 3.3430575583588128105e4) * r +
                 6.7265770927008700853e4) * r + 4.5921953931549871457e4) * r +
               1.3731693765509461125e4) * r + 1.9715909503065514427e3) * r +
             1.3314166789178437745e2) * r + 3.3871328727963666080e0) /
           (((((((5.2264952788528545610e3 * r + 2.8729085735721942674e4) * r +
                 3.9307895800092710610e4) * r + 2.1213794301586595867e4) * r +
               5.3941960214247511077e3) * r + 6.8718700749205790830e2) * r +
             4.2313330701600911252e1) * r + 1.0);
  }
  r = (q < 0.0) ? p : 1.0 - p;
  r = std::sqrt(-std::log(r));
  double v;
  if (r <= 5.0) {
    r -= 1.6;
    v = (((((((7.74545014278341407640e-4 * r + 2.27238449892691845833e-2) * r +
              2.41780725177450611770e-1) * r + 1.27045825245236838258e0) * r +
            3.64784832476320460504e0) * r + 5.76949722146069140550e0) * r +
          4.63033784615654529590e0) * r + 1.42343711074968357734e0) /
        (((((((1.05075007164441684324e-9 * r + 5.47593808499534494600e-4) * r +
              1.51986665636164571966e-2) * r + 1.48103976427480074590e-1) * r +
            6.89767334985100004550e-1) * r + 1.67638483018380384940e0) * r +
          2.05319162663775882187e0) * r + 1.0);
  } else {
    r -= 5.0;
    v = (((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r +
              1.24266094738807843860e-3) * r + 2.65321895265761230930e-2) * r +
            2.96560571828504891230e-1) * r + 1.78482653991729133580e0) * r +
          5.46378491116411436990e0) * r + 6.65790464350110377720e0) /
        (((((((2.04426310338993978564e-15 * r + 1.42151175831644588870e-7) * r +
              1.84631831751005468180e-5) * r + 7.86869131145613259100e-4) * r +
            1.48753612908506148525e-2) * r + 1.36929880922735805310e-1) * r +
          5.99832206555887937690e-1) * r + 1.0);
  }
  return (q < 0.0) ? -v : v;
}

namespace {

double simpson(double a, double fa, double b, double fb, double fm) {
  return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

double adaptive_step(const std::function<double(double)>& f, double a, double fa, double b,
                     double fb, double m, double fm, double whole, double tol, int depth) {
  double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  double flm = f(lm), frm = f(rm);
  double left = simpson(a, fa, m, fm, flm);
  double right = simpson(m, fm, b, fb, frm);
  if (depth <= 0 || std::abs(left + right - whole) <= 15.0 * tol) {
    return left + right + (left + right - whole) / 15.0;
  }
  return adaptive_step(f, a, fa, m, fm, lm, flm, left, 0.5 * tol, depth - 1) +
         adaptive_step(f, m, fm, b, fb, rm, frm, right, 0.5 * tol, depth - 1);
}

}  // namespace

double integrate(const std::function<double(double)>& f, double a, double b, double tol) {
  if (a == b) return 0.0;
  double m = 0.5 * (a + b);
  double fa = f(a), fb = f(b), fm = f(m);
  double whole = simpson(a, fa, b, fb, fm);
  return adaptive_step(f, a, fa, b, fb, m, fm, whole, tol, 48);
}

double student_t_tail(double z, double nu) {
  if (nu <= 0.0) throw std::invalid_argument("student_t_tail: nu must be positive");
  if (std::isnan(z)) return std::numeric_limits<double>::quiet_NaN();
  if (z < 0.0) return 1.0 - student_t_tail(-z, nu);

  auto pdf = [nu](double x) { return std::exp(student_t_lpdf(x, nu, 1.0)); };
  if (z <= 1.5) {
    return 0.5 - integrate(pdf, 0.0, z, 1e-12);
  }
  // Far tail: substitute x = z/u, u in (0, 1]; integrand vanishes as u -> 0.
  auto g = [&](double u) {
    if (u <= 0.0) return 0.0;
    return pdf(z / u) * z / (u * u);
  };
  return integrate(g, 0.0, 1.0, 1e-12);
}

double student_t_upper_quantile(double p, double nu) {
  if (!(p > 0.0 && p <= 0.5)) {
    throw std::invalid_argument("student_t_upper_quantile: p must lie in (0, 0.5]");
  }
  double lo = 0.0, hi = 1.0;
  while (student_t_tail(hi, nu) > p) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e12) throw std::runtime_error("student_t_upper_quantile: bracket failure");
  }
  for (int i = 0; i < 200; ++i) {
    double mid = 0.5 * (lo + hi);
    if (hi - lo < 1e-13 * std::max(1.0, hi)) return mid;
    if (student_t_tail(mid, nu) > p) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace shockcast
