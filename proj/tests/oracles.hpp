#pragma once

// Test-only oracles, deliberately independent of the library code paths they
// check: a direct compound Poisson-gamma density by convolution summation,
// adaptive Simpson quadrature, brute-force 1-d minimization, and an
// explicit-regression R^2.

#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

namespace oracles {

// Density of sum_{i=1..N} G_i, N ~ Poisson(lambda), G_i ~ Gamma(alpha, scale),
// truncated at n_max Poisson terms. f(y) = sum_n P(N=n) GammaPdf(y; n*alpha).
inline double compound_poisson_gamma_density(double y, double mu, double p,
                                             double phi, int n_max = 50) {
  const double lambda = std::pow(mu, 2.0 - p) / (phi * (2.0 - p));
  const double alpha = (2.0 - p) / (p - 1.0);
  const double scale = phi * (p - 1.0) * std::pow(mu, p - 1.0);
  double f = 0.0;
  for (int n = 1; n <= n_max; ++n) {
    const double shape = alpha * n;
    const double log_pois = -lambda + n * std::log(lambda) - std::lgamma(n + 1.0);
    const double log_gamma_pdf = (shape - 1.0) * std::log(y) - y / scale -
                                 std::lgamma(shape) - shape * std::log(scale);
    f += std::exp(log_pois + log_gamma_pdf);
  }
  return f;
}

inline double adaptive_simpson_rec(const std::function<double(double)>& f,
                                   double a, double b, double fa, double fm,
                                   double fb, double whole, double tol,
                                   int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  if (depth <= 0 || std::abs(left + right - whole) < 15.0 * tol)
    return left + right + (left + right - whole) / 15.0;
  return adaptive_simpson_rec(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1) +
         adaptive_simpson_rec(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1);
}

inline double adaptive_simpson(const std::function<double(double)>& f,
                               double a, double b, double tol = 1e-9,
                               int depth = 48) {
  const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return adaptive_simpson_rec(f, a, b, fa, fm, fb, whole, tol, depth);
}

// Integral of the positive part of a density given as exp(log_density(y)),
// integrated in s = log y to tame the y -> 0 endpoint.
inline double integrate_positive_part(
    const std::function<double(double)>& log_density_at, double mu,
    double tol = 1e-8) {
  const auto integrand = [&](double s) {
    const double y = std::exp(s);
    const double ld = log_density_at(y);
    return std::isfinite(ld) ? std::exp(ld + s) : 0.0;
  };
  const double lo = std::log(mu) - 60.0;
  const double hi = std::log(mu) + 12.0;  // e^12 mu covers any relevant tail
  // Split at the mean to help the sampler; the integrand is smooth in s.
  return adaptive_simpson(integrand, lo, std::log(mu), tol / 2.0) +
         adaptive_simpson(integrand, std::log(mu), hi, tol / 2.0);
}

// Golden-section minimizer for smooth unimodal functions.
inline double golden_minimize(const std::function<double(double)>& f, double a,
                              double b, double tol = 1e-10) {
  const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
  double c = b - gr * (b - a), d = a + gr * (b - a);
  double fc = f(c), fd = f(d);
  while (b - a > tol) {
    if (fc < fd) {
      b = d; d = c; fd = fc;
      c = b - gr * (b - a); fc = f(c);
    } else {
      a = c; c = d; fc = fd;
      d = a + gr * (b - a); fd = f(d);
    }
  }
  return 0.5 * (a + b);
}

}  // namespace oracles
