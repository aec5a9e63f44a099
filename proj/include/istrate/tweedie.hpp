#pragma once

// Tweedie compound Poisson-gamma distribution on the power range 1 < p < 2:
// point mass at zero, log density via series evaluation of the normalizer,
// unit deviance and its gradient in the log-link linear predictor. These are
// the primitives every model in the library fits against.
//
// Parameterization: variance V(mu) = phi * mu^p. Equivalently the sum of
// N ~ Poisson(lambda) gamma variates with shape alpha and scale gam, where
//   lambda = mu^(2-p) / (phi * (2-p))
//   alpha  = (2-p) / (p-1)
//   gam    = phi * (p-1) * mu^(p-1)

#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include "istrate/common.hpp"

namespace istrate::tweedie {

struct TweedieParams {
  double p = 1.5;    // power index, open interval (1, 2)
  double phi = 1.0;  // dispersion, > 0

  void validate() const {
    if (!(p > 1.0 && p < 2.0))
      throw DataError("tweedie power index must lie in (1, 2), got " +
                      std::to_string(p));
    if (!(phi > 0.0) || !std::isfinite(phi))
      throw DataError("tweedie dispersion must be positive, got " +
                      std::to_string(phi));
  }
};

// Linear predictors are clamped to +-ETA_CLAMP before exponentiation;
// exp(2 * 30) is still comfortably inside double range.
inline constexpr double kEtaClamp = 30.0;

struct ClampStats {
  long clamped = 0;
};

inline double clamp_eta(double eta, ClampStats* stats = nullptr) {
  if (eta > kEtaClamp || eta < -kEtaClamp) {
    if (stats) ++stats->clamped;
    return eta > 0 ? kEtaClamp : -kEtaClamp;
  }
  return eta;
}

// P(Y = 0) = exp(-mu^(2-p) / (phi (2-p))), the Poisson zero event.
inline double zero_mass(double mu, const TweedieParams& params) {
  params.validate();
  if (!(mu > 0.0) || !std::isfinite(mu))
    throw DataError("zero_mass requires mu > 0, got " + std::to_string(mu));
  const double lambda =
      std::pow(mu, 2.0 - params.p) / (params.phi * (2.0 - params.p));
  return std::exp(-lambda);
}

// Unit deviance d(y, mu) = 2 [ y^(2-p)/((1-p)(2-p)) - y mu^(1-p)/(1-p)
//                              + mu^(2-p)/(2-p) ],  y >= 0, mu > 0.
// Nonnegative, zero iff y == mu.
inline double unit_deviance(double y, double mu, double p) {
  if (!(p > 1.0 && p < 2.0))
    throw DataError("unit_deviance requires 1 < p < 2");
  if (y < 0.0 || !std::isfinite(y))
    throw DataError("unit_deviance requires y >= 0");
  if (!(mu > 0.0) || !std::isfinite(mu))
    throw DataError("unit_deviance requires mu > 0");
  const double p1 = 1.0 - p;  // negative
  const double p2 = 2.0 - p;  // positive
  const double ty = y > 0.0 ? std::pow(y, p2) / (p1 * p2) : 0.0;
  const double cross = y > 0.0 ? y * std::pow(mu, p1) / p1 : 0.0;
  return 2.0 * (ty - cross + std::pow(mu, p2) / p2);
}

// Negative gradient of (1/2) d(y, exp(eta)) with respect to eta:
//   r = y e^((1-p) eta) - e^((2-p) eta).
// Zero at y = exp(eta), sign of (y - exp(eta)).
inline double pseudo_residual(double y, double eta, double p,
                              ClampStats* stats = nullptr) {
  if (!(p > 1.0 && p < 2.0))
    throw DataError("pseudo_residual requires 1 < p < 2");
  const double e = clamp_eta(eta, stats);
  return y * std::exp((1.0 - p) * e) - std::exp((2.0 - p) * e);
}

namespace detail {

// log of the series normalizer W(y, phi, p) = sum_{j>=1} w_j with
//   log w_j = j * logz - lgamma(1 + j) - lgamma(alpha * j),
//   logz    = alpha log y - alpha log(p-1) - (1/(p-1)) log phi - log(2-p).
// The terms are unimodal in j with the mode near jmax = y^(2-p)/(phi (2-p)).
// We locate the dominant index and sum outward in both directions until the
// terms fall below 1e-12 of the running maximum.
inline double log_series_normalizer(double y, const TweedieParams& params) {
  const double p = params.p;
  const double phi = params.phi;
  const double alpha = (2.0 - p) / (p - 1.0);
  const double logz = alpha * std::log(y) - alpha * std::log(p - 1.0) -
                      (1.0 / (p - 1.0)) * std::log(phi) - std::log(2.0 - p);
  const auto log_term = [&](double j) {
    return j * logz - std::lgamma(1.0 + j) - std::lgamma(alpha * j);
  };

  const double jmax =
      std::max(1.0, std::pow(y, 2.0 - p) / (phi * (2.0 - p)));
  const long j0 = std::max<long>(1, static_cast<long>(std::floor(jmax)));

  constexpr double kRelDrop = -27.631021115928547;  // ln(1e-12)
  constexpr long kMaxTerms = 200000;

  double max_lw = log_term(static_cast<double>(j0));
  std::vector<double> lws;
  lws.reserve(64);
  lws.push_back(max_lw);

  long terms = 1;
  for (long j = j0 + 1;; ++j) {
    const double lw = log_term(static_cast<double>(j));
    lws.push_back(lw);
    max_lw = std::max(max_lw, lw);
    if (lw - max_lw < kRelDrop) break;
    if (++terms > kMaxTerms)
      throw FitError("tweedie series did not converge within " +
                     std::to_string(kMaxTerms) + " terms (y=" +
                     std::to_string(y) + ", phi=" + std::to_string(phi) +
                     ", p=" + std::to_string(p) + ")");
  }
  for (long j = j0 - 1; j >= 1; --j) {
    const double lw = log_term(static_cast<double>(j));
    lws.push_back(lw);
    max_lw = std::max(max_lw, lw);
    if (lw - max_lw < kRelDrop) break;
    if (++terms > kMaxTerms)
      throw FitError("tweedie series did not converge (left tail)");
  }

  double s = 0.0;
  for (double lw : lws) s += std::exp(lw - max_lw);
  return max_lw + std::log(s);
}

}  // namespace detail

// Log density. At y = 0 this is log(zero_mass); for y > 0 it is the
// exponential-dispersion kernel plus the log series normalizer minus log y.
inline double log_density(double y, double mu, const TweedieParams& params) {
  params.validate();
  if (!(mu > 0.0) || !std::isfinite(mu))
    throw DataError("log_density requires mu > 0");
  if (y < 0.0 || !std::isfinite(y))
    throw DataError("log_density requires y >= 0, got " + std::to_string(y));
  const double p = params.p;
  const double phi = params.phi;
  const double kernel = -std::pow(mu, 2.0 - p) / (phi * (2.0 - p));
  if (y == 0.0) return kernel;
  return kernel - y * std::pow(mu, 1.0 - p) / (phi * (p - 1.0)) -
         std::log(y) + detail::log_series_normalizer(y, params);
}

// Draws one compound Poisson-gamma variate with mean mu.
inline double sample(double mu, const TweedieParams& params,
                     std::mt19937_64& rng) {
  params.validate();
  if (!(mu > 0.0)) throw DataError("sample requires mu > 0");
  const double p = params.p;
  const double lambda = std::pow(mu, 2.0 - p) / (params.phi * (2.0 - p));
  const double alpha = (2.0 - p) / (p - 1.0);
  const double scale = params.phi * (p - 1.0) * std::pow(mu, p - 1.0);
  std::poisson_distribution<long> pois(lambda);
  const long n = pois(rng);
  if (n == 0) return 0.0;
  std::gamma_distribution<double> gam(alpha * static_cast<double>(n), scale);
  return gam(rng);
}

}  // namespace istrate::tweedie
