#pragma once

// The Odds xgamma-G family. A family member is the law of X with
// F(x) = P(T <= W(x)), where W = G / (1 - G) is the baseline odds and T
// follows the xgamma distribution with shape lambda.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <utility>
#include <span>
#include <vector>

#include "oxg/baseline.hpp"
#include "oxg/errors.hpp"
#include "oxg/numeric.hpp"
#include "oxg/quadrature.hpp"

namespace oxg {

/// Beyond this value of lambda * t the e^{-lambda t} * polynomial forms are
/// evaluated in log space.
inline constexpr double exp_log_switch = 700.0;

/// The xgamma law on t > 0: a (lambda / (1 + lambda), 1 / (1 + lambda))
/// mixture of Exponential(lambda) and Gamma(3, lambda).
class XGammaGenerator {
 public:
  explicit XGammaGenerator(double lambda) : lambda_(lambda) {
    if (!(std::isfinite(lambda) && lambda > 0.0)) {
      throw parameter_error("lambda must be positive and finite");
    }
  }

  double lambda() const noexcept { return lambda_; }

  double density(double t) const {
    if (t < 0.0) return 0.0;
    const double l = lambda_;
    return l * l / (1.0 + l) * (1.0 + 0.5 * l * t * t) * std::exp(-l * t);
  }

  /// log(1 + lambda + lambda t + lambda^2 t^2 / 2), safe for huge t.
  double log_tail_polynomial(double t) const {
    const double l = lambda_;
    if (t < 1e100) return std::log(1.0 + l + l * t + 0.5 * l * l * t * t);
    return 2.0 * std::log(t) + std::log(0.5 * l * l);
  }

  /// P(T > t) = (1 + lambda + lambda t + lambda^2 t^2 / 2) e^{-lambda t} / (1 + lambda).
  double survival(double t) const {
    if (t <= 0.0) return 1.0;
    if (std::isinf(t)) return 0.0;
    const double l = lambda_, y = l * t;
    if (y > exp_log_switch) return std::exp(log_survival(t));
    return (1.0 + l + y + 0.5 * y * y) / (1.0 + l) * std::exp(-y);
  }

  double log_survival(double t) const {
    if (t <= 0.0) return 0.0;
    return -lambda_ * t + log_tail_polynomial(t) - std::log1p(lambda_);
  }

  /// P(T <= t), assembled from the two mixture components so that small t
  /// keeps full relative precision.
  double cdf(double t) const {
    if (t <= 0.0) return 0.0;
    if (std::isinf(t)) return 1.0;
    const double l = lambda_, y = l * t;
    const double expo = -std::expm1(-y);
    double gamma3;
    if (y < 1.0) {
      // e^{-y} sum_{k >= 3} y^k / k!
      double term = y * y * y / 6.0, sum = 0.0;
      for (int k = 3; k < 40 && term > 1e-18 * sum; ++k) {
        sum += term;
        term *= y / (k + 1);
      }
      gamma3 = std::exp(-y) * sum;
    } else {
      gamma3 = y > exp_log_switch ? 1.0 : 1.0 - std::exp(-y) * (1.0 + y + 0.5 * y * y);
    }
    return (l * expo + gamma3) / (1.0 + l);
  }

 private:
  double lambda_;
};

/// Family parameters: shape lambda together with the baseline and its xi.
class OxgParams {
 public:
  OxgParams(double lambda, BaselineModel baseline)
      : lambda_(lambda), baseline_(std::move(baseline)) {
    if (!(std::isfinite(lambda) && lambda > 0.0)) {
      throw parameter_error("lambda must be positive and finite");
    }
  }

  double lambda() const noexcept { return lambda_; }
  const BaselineModel& baseline() const noexcept { return baseline_; }
  XGammaGenerator generator() const { return XGammaGenerator(lambda_); }

  /// Number of free parameters (lambda plus the baseline's).
  std::size_t size() const noexcept { return 1 + baseline_.size(); }

  friend bool operator==(const OxgParams&, const OxgParams&) = default;

 private:
  double lambda_;
  BaselineModel baseline_;
};

namespace detail {

inline double log1p_half_lambda_t2(double lambda, double t) {
  if (t < 1e100) return std::log1p(0.5 * lambda * t * t);
  return 2.0 * std::log(t) + std::log(0.5 * lambda);
}

}  // namespace detail

inline double cdf(const OxgParams& p, double x) {
  const auto& b = p.baseline();
  if (x <= b.lower()) return 0.0;
  if (x >= b.upper()) return 1.0;
  return p.generator().cdf(b.odds(x));
}

inline double survival(const OxgParams& p, double x) {
  const auto& b = p.baseline();
  if (x <= b.lower()) return 1.0;
  if (x >= b.upper()) return 0.0;
  return p.generator().survival(b.odds(x));
}

inline double log_pdf(const OxgParams& p, double x) {
  constexpr double ninf = -std::numeric_limits<double>::infinity();
  const auto& b = p.baseline();
  if (!(x >= b.lower() && x < b.upper()) || std::isinf(x)) return ninf;
  const double t = b.odds(x);
  if (std::isinf(t)) return ninf;
  const double l = p.lambda();
  return 2.0 * std::log(l) - std::log1p(l) + b.log_pdf(x) - 2.0 * b.log_sf(x) +
         detail::log1p_half_lambda_t2(l, t) - l * t;
}

inline double pdf(const OxgParams& p, double x) {
  const auto& b = p.baseline();
  if (!(x >= b.lower() && x < b.upper()) || std::isinf(x)) return 0.0;
  const double t = b.odds(x);
  if (std::isinf(t)) return 0.0;
  const double l = p.lambda();
  const double sf = b.sf(x);
  if (l * t <= exp_log_switch && sf > 1e-100) {
    return l * l / (1.0 + l) * b.pdf(x) / (sf * sf) * (1.0 + 0.5 * l * t * t) * std::exp(-l * t);
  }
  return std::exp(log_pdf(p, x));
}

/// h = f / S, from its own closed form so the far tail does not hit 0 / 0.
inline double hazard(const OxgParams& p, double x) {
  const auto& b = p.baseline();
  if (!(x > b.lower() && x < b.upper())) {
    throw domain_error("hazard: x must lie strictly inside the support");
  }
  const double t = b.odds(x);
  const double l = p.lambda();
  const auto gen = p.generator();
  if (std::isinf(t)) {
    // (1 + l t^2 / 2) / poly(t) -> 1 / l
    return std::exp(std::log(l) + b.log_pdf(x) - 2.0 * b.log_sf(x));
  }
  return std::exp(2.0 * std::log(l) + b.log_pdf(x) - 2.0 * b.log_sf(x) +
                  detail::log1p_half_lambda_t2(l, t) - gen.log_tail_polynomial(t));
}

inline double reversed_hazard(const OxgParams& p, double x) {
  const double F = cdf(p, x);
  if (!(F > 0.0)) throw domain_error("reversed hazard: cdf vanishes at x");
  return pdf(p, x) / F;
}

/// Odds value t* with P(T <= t*) = u.
inline double quantile_odds(const OxgParams& p, double u) {
  if (!(u > 0.0 && u < 1.0)) throw domain_error("quantile: u must lie in (0, 1)");
  const auto gen = p.generator();
  // log-scale residuals keep relative precision for u near 0 (lower branch)
  // and near 1 (upper branch).
  auto residual = [&](double t) {
    return u <= 0.5 ? std::log(gen.cdf(t)) - std::log(u)
                    : std::log(1.0 - u) - gen.log_survival(t);
  };
  double hi = 1.0;
  const double log_target = std::log1p(-u);
  while (gen.log_survival(hi) >= log_target) {
    hi *= 2.0;
    if (hi > 1e300) throw convergence_error("quantile: failed to bracket");
  }
  double lo = 0.5 * hi;
  while (gen.cdf(lo) >= u) {
    lo *= 0.5;
    if (lo < 1e-300) return lo;
  }
  return numeric::brent(residual, lo, hi, 0.0).x;
}

inline double quantile(const OxgParams& p, double u) {
  return p.baseline().quantile_from_odds(quantile_odds(p, u));
}

/// Uniform variate on the open interval (0, 1) from 53 random bits.
inline double open_unit_uniform(std::mt19937_64& rng) {
  return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
}

/// Inverse-transform draws using the caller's generator state.
inline std::vector<double> sample(const OxgParams& p, std::size_t n, std::mt19937_64& rng) {
  std::vector<double> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.push_back(quantile(p, open_unit_uniform(rng)));
  return out;
}

inline std::vector<double> sample(const OxgParams& p, std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  return sample(p, n, rng);
}

/// Sorted panel edges for integrating against the family density on
/// [a, b]: the interval ends plus interior quantiles.
inline std::vector<double> integration_breakpoints(const OxgParams& p, double a, double b) {
  std::vector<double> pts{a};
  for (double u : {1e-12, 1e-8, 1e-4, 0.01, 0.1, 0.25, 0.5, 0.75, 0.9, 0.99, 0.9999,
                   1.0 - 1e-8, 1.0 - 1e-12}) {
    const double q = quantile(p, u);
    if (q > a && q < b) pts.push_back(q);
  }
  pts.push_back(b);
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  return pts;
}

/// Adaptive quadrature of fn over [a, b] with breakpoints at quantiles of p.
template <class F>
QuadratureResult integrate_against(const OxgParams& p, F&& fn, double a, double b,
                                   const QuadratureOptions& opt = {}) {
  if (!(a < b)) return {0.0, 0.0, 0, true};
  const auto pts = integration_breakpoints(p, a, b);
  return integrate(fn, std::span<const double>(pts), opt);
}

enum class CriticalKind { max, min };

struct CriticalPoint {
  double x;
  CriticalKind kind;
};

/// d/dx log f, with g' taken by central differences of the baseline pdf.
inline double dlog_pdf_dx(const OxgParams& p, double x) {
  const auto& b = p.baseline();
  const double l = p.lambda();
  const double h = std::max(1e-6, 1e-6 * std::abs(x));
  double gprime;
  if (x - h > b.lower() && x + h < b.upper()) {
    gprime = (b.pdf(x + h) - b.pdf(x - h)) / (2.0 * h);
  } else if (x - h > b.lower()) {
    gprime = (b.pdf(x) - b.pdf(x - h)) / h;
  } else {
    gprime = (b.pdf(x + h) - b.pdf(x)) / h;
  }
  const double g = b.pdf(x);
  const double sf = b.sf(x);
  const double t = b.odds(x);
  const double g_over_sf2 = g / sf / sf;
  return gprime / g + 2.0 * g / sf + l * g_over_sf2 * t / (1.0 + 0.5 * l * t * t) -
         l * g_over_sf2;
}

/// Interior critical points of the density over its central probability
/// range [Q(1e-6), Q(1 - 1e-6)]. Empty means monotone on that range.
inline std::vector<CriticalPoint> density_critical_points(const OxgParams& p) {
  constexpr int grid = 2048;
  const double lo = quantile(p, 1e-6);
  const double hi = quantile(p, 1.0 - 1e-6);
  std::vector<CriticalPoint> out;
  auto at = [&](int i) { return lo + (hi - lo) * static_cast<double>(i) / (grid - 1); };
  double x_prev = at(0);
  double d_prev = dlog_pdf_dx(p, x_prev);
  for (int i = 1; i < grid; ++i) {
    const double x = at(i);
    const double d = dlog_pdf_dx(p, x);
    if (std::isfinite(d_prev) && std::isfinite(d) && d_prev != 0.0 && (d_prev > 0) != (d > 0)) {
      double a = x_prev, c = x;
      const bool rising = d_prev > 0.0;
      while (c - a > 1e-9 * std::max(1.0, std::abs(a))) {
        const double m = 0.5 * (a + c);
        const double dm = dlog_pdf_dx(p, m);
        if ((dm > 0) == rising) {
          a = m;
        } else {
          c = m;
        }
      }
      out.push_back({0.5 * (a + c), rising ? CriticalKind::max : CriticalKind::min});
    }
    x_prev = x;
    d_prev = d;
  }
  return out;
}

}  // namespace oxg
