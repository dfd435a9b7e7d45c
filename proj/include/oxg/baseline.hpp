#pragma once

#include <array>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <span>
#include <string>
#include <string_view>

#include "oxg/errors.hpp"
#include "oxg/numeric.hpp"

namespace oxg {

enum class BaselineKind { uniform, exponential, burr_xii, normal };

/// CLI/config spelling of a baseline kind.
inline std::string_view to_string(BaselineKind k) {
  switch (k) {
    case BaselineKind::uniform:
      return "uniform";
    case BaselineKind::exponential:
      return "exponential";
    case BaselineKind::burr_xii:
      return "burr-xii";
    case BaselineKind::normal:
      return "normal";
  }
  return "?";
}

inline BaselineKind parse_baseline_kind(std::string_view s) {
  if (s == "uniform") return BaselineKind::uniform;
  if (s == "exponential") return BaselineKind::exponential;
  if (s == "burr-xii") return BaselineKind::burr_xii;
  if (s == "normal") return BaselineKind::normal;
  throw parameter_error("unknown baseline '" + std::string(s) + "'");
}

inline std::size_t parameter_count(BaselineKind k) {
  return (k == BaselineKind::uniform || k == BaselineKind::exponential) ? 1 : 2;
}

namespace detail {

inline constexpr double inv_sqrt2 = 0.70710678118654752440;
inline constexpr double log_sqrt_2pi = 0.91893853320467274178;

inline double std_normal_pdf(double z) {
  return std::exp(-0.5 * z * z - log_sqrt_2pi);
}

/// P(Z <= z); erfc keeps full relative accuracy in the lower tail.
inline double std_normal_cdf(double z) { return 0.5 * std::erfc(-z * inv_sqrt2); }

/// P(Z > z), evaluated directly rather than as 1 - cdf.
inline double std_normal_sf(double z) { return 0.5 * std::erfc(z * inv_sqrt2); }

inline double std_normal_log_sf(double z) {
  if (z < 37.0) return std::log(std_normal_sf(z));
  // Mills-ratio asymptotic series; from z = 37 on the first omitted term
  // is below 2e-17 relative, and erfc would enter the subnormal range.
  const double w = 1.0 / (z * z);
  const double series =
      1.0 + w * (-1.0 + w * (3.0 + w * (-15.0 + w * (105.0 + w * (-945.0 + w * 10395.0)))));
  return -0.5 * z * z - std::log(z) - log_sqrt_2pi + std::log(series);
}

inline double std_normal_log_cdf(double z) { return std_normal_log_sf(-z); }

}  // namespace detail

/// One of the shipped baseline distributions G(x; xi) with its parameters.
/// Parameters are ordered as in the CLI: uniform [theta], exponential
/// [theta], burr-xii [alpha, theta], normal [mu, sigma].
class BaselineModel {
 public:
  static BaselineModel uniform(double theta) { return validated(BaselineKind::uniform, {theta, 0.0}); }
  static BaselineModel exponential(double theta) {
    return validated(BaselineKind::exponential, {theta, 0.0});
  }
  static BaselineModel burr_xii(double alpha, double theta) {
    return validated(BaselineKind::burr_xii, {alpha, theta});
  }
  static BaselineModel normal(double mu, double sigma) {
    return validated(BaselineKind::normal, {mu, sigma});
  }

  static BaselineModel make(BaselineKind kind, std::span<const double> params) {
    if (params.size() != parameter_count(kind)) {
      throw parameter_error(std::string(to_string(kind)) + " expects " +
                            std::to_string(parameter_count(kind)) + " parameter(s)");
    }
    std::array<double, 2> p{0.0, 0.0};
    for (std::size_t i = 0; i < params.size(); ++i) p[i] = params[i];
    return validated(kind, p);
  }

  BaselineKind kind() const noexcept { return kind_; }
  std::size_t size() const noexcept { return parameter_count(kind_); }
  std::span<const double> params() const noexcept { return {p_.data(), size()}; }
  double param(std::size_t i) const { return p_.at(i); }

  double lower() const noexcept {
    return kind_ == BaselineKind::normal ? -std::numeric_limits<double>::infinity() : 0.0;
  }
  double upper() const noexcept {
    return kind_ == BaselineKind::uniform ? p_[0] : std::numeric_limits<double>::infinity();
  }
  bool nonnegative_support() const noexcept { return kind_ != BaselineKind::normal; }

  double cdf(double x) const {
    if (x <= lower()) return 0.0;
    if (x >= upper()) return 1.0;
    switch (kind_) {
      case BaselineKind::uniform:
        return x / p_[0];
      case BaselineKind::exponential:
        return -std::expm1(-p_[0] * x);
      case BaselineKind::burr_xii:
        return -std::expm1(-p_[1] * std::log1p(std::pow(x, p_[0])));
      case BaselineKind::normal:
        return detail::std_normal_cdf(z(x));
    }
    return 0.0;
  }

  /// Survival 1 - G, computed without cancellation.
  double sf(double x) const {
    if (x <= lower()) return 1.0;
    if (x >= upper()) return 0.0;
    switch (kind_) {
      case BaselineKind::uniform:
        return (p_[0] - x) / p_[0];
      case BaselineKind::exponential:
        return std::exp(-p_[0] * x);
      case BaselineKind::burr_xii:
        return std::exp(-p_[1] * std::log1p(std::pow(x, p_[0])));
      case BaselineKind::normal:
        return detail::std_normal_sf(z(x));
    }
    return 0.0;
  }

  double log_sf(double x) const {
    if (x <= lower()) return 0.0;
    if (x >= upper()) return -std::numeric_limits<double>::infinity();
    switch (kind_) {
      case BaselineKind::uniform:
        return std::log((p_[0] - x) / p_[0]);
      case BaselineKind::exponential:
        return -p_[0] * x;
      case BaselineKind::burr_xii:
        return -p_[1] * std::log1p(std::pow(x, p_[0]));
      case BaselineKind::normal:
        return detail::std_normal_log_sf(z(x));
    }
    return 0.0;
  }

  double log_cdf(double x) const {
    if (x <= lower()) return -std::numeric_limits<double>::infinity();
    if (x >= upper()) return 0.0;
    if (kind_ == BaselineKind::normal) return detail::std_normal_log_cdf(z(x));
    return std::log(cdf(x));
  }

  /// Density g; zero outside the closed support.
  double pdf(double x) const {
    const double lp = log_pdf(x);
    return lp == -std::numeric_limits<double>::infinity() ? 0.0 : std::exp(lp);
  }

  double log_pdf(double x) const {
    constexpr double ninf = -std::numeric_limits<double>::infinity();
    if (x < lower() || x > upper() || std::isinf(x)) return ninf;
    switch (kind_) {
      case BaselineKind::uniform:
        return -std::log(p_[0]);
      case BaselineKind::exponential:
        return std::log(p_[0]) - p_[0] * x;
      case BaselineKind::burr_xii: {
        const double a = p_[0], t = p_[1];
        double power_term = 0.0;
        if (a != 1.0) {
          power_term = x == 0.0 ? (a > 1.0 ? ninf : std::numeric_limits<double>::infinity())
                                : (a - 1.0) * std::log(x);
        }
        return std::log(a) + std::log(t) + power_term - (t + 1.0) * std::log1p(std::pow(x, a));
      }
      case BaselineKind::normal: {
        const double zz = z(x);
        return -0.5 * zz * zz - detail::log_sqrt_2pi - std::log(p_[1]);
      }
    }
    return ninf;
  }

  /// Odds G / (1 - G). Throws infinite_odds_error at or beyond the upper
  /// support bound.
  double odds(double x) const {
    if (!(x < upper())) {
      throw infinite_odds_error("baseline odds are infinite at the upper support bound");
    }
    if (x <= lower()) return 0.0;
    switch (kind_) {
      case BaselineKind::uniform:
        return x / (p_[0] - x);
      case BaselineKind::exponential:
        return std::expm1(p_[0] * x);
      case BaselineKind::burr_xii:
        return std::expm1(p_[1] * std::log1p(std::pow(x, p_[0])));
      case BaselineKind::normal: {
        const double zz = z(x);
        const double q = detail::std_normal_sf(zz);
        if (q == 0.0) return std::numeric_limits<double>::infinity();
        return detail::std_normal_cdf(zz) / q;
      }
    }
    return 0.0;
  }

  /// G^{-1}(u) for u in (0, 1).
  double quantile(double u) const {
    if (!(u > 0.0 && u < 1.0)) throw domain_error("baseline quantile: u must lie in (0, 1)");
    switch (kind_) {
      case BaselineKind::uniform:
        return u * p_[0];
      case BaselineKind::exponential:
        return -std::log1p(-u) / p_[0];
      case BaselineKind::burr_xii:
        return std::pow(std::expm1(-std::log1p(-u) / p_[1]), 1.0 / p_[0]);
      case BaselineKind::normal:
        return u <= 0.5 ? p_[0] + p_[1] * std_normal_inverse(u, false)
                        : p_[0] + p_[1] * std_normal_inverse(1.0 - u, true);
    }
    return 0.0;
  }

  /// The x whose odds equal t; same point as quantile(t / (1 + t)) but
  /// without rounding t / (1 + t) when t is large.
  double quantile_from_odds(double t) const {
    if (!(t >= 0.0)) throw domain_error("odds must be nonnegative");
    if (t == 0.0) return lower();
    if (std::isinf(t)) return upper();
    switch (kind_) {
      case BaselineKind::uniform:
        return p_[0] * (t / (1.0 + t));
      case BaselineKind::exponential:
        return std::log1p(t) / p_[0];
      case BaselineKind::burr_xii:
        return std::pow(std::expm1(std::log1p(t) / p_[1]), 1.0 / p_[0]);
      case BaselineKind::normal:
        return t <= 1.0 ? p_[0] + p_[1] * std_normal_inverse(t / (1.0 + t), false)
                        : p_[0] + p_[1] * std_normal_inverse(1.0 / (1.0 + t), true);
    }
    return 0.0;
  }

  /// Partial derivatives of log g(x) with respect to each parameter.
  std::array<double, 2> dlog_pdf(double x) const {
    const double a = p_[0], t = p_[1];
    switch (kind_) {
      case BaselineKind::uniform:
        return {-1.0 / a, 0.0};
      case BaselineKind::exponential:
        return {1.0 / a - x, 0.0};
      case BaselineKind::burr_xii: {
        const double lx = std::log(x), xa = std::pow(x, a);
        return {1.0 / a + lx - (t + 1.0) * xa * lx / (1.0 + xa), 1.0 / t - std::log1p(xa)};
      }
      case BaselineKind::normal: {
        const double zz = z(x);
        return {zz / t, (zz * zz - 1.0) / t};
      }
    }
    return {0.0, 0.0};
  }

  /// Partial derivatives of log(1 - G(x)) with respect to each parameter.
  std::array<double, 2> dlog_sf(double x) const {
    const double a = p_[0], t = p_[1];
    switch (kind_) {
      case BaselineKind::uniform:
        return {1.0 / (a - x) - 1.0 / a, 0.0};
      case BaselineKind::exponential:
        return {-x, 0.0};
      case BaselineKind::burr_xii: {
        const double lx = std::log(x), xa = std::pow(x, a);
        return {-t * xa * lx / (1.0 + xa), -std::log1p(xa)};
      }
      case BaselineKind::normal: {
        const double zz = z(x);
        // phi(z) / Q(z), the inverse Mills ratio
        const double mills =
            std::exp(-0.5 * zz * zz - detail::log_sqrt_2pi - detail::std_normal_log_sf(zz));
        return {mills / t, mills * zz / t};
      }
    }
    return {0.0, 0.0};
  }

  std::string describe() const {
    std::string s(to_string(kind_));
    s += "(";
    for (std::size_t i = 0; i < size(); ++i) {
      if (i) s += ", ";
      char buf[32];
      const auto r = std::to_chars(buf, buf + sizeof buf, p_[i]);
      s.append(buf, r.ptr);
    }
    return s + ")";
  }

  friend bool operator==(const BaselineModel&, const BaselineModel&) = default;

 private:
  BaselineModel(BaselineKind k, std::array<double, 2> p) : kind_(k), p_(p) {}

  static BaselineModel validated(BaselineKind kind, std::array<double, 2> p) {
    auto positive = [](double v) { return std::isfinite(v) && v > 0.0; };
    switch (kind) {
      case BaselineKind::uniform:
      case BaselineKind::exponential:
        if (!positive(p[0])) throw parameter_error("theta must be positive and finite");
        break;
      case BaselineKind::burr_xii:
        if (!positive(p[0])) throw parameter_error("alpha must be positive and finite");
        if (!positive(p[1])) throw parameter_error("theta must be positive and finite");
        break;
      case BaselineKind::normal:
        if (!std::isfinite(p[0])) throw parameter_error("mu must be finite");
        if (!positive(p[1])) throw parameter_error("sigma must be positive and finite");
        break;
    }
    return BaselineModel(kind, p);
  }

  double z(double x) const { return (x - p_[0]) / p_[1]; }

  // Standard normal z with Phi(z) = p (upper == false) or Q(z) = p
  // (upper == true), p in (0, 0.5]. Bracketed Brent on the matching tail.
  static double std_normal_inverse(double p, bool upper) {
    if (p == 0.5) return 0.0;
    auto lower_tail = [lp = std::log(p)](double zz) { return detail::std_normal_log_cdf(zz) - lp; };
    const auto r = numeric::brent(lower_tail, -40.0, 0.0, 1e-300);
    return upper ? -r.x : r.x;
  }

  BaselineKind kind_;
  std::array<double, 2> p_;
};

inline double baseline_cdf(const BaselineModel& m, double x) { return m.cdf(x); }
inline double baseline_pdf(const BaselineModel& m, double x) { return m.pdf(x); }
inline double baseline_quantile(const BaselineModel& m, double u) { return m.quantile(u); }
inline double baseline_odds(const BaselineModel& m, double x) { return m.odds(x); }

}  // namespace oxg
