#pragma once

// Mixture-series summaries of the family and their quadrature oracles.
//
// Every expansion is regrouped by powers of the baseline cdf: a sum over
// m of c_m * K(m), where c_m collects all weights multiplying g * G^m and
// K(m) is the matching exp-G integral. Block m is the unit of the tail test.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "oxg/baseline.hpp"
#include "oxg/errors.hpp"
#include "oxg/family.hpp"
#include "oxg/numeric.hpp"
#include "oxg/quadrature.hpp"

namespace oxg {

enum class Method { series, quadrature };
enum class TruncationMode { fixed_caps, adaptive_until_tail };

struct TruncationPolicy {
  std::size_t max_index_per_sum = 40;
  double tail_tolerance = 1e-10;
  TruncationMode mode = TruncationMode::adaptive_until_tail;

  void validate() const {
    if (max_index_per_sum < 1) throw parameter_error("max_index_per_sum must be >= 1");
    if (!(tail_tolerance > 0.0)) throw parameter_error("tail_tolerance must be positive");
    if (max_index_per_sum > 2000) throw parameter_error("max_index_per_sum must be <= 2000");
  }
};

struct SeriesResult {
  double value = 0.0;
  bool converged = false;
  std::size_t terms = 0;
};

/// Tolerances used whenever quadrature serves as the reference value.
inline constexpr QuadratureOptions oracle_quadrature{1e-14, 1e-12, 10000};

namespace detail {

/// Running state of a blockwise series: compensated partial sum, the
/// rounding budget implied by cancellation inside each block, and the
/// number of consecutive blocks that fell under the tail tolerance.
/// magnitude is the sum of |terms| in the block.
class tail_monitor {
 public:
  explicit tail_monitor(const TruncationPolicy& p) : tol_(p.tail_tolerance) {}

  void add_block(double value, double magnitude, std::size_t terms) {
    if (!std::isfinite(value) || !std::isfinite(magnitude)) finite_ = false;
    sum_.add(value);
    rounding_ += 4.0 * std::numeric_limits<double>::epsilon() * magnitude;
    terms_ += terms;
    const double partial = std::abs(sum_.value());
    if (std::abs(value) <= tol_ * partial || (value == 0.0 && partial == 0.0)) {
      ++quiet_;
    } else {
      quiet_ = 0;
    }
  }

  bool tail_small() const { return quiet_ >= 2; }

  bool converged() const {
    const double v = sum_.value();
    return finite_ && tail_small() && rounding_ <= std::max(tol_ * std::abs(v), 1e-300);
  }

  SeriesResult result() const { return {sum_.value(), converged(), terms_}; }

 private:
  double tol_;
  numeric::kahan_sum sum_;
  double rounding_ = 0.0;
  std::size_t quiet_ = 0;
  std::size_t terms_ = 0;
  bool finite_ = true;
};

}  // namespace detail

/// The weights of the exp-G mixture
///   f(x) = sum_ij w_ij g G^{i+j} + sum_ik w_ik g G^{i+k+2},
/// held as log-magnitude and sign for 0 <= i, j, k <= cap.
class MixtureWeights {
 public:
  MixtureWeights(double lambda, const TruncationPolicy& policy)
      : lambda_(lambda), cap_(policy.max_index_per_sum) {
    policy.validate();
    if (!(std::isfinite(lambda) && lambda > 0.0)) {
      throw parameter_error("lambda must be positive and finite");
    }
    const std::size_t n = cap_ + 1;
    wij_.resize(n * n);
    wik_.resize(n * n);
    const double ll = std::log(lambda), l1 = std::log1p(lambda);
    for (std::size_t i = 0; i < n; ++i) {
      const int sign = i % 2 ? -1 : 1;
      const double head = static_cast<double>(i) * ll - numeric::log_factorial(i) - l1;
      for (std::size_t j = 0; j < n; ++j) {
        wij_[i * n + j] = {head + 2.0 * ll + numeric::log_binomial(i + j + 1, j), sign};
        wik_[i * n + j] = {head + 3.0 * ll - std::log(2.0) + numeric::log_binomial(i + j + 3, j),
                           sign};
      }
    }
    build_coefficients();
  }

  double lambda() const noexcept { return lambda_; }
  std::size_t cap() const noexcept { return cap_; }

  numeric::signed_log log_w_ij(std::size_t i, std::size_t j) const { return wij_.at(at(i, j)); }
  numeric::signed_log log_w_ik(std::size_t i, std::size_t k) const { return wik_.at(at(i, k)); }
  double w_ij(std::size_t i, std::size_t j) const { return log_w_ij(i, j).value(); }
  double w_ik(std::size_t i, std::size_t k) const { return log_w_ik(i, k).value(); }

  /// c_m: total weight on g G^m, for m = 0..cap.
  const std::vector<double>& coefficients() const noexcept { return coef_; }
  /// Sum of |terms| that make up each c_m (its cancellation scale).
  const std::vector<double>& magnitudes() const noexcept { return mag_; }

 private:
  std::size_t at(std::size_t i, std::size_t j) const {
    if (i > cap_ || j > cap_) throw domain_error("mixture weight index beyond cap");
    return i * (cap_ + 1) + j;
  }

  void build_coefficients() {
    coef_.assign(cap_ + 1, 0.0);
    mag_.assign(cap_ + 1, 0.0);
    for (std::size_t m = 0; m <= cap_; ++m) {
      numeric::kahan_sum s;
      double a = 0.0;
      for (std::size_t i = 0; i <= m; ++i) {
        const double v = w_ij(i, m - i);
        s.add(v);
        a += std::abs(v);
      }
      for (std::size_t i = 0; i + 2 <= m; ++i) {
        const double v = w_ik(i, m - 2 - i);
        s.add(v);
        a += std::abs(v);
      }
      coef_[m] = s.value();
      mag_[m] = a;
    }
  }

  double lambda_;
  std::size_t cap_;
  std::vector<numeric::signed_log> wij_, wik_;
  std::vector<double> coef_, mag_;
};

inline MixtureWeights mixture_weights(double lambda, const TruncationPolicy& policy = {}) {
  return MixtureWeights(lambda, policy);
}

/// Sums c_m K(m) block by block, m = 0..cap, under the policy's stopping
/// rule. Each term is formed in log space before accumulation.
template <class Kernel>
SeriesResult sum_power_series(const MixtureWeights& w, Kernel&& kernel,
                              const TruncationPolicy& policy) {
  detail::tail_monitor mon(policy);
  const auto& c = w.coefficients();
  const auto& a = w.magnitudes();
  for (std::size_t m = 0; m < c.size(); ++m) {
    const double k = kernel(m);
    const double term = (numeric::signed_log::of(c[m]) * numeric::signed_log::of(k)).value();
    mon.add_block(term, a[m] * std::abs(k), m + 1 + (m >= 2 ? m - 1 : 0));
    // Collected coefficients can vanish exactly: lambda = 2 zeroes c_1 and c_2.
    if (policy.mode == TruncationMode::adaptive_until_tail && mon.tail_small() && m >= 5) break;
  }
  return mon.result();
}

namespace detail {

inline std::vector<double> baseline_breakpoints(const BaselineModel& b, double lo, double hi) {
  std::vector<double> pts{lo};
  for (double u : {1e-12, 1e-8, 1e-4, 0.01, 0.1, 0.5, 0.9, 0.99, 0.9999, 1.0 - 1e-8, 1.0 - 1e-12}) {
    const double q = b.quantile(u);
    if (q > lo && q < hi) pts.push_back(q);
  }
  pts.push_back(hi);
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  return pts;
}

/// Integral of h(x) g(x) G(x)^m over [lo, hi] by quadrature.
template <class H>
double exp_g_integral(const BaselineModel& b, H&& h, std::size_t m, double lo, double hi) {
  if (!(lo < hi)) return 0.0;
  const auto pts = baseline_breakpoints(b, lo, hi);
  const double md = static_cast<double>(m);
  auto q = integrate(
      [&](double x) {
        const double g = b.pdf(x);
        if (g == 0.0) return 0.0;
        return h(x) * g * (m == 0 ? 1.0 : std::exp(md * b.log_cdf(x)));
      },
      std::span<const double>(pts), oracle_quadrature);
  return q.value;
}

/// Lazily filled table K(0), K(1), ... for kernels that need quadrature.
template <class F>
class kernel_cache {
 public:
  explicit kernel_cache(F f) : f_(std::move(f)) {}
  double operator()(std::size_t m) {
    while (v_.size() <= m) v_.push_back(f_(v_.size()));
    return v_[m];
  }

 private:
  F f_;
  std::vector<double> v_;
};

inline double ipow(double x, unsigned r) {
  double y = 1.0;
  for (unsigned i = 0; i < r; ++i) y *= x;
  return y;
}

inline void require_interior(const BaselineModel& b, double x, const char* what) {
  if (!(x > b.lower() && x < b.upper())) throw domain_error(std::string(what) + ": x must be inside the support");
}

inline SeriesResult from_quadrature(const QuadratureResult& q) {
  return {q.value, q.converged, q.evaluations};
}

}  // namespace detail

// Pointwise expansions.

inline SeriesResult pdf_series(const OxgParams& p, double x, const TruncationPolicy& policy = {}) {
  const auto& b = p.baseline();
  if (x < b.lower() || x >= b.upper()) return {0.0, true, 0};
  const MixtureWeights w(p.lambda(), policy);
  const double g = b.pdf(x), G = b.cdf(x);
  return sum_power_series(w, [&](std::size_t m) { return g * std::pow(G, static_cast<double>(m)); },
                          policy);
}

/// Integrates the pdf expansion termwise: the exp-G kernel g G^m
/// integrates to G^{m+1} / (m + 1).
inline SeriesResult cdf_series(const OxgParams& p, double x, const TruncationPolicy& policy = {}) {
  const auto& b = p.baseline();
  if (x <= b.lower()) return {0.0, true, 0};
  if (x >= b.upper()) return {1.0, true, 0};
  const MixtureWeights w(p.lambda(), policy);
  const double G = b.cdf(x);
  return sum_power_series(
      w, [&](std::size_t m) { return std::pow(G, static_cast<double>(m + 1)) / static_cast<double>(m + 1); },
      policy);
}

// Moments.

/// E[X^r].
inline SeriesResult raw_moment(const OxgParams& p, unsigned r, Method method = Method::quadrature,
                               const TruncationPolicy& policy = {}) {
  const auto& b = p.baseline();
  if (method == Method::quadrature) {
    return detail::from_quadrature(integrate_against(
        p, [&](double x) { return detail::ipow(x, r) * pdf(p, x); }, b.lower(), b.upper(),
        oracle_quadrature));
  }
  const MixtureWeights w(p.lambda(), policy);
  if (b.kind() == BaselineKind::uniform) {
    const double th = b.param(0);
    return sum_power_series(
        w, [&](std::size_t m) { return detail::ipow(th, r) / static_cast<double>(m + r + 1); }, policy);
  }
  detail::kernel_cache k([&](std::size_t m) {
    return detail::exp_g_integral(b, [&](double x) { return detail::ipow(x, r); }, m, b.lower(),
                                  b.upper());
  });
  return sum_power_series(w, k, policy);
}

struct MomentSet {
  std::array<double, 4> raw_moments{};
  double mean = 0.0;
  double variance = 0.0;
  double skewness = 0.0;
  double kurtosis = 0.0;
  Method method = Method::quadrature;
  bool converged = false;
};

/// First four raw moments with the standardized third and fourth central
/// moments (kurtosis is not excess kurtosis).
inline MomentSet moment_set(const OxgParams& p, Method method = Method::quadrature,
                            const TruncationPolicy& policy = {}) {
  MomentSet s;
  s.method = method;
  s.converged = true;
  for (unsigned r = 1; r <= 4; ++r) {
    const auto m = raw_moment(p, r, method, policy);
    s.raw_moments[r - 1] = m.value;
    s.converged = s.converged && m.converged;
  }
  const double m1 = s.raw_moments[0], m2 = s.raw_moments[1], m3 = s.raw_moments[2],
               m4 = s.raw_moments[3];
  s.mean = m1;
  s.variance = std::max(0.0, m2 - m1 * m1);
  const double sd = std::sqrt(s.variance);
  s.skewness = (m3 - 3.0 * m2 * m1 + 2.0 * m1 * m1 * m1) / (s.variance * sd);
  s.kurtosis = (m4 - 4.0 * m1 * m3 + 6.0 * m1 * m1 * m2 - 3.0 * m1 * m1 * m1 * m1) /
               (s.variance * s.variance);
  return s;
}

/// Truncated Taylor series sum_r s^r E[X^r] / r!.
inline SeriesResult mgf(const OxgParams& p, double s, Method method = Method::quadrature,
                        const TruncationPolicy& policy = {}) {
  policy.validate();
  if (s == 0.0) return {1.0, true, 1};
  detail::tail_monitor mon(policy);
  mon.add_block(1.0, 1.0, 1);
  bool moments_ok = true;
  double scale = 1.0;
  for (unsigned r = 1; r <= policy.max_index_per_sum; ++r) {
    scale *= s / r;
    const auto m = raw_moment(p, r, method, policy);
    moments_ok = moments_ok && m.converged;
    const double term = scale * m.value;
    mon.add_block(term, std::abs(term), 1);
    if (policy.mode == TruncationMode::adaptive_until_tail && mon.tail_small()) break;
  }
  auto out = mon.result();
  out.converged = out.converged && moments_ok;
  return out;
}

/// Integral of x^r f(x) over (lower, t).
inline SeriesResult incomplete_moment(const OxgParams& p, unsigned r, double t,
                                      Method method = Method::quadrature,
                                      const TruncationPolicy& policy = {}) {
  const auto& b = p.baseline();
  if (t <= b.lower()) return {0.0, true, 0};
  const double hi = std::min(t, b.upper());
  if (method == Method::quadrature) {
    return detail::from_quadrature(integrate_against(
        p, [&](double x) { return detail::ipow(x, r) * pdf(p, x); }, b.lower(), hi,
        oracle_quadrature));
  }
  const MixtureWeights w(p.lambda(), policy);
  if (b.kind() == BaselineKind::uniform) {
    const double th = b.param(0);
    return sum_power_series(
        w,
        [&](std::size_t m) {
          const double e = static_cast<double>(m + r + 1);
          return std::exp(e * std::log(hi) - static_cast<double>(m + 1) * std::log(th)) / e;
        },
        policy);
  }
  detail::kernel_cache k([&](std::size_t m) {
    return detail::exp_g_integral(b, [&](double x) { return detail::ipow(x, r); }, m, b.lower(), hi);
  });
  return sum_power_series(w, k, policy);
}

struct MeanDeviations {
  double delta1 = 0.0;  // about the mean
  double delta2 = 0.0;  // about the median
  bool converged = false;
};

inline MeanDeviations mean_deviations(const OxgParams& p, Method method = Method::quadrature,
                                      const TruncationPolicy& policy = {}) {
  const auto mu = raw_moment(p, 1, method, policy);
  const double med = quantile(p, 0.5);
  const auto i_mu = incomplete_moment(p, 1, mu.value, method, policy);
  const auto i_med = incomplete_moment(p, 1, med, method, policy);
  MeanDeviations d;
  d.delta1 = 2.0 * mu.value * cdf(p, mu.value) - 2.0 * i_mu.value;
  d.delta2 = mu.value - 2.0 * i_med.value;
  d.converged = mu.converged && i_mu.converged && i_med.converged;
  return d;
}

inline SeriesResult lorenz(const OxgParams& p, double prob, Method method = Method::quadrature,
                           const TruncationPolicy& policy = {}) {
  if (!p.baseline().nonnegative_support()) {
    throw unsupported_error("Lorenz and Bonferroni curves need a nonnegative support");
  }
  if (!(prob > 0.0 && prob < 1.0)) throw domain_error("p must lie in (0, 1)");
  const auto mu = raw_moment(p, 1, method, policy);
  const auto part = incomplete_moment(p, 1, quantile(p, prob), method, policy);
  return {part.value / mu.value, mu.converged && part.converged, mu.terms + part.terms};
}

inline SeriesResult bonferroni(const OxgParams& p, double prob, Method method = Method::quadrature,
                               const TruncationPolicy& policy = {}) {
  auto l = lorenz(p, prob, method, policy);
  l.value /= prob;
  return l;
}

// Entropy.

namespace detail {

/// Coefficient of g^beta G^m in the expansion of f^beta for integer beta,
/// without the common factor (lambda^2 / (1 + lambda))^beta.
inline std::vector<std::pair<double, double>> renyi_coefficients(double lambda, unsigned beta,
                                                                 std::size_t cap) {
  std::vector<std::pair<double, double>> out(cap + 1);
  const double ll = std::log(lambda), lbl = std::log(beta * lambda);
  for (std::size_t m = 0; m <= cap; ++m) {
    numeric::kahan_sum s;
    double a = 0.0;
    for (unsigned j = 0; j <= beta && 2 * j <= m; ++j) {
      const double head = numeric::log_binomial(beta, j) + j * (ll - std::log(2.0));
      for (std::size_t i = 0; i + 2 * j <= m; ++i) {
        const std::size_t k = m - i - 2 * j;
        const std::size_t n = i + 2 * j + 2 * beta;
        const double lg = head + static_cast<double>(i) * lbl - numeric::log_factorial(i) +
                          numeric::log_binomial(n + k - 1, k);
        const double v = (i % 2 ? -1.0 : 1.0) * std::exp(lg);
        s.add(v);
        a += std::abs(v);
      }
    }
    out[m] = {s.value(), a};
  }
  return out;
}

}  // namespace detail

/// Renyi entropy (1 / (1 - beta)) log of the integral of f^beta.
inline SeriesResult renyi_entropy(const OxgParams& p, double beta, Method method = Method::quadrature,
                                  const TruncationPolicy& policy = {}) {
  if (!(beta > 0.0) || beta == 1.0 || !std::isfinite(beta)) {
    throw domain_error("beta must be positive and different from 1");
  }
  const auto& b = p.baseline();
  if (method == Method::quadrature) {
    auto q = integrate_against(
        p, [&](double x) { return std::exp(beta * log_pdf(p, x)); }, b.lower(), b.upper(),
        oracle_quadrature);
    return {std::log(q.value) / (1.0 - beta), q.converged, q.evaluations};
  }
  if (beta != std::floor(beta) || beta < 2.0) {
    throw unsupported_error("the Renyi series is available for integer beta >= 2 only");
  }
  policy.validate();
  const auto ib = static_cast<unsigned>(beta);
  const auto coef = detail::renyi_coefficients(p.lambda(), ib, policy.max_index_per_sum);
  auto kernel = [&](std::size_t m) {
    if (b.kind() == BaselineKind::uniform) {
      const double th = b.param(0);
      return std::pow(th, 1.0 - beta) / static_cast<double>(m + 1);
    }
    return detail::exp_g_integral(
        b, [&](double x) { return std::pow(b.pdf(x), beta - 1.0); }, m, b.lower(), b.upper());
  };
  detail::tail_monitor mon(policy);
  for (std::size_t m = 0; m <= policy.max_index_per_sum; ++m) {
    const double k = kernel(m);
    mon.add_block(coef[m].first * k, coef[m].second * std::abs(k), 1);
    if (policy.mode == TruncationMode::adaptive_until_tail && mon.tail_small() && m >= 5) break;
  }
  auto r = mon.result();
  const double front = beta * (2.0 * std::log(p.lambda()) - std::log1p(p.lambda()));
  if (!(r.value > 0.0)) return {std::numeric_limits<double>::quiet_NaN(), false, r.terms};
  r.value = (front + std::log(r.value)) / (1.0 - beta);
  return r;
}

// Order statistics.

struct OrderStatSpec {
  unsigned r = 1;
  unsigned n = 1;

  void validate() const {
    if (!(r >= 1 && r <= n)) throw parameter_error("order statistic needs 1 <= r <= n");
  }
};

/// Density of the r-th smallest of n draws, evaluated in log space.
inline double order_stat_pdf(const OxgParams& p, const OrderStatSpec& s, double x) {
  s.validate();
  if (s.n == 1) return pdf(p, x);
  const auto& b = p.baseline();
  if (x <= b.lower() || x >= b.upper()) return 0.0;
  const double lf = log_pdf(p, x);
  if (std::isinf(lf)) return 0.0;
  const double F = cdf(p, x), S = survival(p, x);
  const double logM = numeric::log_factorial(s.n) - numeric::log_factorial(s.r - 1) -
                      numeric::log_factorial(s.n - s.r);
  double lg = logM + lf;
  if (s.r > 1) lg += (s.r - 1) * std::log(F);
  if (s.n > s.r) lg += (s.n - s.r) * std::log(S);
  return std::exp(lg);
}

/// The expanded form: binomial sums over s and k, with e^{-(k+1) lambda W}
/// written as its power series in W and truncated by the policy.
inline SeriesResult order_stat_pdf_series(const OxgParams& p, const OrderStatSpec& spec, double x,
                                          const TruncationPolicy& policy = {}) {
  spec.validate();
  policy.validate();
  const auto& b = p.baseline();
  if (x <= b.lower() || x >= b.upper()) return {0.0, true, 0};
  const double l = p.lambda();
  const double W = b.odds(x);
  const double front = std::exp(numeric::log_factorial(spec.n) - numeric::log_factorial(spec.r - 1) -
                                numeric::log_factorial(spec.n - spec.r)) *
                       l * l / (1.0 + l) * b.pdf(x) * std::exp(-2.0 * b.log_sf(x));
  const double poly = (1.0 + l + l * W + 0.5 * l * l * W * W) / (1.0 + l);
  const double bump = 1.0 + 0.5 * l * W * W;

  numeric::kahan_sum total;
  bool ok = true;
  std::size_t terms = 0;
  for (unsigned s = 0; s <= spec.n - spec.r; ++s) {
    for (unsigned k = 0; k <= spec.r + s - 1; ++k) {
      const double sign = (s + k) % 2 ? -1.0 : 1.0;
      const double outer = sign * numeric::binomial(spec.n - spec.r, s) *
                           numeric::binomial(spec.r + s - 1, k) * std::pow(poly, k) * bump;
      detail::tail_monitor mon(policy);
      const double y = (k + 1.0) * l * W;
      double term = 1.0;
      for (std::size_t i = 0; i <= policy.max_index_per_sum; ++i) {
        if (i > 0) term *= -y / static_cast<double>(i);
        mon.add_block(term, std::abs(term), 1);
        if (policy.mode == TruncationMode::adaptive_until_tail && mon.tail_small()) break;
      }
      const auto e = mon.result();
      ok = ok && e.converged;
      terms += e.terms;
      total.add(outer * e.value);
    }
  }
  return {front * total.value(), ok, terms};
}

// Stress-strength reliability.

struct ReliabilityInputs {
  double lambda1 = 1.0;
  double lambda2 = 1.0;
  BaselineModel baseline = BaselineModel::exponential(1.0);

  void validate() const {
    if (!(lambda1 > 0.0 && std::isfinite(lambda1)) || !(lambda2 > 0.0 && std::isfinite(lambda2))) {
      throw parameter_error("lambda1 and lambda2 must be positive and finite");
    }
  }
};

/// R = P(X2 < X1) = integral of f1 F2, where Xk has shape lambda_k and both
/// share the baseline.
inline SeriesResult stress_strength_R(const ReliabilityInputs& in, Method method = Method::quadrature,
                                    const TruncationPolicy& policy = {}) {
  in.validate();
  const OxgParams p1(in.lambda1, in.baseline), p2(in.lambda2, in.baseline);
  const auto& b = in.baseline;
  if (method == Method::quadrature) {
    auto pts = integration_breakpoints(p1, b.lower(), b.upper());
    const auto more = integration_breakpoints(p2, b.lower(), b.upper());
    pts.insert(pts.end(), more.begin(), more.end());
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    return detail::from_quadrature(integrate(
        [&](double x) {
          const double f = pdf(p1, x);
          return f == 0.0 ? 0.0 : f * cdf(p2, x);
        },
        std::span<const double>(pts), oracle_quadrature));
  }
  // f1 = sum_a P_a g G^a and F2 = sum_c Q_c G^{c+1} / (c + 1), so each pair
  // contributes P_a Q_c / ((c + 1)(a + c + 2)).
  const MixtureWeights w1(in.lambda1, policy), w2(in.lambda2, policy);
  const auto &P = w1.coefficients(), &Q = w2.coefficients();
  const auto &PA = w1.magnitudes(), &QA = w2.magnitudes();
  detail::tail_monitor mon(policy);
  for (std::size_t s = 0; s <= policy.max_index_per_sum; ++s) {
    numeric::kahan_sum block;
    double mag = 0.0;
    for (std::size_t a = 0; a <= s; ++a) {
      const std::size_t c = s - a;
      const double d = static_cast<double>(c + 1) * static_cast<double>(s + 2);
      block.add(P[a] * Q[c] / d);
      mag += PA[a] * QA[c] / d;
    }
    mon.add_block(block.value(), mag, s + 1);
    if (policy.mode == TruncationMode::adaptive_until_tail && mon.tail_small() && s >= 2) break;
  }
  return mon.result();
}

// Residual life.

/// E[(X - t)^r | X > t].
inline SeriesResult residual_moment(const OxgParams& p, unsigned r, double t,
                                    Method method = Method::quadrature,
                                    const TruncationPolicy& policy = {}) {
  const auto& b = p.baseline();
  detail::require_interior(b, t, "residual_moment");
  const double S = survival(p, t);
  if (!(S > 1e-300)) throw domain_error("residual_moment: survival vanishes at t");
  if (method == Method::quadrature) {
    auto q = integrate_against(
        p, [&](double x) { return detail::ipow(x - t, r) * pdf(p, x); }, t, b.upper(),
        oracle_quadrature);
    q.value /= S;
    return detail::from_quadrature(q);
  }
  const MixtureWeights w(p.lambda(), policy);
  SeriesResult out;
  if (b.kind() == BaselineKind::uniform) {
    const double th = b.param(0);
    out = sum_power_series(
        w,
        [&](std::size_t m) {
          numeric::kahan_sum k;
          for (unsigned s = 0; s <= r; ++s) {
            const double e = static_cast<double>(m + s + 1);
            const double span = (std::pow(th, e) - std::pow(t, e)) /
                                (std::pow(th, static_cast<double>(m + 1)) * e);
            k.add(numeric::binomial(r, s) * detail::ipow(-t, r - s) * span);
          }
          return k.value();
        },
        policy);
  } else {
    detail::kernel_cache k([&](std::size_t m) {
      return detail::exp_g_integral(b, [&](double x) { return detail::ipow(x - t, r); }, m, t,
                                    b.upper());
    });
    out = sum_power_series(w, k, policy);
  }
  out.value /= S;
  return out;
}

/// E[(t - X)^r | X <= t].
inline SeriesResult reversed_residual_moment(const OxgParams& p, unsigned r, double t,
                                             Method method = Method::quadrature,
                                             const TruncationPolicy& policy = {}) {
  const auto& b = p.baseline();
  detail::require_interior(b, t, "reversed_residual_moment");
  const double F = cdf(p, t);
  if (!(F > 1e-300)) throw domain_error("reversed_residual_moment: cdf vanishes at t");
  if (method == Method::quadrature) {
    auto q = integrate_against(
        p, [&](double x) { return detail::ipow(t - x, r) * pdf(p, x); }, b.lower(), t,
        oracle_quadrature);
    q.value /= F;
    return detail::from_quadrature(q);
  }
  const MixtureWeights w(p.lambda(), policy);
  SeriesResult out;
  if (b.kind() == BaselineKind::uniform) {
    const double th = b.param(0);
    out = sum_power_series(
        w,
        [&](std::size_t m) {
          numeric::kahan_sum k;
          for (unsigned s = 0; s <= r; ++s) {
            const double e = static_cast<double>(m + s + 1);
            const double part = std::exp(e * std::log(t) - static_cast<double>(m + 1) * std::log(th)) / e;
            k.add(numeric::binomial(r, s) * detail::ipow(t, r - s) * (s % 2 ? -1.0 : 1.0) * part);
          }
          return k.value();
        },
        policy);
  } else {
    detail::kernel_cache k([&](std::size_t m) {
      return detail::exp_g_integral(b, [&](double x) { return detail::ipow(t - x, r); }, m,
                                    b.lower(), t);
    });
    out = sum_power_series(w, k, policy);
  }
  out.value /= F;
  return out;
}

}  // namespace oxg
