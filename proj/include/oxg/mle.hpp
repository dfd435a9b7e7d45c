#pragma once

// Maximum-likelihood fitting: log-likelihood, score vector and a
// multi-start Nelder-Mead search in a transformed parameter space.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "oxg/baseline.hpp"
#include "oxg/datasets.hpp"
#include "oxg/errors.hpp"
#include "oxg/family.hpp"
#include "oxg/numeric.hpp"

namespace oxg {

inline void check_observations(const BaselineModel& b, const Dataset& data) {
  if (data.observations.empty()) throw data_error("dataset '" + data.name + "' is empty");
  for (std::size_t i = 0; i < data.size(); ++i) {
    const double x = data.observations[i];
    if (!(x > b.lower() && x < b.upper())) {
      throw data_error("observation " + std::to_string(i) + " (" + std::to_string(x) +
                           ") is outside the support of " + b.describe(),
                       i);
    }
  }
}

inline double log_likelihood(const OxgParams& p, const Dataset& data) {
  check_observations(p.baseline(), data);
  numeric::kahan_sum s;
  for (double x : data.observations) s.add(log_pdf(p, x));
  return s.value();
}

namespace detail {

/// Partial derivative of the baseline odds at x with respect to parameter
/// k, by central differences with a relative step.
inline double dodds_dparam(const BaselineModel& b, std::size_t k, double x) {
  const double v = b.param(k);
  const double h = 1e-6 * std::max(std::abs(v), 1e-3);
  auto odds_at = [&](double pv) {
    std::array<double, 2> q = {b.param(0), b.size() > 1 ? b.param(1) : 0.0};
    q[k] = pv;
    return BaselineModel::make(b.kind(), std::span<const double>(q.data(), b.size())).odds(x);
  };
  if (b.kind() == BaselineKind::uniform && !(v - h > x)) {
    return (odds_at(v + 2 * h) - odds_at(v + h)) / h;
  }
  return (odds_at(v + h) - odds_at(v - h)) / (2 * h);
}

}  // namespace detail

/// Gradient of the log-likelihood in natural parameters (lambda, xi...).
inline std::vector<double> score(const OxgParams& p, const Dataset& data) {
  const auto& b = p.baseline();
  check_observations(b, data);
  const double l = p.lambda();
  const double n = static_cast<double>(data.size());
  std::vector<numeric::kahan_sum> acc(p.size());
  acc[0].add(2.0 * n / l - n / (1.0 + l));
  for (double x : data.observations) {
    const double v = b.odds(x);
    const double bump = 1.0 + 0.5 * l * v * v;
    acc[0].add(-v);
    acc[0].add(0.5 * v * v / bump);
    const auto dg = b.dlog_pdf(x);
    const auto ds = b.dlog_sf(x);
    for (std::size_t k = 0; k < b.size(); ++k) {
      const double dv = detail::dodds_dparam(b, k, x);
      acc[k + 1].add(dg[k] - 2.0 * ds[k] + l * v * dv / bump - l * dv);
    }
  }
  std::vector<double> out(p.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = acc[i].value();
  return out;
}

inline double aic(double log_likelihood, std::size_t free_parameters) {
  return 2.0 * static_cast<double>(free_parameters) - 2.0 * log_likelihood;
}

struct FitOptions {
  std::size_t max_iterations = 2000;  // per start
  std::size_t max_starts = 8;
  double simplex_tol = 1e-9;
  double value_tol = 1e-10;
  double score_tol = 1e-4;
};

struct FitResult {
  OxgParams params;
  double log_likelihood = 0.0;
  double aic = 0.0;
  std::size_t iterations = 0;
  bool converged = false;
  double score_norm = 0.0;
  std::size_t restarts_used = 0;
};

inline double aic(const FitResult& fit) { return aic(fit.log_likelihood, fit.params.size()); }

/// Maps between natural parameters and the unconstrained search space:
/// log lambda, log of positive baseline parameters, the normal mean as is,
/// and the uniform bound as max(data) + e^eta.
class ParameterMap {
 public:
  ParameterMap(BaselineKind kind, double data_max) : kind_(kind), data_max_(data_max) {}

  std::size_t size() const { return 1 + parameter_count(kind_); }

  OxgParams to_params(const std::vector<double>& z) const {
    std::array<double, 2> q{};
    switch (kind_) {
      case BaselineKind::uniform:
        q[0] = data_max_ + std::exp(z[1]);
        break;
      case BaselineKind::exponential:
        q[0] = std::exp(z[1]);
        break;
      case BaselineKind::burr_xii:
        q[0] = std::exp(z[1]);
        q[1] = std::exp(z[2]);
        break;
      case BaselineKind::normal:
        q[0] = z[1];
        q[1] = std::exp(z[2]);
        break;
    }
    return OxgParams(std::exp(z[0]),
                     BaselineModel::make(kind_, std::span<const double>(q.data(), size() - 1)));
  }

  std::vector<double> from_params(const OxgParams& p) const {
    const auto& b = p.baseline();
    std::vector<double> z{std::log(p.lambda())};
    switch (kind_) {
      case BaselineKind::uniform:
        z.push_back(std::log(b.param(0) - data_max_));
        break;
      case BaselineKind::exponential:
        z.push_back(std::log(b.param(0)));
        break;
      case BaselineKind::burr_xii:
        z.push_back(std::log(b.param(0)));
        z.push_back(std::log(b.param(1)));
        break;
      case BaselineKind::normal:
        z.push_back(b.param(0));
        z.push_back(std::log(b.param(1)));
        break;
    }
    return z;
  }

  /// d(natural) / d(transformed), componentwise.
  std::vector<double> jacobian(const OxgParams& p) const {
    const auto& b = p.baseline();
    std::vector<double> j{p.lambda()};
    switch (kind_) {
      case BaselineKind::uniform:
        j.push_back(b.param(0) - data_max_);
        break;
      case BaselineKind::exponential:
        j.push_back(b.param(0));
        break;
      case BaselineKind::burr_xii:
        j.push_back(b.param(0));
        j.push_back(b.param(1));
        break;
      case BaselineKind::normal:
        j.push_back(1.0);
        j.push_back(b.param(1));
        break;
    }
    return j;
  }

 private:
  BaselineKind kind_;
  double data_max_;
};

/// Deterministic starting points, in priority order.
inline std::vector<OxgParams> fit_starting_points(const Dataset& data, BaselineKind kind,
                                                  std::size_t max_starts = 8) {
  const auto& xs = data.observations;
  const double n = static_cast<double>(xs.size());
  const double mean = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  const double sd = std::sqrt(ss / std::max(1.0, n - 1.0));
  std::vector<double> sorted = xs;
  std::sort(sorted.begin(), sorted.end());
  const std::size_t h = sorted.size() / 2;
  const double median = sorted.size() % 2 ? sorted[h] : 0.5 * (sorted[h - 1] + sorted[h]);
  const double mx = sorted.back();

  std::vector<BaselineModel> guesses;
  switch (kind) {
    case BaselineKind::uniform:
      guesses = {BaselineModel::uniform(1.05 * mx), BaselineModel::uniform(2.0 * mx)};
      break;
    case BaselineKind::exponential:
      guesses = {BaselineModel::exponential(1.0 / mean), BaselineModel::exponential(1.0 / median)};
      break;
    case BaselineKind::burr_xii:
      for (double a : {1.0, 2.0}) {
        for (double t : {1.0, 2.0}) guesses.push_back(BaselineModel::burr_xii(a, t));
      }
      break;
    case BaselineKind::normal:
      guesses = {BaselineModel::normal(mean, sd)};
      break;
  }
  std::vector<OxgParams> out;
  for (double l : {1.0, 0.1, 10.0}) {
    for (const auto& g : guesses) {
      if (out.size() < max_starts) out.emplace_back(l, g);
    }
  }
  return out;
}

namespace detail {

struct simplex_outcome {
  std::vector<double> best;
  double value;
  std::size_t iterations;
  bool converged;
};

/// Nelder-Mead minimization with the standard coefficients. Stops when the
/// simplex diameter and the spread of vertex values are both under
/// tolerance.
template <class F>
simplex_outcome nelder_mead(F&& f, std::vector<double> x0, double step, const FitOptions& opt) {
  const std::size_t d = x0.size();
  std::vector<std::vector<double>> v(d + 1, x0);
  std::vector<double> fv(d + 1);
  for (std::size_t i = 0; i < d; ++i) v[i + 1][i] += step;
  for (std::size_t i = 0; i <= d; ++i) fv[i] = f(v[i]);

  std::vector<std::size_t> order(d + 1);
  auto sort_vertices = [&] {
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return fv[a] < fv[b]; });
    std::vector<std::vector<double>> nv;
    std::vector<double> nf;
    for (std::size_t i : order) {
      nv.push_back(v[i]);
      nf.push_back(fv[i]);
    }
    v.swap(nv);
    fv.swap(nf);
  };
  auto diameter = [&] {
    double m = 0.0;
    for (std::size_t i = 1; i <= d; ++i) {
      for (std::size_t k = 0; k < d; ++k) m = std::max(m, std::abs(v[i][k] - v[0][k]));
    }
    return m;
  };
  auto blend = [&](const std::vector<double>& c, const std::vector<double>& x, double t) {
    std::vector<double> y(d);
    for (std::size_t k = 0; k < d; ++k) y[k] = c[k] + t * (x[k] - c[k]);
    return y;
  };

  sort_vertices();
  std::size_t it = 0;
  bool done = false;
  while (it < opt.max_iterations) {
    if (diameter() <= opt.simplex_tol && std::abs(fv[d] - fv[0]) <= opt.value_tol) {
      done = true;
      break;
    }
    ++it;
    std::vector<double> c(d, 0.0);
    for (std::size_t i = 0; i < d; ++i) {
      for (std::size_t k = 0; k < d; ++k) c[k] += v[i][k] / static_cast<double>(d);
    }
    const auto xr = blend(c, v[d], -1.0);
    const double fr = f(xr);
    if (fr < fv[0]) {
      const auto xe = blend(c, v[d], -2.0);
      const double fe = f(xe);
      if (fe < fr) {
        v[d] = xe;
        fv[d] = fe;
      } else {
        v[d] = xr;
        fv[d] = fr;
      }
    } else if (fr < fv[d - 1]) {
      v[d] = xr;
      fv[d] = fr;
    } else {
      const bool outside = fr < fv[d];
      const auto xc = outside ? blend(c, xr, 0.5) : blend(c, v[d], 0.5);
      const double fc = f(xc);
      if (fc < (outside ? fr : fv[d])) {
        v[d] = xc;
        fv[d] = fc;
      } else {
        for (std::size_t i = 1; i <= d; ++i) {
          v[i] = blend(v[0], v[i], 0.5);
          fv[i] = f(v[i]);
        }
      }
    }
    sort_vertices();
  }
  return {v[0], fv[0], it, done};
}

}  // namespace detail

inline void check_not_degenerate(const Dataset& data) {
  if (data.observations.empty()) throw data_error("dataset '" + data.name + "' is empty");
  for (std::size_t i = 0; i < data.size(); ++i) {
    if (!std::isfinite(data.observations[i])) {
      throw data_error("observation " + std::to_string(i) + " is not finite", i);
    }
  }
  const auto [lo, hi] = std::minmax_element(data.observations.begin(), data.observations.end());
  if (*lo == *hi) throw degenerate_data_error("all observations are equal");
}

/// Infinity norm of the transformed-space score, divided by n.
inline double scaled_score_norm(const OxgParams& p, const Dataset& data, const ParameterMap& map) {
  const auto u = score(p, data);
  const auto j = map.jacobian(p);
  double m = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) m = std::max(m, std::abs(u[i] * j[i]));
  return m / static_cast<double>(data.size());
}

inline FitResult fit(const Dataset& data, BaselineKind kind, const FitOptions& opt = {}) {
  check_not_degenerate(data);
  const double mx = *std::max_element(data.observations.begin(), data.observations.end());
  if (kind != BaselineKind::normal && kind != BaselineKind::uniform) {
    check_observations(BaselineModel::exponential(1.0), data);
  }
  if (kind == BaselineKind::uniform) check_observations(BaselineModel::uniform(2.0 * mx), data);

  const ParameterMap map(kind, mx);
  auto objective = [&](const std::vector<double>& z) {
    for (double zi : z) {
      if (!std::isfinite(zi) || std::abs(zi) > 700.0) return std::numeric_limits<double>::infinity();
    }
    try {
      const double ll = log_likelihood(map.to_params(z), data);
      return std::isfinite(ll) ? -ll : std::numeric_limits<double>::infinity();
    } catch (const error&) {
      return std::numeric_limits<double>::infinity();
    }
  };

  const auto starts = fit_starting_points(data, kind, opt.max_starts);
  std::size_t best = 0;
  std::vector<detail::simplex_outcome> runs;
  std::size_t total_iterations = 0;
  for (std::size_t s = 0; s < starts.size(); ++s) {
    auto r = detail::nelder_mead(objective, map.from_params(starts[s]), 0.5, opt);
    total_iterations += r.iterations;
    runs.push_back(std::move(r));
    if (runs[s].value < runs[best].value) best = s;
  }
  const auto& r = runs[best];
  FitResult out{map.to_params(r.best)};
  out.log_likelihood = log_likelihood(out.params, data);
  out.aic = aic(out.log_likelihood, out.params.size());
  out.iterations = total_iterations;
  out.restarts_used = starts.size();
  out.score_norm = scaled_score_norm(out.params, data, map);
  out.converged = r.converged && std::isfinite(out.log_likelihood) && out.score_norm <= opt.score_tol;
  return out;
}

}  // namespace oxg
