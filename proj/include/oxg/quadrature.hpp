#pragma once

// Adaptive Gauss-Kronrod (10/21) integration with worst-panel-first
// refinement. Semi-infinite ranges are mapped onto [0, 1) by
// x = a + u / (1 - u) before subdivision.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <queue>
#include <span>
#include <vector>

#include "oxg/errors.hpp"
#include "oxg/numeric.hpp"

namespace oxg {

struct QuadratureResult {
  double value = 0.0;
  double abs_error_estimate = 0.0;
  std::size_t evaluations = 0;
  bool converged = false;
};

struct QuadratureOptions {
  double abs_tol = 1e-10;
  double rel_tol = 1e-10;
  std::size_t max_panels = 10000;
};

namespace detail {

inline constexpr std::array<double, 11> gk21_nodes = {
    0.995657163025808080735527280689003, 0.973906528517171720077964012084452,
    0.930157491355708226001207180059508, 0.865063366688984510732096688423493,
    0.780817726586416897063717578345042, 0.679409568299024406234327365114874,
    0.562757134668604683339000099272694, 0.433395394129247190799265943165784,
    0.294392862701460198131126603103866, 0.148874338981631210884826001129720,
    0.0};

inline constexpr std::array<double, 11> gk21_weights = {
    0.011694638867371874278064396062192, 0.032558162307964727478818972459390,
    0.054755896574351996031381300244580, 0.075039674810919952767043140916190,
    0.093125454583697605535065465083366, 0.109387158802297641899210590325805,
    0.123491976262065851077208980260210, 0.134709217311473325928054001771707,
    0.142775938577060080797094273138717, 0.147739104901338491374841515972068,
    0.149445554002916905664936468389821};

// Gauss weights for the odd-indexed Kronrod nodes.
inline constexpr std::array<double, 5> g10_weights = {
    0.066671344308688137593568809893332, 0.149451349150580593145776339657697,
    0.219086362515982043995534934228163, 0.269266719309996355091226921569469,
    0.295524224714752870173892994651338};

enum class segment_map { identity, right_infinite, left_infinite };

struct segment {
  double anchor;  // finite endpoint for the mapped kinds
  segment_map map;
};

struct panel {
  std::size_t seg;
  double a, b;
  double value, error;
};

struct panel_order {
  // Largest error on top; ties resolved toward the leftmost panel.
  bool operator()(const panel& p, const panel& q) const {
    if (p.error != q.error) return p.error < q.error;
    if (p.seg != q.seg) return p.seg > q.seg;
    return p.a > q.a;
  }
};

template <class F>
double eval_mapped(F& f, const segment& s, double u) {
  switch (s.map) {
    case segment_map::identity:
      return f(u);
    case segment_map::right_infinite: {
      const double w = 1.0 - u;
      if (!(w > 0.0)) return 0.0;
      const double y = f(s.anchor + u / w);
      return y == 0.0 ? 0.0 : y / w / w;
    }
    case segment_map::left_infinite: {
      const double w = 1.0 - u;
      if (!(w > 0.0)) return 0.0;
      const double y = f(s.anchor - u / w);
      return y == 0.0 ? 0.0 : y / w / w;
    }
  }
  return 0.0;
}

template <class F>
panel gk21(F& f, const segment& s, std::size_t seg, double a, double b) {
  constexpr double eps = std::numeric_limits<double>::epsilon();
  constexpr double uflow = std::numeric_limits<double>::min();
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);

  std::array<double, 10> f1{}, f2{};
  const double fc = eval_mapped(f, s, center);
  double resk = fc * gk21_weights[10];
  double resg = 0.0;
  double resabs = std::abs(resk);
  for (std::size_t j = 0; j < 10; ++j) {
    const double dx = half * gk21_nodes[j];
    f1[j] = eval_mapped(f, s, center - dx);
    f2[j] = eval_mapped(f, s, center + dx);
    const double sum = f1[j] + f2[j];
    resk += gk21_weights[j] * sum;
    resabs += gk21_weights[j] * (std::abs(f1[j]) + std::abs(f2[j]));
    if (j % 2 == 1) resg += g10_weights[j / 2] * sum;
  }
  const double mean = 0.5 * resk;
  double resasc = gk21_weights[10] * std::abs(fc - mean);
  for (std::size_t j = 0; j < 10; ++j) {
    resasc += gk21_weights[j] * (std::abs(f1[j] - mean) + std::abs(f2[j] - mean));
  }
  resk *= half;
  resabs *= std::abs(half);
  resasc *= std::abs(half);
  double err = std::abs((resk - resg * half));
  if (resasc != 0.0 && err != 0.0) {
    err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
  }
  if (resabs > uflow / (50.0 * eps)) err = std::max(50.0 * eps * resabs, err);
  if (!std::isfinite(resk)) err = std::numeric_limits<double>::infinity();
  return {seg, a, b, resk, err};
}

inline void push_segments(std::vector<segment>& segs,
                          std::vector<std::pair<double, double>>& ranges,
                          double lo, double hi) {
  constexpr double inf = std::numeric_limits<double>::infinity();
  if (!(lo < hi)) return;
  if (lo == -inf && hi == inf) {
    push_segments(segs, ranges, -inf, 0.0);
    push_segments(segs, ranges, 0.0, inf);
  } else if (hi == inf) {
    segs.push_back({lo, segment_map::right_infinite});
    ranges.emplace_back(0.0, 1.0);
  } else if (lo == -inf) {
    segs.push_back({hi, segment_map::left_infinite});
    ranges.emplace_back(0.0, 1.0);
  } else {
    segs.push_back({0.0, segment_map::identity});
    ranges.emplace_back(lo, hi);
  }
}

}  // namespace detail

/// Integrates f over consecutive intervals [p0, p1], [p1, p2], ... given by
/// the sorted breakpoint list. The first and last breakpoints may be
/// infinite. Breakpoints place known features (modes, tails) on panel edges.
template <class F>
QuadratureResult integrate(F&& f, std::span<const double> breakpoints,
                           const QuadratureOptions& opt = {}) {
  if (!(opt.abs_tol > 0.0) || !(opt.rel_tol > 0.0)) {
    throw domain_error("integrate: tolerances must be positive");
  }
  std::vector<detail::segment> segs;
  std::vector<std::pair<double, double>> ranges;
  for (std::size_t i = 0; i + 1 < breakpoints.size(); ++i) {
    if (breakpoints[i + 1] < breakpoints[i]) {
      throw domain_error("integrate: breakpoints must be sorted");
    }
    detail::push_segments(segs, ranges, breakpoints[i], breakpoints[i + 1]);
  }

  QuadratureResult out;
  if (segs.empty()) {
    out.converged = true;
    return out;
  }

  std::priority_queue<detail::panel, std::vector<detail::panel>,
                      detail::panel_order>
      active;
  std::vector<detail::panel> frozen;
  double total = 0.0, total_err = 0.0;
  for (std::size_t s = 0; s < segs.size(); ++s) {
    auto p = detail::gk21(f, segs[s], s, ranges[s].first, ranges[s].second);
    out.evaluations += 21;
    total += p.value;
    total_err += p.error;
    active.push(p);
  }

  auto target = [&] { return std::max(opt.abs_tol, opt.rel_tol * std::abs(total)); };
  std::size_t panels = segs.size();
  while (!active.empty() && total_err > target() && panels < opt.max_panels) {
    detail::panel worst = active.top();
    active.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b) || !std::isfinite(worst.error)) {
      frozen.push_back(worst);
      continue;
    }
    auto left = detail::gk21(f, segs[worst.seg], worst.seg, worst.a, mid);
    auto right = detail::gk21(f, segs[worst.seg], worst.seg, mid, worst.b);
    out.evaluations += 42;
    ++panels;
    total += left.value + right.value - worst.value;
    total_err += left.error + right.error - worst.error;
    active.push(left);
    active.push(right);
  }

  std::vector<detail::panel> all = std::move(frozen);
  while (!active.empty()) {
    all.push_back(active.top());
    active.pop();
  }
  std::sort(all.begin(), all.end(), [](const auto& p, const auto& q) {
    return p.seg != q.seg ? p.seg < q.seg : p.a < q.a;
  });
  numeric::kahan_sum v, e;
  for (const auto& p : all) {
    v.add(p.value);
    e.add(p.error);
  }
  out.value = v.value();
  out.abs_error_estimate = e.value();
  out.converged = std::isfinite(out.value) &&
                  out.abs_error_estimate <=
                      std::max(opt.abs_tol, opt.rel_tol * std::abs(out.value));
  return out;
}

template <class F>
QuadratureResult integrate(F&& f, double lower, double upper,
                           double abs_tol = 1e-10, double rel_tol = 1e-10) {
  if (upper < lower) {
    auto r = integrate(f, upper, lower, abs_tol, rel_tol);
    r.value = -r.value;
    return r;
  }
  const std::array<double, 2> bp = {lower, upper};
  return integrate(f, std::span<const double>(bp),
                   QuadratureOptions{abs_tol, rel_tol, 10000});
}

}  // namespace oxg
