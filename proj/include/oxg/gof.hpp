#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "oxg/errors.hpp"

namespace oxg {

/// Kolmogorov-Smirnov distance sup |F_n - F| between the empirical cdf of
/// the sample and a continuous cdf.
template <class Cdf>
double ks_statistic(std::vector<double> xs, Cdf&& cdf) {
  if (xs.empty()) throw data_error("ks_statistic: empty sample");
  std::sort(xs.begin(), xs.end());
  const double n = static_cast<double>(xs.size());
  double d = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double f = cdf(xs[i]);
    d = std::max({d, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
  }
  return d;
}

}  // namespace oxg
