#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "oxg/family.hpp"
#include "oxg/quadrature.hpp"
#include "test_support.hpp"

using namespace oxg;
using oxg::testing::all_kinds;
using oxg::testing::random_params;

namespace {

const double ln2 = std::log(2.0);
// 1 - (3.5 / 2) e^{-1}: the closed form at odds t = 1 with lambda = 1
const double cdf_at_odds_one = 1.0 - 1.75 * std::exp(-1.0);

OxgParams oxg_exp(double lambda, double theta) {
  return OxgParams(lambda, BaselineModel::exponential(theta));
}
OxgParams oxg_unif(double lambda, double theta) {
  return OxgParams(lambda, BaselineModel::uniform(theta));
}

}  // namespace

TEST(Family, InvalidLambda) {
  EXPECT_THROW(oxg_exp(0.0, 1.0), parameter_error);
  EXPECT_THROW(oxg_exp(-1.0, 1.0), parameter_error);
  EXPECT_THROW(oxg_exp(INFINITY, 1.0), parameter_error);
}

TEST(Family, CdfExamples) {
  EXPECT_EQ(cdf(oxg_exp(3.0, 2.0), 0.0), 0.0);
  EXPECT_EQ(cdf(OxgParams(1.0, BaselineModel::normal(0, 1)), -INFINITY), 0.0);
  EXPECT_NEAR(cdf(oxg_exp(1.0, 1.0), ln2), cdf_at_odds_one, 1e-15);
  EXPECT_NEAR(cdf(oxg_exp(1.0, 1.0), ln2), 0.356210977949975937, 1e-15);
  // quadrature cross-check of the same value
  const auto q = integrate([](double x) { return pdf(oxg_exp(1.0, 1.0), x); }, 0.0, ln2, 1e-13,
                           1e-13);
  EXPECT_NEAR(q.value, cdf_at_odds_one, 1e-12);
  EXPECT_NEAR(cdf(oxg_unif(2.0, 1.0), 1.0 - 1e-12), 1.0, 1e-12);
  EXPECT_EQ(cdf(oxg_unif(2.0, 1.0), 1.0), 1.0);
}

TEST(Family, PdfExamples) {
  EXPECT_DOUBLE_EQ(pdf(oxg_exp(1.0, 1.0), 0.0), 0.5);
  EXPECT_DOUBLE_EQ(pdf(oxg_exp(2.0, 3.0), 0.0), 4.0 * 3.0 / 3.0);
  EXPECT_NEAR(pdf(oxg_unif(1.0, 2.0), 1.0), 1.5 * std::exp(-1.0), 1e-15);
  EXPECT_NEAR(pdf(oxg_unif(1.0, 2.0), 1.0), 0.551819161757163482, 1e-15);
  const double fd = oxg::testing::derivative([](double x) { return cdf(oxg_unif(1.0, 2.0), x); },
                                             1.0, 1e-4);
  EXPECT_NEAR(pdf(oxg_unif(1.0, 2.0), 1.0), fd, 1e-9);
  EXPECT_EQ(pdf(oxg_unif(1.0, 2.0), 2.0), 0.0);
  EXPECT_EQ(pdf(oxg_unif(1.0, 2.0), -0.1), 0.0);
}

TEST(Family, SurvivalExamples) {
  EXPECT_EQ(survival(oxg_exp(1.0, 1.0), 0.0), 1.0);
  EXPECT_NEAR(survival(oxg_exp(1.0, 1.0), ln2), 0.643789022050024063, 1e-15);
  EXPECT_EQ(survival(oxg_unif(1.0, 1.0), 1.0), 0.0);
}

TEST(Family, HazardExamples) {
  for (double lambda : {0.3, 1.0, 4.0}) {
    for (double theta : {0.5, 2.0}) {
      const double limit = lambda * lambda * theta / (1.0 + lambda);
      EXPECT_NEAR(hazard(oxg_exp(lambda, theta), 1e-12), limit, 1e-9 * limit);
    }
  }
  const auto p = oxg_unif(1.0, 2.0);
  EXPECT_NEAR(hazard(p, 1.0), pdf(p, 1.0) / survival(p, 1.0), 1e-14);
  EXPECT_NEAR(hazard(p, 1.0), 1.5 / 1.75, 1e-14);
  EXPECT_THROW(hazard(p, 0.0), domain_error);
  EXPECT_THROW(hazard(p, 2.0), domain_error);
}

TEST(Family, HazardFiniteInFarTail) {
  // survival underflows here but the hazard closed form stays finite
  const auto p = oxg_exp(2.0, 1.0);
  const double x = 7.0;  // odds ~ 1096, lambda * t ~ 2192
  EXPECT_EQ(survival(p, x), 0.0);
  const double h = hazard(p, x);
  EXPECT_TRUE(std::isfinite(h));
  EXPECT_GT(h, 0.0);
}

TEST(Family, ReversedHazard) {
  const auto p = oxg_exp(1.0, 1.0);
  EXPECT_NEAR(reversed_hazard(p, ln2), (1.5 * std::exp(-1.0)) / cdf_at_odds_one, 1e-14);
  EXPECT_THROW(reversed_hazard(p, 0.0), domain_error);
  double prev = 0.0;
  for (double x = 1e-2; x > 1e-8; x /= 10) {
    const double r = reversed_hazard(p, x);
    EXPECT_GT(r, prev);
    prev = r;
  }
  EXPECT_GT(prev, 1e6);
}

TEST(Family, QuantileExamples) {
  const auto p = oxg_exp(1.0, 1.0);
  EXPECT_NEAR(quantile(p, cdf_at_odds_one), ln2, 1e-13);
  EXPECT_NEAR(quantile(p, 1e-300), 0.0, 1e-100);
  EXPECT_THROW(quantile(p, 0.0), domain_error);
  EXPECT_THROW(quantile(p, 1.0), domain_error);
  for (double u : {0.01, 0.1, 0.25, 0.5, 0.75, 0.9, 0.99}) {
    EXPECT_NEAR(cdf(p, quantile(p, u)), u, 1e-9);
  }
}

TEST(Family, QuantileOddsSatisfiesTailEquation) {
  for (double lambda : {0.087, 1.0, 16.8}) {
    const XGammaGenerator gen(lambda);
    for (double u : {1e-8, 0.3, 0.5, 0.9, 1 - 1e-9}) {
      const double t = quantile_odds(OxgParams(lambda, BaselineModel::exponential(1.0)), u);
      EXPECT_LE(std::abs(gen.survival(t) - (1.0 - u)), 1e-12);
    }
  }
}

TEST(Family, SampleBasics) {
  const auto p = oxg_exp(1.0, 1.0);
  EXPECT_TRUE(sample(p, 0, 42).empty());
  EXPECT_EQ(sample(p, 100, 42), sample(p, 100, 42));
  EXPECT_NE(sample(p, 100, 42), sample(p, 100, 43));
}

TEST(Family, SampleMatchesDistribution) {
  const auto p = oxg_unif(1.0, 1.0);
  constexpr std::size_t n = 100000;
  auto xs = sample(p, n, 2024);
  std::sort(xs.begin(), xs.end());
  double d = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double F = cdf(p, xs[i]);
    d = std::max({d, F - static_cast<double>(i) / n, static_cast<double>(i + 1) / n - F});
  }
  EXPECT_LT(d, 1.95 / std::sqrt(static_cast<double>(n)));

  double sum = 0, sum2 = 0;
  for (double x : xs) {
    sum += x;
    sum2 += x * x;
  }
  const double mean = sum / n;
  const double se = std::sqrt((sum2 / n - mean * mean) / n);
  const auto q = integrate([&](double x) { return x * pdf(p, x); }, 0.0, 1.0, 1e-12, 1e-12);
  EXPECT_LT(std::abs(mean - q.value), 3.0 * se);
}

TEST(Family, CriticalPointsSingleMaximum) {
  const auto p = oxg_unif(1.0, 1.0);
  const auto cps = density_critical_points(p);
  ASSERT_EQ(cps.size(), 1u);
  EXPECT_EQ(cps[0].kind, CriticalKind::max);
  // brute-force argmax on a fine grid
  double best_x = 0, best_f = -1;
  for (int i = 1; i < 200000; ++i) {
    const double x = i / 200000.0;
    if (pdf(p, x) > best_f) {
      best_f = pdf(p, x);
      best_x = x;
    }
  }
  EXPECT_NEAR(cps[0].x, best_x, 1e-5);
}

TEST(Family, CriticalPointsAreConsistentlyClassified) {
  std::mt19937_64 rng(5);
  for (auto k : all_kinds) {
    for (int rep = 0; rep < 5; ++rep) {
      const auto p = random_params(k, rng);
      for (const auto& cp : density_critical_points(p)) {
        const double h = 1e-3 * std::max(1.0, std::abs(cp.x));
        const double f0 = pdf(p, cp.x);
        if (cp.kind == CriticalKind::max) {
          EXPECT_GE(f0, pdf(p, cp.x - h));
          EXPECT_GE(f0, pdf(p, cp.x + h));
        } else {
          EXPECT_LE(f0, pdf(p, cp.x - h));
          EXPECT_LE(f0, pdf(p, cp.x + h));
        }
      }
    }
  }
}

TEST(Family, CriticalPointsEmptyForDecreasingDensity) {
  // exponential baseline with lambda = 10: d log f / dx < 0 everywhere
  const auto p = oxg_exp(10.0, 1.0);
  const double lo = quantile(p, 1e-6), hi = quantile(p, 1 - 1e-6);
  for (int i = 1; i < 4096; ++i) {
    const double a = lo + (hi - lo) * (i - 1) / 4095.0;
    const double b = lo + (hi - lo) * i / 4095.0;
    ASSERT_GT(pdf(p, a), pdf(p, b));
  }
  EXPECT_TRUE(density_critical_points(p).empty());
}

class FamilyProperties : public ::testing::TestWithParam<BaselineKind> {};

TEST_P(FamilyProperties, ShapeAndBounds) {
  std::mt19937_64 rng(21);
  for (int rep = 0; rep < 10; ++rep) {
    const auto p = random_params(GetParam(), rng);
    const double lo = quantile(p, 1e-6), hi = quantile(p, 1 - 1e-6);
    double prev_F = 0, prev_S = 1;
    for (int i = 0; i <= 200; ++i) {
      const double x = lo + (hi - lo) * i / 200.0;
      const double F = cdf(p, x), S = survival(p, x), f = pdf(p, x);
      EXPECT_GE(F, prev_F);
      EXPECT_LE(S, prev_S);
      EXPECT_GE(f, 0.0);
      EXPECT_GE(F, 0.0);
      EXPECT_LE(F, 1.0);
      EXPECT_NEAR(F + S, 1.0, 1e-12);
      if (f > 1e-300) {
        EXPECT_NEAR(std::exp(log_pdf(p, x)) / f, 1.0, 1e-12);
      }
      prev_F = F;
      prev_S = S;
    }
  }
}

TEST_P(FamilyProperties, GeneratorIntegralMatchesCdf) {
  std::mt19937_64 rng(22);
  for (int rep = 0; rep < 5; ++rep) {
    const auto p = random_params(GetParam(), rng);
    const auto gen = p.generator();
    for (double u : {0.05, 0.3, 0.6, 0.95}) {
      const double x = quantile(p, u);
      const double t = p.baseline().odds(x);
      const auto q = integrate([&](double s) { return gen.density(s); }, 0.0, t, 1e-13, 1e-13);
      EXPECT_NEAR(cdf(p, x), q.value, 1e-8);
    }
  }
}

TEST_P(FamilyProperties, QuantileRoundTrips) {
  std::mt19937_64 rng(23);
  for (int rep = 0; rep < 5; ++rep) {
    const auto p = random_params(GetParam(), rng);
    for (int i = 1; i < 100; ++i) {
      const double u = i / 100.0;
      const double x = quantile(p, u);
      EXPECT_NEAR(cdf(p, x), u, 1e-9);
      EXPECT_NEAR(quantile(p, cdf(p, x)), x, 1e-9 * std::max(1.0, std::abs(x)));
    }
  }
}

INSTANTIATE_TEST_SUITE_P(AllKinds, FamilyProperties, ::testing::ValuesIn(all_kinds),
                         [](const auto& info) {
                           auto s = std::string(to_string(info.param));
                           for (auto& c : s) if (c == '-') c = '_';
                           return s;
                         });
