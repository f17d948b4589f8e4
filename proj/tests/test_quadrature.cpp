#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "revhardy/quadrature.hpp"

using namespace revhardy;

TEST(Quadrature, EndpointPowerSingularities) {
  for (double g : {-0.9, -0.5, 0.0, 1.0, 3.0}) {
    const auto r = integrate([g](double x) { return std::pow(x, g); }, 0.0, 2.0, {}, {g, std::nullopt});
    const double exact = std::pow(2.0, g + 1.0) / (g + 1.0);
    EXPECT_NEAR(r.value / exact, 1.0, 1e-9) << "gamma = " << g;
  }
}

TEST(Quadrature, SlowAlgebraicTail) {
  const auto r = integrate([](double x) { return std::pow(x, -1.01); }, 1.0, kInf, {}, {std::nullopt, -1.01});
  EXPECT_NEAR(r.value / 100.0, 1.0, 1e-8);
}

TEST(Quadrature, TailProductUnderflowsBeforeCut) {
  // x^1.67 * x^-2.7 underflows near x = 1e140 but x^-1.03 still has mass there.
  const QuadratureConfig tight{1e-11, 1e-14};
  const auto r = integrate([](double x) { return std::pow(x, 1.67) * std::pow(x, -2.7); }, 1.0, kInf, tight,
                           {std::nullopt, -1.03});
  EXPECT_NEAR(r.value / (1.0 / 0.03), 1.0, 1e-9);
}

TEST(Quadrature, HeadProductUnderflowsBeforeCut) {
  const QuadratureConfig tight{1e-11, 1e-14};
  const auto r = integrate([](double x) { return std::pow(x, 2.7) * std::pow(x, -3.67); }, 0.0, 1.0, tight,
                           {-0.97, std::nullopt});
  EXPECT_NEAR(r.value / (1.0 / 0.03), 1.0, 1e-9);
}

TEST(Quadrature, SemiAxisWithBothEnds) {
  const auto r = integrate_semiaxis([](double x) { return 1.0 / (std::sqrt(x) * (1.0 + x)); }, {}, {-0.5, -1.5});
  EXPECT_NEAR(r.value / std::numbers::pi, 1.0, 1e-9);
}

TEST(Quadrature, InteriorKernelSingularity) {
  const std::vector<Singularity> s{{0.3, -0.3}};
  const auto r = integrate([](double y) { return std::pow(std::abs(0.3 - y), -0.3); }, 0.0, 1.0, {}, {}, s);
  const double exact = (std::pow(0.3, 0.7) + std::pow(0.7, 0.7)) / 0.7;
  EXPECT_NEAR(r.value / exact, 1.0, 1e-9);
}

TEST(Quadrature, NonIntegrableEndpointIsReported) {
  try {
    integrate([](double x) { return 1.0 / x; }, 0.0, 1.0, {}, {-1.0, std::nullopt});
    FAIL() << "expected DivergentIntegral";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::DivergentIntegral);
  }
  try {
    integrate([](double x) { return 1.0 / x; }, 1.0, kInf, {}, {std::nullopt, -1.0});
    FAIL() << "expected DivergentIntegral";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::DivergentIntegral);
  }
}

TEST(Quadrature, SmoothReferenceValues) {
  EXPECT_NEAR(integrate([](double x) { return std::exp(-x * x); }, 0.0, kInf).value, std::sqrt(std::numbers::pi) / 2.0,
              1e-10);
  EXPECT_NEAR(integrate([](double x) { return std::sin(x); }, 0.0, std::numbers::pi).value, 2.0, 1e-12);
}

TEST(Quadrature, BadConfigurationIsRejected) {
  QuadratureConfig c;
  c.rel_tol = 0.0;
  EXPECT_THROW(integrate([](double) { return 1.0; }, 0.0, 1.0, c), Error);
}

TEST(Quadrature, LogGrid) {
  const auto g = log_grid(1e-2, 1e2, 5);
  ASSERT_EQ(g.size(), 5u);
  EXPECT_EQ(g.front(), 1e-2);
  EXPECT_EQ(g.back(), 1e2);
  EXPECT_NEAR(g[2], 1.0, 1e-15);
  EXPECT_TRUE(log_grid(1.0, 2.0, 0).empty());
}
