// Copyright 2026 The conformal-dbar Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include "cdbar/quadrature.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <tuple>
#include <vector>

#include "cdbar/common.hpp"

namespace cdbar {
namespace {

// Integral of (1 - x)^a (1 + x)^b over [-1, 1].
double jacobi_mass(double a, double b) {
  return std::pow(2.0, a + b + 1) * std::tgamma(a + 1) * std::tgamma(b + 1) / std::tgamma(a + b + 2);
}

TEST(GaussLegendre, TwoPointRule) {
  const QuadratureRule q = gauss_legendre(2);
  EXPECT_NEAR(std::abs(q.nodes(0)), 1 / std::sqrt(3.0), 1e-15);
  EXPECT_NEAR(q.nodes(0) + q.nodes(1), 0, 1e-15);
  EXPECT_NEAR(q.weights(0), 1, 1e-14);
  EXPECT_NEAR(q.weights(1), 1, 1e-14);
}

TEST(GaussLegendre, ExactForDegree2nMinus1) {
  const int n = 7;
  const QuadratureRule q = gauss_legendre(n);
  for (int d = 0; d <= 2 * n - 1; ++d) {
    double sum = 0;
    for (int i = 0; i < n; ++i) sum += q.weights(i) * std::pow(q.nodes(i), d);
    const double exact = d % 2 ? 0.0 : 2.0 / (d + 1);
    EXPECT_NEAR(sum, exact, 1e-14) << d;
  }
}

TEST(GaussJacobi, ChebyshevClosedForm) {
  const int n = 9;
  const QuadratureRule q = gauss_jacobi(n, -0.5, -0.5);
  std::vector<double> nodes(q.nodes.data(), q.nodes.data() + n);
  std::sort(nodes.begin(), nodes.end());
  for (int k = 1; k <= n; ++k) {
    const double want = std::cos((2.0 * (n + 1 - k) - 1) * kPi / (2 * n));
    EXPECT_NEAR(nodes[k - 1], want, 1e-13);
  }
  for (int i = 0; i < n; ++i) EXPECT_NEAR(q.weights(i), kPi / n, 1e-13);
}

TEST(GaussJacobi, MomentsMatchBetaIntegrals) {
  for (auto [a, b] : {std::pair{-0.75, 0.0}, {0.0, -0.4}, {1.5, -0.5}, {-0.2, 2.0}}) {
    const QuadratureRule q = gauss_jacobi(12, a, b);
    EXPECT_NEAR(q.weights.sum(), jacobi_mass(a, b), 1e-12) << a << " " << b;
    // int x w = (b - a) / (a + b + 2) * mass
    const double first = q.weights.dot(q.nodes);
    EXPECT_NEAR(first, (b - a) / (a + b + 2) * jacobi_mass(a, b), 1e-12);
    for (int i = 0; i < 12; ++i) {
      EXPECT_GT(q.weights(i), 0);
      EXPECT_LT(std::abs(q.nodes(i)), 1);
    }
  }
}

TEST(GaussJacobi, RejectsBadParameters) {
  for (auto [n, a, b] : {std::tuple{0, 0.0, 0.0}, {3, -1.0, 0.0}, {3, 0.0, -1.5}}) {
    try {
      gauss_jacobi(n, a, b);
      FAIL();
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::kInvalidParameter);
    }
  }
}

}  // namespace
}  // namespace cdbar
