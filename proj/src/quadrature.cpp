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

#include <cmath>

#include <Eigen/Eigenvalues>

namespace cdbar {

QuadratureRule gauss_jacobi(int n, double alpha, double beta) {
  if (n < 1 || alpha <= -1.0 || beta <= -1.0) {
    fail(ErrorCode::kInvalidParameter, "gauss_jacobi: need n >= 1 and alpha, beta > -1");
  }
  const double ab = alpha + beta;
  MatrixXd J = MatrixXd::Zero(n, n);
  for (int k = 0; k < n; ++k) {
    const double s = 2.0 * k + ab;
    if (k == 0) {
      J(0, 0) = (beta - alpha) / (ab + 2.0);
    } else {
      J(k, k) = (beta * beta - alpha * alpha) / (s * (s + 2.0));
    }
    if (k + 1 < n) {
      const double kk = k + 1.0;
      const double t = 2.0 * kk + ab;
      double off2;
      if (k == 0) {
        // (kk + ab) / (t - 1) cancels analytically at kk = 1.
        off2 = 4.0 * (1.0 + alpha) * (1.0 + beta) / (t * t * (t + 1.0));
      } else {
        off2 = 4.0 * kk * (kk + alpha) * (kk + beta) * (kk + ab) /
               (t * t * (t + 1.0) * (t - 1.0));
      }
      const double off = std::sqrt(off2);
      J(k, k + 1) = off;
      J(k + 1, k) = off;
    }
  }
  Eigen::SelfAdjointEigenSolver<MatrixXd> eig(J);
  const double mu0 = std::exp((ab + 1.0) * std::log(2.0) + std::lgamma(alpha + 1.0) +
                              std::lgamma(beta + 1.0) - std::lgamma(ab + 2.0));
  QuadratureRule rule;
  rule.nodes = eig.eigenvalues();
  rule.weights.resize(n);
  for (int k = 0; k < n; ++k) {
    const double v0 = eig.eigenvectors()(0, k);
    rule.weights(k) = mu0 * v0 * v0;
  }
  return rule;
}

}  // namespace cdbar
