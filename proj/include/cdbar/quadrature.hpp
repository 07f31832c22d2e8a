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

#ifndef CDBAR_QUADRATURE_HPP_
#define CDBAR_QUADRATURE_HPP_

#include "cdbar/common.hpp"

namespace cdbar {

struct QuadratureRule {
  VectorXd nodes;
  VectorXd weights;
};

// Gauss–Jacobi rule on [-1, 1] for the weight (1-x)^alpha (1+x)^beta,
// alpha, beta > -1, computed by the Golub–Welsch eigenvalue method.
QuadratureRule gauss_jacobi(int n, double alpha, double beta);

inline QuadratureRule gauss_legendre(int n) { return gauss_jacobi(n, 0, 0); }

}  // namespace cdbar

#endif  // CDBAR_QUADRATURE_HPP_
