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


// Matrix-free restarted GMRES on real vectors (Eigen's unsupported GMRES
// driven through an operator wrapper).

#ifndef CDBAR_GMRES_HPP_
#define CDBAR_GMRES_HPP_

#include <functional>

#include "cdbar/common.hpp"

namespace cdbar {

using LinearOperator = std::function<VectorXd(const VectorXd&)>;

struct KrylovResult {
  VectorXd x;
  int iterations = 0;
  double residual = 0;  // relative residual estimate
  bool converged = false;
};

// Solves A x = b from the initial guess x0. Tolerance is on ||r|| / ||b||.
KrylovResult gmres_solve(const LinearOperator& apply, const VectorXd& b, const VectorXd& x0,
                         double tol = 1e-6, int max_iterations = 200, int restart = 30);

}  // namespace cdbar

#endif  // CDBAR_GMRES_HPP_
