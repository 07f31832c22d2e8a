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


// Faddeev Green's function at zero energy and the regularized boundary
// operator used by the CGO boundary integral equation on the unit disk.
//
//   G_k(z) = e^{ikz} g_k(z),  g_k(z) = g_1(kz),
//   G_1(z) = Re E1(-iz) / (2 pi),
//   H_hat_k(z) = H_1(kz) - H_1(0) = Re Ein(-ikz) / (2 pi),
// where Ein(w) = E1(w) + log w + gamma is entire.

#ifndef CDBAR_FADDEEV_HPP_
#define CDBAR_FADDEEV_HPP_

#include <map>
#include <memory>
#include <mutex>

#include "cdbar/common.hpp"
#include "cdbar/fourier_ops.hpp"

namespace cdbar {

inline constexpr double kEulerGamma = 0.57721566490153286060651209008240243;

// Principal-branch exponential integral; throws branch-cut on the closed
// negative real axis (including 0).
Complex expint_e1(Complex z);

// Entire function sum_{n>=1} (-1)^{n+1} z^n / (n n!).
Complex ein(Complex z);

// g_1(z) with G_1(z) = e^{iz} g_1(z); throws singular-argument at 0.
Complex g1(Complex z);

// G_k(z) = e^{ikz} g_1(kz).
Complex faddeev_green(Complex k, Complex z);

// H_1(z) = G_1(z) - G_0(z), G_0(z) = -log|z| / (2 pi). Real-valued.
double h1(Complex z);

// Limit of H_1 along z = t * direction, t -> 0+, by Richardson extrapolation
// over four halvings from t = base_step. `residual` receives the difference
// of the last two extrapolation levels.
double h1_limit(Complex direction = 1.0, double base_step = 1e-2, double* residual = nullptr);

// Cached real-axis limit H_1(0).
double h1_at_zero();

// H_hat_k(z); zero at z = 0.
double hhat(Complex k, Complex z);

enum class HhatAssembly { kCached, kDirect };

// Per-|k| store of H_hat matrices on the disk. Entries are keyed by the
// bit pattern of |k| and hold the matrix for the largest N requested so far
// (at least 16); smaller bases are extracted as submatrices.
class HhatCache {
 public:
  explicit HhatCache(int nodes = kDefaultBoundaryNodes) : nodes_(nodes) {}

  // Matrix of H_hat_{|k|} in the mean-free basis of order N.
  MatrixXcd radial(double modulus, int N);
  std::size_t size() const;
  void clear();
  int nodes() const { return nodes_; }

 private:
  int nodes_;
  mutable std::mutex mu_;
  std::map<double, std::shared_ptr<const MatrixXcd>> store_;
};

// Process-wide cache used by assemble_hhat in cached mode.
HhatCache& default_hhat_cache();

// Trapezoid-Nyström matrix of H_hat_k on the unit circle in the mean-free
// Fourier basis (boundary length 2 pi). Cached mode applies the phase
// factor exp(i alpha (m - n)) to the |k| matrix; direct mode evaluates the
// kernel at k itself.
OperatorMatrix assemble_hhat(Complex k, const BasisSpec& spec,
                             HhatAssembly mode = HhatAssembly::kCached,
                             int nodes = kDefaultBoundaryNodes, HhatCache* cache = nullptr);

// Matrix of S_k reconstructed as H_hat_k + R_1 / 2 - log|k| / (2 pi) I.
MatrixXcd single_layer_from_hhat(const OperatorMatrix& hhat, Complex k);

}  // namespace cdbar

#endif  // CDBAR_FADDEEV_HPP_
