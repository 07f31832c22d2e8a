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


#include "cdbar/faddeev.hpp"

#include <cmath>
#include <limits>

namespace cdbar {
namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

// Power series of Ein; accurate where the terms do not cancel badly.
Complex ein_series(Complex z) {
  Complex p = z;  // (-1)^{n+1} z^n / n!
  Complex sum = z;
  for (int n = 2; n < 400; ++n) {
    p *= -z / static_cast<double>(n);
    const Complex term = p / static_cast<double>(n);
    sum += term;
    if (n > std::abs(z) && std::abs(term) <= 0.25 * kEps * std::abs(sum)) break;
  }
  return sum;
}

// E1 by the modified Lentz continued fraction
//   E1(z) = e^{-z} / (z + 1 - 1 / (z + 3 - 4 / (z + 5 - ...))).
Complex e1_continued_fraction(Complex z) {
  constexpr double kTiny = 1e-300;
  Complex b = z + 1.0;
  Complex c = 1.0 / kTiny;
  Complex d = 1.0 / b;
  Complex h = d;
  for (int i = 1; i < 20000; ++i) {
    const double an = -static_cast<double>(i) * i;
    b += 2.0;
    d = 1.0 / (an * d + b);
    c = b + an / c;
    const Complex del = c * d;
    h *= del;
    if (std::abs(del - 1.0) <= kEps) break;
  }
  return h * std::exp(-z);
}

// The series loses about exp(|z| + Re z) relative digits when summing to a
// result of size exp(-Re z) / |z|; the fraction converges slowly next to the
// negative real axis.
bool prefer_series(Complex z) {
  const double r = std::abs(z);
  if (r <= 1.5) return true;
  return z.real() < 0 && std::abs(z.imag()) < -z.real() && r + z.real() < 6.0;
}

double re_ein(Complex w) {
  if (prefer_series(w)) return ein_series(w).real();
  return e1_continued_fraction(w).real() + std::log(std::abs(w)) + kEulerGamma;
}

}  // namespace

Complex expint_e1(Complex z) {
  if (z.imag() == 0.0 && z.real() <= 0.0) {
    fail(ErrorCode::kBranchCut, "expint_e1: argument on the branch cut (-inf, 0]");
  }
  if (prefer_series(z)) return ein_series(z) - std::log(z) - kEulerGamma;
  return e1_continued_fraction(z);
}

Complex ein(Complex z) {
  if (prefer_series(z) || (z.imag() == 0.0 && z.real() < 0.0)) return ein_series(z);
  return e1_continued_fraction(z) + std::log(z) + kEulerGamma;
}

Complex g1(Complex z) {
  if (z == 0.0) fail(ErrorCode::kSingularArgument, "g1: z = 0");
  // Re E1 is continuous across the cut, so evaluate it through Ein.
  const double G1 = (re_ein(-kI * z) - std::log(std::abs(z)) - kEulerGamma) / kTwoPi;
  return std::exp(-kI * z) * G1;
}

Complex faddeev_green(Complex k, Complex z) {
  if (k == 0.0) fail(ErrorCode::kSingularParameter, "faddeev_green: k = 0");
  return std::exp(kI * k * z) * g1(k * z);
}

double h1(Complex z) {
  if (z == 0.0) fail(ErrorCode::kSingularArgument, "h1: use h1_at_zero for z = 0");
  return (re_ein(-kI * z) - kEulerGamma) / kTwoPi;
}

double h1_limit(Complex direction, double base_step, double* residual) {
  constexpr int kLevels = 4;
  const Complex dir = direction / std::abs(direction);
  double table[kLevels][kLevels];
  double t = base_step;
  for (int i = 0; i < kLevels; ++i, t *= 0.5) {
    table[i][0] = h1(t * dir);
    // Eliminate t^1, t^2, ... in turn.
    for (int j = 1; j <= i; ++j) {
      const double f = std::ldexp(1.0, j);
      table[i][j] = (f * table[i][j - 1] - table[i - 1][j - 1]) / (f - 1.0);
    }
  }
  if (residual) *residual = std::abs(table[kLevels - 1][kLevels - 1] - table[kLevels - 2][kLevels - 2]);
  return table[kLevels - 1][kLevels - 1];
}

double h1_at_zero() {
  static const double value = h1_limit();
  return value;
}

double hhat(Complex k, Complex z) {
  if (z == 0.0) return 0.0;
  return re_ein(-kI * k * z) / kTwoPi;
}

// ---------------------------------------------------------------------------
// Matrix assembly.

namespace {

MatrixXcd assemble_kernel(Complex k, int N, int nodes) {
  BasisSpec spec;
  spec.N = N;
  std::vector<Complex> z(nodes);
  for (int j = 0; j < nodes; ++j) z[j] = std::polar(1.0, kTwoPi * j / nodes);
  MatrixXd K(nodes, nodes);
  // For real k, H1(-w) = H1(conj w) gives K(a, b) = K(-b, -a) (indices mod
  // nodes), so only one entry of each such pair is evaluated.
  const bool real_k = k.imag() == 0.0;
  auto mirror = [nodes](int a, int b) { return std::pair((nodes - b) % nodes, (nodes - a) % nodes); };
  parallel_for(nodes, [&](std::size_t row) {
    const int i = static_cast<int>(row);
    for (int j = 0; j < nodes; ++j) {
      if (real_k && std::pair(i, j) > mirror(i, j)) continue;
      K(i, j) = i == j ? 0.0 : hhat(k, z[i] - z[j]);
    }
  });
  if (real_k) {
    for (int i = 0; i < nodes; ++i) {
      for (int j = 0; j < nodes; ++j) {
        const auto [a, b] = mirror(i, j);
        if (std::pair(i, j) > std::pair(a, b)) K(i, j) = K(a, b);
      }
    }
  }
  if (!K.allFinite()) fail(ErrorCode::kAssemblyFailure, "H_hat kernel is not finite");
  const MatrixXcd F = basis_samples(spec, nodes);
  const double h = kTwoPi / nodes;
  return (h * h) * (F.adjoint() * (K.cast<Complex>() * F));
}

MatrixXcd central_block(const MatrixXcd& M, int n_store, int N) {
  return M.block(n_store - N, n_store - N, 2 * N, 2 * N);
}

}  // namespace

MatrixXcd HhatCache::radial(double modulus, int N) {
  {
    std::lock_guard<std::mutex> lock(mu_);
    auto it = store_.find(modulus);
    if (it != store_.end()) {
      const int n_store = static_cast<int>(it->second->rows() / 2);
      if (n_store >= N) return central_block(*it->second, n_store, N);
    }
  }
  const int n_store = std::max(N, 16);
  auto m = std::make_shared<const MatrixXcd>(assemble_kernel(modulus, n_store, nodes_));
  std::lock_guard<std::mutex> lock(mu_);
  auto& slot = store_[modulus];
  if (!slot || slot->rows() < m->rows()) slot = m;
  return central_block(*m, n_store, N);
}

std::size_t HhatCache::size() const {
  std::lock_guard<std::mutex> lock(mu_);
  return store_.size();
}

void HhatCache::clear() {
  std::lock_guard<std::mutex> lock(mu_);
  store_.clear();
}

HhatCache& default_hhat_cache() {
  static HhatCache cache;
  return cache;
}

OperatorMatrix assemble_hhat(Complex k, const BasisSpec& spec, HhatAssembly mode, int nodes,
                             HhatCache* cache) {
  if (k == 0.0) fail(ErrorCode::kSingularParameter, "assemble_hhat: k = 0");
  spec.validate();
  if (!spec.mean_free || std::abs(spec.boundary_length - kTwoPi) > 1e-12) {
    fail(ErrorCode::kInvalidParameter, "assemble_hhat: only the mean-free unit-disk basis");
  }
  if (nodes <= 2 * spec.N) fail(ErrorCode::kInvalidParameter, "assemble_hhat: too few nodes");
  OperatorMatrix op;
  op.basis = spec;
  op.role = OperatorRole::kGeneric;
  if (mode == HhatAssembly::kDirect) {
    op.entries = assemble_kernel(k, spec.N, nodes);
    op.metadata["assembly"] = "direct";
    return op;
  }
  HhatCache* c = cache;
  if (!c) c = &default_hhat_cache();
  if (c->nodes() != nodes) fail(ErrorCode::kInvalidParameter, "assemble_hhat: cache node count");
  op.entries = c->radial(std::abs(k), spec.N);
  // Rotating k by alpha multiplies entry (m, n) by exp(i alpha (m - n)).
  const double alpha = std::arg(k);
  for (int r = 0; r < spec.dim(); ++r) {
    for (int s = 0; s < spec.dim(); ++s) {
      op.entries(r, s) *= std::polar(1.0, alpha * (spec.mode_of(r) - spec.mode_of(s)));
    }
  }
  op.metadata["assembly"] = "cached";
  return op;
}

MatrixXcd single_layer_from_hhat(const OperatorMatrix& hhat_matrix, Complex k) {
  MatrixXcd S = hhat_matrix.entries;
  for (int i = 0; i < S.rows(); ++i) {
    S(i, i) += 0.5 / std::abs(hhat_matrix.basis.mode_of(i)) - std::log(std::abs(k)) / kTwoPi;
  }
  return S;
}

}  // namespace cdbar
