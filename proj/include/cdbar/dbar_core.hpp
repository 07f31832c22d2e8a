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


// D-bar reconstruction engine on the unit disk: CGO boundary integral
// equation per spectral point, scattering transform with (R, c) truncation,
// periodized Lippmann–Schwinger solve and conductivity recovery.

#ifndef CDBAR_DBAR_CORE_HPP_
#define CDBAR_DBAR_CORE_HPP_

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <vector>

#include "cdbar/common.hpp"
#include "cdbar/faddeev.hpp"
#include "cdbar/fourier_ops.hpp"

namespace cdbar {

// Uniform square grid of spectral points. Closed grids include both ends of
// [-half_width, half_width]; periodic grids hold `points` nodes of spacing
// 2 half_width / points starting at -half_width, so k = 0 is a node.
struct KGrid {
  double half_width = 12.0;
  int points = 128;
  bool periodic = false;

  double spacing() const;
  // i indexes Re k, j indexes Im k; flat index j * points + i.
  Complex node(int i, int j) const;
  int size() const { return points * points; }
  void validate() const;
};

struct ScatteringGrid {
  KGrid grid;
  std::vector<Complex> values;
  std::vector<std::uint8_t> flagged;  // BIE residual check failed or k = 0
  std::vector<std::uint8_t> masked;   // zeroed by truncation (includes flagged)
  double R = 0;                       // 0 until truncated
  double c = 0;
};

struct TruncationParams {
  double R = 0;
  double c = 10.0;
  bool automatic = false;
  void validate() const;
};

struct BieSolution {
  VectorXcd p;
  double residual = 0;
  bool ill_conditioned = false;
};

// Mean-free Fourier coefficients of exp(ikz) on the unit circle (trapezoid).
VectorXcd plane_wave_coefficients(Complex k, const BasisSpec& spec,
                                  int nodes = kDefaultBoundaryNodes);

BieSolution solve_bie(const OperatorMatrix& L_sigma, const OperatorMatrix& L_1,
                      const OperatorMatrix& R_1, Complex k,
                      HhatAssembly mode = HhatAssembly::kCached);

Complex scattering_transform(const OperatorMatrix& L_sigma, const OperatorMatrix& L_1,
                             const VectorXcd& p, Complex k, int nodes = kDefaultBoundaryNodes);

// Boundary data of one virtual-disk measurement set: holds L_sigma and the
// analytic disk references and evaluates t(k) point by point.
class ScatteringEngine {
 public:
  explicit ScatteringEngine(const OperatorMatrix& L_sigma, int nodes = kDefaultBoundaryNodes);

  struct Value {
    Complex t;
    bool flagged = false;
  };
  // Born mode replaces the CGO trace by exp(ikz).
  Value evaluate(Complex k, bool born = false) const;
  ScatteringGrid evaluate_grid(const KGrid& grid) const;
  const BasisSpec& basis() const { return basis_; }

 private:
  BasisSpec basis_;
  int nodes_;
  OperatorMatrix L_sigma_, L_1_, R_1_;
  MatrixXcd dL_;
  MatrixXcd F_;  // basis samples on the boundary nodes
  std::vector<Complex> z_;
};

// Largest integer R whose origin-connected unmasked region covers at least
// 95% of the grid nodes with |k| < R.
double auto_radius(const ScatteringGrid& raw, double c);

ScatteringGrid truncate_scattering(const ScatteringGrid& raw, const TruncationParams& params);

// Truncated scattering values at the nodes of the periodic D-bar lattice of
// half-width factor * R, computed directly with the engine.
ScatteringGrid lattice_scattering(const ScatteringEngine& engine, double R, double c,
                                  int lattice_points = 128, double factor = 2.3);

struct DbarOptions {
  double tolerance = 1e-6;
  int max_iterations = 200;
  int restart = 30;
  // Adds the leading correction of the punctured lattice rule,
  // -(h^2 / pi) d/dk of the integrand, to every convolution.
  bool local_correction = true;
};

struct DbarSolution {
  Complex z;
  std::vector<Complex> mu;  // on the lattice, flat index as KGrid
  Complex mu_at_zero;
  bool converged = false;
  int iterations = 0;
};

// Periodized Lippmann–Schwinger solver for
//   mu(k) = 1 + (1/(2 pi)^2) int t(k') / ((k - k') conj(k')) e_{-k'}(z) conj(mu(k')) dk'
// on a periodic lattice holding truncated t.
class DbarSolver {
 public:
  explicit DbarSolver(ScatteringGrid t, DbarOptions options = {});
  DbarSolution solve(Complex z) const;
  const KGrid& lattice() const { return t_.grid; }

  // One application of the integral operator to f (used by tests).
  std::vector<Complex> convolve(const std::vector<Complex>& f) const;
  std::vector<Complex> multiplier(Complex z) const;
  void add_local_correction(const std::vector<Complex>& g, std::vector<Complex>& out) const;

 private:
  ScatteringGrid t_;
  DbarOptions options_;
  std::vector<Complex> kernel_hat_;  // FFT of h^2 / (pi k), cut off at 2R
  bool zero_ = true;
};

DbarSolution solve_dbar(Complex z, const ScatteringGrid& t, DbarOptions options = {});

struct ReconstructedValue {
  double sigma = 1;  // max(Re mu(z,0)^2, 0.01)
  Complex raw = 1;   // mu(z,0)^2
  bool converged = true;
  int iterations = 0;
};

// sigma at disk points z (|z| <= 1).
std::vector<ReconstructedValue> reconstruct(const std::vector<Complex>& points,
                                            const ScatteringGrid& t, DbarOptions options = {});

// "k1 k2 re im masked" rows after "# key: value" headers.
void write_scattering(std::ostream& out, const ScatteringGrid& grid);

}  // namespace cdbar

#endif  // CDBAR_DBAR_CORE_HPP_
