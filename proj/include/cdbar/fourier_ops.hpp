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

// Truncated mean-free Fourier basis and boundary operator matrices.
//
// Index layout: row/column 0 is mode -N, row N-1 is mode -1, row N is
// mode 1 and row 2N-1 is mode N.

#ifndef CDBAR_FOURIER_OPS_HPP_
#define CDBAR_FOURIER_OPS_HPP_

#include <functional>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "cdbar/common.hpp"
#include "cdbar/conformal.hpp"

namespace cdbar {

inline constexpr int kDefaultBoundaryNodes = 256;

struct BasisSpec {
  int N = 16;
  double boundary_length = kTwoPi;
  bool mean_free = true;

  int dim() const { return mean_free ? 2 * N : 2 * N + 1; }
  int index_of(int n) const;
  int mode_of(int index) const;
  void validate() const;
};

enum class OperatorRole { kND, kDN, kRelativeND, kSingleLayer, kGeneric };

std::string to_string(OperatorRole role);
OperatorRole role_from_string(const std::string& s);

struct OperatorMatrix {
  MatrixXcd entries;
  BasisSpec basis;
  OperatorRole role = OperatorRole::kGeneric;
  std::map<std::string, std::string> metadata;
};

// (1/sqrt|dOmega|) exp(i 2 pi n s / |dOmega|).
Complex basis_eval(const BasisSpec& spec, int n, double s);

// Basis samples at s_j = (j + offset) |dOmega| / nodes: nodes x dim matrix.
MatrixXcd basis_samples(const BasisSpec& spec, int nodes, double offset = 0.0);

// |Phi'(z)| phi~_n(arg Phi(z)) for z on the true boundary.
Complex transformed_current(const ConformalMap& map, int n, Complex z);

// Trapezoid dual pairings <sample column, conj(phi_m)> for all basis modes.
MatrixXcd pair_with_basis(const MatrixXcd& samples, const BasisSpec& spec, double offset = 0.0);

// Maps sampled basis functions (nodes x dim) to sampled outputs.
using BoundaryTransformer = std::function<MatrixXcd(const MatrixXcd&)>;

OperatorMatrix assemble_matrix(const BoundaryTransformer& apply, const BasisSpec& spec,
                               int quad_nodes = kDefaultBoundaryNodes,
                               OperatorRole role = OperatorRole::kGeneric);

// L = R^{-1}; throws ill-conditioned-inversion when cond(R) exceeds the cap.
OperatorMatrix nd_to_dn(const OperatorMatrix& nd, double condition_cap = 1e12);

// Analytic unit-disk operators diag(|n|) and diag(1/|n|).
OperatorMatrix unit_disk_dn(int N);
OperatorMatrix unit_disk_nd(int N);

// Returns potentials of current pattern n (a transformed Fourier current)
// sampled at the given true-boundary points.
using PotentialSampler = std::function<VectorXcd(int n, const std::vector<Complex>& points)>;

// Virtual ND matrix from true-domain measurements: samples u_n at
// Psi(equiangular disk nodes), mean-subtracts and pairs with the disk basis.
OperatorMatrix pushforward_nd(const PotentialSampler& measured, const ConformalMap& map,
                              const BasisSpec& spec, int quad_nodes = kDefaultBoundaryNodes);

// Boundary points Psi(e^{i theta_j}) for theta_j = 2 pi (j + offset) / nodes;
// chooses offset 1/2 when offset 0 would hit a corner or infinity.
std::vector<Complex> virtual_node_preimages(const ConformalMap& map, int nodes, double* offset);

// ND/DN file I/O: "# key: value" headers, then "m n re im" rows.
void write_operator(std::ostream& out, const OperatorMatrix& op);
OperatorMatrix read_operator(std::istream& in);

}  // namespace cdbar

#endif  // CDBAR_FOURIER_OPS_HPP_
