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

// Forward data for piecewise-constant phantoms with circular inclusions.
//
// The potential is u = u0 + sum_j S_j[phi_j], where u0 solves the
// homogeneous Neumann problem and S_j is the single layer over inclusion j
// built from the domain's Neumann function. The densities solve
//   (lambda_j I + K*) phi = -d_nu u0,   lambda_j = (s_j + 1) / (2 (s_j - 1)),
// discretized with the trapezoid Nyström method on each inclusion curve.

#ifndef CDBAR_FORWARD_SIM_HPP_
#define CDBAR_FORWARD_SIM_HPP_

#include <memory>
#include <optional>
#include <vector>

#include <Eigen/LU>

#include "cdbar/common.hpp"
#include "cdbar/conformal.hpp"
#include "cdbar/fourier_ops.hpp"

namespace cdbar {

inline constexpr int kDefaultNystromNodes = 256;

struct Inclusion {
  Complex center;
  double radius = 0;
  double conductivity = 1;
};

struct Phantom {
  DomainKind domain = DomainKind::kDisk;
  std::optional<Polygon> polygon;
  std::vector<Inclusion> inclusions;

  // Conductivity at z (background 1); z outside every inclusion gives 1.
  double sigma(Complex z) const;
  bool inside_domain(Complex z) const;
  // Throws invalid-geometry / invalid-parameter on violated invariants.
  void validate() const;
};

// Neumann function of the true domain: disk, upper half-plane, or a
// simply connected domain through its map to the disk.
class NeumannKernel {
 public:
  struct Point {
    Complex z;
    Complex w;   // image in the disk (conformal kind), else z
    Complex d1;  // Phi'(z)
    Complex d2;  // Phi''(z)
  };

  static NeumannKernel disk();
  static NeumannKernel halfplane();
  static NeumannKernel conformal(ConformalMap map);
  // Kernel matching the domain of `map` (disk for identity/Möbius maps).
  static NeumannKernel for_map(const ConformalMap& map);

  Point point(Complex z) const;
  double value(const Point& x, const Point& y) const;
  // F'(x) with grad_x N = conj(F'), so d_nu N = Re(F' nu).
  Complex grad(const Point& x, const Point& y) const;
  // grad + (1/2pi)/(x - y), and its limit at y = x.
  Complex smooth(const Point& x, const Point& y) const;
  Complex smooth_diag(const Point& x) const;
  DomainKind domain() const { return domain_; }

 private:
  enum class Kind { kDisk, kHalfplane, kConformal };
  Kind kind_ = Kind::kDisk;
  DomainKind domain_ = DomainKind::kDisk;
  std::optional<ConformalMap> map_;
};

// Closed inclusion boundary sampled at equispaced parameter values.
struct InclusionCurve {
  std::vector<Complex> z;
  std::vector<Complex> normal;  // outward unit normal
  std::vector<double> weight;   // trapezoid weight (2 pi / n) |gamma'|
  std::vector<double> curvature;
  double conductivity = 1;
};

InclusionCurve circle_curve(const Inclusion& inc, int nodes);
// The curve map(circle): used to simulate sigma o Psi directly in the disk.
InclusionCurve mapped_circle_curve(const Inclusion& inc, const ConformalMap& map, int nodes);

class TransmissionSolver {
 public:
  TransmissionSolver(NeumannKernel kernel, std::vector<InclusionCurve> curves);

  int size() const { return static_cast<int>(nodes_.size()); }
  const std::vector<NeumannKernel::Point>& nodes() const { return nodes_; }
  const std::vector<Complex>& normals() const { return normals_; }
  const NeumannKernel& kernel() const { return kernel_; }

  // Densities for incident normal derivatives (one column per field).
  MatrixXcd densities(const MatrixXcd& dnu_incident) const;
  // Layer part sum_j S_j[phi_j] at the given points.
  MatrixXcd layer_potential(const MatrixXcd& densities, const std::vector<Complex>& points) const;

 private:
  NeumannKernel kernel_;
  std::vector<NeumannKernel::Point> nodes_;
  std::vector<Complex> normals_;
  std::vector<double> weights_;
  Eigen::PartialPivLU<MatrixXd> lu_;
};

// Homogeneous fields driven by virtual Fourier currents: the coefficient
// matrix has rows in basis layout for `modes` and one column per field.
struct FourierIncident {
  ConformalMap map;  // true domain -> disk (identity for the disk)
  BasisSpec modes;
  MatrixXcd coefficients;

  MatrixXcd values(const std::vector<Complex>& points) const;
  MatrixXcd normal_derivatives(const std::vector<NeumannKernel::Point>& points,
                               const std::vector<Complex>& normals) const;
};

// Point currents weights(m, field) injected at boundary points.
struct PointIncident {
  NeumannKernel kernel;
  std::vector<Complex> sources;
  MatrixXcd weights;

  MatrixXcd normal_derivatives(const std::vector<NeumannKernel::Point>& points,
                               const std::vector<Complex>& normals) const;
};

// Boundary potential (mean-free) on the 256-node disk grid for a sampled
// disk current density.
VectorXcd solve_transmission(const Phantom& phantom, const VectorXcd& current,
                             int nystrom_n = kDefaultNystromNodes);

// Eigenvalue of R_sigma on phi_n for the concentric two-phase disk.
double analytic_concentric_nd(double rho, double sigma0, int n);

struct SimulationOptions {
  int nystrom_n = kDefaultNystromNodes;
  int quad_nodes = kDefaultBoundaryNodes;
};

// ND matrix of a disk phantom in the standard basis.
OperatorMatrix nd_matrix(const Phantom& phantom, const BasisSpec& spec,
                         const SimulationOptions& opts = {});

// Sampler of true-domain potentials for transformed Fourier currents
// |Phi'| phi~_n o Phi; feeds pushforward_nd.
PotentialSampler true_domain_sampler(const Phantom& phantom, const ConformalMap& map,
                                     const SimulationOptions& opts = {});

// Virtual ND matrix of sigma o Psi simulated directly in the disk with the
// mapped inclusion curves.
OperatorMatrix mapped_phantom_nd(const Phantom& phantom, const ConformalMap& map,
                                 const BasisSpec& spec, const SimulationOptions& opts = {});

// (R_sigma - R_1) f at real-axis points for f = sum_m I_m delta_{z_m}.
VectorXcd halfplane_relative_potential(const Phantom& phantom, const std::vector<Complex>& sources,
                                       const VectorXcd& weights,
                                       const std::vector<Complex>& eval_points,
                                       int nystrom_n = kDefaultNystromNodes);

struct ElectrodeArray {
  int M = 0;
  std::vector<double> virtual_angles;
  std::vector<Complex> true_positions;
};

// Electrodes at Psi(e^{i 2 pi (m + offset) / M}).
ElectrodeArray make_electrodes(const ConformalMap& map, int M, double offset = 0.0);

// Relative current-to-potential matrix: entry (i, m) is the relative
// potential at electrode i for a unit point current at electrode m,
// projected as P A P with P = I - 11^T / M.
MatrixXcd pem_operator(const Phantom& phantom, const ElectrodeArray& electrodes,
                       const ConformalMap& map, int nystrom_n = kDefaultNystromNodes);

// I = (2 pi / M) f~ at the virtual nodes; rejects non-mean-free samples.
VectorXcd pem_currents(const VectorXcd& f_tilde_samples);

}  // namespace cdbar

#endif  // CDBAR_FORWARD_SIM_HPP_
