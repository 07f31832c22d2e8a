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

#include "cdbar/forward_sim.hpp"

#include <algorithm>
#include <cmath>
#include <memory>

namespace cdbar {
namespace {

constexpr double kClearance = 0.02;
constexpr double kInv2Pi = 1.0 / kTwoPi;

double disk_value(Complex x, Complex y) {
  return -kInv2Pi * (std::log(std::abs(x - y)) + std::log(std::abs(1.0 - x * std::conj(y))));
}

Complex disk_grad(Complex x, Complex y) {
  return -kInv2Pi * (1.0 / (x - y) - std::conj(y) / (1.0 - x * std::conj(y)));
}

}  // namespace

// ---------------------------------------------------------------------------
// Phantom.

double Phantom::sigma(Complex z) const {
  for (const Inclusion& inc : inclusions) {
    if (std::abs(z - inc.center) < inc.radius) return inc.conductivity;
  }
  return 1.0;
}

bool Phantom::inside_domain(Complex z) const {
  switch (domain) {
    case DomainKind::kDisk: return std::abs(z) < 1.0;
    case DomainKind::kHalfplane: return z.imag() > 0.0;
    case DomainKind::kPolygon: return polygon && polygon->contains(z);
  }
  return false;
}

void Phantom::validate() const {
  if (domain == DomainKind::kPolygon && !polygon) {
    fail(ErrorCode::kInvalidGeometry, "polygon phantom without polygon");
  }
  for (std::size_t i = 0; i < inclusions.size(); ++i) {
    const Inclusion& a = inclusions[i];
    if (!(a.radius > 0)) fail(ErrorCode::kInvalidParameter, "inclusion radius must be > 0");
    if (!(a.conductivity >= 0.01 && a.conductivity <= 100)) {
      fail(ErrorCode::kInvalidParameter, "inclusion conductivity outside [0.01, 100]");
    }
    double gap = 0;
    switch (domain) {
      case DomainKind::kDisk: gap = 1.0 - std::abs(a.center) - a.radius; break;
      case DomainKind::kHalfplane: gap = a.center.imag() - a.radius; break;
      case DomainKind::kPolygon:
        gap = polygon->contains(a.center) ? polygon->distance_to_boundary(a.center) - a.radius
                                          : -1.0;
        break;
    }
    if (gap < kClearance) {
      fail(ErrorCode::kInvalidGeometry,
           "inclusion " + std::to_string(i) + " is closer than 0.02 to the boundary");
    }
    for (std::size_t j = 0; j < i; ++j) {
      const Inclusion& b = inclusions[j];
      if (std::abs(a.center - b.center) - a.radius - b.radius < kClearance) {
        fail(ErrorCode::kInvalidGeometry, "inclusions " + std::to_string(j) + " and " +
                                              std::to_string(i) + " overlap or touch");
      }
    }
  }
}

// ---------------------------------------------------------------------------
// Neumann kernels.

NeumannKernel NeumannKernel::disk() { return NeumannKernel(); }

NeumannKernel NeumannKernel::halfplane() {
  NeumannKernel k;
  k.kind_ = Kind::kHalfplane;
  k.domain_ = DomainKind::kHalfplane;
  return k;
}

NeumannKernel NeumannKernel::conformal(ConformalMap map) {
  NeumannKernel k;
  k.kind_ = Kind::kConformal;
  k.domain_ = map.domain();
  k.map_ = std::move(map);
  return k;
}

NeumannKernel NeumannKernel::for_map(const ConformalMap& map) {
  switch (map.domain()) {
    case DomainKind::kDisk: return disk();
    case DomainKind::kHalfplane: return halfplane();
    case DomainKind::kPolygon: return conformal(map);
  }
  return disk();
}

NeumannKernel::Point NeumannKernel::point(Complex z) const {
  if (kind_ != Kind::kConformal) return {z, z, 1.0, 0.0};
  const Jet j = map_->forward_jet(z);
  return {z, j.value, j.d1, j.d2};
}

double NeumannKernel::value(const Point& x, const Point& y) const {
  switch (kind_) {
    case Kind::kDisk: return disk_value(x.z, y.z);
    case Kind::kHalfplane:
      return -kInv2Pi * (std::log(std::abs(x.z - y.z)) + std::log(std::abs(x.z - std::conj(y.z))));
    case Kind::kConformal: return disk_value(x.w, y.w);
  }
  return 0;
}

Complex NeumannKernel::grad(const Point& x, const Point& y) const {
  switch (kind_) {
    case Kind::kDisk: return disk_grad(x.z, y.z);
    case Kind::kHalfplane:
      return -kInv2Pi * (1.0 / (x.z - y.z) + 1.0 / (x.z - std::conj(y.z)));
    case Kind::kConformal: return x.d1 * disk_grad(x.w, y.w);
  }
  return 0;
}

Complex NeumannKernel::smooth(const Point& x, const Point& y) const {
  switch (kind_) {
    case Kind::kDisk: return kInv2Pi * std::conj(y.z) / (1.0 - x.z * std::conj(y.z));
    case Kind::kHalfplane: return -kInv2Pi / (x.z - std::conj(y.z));
    case Kind::kConformal: return grad(x, y) + kInv2Pi / (x.z - y.z);
  }
  return 0;
}

Complex NeumannKernel::smooth_diag(const Point& x) const {
  switch (kind_) {
    case Kind::kDisk: return kInv2Pi * std::conj(x.z) / (1.0 - std::norm(x.z));
    case Kind::kHalfplane: return -kInv2Pi / (x.z - std::conj(x.z));
    case Kind::kConformal:
      return -kInv2Pi * x.d2 / (2.0 * x.d1) +
             kInv2Pi * x.d1 * std::conj(x.w) / (1.0 - std::norm(x.w));
  }
  return 0;
}

// ---------------------------------------------------------------------------
// Curves.

InclusionCurve circle_curve(const Inclusion& inc, int nodes) {
  InclusionCurve c;
  c.conductivity = inc.conductivity;
  for (int j = 0; j < nodes; ++j) {
    const Complex e = std::polar(1.0, kTwoPi * j / nodes);
    c.z.push_back(inc.center + inc.radius * e);
    c.normal.push_back(e);
    c.weight.push_back(kTwoPi * inc.radius / nodes);
    c.curvature.push_back(1.0 / inc.radius);
  }
  return c;
}

InclusionCurve mapped_circle_curve(const Inclusion& inc, const ConformalMap& map, int nodes) {
  InclusionCurve c;
  c.conductivity = inc.conductivity;
  for (int j = 0; j < nodes; ++j) {
    const Complex e = std::polar(1.0, kTwoPi * j / nodes);
    const Jet f = map.forward_jet(inc.center + inc.radius * e);
    const Complex dz = kI * inc.radius * e;
    const Complex g1 = f.d1 * dz;
    const Complex g2 = f.d2 * dz * dz - f.d1 * inc.radius * e;
    const double speed = std::abs(g1);
    c.z.push_back(f.value);
    c.normal.push_back(-kI * g1 / speed);
    c.weight.push_back(kTwoPi * speed / nodes);
    c.curvature.push_back((g2 * std::conj(g1)).imag() / (speed * speed * speed));
  }
  return c;
}

// ---------------------------------------------------------------------------
// Transmission solver.

TransmissionSolver::TransmissionSolver(NeumannKernel kernel, std::vector<InclusionCurve> curves)
    : kernel_(std::move(kernel)) {
  std::vector<double> lambda;
  std::vector<double> curvature;
  for (const InclusionCurve& c : curves) {
    if (c.conductivity == 1.0) continue;  // zero contrast
    const double lam = (c.conductivity + 1.0) / (2.0 * (c.conductivity - 1.0));
    for (std::size_t j = 0; j < c.z.size(); ++j) {
      nodes_.push_back(kernel_.point(c.z[j]));
      normals_.push_back(c.normal[j]);
      weights_.push_back(c.weight[j]);
      lambda.push_back(lam);
      curvature.push_back(c.curvature[j]);
    }
  }
  const int n = size();
  if (n == 0) return;
  MatrixXd A(n, n);
  parallel_for(n, [&](std::size_t ii) {
    const int i = static_cast<int>(ii);
    for (int j = 0; j < n; ++j) {
      if (i == j) {
        const double k = -curvature[i] / (2.0 * kTwoPi) +
                         (kernel_.smooth_diag(nodes_[i]) * normals_[i]).real();
        A(i, i) = lambda[i] + k * weights_[i];
      } else {
        A(i, j) = (kernel_.grad(nodes_[i], nodes_[j]) * normals_[i]).real() * weights_[j];
      }
    }
  });
  if (!A.allFinite()) {
    fail(ErrorCode::kTransmissionSolveFailure, "transmission system has non-finite entries");
  }
  lu_.compute(A);
}

MatrixXcd TransmissionSolver::densities(const MatrixXcd& dnu_incident) const {
  if (size() == 0) return MatrixXcd::Zero(0, dnu_incident.cols());
  const MatrixXd re = lu_.solve(-dnu_incident.real());
  const MatrixXd im = lu_.solve(-dnu_incident.imag());
  MatrixXcd out(re.rows(), re.cols());
  out.real() = re;
  out.imag() = im;
  if (!out.allFinite()) {
    fail(ErrorCode::kTransmissionSolveFailure, "transmission solve produced non-finite densities");
  }
  return out;
}

MatrixXcd TransmissionSolver::layer_potential(const MatrixXcd& dens,
                                              const std::vector<Complex>& points) const {
  const int m = static_cast<int>(points.size());
  MatrixXcd out = MatrixXcd::Zero(m, dens.cols());
  if (size() == 0) return out;
  MatrixXd K(m, size());
  parallel_for(m, [&](std::size_t i) {
    const NeumannKernel::Point x = kernel_.point(points[i]);
    for (int j = 0; j < size(); ++j) K(i, j) = kernel_.value(x, nodes_[j]) * weights_[j];
  });
  out.real() = K * dens.real();
  out.imag() = K * dens.imag();
  return out;
}

// ---------------------------------------------------------------------------
// Incident fields.

namespace {

// Sums A(w) = sum_{n>0} c_n w^n / (n sqrt(2pi)) and its derivative, with the
// anti-holomorphic part B in conj(w).
struct FourierSums {
  Complex a, da, b, db;
};

FourierSums fourier_sums(const BasisSpec& modes, const MatrixXcd& coef, int col, Complex w) {
  const double s = 1.0 / std::sqrt(kTwoPi);
  FourierSums r{0.0, 0.0, 0.0, 0.0};
  Complex wp = 1.0;   // w^{n-1}
  Complex wbp = 1.0;  // conj(w)^{n-1}
  const Complex wb = std::conj(w);
  for (int n = 1; n <= modes.N; ++n) {
    const Complex cp = coef(modes.index_of(n), col);
    const Complex cm = coef(modes.index_of(-n), col);
    r.da += cp * wp;
    r.db += cm * wbp;
    wp *= w;
    wbp *= wb;
    r.a += cp * wp / static_cast<double>(n);
    r.b += cm * wbp / static_cast<double>(n);
  }
  r.a *= s;
  r.da *= s;
  r.b *= s;
  r.db *= s;
  return r;
}

}  // namespace

MatrixXcd FourierIncident::values(const std::vector<Complex>& points) const {
  MatrixXcd out(points.size(), coefficients.cols());
  for (std::size_t i = 0; i < points.size(); ++i) {
    const Complex w = map.forward(points[i]);
    for (int c = 0; c < coefficients.cols(); ++c) {
      const FourierSums f = fourier_sums(modes, coefficients, c, w);
      out(i, c) = f.a + f.b;
    }
  }
  return out;
}

MatrixXcd FourierIncident::normal_derivatives(const std::vector<NeumannKernel::Point>& points,
                                              const std::vector<Complex>& normals) const {
  MatrixXcd out(points.size(), coefficients.cols());
  parallel_for(points.size(), [&](std::size_t i) {
    const Jet j = map.forward_jet(points[i].z);
    const Complex nu = normals[i];
    for (int c = 0; c < coefficients.cols(); ++c) {
      const FourierSums f = fourier_sums(modes, coefficients, c, j.value);
      const Complex hol = f.da * j.d1;
      const Complex anti = f.db * std::conj(j.d1);
      const Complex dx = hol + anti;
      const Complex dy = kI * hol - kI * anti;
      out(i, c) = nu.real() * dx + nu.imag() * dy;
    }
  });
  return out;
}

MatrixXcd PointIncident::normal_derivatives(const std::vector<NeumannKernel::Point>& points,
                                            const std::vector<Complex>& normals) const {
  const int ns = static_cast<int>(sources.size());
  MatrixXd G(points.size(), ns);
  std::vector<NeumannKernel::Point> src;
  for (const Complex& s : sources) src.push_back(kernel.point(s));
  parallel_for(points.size(), [&](std::size_t i) {
    for (int m = 0; m < ns; ++m) G(i, m) = (kernel.grad(points[i], src[m]) * normals[i]).real();
  });
  MatrixXcd out(points.size(), weights.cols());
  out.real() = G * weights.real();
  out.imag() = G * weights.imag();
  return out;
}

// ---------------------------------------------------------------------------
// Drivers.

namespace {

std::vector<InclusionCurve> circles(const Phantom& phantom, int nodes) {
  std::vector<InclusionCurve> curves;
  for (const Inclusion& inc : phantom.inclusions) curves.push_back(circle_curve(inc, nodes));
  return curves;
}

std::vector<Complex> disk_nodes(int nodes, double offset = 0.0) {
  std::vector<Complex> pts(nodes);
  for (int j = 0; j < nodes; ++j) pts[j] = std::polar(1.0, kTwoPi * (j + offset) / nodes);
  return pts;
}

MatrixXcd total_potential(const TransmissionSolver& solver, const FourierIncident& inc,
                          const std::vector<Complex>& points) {
  const MatrixXcd dens = solver.densities(inc.normal_derivatives(solver.nodes(), solver.normals()));
  return inc.values(points) + solver.layer_potential(dens, points);
}

void check_nystrom(int n) {
  if (n < 64) fail(ErrorCode::kInvalidParameter, "nystrom_n must be >= 64");
}

}  // namespace

VectorXcd solve_transmission(const Phantom& phantom, const VectorXcd& current, int nystrom_n) {
  check_nystrom(nystrom_n);
  phantom.validate();
  if (phantom.domain != DomainKind::kDisk) {
    fail(ErrorCode::kInvalidParameter, "solve_transmission: sampled currents need a disk phantom");
  }
  const int nodes = static_cast<int>(current.size());
  if (nodes < 8) fail(ErrorCode::kInvalidCurrent, "solve_transmission: too few current samples");
  if (std::abs(current.sum()) > 1e-9 * std::max(1.0, current.cwiseAbs().sum())) {
    fail(ErrorCode::kInvalidCurrent, "solve_transmission: current is not mean-free");
  }
  FourierIncident inc;
  inc.modes.N = nodes / 2 - 1;
  inc.coefficients = pair_with_basis(current, inc.modes);
  TransmissionSolver solver(NeumannKernel::disk(), circles(phantom, nystrom_n));
  VectorXcd u = total_potential(solver, inc, disk_nodes(nodes)).col(0);
  u.array() -= u.mean();
  return u;
}

double analytic_concentric_nd(double rho, double sigma0, int n) {
  if (!(rho > 0 && rho < 1) || !(sigma0 > 0) || n == 0) {
    fail(ErrorCode::kInvalidParameter, "analytic_concentric_nd: need 0<rho<1, sigma0>0, n!=0");
  }
  const double gamma = (sigma0 - 1.0) / (sigma0 + 1.0);
  const double an = std::abs(n);
  const double q = gamma * std::pow(rho, 2.0 * an);
  return (1.0 - q) / (an * (1.0 + q));
}

OperatorMatrix nd_matrix(const Phantom& phantom, const BasisSpec& spec,
                         const SimulationOptions& opts) {
  check_nystrom(opts.nystrom_n);
  phantom.validate();
  if (phantom.domain != DomainKind::kDisk) {
    fail(ErrorCode::kInvalidParameter, "nd_matrix: standard basis needs a disk phantom");
  }
  auto solver = std::make_shared<TransmissionSolver>(NeumannKernel::disk(),
                                                     circles(phantom, opts.nystrom_n));
  const int nodes = opts.quad_nodes;
  auto apply = [&](const MatrixXcd& currents) {
    FourierIncident inc;
    inc.modes.N = nodes / 2 - 1;
    inc.coefficients = pair_with_basis(currents, inc.modes);
    return total_potential(*solver, inc, disk_nodes(nodes));
  };
  OperatorMatrix op = assemble_matrix(apply, spec, nodes, OperatorRole::kND);
  op.metadata["domain"] = "disk";
  op.metadata["map"] = "identity";
  op.metadata["nystrom_n"] = std::to_string(opts.nystrom_n);
  return op;
}

PotentialSampler true_domain_sampler(const Phantom& phantom, const ConformalMap& map,
                                     const SimulationOptions& opts) {
  check_nystrom(opts.nystrom_n);
  phantom.validate();
  if (phantom.domain != map.domain()) {
    fail(ErrorCode::kInvalidParameter, "true_domain_sampler: map domain differs from phantom");
  }
  auto solver = std::make_shared<TransmissionSolver>(NeumannKernel::for_map(map),
                                                     circles(phantom, opts.nystrom_n));
  return [solver, map](int n, const std::vector<Complex>& points) -> VectorXcd {
    FourierIncident inc;
    inc.map = map;
    inc.modes.N = std::abs(n);
    inc.coefficients = MatrixXcd::Zero(inc.modes.dim(), 1);
    inc.coefficients(inc.modes.index_of(n), 0) = 1.0;
    return total_potential(*solver, inc, points).col(0);
  };
}

OperatorMatrix mapped_phantom_nd(const Phantom& phantom, const ConformalMap& map,
                                 const BasisSpec& spec, const SimulationOptions& opts) {
  check_nystrom(opts.nystrom_n);
  phantom.validate();
  // A different node count than the true-domain route keeps the two
  // computations numerically independent.
  const int n_curve = opts.nystrom_n + 64;
  std::vector<InclusionCurve> curves;
  for (const Inclusion& inc : phantom.inclusions) {
    curves.push_back(mapped_circle_curve(inc, map, n_curve));
  }
  TransmissionSolver solver(NeumannKernel::disk(), std::move(curves));
  const int nodes = opts.quad_nodes;
  auto apply = [&](const MatrixXcd& currents) {
    FourierIncident inc;
    inc.modes.N = nodes / 2 - 1;
    inc.coefficients = pair_with_basis(currents, inc.modes);
    return total_potential(solver, inc, disk_nodes(nodes));
  };
  OperatorMatrix op = assemble_matrix(apply, spec, nodes, OperatorRole::kND);
  op.metadata["domain"] = "disk";
  op.metadata["map"] = map.descriptor();
  op.metadata["route"] = "mapped-phantom";
  return op;
}

VectorXcd halfplane_relative_potential(const Phantom& phantom, const std::vector<Complex>& sources,
                                       const VectorXcd& weights,
                                       const std::vector<Complex>& eval_points, int nystrom_n) {
  check_nystrom(nystrom_n);
  phantom.validate();
  if (phantom.domain != DomainKind::kHalfplane) {
    fail(ErrorCode::kInvalidParameter, "halfplane_relative_potential: need a half-plane phantom");
  }
  if (static_cast<int>(sources.size()) != weights.size()) {
    fail(ErrorCode::kInvalidCurrent, "halfplane_relative_potential: weights/sources mismatch");
  }
  if (std::abs(weights.sum()) > 1e-12 * std::max(1.0, weights.cwiseAbs().sum())) {
    fail(ErrorCode::kInvalidCurrent, "halfplane_relative_potential: weights must sum to zero");
  }
  for (const Complex& s : sources) {
    for (const Inclusion& inc : phantom.inclusions) {
      if (std::abs(s - inc.center) <= inc.radius + kClearance) {
        fail(ErrorCode::kInvalidGeometry, "source point inside an inclusion footprint");
      }
    }
  }
  TransmissionSolver solver(NeumannKernel::halfplane(), circles(phantom, nystrom_n));
  PointIncident inc{NeumannKernel::halfplane(), sources, weights};
  const MatrixXcd dens = solver.densities(inc.normal_derivatives(solver.nodes(), solver.normals()));
  return solver.layer_potential(dens, eval_points).col(0);
}

ElectrodeArray make_electrodes(const ConformalMap& map, int M, double offset) {
  if (M < 2) fail(ErrorCode::kInvalidParameter, "electrode count must be >= 2");
  ElectrodeArray e;
  e.M = M;
  for (int m = 0; m < M; ++m) {
    const double th = kTwoPi * (m + offset) / M;
    e.virtual_angles.push_back(th);
    e.true_positions.push_back(map.inverse(std::polar(1.0, th)));
  }
  for (int m = 0; m < M; ++m) {
    if (!std::isfinite(e.true_positions[m].real()) || !std::isfinite(e.true_positions[m].imag()) ||
        std::abs(e.true_positions[m] - e.true_positions[(m + 1) % M]) == 0.0) {
      fail(ErrorCode::kInvalidGeometry, "electrode positions must be finite and distinct");
    }
  }
  return e;
}

MatrixXcd pem_operator(const Phantom& phantom, const ElectrodeArray& electrodes,
                       const ConformalMap& map, int nystrom_n) {
  check_nystrom(nystrom_n);
  phantom.validate();
  const int M = electrodes.M;
  for (const Complex& z : electrodes.true_positions) {
    for (const Inclusion& inc : phantom.inclusions) {
      if (std::abs(z - inc.center) <= inc.radius + kClearance) {
        fail(ErrorCode::kInvalidGeometry, "electrode too close to an inclusion");
      }
    }
  }
  const NeumannKernel kernel = phantom.domain == DomainKind::kPolygon
                                   ? NeumannKernel::conformal(map)
                                   : (phantom.domain == DomainKind::kHalfplane
                                          ? NeumannKernel::halfplane()
                                          : NeumannKernel::disk());
  TransmissionSolver solver(kernel, circles(phantom, nystrom_n));
  PointIncident inc{kernel, electrodes.true_positions, MatrixXcd::Identity(M, M)};
  const MatrixXcd dens = solver.densities(inc.normal_derivatives(solver.nodes(), solver.normals()));
  const MatrixXcd G = solver.layer_potential(dens, electrodes.true_positions);
  const MatrixXcd P = MatrixXcd::Identity(M, M) - MatrixXcd::Constant(M, M, 1.0 / M);
  return P * G * P;
}

VectorXcd pem_currents(const VectorXcd& f_tilde_samples) {
  const int M = static_cast<int>(f_tilde_samples.size());
  if (M < 2) fail(ErrorCode::kInvalidCurrent, "pem_currents: need at least two samples");
  if (std::abs(f_tilde_samples.sum()) > 1e-9 * std::max(1.0, f_tilde_samples.cwiseAbs().sum())) {
    fail(ErrorCode::kInvalidCurrent, "pem_currents: virtual current samples are not mean-free");
  }
  return (kTwoPi / M) * f_tilde_samples;
}

}  // namespace cdbar
