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


#include "cdbar/dbar_core.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>

#include <Eigen/LU>
#include <unsupported/Eigen/FFT>

#include "cdbar/gmres.hpp"

namespace cdbar {
namespace {

constexpr double kBieResidualCap = 1e-8;

bool finite(Complex v) { return std::isfinite(v.real()) && std::isfinite(v.imag()); }

std::vector<Complex> circle_nodes(int nodes) {
  std::vector<Complex> z(nodes);
  for (int j = 0; j < nodes; ++j) z[j] = std::polar(1.0, kTwoPi * j / nodes);
  return z;
}

VectorXcd plane_wave_samples(Complex k, const std::vector<Complex>& z) {
  VectorXcd v(z.size());
  for (std::size_t j = 0; j < z.size(); ++j) v(j) = std::exp(kI * k * z[j]);
  return v;
}

// t = int e^{i conj(k) conj(z)} f ds by the trapezoid rule.
Complex boundary_pairing(Complex k, const std::vector<Complex>& z, const VectorXcd& f) {
  Complex sum = 0;
  for (std::size_t j = 0; j < z.size(); ++j) sum += std::exp(kI * std::conj(k * z[j])) * f(j);
  return sum * (kTwoPi / static_cast<double>(z.size()));
}

void check_disk_basis(const OperatorMatrix& op, const char* what) {
  const BasisSpec& b = op.basis;
  if (!b.mean_free || std::abs(b.boundary_length - kTwoPi) > 1e-12 ||
      op.entries.rows() != b.dim() || op.entries.cols() != b.dim()) {
    fail(ErrorCode::kInvalidParameter, std::string(what) + ": expected a mean-free disk matrix");
  }
}

BieSolution solve_system(const MatrixXcd& L_sigma, const MatrixXcd& R_1, const MatrixXcd& dL,
                         const MatrixXcd& H, const VectorXcd& e) {
  const int n = static_cast<int>(e.size());
  const MatrixXcd A = 0.5 * (MatrixXcd::Identity(n, n) + R_1 * L_sigma) + H * dL;
  BieSolution s;
  s.p = A.partialPivLu().solve(e);
  s.residual = (A * s.p - e).norm() / e.norm();
  s.ill_conditioned = !(s.residual <= kBieResidualCap) || !s.p.allFinite();
  return s;
}

// 2-D FFT over a row-major M x M array (index j * M + i).
void fft2(std::vector<Complex>& a, int M, bool inverse) {
  thread_local Eigen::FFT<double> fft;
  std::vector<Complex> in(M), out(M);
  for (int pass = 0; pass < 2; ++pass) {
    for (int line = 0; line < M; ++line) {
      for (int q = 0; q < M; ++q) in[q] = pass == 0 ? a[line * M + q] : a[q * M + line];
      if (inverse) {
        fft.inv(out, in);
      } else {
        fft.fwd(out, in);
      }
      for (int q = 0; q < M; ++q) (pass == 0 ? a[line * M + q] : a[q * M + line]) = out[q];
    }
  }
}

}  // namespace

// ---------------------------------------------------------------------------
// Grids.

double KGrid::spacing() const {
  return periodic ? 2.0 * half_width / points : 2.0 * half_width / (points - 1);
}

Complex KGrid::node(int i, int j) const {
  const double h = spacing();
  return {-half_width + i * h, -half_width + j * h};
}

void KGrid::validate() const {
  if (!(half_width > 0)) fail(ErrorCode::kInvalidParameter, "k-grid half-width must be > 0");
  if (points < 4 || (periodic && points % 2 != 0)) {
    fail(ErrorCode::kInvalidParameter, "k-grid needs >= 4 points (even when periodic)");
  }
}

void TruncationParams::validate() const {
  if (!(c > 0)) fail(ErrorCode::kInvalidParameter, "truncation cutoff c must be > 0");
  if (!automatic && !(R > 0)) fail(ErrorCode::kInvalidParameter, "truncation radius R must be > 0");
}

// ---------------------------------------------------------------------------
// Boundary integral equation and scattering transform.

VectorXcd plane_wave_coefficients(Complex k, const BasisSpec& spec, int nodes) {
  return pair_with_basis(plane_wave_samples(k, circle_nodes(nodes)), spec);
}

BieSolution solve_bie(const OperatorMatrix& L_sigma, const OperatorMatrix& L_1,
                      const OperatorMatrix& R_1, Complex k, HhatAssembly mode) {
  check_disk_basis(L_sigma, "solve_bie");
  check_disk_basis(L_1, "solve_bie");
  check_disk_basis(R_1, "solve_bie");
  if (L_1.basis.N != L_sigma.basis.N || R_1.basis.N != L_sigma.basis.N) {
    fail(ErrorCode::kInvalidParameter, "solve_bie: matrices must share the basis");
  }
  if (k == 0.0) fail(ErrorCode::kSingularParameter, "solve_bie: k = 0");
  const VectorXcd e = plane_wave_coefficients(k, L_sigma.basis);
  const MatrixXcd H = assemble_hhat(k, L_sigma.basis, mode).entries;
  return solve_system(L_sigma.entries, R_1.entries, L_sigma.entries - L_1.entries, H, e);
}

Complex scattering_transform(const OperatorMatrix& L_sigma, const OperatorMatrix& L_1,
                             const VectorXcd& p, Complex k, int nodes) {
  const VectorXcd c = (L_sigma.entries - L_1.entries) * p;
  const VectorXcd f = basis_samples(L_sigma.basis, nodes) * c;
  return boundary_pairing(k, circle_nodes(nodes), f);
}

ScatteringEngine::ScatteringEngine(const OperatorMatrix& L_sigma, int nodes)
    : basis_(L_sigma.basis), nodes_(nodes), L_sigma_(L_sigma) {
  check_disk_basis(L_sigma, "ScatteringEngine");
  if (nodes <= 2 * basis_.N) fail(ErrorCode::kInvalidParameter, "ScatteringEngine: too few nodes");
  L_1_ = unit_disk_dn(basis_.N);
  R_1_ = unit_disk_nd(basis_.N);
  dL_ = L_sigma_.entries - L_1_.entries;
  F_ = basis_samples(basis_, nodes_);
  z_ = circle_nodes(nodes_);
}

ScatteringEngine::Value ScatteringEngine::evaluate(Complex k, bool born) const {
  Value v;
  if (k == 0.0) {
    v.t = 0;
    v.flagged = true;
    return v;
  }
  const VectorXcd e = (kTwoPi / nodes_) * (F_.adjoint() * plane_wave_samples(k, z_));
  VectorXcd p = e;
  if (!born) {
    const MatrixXcd H = assemble_hhat(k, basis_, HhatAssembly::kCached, nodes_).entries;
    const BieSolution s = solve_system(L_sigma_.entries, R_1_.entries, dL_, H, e);
    p = s.p;
    v.flagged = s.ill_conditioned;
  }
  v.t = boundary_pairing(k, z_, F_ * (dL_ * p));
  if (!finite(v.t)) {
    v.flagged = true;
    v.t = 0;
  }
  return v;
}

ScatteringGrid ScatteringEngine::evaluate_grid(const KGrid& grid) const {
  grid.validate();
  ScatteringGrid out;
  out.grid = grid;
  out.values.assign(grid.size(), 0.0);
  out.flagged.assign(grid.size(), 0);
  out.masked.assign(grid.size(), 0);
  parallel_for(grid.size(), [&](std::size_t idx) {
    const int i = static_cast<int>(idx) % grid.points, j = static_cast<int>(idx) / grid.points;
    const Value v = evaluate(grid.node(i, j));
    out.values[idx] = v.t;
    out.flagged[idx] = v.flagged;
  });
  return out;
}

// ---------------------------------------------------------------------------
// Truncation.

double auto_radius(const ScatteringGrid& raw, double c) {
  const KGrid& g = raw.grid;
  const int M = g.points;
  const double h = g.spacing();
  std::vector<std::uint8_t> bad(g.size());
  for (int idx = 0; idx < g.size(); ++idx) {
    bad[idx] = raw.flagged[idx] || !finite(raw.values[idx]) || std::abs(raw.values[idx]) > c;
  }
  // Flood fill (4-neighbour) from the unmasked nodes next to the origin.
  std::vector<std::uint8_t> comp(g.size(), 0);
  std::vector<int> stack;
  for (int idx = 0; idx < g.size(); ++idx) {
    const double r = std::abs(g.node(idx % M, idx / M));
    if (r > 0 && r <= 1.5 * h && !bad[idx]) {
      comp[idx] = 1;
      stack.push_back(idx);
    }
  }
  while (!stack.empty()) {
    const int idx = stack.back();
    stack.pop_back();
    const int i = idx % M, j = idx / M;
    const int nb[4][2] = {{i - 1, j}, {i + 1, j}, {i, j - 1}, {i, j + 1}};
    for (const auto& q : nb) {
      if (q[0] < 0 || q[0] >= M || q[1] < 0 || q[1] >= M) continue;
      const int n = q[1] * M + q[0];
      if (!bad[n] && !comp[n]) {
        comp[n] = 1;
        stack.push_back(n);
      }
    }
  }
  const int r_max = static_cast<int>(std::floor(g.half_width + 1e-12));
  for (int R = r_max; R >= 1; --R) {
    int total = 0, covered = 0;
    for (int idx = 0; idx < g.size(); ++idx) {
      const double r = std::abs(g.node(idx % M, idx / M));
      if (r == 0 || r >= R) continue;
      ++total;
      covered += comp[idx];
    }
    if (total > 0 && covered >= 0.95 * total) return R;
  }
  fail(ErrorCode::kAutoTruncationFailure,
       "no radius keeps 95% of the disk connected to the origin; set R and c manually");
}

ScatteringGrid truncate_scattering(const ScatteringGrid& raw, const TruncationParams& params) {
  params.validate();
  ScatteringGrid out = raw;
  out.c = params.c;
  out.R = params.automatic ? auto_radius(raw, params.c) : params.R;
  const int M = raw.grid.points;
  for (int idx = 0; idx < raw.grid.size(); ++idx) {
    const Complex k = raw.grid.node(idx % M, idx / M);
    const Complex v = raw.values[idx];
    const bool drop = raw.flagged[idx] || !finite(v) || std::abs(v) > params.c ||
                      std::abs(k) >= out.R;
    out.masked[idx] = drop;
    if (drop) out.values[idx] = 0;
  }
  return out;
}

ScatteringGrid lattice_scattering(const ScatteringEngine& engine, double R, double c,
                                  int lattice_points, double factor) {
  if (!(R > 0) || !(c > 0) || !(factor > 2)) {
    fail(ErrorCode::kInvalidParameter, "lattice_scattering: need R > 0, c > 0, factor > 2");
  }
  ScatteringGrid out;
  out.grid = {factor * R, lattice_points, true};
  out.grid.validate();
  out.R = R;
  out.c = c;
  const int n = out.grid.size();
  out.values.assign(n, 0.0);
  out.flagged.assign(n, 0);
  out.masked.assign(n, 1);
  parallel_for(n, [&](std::size_t idx) {
    const Complex k = out.grid.node(static_cast<int>(idx) % lattice_points,
                                    static_cast<int>(idx) / lattice_points);
    if (std::abs(k) >= R) return;
    const ScatteringEngine::Value v = engine.evaluate(k);
    out.flagged[idx] = v.flagged;
    if (!v.flagged && std::abs(v.t) <= c) {
      out.values[idx] = v.t;
      out.masked[idx] = 0;
    }
  });
  return out;
}

// ---------------------------------------------------------------------------
// D-bar solve.

DbarSolver::DbarSolver(ScatteringGrid t, DbarOptions options)
    : t_(std::move(t)), options_(options) {
  const KGrid& g = t_.grid;
  g.validate();
  if (!g.periodic) fail(ErrorCode::kInvalidParameter, "DbarSolver: needs a periodic lattice");
  if (static_cast<int>(t_.values.size()) != g.size()) {
    fail(ErrorCode::kInvalidParameter, "DbarSolver: value count does not match the lattice");
  }
  const int M = g.points;
  const double h = g.spacing();
  double support = 0;
  for (int idx = 0; idx < g.size(); ++idx) {
    if (t_.values[idx] != 0.0) {
      zero_ = false;
      support = std::max(support, std::abs(g.node(idx % M, idx / M)));
    }
  }
  const double cutoff = 2.0 * (t_.R > 0 ? t_.R : support) + 1e-9;
  if (cutoff > g.half_width * 2.0 - 1e-9 && !zero_) {
    fail(ErrorCode::kInvalidParameter, "DbarSolver: lattice too small for the support of t");
  }
  kernel_hat_.assign(g.size(), 0.0);
  for (int b = -M / 2; b < M / 2; ++b) {
    for (int a = -M / 2; a < M / 2; ++a) {
      const Complex k(a * h, b * h);
      if ((a == 0 && b == 0) || std::abs(k) > cutoff) continue;
      kernel_hat_[((b + M) % M) * M + (a + M) % M] = h * h / (kPi * k);
    }
  }
  fft2(kernel_hat_, M, false);
}

std::vector<Complex> DbarSolver::multiplier(Complex z) const {
  const KGrid& g = t_.grid;
  const int M = g.points;
  std::vector<Complex> m(g.size(), 0.0);
  for (int idx = 0; idx < g.size(); ++idx) {
    const Complex t = t_.values[idx];
    const Complex k = g.node(idx % M, idx / M);
    if (t == 0.0 || k == 0.0) continue;
    // e_{-k}(z) = exp(-i (k z + conj(k z))) = exp(-2i Re(k z)).
    m[idx] = t * std::polar(1.0, -2.0 * (k * z).real()) / (4.0 * kPi * std::conj(k));
  }
  return m;
}

std::vector<Complex> DbarSolver::convolve(const std::vector<Complex>& f) const {
  std::vector<Complex> a = f;
  const int M = t_.grid.points;
  fft2(a, M, false);
  for (std::size_t i = 0; i < a.size(); ++i) a[i] *= kernel_hat_[i];
  fft2(a, M, true);
  return a;
}

void DbarSolver::add_local_correction(const std::vector<Complex>& g,
                                      std::vector<Complex>& out) const {
  // d/dk = (d/dk1 - i d/dk2) / 2 by periodic central differences.
  const int M = t_.grid.points;
  const double h = t_.grid.spacing();
  const double scale = -h * h / kPi / (4 * h);
  for (int j = 0; j < M; ++j) {
    const int jp = (j + 1) % M, jm = (j + M - 1) % M;
    for (int i = 0; i < M; ++i) {
      const int ip = (i + 1) % M, im = (i + M - 1) % M;
      const Complex d = (g[j * M + ip] - g[j * M + im]) - kI * (g[jp * M + i] - g[jm * M + i]);
      out[j * M + i] += scale * d;
    }
  }
}

DbarSolution DbarSolver::solve(Complex z) const {
  const KGrid& g = t_.grid;
  const int n = g.size();
  const int M = g.points;
  DbarSolution sol;
  sol.z = z;
  sol.mu.assign(n, 1.0);
  sol.mu_at_zero = 1.0;
  sol.converged = true;
  if (zero_) return sol;
  const std::vector<Complex> m = multiplier(z);
  const LinearOperator apply = [&](const VectorXd& x) {
    std::vector<Complex> w(n);
    for (int i = 0; i < n; ++i) w[i] = m[i] * Complex(x(i), -x(n + i));
    std::vector<Complex> c = convolve(w);
    if (options_.local_correction) add_local_correction(w, c);
    VectorXd y(2 * n);
    for (int i = 0; i < n; ++i) {
      y(i) = x(i) - c[i].real();
      y(n + i) = x(n + i) - c[i].imag();
    }
    return y;
  };
  VectorXd b = VectorXd::Zero(2 * n);
  b.head(n).setOnes();
  const KrylovResult r =
      gmres_solve(apply, b, b, options_.tolerance, options_.max_iterations, options_.restart);
  for (int i = 0; i < n; ++i) sol.mu[i] = Complex(r.x(i), r.x(n + i));
  sol.mu_at_zero = sol.mu[(M / 2) * M + M / 2];
  sol.converged = r.converged;
  sol.iterations = r.iterations;
  return sol;
}

DbarSolution solve_dbar(Complex z, const ScatteringGrid& t, DbarOptions options) {
  return DbarSolver(t, options).solve(z);
}

std::vector<ReconstructedValue> reconstruct(const std::vector<Complex>& points,
                                            const ScatteringGrid& t, DbarOptions options) {
  const DbarSolver solver(t, options);
  std::vector<ReconstructedValue> out(points.size());
  parallel_for(points.size(), [&](std::size_t i) {
    if (std::abs(points[i]) > 1.0 + 1e-12) {
      fail(ErrorCode::kInvalidParameter, "reconstruct: point outside the closed unit disk");
    }
    const DbarSolution s = solver.solve(points[i]);
    ReconstructedValue& v = out[i];
    v.raw = s.mu_at_zero * s.mu_at_zero;
    v.sigma = std::max(v.raw.real(), 0.01);
    v.converged = s.converged;
    v.iterations = s.iterations;
  });
  return out;
}

void write_scattering(std::ostream& out, const ScatteringGrid& grid) {
  char buf[160];
  std::snprintf(buf, sizeof buf, "# half_width: %.17g\n# points: %d\n# periodic: %d\n",
                grid.grid.half_width, grid.grid.points, grid.grid.periodic ? 1 : 0);
  out << buf;
  std::snprintf(buf, sizeof buf, "# R: %.17g\n# c: %.17g\n", grid.R, grid.c);
  out << buf;
  const int M = grid.grid.points;
  for (int idx = 0; idx < grid.grid.size(); ++idx) {
    const Complex k = grid.grid.node(idx % M, idx / M);
    const bool masked = grid.masked.empty() ? false : grid.masked[idx];
    std::snprintf(buf, sizeof buf, "%.17g %.17g %.17g %.17g %d\n", k.real(), k.imag(),
                  grid.values[idx].real(), grid.values[idx].imag(), masked ? 1 : 0);
    out << buf;
  }
}

}  // namespace cdbar
