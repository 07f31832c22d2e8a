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


#include "cdbar/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <memory>

namespace cdbar {
namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

Phantom with_inclusions(DomainKind domain, std::vector<Inclusion> inc) {
  Phantom p;
  p.domain = domain;
  p.inclusions = std::move(inc);
  return p;
}

std::vector<Inclusion> three_inclusions() {
  return {{{0.05, 0.05}, 0.22, 3.0}, {{-0.55, -0.1}, 0.16, 0.2}, {{0.55, 0.15}, 0.16, 2.0}};
}

// Smallest circle through two or three points.
struct Circle {
  Complex c;
  double r = -1;
  bool holds(Complex z) const { return std::abs(z - c) <= r * (1 + 1e-12) + 1e-300; }
};

Circle circle2(Complex a, Complex b) { return {(a + b) / 2.0, std::abs(a - b) / 2}; }

Circle circle3(Complex a, Complex b, Complex c) {
  const Complex ab = b - a, ac = c - a;
  const double d = 2 * (ab.real() * ac.imag() - ab.imag() * ac.real());
  if (std::abs(d) < 1e-300) {
    // Collinear: the widest pair spans the circle.
    Circle best = circle2(a, b);
    for (const Circle& k : {circle2(a, c), circle2(b, c)}) {
      if (k.r > best.r) best = k;
    }
    return best;
  }
  const double b2 = std::norm(ab), c2 = std::norm(ac);
  const Complex u((ac.imag() * b2 - ab.imag() * c2) / d, (ab.real() * c2 - ac.real() * b2) / d);
  return {a + u, std::abs(u)};
}

}  // namespace

// ---------------------------------------------------------------------------
// Phantoms and regions.

Polygon rectangle_polygon() {
  return Polygon({{-0.85, -0.5}, {0.85, -0.5}, {0.85, 0.5}, {-0.85, 0.5}});
}

Phantom disk_phantom() { return with_inclusions(DomainKind::kDisk, three_inclusions()); }

Phantom rectangle_phantom() {
  Phantom p = with_inclusions(DomainKind::kPolygon, three_inclusions());
  p.polygon = rectangle_polygon();
  return p;
}

Phantom roi_disk_phantom() {
  return with_inclusions(DomainKind::kDisk, {{{-0.35, 0.35}, 0.22, 2.0},
                                             {{-0.3, -0.45}, 0.2, 0.3},
                                             {{0.4, -0.4}, 0.2, 3.0},
                                             {{0.62, 0.22}, 0.08, 3.0},
                                             {{0.38, 0.45}, 0.08, 0.2},
                                             {{0.7, 0.45}, 0.08, 2.0}});
}

Phantom halfplane_phantom() {
  return with_inclusions(DomainKind::kHalfplane, {{{-3.0, 0.7}, 0.4, 0.2},
                                                  {{3.0, 0.7}, 0.4, 2.0},
                                                  {{0.3, 1.8}, 0.5, 3.0}});
}

Phantom homogeneous_like(const Phantom& p) {
  Phantom h = p;
  h.inclusions.clear();
  return h;
}

Region Region::circle(Complex center, double radius) {
  if (!(radius > 0)) fail(ErrorCode::kInvalidRegion, "region radius must be > 0");
  Region r;
  r.center = center;
  r.radius = radius;
  return r;
}

Region Region::from_polygon(Polygon p) {
  Region r;
  r.kind = Kind::kPolygon;
  r.polygon = std::move(p);
  return r;
}

bool Region::contains(Complex z) const {
  return kind == Kind::kCircle ? std::abs(z - center) < radius : polygon->contains(z);
}

RoiSpec default_disk_roi() {
  // Quarter disk of radius 0.97.
  std::vector<Complex> v = {0.0};
  for (int i = 0; i <= 8; ++i) v.push_back(std::polar(0.97, kPi / 2 * i / 8));
  return {std::polar(0.6, kPi / 8), Region::from_polygon(Polygon(v))};
}

// ---------------------------------------------------------------------------
// Grids.

ReconstructionGrid domain_grid(const Phantom& domain, int n, double clearance) {
  if (n < 2) fail(ErrorCode::kInvalidParameter, "grid needs at least 2 nodes per side");
  ReconstructionGrid g;
  g.nx = g.ny = n;
  switch (domain.domain) {
    case DomainKind::kDisk:
      g.x_min = g.y_min = -1;
      g.x_max = g.y_max = 1;
      break;
    case DomainKind::kPolygon: {
      if (!domain.polygon) fail(ErrorCode::kInvalidGeometry, "polygon phantom without polygon");
      const auto& v = domain.polygon->vertices();
      g.x_min = g.x_max = v[0].real();
      g.y_min = g.y_max = v[0].imag();
      for (Complex w : v) {
        g.x_min = std::min(g.x_min, w.real());
        g.x_max = std::max(g.x_max, w.real());
        g.y_min = std::min(g.y_min, w.imag());
        g.y_max = std::max(g.y_max, w.imag());
      }
      break;
    }
    case DomainKind::kHalfplane:
      fail(ErrorCode::kInvalidParameter, "domain_grid: use halfplane_grid for the half-plane");
  }
  const double hx = (g.x_max - g.x_min) / n, hy = (g.y_max - g.y_min) / n;
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      const Complex z(g.x_min + (i + 0.5) * hx, g.y_min + (j + 0.5) * hy);
      const double gap = domain.domain == DomainKind::kDisk
                             ? 1.0 - std::abs(z)
                             : (domain.polygon->contains(z) ? domain.polygon->distance_to_boundary(z)
                                                            : -1.0);
      g.nodes.push_back(z);
      g.inside.push_back(gap >= clearance);
    }
  }
  g.sigma.assign(g.size(), 0.0);
  g.flagged.assign(g.size(), 0);
  return g;
}

ReconstructionGrid halfplane_grid(double x_min, double x_max, double height, int nx, int ny) {
  if (!(x_max > x_min) || !(height > 0) || nx < 2 || ny < 2) {
    fail(ErrorCode::kInvalidParameter, "halfplane_grid: empty window");
  }
  ReconstructionGrid g;
  g.nx = nx;
  g.ny = ny;
  g.x_min = x_min;
  g.x_max = x_max;
  g.y_min = 0;
  g.y_max = height;
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      g.nodes.emplace_back(x_min + (i + 0.5) * (x_max - x_min) / nx, (j + 0.5) * height / ny);
      g.inside.push_back(1);
    }
  }
  g.sigma.assign(g.size(), 0.0);
  g.flagged.assign(g.size(), 0);
  return g;
}

ReconstructionGrid rasterize(const Phantom& phantom, ReconstructionGrid grid) {
  for (int i = 0; i < grid.size(); ++i) grid.sigma[i] = grid.inside[i] ? phantom.sigma(grid.nodes[i]) : 0.0;
  return grid;
}

// ---------------------------------------------------------------------------
// Reconstruction.

ReconstructionGrid reconstruct_virtual(const OperatorMatrix& virtual_nd, const ConformalMap& map,
                                       ReconstructionGrid grid, const PipelineOptions& options,
                                       ScatteringGrid* kgrid_out) {
  const OperatorMatrix L = nd_to_dn(virtual_nd);
  const ScatteringEngine engine(L);
  const TruncationParams& tp = options.trunc;
  tp.validate();
  double R = tp.R;
  if (tp.automatic || kgrid_out) {
    const ScatteringGrid raw = engine.evaluate_grid(options.kgrid);
    if (tp.automatic) R = auto_radius(raw, tp.c);
    if (kgrid_out) *kgrid_out = truncate_scattering(raw, {R, tp.c, false});
  }
  const ScatteringGrid lattice =
      lattice_scattering(engine, R, tp.c, options.lattice, options.lattice_factor);

  std::vector<int> active;
  std::vector<Complex> points;
  for (int i = 0; i < grid.size(); ++i) {
    if (!grid.inside[i]) continue;
    Complex w = map.forward(grid.nodes[i]);
    if (std::abs(w) > 1) w /= std::abs(w);
    active.push_back(i);
    points.push_back(w);
  }
  const std::vector<ReconstructedValue> rec = reconstruct(points, lattice, options.dbar);
  std::fill(grid.sigma.begin(), grid.sigma.end(), 0.0);
  std::fill(grid.flagged.begin(), grid.flagged.end(), 0);
  for (std::size_t q = 0; q < active.size(); ++q) {
    grid.sigma[active[q]] = rec[q].sigma;
    grid.flagged[active[q]] = !rec[q].converged;
  }
  grid.metadata["map"] = map.descriptor();
  grid.metadata["N"] = std::to_string(virtual_nd.basis.N);
  grid.metadata["R"] = fmt(R);
  grid.metadata["c"] = fmt(tp.c);
  grid.metadata["auto_trunc"] = tp.automatic ? "1" : "0";
  grid.metadata["kmax"] = fmt(options.kgrid.half_width);
  grid.metadata["kgrid"] = std::to_string(options.kgrid.points);
  grid.metadata["lattice"] = std::to_string(options.lattice);
  grid.metadata["lattice_factor"] = fmt(options.lattice_factor);
  return grid;
}

ConformalMap roi_map(const Phantom& domain, const RoiSpec& roi, std::vector<std::string>* warnings) {
  if (!domain.inside_domain(roi.anchor)) {
    fail(ErrorCode::kInvalidParameter, "roi anchor must lie inside the domain");
  }
  double gap = 0;
  ConformalMap base;
  switch (domain.domain) {
    case DomainKind::kDisk:
      gap = 1 - std::abs(roi.anchor);
      break;
    case DomainKind::kPolygon: {
      gap = domain.polygon->distance_to_boundary(roi.anchor);
      const Complex origin = domain.polygon->contains(0.0) ? Complex(0.0) : [&] {
        Complex s = 0;
        for (Complex v : domain.polygon->vertices()) s += v;
        return s / static_cast<double>(domain.polygon->size());
      }();
      base = ConformalMap::schwarz_christoffel(std::make_shared<ScMap>(*domain.polygon, origin));
      break;
    }
    case DomainKind::kHalfplane:
      fail(ErrorCode::kInvalidParameter, "roi_map: half-plane domains use the sweep");
  }
  if (gap < 0.02 && warnings) {
    warnings->push_back("excessive-magnification: anchor is within 0.02 of the boundary");
  }
  const Complex a = base.forward(roi.anchor);
  if (a == 0.0) return base;
  const ConformalMap m = ConformalMap::disk_mobius(a);
  return domain.domain == DomainKind::kDisk ? m : compose(m, base);
}

double roi_error(const ReconstructionGrid& grid, const Phantom& truth, const Region& region) {
  double num = 0, den = 0;
  int count = 0;
  for (int i = 0; i < grid.size(); ++i) {
    if (!grid.inside[i] || !region.contains(grid.nodes[i])) continue;
    const double s = truth.sigma(grid.nodes[i]);
    num += (grid.sigma[i] - s) * (grid.sigma[i] - s);
    den += s * s;
    ++count;
  }
  if (count == 0) fail(ErrorCode::kInvalidRegion, "roi_error: region holds no grid nodes");
  return std::sqrt(num / den);
}

double relative_l2_error(const ReconstructionGrid& grid, const Phantom& truth) {
  double num = 0, den = 0;
  for (int i = 0; i < grid.size(); ++i) {
    if (!grid.inside[i]) continue;
    const double s = truth.sigma(grid.nodes[i]);
    num += (grid.sigma[i] - s) * (grid.sigma[i] - s);
    den += s * s;
  }
  if (den == 0) fail(ErrorCode::kInvalidRegion, "relative_l2_error: empty grid");
  return std::sqrt(num / den);
}

double grid_value_near(const ReconstructionGrid& grid, Complex z) {
  int best = -1;
  for (int i = 0; i < grid.size(); ++i) {
    if (grid.inside[i] && (best < 0 || std::abs(grid.nodes[i] - z) < std::abs(grid.nodes[best] - z))) {
      best = i;
    }
  }
  if (best < 0) fail(ErrorCode::kInvalidRegion, "grid_value_near: no inside nodes");
  return grid.sigma[best];
}

// ---------------------------------------------------------------------------
// Point electrodes.

Complex VirtualCurrent::operator()(double theta) const {
  Complex s = 0;
  for (const auto& [n, c] : modes) s += c * std::polar(1.0, n * theta);
  return s / std::sqrt(kTwoPi);
}

VirtualCurrent VirtualCurrent::sobolev(double r, int n_max) {
  VirtualCurrent f;
  for (int n = 1; n <= n_max; ++n) {
    const double a = std::pow(n, -(r + 0.55));
    f.modes.emplace_back(n, a);
    f.modes.emplace_back(-n, -a);
  }
  return f;
}

VirtualCurrent VirtualCurrent::fourier_mode(int n) {
  if (n <= 0) fail(ErrorCode::kInvalidParameter, "fourier_mode: n must be positive");
  VirtualCurrent f;
  f.modes = {{n, 1.0}, {-n, -1.0}};
  return f;
}

double quotient_max_norm(const VectorXcd& v) {
  // Incremental smallest enclosing circle.
  const int n = static_cast<int>(v.size());
  if (n == 0) return 0;
  Circle c{v(0), 0};
  for (int i = 1; i < n; ++i) {
    if (c.holds(v(i))) continue;
    c = {v(i), 0};
    for (int j = 0; j < i; ++j) {
      if (c.holds(v(j))) continue;
      c = circle2(v(i), v(j));
      for (int k = 0; k < j; ++k) {
        if (!c.holds(v(k))) c = circle3(v(i), v(j), v(k));
      }
    }
  }
  return c.r;
}

std::vector<PemStudyRow> pem_convergence_study(const Phantom& phantom, const ConformalMap& map,
                                               const VirtualCurrent& f,
                                               const std::vector<int>& M_list, int reference_N) {
  BasisSpec spec;
  spec.N = reference_N;
  const int quad = std::max(kDefaultBoundaryNodes, 4 * reference_N);
  SimulationOptions sim;
  sim.quad_nodes = quad;
  const OperatorMatrix Rv = map.kind() == MapKind::kIdentity && phantom.domain == DomainKind::kDisk
                                ? nd_matrix(phantom, spec, sim)
                                : mapped_phantom_nd(phantom, map, spec, sim);
  const MatrixXcd dR = Rv.entries - unit_disk_nd(reference_N).entries;
  VectorXcd coeff = VectorXcd::Zero(spec.dim());
  for (const auto& [n, c] : f.modes) {
    if (n != 0 && std::abs(n) <= reference_N) coeff(spec.index_of(n)) += c;
  }
  const VectorXcd rel = dR * coeff;

  std::vector<PemStudyRow> rows;
  for (int M : M_list) {
    const ElectrodeArray e = make_electrodes(map, M);
    VectorXcd samples(M), ref(M);
    for (int m = 0; m < M; ++m) {
      const double th = e.virtual_angles[m];
      samples(m) = f(th);
      Complex u = 0;
      for (int q = 0; q < spec.dim(); ++q) u += rel(q) * basis_eval(spec, spec.mode_of(q), th);
      ref(m) = u;
    }
    const VectorXcd v = pem_operator(phantom, e, map) * pem_currents(samples);
    rows.push_back({M, quotient_max_norm(v - ref)});
  }
  return rows;
}

double loglog_slope(const std::vector<PemStudyRow>& rows) {
  if (rows.size() < 2) fail(ErrorCode::kInvalidParameter, "loglog_slope: need two rows");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(rows.size());
  for (const auto& r : rows) {
    const double x = std::log(r.M), y = std::log(r.error);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

// ---------------------------------------------------------------------------
// Half-plane sweep.

OperatorMatrix halfplane_virtual_relative_nd(const Phantom& phantom, double b,
                                             const SweepOptions& options) {
  if (phantom.domain != DomainKind::kHalfplane) {
    fail(ErrorCode::kInvalidParameter, "halfplane sweep needs a half-plane phantom");
  }
  const ConformalMap map = ConformalMap::halfplane_mobius(b, options.xi);
  const int M = options.electrodes;
  const ElectrodeArray e = make_electrodes(map, M, 0.5);
  const MatrixXcd A = pem_operator(phantom, e, map);
  std::vector<int> keep;
  for (int m = 0; m < M; ++m) {
    if (std::abs(e.true_positions[m].real() - b) <= options.window) keep.push_back(m);
  }
  if (keep.size() < 2) fail(ErrorCode::kInvalidGeometry, "measurement window holds < 2 electrodes");
  // Window mask on both sides of the PEM operator: currents and potentials
  // outside the window are set to zero.
  VectorXd mask = VectorXd::Zero(M);
  for (int m : keep) mask(m) = 1;
  const MatrixXcd W = mask.cast<Complex>().asDiagonal() * A * mask.cast<Complex>().asDiagonal();

  BasisSpec spec;
  spec.N = options.N;
  MatrixXcd F(M, spec.dim());
  for (int m = 0; m < M; ++m) {
    for (int col = 0; col < spec.dim(); ++col) {
      F(m, col) = basis_eval(spec, spec.mode_of(col), e.virtual_angles[m]);
    }
  }
  OperatorMatrix out;
  out.basis = spec;
  out.role = OperatorRole::kRelativeND;
  // Pairing with the basis by the M-point rule on the virtual circle.
  MatrixXcd I(M, spec.dim());
  for (int col = 0; col < spec.dim(); ++col) I.col(col) = pem_currents(F.col(col));
  out.entries = (kTwoPi / M) * (F.adjoint() * (W * I));
  out.metadata["map"] = map.descriptor();
  out.metadata["electrodes"] = std::to_string(M);
  out.metadata["window"] = fmt(options.window);
  return out;
}

std::vector<ReconstructionGrid> halfplane_sweep(const Phantom& phantom,
                                                const std::vector<double>& b_list,
                                                const SweepOptions& options) {
  phantom.validate();
  std::vector<ReconstructionGrid> out;
  for (double b : b_list) {
    const ConformalMap map = ConformalMap::halfplane_mobius(b, options.xi);
    OperatorMatrix nd = halfplane_virtual_relative_nd(phantom, b, options);
    nd.entries += unit_disk_nd(options.N).entries;
    nd.role = OperatorRole::kND;
    ReconstructionGrid grid = options.grid ? *options.grid : halfplane_grid(-6, 6, 3, 96, 24);
    PipelineOptions po = options.pipeline;
    po.N = options.N;
    grid = reconstruct_virtual(nd, map, std::move(grid), po);
    grid.metadata["b"] = fmt(b);
    grid.metadata["electrodes"] = std::to_string(options.electrodes);
    grid.metadata["window"] = fmt(options.window);
    out.push_back(std::move(grid));
  }
  return out;
}

}  // namespace cdbar
