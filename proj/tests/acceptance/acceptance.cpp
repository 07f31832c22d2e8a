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


// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on failure.

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <cstdio>
#include <functional>
#include <memory>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "cdbar/common.hpp"
#include "cdbar/conformal.hpp"
#include "cdbar/dbar_core.hpp"
#include "cdbar/faddeev.hpp"
#include "cdbar/forward_sim.hpp"
#include "cdbar/fourier_ops.hpp"
#include "cdbar/io.hpp"
#include "cdbar/pipeline.hpp"
#include "oracles/oracles.hpp"

namespace {

using namespace cdbar;
using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

double max_abs(const MatrixXcd& m) { return m.cwiseAbs().maxCoeff(); }

int failures = 0;
bool quiet = false;  // set while repeating runs for the determinism check

void report(int id, bool pass, const std::string& detail) {
  if (quiet) return;
  std::printf("criterion %2d: %s  %s\n", id, pass ? "PASS" : "FAIL", detail.c_str());
  std::fflush(stdout);
  if (!pass) ++failures;
}

std::string format(const char* fmt, double a = 0, double b = 0, double c = 0, double d = 0) {
  char buf[512];
  std::snprintf(buf, sizeof buf, fmt, a, b, c, d);
  return buf;
}

// Serialized outputs of criteria 5-10, compared across two runs.
struct Outputs {
  std::vector<std::string> blobs;
  void add(const ReconstructionGrid& g) {
    std::ostringstream ss;
    write_grid_csv(ss, g);
    blobs.push_back(ss.str());
  }
  void add(double v) { blobs.push_back(format("%.17g", v)); }
};

PipelineOptions auto_options(double c) {
  PipelineOptions o;
  o.trunc = {0, c, true};
  return o;
}

double relative_difference(const ReconstructionGrid& a, const ReconstructionGrid& b) {
  double num = 0, den = 0;
  for (int i = 0; i < a.size(); ++i) {
    if (!a.inside[i]) continue;
    num += (a.sigma[i] - b.sigma[i]) * (a.sigma[i] - b.sigma[i]);
    den += b.sigma[i] * b.sigma[i];
  }
  return std::sqrt(num / den);
}

// Closed-form ND eigenvalue of a centred disk of radius rho and conductivity s
// in the unit disk with background 1.
double concentric_eigenvalue(double rho, double s, int n) {
  const double mu = (1 - s) / (1 + s), q = mu * std::pow(rho, 2 * std::abs(n));
  return (1 + q) / (1 - q) / std::abs(n);
}

void criterion1() {
  const auto t0 = Clock::now();
  const BasisSpec spec{16};
  const OperatorMatrix L = nd_to_dn(nd_matrix(Phantom{}, spec));
  MatrixXcd want = MatrixXcd::Zero(spec.dim(), spec.dim());
  for (int i = 0; i < spec.dim(); ++i) want(i, i) = std::abs(spec.mode_of(i));
  const double err = max_abs(L.entries - want), t = seconds_since(t0);
  report(1, err <= 1e-8 && t < 10, format("max |L1 - diag|n|| = %.3g, %.2f s", err, t));
}

void criterion2() {
  const auto t0 = Clock::now();
  const BasisSpec spec{16};
  double worst = 0;
  for (double rho : {0.3, 0.5}) {
    for (double s : {0.5, 2.0, 5.0}) {
      Phantom p;
      p.inclusions = {{0.0, rho, s}};
      const OperatorMatrix R = nd_matrix(p, spec);
      MatrixXcd want = MatrixXcd::Zero(spec.dim(), spec.dim());
      for (int i = 0; i < spec.dim(); ++i) want(i, i) = concentric_eigenvalue(rho, s, spec.mode_of(i));
      worst = std::max(worst, max_abs(R.entries - want));
    }
  }
  const double t = seconds_since(t0);
  report(2, worst <= 1e-4 && t < 60, format("max deviation %.3g over 6 phantoms, %.1f s", worst, t));
}

void criterion3() {
  const double h = 1e-3;
  double lap_worst = 0;
  const std::vector<Complex> pts = oracle::halton_disk(20, 2.0);
  for (Complex z : pts) {
    const double lap = (h1(z + h) + h1(z - h) + h1(z + kI * h) + h1(z - kI * h) - 4 * h1(z)) / (h * h);
    lap_worst = std::max(lap_worst, std::abs(lap));
  }
  double g_worst = 0;
  for (Complex z : {Complex(1, 1), Complex(0.4, -0.7), Complex(-1.5, 0.3), Complex(0.2, 2.0),
                    Complex(-0.8, -1.1)}) {
    const Complex ref = oracle::g1_quadrature(z);
    g_worst = std::max(g_worst, std::abs(g1(z) - ref) / std::abs(ref));
  }
  report(3, lap_worst <= 1e-4 && g_worst <= 1e-5,
         format("harmonicity residual %.3g (20 points), g1 rel. error %.3g (5 points)", lap_worst,
                g_worst));
}

void criterion4() {
  const BasisSpec spec{16};
  std::mt19937 rng(2026);
  std::uniform_real_distribution<double> u(-10, 10);
  double worst = 0;
  auto S = [&](Complex k) {
    return single_layer_from_hhat(assemble_hhat(k, spec, HhatAssembly::kDirect), k);
  };
  for (int trial = 0; trial < 10; ++trial) {
    Complex k(u(rng), u(rng));
    const MatrixXcd s = S(k);
    const double scale = max_abs(s);
    worst = std::max(worst, max_abs(S(-k) - s.adjoint()) / scale);
    worst = std::max(worst, max_abs(S(std::conj(k)) - s.transpose()) / scale);
    MatrixXcd rotated = S(std::abs(k));
    for (int r = 0; r < spec.dim(); ++r) {
      for (int c = 0; c < spec.dim(); ++c) {
        rotated(r, c) *= std::polar(1.0, std::arg(k) * (spec.mode_of(r) - spec.mode_of(c)));
      }
    }
    worst = std::max(worst, max_abs(s - rotated) / scale);
  }
  report(4, worst <= 1e-10, format("max relative violation %.3g over 10 k", worst));
}

void criterion5(Outputs& out) {
  const auto t0 = Clock::now();
  const OperatorMatrix nd = nd_matrix(Phantom{}, BasisSpec{16});
  const ScatteringEngine engine(nd_to_dn(nd));
  double tmax = 0;
  const KGrid probe{8, 32, false};
  for (int j = 0; j < probe.points; ++j) {
    for (int i = 0; i < probe.points; ++i) {
      const Complex k = probe.node(i, j);
      if (k == 0.0 || std::abs(k) > 8) continue;
      tmax = std::max(tmax, std::abs(engine.evaluate(k).t));
    }
  }
  const ReconstructionGrid g =
      reconstruct_virtual(nd, ConformalMap::identity(), domain_grid(Phantom{}, 64), auto_options(10));
  double dev = 0;
  for (int i = 0; i < g.size(); ++i) {
    if (g.inside[i]) dev = std::max(dev, std::abs(g.sigma[i] - 1));
  }
  out.add(tmax);
  out.add(g);
  const double t = seconds_since(t0);
  report(5, tmax <= 1e-6 && dev <= 1e-3 && t < 300,
         format("max |t| = %.3g on |k| <= 8, max |sigma - 1| = %.3g, %.0f s", tmax, dev, t));
}

void criterion6(Outputs& out) {
  const auto t0 = Clock::now();
  const Phantom p = disk_phantom();
  const OperatorMatrix nd = nd_matrix(p, BasisSpec{16});
  const ReconstructionGrid g =
      reconstruct_virtual(nd, ConformalMap::identity(), domain_grid(p, 64), auto_options(10));
  const double err = relative_l2_error(g, p), R = std::stod(g.metadata.at("R"));
  out.add(g);
  const double t = seconds_since(t0);
  report(6, err <= 0.35 && std::abs(R - 8) <= 2 && t < 1800,
         format("relative L2 error %.4f (paper 0.189), auto R = %g (paper 8), %.0f s", err, R, t));
}

void criterion7(Outputs& out) {
  const BasisSpec spec{16};
  struct Case {
    const char* name;
    Phantom phantom;
    ConformalMap map;
  };
  const Phantom rect = rectangle_phantom();
  const std::vector<Case> cases = {
      {"rectangle", rect,
       ConformalMap::schwarz_christoffel(std::make_shared<ScMap>(*rect.polygon, 0.0))},
      {"M_0.6", disk_phantom(), ConformalMap::disk_mobius(0.6)}};
  std::string detail;
  bool pass = true;
  for (const Case& c : cases) {
    const OperatorMatrix pushed = pushforward_nd(true_domain_sampler(c.phantom, c.map), c.map, spec);
    const OperatorMatrix direct = mapped_phantom_nd(c.phantom, c.map, spec);
    const ReconstructionGrid grid = domain_grid(c.phantom, 64);
    const ReconstructionGrid a = reconstruct_virtual(pushed, c.map, grid, auto_options(10));
    const ReconstructionGrid b = reconstruct_virtual(direct, c.map, grid, auto_options(10));
    const double diff = relative_difference(a, b);
    out.add(a);
    out.add(b);
    pass = pass && diff <= 5e-2;
    detail += c.name + format(": relative L2 difference %.3g; ", diff);
  }
  report(7, pass, detail);
}

void criterion8(Outputs& out) {
  const Phantom p = roi_disk_phantom();
  const RoiSpec roi = default_disk_roi();
  const BasisSpec spec{16};
  const ReconstructionGrid grid = domain_grid(p, 64);
  const ConformalMap mag = roi_map(p, roi);
  const ConformalMap id = ConformalMap::identity();
  const ReconstructionGrid a =
      reconstruct_virtual(mapped_phantom_nd(p, mag, spec), mag, grid, auto_options(20));
  const ReconstructionGrid b = reconstruct_virtual(nd_matrix(p, spec), id, grid, auto_options(20));
  const double ea = roi_error(a, p, roi.region), eb = roi_error(b, p, roi.region);
  out.add(a);
  out.add(b);
  report(8, ea < eb && ea <= 0.30,
         format("ROI error magnified %.4f vs unmagnified %.4f (paper 0.181 vs 0.273)", ea, eb));
}

void criterion9(Outputs& out) {
  const auto t0 = Clock::now();
  const Phantom p = disk_phantom();
  const ConformalMap map = ConformalMap::disk_mobius(Complex(0.2, 0.3));
  const std::vector<int> Ms{8, 16, 32, 64, 128};
  const double rough = loglog_slope(pem_convergence_study(p, map, VirtualCurrent::sobolev(2), Ms));
  const double mode = loglog_slope(pem_convergence_study(p, map, VirtualCurrent::fourier_mode(2), Ms));
  out.add(rough);
  out.add(mode);
  const double t = seconds_since(t0);
  report(9, rough <= -1.3 && mode <= -4 && t < 600,
         format("slope H^2 current %.3f (<= -1.3), Fourier mode %.3f (<= -4), %.0f s", rough, mode, t));
}

void criterion10(Outputs& out) {
  const auto t0 = Clock::now();
  SweepOptions o;
  o.xi = {0, 1.2};
  o.N = 5;
  o.pipeline = auto_options(10);
  const std::vector<double> bs{-3, -1.5, 0, 1.5, 3};
  const Phantom p = halfplane_phantom();
  const std::vector<ReconstructionGrid> null = halfplane_sweep(homogeneous_like(p), bs, o);
  double dev = 0;
  for (const ReconstructionGrid& g : null) {
    for (int i = 0; i < g.size(); ++i) {
      if (g.inside[i]) dev = std::max(dev, std::abs(g.sigma[i] - 1));
    }
    out.add(g);
  }
  const std::vector<ReconstructionGrid> rec = halfplane_sweep(p, bs, o);
  for (const ReconstructionGrid& g : rec) out.add(g);
  const Complex target(-3, 0.7);
  const double near = std::abs(grid_value_near(rec.front(), target) - 1);
  const double far = std::abs(grid_value_near(rec.back(), target) - 1);
  const double ratio = far > 0 ? near / far : INFINITY;
  const double t = seconds_since(t0);
  report(10, dev <= 1e-2 && ratio >= 2 && t < 3600,
         format("null deviation %.3g, contrast at -3+0.7i: b=-3 %.3g vs b=3 %.3g (ratio %.2f)", dev,
                near, far, ratio) +
             format(", %.0f s", t));
}

std::set<int> selected;  // empty: all criteria

bool wanted(int id) { return selected.empty() || selected.count(id); }

Outputs run_reconstruction_criteria() {
  Outputs out;
  if (wanted(5)) criterion5(out);
  if (wanted(6)) criterion6(out);
  if (wanted(7)) criterion7(out);
  if (wanted(8)) criterion8(out);
  if (wanted(9)) criterion9(out);
  if (wanted(10)) criterion10(out);
  return out;
}

}  // namespace

// Optional arguments select criteria by number; the default runs all.
int main(int argc, char** argv) {
  for (int i = 1; i < argc; ++i) selected.insert(std::atoi(argv[i]));
  const auto t0 = Clock::now();
  try {
    if (wanted(1)) criterion1();
    if (wanted(2)) criterion2();
    if (wanted(3)) criterion3();
    if (wanted(4)) criterion4();
    const Outputs first = run_reconstruction_criteria();
    if (wanted(11)) {
      std::printf("repeating criteria 5-10 for the determinism check\n");
      std::fflush(stdout);
      quiet = true;
      const Outputs second = run_reconstruction_criteria();
      quiet = false;
      std::size_t differ = 0;
      for (std::size_t i = 0; i < first.blobs.size(); ++i) differ += first.blobs[i] != second.blobs[i];
      report(11, !first.blobs.empty() && first.blobs.size() == second.blobs.size() && differ == 0,
             format("%g of %g serialized outputs differ between runs", static_cast<double>(differ),
                    static_cast<double>(first.blobs.size())));
    }
  } catch (const std::exception& e) {
    std::printf("acceptance aborted: %s\n", e.what());
    return 1;
  }
  std::printf("total %.0f s, %d criteria failed\n", seconds_since(t0), failures);
  return failures == 0 ? 0 : 1;
}
