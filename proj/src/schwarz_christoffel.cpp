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

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <Eigen/QR>

#include "cdbar/conformal.hpp"

namespace cdbar {
namespace detail {

constexpr int kJacobiNodes = 24;
constexpr int kMaxDepth = 60;

// Compound Gauss–Jacobi integration of the SC integrand along straight
// segments. A segment is halved while the distance from a prevertex it does
// not own to the segment is below half its length.
struct ScIntegrator {
  int n = 0;
  std::vector<double> betas;
  std::vector<Complex> pre;
  std::shared_ptr<const std::vector<QuadratureRule>> rules;

  const QuadratureRule& rule(int ka, int kb) const {
    return (*rules)[(ka + 1) * (n + 1) + (kb + 1)];
  }

  Complex integrand(Complex z) const {
    Complex f = 1.0;
    for (int k = 0; k < n; ++k) f *= std::pow(1.0 - z / pre[k], betas[k]);
    return f;
  }

  Complex segment(Complex za, int ka, Complex zb, int kb, int depth) const {
    const Complex d = zb - za;
    const double len = std::abs(d);
    if (len == 0.0) return 0.0;
    double clearance = std::numeric_limits<double>::infinity();
    for (int j = 0; j < n; ++j) {
      if (j == ka || j == kb) continue;
      const double t = std::clamp(((pre[j] - za) * std::conj(d)).real() / (len * len), 0.0, 1.0);
      clearance = std::min(clearance, std::abs(pre[j] - (za + t * d)));
    }
    if (clearance < 0.5 * len && depth < kMaxDepth) {
      const Complex mid = 0.5 * (za + zb);
      return segment(za, ka, mid, -1, depth + 1) + segment(mid, -1, zb, kb, depth + 1);
    }
    const Complex half = 0.5 * d;
    const Complex mid = 0.5 * (za + zb);
    Complex factor = 1.0;
    if (ka >= 0) factor *= std::pow(-half / pre[ka], betas[ka]);
    if (kb >= 0) factor *= std::pow(half / pre[kb], betas[kb]);
    const QuadratureRule& q = rule(ka, kb);
    Complex sum = 0.0;
    for (int i = 0; i < q.nodes.size(); ++i) {
      const Complex zeta = mid + half * q.nodes(i);
      Complex f = 1.0;
      for (int j = 0; j < n; ++j) {
        if (j == ka || j == kb) continue;
        f *= std::pow(1.0 - zeta / pre[j], betas[j]);
      }
      sum += q.weights(i) * f;
    }
    return half * factor * sum;
  }
};

std::shared_ptr<const std::vector<QuadratureRule>> make_rules(const std::vector<double>& betas) {
  const int n = static_cast<int>(betas.size());
  auto rules = std::make_shared<std::vector<QuadratureRule>>((n + 1) * (n + 1));
  for (int ka = -1; ka < n; ++ka) {
    for (int kb = -1; kb < n; ++kb) {
      const double a = kb >= 0 ? betas[kb] : 0.0;
      const double b = ka >= 0 ? betas[ka] : 0.0;
      (*rules)[(ka + 1) * (n + 1) + (kb + 1)] = gauss_jacobi(kJacobiNodes, a, b);
    }
  }
  return rules;
}

}  // namespace detail

namespace {

std::vector<double> betas_of(const Polygon& polygon) {
  std::vector<double> betas;
  double sum = 0;
  for (double a : polygon.alphas()) {
    betas.push_back(a - 1.0);
    sum += a - 1.0;
  }
  // Remove rounding drift so the exponents sum to -2 exactly as doubles allow.
  betas.back() -= sum + 2.0;
  return betas;
}

std::vector<double> angles_from_vars(const VectorXd& y) {
  const int n = static_cast<int>(y.size()) + 1;
  std::vector<double> g(n);
  double ymax = 0;
  for (int k = 0; k + 1 < n; ++k) ymax = std::max(ymax, y(k));
  g[0] = std::exp(-ymax);
  double total = g[0];
  for (int k = 1; k < n; ++k) {
    g[k] = std::exp(y(k - 1) - ymax);
    total += g[k];
  }
  std::vector<double> theta(n);
  theta[0] = 0;
  for (int k = 1; k < n; ++k) theta[k] = theta[k - 1] + kTwoPi * g[k - 1] / total;
  return theta;
}

struct ResidualContext {
  const Polygon* polygon;
  Complex anchor;
  std::vector<double> betas;
  std::shared_ptr<const std::vector<QuadratureRule>> rules;
};

VectorXd residual(const ResidualContext& ctx, const VectorXd& y, Complex* c_out) {
  const int n = ctx.polygon->size();
  const auto& w = ctx.polygon->vertices();
  const std::vector<double> theta = angles_from_vars(y);
  detail::ScIntegrator integ;
  integ.n = n;
  integ.betas = ctx.betas;
  integ.rules = ctx.rules;
  integ.pre.resize(n);
  for (int k = 0; k < n; ++k) integ.pre[k] = std::polar(1.0, theta[k]);
  std::vector<Complex> sides(n);
  for (int k = 0; k < n; ++k) {
    sides[k] = integ.segment(integ.pre[k], k, integ.pre[(k + 1) % n], (k + 1) % n, 0);
  }
  const double len0 = std::abs(w[1] - w[0]);
  const Complex c = (w[1] - w[0]) / sides[0];
  VectorXd r(n - 1);
  for (int j = 1; j <= n - 3; ++j) {
    const double target = std::abs(w[(j + 1) % n] - w[j]) / len0;
    r(j - 1) = std::log(std::abs(sides[j] / sides[0])) - std::log(target);
  }
  const Complex to_first = integ.segment(0.0, -1, integ.pre[0], 0, 0);
  const Complex miss = (ctx.anchor + c * to_first - w[0]) / len0;
  r(n - 3) = miss.real();
  r(n - 2) = miss.imag();
  if (c_out) *c_out = c;
  return r;
}

}  // namespace

SCParameters sc_solve_parameters(const Polygon& polygon, Complex anchor) {
  if (!polygon.contains(anchor)) {
    fail(ErrorCode::kInvalidParameter, "SC anchor must lie strictly inside the polygon");
  }
  const int n = polygon.size();
  ResidualContext ctx{&polygon, anchor, betas_of(polygon), nullptr};
  ctx.rules = detail::make_rules(ctx.betas);

  // Initial guess: vertex directions seen from the anchor.
  const auto& w = polygon.vertices();
  std::vector<double> phi(n);
  phi[0] = 0;
  bool monotone = true;
  for (int k = 1; k < n; ++k) {
    double step = std::arg((w[k] - anchor) / (w[k - 1] - anchor));
    if (step <= 0) monotone = false;
    phi[k] = phi[k - 1] + step;
  }
  if (phi[n - 1] >= kTwoPi) monotone = false;
  VectorXd y(n - 1);
  for (int k = 1; k < n; ++k) {
    const double g0 = monotone ? phi[1] - phi[0] : 1.0;
    const double gk = monotone ? (k + 1 < n ? phi[k + 1] - phi[k] : kTwoPi - phi[k]) : 1.0;
    y(k - 1) = std::log(gk / g0);
  }

  VectorXd r = residual(ctx, y, nullptr);
  double rnorm = r.norm();
  int it = 0;
  constexpr int kMaxIter = 100;
  for (; it < kMaxIter && rnorm > 1e-13; ++it) {
    MatrixXd jac(n - 1, n - 1);
    for (int j = 0; j < n - 1; ++j) {
      const double h = 1e-6;
      VectorXd yp = y, ym = y;
      yp(j) += h;
      ym(j) -= h;
      jac.col(j) = (residual(ctx, yp, nullptr) - residual(ctx, ym, nullptr)) / (2 * h);
    }
    const VectorXd dy = jac.colPivHouseholderQr().solve(-r);
    double t = 1.0;
    bool accepted = false;
    while (t > 1e-6) {
      const VectorXd trial = y + t * dy;
      const VectorXd rt = residual(ctx, trial, nullptr);
      if (rt.allFinite() && rt.norm() < rnorm) {
        y = trial;
        r = rt;
        rnorm = rt.norm();
        accepted = true;
        break;
      }
      t *= 0.5;
    }
    if (!accepted) break;
  }
  const std::vector<double> theta = angles_from_vars(y);
  for (int k = 0; k < n; ++k) {
    const double gap = (k + 1 < n ? theta[k + 1] : kTwoPi) - theta[k];
    if (gap < 1e-8) {
      fail(ErrorCode::kParameterProblemFailure,
           "SC prevertex crowding: gap below 1e-8; polygon not supported");
    }
  }
  if (!(rnorm <= 1e-10)) {
    std::ostringstream msg;
    msg << "SC parameter problem did not converge: residual " << rnorm << " after " << it
        << " iterations";
    fail(ErrorCode::kParameterProblemFailure, msg.str());
  }
  SCParameters p;
  residual(ctx, y, &p.C);
  p.prevertex_angles = theta;
  for (double t : theta) p.prevertices.push_back(std::polar(1.0, t));
  p.betas = ctx.betas;
  p.A = anchor;
  p.residual = rnorm;
  p.iterations = it;
  return p;
}

ScMap::ScMap(Polygon polygon, Complex anchor)
    : polygon_(std::move(polygon)), params_(sc_solve_parameters(polygon_, anchor)) {
  build();
}

ScMap::ScMap(Polygon polygon, SCParameters params)
    : polygon_(std::move(polygon)), params_(std::move(params)) {
  if (static_cast<int>(params_.prevertices.size()) != polygon_.size()) {
    fail(ErrorCode::kInvalidParameter, "SC parameters do not match the polygon");
  }
  build();
}

void ScMap::build() {
  auto integ = std::make_shared<detail::ScIntegrator>();
  integ->n = polygon_.size();
  integ->betas = params_.betas;
  integ->pre = params_.prevertices;
  integ->rules = detail::make_rules(params_.betas);
  integrator_ = integ;
  scale_ = polygon_.diameter();
  const double radii[] = {0.0, 0.3, 0.5, 0.65, 0.78, 0.87, 0.93, 0.97};
  constexpr int kAngles = 64;
  for (double r : radii) {
    const int m = r == 0.0 ? 1 : kAngles;
    for (int j = 0; j < m; ++j) {
      const Complex z = std::polar(r, kTwoPi * (j + 0.5) / m);
      grid_z_.push_back(z);
      grid_w_.push_back(evaluate(z));
    }
  }
}

Complex ScMap::integral(Complex za, int ka, Complex zb, int kb) const {
  return integrator_->segment(za, ka, zb, kb, 0);
}

Complex ScMap::integrand(Complex z) const { return integrator_->integrand(z); }

Complex ScMap::evaluate(Complex z) const {
  if (std::abs(z) > 1.0 + 1e-12) {
    fail(ErrorCode::kInvalidParameter, "sc_evaluate: point outside the closed unit disk");
  }
  const int n = polygon_.size();
  const auto& pre = params_.prevertices;
  int nearest = 0;
  double dmin = std::numeric_limits<double>::infinity();
  for (int k = 0; k < n; ++k) {
    const double d = std::abs(z - pre[k]);
    if (d < dmin) {
      dmin = d;
      nearest = k;
    }
  }
  if (dmin < 1e-15) return polygon_.vertices()[nearest];
  if (dmin < std::abs(z)) {
    return polygon_.vertices()[nearest] + params_.C * integral(pre[nearest], nearest, z, -1);
  }
  return params_.A + params_.C * integral(0.0, -1, z, -1);
}

Jet ScMap::jet(Complex z) const {
  const auto& pre = params_.prevertices;
  for (const Complex& p : pre) {
    if (std::abs(z - p) < 1e-14) {
      fail(ErrorCode::kCornerSingularity, "SC derivative requested at a prevertex");
    }
  }
  Jet j;
  j.value = evaluate(z);
  j.d1 = params_.C * integrand(z);
  Complex s = 0.0;
  for (std::size_t k = 0; k < pre.size(); ++k) s += params_.betas[k] / (z - pre[k]);
  j.d2 = j.d1 * s;
  return j;
}

Complex ScMap::newton_interior(Complex w, Complex z0, bool* ok) const {
  Complex z = z0;
  Complex f = evaluate(z) - w;
  for (int it = 0; it < 80; ++it) {
    if (std::abs(f) <= 1e-14 * scale_) {
      *ok = true;
      return z;
    }
    const Complex dz = -f / (params_.C * integrand(z));
    double t = 1.0;
    bool accepted = false;
    while (t > 1e-12) {
      const Complex zn = z + t * dz;
      if (std::abs(zn) <= 1.0) {
        const Complex fn = evaluate(zn) - w;
        if (std::abs(fn) < std::abs(f)) {
          z = zn;
          f = fn;
          accepted = true;
          break;
        }
      }
      t *= 0.5;
    }
    if (!accepted) break;
  }
  *ok = std::abs(f) <= 1e-11 * scale_;
  return z;
}

Complex ScMap::invert_on_side(Complex w, int side) const {
  const int n = polygon_.size();
  const auto& v = polygon_.vertices();
  const Complex wa = v[side];
  const Complex wb = v[(side + 1) % n];
  if (std::abs(w - wa) <= 1e-14 * scale_) return params_.prevertices[side];
  if (std::abs(w - wb) <= 1e-14 * scale_) return params_.prevertices[(side + 1) % n];
  const double len = std::abs(wb - wa);
  const Complex dir = (wb - wa) / len;
  const double target = ((w - wa) * std::conj(dir)).real();
  double lo = params_.prevertex_angles[side];
  double hi = side + 1 < n ? params_.prevertex_angles[side + 1] : kTwoPi;
  auto g = [&](double th) {
    return ((evaluate(std::polar(1.0, th)) - wa) * std::conj(dir)).real() - target;
  };
  double th = lo + (hi - lo) * target / len;
  for (int it = 0; it < 200; ++it) {
    const double gv = g(th);
    if (std::abs(gv) <= 1e-15 * scale_ || hi - lo < 1e-16) break;
    if (gv > 0) hi = th; else lo = th;
    const Complex e = std::polar(1.0, th);
    const double dg = ((params_.C * integrand(e) * kI * e) * std::conj(dir)).real();
    double next = dg > 0 ? th - gv / dg : 0.5 * (lo + hi);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    th = next;
  }
  return std::polar(1.0, th);
}

Complex ScMap::invert(Complex w) const {
  const int n = polygon_.size();
  for (int k = 0; k < n; ++k) {
    if (std::abs(w - polygon_.vertices()[k]) <= 1e-14 * scale_) return params_.prevertices[k];
  }
  const int side = polygon_.side_of(w, 1e-13 * scale_);
  if (side >= 0) return invert_on_side(w, side);
  if (!polygon_.contains(w)) {
    fail(ErrorCode::kInvalidParameter, "sc_invert: point outside the polygon");
  }
  if (std::abs(w - params_.A) <= 1e-15 * scale_) return 0.0;
  std::size_t best = 0;
  double dmin = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < grid_w_.size(); ++i) {
    const double d = std::abs(grid_w_[i] - w);
    if (d < dmin) {
      dmin = d;
      best = i;
    }
  }
  bool ok = false;
  Complex z = newton_interior(w, grid_z_[best], &ok);
  if (ok) return z;
  // Continuation along the segment from the anchor.
  z = 0.0;
  constexpr int kSteps = 32;
  for (int s = 1; s <= kSteps; ++s) {
    const Complex ws = params_.A + (w - params_.A) * (static_cast<double>(s) / kSteps);
    if (!polygon_.contains(ws) && s < kSteps) break;
    z = newton_interior(ws, z, &ok);
    if (!ok) break;
  }
  if (ok) return z;
  fail(ErrorCode::kInversionFailure, "sc_invert: Newton iteration failed to converge");
}

Complex sc_evaluate(const ScMap& map, Complex z) { return map.evaluate(z); }
Complex sc_invert(const ScMap& map, Complex w) { return map.invert(w); }

}  // namespace cdbar
