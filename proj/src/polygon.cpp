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

#include "cdbar/conformal.hpp"

namespace cdbar {
namespace {

double cross(Complex a, Complex b) { return a.real() * b.imag() - a.imag() * b.real(); }

bool segments_intersect(Complex p1, Complex p2, Complex q1, Complex q2) {
  const double d1 = cross(q2 - q1, p1 - q1);
  const double d2 = cross(q2 - q1, p2 - q1);
  const double d3 = cross(p2 - p1, q1 - p1);
  const double d4 = cross(p2 - p1, q2 - p1);
  return ((d1 > 0) != (d2 > 0)) && ((d3 > 0) != (d4 > 0)) && d1 != 0 && d2 != 0 &&
         d3 != 0 && d4 != 0;
}

double point_segment_distance(Complex p, Complex a, Complex b) {
  const Complex d = b - a;
  const double len2 = std::norm(d);
  double t = len2 > 0 ? ((p - a) * std::conj(d)).real() / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  return std::abs(p - (a + t * d));
}

}  // namespace

Polygon::Polygon(std::vector<Complex> vertices) : vertices_(std::move(vertices)) {
  const int n = size();
  if (n < 3) fail(ErrorCode::kInvalidGeometry, "polygon needs at least 3 vertices");
  if (n > 12) fail(ErrorCode::kInvalidGeometry, "polygon has more than 12 vertices");
  for (int k = 0; k < n; ++k) {
    if (!std::isfinite(vertices_[k].real()) || !std::isfinite(vertices_[k].imag())) {
      fail(ErrorCode::kInvalidGeometry, "polygon vertex is not finite");
    }
    if (std::abs(vertices_[(k + 1) % n] - vertices_[k]) == 0.0) {
      fail(ErrorCode::kInvalidGeometry, "polygon has repeated vertices");
    }
  }
  double area2 = 0;
  for (int k = 0; k < n; ++k) area2 += cross(vertices_[k], vertices_[(k + 1) % n]);
  if (!(area2 > 0)) {
    fail(ErrorCode::kInvalidGeometry, "polygon vertices must be counterclockwise");
  }
  for (int i = 0; i < n; ++i) {
    for (int j = i + 2; j < n; ++j) {
      if (i == 0 && j == n - 1) continue;
      if (segments_intersect(vertices_[i], vertices_[(i + 1) % n], vertices_[j],
                             vertices_[(j + 1) % n])) {
        fail(ErrorCode::kInvalidGeometry, "polygon is not simple");
      }
    }
  }
  alphas_.resize(n);
  double turning = 0;
  for (int k = 0; k < n; ++k) {
    const Complex in = vertices_[k] - vertices_[(k + n - 1) % n];
    const Complex out = vertices_[(k + 1) % n] - vertices_[k];
    const double ext = std::arg(out / in);
    if (std::abs(std::abs(ext) - kPi) < 1e-12) {
      fail(ErrorCode::kInvalidGeometry, "polygon has a zero-angle spike");
    }
    turning += ext;
    alphas_[k] = 1.0 - ext / kPi;
  }
  if (std::abs(turning - kTwoPi) > 1e-9) {
    fail(ErrorCode::kInvalidGeometry, "polygon turning number is not one");
  }
  cumulative_.resize(n + 1);
  cumulative_[0] = 0;
  for (int k = 0; k < n; ++k) {
    cumulative_[k + 1] = cumulative_[k] + std::abs(vertices_[(k + 1) % n] - vertices_[k]);
  }
  perimeter_ = cumulative_[n];
}

Complex Polygon::point_at(double s) const {
  s = std::fmod(s, perimeter_);
  if (s < 0) s += perimeter_;
  const int n = size();
  int k = static_cast<int>(std::upper_bound(cumulative_.begin(), cumulative_.end(), s) -
                           cumulative_.begin()) - 1;
  k = std::clamp(k, 0, n - 1);
  const Complex a = vertices_[k];
  const Complex b = vertices_[(k + 1) % n];
  const double t = (s - cumulative_[k]) / (cumulative_[k + 1] - cumulative_[k]);
  return a + t * (b - a);
}

Complex Polygon::normal_at(double s) const {
  s = std::fmod(s, perimeter_);
  if (s < 0) s += perimeter_;
  const int n = size();
  int k = static_cast<int>(std::upper_bound(cumulative_.begin(), cumulative_.end(), s) -
                           cumulative_.begin()) - 1;
  k = std::clamp(k, 0, n - 1);
  const Complex d = vertices_[(k + 1) % n] - vertices_[k];
  return -kI * d / std::abs(d);
}

bool Polygon::contains(Complex w) const {
  const int n = size();
  bool inside = false;
  for (int i = 0, j = n - 1; i < n; j = i++) {
    const Complex a = vertices_[i];
    const Complex b = vertices_[j];
    if ((a.imag() > w.imag()) != (b.imag() > w.imag())) {
      const double x = (b.real() - a.real()) * (w.imag() - a.imag()) / (b.imag() - a.imag()) +
                       a.real();
      if (w.real() < x) inside = !inside;
    }
  }
  return inside && distance_to_boundary(w) > 0;
}

double Polygon::distance_to_boundary(Complex w) const {
  const int n = size();
  double best = std::numeric_limits<double>::infinity();
  for (int k = 0; k < n; ++k) {
    best = std::min(best, point_segment_distance(w, vertices_[k], vertices_[(k + 1) % n]));
  }
  return best;
}

int Polygon::side_of(Complex w, double tol) const {
  const int n = size();
  int best = -1;
  double best_d = tol;
  for (int k = 0; k < n; ++k) {
    const double d = point_segment_distance(w, vertices_[k], vertices_[(k + 1) % n]);
    if (d <= best_d) {
      best_d = d;
      best = k;
    }
  }
  return best;
}

double Polygon::diameter() const {
  double d = 0;
  for (const Complex& a : vertices_) {
    for (const Complex& b : vertices_) d = std::max(d, std::abs(a - b));
  }
  return d;
}

}  // namespace cdbar
