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

// Conformal maps between simply connected true domains and the unit disk.
//
// Convention: for every map, `forward` sends the true domain onto the open
// unit disk and `inverse` sends the disk back. Jets carry the value and the
// first two complex derivatives.

#ifndef CDBAR_CONFORMAL_HPP_
#define CDBAR_CONFORMAL_HPP_

#include <memory>
#include <string>
#include <vector>

#include "cdbar/common.hpp"
#include "cdbar/quadrature.hpp"

namespace cdbar {

struct Jet {
  Complex value;
  Complex d1;
  Complex d2;
};

// ---------------------------------------------------------------------------
// Möbius helpers (templated on the real scalar so they work with long double
// in the test oracles).

template <typename T>
std::complex<T> mobius_disk(std::complex<T> a, std::complex<T> z) {
  if (!(std::abs(a) < T(1))) {
    fail(ErrorCode::kInvalidParameter, "mobius_disk: |a| must be < 1");
  }
  return (z - a) / (std::conj(a) * z - T(1));
}

// The disk Möbius map with zero rotation is an involution.
template <typename T>
std::complex<T> mobius_disk_inverse(std::complex<T> a, std::complex<T> w) {
  return mobius_disk(a, w);
}

template <typename T>
std::complex<T> mobius_halfplane(T b, std::complex<T> xi, std::complex<T> z) {
  if (!(xi.imag() > T(0))) {
    fail(ErrorCode::kInvalidParameter, "mobius_halfplane: Im(xi) must be > 0");
  }
  const std::complex<T> u = z - b;
  return (u - xi) / (u - std::conj(xi));
}

template <typename T>
std::complex<T> mobius_halfplane_inverse(T b, std::complex<T> xi,
                                         std::complex<T> w) {
  if (!(xi.imag() > T(0))) {
    fail(ErrorCode::kInvalidParameter, "mobius_halfplane: Im(xi) must be > 0");
  }
  return b + (std::conj(xi) * w - xi) / (w - T(1));
}

// ---------------------------------------------------------------------------
// Polygons.

class Polygon {
 public:
  // Vertices in counterclockwise order; validated (simple, >= 3 vertices,
  // at most 12, positive orientation).
  explicit Polygon(std::vector<Complex> vertices);

  const std::vector<Complex>& vertices() const { return vertices_; }
  int size() const { return static_cast<int>(vertices_.size()); }
  // Interior angle at each vertex divided by pi.
  const std::vector<double>& alphas() const { return alphas_; }
  double perimeter() const { return perimeter_; }
  // Arclength parametrization starting at vertex 0; s is taken mod perimeter.
  Complex point_at(double s) const;
  // Outward unit normal on the side containing arclength s.
  Complex normal_at(double s) const;
  bool contains(Complex w) const;
  double distance_to_boundary(Complex w) const;
  // Index of the side within `tol` of w, or -1.
  int side_of(Complex w, double tol) const;
  double diameter() const;

 private:
  std::vector<Complex> vertices_;
  std::vector<double> alphas_;
  std::vector<double> cumulative_;  // arclength at each vertex
  double perimeter_ = 0;
};

// ---------------------------------------------------------------------------
// Schwarz–Christoffel disk-to-polygon maps,
//   Psi(z) = A + C * int_0^z prod_k (1 - zeta/z_k)^{beta_k} dzeta.

struct SCParameters {
  std::vector<double> prevertex_angles;  // increasing, first pinned at 0
  std::vector<Complex> prevertices;
  std::vector<double> betas;  // alpha_k - 1, summing to -2
  Complex C;
  Complex A;          // the anchor, Psi(0) = A
  double residual = 0;  // final parameter-problem residual
  int iterations = 0;
};

namespace detail {
struct ScIntegrator;
}

// Solves the parameter problem with Psi(0) = anchor and the first prevertex
// at angle 0. Throws parameter-problem-failure with the residual on
// nonconvergence.
SCParameters sc_solve_parameters(const Polygon& polygon, Complex anchor);

class ScMap {
 public:
  ScMap(Polygon polygon, Complex anchor);
  ScMap(Polygon polygon, SCParameters params);

  const Polygon& polygon() const { return polygon_; }
  const SCParameters& parameters() const { return params_; }

  // Psi and its derivatives on the closed unit disk.
  Complex evaluate(Complex z) const;
  Jet jet(Complex z) const;
  // Psi^{-1}(w) for w in the closed polygon.
  Complex invert(Complex w) const;
  // int_{za}^{zb} of the SC integrand; ka / kb are the prevertex indices
  // sitting at the endpoints, or -1.
  Complex integral(Complex za, int ka, Complex zb, int kb) const;
  // Integrand prod_k (1 - z/z_k)^{beta_k}.
  Complex integrand(Complex z) const;

 private:
  void build();
  Complex newton_interior(Complex w, Complex z0, bool* ok) const;
  Complex invert_on_side(Complex w, int side) const;

  Polygon polygon_;
  SCParameters params_;
  std::shared_ptr<const detail::ScIntegrator> integrator_;
  std::vector<Complex> grid_z_;
  std::vector<Complex> grid_w_;
  double scale_ = 1;
};

Complex sc_evaluate(const ScMap& map, Complex z);
Complex sc_invert(const ScMap& map, Complex w);

// ---------------------------------------------------------------------------
// Type-erased conformal map.

enum class MapKind {
  kIdentity,
  kDiskMobius,
  kHalfplaneMobius,
  kSchwarzChristoffel,
  kComposition,
};

enum class DomainKind { kDisk, kPolygon, kHalfplane };

class ConformalMap {
 public:
  class Impl {
   public:
    virtual ~Impl() = default;
    virtual MapKind kind() const = 0;
    virtual DomainKind domain() const = 0;
    virtual Jet forward_jet(Complex z) const = 0;
    virtual Jet inverse_jet(Complex w) const = 0;
    virtual Complex forward(Complex z) const { return forward_jet(z).value; }
    virtual Complex inverse(Complex w) const { return inverse_jet(w).value; }
    virtual std::string descriptor() const = 0;
    virtual const Polygon* polygon() const { return nullptr; }
  };

  ConformalMap();  // identity
  explicit ConformalMap(std::shared_ptr<const Impl> impl);

  static ConformalMap identity();
  static ConformalMap disk_mobius(Complex a);
  static ConformalMap halfplane_mobius(double b, Complex xi);
  static ConformalMap schwarz_christoffel(std::shared_ptr<const ScMap> sc);

  MapKind kind() const { return impl_->kind(); }
  DomainKind domain() const { return impl_->domain(); }
  const Polygon* polygon() const { return impl_->polygon(); }
  std::string descriptor() const { return impl_->descriptor(); }

  Complex forward(Complex z) const { return impl_->forward(z); }
  Complex inverse(Complex w) const { return impl_->inverse(w); }
  Jet forward_jet(Complex z) const { return impl_->forward_jet(z); }
  Jet inverse_jet(Complex w) const { return impl_->inverse_jet(w); }

 private:
  std::shared_ptr<const Impl> impl_;
};

// outer ∘ inner; outer must be a disk automorphism-type map (disk domain).
ConformalMap compose(const ConformalMap& outer, const ConformalMap& inner);

// |Phi'(z)|; throws corner-singularity at polygon corners.
double derivative_modulus(const ConformalMap& map, Complex z);

}  // namespace cdbar

#endif  // CDBAR_CONFORMAL_HPP_
