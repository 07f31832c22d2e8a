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

#include <cmath>
#include <cstdio>
#include <string>

#include "cdbar/conformal.hpp"

namespace cdbar {
namespace {

std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

class IdentityImpl final : public ConformalMap::Impl {
 public:
  MapKind kind() const override { return MapKind::kIdentity; }
  DomainKind domain() const override { return DomainKind::kDisk; }
  Jet forward_jet(Complex z) const override { return {z, 1.0, 0.0}; }
  Jet inverse_jet(Complex w) const override { return {w, 1.0, 0.0}; }
  std::string descriptor() const override { return "identity"; }
};

class DiskMobiusImpl final : public ConformalMap::Impl {
 public:
  explicit DiskMobiusImpl(Complex a) : a_(a) {
    if (!(std::abs(a) < 1.0)) fail(ErrorCode::kInvalidParameter, "disk Möbius: |a| must be < 1");
  }
  MapKind kind() const override { return MapKind::kDiskMobius; }
  DomainKind domain() const override { return DomainKind::kDisk; }
  Jet forward_jet(Complex z) const override {
    const Complex den = std::conj(a_) * z - 1.0;
    const double s = std::norm(a_) - 1.0;
    return {(z - a_) / den, s / (den * den), -2.0 * std::conj(a_) * s / (den * den * den)};
  }
  Jet inverse_jet(Complex w) const override { return forward_jet(w); }
  Complex forward(Complex z) const override { return mobius_disk(a_, z); }
  Complex inverse(Complex w) const override { return mobius_disk_inverse(a_, w); }
  std::string descriptor() const override {
    return "disk-mobius:" + fmt(a_.real()) + "," + fmt(a_.imag());
  }

 private:
  Complex a_;
};

class HalfplaneMobiusImpl final : public ConformalMap::Impl {
 public:
  HalfplaneMobiusImpl(double b, Complex xi) : b_(b), xi_(xi) {
    if (!(xi.imag() > 0)) fail(ErrorCode::kInvalidParameter, "half-plane Möbius: Im(xi) must be > 0");
  }
  MapKind kind() const override { return MapKind::kHalfplaneMobius; }
  DomainKind domain() const override { return DomainKind::kHalfplane; }
  Jet forward_jet(Complex z) const override {
    const Complex den = z - b_ - std::conj(xi_);
    const Complex s = xi_ - std::conj(xi_);
    return {(z - b_ - xi_) / den, s / (den * den), -2.0 * s / (den * den * den)};
  }
  Jet inverse_jet(Complex w) const override {
    const Complex den = w - 1.0;
    if (std::abs(den) == 0.0) {
      fail(ErrorCode::kSingularArgument, "half-plane Möbius inverse at w = 1 (infinity)");
    }
    const Complex s = xi_ - std::conj(xi_);
    return {b_ + (std::conj(xi_) * w - xi_) / den, s / (den * den), -2.0 * s / (den * den * den)};
  }
  std::string descriptor() const override {
    return "halfplane-mobius:" + fmt(b_) + "," + fmt(xi_.real()) + "," + fmt(xi_.imag());
  }

 private:
  double b_;
  Complex xi_;
};

// Phi is the inverse of the SC map Psi: disk -> polygon.
class ScImpl final : public ConformalMap::Impl {
 public:
  explicit ScImpl(std::shared_ptr<const ScMap> sc) : sc_(std::move(sc)) {}
  MapKind kind() const override { return MapKind::kSchwarzChristoffel; }
  DomainKind domain() const override { return DomainKind::kPolygon; }
  const Polygon* polygon() const override { return &sc_->polygon(); }
  Complex forward(Complex z) const override { return sc_->invert(z); }
  Complex inverse(Complex w) const override { return sc_->evaluate(w); }
  Jet forward_jet(Complex z) const override {
    const double tol = 1e-10 * sc_->polygon().diameter();
    for (const Complex& v : sc_->polygon().vertices()) {
      if (std::abs(z - v) <= tol) {
        fail(ErrorCode::kCornerSingularity, "derivative requested at a polygon corner");
      }
    }
    const Complex w = sc_->invert(z);
    const Jet p = sc_->jet(w);
    const Complex d1 = 1.0 / p.d1;
    return {w, d1, -p.d2 * d1 * d1 * d1};
  }
  Jet inverse_jet(Complex w) const override { return sc_->jet(w); }
  std::string descriptor() const override {
    std::string s = "sc:anchor=" + fmt(sc_->parameters().A.real()) + "," +
                    fmt(sc_->parameters().A.imag()) + ":vertices=";
    bool first = true;
    for (const Complex& v : sc_->polygon().vertices()) {
      if (!first) s += ";";
      first = false;
      s += fmt(v.real()) + "," + fmt(v.imag());
    }
    return s;
  }

 private:
  std::shared_ptr<const ScMap> sc_;
};

class CompositionImpl final : public ConformalMap::Impl {
 public:
  CompositionImpl(ConformalMap outer, ConformalMap inner)
      : outer_(std::move(outer)), inner_(std::move(inner)) {}
  MapKind kind() const override { return MapKind::kComposition; }
  DomainKind domain() const override { return inner_.domain(); }
  const Polygon* polygon() const override { return inner_.polygon(); }
  Complex forward(Complex z) const override { return outer_.forward(inner_.forward(z)); }
  Complex inverse(Complex w) const override { return inner_.inverse(outer_.inverse(w)); }
  Jet forward_jet(Complex z) const override {
    const Jet u = inner_.forward_jet(z);
    const Jet v = outer_.forward_jet(u.value);
    return {v.value, v.d1 * u.d1, v.d2 * u.d1 * u.d1 + v.d1 * u.d2};
  }
  Jet inverse_jet(Complex w) const override {
    const Jet p = outer_.inverse_jet(w);
    const Jet q = inner_.inverse_jet(p.value);
    return {q.value, q.d1 * p.d1, q.d2 * p.d1 * p.d1 + q.d1 * p.d2};
  }
  std::string descriptor() const override {
    return "compose(" + outer_.descriptor() + ")(" + inner_.descriptor() + ")";
  }

 private:
  ConformalMap outer_;
  ConformalMap inner_;
};

}  // namespace

ConformalMap::ConformalMap() : impl_(std::make_shared<IdentityImpl>()) {}

ConformalMap::ConformalMap(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {
  if (!impl_) fail(ErrorCode::kInvalidParameter, "ConformalMap: null implementation");
}

ConformalMap ConformalMap::identity() { return ConformalMap(); }

ConformalMap ConformalMap::disk_mobius(Complex a) {
  return ConformalMap(std::make_shared<DiskMobiusImpl>(a));
}

ConformalMap ConformalMap::halfplane_mobius(double b, Complex xi) {
  return ConformalMap(std::make_shared<HalfplaneMobiusImpl>(b, xi));
}

ConformalMap ConformalMap::schwarz_christoffel(std::shared_ptr<const ScMap> sc) {
  if (!sc) fail(ErrorCode::kInvalidParameter, "schwarz_christoffel: null map");
  return ConformalMap(std::make_shared<ScImpl>(std::move(sc)));
}

ConformalMap compose(const ConformalMap& outer, const ConformalMap& inner) {
  if (outer.domain() != DomainKind::kDisk) {
    fail(ErrorCode::kInvalidComposition,
         "compose: the outer map must act on the unit disk (range of the inner map)");
  }
  return ConformalMap(std::make_shared<CompositionImpl>(outer, inner));
}

double derivative_modulus(const ConformalMap& map, Complex z) {
  return std::abs(map.forward_jet(z).d1);
}

}  // namespace cdbar
