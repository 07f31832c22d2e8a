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

#include <cmath>

#include <gtest/gtest.h>

namespace cdbar {
namespace {

PipelineOptions manual(double R, double c = 10.0, int lattice = 64) {
  PipelineOptions o;
  o.trunc = {R, c, false};
  o.lattice = lattice;
  return o;
}

TEST(Phantoms, ShippedPhantomsAreValid) {
  for (const Phantom& p : {disk_phantom(), rectangle_phantom(), roi_disk_phantom(), halfplane_phantom()}) {
    EXPECT_NO_THROW(p.validate());
  }
  const Phantom d = disk_phantom();
  EXPECT_EQ(d.inclusions.size(), 3u);
  // Every disk inclusion also lies in the rectangle.
  const Phantom r = rectangle_phantom();
  for (const Inclusion& inc : d.inclusions) {
    EXPECT_GT(r.polygon->distance_to_boundary(inc.center), inc.radius + 0.02);
  }
  EXPECT_TRUE(homogeneous_like(r).inclusions.empty());
  EXPECT_EQ(homogeneous_like(r).domain, DomainKind::kPolygon);
}

TEST(Grids, DomainMaskAndRaster) {
  const ReconstructionGrid g = domain_grid(disk_phantom(), 8);
  EXPECT_EQ(g.size(), 64);
  EXPECT_NEAR(g.nodes[0].real(), -0.875, 1e-15);
  EXPECT_FALSE(g.inside[0]);
  EXPECT_TRUE(g.inside[3 * 8 + 3]);
  const ReconstructionGrid r = rasterize(disk_phantom(), g);
  for (int i = 0; i < r.size(); ++i) {
    EXPECT_EQ(r.sigma[i], g.inside[i] ? disk_phantom().sigma(g.nodes[i]) : 0.0);
  }
  const ReconstructionGrid rect = domain_grid(rectangle_phantom(), 10);
  EXPECT_DOUBLE_EQ(rect.x_min, -0.85);
  EXPECT_DOUBLE_EQ(rect.y_max, 0.5);
  EXPECT_THROW(domain_grid(halfplane_phantom(), 10), Error);
  const ReconstructionGrid h = halfplane_grid(-1, 1, 2, 4, 4);
  EXPECT_EQ(h.nodes[5], Complex(-0.25, 0.75));
}

TEST(ReconstructVirtual, HomogeneousDataGiveOne) {
  BasisSpec b;
  const OperatorMatrix nd = unit_disk_nd(b.N);
  const ReconstructionGrid g =
      reconstruct_virtual(nd, ConformalMap::identity(), domain_grid(disk_phantom(), 16), manual(5));
  for (int i = 0; i < g.size(); ++i) {
    if (g.inside[i]) EXPECT_NEAR(g.sigma[i], 1.0, 1e-3);
  }
  EXPECT_EQ(g.metadata.at("R"), "5");
  EXPECT_EQ(g.metadata.at("N"), "16");
}

TEST(ReconstructVirtual, DiskPhantomError) {
  BasisSpec b;
  const OperatorMatrix nd = nd_matrix(disk_phantom(), b);
  const ReconstructionGrid g = reconstruct_virtual(nd, ConformalMap::identity(),
                                                   domain_grid(disk_phantom(), 24), manual(7, 10, 128));
  EXPECT_LE(relative_l2_error(g, disk_phantom()), 0.35);
}

TEST(RoiMap, DiskAnchors) {
  const Phantom d = disk_phantom();
  const ConformalMap id = roi_map(d, {0.0, Region::circle(0.0, 0.5)});
  for (Complex z : {Complex(0.3, 0.1), Complex(-0.5, 0.7)}) EXPECT_NEAR(std::abs(id.forward(z) - z), 0, 1e-15);
  const ConformalMap m = roi_map(d, {0.6, Region::circle(0.6, 0.2)});
  EXPECT_NEAR(std::abs(m.forward(0.6)), 0, 1e-15);
  std::vector<std::string> warnings;
  roi_map(d, {0.99, Region::circle(0.9, 0.05)}, &warnings);
  EXPECT_EQ(warnings.size(), 1u);
  EXPECT_THROW(roi_map(d, {1.2, Region::circle(0.0, 0.5)}), Error);
}

TEST(RoiMap, PolygonAnchorGoesToOrigin) {
  const Complex anchor(0.4, -0.2);
  const ConformalMap m = roi_map(rectangle_phantom(), {anchor, Region::circle(anchor, 0.1)});
  EXPECT_NEAR(std::abs(m.forward(anchor)), 0, 1e-9);
  EXPECT_NEAR(std::abs(m.inverse(0.0) - anchor), 0, 1e-9);
}

TEST(RoiError, DirectValues) {
  const Phantom d = disk_phantom();
  ReconstructionGrid g = rasterize(d, domain_grid(d, 20));
  const Region all = Region::circle(0.0, 1.0);
  EXPECT_EQ(roi_error(g, d, all), 0.0);
  const Phantom h = homogeneous_like(d);
  ReconstructionGrid ones = rasterize(h, domain_grid(d, 20));
  EXPECT_EQ(roi_error(ones, h, all), 0.0);
  for (int i = 0; i < ones.size(); ++i) ones.sigma[i] *= 2;
  EXPECT_DOUBLE_EQ(roi_error(ones, h, all), 1.0);
  EXPECT_DOUBLE_EQ(relative_l2_error(ones, h), 1.0);
  EXPECT_DOUBLE_EQ(roi_error(ones, h, default_disk_roi().region), 1.0);
  EXPECT_THROW(roi_error(ones, h, Region::circle(5.0, 0.1)), Error);
}

TEST(RoiError, DefaultRoiCoversSmallInclusions) {
  const RoiSpec roi = default_disk_roi();
  int inside = 0;
  for (const Inclusion& inc : roi_disk_phantom().inclusions) inside += roi.region.contains(inc.center);
  EXPECT_EQ(inside, 3);
  EXPECT_TRUE(roi.region.contains(roi.anchor));
}

TEST(QuotientNorm, EnclosingCircle) {
  VectorXcd v(4);
  v << Complex(1, 0), Complex(-1, 0), Complex(0, 1), Complex(0, -1);
  EXPECT_NEAR(quotient_max_norm(v), 1.0, 1e-14);
  v << Complex(5, 5), Complex(5, 5), Complex(5, 5), Complex(5, 5);
  EXPECT_NEAR(quotient_max_norm(v), 0.0, 1e-14);
  VectorXcd w(3);
  w << 0.0, 4.0, Complex(2, 0.5);
  EXPECT_NEAR(quotient_max_norm(w), 2.0, 1e-14);
  // Equilateral triangle of side 1: circumradius 1/sqrt(3).
  w << 0.0, 1.0, Complex(0.5, std::sqrt(3.0) / 2);
  EXPECT_NEAR(quotient_max_norm(w), 1 / std::sqrt(3.0), 1e-14);
  // Adding a constant leaves the norm unchanged.
  VectorXcd r = VectorXcd::Random(40);
  EXPECT_NEAR(quotient_max_norm(r), quotient_max_norm((r.array() + Complex(3, -2)).matrix()), 1e-12);
  // Never larger than the max deviation from any single centre.
  EXPECT_LE(quotient_max_norm(r), (r.array() - r.mean()).abs().maxCoeff() + 1e-15);
}

TEST(PemStudy, CurrentsAndSlope) {
  const VirtualCurrent f = VirtualCurrent::sobolev(2, 64);
  for (int M : {8, 16, 32}) {
    Complex s = 0;
    for (int m = 0; m < M; ++m) s += f(kTwoPi * m / M);
    EXPECT_NEAR(std::abs(s), 0, 1e-12);
  }
  EXPECT_NEAR(std::abs(VirtualCurrent::fourier_mode(2)(0.3) - 2.0 * kI * std::sin(0.6) / std::sqrt(kTwoPi)), 0,
              1e-15);
  const std::vector<PemStudyRow> rows = {{8, 1.0}, {16, 0.25}, {32, 0.0625}};
  EXPECT_NEAR(loglog_slope(rows), -2.0, 1e-12);
}

TEST(PemStudy, HomogeneousIsZero) {
  const auto rows = pem_convergence_study(homogeneous_like(disk_phantom()), ConformalMap::identity(),
                                          VirtualCurrent::sobolev(2), {8, 16}, 32);
  for (const auto& r : rows) EXPECT_LE(r.error, 1e-14);
}

TEST(PemStudy, ConvergenceRates) {
  const ConformalMap map = ConformalMap::disk_mobius({0.2, 0.3});
  const std::vector<int> Ms = {8, 16, 32, 64, 128};
  const auto mode = pem_convergence_study(disk_phantom(), map, VirtualCurrent::fourier_mode(2), Ms);
  EXPECT_LE(loglog_slope(mode), -4.0);
  const auto sob = pem_convergence_study(disk_phantom(), map, VirtualCurrent::sobolev(2), Ms);
  EXPECT_LE(loglog_slope(sob), -1.3);
}

TEST(HalfplaneSweep, HomogeneousGivesOne) {
  SweepOptions o;
  o.pipeline = manual(4);
  o.grid = halfplane_grid(-4, 4, 2, 16, 4);
  const auto grids = halfplane_sweep(homogeneous_like(halfplane_phantom()), {-3, 0, 3}, o);
  ASSERT_EQ(grids.size(), 3u);
  for (const auto& g : grids) {
    for (int i = 0; i < g.size(); ++i) EXPECT_NEAR(g.sigma[i], 1.0, 1e-2);
  }
}

TEST(HalfplaneSweep, VirtualDataMirror) {
  // Mirroring the phantom about the imaginary axis and negating b conjugates the data.
  Phantom p = halfplane_phantom();
  Phantom q = p;
  for (Inclusion& inc : q.inclusions) inc.center = -std::conj(inc.center);
  const SweepOptions o;
  for (double b : {-1.5, 3.0}) {
    const OperatorMatrix a = halfplane_virtual_relative_nd(p, b, o);
    const OperatorMatrix m = halfplane_virtual_relative_nd(q, -b, o);
    EXPECT_LE((a.entries.conjugate() - m.entries).norm(), 1e-8 * a.entries.norm()) << b;
  }
}

TEST(HalfplaneSweep, RejectsOtherDomains) {
  EXPECT_THROW(halfplane_virtual_relative_nd(disk_phantom(), 0, {}), Error);
}

}  // namespace
}  // namespace cdbar
