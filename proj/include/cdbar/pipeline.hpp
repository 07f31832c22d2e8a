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


// End-to-end reconstruction workflows: virtual-disk D-bar through a
// conformal map, ROI magnification, point-electrode studies and the
// half-plane sweep.

#ifndef CDBAR_PIPELINE_HPP_
#define CDBAR_PIPELINE_HPP_

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "cdbar/common.hpp"
#include "cdbar/conformal.hpp"
#include "cdbar/dbar_core.hpp"
#include "cdbar/forward_sim.hpp"
#include "cdbar/fourier_ops.hpp"

namespace cdbar {

// ---------------------------------------------------------------------------
// Shipped phantoms.

// Rectangle with corners +-0.85 +- 0.5i.
Polygon rectangle_polygon();
// Three inclusions in the unit disk: conductivity 3 in the middle, 0.2 and 2
// closer to the boundary. All of them fit inside the rectangle.
Phantom disk_phantom();
Phantom rectangle_phantom();
// Unit disk with a few larger inclusions and three small ones in the first
// quadrant (the ROI).
Phantom roi_disk_phantom();
// Upper half-plane: shallow 0.2 inclusion at Re z = -3, shallow 2 at +3 and
// a deeper 3 near the middle.
Phantom halfplane_phantom();
// Same domain, no inclusions.
Phantom homogeneous_like(const Phantom& p);

// Circle or polygon in the true domain.
struct Region {
  enum class Kind { kCircle, kPolygon };
  Kind kind = Kind::kCircle;
  Complex center;
  double radius = 0;
  std::optional<Polygon> polygon;

  static Region circle(Complex center, double radius);
  static Region from_polygon(Polygon p);
  bool contains(Complex z) const;
};

struct RoiSpec {
  Complex anchor;
  Region region;
};

// First-quadrant ROI of roi_disk_phantom with the default anchor 0.6 e^{i pi/8}.
RoiSpec default_disk_roi();

// ---------------------------------------------------------------------------
// Reconstruction grids.

struct ReconstructionGrid {
  int nx = 0, ny = 0;
  double x_min = 0, x_max = 0, y_min = 0, y_max = 0;
  std::vector<Complex> nodes;        // cell centres, flat index j * nx + i
  std::vector<double> sigma;         // 0 on masked nodes
  std::vector<std::uint8_t> inside;  // domain mask
  std::vector<std::uint8_t> flagged; // nonconverged D-bar solve
  std::map<std::string, std::string> metadata;

  int size() const { return nx * ny; }
};

// Cell-centred n x n grid over the bounding box of a disk or polygon domain;
// nodes closer than `clearance` to the boundary are masked out.
ReconstructionGrid domain_grid(const Phantom& domain, int n, double clearance = 1e-3);
// Cell-centred grid over a half-plane window [x_min, x_max] x [0, height].
ReconstructionGrid halfplane_grid(double x_min, double x_max, double height, int nx, int ny);

// Rasterized phantom conductivity on the grid nodes.
ReconstructionGrid rasterize(const Phantom& phantom, ReconstructionGrid grid);

struct PipelineOptions {
  int N = 16;
  KGrid kgrid;                         // 128 x 128 over [-12, 12]^2
  TruncationParams trunc{0, 10, true};
  int lattice = 128;
  double lattice_factor = 2.3;
  DbarOptions dbar;
};

// D-bar reconstruction from a virtual ND matrix. Grid nodes z are sent to the
// disk by map.forward and sigma(z) is the disk reconstruction at Phi(z).
// The k-grid scattering values (truncated) are written to `kgrid_out` when
// given; they are computed only then or in automatic truncation mode.
ReconstructionGrid reconstruct_virtual(const OperatorMatrix& virtual_nd, const ConformalMap& map,
                                       ReconstructionGrid grid, const PipelineOptions& options,
                                       ScatteringGrid* kgrid_out = nullptr);

// Disk domains: Möbius map with a = anchor (identity for anchor 0).
// Polygons: compose(disk Möbius(a'), SC map fixing the origin), with a' the
// SC image of the anchor. A warning is appended when the anchor is within
// 0.02 of the boundary.
ConformalMap roi_map(const Phantom& domain, const RoiSpec& roi,
                     std::vector<std::string>* warnings = nullptr);

// Relative L2 error over the region (midpoint rule on unmasked grid nodes).
double roi_error(const ReconstructionGrid& grid, const Phantom& truth, const Region& region);
// Same over the whole domain mask.
double relative_l2_error(const ReconstructionGrid& grid, const Phantom& truth);

// ---------------------------------------------------------------------------
// Point-electrode approximation.

// Virtual current density sum_n c_n phi_n(theta).
struct VirtualCurrent {
  std::vector<std::pair<int, Complex>> modes;
  Complex operator()(double theta) const;
  // Odd (sine-type) series with |c_n| = n^-(r + 0.55) for 1 <= n <= n_max;
  // its samples on every equiangular grid sum to zero.
  static VirtualCurrent sobolev(double r, int n_max = 4096);
  // phi_n - phi_{-n}.
  static VirtualCurrent fourier_mode(int n);
};

// min_c max_m |v_m - c| (the C^M / C max norm).
double quotient_max_norm(const VectorXcd& v);

struct PemStudyRow {
  int M = 0;
  double error = 0;
};

// Error of the point-electrode approximation of the relative virtual
// potential of f against the continuum value at the virtual nodes.
// `reference_N` bounds the Fourier modes used for the continuum reference.
std::vector<PemStudyRow> pem_convergence_study(const Phantom& phantom, const ConformalMap& map,
                                               const VirtualCurrent& f,
                                               const std::vector<int>& M_list,
                                               int reference_N = 100);

// Least-squares slope of log(error) against log(M).
double loglog_slope(const std::vector<PemStudyRow>& rows);

// ---------------------------------------------------------------------------
// Half-plane sweep.

struct SweepOptions {
  Complex xi{0, 1.2};
  int N = 5;
  double window = 2.5;
  int electrodes = 64;
  PipelineOptions pipeline;  // N is overridden by the sweep N
  // Spatial grid in the half-plane; defaults to [-6, 6] x [0, 3], 96 x 24.
  std::optional<ReconstructionGrid> grid;
};

// Relative virtual ND matrix from masked point-electrode data for M_b.
OperatorMatrix halfplane_virtual_relative_nd(const Phantom& phantom, double b,
                                             const SweepOptions& options);

std::vector<ReconstructionGrid> halfplane_sweep(const Phantom& phantom,
                                                const std::vector<double>& b_list,
                                                const SweepOptions& options = {});

// Value of the grid at the node nearest to z (inside nodes only).
double grid_value_near(const ReconstructionGrid& grid, Complex z);

}  // namespace cdbar

#endif  // CDBAR_PIPELINE_HPP_
