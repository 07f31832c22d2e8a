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


// Job configuration documents, grid files and portable pixmaps.

#ifndef CDBAR_IO_HPP_
#define CDBAR_IO_HPP_

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "cdbar/conformal.hpp"
#include "cdbar/forward_sim.hpp"
#include "cdbar/pipeline.hpp"

namespace cdbar {

struct MapSpec {
  // identity | mobius | sc | halfplane | roi
  std::string kind = "identity";
  Complex a;                // mobius parameter
  double b = 0;             // half-plane shift
  Complex xi{0, 1.2};       // half-plane pole
  std::optional<Complex> anchor;  // roi anchor
};

struct SolverSpec {
  int N = 16;
  double kmax = 12;
  int kgrid = 128;
  double R = 0;
  double c = 10;
  bool auto_trunc = true;
  int lattice = 128;
  double lattice_factor = 2.3;
  int bnodes = 256;
  int grid = 64;
  double noise = 0;
  std::uint64_t seed = 1;
  int jobs = 0;
  bool deterministic = false;
  double r = 2;      // Sobolev order of the pem-study current
  int mode = 0;      // pem-study Fourier mode (0: use r)
  std::vector<int> M_list{8, 16, 32, 64, 128};
  std::vector<double> b_list{-3, -1.5, 0, 1.5, 3};
  int electrodes = 64;
  double window = 2.5;
  double roi_radius = 0.35;  // roi error region around the anchor
};

struct OutputSpec {
  std::string out;
  std::string ppm;
  std::string data;  // input ND file for reconstruct
};

struct JobConfig {
  std::string command;
  Phantom phantom;
  MapSpec map;
  SolverSpec solver;
  OutputSpec output;
};

// Named shipped phantoms: disk, rectangle, roi, halfplane, and their
// homogeneous versions with the "homogeneous-" prefix.
Phantom preset_phantom(const std::string& name);

// Parses a JSON document with sections command/phantom/map/solver/output on
// top of `base`. Unknown keys and every violated invariant are reported
// together in one invalid-config error.
// Syntax, key and type errors always throw; range and consistency checks run
// only when `check` is set. Every problem is listed in one invalid-config error.
JobConfig parse_config(const std::string& text, JobConfig base = {}, bool check = true);
// Throws invalid-config listing all violations.
void validate_config(const JobConfig& config);
std::vector<std::string> config_violations(const JobConfig& config);
// Fully resolved document (single line when compact).
std::string config_to_json(const JobConfig& config, bool compact = false);

ConformalMap build_map(const JobConfig& config);
PipelineOptions pipeline_options(const SolverSpec& solver);

// Grid CSV: "# key: value" comment lines, then "x,y,sigma,flag" rows with 17
// significant digits. flag is 0 for reconstructed nodes, 1 for nonconverged
// and 2 for nodes outside the domain.
void write_grid_csv(std::ostream& out, const ReconstructionGrid& grid);
ReconstructionGrid read_grid_csv(std::istream& in);

// Row-major raster (row 0 at the top) rendered as binary P6 with a linear
// blue-white-red scale over [lo, hi]; masked pixels are gray.
std::string render_ppm(const std::vector<double>& values, const std::vector<std::uint8_t>& masked,
                       int width, int height, double lo, double hi,
                       const std::string& comment = "");
// Grid image with the largest y in the top row.
std::string render_grid_ppm(const ReconstructionGrid& grid, double lo, double hi,
                            const std::string& comment = "");

// Adds eps * |entry| * (g1 + i g2) / sqrt(2) with standard normal g1, g2.
void add_relative_noise(OperatorMatrix& op, double eps, std::uint64_t seed);

}  // namespace cdbar

#endif  // CDBAR_IO_HPP_
