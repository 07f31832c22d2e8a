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

#include "cdbar/fourier_ops.hpp"

#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>

#include <Eigen/LU>
#include <Eigen/SVD>

namespace cdbar {

void BasisSpec::validate() const {
  if (N < 1) fail(ErrorCode::kInvalidParameter, "basis: N must be >= 1");
  if (!(boundary_length > 0)) fail(ErrorCode::kInvalidParameter, "basis: boundary length must be > 0");
}

int BasisSpec::index_of(int n) const {
  if (n < -N || n > N || (mean_free && n == 0)) {
    fail(ErrorCode::kIndexError, "basis index " + std::to_string(n) + " outside the index set");
  }
  if (!mean_free) return n + N;
  return n < 0 ? n + N : n + N - 1;
}

int BasisSpec::mode_of(int index) const {
  if (index < 0 || index >= dim()) fail(ErrorCode::kIndexError, "basis row out of range");
  if (!mean_free) return index - N;
  return index < N ? index - N : index - N + 1;
}

std::string to_string(OperatorRole role) {
  switch (role) {
    case OperatorRole::kND: return "ND";
    case OperatorRole::kDN: return "DN";
    case OperatorRole::kRelativeND: return "relative-ND";
    case OperatorRole::kSingleLayer: return "single-layer";
    case OperatorRole::kGeneric: return "generic";
  }
  return "generic";
}

OperatorRole role_from_string(const std::string& s) {
  if (s == "ND") return OperatorRole::kND;
  if (s == "DN") return OperatorRole::kDN;
  if (s == "relative-ND") return OperatorRole::kRelativeND;
  if (s == "single-layer") return OperatorRole::kSingleLayer;
  if (s == "generic") return OperatorRole::kGeneric;
  fail(ErrorCode::kIo, "unknown operator role '" + s + "'");
}

Complex basis_eval(const BasisSpec& spec, int n, double s) {
  spec.index_of(n);
  const double len = spec.boundary_length;
  return std::polar(1.0 / std::sqrt(len), kTwoPi * n * s / len);
}

MatrixXcd basis_samples(const BasisSpec& spec, int nodes, double offset) {
  MatrixXcd F(nodes, spec.dim());
  const double len = spec.boundary_length;
  const double amp = 1.0 / std::sqrt(len);
  for (int c = 0; c < spec.dim(); ++c) {
    const int n = spec.mode_of(c);
    for (int j = 0; j < nodes; ++j) {
      // Reduce the phase index modulo nodes to keep arguments small.
      const double t = std::fmod(n * (j + offset), static_cast<double>(nodes));
      F(j, c) = std::polar(amp, kTwoPi * t / nodes);
    }
  }
  return F;
}

Complex transformed_current(const ConformalMap& map, int n, Complex z) {
  if (n == 0) fail(ErrorCode::kIndexError, "transformed_current: n = 0 is not a current");
  const Jet j = map.forward_jet(z);
  return std::abs(j.d1) * std::polar(1.0 / std::sqrt(kTwoPi), n * std::arg(j.value));
}

MatrixXcd pair_with_basis(const MatrixXcd& samples, const BasisSpec& spec, double offset) {
  const int nodes = static_cast<int>(samples.rows());
  const MatrixXcd F = basis_samples(spec, nodes, offset);
  const double h = spec.boundary_length / nodes;
  return h * (F.adjoint() * samples);
}

OperatorMatrix assemble_matrix(const BoundaryTransformer& apply, const BasisSpec& spec,
                               int quad_nodes, OperatorRole role) {
  spec.validate();
  if (quad_nodes <= 2 * spec.N) {
    fail(ErrorCode::kInvalidParameter, "assemble_matrix: too few quadrature nodes for N");
  }
  const MatrixXcd F = basis_samples(spec, quad_nodes);
  MatrixXcd out = apply(F);
  if (out.rows() != quad_nodes || out.cols() != spec.dim()) {
    fail(ErrorCode::kAssemblyFailure, "assemble_matrix: transformer returned wrong shape");
  }
  if (!out.allFinite()) {
    fail(ErrorCode::kAssemblyFailure, "assemble_matrix: transformer returned non-finite samples");
  }
  if (role == OperatorRole::kND || role == OperatorRole::kRelativeND) {
    // Potentials are defined modulo constants.
    for (int c = 0; c < out.cols(); ++c) out.col(c).array() -= out.col(c).mean();
  }
  OperatorMatrix op;
  op.entries = pair_with_basis(out, spec);
  op.basis = spec;
  op.role = role;
  op.metadata["quad_nodes"] = std::to_string(quad_nodes);
  return op;
}

OperatorMatrix nd_to_dn(const OperatorMatrix& nd, double condition_cap) {
  const MatrixXcd& R = nd.entries;
  if (R.rows() != R.cols() || R.rows() == 0) {
    fail(ErrorCode::kInvalidParameter, "nd_to_dn: matrix must be square and nonempty");
  }
  Eigen::JacobiSVD<MatrixXcd> svd(R);
  const auto& sv = svd.singularValues();
  const double cond = sv(sv.size() - 1) > 0 ? sv(0) / sv(sv.size() - 1)
                                             : std::numeric_limits<double>::infinity();
  if (!(cond <= condition_cap)) {
    std::ostringstream msg;
    msg << "nd_to_dn: condition estimate " << cond << " exceeds cap " << condition_cap;
    fail(ErrorCode::kIllConditionedInversion, msg.str());
  }
  OperatorMatrix dn;
  dn.entries = R.fullPivLu().inverse();
  dn.basis = nd.basis;
  dn.role = OperatorRole::kDN;
  dn.metadata = nd.metadata;
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6g", cond);
  dn.metadata["condition"] = buf;
  return dn;
}

OperatorMatrix unit_disk_dn(int N) {
  OperatorMatrix op;
  op.basis.N = N;
  op.role = OperatorRole::kDN;
  op.entries = MatrixXcd::Zero(2 * N, 2 * N);
  for (int i = 0; i < 2 * N; ++i) op.entries(i, i) = std::abs(op.basis.mode_of(i));
  return op;
}

OperatorMatrix unit_disk_nd(int N) {
  OperatorMatrix op;
  op.basis.N = N;
  op.role = OperatorRole::kND;
  op.entries = MatrixXcd::Zero(2 * N, 2 * N);
  for (int i = 0; i < 2 * N; ++i) op.entries(i, i) = 1.0 / std::abs(op.basis.mode_of(i));
  return op;
}

std::vector<Complex> virtual_node_preimages(const ConformalMap& map, int nodes, double* offset) {
  auto preimages = [&](double off, bool* collided) {
    std::vector<Complex> pts(nodes);
    *collided = false;
    for (int j = 0; j < nodes && !*collided; ++j) {
      const Complex w = std::polar(1.0, kTwoPi * (j + off) / nodes);
      if (map.domain() == DomainKind::kHalfplane && std::abs(w - 1.0) < 1e-12) {
        *collided = true;
        break;
      }
      pts[j] = map.inverse(w);
      if (const Polygon* poly = map.polygon()) {
        for (const Complex& v : poly->vertices()) {
          if (std::abs(pts[j] - v) <= 1e-9 * poly->diameter()) *collided = true;
        }
      }
    }
    return pts;
  };
  bool collided = false;
  std::vector<Complex> pts = preimages(0.0, &collided);
  *offset = 0.0;
  if (collided) {
    pts = preimages(0.5, &collided);
    *offset = 0.5;
    if (collided) fail(ErrorCode::kInvalidGeometry, "boundary nodes collide with corners");
  }
  return pts;
}

OperatorMatrix pushforward_nd(const PotentialSampler& measured, const ConformalMap& map,
                              const BasisSpec& spec, int quad_nodes) {
  spec.validate();
  double offset = 0;
  const std::vector<Complex> pts = virtual_node_preimages(map, quad_nodes, &offset);
  MatrixXcd samples(quad_nodes, spec.dim());
  for (int c = 0; c < spec.dim(); ++c) {
    VectorXcd u = measured(spec.mode_of(c), pts);
    if (u.size() != quad_nodes || !u.allFinite()) {
      fail(ErrorCode::kAssemblyFailure, "pushforward_nd: invalid measured samples");
    }
    u.array() -= u.mean();
    samples.col(c) = u;
  }
  BasisSpec disk = spec;
  disk.boundary_length = kTwoPi;
  OperatorMatrix op;
  op.entries = pair_with_basis(samples, disk, offset);
  op.basis = disk;
  op.role = OperatorRole::kND;
  op.metadata["map"] = map.descriptor();
  op.metadata["quad_nodes"] = std::to_string(quad_nodes);
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", offset);
  op.metadata["node_offset"] = buf;
  return op;
}

void write_operator(std::ostream& out, const OperatorMatrix& op) {
  out << "# N: " << op.basis.N << "\n";
  char buf[128];
  std::snprintf(buf, sizeof buf, "%.17g", op.basis.boundary_length);
  out << "# boundary_length: " << buf << "\n";
  out << "# role: " << to_string(op.role) << "\n";
  for (const auto& [k, v] : op.metadata) {
    if (k == "N" || k == "role" || k == "boundary_length") continue;
    out << "# " << k << ": " << v << "\n";
  }
  const int d = op.basis.dim();
  for (int r = 0; r < d; ++r) {
    for (int c = 0; c < d; ++c) {
      std::snprintf(buf, sizeof buf, "%d %d %.17g %.17g\n", op.basis.mode_of(r),
                    op.basis.mode_of(c), op.entries(r, c).real(), op.entries(r, c).imag());
      out << buf;
    }
  }
}

OperatorMatrix read_operator(std::istream& in) {
  OperatorMatrix op;
  std::string line;
  bool have_n = false;
  std::vector<std::string> body;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      const auto colon = line.find(':');
      if (colon == std::string::npos) continue;
      std::string key = line.substr(1, colon - 1);
      std::string value = line.substr(colon + 1);
      auto trim = [](std::string& s) {
        s.erase(0, s.find_first_not_of(" \t"));
        s.erase(s.find_last_not_of(" \t\r") + 1);
      };
      trim(key);
      trim(value);
      if (key == "N") {
        op.basis.N = std::stoi(value);
        have_n = true;
      } else if (key == "role") {
        op.role = role_from_string(value);
      } else if (key == "boundary_length") {
        op.basis.boundary_length = std::stod(value);
      } else {
        op.metadata[key] = value;
      }
      continue;
    }
    body.push_back(line);
  }
  if (!have_n) fail(ErrorCode::kIo, "operator file lacks the N header");
  op.basis.validate();
  const int d = op.basis.dim();
  op.entries = MatrixXcd::Zero(d, d);
  if (static_cast<int>(body.size()) != d * d) {
    fail(ErrorCode::kIo, "operator file has " + std::to_string(body.size()) + " rows, expected " +
                             std::to_string(d * d));
  }
  for (const std::string& row : body) {
    int m = 0, n = 0;
    double re = 0, im = 0;
    if (std::sscanf(row.c_str(), "%d %d %lf %lf", &m, &n, &re, &im) != 4) {
      fail(ErrorCode::kIo, "malformed operator row: " + row);
    }
    op.entries(op.basis.index_of(m), op.basis.index_of(n)) = Complex(re, im);
  }
  return op;
}

}  // namespace cdbar
