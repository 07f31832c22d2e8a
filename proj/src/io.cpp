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


#include "cdbar/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <memory>
#include <ostream>
#include <random>
#include <set>
#include <sstream>

#include "json.hpp"

namespace cdbar {
namespace {

using Json = nlohmann::json;

// Collects problems instead of stopping at the first one.
struct Reader {
  std::vector<std::string> errors;

  void keys(const Json& obj, const std::string& where, const std::set<std::string>& allowed) {
    if (!obj.is_object()) {
      errors.push_back(where + ": expected an object");
      return;
    }
    for (const auto& [k, v] : obj.items()) {
      if (!allowed.count(k)) errors.push_back(where + ": unknown key '" + k + "'");
    }
  }

  template <typename T>
  void get(const Json& obj, const char* key, const std::string& where, T& out) {
    if (!obj.is_object() || !obj.contains(key)) return;
    const Json& v = obj.at(key);
    bool ok = true;
    if constexpr (std::is_same_v<T, bool>) {
      ok = v.is_boolean();
    } else if constexpr (std::is_integral_v<T>) {
      ok = v.is_number_integer() || v.is_number_unsigned();
    } else if constexpr (std::is_floating_point_v<T>) {
      ok = v.is_number();
    } else if constexpr (std::is_same_v<T, std::string>) {
      ok = v.is_string();
    }
    if (!ok) {
      errors.push_back(where + "." + key + ": wrong type");
      return;
    }
    out = v.get<T>();
  }

  bool complex_value(const Json& v, const std::string& where, Complex& out) {
    if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number()) {
      errors.push_back(where + ": expected [x, y]");
      return false;
    }
    out = {v[0].get<double>(), v[1].get<double>()};
    return true;
  }

  void get_complex(const Json& obj, const char* key, const std::string& where, Complex& out) {
    if (obj.is_object() && obj.contains(key)) complex_value(obj.at(key), where + "." + key, out);
  }
};

Json complex_json(Complex z) { return Json::array({z.real(), z.imag()}); }

std::string domain_name(DomainKind d) {
  switch (d) {
    case DomainKind::kDisk: return "disk";
    case DomainKind::kPolygon: return "polygon";
    case DomainKind::kHalfplane: return "halfplane";
  }
  return "disk";
}

void read_phantom(const Json& doc, Reader& r, Phantom& p) {
  r.keys(doc, "phantom", {"preset", "domain", "vertices", "inclusions"});
  if (!doc.is_object()) return;
  if (doc.contains("preset")) {
    std::string name;
    r.get(doc, "preset", "phantom", name);
    try {
      p = preset_phantom(name);
    } catch (const Error& e) {
      r.errors.push_back(std::string("phantom.preset: ") + e.what());
    }
  }
  if (doc.contains("domain")) {
    std::string d;
    r.get(doc, "domain", "phantom", d);
    if (d == "disk") {
      p.domain = DomainKind::kDisk;
      p.polygon.reset();
    } else if (d == "polygon") {
      p.domain = DomainKind::kPolygon;
    } else if (d == "halfplane") {
      p.domain = DomainKind::kHalfplane;
      p.polygon.reset();
    } else {
      r.errors.push_back("phantom.domain: unknown domain '" + d + "'");
    }
  }
  if (doc.contains("vertices")) {
    std::vector<Complex> v;
    const Json& arr = doc.at("vertices");
    if (!arr.is_array()) {
      r.errors.push_back("phantom.vertices: expected an array");
    } else {
      bool ok = true;
      for (std::size_t i = 0; i < arr.size(); ++i) {
        Complex z;
        ok = r.complex_value(arr[i], "phantom.vertices[" + std::to_string(i) + "]", z) && ok;
        v.push_back(z);
      }
      if (ok) {
        try {
          p.polygon = Polygon(v);
        } catch (const Error& e) {
          r.errors.push_back(std::string("phantom.vertices: ") + e.what());
        }
      }
    }
  }
  if (doc.contains("inclusions")) {
    const Json& arr = doc.at("inclusions");
    p.inclusions.clear();
    if (!arr.is_array()) {
      r.errors.push_back("phantom.inclusions: expected an array");
      return;
    }
    for (std::size_t i = 0; i < arr.size(); ++i) {
      const std::string where = "phantom.inclusions[" + std::to_string(i) + "]";
      r.keys(arr[i], where, {"center", "radius", "conductivity"});
      Inclusion inc;
      r.get_complex(arr[i], "center", where, inc.center);
      r.get(arr[i], "radius", where, inc.radius);
      r.get(arr[i], "conductivity", where, inc.conductivity);
      p.inclusions.push_back(inc);
    }
  }
}

}  // namespace

Phantom preset_phantom(const std::string& name) {
  const std::string prefix = "homogeneous-";
  if (name.rfind(prefix, 0) == 0) return homogeneous_like(preset_phantom(name.substr(prefix.size())));
  if (name == "disk") return disk_phantom();
  if (name == "rectangle") return rectangle_phantom();
  if (name == "roi") return roi_disk_phantom();
  if (name == "halfplane") return halfplane_phantom();
  fail(ErrorCode::kInvalidConfig, "unknown phantom preset '" + name + "'");
}

JobConfig parse_config(const std::string& text, JobConfig base, bool check) {
  Json doc;
  try {
    doc = Json::parse(text);
  } catch (const std::exception& e) {
    fail(ErrorCode::kInvalidConfig, std::string("config is not valid JSON: ") + e.what());
  }
  Reader r;
  r.keys(doc, "config", {"command", "phantom", "map", "solver", "output"});
  JobConfig c = std::move(base);
  if (doc.is_object()) {
    r.get(doc, "command", "config", c.command);
    if (doc.contains("phantom")) read_phantom(doc["phantom"], r, c.phantom);
    if (doc.contains("map")) {
      const Json& m = doc["map"];
      r.keys(m, "map", {"kind", "a", "b", "xi", "anchor"});
      r.get(m, "kind", "map", c.map.kind);
      r.get_complex(m, "a", "map", c.map.a);
      r.get(m, "b", "map", c.map.b);
      r.get_complex(m, "xi", "map", c.map.xi);
      if (m.is_object() && m.contains("anchor")) {
        if (m["anchor"].is_null()) {
          c.map.anchor.reset();
        } else {
          Complex z;
          if (r.complex_value(m["anchor"], "map.anchor", z)) c.map.anchor = z;
        }
      }
    }
    if (doc.contains("solver")) {
      const Json& s = doc["solver"];
      r.keys(s, "solver", {"N", "kmax", "kgrid", "R", "c", "auto_trunc", "lattice", "lattice_factor",
                           "bnodes", "grid", "noise", "seed", "jobs", "deterministic", "r", "mode",
                           "M_list", "b_list", "electrodes", "window", "roi_radius"});
      SolverSpec& v = c.solver;
      r.get(s, "N", "solver", v.N);
      r.get(s, "kmax", "solver", v.kmax);
      r.get(s, "kgrid", "solver", v.kgrid);
      r.get(s, "R", "solver", v.R);
      r.get(s, "c", "solver", v.c);
      r.get(s, "auto_trunc", "solver", v.auto_trunc);
      r.get(s, "lattice", "solver", v.lattice);
      r.get(s, "lattice_factor", "solver", v.lattice_factor);
      r.get(s, "bnodes", "solver", v.bnodes);
      r.get(s, "grid", "solver", v.grid);
      r.get(s, "noise", "solver", v.noise);
      r.get(s, "seed", "solver", v.seed);
      r.get(s, "jobs", "solver", v.jobs);
      r.get(s, "deterministic", "solver", v.deterministic);
      r.get(s, "r", "solver", v.r);
      r.get(s, "mode", "solver", v.mode);
      r.get(s, "electrodes", "solver", v.electrodes);
      r.get(s, "window", "solver", v.window);
      r.get(s, "roi_radius", "solver", v.roi_radius);
      if (s.is_object() && s.contains("M_list")) {
        if (s["M_list"].is_array() && std::all_of(s["M_list"].begin(), s["M_list"].end(),
                                                  [](const Json& x) { return x.is_number_integer(); })) {
          v.M_list = s["M_list"].get<std::vector<int>>();
        } else {
          r.errors.push_back("solver.M_list: expected an array of integers");
        }
      }
      if (s.is_object() && s.contains("b_list")) {
        if (s["b_list"].is_array() && std::all_of(s["b_list"].begin(), s["b_list"].end(),
                                                  [](const Json& x) { return x.is_number(); })) {
          v.b_list = s["b_list"].get<std::vector<double>>();
        } else {
          r.errors.push_back("solver.b_list: expected an array of numbers");
        }
      }
    }
    if (doc.contains("output")) {
      const Json& o = doc["output"];
      r.keys(o, "output", {"out", "ppm", "data"});
      r.get(o, "out", "output", c.output.out);
      r.get(o, "ppm", "output", c.output.ppm);
      r.get(o, "data", "output", c.output.data);
    }
  }
  if (check && r.errors.empty()) {
    for (std::string& e : config_violations(c)) r.errors.push_back(std::move(e));
  }
  if (!r.errors.empty()) {
    std::string msg;
    for (const auto& e : r.errors) msg += (msg.empty() ? "" : "; ") + e;
    fail(ErrorCode::kInvalidConfig, msg);
  }
  return c;
}

std::vector<std::string> config_violations(const JobConfig& c) {
  std::vector<std::string> v;
  static const std::set<std::string> commands = {"phantom", "simulate", "reconstruct", "roi",
                                                  "sweep",   "pem-study", "scatter"};
  if (!commands.count(c.command)) v.push_back("command: unknown command '" + c.command + "'");
  try {
    c.phantom.validate();
  } catch (const Error& e) {
    v.push_back(std::string("phantom: ") + e.what());
  }
  const SolverSpec& s = c.solver;
  if (s.N < 1) v.push_back("solver.N: must be >= 1");
  if (!(s.kmax > 0)) v.push_back("solver.kmax: must be > 0");
  if (s.kgrid < 4) v.push_back("solver.kgrid: must be >= 4");
  if (!s.auto_trunc && !(s.R > 0)) v.push_back("solver.R: must be > 0 unless auto_trunc is set");
  if (s.R < 0) v.push_back("solver.R: must be >= 0");
  if (!(s.c > 0)) v.push_back("solver.c: must be > 0");
  if (s.lattice < 4 || s.lattice % 2) v.push_back("solver.lattice: must be even and >= 4");
  if (!(s.lattice_factor > 2)) v.push_back("solver.lattice_factor: must be > 2");
  if (s.bnodes <= 2 * s.N) v.push_back("solver.bnodes: must exceed 2N");
  if (s.grid < 2) v.push_back("solver.grid: must be >= 2");
  if (!(s.noise >= 0)) v.push_back("solver.noise: must be >= 0");
  if (s.jobs < 0) v.push_back("solver.jobs: must be >= 0");
  if (s.M_list.empty()) v.push_back("solver.M_list: must not be empty");
  for (int M : s.M_list) {
    if (M < 2) v.push_back("solver.M_list: electrode counts must be >= 2");
  }
  if (s.mode < 0) v.push_back("solver.mode: must be >= 0");
  if (s.mode == 0 && !(s.r > 0.5)) v.push_back("solver.r: must be > 1/2");
  if (s.electrodes < 2) v.push_back("solver.electrodes: must be >= 2");
  if (!(s.window > 0)) v.push_back("solver.window: must be > 0");
  if (!(s.roi_radius > 0)) v.push_back("solver.roi_radius: must be > 0");
  if (s.b_list.empty()) v.push_back("solver.b_list: must not be empty");

  const MapSpec& m = c.map;
  const DomainKind d = c.phantom.domain;
  if (m.kind == "identity") {
    if (d != DomainKind::kDisk) v.push_back("map.kind: identity needs a disk phantom");
  } else if (m.kind == "mobius") {
    if (!(std::abs(m.a) < 1)) v.push_back("map.a: |a| must be < 1");
    if (d != DomainKind::kDisk) v.push_back("map.kind: mobius needs a disk phantom");
  } else if (m.kind == "sc") {
    if (d != DomainKind::kPolygon) v.push_back("map.kind: sc needs a polygon phantom");
  } else if (m.kind == "halfplane") {
    if (!(m.xi.imag() > 0)) v.push_back("map.xi: Im(xi) must be > 0");
    if (d != DomainKind::kHalfplane) v.push_back("map.kind: halfplane needs a half-plane phantom");
  } else if (m.kind == "roi") {
    if (!m.anchor) v.push_back("map.anchor: roi maps need an anchor");
    if (d == DomainKind::kHalfplane) v.push_back("map.kind: roi needs a disk or polygon phantom");
    if (m.anchor && !c.phantom.inside_domain(*m.anchor)) {
      v.push_back("map.anchor: must lie inside the domain");
    }
  } else {
    v.push_back("map.kind: unknown map kind '" + m.kind + "'");
  }
  if (c.command == "sweep" && d != DomainKind::kHalfplane) {
    v.push_back("command: sweep needs a half-plane phantom");
  }
  if (c.command == "roi" && !m.anchor) v.push_back("map.anchor: roi needs an anchor");
  if (!c.output.data.empty() && !std::ifstream(c.output.data)) {
    v.push_back("output.data: file '" + c.output.data + "' does not exist");
  }
  return v;
}

void validate_config(const JobConfig& config) {
  const auto v = config_violations(config);
  if (v.empty()) return;
  std::string msg;
  for (const auto& e : v) msg += (msg.empty() ? "" : "; ") + e;
  fail(ErrorCode::kInvalidConfig, msg);
}

std::string config_to_json(const JobConfig& c, bool compact) {
  Json doc;
  doc["command"] = c.command;
  Json ph;
  ph["domain"] = domain_name(c.phantom.domain);
  if (c.phantom.polygon) {
    Json verts = Json::array();
    for (Complex z : c.phantom.polygon->vertices()) verts.push_back(complex_json(z));
    ph["vertices"] = verts;
  }
  Json incs = Json::array();
  for (const Inclusion& inc : c.phantom.inclusions) {
    incs.push_back({{"center", complex_json(inc.center)},
                    {"radius", inc.radius},
                    {"conductivity", inc.conductivity}});
  }
  ph["inclusions"] = incs;
  doc["phantom"] = ph;
  doc["map"] = {{"kind", c.map.kind},
                {"a", complex_json(c.map.a)},
                {"b", c.map.b},
                {"xi", complex_json(c.map.xi)},
                {"anchor", c.map.anchor ? complex_json(*c.map.anchor) : Json()}};
  const SolverSpec& s = c.solver;
  doc["solver"] = {{"N", s.N},
                   {"kmax", s.kmax},
                   {"kgrid", s.kgrid},
                   {"R", s.R},
                   {"c", s.c},
                   {"auto_trunc", s.auto_trunc},
                   {"lattice", s.lattice},
                   {"lattice_factor", s.lattice_factor},
                   {"bnodes", s.bnodes},
                   {"grid", s.grid},
                   {"noise", s.noise},
                   {"seed", s.seed},
                   {"jobs", s.jobs},
                   {"deterministic", s.deterministic},
                   {"r", s.r},
                   {"mode", s.mode},
                   {"M_list", s.M_list},
                   {"b_list", s.b_list},
                   {"electrodes", s.electrodes},
                   {"window", s.window},
                   {"roi_radius", s.roi_radius}};
  doc["output"] = {{"out", c.output.out}, {"ppm", c.output.ppm}, {"data", c.output.data}};
  return compact ? doc.dump() : doc.dump(2);
}

ConformalMap build_map(const JobConfig& c) {
  const MapSpec& m = c.map;
  if (m.kind == "identity") return ConformalMap::identity();
  if (m.kind == "mobius") return ConformalMap::disk_mobius(m.a);
  if (m.kind == "halfplane") return ConformalMap::halfplane_mobius(m.b, m.xi);
  if (m.kind == "sc") {
    if (!c.phantom.polygon) fail(ErrorCode::kInvalidConfig, "sc map needs a polygon phantom");
    return roi_map(c.phantom, {0.0, Region::circle(0.0, 1.0)});
  }
  if (m.kind == "roi") {
    if (!m.anchor) fail(ErrorCode::kInvalidConfig, "roi map needs an anchor");
    return roi_map(c.phantom, {*m.anchor, Region::circle(*m.anchor, 1.0)});
  }
  fail(ErrorCode::kInvalidConfig, "unknown map kind '" + m.kind + "'");
}

PipelineOptions pipeline_options(const SolverSpec& s) {
  PipelineOptions o;
  o.N = s.N;
  o.kgrid = {s.kmax, s.kgrid, false};
  o.trunc = {s.R, s.c, s.auto_trunc};
  o.lattice = s.lattice;
  o.lattice_factor = s.lattice_factor;
  return o;
}

// ---------------------------------------------------------------------------
// Grid CSV.

void write_grid_csv(std::ostream& out, const ReconstructionGrid& g) {
  char buf[200];
  std::snprintf(buf, sizeof buf, "# nx: %d\n# ny: %d\n# x_min: %.17g\n# x_max: %.17g\n", g.nx, g.ny,
                g.x_min, g.x_max);
  out << buf;
  std::snprintf(buf, sizeof buf, "# y_min: %.17g\n# y_max: %.17g\n", g.y_min, g.y_max);
  out << buf;
  for (const auto& [k, v] : g.metadata) out << "# " << k << ": " << v << "\n";
  out << "x,y,sigma,flag\n";
  for (int i = 0; i < g.size(); ++i) {
    const int flag = !g.inside[i] ? 2 : (g.flagged[i] ? 1 : 0);
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%d\n", g.nodes[i].real(), g.nodes[i].imag(),
                  g.inside[i] ? g.sigma[i] : 0.0, flag);
    out << buf;
  }
}

ReconstructionGrid read_grid_csv(std::istream& in) {
  ReconstructionGrid g;
  std::string line;
  bool header = false;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      const auto colon = line.find(':');
      if (colon == std::string::npos) continue;
      std::string key = line.substr(1, colon - 1), value = line.substr(colon + 1);
      key.erase(0, key.find_first_not_of(' '));
      value.erase(0, value.find_first_not_of(' '));
      try {
        if (key == "nx") g.nx = std::stoi(value);
        else if (key == "ny") g.ny = std::stoi(value);
        else if (key == "x_min") g.x_min = std::stod(value);
        else if (key == "x_max") g.x_max = std::stod(value);
        else if (key == "y_min") g.y_min = std::stod(value);
        else if (key == "y_max") g.y_max = std::stod(value);
        else g.metadata[key] = value;
      } catch (const std::exception&) {
        fail(ErrorCode::kIo, "grid csv: bad header value for " + key);
      }
      continue;
    }
    if (!header) {
      if (line != "x,y,sigma,flag") fail(ErrorCode::kIo, "grid csv: missing x,y,sigma,flag header");
      header = true;
      continue;
    }
    double x, y, s;
    int flag;
    if (std::sscanf(line.c_str(), "%lf,%lf,%lf,%d", &x, &y, &s, &flag) != 4) {
      fail(ErrorCode::kIo, "grid csv: malformed row '" + line + "'");
    }
    g.nodes.emplace_back(x, y);
    g.sigma.push_back(s);
    g.inside.push_back(flag != 2);
    g.flagged.push_back(flag == 1);
  }
  if (!header || g.nx * g.ny != static_cast<int>(g.nodes.size())) {
    fail(ErrorCode::kIo, "grid csv: row count does not match nx * ny");
  }
  return g;
}

// ---------------------------------------------------------------------------
// Images.

std::string render_ppm(const std::vector<double>& values, const std::vector<std::uint8_t>& masked,
                       int width, int height, double lo, double hi, const std::string& comment) {
  if (!(lo < hi)) fail(ErrorCode::kInvalidScale, "render: lo must be < hi");
  const std::size_t n = static_cast<std::size_t>(width) * height;
  if (width < 1 || height < 1 || values.size() != n || masked.size() != n) {
    fail(ErrorCode::kInvalidParameter, "render: raster size mismatch");
  }
  std::string out = "P6\n";
  if (!comment.empty()) {
    std::string c = comment;
    std::replace(c.begin(), c.end(), '\n', ' ');
    out += "# " + c + "\n";
  }
  out += std::to_string(width) + " " + std::to_string(height) + "\n255\n";
  for (std::size_t i = 0; i < n; ++i) {
    unsigned char px[3] = {128, 128, 128};
    if (!masked[i]) {
      if (!std::isfinite(values[i])) fail(ErrorCode::kInvalidParameter, "render: non-finite value");
      const double t = std::clamp((values[i] - lo) / (hi - lo), 0.0, 1.0);
      if (t <= 0.5) {
        const auto w = static_cast<unsigned char>(std::lround(255 * 2 * t));
        px[0] = w;
        px[1] = w;
        px[2] = 255;
      } else {
        const auto w = static_cast<unsigned char>(std::lround(255 * (2 - 2 * t)));
        px[0] = 255;
        px[1] = w;
        px[2] = w;
      }
    }
    out.append(reinterpret_cast<const char*>(px), 3);
  }
  return out;
}

std::string render_grid_ppm(const ReconstructionGrid& g, double lo, double hi,
                            const std::string& comment) {
  std::vector<double> v;
  std::vector<std::uint8_t> m;
  for (int row = g.ny - 1; row >= 0; --row) {
    for (int i = 0; i < g.nx; ++i) {
      const int idx = row * g.nx + i;
      v.push_back(g.inside[idx] ? g.sigma[idx] : 0.0);
      m.push_back(!g.inside[idx]);
    }
  }
  return render_ppm(v, m, g.nx, g.ny, lo, hi, comment);
}

void add_relative_noise(OperatorMatrix& op, double eps, std::uint64_t seed) {
  if (!(eps >= 0)) fail(ErrorCode::kInvalidParameter, "noise level must be >= 0");
  if (eps == 0) return;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  for (Eigen::Index j = 0; j < op.entries.cols(); ++j) {
    for (Eigen::Index i = 0; i < op.entries.rows(); ++i) {
      const double a = g(rng), b = g(rng);
      op.entries(i, j) += eps * std::abs(op.entries(i, j)) * Complex(a, b) / std::sqrt(2.0);
    }
  }
}

}  // namespace cdbar
