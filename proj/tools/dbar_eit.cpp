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


// dbar_eit: command-line driver for the conformal D-bar pipeline.

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "cdbar/common.hpp"
#include "cdbar/dbar_core.hpp"
#include "cdbar/fourier_ops.hpp"
#include "cdbar/io.hpp"
#include "cdbar/pipeline.hpp"
#include "json.hpp"

namespace {

using namespace cdbar;
using Json = nlohmann::json;

struct Flags {
  std::string config, phantom, map, anchor;
  int N = 0, kgrid = 0, lattice = 0, bnodes = 0, grid = 0, jobs = 0, mode = 0;
  double R = 0, c = 0, kmax = 0, noise = 0, r = 0;
  std::uint64_t seed = 0;
  bool auto_trunc = false, deterministic = false, print_config = false;
  std::string out, ppm, data;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::kIo, "cannot read '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary);
  if (!out || !out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()))) {
    fail(ErrorCode::kIo, "cannot write '" + path + "'");
  }
}

// Emits to `path`, or to stdout when it is empty.
void emit(const std::string& path, const std::string& bytes) {
  if (path.empty()) {
    std::cout << bytes;
  } else {
    write_file(path, bytes);
  }
}

Json parse_json(const std::string& text, const std::string& what) {
  try {
    return Json::parse(text);
  } catch (const std::exception& e) {
    fail(ErrorCode::kInvalidConfig, what + " is not valid JSON: " + e.what());
  }
}

// A config document, or an artifact carrying a "# config: {...}" line.
Json load_config_document(const std::string& path) {
  const std::string text = read_file(path);
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && text[first] == '{') return parse_json(text, path);
  std::istringstream in(text);
  std::string line;
  const std::string tag = "# config: ";
  while (std::getline(in, line)) {
    if (line.rfind(tag, 0) == 0) return parse_json(line.substr(tag.size()), path);
  }
  fail(ErrorCode::kInvalidConfig, "'" + path + "' holds no embedded config");
}

std::vector<double> numbers(const std::string& text, const std::string& what) {
  std::vector<double> v;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      v.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      fail(ErrorCode::kInvalidConfig, what + ": bad number '" + item + "'");
    }
  }
  return v;
}

// KIND[:params]; mobius:ax,ay and halfplane:b[,xi_im].
Json map_document(const std::string& spec) {
  const auto colon = spec.find(':');
  const std::string kind = spec.substr(0, colon);
  const std::string params = colon == std::string::npos ? "" : spec.substr(colon + 1);
  Json m = {{"kind", kind}};
  const std::vector<double> p = params.empty() ? std::vector<double>{} : numbers(params, "--map");
  if (kind == "mobius") {
    if (p.size() != 2) fail(ErrorCode::kInvalidConfig, "--map mobius:AX,AY needs two numbers");
    m["a"] = {p[0], p[1]};
  } else if (kind == "halfplane") {
    if (p.empty() || p.size() > 2) fail(ErrorCode::kInvalidConfig, "--map halfplane:B[,XI] needs one or two numbers");
    m["b"] = p[0];
    if (p.size() == 2) m["xi"] = {0.0, p[1]};
  } else if (!p.empty()) {
    fail(ErrorCode::kInvalidConfig, "--map " + kind + " takes no parameters");
  }
  return m;
}

Json phantom_document(const std::string& spec) {
  if (std::filesystem::is_regular_file(spec)) {
    Json doc = parse_json(read_file(spec), spec);
    return doc.contains("phantom") ? doc["phantom"] : doc;
  }
  return {{"preset", spec}};
}

// Resolves the job: embedded or explicit config first, then flags, then the
// per-command defaults that depend on the phantom domain.
JobConfig resolve(const std::string& command, const Flags& f, const CLI::App& sub) {
  auto given = [&](const char* name) { return sub.get_option(name)->count() > 0; };
  Json doc = given("--config") ? load_config_document(f.config) : Json::object();
  doc["command"] = command;
  if (given("--phantom")) doc["phantom"] = phantom_document(f.phantom);
  if (given("--map")) {
    const Json keep = doc.contains("map") && doc["map"].contains("anchor") ? doc["map"]["anchor"] : Json();
    doc["map"] = map_document(f.map);
    if (!keep.is_null()) doc["map"]["anchor"] = keep;
  }
  if (given("--anchor")) {
    const std::vector<double> a = numbers(f.anchor, "--anchor");
    if (a.size() != 2) fail(ErrorCode::kInvalidConfig, "--anchor needs X,Y");
    doc["map"]["anchor"] = {a[0], a[1]};
    if (!given("--map")) doc["map"]["kind"] = "roi";
  }
  for (const char* key : {"solver", "output"}) {
    if (!doc.contains(key)) doc[key] = Json::object();
  }
  Json& s = doc["solver"];
  if (given("--N")) s["N"] = f.N;
  if (given("--R")) {
    s["R"] = f.R;
    if (!given("--auto-trunc")) s["auto_trunc"] = false;
  }
  if (given("--c")) s["c"] = f.c;
  if (given("--auto-trunc")) s["auto_trunc"] = true;
  if (given("--kmax")) s["kmax"] = f.kmax;
  if (given("--kgrid")) s["kgrid"] = f.kgrid;
  if (given("--lattice")) s["lattice"] = f.lattice;
  if (given("--bnodes")) s["bnodes"] = f.bnodes;
  if (given("--grid")) s["grid"] = f.grid;
  if (given("--noise")) s["noise"] = f.noise;
  if (given("--seed")) s["seed"] = f.seed;
  if (given("--jobs")) s["jobs"] = f.jobs;
  if (given("--deterministic")) s["deterministic"] = true;
  if (given("--r")) s["r"] = f.r;
  if (given("--mode")) s["mode"] = f.mode;
  Json& o = doc["output"];
  if (given("--out")) o["out"] = f.out;
  if (given("--ppm")) o["ppm"] = f.ppm;
  if (!f.data.empty()) o["data"] = f.data;

  JobConfig c = parse_config(doc.dump(), {}, false);
  const bool map_set = doc.contains("map") && doc["map"].contains("kind");
  if (!map_set) {
    switch (c.phantom.domain) {
      case DomainKind::kDisk: c.map.kind = "identity"; break;
      case DomainKind::kPolygon: c.map.kind = "sc"; break;
      case DomainKind::kHalfplane: c.map.kind = "halfplane"; break;
    }
  }
  if (command == "sweep" && !s.contains("N")) c.solver.N = 5;
  validate_config(c);
  return c;
}

SimulationOptions simulation_options(const JobConfig& c) {
  SimulationOptions o;
  o.quad_nodes = c.solver.bnodes;
  return o;
}

SweepOptions sweep_options(const JobConfig& c) {
  SweepOptions o;
  o.xi = c.map.xi;
  o.N = c.solver.N;
  o.window = c.solver.window;
  o.electrodes = c.solver.electrodes;
  o.pipeline = pipeline_options(c.solver);
  o.grid = halfplane_grid(-6, 6, 3, c.solver.grid, std::max(2, c.solver.grid / 4));
  return o;
}

ReconstructionGrid output_grid(const JobConfig& c) {
  if (c.phantom.domain == DomainKind::kHalfplane) return *sweep_options(c).grid;
  return domain_grid(c.phantom, c.solver.grid);
}

// Virtual ND data for the configured phantom and map.
OperatorMatrix simulate(const JobConfig& c, const ConformalMap& map) {
  const BasisSpec basis{c.solver.N};
  OperatorMatrix nd;
  if (c.phantom.domain == DomainKind::kHalfplane) {
    nd = halfplane_virtual_relative_nd(c.phantom, c.map.b, sweep_options(c));
    nd.entries += unit_disk_nd(c.solver.N).entries;
    nd.role = OperatorRole::kND;
  } else if (map.kind() == MapKind::kIdentity) {
    nd = nd_matrix(c.phantom, basis, simulation_options(c));
  } else {
    nd = mapped_phantom_nd(c.phantom, map, basis, simulation_options(c));
  }
  add_relative_noise(nd, c.solver.noise, c.solver.seed);
  nd.metadata["map"] = map.descriptor();
  nd.metadata["config"] = config_to_json(c, true);
  return nd;
}

bool has_contrast(const Phantom& p) {
  return std::any_of(p.inclusions.begin(), p.inclusions.end(),
                     [](const Inclusion& i) { return i.conductivity != 1.0; });
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string grid_csv(const ReconstructionGrid& g) {
  std::ostringstream ss;
  write_grid_csv(ss, g);
  return ss.str();
}

// Colour scale spanning the inside values, widened around constant fields.
void write_ppm(const JobConfig& c, const ReconstructionGrid& g, const std::string& path) {
  if (path.empty()) return;
  double lo = 0, hi = 0;
  bool first = true;
  for (int i = 0; i < g.size(); ++i) {
    if (!g.inside[i]) continue;
    lo = first ? g.sigma[i] : std::min(lo, g.sigma[i]);
    hi = first ? g.sigma[i] : std::max(hi, g.sigma[i]);
    first = false;
  }
  if (!(hi - lo > 1e-12)) {
    lo -= 0.5;
    hi += 0.5;
  }
  write_file(path, render_grid_ppm(g, lo, hi, "config: " + config_to_json(c, true)));
}

ReconstructionGrid stamp(ReconstructionGrid g, const JobConfig& c) {
  g.metadata["config"] = config_to_json(c, true);
  return g;
}

int run_phantom(const JobConfig& c) {
  const ReconstructionGrid g = stamp(rasterize(c.phantom, output_grid(c)), c);
  emit(c.output.out, grid_csv(g));
  write_ppm(c, g, c.output.ppm);
  return 0;
}

int run_simulate(const JobConfig& c) {
  const OperatorMatrix nd = simulate(c, build_map(c));
  std::ostringstream ss;
  write_operator(ss, nd);
  emit(c.output.out, ss.str());
  return 0;
}

int run_reconstruct(const JobConfig& c) {
  if (c.output.data.empty()) fail(ErrorCode::kInvalidConfig, "reconstruct needs an ND data file");
  std::ifstream in(c.output.data);
  const OperatorMatrix nd = read_operator(in);
  if (nd.basis.N != c.solver.N) {
    fail(ErrorCode::kInvalidConfig, "data file has N = " + std::to_string(nd.basis.N) +
                                        " but solver.N = " + std::to_string(c.solver.N));
  }
  const ConformalMap map = build_map(c);
  ReconstructionGrid g = reconstruct_virtual(nd, map, output_grid(c), pipeline_options(c.solver));
  Json summary = {{"command", "reconstruct"}, {"R", std::stod(g.metadata["R"])}};
  if (has_contrast(c.phantom) && c.phantom.domain != DomainKind::kHalfplane) {
    const double err = relative_l2_error(g, c.phantom);
    g.metadata["relative_l2_error"] = fmt(err);
    summary["relative_l2_error"] = err;
  }
  g = stamp(std::move(g), c);
  emit(c.output.out, grid_csv(g));
  write_ppm(c, g, c.output.ppm);
  if (!c.output.out.empty()) std::cout << summary.dump() << "\n";
  return 0;
}

int run_roi(const JobConfig& c) {
  const Complex anchor = *c.map.anchor;
  const Region region = Region::circle(anchor, c.solver.roi_radius);
  const PipelineOptions po = pipeline_options(c.solver);
  std::vector<std::string> warnings;
  const ConformalMap magnified = roi_map(c.phantom, {anchor, region}, &warnings);
  JobConfig plain = c;
  plain.map.kind = c.phantom.domain == DomainKind::kDisk ? "identity" : "sc";
  const ConformalMap unmagnified = build_map(plain);

  ReconstructionGrid g = reconstruct_virtual(simulate(c, magnified), magnified, output_grid(c), po);
  const ReconstructionGrid u =
      reconstruct_virtual(simulate(plain, unmagnified), unmagnified, output_grid(c), po);
  const double e_mag = roi_error(g, c.phantom, region);
  const double e_plain = roi_error(u, c.phantom, region);
  g.metadata["roi_error"] = fmt(e_mag);
  g.metadata["roi_error_unmagnified"] = fmt(e_plain);
  g = stamp(std::move(g), c);
  if (!c.output.out.empty()) write_file(c.output.out, grid_csv(g));
  write_ppm(c, g, c.output.ppm);
  Json summary = {{"command", "roi"},
                  {"roi_error", e_mag},
                  {"roi_error_unmagnified", e_plain},
                  {"warnings", warnings}};
  std::cout << summary.dump() << "\n";
  return 0;
}

std::string indexed_path(const std::string& path, std::size_t i) {
  if (path.empty()) return path;
  const std::filesystem::path p(path);
  return (p.parent_path() / (p.stem().string() + "_b" + std::to_string(i) + p.extension().string()))
      .string();
}

int run_sweep(const JobConfig& c) {
  const std::vector<ReconstructionGrid> grids = halfplane_sweep(c.phantom, c.solver.b_list, sweep_options(c));
  Json rows = Json::array();
  for (std::size_t i = 0; i < grids.size(); ++i) {
    const ReconstructionGrid g = stamp(grids[i], c);
    double dev = 0;
    for (int q = 0; q < g.size(); ++q) {
      if (g.inside[q]) dev = std::max(dev, std::abs(g.sigma[q] - 1));
    }
    if (!c.output.out.empty()) write_file(indexed_path(c.output.out, i), grid_csv(g));
    write_ppm(c, g, indexed_path(c.output.ppm, i));
    rows.push_back({{"b", c.solver.b_list[i]}, {"max_deviation", dev}});
  }
  std::cout << Json{{"command", "sweep"}, {"reconstructions", rows}}.dump() << "\n";
  return 0;
}

int run_pem_study(const JobConfig& c) {
  const VirtualCurrent f = c.solver.mode > 0 ? VirtualCurrent::fourier_mode(c.solver.mode)
                                             : VirtualCurrent::sobolev(c.solver.r);
  const std::vector<PemStudyRow> rows =
      pem_convergence_study(c.phantom, build_map(c), f, c.solver.M_list);
  const double slope = loglog_slope(rows);
  std::ostringstream ss;
  ss << "# config: " << config_to_json(c, true) << "\n# slope: " << fmt(slope) << "\nM,error\n";
  for (const PemStudyRow& r : rows) ss << r.M << "," << fmt(r.error) << "\n";
  emit(c.output.out, ss.str());
  if (!c.output.out.empty()) {
    std::cout << Json{{"command", "pem-study"}, {"slope", slope}}.dump() << "\n";
  }
  return 0;
}

int run_scatter(const JobConfig& c) {
  OperatorMatrix nd;
  if (!c.output.data.empty()) {
    std::ifstream in(c.output.data);
    nd = read_operator(in);
  } else {
    nd = simulate(c, build_map(c));
  }
  const ScatteringEngine engine(nd_to_dn(nd), c.solver.bnodes);
  const ScatteringGrid raw = engine.evaluate_grid({c.solver.kmax, c.solver.kgrid, false});
  const double R = c.solver.auto_trunc ? auto_radius(raw, c.solver.c) : c.solver.R;
  std::ostringstream ss;
  ss << "# config: " << config_to_json(c, true) << "\n";
  write_scattering(ss, truncate_scattering(raw, {R, c.solver.c, false}));
  emit(c.output.out, ss.str());
  return 0;
}

int dispatch(const JobConfig& c) {
  if (c.solver.jobs > 0) set_default_jobs(c.solver.jobs);
  if (c.command == "phantom") return run_phantom(c);
  if (c.command == "simulate") return run_simulate(c);
  if (c.command == "reconstruct") return run_reconstruct(c);
  if (c.command == "roi") return run_roi(c);
  if (c.command == "sweep") return run_sweep(c);
  if (c.command == "pem-study") return run_pem_study(c);
  return run_scatter(c);
}

void error_line(std::string_view code, const std::string& message) {
  std::cerr << Json{{"error", std::string(code)}, {"message", message}}.dump() << "\n";
}

void add_flags(CLI::App& sub, Flags& f) {
  sub.add_option("--config", f.config, "JSON config, or an artifact with an embedded config");
  sub.add_option("--phantom", f.phantom, "phantom JSON file or preset (disk, rectangle, roi, halfplane, homogeneous-*)");
  sub.add_option("--map", f.map, "identity | mobius:AX,AY | sc | halfplane:B[,XI] | roi");
  sub.add_option("--anchor", f.anchor, "ROI anchor X,Y");
  sub.add_option("--N", f.N, "Fourier modes per sign");
  sub.add_option("--R", f.R, "truncation radius (disables --auto-trunc unless given)");
  sub.add_option("--c", f.c, "truncation magnitude cap");
  sub.add_flag("--auto-trunc", f.auto_trunc, "choose R automatically");
  sub.add_option("--kmax", f.kmax, "k-grid half-width");
  sub.add_option("--kgrid", f.kgrid, "k-grid points per axis");
  sub.add_option("--lattice", f.lattice, "D-bar lattice points per axis");
  sub.add_option("--bnodes", f.bnodes, "boundary quadrature nodes");
  sub.add_option("--grid", f.grid, "reconstruction grid points per axis");
  sub.add_option("--noise", f.noise, "relative Gaussian noise on ND entries");
  sub.add_option("--seed", f.seed, "noise seed");
  sub.add_option("--jobs", f.jobs, "worker threads (0: all cores)");
  sub.add_flag("--deterministic", f.deterministic, "reproducible output");
  sub.add_option("--r", f.r, "Sobolev order of the pem-study current");
  sub.add_option("--mode", f.mode, "pem-study Fourier mode (overrides --r)");
  sub.add_option("--out", f.out, "output path (stdout when omitted)");
  sub.add_option("--ppm", f.ppm, "P6 image path");
  sub.add_flag("--print-config", f.print_config, "print the resolved config and exit");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Conformal D-bar EIT reconstruction"};
  app.require_subcommand(1);
  Flags f;
  const std::vector<std::pair<std::string, std::string>> commands = {
      {"phantom", "rasterize the phantom conductivity"},
      {"simulate", "write virtual ND data"},
      {"reconstruct", "reconstruct from ND data"},
      {"roi", "magnified ROI reconstruction with error report"},
      {"sweep", "half-plane sweep over the map shifts"},
      {"pem-study", "point-electrode convergence table"},
      {"scatter", "export the scattering transform on the k-grid"}};
  for (const auto& [name, help] : commands) {
    CLI::App* sub = app.add_subcommand(name, help);
    add_flags(*sub, f);
    if (name == "reconstruct" || name == "scatter") {
      sub->add_option("data", f.data, "ND data file");
    }
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    error_line(to_string(ErrorCode::kInvalidConfig), e.what());
    return 2;
  }
  const CLI::App* sub = app.get_subcommands().front();
  try {
    const JobConfig c = resolve(sub->get_name(), f, *sub);
    if (f.print_config) {
      std::cout << config_to_json(c) << "\n";
      return 0;
    }
    return dispatch(c);
  } catch (const Error& e) {
    error_line(to_string(e.code()), e.what());
    return e.code() == ErrorCode::kInvalidConfig ? 2 : 1;
  } catch (const std::exception& e) {
    error_line("internal", e.what());
    return 1;
  }
}
