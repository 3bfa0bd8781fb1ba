// sphap: spherical area-preserving parameterization, registration and morphing.

#include "sphap/diagnostics.hpp"
#include "sphap/linear_solve.hpp"
#include "sphap/pipeline.hpp"
#include "sphap/registration.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cctype>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

namespace fs = std::filesystem;
using json = nlohmann::json;
using namespace sphap;

namespace {

constexpr const char* kVersion = "0.1.0";

enum ExitCode { kOk = 0, kNumerical = 1, kUsage = 2 };

struct CommonArgs {
  int fpi_iters = 10;
  int max_iters = 100;
  std::string ls = "interp";
  double radius = 1.2;
  double c1 = 1e-4;
  double alpha_max = 1.0;
  double grad_tol = -1.0;
  double energy_tol = 1e-12;
  double noise_sigma = 0.0;
  std::uint64_t seed = 1;
  std::string log_path;
  std::string correction = "both";
  bool no_timing = false;
  bool serial = false;
};

void add_common(CLI::App* cmd, CommonArgs& a) {
  cmd->add_option("--fpi-iters", a.fpi_iters, "FPI warm-start iterations")->capture_default_str();
  cmd->add_option("--max-iters", a.max_iters, "RGD iterations")->capture_default_str();
  cmd->add_option("--ls", a.ls, "line search: interp or bounded")
      ->check(CLI::IsMember({"interp", "bounded"}))
      ->capture_default_str();
  cmd->add_option("--r", a.radius, "interior radius for FPI and unfolding")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cmd->add_option("--c1", a.c1, "sufficient decrease constant")->capture_default_str();
  cmd->add_option("--alpha-max", a.alpha_max, "largest trial step")->capture_default_str();
  cmd->add_option("--grad-tol", a.grad_tol, "gradient stop (negative: 1e-6 sqrt(n), 0: off)")
      ->capture_default_str();
  cmd->add_option("--energy-tol", a.energy_tol, "E_A stall stop (0: off)")->capture_default_str();
  cmd->add_option("--noise-sigma", a.noise_sigma, "normal noise on input vertices")
      ->capture_default_str();
  cmd->add_option("--seed", a.seed, "seed for all randomness")->capture_default_str();
  cmd->add_option("--log", a.log_path, "convergence CSV path");
  cmd->add_option("--correct-bijectivity", a.correction, "off, fpi, rgd or both")
      ->check(CLI::IsMember({"off", "fpi", "rgd", "both"}))
      ->capture_default_str();
  cmd->add_flag("--no-timing", a.no_timing, "write 0 in the elapsed_s column");
  cmd->add_flag("--serial", a.serial, "use the serial reference kernels");
}

// every long option can also come from SPHAP_<NAME>, e.g. SPHAP_MAX_ITERS
void add_env_names(CLI::App* app) {
  for (CLI::Option* opt : app->get_options()) {
    const auto& names = opt->get_lnames();
    if (names.empty() || names.front() == "help") continue;
    std::string env = "SPHAP_";
    for (char c : names.front())
      env += c == '-' ? '_' : static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    opt->envname(env);
  }
}

ParameterizeOptions to_options(const CommonArgs& a) {
  ParameterizeOptions o;
  o.fpi_iters = a.fpi_iters;
  o.radius = a.radius;
  o.rgd.max_iters = a.max_iters;
  o.rgd.grad_tol = a.grad_tol;
  o.rgd.energy_tol = a.energy_tol;
  o.rgd.line_search.strategy =
      a.ls == "bounded" ? LineSearchStrategy::bounded : LineSearchStrategy::interpolation;
  o.rgd.line_search.c1 = a.c1;
  o.rgd.line_search.alpha_max = a.alpha_max;
  if (a.correction == "off") o.correction = CorrectionStage::off;
  if (a.correction == "fpi") o.correction = CorrectionStage::fpi;
  if (a.correction == "rgd") o.correction = CorrectionStage::rgd;
  if (a.correction == "both") o.correction = CorrectionStage::both;
  o.exec = a.serial ? Execution::serial : Execution::parallel;
  return o;
}

json common_json(const CommonArgs& a) {
  return {{"fpi_iters", a.fpi_iters},
          {"max_iters", a.max_iters},
          {"ls", a.ls},
          {"r", a.radius},
          {"c1", a.c1},
          {"alpha_max", a.alpha_max},
          {"grad_tol", a.grad_tol},
          {"energy_tol", a.energy_tol},
          {"noise_sigma", a.noise_sigma},
          {"seed", a.seed},
          {"correct_bijectivity", a.correction},
          {"serial", a.serial}};
}

void write_json(const fs::path& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  out << j.dump(2) << '\n';
}

std::string strip_mesh_ext(const std::string& p) {
  fs::path path(p);
  return (path.parent_path() / path.stem()).string();
}

SimplicialSurface load_input(const std::string& path, const CommonArgs& a) {
  SimplicialSurface s = load_mesh(path);
  if (a.noise_sigma > 0.0) s = perturb_vertices(s, a.noise_sigma, a.seed);
  return s;
}

void write_vertex_map(const fs::path& path, Index n) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  out << "# output_vertex input_vertex (1-based)\n";
  for (Index i = 1; i <= n; ++i) out << i << ' ' << i << '\n';
}

std::string summary_line(const ParameterizeResult& r) {
  std::ostringstream s;
  s << std::setprecision(6) << "SD/Mean " << r.ratios.sd_over_mean << ", E_A " << r.energy.authalic
    << ", time " << std::fixed << std::setprecision(3) << r.rgd_seconds << " s, folds " << r.folds;
  return s.str();
}

json result_json(const ParameterizeResult& r) {
  json j = {{"status", to_string(r.status)},
            {"fpi_rows", r.fpi_rows},
            {"rgd_iterations", r.rgd_iterations},
            {"E_S", r.energy.stretch},
            {"E_A", r.energy.authalic},
            {"E", r.energy.normalized},
            {"sd_over_mean", r.ratios.sd_over_mean},
            {"folds", r.folds},
            {"timing_s",
             {{"init", r.init_seconds},
              {"fpi", r.fpi_seconds},
              {"rgd", r.rgd_seconds},
              {"total", r.total_seconds}}}};
  if (r.fpi_first_increase) j["fpi_first_increase_iter"] = *r.fpi_first_increase;
  if (r.after_fpi)
    j["correction_after_fpi"] = {{"folds_before", r.after_fpi->folds_before},
                                 {"folds_after", r.after_fpi->folds_after},
                                 {"sweeps", r.after_fpi->sweeps}};
  if (r.after_rgd)
    j["correction_after_rgd"] = {{"folds_before", r.after_rgd->folds_before},
                                 {"folds_after", r.after_rgd->folds_after},
                                 {"sweeps", r.after_rgd->sweeps}};
  return j;
}

// ---- param

struct ParamArgs {
  std::string mesh;
  std::string out;
  CommonArgs common;
};

int run_param(const ParamArgs& a) {
  const auto surface = load_input(a.mesh, a.common);
  for (const auto& w : surface.warnings()) std::cerr << "warning: " << w << '\n';
  const std::string prefix = a.out.empty() ? strip_mesh_ext(a.mesh) + ".sphere" : a.out;
  const auto r = parameterize(surface, to_options(a.common));

  save_mesh(prefix + ".obj", r.f.rows(), surface.faces(), MeshFormat::obj);
  write_vertex_map(prefix + ".vid", surface.num_vertices());
  const std::string log = a.common.log_path.empty() ? prefix + ".csv" : a.common.log_path;
  {
    std::ofstream csv(log);
    if (!csv) throw Error("cannot write " + log);
    write_records_csv(csv, r.records, !a.common.no_timing);
  }
  json manifest = {
      {"version", kVersion},
      {"subcommand", "param"},
      {"inputs", {{"mesh", a.mesh}}},
      {"outputs", {{"sphere", prefix + ".obj"}, {"vertex_map", prefix + ".vid"}, {"log", log}}},
      {"parameters", common_json(a.common)},
      {"result", result_json(r)}};
  write_json(prefix + ".manifest.json", manifest);
  std::cout << summary_line(r) << '\n';
  return kOk;
}

// ---- register

struct RegisterArgs {
  std::string mesh0, mesh1, map0, map1, landmarks, out;
  double lambda = 10.0;
  int reg_iters = 200;
  bool raw_midpoints = false;
  CommonArgs common;
};

SphericalMapping spherical_map_for(const SimplicialSurface& m, const std::string& map_path,
                                   const CommonArgs& common) {
  if (map_path.empty()) return parameterize(m, to_options(common)).f;
  const auto sm = load_mesh(map_path, MeshFormat::automatic, TopologyCheck::none);
  if (sm.num_vertices() != m.num_vertices())
    throw ContractError("spherical map " + map_path + " does not match its mesh");
  return SphericalMapping::from_rows(sm.vertices(), 1e-9);
}

int run_register(const RegisterArgs& a) {
  const auto m0 = load_input(a.mesh0, a.common);
  const auto m1 = load_input(a.mesh1, a.common);
  const auto pairs = load_landmarks(a.landmarks, m0.num_vertices(), m1.num_vertices());
  const auto f0 = spherical_map_for(m0, a.map0, a.common);
  const auto f1 = spherical_map_for(m1, a.map1, a.common);

  RegistrationOptions ro;
  ro.lambda = a.lambda;
  ro.max_iters = a.reg_iters;
  ro.normalize_midpoints = !a.raw_midpoints;
  ro.line_search = to_options(a.common).rgd.line_search;
  ro.exec = a.common.serial ? Execution::serial : Execution::parallel;
  const auto t0 = std::chrono::steady_clock::now();
  const auto r = register_surfaces(m0, f0, m1, f1, pairs, ro);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  const std::string prefix = a.out.empty() ? strip_mesh_ext(a.mesh0) + ".reg" : a.out;
  save_mesh(prefix + ".h0.obj", r.h0.rows(), m0.faces(), MeshFormat::obj);
  save_mesh(prefix + ".h1.obj", r.h1.rows(), m1.faces(), MeshFormat::obj);
  save_mesh(prefix + ".composed.obj", r.composed, m0.faces(), MeshFormat::obj);
  {
    std::ofstream out(prefix + ".composed.txt");
    if (!out) throw Error("cannot write " + prefix + ".composed.txt");
    out << "# vertex_of_M0 face_of_M1 w0 w1 w2 (1-based indices)\n" << std::setprecision(17);
    for (std::size_t v = 0; v < r.locations.size(); ++v) {
      const auto& l = r.locations[v];
      out << v + 1 << ' ' << l.face + 1 << ' ' << l.weights[0] << ' ' << l.weights[1] << ' '
          << l.weights[2] << '\n';
    }
  }
  const double reduction = 1.0 - r.mismatch_after / r.mismatch_before;
  json report = {{"mismatch_before", r.mismatch_before},
                 {"mismatch_after", r.mismatch_after},
                 {"reduction", reduction},
                 {"status0", to_string(r.status0)},
                 {"status1", to_string(r.status1)},
                 {"iterations0", r.iterations0},
                 {"iterations1", r.iterations1},
                 {"fallback_locations", r.fallback_locations}};
  write_json(prefix + ".mismatch.json", report);
  json params = common_json(a.common);
  params["lambda"] = a.lambda;
  params["reg_iters"] = a.reg_iters;
  params["raw_midpoints"] = a.raw_midpoints;
  write_json(prefix + ".manifest.json", {{"version", kVersion},
                                         {"subcommand", "register"},
                                         {"inputs",
                                          {{"mesh0", a.mesh0},
                                           {"mesh1", a.mesh1},
                                           {"map0", a.map0},
                                           {"map1", a.map1},
                                           {"landmarks", a.landmarks}}},
                                         {"parameters", params},
                                         {"result", report},
                                         {"timing_s", {{"registration", secs}}}});
  if (r.fallback_locations > 0)
    std::cerr << "warning: " << r.fallback_locations
              << " vertices located by nearest-face fallback\n";
  std::cout << std::setprecision(6) << "mismatch " << r.mismatch_before << " -> "
            << r.mismatch_after << " (" << 100.0 * reduction << "% reduction)\n";
  return kOk;
}

// ---- morph

struct MorphArgs {
  std::string source, composed, out;
  int frames = 4;
};

int run_morph(const MorphArgs& a) {
  if (a.frames < 2) throw ContractError("morph needs at least 2 frames");
  const auto m0 = load_mesh(a.source);
  if (!fs::exists(a.composed)) throw ContractError("registration output not found: " + a.composed);
  const auto g = load_mesh(a.composed, MeshFormat::automatic, TopologyCheck::none);
  if (g.num_vertices() != m0.num_vertices() || g.faces() != m0.faces())
    throw ContractError("composed map does not belong to " + a.source);
  const std::string prefix = a.out.empty() ? strip_mesh_ext(a.source) + ".morph" : a.out;
  for (int k = 0; k < a.frames; ++k) {
    const double t = static_cast<double>(k) / (a.frames - 1);
    char name[32];
    std::snprintf(name, sizeof name, "_%03d.obj", k);
    save_mesh(prefix + name, homotopy(m0.vertices(), g.vertices(), t), m0.faces(), MeshFormat::obj);
    std::cout << prefix + name << " t=" << t << '\n';
  }
  return kOk;
}

// ---- check

struct CheckArgs {
  std::string mesh;
  std::string map;
  bool probe_eigen = false;
  std::string probe_mode = "magnitude";
};

int run_check(const CheckArgs& a) {
  const auto surface = load_mesh(a.mesh);
  int failures = 0;
  auto report = [&](const std::string& name, bool ok, const std::string& detail) {
    std::cout << (ok ? "PASS " : "FAIL ") << name << ": " << detail << '\n';
    if (!ok) ++failures;
  };
  auto fmt = [](double x) {
    std::ostringstream s;
    s << std::setprecision(3) << x;
    return s.str();
  };

  std::cout << "mesh " << a.mesh << ": " << surface.num_vertices() << " vertices, "
            << surface.num_faces() << " faces\n";
  SphericalMapping f =
      a.map.empty()
          ? conformal_initial_map(surface)
          : SphericalMapping::from_rows(
                load_mesh(a.map, MeshFormat::automatic, TopologyCheck::none).vertices(), 1e-9);

  const Index folds = count_folds(surface, f);
  report("folds", folds == 0, std::to_string(folds) + " folded faces in the spherical map");

  const SparseMatrix L = assemble_laplacian(surface, f.rows());
  const Eigen::VectorXd rows = L * Eigen::VectorXd::Ones(L.cols());
  const double lnorm = norm_inf(L);
  const double asym = norm_inf(SparseMatrix(L - SparseMatrix(L.transpose())));
  report("laplacian", asym == 0.0 && rows.cwiseAbs().maxCoeff() <= 1e-12 * lnorm,
         "asymmetry " + fmt(asym) + ", max row sum " + fmt(rows.cwiseAbs().maxCoeff()));

  const MatrixX3 ga = image_area_gradient(surface, f.rows());
  const MatrixX3 gb = image_area_gradient_laplacian(surface, f.rows());
  const double dual = (ga - gb).cwiseAbs().maxCoeff() / ga.cwiseAbs().maxCoeff();
  report("area_gradient", dual < 1e-10, "two routes differ by " + fmt(dual) + " relative");

  const auto gc = check_energy_gradient(surface, f.rows());
  report("gradient_fd", gc.max_relative_error < 1e-6,
         "max relative error " + fmt(gc.max_relative_error) + " over " +
             std::to_string(gc.entries_checked) + " entries");

  if (surface.num_vertices() <= 1000) {
    const auto hc = check_stretch_hessian(surface, f.rows());
    report("hessian_fd", hc.relative_error < 1e-5 && hc.asymmetry == 0.0,
           "relative error " + fmt(hc.relative_error) + ", translation residual " +
               fmt(hc.translation_residual));
  } else {
    std::cout << "SKIP hessian_fd: dense check limited to 1000 vertices\n";
  }

  const auto e = stretch_energy(surface, f.rows());
  report("authalic_nonnegative", e.authalic >= -1e-12 * e.image_area, "E_A " + fmt(e.authalic));

  if (a.probe_eigen) {
    EigenProbeOptions po;
    po.target = a.probe_mode == "algebraic" ? EigenTarget::smallest_algebraic
                                            : EigenTarget::smallest_magnitude;
    const auto pr = stretch_hessian_probe(surface, f.rows(), po);
    std::ostringstream s;
    s << std::setprecision(6) << "lambda " << pr.eigenvalue << ", residual " << pr.residual << ", "
      << pr.iterations << " solves";
    report("eigen_probe", pr.converged, s.str());
  }
  return failures == 0 ? kOk : kNumerical;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spherical area-preserving parameterization of genus-zero meshes"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  ParamArgs pa;
  auto* param = app.add_subcommand("param", "compute a spherical parameterization");
  param->add_option("mesh", pa.mesh, "input mesh (.obj or .off)")
      ->required()
      ->check(CLI::ExistingFile);
  param->add_option("-o,--out", pa.out, "output prefix (default <mesh>.sphere)");
  add_common(param, pa.common);

  RegisterArgs ra;
  auto* reg = app.add_subcommand("register", "landmark-aligned registration of two meshes");
  reg->add_option("mesh0", ra.mesh0, "source mesh")->required()->check(CLI::ExistingFile);
  reg->add_option("mesh1", ra.mesh1, "target mesh")->required()->check(CLI::ExistingFile);
  reg->add_option("--landmarks", ra.landmarks, "landmark pairs, one 'i j' per line (1-based)")
      ->required()
      ->check(CLI::ExistingFile);
  reg->add_option("--map0", ra.map0, "spherical map of mesh0 (default: computed)");
  reg->add_option("--map1", ra.map1, "spherical map of mesh1 (default: computed)");
  reg->add_option("-o,--out", ra.out, "output prefix");
  reg->add_option("--lambda", ra.lambda, "landmark weight")->capture_default_str();
  reg->add_option("--reg-iters", ra.reg_iters, "alignment iterations")->capture_default_str();
  reg->add_flag("--raw-midpoints", ra.raw_midpoints, "keep chord midpoints off the sphere");
  add_common(reg, ra.common);

  MorphArgs ma;
  auto* morph = app.add_subcommand("morph", "linear homotopy frames from a registration");
  morph->add_option("source", ma.source, "source mesh M0")->required()->check(CLI::ExistingFile);
  morph->add_option("composed", ma.composed, "composed map g (register output .composed.obj)")
      ->required()
      ->check(CLI::ExistingFile);
  morph->add_option("--frames", ma.frames, "number of frames K >= 2")->capture_default_str();
  morph->add_option("-o,--out", ma.out, "output prefix");

  CheckArgs ca;
  auto* check = app.add_subcommand("check", "run gradient, Hessian and invariant checks");
  check->add_option("mesh", ca.mesh, "input mesh")->required()->check(CLI::ExistingFile);
  check->add_option("--map", ca.map, "spherical map to check (default: conformal initializer)");
  check->add_flag("--probe-eigen", ca.probe_eigen, "smallest Hessian eigenvalue");
  check->add_option("--probe-mode", ca.probe_mode, "magnitude or algebraic")
      ->check(CLI::IsMember({"magnitude", "algebraic"}))
      ->capture_default_str();

  for (auto* cmd : {param, reg, morph, check}) add_env_names(cmd);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*param) return run_param(pa);
    if (*reg) return run_register(ra);
    if (*morph) return run_morph(ma);
    if (*check) return run_check(ca);
  } catch (const ContractError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kNumerical;
  }
  return kUsage;
}
