// ballharm command-line front end.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ballharm/check.hpp"
#include "ballharm/conv.hpp"
#include "ballharm/descriptor.hpp"
#include "ballharm/io.hpp"
#include "ballharm/mesh.hpp"
#include "ballharm/moments.hpp"
#include "ballharm/pointcloud.hpp"
#include "ballharm/shapes.hpp"
#include "ballharm/symmetry.hpp"

namespace fs = std::filesystem;
using namespace ballharm;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitCheckFailed = 1;
constexpr int kExitUsage = 2;

// Raised for bad invocations that CLI11 itself cannot detect.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Flags {
  RunConfig cfg;
  std::string alpha = "0.001";
  std::string quad = "48,48,48";
  std::string convention = "orthogonalized";
  std::string scaling = "exact";
};

void add_config_flags(CLI::App* app, Flags& f) {
  app->add_option("--nmax", f.cfg.n_max, "Maximum moment order n")->capture_default_str();
  app->add_option("--pinv-iters", f.cfg.pinv_iterations, "Pseudo-inverse iterations")->capture_default_str();
  app->add_option("--alpha", f.alpha, "Pseudo-inverse step alpha, or 'auto'")->capture_default_str();
  app->add_option("--quad", f.quad, "Quadrature resolution R,T,P")->capture_default_str();
  app->add_option("--axes", f.cfg.axes, "Number of symmetry axes")->capture_default_str();
  app->add_option("--seed", f.cfg.seed, "Random seed")->capture_default_str();
  app->add_option("--convention", f.convention, "Radial convention: orthogonalized | paper-literal")
      ->capture_default_str();
  app->add_option("--empty-ratio", f.cfg.empty_ratio, "Empty nodes per occupied node in the lsq fit")
      ->capture_default_str();
  app->add_option("--kernel-count", f.cfg.kernel_count, "Random kernels when no bank file is given")
      ->capture_default_str();
  app->add_option("--points", f.cfg.points, "Surface samples drawn from an OFF mesh")->capture_default_str();
  app->add_option("--scaling", f.scaling, "vol_conv scaling: exact | paper-literal")->capture_default_str();
}

QuadResolution parse_quad(const std::string& s) {
  QuadResolution q;
  char c1 = 0, c2 = 0;
  std::istringstream in(s);
  if (!(in >> q.n_r >> c1 >> q.n_theta >> c2 >> q.n_phi) || c1 != ',' || c2 != ',' || !in.eof())
    throw UsageError("--quad expects R,T,P, got '" + s + "'");
  return q;
}

// Fills the parsed RunConfig and checks ranges.
RunConfig finish(Flags& f) {
  RunConfig& c = f.cfg;
  if (f.alpha == "auto") {
    c.alpha.reset();
  } else {
    try {
      std::size_t used = 0;
      c.alpha = std::stod(f.alpha, &used);
      if (used != f.alpha.size()) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
      throw UsageError("--alpha expects a number or 'auto', got '" + f.alpha + "'");
    }
  }
  c.quad = parse_quad(f.quad);
  c.convention = parse_convention(f.convention);
  c.scaling = parse_scaling(f.scaling);
  detail::check_degree(c.n_max);
  if (c.n_max < 0) throw ConfigError("--nmax must be non-negative");
  if (c.pinv_iterations < 1) throw ConfigError("--pinv-iters must be at least 1");
  if (c.alpha && !(*c.alpha > 0.0)) throw ConfigError("--alpha must be positive");
  if (c.axes < 1) throw ConfigError("--axes must be at least 1");
  if (c.kernel_count < 1) throw ConfigError("--kernel-count must be at least 1");
  if (c.points < 1) throw ConfigError("--points must be at least 1");
  return c;
}

void require_input(const std::string& path) {
  if (!fs::exists(path)) throw UsageError("no such input: " + path);
}

bool has_extension(const std::string& path, const char* ext) {
  auto e = fs::path(path).extension().string();
  std::transform(e.begin(), e.end(), e.begin(), [](unsigned char ch) { return char(std::tolower(ch)); });
  return e == ext;
}

struct Loaded {
  PointCloud cloud;
  std::size_t input_points = 0;
  std::size_t vertices = 0, faces = 0;
  NormalizeInfo info;
};

// OFF meshes are sampled, then the cloud is normalized into the ball.
Loaded load_raw(const std::string& path, const RunConfig& cfg) {
  require_input(path);
  Loaded out;
  PointCloud raw;
  if (has_extension(path, ".off")) {
    const auto mesh = load_off(path);
    out.vertices = mesh.vertices.size();
    out.faces = mesh.faces.size();
    raw = mesh_to_points(mesh, cfg.points, cfg.seed);
  } else {
    raw = load_xyz(path);
  }
  out.input_points = raw.size();
  out.cloud = normalize_to_ball(raw, &out.info);
  return out;
}

// Point cloud for the analysis commands. An XYZ file inside the unit ball is taken
// as already normalized (e.g. produced by `ingest`); anything else goes through
// the same normalization as `ingest`.
PointCloud load_cloud(const std::string& path, const RunConfig& cfg) {
  require_input(path);
  if (!has_extension(path, ".off")) {
    auto pc = load_xyz(path);
    if (pc.empty()) throw DegenerateInputError(path + ": no points");
    double rmax = 0.0;
    for (const auto& p : pc.points) rmax = std::max(rmax, norm(p));
    if (rmax <= 1.0 + 1e-9) {
      pc.normalized = true;
      return pc;
    }
  }
  return load_raw(path, cfg).cloud;
}

void warn(const std::string& msg) { std::cerr << "warning: " << msg << "\n"; }

void warn_alpha(const PinvReport& rep) {
  if (rep.alpha_out_of_range())
    warn("alpha = " + detail::sci(rep.alpha) + " is at or above 2/rho = " + detail::sci(2.0 / rep.rho) +
         " for this system, so the pseudo-inverse iteration diverges; try --alpha auto --pinv-iters 40");
}

json provenance(const std::string& input, const RunConfig& cfg) {
  return {{"input", input},
          {"n_max", cfg.n_max},
          {"convention", std::string(to_string(cfg.convention))},
          {"axes", cfg.axes},
          {"seed", cfg.seed}};
}

json error_json(const ReconstructionError& e) {
  return {{"mean_abs", e.mean_abs}, {"relative", e.relative}, {"points", e.points}};
}

json pinv_json(const PinvReport& r) {
  return {{"alpha", r.alpha}, {"rho_estimate", r.rho}, {"iterations", r.iterations}, {"residuals", r.residuals}};
}

std::vector<AxialKernel> load_kernels(const std::string& path, const RunConfig& cfg) {
  if (path.empty()) return random_kernel_bank(std::size_t(cfg.kernel_count), cfg.n_max, cfg.convention, cfg.seed);
  require_input(path);
  return kernels_from_json(read_json_file(path));
}

// ---------------------------------------------------------------------------

int cmd_ingest(const std::string& input, const std::string& output, const RunConfig& cfg) {
  const auto l = load_raw(input, cfg);
  save_xyz(output, l.cloud);
  double rmax = 0.0;
  for (const auto& p : l.cloud.points) rmax = std::max(rmax, norm(p));
  json sidecar = {{"config", to_json(cfg)},
                  {"input", input},
                  {"output", output},
                  {"centroid", {l.info.centroid.x, l.info.centroid.y, l.info.centroid.z}},
                  {"scale", l.info.scale},
                  {"max_radius", rmax},
                  {"counts", {{"input_points", l.input_points}, {"output_points", l.cloud.size()}}}};
  if (l.vertices) sidecar["counts"]["vertices"] = l.vertices, sidecar["counts"]["faces"] = l.faces;
  write_json_file(output + ".json", sidecar);
  return kExitOk;
}

int cmd_moments(const std::string& input, const std::string& fixture, const std::string& method,
                const std::string& output, const std::string& csv, const RunConfig& cfg) {
  const bool want_direct = method == "direct" || method == "both";
  const bool want_lsq = method == "lsq" || method == "both";
  if (!want_direct && !want_lsq) throw UsageError("--method must be direct, lsq or both");
  if (input.empty() == fixture.empty()) throw UsageError("give exactly one of an input file or --fixture");

  const auto quad = share(make_quadrature(cfg.quad));
  ShapeFunction f;
  json out = {{"config", to_json(cfg)}};
  if (!fixture.empty()) {
    if (fixture != "bandlimited") throw UsageError("unknown fixture '" + fixture + "' (known: bandlimited)");
    const auto truth = random_real_moments(cfg.n_max, cfg.convention, cfg.seed);
    f = synthesize(truth, quad);
    out["fixture"] = {{"kind", fixture}, {"truth", to_json(truth)}};
  } else {
    f = rasterize(load_cloud(input, cfg), quad, cfg.raster_tol);
    out["provenance"] = provenance(input, cfg);
    if (f.support_size() == 0) throw DegenerateInputError(input + ": rasterization left no occupied nodes");
  }
  out["occupied_nodes"] = f.support_size();

  const MomentVector* primary = nullptr;
  MomentVector direct, lsq;
  if (want_direct) {
    direct = moments_direct(f, cfg.n_max, cfg.convention);
    out["direct"] = {{"moments", to_json(direct)}, {"reconstruction_error", error_json(reconstruction_error(f, direct))}};
    primary = &direct;
  }
  if (want_lsq) {
    PinvReport rep;
    try {
      lsq = moments_lsq(f, cfg.n_max, cfg.pinv(), cfg.convention, cfg.empty_ratio, cfg.seed, &rep);
    } catch (const UnderdeterminedError& e) {
      throw Error(std::string(e.what()) + "; lower --nmax or raise --quad");
    } catch (const NumericError& e) {
      throw Error(std::string(e.what()) + "; try --alpha auto --pinv-iters 40");
    }
    warn_alpha(rep);
    out["lsq"] = {{"moments", to_json(lsq)},
                  {"reconstruction_error", error_json(reconstruction_error(f, lsq))},
                  {"pinv", pinv_json(rep)}};
    primary = &lsq;
  }
  write_json_file(output, out);
  if (!csv.empty()) {
    std::ostringstream s;
    write_csv(s, *primary);
    write_text_file(csv, s.str());
  }
  return kExitOk;
}

int cmd_descriptor(const std::string& input, const std::string& kernels_path, double dropout,
                   const std::string& output, const std::string& csv, const RunConfig& cfg) {
  const auto pc = load_cloud(input, cfg);
  const auto kernels = load_kernels(kernels_path, cfg);
  const auto quad = share(make_quadrature(cfg.quad));
  const auto d = compute_descriptor(pc, kernels, cfg, quad);
  for (const auto& w : d.warnings) warn(w);

  json out = {{"config", to_json(cfg)}, {"provenance", provenance(input, cfg)}};
  out["provenance"]["kernels"] = kernels_path.empty() ? json("random") : json(kernels_path);
  out["axes"] = json::array();
  for (const auto& a : default_axes(cfg.axes).axes) out["axes"].push_back({{"alpha", a.theta}, {"beta", a.phi}});
  const auto body = to_json(d);
  for (auto it = body.begin(); it != body.end(); ++it) out[it.key()] = it.value();
  if (dropout > 0.0) {
    const auto dropped = compute_descriptor(drop_points(pc, dropout, cfg.seed), kernels, cfg, quad);
    out["dropout"] = {{"fraction", dropout}, {"relative_l2_change", relative_change(d.values, dropped.values)}};
  }
  write_json_file(output, out);
  if (!csv.empty()) {
    std::ostringstream s;
    s << std::setprecision(17) << "segment,index,value\n";
    std::size_t pos = 0;
    for (const auto& [name, len] : d.layout)
      for (std::size_t i = 0; i < len; ++i, ++pos) s << name << ',' << i << ',' << d.values[pos] << '\n';
    write_text_file(csv, s.str());
  }
  return kExitOk;
}

MomentVector fitted_moments(const std::string& input, const RunConfig& cfg) {
  const auto quad = share(make_quadrature(cfg.quad));
  const auto f = rasterize(load_cloud(input, cfg), quad, cfg.raster_tol);
  if (f.support_size() == 0) throw DegenerateInputError(input + ": rasterization left no occupied nodes");
  PinvReport rep;
  auto m = moments_lsq(f, cfg.n_max, cfg.pinv(), cfg.convention, cfg.empty_ratio, cfg.seed, &rep);
  warn_alpha(rep);
  return m;
}

int cmd_convolve(const std::string& input, const std::string& kernels_path, const std::string& output,
                 const std::string& csv, const RunConfig& cfg) {
  const auto kernels = load_kernels(kernels_path, cfg);
  const auto m = fitted_moments(input, cfg);
  json out = {{"config", to_json(cfg)}, {"provenance", provenance(input, cfg)}, {"maps", json::array()}};
  std::ostringstream s;
  if (!csv.empty()) s << std::setprecision(17) << "kernel,l,m,re,im\n";
  for (std::size_t k = 0; k < kernels.size(); ++k) {
    const auto fm = vol_conv(m, kernels[k], cfg.scaling);
    out["maps"].push_back({{"kernel", k}, {"map", to_json(fm)}});
    for (int l = 0; l <= fm.l_max && !csv.empty(); ++l)
      for (int mm = -l; mm <= l; ++mm)
        s << k << ',' << l << ',' << mm << ',' << fm.at(l, mm).real() << ',' << fm.at(l, mm).imag() << '\n';
  }
  write_json_file(output, out);
  if (!csv.empty()) write_text_file(csv, s.str());
  return kExitOk;
}

int cmd_symmetry(const std::string& input, const std::string& output, const RunConfig& cfg) {
  const auto m = fitted_moments(input, cfg);
  const auto axes = default_axes(cfg.axes);
  const auto values = symmetry_descriptor(m, axes);
  json rows = json::array();
  for (std::size_t i = 0; i < axes.size(); ++i)
    rows.push_back({{"alpha", axes.axes[i].theta}, {"beta", axes.axes[i].phi}, {"value", values[i]}});
  const AxisGrid grid;
  const auto best = symmetry_argmax(m, grid);
  const Vec3 u = to_cartesian(best.axis);
  json out = {{"config", to_json(cfg)},
              {"provenance", provenance(input, cfg)},
              {"axes", std::move(rows)},
              {"grid_argmax",
               {{"grid", {grid.n_alpha, grid.n_beta}},
                {"alpha", best.axis.theta},
                {"beta", best.axis.phi},
                {"axis", {u.x, u.y, u.z}},
                {"value", best.value}}}};
  write_json_file(output, out);
  return kExitOk;
}

int cmd_check(const std::vector<std::string>& only, bool quad_given, const std::string& report,
              const RunConfig& cfg) {
  CheckOptions opt;
  opt.n_max = cfg.n_max;
  opt.seed = cfg.seed;
  opt.convention = cfg.convention;
  if (quad_given) opt.quad = cfg.quad;
  for (const auto& name : only) {
    const auto& s = all_suites();
    if (std::none_of(s.begin(), s.end(), [&](const Suite& x) { return name == x.name; }))
      throw UsageError("unknown suite '" + name + "'");
  }
  bool all = true;
  json results = json::array();
  for (const auto& s : all_suites()) {
    if (!only.empty() && std::find(only.begin(), only.end(), s.name) == only.end()) continue;
    const auto r = run_suite(s, opt);
    all = all && r.passed;
    std::printf("[%s] %s (criterion %d, %.1f s)\n", r.passed ? "PASS" : "FAIL", r.name.c_str(), r.criterion, r.seconds);
    for (const auto& m : r.measurements) std::printf("    %s\n", m.c_str());
    std::fflush(stdout);
    results.push_back({{"suite", r.name},
                       {"criterion", r.criterion},
                       {"passed", r.passed},
                       {"seconds", r.seconds},
                       {"measurements", r.measurements}});
  }
  std::printf("%s\n", all ? "all suites passed" : "some suites failed");
  if (!report.empty()) write_json_file(report, {{"config", to_json(cfg)}, {"passed", all}, {"suites", results}});
  return all ? kExitOk : kExitCheckFailed;
}

template <class Fn>
std::vector<double> timed_runs(int runs, Fn&& fn) {
  std::vector<double> t;
  for (int i = 0; i < runs; ++i) {
    const auto t0 = std::chrono::steady_clock::now();
    fn();
    t.push_back(std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
  }
  std::sort(t.begin(), t.end());
  return t;
}

int cmd_bench(int runs, const std::string& output, const RunConfig& cfg) {
  if (runs < 1) throw ConfigError("--runs must be at least 1");
  const auto quad = share(make_quadrature(cfg.quad));
  const auto shape = shapes::desk_set()[6];
  const auto f = rasterize(normalize_to_ball(mesh_to_points(shape.mesh, cfg.points, cfg.seed)), quad);
  const auto idx = lsq_sample_nodes(f, cfg.empty_ratio, cfg.seed, column_layout(cfg.n_max).size());
  std::vector<BallCoord> pts;
  std::vector<double> vals;
  for (auto i : idx) pts.push_back(quad->node(i)), vals.push_back(f.values[i]);
  const auto dirs = fibonacci_directions(200);
  const auto fm = random_real_moments(cfg.n_max, cfg.convention, cfg.seed);
  const auto g = random_kernel_bank(1, cfg.n_max, cfg.convention, cfg.seed)[0];
  const auto fs_ = synthesize(fm, quad), gs = synthesize(g.moments(), quad);

  LinearSystem sys;
  PinvReport rep;
  volatile double sink = 0.0;  // keeps the timed work observable
  struct Row {
    const char* stage;
    std::vector<double> t;
  };
  std::vector<Row> rows;
  rows.push_back({"moment_assembly", timed_runs(runs, [&] { sys = build_system(pts, vals, cfg.n_max, cfg.convention); })});
  rows.push_back({"pinv_iterations", timed_runs(runs, [&] {
                    try {
                      sink = sink + pinv_iterate(sys.design, cfg.pinv(), &rep)(0, 0);
                    } catch (const NumericError&) {
                    }
                  })});
  rows.push_back({"vol_conv_200_directions", timed_runs(runs, [&] {
                    const auto map = vol_conv(fm, g, cfg.scaling);
                    for (const auto& d : dirs) sink = sink + eval_feature_map(map, d);
                  })});
  rows.push_back({"brute_force_conv_200_directions", timed_runs(runs, [&] { sink = sink + brute_force_conv(fs_, gs, dirs)[0]; })});
  warn_alpha(rep);

  std::ostringstream s;
  s << std::setprecision(6) << "stage,median_seconds,min_seconds,max_seconds,runs\n";
  for (const auto& r : rows)
    s << r.stage << ',' << r.t[r.t.size() / 2] << ',' << r.t.front() << ',' << r.t.back() << ',' << r.t.size() << '\n';
  if (output.empty())
    std::cout << s.str();
  else
    write_text_file(output, s.str());
  const double speedup = rows[3].t[rows[3].t.size() / 2] / rows[2].t[rows[2].t.size() / 2];
  std::cerr << "vol_conv is " << detail::fmt("%.0f", speedup) << "x faster than the brute-force oracle\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Harmonic analysis of functions on the unit ball"};
  app.require_subcommand(1);
  Flags flags;
  std::string input, output, csv, kernels, fixture, method = "both", report;
  double dropout = 0.2;
  int runs = 5;
  std::vector<std::string> suites;

  auto* ingest = app.add_subcommand("ingest", "Normalize an OFF mesh or XYZ cloud into the unit ball");
  ingest->add_option("input", input, "OFF or XYZ file")->required();
  ingest->add_option("-o,--output", output, "Normalized XYZ output; a .json sidecar is written next to it")->required();

  auto* moments = app.add_subcommand("moments", "Zernike moments by direct quadrature and least squares");
  moments->add_option("input", input, "OFF or XYZ file");
  moments->add_option("--fixture", fixture, "Use a synthetic function instead of an input: bandlimited");
  moments->add_option("--method", method, "direct | lsq | both")->capture_default_str();
  moments->add_option("-o,--output", output, "JSON output")->required();
  moments->add_option("--csv", csv, "Also write the last computed moment vector as CSV");

  auto* descriptor = app.add_subcommand("descriptor", "Fixed-view convolution and symmetry descriptor");
  descriptor->add_option("input", input, "OFF or XYZ file")->required();
  descriptor->add_option("--kernels", kernels, "Kernel bank JSON (default: seeded random bank)");
  descriptor->add_option("--dropout", dropout, "Fraction of points removed for the dropout probe; 0 disables")
      ->capture_default_str();
  descriptor->add_option("-o,--output", output, "JSON output")->required();
  descriptor->add_option("--csv", csv, "Also write the values as CSV");

  auto* convolve = app.add_subcommand("convolve", "Volumetric convolution feature maps");
  convolve->add_option("input", input, "OFF or XYZ file")->required();
  convolve->add_option("--kernels", kernels, "Kernel bank JSON (default: seeded random bank)");
  convolve->add_option("-o,--output", output, "JSON output")->required();
  convolve->add_option("--csv", csv, "Also write the maps as CSV");

  auto* symmetry = app.add_subcommand("symmetry", "Axial symmetry descriptor and grid argmax");
  symmetry->add_option("input", input, "OFF or XYZ file")->required();
  symmetry->add_option("-o,--output", output, "JSON output")->required();

  auto* check = app.add_subcommand("check", "Run the verification suites");
  check->add_option("--suite", suites, "Run only the named suite(s)");
  check->add_option("--report", report, "Also write a JSON report");

  auto* bench = app.add_subcommand("bench", "Time the main stages");
  bench->add_option("--runs", runs, "Repetitions per stage")->capture_default_str();
  bench->add_option("-o,--output", output, "CSV output (default: stdout)");

  for (auto* sub : {ingest, moments, descriptor, convolve, symmetry, check, bench}) add_config_flags(sub, flags);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    const RunConfig cfg = finish(flags);
    if (*ingest) return cmd_ingest(input, output, cfg);
    if (*moments) return cmd_moments(input, fixture, method, output, csv, cfg);
    if (*descriptor) return cmd_descriptor(input, kernels, dropout, output, csv, cfg);
    if (*convolve) return cmd_convolve(input, kernels, output, csv, cfg);
    if (*symmetry) return cmd_symmetry(input, output, cfg);
    if (*check) return cmd_check(suites, check->count("--quad") > 0, report, cfg);
    if (*bench) return cmd_bench(runs, output, cfg);
  } catch (const std::exception& e) {
    std::cerr << "ballharm: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}
