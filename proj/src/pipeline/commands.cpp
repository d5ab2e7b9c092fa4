#include "pipeline/commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <limits>
#include <fstream>
#include <sstream>

#include "core/field_io.hpp"
#include "harness/suites.hpp"
#include "recon/ista.hpp"
#include "solver/forward.hpp"

namespace fs = std::filesystem;

namespace vispat {

namespace {

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << text;
}

void echo_config(const fs::path& out_dir, const Json& cfg) {
  write_text(out_dir / "config.json", cfg.dump(2) + "\n");
}

fs::path make_out_dir(const Json& cfg) {
  fs::path dir = cfg.at("io").at("out_dir").get<std::string>();
  if (dir.empty()) throw ConfigError("io.out_dir must not be empty");
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
  return dir;
}

void write_map(const fs::path& path, const Grid& g, const Field& f,
               const std::string& tag) {
  FieldData fd;
  fd.rank = g.d;
  for (int a = 0; a < g.d; ++a) {
    fd.n[a] = g.n[a];
    fd.dx[a] = g.dx[a];
  }
  fd.tag = tag;
  fd.data = f;
  write_field(path.string(), fd);
}

// Geometry-only grid from a field file (dt/nt are placeholders; callers
// rebuild a validated grid before simulating).
Grid grid_of(const FieldData& fd) {
  Grid g;
  g.d = fd.rank;
  for (int a = 0; a < fd.rank; ++a) {
    g.n[a] = static_cast<int>(fd.n[a]);
    g.dx[a] = fd.dx[a];
  }
  if (g.d == 2) {
    g.n[2] = 1;
    g.dx[2] = g.dx[1];
  }
  return g;
}

FieldData read_map(const fs::path& path) {
  if (!fs::exists(path)) throw IoError("missing input file " + path.string());
  return read_field(path.string());
}

struct MapsBundle {
  RawMaps maps;
  Grid geometry;
  Field p0;
  std::vector<std::array<double, 3>> sensors;
};

std::vector<std::array<double, 3>> read_sensors_csv(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("missing sensor file " + path.string());
  std::vector<std::array<double, 3>> out;
  std::string line;
  std::getline(in, line);  // header
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::array<double, 3> c{};
    char comma;
    std::istringstream ls(line);
    if (!(ls >> c[0] >> comma >> c[1] >> comma >> c[2]))
      throw IoError("malformed sensor line in " + path.string());
    out.push_back(c);
  }
  if (out.empty()) throw IoError("no sensors in " + path.string());
  return out;
}

void write_sensors_csv(const fs::path& path,
                       const std::vector<std::array<double, 3>>& coords) {
  std::ostringstream os;
  os.precision(17);
  os << "x0,x1,x2\n";
  for (const auto& c : coords) os << c[0] << "," << c[1] << "," << c[2] << "\n";
  write_text(path, os.str());
}

MapsBundle load_maps(const Json& cfg, bool need_p0) {
  const std::string dir_s = cfg.at("io").at("maps_dir").get<std::string>();
  if (dir_s.empty()) throw ConfigError("io.maps_dir is required");
  const fs::path dir = dir_s;
  MapsBundle b;
  FieldData rho = read_map(dir / "rho.fld");
  b.geometry = grid_of(rho);
  b.maps.rho = std::move(rho.data);
  b.maps.cp = read_map(dir / "cp.fld").data;
  b.maps.cs = read_map(dir / "cs.fld").data;
  b.maps.a0p_db = read_map(dir / "alpha0p.fld").data;
  b.maps.a0s_db = read_map(dir / "alpha0s.fld").data;
  b.maps.y = cfg.at("phantom").at("y").get<double>();
  const std::size_t n = b.geometry.npoints();
  if (b.maps.cp.size() != n || b.maps.cs.size() != n ||
      b.maps.a0p_db.size() != n || b.maps.a0s_db.size() != n)
    throw ShapeError("map files disagree on grid shape");
  if (need_p0) {
    b.p0 = read_map(dir / "p0.fld").data;
    if (b.p0.size() != n) throw ShapeError("p0 file disagrees on grid shape");
  }
  b.sensors = read_sensors_csv(dir / "sensors.csv");
  return b;
}

TimeSeries read_data_file(const fs::path& path) {
  FieldData fd = read_map(path);
  if (fd.rank != 2) throw ShapeError("sensor data file must be rank 2");
  TimeSeries ts;
  ts.ns = static_cast<int>(fd.n[0]);
  ts.nt = static_cast<int>(fd.n[1]);
  ts.dt = fd.dx[1];
  if (!(ts.dt > 0)) throw ShapeError("sensor data file has no time step");
  ts.data = std::move(fd.data);
  return ts;
}

// Linear interpolation in time onto (nt, dt); evaluation beyond the recorded
// window clamps to the last sample.
TimeSeries resample_time(const TimeSeries& in, int nt, double dt) {
  TimeSeries out;
  out.ns = in.ns;
  out.nt = nt;
  out.dt = dt;
  out.data.resize(static_cast<std::size_t>(in.ns) * nt);
  for (int s = 0; s < in.ns; ++s) {
    for (int k = 0; k < nt; ++k) {
      double u = k * dt / in.dt;
      u = std::min(std::max(u, 0.0), double(in.nt - 1));
      const int base = std::min(int(u), in.nt - 2);
      const double w = u - base;
      out.at(s, k) = (1.0 - w) * in.at(s, base) + w * in.at(s, base + 1);
    }
  }
  return out;
}

double opt_snr(const Json& cfg, const char* key) {
  const Json& v = cfg.at("noise").at(key);
  if (v.is_null()) return std::numeric_limits<double>::infinity();
  return v.get<double>();
}

CommandOutcome cmd_phantom(const Json& cfg) {
  const fs::path dir = make_out_dir(cfg);
  const Json& gj = cfg.at("grid");
  const int d = gj.at("d").get<int>();
  std::array<int, 3> n{1, 1, 1};
  std::array<double, 3> dx{0, 0, 0};
  const auto& nj = gj.at("n");
  const auto& ej = gj.at("extent");
  for (int a = 0; a < d; ++a) {
    n[a] = nj.at(a).get<int>();
    if (n[a] < 1) throw ConfigError("grid.n entries must be positive");
    dx[a] = ej.at(a).get<double>() / n[a];
  }
  PhantomSpec spec = phantom_spec_from(cfg);
  // nt=2 placeholder: the phantom only needs geometry
  Grid g = make_grid(d, n, dx, 2, gj.at("cfl").get<double>(),
                     std::max(spec.tissue_cp, spec.skull_cp));
  Phantom ph = make_phantom(spec, g);
  write_map(dir / "rho.fld", g, ph.maps.rho, "rho");
  write_map(dir / "cp.fld", g, ph.maps.cp, "cp");
  write_map(dir / "cs.fld", g, ph.maps.cs, "cs");
  write_map(dir / "alpha0p.fld", g, ph.maps.a0p_db, "alpha0p_db");
  write_map(dir / "alpha0s.fld", g, ph.maps.a0s_db, "alpha0s_db");
  write_map(dir / "p0.fld", g, ph.p0, "p0");
  write_sensors_csv(dir / "sensors.csv", ph.sensors);
  echo_config(dir, cfg);
  std::ostringstream msg;
  msg << "phantom: wrote maps, p0 and " << ph.sensors.size()
      << " sensors to " << dir.string();
  return {0, msg.str()};
}

CommandOutcome cmd_simulate(const Json& cfg) {
  const fs::path dir = make_out_dir(cfg);
  MapsBundle b = load_maps(cfg, true);
  const std::uint64_t seed = cfg.at("seed").get<std::uint64_t>();

  const double map_snr = opt_snr(cfg, "map_snr_db");
  if (!std::isinf(map_snr))
    b.maps = add_map_noise(b.maps, phantom_spec_from(cfg), map_snr,
                           seed + 1000);

  auto pr = assemble_problem(cfg, b.geometry, b.maps, b.sensors, 0);
  ForwardSolver fwd(pr->grid, pr->medium, pr->pml, *pr->ops);
  RunOptions opts;
  opts.snapshot_stride = cfg.at("io").at("snapshot_stride").get<int>();
  if (opts.snapshot_stride > 0) {
    const Grid& g = pr->grid;
    opts.snapshot_cb = [&dir, &g](int step, const Field& p) {
      char name[32];
      std::snprintf(name, sizeof(name), "p_%06d.fld", step);
      write_map(dir / name, g, p, "pressure");
    };
  }
  TimeSeries ts = fwd.run(b.p0, *pr->sensors, opts);

  const double data_snr = opt_snr(cfg, "data_snr_db");
  if (!std::isinf(data_snr)) add_awgn(ts.data, data_snr, seed);

  FieldData fd;
  fd.rank = 2;
  fd.n = {ts.ns, ts.nt, 1};
  fd.dx = {1.0, ts.dt, 0.0};
  fd.tag = "sensor_data";
  fd.data = ts.data;
  write_field((dir / "data.fld").string(), fd);

  Json echo = cfg;
  echo["grid"]["nt"] = pr->grid.nt;
  echo["grid"]["dt"] = pr->grid.dt;
  echo_config(dir, echo);
  std::ostringstream msg;
  msg << "simulate: " << ts.ns << " sensors x " << ts.nt
      << " steps (dt = " << pr->grid.dt << " s) -> "
      << (dir / "data.fld").string();
  return {0, msg.str()};
}

CommandOutcome cmd_adjoint_test(const Json& cfg) {
  const fs::path dir = make_out_dir(cfg);
  const Json& aj = cfg.at("adjoint_test");
  const auto grids = aj.at("grids").get<std::vector<int>>();
  if (grids.empty()) throw ConfigError("adjoint_test.grids must not be empty");
  auto rows = adjoint_equivalence_report(
      grids, aj.at("lossy").get<bool>(), cfg.at("seed").get<std::uint64_t>(),
      cfg.at("jobs").get<int>());
  const std::string csv = report_to_csv(rows);
  write_text(dir / "report.csv", csv);
  echo_config(dir, cfg);
  if (cfg.at("strict").get<bool>()) {
    const double threshold = aj.at("threshold").get<double>();
    for (const auto& r : rows)
      if (r.relative_error > threshold) {
        std::ostringstream msg;
        msg << csv << "adjoint-test: " << r.test << " at " << r.grid
            << " exceeds threshold (" << r.relative_error << " > " << threshold
            << ")";
        return {1, msg.str()};
      }
  }
  return {0, csv + "adjoint-test: report written to " +
                 (dir / "report.csv").string()};
}

CommandOutcome cmd_reconstruct(const Json& cfg) {
  const fs::path dir = make_out_dir(cfg);
  const std::string data_path = cfg.at("io").at("data").get<std::string>();
  if (data_path.empty()) throw ConfigError("io.data is required");
  MapsBundle b = load_maps(cfg, false);
  // scenario 2: reconstruct through contaminated parameter maps
  const double map_snr = opt_snr(cfg, "map_snr_db");
  if (!std::isinf(map_snr))
    b.maps = add_map_noise(b.maps, phantom_spec_from(cfg), map_snr,
                           cfg.at("seed").get<std::uint64_t>() + 1000);
  TimeSeries raw = read_data_file(data_path);
  if (raw.ns != static_cast<int>(b.sensors.size()))
    throw ShapeError("data sensor count does not match sensors.csv");

  // recon time step from the recon grid's CFL limit; step count preserves
  // the recorded duration
  double max_cp = 0.0, min_dx = b.geometry.dx[0];
  for (double v : b.maps.cp) max_cp = std::max(max_cp, v);
  for (int a = 1; a < b.geometry.d; ++a)
    min_dx = std::min(min_dx, b.geometry.dx[a]);
  const double dt = cfg.at("grid").at("cfl").get<double>() * min_dx / max_cp;
  const int nt = std::max(
      2, static_cast<int>(std::llround((raw.nt - 1) * raw.dt / dt)) + 1);

  auto pr = assemble_problem(cfg, b.geometry, b.maps, b.sensors, nt);
  TimeSeries data = resample_time(raw, pr->grid.nt, pr->grid.dt);

  // reference image for the RE column: explicit path, else the p0 shipped
  // alongside the recon maps
  Field ref;
  std::string ref_path = cfg.at("io").at("phantom").get<std::string>();
  if (ref_path.empty()) {
    const fs::path candidate =
        fs::path(cfg.at("io").at("maps_dir").get<std::string>()) / "p0.fld";
    if (fs::exists(candidate)) ref_path = candidate.string();
  }
  if (!ref_path.empty()) {
    FieldData fd = read_map(ref_path);
    ref = fd.count() == pr->grid.npoints()
              ? std::move(fd.data)
              : resample_linear(grid_of(fd), fd.data, pr->grid);
  }

  const Json& rj = cfg.at("recon");
  ReconConfig rc;
  rc.lambda_r = rj.at("lambda_r").get<double>();
  rc.step_factor = rj.at("step_factor").get<double>();
  rc.eps = rj.at("eps").get<double>();
  rc.max_iter = rj.at("max_iter").get<int>();
  rc.tv_iters = rj.at("tv_iters").get<int>();
  rc.tv_tol = rj.at("tv_tol").get<double>();
  rc.power_max_iter = rj.at("power_max_iter").get<int>();
  rc.power_tol = rj.at("power_tol").get<double>();
  rc.lf = rj.at("lf").get<double>();
  rc.seed = cfg.at("seed").get<std::uint64_t>();

  Reconstructor rec(pr->grid, pr->medium, pr->pml, *pr->ops, *pr->sensors);
  IstaResult res = rec.run(data, rc, ref.empty() ? nullptr : &ref);

  write_map(dir / "p_rec.fld", pr->grid, res.p, "p0_recon");
  std::ostringstream hist;
  hist.precision(17);
  hist << "k,objective,re_pct,seconds\n";
  for (const auto& r : res.history)
    hist << r.k << "," << r.objective << "," << r.re << "," << r.seconds
         << "\n";
  write_text(dir / "history.csv", hist.str());

  Json echo = cfg;
  echo["grid"]["nt"] = pr->grid.nt;
  echo["grid"]["dt"] = pr->grid.dt;
  echo["result"] = {{"stop_reason", res.stop_reason},
                    {"lf", res.lf},
                    {"iterations", res.history.size()}};
  echo_config(dir, echo);

  std::ostringstream msg;
  msg << "reconstruct: " << res.history.size() << " iterations ("
      << res.stop_reason << "), F = " << res.history.back().objective;
  if (!ref.empty()) msg << ", RE = " << res.history.back().re << "%";
  msg << " -> " << (dir / "p_rec.fld").string();
  return {0, msg.str()};
}

CommandOutcome cmd_metrics(const Json& cfg) {
  const fs::path dir = make_out_dir(cfg);
  const std::string rec_path = cfg.at("io").at("recon").get<std::string>();
  const std::string ph_path = cfg.at("io").at("phantom").get<std::string>();
  if (rec_path.empty() || ph_path.empty())
    throw ConfigError("metrics needs io.recon and io.phantom");
  FieldData rec = read_map(rec_path);
  FieldData ph = read_map(ph_path);
  Field ref = ph.count() == rec.count()
                  ? std::move(ph.data)
                  : resample_linear(grid_of(ph), ph.data, grid_of(rec));
  const double re = relative_error_pct(rec.data, ref);
  std::ostringstream csv;
  csv.precision(17);
  csv << "metric,value\nre_pct," << re << "\n";
  write_text(dir / "metrics.csv", csv.str());
  echo_config(dir, cfg);
  std::ostringstream msg;
  msg << "metrics: RE = " << re << "%";
  return {0, msg.str()};
}

}  // namespace

std::vector<std::string> command_names() {
  return {"phantom", "simulate", "adjoint-test", "reconstruct", "metrics"};
}

CommandOutcome run_command(const std::string& name, const Json& user_cfg) {
  try {
    const Json cfg = merge_config(default_config(), user_cfg);
    if (name == "phantom") return cmd_phantom(cfg);
    if (name == "simulate") return cmd_simulate(cfg);
    if (name == "adjoint-test") return cmd_adjoint_test(cfg);
    if (name == "reconstruct") return cmd_reconstruct(cfg);
    if (name == "metrics") return cmd_metrics(cfg);
    throw ConfigError("unknown command '" + name + "'");
  } catch (const NumericalError& e) {
    return {3, std::string("numerical abort: ") + e.what()};
  } catch (const Json::exception& e) {
    return {2, std::string("config error: ") + e.what()};
  } catch (const std::exception& e) {
    return {2, std::string("error: ") + e.what()};
  }
}

}  // namespace vispat
