#include "pipeline/config.hpp"

#include <algorithm>
#include <cmath>

namespace vispat {

Json default_config() {
  return Json{
      {"seed", 1},
      {"jobs", 1},
      {"strict", false},
      {"grid",
       {{"d", 2},
        {"n", {128, 128, 1}},
        {"extent", {0.14, 0.14, 0.14}},
        {"nt", 0},  // 0 = derive from the slowest-wave travel time
        {"cfl", 0.3}}},
      {"pml", {{"thickness", 8}, {"alpha_max", 2.0}, {"taper_power", 4}}},
      {"phantom",
       {{"kind", "skull2d"},
        {"detection_radius_frac", 0.40},
        {"shell_inner_frac", 0.85},
        {"shell_outer_frac", 0.95},
        {"n_detectors", 64},
        {"slab_top_frac", 0.075},
        {"slab_bot_frac", 0.25},
        {"detector_depth_frac", 0.0},
        {"p0_amplitude", 2.0},
        {"y", 1.4},
        {"tissue_cp", 1500.0},
        {"tissue_cs", 0.0},
        {"tissue_rho", 1000.0},
        {"tissue_a0p", 0.75},
        {"tissue_a0s", 0.5},
        {"skull_cp", 3000.0},
        {"skull_cs", 1500.0},
        {"skull_rho", 1850.0},
        {"skull_a0p", 10.0},
        {"skull_a0s", 20.0}}},
      {"noise", {{"data_snr_db", nullptr}, {"map_snr_db", nullptr}}},
      {"recon",
       {{"lambda_r", 1e-2},
        {"step_factor", 1.8},
        {"eps", 1e-4},
        {"max_iter", 100},
        {"tv_iters", 60},
        {"tv_tol", 1e-8},
        {"power_max_iter", 30},
        {"power_tol", 1e-3},
        {"lf", 0.0}}},
      {"adjoint_test",
       {{"grids", {32}}, {"lossy", false}, {"threshold", 1e-3}}},
      {"io",
       {{"out_dir", "out"},
        {"maps_dir", ""},
        {"data", ""},
        {"phantom", ""},
        {"recon", ""},
        {"snapshot_stride", 0}}},
  };
}

Json merge_config(const Json& defaults, const Json& user) {
  Json out = defaults;
  if (!user.is_object()) return user.is_null() ? out : user;
  for (auto it = user.begin(); it != user.end(); ++it) {
    if (it.value().is_object() && out.contains(it.key()) &&
        out[it.key()].is_object())
      out[it.key()] = merge_config(out[it.key()], it.value());
    else
      out[it.key()] = it.value();
  }
  return out;
}

Json parse_config(const std::string& text) {
  try {
    return Json::parse(text);
  } catch (const Json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
}

PhantomSpec phantom_spec_from(const Json& cfg) {
  const Json& p = cfg.at("phantom");
  PhantomSpec s;
  const std::string kind = p.at("kind").get<std::string>();
  if (kind == "skull2d")
    s.kind = PhantomKind::SkullShell2D;
  else if (kind == "skull3d")
    s.kind = PhantomKind::SkullSlab3D;
  else if (kind == "disk")
    s.kind = PhantomKind::Disk;
  else
    throw ConfigError("phantom: unknown kind '" + kind + "'");
  s.detection_radius_frac = p.at("detection_radius_frac").get<double>();
  s.shell_inner_frac = p.at("shell_inner_frac").get<double>();
  s.shell_outer_frac = p.at("shell_outer_frac").get<double>();
  s.n_detectors = p.at("n_detectors").get<int>();
  s.slab_top_frac = p.at("slab_top_frac").get<double>();
  s.slab_bot_frac = p.at("slab_bot_frac").get<double>();
  s.detector_depth_frac = p.at("detector_depth_frac").get<double>();
  s.p0_amplitude = p.at("p0_amplitude").get<double>();
  s.y = p.at("y").get<double>();
  s.tissue_cp = p.at("tissue_cp").get<double>();
  s.tissue_cs = p.at("tissue_cs").get<double>();
  s.tissue_rho = p.at("tissue_rho").get<double>();
  s.tissue_a0p = p.at("tissue_a0p").get<double>();
  s.tissue_a0s = p.at("tissue_a0s").get<double>();
  s.skull_cp = p.at("skull_cp").get<double>();
  s.skull_cs = p.at("skull_cs").get<double>();
  s.skull_rho = p.at("skull_rho").get<double>();
  s.skull_a0p = p.at("skull_a0p").get<double>();
  s.skull_a0s = p.at("skull_a0s").get<double>();
  return s;
}

std::unique_ptr<Problem> assemble_problem(
    const Json& cfg, const Grid& geometry, const RawMaps& maps,
    const std::vector<std::array<double, 3>>& sensor_coords, int nt_override) {
  auto pr = std::make_unique<Problem>();

  const double cfl = cfg.at("grid").at("cfl").get<double>();
  double max_cp = 0.0;
  for (double v : maps.cp) max_cp = std::max(max_cp, v);
  if (!(max_cp > 0)) throw ConfigError("assemble: sound-speed map is empty");

  int nt = nt_override > 0 ? nt_override : cfg.at("grid").at("nt").get<int>();
  const double dt = cfl * *std::min_element(geometry.dx.begin(),
                                            geometry.dx.begin() + geometry.d) /
                    max_cp;
  if (nt <= 0) {
    // travel-time heuristic: 1.4x the longest extent at the slowest
    // compressional speed present in the map, enough for every
    // source-to-detector path including late arrivals through the skull
    double min_cp = max_cp;
    for (double v : maps.cp) min_cp = std::min(min_cp, v);
    double ext = 0.0;
    for (int a = 0; a < geometry.d; ++a)
      ext = std::max(ext, geometry.n[a] * geometry.dx[a]);
    nt = static_cast<int>(std::ceil(1.4 * ext / (min_cp * dt)));
  }

  pr->grid = make_grid(geometry.d, geometry.n, geometry.dx, nt, cfl, max_cp);
  pr->medium = derive_coefficients(maps, pr->grid);
  pr->grid.c0p = pr->medium.c0p;
  pr->grid.c0s = pr->medium.c0s;
  const Json& pj = cfg.at("pml");
  pr->pml = build_pml(pr->grid, pj.at("thickness").get<int>(),
                      pj.at("alpha_max").get<double>(),
                      pj.at("taper_power").get<int>());
  pr->ops = std::make_unique<SpectralOps>(pr->grid, pr->medium.y);
  pr->sensors = std::make_unique<SensorArray>(pr->grid, sensor_coords);
  return pr;
}

}  // namespace vispat
