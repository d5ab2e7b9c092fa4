// Command-line front end. All functionality lives behind the C API in
// vispat.h; this file only assembles the JSON configuration (config file
// plus flag overrides, flags win) and maps the status code to the exit code.
#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "vispat.h"

namespace {

using Json = nlohmann::json;

struct CommonOpts {
  std::string config_file;
  std::string out_dir;
  std::optional<std::uint64_t> seed;
  std::optional<int> jobs;
  bool strict = false;
};

void add_common(CLI::App* cmd, CommonOpts& c) {
  cmd->add_option("-c,--config", c.config_file, "JSON configuration file");
  cmd->add_option("-o,--out", c.out_dir, "output directory");
  cmd->add_option("--seed", c.seed, "RNG seed");
  cmd->add_option("--jobs", c.jobs, "parallel trial workers");
  cmd->add_flag("--strict", c.strict, "nonzero exit on quality failure");
}

Json load_config(const CommonOpts& c) {
  Json cfg = Json::object();
  if (!c.config_file.empty()) {
    std::ifstream in(c.config_file);
    if (!in) {
      std::fprintf(stderr, "error: cannot open %s\n", c.config_file.c_str());
      std::exit(2);
    }
    try {
      in >> cfg;
    } catch (const Json::exception& e) {
      std::fprintf(stderr, "error: %s: %s\n", c.config_file.c_str(), e.what());
      std::exit(2);
    }
  }
  if (!c.out_dir.empty()) cfg["io"]["out_dir"] = c.out_dir;
  if (c.seed) cfg["seed"] = *c.seed;
  if (c.jobs) cfg["jobs"] = *c.jobs;
  if (c.strict) cfg["strict"] = true;
  return cfg;
}

int dispatch(const char* name, const Json& cfg) {
  const std::string text = cfg.dump();
  const int code = vispat_run(name, text.c_str());
  const char* msg = vispat_last_message();
  if (msg && *msg)
    std::fprintf(code == 0 ? stdout : stderr, "%s\n", msg);
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"photoacoustic wave simulation and TV-regularized inversion"};
  app.require_subcommand(1);

  // phantom
  CommonOpts ph_c;
  std::optional<int> ph_d, ph_n, ph_det;
  std::optional<std::string> ph_kind;
  auto* ph = app.add_subcommand("phantom", "rasterize a phantom configuration");
  add_common(ph, ph_c);
  ph->add_option("--dims", ph_d, "spatial dimensions (2 or 3)");
  ph->add_option("-n,--grid-size", ph_n, "points per axis");
  ph->add_option("--kind", ph_kind, "skull2d | skull3d | disk");
  ph->add_option("--detectors", ph_det, "detector count (per axis in 3D)");

  // simulate
  CommonOpts si_c;
  std::string si_maps;
  std::optional<int> si_nt, si_stride;
  std::optional<double> si_cfl, si_snr, si_map_snr;
  auto* si = app.add_subcommand("simulate", "run the forward solver");
  add_common(si, si_c);
  si->add_option("--maps", si_maps, "directory with maps/p0/sensors")
      ->required();
  si->add_option("--nt", si_nt, "time steps (0 = automatic)");
  si->add_option("--cfl", si_cfl, "CFL number");
  si->add_option("--snr", si_snr, "sensor-data AWGN SNR in dB");
  si->add_option("--map-snr", si_map_snr, "parameter-map AWGN SNR in dB");
  si->add_option("--snapshot-stride", si_stride, "pressure snapshot stride");

  // adjoint-test
  CommonOpts at_c;
  std::vector<int> at_grids;
  bool at_lossy = false;
  std::optional<double> at_threshold;
  auto* at = app.add_subcommand("adjoint-test",
                                "inner-product and equivalence report");
  add_common(at, at_c);
  at->add_option("--grids", at_grids, "grid sizes to sweep");
  at->add_flag("--lossy", at_lossy, "use the lossy skull medium");
  at->add_option("--threshold", at_threshold, "strict-mode error threshold");

  // reconstruct
  CommonOpts re_c;
  std::string re_maps, re_data, re_ref;
  std::optional<double> re_lambda, re_step, re_eps, re_lf, re_map_snr;
  std::optional<int> re_maxit;
  auto* re = app.add_subcommand("reconstruct", "TV-regularized ISTA inversion");
  add_common(re, re_c);
  re->add_option("--maps", re_maps, "directory with recon-grid maps")
      ->required();
  re->add_option("--data", re_data, "sensor data file")->required();
  re->add_option("--reference", re_ref, "ground-truth p0 for the RE column");
  re->add_option("--lambda", re_lambda, "TV weight");
  re->add_option("--step-factor", re_step, "step = factor / L_f");
  re->add_option("--eps", re_eps, "relative objective-decrease tolerance");
  re->add_option("--max-iter", re_maxit, "iteration cap");
  re->add_option("--lf", re_lf, "known Lipschitz constant (skip estimation)");
  re->add_option("--map-snr", re_map_snr,
                 "contaminate the recon maps with AWGN of this SNR (dB)");

  // metrics
  CommonOpts me_c;
  std::string me_rec, me_ph;
  auto* me = app.add_subcommand("metrics", "relative error of a reconstruction");
  add_common(me, me_c);
  me->add_option("--recon", me_rec, "reconstructed field file")->required();
  me->add_option("--reference", me_ph, "ground-truth field file")->required();

  CLI11_PARSE(app, argc, argv);

  if (ph->parsed()) {
    Json cfg = load_config(ph_c);
    if (ph_d) cfg["grid"]["d"] = *ph_d;
    if (ph_n) {
      const int d = cfg.value("grid", Json::object()).value("d", ph_d ? *ph_d : 2);
      cfg["grid"]["n"] = d == 3 ? Json{*ph_n, *ph_n, *ph_n}
                                : Json{*ph_n, *ph_n, 1};
    }
    if (ph_kind) cfg["phantom"]["kind"] = *ph_kind;
    if (ph_det) cfg["phantom"]["n_detectors"] = *ph_det;
    return dispatch("phantom", cfg);
  }
  if (si->parsed()) {
    Json cfg = load_config(si_c);
    cfg["io"]["maps_dir"] = si_maps;
    if (si_nt) cfg["grid"]["nt"] = *si_nt;
    if (si_cfl) cfg["grid"]["cfl"] = *si_cfl;
    if (si_snr) cfg["noise"]["data_snr_db"] = *si_snr;
    if (si_map_snr) cfg["noise"]["map_snr_db"] = *si_map_snr;
    if (si_stride) cfg["io"]["snapshot_stride"] = *si_stride;
    return dispatch("simulate", cfg);
  }
  if (at->parsed()) {
    Json cfg = load_config(at_c);
    if (!at_grids.empty()) cfg["adjoint_test"]["grids"] = at_grids;
    if (at_lossy) cfg["adjoint_test"]["lossy"] = true;
    if (at_threshold) cfg["adjoint_test"]["threshold"] = *at_threshold;
    return dispatch("adjoint-test", cfg);
  }
  if (re->parsed()) {
    Json cfg = load_config(re_c);
    cfg["io"]["maps_dir"] = re_maps;
    cfg["io"]["data"] = re_data;
    if (!re_ref.empty()) cfg["io"]["phantom"] = re_ref;
    if (re_lambda) cfg["recon"]["lambda_r"] = *re_lambda;
    if (re_step) cfg["recon"]["step_factor"] = *re_step;
    if (re_eps) cfg["recon"]["eps"] = *re_eps;
    if (re_maxit) cfg["recon"]["max_iter"] = *re_maxit;
    if (re_lf) cfg["recon"]["lf"] = *re_lf;
    if (re_map_snr) cfg["noise"]["map_snr_db"] = *re_map_snr;
    return dispatch("reconstruct", cfg);
  }
  if (me->parsed()) {
    Json cfg = load_config(me_c);
    cfg["io"]["recon"] = me_rec;
    cfg["io"]["phantom"] = me_ph;
    return dispatch("metrics", cfg);
  }
  return 2;
}
