#pragma once

#include <memory>
#include <string>

#include "json.hpp"

#include "core/medium.hpp"
#include "core/pml.hpp"
#include "core/sensors.hpp"
#include "core/spectral.hpp"
#include "harness/phantom.hpp"

namespace vispat {

using Json = nlohmann::json;

// Defaults for every command (single tree; commands read the sections they
// need). User values win, recursively.
Json default_config();
Json merge_config(const Json& defaults, const Json& user);

// Throws ConfigError on malformed JSON text.
Json parse_config(const std::string& text);

PhantomSpec phantom_spec_from(const Json& cfg);

// Fully assembled simulation setting. Solvers keep references into this
// object, so it is handed out behind a unique_ptr and must stay put.
struct Problem {
  Grid grid;
  Medium medium;
  PmlProfile pml;
  std::unique_ptr<SpectralOps> ops;
  std::unique_ptr<SensorArray> sensors;
};

// Assembles grid/medium/pml/operators/sensors from raw maps and sensor
// coordinates. nt == 0 selects the automatic travel-time-based step count.
std::unique_ptr<Problem> assemble_problem(
    const Json& cfg, const Grid& geometry, const RawMaps& maps,
    const std::vector<std::array<double, 3>>& sensor_coords, int nt_override);

}  // namespace vispat
