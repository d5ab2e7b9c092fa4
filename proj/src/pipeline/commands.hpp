#pragma once

#include <string>
#include <vector>

#include "pipeline/config.hpp"

namespace vispat {

struct CommandOutcome {
  int code = 0;  // 0 ok, 1 strict-mode quality failure, 2 config, 3 numerical
  std::string message;
};

// Commands: phantom, simulate, adjoint-test, reconstruct, metrics.
// user_cfg is merged over default_config(); every command echoes its
// effective configuration to <out_dir>/config.json. Exceptions are mapped
// to exit codes here and never escape.
CommandOutcome run_command(const std::string& name, const Json& user_cfg);

std::vector<std::string> command_names();

}  // namespace vispat
