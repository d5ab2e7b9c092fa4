#include "vispat.h"

#include <cstring>
#include <string>

#include "core/field_io.hpp"
#include "pipeline/commands.hpp"

extern "C" {

struct vispat_field {
  vispat::FieldData fd;
};

}  // extern "C"

namespace {

thread_local std::string g_message;

int set_message(int code, const std::string& msg) {
  g_message = msg;
  return code;
}

// Maps internal exceptions to status codes; nothing may cross the boundary.
template <typename Fn>
int guarded(Fn&& fn) {
  try {
    return fn();
  } catch (const vispat::NumericalError& e) {
    return set_message(VISPAT_NUMERICAL, e.what());
  } catch (const std::exception& e) {
    return set_message(VISPAT_CONFIG, e.what());
  } catch (...) {
    return set_message(VISPAT_CONFIG, "unknown error");
  }
}

}  // namespace

extern "C" {

int vispat_run(const char* command, const char* config_json) {
  return guarded([&]() -> int {
    if (!command) return set_message(VISPAT_CONFIG, "null command");
    vispat::Json cfg = vispat::Json::object();
    if (config_json && *config_json)
      cfg = vispat::parse_config(config_json);
    vispat::CommandOutcome out = vispat::run_command(command, cfg);
    return set_message(out.code, out.message);
  });
}

const char* vispat_last_message(void) { return g_message.c_str(); }

const char* vispat_commands(void) {
  static const std::string names = [] {
    vispat::Json j = vispat::command_names();
    return j.dump();
  }();
  return names.c_str();
}

vispat_field* vispat_field_read(const char* path) {
  vispat_field* out = nullptr;
  guarded([&]() -> int {
    if (!path) return set_message(VISPAT_CONFIG, "null path");
    auto* f = new vispat_field{vispat::read_field(path)};
    out = f;
    return set_message(VISPAT_OK, "");
  });
  return out;
}

int vispat_field_write(const char* path, const vispat_field* f) {
  return guarded([&]() -> int {
    if (!path || !f) return set_message(VISPAT_CONFIG, "null argument");
    vispat::write_field(path, f->fd);
    return set_message(VISPAT_OK, "");
  });
}

vispat_field* vispat_field_create(int rank, const int64_t* n,
                                  const double* dx, const char* tag) {
  vispat_field* out = nullptr;
  guarded([&]() -> int {
    if (rank < 1 || rank > 3 || !n || !dx)
      return set_message(VISPAT_CONFIG, "bad field shape");
    auto* f = new vispat_field;
    f->fd.rank = rank;
    for (int a = 0; a < rank; ++a) {
      f->fd.n[a] = n[a];
      f->fd.dx[a] = dx[a];
    }
    f->fd.tag = tag ? tag : "";
    f->fd.data.assign(f->fd.count(), 0.0);
    out = f;
    return set_message(VISPAT_OK, "");
  });
  return out;
}

int vispat_field_rank(const vispat_field* f) { return f ? f->fd.rank : 0; }

int64_t vispat_field_size(const vispat_field* f, int axis) {
  if (!f || axis < 0 || axis >= f->fd.rank) return 0;
  return f->fd.n[axis];
}

double vispat_field_spacing(const vispat_field* f, int axis) {
  if (!f || axis < 0 || axis >= f->fd.rank) return 0.0;
  return f->fd.dx[axis];
}

const char* vispat_field_tag(const vispat_field* f) {
  return f ? f->fd.tag.c_str() : "";
}

size_t vispat_field_count(const vispat_field* f) {
  return f ? f->fd.count() : 0;
}

double* vispat_field_data(vispat_field* f) {
  return f ? f->fd.data.data() : nullptr;
}

void vispat_field_free(vispat_field* f) { delete f; }

}  // extern "C"
