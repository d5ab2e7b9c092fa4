#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace vispat {

// Self-describing binary container for gridded float64 data.
//
// Layout (little-endian):
//   bytes 0..7   magic "VISPATF\0"
//   u32          version (1)
//   u32          dtype (1 = float64)
//   u32          rank d (1..3)
//   u32          tag length L
//   L bytes      semantic tag (UTF-8)
//   per axis:    u64 N_i, f64 dx_i
//   payload:     N_0*...*N_{d-1} float64, row-major (last axis fastest)
//
// Round-trips bitwise: read(write(x)) == x.
struct FieldData {
  int rank = 0;
  std::array<std::int64_t, 3> n{1, 1, 1};
  std::array<double, 3> dx{0, 0, 0};
  std::string tag;
  std::vector<double> data;

  std::size_t count() const {
    std::size_t c = 1;
    for (int a = 0; a < rank; ++a) c *= static_cast<std::size_t>(n[a]);
    return c;
  }
};

void write_field(const std::string& path, const FieldData& f);
FieldData read_field(const std::string& path);

}  // namespace vispat
