#include "core/field_io.hpp"

#include <cstring>
#include <fstream>

#include "core/common.hpp"

namespace vispat {

namespace {
constexpr char kMagic[8] = {'V', 'I', 'S', 'P', 'A', 'T', 'F', '\0'};
constexpr std::uint32_t kVersion = 1;
constexpr std::uint32_t kDtypeF64 = 1;

template <typename T>
void put(std::ofstream& os, const T& v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T get(std::ifstream& is) {
  T v;
  is.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!is) throw IoError("field file: truncated");
  return v;
}
}  // namespace

void write_field(const std::string& path, const FieldData& f) {
  if (f.rank < 1 || f.rank > 3) throw IoError("field file: rank must be 1..3");
  if (f.data.size() != f.count()) throw IoError("field file: payload size mismatch");
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("field file: cannot open for writing: " + path);
  os.write(kMagic, sizeof(kMagic));
  put(os, kVersion);
  put(os, kDtypeF64);
  put(os, static_cast<std::uint32_t>(f.rank));
  put(os, static_cast<std::uint32_t>(f.tag.size()));
  os.write(f.tag.data(), static_cast<std::streamsize>(f.tag.size()));
  for (int a = 0; a < f.rank; ++a) {
    put(os, static_cast<std::uint64_t>(f.n[a]));
    put(os, f.dx[a]);
  }
  os.write(reinterpret_cast<const char*>(f.data.data()),
           static_cast<std::streamsize>(f.data.size() * sizeof(double)));
  if (!os) throw IoError("field file: write failed: " + path);
}

FieldData read_field(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("field file: cannot open: " + path);
  char magic[8];
  is.read(magic, sizeof(magic));
  if (!is || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0)
    throw IoError("field file: bad magic: " + path);
  if (get<std::uint32_t>(is) != kVersion) throw IoError("field file: bad version");
  if (get<std::uint32_t>(is) != kDtypeF64) throw IoError("field file: bad dtype");
  FieldData f;
  f.rank = static_cast<int>(get<std::uint32_t>(is));
  if (f.rank < 1 || f.rank > 3) throw IoError("field file: bad rank");
  const auto taglen = get<std::uint32_t>(is);
  if (taglen > 4096) throw IoError("field file: tag too long");
  f.tag.resize(taglen);
  is.read(f.tag.data(), taglen);
  for (int a = 0; a < f.rank; ++a) {
    f.n[a] = static_cast<std::int64_t>(get<std::uint64_t>(is));
    f.dx[a] = get<double>(is);
    if (f.n[a] < 1) throw IoError("field file: bad axis length");
  }
  f.data.resize(f.count());
  is.read(reinterpret_cast<char*>(f.data.data()),
          static_cast<std::streamsize>(f.data.size() * sizeof(double)));
  if (!is) throw IoError("field file: truncated payload: " + path);
  return f;
}

}  // namespace vispat
