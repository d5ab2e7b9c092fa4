#include "harness/phantom.hpp"

#include <cmath>
#include <random>

namespace vispat {

namespace {

double domain_extent(const Grid& g) {
  double ext = 0.0;
  for (int a = 0; a < g.d; ++a) ext = std::max(ext, g.n[a] * g.dx[a]);
  return ext;
}

// smooth bump: exp(-(dist/sigma)^2)
struct Blob {
  double cy, cx, cz;  // fractions of the detection radius from the center
  double sigma;       // fraction of the detection radius
  double amp;
};

// vessel-ish arrangement of smooth blobs, max amplitude 1 before scaling
const Blob kBlobs[] = {
    {-0.25, 0.00, 0.0, 0.16, 1.00}, {-0.05, -0.35, 0.0, 0.11, 0.80},
    {0.10, 0.30, 0.0, 0.13, 0.90},  {0.30, -0.10, 0.0, 0.09, 0.70},
    {-0.45, 0.25, 0.0, 0.08, 0.60},
};

}  // namespace

Phantom make_phantom(const PhantomSpec& spec, const Grid& g) {
  const std::size_t n = g.npoints();
  const double L = domain_extent(g);
  const double r = spec.detection_radius_frac * L;
  if (spec.shell_inner_frac > spec.shell_outer_frac)
    throw ConfigError("phantom: shell inner radius exceeds outer radius");
  if (spec.n_detectors < 1) throw ConfigError("phantom: need >= 1 detector");

  Phantom ph;
  ph.maps.rho.assign(n, spec.tissue_rho);
  ph.maps.cp.assign(n, spec.tissue_cp);
  ph.maps.cs.assign(n, spec.tissue_cs);
  ph.maps.a0p_db.assign(n, spec.tissue_a0p);
  ph.maps.a0s_db.assign(n, spec.tissue_a0s);
  ph.maps.y = spec.y;
  ph.p0.assign(n, 0.0);

  auto set_skull = [&](std::size_t idx) {
    ph.maps.rho[idx] = spec.skull_rho;
    ph.maps.cp[idx] = spec.skull_cp;
    ph.maps.cs[idx] = spec.skull_cs;
    ph.maps.a0p_db[idx] = spec.skull_a0p;
    ph.maps.a0s_db[idx] = spec.skull_a0s;
  };

  if (spec.kind == PhantomKind::SkullShell2D) {
    if (g.d != 2) throw ConfigError("phantom: 2D skull shell needs d=2");
    const double ri = spec.shell_inner_frac * r;
    const double ro = spec.shell_outer_frac * r;
    if (2.0 * ro > std::min(g.n[0] * g.dx[0], g.n[1] * g.dx[1]))
      throw ConfigError("phantom: skull shell exceeds grid extent");
    std::size_t idx = 0;
    for (int z0 = 0; z0 < g.n[0]; ++z0) {
      const double y = g.coord(0, z0);  // axis 0 vertical, top = negative
      for (int z1 = 0; z1 < g.n[1]; ++z1, ++idx) {
        const double x = g.coord(1, z1);
        const double dist = std::hypot(y, x);
        if (y <= 0.0 && dist >= ri && dist <= ro) set_skull(idx);
        // initial pressure blobs, supported inside the shell
        double v = 0.0;
        for (const Blob& b : kBlobs) {
          const double dy = (y - b.cy * r) / (b.sigma * r);
          const double dxx = (x - b.cx * r) / (b.sigma * r);
          v += b.amp * std::exp(-(dy * dy + dxx * dxx));
        }
        if (dist < 0.8 * ri) ph.p0[idx] = v;
      }
    }
    // detectors: evenly over pi radians on the top half-circle
    for (int s = 0; s < spec.n_detectors; ++s) {
      const double th = spec.n_detectors == 1
                            ? 0.5 * M_PI
                            : M_PI * s / (spec.n_detectors - 1);
      ph.sensors.push_back({-r * std::sin(th), r * std::cos(th), 0.0});
    }
  } else if (spec.kind == PhantomKind::SkullSlab3D) {
    if (g.d != 3) throw ConfigError("phantom: 3D skull slab needs d=3");
    const double vert = g.n[2] * g.dx[2];  // axis 2 vertical, top = negative
    const double top = -0.5 * (g.n[2] - 1) * g.dx[2];
    const double z_top = top + spec.slab_top_frac * vert;
    const double z_bot = top + spec.slab_bot_frac * vert;
    if (spec.slab_bot_frac > 1.0)
      throw ConfigError("phantom: skull slab exceeds grid extent");
    std::size_t idx = 0;
    for (int z0 = 0; z0 < g.n[0]; ++z0) {
      const double y = g.coord(0, z0);
      for (int z1 = 0; z1 < g.n[1]; ++z1) {
        const double x = g.coord(1, z1);
        for (int z2 = 0; z2 < g.n[2]; ++z2, ++idx) {
          const double z = g.coord(2, z2);
          if (z >= z_top && z <= z_bot) set_skull(idx);
          if (z > z_bot) {  // soft tissue below the skull
            double v = 0.0;
            for (const Blob& b : kBlobs) {
              const double dy = (y - b.cy * r) / (b.sigma * r);
              const double dxx = (x - b.cx * r) / (b.sigma * r);
              const double dz =
                  (z - (z_bot + 0.3 * (top + vert - z_bot))) / (b.sigma * r);
              v += b.amp * std::exp(-(dy * dy + dxx * dxx + dz * dz));
            }
            ph.p0[idx] = v;
          }
        }
      }
    }
    // detector grid on the top face
    const double zdet = top + spec.detector_depth_frac * vert;
    const int nd = spec.n_detectors;
    for (int a = 0; a < nd; ++a) {
      for (int b = 0; b < nd; ++b) {
        const double fy = nd == 1 ? 0.0 : (a / double(nd - 1) - 0.5);
        const double fx = nd == 1 ? 0.0 : (b / double(nd - 1) - 0.5);
        ph.sensors.push_back(
            {1.6 * r * fy, 1.6 * r * fx, zdet});
      }
    }
  } else {  // Disk: homogeneous tissue + blob pattern in a disk
    std::size_t idx = 0;
    for (int z0 = 0; z0 < g.n[0]; ++z0) {
      for (int z1 = 0; z1 < g.n[1]; ++z1) {
        for (int z2 = 0; z2 < g.n[2]; ++z2, ++idx) {
          const double y = g.coord(0, z0);
          const double x = g.coord(1, z1);
          if (std::hypot(y, x) < 0.8 * r) {
            double v = 0.0;
            for (const Blob& b : kBlobs) {
              const double dy = (y - b.cy * r) / (b.sigma * r);
              const double dxx = (x - b.cx * r) / (b.sigma * r);
              v += b.amp * std::exp(-(dy * dy + dxx * dxx));
            }
            ph.p0[idx] = v;
          }
        }
      }
    }
    for (int s = 0; s < spec.n_detectors; ++s) {
      const double th = spec.n_detectors == 1
                            ? 0.5 * M_PI
                            : M_PI * s / (spec.n_detectors - 1);
      ph.sensors.push_back({-r * std::sin(th), r * std::cos(th), 0.0});
    }
  }

  // scale P0 to the requested maximum amplitude
  double mx = 0.0;
  for (double v : ph.p0) mx = std::max(mx, v);
  if (mx > 0.0)
    for (double& v : ph.p0) v *= spec.p0_amplitude / mx;
  return ph;
}

Field random_disk_p0(const Grid& g, double radius_frac, std::uint64_t seed) {
  const double r = radius_frac * domain_extent(g);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  Field p0(g.npoints(), 0.0);
  std::size_t idx = 0;
  for (int z0 = 0; z0 < g.n[0]; ++z0) {
    for (int z1 = 0; z1 < g.n[1]; ++z1) {
      for (int z2 = 0; z2 < g.n[2]; ++z2, ++idx) {
        double dist;
        if (g.d == 2)
          dist = std::hypot(g.coord(0, z0), g.coord(1, z1));
        else
          dist = std::sqrt(std::pow(g.coord(0, z0), 2) +
                           std::pow(g.coord(1, z1), 2) +
                           std::pow(g.coord(2, z2), 2));
        const double v = uni(rng);  // draw unconditionally: grid-stable order
        if (dist < r) p0[idx] = v;
      }
    }
  }
  return p0;
}

void add_awgn(std::vector<double>& data, double snr_db, std::uint64_t seed) {
  if (data.empty()) return;
  if (std::isinf(snr_db)) return;  // noise disabled
  double power = 0.0;
  for (double v : data) power += v * v;
  power /= data.size();
  if (power == 0.0) throw ConfigError("add_awgn: zero-power signal");
  const double sigma = std::sqrt(power / std::pow(10.0, snr_db / 10.0));
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, sigma);
  for (double& v : data) v += gauss(rng);
}

RawMaps add_map_noise(const RawMaps& maps, const PhantomSpec& spec,
                      double snr_db, std::uint64_t seed) {
  RawMaps out = maps;
  add_awgn(out.rho, snr_db, seed);
  add_awgn(out.cp, snr_db, seed + 1);
  add_awgn(out.cs, snr_db, seed + 2);
  // only nonpositive draws are clamped (to the soft-tissue value); at 30 dB
  // SNR this never fires, it just guards the medium validation
  for (double& v : out.rho)
    if (v <= 0.0) v = spec.tissue_rho;
  for (double& v : out.cp)
    if (v <= 0.0) v = spec.tissue_cp;
  for (double& v : out.cs)
    if (v < 0.0) v = 0.0;
  return out;
}

Field resample_linear(const Grid& src, const Field& f, const Grid& dst) {
  if (f.size() != src.npoints())
    throw ShapeError("resample: field size mismatch");
  if (src.d != dst.d) throw ConfigError("resample: dimensionality mismatch");
  Field out(dst.npoints());
  const std::size_t s2 = 1;
  const std::size_t s1 = static_cast<std::size_t>(src.n[2]);
  const std::size_t s0 = static_cast<std::size_t>(src.n[1]) * src.n[2];
  const std::size_t stride[3] = {s0, s1, s2};
  std::size_t idx = 0;
  for (int z0 = 0; z0 < dst.n[0]; ++z0) {
    for (int z1 = 0; z1 < dst.n[1]; ++z1) {
      for (int z2 = 0; z2 < dst.n[2]; ++z2, ++idx) {
        const int zi[3] = {z0, z1, z2};
        int base[3] = {0, 0, 0};
        double w[3] = {0.0, 0.0, 0.0};
        for (int a = 0; a < src.d; ++a) {
          // fractional source index of the destination coordinate
          double u = dst.coord(a, zi[a]) / src.dx[a] + 0.5 * (src.n[a] - 1);
          u = std::min(std::max(u, 0.0), double(src.n[a] - 1));
          base[a] = std::min(int(u), src.n[a] - 2);
          w[a] = u - base[a];
        }
        double v = 0.0;
        const int corners = 1 << src.d;
        for (int c = 0; c < corners; ++c) {
          double wc = 1.0;
          std::size_t off = 0;
          for (int a = 0; a < src.d; ++a) {
            const int bit = (c >> a) & 1;
            wc *= bit ? w[a] : 1.0 - w[a];
            off += stride[a] * (base[a] + bit);
          }
          v += wc * f[off];
        }
        out[idx] = v;
      }
    }
  }
  return out;
}

}  // namespace vispat
