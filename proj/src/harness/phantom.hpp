#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "core/medium.hpp"

namespace vispat {

enum class PhantomKind {
  SkullShell2D,  // semicircular shell between two radii, detectors on arc
  SkullSlab3D,   // horizontal slab near the top face, detector grid on top
  Disk,          // homogeneous tissue, disk-supported random-ish P0 pattern
};

// Scale-free phantom description. Lengths are fractions of the domain
// extent L = max_a(n_a dx_a) (detection radius) or of the detection radius
// (shell radii), so one spec serves paper scale and desk scale.
struct PhantomSpec {
  PhantomKind kind = PhantomKind::SkullShell2D;

  double detection_radius_frac = 0.40;  // r / L; paper uses 6.8/14 = 0.486
  double shell_inner_frac = 0.85;       // of r
  double shell_outer_frac = 0.95;       // of r
  int n_detectors = 64;                 // 2D: arc count; 3D: per-axis count

  // 3D slab: plane depths from the top face as fractions of the vertical
  // extent (paper: planes 3 and 10 of 40)
  double slab_top_frac = 0.075;
  double slab_bot_frac = 0.25;
  double detector_depth_frac = 0.0;  // detector plane depth from top face

  // soft tissue / skull parameters (paper section 7.1.2)
  double tissue_cp = 1500, tissue_cs = 0, tissue_rho = 1000;
  double tissue_a0p = 0.75, tissue_a0s = 0.5;  // dB MHz^-y cm^-1
  double skull_cp = 3000, skull_cs = 1500, skull_rho = 1850;
  double skull_a0p = 10, skull_a0s = 20;
  double y = 1.4;

  double p0_amplitude = 2.0;
};

struct Phantom {
  RawMaps maps;
  Field p0;
  std::vector<std::array<double, 3>> sensors;
};

Phantom make_phantom(const PhantomSpec& spec, const Grid& g);

// Disk-supported random initial pressure (the inner-product-test probe of
// section 7.1.3: "values at each point of the disk are chosen randomly").
Field random_disk_p0(const Grid& g, double radius_frac, std::uint64_t seed);

// Adds white Gaussian noise with power = signal_power / 10^(snr_db/10),
// signal power averaged over the whole array. Deterministic per seed.
void add_awgn(std::vector<double>& data, double snr_db, std::uint64_t seed);

// Scenario-2 map contamination: AWGN per map (rho, cp, cs) with independent
// seed streams; nonpositive rho/cp draws are replaced by the soft-tissue
// values and negative cs by zero to keep the medium physical.
RawMaps add_map_noise(const RawMaps& maps, const PhantomSpec& spec,
                      double snr_db, std::uint64_t seed);

// Multilinear resampling between grids sharing the centered physical
// coordinate convention; evaluation points outside the source extent clamp
// to the boundary value.
Field resample_linear(const Grid& src, const Field& f, const Grid& dst);

}  // namespace vispat
