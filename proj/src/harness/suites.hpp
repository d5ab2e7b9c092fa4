#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "core/medium.hpp"
#include "core/pml.hpp"
#include "core/sensors.hpp"
#include "core/spectral.hpp"

namespace vispat {

enum class AdjointPath { Discrete, Analytic };

struct SuiteStats {
  double mean = 0, min = 0, max = 0;
  std::vector<double> trials;
};

// Inner-product test of section 7.1.3: random sensor data and random
// disk-supported P0, relative discrepancy of <H S P0, P> vs <P0, S*H* P>.
// Trials run in parallel on independent solver instances when jobs > 1.
SuiteStats inner_product_suite(const Grid& g, const Medium& med,
                               const PmlProfile& pml, const SpectralOps& ops,
                               const SensorArray& sensors, int trials,
                               std::uint64_t seed, AdjointPath path,
                               double disk_radius_frac = 0.32, int jobs = 1);

struct ReportRow {
  int grid;
  std::string test;
  double relative_error;
};

// Cross-checks per grid size on the default 2D skull configuration:
//   tstar_dot            <Tx,y> vs <x,T*y>, random stacked fields
//   lemma2_dot           full-run inner-product test, discrete adjoint
//   analytic_dot         full-run inner-product test, section 4.2 solver
//   analytic_vs_discrete relative L2 distance of the two adjoint outputs
std::vector<ReportRow> adjoint_equivalence_report(
    const std::vector<int>& grid_sizes, bool lossy, std::uint64_t seed,
    int jobs = 1);

std::string report_to_csv(const std::vector<ReportRow>& rows);

}  // namespace vispat
