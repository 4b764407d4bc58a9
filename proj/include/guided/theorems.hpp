#pragma once

#include <string>
#include <vector>

#include "guided/graph.hpp"
#include "guided/numerics.hpp"
#include "guided/spectra.hpp"

namespace guided {

struct BandRecord {
  std::size_t j = 0;      // 1-based band index
  Interval claimed;
  Interval computed;
  double margin_lo = 0.0;
  double margin_hi = 0.0;
  bool pass = false;
  std::string notes;
};

/// Structured outcome of one verified bound: per-band records with measured
/// margins plus a global verdict.
struct TheoremReport {
  std::string id;
  double tolerance = 0.0;
  std::vector<BandRecord> records;
  bool pass = true;
  bool window_exhausted = false;
  std::vector<std::string> notes;
};

/// Positions of the sub-zero guided band parts against the perturbation
/// envelope [-Q_j, -Q_j + rho], plus the lower bound on the number of
/// guided bands forced by values above rho.
TheoremReport check_envelope(const GuidedBandSet& bands, const GuidedPotential& q, double rho);

/// Inclusion of each sub-zero guided band part in [mu_j, mu_j + 2 beta_plus];
/// saturated endpoints are distinguished from strict ones.
TheoremReport check_bridge_bound(const GuidedBandSet& bands, const MuSpectrum& mu,
                                 std::size_t beta_plus);

struct DeltaSite {
  std::size_t j = 0;  // 1-based position in the decreasing Q order
  std::size_t vertex = 0;
  std::vector<int> shift;
  double q = 0.0;
  double w = 0.0;
  double delta_minus = 0.0;
  double delta_plus = 0.0;
  double delta = 0.0;
  std::size_t beta_jj = 0;
  std::size_t kappa_jj = 0;
  std::size_t kappa_v = 0;
  double closed_form_min = 0.0;  // kappa_v - kappa_jj, kept for comparison
  std::vector<double> table;     // profile over the grid
};

/// Loop profile per support site: Delta_jj(theta) = kappa_v - kappa_jj
/// - sum over bridge loops of cos<tau, theta>, evaluated analytically from
/// the loop index multisets. Extrema are always found numerically.
struct DeltaProfile {
  std::size_t grid_n = 0;
  std::size_t dim = 0;
  std::vector<DeltaSite> sites;
  std::vector<std::string> notes;

  double delta_sum() const;
};

DeltaProfile delta_profile(const CylinderModel& cyl, const GuidedPotential& q,
                           std::size_t n_grid);

/// Large-coupling probe: recomputes the guided bands at each coupling t,
/// records the first-order residuals and checks that they shrink like 1/t
/// across the largest doubled pair. The band-measure claim runs only for
/// generic potentials (all values distinct).
TheoremReport asymptotics_probe(const CylinderModel& cyl, const GuidedPotential& q,
                                const std::vector<double>& t_values,
                                const ConvergencePolicy& policy, std::size_t n_grid);

/// Total bandwidth against twice the first Betti number, reported under both
/// edge-counting conventions (quotient loops once / twice); neither is
/// asserted as ground truth.
TheoremReport bandwidth_sum_check(const BandStructure& bs, const GraphStats& stats);

}  // namespace guided
