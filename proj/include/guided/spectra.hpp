#pragma once

#include <cstddef>
#include <vector>

#include "guided/floquet.hpp"
#include "guided/graph.hpp"
#include "guided/numerics.hpp"

namespace guided {

/// Window-certification and sweep parameters. Zero-valued fields resolve to
/// the documented defaults at the point of use.
struct ConvergencePolicy {
  double tol_window = 1e-9;
  int r0 = 0;              // 0 -> max support shift + 10
  int r_max = 0;           // 0 -> 2048 when dim_perp == 1, 64 otherwise
  double delta_margin = 0; // 0 -> max(1e-8, 1e-6 * rho)
  std::size_t n_perp = 64;
  double rho = 0.0;        // sup of the unperturbed spectrum, set by the pipeline

  int resolved_r0(const GuidedPotential& q) const;
  int resolved_r_max(int dim_perp) const;
  double resolved_margin() const;
};

/// Dispersion branches of the unperturbed operator over a full torus grid.
struct BandStructure {
  std::size_t grid_n = 0;
  std::size_t dim = 0;
  std::size_t nu = 0;
  std::vector<double> branches;  // grid point major, branch minor, ascending
  std::vector<Interval> bands;
  std::vector<bool> flat;
  double rho = 0.0;
  double inf0 = 0.0;
  double tol_flat = 0.0;

  double branch(std::size_t point, std::size_t n) const { return branches[point * nu + n]; }
  double bandwidth_sum() const;
};

struct H0Result {
  BandStructure bands;
  double shift = 0.0;     // amount subtracted from W so inf of the spectrum is 0
  CylinderModel cylinder; // with the shift applied when normalization was requested
};

H0Result h0_spectrum(const CylinderModel& cyl, std::size_t n_grid, bool normalize);

struct EssentialFloor {
  double m_minus = 0.0;
  double m_plus = 0.0;
};

/// Endpoints of the unperturbed fiber spectrum at theta, taken over a
/// perpendicular quasimomentum sweep with parabolic edge refinement.
EssentialFloor essential_floor(const CylinderModel& cyl, const std::vector<double>& theta,
                               std::size_t n_perp);

struct CertifiedValue {
  double value = 0.0;       // from the larger window
  double value_prev = 0.0;  // from the half-size window
  double gap = 0.0;         // |value - value_prev|
  int radius = 0;           // larger window radius
  bool certified = false;
};

struct GuidedPointResult {
  std::vector<CertifiedValue> accepted;    // certified, ascending
  std::vector<CertifiedValue> unresolved;  // near-threshold candidates left at r_max
  double m_minus = 0.0;
  int radius = 0;
  bool window_exhausted = false;
};

/// Discrete eigenvalues of the fiber H(theta) below the essential floor,
/// certified by window doubling: a value is accepted when it sits below
/// m_minus - margin and moves by less than tol_window between windows R and
/// 2R. Doubling continues until everything certifies or r_max is reached.
GuidedPointResult guided_eigenvalues(const CylinderModel& cyl, const GuidedPotential& q,
                                     const std::vector<double>& theta,
                                     const ConvergencePolicy& policy);

struct GuidedBand {
  Interval band;
  bool complete = false;        // curve present at every grid point
  std::size_t points_present = 0;
  bool has_sigma_o = false;
  Interval sigma_o;             // band intersected with (-inf, 0]
};

struct GuidedBandSet {
  std::size_t grid_n = 0;
  std::size_t dim = 0;
  std::vector<std::vector<double>> curves;  // accepted values per grid point
  std::vector<GuidedBand> bands;
  bool window_exhausted = false;

  std::size_t guided_count() const;  // bands with nonempty sigma_o
};

std::vector<GuidedPointResult> compute_guided_curves(const CylinderModel& cyl,
                                                     const GuidedPotential& q,
                                                     const ConvergencePolicy& policy,
                                                     std::size_t n_grid);

/// Interval hull per ascending-index curve, with parabolic endpoint
/// refinement re-evaluated through guided_eigenvalues near the grid extrema.
GuidedBandSet assemble_guided_bands(const std::vector<GuidedPointResult>& curves,
                                    const CylinderModel& cyl, const GuidedPotential& q,
                                    const ConvergencePolicy& policy, std::size_t n_grid);

GuidedBandSet guided_band_set(const CylinderModel& cyl, const GuidedPotential& q,
                              const ConvergencePolicy& policy, std::size_t n_grid);

struct MuSpectrum {
  std::vector<double> mu_tilde;  // certified eigenvalues of h below its essential spectrum
  double ess_inf_h = 0.0;
  std::vector<double> mu;        // min(mu_tilde_j, ess_inf_h), padded to the support size
  bool window_exhausted = false;
};

MuSpectrum mu_spectrum(const CylinderModel& cyl, const GuidedPotential& q,
                       const ConvergencePolicy& policy);

struct GapStates {
  std::vector<Interval> h0_components;  // sigma(H0(theta)) as merged intervals
  std::vector<Interval> gaps;
  std::vector<CertifiedValue> states;   // in-gap eigenvalues stable under doubling
  bool heuristic = true;
};

/// Truncated-fiber eigenvalues strictly inside a spectral gap of H0(theta)
/// that survive window doubling. Truncation artifacts drift with the window
/// and are discarded. Always flagged heuristic.
GapStates gap_states(const CylinderModel& cyl, const GuidedPotential& q,
                     const std::vector<double>& theta, const ConvergencePolicy& policy);

}  // namespace guided
