#include "guided/spectra.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

namespace guided {

int ConvergencePolicy::resolved_r0(const GuidedPotential& q) const {
  if (r0 > 0) return r0;
  return q.max_shift_norm() + 10;
}

int ConvergencePolicy::resolved_r_max(int dim_perp) const {
  if (r_max > 0) return r_max;
  return dim_perp <= 1 ? 2048 : 64;
}

double ConvergencePolicy::resolved_margin() const {
  if (delta_margin > 0.0) return delta_margin;
  return std::max(1e-8, 1e-6 * rho);
}

double BandStructure::bandwidth_sum() const {
  double s = 0.0;
  for (const Interval& b : bands) s += b.length();
  return s;
}

H0Result h0_spectrum(const CylinderModel& cyl, std::size_t n_grid, bool normalize) {
  const std::size_t dim = static_cast<std::size_t>(cyl.dim_guided + cyl.dim_perp);
  const TorusGrid grid(dim, n_grid);

  BandStructure bs;
  bs.grid_n = n_grid;
  bs.dim = dim;
  bs.nu = cyl.nu;
  bs.branches.resize(grid.size() * cyl.nu);

  parallel_for(grid.size(), [&](std::size_t i) {
    thread_local std::vector<double> theta;
    grid.point_into(i, theta);
    const std::vector<double> vals = eigvals(full_fiber(cyl, theta, true));
    std::copy(vals.begin(), vals.end(), bs.branches.begin() + i * cyl.nu);
  });

  bs.inf0 = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < grid.size(); ++i)
    bs.inf0 = std::min(bs.inf0, bs.branch(i, 0));

  H0Result out{BandStructure{}, 0.0, cyl};
  if (normalize && bs.inf0 != 0.0) {
    out.shift = bs.inf0;
    for (double& v : bs.branches) v -= out.shift;
    bs.inf0 = 0.0;
    out.cylinder = cyl.with_shifted_w(out.shift);
  }

  bs.bands.resize(cyl.nu);
  for (std::size_t n = 0; n < cyl.nu; ++n) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < grid.size(); ++i) {
      lo = std::min(lo, bs.branch(i, n));
      hi = std::max(hi, bs.branch(i, n));
    }
    bs.bands[n] = {lo, hi};
  }
  bs.rho = bs.bands.back().hi;
  bs.tol_flat = 1e-10 * std::max(1.0, bs.rho);
  bs.flat.resize(cyl.nu);
  for (std::size_t n = 0; n < cyl.nu; ++n) bs.flat[n] = bs.bands[n].length() < bs.tol_flat;

  out.bands = std::move(bs);
  return out;
}

EssentialFloor essential_floor(const CylinderModel& cyl, const std::vector<double>& theta,
                               std::size_t n_perp) {
  const TorusGrid grid(static_cast<std::size_t>(cyl.dim_perp), n_perp);
  const TorusExtrema low = minimize_on_torus(
      [&](const std::vector<double>& phi) {
        return eigvals(cylinder_bloch_fiber(cyl, theta, phi, true)).front();
      },
      grid, true);
  const TorusExtrema high = minimize_on_torus(
      [&](const std::vector<double>& phi) {
        return eigvals(cylinder_bloch_fiber(cyl, theta, phi, true)).back();
      },
      grid, true);
  return {low.min_value, high.max_value};
}

namespace {

std::vector<double> below(const std::vector<double>& vals, double threshold) {
  std::vector<double> out;
  for (double v : vals) {
    if (v < threshold) out.push_back(v);
    else break;  // ascending input
  }
  return out;
}

struct DoubledSpectra {
  std::vector<CertifiedValue> accepted;
  std::vector<CertifiedValue> unresolved;
  int radius = 0;
  bool exhausted = false;
};

// Window-doubling certification shared by the guided, modified and gap
// extractions. `threshold` filters candidates; `solve` maps a radius to the
// ascending spectrum of the corresponding truncation.
DoubledSpectra certify_below(const std::function<std::vector<double>(int)>& solve, int r0,
                             int r_max, double tol_window, double threshold) {
  DoubledSpectra out;
  int radius = std::min(r0, r_max);
  std::vector<double> prev = solve(radius);
  while (true) {
    const int next = std::min(2 * radius, r_max);
    if (next == radius) {
      // cannot grow further: everything below threshold is unresolved
      out.radius = radius;
      out.exhausted = true;
      for (double v : below(prev, threshold))
        out.unresolved.push_back({v, v, 0.0, radius, false});
      return out;
    }
    const std::vector<double> cur = solve(next);
    const std::vector<double> cand_prev = below(prev, threshold);
    const std::vector<double> cand_cur = below(cur, threshold);

    bool all_certified = true;
    out.accepted.clear();
    out.unresolved.clear();
    for (std::size_t j = 0; j < cand_cur.size(); ++j) {
      CertifiedValue cv;
      cv.value = cand_cur[j];
      cv.radius = next;
      if (j < cand_prev.size()) {
        cv.value_prev = cand_prev[j];
        cv.gap = std::abs(cv.value - cv.value_prev);
        cv.certified = cv.gap < tol_window;
      }
      if (cv.certified)
        out.accepted.push_back(cv);
      else {
        out.unresolved.push_back(cv);
        all_certified = false;
      }
    }
    out.radius = next;
    if (all_certified) return out;
    if (next >= r_max) {
      out.exhausted = true;
      return out;
    }
    radius = next;
    prev = cur;
  }
}

}  // namespace

GuidedPointResult guided_eigenvalues(const CylinderModel& cyl, const GuidedPotential& q,
                                     const std::vector<double>& theta,
                                     const ConvergencePolicy& policy) {
  GuidedPointResult out;
  if (q.entries.empty()) return out;

  out.m_minus = essential_floor(cyl, theta, policy.n_perp).m_minus;
  const double threshold = out.m_minus - policy.resolved_margin();

  const DoubledSpectra ds = certify_below(
      [&](int radius) {
        const Window win(cyl.nu, cyl.dim_perp, radius);
        return eigvals(truncated_fiber(cyl, q, theta, win, true));
      },
      policy.resolved_r0(q), policy.resolved_r_max(cyl.dim_perp), policy.tol_window, threshold);

  out.accepted = ds.accepted;
  out.unresolved = ds.unresolved;
  out.radius = ds.radius;
  out.window_exhausted = ds.exhausted;
  return out;
}

std::vector<GuidedPointResult> compute_guided_curves(const CylinderModel& cyl,
                                                     const GuidedPotential& q,
                                                     const ConvergencePolicy& policy,
                                                     std::size_t n_grid) {
  const TorusGrid grid(static_cast<std::size_t>(cyl.dim_guided), n_grid);
  std::vector<GuidedPointResult> curves(grid.size());
  parallel_for(grid.size(), [&](std::size_t i) {
    thread_local std::vector<double> theta;
    grid.point_into(i, theta);
    curves[i] = guided_eigenvalues(cyl, q, theta, policy);
  });
  return curves;
}

std::size_t GuidedBandSet::guided_count() const {
  std::size_t n = 0;
  for (const GuidedBand& b : bands)
    if (b.has_sigma_o) ++n;
  return n;
}

GuidedBandSet assemble_guided_bands(const std::vector<GuidedPointResult>& curves,
                                    const CylinderModel& cyl, const GuidedPotential& q,
                                    const ConvergencePolicy& policy, std::size_t n_grid) {
  const TorusGrid grid(static_cast<std::size_t>(cyl.dim_guided), n_grid);

  GuidedBandSet out;
  out.grid_n = n_grid;
  out.dim = static_cast<std::size_t>(cyl.dim_guided);
  out.curves.resize(curves.size());
  std::size_t max_count = 0;
  for (std::size_t i = 0; i < curves.size(); ++i) {
    for (const CertifiedValue& cv : curves[i].accepted) out.curves[i].push_back(cv.value);
    max_count = std::max(max_count, out.curves[i].size());
    out.window_exhausted = out.window_exhausted || curves[i].window_exhausted;
  }

  const double h = grid.spacing();
  for (std::size_t j = 0; j < max_count; ++j) {
    GuidedBand band;
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    std::size_t arg_lo = 0, arg_hi = 0;
    for (std::size_t i = 0; i < out.curves.size(); ++i) {
      if (j >= out.curves[i].size()) continue;
      ++band.points_present;
      const double v = out.curves[i][j];
      if (v < lo) {
        lo = v;
        arg_lo = i;
      }
      if (v > hi) {
        hi = v;
        arg_hi = i;
      }
    }
    band.complete = band.points_present == out.curves.size();
    band.band = {lo, hi};

    // one-pass parabolic endpoint polish, re-evaluated through the certified
    // extraction; band edges at symmetry points stay put
    const auto curve_at = [&](std::size_t flat) -> const std::vector<double>* {
      return j < out.curves[flat].size() ? &out.curves[flat] : nullptr;
    };
    const auto refine_edge = [&](std::size_t at, bool for_min) {
      std::vector<double> theta = grid.point(at);
      bool moved = false;
      for (std::size_t axis = 0; axis < grid.dim(); ++axis) {
        const std::size_t im = grid.neighbor(at, axis, -1);
        const std::size_t ip = grid.neighbor(at, axis, +1);
        const std::vector<double>* cm = curve_at(im);
        const std::vector<double>* cp = curve_at(ip);
        if (!cm || !cp) continue;
        const double f0 = out.curves[at][j];
        const double fm = (*cm)[j];
        const double fp = (*cp)[j];
        const double denom = fm - 2.0 * f0 + fp;
        if (for_min ? denom <= 0.0 : denom >= 0.0) continue;
        double delta = 0.5 * h * (fm - fp) / denom;
        delta = std::clamp(delta, -0.5 * h, 0.5 * h);
        if (delta != 0.0) {
          theta[axis] += delta;
          moved = true;
        }
      }
      if (!moved) return;
      const GuidedPointResult probe = guided_eigenvalues(cyl, q, theta, policy);
      if (j >= probe.accepted.size()) return;
      const double v = probe.accepted[j].value;
      if (for_min && v < band.band.lo) band.band.lo = v;
      if (!for_min && v > band.band.hi) band.band.hi = v;
    };
    if (band.points_present > 0 && grid.points_per_dim() >= 3) {
      refine_edge(arg_lo, true);
      refine_edge(arg_hi, false);
    }

    if (band.band.lo <= 0.0) {
      band.has_sigma_o = true;
      band.sigma_o = {band.band.lo, std::min(band.band.hi, 0.0)};
    }
    out.bands.push_back(band);
  }
  return out;
}

GuidedBandSet guided_band_set(const CylinderModel& cyl, const GuidedPotential& q,
                              const ConvergencePolicy& policy, std::size_t n_grid) {
  return assemble_guided_bands(compute_guided_curves(cyl, q, policy, n_grid), cyl, q, policy,
                               n_grid);
}

MuSpectrum mu_spectrum(const CylinderModel& cyl, const GuidedPotential& q,
                       const ConvergencePolicy& policy) {
  MuSpectrum out;
  if (q.entries.empty()) return out;

  const TorusGrid grid(static_cast<std::size_t>(cyl.dim_perp), policy.n_perp);
  out.ess_inf_h = minimize_on_torus(
                      [&](const std::vector<double>& phi) {
                        return eigvals(modified_bloch_fiber(cyl, phi, true)).front();
                      },
                      grid, true)
                      .min_value;

  const double threshold = out.ess_inf_h - policy.resolved_margin();
  const DoubledSpectra ds = certify_below(
      [&](int radius) {
        const Window win(cyl.nu, cyl.dim_perp, radius);
        return eigvals(modified_truncated_fiber(cyl, q, win, true));
      },
      policy.resolved_r0(q), policy.resolved_r_max(cyl.dim_perp), policy.tol_window, threshold);

  for (const CertifiedValue& cv : ds.accepted) out.mu_tilde.push_back(cv.value);
  out.window_exhausted = ds.exhausted;

  const std::size_t p = q.support_size();
  for (std::size_t j = 0; j < p; ++j)
    out.mu.push_back(j < out.mu_tilde.size() ? std::min(out.mu_tilde[j], out.ess_inf_h)
                                             : out.ess_inf_h);
  return out;
}

GapStates gap_states(const CylinderModel& cyl, const GuidedPotential& q,
                     const std::vector<double>& theta, const ConvergencePolicy& policy) {
  GapStates out;

  const TorusGrid grid(static_cast<std::size_t>(cyl.dim_perp), policy.n_perp);
  std::vector<Interval> branch_intervals;
  for (std::size_t n = 0; n < cyl.nu; ++n) {
    const TorusExtrema ext = minimize_on_torus(
        [&](const std::vector<double>& phi) {
          return eigvals(cylinder_bloch_fiber(cyl, theta, phi, true))[n];
        },
        grid, true);
    branch_intervals.push_back({ext.min_value, ext.max_value});
  }
  const IntervalSet h0 = IntervalSet::from_intervals(branch_intervals);
  out.h0_components = h0.components();
  out.gaps = h0.gaps();
  if (out.gaps.empty() || q.entries.empty()) return out;

  const double margin = policy.resolved_margin();
  const auto in_gap = [&](double v) {
    for (const Interval& g : out.gaps)
      if (v > g.lo + margin && v < g.hi - margin) return true;
    return false;
  };

  const int r0 = policy.resolved_r0(q);
  const int r_max = policy.resolved_r_max(cyl.dim_perp);
  int radius = std::min(r0, r_max);
  const auto solve = [&](int r) {
    const Window win(cyl.nu, cyl.dim_perp, r);
    return eigvals(truncated_fiber(cyl, q, theta, win, true));
  };
  std::vector<double> prev = solve(radius);
  while (true) {
    const int next = std::min(2 * radius, r_max);
    if (next == radius) return out;  // nothing certified at the cap
    const std::vector<double> cur = solve(next);

    std::vector<double> prev_gap, cur_gap;
    for (double v : prev)
      if (in_gap(v)) prev_gap.push_back(v);
    for (double v : cur)
      if (in_gap(v)) cur_gap.push_back(v);

    out.states.clear();
    bool all_stable = !cur_gap.empty();
    for (double v : cur_gap) {
      double best = std::numeric_limits<double>::infinity();
      double nearest = v;
      for (double w : prev_gap)
        if (std::abs(v - w) < best) {
          best = std::abs(v - w);
          nearest = w;
        }
      if (best < policy.tol_window)
        out.states.push_back({v, nearest, best, next, true});
      else
        all_stable = false;
    }
    if (all_stable || next >= r_max) return out;
    radius = next;
    prev = cur;
  }
}

}  // namespace guided
