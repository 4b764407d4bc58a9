#include "guided/theorems.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace guided {

namespace {

constexpr double kInclusionTol = 1e-7;
constexpr double kSaturationTol = 1e-6;

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(12);
  os << x;
  return os.str();
}

}  // namespace

TheoremReport check_envelope(const GuidedBandSet& bands, const GuidedPotential& q, double rho) {
  TheoremReport report;
  report.id = "envelope_bound";
  report.tolerance = kInclusionTol;

  for (std::size_t j = 0; j < bands.bands.size(); ++j) {
    const GuidedBand& band = bands.bands[j];
    if (!band.has_sigma_o) continue;
    BandRecord rec;
    rec.j = j + 1;
    rec.computed = band.sigma_o;
    if (j >= q.ordered.size()) {
      rec.pass = false;
      rec.notes = "more sub-zero bands than potential sites";
      report.records.push_back(rec);
      report.pass = false;
      continue;
    }
    const double qj = q.ordered[j].q;
    rec.claimed = {-qj, -qj + rho};
    rec.margin_lo = rec.computed.lo - rec.claimed.lo;
    rec.margin_hi = rec.claimed.hi - rec.computed.hi;
    rec.pass = rec.margin_lo >= -kInclusionTol && rec.margin_hi >= -kInclusionTol;
    if (!band.complete) rec.notes = "checked on resolved portion of an incomplete band";
    report.records.push_back(rec);
    report.pass = report.pass && rec.pass;
  }

  std::size_t forced = 0;
  for (const QSite& s : q.ordered)
    if (s.q > rho) ++forced;
  const std::size_t n_g = bands.guided_count();
  BandRecord count;
  count.j = 0;
  count.claimed = {static_cast<double>(forced), static_cast<double>(forced)};
  count.computed = {static_cast<double>(n_g), static_cast<double>(n_g)};
  count.margin_lo = static_cast<double>(n_g) - static_cast<double>(forced);
  count.pass = n_g >= forced;
  count.notes = "guided band count against the forced lower bound";
  report.records.push_back(count);
  report.pass = report.pass && count.pass;
  if (bands.window_exhausted)
    report.notes.push_back("window exhausted at some grid points; counts may be partial");
  return report;
}

TheoremReport check_bridge_bound(const GuidedBandSet& bands, const MuSpectrum& mu,
                                 std::size_t beta_plus) {
  TheoremReport report;
  report.id = "bridge_bound";
  report.tolerance = kInclusionTol;

  for (std::size_t j = 0; j < bands.bands.size(); ++j) {
    const GuidedBand& band = bands.bands[j];
    if (!band.has_sigma_o) continue;
    BandRecord rec;
    rec.j = j + 1;
    rec.computed = band.sigma_o;
    if (j >= mu.mu.size()) {
      rec.pass = false;
      rec.notes = "no anchor eigenvalue for this band";
      report.records.push_back(rec);
      report.pass = false;
      continue;
    }
    const double mu_j = mu.mu[j];
    rec.claimed = {mu_j, mu_j + 2.0 * static_cast<double>(beta_plus)};
    rec.margin_lo = rec.computed.lo - rec.claimed.lo;
    rec.margin_hi = rec.claimed.hi - rec.computed.hi;
    rec.pass = rec.margin_lo >= -kInclusionTol && rec.margin_hi >= -kInclusionTol;
    const bool sat_lo = std::abs(rec.margin_lo) <= kSaturationTol;
    const bool sat_hi = std::abs(rec.margin_hi) <= kSaturationTol;
    rec.notes = std::string("lower ") + (sat_lo ? "saturated" : "strict") + ", upper " +
                (sat_hi ? "saturated" : "strict");
    if (!band.complete) rec.notes += "; checked on resolved portion";
    report.records.push_back(rec);
    report.pass = report.pass && rec.pass;
  }
  if (mu.window_exhausted)
    report.notes.push_back("anchor spectrum window exhausted; bounds may be partial");
  return report;
}

double DeltaProfile::delta_sum() const {
  double s = 0.0;
  for (const DeltaSite& site : sites) s += site.delta;
  return s;
}

DeltaProfile delta_profile(const CylinderModel& cyl, const GuidedPotential& q,
                           std::size_t n_grid) {
  DeltaProfile profile;
  profile.grid_n = n_grid;
  profile.dim = static_cast<std::size_t>(cyl.dim_guided);
  const TorusGrid grid(profile.dim, n_grid);

  for (std::size_t j = 0; j < q.ordered.size(); ++j) {
    const QSite& site = q.ordered[j];
    const LoopStats& loops = cyl.loops[site.vertex];
    DeltaSite ds;
    ds.j = j + 1;
    ds.vertex = site.vertex;
    ds.shift = site.shift;
    ds.q = site.q;
    ds.w = cyl.w[site.vertex];
    ds.beta_jj = loops.beta_jj();
    ds.kappa_jj = loops.kappa_jj();
    ds.kappa_v = cyl.kappa[site.vertex];
    ds.closed_form_min = static_cast<double>(ds.kappa_v) - static_cast<double>(ds.kappa_jj);

    const auto value = [&](const std::vector<double>& theta) {
      double s = static_cast<double>(ds.kappa_v) - static_cast<double>(ds.kappa_jj);
      for (const std::vector<int>& tau : loops.bridge_loop_indices) {
        double x = 0.0;
        for (std::size_t k = 0; k < tau.size(); ++k) x += tau[k] * theta[k];
        s -= std::cos(x);
      }
      return s;
    };

    ds.table.resize(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) ds.table[i] = value(grid.point(i));
    const TorusExtrema ext = minimize_on_torus(value, grid, true);
    ds.delta_minus = ext.min_value;
    ds.delta_plus = ext.max_value;
    ds.delta = ds.delta_plus - ds.delta_minus;

    if (ds.beta_jj > 0 && std::abs(ds.delta_minus - ds.closed_form_min) > 1e-9)
      profile.notes.push_back(
          "site " + std::to_string(ds.j) + ": closed-form candidate kappa_v - kappa_jj = " +
          fmt(ds.closed_form_min) + " exceeds the computed minimum " + fmt(ds.delta_minus) +
          " by beta_jj; the numerical extremum is reported");
    profile.sites.push_back(std::move(ds));
  }
  return profile;
}

namespace {

struct ResidualSeries {
  std::vector<double> t;
  std::vector<double> r;
};

// O(1/t) structure test: residuals must shrink, and across the largest
// doubled pair the ratio r(t)/r(2t) must land in [1.5, 2.5]. A series that
// is tiny everywhere passes outright.
bool series_passes(const ResidualSeries& s, std::string& why) {
  if (s.t.empty()) {
    why = "no resolved couplings";
    return false;
  }
  bool all_tiny = true;
  for (double r : s.r) all_tiny = all_tiny && std::abs(r) < 1e-6;
  if (all_tiny) {
    why = "residuals below 1e-6 throughout";
    return true;
  }
  for (std::size_t i = 0; i + 1 < s.r.size(); ++i)
    if (std::abs(s.r[i + 1]) > std::abs(s.r[i]) + 1e-12) {
      why = "residuals do not decrease between t=" + fmt(s.t[i]) + " and t=" + fmt(s.t[i + 1]);
      return false;
    }
  // largest doubled pair
  for (std::size_t hi = s.t.size(); hi-- > 0;)
    for (std::size_t lo = hi; lo-- > 0;) {
      if (std::abs(s.t[hi] - 2.0 * s.t[lo]) > 1e-9 * s.t[hi]) continue;
      if (s.r[hi] == 0.0) {
        why = "residual vanished at t=" + fmt(s.t[hi]);
        return true;
      }
      const double ratio = s.r[lo] / s.r[hi];
      why = "ratio r(" + fmt(s.t[lo]) + ")/r(" + fmt(s.t[hi]) + ") = " + fmt(ratio);
      return ratio >= 1.5 && ratio <= 2.5;
    }
  why = "no doubled coupling pair resolved";
  return false;
}

}  // namespace

TheoremReport asymptotics_probe(const CylinderModel& cyl, const GuidedPotential& q,
                                const std::vector<double>& t_values,
                                const ConvergencePolicy& policy, std::size_t n_grid) {
  TheoremReport report;
  report.id = "large_coupling_asymptotics";
  report.tolerance = 1e-6;

  if (q.entries.empty()) throw std::invalid_argument("asymptotics probe needs a nonempty potential");
  for (double t : t_values)
    if (!(t > 0.0)) throw std::invalid_argument("coupling values must be positive");
  if (!std::is_sorted(t_values.begin(), t_values.end()))
    throw std::invalid_argument("coupling values must be ascending");
  bool has_pair = false;
  for (double a : t_values)
    for (double b : t_values) has_pair = has_pair || std::abs(b - 2.0 * a) <= 1e-9 * b;
  if (!has_pair) throw std::invalid_argument("coupling values must contain a ratio-2 pair");

  const DeltaProfile profile = delta_profile(cyl, q, n_grid);
  const std::size_t p = q.support_size();

  bool generic = true;
  for (std::size_t a = 0; a + 1 < q.ordered.size(); ++a)
    if (q.ordered[a].q == q.ordered[a + 1].q) generic = false;

  std::vector<ResidualSeries> lower(p), upper(p);
  ResidualSeries measure_series;
  std::size_t n_g_at_largest = 0;
  double largest_resolved = 0.0;

  for (double t : t_values) {
    const GuidedBandSet bands = guided_band_set(cyl, q.scaled(t), policy, n_grid);
    if (bands.window_exhausted) {
      report.notes.push_back("t=" + fmt(t) + ": window certification failed; coupling skipped");
      report.window_exhausted = true;
      continue;
    }
    if (bands.bands.size() < p) {
      report.notes.push_back("t=" + fmt(t) + ": only " + std::to_string(bands.bands.size()) +
                             " of " + std::to_string(p) + " bands resolved; coupling skipped");
      continue;
    }
    largest_resolved = t;
    n_g_at_largest = bands.guided_count();

    std::vector<Interval> all_bands;
    for (std::size_t j = 0; j < p; ++j) {
      const DeltaSite& site = profile.sites[j];
      const GuidedBand& band = bands.bands[j];
      all_bands.push_back(band.band);

      BandRecord rec;
      rec.j = j + 1;
      const double center = -t * site.q + site.w;
      rec.claimed = {center + site.delta_minus, center + site.delta_plus};
      rec.computed = band.band;
      rec.margin_lo = band.band.lo - rec.claimed.lo;  // residual r_j^-(t)
      rec.margin_hi = band.band.hi - rec.claimed.hi;  // residual r_j^+(t)
      rec.pass = true;  // the verdict lives in the series test below
      rec.notes = "t=" + fmt(t);
      report.records.push_back(rec);

      lower[j].t.push_back(t);
      lower[j].r.push_back(rec.margin_lo);
      upper[j].t.push_back(t);
      upper[j].r.push_back(rec.margin_hi);
    }
    const double measured = union_measure(all_bands).measure;
    measure_series.t.push_back(t);
    measure_series.r.push_back(measured - profile.delta_sum());
  }

  for (std::size_t j = 0; j < p; ++j) {
    std::string why;
    const bool lo_ok = series_passes(lower[j], why);
    report.notes.push_back("band " + std::to_string(j + 1) + " lower edge: " + why);
    const bool hi_ok = series_passes(upper[j], why);
    report.notes.push_back("band " + std::to_string(j + 1) + " upper edge: " + why);
    for (BandRecord& rec : report.records)
      if (rec.j == j + 1) rec.pass = lo_ok && hi_ok;
    report.pass = report.pass && lo_ok && hi_ok;
  }

  if (generic) {
    std::string why;
    const bool ok = series_passes(measure_series, why);
    BandRecord rec;
    rec.j = 0;
    rec.claimed = {profile.delta_sum(), profile.delta_sum()};
    if (!measure_series.r.empty())
      rec.computed = {profile.delta_sum() + measure_series.r.back(),
                      profile.delta_sum() + measure_series.r.back()};
    rec.margin_lo = measure_series.r.empty() ? 0.0 : measure_series.r.back();
    rec.pass = ok;
    rec.notes = "guided spectrum measure vs sum of band widths: " + why;
    report.records.push_back(rec);
    report.pass = report.pass && ok;
  } else {
    report.notes.push_back("potential not generic (repeated values); measure claim skipped");
  }

  {
    BandRecord rec;
    rec.j = 0;
    rec.claimed = {static_cast<double>(p), static_cast<double>(p)};
    rec.computed = {static_cast<double>(n_g_at_largest), static_cast<double>(n_g_at_largest)};
    rec.pass = largest_resolved > 0.0 && n_g_at_largest == p;
    rec.notes = largest_resolved > 0.0
                    ? "band count at t=" + fmt(largest_resolved)
                    : "no coupling fully resolved";
    report.records.push_back(rec);
    report.pass = report.pass && rec.pass;
  }
  return report;
}

TheoremReport bandwidth_sum_check(const BandStructure& bs, const GraphStats& stats) {
  TheoremReport report;
  report.id = "bandwidth_sum";
  report.tolerance = kInclusionTol;

  const double sum = bs.bandwidth_sum();
  const double bound_once = 2.0 * static_cast<double>(stats.betti);
  const double bound_twice = 2.0 * static_cast<double>(stats.betti_loops_twice);

  BandRecord once;
  once.j = 1;
  once.claimed = {0.0, bound_once};
  once.computed = {0.0, sum};
  once.margin_hi = bound_once - sum;
  once.pass = sum <= bound_once + kInclusionTol;
  once.notes = "quotient loops counted once";
  report.records.push_back(once);

  BandRecord twice;
  twice.j = 2;
  twice.claimed = {0.0, bound_twice};
  twice.computed = {0.0, sum};
  twice.margin_hi = bound_twice - sum;
  twice.pass = sum <= bound_twice + kInclusionTol;
  twice.notes = "quotient loops counted twice";
  report.records.push_back(twice);

  report.notes.push_back("total bandwidth " + fmt(sum) + "; bound 2*betti = " + fmt(bound_once) +
                         " (loops once), " + fmt(bound_twice) + " (loops twice)");
  if (once.pass != twice.pass)
    report.notes.push_back(
        "edge-counting conventions disagree; the bound is reported under both and neither is "
        "asserted as ground truth");
  if (std::abs(sum - bound_twice) <= 1e-9)
    report.notes.push_back("loops-twice bound attained with equality");

  // informational check: it holds when either counting convention does
  report.pass = once.pass || twice.pass;
  return report;
}

}  // namespace guided
