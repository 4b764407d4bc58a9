#include "guided/report.hpp"

#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>

#include "json.hpp"

namespace guided {

using ojson = nlohmann::ordered_json;

ConvergencePolicy RunConfig::policy(double rho) const {
  ConvergencePolicy p;
  p.tol_window = tol_window;
  p.r0 = r0;
  p.r_max = r_max;
  p.delta_margin = delta_margin;
  p.n_perp = n_perp;
  p.rho = rho;
  return p;
}

bool ResultBundle::window_exhausted() const {
  if (guided && guided->window_exhausted) return true;
  if (mu && mu->window_exhausted) return true;
  for (const TheoremReport& r : reports)
    if (r.window_exhausted) return true;
  return false;
}

bool ResultBundle::all_checks_pass() const {
  for (const TheoremReport& r : reports)
    if (!r.pass) return false;
  return true;
}

std::string content_hash(const std::string& bytes) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016" PRIx64, h);
  return buf;
}

std::string utc_timestamp() {
  std::time_t t = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

namespace {

std::string fmt17(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

ojson j_interval(const Interval& iv) { return ojson{{"lo", iv.lo}, {"hi", iv.hi}}; }
Interval p_interval(const ojson& j) { return {j.at("lo").get<double>(), j.at("hi").get<double>()}; }

ojson j_config(const RunConfig& c) {
  return ojson{{"command", c.command},
               {"input_path", c.input_path},
               {"out_dir", c.out_dir},
               {"n_full", c.n_full},
               {"n_guided", c.n_guided},
               {"n_perp", c.n_perp},
               {"tol_window", c.tol_window},
               {"r0", c.r0},
               {"r_max", c.r_max},
               {"delta_margin", c.delta_margin},
               {"t_values", c.t_values}};
}

RunConfig p_config(const ojson& j) {
  RunConfig c;
  c.command = j.at("command").get<std::string>();
  c.input_path = j.at("input_path").get<std::string>();
  c.out_dir = j.at("out_dir").get<std::string>();
  c.n_full = j.at("n_full").get<std::size_t>();
  c.n_guided = j.at("n_guided").get<std::size_t>();
  c.n_perp = j.at("n_perp").get<std::size_t>();
  c.tol_window = j.at("tol_window").get<double>();
  c.r0 = j.at("r0").get<int>();
  c.r_max = j.at("r_max").get<int>();
  c.delta_margin = j.at("delta_margin").get<double>();
  c.t_values = j.at("t_values").get<std::vector<double>>();
  return c;
}

ojson j_connectivity(const ConnectivityReport& r) {
  return ojson{{"connected", r.connected},
               {"quotient_connected", r.quotient_connected},
               {"index_lattice_rank", r.index_lattice_rank},
               {"elementary_divisors", r.elementary_divisors}};
}

ConnectivityReport p_connectivity(const ojson& j) {
  ConnectivityReport r;
  r.connected = j.at("connected").get<bool>();
  r.quotient_connected = j.at("quotient_connected").get<bool>();
  r.index_lattice_rank = j.at("index_lattice_rank").get<int>();
  r.elementary_divisors = j.at("elementary_divisors").get<std::vector<long long>>();
  return r;
}

ojson j_stats(const GraphStats& s) {
  ojson loops = ojson::array();
  for (const LoopStats& l : s.loops)
    loops.push_back(ojson{{"bridge_loop_indices", l.bridge_loop_indices},
                          {"zero_loops", l.zero_loops}});
  return ojson{{"betti", s.betti},
               {"betti_loops_twice", s.betti_loops_twice},
               {"kappa", s.kappa},
               {"beta_v", s.beta_v},
               {"beta_plus", s.beta_plus},
               {"loops", std::move(loops)}};
}

GraphStats p_stats(const ojson& j) {
  GraphStats s;
  s.betti = j.at("betti").get<long long>();
  s.betti_loops_twice = j.at("betti_loops_twice").get<long long>();
  s.kappa = j.at("kappa").get<std::vector<std::size_t>>();
  s.beta_v = j.at("beta_v").get<std::vector<std::size_t>>();
  s.beta_plus = j.at("beta_plus").get<std::size_t>();
  for (const ojson& l : j.at("loops")) {
    LoopStats ls;
    ls.bridge_loop_indices = l.at("bridge_loop_indices").get<std::vector<std::vector<int>>>();
    ls.zero_loops = l.at("zero_loops").get<std::size_t>();
    s.loops.push_back(std::move(ls));
  }
  return s;
}

ojson j_bands(const BandStructure& b) {
  ojson bands = ojson::array();
  for (const Interval& iv : b.bands) bands.push_back(j_interval(iv));
  return ojson{{"grid_n", b.grid_n}, {"dim", b.dim},           {"nu", b.nu},
               {"bands", bands},     {"flat", b.flat},         {"rho", b.rho},
               {"inf0", b.inf0},     {"tol_flat", b.tol_flat}, {"branches", b.branches}};
}

BandStructure p_bands(const ojson& j) {
  BandStructure b;
  b.grid_n = j.at("grid_n").get<std::size_t>();
  b.dim = j.at("dim").get<std::size_t>();
  b.nu = j.at("nu").get<std::size_t>();
  for (const ojson& iv : j.at("bands")) b.bands.push_back(p_interval(iv));
  b.flat = j.at("flat").get<std::vector<bool>>();
  b.rho = j.at("rho").get<double>();
  b.inf0 = j.at("inf0").get<double>();
  b.tol_flat = j.at("tol_flat").get<double>();
  b.branches = j.at("branches").get<std::vector<double>>();
  return b;
}

ojson j_guided(const GuidedBandSet& g) {
  ojson bands = ojson::array();
  for (const GuidedBand& b : g.bands) {
    ojson jb{{"band", j_interval(b.band)},
             {"complete", b.complete},
             {"points_present", b.points_present},
             {"has_sigma_o", b.has_sigma_o}};
    if (b.has_sigma_o) jb["sigma_o"] = j_interval(b.sigma_o);
    bands.push_back(std::move(jb));
  }
  return ojson{{"grid_n", g.grid_n},
               {"dim", g.dim},
               {"bands", std::move(bands)},
               {"window_exhausted", g.window_exhausted},
               {"curves", g.curves}};
}

GuidedBandSet p_guided(const ojson& j) {
  GuidedBandSet g;
  g.grid_n = j.at("grid_n").get<std::size_t>();
  g.dim = j.at("dim").get<std::size_t>();
  for (const ojson& jb : j.at("bands")) {
    GuidedBand b;
    b.band = p_interval(jb.at("band"));
    b.complete = jb.at("complete").get<bool>();
    b.points_present = jb.at("points_present").get<std::size_t>();
    b.has_sigma_o = jb.at("has_sigma_o").get<bool>();
    if (b.has_sigma_o) b.sigma_o = p_interval(jb.at("sigma_o"));
    g.bands.push_back(std::move(b));
  }
  g.window_exhausted = j.at("window_exhausted").get<bool>();
  g.curves = j.at("curves").get<std::vector<std::vector<double>>>();
  return g;
}

ojson j_mu(const MuSpectrum& m) {
  return ojson{{"mu_tilde", m.mu_tilde},
               {"ess_inf_h", m.ess_inf_h},
               {"mu", m.mu},
               {"window_exhausted", m.window_exhausted}};
}

MuSpectrum p_mu(const ojson& j) {
  MuSpectrum m;
  m.mu_tilde = j.at("mu_tilde").get<std::vector<double>>();
  m.ess_inf_h = j.at("ess_inf_h").get<double>();
  m.mu = j.at("mu").get<std::vector<double>>();
  m.window_exhausted = j.at("window_exhausted").get<bool>();
  return m;
}

ojson j_delta(const DeltaProfile& d) {
  ojson sites = ojson::array();
  for (const DeltaSite& s : d.sites)
    sites.push_back(ojson{{"j", s.j},
                          {"vertex", s.vertex},
                          {"shift", s.shift},
                          {"q", s.q},
                          {"w", s.w},
                          {"delta_minus", s.delta_minus},
                          {"delta_plus", s.delta_plus},
                          {"delta", s.delta},
                          {"beta_jj", s.beta_jj},
                          {"kappa_jj", s.kappa_jj},
                          {"kappa_v", s.kappa_v},
                          {"closed_form_min", s.closed_form_min},
                          {"table", s.table}});
  return ojson{{"grid_n", d.grid_n}, {"dim", d.dim}, {"sites", std::move(sites)},
               {"notes", d.notes}};
}

DeltaProfile p_delta(const ojson& j) {
  DeltaProfile d;
  d.grid_n = j.at("grid_n").get<std::size_t>();
  d.dim = j.at("dim").get<std::size_t>();
  for (const ojson& js : j.at("sites")) {
    DeltaSite s;
    s.j = js.at("j").get<std::size_t>();
    s.vertex = js.at("vertex").get<std::size_t>();
    s.shift = js.at("shift").get<std::vector<int>>();
    s.q = js.at("q").get<double>();
    s.w = js.at("w").get<double>();
    s.delta_minus = js.at("delta_minus").get<double>();
    s.delta_plus = js.at("delta_plus").get<double>();
    s.delta = js.at("delta").get<double>();
    s.beta_jj = js.at("beta_jj").get<std::size_t>();
    s.kappa_jj = js.at("kappa_jj").get<std::size_t>();
    s.kappa_v = js.at("kappa_v").get<std::size_t>();
    s.closed_form_min = js.at("closed_form_min").get<double>();
    s.table = js.at("table").get<std::vector<double>>();
    d.sites.push_back(std::move(s));
  }
  d.notes = j.at("notes").get<std::vector<std::string>>();
  return d;
}

ojson j_report(const TheoremReport& r) {
  ojson records = ojson::array();
  for (const BandRecord& rec : r.records)
    records.push_back(ojson{{"j", rec.j},
                            {"claimed", j_interval(rec.claimed)},
                            {"computed", j_interval(rec.computed)},
                            {"margin_lo", rec.margin_lo},
                            {"margin_hi", rec.margin_hi},
                            {"pass", rec.pass},
                            {"notes", rec.notes}});
  return ojson{{"id", r.id},
               {"tolerance", r.tolerance},
               {"pass", r.pass},
               {"window_exhausted", r.window_exhausted},
               {"records", std::move(records)},
               {"notes", r.notes}};
}

TheoremReport p_report(const ojson& j) {
  TheoremReport r;
  r.id = j.at("id").get<std::string>();
  r.tolerance = j.at("tolerance").get<double>();
  r.pass = j.at("pass").get<bool>();
  r.window_exhausted = j.at("window_exhausted").get<bool>();
  for (const ojson& jr : j.at("records")) {
    BandRecord rec;
    rec.j = jr.at("j").get<std::size_t>();
    rec.claimed = p_interval(jr.at("claimed"));
    rec.computed = p_interval(jr.at("computed"));
    rec.margin_lo = jr.at("margin_lo").get<double>();
    rec.margin_hi = jr.at("margin_hi").get<double>();
    rec.pass = jr.at("pass").get<bool>();
    rec.notes = jr.at("notes").get<std::string>();
    r.records.push_back(std::move(rec));
  }
  r.notes = j.at("notes").get<std::vector<std::string>>();
  return r;
}

}  // namespace

std::string serialize_bundle(const ResultBundle& b) {
  ojson j;
  j["tool"] = ojson{{"name", b.tool_name}, {"version", b.tool_version}};
  j["timestamp"] = b.timestamp;
  j["input_hash"] = b.input_hash;
  j["config"] = j_config(b.config);
  j["warnings"] = b.warnings;
  if (b.connectivity) j["connectivity"] = j_connectivity(*b.connectivity);
  if (b.stats) j["graph_stats"] = j_stats(*b.stats);
  if (b.h0) {
    j["band_structure"] = j_bands(*b.h0);
    j["normalization_shift"] = b.normalization_shift;
  }
  if (b.guided) j["guided_bands"] = j_guided(*b.guided);
  if (b.mu) j["mu_spectrum"] = j_mu(*b.mu);
  if (b.delta) j["delta_profile"] = j_delta(*b.delta);
  ojson reports = ojson::array();
  for (const TheoremReport& r : b.reports) reports.push_back(j_report(r));
  j["theorem_reports"] = std::move(reports);
  return j.dump(2);
}

ResultBundle parse_bundle(const std::string& text) {
  const ojson j = ojson::parse(text);
  ResultBundle b;
  b.tool_name = j.at("tool").at("name").get<std::string>();
  b.tool_version = j.at("tool").at("version").get<std::string>();
  b.timestamp = j.at("timestamp").get<std::string>();
  b.input_hash = j.at("input_hash").get<std::string>();
  b.config = p_config(j.at("config"));
  b.warnings = j.at("warnings").get<std::vector<std::string>>();
  if (j.contains("connectivity")) b.connectivity = p_connectivity(j.at("connectivity"));
  if (j.contains("graph_stats")) b.stats = p_stats(j.at("graph_stats"));
  if (j.contains("band_structure")) {
    b.h0 = p_bands(j.at("band_structure"));
    b.normalization_shift = j.at("normalization_shift").get<double>();
  }
  if (j.contains("guided_bands")) b.guided = p_guided(j.at("guided_bands"));
  if (j.contains("mu_spectrum")) b.mu = p_mu(j.at("mu_spectrum"));
  if (j.contains("delta_profile")) b.delta = p_delta(j.at("delta_profile"));
  for (const ojson& jr : j.at("theorem_reports")) b.reports.push_back(p_report(jr));
  return b;
}

bool operator==(const RunConfig& a, const RunConfig& b) {
  return j_config(a) == j_config(b);
}

bool equivalent(const ResultBundle& a, const ResultBundle& b) {
  ResultBundle x = a;
  ResultBundle y = b;
  x.timestamp.clear();
  y.timestamp.clear();
  return serialize_bundle(x) == serialize_bundle(y);
}

namespace {

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoFailure, "cannot open '" + path + "' for writing");
  out << content;
  if (!out) throw Error(ErrorCode::IoFailure, "write to '" + path + "' failed");
}

std::string render_csv(const ResultBundle& b) {
  std::size_t dims = 1;
  if (b.h0) dims = std::max(dims, b.h0->dim);
  if (b.guided) dims = std::max(dims, b.guided->dim);

  std::string csv = "kind";
  for (std::size_t k = 1; k <= dims; ++k) csv += ",theta_" + std::to_string(k);
  csv += ",j,value\r\n";

  const auto row = [&](const char* kind, const std::vector<double>& theta, std::size_t j,
                       double value) {
    csv += kind;
    for (std::size_t k = 0; k < dims; ++k) {
      csv += ",";
      if (k < theta.size()) csv += fmt17(theta[k]);
    }
    csv += "," + std::to_string(j) + "," + fmt17(value) + "\r\n";
  };

  if (b.h0) {
    const TorusGrid grid(b.h0->dim, b.h0->grid_n);
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const std::vector<double> theta = grid.point(i);
      for (std::size_t n = 0; n < b.h0->nu; ++n) row("h0", theta, n + 1, b.h0->branch(i, n));
    }
  }
  if (b.guided) {
    const TorusGrid grid(b.guided->dim, b.guided->grid_n);
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const std::vector<double> theta = grid.point(i);
      for (std::size_t j = 0; j < b.guided->curves[i].size(); ++j)
        row("guided", theta, j + 1, b.guided->curves[i][j]);
    }
  }
  return csv;
}

std::string render_checks(const ResultBundle& b) {
  std::string out;
  if (b.reports.empty()) {
    out = "no checks requested\n";
    return out;
  }
  for (const TheoremReport& r : b.reports) {
    out += r.id + " (tolerance " + fmt17(r.tolerance) + "): " + (r.pass ? "PASS" : "FAIL") + "\n";
    for (const BandRecord& rec : r.records) {
      out += "  [" + std::to_string(rec.j) + "] computed [" + fmt17(rec.computed.lo) + ", " +
             fmt17(rec.computed.hi) + "] vs [" + fmt17(rec.claimed.lo) + ", " +
             fmt17(rec.claimed.hi) + "] margins " + fmt17(rec.margin_lo) + " / " +
             fmt17(rec.margin_hi) + " " + (rec.pass ? "ok" : "VIOLATED");
      if (!rec.notes.empty()) out += "  (" + rec.notes + ")";
      out += "\n";
    }
    for (const std::string& n : r.notes) out += "  note: " + n + "\n";
  }
  return out;
}

std::string fmt_svg(double x) {
  if (!std::isfinite(x)) throw Error(ErrorCode::IoFailure, "non-finite SVG coordinate");
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

}  // namespace

void write_report(const ResultBundle& bundle, const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::IoFailure, "cannot create directory '" + dir + "'");
  write_file(dir + "/report.json", serialize_bundle(bundle));
  write_file(dir + "/bands.csv", render_csv(bundle));
  write_file(dir + "/checks.txt", render_checks(bundle));
}

bool render_svg(const ResultBundle& bundle, const std::string& dir, std::string* note) {
  const std::size_t d = bundle.guided ? bundle.guided->dim : 1;
  if (d > 2) {
    if (note) *note = "no diagram variant for guided dimension " + std::to_string(d);
    return false;
  }

  constexpr double width = 800, height = 560;
  constexpr double left = 70, right = 30, top = 30, bottom = 50;
  constexpr double pi = 3.14159265358979323846;

  double y_lo = 0.0, y_hi = 0.0;
  if (bundle.h0) y_hi = std::max(y_hi, bundle.h0->bands.back().hi);
  if (bundle.guided)
    for (const GuidedBand& b : bundle.guided->bands) {
      y_lo = std::min(y_lo, b.band.lo);
      y_hi = std::max(y_hi, b.band.hi);
    }
  const double pad = 0.05 * std::max(1.0, y_hi - y_lo);
  y_lo -= pad;
  y_hi += pad;

  const auto sx = [&](double theta) {
    return left + (theta + pi) / (2.0 * pi) * (width - left - right);
  };
  const auto sy = [&](double v) {
    return height - bottom - (v - y_lo) / (y_hi - y_lo) * (height - top - bottom);
  };

  std::string svg;
  svg += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" + fmt_svg(width) +
         "\" height=\"" + fmt_svg(height) + "\" viewBox=\"0 0 " + fmt_svg(width) + " " +
         fmt_svg(height) + "\">\n";
  svg += "<rect x=\"0\" y=\"0\" width=\"" + fmt_svg(width) + "\" height=\"" + fmt_svg(height) +
         "\" fill=\"white\"/>\n";

  if (bundle.h0) {
    for (std::size_t n = 0; n < bundle.h0->bands.size(); ++n) {
      const Interval& band = bundle.h0->bands[n];
      const double y1 = sy(band.hi);
      const double h = std::max(sy(band.lo) - sy(band.hi), 1.0);
      svg += "<rect x=\"" + fmt_svg(left) + "\" y=\"" + fmt_svg(y1) + "\" width=\"" +
             fmt_svg(width - left - right) + "\" height=\"" + fmt_svg(h) +
             "\" fill=\"#9db8d2\" fill-opacity=\"0.45\"/>\n";
    }
  }

  if (bundle.guided) {
    static const char* colors[] = {"#b03030", "#2f7d32", "#6a3d9a", "#b8860b", "#206080"};
    if (d == 1) {
      const TorusGrid grid(1, bundle.guided->grid_n);
      std::size_t max_curves = 0;
      for (const auto& c : bundle.guided->curves) max_curves = std::max(max_curves, c.size());
      for (std::size_t j = 0; j < max_curves; ++j) {
        std::string points;
        const char* color = colors[j % 5];
        for (std::size_t i = 0; i < grid.size(); ++i) {
          if (j >= bundle.guided->curves[i].size()) {
            if (!points.empty()) {
              svg += "<polyline fill=\"none\" stroke=\"" + std::string(color) +
                     "\" stroke-width=\"1.5\" points=\"" + points + "\"/>\n";
              points.clear();
            }
            continue;
          }
          points += fmt_svg(sx(grid.coordinate(i))) + "," +
                    fmt_svg(sy(bundle.guided->curves[i][j])) + " ";
        }
        if (!points.empty())
          svg += "<polyline fill=\"none\" stroke=\"" + std::string(color) +
                 "\" stroke-width=\"1.5\" points=\"" + points + "\"/>\n";
      }
    } else {
      for (std::size_t j = 0; j < bundle.guided->bands.size(); ++j) {
        const Interval& band = bundle.guided->bands[j].band;
        const double y1 = sy(band.hi);
        const double h = std::max(sy(band.lo) - sy(band.hi), 1.5);
        svg += "<rect x=\"" + fmt_svg(left) + "\" y=\"" + fmt_svg(y1) + "\" width=\"" +
               fmt_svg(width - left - right) + "\" height=\"" + fmt_svg(h) + "\" fill=\"" +
               colors[j % 5] + "\" fill-opacity=\"0.6\"/>\n";
      }
    }
  }

  // zero line and frame
  svg += "<line x1=\"" + fmt_svg(left) + "\" y1=\"" + fmt_svg(sy(0.0)) + "\" x2=\"" +
         fmt_svg(width - right) + "\" y2=\"" + fmt_svg(sy(0.0)) +
         "\" stroke=\"#444\" stroke-dasharray=\"6 4\" stroke-width=\"1\"/>\n";
  svg += "<rect x=\"" + fmt_svg(left) + "\" y=\"" + fmt_svg(top) + "\" width=\"" +
         fmt_svg(width - left - right) + "\" height=\"" + fmt_svg(height - top - bottom) +
         "\" fill=\"none\" stroke=\"black\" stroke-width=\"1\"/>\n";

  const auto label = [&](double x, double y, const std::string& text, const char* anchor) {
    svg += "<text x=\"" + fmt_svg(x) + "\" y=\"" + fmt_svg(y) + "\" font-size=\"13\" " +
           "font-family=\"sans-serif\" text-anchor=\"" + anchor + "\">" + text + "</text>\n";
  };
  if (d == 1) {
    label(sx(-pi), height - bottom + 18, "-pi", "middle");
    label(sx(0.0), height - bottom + 18, "0", "middle");
    label(sx(pi), height - bottom + 18, "pi", "middle");
    label(width / 2, height - 10, "theta", "middle");
  } else {
    label(width / 2, height - 10, "band extent over the torus", "middle");
  }
  label(left - 8, sy(0.0) + 4, "0", "end");
  label(left - 8, sy(y_lo + pad) + 4, fmt_svg(y_lo + pad), "end");
  label(left - 8, sy(y_hi - pad) + 4, fmt_svg(y_hi - pad), "end");
  label(18, height / 2, "energy", "middle");
  svg += "</svg>\n";

  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::IoFailure, "cannot create directory '" + dir + "'");
  write_file(dir + "/bands.svg", svg);
  return true;
}

}  // namespace guided
