#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "guided/graph.hpp"
#include "guided/report.hpp"
#include "guided/spectra.hpp"
#include "guided/theorems.hpp"

namespace {

using namespace guided;

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitCheckFailed = 2;
constexpr int kExitWindowExhausted = 3;
constexpr int kExitUsage = 64;

struct Pipeline {
  PeriodicGraphSpec spec;
  CylinderModel cyl;  // normalized when h0 was computed
  ConnectivityReport conn;
  GraphStats stats;
  GuidedPotential q;
  std::optional<H0Result> h0;
};

std::string read_all(const std::string& path) {
  std::FILE* f = std::fopen(path.c_str(), "rb");
  if (!f) throw Error(ErrorCode::IoFailure, "cannot open '" + path + "'");
  std::string bytes;
  char buf[1 << 14];
  std::size_t got;
  while ((got = std::fread(buf, 1, sizeof buf, f)) > 0) bytes.append(buf, got);
  std::fclose(f);
  return bytes;
}

Pipeline load_pipeline(const RunConfig& cfg, ResultBundle& bundle, bool need_h0) {
  const std::string bytes = read_all(cfg.input_path);
  bundle.input_hash = content_hash(bytes);

  Pipeline p;
  p.spec = load_and_validate(bytes);
  p.cyl = build_cylinder(p.spec);
  p.conn = connectivity_check(p.spec);
  p.stats = betti_and_stats(p.cyl);
  p.q = guided_potential(p.spec);

  bundle.warnings = p.spec.warnings;
  if (!p.conn.connected)
    bundle.warnings.push_back(
        "graph is not connected as a periodic graph; spectra are still well defined per "
        "component, but the verified bounds assume connectivity");
  bundle.connectivity = p.conn;
  bundle.stats = p.stats;

  if (need_h0) {
    p.h0 = h0_spectrum(p.cyl, cfg.n_full, true);
    p.cyl = p.h0->cylinder;
    bundle.h0 = p.h0->bands;
    bundle.normalization_shift = p.h0->shift;
  }
  return p;
}

int finish(ResultBundle& bundle, const RunConfig& cfg, bool write_files) {
  bundle.timestamp = utc_timestamp();
  if (write_files) {
    write_report(bundle, cfg.out_dir);
    std::cout << "report written to " << cfg.out_dir << "/report.json\n";
  }
  for (const TheoremReport& r : bundle.reports)
    std::cout << r.id << ": " << (r.pass ? "PASS" : "FAIL") << "\n";
  if (bundle.window_exhausted()) {
    std::cout << "window exhausted: results flagged as partial\n";
    return kExitWindowExhausted;
  }
  if (!bundle.all_checks_pass()) return kExitCheckFailed;
  return kExitOk;
}

int cmd_validate(const RunConfig& cfg) {
  const PeriodicGraphSpec spec = load_and_validate(read_all(cfg.input_path));
  const CylinderModel cyl = build_cylinder(spec);
  const ConnectivityReport conn = connectivity_check(spec);
  std::cout << "valid: " << cyl.nu << " fundamental vertices, " << cyl.rep_count
            << " edge representatives, dim " << spec.dim_guided << "+" << spec.perp_dim()
            << ", beta_plus = " << cyl.beta_plus << "\n";
  for (const std::string& w : spec.warnings) std::cout << "warning: " << w << "\n";
  if (!conn.connected) std::cout << "warning: graph is not connected as a periodic graph\n";
  return kExitOk;
}

int cmd_h0(const RunConfig& cfg) {
  ResultBundle bundle;
  bundle.config = cfg;
  Pipeline p = load_pipeline(cfg, bundle, true);
  std::cout << "spectrum in [0, " << p.h0->bands.rho << "], " << p.h0->bands.nu
            << " dispersion branches, normalization shift " << p.h0->shift << "\n";
  for (std::size_t n = 0; n < p.h0->bands.bands.size(); ++n)
    std::cout << "  band " << n + 1 << ": [" << p.h0->bands.bands[n].lo << ", "
              << p.h0->bands.bands[n].hi << "]" << (p.h0->bands.flat[n] ? " (flat)" : "") << "\n";
  return finish(bundle, cfg, true);
}

void compute_guided_sections(const RunConfig& cfg, Pipeline& p, ResultBundle& bundle) {
  const ConvergencePolicy policy = cfg.policy(p.h0->bands.rho);
  bundle.guided = guided_band_set(p.cyl, p.q, policy, cfg.n_guided);
  bundle.mu = mu_spectrum(p.cyl, p.q, policy);
  bundle.delta = delta_profile(p.cyl, p.q, cfg.n_guided);
  for (std::size_t j = 0; j < bundle.guided->bands.size(); ++j) {
    const GuidedBand& b = bundle.guided->bands[j];
    std::cout << "  guided band " << j + 1 << ": [" << b.band.lo << ", " << b.band.hi << "]"
              << (b.complete ? "" : " (partial)") << "\n";
  }
}

int cmd_guided(const RunConfig& cfg) {
  ResultBundle bundle;
  bundle.config = cfg;
  Pipeline p = load_pipeline(cfg, bundle, true);
  compute_guided_sections(cfg, p, bundle);
  return finish(bundle, cfg, true);
}

int cmd_check(const RunConfig& cfg) {
  ResultBundle bundle;
  bundle.config = cfg;
  Pipeline p = load_pipeline(cfg, bundle, true);
  if (!p.conn.connected) {
    std::cerr << "error: the verified bounds assume a connected periodic graph\n";
    return kExitValidation;
  }
  compute_guided_sections(cfg, p, bundle);
  bundle.reports.push_back(check_envelope(*bundle.guided, p.q, p.h0->bands.rho));
  bundle.reports.push_back(check_bridge_bound(*bundle.guided, *bundle.mu, p.cyl.beta_plus));
  bundle.reports.push_back(bandwidth_sum_check(p.h0->bands, p.stats));
  return finish(bundle, cfg, true);
}

int cmd_asymptotics(const RunConfig& cfg) {
  if (cfg.t_values.size() < 2) {
    std::cerr << "asymptotics needs --t with at least two couplings\n";
    return kExitUsage;
  }
  ResultBundle bundle;
  bundle.config = cfg;
  Pipeline p = load_pipeline(cfg, bundle, true);
  if (!p.conn.connected) {
    std::cerr << "error: the verified bounds assume a connected periodic graph\n";
    return kExitValidation;
  }
  const ConvergencePolicy policy = cfg.policy(p.h0->bands.rho);
  bundle.delta = delta_profile(p.cyl, p.q, cfg.n_guided);
  try {
    bundle.reports.push_back(asymptotics_probe(p.cyl, p.q, cfg.t_values, policy, cfg.n_guided));
  } catch (const std::invalid_argument& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kExitUsage;
  }
  return finish(bundle, cfg, true);
}

int cmd_plot(const RunConfig& cfg) {
  ResultBundle bundle;
  bundle.config = cfg;
  Pipeline p = load_pipeline(cfg, bundle, true);
  compute_guided_sections(cfg, p, bundle);
  bundle.timestamp = utc_timestamp();
  write_report(bundle, cfg.out_dir);
  std::string note;
  if (render_svg(bundle, cfg.out_dir, &note))
    std::cout << "diagram written to " << cfg.out_dir << "/bands.svg\n";
  else
    std::cout << "diagram skipped: " << note << "\n";
  return bundle.window_exhausted() ? kExitWindowExhausted : kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"spectra of periodic graph operators with guided potentials"};
  app.require_subcommand(1);

  RunConfig cfg;
  std::size_t grid = 0;

  const auto add_common = [&](CLI::App* sub, bool with_t) {
    sub->add_option("input", cfg.input_path, "graph document (JSON)")->required();
    sub->add_option("--grid", grid, "points per torus dimension (default 64)");
    sub->add_option("--window-tol", cfg.tol_window, "window certification tolerance");
    sub->add_option("--rmax", cfg.r_max, "window radius cap");
    sub->add_option("--r0", cfg.r0, "initial window radius");
    sub->add_option("--margin", cfg.delta_margin, "essential-floor safety margin");
    sub->add_option("--out", cfg.out_dir, "output directory (default out)");
    if (with_t)
      sub->add_option("--t", cfg.t_values, "ascending coupling constants")->delimiter(',');
  };

  CLI::App* validate = app.add_subcommand("validate", "parse and validate a graph document");
  add_common(validate, false);
  CLI::App* h0 = app.add_subcommand("h0-bands", "band structure of the unperturbed operator");
  add_common(h0, false);
  CLI::App* guided_cmd = app.add_subcommand("guided", "guided bands, anchors and loop profiles");
  add_common(guided_cmd, false);
  CLI::App* check = app.add_subcommand("check", "verify envelope, bridge and bandwidth bounds");
  add_common(check, false);
  CLI::App* asym = app.add_subcommand("asymptotics", "large-coupling residual probe");
  add_common(asym, true);
  CLI::App* plot = app.add_subcommand("plot", "render the band diagram");
  add_common(plot, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    app.exit(e);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  if (grid > 0) {
    if (grid < 4) {
      std::cerr << "--grid must be at least 4\n";
      return kExitUsage;
    }
    cfg.n_full = cfg.n_guided = cfg.n_perp = grid;
  }
  if (cfg.tol_window <= 0 || cfg.delta_margin < 0) {
    std::cerr << "tolerances must be positive\n";
    return kExitUsage;
  }

  try {
    if (validate->parsed()) {
      cfg.command = "validate";
      return cmd_validate(cfg);
    }
    if (h0->parsed()) {
      cfg.command = "h0-bands";
      return cmd_h0(cfg);
    }
    if (guided_cmd->parsed()) {
      cfg.command = "guided";
      return cmd_guided(cfg);
    }
    if (check->parsed()) {
      cfg.command = "check";
      return cmd_check(cfg);
    }
    if (asym->parsed()) {
      cfg.command = "asymptotics";
      return cmd_asymptotics(cfg);
    }
    if (plot->parsed()) {
      cfg.command = "plot";
      return cmd_plot(cfg);
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  }
  return kExitUsage;
}
