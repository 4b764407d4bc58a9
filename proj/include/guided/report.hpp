#pragma once

#include <optional>
#include <string>
#include <vector>

#include "guided/graph.hpp"
#include "guided/numerics.hpp"
#include "guided/spectra.hpp"
#include "guided/theorems.hpp"

namespace guided {

inline constexpr const char* kToolName = "guided-bands";
inline constexpr const char* kToolVersion = "0.1.0";

struct RunConfig {
  std::string command;
  std::string input_path;
  std::string out_dir = "out";
  std::size_t n_full = 64;
  std::size_t n_guided = 64;
  std::size_t n_perp = 64;
  double tol_window = 1e-9;
  int r0 = 0;
  int r_max = 0;
  double delta_margin = 0.0;
  std::vector<double> t_values;

  ConvergencePolicy policy(double rho) const;
};

/// Everything one run produced. Numeric payloads serialize at full double
/// precision; the timestamp lives in a single isolated key so reruns stay
/// byte-identical elsewhere.
struct ResultBundle {
  std::string tool_name = kToolName;
  std::string tool_version = kToolVersion;
  std::string timestamp;
  std::string input_hash;
  RunConfig config;
  std::vector<std::string> warnings;

  std::optional<ConnectivityReport> connectivity;
  std::optional<GraphStats> stats;
  std::optional<BandStructure> h0;
  double normalization_shift = 0.0;
  std::optional<GuidedBandSet> guided;
  std::optional<MuSpectrum> mu;
  std::optional<DeltaProfile> delta;
  std::vector<TheoremReport> reports;

  bool window_exhausted() const;
  bool all_checks_pass() const;
};

bool operator==(const RunConfig& a, const RunConfig& b);

/// Equality of every serialized field except the timestamp.
bool equivalent(const ResultBundle& a, const ResultBundle& b);

std::string serialize_bundle(const ResultBundle& bundle);
ResultBundle parse_bundle(const std::string& text);

/// FNV-1a 64-bit of the raw document bytes, as 16 hex digits.
std::string content_hash(const std::string& bytes);

std::string utc_timestamp();

/// Writes report.json, bands.csv (RFC 4180, header row) and checks.txt
/// into dir, creating it if needed. Throws IoFailure on write errors.
void write_report(const ResultBundle& bundle, const std::string& dir);

/// Band diagram as a standalone SVG 1.1 document: shaded strips for the
/// unperturbed bands, one polyline per guided curve (d = 1) or min/max
/// strips (d = 2), a dashed zero line and axis labels. Returns false with a
/// note when the guided dimension has no diagram variant.
bool render_svg(const ResultBundle& bundle, const std::string& dir, std::string* note);

}  // namespace guided
