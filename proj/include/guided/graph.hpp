#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "guided/errors.hpp"

namespace guided {

struct Vertex {
  std::string id;
  double w = 0.0;
};

/// One representative per unoriented edge. `index` has length dim_total and
/// records the lattice shift between the copies of the fundamental domain
/// the edge connects.
struct EdgeRep {
  std::size_t tail = 0;
  std::size_t head = 0;
  std::vector<int> index;
};

struct QEntryRaw {
  std::size_t vertex = 0;
  std::vector<int> shift;  // length dim_total - dim_guided
  double q = 0.0;
};

/// Validated declarative description of a periodic graph with a guided
/// potential. The guided directions are by convention the first dim_guided
/// coordinates of every edge index.
struct PeriodicGraphSpec {
  int dim_total = 0;
  int dim_guided = 0;
  std::vector<Vertex> vertices;
  std::vector<EdgeRep> edges;
  std::vector<QEntryRaw> q_entries;
  std::vector<std::string> warnings;

  int perp_dim() const { return dim_total - dim_guided; }
};

/// Parses and validates a graph document (JSON, UTF-8). Throws Error with
/// codes MalformedDocument, DuplicateVertexId, DanglingEdgeEndpoint,
/// NonPositiveQ or BadDimensions; diagnostics carry the document path.
PeriodicGraphSpec load_and_validate(const std::string& text);

/// Reads the document from a file first. Missing file -> IoFailure.
PeriodicGraphSpec load_file(const std::string& path);

struct OrientedEdge {
  std::size_t tail = 0;
  std::size_t head = 0;
  std::vector<int> tau_par;   // first dim_guided coordinates
  std::vector<int> tau_perp;  // the rest
  bool is_bridge = false;     // tau_par != 0
  std::size_t rep = 0;        // unoriented representative this came from
  bool reversed = false;
};

/// Oriented loops sitting at one fundamental vertex of the cylinder
/// (tail == head, tau_perp == 0), split by bridge flag.
struct LoopStats {
  std::vector<std::vector<int>> bridge_loop_indices;  // tau_par per oriented bridge loop
  std::size_t zero_loops = 0;                         // oriented loops with tau == 0

  std::size_t beta_jj() const { return bridge_loop_indices.size(); }
  std::size_t kappa_jj() const { return zero_loops; }
};

/// Quotient of the periodic graph by the guided translations, with the
/// oriented closure applied and every per-vertex statistic the bound checks
/// need. All statistics are independent of the perpendicular shift.
struct CylinderModel {
  std::size_t nu = 0;
  int dim_guided = 0;
  int dim_perp = 0;
  std::vector<std::string> vertex_ids;
  std::vector<double> w;
  std::vector<OrientedEdge> edges;  // forward reps in input order, then reversed
  std::vector<std::size_t> kappa;   // degree, loops counted twice
  std::vector<std::size_t> beta_v;  // bridges starting at v
  std::size_t beta_plus = 0;
  std::vector<LoopStats> loops;
  std::size_t rep_count = 0;       // unoriented quotient edges, loops once
  std::size_t loop_rep_count = 0;  // representatives with tail == head

  std::size_t modified_degree(std::size_t v) const { return kappa[v] - beta_v[v]; }

  /// Copy with W(v) replaced by W(v) - c everywhere (spectrum normalization).
  CylinderModel with_shifted_w(double c) const;
};

CylinderModel build_cylinder(const PeriodicGraphSpec& spec);

struct ConnectivityReport {
  bool connected = false;
  bool quotient_connected = false;
  int index_lattice_rank = 0;
  std::vector<long long> elementary_divisors;
};

/// The periodic graph is connected iff the quotient multigraph is connected
/// and the cycle indices generate the full translation lattice (checked via
/// Smith normal form of the cycle-index matrix).
ConnectivityReport connectivity_check(const PeriodicGraphSpec& spec);

struct GraphStats {
  long long betti = 0;              // rep_count - nu + 1, loops counted once
  long long betti_loops_twice = 0;  // same with loop representatives doubled
  std::vector<std::size_t> kappa;
  std::vector<std::size_t> beta_v;
  std::size_t beta_plus = 0;
  std::vector<LoopStats> loops;
};

GraphStats betti_and_stats(const CylinderModel& cyl);

/// One site of the guided potential on the cylinder.
struct QSite {
  std::size_t vertex = 0;
  std::vector<int> shift;
  double q = 0.0;
};

/// Finitely supported guided potential with its values in decreasing order
/// (ties broken by vertex index, then shift, for determinism).
struct GuidedPotential {
  std::vector<QSite> entries;  // input order
  std::vector<QSite> ordered;  // by q descending

  std::size_t support_size() const { return entries.size(); }
  int max_shift_norm() const;
  GuidedPotential scaled(double t) const;
};

GuidedPotential guided_potential(const PeriodicGraphSpec& spec);

/// Smith normal form diagonal of an integer matrix given by columns.
/// Returned divisors are non-negative and form a divisibility chain.
std::vector<long long> smith_normal_form_divisors(std::vector<std::vector<long long>> columns,
                                                  std::size_t rows);

}  // namespace guided
