#include "guided/graph.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <numeric>
#include <sstream>
#include <unordered_map>

#include "json.hpp"

namespace guided {

namespace {

using nlohmann::json;

std::string json_path(const std::string& base, std::size_t i) {
  return base + "/" + std::to_string(i);
}

const json& require(const json& obj, const char* key, const std::string& path) {
  auto it = obj.find(key);
  if (it == obj.end())
    throw Error(ErrorCode::MalformedDocument, std::string("missing key '") + key + "'", path);
  return *it;
}

int require_int(const json& obj, const char* key, const std::string& path) {
  const json& v = require(obj, key, path);
  if (!v.is_number_integer())
    throw Error(ErrorCode::MalformedDocument, std::string("'") + key + "' must be an integer",
                path);
  return v.get<int>();
}

double require_number(const json& obj, const char* key, const std::string& path) {
  const json& v = require(obj, key, path);
  if (!v.is_number())
    throw Error(ErrorCode::MalformedDocument, std::string("'") + key + "' must be a number", path);
  return v.get<double>();
}

std::string require_string(const json& obj, const char* key, const std::string& path) {
  const json& v = require(obj, key, path);
  if (!v.is_string())
    throw Error(ErrorCode::MalformedDocument, std::string("'") + key + "' must be a string", path);
  return v.get<std::string>();
}

std::vector<int> require_int_array(const json& obj, const char* key, std::size_t expected,
                                   const std::string& path) {
  const json& v = require(obj, key, path);
  if (!v.is_array())
    throw Error(ErrorCode::MalformedDocument, std::string("'") + key + "' must be an array", path);
  if (v.size() != expected)
    throw Error(ErrorCode::MalformedDocument,
                std::string("'") + key + "' must have length " + std::to_string(expected), path);
  std::vector<int> out;
  out.reserve(expected);
  for (const json& x : v) {
    if (!x.is_number_integer())
      throw Error(ErrorCode::MalformedDocument, std::string("'") + key + "' entries must be integers",
                  path);
    out.push_back(x.get<int>());
  }
  return out;
}

bool all_zero(const std::vector<int>& v) {
  return std::all_of(v.begin(), v.end(), [](int x) { return x == 0; });
}

}  // namespace

PeriodicGraphSpec load_and_validate(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::MalformedDocument, e.what());
  }
  if (!doc.is_object()) throw Error(ErrorCode::MalformedDocument, "top-level value must be an object");

  PeriodicGraphSpec spec;
  spec.dim_total = require_int(doc, "dim_total", "/dim_total");
  spec.dim_guided = require_int(doc, "dim_guided", "/dim_guided");
  if (spec.dim_total < 2)
    throw Error(ErrorCode::BadDimensions, "dim_total must be at least 2", "/dim_total");
  if (spec.dim_guided < 1 || spec.dim_guided >= spec.dim_total)
    throw Error(ErrorCode::BadDimensions,
                "dim_guided must satisfy 1 <= dim_guided < dim_total", "/dim_guided");

  const json& vertices = require(doc, "vertices", "/vertices");
  if (!vertices.is_array() || vertices.empty())
    throw Error(ErrorCode::MalformedDocument, "'vertices' must be a non-empty array", "/vertices");
  std::unordered_map<std::string, std::size_t> by_id;
  for (std::size_t i = 0; i < vertices.size(); ++i) {
    const std::string path = json_path("/vertices", i);
    if (!vertices[i].is_object())
      throw Error(ErrorCode::MalformedDocument, "vertex must be an object", path);
    Vertex v;
    v.id = require_string(vertices[i], "id", path);
    v.w = require_number(vertices[i], "W", path);
    if (by_id.count(v.id))
      throw Error(ErrorCode::DuplicateVertexId, "vertex id '" + v.id + "' already declared", path);
    by_id.emplace(v.id, spec.vertices.size());
    spec.vertices.push_back(std::move(v));
  }

  const json& edges = require(doc, "edges", "/edges");
  if (!edges.is_array())
    throw Error(ErrorCode::MalformedDocument, "'edges' must be an array", "/edges");
  for (std::size_t i = 0; i < edges.size(); ++i) {
    const std::string path = json_path("/edges", i);
    if (!edges[i].is_object())
      throw Error(ErrorCode::MalformedDocument, "edge must be an object", path);
    const std::string from = require_string(edges[i], "from", path);
    const std::string to = require_string(edges[i], "to", path);
    auto ft = by_id.find(from);
    auto tt = by_id.find(to);
    if (ft == by_id.end())
      throw Error(ErrorCode::DanglingEdgeEndpoint, "unknown vertex '" + from + "'", path + "/from");
    if (tt == by_id.end())
      throw Error(ErrorCode::DanglingEdgeEndpoint, "unknown vertex '" + to + "'", path + "/to");
    EdgeRep e;
    e.tail = ft->second;
    e.head = tt->second;
    e.index = require_int_array(edges[i], "index", static_cast<std::size_t>(spec.dim_total), path);
    if (e.tail == e.head && all_zero(e.index))
      spec.warnings.push_back("edge " + path +
                              " is a loop with zero index; it contributes to degrees only");
    spec.edges.push_back(std::move(e));
  }

  const json& qs = require(doc, "guided_potential", "/guided_potential");
  if (!qs.is_array())
    throw Error(ErrorCode::MalformedDocument, "'guided_potential' must be an array",
                "/guided_potential");
  std::vector<std::pair<std::size_t, std::vector<int>>> seen;
  for (std::size_t i = 0; i < qs.size(); ++i) {
    const std::string path = json_path("/guided_potential", i);
    if (!qs[i].is_object())
      throw Error(ErrorCode::MalformedDocument, "guided potential entry must be an object", path);
    const std::string id = require_string(qs[i], "vertex", path);
    auto it = by_id.find(id);
    if (it == by_id.end())
      throw Error(ErrorCode::DanglingEdgeEndpoint, "unknown vertex '" + id + "'", path + "/vertex");
    QEntryRaw entry;
    entry.vertex = it->second;
    entry.shift = require_int_array(qs[i], "shift",
                                    static_cast<std::size_t>(spec.perp_dim()), path);
    entry.q = require_number(qs[i], "Q", path);
    if (!(entry.q > 0.0))
      throw Error(ErrorCode::NonPositiveQ, "Q must be strictly positive", path + "/Q");
    const auto key = std::make_pair(entry.vertex, entry.shift);
    if (std::find(seen.begin(), seen.end(), key) != seen.end())
      throw Error(ErrorCode::MalformedDocument, "duplicate (vertex, shift) guided entry", path);
    seen.push_back(key);
    spec.q_entries.push_back(std::move(entry));
  }

  return spec;
}

PeriodicGraphSpec load_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoFailure, "cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return load_and_validate(buf.str());
}

CylinderModel CylinderModel::with_shifted_w(double c) const {
  CylinderModel out = *this;
  for (double& x : out.w) x -= c;
  return out;
}

CylinderModel build_cylinder(const PeriodicGraphSpec& spec) {
  CylinderModel cyl;
  cyl.nu = spec.vertices.size();
  cyl.dim_guided = spec.dim_guided;
  cyl.dim_perp = spec.perp_dim();
  cyl.vertex_ids.reserve(cyl.nu);
  cyl.w.reserve(cyl.nu);
  for (const Vertex& v : spec.vertices) {
    cyl.vertex_ids.push_back(v.id);
    cyl.w.push_back(v.w);
  }
  cyl.rep_count = spec.edges.size();

  const auto split = [&](const std::vector<int>& index, bool negate) {
    OrientedEdge e;
    e.tau_par.assign(index.begin(), index.begin() + spec.dim_guided);
    e.tau_perp.assign(index.begin() + spec.dim_guided, index.end());
    if (negate) {
      for (int& x : e.tau_par) x = -x;
      for (int& x : e.tau_perp) x = -x;
    }
    e.is_bridge = !all_zero(e.tau_par);
    return e;
  };

  // Oriented closure: forward representatives in input order, then the
  // reversed copies in the same order.
  for (std::size_t r = 0; r < spec.edges.size(); ++r) {
    OrientedEdge e = split(spec.edges[r].index, false);
    e.tail = spec.edges[r].tail;
    e.head = spec.edges[r].head;
    e.rep = r;
    e.reversed = false;
    cyl.edges.push_back(std::move(e));
  }
  for (std::size_t r = 0; r < spec.edges.size(); ++r) {
    OrientedEdge e = split(spec.edges[r].index, true);
    e.tail = spec.edges[r].head;
    e.head = spec.edges[r].tail;
    e.rep = r;
    e.reversed = true;
    cyl.edges.push_back(std::move(e));
    if (spec.edges[r].tail == spec.edges[r].head) ++cyl.loop_rep_count;
  }

  cyl.kappa.assign(cyl.nu, 0);
  cyl.beta_v.assign(cyl.nu, 0);
  cyl.loops.assign(cyl.nu, LoopStats{});
  for (const OrientedEdge& e : cyl.edges) {
    ++cyl.kappa[e.tail];
    if (e.is_bridge) ++cyl.beta_v[e.tail];
    if (e.tail == e.head && all_zero(e.tau_perp)) {
      if (e.is_bridge)
        cyl.loops[e.tail].bridge_loop_indices.push_back(e.tau_par);
      else
        ++cyl.loops[e.tail].zero_loops;
    }
  }
  cyl.beta_plus = cyl.beta_v.empty() ? 0 : *std::max_element(cyl.beta_v.begin(), cyl.beta_v.end());
  return cyl;
}

std::vector<long long> smith_normal_form_divisors(std::vector<std::vector<long long>> columns,
                                                  std::size_t rows) {
  const std::size_t cols = columns.size();
  auto at = [&](std::size_t r, std::size_t c) -> long long& { return columns[c][r]; };

  std::vector<long long> divisors;
  std::size_t t = 0;
  while (t < rows && t < cols) {
    // pick the smallest nonzero pivot in the trailing block
    std::size_t pr = rows, pc = cols;
    long long best = 0;
    for (std::size_t c = t; c < cols; ++c)
      for (std::size_t r = t; r < rows; ++r) {
        const long long v = std::llabs(at(r, c));
        if (v != 0 && (best == 0 || v < best)) {
          best = v;
          pr = r;
          pc = c;
        }
      }
    if (best == 0) break;
    std::swap(columns[t], columns[pc]);
    for (std::size_t c = t; c < cols; ++c) std::swap(at(t, c), at(pr, c));

    bool reduced = false;
    while (!reduced) {
      reduced = true;
      for (std::size_t r = t + 1; r < rows; ++r) {
        if (at(r, t) == 0) continue;
        const long long q = at(r, t) / at(t, t);
        for (std::size_t c = t; c < cols; ++c) at(r, c) -= q * at(t, c);
        if (at(r, t) != 0) {
          for (std::size_t c = t; c < cols; ++c) std::swap(at(t, c), at(r, c));
          reduced = false;
        }
      }
      for (std::size_t c = t + 1; c < cols; ++c) {
        if (at(t, c) == 0) continue;
        const long long q = at(t, c) / at(t, t);
        for (std::size_t r = t; r < rows; ++r) at(r, c) -= q * at(r, t);
        if (at(t, c) != 0) {
          std::swap(columns[t], columns[c]);
          reduced = false;
        }
      }
      if (reduced) {
        // enforce divisibility: fold any non-multiple into the pivot column
        for (std::size_t c = t + 1; c < cols && reduced; ++c)
          for (std::size_t r = t + 1; r < rows && reduced; ++r)
            if (at(r, c) % at(t, t) != 0) {
              for (std::size_t rr = t; rr < rows; ++rr) at(rr, t) += at(rr, c);
              reduced = false;
            }
      }
    }
    divisors.push_back(std::llabs(at(t, t)));
    ++t;
  }
  return divisors;
}

ConnectivityReport connectivity_check(const PeriodicGraphSpec& spec) {
  ConnectivityReport report;
  const std::size_t nu = spec.vertices.size();

  // BFS over the quotient multigraph; tree edges assign each vertex an
  // integer potential, non-tree edges contribute cycle indices.
  std::vector<std::vector<std::pair<std::size_t, std::size_t>>> adj(nu);  // (edge, neighbour)
  for (std::size_t r = 0; r < spec.edges.size(); ++r) {
    adj[spec.edges[r].tail].push_back({r, spec.edges[r].head});
    adj[spec.edges[r].head].push_back({r, spec.edges[r].tail});
  }

  const std::size_t d = static_cast<std::size_t>(spec.dim_total);
  std::vector<std::vector<long long>> potential(nu, std::vector<long long>(d, 0));
  std::vector<bool> visited(nu, false);
  std::vector<bool> tree_edge(spec.edges.size(), false);
  std::vector<std::size_t> queue;
  visited[0] = true;
  queue.push_back(0);
  for (std::size_t qi = 0; qi < queue.size(); ++qi) {
    const std::size_t u = queue[qi];
    for (const auto& [r, v] : adj[u]) {
      if (visited[v]) continue;
      visited[v] = true;
      tree_edge[r] = true;
      const int sign = (spec.edges[r].tail == u) ? 1 : -1;
      for (std::size_t k = 0; k < d; ++k)
        potential[v][k] = potential[u][k] + sign * spec.edges[r].index[k];
      queue.push_back(v);
    }
  }
  report.quotient_connected = std::all_of(visited.begin(), visited.end(), [](bool b) { return b; });

  std::vector<std::vector<long long>> cycles;
  for (std::size_t r = 0; r < spec.edges.size(); ++r) {
    if (tree_edge[r]) continue;
    const EdgeRep& e = spec.edges[r];
    std::vector<long long> cyc(d, 0);
    bool nonzero = false;
    for (std::size_t k = 0; k < d; ++k) {
      cyc[k] = e.index[k] + potential[e.tail][k] - potential[e.head][k];
      nonzero = nonzero || cyc[k] != 0;
    }
    if (nonzero) cycles.push_back(std::move(cyc));
  }

  report.elementary_divisors = smith_normal_form_divisors(std::move(cycles), d);
  report.index_lattice_rank = static_cast<int>(report.elementary_divisors.size());
  const bool full_lattice =
      report.index_lattice_rank == spec.dim_total &&
      std::all_of(report.elementary_divisors.begin(), report.elementary_divisors.end(),
                  [](long long v) { return v == 1; });
  report.connected = report.quotient_connected && full_lattice;
  return report;
}

GraphStats betti_and_stats(const CylinderModel& cyl) {
  GraphStats stats;
  stats.betti = static_cast<long long>(cyl.rep_count) - static_cast<long long>(cyl.nu) + 1;
  stats.betti_loops_twice = static_cast<long long>(cyl.rep_count + cyl.loop_rep_count) -
                            static_cast<long long>(cyl.nu) + 1;
  stats.kappa = cyl.kappa;
  stats.beta_v = cyl.beta_v;
  stats.beta_plus = cyl.beta_plus;
  stats.loops = cyl.loops;
  return stats;
}

int GuidedPotential::max_shift_norm() const {
  int worst = 0;
  for (const QSite& s : entries)
    for (int x : s.shift) worst = std::max(worst, std::abs(x));
  return worst;
}

GuidedPotential GuidedPotential::scaled(double t) const {
  GuidedPotential out = *this;
  for (QSite& s : out.entries) s.q *= t;
  for (QSite& s : out.ordered) s.q *= t;
  return out;
}

GuidedPotential guided_potential(const PeriodicGraphSpec& spec) {
  GuidedPotential q;
  for (const QEntryRaw& e : spec.q_entries) q.entries.push_back({e.vertex, e.shift, e.q});
  q.ordered = q.entries;
  std::sort(q.ordered.begin(), q.ordered.end(), [](const QSite& a, const QSite& b) {
    if (a.q != b.q) return a.q > b.q;
    if (a.vertex != b.vertex) return a.vertex < b.vertex;
    return a.shift < b.shift;
  });
  return q;
}

}  // namespace guided
