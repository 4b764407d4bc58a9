#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <string>

#include "doctest.h"
#include "guided/graph.hpp"

using namespace guided;

namespace {

const char* kSquare = R"({
  "dim_total": 2, "dim_guided": 1,
  "vertices": [{"id": "v", "W": 0.0}],
  "edges": [
    {"from": "v", "to": "v", "index": [1, 0]},
    {"from": "v", "to": "v", "index": [0, 1]}
  ],
  "guided_potential": [{"vertex": "v", "shift": [0], "Q": 3.0}]
})";

const char* kChain = R"({
  "dim_total": 2, "dim_guided": 1,
  "vertices": [{"id": "a", "W": 0.0}, {"id": "b", "W": 0.0}],
  "edges": [
    {"from": "a", "to": "b", "index": [0, 0]},
    {"from": "b", "to": "a", "index": [1, 0]},
    {"from": "a", "to": "a", "index": [0, 1]},
    {"from": "b", "to": "b", "index": [0, 1]}
  ],
  "guided_potential": [{"vertex": "a", "shift": [0], "Q": 1.0}]
})";

ErrorCode code_of(const std::string& doc) {
  try {
    (void)load_and_validate(doc);
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected a validation error");
  return ErrorCode::IoFailure;
}

}  // namespace

TEST_CASE("square lattice document validates") {
  const PeriodicGraphSpec spec = load_and_validate(kSquare);
  CHECK(spec.dim_total == 2);
  CHECK(spec.dim_guided == 1);
  CHECK(spec.vertices.size() == 1);
  CHECK(spec.edges.size() == 2);
  CHECK(spec.q_entries.size() == 1);
  CHECK(spec.warnings.empty());
}

TEST_CASE("validation failures carry spec codes and paths") {
  CHECK(code_of("not json at all") == ErrorCode::MalformedDocument);
  CHECK(code_of("[]") == ErrorCode::MalformedDocument);

  // d == d~ is rejected
  std::string doc = kSquare;
  CHECK(code_of(R"({"dim_total": 2, "dim_guided": 2, "vertices": [{"id":"v","W":0}],
                    "edges": [], "guided_potential": []})") == ErrorCode::BadDimensions);
  CHECK(code_of(R"({"dim_total": 1, "dim_guided": 0, "vertices": [{"id":"v","W":0}],
                    "edges": [], "guided_potential": []})") == ErrorCode::BadDimensions);

  CHECK(code_of(R"({"dim_total": 2, "dim_guided": 1,
                    "vertices": [{"id":"v","W":0},{"id":"v","W":1}],
                    "edges": [], "guided_potential": []})") == ErrorCode::DuplicateVertexId);

  CHECK(code_of(R"({"dim_total": 2, "dim_guided": 1, "vertices": [{"id":"v","W":0}],
                    "edges": [{"from":"v","to":"w","index":[0,0]}],
                    "guided_potential": []})") == ErrorCode::DanglingEdgeEndpoint);

  CHECK(code_of(R"({"dim_total": 2, "dim_guided": 1, "vertices": [{"id":"v","W":0}],
                    "edges": [], "guided_potential": [{"vertex":"v","shift":[0],"Q":0.0}]})") ==
        ErrorCode::NonPositiveQ);

  // wrong index length
  CHECK(code_of(R"({"dim_total": 2, "dim_guided": 1, "vertices": [{"id":"v","W":0}],
                    "edges": [{"from":"v","to":"v","index":[1]}],
                    "guided_potential": []})") == ErrorCode::MalformedDocument);

  // duplicate (vertex, shift) pair
  CHECK(code_of(R"({"dim_total": 2, "dim_guided": 1, "vertices": [{"id":"v","W":0}],
                    "edges": [],
                    "guided_potential": [{"vertex":"v","shift":[0],"Q":1.0},
                                          {"vertex":"v","shift":[0],"Q":2.0}]})") ==
        ErrorCode::MalformedDocument);

  try {
    (void)load_and_validate(R"({"dim_total": 2, "dim_guided": 1, "vertices": [{"id":"v","W":0}],
                    "edges": [{"from":"v","to":"w","index":[0,0]}], "guided_potential": []})");
  } catch (const Error& e) {
    CHECK(e.path() == "/edges/0/to");
  }
}

TEST_CASE("zero-index loop warns but validates") {
  const PeriodicGraphSpec spec = load_and_validate(R"({
    "dim_total": 2, "dim_guided": 1, "vertices": [{"id": "v", "W": 0.0}],
    "edges": [
      {"from": "v", "to": "v", "index": [0, 0]},
      {"from": "v", "to": "v", "index": [1, 0]},
      {"from": "v", "to": "v", "index": [0, 1]}
    ],
    "guided_potential": []})");
  REQUIRE(spec.warnings.size() == 1);
  const CylinderModel cyl = build_cylinder(spec);
  CHECK(cyl.kappa[0] == 6);   // the zero loop still counts twice
  CHECK(cyl.beta_v[0] == 2);  // but is no bridge
  CHECK(cyl.loops[0].kappa_jj() == 2);
}

TEST_CASE("square lattice cylinder statistics") {
  const CylinderModel cyl = build_cylinder(load_and_validate(kSquare));
  CHECK(cyl.nu == 1);
  CHECK(cyl.edges.size() == 4);  // oriented closure doubles the representatives
  CHECK(cyl.kappa[0] == 4);
  CHECK(cyl.beta_v[0] == 2);
  CHECK(cyl.beta_plus == 2);
  REQUIRE(cyl.loops[0].beta_jj() == 2);
  CHECK(cyl.loops[0].kappa_jj() == 0);
  // the two oriented bridge loops carry opposite indices
  const auto& idx = cyl.loops[0].bridge_loop_indices;
  CHECK(idx[0][0] + idx[1][0] == 0);
  CHECK(idx[0][0] != 0);
}

TEST_CASE("orientation closure pairs every edge with its reverse") {
  for (const char* doc : {kSquare, kChain}) {
    const CylinderModel cyl = build_cylinder(load_and_validate(doc));
    for (const OrientedEdge& e : cyl.edges) {
      bool found = false;
      for (const OrientedEdge& r : cyl.edges) {
        if (r.tail != e.head || r.head != e.tail) continue;
        bool neg = true;
        for (std::size_t k = 0; k < e.tau_par.size(); ++k)
          neg = neg && r.tau_par[k] == -e.tau_par[k];
        for (std::size_t k = 0; k < e.tau_perp.size(); ++k)
          neg = neg && r.tau_perp[k] == -e.tau_perp[k];
        if (neg && r.rep == e.rep && r.reversed != e.reversed) found = true;
      }
      CHECK(found);
    }
  }
}

TEST_CASE("two-vertex chain has bridges but no bridge loops") {
  const CylinderModel cyl = build_cylinder(load_and_validate(kChain));
  CHECK(cyl.nu == 2);
  CHECK(cyl.kappa[0] == 4);
  CHECK(cyl.kappa[1] == 4);
  CHECK(cyl.beta_v[0] == 1);
  CHECK(cyl.beta_v[1] == 1);
  CHECK(cyl.beta_plus == 1);
  CHECK(cyl.loops[0].beta_jj() == 0);
  CHECK(cyl.loops[1].beta_jj() == 0);
}

TEST_CASE("degree identity: kappa = modified degree + bridge count") {
  for (const char* doc : {kSquare, kChain}) {
    const CylinderModel cyl = build_cylinder(load_and_validate(doc));
    for (std::size_t v = 0; v < cyl.nu; ++v)
      CHECK(cyl.kappa[v] == cyl.modified_degree(v) + cyl.beta_v[v]);
  }
}

TEST_CASE("degrees sum to the oriented edge count") {
  for (const char* doc : {kSquare, kChain}) {
    const CylinderModel cyl = build_cylinder(load_and_validate(doc));
    std::size_t total = 0;
    for (std::size_t v = 0; v < cyl.nu; ++v) total += cyl.kappa[v];
    CHECK(total == cyl.edges.size());
    CHECK(cyl.edges.size() == 2 * cyl.rep_count);
  }
}

TEST_CASE("betti numbers under both loop conventions") {
  const GraphStats square = betti_and_stats(build_cylinder(load_and_validate(kSquare)));
  CHECK(square.betti == 2);
  CHECK(square.betti_loops_twice == 4);

  const GraphStats chain = betti_and_stats(build_cylinder(load_and_validate(kChain)));
  CHECK(chain.betti == 3);

  // path quotient: two vertices, one edge, a tree
  const GraphStats path = betti_and_stats(build_cylinder(load_and_validate(R"({
    "dim_total": 2, "dim_guided": 1,
    "vertices": [{"id": "a", "W": 0}, {"id": "b", "W": 0}],
    "edges": [{"from": "a", "to": "b", "index": [0, 0]}],
    "guided_potential": []})")));
  CHECK(path.betti == 0);
}

TEST_CASE("connectivity of the square lattice") {
  const ConnectivityReport r = connectivity_check(load_and_validate(kSquare));
  CHECK(r.connected);
  CHECK(r.quotient_connected);
  CHECK(r.index_lattice_rank == 2);
  for (long long d : r.elementary_divisors) CHECK(d == 1);
}

TEST_CASE("index sublattice is detected") {
  const ConnectivityReport r = connectivity_check(load_and_validate(R"({
    "dim_total": 2, "dim_guided": 1, "vertices": [{"id": "v", "W": 0}],
    "edges": [
      {"from": "v", "to": "v", "index": [2, 0]},
      {"from": "v", "to": "v", "index": [0, 1]}
    ],
    "guided_potential": []})"));
  CHECK(!r.connected);
  CHECK(r.quotient_connected);
  CHECK(r.index_lattice_rank == 2);
  CHECK(r.elementary_divisors == std::vector<long long>{1, 2});
}

TEST_CASE("disconnected quotient is detected") {
  const ConnectivityReport r = connectivity_check(load_and_validate(R"({
    "dim_total": 2, "dim_guided": 1,
    "vertices": [{"id": "a", "W": 0}, {"id": "b", "W": 0}],
    "edges": [
      {"from": "a", "to": "a", "index": [1, 0]},
      {"from": "a", "to": "a", "index": [0, 1]},
      {"from": "b", "to": "b", "index": [1, 0]},
      {"from": "b", "to": "b", "index": [0, 1]}
    ],
    "guided_potential": []})"));
  CHECK(!r.connected);
  CHECK(!r.quotient_connected);
}

TEST_CASE("chain lattice is connected through a mixed cycle basis") {
  const ConnectivityReport r = connectivity_check(load_and_validate(kChain));
  CHECK(r.connected);
  CHECK(r.index_lattice_rank == 2);
}

TEST_CASE("smith normal form divisor chains") {
  CHECK(smith_normal_form_divisors({{1, 0}, {0, 1}}, 2) == std::vector<long long>{1, 1});
  CHECK(smith_normal_form_divisors({{2, 0}, {0, 3}}, 2) == std::vector<long long>{1, 6});
  CHECK(smith_normal_form_divisors({{2, 0}, {0, 2}}, 2) == std::vector<long long>{2, 2});
  CHECK(smith_normal_form_divisors({}, 2).empty());
  CHECK(smith_normal_form_divisors({{4, 6}}, 2) == std::vector<long long>{2});
}

TEST_CASE("guided potential orders values decreasingly with stable ties") {
  const PeriodicGraphSpec spec = load_and_validate(R"({
    "dim_total": 2, "dim_guided": 1, "vertices": [{"id": "v", "W": 0}],
    "edges": [
      {"from": "v", "to": "v", "index": [1, 0]},
      {"from": "v", "to": "v", "index": [0, 1]}
    ],
    "guided_potential": [
      {"vertex": "v", "shift": [2], "Q": 1.5},
      {"vertex": "v", "shift": [0], "Q": 3.0},
      {"vertex": "v", "shift": [1], "Q": 1.5}
    ]})");
  const GuidedPotential q = guided_potential(spec);
  REQUIRE(q.support_size() == 3);
  CHECK(q.ordered[0].q == 3.0);
  CHECK(q.ordered[1].q == 1.5);
  CHECK(q.ordered[1].shift == std::vector<int>{1});  // tie broken by shift
  CHECK(q.ordered[2].shift == std::vector<int>{2});
  CHECK(q.max_shift_norm() == 2);

  const GuidedPotential scaled = q.scaled(10.0);
  CHECK(scaled.ordered[0].q == 30.0);
  CHECK(q.ordered[0].q == 3.0);
}

TEST_CASE("normalization shifts every vertex potential") {
  const CylinderModel cyl = build_cylinder(load_and_validate(kChain));
  const CylinderModel shifted = cyl.with_shifted_w(1.5);
  for (std::size_t v = 0; v < cyl.nu; ++v) CHECK(shifted.w[v] == cyl.w[v] - 1.5);
  CHECK(shifted.kappa == cyl.kappa);
}
