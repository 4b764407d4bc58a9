#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <random>

#include "doctest.h"
#include "guided/numerics.hpp"

using namespace guided;

namespace {

HermitianMatrix random_hermitian(std::size_t n, std::mt19937& rng) {
  std::normal_distribution<double> dist(0.0, 1.0);
  HermitianMatrix a(n);
  for (std::size_t i = 0; i < n; ++i) {
    a.add_diag(i, dist(rng));
    for (std::size_t j = i + 1; j < n; ++j) a.add_coupling(i, j, cplx(dist(rng), dist(rng)));
  }
  return a;
}

double reconstruction_error(const HermitianMatrix& a, const EighResult& r) {
  const std::size_t n = a.size();
  double err2 = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      cplx sum(0.0, 0.0);
      for (std::size_t k = 0; k < n; ++k)
        sum += r.vector(k)[i] * r.values[k] * std::conj(r.vector(k)[j]);
      err2 += std::norm(a(i, j) - sum);
    }
  return std::sqrt(err2);
}

}  // namespace

TEST_CASE("eigh zero matrix") {
  HermitianMatrix a(3);
  const std::vector<double> vals = eigvals(a);
  REQUIRE(vals.size() == 3);
  for (double v : vals) CHECK(v == 0.0);
}

TEST_CASE("eigh 2x2 by hand") {
  HermitianMatrix a(2);
  a.add_diag(0, 2.0);
  a.add_diag(1, 2.0);
  a.add_coupling(0, 1, cplx(-1.0, 0.0));
  const std::vector<double> vals = eigvals(a);
  CHECK(vals[0] == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(vals[1] == doctest::Approx(3.0).epsilon(1e-14));
}

TEST_CASE("eigh 1x1 and complex 2x2") {
  HermitianMatrix a(1);
  a.add_diag(0, 8.0);
  CHECK(eigvals(a)[0] == 8.0);

  HermitianMatrix b(2);
  b.add_coupling(0, 1, cplx(0.0, 1.0));
  const std::vector<double> vals = eigvals(b);
  CHECK(vals[0] == doctest::Approx(-1.0).epsilon(1e-14));
  CHECK(vals[1] == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("eigh residual and reconstruction on random input") {
  std::mt19937 rng(12345);
  for (std::size_t n : {4u, 17u, 60u, 160u, 500u}) {
    const HermitianMatrix a = random_hermitian(n, rng);
    const EighResult r = eigh(a, true);
    REQUIRE(r.values.size() == n);
    for (std::size_t k = 1; k < n; ++k) CHECK(r.values[k - 1] <= r.values[k]);

    const double scale = a.max_abs() * static_cast<double>(n);
    for (std::size_t k = 0; k < n; k += std::max<std::size_t>(1, n / 7)) {
      double res2 = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        cplx acc(0.0, 0.0);
        for (std::size_t j = 0; j < n; ++j) acc += a(i, j) * r.vector(k)[j];
        res2 += std::norm(acc - r.values[k] * r.vector(k)[i]);
      }
      CHECK(std::sqrt(res2) <= 1e-10 * scale);
    }
    CHECK(reconstruction_error(a, r) <= 1e-9 * a.frobenius_norm());
  }
}

TEST_CASE("eigh handles degeneracy, clusters and scale extremes") {
  // identity plus rank-1: an (n-1)-fold degenerate eigenvalue at 1
  std::mt19937 rng(333);
  std::normal_distribution<double> g(0.0, 1.0);
  const std::size_t n = 24;
  std::vector<cplx> v(n);
  for (cplx& z : v) z = cplx(g(rng), g(rng));
  HermitianMatrix a(n);
  for (std::size_t i = 0; i < n; ++i) {
    a.add_diag(i, 1.0 + std::norm(v[i]));
    for (std::size_t j = i + 1; j < n; ++j) a.add_coupling(i, j, v[i] * std::conj(v[j]));
  }
  const std::vector<double> vals = eigvals(a);
  double norm2 = 0.0;
  for (const cplx& z : v) norm2 += std::norm(z);
  for (std::size_t k = 0; k + 1 < n; ++k) CHECK(vals[k] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(vals[n - 1] == doctest::Approx(1.0 + norm2).epsilon(1e-12));

  // scale invariance far below and above 1
  for (double scale : {1e-150, 1.0, 1e120}) {
    HermitianMatrix m(2);
    m.add_diag(0, 2.0 * scale);
    m.add_diag(1, 2.0 * scale);
    m.add_coupling(0, 1, cplx(-scale, 0.0));
    const std::vector<double> mv = eigvals(m);
    CHECK(std::abs(mv[0] - scale) <= 1e-12 * scale);
    CHECK(std::abs(mv[1] - 3.0 * scale) <= 1e-12 * scale);
  }
}

TEST_CASE("eigh deterministic") {
  std::mt19937 rng(99);
  const HermitianMatrix a = random_hermitian(40, rng);
  const EighResult r1 = eigh(a, true);
  const EighResult r2 = eigh(a, true);
  CHECK(r1.values == r2.values);
  CHECK(r1.vectors == r2.vectors);
}

TEST_CASE("eigenvalue shift bounds for sums of Hermitian pairs") {
  std::mt19937 rng(2024);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 8;
    const HermitianMatrix a = random_hermitian(n, rng);
    const HermitianMatrix b = random_hermitian(n, rng);
    HermitianMatrix sum = a;
    sum.add(b);
    const std::vector<double> va = eigvals(a);
    const std::vector<double> vb = eigvals(b);
    const std::vector<double> vs = eigvals(sum);
    for (std::size_t j = 0; j < n; ++j) {
      CHECK(vs[j] >= va[j] + vb.front() - 1e-10);
      CHECK(vs[j] <= va[j] + vb.back() + 1e-10);
    }
  }
}

TEST_CASE("hermiticity is exact by construction") {
  std::mt19937 rng(5);
  const HermitianMatrix a = random_hermitian(31, rng);
  CHECK(a.hermiticity_defect() == 0.0);
}

TEST_CASE("torus grid contains the symmetry points") {
  const TorusGrid even(1, 64);
  CHECK(even.size() == 64);
  bool has_zero = false, has_pi = false;
  for (std::size_t m = 0; m < 64; ++m) {
    if (even.coordinate(m) == 0.0) has_zero = true;
    if (even.coordinate(m) == 3.14159265358979323846) has_pi = true;
    CHECK(even.coordinate(m) > -3.1416);
    CHECK(even.coordinate(m) <= 3.14159265358979323846);
  }
  CHECK(has_zero);
  CHECK(has_pi);

  const TorusGrid odd(2, 9);
  CHECK(odd.size() == 81);
  bool zero2 = false;
  for (std::size_t i = 0; i < odd.size(); ++i) {
    const std::vector<double> p = odd.point(i);
    if (p[0] == 0.0 && p[1] == 0.0) zero2 = true;
  }
  CHECK(zero2);
}

TEST_CASE("torus grid neighbors wrap") {
  const TorusGrid grid(2, 8);
  const std::size_t at = 0;
  CHECK(grid.neighbor(at, 1, +1) == 1);
  CHECK(grid.neighbor(at, 1, -1) == 7);
  CHECK(grid.neighbor(at, 0, -1) == 7 * 8);
}

TEST_CASE("minimize_on_torus on a cosine") {
  const TorusGrid grid(1, 64);
  const auto f = [](const std::vector<double>& t) { return 4.0 - 2.0 * std::cos(t[0]); };
  const TorusExtrema ext = minimize_on_torus(f, grid, true);
  CHECK(ext.min_value == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(ext.argmin[0] == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(ext.max_value == doctest::Approx(6.0).epsilon(1e-14));
  CHECK(std::abs(ext.argmax[0]) == doctest::Approx(3.14159265358979323846));
}

TEST_CASE("minimize_on_torus constant and separable") {
  const TorusGrid grid1(1, 16);
  const TorusExtrema c = minimize_on_torus([](const std::vector<double>&) { return 2.5; }, grid1, true);
  CHECK(c.min_value == 2.5);
  CHECK(c.max_value == 2.5);

  const TorusGrid grid2(2, 64);
  const auto f = [](const std::vector<double>& t) { return -std::cos(t[0]) - std::cos(t[1]); };
  const TorusExtrema ext = minimize_on_torus(f, grid2, true);
  CHECK(ext.min_value == doctest::Approx(-2.0).epsilon(1e-14));
  CHECK(ext.argmin[0] == doctest::Approx(0.0).epsilon(1e-13));
  CHECK(ext.argmin[1] == doctest::Approx(0.0).epsilon(1e-13));
}

TEST_CASE("refined extrema stay within a Lipschitz step of the grid sweep") {
  // off-grid optimum; L = 3 for cos(3 theta)
  const TorusGrid grid(1, 32);
  const auto f = [](const std::vector<double>& t) { return std::cos(3.0 * t[0] + 0.41); };
  double grid_min = 1e300, grid_max = -1e300;
  for (std::size_t m = 0; m < grid.size(); ++m) {
    grid_min = std::min(grid_min, f(grid.point(m)));
    grid_max = std::max(grid_max, f(grid.point(m)));
  }
  const TorusExtrema ext = minimize_on_torus(f, grid, true);
  const double slack = 3.0 * grid.spacing();
  CHECK(ext.min_value <= grid_min);
  CHECK(ext.min_value >= grid_min - slack);
  CHECK(ext.max_value >= grid_max);
  CHECK(ext.max_value <= grid_max + slack);
}

TEST_CASE("union_measure merges and measures") {
  const UnionMeasure overlap = union_measure({{0.0, 1.0}, {0.5, 2.0}});
  CHECK(overlap.measure == doctest::Approx(2.0));
  CHECK(overlap.normalized.components().size() == 1);

  const UnionMeasure disjoint = union_measure({{2.0, 3.0}, {0.0, 1.0}});
  CHECK(disjoint.measure == doctest::Approx(2.0));
  CHECK(disjoint.normalized.components().size() == 2);
  CHECK(disjoint.normalized.gaps().size() == 1);
  CHECK(disjoint.normalized.gaps()[0].lo == 1.0);

  const double mu1 = 2.0 - std::sqrt(13.0);
  const UnionMeasure band = union_measure({{mu1, mu1 + 4.0}});
  CHECK(band.measure == doctest::Approx(4.0).epsilon(1e-15));

  CHECK_THROWS_AS((void)union_measure({{1.0, 0.0}}), Error);
  try {
    (void)union_measure({{1.0, 0.0}});
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::MalformedInterval);
  }
}

TEST_CASE("interval set membership") {
  const IntervalSet s = IntervalSet::from_intervals({{0.0, 1.0}, {1.0, 2.0}, {5.0, 6.0}});
  CHECK(s.components().size() == 2);  // touching intervals merge
  CHECK(s.contains(1.5));
  CHECK(!s.contains(3.0));
}

TEST_CASE("parallel_for covers every index once") {
  std::vector<int> hits(1000, 0);
  parallel_for(hits.size(), [&](std::size_t i) { hits[i] += 1; });
  for (int h : hits) CHECK(h == 1);
}
