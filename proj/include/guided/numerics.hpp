#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <vector>

#include "guided/errors.hpp"

namespace guided {

using cplx = std::complex<double>;

/// Dense complex Hermitian matrix. Symmetry is enforced by the mutation API
/// (paired off-diagonal writes, real diagonal writes), never repaired after
/// the fact, so A[i][j] == conj(A[j][i]) holds exactly.
class HermitianMatrix {
 public:
  explicit HermitianMatrix(std::size_t n) : n_(n), a_(n * n, cplx(0.0, 0.0)) {}

  std::size_t size() const { return n_; }

  const cplx& operator()(std::size_t i, std::size_t j) const { return a_[i * n_ + j]; }

  /// Adds a real value to the diagonal; the imaginary part stays exactly zero.
  void add_diag(std::size_t i, double value) {
    a_[i * n_ + i] = cplx(a_[i * n_ + i].real() + value, 0.0);
  }

  /// Adds z to (i,j) and conj(z) to (j,i) in one step. Requires i != j.
  void add_coupling(std::size_t i, std::size_t j, cplx z) {
    a_[i * n_ + j] += z;
    a_[j * n_ + i] += std::conj(z);
  }

  /// Entrywise single-add of another matrix of the same size.
  void add(const HermitianMatrix& other);

  double hermiticity_defect() const;
  double frobenius_norm() const;
  double max_abs() const;

  const std::vector<cplx>& data() const { return a_; }

 private:
  std::size_t n_;
  std::vector<cplx> a_;
};

struct EighResult {
  std::vector<double> values;  // ascending
  std::vector<cplx> vectors;   // column-major n*n when requested, else empty
  std::size_t n = 0;

  const cplx* vector(std::size_t j) const { return vectors.data() + j * n; }
};

/// Dense Hermitian eigensolver: unitary Householder reduction to a real
/// symmetric tridiagonal matrix followed by the implicit-shift QL iteration.
/// Eigenvalues come back ascending; eigenvectors (when requested) are
/// orthonormal columns satisfying ||A v - lambda v|| <= 1e-10 ||A||.
EighResult eigh(const HermitianMatrix& a, bool want_vectors);

/// Eigenvalues only.
std::vector<double> eigvals(const HermitianMatrix& a);

/// Points of a uniform grid on the torus (-pi, pi]^dim. The grid always
/// contains theta = 0 exactly; for even points_per_dim it also contains the
/// corner with every coordinate equal to pi.
class TorusGrid {
 public:
  TorusGrid(std::size_t dim, std::size_t points_per_dim);

  std::size_t dim() const { return dim_; }
  std::size_t points_per_dim() const { return n_; }
  std::size_t size() const { return size_; }
  double spacing() const;

  double coordinate(std::size_t m) const { return coords_[m]; }
  std::vector<double> point(std::size_t flat) const;
  void point_into(std::size_t flat, std::vector<double>& out) const;

  /// Flat index of the neighbour of `flat` shifted by +-1 along `axis`,
  /// wrapping around the torus.
  std::size_t neighbor(std::size_t flat, std::size_t axis, int step) const;

 private:
  std::size_t dim_;
  std::size_t n_;
  std::size_t size_;
  std::vector<double> coords_;
};

struct TorusExtrema {
  double min_value = 0.0;
  double max_value = 0.0;
  std::vector<double> argmin;
  std::vector<double> argmax;
};

/// Grid extrema of f over the torus, with an optional one-pass three-point
/// parabolic refinement around each grid extremum. Ties break by value then
/// by lexicographic grid index, so the reduction is order-independent.
/// Reported extrema are never worse than the grid extrema.
TorusExtrema minimize_on_torus(const std::function<double(const std::vector<double>&)>& f,
                               const TorusGrid& grid, bool refine);

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  double length() const { return hi - lo; }
};

/// Disjoint ascending closed intervals.
class IntervalSet {
 public:
  IntervalSet() = default;

  /// Normalizes a list of closed intervals: sorts, merges overlapping or
  /// touching ones. Throws MalformedInterval when lo > hi.
  static IntervalSet from_intervals(std::vector<Interval> intervals);

  const std::vector<Interval>& components() const { return components_; }
  double measure() const;
  bool contains(double x) const;

  /// Open gaps between consecutive components.
  std::vector<Interval> gaps() const;

 private:
  std::vector<Interval> components_;
};

struct UnionMeasure {
  IntervalSet normalized;
  double measure = 0.0;
};

UnionMeasure union_measure(const std::vector<Interval>& intervals);

/// Runs fn(i) for i in [0, n), possibly on several worker threads.
/// GUIDED_BANDS_THREADS caps the worker count (0 or unset = hardware).
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

std::size_t worker_count();

}  // namespace guided
