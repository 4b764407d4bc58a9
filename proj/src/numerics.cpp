#include "guided/numerics.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <mutex>
#include <numeric>
#include <thread>

namespace guided {

const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::MalformedDocument: return "MalformedDocument";
    case ErrorCode::DuplicateVertexId: return "DuplicateVertexId";
    case ErrorCode::DanglingEdgeEndpoint: return "DanglingEdgeEndpoint";
    case ErrorCode::NonPositiveQ: return "NonPositiveQ";
    case ErrorCode::BadDimensions: return "BadDimensions";
    case ErrorCode::MalformedInterval: return "MalformedInterval";
    case ErrorCode::ConvergenceFailure: return "ConvergenceFailure";
    case ErrorCode::SupportOutsideWindow: return "SupportOutsideWindow";
    case ErrorCode::IoFailure: return "IoFailure";
  }
  return "UnknownError";
}

void HermitianMatrix::add(const HermitianMatrix& other) {
  for (std::size_t k = 0; k < a_.size(); ++k) a_[k] += other.a_[k];
}

double HermitianMatrix::hermiticity_defect() const {
  double worst = 0.0;
  for (std::size_t i = 0; i < n_; ++i)
    for (std::size_t j = 0; j <= i; ++j)
      worst = std::max(worst, std::abs(a_[i * n_ + j] - std::conj(a_[j * n_ + i])));
  return worst;
}

double HermitianMatrix::frobenius_norm() const {
  double s = 0.0;
  for (const cplx& z : a_) s += std::norm(z);
  return std::sqrt(s);
}

double HermitianMatrix::max_abs() const {
  double worst = 0.0;
  for (const cplx& z : a_) worst = std::max(worst, std::abs(z));
  return worst;
}

namespace {

// Householder reduction of a Hermitian matrix (row-major, full storage) to a
// real symmetric tridiagonal matrix. The reflector vectors and scaling
// factors stay in the strict lower triangle / beta for the back-transform.
// Sub-diagonal entries are made real afterwards by a diagonal phase
// similarity, recorded in `phase`.
void tridiagonalize(std::vector<cplx>& a, std::size_t n, std::vector<double>& d,
                    std::vector<double>& e, std::vector<double>& beta,
                    std::vector<cplx>& subdiag, std::vector<cplx>& phase) {
  d.assign(n, 0.0);
  e.assign(n, 0.0);
  beta.assign(n, 0.0);
  subdiag.assign(n, cplx(0.0, 0.0));
  phase.assign(n, cplx(1.0, 0.0));
  if (n == 0) return;

  std::vector<cplx> v(n), p(n), w(n);

  for (std::size_t k = 0; k + 2 < n; ++k) {
    const std::size_t m = n - k - 1;  // active column length below the diagonal
    double scale = 0.0;
    for (std::size_t i = k + 1; i < n; ++i)
      scale += std::abs(a[i * n + k].real()) + std::abs(a[i * n + k].imag());

    if (scale == 0.0) {
      subdiag[k] = cplx(0.0, 0.0);
      beta[k] = 0.0;
      continue;
    }

    double xnorm2 = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      v[i] = a[(k + 1 + i) * n + k] / scale;
      xnorm2 += std::norm(v[i]);
    }
    const double xnorm = std::sqrt(xnorm2);
    const cplx x0 = v[0];
    const double ax0 = std::abs(x0);
    // Pick the reflection target with the phase of -x0 so cancellation in
    // v[0] = x0 - alpha is impossible.
    const cplx alpha = (ax0 == 0.0) ? cplx(-xnorm, 0.0) : -(x0 / ax0) * xnorm;

    v[0] = x0 - alpha;
    double vnorm2 = 0.0;
    for (std::size_t i = 0; i < m; ++i) vnorm2 += std::norm(v[i]);

    if (vnorm2 == 0.0) {
      subdiag[k] = alpha * scale;
      beta[k] = 0.0;
      for (std::size_t i = k + 1; i < n; ++i) a[i * n + k] = cplx(0.0, 0.0);
      continue;
    }

    const double b = 2.0 / vnorm2;

    // p = b * S v on the trailing block S = a[k+1.., k+1..]
    for (std::size_t i = 0; i < m; ++i) {
      cplx acc(0.0, 0.0);
      const std::size_t row = (k + 1 + i) * n + (k + 1);
      for (std::size_t j = 0; j < m; ++j) acc += a[row + j] * v[j];
      p[i] = b * acc;
    }
    cplx vp(0.0, 0.0);
    for (std::size_t i = 0; i < m; ++i) vp += std::conj(v[i]) * p[i];
    const double kappa = 0.5 * b * vp.real();  // v*Sv is real for Hermitian S
    for (std::size_t i = 0; i < m; ++i) w[i] = p[i] - kappa * v[i];

    // S <- S - v w* - w v*
    for (std::size_t i = 0; i < m; ++i) {
      const std::size_t row = (k + 1 + i) * n + (k + 1);
      for (std::size_t j = 0; j < m; ++j)
        a[row + j] -= v[i] * std::conj(w[j]) + w[i] * std::conj(v[j]);
    }

    subdiag[k] = alpha * scale;
    beta[k] = b;
    for (std::size_t i = 0; i < m; ++i) a[(k + 1 + i) * n + k] = v[i];
  }

  if (n >= 2) subdiag[n - 2] = a[(n - 1) * n + (n - 2)];
  for (std::size_t i = 0; i < n; ++i) d[i] = a[i * n + i].real();

  // Phase the sub-diagonal real and non-negative.
  for (std::size_t k = 0; k + 1 < n; ++k) {
    const cplx ec = subdiag[k];
    const double mag = std::abs(ec);
    e[k] = mag;
    phase[k + 1] = (mag == 0.0) ? phase[k] : phase[k] * (std::conj(ec) / mag);
  }
}

// Implicit-shift QL iteration on a real symmetric tridiagonal matrix.
// e[i] couples i and i+1. Rotations are accumulated into the complex n x n
// column-major matrix z when it is non-null.
void ql_implicit(std::vector<double>& d, std::vector<double>& e, std::size_t n,
                 std::vector<cplx>* z) {
  if (n <= 1) return;
  const double eps = std::numeric_limits<double>::epsilon();
  const int max_sweeps = 64;

  for (std::size_t l = 0; l < n; ++l) {
    int iter = 0;
    while (true) {
      std::size_t m = l;
      while (m + 1 < n) {
        const double dd = std::abs(d[m]) + std::abs(d[m + 1]);
        if (std::abs(e[m]) <= eps * dd) break;
        ++m;
      }
      if (m == l) break;
      if (++iter > max_sweeps)
        throw Error(ErrorCode::ConvergenceFailure,
                    "implicit QL exceeded " + std::to_string(max_sweeps) + " sweeps");

      double g = (d[l + 1] - d[l]) / (2.0 * e[l]);
      double r = std::hypot(g, 1.0);
      g = d[m] - d[l] + e[l] / (g + std::copysign(r, g));
      double s = 1.0, c = 1.0, p = 0.0;

      bool underflow_restart = false;
      for (std::size_t ii = m; ii-- > l;) {
        const std::size_t i = ii;
        double f = s * e[i];
        const double bb = c * e[i];
        r = std::hypot(f, g);
        e[i + 1] = r;
        if (r == 0.0) {
          d[i + 1] -= p;
          e[m] = 0.0;
          underflow_restart = true;
          break;
        }
        s = f / r;
        c = g / r;
        g = d[i + 1] - p;
        r = (d[i] - g) * s + 2.0 * c * bb;
        p = s * r;
        d[i + 1] = g + p;
        g = c * r - bb;

        if (z) {
          cplx* zi = z->data() + i * n;
          cplx* zj = z->data() + (i + 1) * n;
          for (std::size_t k = 0; k < n; ++k) {
            const cplx t = zj[k];
            zj[k] = s * zi[k] + c * t;
            zi[k] = c * zi[k] - s * t;
          }
        }
      }
      if (underflow_restart) continue;
      d[l] -= p;
      e[l] = g;
      e[m] = 0.0;
    }
  }
}

}  // namespace

EighResult eigh(const HermitianMatrix& a, bool want_vectors) {
  const std::size_t n = a.size();
  EighResult out;
  out.n = n;
  if (n == 0) return out;

  std::vector<cplx> work = a.data();
  std::vector<double> d, e, beta;
  std::vector<cplx> subdiag, phase;
  tridiagonalize(work, n, d, e, beta, subdiag, phase);

  std::vector<cplx> z;
  if (want_vectors) {
    z.assign(n * n, cplx(0.0, 0.0));
    for (std::size_t j = 0; j < n; ++j) z[j * n + j] = cplx(1.0, 0.0);
  }

  ql_implicit(d, e, n, want_vectors ? &z : nullptr);

  if (want_vectors) {
    // Undo the phase similarity, then apply the Householder reflectors in
    // reverse order.
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t i = 0; i < n; ++i) z[j * n + i] *= std::conj(phase[i]);

    for (std::size_t kk = n >= 2 ? n - 2 : 0; kk-- > 0;) {
      const std::size_t k = kk;
      if (beta[k] == 0.0) continue;
      const std::size_t m = n - k - 1;
      for (std::size_t j = 0; j < n; ++j) {
        cplx* col = z.data() + j * n;
        cplx acc(0.0, 0.0);
        for (std::size_t i = 0; i < m; ++i)
          acc += std::conj(work[(k + 1 + i) * n + k]) * col[k + 1 + i];
        acc *= beta[k];
        for (std::size_t i = 0; i < m; ++i) col[k + 1 + i] -= acc * work[(k + 1 + i) * n + k];
      }
    }
  }

  // Ascending sort, stable in the original tridiagonal order.
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t i, std::size_t j) { return d[i] < d[j]; });

  out.values.resize(n);
  for (std::size_t j = 0; j < n; ++j) out.values[j] = d[order[j]];
  if (want_vectors) {
    out.vectors.assign(n * n, cplx(0.0, 0.0));
    for (std::size_t j = 0; j < n; ++j)
      std::copy(z.begin() + order[j] * n, z.begin() + (order[j] + 1) * n,
                out.vectors.begin() + j * n);
  }
  return out;
}

std::vector<double> eigvals(const HermitianMatrix& a) { return eigh(a, false).values; }

namespace {
constexpr double kPi = 3.14159265358979323846;
}

TorusGrid::TorusGrid(std::size_t dim, std::size_t points_per_dim) : dim_(dim), n_(points_per_dim) {
  if (n_ == 0) throw Error(ErrorCode::BadDimensions, "torus grid needs at least one point");
  size_ = 1;
  for (std::size_t k = 0; k < dim_; ++k) size_ *= n_;
  coords_.resize(n_);
  // Even N: -pi + 2*pi*(m+1)/N covers (-pi, pi] and hits both 0 and pi
  // exactly. Odd N: a half-step offset keeps 0 on the grid.
  const double offset = (n_ % 2 == 0) ? 1.0 : 0.5;
  for (std::size_t m = 0; m < n_; ++m)
    coords_[m] = -kPi + 2.0 * kPi * ((static_cast<double>(m) + offset) / static_cast<double>(n_));
}

double TorusGrid::spacing() const { return 2.0 * kPi / static_cast<double>(n_); }

std::vector<double> TorusGrid::point(std::size_t flat) const {
  std::vector<double> out(dim_);
  point_into(flat, out);
  return out;
}

void TorusGrid::point_into(std::size_t flat, std::vector<double>& out) const {
  out.resize(dim_);
  for (std::size_t k = dim_; k-- > 0;) {
    out[k] = coords_[flat % n_];
    flat /= n_;
  }
}

std::size_t TorusGrid::neighbor(std::size_t flat, std::size_t axis, int step) const {
  // axis 0 is the most significant digit of the flat index
  std::size_t stride = 1;
  for (std::size_t k = dim_ - 1; k > axis; --k) stride *= n_;
  const std::size_t digit = (flat / stride) % n_;
  const std::size_t shifted =
      (digit + static_cast<std::size_t>(static_cast<long long>(n_) + step)) % n_;
  return flat + (shifted - digit) * stride;
}

namespace {

struct GridScan {
  double min_value = std::numeric_limits<double>::infinity();
  double max_value = -std::numeric_limits<double>::infinity();
  std::size_t argmin = 0;
  std::size_t argmax = 0;
};

// One-pass parabolic polish around a grid extremum. Returns the candidate
// point; the caller re-evaluates f there and keeps the better value.
std::vector<double> parabola_candidate(const TorusGrid& grid,
                                       const std::vector<double>& values, std::size_t at,
                                       bool for_min) {
  std::vector<double> theta = grid.point(at);
  if (grid.points_per_dim() < 3) return theta;
  const double h = grid.spacing();
  for (std::size_t axis = 0; axis < grid.dim(); ++axis) {
    const double f0 = values[at];
    const double fm = values[grid.neighbor(at, axis, -1)];
    const double fp = values[grid.neighbor(at, axis, +1)];
    const double denom = fm - 2.0 * f0 + fp;
    if (for_min ? denom <= 0.0 : denom >= 0.0) continue;
    double delta = 0.5 * h * (fm - fp) / denom;
    delta = std::clamp(delta, -0.5 * h, 0.5 * h);
    theta[axis] += delta;
    if (theta[axis] > kPi) theta[axis] -= 2.0 * kPi;
    if (theta[axis] <= -kPi) theta[axis] += 2.0 * kPi;
  }
  return theta;
}

}  // namespace

TorusExtrema minimize_on_torus(const std::function<double(const std::vector<double>&)>& f,
                               const TorusGrid& grid, bool refine) {
  std::vector<double> values(grid.size());
  parallel_for(grid.size(), [&](std::size_t i) {
    thread_local std::vector<double> theta;
    grid.point_into(i, theta);
    values[i] = f(theta);
  });

  GridScan scan;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (values[i] < scan.min_value) {
      scan.min_value = values[i];
      scan.argmin = i;
    }
    if (values[i] > scan.max_value) {
      scan.max_value = values[i];
      scan.argmax = i;
    }
  }

  TorusExtrema out;
  out.min_value = scan.min_value;
  out.max_value = scan.max_value;
  out.argmin = grid.point(scan.argmin);
  out.argmax = grid.point(scan.argmax);

  if (refine) {
    const std::vector<double> cand_min = parabola_candidate(grid, values, scan.argmin, true);
    if (cand_min != out.argmin) {
      const double v = f(cand_min);
      if (v < out.min_value) {
        out.min_value = v;
        out.argmin = cand_min;
      }
    }
    const std::vector<double> cand_max = parabola_candidate(grid, values, scan.argmax, false);
    if (cand_max != out.argmax) {
      const double v = f(cand_max);
      if (v > out.max_value) {
        out.max_value = v;
        out.argmax = cand_max;
      }
    }
  }
  return out;
}

IntervalSet IntervalSet::from_intervals(std::vector<Interval> intervals) {
  for (const Interval& iv : intervals)
    if (!(iv.lo <= iv.hi))
      throw Error(ErrorCode::MalformedInterval,
                  "[" + std::to_string(iv.lo) + ", " + std::to_string(iv.hi) + "]");
  std::sort(intervals.begin(), intervals.end(), [](const Interval& a, const Interval& b) {
    return a.lo != b.lo ? a.lo < b.lo : a.hi < b.hi;
  });
  IntervalSet out;
  for (const Interval& iv : intervals) {
    if (!out.components_.empty() && iv.lo <= out.components_.back().hi) {
      out.components_.back().hi = std::max(out.components_.back().hi, iv.hi);
    } else {
      out.components_.push_back(iv);
    }
  }
  return out;
}

double IntervalSet::measure() const {
  double total = 0.0;
  for (const Interval& iv : components_) total += iv.length();
  return total;
}

bool IntervalSet::contains(double x) const {
  for (const Interval& iv : components_)
    if (iv.lo <= x && x <= iv.hi) return true;
  return false;
}

std::vector<Interval> IntervalSet::gaps() const {
  std::vector<Interval> out;
  for (std::size_t i = 0; i + 1 < components_.size(); ++i)
    out.push_back({components_[i].hi, components_[i + 1].lo});
  return out;
}

UnionMeasure union_measure(const std::vector<Interval>& intervals) {
  UnionMeasure out;
  out.normalized = IntervalSet::from_intervals(intervals);
  out.measure = out.normalized.measure();
  return out;
}

std::size_t worker_count() {
  if (const char* env = std::getenv("GUIDED_BANDS_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && v > 0) return static_cast<std::size_t>(v);
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<std::size_t>(hw);
}

namespace {
thread_local bool inside_parallel_region = false;
}

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn) {
  const std::size_t workers = std::min(worker_count(), n);
  // nested sweeps run serially inside their worker
  if (workers <= 1 || inside_parallel_region) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      inside_parallel_region = true;
      while (true) {
        const std::size_t i = next.fetch_add(1);
        if (i >= n) return;
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  }
  for (std::thread& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace guided
