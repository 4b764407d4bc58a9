#include "guided/floquet.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

namespace guided {

namespace {

double dot(const std::vector<int>& tau, const std::vector<double>& theta) {
  double s = 0.0;
  for (std::size_t k = 0; k < tau.size(); ++k) s += tau[k] * theta[k];
  return s;
}

bool all_zero(const std::vector<int>& v) {
  return std::all_of(v.begin(), v.end(), [](int x) { return x == 0; });
}

}  // namespace

Window::Window(std::size_t nu, int perp_dim, int radius)
    : nu_(nu), perp_dim_(perp_dim), radius_(radius) {
  shift_count_ = 1;
  for (int k = 0; k < perp_dim_; ++k) shift_count_ *= static_cast<std::size_t>(2 * radius_ + 1);
}

bool Window::contains(const std::vector<int>& shift) const {
  for (int x : shift)
    if (std::abs(x) > radius_) return false;
  return true;
}

std::size_t Window::index(std::size_t vertex, const std::vector<int>& shift) const {
  std::size_t rank = 0;
  for (int x : shift) rank = rank * static_cast<std::size_t>(2 * radius_ + 1) +
                             static_cast<std::size_t>(x + radius_);
  return rank * nu_ + vertex;
}

std::vector<int> Window::shift_of_rank(std::size_t rank) const {
  std::vector<int> shift(static_cast<std::size_t>(perp_dim_));
  const std::size_t base = static_cast<std::size_t>(2 * radius_ + 1);
  for (std::size_t k = shift.size(); k-- > 0;) {
    shift[k] = static_cast<int>(rank % base) - radius_;
    rank /= base;
  }
  return shift;
}

namespace {

// Quotient fiber over the fundamental vertices. Every unoriented
// representative contributes its conjugate pair at once; representatives
// with equal endpoints are loops here and feed the diagonal as -2 cos.
HermitianMatrix quotient_fiber(const CylinderModel& cyl, bool include_w, bool modified_only,
                               const std::function<double(const OrientedEdge&)>& phase_angle) {
  HermitianMatrix a(cyl.nu);
  for (std::size_t v = 0; v < cyl.nu; ++v) {
    const double degree = modified_only ? static_cast<double>(cyl.modified_degree(v))
                                        : static_cast<double>(cyl.kappa[v]);
    a.add_diag(v, degree);
    if (include_w) a.add_diag(v, cyl.w[v]);
  }
  for (std::size_t r = 0; r < cyl.rep_count; ++r) {
    const OrientedEdge& e = cyl.edges[r];  // forward representatives come first
    if (modified_only && e.is_bridge) continue;
    const double x = phase_angle(e);
    if (e.tail == e.head) {
      a.add_diag(e.tail, -2.0 * std::cos(x));
    } else {
      a.add_coupling(e.tail, e.head, cplx(-std::cos(x), -std::sin(x)));
    }
  }
  return a;
}

}  // namespace

HermitianMatrix full_fiber(const CylinderModel& cyl, const std::vector<double>& theta,
                           bool include_w) {
  return quotient_fiber(cyl, include_w, false, [&](const OrientedEdge& e) {
    double s = dot(e.tau_par, theta);
    for (std::size_t k = 0; k < e.tau_perp.size(); ++k)
      s += e.tau_perp[k] * theta[static_cast<std::size_t>(cyl.dim_guided) + k];
    return s;
  });
}

HermitianMatrix cylinder_bloch_fiber(const CylinderModel& cyl, const std::vector<double>& theta,
                                     const std::vector<double>& phi, bool include_w) {
  return quotient_fiber(cyl, include_w, false, [&](const OrientedEdge& e) {
    return dot(e.tau_par, theta) + dot(e.tau_perp, phi);
  });
}

HermitianMatrix modified_bloch_fiber(const CylinderModel& cyl, const std::vector<double>& phi,
                                     bool include_w) {
  return quotient_fiber(cyl, include_w, true,
                        [&](const OrientedEdge& e) { return dot(e.tau_perp, phi); });
}

namespace {

struct WindowParts {
  HermitianMatrix non_bridge;
  HermitianMatrix bridge;
};

// Shared window assembler. The non-bridge part carries the modified degrees,
// the potential terms and every tau_par == 0 coupling; the bridge part
// carries the bridge counts and the phased bridge couplings. The full
// truncation is their entrywise sum, which keeps the operator split exact
// in floating point.
WindowParts assemble_window(const CylinderModel& cyl, const GuidedPotential* q,
                            const std::vector<double>& theta, const Window& win, bool include_q,
                            bool need_non_bridge, bool need_bridge) {
  WindowParts parts{HermitianMatrix(win.size()), HermitianMatrix(win.size())};

  if (need_non_bridge) {
    for (std::size_t rank = 0; rank < win.shift_count(); ++rank)
      for (std::size_t v = 0; v < cyl.nu; ++v) {
        const std::size_t i = rank * cyl.nu + v;
        parts.non_bridge.add_diag(i, static_cast<double>(cyl.modified_degree(v)));
        parts.non_bridge.add_diag(i, cyl.w[v]);
      }
    if (include_q && q) {
      for (const QSite& site : q->entries) {
        if (!win.contains(site.shift))
          throw Error(ErrorCode::SupportOutsideWindow,
                      "guided potential site outside window of radius " +
                          std::to_string(win.radius()));
        parts.non_bridge.add_diag(win.index(site.vertex, site.shift), -site.q);
      }
    }
  }
  if (need_bridge) {
    for (std::size_t rank = 0; rank < win.shift_count(); ++rank)
      for (std::size_t v = 0; v < cyl.nu; ++v)
        parts.bridge.add_diag(rank * cyl.nu + v, static_cast<double>(cyl.beta_v[v]));
  }

  std::vector<int> target(static_cast<std::size_t>(win.perp_dim()));
  for (std::size_t r = 0; r < cyl.rep_count; ++r) {
    const OrientedEdge& e = cyl.edges[r];
    if (e.is_bridge ? !need_bridge : !need_non_bridge) continue;
    HermitianMatrix& acc = e.is_bridge ? parts.bridge : parts.non_bridge;
    const double x = e.is_bridge ? dot(e.tau_par, theta) : 0.0;
    const bool perp_zero = all_zero(e.tau_perp);

    if (e.tail == e.head && perp_zero) {
      // cylinder loop: one copy per window shift, both orientations folded
      const double diag = -2.0 * std::cos(x);
      for (std::size_t rank = 0; rank < win.shift_count(); ++rank)
        acc.add_diag(rank * cyl.nu + e.tail, diag);
      continue;
    }

    const cplx phase(-std::cos(x), -std::sin(x));
    for (std::size_t rank = 0; rank < win.shift_count(); ++rank) {
      const std::vector<int> shift = win.shift_of_rank(rank);
      bool inside = true;
      for (std::size_t k = 0; k < target.size(); ++k) {
        target[k] = shift[k] + e.tau_perp[k];
        if (std::abs(target[k]) > win.radius()) {
          inside = false;
          break;
        }
      }
      if (!inside) continue;
      acc.add_coupling(rank * cyl.nu + e.tail, win.index(e.head, target), phase);
    }
  }
  return parts;
}

}  // namespace

HermitianMatrix truncated_fiber(const CylinderModel& cyl, const GuidedPotential& q,
                                const std::vector<double>& theta, const Window& window,
                                bool include_q) {
  WindowParts parts = assemble_window(cyl, &q, theta, window, include_q, true, true);
  parts.non_bridge.add(parts.bridge);
  return std::move(parts.non_bridge);
}

HermitianMatrix modified_truncated_fiber(const CylinderModel& cyl, const GuidedPotential& q,
                                         const Window& window, bool include_q) {
  WindowParts parts = assemble_window(cyl, &q, {}, window, include_q, true, false);
  return std::move(parts.non_bridge);
}

HermitianMatrix bridge_fiber(const CylinderModel& cyl, const std::vector<double>& theta,
                             const Window& window) {
  WindowParts parts = assemble_window(cyl, nullptr, theta, window, false, false, true);
  return std::move(parts.bridge);
}

}  // namespace guided
