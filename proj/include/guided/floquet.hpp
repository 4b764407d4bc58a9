#pragma once

#include <vector>

#include "guided/graph.hpp"
#include "guided/numerics.hpp"

namespace guided {

/// Finite box of cylinder vertices: all (fundamental vertex, perpendicular
/// shift) with ||shift||_inf <= radius. Shifts are enumerated
/// lexicographically, vertices fastest, so the layout is deterministic.
class Window {
 public:
  Window(std::size_t nu, int perp_dim, int radius);

  std::size_t size() const { return nu_ * shift_count_; }
  std::size_t shift_count() const { return shift_count_; }
  int radius() const { return radius_; }
  int perp_dim() const { return perp_dim_; }

  bool contains(const std::vector<int>& shift) const;
  std::size_t index(std::size_t vertex, const std::vector<int>& shift) const;
  std::vector<int> shift_of_rank(std::size_t rank) const;

 private:
  std::size_t nu_;
  int perp_dim_;
  int radius_;
  std::size_t shift_count_;
};

enum class FiberKind { Full, Cylinder, Modified, Bridge };

/// nu x nu fiber of the unperturbed operator over the full translation
/// lattice, evaluated at a torus point theta of dimension dim_total.
HermitianMatrix full_fiber(const CylinderModel& cyl, const std::vector<double>& theta,
                           bool include_w);

/// Same operator reached through the cylinder: Bloch phase split into the
/// guided part theta (dim_guided) and the perpendicular part phi (dim_perp).
HermitianMatrix cylinder_bloch_fiber(const CylinderModel& cyl, const std::vector<double>& theta,
                                     const std::vector<double>& phi, bool include_w);

/// nu x nu fiber of the bridge-deleted cylinder operator at perpendicular
/// quasimomentum phi. Uses the modified degrees; no guided phase enters.
HermitianMatrix modified_bloch_fiber(const CylinderModel& cyl, const std::vector<double>& phi,
                                     bool include_w);

/// Fiber of H(theta) on the cylinder, truncated to the window with Dirichlet
/// boundary (full degrees kept on the diagonal, out-of-window couplings
/// dropped). Throws SupportOutsideWindow when include_q and the potential
/// support sticks out of the window.
HermitianMatrix truncated_fiber(const CylinderModel& cyl, const GuidedPotential& q,
                                const std::vector<double>& theta, const Window& window,
                                bool include_q);

/// Truncation of the bridge-deleted operator h; theta-independent.
HermitianMatrix modified_truncated_fiber(const CylinderModel& cyl, const GuidedPotential& q,
                                         const Window& window, bool include_q);

/// Truncation of the bridge-only magnetic Laplacian; diagonal carries the
/// bridge counts beta_v. Its spectrum sits in [0, 2 beta_plus].
HermitianMatrix bridge_fiber(const CylinderModel& cyl, const std::vector<double>& theta,
                             const Window& window);

}  // namespace guided
