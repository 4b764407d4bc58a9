#include <pybind11/complex.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "guided/floquet.hpp"
#include "guided/graph.hpp"
#include "guided/numerics.hpp"
#include "guided/report.hpp"
#include "guided/spectra.hpp"
#include "guided/theorems.hpp"

namespace py = pybind11;
using namespace guided;

namespace {

py::array_t<cplx> matrix_to_numpy(const HermitianMatrix& m) {
  const std::size_t n = m.size();
  py::array_t<cplx> out({n, n});
  std::copy(m.data().begin(), m.data().end(), out.mutable_data());
  return out;
}

HermitianMatrix numpy_to_matrix(const py::array_t<cplx, py::array::c_style>& a) {
  if (a.ndim() != 2 || a.shape(0) != a.shape(1))
    throw std::invalid_argument("expected a square 2d array");
  const std::size_t n = static_cast<std::size_t>(a.shape(0));
  HermitianMatrix m(n);
  const cplx* src = a.data();
  for (std::size_t i = 0; i < n; ++i) {
    m.add_diag(i, src[i * n + i].real());
    for (std::size_t j = i + 1; j < n; ++j) m.add_coupling(i, j, src[i * n + j]);
  }
  return m;
}

py::dict interval_dict(const Interval& iv) {
  py::dict d;
  d["lo"] = iv.lo;
  d["hi"] = iv.hi;
  return d;
}

py::dict report_dict(const TheoremReport& r) {
  py::dict d;
  d["id"] = r.id;
  d["pass"] = r.pass;
  d["tolerance"] = r.tolerance;
  d["window_exhausted"] = r.window_exhausted;
  py::list records;
  for (const BandRecord& rec : r.records) {
    py::dict jr;
    jr["j"] = rec.j;
    jr["claimed"] = interval_dict(rec.claimed);
    jr["computed"] = interval_dict(rec.computed);
    jr["margin_lo"] = rec.margin_lo;
    jr["margin_hi"] = rec.margin_hi;
    jr["pass"] = rec.pass;
    jr["notes"] = rec.notes;
    records.append(jr);
  }
  d["records"] = records;
  d["notes"] = r.notes;
  return d;
}

ConvergencePolicy make_policy(double tol_window, int r0, int r_max, double delta_margin,
                              std::size_t n_perp, double rho) {
  ConvergencePolicy p;
  p.tol_window = tol_window;
  p.r0 = r0;
  p.r_max = r_max;
  p.delta_margin = delta_margin;
  p.n_perp = n_perp;
  p.rho = rho;
  return p;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "spectra of periodic graph operators with guided potentials";
  m.attr("__version__") = kToolVersion;

  py::register_exception<Error>(m, "GraphError");

  py::class_<PeriodicGraphSpec>(m, "PeriodicGraphSpec")
      .def_readonly("dim_total", &PeriodicGraphSpec::dim_total)
      .def_readonly("dim_guided", &PeriodicGraphSpec::dim_guided)
      .def_readonly("warnings", &PeriodicGraphSpec::warnings)
      .def_property_readonly("vertex_count",
                             [](const PeriodicGraphSpec& s) { return s.vertices.size(); })
      .def_property_readonly("edge_count",
                             [](const PeriodicGraphSpec& s) { return s.edges.size(); });

  py::class_<CylinderModel>(m, "CylinderModel")
      .def_readonly("nu", &CylinderModel::nu)
      .def_readonly("dim_guided", &CylinderModel::dim_guided)
      .def_readonly("dim_perp", &CylinderModel::dim_perp)
      .def_readonly("kappa", &CylinderModel::kappa)
      .def_readonly("beta_v", &CylinderModel::beta_v)
      .def_readonly("beta_plus", &CylinderModel::beta_plus)
      .def_readonly("w", &CylinderModel::w)
      .def_property_readonly("oriented_edge_count",
                             [](const CylinderModel& c) { return c.edges.size(); });

  py::class_<GuidedPotential>(m, "GuidedPotential")
      .def_property_readonly("support_size", &GuidedPotential::support_size)
      .def("scaled", &GuidedPotential::scaled)
      .def_property_readonly("ordered_values", [](const GuidedPotential& q) {
        std::vector<double> vals;
        for (const QSite& s : q.ordered) vals.push_back(s.q);
        return vals;
      });

  m.def("load_spec", &load_and_validate, py::arg("text"),
        "parse and validate a graph document given as a JSON string");
  m.def("load_spec_file", &load_file, py::arg("path"));
  m.def("build_cylinder", &build_cylinder);
  m.def("potential", &guided_potential);

  m.def("connectivity", [](const PeriodicGraphSpec& spec) {
    const ConnectivityReport r = connectivity_check(spec);
    py::dict d;
    d["connected"] = r.connected;
    d["quotient_connected"] = r.quotient_connected;
    d["index_lattice_rank"] = r.index_lattice_rank;
    d["elementary_divisors"] = r.elementary_divisors;
    return d;
  });

  m.def("graph_stats", [](const CylinderModel& cyl) {
    const GraphStats s = betti_and_stats(cyl);
    py::dict d;
    d["betti"] = s.betti;
    d["betti_loops_twice"] = s.betti_loops_twice;
    d["kappa"] = s.kappa;
    d["beta_v"] = s.beta_v;
    d["beta_plus"] = s.beta_plus;
    return d;
  });

  m.def(
      "eigh",
      [](const py::array_t<cplx, py::array::c_style>& a, bool vectors) -> py::tuple {
        const EighResult r = eigh(numpy_to_matrix(a), vectors);
        py::array_t<double> values(r.values.size());
        std::copy(r.values.begin(), r.values.end(), values.mutable_data());
        if (!vectors) return py::make_tuple(values, py::none());
        py::array_t<cplx> vecs({r.n, r.n});
        // column j of the result is the j-th eigenvector
        cplx* dst = vecs.mutable_data();
        for (std::size_t i = 0; i < r.n; ++i)
          for (std::size_t j = 0; j < r.n; ++j) dst[i * r.n + j] = r.vectors[j * r.n + i];
        return py::make_tuple(values, vecs);
      },
      py::arg("matrix"), py::arg("vectors") = false);

  m.def(
      "full_fiber",
      [](const CylinderModel& cyl, const std::vector<double>& theta, bool include_w) {
        return matrix_to_numpy(full_fiber(cyl, theta, include_w));
      },
      py::arg("cylinder"), py::arg("theta"), py::arg("include_w") = true);

  m.def(
      "truncated_fiber",
      [](const CylinderModel& cyl, const GuidedPotential& q, const std::vector<double>& theta,
         int radius, bool include_q) {
        const Window win(cyl.nu, cyl.dim_perp, radius);
        return matrix_to_numpy(truncated_fiber(cyl, q, theta, win, include_q));
      },
      py::arg("cylinder"), py::arg("potential"), py::arg("theta"), py::arg("radius"),
      py::arg("include_q") = true);

  m.def(
      "h0_spectrum",
      [](const CylinderModel& cyl, std::size_t n_grid, bool normalize) {
        const H0Result r = h0_spectrum(cyl, n_grid, normalize);
        py::dict d;
        py::list bands;
        for (const Interval& b : r.bands.bands) bands.append(interval_dict(b));
        d["bands"] = bands;
        d["rho"] = r.bands.rho;
        d["flat"] = r.bands.flat;
        d["shift"] = r.shift;
        d["cylinder"] = r.cylinder;
        return d;
      },
      py::arg("cylinder"), py::arg("n_grid") = 64, py::arg("normalize") = true);

  m.def(
      "guided_bands",
      [](const CylinderModel& cyl, const GuidedPotential& q, std::size_t n_grid,
         double tol_window, int r0, int r_max, double delta_margin, std::size_t n_perp,
         double rho) {
        const GuidedBandSet s = guided_band_set(
            cyl, q, make_policy(tol_window, r0, r_max, delta_margin, n_perp, rho), n_grid);
        py::dict d;
        py::list bands;
        for (const GuidedBand& b : s.bands) {
          py::dict jb;
          jb["band"] = interval_dict(b.band);
          jb["complete"] = b.complete;
          jb["sigma_o"] = b.has_sigma_o ? py::object(interval_dict(b.sigma_o)) : py::none();
          bands.append(jb);
        }
        d["bands"] = bands;
        d["curves"] = s.curves;
        d["window_exhausted"] = s.window_exhausted;
        return d;
      },
      py::arg("cylinder"), py::arg("potential"), py::arg("n_grid") = 64,
      py::arg("tol_window") = 1e-9, py::arg("r0") = 0, py::arg("r_max") = 0,
      py::arg("delta_margin") = 0.0, py::arg("n_perp") = 64, py::arg("rho") = 0.0);

  m.def(
      "mu_spectrum",
      [](const CylinderModel& cyl, const GuidedPotential& q, double tol_window, int r0, int r_max,
         double delta_margin, std::size_t n_perp, double rho) {
        const MuSpectrum s =
            mu_spectrum(cyl, q, make_policy(tol_window, r0, r_max, delta_margin, n_perp, rho));
        py::dict d;
        d["mu_tilde"] = s.mu_tilde;
        d["ess_inf_h"] = s.ess_inf_h;
        d["mu"] = s.mu;
        d["window_exhausted"] = s.window_exhausted;
        return d;
      },
      py::arg("cylinder"), py::arg("potential"), py::arg("tol_window") = 1e-9, py::arg("r0") = 0,
      py::arg("r_max") = 0, py::arg("delta_margin") = 0.0, py::arg("n_perp") = 64,
      py::arg("rho") = 0.0);

  m.def(
      "delta_profile",
      [](const CylinderModel& cyl, const GuidedPotential& q, std::size_t n_grid) {
        const DeltaProfile p = delta_profile(cyl, q, n_grid);
        py::list sites;
        for (const DeltaSite& s : p.sites) {
          py::dict d;
          d["j"] = s.j;
          d["vertex"] = s.vertex;
          d["delta_minus"] = s.delta_minus;
          d["delta_plus"] = s.delta_plus;
          d["delta"] = s.delta;
          d["beta_jj"] = s.beta_jj;
          d["kappa_jj"] = s.kappa_jj;
          d["kappa_v"] = s.kappa_v;
          sites.append(d);
        }
        py::dict out;
        out["sites"] = sites;
        out["notes"] = p.notes;
        return out;
      },
      py::arg("cylinder"), py::arg("potential"), py::arg("n_grid") = 64);

  m.def(
      "gap_states",
      [](const CylinderModel& cyl, const GuidedPotential& q, const std::vector<double>& theta,
         std::size_t n_perp, double rho) {
        ConvergencePolicy policy;
        policy.n_perp = n_perp;
        policy.rho = rho;
        const GapStates gs = guided::gap_states(cyl, q, theta, policy);
        py::dict d;
        py::list comps, gaps, states;
        for (const Interval& iv : gs.h0_components) comps.append(interval_dict(iv));
        for (const Interval& iv : gs.gaps) gaps.append(interval_dict(iv));
        for (const CertifiedValue& cv : gs.states) states.append(cv.value);
        d["h0_components"] = comps;
        d["gaps"] = gaps;
        d["states"] = states;
        d["heuristic"] = gs.heuristic;
        return d;
      },
      py::arg("cylinder"), py::arg("potential"), py::arg("theta"), py::arg("n_perp") = 64,
      py::arg("rho") = 0.0);

  m.def(
      "check_all",
      [](const CylinderModel& cyl, const GuidedPotential& q, std::size_t n_grid,
         std::size_t n_perp) {
        const H0Result h0 = h0_spectrum(cyl, n_grid, true);
        ConvergencePolicy policy;
        policy.n_perp = n_perp;
        policy.rho = h0.bands.rho;
        const GuidedBandSet bands = guided_band_set(h0.cylinder, q, policy, n_grid);
        const MuSpectrum mu = mu_spectrum(h0.cylinder, q, policy);
        const GraphStats stats = betti_and_stats(cyl);
        py::list reports;
        reports.append(report_dict(check_envelope(bands, q, h0.bands.rho)));
        reports.append(report_dict(check_bridge_bound(bands, mu, cyl.beta_plus)));
        reports.append(report_dict(bandwidth_sum_check(h0.bands, stats)));
        return reports;
      },
      py::arg("cylinder"), py::arg("potential"), py::arg("n_grid") = 64, py::arg("n_perp") = 64);
}
