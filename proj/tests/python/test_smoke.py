import math
import os

import numpy as np
import pytest

import guided_bands as gb

CONFIG_DIR = os.environ.get("GUIDED_CONFIG_DIR", os.path.join(os.path.dirname(__file__), "..", "..", "configs"))

MU1_Q3 = 2.0 - math.sqrt(13.0)


def cfg(name):
    return os.path.join(CONFIG_DIR, name)


def test_load_and_stats():
    spec = gb.load_spec_file(cfg("square_q3.json"))
    assert spec.dim_total == 2 and spec.dim_guided == 1
    cyl = gb.build_cylinder(spec)
    assert cyl.nu == 1
    assert cyl.kappa == [4]
    assert cyl.beta_plus == 2
    stats = gb.graph_stats(cyl)
    assert stats["betti"] == 2
    assert stats["betti_loops_twice"] == 4
    conn = gb.connectivity(spec)
    assert conn["connected"] and conn["index_lattice_rank"] == 2


def test_validation_errors():
    with pytest.raises(gb.GraphError):
        gb.load_spec("{}")
    with pytest.raises(gb.GraphError):
        gb.load_spec('{"dim_total": 2, "dim_guided": 2, "vertices": [{"id":"v","W":0}], "edges": [], "guided_potential": []}')
    with pytest.raises(gb.GraphError):
        gb.load_spec_file(cfg("no_such_file.json"))


def test_eigh_against_numpy():
    rng = np.random.default_rng(42)
    a = rng.normal(size=(40, 40)) + 1j * rng.normal(size=(40, 40))
    a = (a + a.conj().T) / 2
    vals, vecs = gb.eigh(a, vectors=True)
    assert np.allclose(vals, np.linalg.eigvalsh(a), atol=1e-10)
    assert np.abs(a @ vecs - vecs * vals).max() < 1e-10 * np.linalg.norm(a, 2)


def test_fibers_are_hermitian_and_match_dispersion():
    spec = gb.load_spec_file(cfg("square_q3.json"))
    cyl = gb.build_cylinder(spec)
    f = gb.full_fiber(cyl, [0.3, 0.7])
    assert f.shape == (1, 1)
    assert f[0, 0] == pytest.approx(4 - 2 * math.cos(0.3) - 2 * math.cos(0.7), abs=1e-14)

    q = gb.potential(spec)
    m = gb.truncated_fiber(cyl, q, [0.5], radius=8)
    assert np.array_equal(m, m.conj().T)


def test_square_lattice_pipeline():
    spec = gb.load_spec_file(cfg("square_q3.json"))
    cyl = gb.build_cylinder(spec)
    h0 = gb.h0_spectrum(cyl, n_grid=32)
    assert h0["rho"] == pytest.approx(8.0, abs=1e-12)
    assert h0["bands"][0]["lo"] == pytest.approx(0.0, abs=1e-12)

    q = gb.potential(spec)
    bands = gb.guided_bands(h0["cylinder"], q, n_grid=16, rho=h0["rho"])
    band = bands["bands"][0]["band"]
    assert band["lo"] == pytest.approx(MU1_Q3, abs=1e-6)
    assert band["hi"] == pytest.approx(MU1_Q3 + 4.0, abs=1e-6)

    mu = gb.mu_spectrum(h0["cylinder"], q, rho=h0["rho"])
    assert mu["mu"][0] == pytest.approx(MU1_Q3, abs=1e-6)
    assert mu["ess_inf_h"] == pytest.approx(0.0, abs=1e-12)

    prof = gb.delta_profile(h0["cylinder"], q, n_grid=32)
    site = prof["sites"][0]
    assert site["delta_minus"] == pytest.approx(2.0, abs=1e-12)
    assert site["delta_plus"] == pytest.approx(6.0, abs=1e-12)


def test_gap_states_on_gapped_chain():
    spec = gb.load_spec_file(cfg("gapped_chain.json"))
    cyl = gb.build_cylinder(spec)
    h0 = gb.h0_spectrum(cyl, n_grid=32)
    gs = gb.gap_states(h0["cylinder"], gb.potential(spec), [0.0], rho=h0["rho"])
    assert gs["heuristic"]
    assert len(gs["gaps"]) >= 1
    assert len(gs["states"]) >= 1
    g = gs["gaps"][0]
    assert all(g["lo"] < s < g["hi"] for s in gs["states"])


def test_checks_pass_on_square_lattice():
    spec = gb.load_spec_file(cfg("square_q3.json"))
    cyl = gb.build_cylinder(spec)
    reports = gb.check_all(cyl, gb.potential(spec), n_grid=32)
    assert {r["id"] for r in reports} == {"envelope_bound", "bridge_bound", "bandwidth_sum"}
    assert all(r["pass"] for r in reports)


def test_version():
    assert gb.__version__ == "0.1.0"
