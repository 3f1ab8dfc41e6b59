import json
import math
import pathlib

import pytest

import pauli_annulus as pa

DATA = pathlib.Path(__file__).resolve().parents[1] / "data"


@pytest.fixture(scope="module")
def geom0():
    geom = pa.AnnulusGeometry(1.0, 2.0)
    field = pa.RadialField.constant(geom, 1.0)
    pot = pa.solve_scalar_potential(geom, field, 1024)
    return geom, field, pot


def test_potential_features(geom0):
    _, _, pot = geom0
    f = pot.features
    assert f.r_min == pytest.approx(math.sqrt(3.0 / (2.0 * math.log(2.0))), rel=1e-10)
    assert f.phi_min == pytest.approx(-0.12663768729140895, rel=1e-10)
    assert len(pot.phi) == 1025
    assert pot.phi[0] == 0.0 and pot.phi[-1] == 0.0


def test_invalid_inputs_raise():
    with pytest.raises(ValueError):
        pa.AnnulusGeometry(2.0, 1.0)
    geom = pa.AnnulusGeometry(1.0, 2.0)
    with pytest.raises(ValueError):
        pa.RadialField.constant(geom, -1.0)


def test_fiber_and_prefactor(geom0):
    _, field, pot = geom0
    s = pa.solve_fiber(pot, field, 0.2, 0.0, n_grid=1024)
    assert 0.0 < s.lambda1 < s.upper_bound
    assert s.lambda2 >= 2 * 0.2 * 0.99
    direct = pa.fiber_eigenvalues(pot, field, 0.2, 0.0, k=1, n_grid=1024, formulation="direct")[0]
    assert direct == pytest.approx(s.lambda1, rel=1e-5)
    law = pa.PrefactorLaw.from_potential(pot)
    value, realizing, values = pa.alpha_k(law, 0.0, 2)
    assert realizing == [0, -1]
    assert value == values[1]


def test_assemble(geom0):
    _, field, pot = geom0
    gauge = pa.make_gauge(pot, pa.potential_gauge_circulation(pot))
    scales = pa.assemble(pot, field, gauge, [0.2, 0.15], k_max=2, n_grid=1024, threads=2)
    assert [s["h"] for s in scales] == [0.2, 0.15]
    assert scales[0]["entries"][0]["m"] == 0
    assert len(scales[0]["ratio"]) == 2


def test_eigenvalues_closed_form():
    n = 200
    d = 1.0 / n
    ev = pa.smallest_eigenvalues([2 / d**2] * (n - 1), [-1 / d**2] * (n - 2), 3)
    for j, lam in enumerate(ev, start=1):
        exact = 4 / d**2 * math.sin(j * math.pi * d / 2) ** 2
        assert lam == pytest.approx(exact, rel=1e-10)


def test_run_cli(tmp_path):
    code, err = pa.run_cli("potential", str(DATA / "geom0_small.json"), str(tmp_path))
    assert code == 0, err
    summary = json.loads((tmp_path / "summary.json").read_text())
    assert summary["phi_min"] == pytest.approx(-0.12663768729140895, rel=1e-9)
    code, err = pa.run_cli("potential", str(DATA / "bad_radii.json"), str(tmp_path))
    assert code == 4
    assert "geometry.rho1" in err
