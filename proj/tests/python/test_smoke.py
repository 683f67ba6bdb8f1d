import json
import math

import numpy as np
import pytest

import giantatom as ga


def test_lattice_band_and_dispersion():
    lat = ga.Lattice()
    assert lat.band == pytest.approx((-1.4, 1.4))
    assert ga.dispersion(lat, math.pi / 2, 0.0) == pytest.approx(-0.4)
    omega = ga.dispersion_grid(ga.Lattice(10, 5))
    assert omega.shape == (21, 11)
    np.testing.assert_allclose(omega, omega[::-1, ::-1], atol=1e-14)


def test_invalid_lattice_raises_value_error():
    with pytest.raises(ValueError):
        ga.Lattice(0, 5)


def test_resolvent_matches_reference_values():
    lat = ga.Lattice()
    assert ga.resolvent(lat, -0.4, 0, 0) == pytest.approx(-1.199853960107822j, abs=1e-9)
    assert ga.resolvent(lat, -0.4, 2, 1) == pytest.approx(-0.4 + 0.3397937856391217j, abs=1e-9)


def test_small_atom_transmission():
    lat = ga.Lattice()
    t = ga.transmission(ga.Coupling.small(1.0), lat, (math.pi / 2, 0.0))
    assert t == pytest.approx(0.7770792440064138, abs=1e-9)
    sweep = ga.transmission_sweep(ga.Coupling.small(1.0), lat, (math.pi / 2, 0.0), [0.0, 1.0], [0.0])
    assert sweep.shape == (2, 1)
    assert sweep[0, 0] == pytest.approx(1.0)
    assert sweep[1, 0] == pytest.approx(t)


def test_quality_factor_of_reference_line():
    lat = ga.Lattice()
    line = ga.Coupling.line(ga.presets.single_window_ratios(), 1.0)
    assert len(line.points) == 15
    report = ga.q_value(line, lat, [(math.pi / 2, math.pi / 7)], (math.pi / 2, 0.0))
    assert report["q"] == pytest.approx(2.0013357366602413, rel=1e-9)
    assert report["sigma_included"]


def test_shell_amplitude_arrays():
    kx, ky, dl, amp = ga.shell_amplitude(ga.Coupling.small(1.0), ga.Lattice(), (math.pi / 2, 0.0), samples=256)
    assert kx.shape == ky.shape == dl.shape == amp.shape
    assert np.all(dl > 0)
    assert amp.dtype == np.complex128


def test_fourier_round_trip():
    rng = np.random.default_rng(3)
    psi = rng.normal(size=(9, 7)) + 1j * rng.normal(size=(9, 7))
    back = ga.to_position(ga.to_momentum(psi))
    np.testing.assert_allclose(back, psi, atol=1e-12)
    assert np.sum(abs(ga.to_momentum(psi)) ** 2) == pytest.approx(np.sum(abs(psi) ** 2))


def test_emission_starts_excited():
    times, population, photon = ga.emission(ga.Lattice(41, 21), ga.Coupling.small(0.2), 4.0, 5)
    assert population[0] == 1.0
    assert population[-1] < 1.0
    assert population[-1] + np.sum(abs(photon) ** 2) == pytest.approx(1.0, abs=1e-9)
    assert len(times) == 5


def test_run_writes_directory(tmp_path):
    config = tmp_path / "dispersion.json"
    config.write_text(json.dumps({"lattice": {"N": 10, "M": 5}}))
    report = ga.run("dispersion", config, tmp_path / "out")
    assert report["even_symmetric"]
    assert (tmp_path / "out" / "manifest.json").exists()
