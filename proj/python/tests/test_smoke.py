import math

import numpy as np
import pytest

import fluxchemo as fc


def reference(**kw):
    args = dict(gamma=32.0, v0=0.5, eps=0.05, theta=0.25, sigma=1.0, M0=200.0, L=12.0)
    args.update(kw)
    return fc.Params.from_gamma(**args)


def test_derived_constants():
    p = fc.Params.from_gamma(16.0, 1.0, 0.05, 0.25, 1.0, 40.0, 10.0)
    assert p.R0 == 7.0
    assert p.r0 == pytest.approx(0.7696067811865475, rel=1e-15)
    assert reference().regime == "intermediate"
    assert fc.boundary_lower_bound(16.0) == pytest.approx(5.0 / 9.0, rel=1e-15)


def test_regime_gate_raises():
    with pytest.raises(fc.RegimeError):
        reference(theta=1.0)
    p = reference(theta=1.0, check_regime=False)
    assert "40*pi*theta" in fc.regime_violation(p)


def test_config_round_trip():
    p = reference()
    q = fc.Params.from_config(p.to_config())
    assert q.chi == p.chi and q.L == p.L and q.delta == p.delta
    with pytest.raises(fc.ConfigError):
        fc.Params.from_config("gamma = 32\nchi = 1\ntheta = 0.25\n")


def test_cutoff_and_potential_vectorize():
    p = reference()
    z = np.linspace(0.0, 2.0 * p.beta, 101)
    psi = fc.cutoff(p, z)
    assert psi.shape == z.shape
    assert np.all(np.diff(psi) >= 0.0)
    assert psi[-1] == p.v0
    pot = fc.Potential(p)
    assert pot.H(pot.R0) == pytest.approx(-(p.gamma / 4.0) * math.log(pot.R0), rel=1e-14)
    assert np.all(pot.dH(np.array([2.0, 5.0, 20.0])) == -p.v0)


def test_kernel_oracles():
    assert fc.erfc(1.0) == pytest.approx(0.1572992070502851, rel=1e-15)
    assert fc.c2_series() == pytest.approx(1.5810543856350906, rel=1e-14)
    assert fc.harnack_constant(5.0)["a"] == pytest.approx(1.7230890220145e-6, rel=1e-8)
    heat = fc.heat_kernel_2d(0.3, -0.4, 0.7)
    assert fc.gamma_lower_bound(0.3, -0.4, 0.0, 0.0, 0.7) == pytest.approx(heat, rel=1e-12)


def test_extremal_matches_oracle():
    for r in (0.9, 1.0):
        assert fc.extremal_drift(r, 0.25) == pytest.approx(fc.brute_force_extremal(r, 0.25), rel=0.01)


def test_radial_run_and_half_time():
    p = reference()
    out = fc.run_radial(p, dr=0.125, probes=[1.0, 12.0])
    assert out["conservation_failures"] == 0
    assert out["local_mass"].shape == (len(out["times"]), 2)
    assert np.all(np.diff(out["mass2"]) <= 0.0)
    tau, censored = fc.half_time(p, resolution=0.125)
    assert not censored
    assert tau == pytest.approx(out["half_time"], rel=1e-12)
    assert 13.0 < tau < 15.0


def test_sweep_from_config():
    text = reference().to_config() + "resolution = 0.125\nbaseline = 0\nsweep.L = 33, 35\n"
    rows = fc.sweep(text.replace("L = 12\n", "L = 33\n"))
    assert [r["params"].L for r in rows] == [33.0, 35.0]
    assert all(r["error"] == "" and not r["tau_censored"] for r in rows)
    assert rows[1]["tau"] >= rows[0]["tau"]
