# Copyright 2026 The homowit Authors
# SPDX-License-Identifier: Apache-2.0

import math

import numpy as np
import pytest

import homowit


def test_tunable_state_is_density_matrix():
    rho = homowit.tunable_state(22.5, eta_a=0.8, eta_b=0.8)
    assert rho.shape == (9, 9)
    assert np.allclose(rho, rho.conj().T)
    assert abs(np.trace(rho).real - 1.0) < 1e-12
    assert np.linalg.eigvalsh(rho).min() > -1e-12


def test_ideal_bell_chsh():
    rho = homowit.tunable_state(45.0)
    assert homowit.analytic_chsh(rho, 3, 3) == pytest.approx(0.0, abs=1e-12)
    rho = homowit.tunable_state(22.5)
    assert homowit.analytic_chsh(rho, 3, 3) > 1.0


def test_partial_transpose_preserves_trace():
    rho = homowit.tunable_state(10.0)
    pt = homowit.partial_transpose(rho, 3, 3)
    assert np.trace(pt) == pytest.approx(np.trace(rho))


def test_simulated_records_have_two_correlators():
    recs = homowit.simulate_records(22.5, 2000, seed=3)
    assert len(recs["x_a"]) == 4000
    assert set(zip(recs["setting_a"], recs["setting_b"])) == {(1, 1), (1, 2)}


def test_bound_at_zero_weight():
    res = homowit.separable_bound(0.0)
    assert res["status"] == "optimal"
    assert res["s_sep_max"] == pytest.approx(0.9003163161571061, abs=1e-6)
    full = homowit.separable_bound(0.1, mode="full")
    qubit = homowit.separable_bound(0.1, mode="qubit")
    assert full["s_sep_max"] <= qubit["s_sep_max"] + 1e-7
    assert qubit["s_sep_max"] <= homowit.TSIRELSON


def test_verdict_rejects_impossible_value():
    with pytest.raises(ValueError):
        homowit.verdict(3.0, 0.01, 1.0, 1.0)
    v = homowit.verdict(1.3, 0.01, 1.0, 0.9)
    assert v["conclusion"] == "single-photon-entangled"


def test_run_witness_small():
    reps = homowit.run_witness(theta=22.5, events=20000, bootstrap_rounds=20, eta=0.9, seed=5)
    assert len(reps) == 1
    rep = reps[0]
    assert rep["status"] == "ok"
    assert math.isfinite(rep["chsh"]["s_obs"])
    assert rep["verdict"]["conclusion"] in {"single-photon-entangled", "entangled-subspace-unknown", "inconclusive"}


def test_config_error():
    with pytest.raises(ValueError):
        homowit.run_witness(events=-3)
