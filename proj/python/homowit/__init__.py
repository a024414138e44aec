# Copyright 2026 The homowit Authors
# SPDX-License-Identifier: Apache-2.0
"""Homodyne CHSH witness for single-photon entanglement."""

import json

from ._homowit import (
    TSIRELSON,
    ConfigError,
    analytic_chsh,
    partial_transpose,
    simulate_records,
    tunable_state,
)
from . import _homowit

__all__ = [
    "TSIRELSON",
    "ConfigError",
    "analytic_chsh",
    "partial_transpose",
    "simulate_records",
    "tunable_state",
    "separable_bound",
    "verdict",
    "run_witness",
]


def separable_bound(p_star, mode="qubit", delta_p_star=0.0, eps11=0.0, eps12=0.0):
    """Bound result as a dict; mode is qubit, full or experiment."""
    return json.loads(_homowit.bound_json(p_star, mode, delta_p_star, eps11, eps12))


def verdict(s_obs, s_stderr, bound_qubit_ppt, bound_full_ppt):
    return json.loads(_homowit.verdict_json(s_obs, s_stderr, bound_qubit_ppt, bound_full_ppt))


def run_witness(**settings):
    """One report dict per theta. Keys are the run-config keys."""
    items = [(k, ",".join(map(str, v)) if isinstance(v, (list, tuple)) else str(v)) for k, v in settings.items()]
    return json.loads(_homowit.witness_json(items))
