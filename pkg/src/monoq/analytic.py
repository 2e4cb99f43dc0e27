"""Closed-form negativity monogamy scores for noisy gGHZ and gW states.

These are fast paths and independent oracles for the numerical pipeline.  A
formula that disagrees with the pipeline by more than
``QUARANTINE_TOL`` is quarantined: :func:`delta_n` then falls back to the
numerical route and the discrepancy is logged.
"""
from __future__ import annotations

import logging
from functools import lru_cache

import numpy as np

from .channels import NoiseSpec, channel_tag, evolve_kets
from .correlations import monogamy_scores_array
from .states import GGHZParams, GWParams, make_gghz, make_gw, sample_params

log = logging.getLogger(__name__)

QUARANTINE_TOL = 1e-6


class NoClosedForm(ValueError):
    pass


def _neg(x):
    return np.abs(np.minimum(0.0, x))


def delta_n_gghz(params: GGHZParams, channel: str, p: float) -> float:
    channel = channel_tag(channel)
    a0 = abs(params.a0)
    a1 = np.sqrt(max(0.0, 1.0 - a0 * a0))
    if channel == "global":
        return float(_neg(0.5 * (p / 4 - 2 * a0 * a1 * (1 - p))))
    if channel == "pd":
        return float(a0 * a1 * (1 - p) ** 3)
    if channel == "ad":
        f1 = a1**4 * (4 * p**6 - 12 * p**5 + 13 * p**4 - 6 * p**3 + p**2)
        f2 = 4 * a0**2 * a1**2 * (1 - p) ** 3
        return float(_neg(0.5 * (a1**2 * p * (1 - p) - np.sqrt(f1 + f2))))
    q = 1 - 2 * p / 3
    f1 = q**2 * (1 - q) ** 2 * (1 - 2 * q) ** 2
    # the PT spectrum needs |a0|^2 here
    f2 = 4 * a0**2 * a1**2 * (1 - 2 * q) ** 2 * (1 - 3 * q + 3 * q**2) * (1 - 5 * q + 5 * q**2)
    return float(_neg(0.5 * (q * (1 - q) - np.sqrt(max(f1 + f2, 0.0)))))


def delta_n_gw(params: GWParams, channel: str, p: float) -> float:
    channel = channel_tag(channel)
    if params.n != 3:
        raise ValueError("closed forms exist for three-qubit gW states only")
    a0, a1, a2 = (abs(a) for a in params.amplitudes)
    if channel == "global":
        s = p / 8 - (1 - p) * a2 * np.sqrt(1 - a2**2)

        def s_pair(x, y):
            return 0.25 * (p + 2 * (1 - p) * (x**2 - np.sqrt(x**4 + 4 * y**2 * a2**2)))

        return float(_neg(s) - _neg(s_pair(a0, a1)) - _neg(s_pair(a1, a0)))
    if channel == "ad":
        s = np.sqrt(p**2 + 4 * (1 - a2**2) * a2**2 * (1 - p) ** 2)

        def pair(x, y):
            pt = p + (1 - p) * x**2
            return np.sqrt(pt**2 + 4 * y**2 * a2**2 * (1 - p) ** 2) - pt

        return float(0.5 * ((s - p) - pair(a0, a1) - pair(a1, a0)))
    if channel == "pd":
        # this reading disagrees with the pipeline and is quarantined by the audit
        s = (1 - p) ** 2 * a2**2 * np.sqrt(1 - a2**2)

        def s_pair(x, y):
            return np.sqrt(x**2 + 4 * y**2 * a2**2 * (1 - p) ** 4)

        return float(s - 0.5 * (s_pair(a0, a1) + s_pair(a1, a0) + a2**2 - 1))
    raise NoClosedForm("no closed form for gW under depolarizing noise")


FORMULAS = {
    ("gghz", "global"), ("gghz", "ad"), ("gghz", "pd"), ("gghz", "dp"),
    ("gw", "global"), ("gw", "ad"), ("gw", "pd"),
}


def numeric_delta_n(params, channel: str, p: float) -> float:
    ket = make_gghz(params) if isinstance(params, GGHZParams) else make_gw(params)
    rho = evolve_kets(ket.amplitudes, NoiseSpec(channel, p))
    return float(monogamy_scores_array(rho, "negativity"))


def _formula(family):
    return delta_n_gghz if family == "gghz" else delta_n_gw


@lru_cache(maxsize=None)
def audit(family: str, channel: str, n_states: int = 25, seed: int = 2024) -> float:
    """Max |analytic - numeric| over sampled states and an 11-point p grid."""
    if (family, channel) not in FORMULAS:
        raise NoClosedForm(f"no closed form for {family}/{channel}")
    stream = "gghz" if family == "gghz" else "gw3"
    worst = 0.0
    for i in range(n_states):
        params = sample_params(stream, seed, i)
        for p in np.linspace(0.0, 1.0, 11):
            dev = abs(_formula(family)(params, channel, p) - numeric_delta_n(params, channel, p))
            worst = max(worst, dev)
    return worst


def is_quarantined(family: str, channel: str) -> bool:
    dev = audit(family, channel)
    if dev > QUARANTINE_TOL:
        log.warning(
            "closed form %s/%s quarantined: max deviation %.3e from numerical pipeline",
            family, channel, dev,
        )
        return True
    return False


def discrepancy_report() -> dict[tuple[str, str], dict]:
    return {
        key: {"max_deviation": audit(*key), "quarantined": audit(*key) > QUARANTINE_TOL}
        for key in sorted(FORMULAS)
    }


def delta_n(params, channel: str, p: float, engine: str = "analytic") -> float:
    """Negativity monogamy score with a selectable engine.

    ``analytic`` uses the closed form unless it is quarantined or missing,
    ``numeric`` always runs the pipeline, and ``check`` runs both and raises
    if they disagree beyond the quarantine tolerance.
    """
    family = "gghz" if isinstance(params, GGHZParams) else "gw"
    channel = channel_tag(channel)
    if engine == "numeric":
        return numeric_delta_n(params, channel, p)
    has_formula = (family, channel) in FORMULAS and (family == "gghz" or params.n == 3)
    if engine == "check":
        num = numeric_delta_n(params, channel, p)
        if has_formula:
            ana = _formula(family)(params, channel, p)
            if abs(ana - num) > QUARANTINE_TOL:
                raise ArithmeticError(f"analytic {ana!r} vs numeric {num!r} for {family}/{channel}")
        return num
    if engine != "analytic":
        raise ValueError(f"unknown engine {engine!r}")
    if not has_formula or is_quarantined(family, channel):
        return numeric_delta_n(params, channel, p)
    return _formula(family)(params, channel, p)
