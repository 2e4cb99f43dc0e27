import logging

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from monoq.analytic import (
    NoClosedForm,
    QUARANTINE_TOL,
    audit,
    delta_n,
    delta_n_gghz,
    delta_n_gw,
    discrepancy_report,
    is_quarantined,
    numeric_delta_n,
)
from monoq.states import GGHZParams, GWParams, sample_params

ps = st.floats(0.0, 1.0)
a0s = st.floats(0.0, 1.0)


@settings(max_examples=40, deadline=None)
@given(a0s, ps, st.sampled_from(["global", "ad", "pd", "dp"]))
def test_gghz_closed_forms_match_pipeline(a0, p, channel):
    params = GGHZParams.from_abs(a0)
    assert delta_n_gghz(params, channel, p) == pytest.approx(numeric_delta_n(params, channel, p), abs=1e-9)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10**6), ps, st.sampled_from(["global", "ad"]))
def test_gw_closed_forms_match_pipeline(index, p, channel):
    params = sample_params("gw3", 5, index)
    assert delta_n_gw(params, channel, p) == pytest.approx(numeric_delta_n(params, channel, p), abs=1e-9)


def test_gghz_pd_is_product_form():
    params = GGHZParams.from_abs(0.7)
    for p in np.linspace(0, 1, 6):
        assert delta_n(params, "pd", p) == pytest.approx(0.7 * np.sqrt(0.51) * (1 - p) ** 3)


def test_global_ghz_terminal_is_four_fifths():
    # p/4 = 1 - p at the maximally entangled point
    params = GGHZParams.from_abs(1 / np.sqrt(2))
    assert delta_n_gghz(params, "global", 0.8 - 1e-9) > 0
    assert delta_n_gghz(params, "global", 0.8 + 1e-9) == 0


def test_gw_dephasing_formula_is_quarantined(caplog):
    with caplog.at_level(logging.WARNING, logger="monoq.analytic"):
        assert is_quarantined("gw", "pd")
    assert "quarantined" in caplog.text
    report = discrepancy_report()
    assert report[("gw", "pd")]["quarantined"]
    assert report[("gghz", "dp")]["max_deviation"] <= QUARANTINE_TOL


def test_analytic_engine_falls_back_when_quarantined():
    params = sample_params("gw3", 1, 0)
    assert delta_n(params, "pd", 0.3) == pytest.approx(numeric_delta_n(params, "pd", 0.3), abs=1e-14)
    assert delta_n(params, "dp", 0.3) == pytest.approx(numeric_delta_n(params, "dp", 0.3), abs=1e-14)


def test_check_engine_raises_on_disagreement():
    params = sample_params("gw3", 1, 0)
    with pytest.raises(ArithmeticError):
        delta_n(params, "pd", 0.3, engine="check")
    assert delta_n(GGHZParams.from_abs(0.6), "ad", 0.3, engine="check") == pytest.approx(
        delta_n_gghz(GGHZParams.from_abs(0.6), "ad", 0.3), abs=1e-9
    )


def test_missing_formulas():
    with pytest.raises(NoClosedForm):
        delta_n_gw(sample_params("gw3", 1, 0), "dp", 0.2)
    with pytest.raises(NoClosedForm):
        audit("gw", "dp")
    with pytest.raises(ValueError):
        delta_n_gw(GWParams.of(0.5, 0.5, 0.5, 0.5), "ad", 0.1)
    with pytest.raises(ValueError):
        delta_n(GGHZParams.from_abs(0.6), "ad", 0.3, engine="symbolic")


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10**6), ps)
def test_gw_dephasing_derived_form(index, p):
    # N(1:23) = (1-p)^2 |a2| sqrt(1-|a2|^2); each pair block is a 2x2 PT eigenproblem
    params = sample_params("gw3", 8, index)
    a0, a1, a2 = (abs(a) for a in params.amplitudes)

    def pair(x, y):
        return 0.5 * (np.sqrt(x**4 + 4 * y**2 * a2**2 * (1 - p) ** 4) - x**2)

    expected = (1 - p) ** 2 * a2 * np.sqrt(1 - a2**2) - pair(a0, a1) - pair(a1, a0)
    assert numeric_delta_n(params, "pd", p) == pytest.approx(expected, abs=1e-12)
