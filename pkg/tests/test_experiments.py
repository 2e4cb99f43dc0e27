import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from monoq import experiments as ex
from monoq.channels import NoiseSpec, kraus_for
from monoq.correlations import CONSTRAINED, EXACT
from monoq.states import GGHZParams, GWParams, make_gghz, make_gw, sample_amplitudes


def trace(values):
    return ex.DynamicsTrace(np.linspace(0, 1, len(values)), np.array(values, dtype=float), "negativity", "ad")


@pytest.mark.parametrize(
    "values, label",
    [
        ([0.3, 0.2, 0.1, 0.0], "b"),
        ([0.1, 0.2, 0.05, 0.0], "a"),
        ([-0.3, -0.1, -0.05, 0.0], "d"),
        ([-0.3, -0.4, -0.05, 0.0], "c"),
        ([-0.1, 0.1, 0.05, 0.0], "c"),
        ([0.0, 0.0, 0.0, 0.0], "b"),
    ],
)
def test_profile_labels(values, label):
    assert ex.classify_profile(trace(values)) == label


def test_unfinished_trace_is_not_classifiable():
    with pytest.raises(ex.NotClassifiable):
        ex.classify_profile(trace([0.3, 0.2, 0.1, 0.05]))


def test_trace_validation():
    with pytest.raises(ValueError):
        ex.DynamicsTrace(np.array([0.0, 0.5, 0.4]), np.zeros(3), "negativity", "ad")
    with pytest.raises(ValueError):
        ex.DynamicsTrace(np.array([0.0, 0.5]), np.zeros(3), "negativity", "ad")


@pytest.mark.parametrize("channel", ["global", "ad", "pd"])
def test_endpoint_law_single_states(channel):
    g = ex.p_grid(0.25)
    for ket in (make_gghz(GGHZParams.from_abs(0.8)), make_gw(GWParams.of(0.6, 0.48, 0.64))):
        for measure in ("negativity", "discord"):
            t = ex.trace_dynamics(ket, channel, measure, g, EXACT)
            assert abs(t.values[-1]) <= 1e-6


def test_depolarizing_endpoint():
    # the Pauli-twirl form reaches I/2 at p = 3/4 and overshoots to a -1/3 Bloch factor at p = 1
    ket = make_gghz(GGHZParams.from_abs(0.8))
    for measure in ("negativity", "discord"):
        t = ex.trace_dynamics(ket, "dp", measure, np.array([0.0, 0.75]), EXACT)
        assert abs(t.values[-1]) <= 1e-12
    assert abs(ex.trace_dynamics(ket, "dp", "negativity", np.array([0.0, 1.0])).values[-1]) <= 1e-12


def test_gghz_negativity_profiles_are_monotone():
    ket = make_gghz(GGHZParams.from_abs(0.7))
    for channel in ("global", "ad", "pd", "dp"):
        assert ex.classify_profile(ex.trace_dynamics(ket, channel, "negativity")) == "b"


def test_gghz_global_terminal():
    ghz = make_gghz(GGHZParams.from_abs(1 / np.sqrt(2)))
    res = ex.dynamics_terminal(ghz, "global", "negativity")
    # delta = (1 - p) / 2 - p / 8 first drops below the zero tolerance here
    assert res.converged
    assert res.p_t == pytest.approx((1 - 2 * ex.TERMINAL_ZERO_TOL) / 1.25, abs=1e-4)
    strict = ex.dynamics_terminal(ghz, "global", "negativity", zero_tol=1e-12)
    assert strict.p_t == pytest.approx(0.8, abs=1e-4)


def test_gghz_dephasing_never_terminates_before_one():
    ket = make_gghz(GGHZParams.from_abs(0.6))
    # |a0||a1|(1-p)^3 stays above 1e-15 down to the bisection resolution
    assert ex.dynamics_terminal(ket, "pd", "negativity", zero_tol=1e-15).p_t == 1.0


def test_vanishing_trace_terminal_is_zero():
    product = np.zeros(8, dtype=complex)
    product[0] = 1.0
    res = ex.dynamics_terminal(product, "ad", "negativity")
    assert res.p_t == 0.0 and res.converged


def test_fraction_percentages_sum_to_100():
    stats = ex.fractions_from_scores(0.5, np.array([0.1, -0.1, 0.0, 5e-5, 0.2]))
    assert stats.pct_pos + stats.pct_zero + stats.pct_neg == pytest.approx(100.0, abs=0.01)
    assert stats.pct_pos == pytest.approx(40.0)


def test_ensemble_floor():
    with pytest.raises(ValueError):
        ex.fraction_scan("gw", "ad", "negativity", [0.5], 50, 1)


def test_ensembles_are_deterministic_across_workers():
    grid = ex.p_grid(0.1)
    kets = sample_amplitudes("gw3", 4, 300)
    ex.set_max_workers(1)
    one = ex.scores_on_grid(kets, "dp", "negativity", grid)
    saved, ex.BLOCK = ex.BLOCK, 64
    try:
        ex.set_max_workers(4)
        many = ex.scores_on_grid(kets, "dp", "negativity", grid)
    finally:
        ex.BLOCK = saved
        ex.set_max_workers(1)
    assert np.array_equal(one, many)


def test_default_options():
    assert ex.default_options("discord", 1000) == CONSTRAINED
    assert ex.default_options("discord", 1) == EXACT


def test_oracle_budget():
    oracle = ex.ChannelOracle(NoiseSpec("ad", 0.5))
    ket = make_gw(ex.W_PROBE)
    oracle(ket)
    oracle(ket)
    with pytest.raises(ex.ProtocolViolation):
        oracle(ket)


def test_kraus_oracle_matches_spec_oracle():
    ket = make_gw(ex.W_PROBE)
    a = ex.ChannelOracle(NoiseSpec("pd", 0.4))(ket)
    b = ex.ChannelOracle(kraus=kraus_for(NoiseSpec("pd", 0.4)))(ket)
    assert np.allclose(a, b, atol=1e-14)
    with pytest.raises(ValueError):
        ex.ChannelOracle(kraus=[np.eye(2), np.eye(2)])


@settings(max_examples=50, deadline=None)
@given(st.floats(-1, 1), st.floats(0, 1))
def test_verdict_table(d1, d2):
    sign, measure, verdict = ex.verdict_for(d1, d2)
    if d1 >= -1e-4:
        assert (sign, measure) == ("nonneg", "negativity")
        assert verdict == ("global" if d2 > 1e-4 else "dp")
    else:
        assert (sign, measure) == ("neg", "discord")
        assert verdict in ("ad", "pd", "inconclusive")


def test_discrimination_is_deterministic():
    runs = [ex.discriminate(ex.ChannelOracle(NoiseSpec("global", 0.5))) for _ in range(2)]
    assert runs[0] == runs[1]
    assert runs[0].verdict == "global"


def test_probe_window_enforced():
    with pytest.raises(ValueError):
        ex.discriminate(ex.ChannelOracle(NoiseSpec("ad", 0.5)), gghz_probe=GGHZParams.from_abs(0.9))


def test_dephasing_protocol_fails_without_noise():
    # a noiseless channel has no dephasing signature to read
    out = ex.discriminate(ex.ChannelOracle(NoiseSpec("pd", 0.0)))
    assert out.verdict == "inconclusive"
