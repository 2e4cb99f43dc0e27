"""Ensemble drivers and the two-step channel discrimination protocol.

All ensemble work is batched: a block of sampled states is evolved for one
noise value at a time and every monogamy score of the block is evaluated in a
single vectorized call.  Results depend only on (family, seed, n), never on
how the work is split.
"""
from __future__ import annotations

import itertools
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .channels import NoiseSpec, apply_kraus, channel_tag, completeness_error, evolve_kets
from .correlations import (
    CONSTRAINED,
    EXACT,
    ZERO_TOL,
    DiscordOptions,
    measure_tag,
    monogamy_scores_array,
)
from .qcore import Ket, tensor
from .states import GGHZParams, GWParams, family_tag, make_gghz, make_gw, sample_amplitudes

MONO_TOL = 1e-6
# a score counts as vanished for the terminal once |delta| <= 1e-3; slowly
# decaying tails (AD, PD) would otherwise push terminals towards p = 1
TERMINAL_ZERO_TOL = 1e-3
DEFAULT_STEP = 0.01
BISECT_TOL = 1e-4
ENDPOINT_TOL = 1e-4
HIST_BINS = 50
MIN_ENSEMBLE = 100
BLOCK = 2000

_max_workers = 1


def set_max_workers(n: int) -> None:
    """Cap the worker threads used for ensemble blocks (results do not depend on it)."""
    global _max_workers
    _max_workers = max(1, int(n))


class NotClassifiable(ValueError):
    pass


class ProtocolViolation(RuntimeError):
    pass


def p_grid(step: float = DEFAULT_STEP, start: float = 0.0, stop: float = 1.0) -> np.ndarray:
    k = int(round((stop - start) / step))
    return np.round(np.linspace(start, stop, k + 1), 12)


def default_options(measure: str, n: int = 1) -> DiscordOptions:
    """Exact discord for single states and small sets, constrained for >= 1000."""
    return CONSTRAINED if measure == "discord" and n >= 1000 else EXACT


# -- score evaluation --------------------------------------------------------------

def _as_kets(states) -> np.ndarray:
    if isinstance(states, Ket):
        return states.amplitudes[None, :]
    if isinstance(states, np.ndarray) and states.ndim == 1:
        return states[None, :].astype(complex)
    arr = np.asarray([s.amplitudes if isinstance(s, Ket) else s for s in states], dtype=complex)
    return arr.reshape(len(arr), -1)


def scores_at(kets: np.ndarray, channel: str, measure: str, p: float, opts: DiscordOptions = EXACT) -> np.ndarray:
    """Monogamy scores of each state in ``kets`` after noise at level ``p``."""
    rhos = evolve_kets(kets, NoiseSpec(channel, float(p)))
    return np.asarray(monogamy_scores_array(rhos, measure, opts)).reshape(len(kets))


def scores_on_grid(kets: np.ndarray, channel: str, measure: str, grid, opts: DiscordOptions = EXACT) -> np.ndarray:
    """Scores for every (state, p) pair, shape ``(len(kets), len(grid))``."""
    out = np.empty((len(kets), len(grid)))

    def run(start):
        block = kets[start:start + BLOCK]
        for j, p in enumerate(grid):
            out[start:start + BLOCK, j] = scores_at(block, channel, measure, p, opts)

    starts = range(0, len(kets), BLOCK)
    if _max_workers == 1 or len(starts) == 1:
        for s in starts:
            run(s)
    else:
        with ThreadPoolExecutor(_max_workers) as pool:
            list(pool.map(run, starts))
    return out


# -- dynamics traces ---------------------------------------------------------------

@dataclass(frozen=True)
class DynamicsTrace:
    p_grid: np.ndarray
    values: np.ndarray
    measure: str
    channel: str

    def __post_init__(self):
        g = np.asarray(self.p_grid, dtype=float)
        v = np.asarray(self.values, dtype=float)
        if g.ndim != 1 or len(g) != len(v):
            raise ValueError("grid and values must be 1-D and of equal length")
        if np.any(np.diff(g) <= 0):
            raise ValueError("grid must be strictly ascending")
        object.__setattr__(self, "p_grid", g)
        object.__setattr__(self, "values", v)


@dataclass(frozen=True)
class TerminalResult:
    p_t: float
    converged: bool


def trace_dynamics(state, channel: str, measure: str, grid=None, opts: DiscordOptions = EXACT) -> DynamicsTrace:
    channel, measure = channel_tag(channel), measure_tag(measure)
    grid = p_grid() if grid is None else np.asarray(grid, dtype=float)
    values = scores_on_grid(_as_kets(state), channel, measure, grid, opts)[0]
    return DynamicsTrace(grid, values, measure, channel)


def _classify_rows(values: np.ndarray, zero_tol: float = ZERO_TOL, mono_tol: float = MONO_TOL) -> np.ndarray:
    values = np.atleast_2d(values)
    nonneg = values[:, 0] >= -zero_tol
    steps = np.diff(values, axis=1)
    # monotone means every step moves toward zero: down from above, up from below
    rising = (steps > mono_tol).any(axis=1)
    falling = (steps < -mono_tol).any(axis=1)
    monotone = np.where(nonneg, ~rising, ~falling)
    labels = np.where(nonneg, np.where(monotone, "b", "a"), np.where(monotone, "d", "c"))
    return labels


def classify_profile(trace: DynamicsTrace, zero_tol: float = ZERO_TOL, mono_tol: float = MONO_TOL) -> str:
    """Dynamics type a-d from the sign at p=0 and monotone decay to zero."""
    if abs(trace.values[-1]) > ENDPOINT_TOL:
        raise NotClassifiable(f"trace ends at {trace.values[-1]:.3e}, not zero")
    return str(_classify_rows(trace.values, zero_tol, mono_tol)[0])


def _terminals(kets, channel, measure, grid, values, opts, zero_tol, tol):
    zero = np.abs(values) <= zero_tol
    # first index from which the score stays zero up to p = 1
    tail = np.flip(np.logical_and.accumulate(np.flip(zero, axis=1), axis=1), axis=1)
    converged = tail[:, -1]
    first = np.where(converged, np.argmax(tail, axis=1), len(grid) - 1)
    p_t = np.ones(len(kets))
    p_t[first == 0] = grid[0]
    todo = np.flatnonzero(converged & (first > 0))
    lo = grid[first[todo] - 1].astype(float)
    hi = grid[first[todo]].astype(float)
    while todo.size and np.max(hi - lo) > tol:
        mid = 0.5 * (lo + hi)
        vals = np.empty(todo.size)
        # group by identical mid so each call evolves one p
        for m in np.unique(mid):
            sel = mid == m
            vals[sel] = scores_at(kets[todo[sel]], channel, measure, m, opts)
        is_zero = np.abs(vals) <= zero_tol
        hi = np.where(is_zero, mid, hi)
        lo = np.where(is_zero, lo, mid)
    p_t[todo] = hi
    return p_t, converged


def terminals(states, channel: str, measure: str, opts: DiscordOptions = EXACT, step: float = DEFAULT_STEP,
              zero_tol: float = TERMINAL_ZERO_TOL, tol: float = BISECT_TOL, with_values: bool = False):
    """Dynamics terminals for many states at once; returns (p_t, converged[, values])."""
    channel, measure = channel_tag(channel), measure_tag(measure)
    kets = _as_kets(states)
    grid = p_grid(step)
    values = scores_on_grid(kets, channel, measure, grid, opts)
    p_t, converged = _terminals(kets, channel, measure, grid, values, opts, zero_tol, tol)
    if with_values:
        return p_t, converged, grid, values
    return p_t, converged


def dynamics_terminal(state, channel: str, measure: str, opts: DiscordOptions = EXACT, step: float = DEFAULT_STEP,
                      zero_tol: float = TERMINAL_ZERO_TOL, tol: float = BISECT_TOL) -> TerminalResult:
    """Smallest p from which the monogamy score stays zero up to p = 1."""
    p_t, converged = terminals(state, channel, measure, opts, step, zero_tol, tol)
    return TerminalResult(float(p_t[0]), bool(converged[0]))


# -- ensemble statistics ----------------------------------------------------------

def _check_n(n: int):
    if n < MIN_ENSEMBLE:
        raise ValueError(f"ensembles need at least {MIN_ENSEMBLE} states, got {n}")


@dataclass(frozen=True)
class TerminalStats:
    mean: float
    bin_edges: np.ndarray
    density: np.ndarray
    p_t: np.ndarray = field(repr=False)
    n_unconverged: int = 0


def terminal_average(family: str, channel: str, measure: str, n: int, seed: int,
                     opts: DiscordOptions | None = None, step: float = DEFAULT_STEP) -> TerminalStats:
    """Mean dynamics terminal over sampled states and its 50-bin density on [0, 1]."""
    _check_n(n)
    measure = measure_tag(measure)
    opts = default_options(measure, n) if opts is None else opts
    kets = sample_amplitudes(family_tag(family), seed, n)
    p_t, converged = terminals(kets, channel, measure, opts, step)
    density, edges = np.histogram(p_t, bins=HIST_BINS, range=(0.0, 1.0), density=True)
    return TerminalStats(float(p_t.mean()), edges, density, p_t, int((~converged).sum()))


@dataclass(frozen=True)
class FractionStats:
    p: float
    pct_pos: float
    pct_zero: float
    pct_neg: float


def fractions_from_scores(p: float, scores: np.ndarray, zero_tol: float = ZERO_TOL) -> FractionStats:
    n = len(scores)
    pos = np.count_nonzero(scores > zero_tol)
    neg = np.count_nonzero(scores < -zero_tol)
    return FractionStats(float(p), 100.0 * pos / n, 100.0 * (n - pos - neg) / n, 100.0 * neg / n)


def fraction_scan(family: str, channel: str, measure: str, grid, n: int, seed: int,
                  opts: DiscordOptions | None = None) -> list[FractionStats]:
    """Percentages of states with score >0, =0, <0 at each noise value."""
    _check_n(n)
    measure = measure_tag(measure)
    opts = default_options(measure, n) if opts is None else opts
    kets = sample_amplitudes(family_tag(family), seed, n)
    grid = np.atleast_1d(np.asarray(grid, dtype=float))
    values = scores_on_grid(kets, channel_tag(channel), measure, grid, opts)
    return [fractions_from_scores(p, values[:, j]) for j, p in enumerate(grid)]


PROFILE_LABELS = ("a", "b", "c", "d")


def profile_census(family: str, channel: str, measure: str, n: int, seed: int,
                   opts: DiscordOptions | None = None, step: float = DEFAULT_STEP) -> dict[str, float]:
    """Percentage of sampled states showing each dynamics type."""
    _check_n(n)
    measure = measure_tag(measure)
    opts = default_options(measure, n) if opts is None else opts
    kets = sample_amplitudes(family_tag(family), seed, n)
    values = scores_on_grid(kets, channel_tag(channel), measure, p_grid(step), opts)
    bad = np.abs(values[:, -1]) > ENDPOINT_TOL
    if bad.any():
        raise NotClassifiable(f"{bad.sum()} traces do not vanish at p = 1")
    labels = _classify_rows(values)
    return {k: 100.0 * np.count_nonzero(labels == k) / n for k in PROFILE_LABELS}


# -- channel discrimination -------------------------------------------------------

class ChannelOracle:
    """Black-box noisy channel that may be used at most twice.

    The hidden channel is either a :class:`NoiseSpec` or an arbitrary
    single-qubit Kraus set applied independently to every qubit.
    """

    max_uses = 2

    def __init__(self, spec: NoiseSpec | None = None, kraus=None):
        if (spec is None) == (kraus is None):
            raise ValueError("give exactly one of spec or kraus")
        if kraus is not None:
            kraus = [np.asarray(k, dtype=complex) for k in kraus]
            if any(k.shape != (2, 2) for k in kraus):
                raise ValueError("Kraus operators must be 2x2")
            err = completeness_error(kraus)
            if err > 1e-10:
                raise ValueError(f"Kraus set is not trace preserving (deviation {err:.2e})")
        self._spec = spec
        self._kraus = kraus
        self.uses = 0

    def __call__(self, ket: Ket) -> np.ndarray:
        if self.uses >= self.max_uses:
            raise ProtocolViolation("the channel may be used only twice")
        self.uses += 1
        if self._spec is not None:
            return evolve_kets(ket.amplitudes, self._spec)
        rho = np.outer(ket.amplitudes, ket.amplitudes.conj())
        ops = [tensor(*ks) for ks in itertools.product(self._kraus, repeat=ket.n)]
        return apply_kraus(rho, ops)


DEFAULT_BANDS = {"ad": (0.13, 0.3), "pd": (0.019, 0.09)}

W_PROBE = GWParams.of(*([1 / np.sqrt(3)] * 3))
GHZ_PROBE = GGHZParams.from_abs(1 / np.sqrt(2))


@dataclass(frozen=True)
class DiscriminationOutcome:
    step1_sign: str
    step1_value: float
    step2_measure: str
    step2_value: float
    verdict: str


def verdict_for(step1_value: float, step2_value: float, bands=DEFAULT_BANDS, zero_tol: float = ZERO_TOL) -> tuple[str, str, str]:
    """(step1_sign, step2_measure, verdict) from the two measured scores."""
    if step1_value >= -zero_tol:
        return "nonneg", "negativity", ("global" if step2_value > zero_tol else "dp")
    for name in ("ad", "pd"):
        lo, hi = bands[name]
        if lo <= step2_value <= hi:
            return "neg", "discord", name
    return "neg", "discord", "inconclusive"


def discriminate(oracle: ChannelOracle, gw_probe: GWParams = W_PROBE, gghz_probe: GGHZParams = GHZ_PROBE,
                 opts: DiscordOptions = EXACT, bands=DEFAULT_BANDS) -> DiscriminationOutcome:
    """Identify the hidden noise with one gW and one gGHZ use of the channel."""
    if not 0.65 - 1e-12 <= abs(gghz_probe.a0) <= 1 / np.sqrt(2) + 1e-12:
        raise ValueError("gGHZ probe needs 0.65 <= |a0| <= 1/sqrt(2)")
    out1 = oracle(make_gw(gw_probe))
    d1 = float(monogamy_scores_array(out1, "discord", opts))
    out2 = oracle(make_gghz(gghz_probe))
    measure = "negativity" if d1 >= -ZERO_TOL else "discord"
    d2 = float(monogamy_scores_array(out2, measure, opts))
    sign, measure, verdict = verdict_for(d1, d2, bands)
    return DiscriminationOutcome(sign, d1, measure, d2, verdict)
