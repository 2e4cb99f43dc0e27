"""Negativity, quantum discord and monogamy scores.

Discord is always measured on a single qubit with rank-one projectors
``|Phi_1> = cos(t/2)|0> + e^{i f} sin(t/2)|1>`` and its orthogonal partner.
Two optimization modes are offered:

* ``exact``: dense (theta, phi) grid followed by Nelder-Mead refinement;
* ``constrained``: only the sigma_x and sigma_z measurements.  This is a
  shortcut for large ensembles of noisy generalized-W states and is an upper
  bound on the exact value.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize

from .qcore import (
    DensityMatrix,
    as_density,
    entropy_array,
    entropy_from_eigenvalues,
    ptrace_array,
    ptranspose_array,
)

MEASURES = ("negativity", "discord")
ZERO_TOL = 1e-4  # |delta| at or below this counts as zero
BRANCH_TOL = 1e-14


def measure_tag(tag: str) -> str:
    tag = tag.lower()
    if tag not in MEASURES:
        raise ValueError(f"unknown measure {tag!r}; expected one of {MEASURES}")
    return tag


@dataclass(frozen=True)
class MeasurementAngles:
    theta: float
    phi: float

    def __post_init__(self):
        if not 0.0 <= self.theta <= np.pi:
            raise ValueError("theta must lie in [0, pi]")
        if not 0.0 <= self.phi < 2 * np.pi:
            raise ValueError("phi must lie in [0, 2pi)")


SIGMA_X = MeasurementAngles(np.pi / 2, 0.0)
SIGMA_Z = MeasurementAngles(0.0, 0.0)


@dataclass(frozen=True)
class DiscordOptions:
    mode: str = "exact"
    grid: tuple[int, int] = (60, 120)
    refine_tol: float = 1e-8

    def __post_init__(self):
        if self.mode not in ("exact", "constrained"):
            raise ValueError(f"unknown discord mode {self.mode!r}")
        if self.grid[0] < 2 or self.grid[1] < 2:
            raise ValueError("grid needs at least 2 points per angle")
        if self.refine_tol <= 0:
            raise ValueError("refine_tol must be positive")


EXACT = DiscordOptions()
CONSTRAINED = DiscordOptions(mode="constrained")


@dataclass(frozen=True)
class MonogamyReport:
    measure: str
    nodal: int
    whole: float
    pairwise: tuple[float, ...]
    score: float = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "pairwise", tuple(float(x) for x in self.pairwise))
        object.__setattr__(self, "score", float(self.whole) - sum(self.pairwise))


# -- negativity ------------------------------------------------------------------

def negativity_array(rhos: np.ndarray, part, n: int) -> np.ndarray:
    """Absolute sum of negative partial-transpose eigenvalues (batched)."""
    lam = np.linalg.eigvalsh(ptranspose_array(rhos, part, n))
    return np.maximum(-lam, 0.0).sum(axis=-1)


def negativity(rho, part) -> float:
    rho = as_density(rho)
    part = set(part)
    if not part or len(part) >= rho.n:
        raise ValueError("negativity needs a proper nonempty subset of the register")
    return float(negativity_array(rho.matrix, rho.positions(part), rho.n))


def negativity_trace_norm(rho, part) -> float:
    """(||rho^{T_part}||_1 - 1) / 2; the second form of the same quantity."""
    rho = as_density(rho)
    sv = np.linalg.svd(ptranspose_array(rho.matrix, rho.positions(part), rho.n), compute_uv=False)
    return float((sv.sum() - 1.0) / 2.0)


# -- discord ---------------------------------------------------------------------

def _measure_first(rho: np.ndarray, pos: int, n: int) -> np.ndarray:
    """Reorder qubits so that ``pos`` comes first; other qubits keep their order."""
    if pos == 0:
        return rho
    order = [pos] + [q for q in range(n) if q != pos]
    return ptrace_array(rho, order, n)  # keeping every qubit just permutes


def projector_vectors(theta, phi) -> tuple[np.ndarray, np.ndarray]:
    theta = np.asarray(theta, dtype=float)
    phi = np.asarray(phi, dtype=float)
    c, s, e = np.cos(theta / 2), np.sin(theta / 2), np.exp(1j * phi)
    v1 = np.stack([c + 0j, e * s], axis=-1)
    v2 = np.stack([-np.conj(e) * s, c + 0j], axis=-1)
    return v1, v2


def _eigvals_2x2(m: np.ndarray) -> np.ndarray:
    """Ascending eigenvalues of stacked 2x2 Hermitian matrices in closed form."""
    a, c = m[..., 0, 0].real, m[..., 1, 1].real
    half = 0.5 * (a + c)
    r = np.sqrt(0.25 * (a - c) ** 2 + np.abs(m[..., 0, 1]) ** 2)
    return np.stack([half - r, half + r], axis=-1)


def conditional_entropy(rho_ab: np.ndarray, theta, phi) -> np.ndarray:
    """Sum_i p_i S(rho_B|i) for a measurement on the first qubit.

    ``rho_ab`` has shape ``(..., 2d, 2d)``; ``theta`` and ``phi`` broadcast to
    shape ``(G,)`` and the result has shape ``(..., G)``.
    """
    d = rho_ab.shape[-1] // 2
    blocks = rho_ab.reshape(rho_ab.shape[:-2] + (2, d, 2, d))
    total = 0.0
    for v in projector_vectors(theta, phi):
        # sigma = <v|_A rho |v>_A, unnormalized conditional state of B
        sigma = np.einsum("ga,...aibj,gb->...gij", v.conj(), blocks, v)
        lam = _eigvals_2x2(sigma) if d == 2 else np.linalg.eigvalsh(sigma)
        prob = lam.sum(axis=-1)
        safe = np.where(prob > BRANCH_TOL, prob, 1.0)
        ent = entropy_from_eigenvalues(np.clip(lam / safe[..., None], 0.0, None))
        total = total + np.where(prob > BRANCH_TOL, prob * ent, 0.0)
    return total


def _discord_parts(rho_ab: np.ndarray):
    """S(A) - S(AB): the measurement-independent part of the discord."""
    d = rho_ab.shape[-1] // 2
    n = (2 * d).bit_length() - 1
    s_a = entropy_array(ptrace_array(rho_ab, [0], n))
    s_ab = entropy_array(rho_ab)
    return s_a - s_ab


def _constrained_min(rho_ab: np.ndarray) -> np.ndarray:
    theta = np.array([SIGMA_X.theta, SIGMA_Z.theta])
    phi = np.array([SIGMA_X.phi, SIGMA_Z.phi])
    return conditional_entropy(rho_ab, theta, phi).min(axis=-1)


def _exact_min(rho_ab: np.ndarray, opts: DiscordOptions) -> float:
    n_theta, n_phi = opts.grid
    th = np.linspace(0.0, np.pi, n_theta)
    ph = np.arange(n_phi) * (2 * np.pi / n_phi)
    tt, pp = np.meshgrid(th, ph, indexing="ij")
    tt = np.concatenate([tt.ravel(), [SIGMA_X.theta]])
    pp = np.concatenate([pp.ravel(), [SIGMA_X.phi]])
    values = conditional_entropy(rho_ab, tt, pp)
    best = int(np.argmin(values))
    x0 = np.array([tt[best], pp[best]])

    def f(x):
        return float(conditional_entropy(rho_ab, x[:1], x[1:])[0])

    res = minimize(
        f,
        x0,
        method="Nelder-Mead",
        options={
            # near a smooth minimum an angle error e costs ~e^2 in entropy
            "xatol": np.sqrt(opts.refine_tol),
            "fatol": opts.refine_tol,
            "initial_simplex": [x0, x0 + [np.pi / n_theta, 0.0], x0 + [0.0, 2 * np.pi / n_phi]],
        },
    )
    return min(float(values[best]), float(res.fun))


def discord_array(rho_ab: np.ndarray, opts: DiscordOptions = EXACT) -> np.ndarray:
    """Discord (bits) of stacked states, measuring the first qubit."""
    rho_ab = np.asarray(rho_ab, dtype=complex)
    if rho_ab.shape[-1] not in (4, 8):
        raise ValueError("discord needs a qubit measured against 1 or 2 qubits")
    base = _discord_parts(rho_ab)
    if opts.mode == "constrained":
        cond = _constrained_min(rho_ab)
    else:
        flat = rho_ab.reshape((-1,) + rho_ab.shape[-2:])
        cond = np.array([_exact_min(r, opts) for r in flat]).reshape(rho_ab.shape[:-2])
    return base + cond


def discord(rho, measured: int, opts: DiscordOptions = EXACT) -> float:
    """Quantum discord of ``rho`` split as (measured qubit) : (all others)."""
    rho = as_density(rho)
    if rho.n not in (2, 3):
        raise ValueError("discord complement must be one or two qubits")
    (pos,) = rho.positions([measured])
    return float(discord_array(_measure_first(rho.matrix, pos, rho.n), opts))


# -- monogamy --------------------------------------------------------------------

def pair_marginals(rhos: np.ndarray, n: int, nodal: int = 0) -> list[np.ndarray]:
    return [ptrace_array(rhos, [nodal, j], n) for j in range(n) if j != nodal]


def monogamy_terms_array(rhos: np.ndarray, measure: str, opts: DiscordOptions = EXACT, nodal: int = 0):
    """(whole, pairwise) arrays for stacked n-qubit states; nodal is 0-based."""
    measure = measure_tag(measure)
    n = rhos.shape[-1].bit_length() - 1
    pairs = pair_marginals(rhos, n, nodal)
    if measure == "negativity":
        whole = negativity_array(rhos, [nodal], n)
        pairwise = [negativity_array(r, [0], 2) for r in pairs]
    else:
        if n > 3:
            raise ValueError("discord of nodal:rest needs at most three qubits")
        whole = discord_array(_measure_first(rhos, nodal, n), opts)
        pairwise = [discord_array(r, opts) for r in pairs]
    return whole, pairwise


def monogamy_scores_array(rhos: np.ndarray, measure: str, opts: DiscordOptions = EXACT, nodal: int = 0) -> np.ndarray:
    whole, pairwise = monogamy_terms_array(rhos, measure, opts, nodal)
    return whole - sum(pairwise)


def monogamy_score(rho, nodal: int = 1, measure: str = "negativity", opts: DiscordOptions = EXACT) -> MonogamyReport:
    rho = as_density(rho)
    if rho.n < 3:
        raise ValueError("monogamy scores need at least three qubits")
    measure = measure_tag(measure)
    (pos,) = rho.positions([nodal])
    whole, pairwise = monogamy_terms_array(rho.matrix, measure, opts, pos)
    return MonogamyReport(measure, nodal, float(whole), tuple(float(x) for x in pairwise))


def sign_of(value: float, tol: float = ZERO_TOL) -> int:
    if value > tol:
        return 1
    if value < -tol:
        return -1
    return 0
