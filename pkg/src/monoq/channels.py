"""Noise models: global white noise and homogeneous local Kraus channels.

Local channels act with the same single-qubit map and the same ``p`` on every
qubit.  The generic path builds all ``k**n`` product Kraus operators; the
batched path folds them into one ``4**n x 4**n`` superoperator so that many
states can be evolved with a single matrix product.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .qcore import DensityMatrix, as_density, tensor
from .states import GGHZParams, GWParams

CHANNELS = ("global", "ad", "pd", "dp")
LOCAL_CHANNELS = ("ad", "pd", "dp")

I2 = np.eye(2, dtype=complex)
SX = np.array([[0, 1], [1, 0]], dtype=complex)
SY = np.array([[0, -1j], [1j, 0]], dtype=complex)
SZ = np.array([[1, 0], [0, -1]], dtype=complex)

COMPLETENESS_TOL = 1e-12


class NotALocalChannel(ValueError):
    pass


def channel_tag(tag: str) -> str:
    tag = tag.lower()
    if tag not in CHANNELS:
        raise ValueError(f"unknown channel {tag!r}; expected one of {CHANNELS}")
    return tag


@dataclass(frozen=True)
class NoiseSpec:
    kind: str
    p: float

    def __post_init__(self):
        object.__setattr__(self, "kind", channel_tag(self.kind))
        p = float(self.p)
        if not 0.0 <= p <= 1.0:
            raise ValueError(f"noise parameter must lie in [0, 1], got {p}")
        object.__setattr__(self, "p", p)

    @property
    def q(self) -> float:
        """Depolarizing population parameter, 1 - 2p/3."""
        return 1.0 - 2.0 * self.p / 3.0

    @property
    def is_local(self) -> bool:
        return self.kind != "global"


def kraus_for(spec: NoiseSpec) -> list[np.ndarray]:
    p = spec.p
    if spec.kind == "ad":
        return [
            np.array([[1, 0], [0, np.sqrt(1 - p)]], dtype=complex),
            np.array([[0, np.sqrt(p)], [0, 0]], dtype=complex),
        ]
    if spec.kind == "pd":
        return [
            np.sqrt(1 - p) * I2,
            np.sqrt(p) / 2 * (I2 + SZ),
            np.sqrt(p) / 2 * (I2 - SZ),
        ]
    if spec.kind == "dp":
        return [np.sqrt(1 - p) * I2] + [np.sqrt(p / 3) * s for s in (SX, SY, SZ)]
    raise NotALocalChannel("global noise has no single-qubit Kraus representation here")


def completeness_error(ops) -> float:
    total = sum(k.conj().T @ k for k in ops)
    return float(np.max(np.abs(total - np.eye(total.shape[0]))))


def product_kraus(spec: NoiseSpec, n: int) -> list[np.ndarray]:
    single = kraus_for(spec)
    return [tensor(*ks) for ks in itertools.product(single, repeat=n)]


def apply_kraus(rho: np.ndarray, ops) -> np.ndarray:
    return sum(k @ rho @ k.conj().T for k in ops)


def apply_local(rho, spec: NoiseSpec) -> DensityMatrix:
    rho = as_density(rho)
    if not spec.is_local:
        raise NotALocalChannel("apply_local needs one of ad, pd, dp")
    out = apply_kraus(rho.matrix, product_kraus(spec, rho.n))
    return DensityMatrix(out, rho.register)


def apply_global(rho, p: float) -> DensityMatrix:
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"noise parameter must lie in [0, 1], got {p}")
    rho = as_density(rho)
    d = rho.dim
    return DensityMatrix(p / d * np.eye(d) + (1 - p) * rho.matrix, rho.register)


def apply_noise(rho, spec: NoiseSpec) -> DensityMatrix:
    if spec.kind == "global":
        return apply_global(rho, spec.p)
    return apply_local(rho, spec)


@lru_cache(maxsize=4096)
def _superop_cached(kind: str, p: float, n: int) -> np.ndarray:
    s = sum(np.kron(k, k.conj()) for k in product_kraus(NoiseSpec(kind, p), n))
    s.setflags(write=False)
    return s


def superoperator(spec: NoiseSpec, n: int) -> np.ndarray:
    """Row-major vectorized channel: vec(E(rho)) = S @ vec(rho)."""
    if spec.kind == "global":
        d = 1 << n
        vid = np.eye(d).reshape(-1)
        return (1 - spec.p) * np.eye(d * d) + spec.p / d * np.outer(vid, vid)
    return _superop_cached(spec.kind, spec.p, n)


def evolve_array(rhos: np.ndarray, spec: NoiseSpec) -> np.ndarray:
    """Apply the channel to a stack of density matrices ``(..., d, d)``."""
    d = rhos.shape[-1]
    if spec.kind == "global":
        return (1 - spec.p) * rhos + spec.p / d * np.eye(d)
    n = d.bit_length() - 1
    s = superoperator(spec, n)
    flat = rhos.reshape(rhos.shape[:-2] + (d * d,))
    return (flat @ s.T).reshape(rhos.shape)


def evolve_kets(kets: np.ndarray, spec: NoiseSpec) -> np.ndarray:
    """Channel output for stacked pure states ``(..., d)``."""
    rhos = kets[..., :, None] * kets[..., None, :].conj()
    return evolve_array(rhos, spec)


# -- closed forms ---------------------------------------------------------------

def _proj(v) -> np.ndarray:
    v = np.asarray(v, dtype=complex)
    return np.outer(v, v.conj())


def evolved_gghz_closed_form(params: GGHZParams, spec: NoiseSpec) -> DensityMatrix:
    p, q = spec.p, spec.q
    a = (params.a0, params.a1)
    if spec.kind == "ad":
        u = (1.0, p)
        v = (0.0, 1.0 - p)
        w = (1.0 - p) ** 1.5
    elif spec.kind == "pd":
        u, v = (1.0, 0.0), (0.0, 1.0)
        w = (1.0 - p) ** 3
    elif spec.kind == "dp":
        u = (q, 1.0 - q)
        v = (1.0 - q, q)
        w = (2 * q - 1) ** 3
    else:
        raise NotALocalChannel("closed form covers ad, pd, dp")
    rho = np.zeros((8, 8), dtype=complex)
    for i in (0, 1):
        single = np.diag([u[i], v[i]]).astype(complex)
        rho += abs(a[i]) ** 2 * tensor(single, single, single)
    rho[0, 7] += w * a[0] * np.conj(a[1])
    rho[7, 0] += w * np.conj(a[0]) * a[1]
    return DensityMatrix(rho)


def evolved_gw_closed_form(params: GWParams, spec: NoiseSpec) -> DensityMatrix:
    if params.n != 3:
        raise ValueError("closed forms are for three-qubit gW states")
    a = np.asarray(params.amplitudes)
    p, q = spec.p, spec.q
    phi = np.zeros(8, dtype=complex)
    phi[[1, 2, 4]] = a
    if spec.kind == "ad":
        e0 = np.zeros(8)
        e0[0] = 1.0
        return DensityMatrix(p * _proj(e0) + (1 - p) * _proj(phi))
    if spec.kind == "pd":
        rho = (1 - p) ** 2 * _proj(phi)
        for idx, ai in zip((1, 2, 4), a):
            rho[idx, idx] = abs(ai) ** 2
        return DensityMatrix(rho)
    if spec.kind != "dp":
        raise NotALocalChannel("closed form covers ad, pd, dp")
    ground = np.diag([q, 1 - q]).astype(complex)
    excited = np.diag([1 - q, q]).astype(complex)
    lower = np.array([[0, 1], [0, 0]], dtype=complex)  # |0><1|
    raising = lower.T  # |1><0|
    # a0 carries the excitation on qubit 3, a1 on qubit 2, a2 on qubit 1
    rho = (
        abs(a[0]) ** 2 * tensor(ground, ground, excited)
        + abs(a[1]) ** 2 * tensor(ground, excited, ground)
        + abs(a[2]) ** 2 * tensor(excited, ground, ground)
    )
    coh = (
        a[0] * np.conj(a[1]) * tensor(ground, lower, raising)
        + a[0] * np.conj(a[2]) * tensor(lower, ground, raising)
        + a[1] * np.conj(a[2]) * tensor(lower, raising, ground)
    )
    rho = rho + (2 * q - 1) ** 2 * (coh + coh.conj().T)
    return DensityMatrix(rho)
