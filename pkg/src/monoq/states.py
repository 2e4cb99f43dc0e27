"""State families: generalized GHZ/W, GHZ class, W class, and their samplers.

Sampling is reproducible and shard-friendly: state ``i`` of a run with master
seed ``s`` is drawn from its own generator seeded with ``(s, i)``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .qcore import Ket

FAMILIES = ("gghz", "gw3", "gw4", "ghz-class", "w-class")
_ALIASES = {"gw": "gw3", "ghz": "gghz", "ghzclass": "ghz-class", "wclass": "w-class"}

NORM_TOL = 1e-12


class ValidationError(ValueError):
    pass


def family_tag(tag: str) -> str:
    tag = _ALIASES.get(tag.lower(), tag.lower())
    if tag not in FAMILIES:
        raise ValidationError(f"unknown state family {tag!r}; expected one of {FAMILIES}")
    return tag


@dataclass(frozen=True)
class GGHZParams:
    a0: complex
    a1: complex

    def __post_init__(self):
        if abs(abs(self.a0) ** 2 + abs(self.a1) ** 2 - 1.0) > NORM_TOL:
            raise ValidationError("gGHZ amplitudes are not normalized")

    @classmethod
    def from_abs(cls, a0: float) -> "GGHZParams":
        """Real amplitudes with ``|a0|`` given and ``a1`` fixed by normalization."""
        return cls(complex(a0), complex(np.sqrt(max(0.0, 1.0 - a0 * a0))))


@dataclass(frozen=True)
class GWParams:
    amplitudes: tuple[complex, ...]

    def __post_init__(self):
        amps = tuple(complex(a) for a in self.amplitudes)
        object.__setattr__(self, "amplitudes", amps)
        if len(amps) not in (3, 4):
            raise ValidationError("gW states are defined for 3 or 4 qubits")
        if abs(sum(abs(a) ** 2 for a in amps) - 1.0) > NORM_TOL:
            raise ValidationError("gW amplitudes are not normalized")

    @classmethod
    def of(cls, *amps: complex) -> "GWParams":
        return cls(tuple(amps))

    @classmethod
    def completing(cls, *amps: complex) -> "GWParams":
        """All but the last amplitude given; the last is real, fixed by normalization."""
        rest = 1.0 - sum(abs(a) ** 2 for a in amps)
        if rest < -NORM_TOL:
            raise ValidationError("given amplitudes already exceed unit norm")
        return cls(tuple(amps) + (complex(np.sqrt(max(rest, 0.0))),))

    @property
    def n(self) -> int:
        return len(self.amplitudes)


@dataclass(frozen=True)
class GHZClassParams:
    delta: float
    alpha: float
    beta: float
    gamma: float
    phi: float

    def __post_init__(self):
        if not 0.0 < self.delta <= np.pi / 4:
            raise ValidationError("delta must lie in (0, pi/4]")
        for name in ("alpha", "beta", "gamma"):
            if not 0.0 < getattr(self, name) <= np.pi / 2:
                raise ValidationError(f"{name} must lie in (0, pi/2]")
        if not 0.0 <= self.phi < 2 * np.pi:
            raise ValidationError("phi must lie in [0, 2pi)")

    @property
    def K(self) -> float:
        c, s = np.cos, np.sin
        d = self.delta
        return 1.0 / (1.0 + 2 * c(d) * s(d) * c(self.alpha) * c(self.beta) * c(self.gamma) * c(self.phi))


@dataclass(frozen=True)
class WClassParams:
    a: float
    b: float
    c: float

    def __post_init__(self):
        if min(self.a, self.b, self.c) < 0.0:
            raise ValidationError("W-class weights must be non-negative")
        if self.a + self.b + self.c > 1.0 + 1e-15:
            raise ValidationError("W-class weights must sum to at most 1")


def make_gghz(p: GGHZParams) -> Ket:
    amps = np.zeros(8, dtype=complex)
    amps[0b000] = p.a0
    amps[0b111] = p.a1
    return Ket(amps)


def make_gw(p: GWParams) -> Ket:
    # a0 sits on the excitation of the last qubit, a_{n-1} on the first
    n = p.n
    amps = np.zeros(1 << n, dtype=complex)
    for i, a in enumerate(p.amplitudes):
        amps[1 << i] = a
    return Ket(amps)


def make_ghz_class(p: GHZClassParams) -> Ket:
    def local(angle):
        return np.array([np.cos(angle), np.sin(angle)], dtype=complex)

    zero = np.array([1, 0], dtype=complex)
    prod0 = np.kron(np.kron(zero, zero), zero)
    prod1 = np.kron(np.kron(local(p.alpha), local(p.beta)), local(p.gamma))
    amps = np.sqrt(p.K) * (np.cos(p.delta) * prod0 + np.sin(p.delta) * np.exp(1j * p.phi) * prod1)
    # K normalizes exactly in theory; renormalize to scrub rounding
    amps /= np.linalg.norm(amps)
    return Ket(amps)


def make_w_class(p: WClassParams) -> Ket:
    amps = np.zeros(8, dtype=complex)
    amps[0b000] = np.sqrt(max(0.0, 1.0 - (p.a + p.b + p.c)))
    amps[0b001] = np.sqrt(p.a)
    amps[0b010] = np.sqrt(p.b)
    amps[0b100] = np.sqrt(p.c)
    amps /= np.linalg.norm(amps)
    return Ket(amps)


def _unit_complex(rng: np.random.Generator, k: int) -> np.ndarray:
    z = rng.standard_normal(k) + 1j * rng.standard_normal(k)
    return z / np.linalg.norm(z)


def sample_params(family: str, seed: int, index: int):
    """Parameters of state ``index`` in the stream with master ``seed``."""
    family = family_tag(family)
    rng = np.random.default_rng([int(seed) & (2**64 - 1), int(index)])
    if family == "gghz":
        a = _unit_complex(rng, 2)
        return GGHZParams(a[0], a[1])
    if family in ("gw3", "gw4"):
        return GWParams(tuple(_unit_complex(rng, 3 if family == "gw3" else 4)))
    if family == "ghz-class":
        u = rng.random(5)
        # open lower ends: map [0,1) to (0, hi] via hi*(1-u)
        return GHZClassParams(
            delta=(np.pi / 4) * (1.0 - u[0]),
            alpha=(np.pi / 2) * (1.0 - u[1]),
            beta=(np.pi / 2) * (1.0 - u[2]),
            gamma=(np.pi / 2) * (1.0 - u[3]),
            phi=2 * np.pi * u[4],
        )
    # uniform on the simplex {a,b,c >= 0, a+b+c <= 1}: drop one of four Dirichlet(1) weights
    w = rng.dirichlet(np.ones(4))
    return WClassParams(float(w[0]), float(w[1]), float(w[2]))


def make_state(params) -> Ket:
    if isinstance(params, GGHZParams):
        return make_gghz(params)
    if isinstance(params, GWParams):
        return make_gw(params)
    if isinstance(params, GHZClassParams):
        return make_ghz_class(params)
    if isinstance(params, WClassParams):
        return make_w_class(params)
    raise ValidationError(f"not a state parameter set: {params!r}")


def sample(family: str, seed: int, count: int, start: int = 0) -> list[Ket]:
    """``count`` states of ``family``; index ``start + i`` uses seed ``(seed, start + i)``."""
    if count < 1:
        raise ValidationError("count must be at least 1")
    return [make_state(sample_params(family, seed, start + i)) for i in range(count)]


def sample_amplitudes(family: str, seed: int, count: int) -> np.ndarray:
    """Stacked state vectors, shape ``(count, 2**n)``."""
    return np.stack([k.amplitudes for k in sample(family, seed, count)])
