"""Dense linear algebra on small qubit registers (up to 16x16).

Qubit labels are positive integers; the first label of a register is the
leftmost tensor factor, so bit ``k`` of a row index (counting from the most
significant bit) belongs to the ``k``-th qubit of the register.

Array-level helpers (``*_array``) take positional 0-based qubit indices and
broadcast over any leading batch dimensions; they are the hot path used by
the ensemble drivers.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

HERMITIAN_TOL = 1e-12
TRACE_TOL = 1e-12
PSD_TOL = 1e-10
EIG_INPUT_TOL = 1e-10

ALLOWED_DIMS = (2, 4, 8, 16)


class LabelError(KeyError):
    """A qubit label is not part of the register."""


class ContractViolation(ValueError):
    """An input broke a numerical precondition (Hermiticity, PSD, ...)."""


def _n_qubits(dim: int) -> int:
    n = dim.bit_length() - 1
    if 1 << n != dim:
        raise ValueError(f"dimension {dim} is not a power of two")
    return n


# -- array level -------------------------------------------------------------

def dagger(m: np.ndarray) -> np.ndarray:
    return np.conj(np.swapaxes(m, -1, -2))


def tensor(*ms: np.ndarray) -> np.ndarray:
    out = np.asarray(ms[0], dtype=complex)
    for m in ms[1:]:
        out = np.kron(out, np.asarray(m, dtype=complex))
    return out


def ptrace_array(rho: np.ndarray, keep: Sequence[int], n: int) -> np.ndarray:
    """Reduced matrix on the 0-based qubits ``keep`` (kept in given order)."""
    keep = list(keep)
    drop = [q for q in range(n) if q not in keep]
    batch = rho.shape[:-2]
    nb = len(batch)
    t = rho.reshape(batch + (2,) * (2 * n))
    # bring (keep rows, drop rows, keep cols, drop cols) into place, then trace
    rows = [nb + q for q in keep + drop]
    cols = [nb + n + q for q in keep + drop]
    t = np.transpose(t, list(range(nb)) + rows + cols)
    dk, dd = 1 << len(keep), 1 << len(drop)
    t = t.reshape(batch + (dk, dd, dk, dd))
    return np.einsum("...iaja->...ij", t)


def ptranspose_array(rho: np.ndarray, part: Iterable[int], n: int) -> np.ndarray:
    """Partial transpose on the 0-based qubits ``part``."""
    batch = rho.shape[:-2]
    nb = len(batch)
    t = rho.reshape(batch + (2,) * (2 * n))
    axes = list(range(nb + 2 * n))
    for q in part:
        axes[nb + q], axes[nb + n + q] = axes[nb + n + q], axes[nb + q]
    return np.transpose(t, axes).reshape(rho.shape)


def entropy_from_eigenvalues(w: np.ndarray) -> np.ndarray:
    """Shannon entropy in bits of eigenvalue rows; tiny negatives count as 0."""
    w = np.asarray(w, dtype=float)
    if np.any(w < -PSD_TOL):
        raise ContractViolation(f"eigenvalue {w.min():.3e} below -{PSD_TOL:g}")
    w = np.clip(w, 0.0, 1.0)
    with np.errstate(divide="ignore", invalid="ignore"):
        terms = np.where(w > 0.0, -w * np.log2(np.where(w > 0.0, w, 1.0)), 0.0)
    return terms.sum(axis=-1)


def entropy_array(rho: np.ndarray) -> np.ndarray:
    return entropy_from_eigenvalues(np.linalg.eigvalsh(rho))


# -- labelled values ---------------------------------------------------------

@dataclass(frozen=True)
class Ket:
    amplitudes: np.ndarray
    register: tuple[int, ...] = field(default=())

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=complex).reshape(-1)
        n = _n_qubits(amps.size)
        object.__setattr__(self, "amplitudes", amps)
        if not self.register:
            object.__setattr__(self, "register", tuple(range(1, n + 1)))
        elif len(self.register) != n:
            raise ValueError("register length does not match amplitude count")
        norm = float(np.vdot(amps, amps).real)
        if abs(norm - 1.0) > 1e-12:
            raise ValueError(f"ket is not normalized (norm^2 = {norm!r})")

    @property
    def n(self) -> int:
        return len(self.register)

    def density(self) -> "DensityMatrix":
        return DensityMatrix(np.outer(self.amplitudes, self.amplitudes.conj()), self.register)


@dataclass(frozen=True)
class DensityMatrix:
    """Density matrix with an ordered register of qubit labels."""

    matrix: np.ndarray
    register: tuple[int, ...] = field(default=())

    def __post_init__(self):
        m = np.array(self.matrix, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] not in ALLOWED_DIMS:
            raise ValueError(f"unsupported matrix shape {m.shape}")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)
        n = _n_qubits(m.shape[0])
        if not self.register:
            object.__setattr__(self, "register", tuple(range(1, n + 1)))
        else:
            reg = tuple(self.register)
            if len(reg) != n or len(set(reg)) != n:
                raise ValueError("register must hold one distinct label per qubit")
            object.__setattr__(self, "register", reg)

    @property
    def n(self) -> int:
        return len(self.register)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def positions(self, labels: Iterable[int]) -> list[int]:
        pos = []
        for label in labels:
            try:
                pos.append(self.register.index(label))
            except ValueError:
                raise LabelError(label) from None
        return pos

    def check(self) -> "DensityMatrix":
        """Raise ContractViolation unless Hermitian, unit-trace and PSD."""
        m = self.matrix
        herm = np.max(np.abs(m - m.conj().T))
        if herm > HERMITIAN_TOL:
            raise ContractViolation(f"not Hermitian (max deviation {herm:.3e})")
        tr = np.trace(m)
        if abs(tr - 1.0) > TRACE_TOL:
            raise ContractViolation(f"trace {tr} differs from 1")
        lam = np.linalg.eigvalsh(m).min()
        if lam < -PSD_TOL:
            raise ContractViolation(f"negative eigenvalue {lam:.3e}")
        return self

    def is_valid(self) -> bool:
        try:
            self.check()
        except ContractViolation:
            return False
        return True


def as_density(rho) -> DensityMatrix:
    if isinstance(rho, DensityMatrix):
        return rho
    if isinstance(rho, Ket):
        return rho.density()
    return DensityMatrix(rho)


def partial_trace(rho: DensityMatrix, keep: Iterable[int]) -> DensityMatrix:
    """Trace out every qubit not in ``keep``; the result keeps register order."""
    rho = as_density(rho)
    keep = set(keep)
    if not keep:
        raise ValueError("keep must be nonempty")
    pos = sorted(rho.positions(keep))
    reduced = ptrace_array(rho.matrix, pos, rho.n)
    return DensityMatrix(reduced, tuple(rho.register[i] for i in pos))


def partial_transpose(rho: DensityMatrix, part: Iterable[int]) -> np.ndarray:
    rho = as_density(rho)
    return ptranspose_array(rho.matrix, rho.positions(part), rho.n)


def eig_hermitian(m: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Ascending eigenvalues and unitary eigenvectors of a Hermitian matrix."""
    m = np.asarray(m, dtype=complex)
    dev = np.max(np.abs(m - m.conj().T)) if m.size else 0.0
    if dev > EIG_INPUT_TOL:
        raise ContractViolation(f"matrix is not Hermitian (max deviation {dev:.3e})")
    w, v = np.linalg.eigh(0.5 * (m + m.conj().T))
    return w, v


def von_neumann_entropy(rho: DensityMatrix) -> float:
    rho = as_density(rho)
    w, _ = eig_hermitian(rho.matrix)
    return float(entropy_from_eigenvalues(w))
