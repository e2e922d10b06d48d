"""Dense complex matrix kernel: kets, projectors, density matrices."""

from __future__ import annotations

from typing import Sequence

import numpy as np

EPS_MAT = 1e-9

_PAULI = {
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}


class LinalgError(ValueError):
    """Invalid matrix input (shape, Hermiticity, idempotence, ...)."""


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=complex)
    a.setflags(write=False)
    return a


def fro(a: np.ndarray) -> float:
    return float(np.linalg.norm(a))


def as_matrix(data) -> np.ndarray:
    """Coerce nested lists (entries either numbers or ``[re, im]`` pairs) to a square complex array."""
    if isinstance(data, np.ndarray):
        m = np.asarray(data, dtype=complex)
    else:
        arr = np.asarray(data)
        if arr.ndim == 3 and arr.shape[-1] == 2 and not np.iscomplexobj(arr):
            m = arr[..., 0].astype(float) + 1j * arr[..., 1].astype(float)
        else:
            m = arr.astype(complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise LinalgError(f"expected a square matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise LinalgError("matrix has non-finite entries")
    return m


class Ket:
    """A (possibly unnormalized) state vector."""

    __slots__ = ("entries",)

    def __init__(self, entries: Sequence[complex] | np.ndarray):
        arr = np.asarray(entries)
        if arr.ndim == 2 and arr.shape[-1] == 2 and not np.iscomplexobj(arr):
            arr = arr[:, 0].astype(float) + 1j * arr[:, 1].astype(float)
        v = np.asarray(arr, dtype=complex).ravel()
        if v.size == 0:
            raise LinalgError("empty ket")
        if np.linalg.norm(v) <= EPS_MAT:
            raise LinalgError("zero vector cannot define a ket direction")
        self.entries = _frozen(v)

    @property
    def dim(self) -> int:
        return self.entries.size

    def normalized(self) -> np.ndarray:
        return self.entries / np.linalg.norm(self.entries)

    def __repr__(self) -> str:
        return f"Ket({self.entries.tolist()})"


def _as_ket(k) -> Ket:
    return k if isinstance(k, Ket) else Ket(k)


class Projector:
    """An orthogonal projector, checked for Hermiticity and idempotence on construction."""

    __slots__ = ("matrix", "rank")

    def __init__(self, matrix, *, check: bool = True):
        m = as_matrix(matrix)
        if check:
            if fro(m - m.conj().T) >= EPS_MAT:
                raise LinalgError("projector is not Hermitian")
            if fro(m @ m - m) >= EPS_MAT:
                raise LinalgError("projector is not idempotent")
        self.matrix = _frozen(m)
        self.rank = int(round(float(np.trace(m).real)))

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def __eq__(self, other) -> bool:
        if not isinstance(other, Projector) or other.dim != self.dim:
            return NotImplemented
        return fro(self.matrix - other.matrix) < EPS_MAT

    __hash__ = None  # equality is tolerance-based

    def __repr__(self) -> str:
        return f"Projector(dim={self.dim}, rank={self.rank})"


class DensityMatrix:
    """A quantum state: Hermitian, unit trace, positive semidefinite."""

    __slots__ = ("matrix",)

    def __init__(self, matrix):
        m = as_matrix(matrix)
        if fro(m - m.conj().T) >= EPS_MAT:
            raise LinalgError("density matrix is not Hermitian")
        if abs(np.trace(m) - 1) >= EPS_MAT:
            raise LinalgError(f"density matrix trace is {np.trace(m).real:.12g}, expected 1")
        herm = (m + m.conj().T) / 2
        lo = float(np.linalg.eigvalsh(herm)[0])
        if lo <= -EPS_MAT:
            raise LinalgError(f"density matrix is not positive semidefinite (min eigenvalue {lo:.3g})")
        self.matrix = _frozen(m)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def __repr__(self) -> str:
        return f"DensityMatrix(dim={self.dim})"


def _check_dims(*ps: Projector | DensityMatrix) -> None:
    dims = {p.dim for p in ps}
    if len(dims) != 1:
        raise LinalgError(f"dimension mismatch: {sorted(dims)}")


def projector_from_ket(k) -> Projector:
    v = _as_ket(k).normalized()
    return Projector(np.outer(v, v.conj()), check=False)


def identity(dim: int) -> Projector:
    return Projector(np.eye(dim), check=False)


def zero(dim: int) -> Projector:
    return Projector(np.zeros((dim, dim)), check=False)


def commutes(p: Projector, q: Projector) -> bool:
    _check_dims(p, q)
    a, b = p.matrix, q.matrix
    return fro(a @ b - b @ a) < EPS_MAT


def is_orthogonal(p: Projector, q: Projector) -> bool:
    _check_dims(p, q)
    return fro(p.matrix @ q.matrix) < EPS_MAT


def leq(p: Projector, q: Projector) -> bool:
    """Range containment: ``p <= q`` iff ``q p = p``."""
    _check_dims(p, q)
    return fro(q.matrix @ p.matrix - p.matrix) < EPS_MAT


def complement(p: Projector) -> Projector:
    return Projector(np.eye(p.dim) - p.matrix, check=False)


def clean_projector(m: np.ndarray, steps: int = 3) -> np.ndarray:
    """Pull a nearly-idempotent Hermitian matrix back onto the projector manifold.

    Uses McWeeny purification ``P <- 3P^2 - 2P^3``, which converges quadratically
    for matrices whose spectrum is already clustered near 0 and 1.
    """
    m = (m + m.conj().T) / 2
    for _ in range(steps):
        m2 = m @ m
        m = 3 * m2 - 2 * m2 @ m
        m = (m + m.conj().T) / 2
    return m


def meet_commuting(p: Projector, q: Projector) -> Projector:
    if not commutes(p, q):
        raise LinalgError("meet is only defined for commuting projectors")
    a, b = p.matrix, q.matrix
    return Projector(clean_projector((a @ b + b @ a) / 2), check=False)


def join_commuting(p: Projector, q: Projector) -> Projector:
    return complement(meet_commuting(complement(p), complement(q)))


def tensor(a, b) -> np.ndarray:
    a = a.matrix if isinstance(a, (Projector, DensityMatrix)) else np.asarray(a, dtype=complex)
    b = b.matrix if isinstance(b, (Projector, DensityMatrix)) else np.asarray(b, dtype=complex)
    return np.kron(a, b)


def pauli_matrix(name: str) -> np.ndarray:
    try:
        return _PAULI[name.upper()].copy()
    except (KeyError, AttributeError):
        raise LinalgError(f"unknown Pauli operator {name!r}; expected X, Y or Z") from None


def pauli(name: str, outcome: int) -> Projector:
    """Eigenprojector ``(I + outcome*M)/2`` of the named Pauli matrix."""
    if outcome not in (1, -1):
        raise LinalgError(f"Pauli outcome must be +1 or -1, got {outcome!r}")
    return Projector((np.eye(2) + outcome * pauli_matrix(name)) / 2, check=False)


def eigenprojector(observable, outcome: int) -> Projector:
    """Projector onto the ``outcome`` eigenspace of a +/-1 involution."""
    m = as_matrix(observable)
    if fro(m - m.conj().T) >= EPS_MAT or fro(m @ m - np.eye(m.shape[0])) >= EPS_MAT:
        raise LinalgError("observable is not a Hermitian involution (M^2 = I)")
    return Projector(clean_projector((np.eye(m.shape[0]) + outcome * m) / 2))


def born_probability(rho: DensityMatrix, p: Projector) -> float:
    _check_dims(rho, p)
    val = float(np.trace(rho.matrix @ p.matrix).real)
    if val < -EPS_MAT or val > 1 + EPS_MAT:
        raise LinalgError(f"Born probability {val:.12g} outside [0, 1]")
    return min(1.0, max(0.0, val))


def maximally_mixed(dim: int) -> DensityMatrix:
    if dim < 1:
        raise LinalgError("dimension must be positive")
    return DensityMatrix(np.eye(dim) / dim)


def pure(k) -> DensityMatrix:
    v = _as_ket(k).normalized()
    return DensityMatrix(np.outer(v, v.conj()))
