"""Dense complex linear and multilinear algebra primitives.

Conventions used throughout the package:

* computational basis indices are zero based;
* a pure state on ``H_1 (x) ... (x) H_N`` is an ``ndarray`` of shape ``dims``
  stored row-major, so ``i_1`` is the slowest index;
* a density matrix is a :class:`DensityMatrix`, i.e. a square matrix of side
  ``prod(dims)`` together with its subsystem dimensions.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import reduce
from typing import Sequence

import numpy as np

from .errors import (
    InvalidState,
    ModeOutOfRange,
    NonHermitianInput,
    NotBipartite,
    NotNormalized,
    ShapeMismatch,
)

HERMITIAN_TOL = 1e-10
TRACE_TOL = 1e-10
PSD_TOL = 1e-10
NORM_TOL = 1e-12
UNITARY_TOL = 1e-10


@dataclass(frozen=True)
class DensityMatrix:
    """Hermitian, unit-trace matrix over a tensor-product space.

    ``psd=False`` relaxes the positivity check only; this is what partial
    transposes and signed isotropic-like forms need. Hermiticity and trace are
    always enforced.
    """

    dims: tuple[int, ...]
    mat: np.ndarray = field(repr=False)
    psd: bool = True

    def __post_init__(self):
        dims = tuple(int(d) for d in self.dims)
        if not dims or any(d < 1 for d in dims):
            raise ShapeMismatch(f"invalid subsystem dimensions {self.dims}")
        mat = np.array(self.mat, dtype=complex)
        side = int(np.prod(dims))
        if mat.shape != (side, side):
            raise ShapeMismatch(f"matrix shape {mat.shape} does not match dims {dims}")
        if np.max(np.abs(mat - mat.conj().T), initial=0.0) > HERMITIAN_TOL:
            raise NonHermitianInput("density matrix is not Hermitian")
        if abs(np.trace(mat) - 1.0) > TRACE_TOL:
            raise InvalidState(f"trace {np.trace(mat).real:.3g} differs from 1")
        if self.psd and np.linalg.eigvalsh(mat)[0] < -PSD_TOL:
            raise InvalidState("density matrix has a negative eigenvalue")
        mat.setflags(write=False)
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "mat", mat)

    @property
    def dim(self) -> int:
        return self.mat.shape[0]

    @classmethod
    def from_pure(cls, psi: np.ndarray) -> "DensityMatrix":
        psi = as_pure(psi)
        v = psi.reshape(-1)
        return cls(psi.shape, np.outer(v, v.conj()))

    def spectrum(self) -> np.ndarray:
        """Eigenvalues in descending order."""
        return np.linalg.eigvalsh(self.mat)[::-1]


def as_pure(psi, dims: Sequence[int] | None = None) -> np.ndarray:
    """Validate ``psi`` as a normalized pure state and return it shaped ``dims``."""
    psi = np.array(psi, dtype=complex)
    if dims is not None:
        dims = tuple(int(d) for d in dims)
        if psi.size != int(np.prod(dims)):
            raise ShapeMismatch(f"{psi.size} amplitudes do not match dims {dims}")
        psi = psi.reshape(dims)
    if abs(np.linalg.norm(psi) - 1.0) > NORM_TOL:
        raise NotNormalized(f"state norm {np.linalg.norm(psi):.15g} is not 1")
    return psi


def is_unitary(u: np.ndarray, tol: float = UNITARY_TOL) -> bool:
    u = np.asarray(u)
    if u.ndim != 2 or u.shape[0] != u.shape[1]:
        return False
    return np.linalg.norm(u @ u.conj().T - np.eye(u.shape[0])) <= tol


def kron_all(mats: Sequence[np.ndarray]) -> np.ndarray:
    return reduce(np.kron, mats)


def eig_hermitian(m: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Eigendecomposition of a Hermitian matrix, eigenvalues descending.

    Returns ``(w, v)`` with ``m = v @ diag(w) @ v^dagger``.
    """
    m = np.asarray(m, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ShapeMismatch(f"expected a square matrix, got shape {m.shape}")
    if np.max(np.abs(m - m.conj().T), initial=0.0) > HERMITIAN_TOL:
        raise NonHermitianInput("matrix is not Hermitian")
    w, v = np.linalg.eigh(m)
    return w[::-1].copy(), v[:, ::-1].copy()


def svd(m: np.ndarray, full: bool = True) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Singular value decomposition ``m = U diag(s) V^dagger``, ``s`` descending.

    Note that the third return value is ``V`` itself, not ``V^dagger``.
    """
    m = np.asarray(m, dtype=complex)
    u, s, vh = np.linalg.svd(m, full_matrices=full)
    return u, s, vh.conj().T


def _bipartite_dims(rho, dims) -> tuple[np.ndarray, tuple[int, int]]:
    if isinstance(rho, DensityMatrix):
        dims = rho.dims if dims is None else dims
        mat = rho.mat
    else:
        mat = np.asarray(rho, dtype=complex)
        if dims is None:
            raise NotBipartite("subsystem dimensions are required for a bare matrix")
    dims = tuple(int(d) for d in dims)
    if len(dims) != 2:
        raise NotBipartite(f"expected two subsystems, got dims {dims}")
    if mat.shape != (dims[0] * dims[1],) * 2:
        raise ShapeMismatch(f"matrix shape {mat.shape} does not match dims {dims}")
    return mat, dims


def partial_transpose(rho, subsystem: int = 2, dims: Sequence[int] | None = None):
    """Transpose one tensor factor of a bipartite operator.

    Entry rule for ``subsystem=2``: ``out[m mu, n nu] = rho[m nu, n mu]``; the
    operation is a pure permutation of entries. A :class:`DensityMatrix` input
    gives a :class:`DensityMatrix` with the positivity check disabled, a bare
    array gives a bare array.
    """
    mat, (d1, d2) = _bipartite_dims(rho, dims)
    if subsystem not in (1, 2):
        raise NotBipartite(f"subsystem must be 1 or 2, got {subsystem}")
    t = mat.reshape(d1, d2, d1, d2)
    if subsystem == 2:
        out = t.transpose(0, 3, 2, 1).reshape(d1 * d2, d1 * d2)
    else:
        out = t.transpose(2, 1, 0, 3).reshape(d1 * d2, d1 * d2)
    if isinstance(rho, DensityMatrix):
        return DensityMatrix((d1, d2), out, psd=False)
    return out


def partial_trace(rho, keep: int, dims: Sequence[int] | None = None) -> np.ndarray:
    """Reduced operator on subsystem ``keep`` (1 or 2) of a bipartite operator."""
    mat, (d1, d2) = _bipartite_dims(rho, dims)
    t = mat.reshape(d1, d2, d1, d2)
    if keep == 1:
        return np.einsum("ajbj->ab", t)
    if keep == 2:
        return np.einsum("iaib->ab", t)
    raise NotBipartite(f"keep must be 1 or 2, got {keep}")


def reduced_density(rho, keep: Sequence[int], dims: Sequence[int] | None = None) -> np.ndarray:
    """Partial trace over every subsystem not listed in ``keep`` (zero-based)."""
    if isinstance(rho, DensityMatrix):
        dims = rho.dims
        mat = rho.mat
    else:
        mat = np.asarray(rho, dtype=complex)
    dims = tuple(dims)
    n = len(dims)
    keep = sorted(keep)
    t = mat.reshape(dims + dims)
    traced = [k for k in range(n) if k not in keep]
    for count, k in enumerate(traced):
        axis = k - count
        t = np.trace(t, axis1=axis, axis2=axis + t.ndim // 2)
    side = int(np.prod([dims[k] for k in keep]))
    return t.reshape(side, side)


def _cyclic_order(n_modes: int, mode: int) -> list[int]:
    return [(mode + k) % n_modes for k in range(n_modes)]


def unfold(t: np.ndarray, mode: int) -> np.ndarray:
    """Mode-``mode`` matrix unfolding (``mode`` is one-based).

    Rows are indexed by ``i_mode``; columns by the remaining indices in cyclic
    order ``i_{mode+1}, ..., i_N, i_1, ..., i_{mode-1}``, the first of them
    slowest (row-major).
    """
    t = np.asarray(t)
    if not 1 <= mode <= t.ndim:
        raise ModeOutOfRange(f"mode {mode} outside 1..{t.ndim}")
    order = _cyclic_order(t.ndim, mode - 1)
    return t.transpose(order).reshape(t.shape[mode - 1], -1)


def fold(m: np.ndarray, mode: int, dims: Sequence[int]) -> np.ndarray:
    """Inverse of :func:`unfold`."""
    dims = tuple(dims)
    if not 1 <= mode <= len(dims):
        raise ModeOutOfRange(f"mode {mode} outside 1..{len(dims)}")
    order = _cyclic_order(len(dims), mode - 1)
    t = np.asarray(m).reshape([dims[k] for k in order])
    return t.transpose(np.argsort(order))


def mode_product(t: np.ndarray, m: np.ndarray, axis: int) -> np.ndarray:
    """Apply matrix ``m`` to tensor index ``axis`` (zero-based)."""
    return np.moveaxis(np.tensordot(m, t, axes=(1, axis)), 0, axis)


def apply_local(t: np.ndarray, mats: Sequence[np.ndarray]) -> np.ndarray:
    """Compute ``(M_1 (x) ... (x) M_N) t`` for a tensor ``t`` of order N."""
    out = np.asarray(t, dtype=complex)
    for axis, m in enumerate(mats):
        out = mode_product(out, m, axis)
    return out
