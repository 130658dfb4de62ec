"""Seeded construction of the named states and random objects.

Randomness comes from numpy's PCG64 via :func:`make_rng`.  An integer seed is
expanded through :class:`numpy.random.SeedSequence`; :func:`spawn` splits a
seed into independent child streams so that parallel or reordered test cases
stay reproducible.
"""

from __future__ import annotations

from typing import Sequence, Union

import numpy as np

from .errors import NotUnitary, ParameterOutOfRange, ShapeMismatch
from .linalg import DensityMatrix, apply_local, as_pure, is_unitary, kron_all

Seed = Union[int, np.random.Generator, None]


def make_rng(seed: Seed = 0) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed)))


def spawn(seed: int, n: int) -> list[np.random.Generator]:
    """``n`` independent generators derived from one seed."""
    children = np.random.SeedSequence(seed).spawn(n)
    return [np.random.Generator(np.random.PCG64(c)) for c in children]


def haar_unitary(d: int, seed: Seed = 0) -> np.ndarray:
    """Haar-distributed ``d x d`` unitary.

    QR of a complex Ginibre matrix, with each column rescaled by the phase of
    the matching diagonal entry of ``R``; plain QR output is not Haar.
    """
    if d < 1:
        raise ParameterOutOfRange("dimension must be positive")
    rng = make_rng(seed)
    z = (rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    diag = np.diag(r)
    return q * (diag / np.abs(diag))


def random_pure(dims: Sequence[int], seed: Seed = 0) -> np.ndarray:
    """Haar-random pure state as a tensor of shape ``dims``."""
    rng = make_rng(seed)
    dims = tuple(dims)
    v = rng.standard_normal(dims) + 1j * rng.standard_normal(dims)
    return v / np.linalg.norm(v)


def basis_state(dims: Sequence[int], index: Sequence[int]) -> np.ndarray:
    psi = np.zeros(tuple(dims), dtype=complex)
    psi[tuple(index)] = 1.0
    return psi


def maximally_entangled(d: int, twist: np.ndarray | None = None) -> np.ndarray:
    """``(twist (x) I)|psi+>`` with ``|psi+> = sum_a |aa> / sqrt(d)``.

    The coefficient matrix of the result is ``twist / sqrt(d)``.
    """
    if twist is None:
        return np.eye(d, dtype=complex) / np.sqrt(d)
    twist = np.asarray(twist, dtype=complex)
    if twist.shape != (d, d) or not is_unitary(twist):
        raise NotUnitary("twist must be a d x d unitary")
    return twist / np.sqrt(d)


def _projector(psi: np.ndarray) -> np.ndarray:
    v = np.asarray(psi).reshape(-1)
    return np.outer(v, v.conj())


def isotropic_state(d: int, p: float) -> DensityMatrix:
    """``p/d^2 I + (1-p)|psi+><psi+|`` for ``0 <= p <= 1``."""
    if not 0.0 <= p <= 1.0:
        raise ParameterOutOfRange(f"p={p} outside [0, 1]")
    mat = p / d**2 * np.eye(d * d) + (1 - p) * _projector(maximally_entangled(d))
    return DensityMatrix((d, d), mat)


def swap_operator(d: int) -> np.ndarray:
    """``sum_ij |ij><ji|``."""
    out = np.zeros((d * d, d * d))
    for i in range(d):
        for j in range(d):
            out[i * d + j, j * d + i] = 1.0
    return out


def werner_state(d: int, f: float) -> DensityMatrix:
    """``[(d-f) I + (d f - 1) SWAP] / (d^3 - d)``; ``f = Tr(rho SWAP)``."""
    if d < 2:
        raise ParameterOutOfRange("Werner states need d >= 2")
    if not -1.0 <= f <= 1.0:
        raise ParameterOutOfRange(f"f={f} outside [-1, 1]")
    mat = ((d - f) * np.eye(d * d) + (d * f - 1) * swap_operator(d)) / (d**3 - d)
    return DensityMatrix((d, d), mat)


def werner_pt_closed_form(d: int, f: float) -> np.ndarray:
    """Closed form of the partial transpose of :func:`werner_state`."""
    return (d - f) / (d**3 - d) * np.eye(d * d) + (d * f - 1) / (d**2 - 1) * _projector(
        maximally_entangled(d)
    )


def ghz_state() -> np.ndarray:
    psi = np.zeros((2, 2, 2), dtype=complex)
    psi[0, 0, 0] = psi[1, 1, 1] = 1 / np.sqrt(2)
    return psi


def w_state() -> np.ndarray:
    psi = np.zeros((2, 2, 2), dtype=complex)
    psi[0, 0, 1] = psi[0, 1, 0] = psi[1, 0, 0] = 1 / np.sqrt(3)
    return psi


def ghz_w_mixtures(p: float, q: float) -> tuple[DensityMatrix, DensityMatrix]:
    """Three-qubit white-noise mixtures of a GHZ-type and a W-type state.

    ``rho_k = p/8 I + (1-p) sigma_k`` with ``sigma_1 = q|GHZ><GHZ| +
    (1-q)|111><111|`` and ``sigma_2 = q|W><W| + (1-q)|111><111|`` (GHZ and W
    normalized).
    """
    for name, x in (("p", p), ("q", q)):
        if not 0.0 <= x <= 1.0:
            raise ParameterOutOfRange(f"{name}={x} outside [0, 1]")
    top = _projector(basis_state((2, 2, 2), (1, 1, 1)))
    noise = p / 8 * np.eye(8)
    sig1 = q * _projector(ghz_state()) + (1 - q) * top
    sig2 = q * _projector(w_state()) + (1 - q) * top
    dims = (2, 2, 2)
    return (
        DensityMatrix(dims, noise + (1 - p) * sig1),
        DensityMatrix(dims, noise + (1 - p) * sig2),
    )


def isotropic_like_state(
    dims: Sequence[int], p0: float, components: Sequence[tuple[float, np.ndarray]]
) -> DensityMatrix:
    """``p0/D I + sum_i p_i |phi_i><phi_i|``; weights may be signed."""
    dims = tuple(dims)
    D = int(np.prod(dims))
    mat = p0 / D * np.eye(D, dtype=complex)
    for w, phi in components:
        mat = mat + w * _projector(as_pure(phi, dims))
    return DensityMatrix(dims, mat, psd=False)


def random_isotropic_like(
    d: int, K: int, seed: Seed = 0, noise: float | None = None
) -> DensityMatrix:
    """Random ``d x d`` isotropic-like state with ``K`` orthogonal components.

    Component weights are well separated from one another and from zero.
    """
    if not 1 <= K < d * d:
        raise ParameterOutOfRange(f"need 1 <= K < d^2, got K={K}")
    rng = make_rng(seed)
    basis = haar_unitary(d * d, rng)
    p0 = rng.uniform(0.1, 0.4) if noise is None else noise
    raw = np.sort(rng.uniform(0.0, 1.0, size=K))
    raw = raw + 0.5 * np.arange(1, K + 1)
    weights = (1 - p0) * raw / raw.sum()
    comps = [(float(w), basis[:, k].reshape(d, d)) for k, w in enumerate(weights)]
    rho = isotropic_like_state((d, d), p0, comps)
    return DensityMatrix((d, d), rho.mat)


def apply_local_unitaries(state, unitaries: Sequence[np.ndarray]):
    """Apply ``U_1 (x) ... (x) U_n`` to a pure tensor or conjugate a density matrix."""
    unitaries = [np.asarray(u, dtype=complex) for u in unitaries]
    for u in unitaries:
        if not is_unitary(u):
            raise NotUnitary("local operator is not unitary")
    if isinstance(state, DensityMatrix):
        if tuple(u.shape[0] for u in unitaries) != state.dims:
            raise ShapeMismatch("unitary dimensions do not match the state")
        big = kron_all(unitaries)
        mat = big @ state.mat @ big.conj().T
        return DensityMatrix(state.dims, (mat + mat.conj().T) / 2, psd=state.psd)
    psi = np.asarray(state, dtype=complex)
    if tuple(u.shape[0] for u in unitaries) != psi.shape:
        raise ShapeMismatch("unitary dimensions do not match the state")
    return apply_local(psi, unitaries)


def haar_local_unitaries(dims: Sequence[int], seed: Seed = 0) -> list[np.ndarray]:
    rng = make_rng(seed)
    return [haar_unitary(d, rng) for d in dims]
