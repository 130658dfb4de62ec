"""Linear systems over phase angles modulo 2*pi.

A system ``C @ x = phi (mod 2 pi)`` with an integer matrix ``C`` is reduced
with the Smith normal form ``S = P C Q``.  Writing ``x = Q y`` turns it into
``s_k y_k = (P phi)_k`` row by row: rows with ``s_k != 0`` are always solvable,
rows past the rank are consistency conditions.  Each such row ``m = P[k]``
satisfies ``m @ C = 0``, so ``m @ phi`` is unchanged by every ``x`` and serves
as a certificate when it is not a multiple of 2 pi.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from sympy import Matrix, ZZ
from sympy.matrices.normalforms import smith_normal_decomp


def wrap(angle):
    """Map angles into ``(-pi, pi]``."""
    return np.pi - np.mod(np.pi - np.asarray(angle, dtype=float), 2 * np.pi)


@dataclass(frozen=True)
class PhaseSolution:
    x: np.ndarray
    # (integer row m with m @ C == 0, wrapped residual m @ phi)
    conditions: tuple[tuple[np.ndarray, float], ...]

    def worst(self) -> tuple[np.ndarray, float] | None:
        if not self.conditions:
            return None
        return max(self.conditions, key=lambda c: abs(c[1]))

    def consistent(self, tol: float) -> bool:
        worst = self.worst()
        return worst is None or abs(worst[1]) <= tol


def solve_phase_system(C: np.ndarray, phi: np.ndarray) -> PhaseSolution:
    C = np.asarray(C, dtype=np.int64)
    phi = np.asarray(phi, dtype=float)
    n_rows, n_vars = C.shape
    if n_rows == 0 or n_vars == 0:
        return PhaseSolution(np.zeros(n_vars), ())
    S, P, Q = smith_normal_decomp(Matrix(C.tolist()), domain=ZZ)
    S = np.array(S.tolist(), dtype=np.int64)
    P = np.array(P.tolist(), dtype=np.int64)
    Q = np.array(Q.tolist(), dtype=np.int64)
    rhs = P @ phi
    diag = [int(S[k, k]) for k in range(min(n_rows, n_vars))]
    rank = sum(1 for s in diag if s != 0)
    y = np.zeros(n_vars)
    for k in range(rank):
        y[k] = rhs[k] / diag[k]
    conditions = tuple((P[k], float(wrap(rhs[k]))) for k in range(rank, n_rows))
    # the unimodular factors can have large entries; polish away the cancellation error
    x = wrap(Q @ y)
    Cf = C.astype(float)
    for _ in range(2):
        x = x + np.linalg.lstsq(Cf, wrap(phi - Cf @ x), rcond=None)[0]
    return PhaseSolution(x, conditions)
