"""Decision procedures for bipartite isotropic-like states.

Every procedure returns a :class:`Verdict`:

* ``Equivalent`` only with a witness that reproduces the second input from the
  first by direct conjugation;
* ``NotEquivalent`` only with a certificate, i.e. a named invariant whose two
  values differ by more than the comparison tolerance;
* ``Indeterminate`` otherwise.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Any, Sequence

import numpy as np

from .config import DeciderConfig
from .errors import (
    DegenerateAlignment,
    MultipleDegenerateClusters,
    NotBipartite,
    NotIsotropicLike,
    ShapeMismatch,
    ValidationFailed,
)
from .generators import isotropic_state, maximally_entangled, werner_state
from .invariants import (
    affordable_bound,
    coefficient_matrix,
    default_pair_bound,
    default_specht_bound,
    global_spectral_invariants,
    pair_signature,
    schmidt_invariants,
    specht_signature,
)
from .linalg import DensityMatrix, as_pure, eig_hermitian, kron_all, partial_transpose
from .witness import clusters, construct_lu_witness, construct_lus_witness, svd_alignment

REBUILD_TOL = 1e-10
CLASSIFY_TOL = 1e-10


class Outcome(enum.Enum):
    EQUIVALENT = "Equivalent"
    NOT_EQUIVALENT = "NotEquivalent"
    INDETERMINATE = "Indeterminate"

    @property
    def exit_code(self) -> int:
        return {"Equivalent": 0, "NotEquivalent": 1, "Indeterminate": 2}[self.value]


@dataclass(frozen=True)
class Certificate:
    """A named invariant taking different values on the two inputs."""

    invariant: str
    value_1: complex
    value_2: complex

    @property
    def gap(self) -> float:
        return float(abs(complex(self.value_1) - complex(self.value_2)))


@dataclass(frozen=True)
class Verdict:
    outcome: Outcome
    witness: tuple[np.ndarray, ...] | None = None
    certificate: Certificate | None = None
    reason: str = ""
    residual: float | None = None
    bounds: dict[str, int] = field(default_factory=dict)

    @property
    def equivalent(self) -> bool:
        return self.outcome is Outcome.EQUIVALENT

    def to_dict(self) -> dict[str, Any]:
        out: dict[str, Any] = {"outcome": self.outcome.value, "reason": self.reason}
        if self.certificate is not None:
            c = self.certificate
            out["certificate"] = {
                "invariant": c.invariant,
                "value_1": _cplx(c.value_1),
                "value_2": _cplx(c.value_2),
                "gap": c.gap,
            }
        if self.witness is not None:
            out["witness"] = [[[_cplx(z) for z in row] for row in u] for u in self.witness]
        if self.residual is not None:
            out["residual"] = self.residual
        out["bounds"] = dict(self.bounds)
        return out


def _cplx(z) -> list[float]:
    z = complex(z)
    return [z.real, z.imag]


def equivalent(witness, residual, bounds=None, reason="witness verified") -> Verdict:
    return Verdict(Outcome.EQUIVALENT, tuple(witness), None, reason, residual, bounds or {})


def not_equivalent(cert: Certificate, reason: str, bounds=None) -> Verdict:
    return Verdict(Outcome.NOT_EQUIVALENT, None, cert, reason, None, bounds or {})


def indeterminate(reason: str, bounds=None) -> Verdict:
    return Verdict(Outcome.INDETERMINATE, None, None, reason, None, bounds or {})


# ----------------------------------------------------------------------------
# isotropic-like extraction
# ----------------------------------------------------------------------------


@dataclass(frozen=True)
class IsotropicLikeForm:
    """``p0/D I + sum_i p_i |phi_i><phi_i|`` with pairwise distinct ``p_i``.

    Components are ordered by decreasing weight. Weights may be negative
    (signed form), e.g. for partial transposes.
    """

    dims: tuple[int, ...]
    p0: float
    components: tuple[tuple[float, np.ndarray], ...]

    @property
    def K(self) -> int:
        return len(self.components)

    @property
    def noise_eigenvalue(self) -> float:
        return self.p0 / int(np.prod(self.dims))

    @property
    def weights(self) -> np.ndarray:
        return np.array([w for w, _ in self.components])

    def coefficient_matrices(self) -> list[np.ndarray]:
        return [coefficient_matrix(phi) for _, phi in self.components]

    def rebuild(self) -> np.ndarray:
        D = int(np.prod(self.dims))
        mat = self.noise_eigenvalue * np.eye(D, dtype=complex)
        for w, phi in self.components:
            v = phi.reshape(-1)
            mat += w * np.outer(v, v.conj())
        return mat


def extract_isotropic_like(rho: DensityMatrix, cfg: DeciderConfig = DeciderConfig()) -> IsotropicLikeForm:
    """Shift the spectrum by its single degenerate eigenvalue.

    With eigenvalue clusters found at relative gap ``cfg.eig_cluster_tol``, the
    repeated eigenvalue (cluster mean) becomes the noise level ``lambda_0``;
    without a repeated eigenvalue ``lambda_0 = 0`` and a lone zero eigenvalue
    is dropped. Every other eigenvector becomes a component of weight
    ``lambda_k - lambda_0``.
    """
    w, v = eig_hermitian(rho.mat)
    tol = cfg.eig_cluster_tol * max(1.0, float(np.max(np.abs(w))))
    groups = clusters(w, tol)
    repeated = [g for g in groups if len(g) > 1]
    if len(repeated) > 1:
        raise MultipleDegenerateClusters(
            f"{len(repeated)} repeated eigenvalues (multiplicities {[len(g) for g in repeated]})"
        )
    if repeated:
        lam0 = float(np.mean(w[repeated[0]]))
        singles = [g[0] for g in groups if len(g) == 1]
    else:
        lam0 = 0.0
        singles = [g[0] for g in groups if abs(w[g[0]]) > tol]
    comps = tuple((float(w[k] - lam0), v[:, k].reshape(rho.dims).copy()) for k in singles)
    form = IsotropicLikeForm(rho.dims, lam0 * rho.dim, comps)
    err = np.max(np.abs(form.rebuild() - rho.mat), initial=0.0)
    if err > REBUILD_TOL:
        raise NotIsotropicLike(f"rebuilt state deviates by {err:.2e}")
    return form


# ----------------------------------------------------------------------------
# shared checks
# ----------------------------------------------------------------------------


def spectrum_certificate(rho1: DensityMatrix, rho2: DensityMatrix, tol: float) -> Certificate | None:
    """Certificate from differing spectra, preferring a power-sum ``J^s``."""
    s1, s2 = rho1.spectrum(), rho2.spectrum()
    if np.max(np.abs(s1 - s2)) <= tol:
        return None
    j1 = global_spectral_invariants(rho1, rho1.dim)
    j2 = global_spectral_invariants(rho2, rho2.dim)
    for s in range(rho1.dim):
        if abs(j1[s] - j2[s]) > tol:
            return Certificate(f"J^{s + 1}", float(j1[s]), float(j2[s]))
    k = int(np.argmax(np.abs(s1 - s2)))
    return Certificate(f"eigenvalue[{k}]", float(s1[k]), float(s2[k]))


def _conjugate(rho: DensityMatrix, unitaries: Sequence[np.ndarray]) -> np.ndarray:
    big = kron_all(unitaries)
    return big @ rho.mat @ big.conj().T


def density_residual(rho1: DensityMatrix, rho2: DensityMatrix, unitaries) -> float:
    """Frobenius distance between ``(U_1 x ... ) rho1 (...)^+`` and ``rho2``."""
    return float(np.linalg.norm(_conjugate(rho1, unitaries) - rho2.mat))


def _same_bipartite(rho1: DensityMatrix, rho2: DensityMatrix):
    if len(rho1.dims) != 2 or len(rho2.dims) != 2:
        raise NotBipartite("bipartite states required")
    if rho1.dims != rho2.dims:
        raise ShapeMismatch(f"dims {rho1.dims} and {rho2.dims} differ")


def _pair_forms(rho1, rho2, cfg):
    """Steps shared by the LU and LU-similar pipelines: spectra, extraction, pairing."""
    cert = spectrum_certificate(rho1, rho2, cfg.compare_tol)
    if cert is not None:
        return None, not_equivalent(cert, "spectra differ")
    f1 = extract_isotropic_like(rho1, cfg)
    f2 = extract_isotropic_like(rho2, cfg)
    if f1.K != f2.K:
        return None, not_equivalent(Certificate("component count", f1.K, f2.K), "component counts differ")
    gaps = np.abs(f1.weights - f2.weights)
    if gaps.size and np.max(gaps) > cfg.compare_tol:
        k = int(np.argmax(gaps))
        cert = Certificate(f"weight p_{k + 1}", f1.weights[k], f2.weights[k])
        return None, not_equivalent(cert, "component weights differ")
    return (f1, f2), None


# ----------------------------------------------------------------------------
# pure bipartite
# ----------------------------------------------------------------------------


def decide_pure_lu_bipartite(psi, phi, cfg: DeciderConfig = DeciderConfig()) -> Verdict:
    """LU equivalence of bipartite pure states by their Schmidt coefficients."""
    psi, phi = as_pure(psi), as_pure(phi)
    if psi.ndim != 2 or phi.ndim != 2:
        raise ShapeMismatch("bipartite states required")
    if psi.shape != phi.shape:
        raise ShapeMismatch(f"dims {psi.shape} and {phi.shape} differ")
    A, B = coefficient_matrix(psi), coefficient_matrix(phi)
    sa = np.linalg.svd(A, compute_uv=False)
    sb = np.linalg.svd(B, compute_uv=False)
    if np.max(np.abs(sa - sb)) > cfg.compare_tol:
        n = len(sa)
        ia, ib = schmidt_invariants(A, n), schmidt_invariants(B, n)
        for a in range(n):
            if abs(ia[a] - ib[a]) > cfg.compare_tol:
                return not_equivalent(Certificate(f"I_{a + 1}", ia[a], ib[a]), "Schmidt invariants differ")
        k = int(np.argmax(np.abs(sa - sb)))
        return not_equivalent(Certificate(f"schmidt[{k}]", sa[k], sb[k]), "Schmidt coefficients differ")
    U, V = svd_alignment(A, B)
    res = density_residual(DensityMatrix.from_pure(psi), DensityMatrix.from_pure(phi), [U, V])
    if res <= cfg.witness_tol:
        return equivalent((U, V), res)
    return indeterminate(f"Schmidt coefficients agree but the SVD witness misses by {res:.2e}")


# ----------------------------------------------------------------------------
# isotropic-like LU and LU-similar
# ----------------------------------------------------------------------------


def resolve_pair_bound(K: int, side: int, cfg: DeciderConfig) -> int:
    if cfg.max_pairs is not None:
        return cfg.max_pairs
    return affordable_bound(K, default_pair_bound(side), False, cfg.word_budget)


def resolve_specht_bound(K: int, side: int, cfg: DeciderConfig) -> int:
    if cfg.max_specht_len is not None:
        return cfg.max_specht_len
    return affordable_bound(K, default_specht_bound(side), True, cfg.word_budget)


def decide_lu_isotropic_like(
    rho1: DensityMatrix, rho2: DensityMatrix, cfg: DeciderConfig = DeciderConfig()
) -> Verdict:
    """Spectra, weight pairing, pair-word signatures, then a verified witness."""
    _same_bipartite(rho1, rho2)
    forms, early = _pair_forms(rho1, rho2, cfg)
    if early is not None:
        return early
    f1, f2 = forms
    d1, d2 = rho1.dims
    if f1.K == 0:
        ident = [np.eye(d1), np.eye(d2)]
        return equivalent(ident, density_residual(rho1, rho2, ident), reason="both states are white noise")
    As, Bs = f1.coefficient_matrices(), f2.coefficient_matrices()
    bound = resolve_pair_bound(f1.K, d1, cfg)
    bounds = {"max_pairs": bound}
    diff = pair_signature(As, bound).first_difference(pair_signature(Bs, bound), cfg.compare_tol)
    if diff is not None:
        word, v1, v2 = diff
        return not_equivalent(Certificate(str(word), v1, v2), "pair-word invariants differ", bounds)
    try:
        U, V = construct_lu_witness(As, Bs, f1.weights, cfg)
    except (DegenerateAlignment, ValidationFailed) as exc:
        return indeterminate(f"signatures match to truncation bound; no witness found ({exc})", bounds)
    res = density_residual(rho1, rho2, [U, V])
    if res > cfg.witness_tol:
        return indeterminate(
            f"signatures match to truncation bound; witness residual {res:.2e} too large", bounds
        )
    return equivalent((U, V), res, bounds)


def decide_lu_similar(
    rho1: DensityMatrix, rho2: DensityMatrix, cfg: DeciderConfig = DeciderConfig()
) -> Verdict:
    """Equivalence under ``U (x) U*``; the witness is reported as ``(U, U*)``."""
    _same_bipartite(rho1, rho2)
    d, d2 = rho1.dims
    if d != d2:
        raise ShapeMismatch("LU-similar equivalence needs equal local dimensions")
    forms, early = _pair_forms(rho1, rho2, cfg)
    if early is not None:
        return early
    f1, f2 = forms
    if f1.K == 0:
        ident = [np.eye(d), np.eye(d)]
        return equivalent(ident, density_residual(rho1, rho2, ident), reason="both states are white noise")
    As, Bs = f1.coefficient_matrices(), f2.coefficient_matrices()
    bound = resolve_specht_bound(f1.K, d, cfg)
    bounds = {"max_specht_len": bound}
    diff = specht_signature(As, bound).first_difference(specht_signature(Bs, bound), cfg.compare_tol)
    if diff is not None:
        word, v1, v2 = diff
        return not_equivalent(Certificate(str(word), v1, v2), "Specht-word invariants differ", bounds)
    try:
        U = construct_lus_witness(As, Bs, f1.weights, cfg)
    except (DegenerateAlignment, ValidationFailed) as exc:
        return indeterminate(f"signatures match to truncation bound; no witness found ({exc})", bounds)
    pair = (U, U.conj())
    res = density_residual(rho1, rho2, pair)
    if res > cfg.witness_tol:
        return indeterminate(
            f"signatures match to truncation bound; witness residual {res:.2e} too large", bounds
        )
    return equivalent(pair, res, bounds)


# ----------------------------------------------------------------------------
# special classes
# ----------------------------------------------------------------------------


def is_maximally_entangled(psi, tol: float = 1e-10) -> bool:
    """All Schmidt coefficients equal ``1/sqrt(d)``."""
    psi = np.asarray(psi, dtype=complex)
    if psi.ndim != 2:
        raise ShapeMismatch("bipartite pure state required")
    A = coefficient_matrix(psi)
    s = np.linalg.svd(A, compute_uv=False)
    return bool(np.all(np.abs(s - 1 / np.sqrt(min(A.shape))) <= tol))


def _psi_plus_overlap(phi: np.ndarray) -> float:
    d = phi.shape[0]
    return float(abs(np.vdot(maximally_entangled(d), phi)))


def _square_bipartite(rho: DensityMatrix) -> int | None:
    if len(rho.dims) != 2 or rho.dims[0] != rho.dims[1]:
        return None
    return rho.dims[0]


def classify_isotropic(
    rho: DensityMatrix, cfg: DeciderConfig = DeciderConfig(), up_to_lu: bool = False
) -> float | None:
    """Return ``p`` if ``rho`` is the isotropic state ``p/d^2 I + (1-p)|psi+><psi+|``.

    With ``up_to_lu=True`` any maximally entangled component is accepted, i.e.
    the LU class of the isotropic family is recognized.
    """
    d = _square_bipartite(rho)
    if d is None:
        return None
    try:
        form = extract_isotropic_like(rho, cfg)
    except NotIsotropicLike:
        return None
    if form.K == 0:
        p = form.p0
    elif form.K == 1:
        w, phi = form.components[0]
        if not is_maximally_entangled(phi, 1e-8):
            return None
        if not up_to_lu and abs(_psi_plus_overlap(phi) - 1) > 1e-8:
            return None
        p = form.p0
    else:
        return None
    if not -CLASSIFY_TOL <= p <= 1 + CLASSIFY_TOL:
        return None
    p = min(max(p, 0.0), 1.0)
    if not up_to_lu and np.max(np.abs(isotropic_state(d, p).mat - rho.mat)) > CLASSIFY_TOL:
        return None
    return p


def classify_werner(
    rho: DensityMatrix, cfg: DeciderConfig = DeciderConfig(), up_to_lu: bool = False
) -> float | None:
    """Return ``f`` if ``rho`` is the Werner state of parameter ``f``.

    The test runs on the partial transpose, which for a Werner state is white
    noise plus a multiple ``(d f - 1)/(d^2 - 1)`` of ``|psi+><psi+|``.
    """
    d = _square_bipartite(rho)
    if d is None or d < 2:
        return None
    try:
        form = extract_isotropic_like(partial_transpose(rho), cfg)
    except NotIsotropicLike:
        return None
    f = d - form.noise_eigenvalue * (d**3 - d)
    expected = (d * f - 1) / (d**2 - 1)
    if form.K == 0:
        if abs(expected) > 1e-9:
            return None
    elif form.K == 1:
        w, phi = form.components[0]
        if abs(w - expected) > 1e-9 or not is_maximally_entangled(phi, 1e-8):
            return None
        if not up_to_lu and abs(_psi_plus_overlap(phi) - 1) > 1e-8:
            return None
    else:
        return None
    if not -1 - CLASSIFY_TOL <= f <= 1 + CLASSIFY_TOL:
        return None
    f = min(max(f, -1.0), 1.0)
    if not up_to_lu and np.max(np.abs(werner_state(d, f).mat - rho.mat)) > CLASSIFY_TOL:
        return None
    return f
