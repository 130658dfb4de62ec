"""Higher-order SVD and LU decisions for multipartite pure and noisy states."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .config import DeciderConfig
from .decider import (
    Certificate,
    Verdict,
    decide_lu_isotropic_like,
    density_residual,
    equivalent,
    indeterminate,
    not_equivalent,
    spectrum_certificate,
)
from .errors import NotIsotropicLike, NotWhiteNoiseForm, ShapeMismatch
from .generators import make_rng
from .linalg import DensityMatrix, apply_local, as_pure, eig_hermitian, reduced_density, svd, unfold
from .phases import solve_phase_system
from .witness import (
    PHASE_CONSISTENCY_TOL,
    best_phase_residual,
    clusters,
    random_block_unitary,
    refine_unitaries,
)

DEGENERACY_TOL = 1e-8
ZERO_TOL = 1e-8
CORE_ENTRY_TOL = 1e-6
CORE_MAGNITUDE_TOL = 1e-7


@dataclass(frozen=True)
class HosvdResult:
    core: np.ndarray
    factors: tuple[np.ndarray, ...]
    mode_spectra: tuple[np.ndarray, ...]
    degeneracy_partitions: tuple[tuple[tuple[int, ...], ...], ...]

    def reconstruct(self) -> np.ndarray:
        return apply_local(self.core, self.factors)


def _phase_normalize(u: np.ndarray) -> np.ndarray:
    """Make each column's largest-magnitude entry real positive (lowest row wins ties)."""
    u = u.copy()
    for k in range(u.shape[1]):
        top = u[np.argmax(np.abs(u[:, k])), k]
        u[:, k] *= np.conj(top) / abs(top)
    return u


def mode_spectra(t: np.ndarray) -> list[np.ndarray]:
    """Singular values of every mode unfolding, zero-padded to the mode dimension."""
    t = np.asarray(t, dtype=complex)
    out = []
    for n in range(1, t.ndim + 1):
        s = np.linalg.svd(unfold(t, n), compute_uv=False)
        out.append(np.pad(s, (0, t.shape[n - 1] - s.size)))
    return out


def hosvd(t: np.ndarray) -> HosvdResult:
    """Core tensor ``Sigma = (U_1^+ x ... x U_N^+) t`` with factors from mode unfoldings."""
    t = as_pure(t)
    if t.ndim < 2:
        raise ShapeMismatch("HOSVD needs at least two subsystems")
    factors, spectra, parts = [], [], []
    for n in range(1, t.ndim + 1):
        u, s, _ = svd(unfold(t, n))
        s = np.pad(s, (0, t.shape[n - 1] - s.size))
        factors.append(_phase_normalize(u))
        spectra.append(s)
        parts.append(tuple(tuple(g) for g in clusters(s, DEGENERACY_TOL)))
    core = apply_local(t, [u.conj().T for u in factors])
    return HosvdResult(core, tuple(factors), tuple(spectra), tuple(parts))


def _core_phase_certificate(cs, ct, entries, row) -> Certificate:
    exps = {}
    v1 = v2 = 1.0 + 0j
    for e, m in zip(entries, row):
        if m == 0:
            continue
        exps[e] = int(m)
        v1 *= (cs[e] / abs(cs[e])) ** int(m)
        v2 *= (ct[e] / abs(ct[e])) ** int(m)
    name = "core phase invariant " + " ".join(
        f"phase(core[{','.join(map(str, e))}])^{m}" for e, m in exps.items()
    )
    return Certificate(name, v1, v2)


def _match_phases(hs: HosvdResult, ht: HosvdResult):
    """Non-degenerate case: the local symmetry is exactly the torus of diagonal phases.

    Returns either per-mode phase vectors or a certificate.
    """
    cs, ct = hs.core, ht.core
    gap = np.abs(np.abs(cs) - np.abs(ct))
    if np.max(gap) > CORE_MAGNITUDE_TOL:
        e = np.unravel_index(np.argmax(gap), cs.shape)
        return None, Certificate(f"|core{list(map(int, e))}|", abs(cs[e]), abs(ct[e]))
    dims = cs.shape
    offsets = np.concatenate([[0], np.cumsum(dims)])
    scale = np.max(np.abs(cs))
    entries = [tuple(map(int, e)) for e in zip(*np.nonzero(np.abs(cs) > CORE_ENTRY_TOL * scale))]
    rows, phi = [], []
    for e in entries:
        row = np.zeros(offsets[-1], dtype=np.int64)
        for n, i in enumerate(e):
            row[offsets[n] + i] = 1
        rows.append(row)
        phi.append(np.angle(ct[e]) - np.angle(cs[e]))
    sol = solve_phase_system(np.array(rows).reshape(-1, offsets[-1]), np.array(phi))
    if not sol.consistent(PHASE_CONSISTENCY_TOL):
        row, _ = sol.worst()
        return None, _core_phase_certificate(cs, ct, entries, row)
    phases = [np.exp(1j * sol.x[offsets[n] : offsets[n + 1]]) for n in range(len(dims))]
    return phases, None


def _block_structure(h: HosvdResult):
    """Per mode: block sizes and whether a block carries nonzero singular values."""
    out = []
    for s, part in zip(h.mode_spectra, h.degeneracy_partitions):
        sizes = [len(g) for g in part]
        free = [s[g[0]] > ZERO_TOL for g in part]
        out.append((sizes, free))
    return out


def decide_pure_lu_multipartite(s, t, cfg: DeciderConfig = DeciderConfig()) -> Verdict:
    """Compare mode spectra, then the cores up to the block-diagonal local symmetry."""
    s, t = as_pure(s), as_pure(t)
    if s.shape != t.shape:
        raise ShapeMismatch(f"dims {s.shape} and {t.shape} differ")
    hs, ht = hosvd(s), hosvd(t)
    for n, (a, b) in enumerate(zip(hs.mode_spectra, ht.mode_spectra)):
        diff = np.abs(a - b)
        if np.max(diff) > cfg.compare_tol:
            k = int(np.argmax(diff))
            cert = Certificate(f"mode-{n + 1} singular value {k + 1}", float(a[k]), float(b[k]))
            return not_equivalent(cert, "mode spectra differ")

    def witness(ps):
        return [ut @ p @ us.conj().T for ut, p, us in zip(ht.factors, ps, hs.factors)]

    def check(ws):
        return best_phase_residual(apply_local(s, ws), t)[0]

    structure = _block_structure(hs)
    degenerate = any(k > 1 and f for sizes, free in structure for k, f in zip(sizes, free))
    if not degenerate:
        phases, cert = _match_phases(hs, ht)
        if cert is not None:
            return not_equivalent(cert, "cores differ beyond diagonal phase symmetry")
        ws = witness([np.diag(p) for p in phases])
        res = check(ws)
        if res <= cfg.witness_tol:
            return equivalent(ws, res)
        return indeterminate(f"phase-matched witness misses by {res:.2e}")

    rng = make_rng(cfg.rng_seed)

    def resid(ps):
        x = apply_local(hs.core, ps)
        return x - best_phase_residual(x, ht.core)[1] * ht.core

    bounds = {"search_draws": cfg.search_draws}
    for _ in range(cfg.search_draws):
        starts = [random_block_unitary(sizes, rng) for sizes, _ in structure]
        ps, value = refine_unitaries(starts, resid, structure)
        if value <= cfg.witness_tol / 10:
            ws = witness(ps)
            res = check(ws)
            if res <= cfg.witness_tol:
                return equivalent(ws, res, bounds)
    return indeterminate(
        f"no block-symmetry witness found in {cfg.search_draws} seeded draws", bounds
    )


# ----------------------------------------------------------------------------
# white-noise mixtures
# ----------------------------------------------------------------------------


@dataclass(frozen=True)
class WhiteNoiseForm:
    """``rho = p/D I + (1 - p) sigma`` with the largest admissible noise weight ``p``."""

    dims: tuple[int, ...]
    p: float
    remainder: DensityMatrix | None
    pure: np.ndarray | None

    def rebuild(self) -> np.ndarray:
        D = int(np.prod(self.dims))
        mat = self.p / D * np.eye(D, dtype=complex)
        if self.remainder is not None:
            mat = mat + (1 - self.p) * self.remainder.mat
        return mat


def extract_white_noise_form(rho: DensityMatrix, cfg: DeciderConfig = DeciderConfig()) -> WhiteNoiseForm:
    """Split off ``D * lambda_min`` worth of white noise.

    The remainder is reported as a pure tensor as well when it has rank one.
    """
    w, v = eig_hermitian(rho.mat)
    D = rho.dim
    tol = cfg.eig_cluster_tol
    lam_min = float(w[-1])
    if lam_min < -tol:
        raise NotWhiteNoiseForm("negative eigenvalue: not a white-noise mixture")
    lam_min = max(lam_min, 0.0)
    p = D * lam_min
    if p > 1 - tol:
        return WhiteNoiseForm(rho.dims, 1.0, None, None)
    shifted = (w - lam_min) / (1 - p)
    keep = shifted > tol
    mat = (v[:, keep] * shifted[keep]) @ v[:, keep].conj().T
    mat = mat / np.trace(mat).real
    remainder = DensityMatrix(rho.dims, (mat + mat.conj().T) / 2)
    pure = v[:, 0].reshape(rho.dims).copy() if keep.sum() == 1 else None
    form = WhiteNoiseForm(rho.dims, p, remainder, pure)
    err = np.max(np.abs(form.rebuild() - rho.mat))
    if err > 1e-10:
        raise NotWhiteNoiseForm(f"rebuilt state deviates by {err:.2e}")
    return form


def _reduced_spectrum_certificate(rho1, rho2, tol) -> Certificate | None:
    for n in range(len(rho1.dims)):
        a = np.linalg.eigvalsh(reduced_density(rho1, [n]))[::-1]
        b = np.linalg.eigvalsh(reduced_density(rho2, [n]))[::-1]
        diff = np.abs(a - b)
        if np.max(diff) > tol:
            k = int(np.argmax(diff))
            return Certificate(f"party-{n + 1} reduced eigenvalue {k + 1}", float(a[k]), float(b[k]))
    return None


def decide_lu_noisy_multipartite(
    rho1: DensityMatrix, rho2: DensityMatrix, cfg: DeciderConfig = DeciderConfig()
) -> Verdict:
    """LU equivalence of white noise plus a pure state (or a general remainder)."""
    if rho1.dims != rho2.dims:
        raise ShapeMismatch(f"dims {rho1.dims} and {rho2.dims} differ")
    cert = spectrum_certificate(rho1, rho2, cfg.compare_tol)
    if cert is not None:
        return not_equivalent(cert, "spectra differ")
    f1 = extract_white_noise_form(rho1, cfg)
    f2 = extract_white_noise_form(rho2, cfg)
    if abs(f1.p - f2.p) > cfg.compare_tol:
        return not_equivalent(Certificate("noise weight p", f1.p, f2.p), "noise weights differ")
    if f1.remainder is None and f2.remainder is None:
        ident = [np.eye(d) for d in rho1.dims]
        return equivalent(ident, density_residual(rho1, rho2, ident), reason="both states are white noise")
    cert = _reduced_spectrum_certificate(rho1, rho2, cfg.compare_tol)
    if cert is not None:
        return not_equivalent(cert, "single-party reduced spectra differ")
    if f1.pure is not None and f2.pure is not None:
        v = decide_pure_lu_multipartite(f1.pure, f2.pure, cfg)
        if not v.equivalent:
            return v
        res = density_residual(rho1, rho2, v.witness)
        if res > cfg.witness_tol:
            return indeterminate(f"pure-part witness misses the mixtures by {res:.2e}", v.bounds)
        return equivalent(v.witness, res, v.bounds, reason="pure parts are LU equivalent")
    if len(rho1.dims) == 2:
        try:
            return decide_lu_isotropic_like(rho1, rho2, cfg)
        except NotIsotropicLike as exc:
            return indeterminate(f"remainder is not isotropic-like ({exc})")
    return indeterminate("remainder class unsupported")
