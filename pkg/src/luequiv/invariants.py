"""Trace-polynomial invariants of coefficient matrices and density matrices.

Two word families are supported:

* pair words ``Tr[(A_i A_j^+)(A_k A_l^+)...]``, invariant under
  ``A_i -> U A_i V^T`` (local unitaries on both factors);
* Specht words, arbitrary monomials in ``A_i`` and ``A_i^+``, invariant under
  ``A_i -> U A_i U^+`` (the ``U (x) U*`` action).

Only *balanced* words are enumerated: every component index occurs as often
undaggered as daggered. Eigenvectors of a density matrix are defined up to a
phase each, and balanced words are exactly the ones blind to those phases.

Words are stored canonically as the lexicographically least cyclic rotation.
Of a word and its conjugate-reverse (whose value is the complex conjugate)
only the smaller representative is kept.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterator, Sequence

import numpy as np

from .errors import BudgetExceeded, IndexOutOfRange, NotBipartite, ShapeMismatch
from .linalg import DensityMatrix, as_pure

WORD_CAP = 1_000_000
DEFAULT_WORD_BUDGET = 2000
COMPARE_TOL = 1e-9


@dataclass(frozen=True, order=True)
class PairWord:
    """Word ``((i_1, j_1), ..., (i_m, j_m))`` with one-based component indices."""

    pairs: tuple[tuple[int, int], ...]

    def __str__(self) -> str:
        return "P" + "".join(f"({i},{j})" for i, j in self.pairs)

    def __len__(self) -> int:
        return len(self.pairs)


@dataclass(frozen=True, order=True)
class SpechtWord:
    """Word of letters ``(i, daggered)``; renders ``x<i>`` for ``A_i`` and ``y<i>`` for ``A_i^+``."""

    letters: tuple[tuple[int, bool], ...]

    def __str__(self) -> str:
        return "S " + " ".join(f"{'y' if dag else 'x'}{i}" for i, dag in self.letters)

    def __len__(self) -> int:
        return len(self.letters)


def parse_word(text: str) -> PairWord | SpechtWord:
    """Inverse of ``str()`` on both word types."""
    text = text.strip()
    if text.startswith("P("):
        body = text[2:-1].split(")(")
        return PairWord(tuple(tuple(int(x) for x in p.split(",")) for p in body))
    if text.startswith("S "):
        letters = tuple((int(tok[1:]), tok[0] == "y") for tok in text[2:].split())
        return SpechtWord(letters)
    raise ValueError(f"unrecognized word syntax: {text!r}")


# ----------------------------------------------------------------------------
# enumeration
# ----------------------------------------------------------------------------


def _canonical(seq: tuple[int, ...]) -> tuple[int, ...]:
    return min(seq[r:] + seq[:r] for r in range(len(seq)))


def _balanced_necklaces(
    length: int, n_components: int, specht: bool
) -> Iterator[tuple[int, ...]]:
    """Balanced necklaces over letter codes, in lexicographic order.

    Pair-word letter ``c`` stands for ``(c // K, c % K)``; Specht letter ``c``
    for ``(c // 2, c % 2 == 1)``. Generation follows the Fredricksen-Kessler-
    Maiorana scheme, pruning prefixes whose index imbalance can no longer be
    repaired by the remaining letters.
    """
    k = n_components
    alphabet = 2 * k if specht else k * k
    step = 1 if specht else 2
    a = [0] * (length + 1)
    imbalance = [0] * k

    def shift(c: int, sign: int):
        if specht:
            imbalance[c // 2] += -sign if c % 2 else sign
        else:
            imbalance[c // k] += sign
            imbalance[c % k] -= sign

    def gen(t: int, p: int):
        if t > length:
            if length % p == 0:
                yield tuple(a[1:])
            return
        remaining = length - t
        for c in range(a[t - p], alphabet):
            a[t] = c
            shift(c, 1)
            if sum(abs(x) for x in imbalance) <= step * remaining:
                yield from gen(t + 1, p if c == a[t - p] else t)
            shift(c, -1)

    yield from gen(1, 1)


def _conj_reverse(seq: tuple[int, ...], n_components: int, specht: bool) -> tuple[int, ...]:
    if specht:
        return tuple(c ^ 1 for c in reversed(seq))
    k = n_components
    return tuple((c % k) * k + c // k for c in reversed(seq))


@lru_cache(maxsize=256)
def _word_codes(
    n_components: int, max_len: int, specht: bool, cap: int
) -> tuple[tuple[int, ...], ...]:
    words = []
    seen = 0
    for length in range(1, max_len + 1):
        if specht and length % 2:
            continue
        for w in _balanced_necklaces(length, n_components, specht):
            seen += 1
            if seen > cap:
                raise BudgetExceeded(
                    f"more than {cap} words (K={n_components}, max length {max_len})"
                )
            if w <= _canonical(_conj_reverse(w, n_components, specht)):
                words.append(w)
    words.sort()
    return tuple(words)


def enumerate_pair_words(K: int, max_pairs: int, cap: int = WORD_CAP) -> list[PairWord]:
    """All balanced canonical pair words with ``1 <= m <= max_pairs`` pairs."""
    if K < 1 or max_pairs < 1:
        raise ValueError("K and max_pairs must be positive")
    return [
        PairWord(tuple((c // K + 1, c % K + 1) for c in w))
        for w in _word_codes(K, max_pairs, False, cap)
    ]


def enumerate_specht_words(K: int, max_len: int, cap: int = WORD_CAP) -> list[SpechtWord]:
    """All balanced canonical Specht words of length ``<= max_len``."""
    if K < 1 or max_len < 1:
        raise ValueError("K and max_len must be positive")
    return [
        SpechtWord(tuple((c // 2 + 1, bool(c % 2)) for c in w))
        for w in _word_codes(K, max_len, True, cap)
    ]


@lru_cache(maxsize=256)
def affordable_bound(K: int, upper: int, specht: bool, budget: int = DEFAULT_WORD_BUDGET) -> int:
    """Largest word length ``<= upper`` whose enumeration stays within ``budget``.

    Never below the shortest non-trivial length (1 pair, 2 Specht letters).
    """
    best = 2 if specht else 1
    for length in range(best, upper + 1, 2 if specht else 1):
        try:
            _word_codes(K, length, specht, budget)
        except BudgetExceeded:
            break
        best = length
    return best


def default_pair_bound(side: int) -> int:
    return side * side


def default_specht_bound(side: int) -> int:
    return 2 * side * side


# ----------------------------------------------------------------------------
# evaluation
# ----------------------------------------------------------------------------


def _check_matrices(matrices: Sequence[np.ndarray], square: bool) -> list[np.ndarray]:
    mats = [np.asarray(m, dtype=complex) for m in matrices]
    if not mats:
        raise ShapeMismatch("at least one matrix is required")
    shape = mats[0].shape
    if any(m.ndim != 2 or m.shape != shape for m in mats):
        raise ShapeMismatch("all matrices must share one 2-D shape")
    if square and shape[0] != shape[1]:
        raise ShapeMismatch(f"square matrices required, got {shape}")
    return mats


def _eval_sorted(codes: Sequence[tuple[int, ...]], letters: Sequence[np.ndarray]) -> np.ndarray:
    """Traces of products for lexicographically sorted words, sharing prefixes."""
    side = letters[0].shape[0]
    stack = [np.eye(side, dtype=complex)]
    prev: tuple[int, ...] = ()
    out = np.empty(len(codes), dtype=complex)
    for n, w in enumerate(codes):
        common = 0
        for x, y in zip(prev, w):
            if x != y:
                break
            common += 1
        del stack[common + 1 :]
        for c in w[common:]:
            stack.append(stack[-1] @ letters[c])
        out[n] = np.trace(stack[-1])
        prev = w
    return out


def _pair_letters(mats: list[np.ndarray]) -> list[np.ndarray]:
    return [a @ b.conj().T for a in mats for b in mats]


def _specht_letters(mats: list[np.ndarray]) -> list[np.ndarray]:
    out = []
    for a in mats:
        out += [a, a.conj().T]
    return out


def trace_pair_word(matrices: Sequence[np.ndarray], w: PairWord) -> complex:
    """``Tr`` of the left-to-right product of the factors ``A_i A_j^+``."""
    mats = _check_matrices(matrices, square=False)
    K = len(mats)
    prod = np.eye(mats[0].shape[0], dtype=complex)
    for i, j in w.pairs:
        if not (1 <= i <= K and 1 <= j <= K):
            raise IndexOutOfRange(f"pair ({i},{j}) outside 1..{K}")
        prod = prod @ mats[i - 1] @ mats[j - 1].conj().T
    return complex(np.trace(prod))


def specht_trace(matrices: Sequence[np.ndarray], w: SpechtWord) -> complex:
    """``Tr`` of the product with ``x_i -> A_i`` and ``y_i -> A_i^+``."""
    mats = _check_matrices(matrices, square=True)
    K = len(mats)
    prod = np.eye(mats[0].shape[0], dtype=complex)
    for i, dag in w.letters:
        if not 1 <= i <= K:
            raise IndexOutOfRange(f"letter index {i} outside 1..{K}")
        prod = prod @ (mats[i - 1].conj().T if dag else mats[i - 1])
    return complex(np.trace(prod))


@dataclass(frozen=True)
class InvariantSignature:
    """Canonically ordered ``(word, value)`` list for one word family."""

    kind: str
    words: tuple
    values: np.ndarray = field(repr=False)
    K: int
    side: int
    bound: int
    tol: float = COMPARE_TOL

    def __len__(self) -> int:
        return len(self.words)

    def as_dict(self) -> dict[str, complex]:
        return {str(w): complex(v) for w, v in zip(self.words, self.values)}

    def first_difference(self, other: "InvariantSignature", tol: float | None = None):
        """Shortest word whose values differ by more than ``tol``, or ``None``.

        Returns ``(word, value_self, value_other)``. Signatures over different
        word lists are compared on their common prefix, which is the shorter
        list because both are sorted the same way.
        """
        tol = self.tol if tol is None else tol
        if self.kind != other.kind or self.K != other.K:
            raise ShapeMismatch("signatures are over different word families")
        n = min(len(self.words), len(other.words))
        if self.words[:n] != other.words[:n]:
            raise ShapeMismatch("signatures are over different word families")
        gaps = np.abs(self.values[:n] - other.values[:n])
        bad = np.flatnonzero(gaps > tol)
        if bad.size == 0:
            return None
        k = min(bad, key=lambda b: (len(self.words[b]), b))
        return self.words[k], complex(self.values[k]), complex(other.values[k])


def pair_signature(
    matrices: Sequence[np.ndarray], max_pairs: int | None = None, cap: int = WORD_CAP
) -> InvariantSignature:
    """Pair-word values for all balanced words up to ``max_pairs`` pairs.

    ``max_pairs=None`` uses the square of the matrix side.
    """
    mats = _check_matrices(matrices, square=False)
    K, side = len(mats), mats[0].shape[0]
    bound = default_pair_bound(side) if max_pairs is None else max_pairs
    codes = _word_codes(K, bound, False, cap)
    values = _eval_sorted(codes, _pair_letters(mats))
    words = tuple(PairWord(tuple((c // K + 1, c % K + 1) for c in w)) for w in codes)
    return InvariantSignature("pair", words, values, K, side, bound)


def specht_signature(
    matrices: Sequence[np.ndarray], max_len: int | None = None, cap: int = WORD_CAP
) -> InvariantSignature:
    """Specht-word values for all balanced words of length ``<= max_len``.

    ``max_len=None`` uses twice the square of the matrix side.
    """
    mats = _check_matrices(matrices, square=True)
    K, side = len(mats), mats[0].shape[0]
    bound = default_specht_bound(side) if max_len is None else max_len
    codes = _word_codes(K, bound, True, cap)
    values = _eval_sorted(codes, _specht_letters(mats))
    words = tuple(SpechtWord(tuple((c // 2 + 1, bool(c % 2)) for c in w)) for w in codes)
    return InvariantSignature("specht", words, values, K, side, bound)


# ----------------------------------------------------------------------------
# pure-state and spectral invariants
# ----------------------------------------------------------------------------


def coefficient_matrix(psi) -> np.ndarray:
    """Matrix ``A`` with ``A[i, j] = a_ij`` for ``psi = sum a_ij |i>|j>``."""
    psi = np.asarray(psi, dtype=complex)
    if psi.ndim != 2:
        raise NotBipartite(f"expected a bipartite state tensor, got order {psi.ndim}")
    return as_pure(psi).copy()


def schmidt_invariants(A: np.ndarray, alpha_max: int) -> np.ndarray:
    """``I_alpha = Tr[(A A^+)^alpha]`` for ``alpha = 1..alpha_max``."""
    if alpha_max < 1:
        raise ValueError("alpha_max must be at least 1")
    s2 = np.linalg.svd(np.asarray(A, dtype=complex), compute_uv=False) ** 2
    return np.array([np.sum(s2**a) for a in range(1, alpha_max + 1)])


def global_spectral_invariants(rho: DensityMatrix, s_max: int) -> np.ndarray:
    """``J^s = Tr(rho^s)`` for ``s = 1..s_max`` via eigenvalue power sums.

    Taking ``Tr_2`` of ``Tr_1 rho^s`` leaves a scalar, which is the full trace.
    """
    if s_max < 1:
        raise ValueError("s_max must be at least 1")
    lam = np.linalg.eigvalsh(rho.mat)
    return np.array([np.sum(lam**s) for s in range(1, s_max + 1)])


def reduced_power_spectra(rho: DensityMatrix, s_max: int) -> list[np.ndarray]:
    """Spectra of ``Tr_1(rho^s)``; an auxiliary, non-normative report field."""
    from .linalg import partial_trace

    if len(rho.dims) != 2:
        raise NotBipartite("reduced power spectra need a bipartite state")
    out = []
    power = np.eye(rho.dim, dtype=complex)
    for _ in range(s_max):
        power = power @ rho.mat
        red = partial_trace(power, 2, rho.dims)
        red = (red + red.conj().T) / 2
        out.append(np.linalg.eigvalsh(red)[::-1])
    return out
