from __future__ import annotations

from dataclasses import dataclass

from .invariants import COMPARE_TOL, DEFAULT_WORD_BUDGET


@dataclass(frozen=True)
class DeciderConfig:
    """Knobs shared by every decision procedure.

    ``max_pairs`` / ``max_specht_len`` left as ``None`` select ``N^2`` pairs and
    ``2 N^2`` letters, lowered when needed to the longest length whose word
    count stays within ``word_budget``. The bound actually used is reported in
    every verdict.
    """

    max_pairs: int | None = None
    max_specht_len: int | None = None
    word_budget: int = DEFAULT_WORD_BUDGET
    eig_cluster_tol: float = 1e-8
    compare_tol: float = COMPARE_TOL
    witness_tol: float = 1e-8
    witness_retries: int = 8
    search_draws: int = 64
    rng_seed: int = 0

    def __post_init__(self):
        for name in ("eig_cluster_tol", "compare_tol", "witness_tol"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")
        if self.witness_retries < 0 or self.search_draws < 1:
            raise ValueError("retries must be >= 0 and search_draws >= 1")
        for name in ("max_pairs", "max_specht_len", "word_budget"):
            value = getattr(self, name)
            if value is not None and value < 1:
                raise ValueError(f"{name} must be positive")
