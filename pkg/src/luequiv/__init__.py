"""Local unitary equivalence of isotropic-like and multipartite quantum states."""

from .config import DeciderConfig
from .decider import (
    Certificate,
    IsotropicLikeForm,
    Outcome,
    Verdict,
    classify_isotropic,
    classify_werner,
    decide_lu_isotropic_like,
    decide_lu_similar,
    decide_pure_lu_bipartite,
    extract_isotropic_like,
    is_maximally_entangled,
)
from .errors import *  # noqa: F401,F403
from .generators import (
    apply_local_unitaries,
    ghz_state,
    ghz_w_mixtures,
    haar_local_unitaries,
    haar_unitary,
    isotropic_like_state,
    isotropic_state,
    make_rng,
    maximally_entangled,
    random_isotropic_like,
    random_pure,
    w_state,
    werner_state,
)
from .invariants import (
    PairWord,
    SpechtWord,
    coefficient_matrix,
    enumerate_pair_words,
    enumerate_specht_words,
    global_spectral_invariants,
    pair_signature,
    parse_word,
    schmidt_invariants,
    specht_signature,
    specht_trace,
    trace_pair_word,
)
from .linalg import DensityMatrix, fold, partial_trace, partial_transpose, unfold
from .multipartite import (
    HosvdResult,
    decide_lu_noisy_multipartite,
    decide_pure_lu_multipartite,
    extract_white_noise_form,
    hosvd,
    mode_spectra,
)
from .statefile import read_state, write_state

__version__ = "0.1.0"
