"""``luequiv`` command-line front end.

Subcommands: ``gen``, ``invariants``, ``decide``, ``classify``, ``hosvd`` and
``orbit``. ``decide`` exits 0/1/2 for Equivalent/NotEquivalent/Indeterminate.
Usage errors exit 64, malformed input files 65 and I/O failures 74.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path
from typing import Any, Sequence

import numpy as np

from .config import DeciderConfig
from .decider import (
    classify_isotropic,
    classify_werner,
    decide_lu_isotropic_like,
    decide_lu_similar,
    decide_pure_lu_bipartite,
    extract_isotropic_like,
    indeterminate,
    is_maximally_entangled,
    resolve_pair_bound,
    resolve_specht_bound,
)
from .errors import (
    BudgetExceeded,
    LUEquivError,
    NotBipartite,
    NotIsotropicLike,
    NotWhiteNoiseForm,
    ParameterOutOfRange,
    ShapeMismatch,
    StateFileError,
)
from .generators import (
    apply_local_unitaries,
    haar_local_unitaries,
    haar_unitary,
    isotropic_state,
    maximally_entangled,
    random_pure,
    ghz_w_mixtures,
    werner_state,
)
from .invariants import (
    coefficient_matrix,
    global_spectral_invariants,
    pair_signature,
    reduced_power_spectra,
    schmidt_invariants,
    specht_signature,
)
from .linalg import DensityMatrix, reduced_density
from .multipartite import decide_lu_noisy_multipartite, decide_pure_lu_multipartite, hosvd, mode_spectra
from .statefile import format_pairs, read_state, write_state

REPORT_SCHEMA = "luequiv-report/1"
HOSVD_SCHEMA = "luequiv-hosvd/1"
SEED_ENV = "LUEQUIV_SEED"

EXIT_USAGE = 64
EXIT_DATA = 65
EXIT_IO = 74

GEN_KINDS = ("isotropic", "werner", "ghz-mix", "w-mix", "random-pure", "max-entangled", "haar-orbit")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


# ----------------------------------------------------------------------------
# helpers
# ----------------------------------------------------------------------------


def _resolve_seed(flag: int | None) -> int:
    if flag is not None:
        return flag
    env = os.environ.get(SEED_ENV)
    if env is None or env == "":
        return 0
    try:
        return int(env)
    except ValueError:
        raise UsageError(f"{SEED_ENV}={env!r} is not an integer") from None


def _parse_dims(text: str) -> list[int]:
    try:
        dims = [int(x) for x in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad dims {text!r}; expected e.g. 2,2,2") from None
    if not dims or any(d < 1 for d in dims):
        raise argparse.ArgumentTypeError("dims must be positive integers")
    return dims


def _positive_int(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"{text!r} is not an integer") from None
    if value < 1:
        raise argparse.ArgumentTypeError("must be at least 1")
    return value


def _positive_float(text: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"{text!r} is not a number") from None
    if not value > 0:
        raise argparse.ArgumentTypeError("must be positive")
    return value


def _cplx(z) -> list[float]:
    z = complex(z)
    return [z.real, z.imag]


def _fmt(z) -> str:
    z = complex(z)
    if abs(z.imag) <= 1e-12:
        return f"{z.real:.10g}"
    return f"{z.real:.10g}{z.imag:+.10g}j"


def _load(path: str):
    try:
        return read_state(path)
    except OSError as exc:
        raise _IOFailure(f"cannot read {path}: {exc.strerror or exc}") from None


def _save(path: str, state, meta=None) -> None:
    try:
        write_state(path, state, meta)
    except OSError as exc:
        raise _IOFailure(f"cannot write {path}: {exc.strerror or exc}") from None


class _IOFailure(Exception):
    pass


def _as_density(state) -> DensityMatrix:
    if isinstance(state, DensityMatrix):
        return state
    return DensityMatrix.from_pure(state)


def _dims(state) -> list[int]:
    return list(state.dims) if isinstance(state, DensityMatrix) else list(state.shape)


def _kind(state) -> str:
    return "density" if isinstance(state, DensityMatrix) else "pure"


def _config(args, seed: int) -> DeciderConfig:
    return DeciderConfig(
        max_pairs=getattr(args, "max_pairs", None),
        max_specht_len=getattr(args, "max_specht_len", None),
        word_budget=args.word_budget,
        compare_tol=args.tol,
        witness_tol=args.witness_tol,
        rng_seed=seed,
    )


def _settings(cfg: DeciderConfig) -> dict[str, Any]:
    return {
        "tol": cfg.compare_tol,
        "witness_tol": cfg.witness_tol,
        "seed": cfg.rng_seed,
        "max_pairs": cfg.max_pairs if cfg.max_pairs is not None else "auto",
        "max_specht_len": cfg.max_specht_len if cfg.max_specht_len is not None else "auto",
        "word_budget": cfg.word_budget,
    }


def _emit(report: dict[str, Any], as_json: bool, lines: list[str]) -> None:
    if as_json:
        print(json.dumps(report, indent=2))
    else:
        print("\n".join(lines))


def _settings_line(settings: dict[str, Any]) -> str:
    return "settings: " + " ".join(f"{k}={v}" for k, v in settings.items())


def _signature_entries(sig) -> list[dict[str, Any]]:
    return [{"word": str(w), "value": _cplx(v)} for w, v in zip(sig.words, sig.values)]


# ----------------------------------------------------------------------------
# gen / orbit
# ----------------------------------------------------------------------------


def _need(args, *names):
    missing = [f"--{n}" for n in names if getattr(args, n) is None]
    if missing:
        raise UsageError(f"--kind {args.kind} requires {', '.join(missing)}")


def _orbit_image(state, seed: int, similar: bool):
    dims = _dims(state)
    if similar:
        if len(dims) != 2 or dims[0] != dims[1]:
            raise UsageError("--similar needs a bipartite state with equal local dimensions")
        u = haar_unitary(dims[0], seed)
        return apply_local_unitaries(state, [u, u.conj()])
    return apply_local_unitaries(state, haar_local_unitaries(dims, seed))


def cmd_gen(args) -> int:
    seed = _resolve_seed(args.seed)
    kind = args.kind
    meta: dict[str, Any] = {"generator": kind}
    if kind == "isotropic":
        _need(args, "d", "p")
        state = isotropic_state(args.d, args.p)
        meta.update(d=args.d, p=args.p)
    elif kind == "werner":
        _need(args, "d", "f")
        state = werner_state(args.d, args.f)
        meta.update(d=args.d, f=args.f)
    elif kind in ("ghz-mix", "w-mix"):
        p = 0.0 if args.p is None else args.p
        q = 1.0 if args.q is None else args.q
        state = ghz_w_mixtures(p, q)[0 if kind == "ghz-mix" else 1]
        meta.update(p=p, q=q)
    elif kind == "random-pure":
        _need(args, "dims")
        state = random_pure(args.dims, seed)
        meta.update(dims=args.dims, seed=seed)
    elif kind == "max-entangled":
        _need(args, "d")
        twist = haar_unitary(args.d, seed) if args.twist else None
        state = maximally_entangled(args.d, twist)
        meta.update(d=args.d)
        if args.twist:
            meta.update(seed=seed)
    else:
        if args.input is None:
            raise UsageError("--kind haar-orbit requires --in FILE")
        state = _orbit_image(_load(args.input), seed, args.similar)
        meta.update(seed=seed, similar=args.similar)
    _save(args.out, state, meta)
    print(f"wrote {_kind(state)} state dims={_dims(state)} to {args.out}")
    return 0


def cmd_orbit(args) -> int:
    seed = _resolve_seed(args.seed)
    state = _orbit_image(_load(args.file), seed, args.similar)
    _save(args.out, state, {"generator": "haar-orbit", "seed": seed, "similar": args.similar})
    print(f"wrote {_kind(state)} state dims={_dims(state)} to {args.out}")
    return 0


# ----------------------------------------------------------------------------
# invariants
# ----------------------------------------------------------------------------


def _word_family_report(mats, cfg, report, lines):
    K, side = len(mats), mats[0].shape[0]
    bound = resolve_pair_bound(K, side, cfg)
    sig = pair_signature(mats, bound)
    report["pair_words"] = {"max_pairs": bound, "words": _signature_entries(sig)}
    lines.append(f"pair words (max_pairs={bound}, {len(sig)} words):")
    lines += [f"  {w} = {_fmt(v)}" for w, v in zip(sig.words, sig.values)]
    if all(m.shape[0] == m.shape[1] for m in mats):
        bound = resolve_specht_bound(K, side, cfg)
        sig = specht_signature(mats, bound)
        report["specht_words"] = {"max_specht_len": bound, "words": _signature_entries(sig)}
        lines.append(f"specht words (max_specht_len={bound}, {len(sig)} words):")
        lines += [f"  {w} = {_fmt(v)}" for w, v in zip(sig.words, sig.values)]


def cmd_invariants(args) -> int:
    seed = _resolve_seed(args.seed)
    cfg = _config(args, seed)
    state = _load(args.file)
    dims = _dims(state)
    report: dict[str, Any] = {
        "schema": REPORT_SCHEMA,
        "command": "invariants",
        "kind": _kind(state),
        "dims": dims,
    }
    lines = [f"state: {_kind(state)} dims={dims}"]
    rho = _as_density(state)
    J = global_spectral_invariants(rho, rho.dim)
    report["J"] = [float(x) for x in J]
    lines.append("J^s = Tr(rho^s): " + " ".join(_fmt(x) for x in J))

    if isinstance(state, DensityMatrix):
        if len(dims) == 2:
            try:
                form = extract_isotropic_like(state, cfg)
            except NotIsotropicLike as exc:
                report["isotropic_like"] = None
                lines.append(f"isotropic-like form: none ({exc})")
            else:
                report["isotropic_like"] = {
                    "K": form.K,
                    "p0": form.p0,
                    "weights": [float(w) for w in form.weights],
                }
                lines.append(
                    f"isotropic-like form: K={form.K} p0={_fmt(form.p0)} weights="
                    + " ".join(_fmt(w) for w in form.weights)
                )
                if form.K:
                    _word_family_report(form.coefficient_matrices(), cfg, report, lines)
            aux = reduced_power_spectra(state, rho.dim)
            report["aux_reduced_power_spectra"] = {
                "normative": False,
                "spectra": [[float(x) for x in s] for s in aux],
            }
            lines.append("auxiliary (non-normative) spectra of Tr_1(rho^s):")
            lines += [f"  s={k + 1}: " + " ".join(_fmt(x) for x in s) for k, s in enumerate(aux)]
        elif len(dims) > 2:
            spectra = [np.linalg.eigvalsh(reduced_density(state, [n]))[::-1] for n in range(len(dims))]
            report["reduced_spectra"] = [[float(x) for x in s] for s in spectra]
            lines += [
                f"party-{n + 1} reduced spectrum: " + " ".join(_fmt(x) for x in s)
                for n, s in enumerate(spectra)
            ]
    else:
        if len(dims) == 2:
            A = coefficient_matrix(state)
            I = schmidt_invariants(A, min(dims))
            report["schmidt_invariants"] = [float(x) for x in I]
            lines.append("I_alpha: " + " ".join(_fmt(x) for x in I))
            _word_family_report([A], cfg, report, lines)
        if len(dims) >= 2:
            spectra = mode_spectra(state)
            report["mode_spectra"] = [[float(x) for x in s] for s in spectra]
            lines += [
                f"mode-{n + 1} spectrum: " + " ".join(_fmt(x) for x in s) for n, s in enumerate(spectra)
            ]
    report["settings"] = _settings(cfg)
    lines.append(_settings_line(report["settings"]))
    _emit(report, args.json, lines)
    return 0


# ----------------------------------------------------------------------------
# decide
# ----------------------------------------------------------------------------


def _decide(mode: str, a, b, cfg: DeciderConfig):
    if _dims(a) != _dims(b):
        raise UsageError(f"dims {_dims(a)} and {_dims(b)} differ")
    pure = not isinstance(a, DensityMatrix) and not isinstance(b, DensityMatrix)
    try:
        if mode == "lu":
            if len(_dims(a)) != 2:
                raise UsageError("--mode lu needs bipartite states; use --mode multi")
            if pure:
                return decide_pure_lu_bipartite(a, b, cfg)
            return decide_lu_isotropic_like(_as_density(a), _as_density(b), cfg)
        if mode == "lusim":
            dims = _dims(a)
            if len(dims) != 2 or dims[0] != dims[1]:
                raise UsageError("--mode lusim needs bipartite states with equal local dimensions")
            return decide_lu_similar(_as_density(a), _as_density(b), cfg)
        if pure:
            return decide_pure_lu_multipartite(a, b, cfg)
        return decide_lu_noisy_multipartite(_as_density(a), _as_density(b), cfg)
    except NotIsotropicLike as exc:
        return indeterminate(f"input outside the isotropic-like class ({exc})")
    except NotWhiteNoiseForm as exc:
        return indeterminate(f"input outside the white-noise class ({exc})")


def cmd_decide(args) -> int:
    seed = _resolve_seed(args.seed)
    if args.max_word_len is not None:
        if args.mode == "lu" and args.max_pairs is None:
            args.max_pairs = args.max_word_len
        if args.mode == "lusim" and args.max_specht_len is None:
            args.max_specht_len = args.max_word_len
    cfg = _config(args, seed)
    a, b = _load(args.file_a), _load(args.file_b)
    verdict = _decide(args.mode, a, b, cfg)
    report: dict[str, Any] = {
        "schema": REPORT_SCHEMA,
        "command": "decide",
        "mode": args.mode,
        "dims": _dims(a),
        "verdict": verdict.to_dict(),
        "exit_code": verdict.outcome.exit_code,
        "settings": _settings(cfg),
    }
    lines = [f"outcome: {verdict.outcome.value}", f"reason: {verdict.reason}"]
    if verdict.certificate is not None:
        c = verdict.certificate
        lines.append(
            f"certificate: {c.invariant}  value_1={_fmt(c.value_1)}  value_2={_fmt(c.value_2)}  gap={c.gap:.3e}"
        )
    if verdict.residual is not None:
        lines.append(f"witness residual: {verdict.residual:.3e}")
    if verdict.witness is not None:
        for n, u in enumerate(verdict.witness):
            lines.append(f"U_{n + 1} =")
            lines += ["  " + "  ".join(_fmt(z) for z in row) for row in u]
    if verdict.bounds:
        lines.append("bounds used: " + " ".join(f"{k}={v}" for k, v in verdict.bounds.items()))
    lines.append(_settings_line(report["settings"]))
    _emit(report, args.json, lines)
    return verdict.outcome.exit_code


# ----------------------------------------------------------------------------
# classify
# ----------------------------------------------------------------------------


def cmd_classify(args) -> int:
    seed = _resolve_seed(args.seed)
    cfg = DeciderConfig(rng_seed=seed)
    state = _load(args.file)
    dims = _dims(state)
    if len(dims) != 2:
        raise UsageError(f"classify needs a bipartite state, got dims {dims}")
    rho = _as_density(state)
    result: dict[str, Any] = {
        "isotropic_p": classify_isotropic(rho, cfg),
        "werner_f": classify_werner(rho, cfg),
        "isotropic_lu_class_p": classify_isotropic(rho, cfg, up_to_lu=True),
        "werner_lu_class_f": classify_werner(rho, cfg, up_to_lu=True),
        "pure_part_maximally_entangled": None,
    }
    if isinstance(state, DensityMatrix):
        try:
            form = extract_isotropic_like(rho, cfg)
        except NotIsotropicLike:
            form = None
        if form is not None and form.K == 1:
            result["pure_part_maximally_entangled"] = is_maximally_entangled(form.components[0][1], 1e-8)
    else:
        result["pure_part_maximally_entangled"] = is_maximally_entangled(state, 1e-8)
    report = {"schema": REPORT_SCHEMA, "command": "classify", "dims": dims, **result}
    lines = []
    labels = (
        ("isotropic_p", "isotropic: p"),
        ("werner_f", "werner: f"),
        ("isotropic_lu_class_p", "isotropic LU class: p"),
        ("werner_lu_class_f", "werner LU class: f"),
    )
    for key, label in labels:
        if result[key] is not None:
            lines.append(f"{label}={result[key]:.12g}")
    flag = result["pure_part_maximally_entangled"]
    if flag is not None:
        lines.append(f"pure part maximally entangled: {'yes' if flag else 'no'}")
    if not lines:
        lines.append("no class recognized")
    _emit(report, args.json, lines)
    return 0


# ----------------------------------------------------------------------------
# hosvd
# ----------------------------------------------------------------------------


def _sidecar_path(out: str) -> Path:
    p = Path(out)
    return p.with_name(p.stem + ".hosvd.json")


def cmd_hosvd(args) -> int:
    state = _load(args.file)
    if isinstance(state, DensityMatrix):
        raise UsageError("hosvd needs a pure state file")
    if state.ndim < 2:
        raise UsageError("hosvd needs at least two subsystems")
    h = hosvd(state)
    residual = float(np.linalg.norm(h.reconstruct() - state))
    _save(args.out, h.core, {"generator": "hosvd-core"})
    sidecar = Path(args.sidecar) if args.sidecar else _sidecar_path(args.out)
    spectra = [[float(x) for x in s] for s in h.mode_spectra]
    partitions = [[list(g) for g in part] for part in h.degeneracy_partitions]
    factors = ",\n".join(
        f'    {{"shape": {json.dumps(list(u.shape))}, "matrix": {format_pairs(u, " " * 8)}}}'
        for u in h.factors
    )
    text = (
        "{\n"
        f'  "schema": "{HOSVD_SCHEMA}",\n'
        f'  "dims": {json.dumps(list(state.shape))},\n'
        f'  "mode_spectra": {json.dumps(spectra)},\n'
        f'  "degeneracy_partitions": {json.dumps(partitions)},\n'
        f'  "reconstruction_residual": {json.dumps(residual)},\n'
        f'  "factors": [\n{factors}\n  ]\n'
        "}\n"
    )
    try:
        sidecar.write_text(text)
    except OSError as exc:
        raise _IOFailure(f"cannot write {sidecar}: {exc.strerror or exc}") from None
    report = {
        "schema": REPORT_SCHEMA,
        "command": "hosvd",
        "dims": list(state.shape),
        "core_file": str(args.out),
        "sidecar_file": str(sidecar),
        "mode_spectra": spectra,
        "degeneracy_partitions": partitions,
        "reconstruction_residual": residual,
    }
    lines = [f"core written to {args.out}", f"factors and spectra written to {sidecar}"]
    lines += [f"mode-{n + 1} spectrum: " + " ".join(_fmt(x) for x in s) for n, s in enumerate(spectra)]
    lines.append(f"reconstruction residual: {residual:.3e}")
    _emit(report, args.json, lines)
    return 0


# ----------------------------------------------------------------------------
# parser
# ----------------------------------------------------------------------------


def _add_decider_flags(p, word_flags=True):
    p.add_argument("--tol", type=_positive_float, default=1e-9, help="comparison tolerance (default 1e-9)")
    p.add_argument("--witness-tol", type=_positive_float, default=1e-8, help="witness residual bound")
    p.add_argument("--seed", type=int, default=None, help=f"RNG seed (default ${SEED_ENV} or 0)")
    p.add_argument("--word-budget", type=_positive_int, default=DeciderConfig.word_budget,
                   help="word count used to lower automatic truncation bounds")
    if word_flags:
        p.add_argument("--max-pairs", type=_positive_int, default=None, help="pair-word truncation bound")
        p.add_argument("--max-specht-len", type=_positive_int, default=None,
                       help="Specht-word length bound")
    p.add_argument("--json", action="store_true", help="machine-readable report")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="luequiv", description="Local unitary equivalence of quantum states.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="generate a named or random state file")
    p.add_argument("--kind", required=True, choices=GEN_KINDS)
    p.add_argument("--d", type=_positive_int)
    p.add_argument("--p", type=float, help="noise weight")
    p.add_argument("--f", type=float, help="Werner parameter Tr(rho SWAP)")
    p.add_argument("--q", type=float, help="GHZ/W weight against |111> (mix kinds)")
    p.add_argument("--dims", type=_parse_dims, help="comma-separated local dimensions")
    p.add_argument("--twist", action="store_true", help="max-entangled: apply a seeded Haar twist")
    p.add_argument("--in", dest="input", help="haar-orbit: source state file")
    p.add_argument("--similar", action="store_true", help="haar-orbit: use U (x) U*")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("invariants", help="report invariants of a state file")
    p.add_argument("file")
    _add_decider_flags(p)
    p.set_defaults(func=cmd_invariants)

    p = sub.add_parser("decide", help="decide equivalence of two state files")
    p.add_argument("--mode", required=True, choices=("lu", "lusim", "multi"))
    p.add_argument("file_a")
    p.add_argument("file_b")
    p.add_argument("--max-word-len", type=_positive_int, default=None,
                   help="pairs (lu) or Specht letters (lusim); default N^2 / 2N^2")
    _add_decider_flags(p)
    p.set_defaults(func=cmd_decide)

    p = sub.add_parser("classify", help="recognize isotropic and Werner states")
    p.add_argument("file")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("hosvd", help="higher-order SVD of a pure state file")
    p.add_argument("file")
    p.add_argument("--out", required=True, help="core state file")
    p.add_argument("--sidecar", help="factor/spectra file (default <out>.hosvd.json)")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_hosvd)

    p = sub.add_parser("orbit", help="apply seeded Haar local unitaries")
    p.add_argument("file")
    p.add_argument("--out", required=True)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--similar", action="store_true", help="use U (x) U*")
    p.set_defaults(func=cmd_orbit)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:  # --help or a usage error
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"luequiv: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except StateFileError as exc:
        print(f"luequiv: malformed state file: {exc}", file=sys.stderr)
        return EXIT_DATA
    except _IOFailure as exc:
        print(f"luequiv: {exc}", file=sys.stderr)
        return EXIT_IO
    except (ParameterOutOfRange, ShapeMismatch, NotBipartite, BudgetExceeded, ValueError) as exc:
        print(f"luequiv: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except LUEquivError as exc:
        print(f"luequiv: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
