import json
import os
from pathlib import Path

import numpy as np
import pytest

from luequiv.cli import main
from luequiv.generators import basis_state, ghz_state, random_pure, w_state
from luequiv.statefile import dumps_state, read_state, write_state

GOLDEN = Path(__file__).parent / "golden"
REGEN = os.environ.get("LUEQUIV_REGEN_GOLDEN") == "1"


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


def check_golden(name, text):
    path = GOLDEN / name
    if REGEN:
        path.write_text(text)
    assert text == path.read_text()


@pytest.fixture
def workdir(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    return tmp_path


# ----------------------------------------------------------------------------
# gen / orbit
# ----------------------------------------------------------------------------


def test_gen_isotropic(workdir, capsys):
    code, _, _ = run(capsys, "gen", "--kind", "isotropic", "--d", 2, "--p", 0.6, "--out", "iso.json")
    assert code == 0
    doc = json.loads(Path("iso.json").read_text())
    assert doc["kind"] == "density" and len(doc["matrix"]) == 16
    check_golden("isotropic_d2_p0.6.json", Path("iso.json").read_text())


def test_gen_random_pure_is_deterministic(workdir, capsys):
    for name in ("a.json", "b.json"):
        assert run(capsys, "gen", "--kind", "random-pure", "--dims", "2,2,2", "--seed", 42, "--out", name)[0] == 0
    assert Path("a.json").read_bytes() == Path("b.json").read_bytes()


def test_gen_werner_negative_f(workdir, capsys):
    assert run(capsys, "gen", "--kind", "werner", "--d", 3, "--f", -0.5, "--out", "w.json")[0] == 0
    assert read_state("w.json").dims == (3, 3)


@pytest.mark.parametrize(
    "argv",
    [
        ["--kind", "ghz-mix", "--p", 0.5, "--q", 0.5],
        ["--kind", "w-mix"],
        ["--kind", "max-entangled", "--d", 3],
        ["--kind", "max-entangled", "--d", 3, "--twist", "--seed", 2],
    ],
)
def test_gen_other_kinds(workdir, capsys, argv):
    assert run(capsys, "gen", *argv, "--out", "s.json")[0] == 0
    text = Path("s.json").read_text()
    assert dumps_state(read_state("s.json"), json.loads(text).get("meta")) == text


def test_gen_file_rewrite_is_byte_stable(workdir, capsys):
    run(capsys, "gen", "--kind", "random-pure", "--dims", "3,2", "--seed", 1, "--out", "s.json")
    text = Path("s.json").read_text()
    meta = json.loads(text)["meta"]
    assert dumps_state(read_state("s.json"), meta) == text


@pytest.mark.parametrize(
    "argv",
    [
        ["--kind", "isotropic", "--d", 2],
        ["--kind", "isotropic", "--d", 2, "--p", 1.5],
        ["--kind", "werner", "--d", 1, "--f", 0],
        ["--kind", "random-pure"],
        ["--kind", "haar-orbit"],
        ["--kind", "nonsense"],
        ["--kind", "random-pure", "--dims", "2,x"],
    ],
)
def test_gen_bad_arguments_exit_64(workdir, capsys, argv):
    assert run(capsys, "gen", *argv, "--out", "s.json")[0] == 64


def test_gen_io_failure_exits_74(workdir, capsys):
    code, _, err = run(capsys, "gen", "--kind", "isotropic", "--d", 2, "--p", 0.1, "--out", "missing/dir/s.json")
    assert code == 74 and "cannot write" in err


def test_seed_env_and_flag_precedence(workdir, capsys, monkeypatch):
    monkeypatch.setenv("LUEQUIV_SEED", "7")
    run(capsys, "gen", "--kind", "random-pure", "--dims", "2,3", "--out", "env.json")
    run(capsys, "gen", "--kind", "random-pure", "--dims", "2,3", "--seed", 7, "--out", "flag.json")
    run(capsys, "gen", "--kind", "random-pure", "--dims", "2,3", "--seed", 8, "--out", "wins.json")
    assert Path("env.json").read_bytes() == Path("flag.json").read_bytes()
    assert np.array_equal(read_state("wins.json"), random_pure((2, 3), 8))
    monkeypatch.setenv("LUEQUIV_SEED", "abc")
    assert run(capsys, "gen", "--kind", "random-pure", "--dims", "2", "--out", "x.json")[0] == 64


def test_orbit_and_haar_orbit_agree(workdir, capsys):
    write_state("s.json", random_pure((2, 3), 5))
    run(capsys, "orbit", "s.json", "--seed", 3, "--out", "o1.json")
    run(capsys, "gen", "--kind", "haar-orbit", "--in", "s.json", "--seed", 3, "--out", "o2.json")
    assert np.array_equal(read_state("o1.json"), read_state("o2.json"))
    assert run(capsys, "orbit", "s.json", "--similar", "--out", "o3.json")[0] == 64


# ----------------------------------------------------------------------------
# decide
# ----------------------------------------------------------------------------


def test_decide_ghz_w_mixture_pair(workdir, capsys):
    run(capsys, "gen", "--kind", "ghz-mix", "--p", 0.5, "--q", 0.5, "--out", "g.json")
    run(capsys, "gen", "--kind", "w-mix", "--p", 0.5, "--q", 0.5, "--out", "w.json")
    code, out, _ = run(capsys, "decide", "--mode", "multi", "g.json", "w.json", "--json")
    assert code == 1
    report = json.loads(out)
    assert report["verdict"]["certificate"]["invariant"] == "J^2"
    check_golden("decide_ghz_w_mixture_pair.json", out)
    code, out, _ = run(capsys, "decide", "--mode", "multi", "g.json", "w.json")
    assert code == 1 and "certificate: J^2" in out


def test_decide_orbit_image(workdir, capsys):
    run(capsys, "gen", "--kind", "isotropic", "--d", 3, "--p", 0.4, "--out", "a.json")
    run(capsys, "orbit", "a.json", "--seed", 11, "--out", "b.json")
    code, out, _ = run(capsys, "decide", "--mode", "lu", "a.json", "b.json", "--json")
    assert code == 0
    report = json.loads(out)
    assert report["verdict"]["residual"] <= 1e-8
    assert report["verdict"]["bounds"] == {"max_pairs": 9}
    assert report["settings"] == {
        "tol": 1e-9, "witness_tol": 1e-8, "seed": 0,
        "max_pairs": "auto", "max_specht_len": "auto", "word_budget": 2000,
    }


def test_decide_lusim_and_word_length_flag(workdir, capsys):
    run(capsys, "gen", "--kind", "isotropic", "--d", 2, "--p", 0.4, "--out", "a.json")
    run(capsys, "orbit", "a.json", "--similar", "--seed", 1, "--out", "b.json")
    code, out, _ = run(capsys, "decide", "--mode", "lusim", "a.json", "b.json", "--max-word-len", 4, "--json")
    assert code == 0
    assert json.loads(out)["verdict"]["bounds"] == {"max_specht_len": 4}


def test_decide_pure_modes(workdir, capsys):
    write_state("a.json", ghz_state())
    write_state("b.json", w_state())
    assert run(capsys, "decide", "--mode", "multi", "a.json", "b.json")[0] == 1
    run(capsys, "orbit", "a.json", "--seed", 2, "--out", "c.json")
    assert run(capsys, "decide", "--mode", "multi", "a.json", "c.json")[0] == 0
    write_state("p.json", random_pure((2, 3), 1))
    run(capsys, "orbit", "p.json", "--seed", 2, "--out", "q.json")
    assert run(capsys, "decide", "--mode", "lu", "p.json", "q.json")[0] == 0


def test_decide_outside_class_is_indeterminate(workdir, capsys):
    run(capsys, "gen", "--kind", "werner", "--d", 3, "--f", 0.2, "--out", "a.json")
    run(capsys, "orbit", "a.json", "--seed", 2, "--out", "b.json")
    code, out, _ = run(capsys, "decide", "--mode", "lu", "a.json", "b.json", "--json")
    assert code == 2
    assert json.loads(out)["verdict"]["outcome"] == "Indeterminate"


def test_decide_usage_errors(workdir, capsys):
    run(capsys, "gen", "--kind", "isotropic", "--d", 2, "--p", 0.4, "--out", "a.json")
    run(capsys, "gen", "--kind", "isotropic", "--d", 3, "--p", 0.4, "--out", "b.json")
    write_state("g.json", ghz_state())
    assert run(capsys, "decide", "--mode", "lu", "a.json", "b.json")[0] == 64
    assert run(capsys, "decide", "--mode", "lu", "g.json", "g.json")[0] == 64
    assert run(capsys, "decide", "--mode", "lusim", "g.json", "g.json")[0] == 64
    assert run(capsys, "decide", "--mode", "bogus", "a.json", "a.json")[0] == 64
    assert run(capsys, "decide", "--mode", "lu", "a.json")[0] == 64
    assert run(capsys, "decide", "--mode", "lu", "a.json", "a.json", "--tol", "-1")[0] == 64
    assert run(capsys, "decide", "--mode", "lu", "a.json", "nope.json")[0] == 74


def test_no_command_is_usage_error(capsys):
    assert run(capsys)[0] == 64


# ----------------------------------------------------------------------------
# invariants
# ----------------------------------------------------------------------------


def test_invariants_of_bell_state(workdir, capsys):
    run(capsys, "gen", "--kind", "max-entangled", "--d", 2, "--out", "psi.json")
    code, out, _ = run(capsys, "invariants", "psi.json", "--json")
    assert code == 0
    report = json.loads(out)
    assert np.allclose(report["schmidt_invariants"], [1, 0.5])
    check_golden("invariants_bell.json", out)
    code, out, _ = run(capsys, "invariants", "psi.json")
    assert "I_alpha: 1 0.5" in out and "settings: tol=1e-09" in out


def test_invariants_of_ghz(workdir, capsys):
    write_state("g.json", ghz_state())
    report = json.loads(run(capsys, "invariants", "g.json", "--json")[1])
    assert np.allclose(report["mode_spectra"], [[2**-0.5, 2**-0.5]] * 3, atol=1e-12)
    assert "schmidt_invariants" not in report


def test_invariants_json_schema_roundtrip(workdir, capsys):
    run(capsys, "gen", "--kind", "isotropic", "--d", 2, "--p", 0.6, "--out", "iso.json")
    out = run(capsys, "invariants", "iso.json", "--json")[1]
    report = json.loads(out)
    assert json.loads(json.dumps(report, indent=2)) == report
    assert report["schema"] == "luequiv-report/1" and report["command"] == "invariants"
    assert set(report) == {
        "schema", "command", "kind", "dims", "J", "isotropic_like",
        "pair_words", "specht_words", "aux_reduced_power_spectra", "settings",
    }
    assert report["J"][1] == pytest.approx(0.37)
    assert report["isotropic_like"]["K"] == 1
    assert report["aux_reduced_power_spectra"]["normative"] is False
    for entry in report["pair_words"]["words"] + report["specht_words"]["words"]:
        assert set(entry) == {"word", "value"} and len(entry["value"]) == 2


def test_invariants_of_multipartite_density(workdir, capsys):
    run(capsys, "gen", "--kind", "ghz-mix", "--p", 0.5, "--q", 0.5, "--out", "g.json")
    report = json.loads(run(capsys, "invariants", "g.json", "--json")[1])
    assert len(report["reduced_spectra"]) == 3 and len(report["J"]) == 8


def test_invariants_word_budget_lowers_default_bounds(workdir, capsys):
    run(capsys, "gen", "--kind", "isotropic", "--d", 2, "--p", 0.6, "--out", "iso.json")
    report = json.loads(run(capsys, "invariants", "iso.json", "--word-budget", 3, "--json")[1])
    assert report["pair_words"]["max_pairs"] == 3
    assert report["settings"]["word_budget"] == 3
    report = json.loads(run(capsys, "invariants", "iso.json", "--max-pairs", 2, "--json")[1])
    assert [w["word"] for w in report["pair_words"]["words"]] == ["P(1,1)", "P(1,1)(1,1)"]


def test_invariants_malformed_file_exits_65(workdir, capsys):
    Path("bad.json").write_text('{"schema": "luequiv-state/1", "kind": "pure", "dims": [2], "amplitudes": [[1, 0]]}')
    assert run(capsys, "invariants", "bad.json")[0] == 65
    Path("bad2.json").write_text("{not json")
    assert run(capsys, "invariants", "bad2.json")[0] == 65


# ----------------------------------------------------------------------------
# classify
# ----------------------------------------------------------------------------


def test_classify_examples(workdir, capsys):
    run(capsys, "gen", "--kind", "isotropic", "--d", 3, "--p", 0.4, "--out", "i.json")
    code, out, _ = run(capsys, "classify", "i.json")
    assert code == 0 and "isotropic: p=0.4" in out.splitlines()
    run(capsys, "gen", "--kind", "werner", "--d", 2, "--f", 0.7, "--out", "w.json")
    assert "werner: f=0.7" in run(capsys, "classify", "w.json")[1].splitlines()
    report = json.loads(run(capsys, "classify", "i.json", "--json")[1])
    check_golden("classify_isotropic_d3_p0.4.json", json.dumps(report, indent=2) + "\n")


def test_classify_rejects_multipartite(workdir, capsys):
    run(capsys, "gen", "--kind", "ghz-mix", "--p", 0.3, "--out", "g.json")
    code, out, _ = run(capsys, "classify", "g.json")
    assert code == 64 and "isotropic" not in out and "werner" not in out


def test_classify_pure_state(workdir, capsys):
    write_state("b.json", basis_state((2, 2), (0, 1)))
    out = run(capsys, "classify", "b.json")[1]
    assert "pure part maximally entangled: no" in out


# ----------------------------------------------------------------------------
# hosvd
# ----------------------------------------------------------------------------


def test_hosvd_product_state(workdir, capsys):
    write_state("z.json", basis_state((2, 2, 2), (0, 0, 0)))
    code, out, _ = run(capsys, "hosvd", "z.json", "--out", "core.json", "--json")
    assert code == 0
    report = json.loads(out)
    assert report["reconstruction_residual"] <= 1e-12
    core = read_state("core.json")
    assert np.count_nonzero(np.abs(core) > 1e-12) == 1
    side = json.loads(Path("core.hosvd.json").read_text())
    assert side["schema"] == "luequiv-hosvd/1" and len(side["factors"]) == 3


def test_hosvd_w_state(workdir, capsys):
    write_state("w.json", w_state())
    code, out, _ = run(capsys, "hosvd", "w.json", "--out", "core.json", "--json")
    report = json.loads(out)
    assert np.allclose(report["mode_spectra"], [[np.sqrt(2 / 3), np.sqrt(1 / 3)]] * 3, atol=1e-12)
    check_golden("hosvd_w_sidecar.json", Path("core.hosvd.json").read_text())


def test_hosvd_random_state_and_text_output(workdir, capsys):
    write_state("r.json", random_pure((2, 2, 2), 3))
    code, out, _ = run(capsys, "hosvd", "r.json", "--out", "c.json", "--sidecar", "side.json")
    assert code == 0 and Path("side.json").exists()
    resid = float(out.strip().splitlines()[-1].split(":")[1])
    assert resid <= 1e-10


def test_hosvd_errors(workdir, capsys):
    run(capsys, "gen", "--kind", "isotropic", "--d", 2, "--p", 0.6, "--out", "iso.json")
    assert run(capsys, "hosvd", "iso.json", "--out", "c.json")[0] == 64
    Path("bad.json").write_text("[]")
    assert run(capsys, "hosvd", "bad.json", "--out", "c.json")[0] == 65
