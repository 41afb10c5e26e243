"""The batch interface: exit codes, output shapes, determinism.

Conventions under test: 0 for answered queries and green suites, 1 when a
verification suite reports a failure, 2 for usage and load problems.
"""

import json
import os
import subprocess
import sys

import pytest

import refcat.duality as duality_mod
from refcat.cli import main
from refcat.psh import Presheaf

SKEW = """
category D
  objects a b
  mor e : a -> a
  mor f : a -> b
  mor g : a -> b
  compose e ; e = e
  compose e ; f = f
  compose e ; g = f
category T
  objects w
functor t : D -> T
  obj a = w
  obj b = w
  mor e = id_w
  mor f = id_w
  mor g = id_w
refsys S : t
"""


@pytest.fixture()
def hoare_file(tmp_path):
    p = tmp_path / "h.fix"
    p.write_text("fixture h hoare\n")
    return str(p)


@pytest.fixture()
def skew_file(tmp_path):
    p = tmp_path / "skew.fix"
    p.write_text(SKEW)
    return str(p)


def test_validate_text(hoare_file, capsys):
    assert main(["validate", hoare_file]) == 0
    out = capsys.readouterr().out
    assert "refsys h: 4/38 over 1/4 (objects/morphisms)" in out
    assert "ok" in out


def test_validate_json(hoare_file, capsys):
    assert main(["validate", hoare_file, "--json"]) == 0
    data = json.loads(capsys.readouterr().out)
    assert data


def test_derive_reports_no_derivations(hoare_file, capsys):
    assert main(["derive", hoare_file, "{s0}", "swap", "{s0}"]) == 0
    assert capsys.readouterr().out.strip() == "no derivations"


def test_derive_lists_the_witness(hoare_file, capsys):
    assert main(["derive", hoare_file, "{s0,s1}", "set0", "{s0}"]) == 0
    assert capsys.readouterr().out.strip() == "set0:{s0,s1}>{s0}"


def test_derive_unknown_name_is_usage_error(hoare_file, capsys):
    assert main(["derive", hoare_file, "{s9}", "swap", "{s0}"]) == 2
    assert "unknown refinement" in capsys.readouterr().err


def test_missing_file_is_a_load_error(capsys):
    assert main(["validate", "/nonexistent.fix"]) == 2
    assert "error:" in capsys.readouterr().err


def test_unknown_suite_is_rejected_by_the_parser(hoare_file):
    with pytest.raises(SystemExit) as err:
        main(["verify", hoare_file, "nonsense"])
    assert err.value.code == 2


def test_slice_and_coslice(hoare_file, capsys):
    assert main(["slice", hoare_file, "W"]) == 0
    out = capsys.readouterr().out
    assert "slice(hoare,W): 16 objects, 152 morphisms" in out
    assert main(["coslice", hoare_file, "W"]) == 0
    assert "16 objects" in capsys.readouterr().out


def test_represent_positive(hoare_file, capsys):
    assert main(["represent", hoare_file, "--pos", "{s0}"]) == 0
    out = capsys.readouterr().out
    assert out.startswith("presheaf rep({s0}) : slice(hoare,W)")
    assert "at ({s0},id) : id:{s0}>{s0}" in out


def test_pushforward_certificate(hoare_file, capsys):
    assert main(["pushforward", hoare_file, "set0", "{s0,s1}"]) == 0
    out = capsys.readouterr().out
    assert "pushforward set0!{s0,s1} = {s0}" in out
    assert "factoring problems solved: 8" in out


def test_pullback_certificate(hoare_file, capsys):
    assert main(["pullback", hoare_file, "set0", "{s1}"]) == 0
    assert "pullback set0*{s1} = {}" in capsys.readouterr().out


def test_dual_commands(hoare_file, capsys):
    assert main(["dual", hoare_file, "--left", "{s0}"]) == 0
    out = capsys.readouterr().out
    assert out.startswith("presheaf dualL(rep({s0})) : slice(hoare^op,W)")
    assert main(["dual", hoare_file, "--right", "{s0}"]) == 0
    assert "dualR" in capsys.readouterr().out


def test_verify_all_on_hoare(hoare_file, capsys):
    assert main(["verify", hoare_file, "all"]) == 0
    out = capsys.readouterr().out
    assert "suite all: 9/9 reports ok" in out


def test_verify_all_on_the_other_fixtures(tmp_path, capsys):
    for kind in ("lattice-collapse", "lattice-identity", "galois", "random"):
        p = tmp_path / f"{kind}.fix"
        body = f"fixture x {kind}\n" if kind != "random" else "fixture x random seed=5\n"
        p.write_text(body)
        args = ["verify", str(p), "all"]
        if kind == "galois":
            args += ["--system", "x"]
        assert main(args) == 0, kind
        assert "reports ok" in capsys.readouterr().out


def test_verify_json_shape(hoare_file, capsys):
    assert main(["verify", hoare_file, "duality", "--json"]) == 0
    reports = json.loads(capsys.readouterr().out)
    assert isinstance(reports, list) and reports
    keys = set(reports[0])
    assert {"name", "statement", "passed", "failed", "skipped", "notes"} <= keys
    assert "wall" not in " ".join(keys)


def test_verify_skew_system_is_green(skew_file, capsys):
    assert main(["verify", skew_file, "duality"]) == 0
    capsys.readouterr()


def test_corrupted_tables_turn_the_suite_red(skew_file, capsys):
    orig = duality_mod._cut_presheaf

    def tampered(s, B, fixed, idx):
        psh, pos = orig(s, B, fixed, idx)
        rows = list(psh.action)
        for i, row in enumerate(rows):
            if len(set(row)) >= 2 and not psh.base.is_identity(i):
                rows[i] = tuple(reversed(row))
                break
        else:
            return psh, pos
        return Presheaf(psh.name, psh.base, psh.elements, tuple(rows), psh.payloads), pos

    duality_mod._cut_presheaf = tampered
    try:
        assert main(["verify", skew_file, "duality"]) == 1
    finally:
        duality_mod._cut_presheaf = orig
    out = capsys.readouterr().out
    assert "failed 1" in out or "failed" in out


def test_fixture_gen_roundtrips(tmp_path, capsys):
    for kind, extra in (
        ("hoare", []),
        ("linctx", []),
        ("lattice-collapse", []),
        ("lattice-identity", []),
        ("galois", []),
        ("random", ["--seed", "5"]),
    ):
        assert main(["fixtures", "gen", kind] + extra) == 0
        out = capsys.readouterr().out
        p = tmp_path / f"{kind}.gen.fix"
        p.write_text(out)
        assert main(["validate", str(p)]) == 0
        capsys.readouterr()


def test_global_flags_may_follow_the_subcommand(capsys):
    # the seed flag is attached to every subparser, not just the root
    assert main(["fixtures", "gen", "random", "--seed", "9"]) == 0
    first = capsys.readouterr().out
    assert "seed=9" in first
    assert main(["fixtures", "gen", "random", "--seed", "9"]) == 0
    assert capsys.readouterr().out == first


def run_cli(args, hashseed):
    env = dict(os.environ, PYTHONHASHSEED=hashseed)
    return subprocess.run(
        [sys.executable, "-m", "refcat", *args],
        capture_output=True,
        env=env,
        check=False,
    )


def test_output_is_stable_across_hash_randomization(tmp_path):
    p = tmp_path / "c.fix"
    p.write_text("fixture c lattice-collapse\n")
    runs = [run_cli(["verify", str(p), "all"], hs) for hs in ("1", "99")]
    assert all(r.returncode == 0 for r in runs)
    assert runs[0].stdout == runs[1].stdout
    assert runs[0].stdout  # nonempty
