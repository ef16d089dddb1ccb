"""End-to-end command-line behavior and exit-code contract."""

from __future__ import annotations

import pytest

from quadforge import cli, serialize


def run(capsys, *argv):
    code = cli.main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_gen_writes_certified_file(tmp_path, capsys):
    out = tmp_path / "q.emap"
    code, stdout, _ = run(capsys, "gen", "--n", "10", "--t", "3",
                          "--kind", "nonorientable", "--out", str(out))
    assert code == 0
    assert "n=10" in stdout and "t=3" in stdout
    assert "face_simple=true" in stdout
    emb = serialize.parse_emap(out.read_text())
    assert len(emb.graph.vertices) == 10


def test_gen_inadmissible_cites_congruence(capsys):
    code, _, stderr = run(capsys, "gen", "--n", "6", "--t", "0",
                          "--kind", "orientable")
    assert code == 1
    assert "mod 4" in stderr


def test_gen_plan_only(capsys):
    code, stdout, _ = run(capsys, "gen", "--n", "14", "--t", "3",
                          "--kind", "nonorientable", "--plan-only")
    assert code == 0
    assert "base" in stdout
    assert "emap 1" not in stdout


def test_gen_byte_identical(tmp_path, capsys):
    a = tmp_path / "a.emap"
    b = tmp_path / "b.emap"
    for path in (a, b):
        code, _, _ = run(capsys, "gen", "--n", "9", "--t", "0",
                         "--kind", "nonorientable", "--out", str(path))
        assert code == 0
    assert a.read_bytes() == b.read_bytes()


def test_verify_expectations(tmp_path, capsys):
    out = tmp_path / "q.emap"
    run(capsys, "gen", "--n", "8", "--t", "0", "--kind", "nonorientable",
        "--out", str(out))
    code, _, _ = run(capsys, "verify", str(out),
                     "--expect", "orientable=false", "--expect", "t=0")
    assert code == 0
    code, _, stderr = run(capsys, "verify", str(out),
                          "--expect", "orientable=true")
    assert code == 1
    assert "mismatch" in stderr


def test_verify_does_not_rewrite_input(tmp_path, capsys):
    out = tmp_path / "q.emap"
    run(capsys, "gen", "--n", "8", "--t", "0", "--kind", "nonorientable",
        "--out", str(out))
    before = out.read_bytes()
    run(capsys, "verify", str(out))
    assert out.read_bytes() == before


def test_malformed_emap_reports_line(tmp_path, capsys):
    bad = tmp_path / "bad.emap"
    bad.write_text("emap 1\nV 2\nE 1\ne 0 0 1 *\nr 0 : 0\nr 1 : 0\n")
    code, _, stderr = run(capsys, "verify", str(bad))
    assert code == 2
    assert "line 4" in stderr


def test_missing_file_is_io_error(capsys):
    code, _, stderr = run(capsys, "verify", "/nonexistent/q.emap")
    assert code == 2


def test_search_spec_file(tmp_path, capsys):
    spec = tmp_path / "k4.spec"
    spec.write_text("graph K(4)\nchi 1\norientable false\n"
                    "predicate nearly_face_simple_except_some_universal\n")
    code, stdout, _ = run(capsys, "search", "--spec", str(spec))
    assert code == 0
    assert "emap 1" in stdout
    assert "quadrangular=true" in stdout


def test_search_unsatisfiable(tmp_path, capsys):
    spec = tmp_path / "k4fs.spec"
    spec.write_text("graph K(4)\nchi 1\norientable false\n"
                    "predicate face_simple\n")
    code, _, stderr = run(capsys, "search", "--spec", str(spec))
    assert code == 1
    assert "no witness" in stderr


def test_search_bad_spec_file(tmp_path, capsys):
    spec = tmp_path / "bad.spec"
    spec.write_text("graph K(4)\n")
    code, _, stderr = run(capsys, "search", "--spec", str(spec))
    assert code == 2


def test_surgery_diamond_via_files(tmp_path, capsys):
    a = tmp_path / "a.emap"
    b = tmp_path / "b.emap"
    run(capsys, "kmn", "--m", "6", "--n", "3", "--out", str(a))
    run(capsys, "gen", "--n", "7", "--t", "1", "--kind", "nonorientable",
        "--out", str(b))
    # no shared labels other than along the rims: relabeled inputs needed;
    # here we just exercise the error path for a degree mismatch
    code, _, stderr = run(capsys, "surgery", "diamond", str(a), "0",
                          str(b), "0")
    assert code == 1


def test_dual_output(tmp_path, capsys):
    out = tmp_path / "k.emap"
    run(capsys, "kmn", "--m", "6", "--n", "3", "--out", str(out))
    code, stdout, _ = run(capsys, "dual", str(out))
    assert code == 0
    assert stdout.startswith("faces 9")
    assert len(stdout.splitlines()) == 1 + 18


def test_kmn_certificate(capsys):
    code, stdout, _ = run(capsys, "kmn", "--m", "6", "--n", "4")
    assert code == 0
    assert "chi=-2" in stdout
    assert "orientable=true" in stdout


def test_sweep_guard(capsys):
    code, _, stderr = run(capsys, "sweep", "--surface", "sphere", "--max-n", "9")
    assert code == 1
    assert "--force" in stderr


def test_sweep_projective(capsys):
    code, stdout, _ = run(capsys, "sweep", "--surface", "projective",
                          "--max-n", "5")
    assert code == 0
    assert "n=5 face_simple_quadrangulations=0" in stdout


def test_quiet_gen_prints_only_certificate(capsys):
    code, stdout, _ = run(capsys, "--quiet", "gen", "--n", "8", "--t", "0",
                          "--kind", "nonorientable")
    assert code == 0
    lines = stdout.splitlines()
    assert all("=" in line for line in lines)
    assert len(lines) == 10


def test_catalog_list_and_verify(capsys):
    code, stdout, _ = run(capsys, "catalog", "list")
    assert code == 0
    assert "phi_4_0" in stdout
    code, _, _ = run(capsys, "catalog", "verify")
    assert code == 0
