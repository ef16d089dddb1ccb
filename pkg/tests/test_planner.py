"""Parameter admissibility, plan construction, and end-to-end generation."""

from __future__ import annotations

import pytest

from quadforge import emap, planner
from quadforge.errors import PlanError
from quadforge.planner import ParamRequest


def test_request_validation():
    with pytest.raises(PlanError):
        ParamRequest(n=3, t=0, kind="orientable")
    with pytest.raises(PlanError):
        ParamRequest(n=8, t=-1, kind="orientable")
    with pytest.raises(PlanError):
        ParamRequest(n=8, t=0, kind="klein")


def test_classify_specials():
    assert planner.classify(ParamRequest(n=4, t=2, kind="orientable")) == "special"
    assert planner.classify(ParamRequest(n=6, t=3, kind="nonorientable")) == "special"


def test_congruences():
    # nonorientable: t = n(n-5)/2 (mod 2); orientable: same (mod 4)
    assert planner.admissible(ParamRequest(n=10, t=1, kind="nonorientable"))
    assert not planner.admissible(ParamRequest(n=10, t=2, kind="nonorientable"))
    assert planner.admissible(ParamRequest(n=9, t=2, kind="orientable"))
    assert not planner.admissible(ParamRequest(n=9, t=0, kind="orientable"))
    # t range: 0 <= t <= n - 4
    assert not planner.admissible(ParamRequest(n=10, t=7, kind="nonorientable"))


def test_orientable_n6_row_is_empty():
    for t in range(0, 3):
        assert not planner.admissible(ParamRequest(n=6, t=t, kind="orientable"))


def test_plan_tree_shape():
    node = planner.plan(ParamRequest(n=14, t=3, kind="nonorientable"))
    text = planner.plan_text(node)
    assert "base" in text
    lines = text.splitlines()
    assert lines[0].startswith("nonorientable step")
    assert any(line.startswith("  ") for line in lines)


def test_plan_rejects_inadmissible():
    with pytest.raises(PlanError):
        planner.plan(ParamRequest(n=10, t=2, kind="nonorientable"))


def test_generate_special_sphere():
    emb, cert, node = planner.generate(ParamRequest(n=4, t=2, kind="orientable"))
    assert cert.n == 4 and cert.t == 2
    assert cert.chi == 2
    assert cert.quadrangular
    assert not cert.face_simple  # the two sphere faces share all four edges


def test_generate_nonorientable_pairs():
    for n, t in [(6, 1), (7, 3), (9, 0), (11, 1), (12, 4)]:
        emb, cert, node = planner.generate(
            ParamRequest(n=n, t=t, kind="nonorientable"))
        assert (cert.n, cert.t) == (n, t)
        assert not cert.orientable
        assert cert.quadrangular and cert.face_simple
        assert cert.universal
        assert cert.minimal


def test_generate_orientable_pairs():
    for n, t in [(5, 0), (8, 0), (10, 1), (12, 2), (13, 8), (15, 3)]:
        emb, cert, node = planner.generate(
            ParamRequest(n=n, t=t, kind="orientable"))
        assert (cert.n, cert.t) == (n, t)
        assert cert.orientable
        assert cert.quadrangular and cert.face_simple
        assert cert.universal
        assert cert.min_degree >= 3
        assert cert.minimal


def test_generate_is_deterministic():
    req = ParamRequest(n=10, t=3, kind="nonorientable")
    a, _, _ = planner.generate(req)
    planner._GEN_CACHE.clear()
    b, _, _ = planner.generate(req)
    assert a == b


def test_generated_embedding_consistency():
    emb, cert, node = planner.generate(ParamRequest(n=11, t=3, kind="nonorientable"))
    assert len(emb.graph.vertices) == 11
    assert len(emb.graph.edges) == 11 * 10 // 2 - 3
    assert emap.euler_characteristic(emb) == cert.chi
