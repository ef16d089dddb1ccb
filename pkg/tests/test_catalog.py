"""Witness catalog: records, persistence, derivations, K_{m,n} builder."""

from __future__ import annotations

import os

import pytest

from quadforge import catalog, emap, graphalg, search, serialize
from quadforge.errors import CatalogError


def test_record_table_names_unique():
    names = [rec.name for rec in catalog.record_table()]
    assert len(names) == len(set(names))
    assert "phi_4_0" in names
    assert "phi_11_8_plus_star" in names


def test_all_witnesses_present_and_verified():
    report = catalog.verify_all()
    assert len(report) == len(catalog.record_table())
    bad = [(name, msg) for name, ok, msg in report if not ok]
    assert bad == []


def test_witness_round_trip_from_disk():
    for rec in catalog.record_table():
        emb = catalog.get_witness(rec.name)
        text = serialize.write_emap(emb)
        assert serialize.parse_emap(text) == emb
        assert text == serialize.write_emap(serialize.parse_emap(text))


def test_core_witness_properties():
    w = catalog.get_witness("phi_4_0")
    assert emap.euler_characteristic(w) == 1
    assert not emap.is_face_simple(w)
    assert emap.is_nearly_face_simple_except(w, 0)

    w = catalog.get_witness("phi_5_0_star")
    assert emap.euler_characteristic(w) == 0
    assert emap.is_orientable(w)
    assert emap.is_face_simple(w)

    w = catalog.get_witness("klein_6_3")
    assert emap.euler_characteristic(w) == 0
    assert not emap.is_orientable(w)
    assert emap.is_face_simple(w)


def test_apex_witness_predicates():
    for i in (0, 2, 4):
        w = catalog.get_witness(f"phi_7_{i}_plus")
        assert emap.euler_characteristic(w) == i // 2 - 3
        assert emap.is_nearly_face_simple_except(w, "x")


def test_derived_witnesses_match_their_parents():
    q = catalog.get_witness("q7_1")
    parent = catalog.get_witness("phi_7_0_plus")
    assert len(q.graph.vertices) == len(parent.graph.vertices) - 1
    assert emap.is_face_simple(q)

    q8 = catalog.get_witness("q8_0")
    assert q8.graph == graphalg.complete(8)
    assert emap.is_orientable(q8)
    assert emap.euler_characteristic(q8) == -6


def test_double_handle_derivation_lands_on_target_graph():
    final = catalog.get_witness("phi_11_0_plus_star")
    assert final.graph == graphalg.phi_target("phi_11_0_plus_star")
    assert emap.euler_characteristic(final) == -16
    assert emap.is_orientable(final)


def test_unknown_record():
    with pytest.raises(CatalogError):
        catalog.get_record("no_such_witness")
    with pytest.raises(CatalogError):
        catalog.get_witness("no_such_witness")


def test_env_override_builds_fresh(tmp_path, monkeypatch):
    monkeypatch.setenv(catalog.CATALOG_ENV, str(tmp_path))
    catalog.clear_cache()
    try:
        emb = catalog.get_witness("c4_sphere")
        assert (tmp_path / "c4_sphere.emap").exists()
        assert (tmp_path / "manifest.txt").exists()
        assert emap.euler_characteristic(emb) == 2
    finally:
        monkeypatch.delenv(catalog.CATALOG_ENV)
        catalog.clear_cache()


def test_build_kmn_certified():
    for m, n in [(6, 2), (6, 3), (6, 7), (10, 3), (10, 4)]:
        emb = catalog.build_kmn(m, n)
        g = emb.graph
        assert len(g.vertices) == m + n
        assert len(g.edges) == m * n
        assert emap.is_quadrangular(emb)
        assert emap.is_orientable(emb)
        assert emap.euler_characteristic(emb) == m + n - m * n // 2
        if n >= 3:
            assert emap.is_face_simple(emb)


def test_build_kmn_rejects_bad_m():
    with pytest.raises(CatalogError):
        catalog.build_kmn(8, 3)
    with pytest.raises(CatalogError):
        catalog.build_kmn(6, 1)


def test_kmn_has_full_degree_vertices():
    emb = catalog.build_kmn(6, 5)
    degs = sorted(emb.graph.degree(v) for v in emb.graph.vertices)
    assert degs == [5] * 6 + [6] * 5
