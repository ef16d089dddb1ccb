"""emap text format: canonical writing, line-located parse errors, round trips."""

from __future__ import annotations

import pytest

from quadforge import emap, graphalg, search, serialize
from quadforge.errors import FormatError


def sample_embedding() -> emap.Embedding:
    g = graphalg.complete(4)
    rot = {
        0: ((0, 1), (0, 2), (0, 3)),
        1: ((0, 1), (1, 2), (1, 3)),
        2: ((0, 2), (2, 3), (1, 2)),
        3: ((0, 3), (1, 3), (2, 3)),
    }
    sig = {(0, 1): 1, (0, 2): 1, (0, 3): 1, (1, 2): -1, (1, 3): -1, (2, 3): -1}
    return emap.Embedding(g, rot, sig)


def test_round_trip_identity():
    emb = sample_embedding()
    again = serialize.parse_emap(serialize.write_emap(emb))
    assert again == emb


def test_write_is_canonical_and_stable():
    emb = sample_embedding()
    text = serialize.write_emap(emb)
    assert text == serialize.write_emap(serialize.parse_emap(text))
    assert text.startswith("emap 1\n")
    assert text.endswith("\n")


def test_round_trip_mixed_labels():
    g = emap.Graph.from_edges(
        [(0, "x"), (0, "y"), (0, "z"), (1, "x"), (1, "y"), (1, "z")])
    spec = search.WitnessSpec(graph=g, chi=2, orientable=True)
    res = search.search_exact(spec)
    assert res.status == "found"
    emb = res.embedding
    assert serialize.parse_emap(serialize.write_emap(emb)) == emb


def test_bad_header():
    with pytest.raises(FormatError, match="line 1"):
        serialize.parse_emap("emap 2\nV 1\nE 0\n")


def test_bad_sign_token():
    text = "emap 1\nV 2\nE 1\ne 0 0 1 *\nr 0 : 0\nr 1 : 0\n"
    with pytest.raises(FormatError, match="line 4"):
        serialize.parse_emap(text)


def test_duplicate_edge_id():
    text = ("emap 1\nV 3\nE 2\n"
            "e 0 0 1 +\ne 0 1 2 +\n"
            "r 0 : 0\nr 1 : 0 1\nr 2 : 1\n")
    with pytest.raises(FormatError, match="line 5"):
        serialize.parse_emap(text)


def test_missing_rotation():
    text = "emap 1\nV 2\nE 1\ne 0 0 1 +\nr 0 : 0\n"
    with pytest.raises(FormatError, match="1"):
        serialize.parse_emap(text)


def test_rotation_not_permutation():
    text = "emap 1\nV 2\nE 1\ne 0 0 1 +\nr 0 : 0 0\nr 1 : 0\n"
    with pytest.raises(FormatError):
        serialize.parse_emap(text)


def test_loop_rejected():
    text = "emap 1\nV 1\nE 1\ne 0 0 0 +\nr 0 : 0\n"
    with pytest.raises(FormatError):
        serialize.parse_emap(text)


def test_vertex_count_mismatch():
    text = "emap 1\nV 3\nE 1\ne 0 0 1 +\nr 0 : 0\nr 1 : 0\n"
    with pytest.raises(FormatError):
        serialize.parse_emap(text)


def test_comment_and_blank_lines_ignored():
    emb = sample_embedding()
    text = serialize.write_emap(emb)
    padded = text.replace("emap 1\n", "emap 1\n# a comment\n\n")
    assert serialize.parse_emap(padded) == emb
