"""Named base-embedding records, persistent verified witnesses, and the
complete-bipartite quadrangulation builder.

Records come in two flavors.  *Searched* records are acquired once by the
search module (exact backtracking for small graphs, annealing for large
ones), persisted as emap files, and re-verified against their property
bundle on every load.  *Derived* records are rebuilt deterministically from
their parents by a named surgery, so they regenerate byte-for-byte.

The catalog directory defaults to the ``data/catalog`` tree shipped with the
package and can be overridden with the ``QUADFORGE_CATALOG`` environment
variable.
"""

from __future__ import annotations

import hashlib
import os
import threading
import zlib
from collections import defaultdict, deque
from dataclasses import dataclass
from pathlib import Path

from . import emap, graphalg, search, serialize, surgery
from .emap import Embedding, Graph, vkey
from .errors import CatalogError
from .search import CoolingSchedule, WitnessSpec

CATALOG_ENV = "QUADFORGE_CATALOG"


def catalog_dir() -> Path:
    override = os.environ.get(CATALOG_ENV)
    if override:
        return Path(override)
    return Path(__file__).parent / "data" / "catalog"


@dataclass(frozen=True)
class CatalogRecord:
    """Specification bundle for one named embedding."""

    name: str
    target: str  # phi_target name; alternates may list fallback targets
    chi: int
    orientable: bool | None
    predicates: tuple = ()
    provenance: str = "searched"
    alternates: tuple = ()
    counts: tuple | None = None  # (vertices, edges) check when target is empty

    def graphs(self) -> tuple:
        if not self.target:
            return ()
        return tuple(graphalg.phi_target(t) for t in (self.target, *self.alternates))

    def spec_for(self, g: Graph) -> WitnessSpec:
        return WitnessSpec(g, self.chi, self.orientable, self.predicates)

    def spec_hash(self) -> str:
        text = "|".join(
            [
                self.name,
                self.target,
                ",".join(self.alternates),
                str(self.chi),
                str(self.orientable),
                repr(self.predicates),
                self.provenance,
            ]
        )
        return hashlib.sha256(text.encode()).hexdigest()[:16]


# Records acquired by annealing rather than exact search: their graphs carry
# 20-48 edges, beyond comfortable exhaustive backtracking guarantees.
ANNEALED = ("phi_7_2_plus_star", "phi_8_4_star", "phi_10_1_star", "phi_11_8_plus_star")


def record_table() -> tuple:
    recs = [
        CatalogRecord("phi_4_0", "phi_4_0", 1, False,
                      (("nearly_face_simple_except_some_universal",),)),
        CatalogRecord("phi_5_0_star", "phi_5_0_star", 0, True,
                      (("face_simple",), ("universal_vertex",))),
        CatalogRecord("phi_6_1", "phi_6_1", -1, False,
                      (("face_simple",), ("universal_vertex",))),
        CatalogRecord("phi_7_0_plus", "phi_7_0_plus", -3, False,
                      (("nearly_face_simple_except", "x"),
                       ("delete_degree2_face_simple", "z"))),
        CatalogRecord("phi_7_2_plus", "phi_7_2_plus", -2, False,
                      (("nearly_face_simple_except", "x"),
                       ("delete_degree2_face_simple", "z"))),
        CatalogRecord("phi_7_4_plus", "phi_7_4_plus", -1, False,
                      (("nearly_face_simple_except", "x"),)),
        CatalogRecord("phi_7_2_plus_star", "phi_7_2_plus_star", -2, True,
                      (("nearly_face_simple_except", "x"),),
                      provenance="annealed",
                      alternates=("phi_7_2_plus_star_alt",)),
        CatalogRecord("phi_8_4_star", "phi_8_4_star", -4, True,
                      (("face_simple",), ("universal_vertex",),
                       ("has_handle_site", (4, 5, 6, 7))),
                      provenance="annealed"),
        CatalogRecord("phi_10_1_star", "phi_10_1_star", -12, True,
                      (("face_simple",), ("universal_vertex",)),
                      provenance="annealed"),
        CatalogRecord("phi_11_8_plus_star", "phi_11_8_plus_star", -12, True,
                      (("nearly_face_simple_except", "x"),
                       ("has_handle_site", (1, 2, 3, 4)),
                       ("has_handle_site", (5, 6, 7, 8)),
                       ("double_handle", (1, 2, 3, 4), (5, 6, 7, 8))),
                      provenance="annealed"),
        CatalogRecord("k_6_3", "k_6_3", 0, True, (("face_simple",),)),
        CatalogRecord("c4_sphere", "c4_sphere", 2, True, ()),
        CatalogRecord("klein_6_3", "klein_6_3", 0, False,
                      (("face_simple",),)),
        # Derived records: rebuilt from parents, never searched.
        CatalogRecord("phi_11_4_plus_star", "phi_11_4_plus_star", -14, True,
                      (("nearly_face_simple_except", "x"),
                       ("has_handle_site", (5, 6, 7, 8))),
                      provenance="derived(handle,phi_11_8_plus_star)"),
        CatalogRecord("phi_11_0_plus_star", "phi_11_0_plus_star", -16, True,
                      (("nearly_face_simple_except", "x"),),
                      provenance="derived(handle,phi_11_4_plus_star)"),
        CatalogRecord("q7_1", "q7_1", -3, False,
                      (("face_simple",), ("universal_vertex",)),
                      provenance="derived(delete_degree2,phi_7_0_plus)"),
        CatalogRecord("q7_3", "q7_3", -2, False,
                      (("face_simple",), ("universal_vertex",)),
                      provenance="derived(delete_degree2,phi_7_2_plus)"),
        CatalogRecord("q7_3_orientable", "q7_3_orientable", -2, True,
                      (("face_simple",), ("universal_vertex",)),
                      provenance="derived(delete_degree2,phi_7_2_plus_star)",
                      alternates=("q7_3_orientable_alt",)),
        CatalogRecord("q11_5", "q11_5", -14, True,
                      (("face_simple",), ("universal_vertex",)),
                      provenance="derived(delete_degree2,phi_11_4_plus_star)"),
        CatalogRecord("q11_1", "q11_1", -16, True,
                      (("face_simple",), ("universal_vertex",)),
                      provenance="derived(delete_degree2,phi_11_0_plus_star)"),
        CatalogRecord("q8_0", "q8_0", -6, True,
                      (("face_simple",), ("universal_vertex",)),
                      provenance="derived(handle,phi_8_4_star)"),
        # Target graph depends on which K5-face hosts the new degree-2 vertex,
        # so this record is verified by counts and predicates, not exact labels.
        CatalogRecord("q6_3_orientable", "", 0, True,
                      (("universal_vertex",),),
                      provenance="derived(insert_degree2,phi_5_0_star)",
                      counts=(6, 12)),
    ]
    return tuple(recs)


_RECORDS = {r.name: r for r in record_table()}
_witness_cache: dict = {}
_locks: defaultdict = defaultdict(threading.Lock)
_EXACT_BUDGET = 50_000_000


def get_record(name: str) -> CatalogRecord:
    try:
        return _RECORDS[name]
    except KeyError:
        raise CatalogError(f"unknown catalog record {name!r}") from None


def _witness_path(name: str) -> Path:
    return catalog_dir() / f"{name}.emap"


def _verify(rec: CatalogRecord, emb: Embedding) -> None:
    graphs = rec.graphs()
    if graphs:
        if not any(emb.graph == g for g in graphs):
            raise CatalogError(f"{rec.name}: stored witness is not on the record's target graph")
    elif rec.counts is not None:
        got = (len(emb.graph.vertices), len(emb.graph.edges))
        if got != rec.counts:
            raise CatalogError(f"{rec.name}: witness has counts {got}, record requires {rec.counts}")
    if not emap.is_quadrangular(emb):
        raise CatalogError(f"{rec.name}: witness is not quadrangular")
    if emap.euler_characteristic(emb) != rec.chi:
        raise CatalogError(
            f"{rec.name}: chi={emap.euler_characteristic(emb)}, record requires {rec.chi}"
        )
    if rec.orientable is not None and emap.is_orientable(emb) != rec.orientable:
        raise CatalogError(f"{rec.name}: orientability mismatch")
    if not search.check_predicates(emb, rec.predicates):
        raise CatalogError(f"{rec.name}: witness fails its predicate bundle")


def _atomic_write(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_suffix(path.suffix + ".tmp")
    tmp.write_text(text)
    os.replace(tmp, path)


def _manifest_path() -> Path:
    return catalog_dir() / "manifest.txt"


def _read_manifest() -> dict:
    path = _manifest_path()
    entries = {}
    if path.exists():
        for line in path.read_text().splitlines():
            parts = line.split()
            if len(parts) == 4:
                entries[parts[0]] = (parts[1], parts[2], parts[3])
    return entries


def _update_manifest(rec: CatalogRecord, file_text: str) -> None:
    entries = _read_manifest()
    file_hash = hashlib.sha256(file_text.encode()).hexdigest()[:16]
    entries[rec.name] = (rec.spec_hash(), file_hash, rec.provenance)
    lines = [
        f"{name} {sh} {fh} {prov}"
        for name, (sh, fh, prov) in sorted(entries.items())
    ]
    _atomic_write(_manifest_path(), "\n".join(lines) + "\n")


def _persist(rec: CatalogRecord, emb: Embedding) -> None:
    text = serialize.write_emap(emb)
    _atomic_write(_witness_path(rec.name), text)
    _update_manifest(rec, text)


def _acquire_searched(rec: CatalogRecord) -> Embedding:
    last_status = "none"
    for g in rec.graphs():
        spec = rec.spec_for(g)
        seed = zlib.crc32(rec.name.encode())
        if rec.name in ANNEALED:
            result = search.search_anneal(
                spec, seed=seed, schedule=CoolingSchedule(), restarts=4,
            )
            if result.status != "found":
                # annealing can stall on the densest targets; fall back to
                # randomized exact backtracking, which shares the checker
                result = search.search_randomized(spec, seed=seed)
        else:
            result = search.search_exact(spec, _EXACT_BUDGET)
        if result.status == "found":
            return result.embedding
        last_status = result.status
    raise CatalogError(
        f"{rec.name}: witness search failed (status={last_status}, "
        f"budget={_EXACT_BUDGET if rec.name not in ANNEALED else 'anneal x64'})"
    )


def _first_chain_site(parent: Embedding, first: tuple, second: tuple | None):
    """First handle site for ``first`` whose augmentation keeps ``second`` usable."""
    for site in surgery.find_handle_sites(parent, first):
        try:
            out = surgery.handle_augment(parent, site)
        except Exception:
            continue
        if second is None or surgery.find_handle_sites(out, second):
            return out
    raise CatalogError(f"no usable handle site for cycle {first}")


def _derive(rec: CatalogRecord) -> Embedding:
    name = rec.name
    if name == "phi_11_4_plus_star":
        return _first_chain_site(get_witness("phi_11_8_plus_star"), (1, 2, 3, 4), (5, 6, 7, 8))
    if name == "phi_11_0_plus_star":
        return _first_chain_site(get_witness("phi_11_4_plus_star"), (5, 6, 7, 8), None)
    if name == "q8_0":
        return _first_chain_site(get_witness("phi_8_4_star"), (4, 5, 6, 7), None)
    if name in ("q7_1", "q7_3", "q7_3_orientable", "q11_5", "q11_1"):
        parent = {
            "q7_1": "phi_7_0_plus",
            "q7_3": "phi_7_2_plus",
            "q7_3_orientable": "phi_7_2_plus_star",
            "q11_5": "phi_11_4_plus_star",
            "q11_1": "phi_11_0_plus_star",
        }[name]
        return surgery.delete_degree2(get_witness(parent), "z")
    if name == "q6_3_orientable":
        parent = get_witness("phi_5_0_star")
        face = parent.faces()[0].vertices
        corner = min(face, key=vkey)
        out, _ = surgery.insert_degree2(parent, face, corner)
        return out
    raise CatalogError(f"no derivation rule for record {name!r}")


def get_witness(name: str) -> Embedding:
    """The verified embedding for a record; searched/derived and persisted on first use."""
    rec = get_record(name)
    if name in _witness_cache:
        return _witness_cache[name]
    with _locks[name]:
        if name in _witness_cache:
            return _witness_cache[name]
        path = _witness_path(name)
        if path.exists():
            try:
                emb = serialize.parse_emap(path.read_text())
            except Exception as exc:
                raise CatalogError(f"{name}: witness file corrupt: {exc}") from exc
        elif rec.provenance.startswith("derived"):
            emb = _derive(rec)
            _persist(rec, emb)
        else:
            emb = _acquire_searched(rec)
            _persist(rec, emb)
        _verify(rec, emb)
        _witness_cache[name] = emb
        return emb


def verify_all() -> list:
    """Re-certify every record; returns (name, ok, message) triples."""
    report = []
    manifest = _read_manifest()
    for rec in record_table():
        try:
            path = _witness_path(rec.name)
            if not path.exists():
                raise CatalogError("witness file missing")
            text = path.read_text()
            entry = manifest.get(rec.name)
            if entry is not None:
                file_hash = hashlib.sha256(text.encode()).hexdigest()[:16]
                if entry[1] != file_hash:
                    raise CatalogError("witness file does not match manifest hash")
                if entry[0] != rec.spec_hash():
                    raise CatalogError("record spec changed since witness was stored")
            emb = serialize.parse_emap(text)
            _verify(rec, emb)
            report.append((rec.name, True, "ok"))
        except Exception as exc:
            report.append((rec.name, False, str(exc)))
    return report


def build_all() -> None:
    """Materialize and persist every record in dependency order."""
    for rec in record_table():
        get_witness(rec.name)


def clear_cache() -> None:
    _witness_cache.clear()
    _KMN_CACHE.clear()


# ---------------------------------------------------------------------------
# Complete-bipartite quadrangulations via diamond-sum composition.
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class KmnKey:
    m: int
    n: int

    def __post_init__(self):
        if self.m % 4 != 2:
            raise CatalogError(f"m must be congruent to 2 mod 4, got {self.m}")
        if self.n < 2:
            raise CatalogError(f"n must be at least 2, got {self.n}")


_KMN_CACHE: dict = {}


def build_kmn(m: int, n: int) -> Embedding:
    """Orientable quadrangular embedding of K_{m,n} with canonical labels."""
    key = KmnKey(m, n)
    if (key.m, key.n) in _KMN_CACHE:
        return _KMN_CACHE[(key.m, key.n)]
    emb = _build_kmn(key.m, key.n)
    emb = _canonical_bipartite(emb, key.m, key.n)
    _certify_kmn(emb, key.m, key.n)
    _KMN_CACHE[(key.m, key.n)] = emb
    return emb


def _build_kmn(m: int, n: int) -> Embedding:
    if n == 2:
        # planar double wheel: both degree-m vertices see the m-cycle 0..m-1
        faces = [(m, i, m + 1, (i + 1) % m) for i in range(m)]
        return emap.embedding_from_faces(faces)
    if n == 3:
        if m == 6:
            return get_witness("k_6_3")
        a = build_kmn(m - 4, 3)
        b = _fresh_relabel(build_kmn(6, 3), a.graph.vertices)
        v = _first_vertex_of_degree(a, 3)
        v2 = _first_vertex_of_degree(b, 3)
        return surgery.diamond_sum(a, v, b, v2)
    a = build_kmn(m, n - 1)
    b = _fresh_relabel(build_kmn(m, 3), a.graph.vertices)
    v = _first_vertex_of_degree(a, m)
    v2 = _first_vertex_of_degree(b, m)
    return surgery.diamond_sum(a, v, b, v2)


def _first_vertex_of_degree(emb: Embedding, d: int):
    for v in emb.graph.sorted_vertices():
        if emb.graph.degree(v) == d:
            return v
    raise CatalogError(f"no vertex of degree {d} found")


def _fresh_relabel(emb: Embedding, taken) -> Embedding:
    base = max((v for v in taken if isinstance(v, int)), default=-1) + 1
    mapping = {v: base + i for i, v in enumerate(emb.graph.sorted_vertices())}
    return surgery.relabel_embedding(emb, mapping)


def _canonical_bipartite(emb: Embedding, m: int, n: int) -> Embedding:
    root = emb.graph.sorted_vertices()[0]
    color = {root: 0}
    queue = deque([root])
    while queue:
        u = queue.popleft()
        for w in sorted(emb.graph.neighbors(u), key=vkey):
            if w not in color:
                color[w] = 1 - color[u]
                queue.append(w)
    side0 = sorted((v for v, c in color.items() if c == 0), key=vkey)
    side1 = sorted((v for v, c in color.items() if c == 1), key=vkey)
    if len(side0) != m:
        side0, side1 = side1, side0
    if len(side0) != m or len(side1) != n:
        raise CatalogError(f"graph is not bipartite with sides {m}, {n}")
    mapping = {v: i for i, v in enumerate(side0)}
    mapping.update({v: m + i for i, v in enumerate(side1)})
    return surgery.relabel_embedding(emb, mapping)


def _certify_kmn(emb: Embedding, m: int, n: int) -> None:
    if emb.graph != graphalg.complete_bipartite(m, n):
        raise CatalogError(f"builder output is not K_{{{m},{n}}}")
    if not emap.is_quadrangular(emb):
        raise CatalogError(f"K_{{{m},{n}}} embedding is not quadrangular")
    if not emap.is_orientable(emb):
        raise CatalogError(f"K_{{{m},{n}}} embedding is not orientable")
    chi = m + n - m * n // 2
    if emap.euler_characteristic(emb) != chi:
        raise CatalogError(f"K_{{{m},{n}}} embedding has wrong Euler characteristic")
    if min(m, n) >= 3 and not emap.is_face_simple(emb):
        raise CatalogError(f"K_{{{m},{n}}} embedding is not face-simple")
