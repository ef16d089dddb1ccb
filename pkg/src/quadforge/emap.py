"""Cellular embeddings as signed rotation systems.

An embedding is stored as a cyclic order of incident edges at every vertex
plus a sign in {+1, -1} per edge.  Face tracing follows the rotation at each
vertex; crossing a negative edge swaps the traversal side.  That convention
is fixed repo-wide: the tracing state is (edge, tail vertex, orientation o),
and the step is

    o' = o * sign(e);  at the head w, the next edge is the rotation
    successor of e when o' = +1 and the predecessor when o' = -1.

Vertex labels are ints or strings; all orderings use ``vkey`` so output is
reproducible.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import networkx as nx

from .errors import StructuralError

Label = int | str
Edge = tuple  # normalized 2-tuple of labels, endpoints sorted by vkey


def vkey(v: Label):
    """Total order on labels: all ints first, then strings."""
    if isinstance(v, bool) or not isinstance(v, (int, str)):
        raise StructuralError(f"bad vertex label {v!r}")
    if isinstance(v, int):
        return (0, v, "")
    return (1, 0, v)


def edge_between(u: Label, v: Label) -> Edge:
    if u == v:
        raise StructuralError(f"loop at {u!r} not allowed")
    return (u, v) if vkey(u) < vkey(v) else (v, u)


def other_end(e: Edge, v: Label) -> Label:
    if e[0] == v:
        return e[1]
    if e[1] == v:
        return e[0]
    raise StructuralError(f"vertex {v!r} not an endpoint of {e}")


@dataclass(frozen=True)
class Graph:
    """Labeled simple graph: loop-free, no parallel edges."""

    vertices: frozenset
    edges: frozenset

    def __post_init__(self):
        for v in self.vertices:
            vkey(v)
        for e in self.edges:
            if not (isinstance(e, tuple) and len(e) == 2):
                raise StructuralError(f"edge {e!r} is not a pair")
            if edge_between(*e) != e:
                raise StructuralError(f"edge {e!r} is not normalized")
            if e[0] not in self.vertices or e[1] not in self.vertices:
                raise StructuralError(f"edge {e!r} has an endpoint outside the vertex set")

    @staticmethod
    def from_edges(edges: Iterable[tuple], vertices: Iterable[Label] = ()) -> "Graph":
        es = frozenset(edge_between(u, v) for u, v in edges)
        vs = frozenset(vertices) | frozenset(itertools.chain.from_iterable(es))
        return Graph(vs, es)

    def neighbors(self, v: Label) -> set:
        if v not in self.vertices:
            raise StructuralError(f"unknown vertex {v!r}")
        return {other_end(e, v) for e in self.edges if v in e[:2]}

    def degree(self, v: Label) -> int:
        return len(self.neighbors(v))

    def incident_edges(self, v: Label) -> list:
        return sorted((e for e in self.edges if v in e[:2]), key=edge_key)

    def has_edge(self, u: Label, v: Label) -> bool:
        return u != v and edge_between(u, v) in self.edges

    def is_connected(self) -> bool:
        if not self.vertices:
            return False
        adj = {v: set() for v in self.vertices}
        for u, v in self.edges:
            adj[u].add(v)
            adj[v].add(u)
        start = min(self.vertices, key=vkey)
        seen = {start}
        stack = [start]
        while stack:
            for w in adj[stack.pop()]:
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
        return len(seen) == len(self.vertices)

    def sorted_vertices(self) -> list:
        return sorted(self.vertices, key=vkey)

    def sorted_edges(self) -> list:
        return sorted(self.edges, key=edge_key)


def edge_key(e: Edge):
    return (vkey(e[0]), vkey(e[1]))


def min_degree(g: Graph) -> int:
    return min(g.degree(v) for v in g.vertices)


def universal_vertices(g: Graph) -> set:
    n = len(g.vertices)
    return {v for v in g.vertices if g.degree(v) == n - 1}


@dataclass(frozen=True)
class SurfaceClass:
    orientable: bool
    euler_characteristic: int

    def __post_init__(self):
        chi = self.euler_characteristic
        if self.orientable and (chi % 2 != 0 or chi > 2):
            raise StructuralError(f"orientable surface cannot have chi={chi}")
        if not self.orientable and chi > 1:
            raise StructuralError(f"nonorientable surface cannot have chi={chi}")

    @property
    def genus(self) -> int:
        if not self.orientable:
            raise StructuralError("genus is defined for orientable surfaces")
        return (2 - self.euler_characteristic) // 2

    @property
    def crosscap_number(self) -> int:
        if self.orientable:
            raise StructuralError("crosscap number is defined for nonorientable surfaces")
        return 2 - self.euler_characteristic


@dataclass(frozen=True)
class FaceWalk:
    """Closed boundary walk; ``darts[i] = (vertex, edge)`` leaves vertex along edge."""

    darts: tuple

    def __len__(self) -> int:
        return len(self.darts)

    @property
    def vertices(self) -> tuple:
        return tuple(v for v, _ in self.darts)

    @property
    def edges(self) -> tuple:
        return tuple(e for _, e in self.darts)

    @property
    def corners(self) -> tuple:
        """(vertex, entering edge, leaving edge) triples, one per dart."""
        k = len(self.darts)
        return tuple(
            (self.darts[i][0], self.darts[i - 1][1], self.darts[i][1]) for i in range(k)
        )


class Embedding:
    """Signed rotation system over a connected simple graph.

    Treat instances as immutable: every operation returns a new embedding.
    """

    def __init__(self, graph: Graph, rotation: Mapping, signature: Mapping):
        if not graph.is_connected():
            raise StructuralError("embedding requires a connected graph")
        rot = {}
        for v in graph.vertices:
            if v not in rotation:
                raise StructuralError(f"no rotation given for vertex {v!r}")
            cyc = tuple(rotation[v])
            incident = set(graph.incident_edges(v))
            if len(cyc) != len(incident) or set(cyc) != incident:
                raise StructuralError(f"rotation at {v!r} is not a permutation of its incident edges")
            if cyc:
                # canonical phase: start each cycle at its smallest edge, so
                # structural equality and serialization are representation-free
                k = min(range(len(cyc)), key=lambda i: edge_key(cyc[i]))
                cyc = cyc[k:] + cyc[:k]
            rot[v] = cyc
        sig = {}
        for e in graph.edges:
            if e not in signature:
                raise StructuralError(f"no signature entry for edge {e}")
            s = signature[e]
            if s not in (1, -1):
                raise StructuralError(f"signature of {e} must be +1 or -1, got {s!r}")
            sig[e] = s
        self.graph = graph
        self.rotation = rot
        self.signature = sig
        self._rot_pos = {v: {e: i for i, e in enumerate(c)} for v, c in rot.items()}
        self._faces = None

    def __eq__(self, o) -> bool:
        return (
            isinstance(o, Embedding)
            and self.graph == o.graph
            and self.rotation == o.rotation
            and self.signature == o.signature
        )

    def _next_state(self, e: Edge, tail: Label, o: int):
        head = other_end(e, tail)
        o2 = o * self.signature[e]
        rot = self.rotation[head]
        pos = self._rot_pos[head][e]
        f = rot[(pos + o2) % len(rot)]
        return (f, head, o2)

    def _companion(self, e: Edge, tail: Label, o: int):
        return (e, other_end(e, tail), -o * self.signature[e])

    def faces(self) -> tuple:
        if self._faces is None:
            self._faces = self._trace()
        return self._faces

    def _trace(self) -> tuple:
        states = []
        for e in self.graph.sorted_edges():
            for tail in sorted(e, key=vkey):
                for o in (1, -1):
                    states.append((e, tail, o))
        seen = set()
        walks = []
        for start in states:
            if start in seen:
                continue
            orbit = []
            cur = start
            while True:
                orbit.append(cur)
                seen.add(cur)
                cur = self._next_state(*cur)
                if cur == start:
                    break
                if cur in seen:
                    raise StructuralError("face tracing re-entered a consumed state")
            orbit_set = set(orbit)
            for st in orbit:
                comp = self._companion(*st)
                if comp in orbit_set:
                    raise StructuralError("degenerate self-reverse face walk")
                seen.add(comp)
            walks.append(FaceWalk(tuple((tail, e) for e, tail, _ in orbit)))
        total = sum(len(w) for w in walks)
        if total != 2 * len(self.graph.edges):
            raise StructuralError("face walks do not cover each edge exactly twice")
        return tuple(walks)


def trace_faces(emb: Embedding) -> tuple:
    return emb.faces()


def euler_characteristic(emb: Embedding) -> int:
    g = emb.graph
    return len(g.vertices) - len(g.edges) + len(emb.faces())


def is_orientable(emb: Embedding) -> bool:
    """True iff the signature is switching-equivalent to all-positive.

    Equivalent to every cycle having positive sign product, decided by a
    BFS two-coloring of the vertices.
    """
    g = emb.graph
    color = {}
    start = min(g.vertices, key=vkey)
    color[start] = 1
    queue = [start]
    adj = {v: [] for v in g.vertices}
    for e in g.edges:
        adj[e[0]].append((e[1], emb.signature[e]))
        adj[e[1]].append((e[0], emb.signature[e]))
    while queue:
        u = queue.pop()
        for w, s in adj[u]:
            want = color[u] * s
            if w not in color:
                color[w] = want
                queue.append(w)
            elif color[w] != want:
                return False
    return True


def surface_class(emb: Embedding) -> SurfaceClass:
    return SurfaceClass(is_orientable(emb), euler_characteristic(emb))


def dual_multigraph(emb: Embedding) -> nx.MultiGraph:
    """Faces as nodes, one dual edge per primal edge; loops allowed."""
    walks = emb.faces()
    uses = {}
    for i, w in enumerate(walks):
        for e in w.edges:
            uses.setdefault(e, []).append(i)
    dual = nx.MultiGraph()
    dual.add_nodes_from(range(len(walks)))
    for e in emb.graph.sorted_edges():
        fa, fb = uses[e]
        dual.add_edge(fa, fb, primal=e)
    return dual


def is_quadrangular(emb: Embedding) -> bool:
    return all(len(w) == 4 for w in emb.faces())


def is_face_simple(emb: Embedding) -> bool:
    uses = {}
    for i, w in enumerate(emb.faces()):
        for e in w.edges:
            uses.setdefault(e, []).append(i)
    pairs = set()
    for e, (fa, fb) in uses.items():
        if fa == fb:
            return False
        key = (min(fa, fb), max(fa, fb))
        if key in pairs:
            return False
        pairs.add(key)
    return True


def is_nearly_face_simple_except(emb: Embedding, v: Label) -> bool:
    """Face-simplicity may fail only through shared edges incident with v."""
    if v not in emb.graph.vertices:
        raise StructuralError(f"unknown vertex {v!r}")
    uses = {}
    for i, w in enumerate(emb.faces()):
        for e in w.edges:
            uses.setdefault(e, []).append(i)
    pairs = {}
    for e, (fa, fb) in uses.items():
        if v in e[:2]:
            continue
        if fa == fb:
            return False
        key = (min(fa, fb), max(fa, fb))
        pairs[key] = pairs.get(key, 0) + 1
        if pairs[key] > 1:
            return False
    return True


@dataclass(frozen=True)
class Certificate:
    """Machine-checked summary of an embedding, serialized as key=value lines."""

    n: int
    edges: int
    t: int
    chi: int
    orientable: bool
    quadrangular: bool
    face_simple: bool
    universal: tuple
    min_degree: int
    minimal: bool

    KEYS = ("n", "edges", "t", "chi", "orientable", "quadrangular",
            "face_simple", "universal", "min_degree", "minimal")

    def to_text(self) -> str:
        vals = {
            "n": self.n,
            "edges": self.edges,
            "t": self.t,
            "chi": self.chi,
            "orientable": _fmt_bool(self.orientable),
            "quadrangular": _fmt_bool(self.quadrangular),
            "face_simple": _fmt_bool(self.face_simple),
            "universal": ",".join(str(v) for v in self.universal),
            "min_degree": self.min_degree,
            "minimal": _fmt_bool(self.minimal),
        }
        return "".join(f"{k}={vals[k]}\n" for k in self.KEYS)


def _fmt_bool(b: bool) -> str:
    return "true" if b else "false"


def certify(emb: Embedding) -> Certificate:
    g = emb.graph
    n = len(g.vertices)
    m = len(g.edges)
    t = n * (n - 1) // 2 - m
    quad = is_quadrangular(emb)
    return Certificate(
        n=n,
        edges=m,
        t=t,
        chi=euler_characteristic(emb),
        orientable=is_orientable(emb),
        quadrangular=quad,
        face_simple=is_face_simple(emb),
        universal=tuple(sorted(universal_vertices(g), key=vkey)),
        min_degree=min_degree(g),
        minimal=quad and t <= n - 4,
    )


# ---------------------------------------------------------------------------
# Rebuilding an embedding from an explicit face set.
#
# Surgery edits faces, not rotations.  Given closed vertex walks using every
# edge exactly twice, we recover the rotation at each vertex by walking the
# umbrella of glued polygon corners, then solve for edge signs consistent
# with the face-tracing convention above.
# ---------------------------------------------------------------------------

def normalize_walk(walk: Sequence[Label]) -> tuple:
    """Canonical representative of a cyclic walk up to rotation and reflection."""
    w = tuple(walk)
    k = len(w)
    candidates = []
    for seq in (w, tuple(reversed(w))):
        for i in range(k):
            candidates.append(seq[i:] + seq[:i])
    return min(candidates, key=lambda s: tuple(vkey(x) for x in s))


def embedding_from_faces(face_walks: Sequence[Sequence[Label]]) -> Embedding:
    walks = [tuple(w) for w in face_walks]
    if not walks:
        raise StructuralError("no faces given")
    # slot (i, j): face i traverses edge {w[j], w[j+1]} starting at w[j]
    slot_edge = {}
    edge_uses = {}
    for i, w in enumerate(walks):
        if len(w) < 2:
            raise StructuralError(f"face walk {w} is too short")
        for j in range(len(w)):
            e = edge_between(w[j], w[(j + 1) % len(w)])
            slot_edge[(i, j)] = e
            edge_uses.setdefault(e, []).append((i, j))
    for e, uses in edge_uses.items():
        if len(uses) != 2:
            raise StructuralError(f"edge {e} is used {len(uses)} times, expected 2")
    graph = Graph.from_edges(edge_uses.keys())

    # Side-ends: (i, j, 0) at the tail w[j], (i, j, 1) at the head w[j+1].
    def end_vertex(i, j, which):
        w = walks[i]
        return w[j] if which == 0 else w[(j + 1) % len(w)]

    corner = {}
    for i, w in enumerate(walks):
        k = len(w)
        for j in range(k):
            a = (i, (j - 1) % k, 1)
            b = (i, j, 0)
            corner[a] = b
            corner[b] = a
    glue = {}
    for e, ((i1, j1), (i2, j2)) in edge_uses.items():
        for which1 in (0, 1):
            u = end_vertex(i1, j1, which1)
            which2 = 0 if end_vertex(i2, j2, 0) == u else 1
            glue[(i1, j1, which1)] = (i2, j2, which2)
            glue[(i2, j2, which2)] = (i1, j1, which1)

    ends_at = {}
    for i, w in enumerate(walks):
        for j in range(len(w)):
            for which in (0, 1):
                ends_at.setdefault(end_vertex(i, j, which), []).append((i, j, which))

    rotation = {}
    for v, ends in ends_at.items():
        start = min(ends)
        cyc = []
        cur = start
        visited = 0
        while True:
            cyc.append(slot_edge[cur[:2]])
            visited += 2
            cur = corner[glue[cur]]
            if cur == start:
                break
            if visited > len(ends):
                raise StructuralError(f"umbrella at {v!r} does not close")
        if visited != len(ends):
            raise StructuralError(f"vertex {v!r} is pinched: umbrella misses some corners")
        rotation[v] = tuple(cyc)
    rot_pos = {v: {e: i for i, e in enumerate(c)} for v, c in rotation.items()}

    # Solve for slot orientations and edge signs.  Corner turns at vertices of
    # degree >= 3 pin a slot's orientation absolutely; the rest is a sparse
    # parity system solved by propagation with backtracking on gauge choices.
    o = {}
    all_slots = sorted(slot_edge)
    for i, w in enumerate(walks):
        k = len(w)
        for j in range(k):
            u = w[j]
            rot = rotation[u]
            d = len(rot)
            if d < 3:
                continue
            prev_e = slot_edge[(i, (j - 1) % k)]
            this_e = slot_edge[(i, j)]
            pos = rot_pos[u][prev_e]
            succ = rot[(pos + 1) % d]
            pred = rot[(pos - 1) % d]
            if succ == this_e and pred != this_e:
                val = 1
            elif pred == this_e and succ != this_e:
                val = -1
            else:
                raise StructuralError(f"corner at {u!r} disagrees with the derived rotation")
            if o.setdefault((i, j), val) != val:
                raise StructuralError("conflicting corner orientations")

    sign = {}

    def next_slot(s):
        i, j = s
        return (i, (j + 1) % len(walks[i]))

    def propagate(trail) -> bool:
        changed = True
        while changed:
            changed = False
            for e, (s1, s2) in edge_uses.items():
                pairs = [(s1, next_slot(s1)), (s2, next_slot(s2))]
                known = None
                for a, b in pairs:
                    if a in o and b in o:
                        known = o[a] * o[b]
                        break
                if known is None:
                    continue
                if e in sign:
                    if sign[e] != known:
                        return False
                else:
                    sign[e] = known
                    trail.append(("sign", e))
                    changed = True
                for a, b in pairs:
                    if a in o and b not in o:
                        o[b] = sign[e] * o[a]
                        trail.append(("o", b))
                        changed = True
                    elif b in o and a not in o:
                        o[a] = sign[e] * o[b]
                        trail.append(("o", a))
                        changed = True
            for a in all_slots:
                b = next_slot(a)
                e = slot_edge[a]
                if e in sign:
                    if a in o and b not in o:
                        o[b] = sign[e] * o[a]
                        trail.append(("o", b))
                        changed = True
                    elif b in o and a not in o:
                        o[a] = sign[e] * o[b]
                        trail.append(("o", a))
                        changed = True
                    elif a in o and b in o and o[a] * o[b] != sign[e]:
                        return False
        return True

    def undo(trail):
        for kind, key in reversed(trail):
            if kind == "sign":
                del sign[key]
            else:
                del o[key]

    def solve() -> bool:
        trail = []
        if not propagate(trail):
            undo(trail)
            return False
        free = next((s for s in all_slots if s not in o), None)
        if free is None:
            return True
        for guess in (1, -1):
            sub = [("o", free)]
            o[free] = guess
            if propagate(sub) and solve():
                return True
            undo(sub)
        undo(trail)
        return False

    if not solve():
        raise StructuralError("face set admits no consistent signed rotation system")

    emb = Embedding(graph, rotation, sign)
    wkey = lambda walk: tuple(vkey(v) for v in walk)
    got = sorted((normalize_walk(w.vertices) for w in emb.faces()), key=wkey)
    want = sorted((normalize_walk(w) for w in walks), key=wkey)
    if got != want:
        raise StructuralError("rebuilt embedding does not reproduce the requested faces")
    return emb
