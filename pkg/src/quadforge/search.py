"""Materializing base embeddings from property specifications.

Two engines:

* ``search_exact`` - depth-first search over signed rotation systems that
  builds quadrangular faces one at a time, always extending the face of the
  lexicographically smallest open tracing state.  Partial walks that cannot
  close at length 4 are pruned immediately.  Symmetry is broken by fixing
  every spanning-tree edge sign to +1 (each switching class has exactly one
  such representative) and by orienting one high-degree vertex's rotation
  (quotienting the global reflection).  With an unlimited budget, "none" is
  therefore a proof of nonexistence for the labeled graph.

* ``search_anneal`` - simulated annealing over the same space with energy
  sum over faces of |length - 4| plus an orientability-mismatch penalty,
  for targets too large to backtrack.
"""

from __future__ import annotations

import itertools
import math
import random
from dataclasses import dataclass, field
from typing import Iterator

from . import emap, surgery
from .emap import Embedding, Graph, vkey
from .errors import SearchError


@dataclass(frozen=True)
class WitnessSpec:
    """Target graph plus the property bundle a witness must satisfy."""

    graph: Graph
    chi: int
    orientable: bool | None  # None means "either"
    predicates: tuple = ()

    def validate(self) -> None:
        n = len(self.graph.vertices)
        m = len(self.graph.edges)
        if m % 2 != 0:
            raise SearchError(f"quadrangular embedding needs an even edge count, got {m}")
        if self.chi != n - m // 2:
            raise SearchError(
                f"chi={self.chi} inconsistent with |V|-|E|/2={n - m // 2} for a quadrangulation"
            )
        if self.orientable is True and self.chi % 2 != 0:
            raise SearchError(f"orientable surfaces have even chi, got {self.chi}")
        if not self.graph.is_connected():
            raise SearchError("target graph must be connected")


def check_predicates(emb: Embedding, predicates) -> bool:
    for pred in predicates:
        name, *args = pred
        if name == "face_simple":
            ok = emap.is_face_simple(emb)
        elif name == "nearly_face_simple_except":
            ok = emap.is_nearly_face_simple_except(emb, args[0])
        elif name == "nearly_face_simple_except_some_universal":
            ok = any(
                emap.is_nearly_face_simple_except(emb, v)
                for v in sorted(emap.universal_vertices(emb.graph), key=vkey)
            )
        elif name == "universal_vertex":
            ok = bool(emap.universal_vertices(emb.graph))
        elif name == "has_handle_site":
            ok = bool(surgery.find_handle_sites(emb, tuple(args[0])))
        elif name == "delete_degree2_face_simple":
            try:
                ok = emap.is_face_simple(surgery.delete_degree2(emb, args[0]))
            except Exception:
                ok = False
        elif name == "double_handle":
            ok = _double_handle_ok(emb, tuple(args[0]), tuple(args[1]))
        else:
            raise SearchError(f"unknown predicate {name!r}")
        if not ok:
            return False
    return True


def _double_handle_ok(emb: Embedding, cycle1, cycle2) -> bool:
    """Some site for cycle1 leaves a usable site for cycle2 after augmenting."""
    for site in surgery.find_handle_sites(emb, cycle1):
        try:
            mid = surgery.handle_augment(emb, site)
        except Exception:
            continue
        if surgery.find_handle_sites(mid, cycle2):
            return True
    return False


@dataclass
class SearchResult:
    status: str  # "found" | "none" | "exhausted"
    embedding: Embedding | None = None
    nodes: int = 0
    seed: int | None = None


class _Budget(Exception):
    pass


class _QuadSearcher:
    """Backtracking search for quadrangular signed rotation systems."""

    def __init__(self, graph: Graph, orientable: bool | None, rng: random.Random | None = None):
        self.graph = graph
        self.orientable = orientable
        self.rng = rng  # when set, branch order is shuffled (search stays exhaustive)
        self.vertices = graph.sorted_vertices()
        self.edges = graph.sorted_edges()
        self.eindex = {e: i for i, e in enumerate(self.edges)}
        self.m = len(self.edges)
        self.ends = [e for e in self.edges]
        self.incident = {v: [self.eindex[e] for e in graph.incident_edges(v)] for v in self.vertices}
        self.deg = {v: len(self.incident[v]) for v in self.vertices}
        # succ/pred per vertex: partial rotation as edge-id -> edge-id links
        self.succ = {v: {} for v in self.vertices}
        self.pred = {v: {} for v in self.vertices}
        self.links = {v: 0 for v in self.vertices}
        self.sign = [0] * self.m  # 0 unknown, else +1/-1
        self._fix_signs()
        self._fix_reflection_vertex()
        self.done = [False] * (4 * self.m)
        self.nodes = 0
        self.budget = None

    # -- symmetry breaking -------------------------------------------------
    def _fix_signs(self):
        if self.orientable is True:
            self.sign = [1] * self.m
            return
        # Spanning-tree edges get sign +1: one representative per switching class.
        root = self.vertices[0]
        seen = {root}
        frontier = [root]
        while frontier:
            nxt = []
            for v in frontier:
                for ei in self.incident[v]:
                    e = self.edges[ei]
                    w = emap.other_end(e, v)
                    if w not in seen:
                        seen.add(w)
                        self.sign[ei] = 1
                        nxt.append(w)
            frontier = nxt

    def _fix_reflection_vertex(self):
        self.refl_v = None
        for v in self.vertices:
            if self.deg[v] >= 3:
                self.refl_v = v
                self.refl_e = min(self.incident[v])
                break

    def _reflection_ok(self, v) -> bool:
        if v != self.refl_v:
            return True
        e0 = self.refl_e
        s = self.succ[v].get(e0)
        p = self.pred[v].get(e0)
        if s is None or p is None:
            return True
        return s < p

    # -- rotation link bookkeeping ----------------------------------------
    def _can_link(self, v, e, f) -> bool:
        if e in self.succ[v] or f in self.pred[v]:
            return False
        if e == f:
            return self.deg[v] == 1
        # walk forward from f: closing back to e is only legal when the
        # link completes the full rotation cycle at v
        cur = f
        steps = 1
        while cur in self.succ[v]:
            cur = self.succ[v][cur]
            steps += 1
        if cur == e and self.links[v] + 1 != self.deg[v]:
            return False
        return True

    def _link(self, v, e, f):
        self.succ[v][e] = f
        self.pred[v][f] = e
        self.links[v] += 1

    def _unlink(self, v, e, f):
        del self.succ[v][e]
        del self.pred[v][f]
        self.links[v] -= 1

    # -- state encoding: (edge id, tail vertex, o) -------------------------
    def _state_id(self, ei, tail_is_hi, o):
        return 4 * ei + 2 * tail_is_hi + (0 if o == 1 else 1)

    def search(self, budget: int | None) -> Iterator[Embedding]:
        self.budget = budget
        yield from self._next_face()

    def _next_face(self):
        start = None
        for s in range(4 * self.m):
            if not self.done[s]:
                start = s
                break
        if start is None:
            yield self._build()
            return
        ei, rest = divmod(start, 4)
        tail_is_hi, oi = divmod(rest, 2)
        e = self.edges[ei]
        tail = e[1] if tail_is_hi else e[0]
        o = 1 if oi == 0 else -1
        yield from self._extend(start, [(ei, tail, o)], [])

    def _trail_undo(self, trail):
        for kind, *args in reversed(trail):
            if kind == "link":
                self._unlink(*args)
            elif kind == "sign":
                self.sign[args[0]] = 0
            else:
                self.done[args[0]] = False

    def _extend(self, start, path, trail):
        self.nodes += 1
        if self.budget is not None and self.nodes > self.budget:
            raise _Budget()
        ei, tail, o = path[-1]
        e = self.edges[ei]
        head = emap.other_end(e, tail)
        closing = len(path) == 4

        sign_options = [self.sign[ei]] if self.sign[ei] != 0 else [1, -1]
        if self.rng is not None and len(sign_options) > 1:
            self.rng.shuffle(sign_options)
        for sg in sign_options:
            o2 = o * sg
            if closing:
                s0_ei, s0_tail, s0_o = path[0]
                if head != s0_tail or o2 != s0_o:
                    continue
                targets = [s0_ei]
            else:
                targets = None
            # corner at head: o2=+1 wants succ(e)=f, o2=-1 wants succ(f)=e
            if o2 == 1:
                forced = self.succ[head].get(ei)
            else:
                forced = self.pred[head].get(ei)
            if forced is not None:
                choices = [forced] if (targets is None or forced in targets) else []
                need_link = False
            else:
                pool = targets if targets is not None else self.incident[head]
                if self.rng is not None and len(pool) > 1:
                    pool = list(pool)
                    self.rng.shuffle(pool)
                choices = pool
                need_link = True
            for fi in choices:
                if need_link:
                    a, b = (ei, fi) if o2 == 1 else (fi, ei)
                    if not self._can_link(head, a, b):
                        continue
                sub = []
                if self.sign[ei] == 0:
                    self.sign[ei] = sg
                    sub.append(("sign", ei))
                if need_link:
                    a, b = (ei, fi) if o2 == 1 else (fi, ei)
                    self._link(head, a, b)
                    sub.append(("link", head, a, b))
                    if not self._reflection_ok(head):
                        self._trail_undo(sub)
                        continue
                if closing:
                    ok = True
                    marks = []
                    for pei, ptail, po in path:
                        pe = self.edges[pei]
                        sid = self._state_id(pei, pe[1] == ptail, po)
                        phead = emap.other_end(pe, ptail)
                        comp = self._state_id(pei, pe[1] == phead, -po * self.sign[pei])
                        if self.done[sid] or self.done[comp]:
                            ok = False
                            break
                        self.done[sid] = True
                        self.done[comp] = True
                        marks.append(sid)
                        marks.append(comp)
                    if ok:
                        trail.extend(sub)
                        for sid in marks:
                            trail.append(("done", sid))
                        sub_trail = []
                        yield from self._next_face()
                        self._trail_undo(sub_trail)
                        for _ in range(len(sub) + len(marks)):
                            trail.pop()
                        for sid in marks:
                            self.done[sid] = False
                        self._trail_undo(sub)
                    else:
                        for sid in marks:
                            self.done[sid] = False
                        self._trail_undo(sub)
                else:
                    nxt_tail = head
                    nxt_state = (fi, nxt_tail, o2)
                    fe = self.edges[fi]
                    sid = self._state_id(fi, fe[1] == nxt_tail, o2)
                    if self.done[sid] or any(
                        p == nxt_state for p in path
                    ):
                        self._trail_undo(sub)
                        continue
                    path.append(nxt_state)
                    trail.extend(sub)
                    yield from self._extend(start, path, trail)
                    for _ in sub:
                        trail.pop()
                    path.pop()
                    self._trail_undo(sub)

    def _build(self) -> Embedding:
        rotation = {}
        for v in self.vertices:
            start = min(self.incident[v])
            cyc = [start]
            cur = start
            while True:
                cur = self.succ[v][cur]
                if cur == start:
                    break
                cyc.append(cur)
            rotation[v] = tuple(self.edges[i] for i in cyc)
        signature = {self.edges[i]: (self.sign[i] if self.sign[i] != 0 else 1) for i in range(self.m)}
        return Embedding(self.graph, rotation, signature)


def search_exact(spec: WitnessSpec, budget: int | None = None) -> SearchResult:
    """First witness for ``spec`` by exhaustive backtracking, or a proof of absence."""
    spec.validate()
    searcher = _QuadSearcher(spec.graph, spec.orientable)
    try:
        for emb in searcher.search(budget):
            if _matches(emb, spec):
                return SearchResult("found", emb, searcher.nodes)
    except _Budget:
        return SearchResult("exhausted", None, searcher.nodes)
    return SearchResult("none", None, searcher.nodes)


def search_randomized(
    spec: WitnessSpec,
    seed: int = 0,
    restarts: int = 512,
    candidates_per_restart: int = 4,
) -> SearchResult:
    """Random-restart exact backtracking: each restart shuffles branch order
    and tests the first few quadrangular candidates against the predicates.

    Deterministic for fixed (spec, seed, restarts); no completeness claim —
    use search_exact for nonexistence proofs.
    """
    spec.validate()
    total = 0
    for r in range(restarts):
        searcher = _QuadSearcher(spec.graph, spec.orientable, random.Random(1_000_003 * seed + r))
        produced = 0
        for emb in searcher.search(None):
            produced += 1
            if _matches(emb, spec):
                return SearchResult("found", emb, total + searcher.nodes, seed=seed)
            if produced >= candidates_per_restart:
                break
        total += searcher.nodes
    return SearchResult("none", None, total, seed=seed)


def _matches(emb: Embedding, spec: WitnessSpec) -> bool:
    if emap.euler_characteristic(emb) != spec.chi:
        return False
    if spec.orientable is not None and emap.is_orientable(emb) != spec.orientable:
        return False
    return check_predicates(emb, spec.predicates)


ENUMERATION_VERTEX_CAP = 8


def enumerate_embeddings(g: Graph, predicates=(), chi: int | None = None,
                         orientable: bool | None = None) -> Iterator[Embedding]:
    """All quadrangular embeddings of g up to switching and reflection, filtered."""
    if len(g.vertices) > ENUMERATION_VERTEX_CAP:
        raise SearchError(f"enumeration is capped at {ENUMERATION_VERTEX_CAP} vertices")
    if len(g.edges) % 2 != 0 or not g.is_connected():
        return
    searcher = _QuadSearcher(g, None)
    for emb in searcher.search(None):
        if chi is not None and emap.euler_characteristic(emb) != chi:
            continue
        if orientable is not None and emap.is_orientable(emb) != orientable:
            continue
        if check_predicates(emb, predicates):
            yield emb


# ---------------------------------------------------------------------------
# Simulated annealing for the large fixed-graph targets.
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CoolingSchedule:
    t_start: float = 2.0
    t_end: float = 0.2
    steps: int = 400_000


class _AnnealState:
    """Signed rotation state with an incrementally maintained successor table.

    Tracing states are encoded as ``s = 4*ei + 2*side + (1 if o < 0 else 0)``
    where ``side`` selects the tail endpoint of edge ``ei``.  ``succ[s]`` is
    the next state of the face walk.  A rotation swap at a vertex only
    invalidates the transitions entering that vertex; a sign flip only the
    four states of that edge — so moves cost O(max degree), and a full energy
    evaluation is a single pass over the flat table.
    """

    def __init__(self, graph: Graph, orientable: bool | None, rng: random.Random):
        self.graph = graph
        self.edges = graph.sorted_edges()
        self.eindex = {e: i for i, e in enumerate(self.edges)}
        self.vertices = graph.sorted_vertices()
        self.rot = {}
        self.pos = {}
        for v in self.vertices:
            ids = [self.eindex[e] for e in graph.incident_edges(v)]
            rng.shuffle(ids)
            self.rot[v] = ids
            self.pos[v] = {ei: i for i, ei in enumerate(ids)}
        self.sign = [1] * len(self.edges)
        self.allow_flip = orientable is not True
        if self.allow_flip:
            for i in range(len(self.edges)):
                if rng.random() < 0.5:
                    self.sign[i] = -1
        self.swappable = [v for v in self.vertices if len(self.rot[v]) >= 3]
        self.succ = [0] * (4 * len(self.edges))
        for s in range(len(self.succ)):
            self.succ[s] = self._compute(s)

    def _compute(self, s: int) -> int:
        ei, rest = divmod(s, 4)
        side, oneg = divmod(rest, 2)
        e = self.edges[ei]
        head = e[1 - side]
        o2 = (-1 if oneg else 1) * self.sign[ei]
        rot = self.rot[head]
        p = self.pos[head][ei]
        fi = rot[(p + o2) % len(rot)]
        fe = self.edges[fi]
        return 4 * fi + (2 if fe[1] == head else 0) + (1 if o2 == -1 else 0)

    def _refresh_vertex(self, v) -> None:
        for ei in self.rot[v]:
            e = self.edges[ei]
            side = 0 if e[1] == v else 1  # tail is the non-v endpoint
            base = 4 * ei + 2 * side
            self.succ[base] = self._compute(base)
            self.succ[base + 1] = self._compute(base + 1)

    def _refresh_edge(self, ei: int) -> None:
        base = 4 * ei
        for s in range(base, base + 4):
            self.succ[s] = self._compute(s)

    def energy(self) -> int:
        succ = self.succ
        seen = bytearray(len(succ))
        total = 0
        for s in range(len(succ)):
            if seen[s]:
                continue
            length = 0
            cur = s
            while not seen[cur]:
                seen[cur] = 1
                length += 1
                cur = succ[cur]
            total += abs(length - 4)
        return total // 2

    def propose(self, rng: random.Random):
        if self.allow_flip and rng.random() < 0.25:
            ei = rng.randrange(len(self.edges))
            self.sign[ei] = -self.sign[ei]
            self._refresh_edge(ei)
            return ("sign", ei)
        v = self.swappable[rng.randrange(len(self.swappable))]
        rot = self.rot[v]
        i = rng.randrange(len(rot))
        j = (i + 1) % len(rot)
        rot[i], rot[j] = rot[j], rot[i]
        self.pos[v][rot[i]] = i
        self.pos[v][rot[j]] = j
        self._refresh_vertex(v)
        return ("swap", v, i, j)

    def undo(self, move) -> None:
        if move[0] == "sign":
            _, ei = move
            self.sign[ei] = -self.sign[ei]
            self._refresh_edge(ei)
        else:
            _, v, i, j = move
            rot = self.rot[v]
            rot[i], rot[j] = rot[j], rot[i]
            self.pos[v][rot[i]] = i
            self.pos[v][rot[j]] = j
            self._refresh_vertex(v)

    def to_embedding(self) -> Embedding:
        rotation = {v: tuple(self.edges[i] for i in self.rot[v]) for v in self.vertices}
        signature = {self.edges[i]: self.sign[i] for i in range(len(self.edges))}
        return Embedding(self.graph, rotation, signature)


def search_anneal(
    spec: WitnessSpec,
    seed: int = 0,
    schedule: CoolingSchedule = CoolingSchedule(),
    restarts: int = 64,
) -> SearchResult:
    """Stochastic witness search; deterministic for fixed (spec, seed, schedule, restarts)."""
    spec.validate()
    for r in range(restarts):
        rng = random.Random(1_000_003 * seed + r)
        found = _anneal_once(spec, rng, schedule)
        if found is not None:
            return SearchResult("found", found, 0, seed=seed)
    return SearchResult("none", None, 0, seed=seed)


def _anneal_once(spec: WitnessSpec, rng: random.Random, schedule: CoolingSchedule):
    state = _AnnealState(spec.graph, spec.orientable, rng)
    energy = state.energy()
    ratio = schedule.t_end / schedule.t_start
    exp = math.exp
    for k in range(schedule.steps):
        if energy == 0:
            candidate = _accept_candidate(state, spec)
            if candidate is not None:
                return candidate
            # an optimum that fails the predicate bundle: kick and keep going
            for _ in range(12):
                state.propose(rng)
            energy = state.energy()
            continue
        temp = schedule.t_start * (ratio ** (k / schedule.steps))
        move = state.propose(rng)
        new_energy = state.energy()
        if new_energy <= energy or rng.random() < exp((energy - new_energy) / temp):
            energy = new_energy
        else:
            state.undo(move)
    if energy == 0:
        return _accept_candidate(state, spec)
    return None


def _accept_candidate(state: _AnnealState, spec: WitnessSpec):
    try:
        emb = state.to_embedding()
        faces = emb.faces()
    except Exception:
        return None
    if not all(len(w) == 4 for w in faces):
        return None
    if not _matches(emb, spec):
        return None
    return emb


# ---------------------------------------------------------------------------
# Minimality sweeps: candidate graphs for face-simple quadrangulations.
# ---------------------------------------------------------------------------

SWEEP_SURFACES = {"sphere": 2, "projective": 1}


def candidate_graphs(n: int, chi: int) -> Iterator[Graph]:
    """Connected graphs on n vertices, up to isomorphism, that could carry a
    face-simple quadrangulation of a surface with the given Euler
    characteristic.

    Quadrangularity forces |E| = 2(n - chi); face-simplicity forces minimum
    degree 3 (a degree-1 edge lies twice on one face, the two faces at a
    degree-2 vertex share two edges).
    """
    from . import graphalg

    m = 2 * (n - chi)
    if m < 0 or m > n * (n - 1) // 2 or 2 * m < 3 * n:
        return
    pairs = list(itertools.combinations(range(n), 2))
    deg = [0] * n
    chosen = []
    slots_left = [n - 1] * n  # upper bound on further incidences per vertex
    reps: list = []

    def feasible(idx: int, picked: int) -> bool:
        if picked + (len(pairs) - idx) < m:
            return False
        for v in range(n):
            remaining = sum(1 for (a, b) in pairs[idx:] if v in (a, b))
            if deg[v] + remaining < 3:
                return False
        return True

    def rec(idx: int, picked: int):
        if picked == m:
            if all(d >= 3 for d in deg):
                g = Graph.from_edges(chosen, vertices=range(n))
                if g.is_connected():
                    yield g
            return
        if idx == len(pairs) or not feasible(idx, picked):
            return
        a, b = pairs[idx]
        chosen.append((a, b))
        deg[a] += 1
        deg[b] += 1
        yield from rec(idx + 1, picked + 1)
        chosen.pop()
        deg[a] -= 1
        deg[b] -= 1
        yield from rec(idx + 1, picked)

    for g in rec(0, 0):
        if not any(graphalg.are_isomorphic(g, h) for h in reps):
            reps.append(g)
            yield g


def sweep_minimal(surface: str, max_n: int) -> dict:
    """For each n <= max_n, the candidate graphs admitting a face-simple
    quadrangulation of the surface; {n: [Graph, ...]}."""
    if surface not in SWEEP_SURFACES:
        raise SearchError(f"unknown surface {surface!r}; choose from {sorted(SWEEP_SURFACES)}")
    chi = SWEEP_SURFACES[surface]
    orientable = surface == "sphere"
    results = {}
    for n in range(4, max_n + 1):
        hits = []
        for g in candidate_graphs(n, chi):
            found = next(
                iter(enumerate_embeddings(g, (("face_simple",),), chi=chi,
                                          orientable=orientable)),
                None,
            )
            if found is not None:
                hits.append(g)
        results[n] = hits
    return results
