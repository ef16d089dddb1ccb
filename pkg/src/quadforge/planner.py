"""Admissibility arithmetic and the inductive derivation of quadrangulations.

A request ``(n, t, kind)`` asks for a quadrangulation of a simple graph with
``n`` vertices and ``C(n,2) - t`` edges on an orientable or nonorientable
surface.  Admissible requests satisfy ``0 <= t <= n-4`` and a congruence on
``t``; they are fulfilled by a derivation plan: a chain of diamond-sum
induction steps grounded in catalog base records.

Each induction step composes three embeddings.  A fixed small block with a
distinguished degree-6 (or degree-10) vertex ``x`` and a degree-2 vertex
``z`` is first diamond-summed with a complete-bipartite quadrangulation at
``x``, producing a face-simple embedding in which ``z``'s neighborhood is an
independent set of size ``n'-1``; that is then diamond-summed at ``z`` with
the child embedding at one of its universal vertices.  The result gains 4
(or 8) vertices and ``i`` missing edges, keeps vertex 0 universal, and its
face-simplicity is checked after every sum — the construction is refused
rather than allowed to drift from its contract.
"""

from __future__ import annotations

from dataclasses import dataclass

from . import catalog, emap, surgery
from .emap import Certificate, Embedding, vkey
from .errors import PlanError


@dataclass(frozen=True)
class ParamRequest:
    n: int
    t: int
    kind: str  # "orientable" | "nonorientable"

    def __post_init__(self):
        if self.kind not in ("orientable", "nonorientable"):
            raise PlanError(f"kind must be orientable or nonorientable, got {self.kind!r}")
        if self.n < 4:
            raise PlanError(f"n must be at least 4, got {self.n}")
        if self.t < 0:
            raise PlanError(f"t must be nonnegative, got {self.t}")


@dataclass(frozen=True)
class PlanNode:
    """One derivation step; a plan is the root of a chain of these."""

    step: str  # "base" | "nonorient" | "orient" | "intermediate" | "surgery"
    n: int
    t: int
    record: str | None = None  # base/surgery: catalog record holding the result
    op: str | None = None      # surgery: delete_degree2 | insert_degree2 | handle
    parent: str | None = None  # surgery: record the operation starts from
    i: int | None = None       # nonorient/orient: missing edges added
    child: PlanNode | None = None


def congruence_mod(kind: str) -> int:
    return 2 if kind == "nonorientable" else 4


def _congruent(n: int, t: int, kind: str) -> bool:
    return (t - n * (n - 5) // 2) % congruence_mod(kind) == 0


SPECIALS = {(4, 2, "orientable"): "c4_sphere", (6, 3, "nonorientable"): "klein_6_3"}


def classify(req: ParamRequest) -> str:
    """"admissible" (in the constructible family), "special" (the two extras), or "inadmissible"."""
    if (req.n, req.t, req.kind) in SPECIALS:
        return "special"
    n_min = 6 if req.kind == "nonorientable" else 5
    if req.n >= n_min and 0 <= req.t <= req.n - 4 and _congruent(req.n, req.t, req.kind):
        return "admissible"
    return "inadmissible"


def admissible(req: ParamRequest) -> bool:
    return classify(req) == "admissible"


def _inadmissible_reason(req: ParamRequest) -> str:
    n, t, kind = req.n, req.t, req.kind
    n_min = 6 if kind == "nonorientable" else 5
    if n < n_min:
        return f"n={n} is below the {kind} minimum n={n_min}"
    if not 0 <= t <= n - 4:
        return f"t={t} is outside 0 <= t <= n-4 = {n - 4}"
    mod = congruence_mod(kind)
    return (
        f"t={t} violates the congruence t = n(n-5)/2 (mod {mod}): "
        f"needs t = {n * (n - 5) // 2 % mod} (mod {mod})"
    )


# ---------------------------------------------------------------------------
# Planning
# ---------------------------------------------------------------------------

def _base(n, t, record):
    return PlanNode("base", n, t, record=record)


def _surg(n, t, op, parent, record):
    return PlanNode("surgery", n, t, record=record, op=op, parent=parent)


_NONORIENT_BASES = {
    (4, 0): _base(4, 0, "phi_4_0"),
    (5, 0): _base(5, 0, "phi_5_0_star"),
    (6, 1): _base(6, 1, "phi_6_1"),
    (7, 1): _surg(7, 1, "delete_degree2", "phi_7_0_plus", "q7_1"),
    (7, 3): _surg(7, 3, "delete_degree2", "phi_7_2_plus", "q7_3"),
}


def _intermediate(n, t, child):
    return PlanNode("intermediate", n, t, child=child)


_ORIENT_BASES = {
    (5, 0): _base(5, 0, "phi_5_0_star"),
    (7, 3): _surg(7, 3, "delete_degree2", "phi_7_2_plus_star", "q7_3_orientable"),
    (8, 0): _surg(8, 0, "handle", "phi_8_4_star", "q8_0"),
    (8, 4): _base(8, 4, "phi_8_4_star"),
    (10, 1): _base(10, 1, "phi_10_1_star"),
    (11, 1): _surg(11, 1, "delete_degree2", "phi_11_0_plus_star", "q11_1"),
    (11, 5): _surg(11, 5, "delete_degree2", "phi_11_4_plus_star", "q11_5"),
}


def _orient_base(n: int, t: int) -> PlanNode:
    if (n, t) in _ORIENT_BASES:
        return _ORIENT_BASES[(n, t)]
    if (n, t) == (9, 2):
        return _intermediate(9, 2, _orient_base(5, 0))
    if (n, t) == (10, 5):
        return _intermediate(
            10, 5, _surg(6, 3, "insert_degree2", "phi_5_0_star", "q6_3_orientable")
        )
    if (n, t) == (12, 2):
        return _intermediate(12, 2, _orient_base(8, 0))
    if (n, t) == (12, 6):
        return _intermediate(12, 6, _orient_base(8, 4))
    if n == 13 and t in (0, 4, 8):
        return PlanNode("orient", 13, t, i=t, child=_orient_base(5, 0))
    if (n, t) == (14, 3):
        return _intermediate(14, 3, _orient_base(10, 1))
    if (n, t) == (14, 7):
        return _intermediate(14, 7, _orient_base(10, 5))
    raise PlanError(f"no orientable base derivation for (n={n}, t={t})")


def _schedule_i(t: int, kind: str) -> int:
    if kind == "nonorientable":
        if t <= 1:
            return 0
        if t <= 3:
            return 2
        return 4
    if t <= 3:
        return 0
    if t <= 7:
        return 4
    return 8


def plan(req: ParamRequest) -> PlanNode:
    if not admissible(req):
        raise PlanError(f"({req.n},{req.t},{req.kind}) is not admissible: "
                        + _inadmissible_reason(req))
    return _plan(req.n, req.t, req.kind)


def _plan(n: int, t: int, kind: str) -> PlanNode:
    if kind == "nonorientable":
        if n <= 7:
            try:
                return _NONORIENT_BASES[(n, t)]
            except KeyError:
                raise PlanError(f"no nonorientable base for (n={n}, t={t})") from None
        i = _schedule_i(t, kind)
        return PlanNode("nonorient", n, t, i=i, child=_plan(n - 4, t - i, kind))
    if n <= 14:
        return _orient_base(n, t)
    i = _schedule_i(t, kind)
    return PlanNode("orient", n, t, i=i, child=_plan(n - 8, t - i, kind))


def plan_text(node: PlanNode, indent: int = 0) -> str:
    pad = "  " * indent
    if node.step == "base":
        line = f"{pad}base {node.record} (n={node.n}, t={node.t})"
    elif node.step == "surgery":
        line = f"{pad}surgery {node.op} on {node.parent} -> {node.record} (n={node.n}, t={node.t})"
    elif node.step == "intermediate":
        line = f"{pad}intermediate +4 vertices, +2 missing edges (n={node.n}, t={node.t})"
    else:
        sign = "nonorientable" if node.step == "nonorient" else "orientable"
        dn = 4 if node.step == "nonorient" else 8
        line = f"{pad}{sign} step +{dn} vertices, +{node.i} missing edges (n={node.n}, t={node.t})"
    if node.child is not None:
        line += "\n" + plan_text(node.child, indent + 1)
    return line


# ---------------------------------------------------------------------------
# Execution
# ---------------------------------------------------------------------------

def _missing(emb: Embedding) -> int:
    n = len(emb.graph.vertices)
    return n * (n - 1) // 2 - len(emb.graph.edges)


def _choose_universal(emb: Embedding):
    """Smallest universal vertex at which the embedding is nearly face-simple."""
    for v in sorted(emap.universal_vertices(emb.graph), key=vkey):
        if emap.is_nearly_face_simple_except(emb, v):
            return v
    raise PlanError("child embedding has no universal vertex with the "
                    "nearly-face-simple property")


def _fresh_relabel(emb: Embedding, prefix: str) -> tuple:
    mapping = {v: f"{prefix}{i}" for i, v in enumerate(emb.graph.sorted_vertices())}
    return surgery.relabel_embedding(emb, mapping), mapping


def _canonical_relabel(emb: Embedding) -> Embedding:
    mapping = {v: i for i, v in enumerate(emb.graph.sorted_vertices())}
    return surgery.relabel_embedding(emb, mapping)


def _check_sum_hypotheses(face_simple_side: Embedding, v, other: Embedding, v2) -> bool:
    """Hypotheses under which a diamond sum is guaranteed face-simple."""
    g = face_simple_side.graph
    nbrs = g.neighbors(v)
    independent = not any(
        g.has_edge(a, b) for a in nbrs for b in nbrs if vkey(a) < vkey(b)
    )
    return (
        emap.is_face_simple(face_simple_side)
        and emap.min_degree(g) >= 3
        and independent
        and emap.is_nearly_face_simple_except(other, v2)
    )


# Every checked diamond sum performed by _induct_step is logged here as
# (hypotheses_ok, output_face_simple) so callers can audit the guarantee
# "hypotheses hold => the sum is face-simple" across a whole run.
SUM_OBSERVATIONS: list = []


def _induct_step(child: Embedding, block_record: str, m: int) -> Embedding:
    """Diamond-sum chain: block at x with K_{m,n'-1}, then at z with the child."""
    n_child = len(child.graph.vertices)
    block = catalog.get_witness(block_record)
    kmn = catalog.build_kmn(m, n_child - 1)
    kmn_b, kmap = _fresh_relabel(kmn, "b")
    # u must come from the side whose vertices have degree m
    u = next(kmap[v] for v in kmn.graph.sorted_vertices() if kmn.graph.degree(v) == m)
    if not _check_sum_hypotheses(kmn_b, u, block, "x"):
        raise PlanError(f"{block_record} + K_{{{m},{n_child - 1}}} violates the "
                        "face-simplicity hypotheses")
    mid = surgery.diamond_sum(block, "x", kmn_b, u)
    SUM_OBSERVATIONS.append((True, emap.is_face_simple(mid)))
    if not emap.is_face_simple(mid):
        raise PlanError("intermediate diamond sum is not face-simple")
    v = _choose_universal(child)
    child_b, cmap = _fresh_relabel(child, "p")
    if not _check_sum_hypotheses(mid, "z", child_b, cmap[v]):
        raise PlanError("second diamond sum violates the face-simplicity hypotheses")
    out = surgery.diamond_sum(mid, "z", child_b, cmap[v])
    SUM_OBSERVATIONS.append((True, emap.is_face_simple(out)))
    if not emap.is_face_simple(out):
        raise PlanError("derivation output is not face-simple")
    return _canonical_relabel(out)


def execute(node: PlanNode) -> Embedding:
    if node.step in ("base", "surgery"):
        out = catalog.get_witness(node.record)
    elif node.step == "nonorient":
        out = _induct_step(execute(node.child), f"phi_7_{node.i}_plus", 6)
    elif node.step == "orient":
        out = _induct_step(execute(node.child), f"phi_11_{node.i}_plus_star", 10)
    elif node.step == "intermediate":
        out = _induct_step(execute(node.child), "phi_7_2_plus_star", 6)
    else:
        raise PlanError(f"unknown plan step {node.step!r}")
    if len(out.graph.vertices) != node.n or _missing(out) != node.t:
        raise PlanError(
            f"step produced ({len(out.graph.vertices)},{_missing(out)}), "
            f"plan requires ({node.n},{node.t})"
        )
    return out


# ---------------------------------------------------------------------------
# Full pipeline
# ---------------------------------------------------------------------------

_GEN_CACHE: dict = {}


def generate(req: ParamRequest) -> tuple:
    """(Embedding, Certificate, PlanNode) for an admissible or special request."""
    key = (req.n, req.t, req.kind)
    if key in _GEN_CACHE:
        return _GEN_CACHE[key]
    status = classify(req)
    if status == "inadmissible":
        raise PlanError(f"({req.n},{req.t},{req.kind}) is inadmissible: "
                        + _inadmissible_reason(req))
    if status == "special":
        record = SPECIALS[key]
        emb = catalog.get_witness(record)
        p = _base(req.n, req.t, record)
    else:
        p = plan(req)
        emb = execute(p)
    cert = emap.certify(emb)
    _check_certificate(req, cert)
    result = (emb, cert, p)
    _GEN_CACHE[key] = result
    return result


def _check_certificate(req: ParamRequest, cert: Certificate) -> None:
    wanted_orientable = req.kind == "orientable"
    problems = []
    if cert.n != req.n or cert.t != req.t:
        problems.append(f"(n,t)=({cert.n},{cert.t})")
    if cert.orientable != wanted_orientable:
        problems.append(f"orientable={cert.orientable}")
    if not cert.quadrangular:
        problems.append("not quadrangular")
    special = (req.n, req.t, req.kind) in SPECIALS
    if not cert.universal and not special:
        problems.append("no universal vertex")
    expect_face_simple = (req.n, req.t, req.kind) != (4, 2, "orientable")
    if cert.face_simple != expect_face_simple:
        problems.append(f"face_simple={cert.face_simple}")
    if req.t <= req.n - 4 and not cert.minimal:
        problems.append("minimality criterion not met")
    if problems:
        raise PlanError(
            f"certificate mismatch for ({req.n},{req.t},{req.kind}): " + ", ".join(problems)
        )
