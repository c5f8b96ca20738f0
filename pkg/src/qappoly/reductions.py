"""Max-clique membership reductions and the brute-force membership oracle.

Each reduction turns a graph into a rational candidate point whose
membership in one inequality family's relaxation encodes a clique-number
threshold; sweeping the threshold parameter t and watching where the point
becomes feasible recovers the clique number, which is cross-checked against
an independent exact branch-and-bound solver.

Membership itself is decided by brute force: the point is evaluated against
every enumerated form of the family with exact integer arithmetic (the
point is denominator-cleared first).  Forms are compiled into flat
coordinate/coefficient arrays in enumeration order, in chunks, so verdicts
are fast and the first violated form (lowest form id) is the witness.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .errors import InvalidParameterError, QappolyError
from .graphs import (
    Graph,
    cliques_of_size_at_least,
    max_clique_capped,
)
from .indexing import pair_from_flat, triangle_position
from .inequalities import (
    MEMBERSHIP_FAMILIES,
    LinearForm,
    YPoint,
    enumerate_family,
    evaluate,
    family_form_at,
)
from .perms import DEFAULT_ENUMERATION_CAP

_SENSE = {"qap1": "<=", "qap2": "<=", "qap3": ">=", "qap4": "<="}


# ---------------------------------------------------------------------------
# reduction points


def build_point_qap1(graph: Graph, k: int, l: int, t: int) -> YPoint:
    """Candidate point for the qap1 relaxation.

    Built over the n-partite expansion of the graph (vertices (i, j),
    edges exactly between partitions joined in the input graph), with the
    designated cell (k, l) getting diagonal value t and every other
    diagonal n**2.  The point is left unscaled: the qap1 family has
    right-hand side 0, so feasibility is invariant under positive scaling.
    """
    n = graph.n
    if t < 2:
        raise InvalidParameterError(f"t >= 2 required, got {t}")
    if n < 6:
        raise InvalidParameterError(f"family requires n >= 6, got {n}")
    if not (1 <= k <= n and 1 <= l <= n):
        raise InvalidParameterError(f"(k,l)=({k},{l}) out of range")
    values: dict[tuple[int, int], Fraction] = {}
    nn = n * n
    for f1 in range(1, nn + 1):
        i1, j1 = pair_from_flat(n, f1)
        for f2 in range(f1, nn + 1):
            i2, j2 = pair_from_flat(n, f2)
            if f1 == f2:
                v = t if (i1, j1) == (k, l) else nn
            elif (i1, j1) == (k, l) or (i2, j2) == (k, l):
                # cross entries against the special cell: 1 when both the
                # row and the column differ, unspecified cases default to 0
                oi, oj = (i2, j2) if (i1, j1) == (k, l) else (i1, j1)
                v = 1 if (oi != k and oj != l) else 0
            else:
                v = 0 if graph.has_edge(i1, i2) else n  # no within-partition edges
            if v:
                values[(f1, f2)] = Fraction(v)
    return YPoint(n=n, values=values,
                  provenance={"reduction": "qap1", "k": k, "l": l, "t": t,
                              "scale": "unscaled; any positive multiple is equivalent"})


def build_point_qap2(graph: Graph, t: int) -> YPoint:
    """Candidate point for the qap2 relaxation: diagonal 1/t on column 1,
    n**2 across non-edges, 0 elsewhere."""
    n = graph.n
    if not (1 <= t <= n - 4):
        raise InvalidParameterError(f"1 <= t <= n-4 required, got t={t} at n={n}")
    values: dict[tuple[int, int], Fraction] = {}
    nn = n * n
    for f1 in range(1, nn + 1):
        i1, j1 = pair_from_flat(n, f1)
        for f2 in range(f1, nn + 1):
            i2, j2 = pair_from_flat(n, f2)
            if i1 != i2:
                if not graph.has_edge(i1, i2):
                    values[(f1, f2)] = Fraction(nn)
            elif f1 == f2 and j1 == 1:
                values[(f1, f2)] = Fraction(1, t)
    return YPoint(n=n, values=values, provenance={"reduction": "qap2", "t": t})


def build_point_qap4(graph: Graph, t: int) -> YPoint:
    """Candidate point for the qap4 relaxation: diagonal 1/t, n/6 across
    non-edges, 0 elsewhere."""
    n = graph.n
    if t < 6:
        raise InvalidParameterError(f"t >= 6 is a natural number, got {t}")
    if n < 7:
        raise InvalidParameterError(f"family requires n >= 7, got {n}")
    values: dict[tuple[int, int], Fraction] = {}
    nn = n * n
    for f1 in range(1, nn + 1):
        i1, j1 = pair_from_flat(n, f1)
        for f2 in range(f1, nn + 1):
            i2, j2 = pair_from_flat(n, f2)
            if i1 != i2:
                if not graph.has_edge(i1, i2):
                    values[(f1, f2)] = Fraction(n, 6)
            elif f1 == f2:
                values[(f1, f2)] = Fraction(1, t)
    return YPoint(n=n, values=values, provenance={"reduction": "qap4", "t": t})


# ---------------------------------------------------------------------------
# compiled membership sweeps


@dataclass
class _Chunk:
    start: int              # global id of the first form in this chunk
    coords: np.ndarray      # int64 triangle positions, concatenated
    coeffs: np.ndarray      # int64 coefficients, concatenated
    offsets: np.ndarray     # int64 segment starts into coords (len = forms)
    rhs: np.ndarray         # int64 per form


_sweep_cache: dict[tuple[str, int], list[_Chunk]] = {}
_CACHE_ENTRY_BUDGET = 30_000_000


def _compiled_chunks(family: str, n: int, cap: int, chunk_forms: int = 50000):
    """Yield compiled chunks of the family's enumeration, caching them when
    the total size stays within budget."""
    key = (family, n)
    if key in _sweep_cache:
        yield from _sweep_cache[key]
        return
    collecting: list[_Chunk] | None = []
    total_entries = 0

    coords: list[int] = []
    coeffs: list[int] = []
    offsets: list[int] = []
    rhs: list[int] = []
    start = 0

    def flush(start_idx: int) -> _Chunk:
        piece = _Chunk(start=start_idx,
                       coords=np.array(coords, dtype=np.int64),
                       coeffs=np.array(coeffs, dtype=np.int64),
                       offsets=np.array(offsets, dtype=np.int64),
                       rhs=np.array(rhs, dtype=np.int64))
        coords.clear()
        coeffs.clear()
        offsets.clear()
        rhs.clear()
        return piece

    count = 0
    for form in enumerate_family(n, family, cap=cap):
        offsets.append(len(coords))
        rhs.append(form.rhs)
        for (f1, f2), c in form.coefficient_items():
            coords.append(triangle_position(n, f1, f2))
            coeffs.append(c)
        count += 1
        if count - start == chunk_forms:
            piece = flush(start)
            total_entries += piece.coords.size
            if collecting is not None:
                if total_entries <= _CACHE_ENTRY_BUDGET:
                    collecting.append(piece)
                else:
                    collecting = None  # too big to keep; stream on later calls
            yield piece
            start = count
    if count > start:
        piece = flush(start)
        total_entries += piece.coords.size
        if collecting is not None and total_entries <= _CACHE_ENTRY_BUDGET:
            collecting.append(piece)
        else:
            collecting = None
        yield piece
    if collecting is not None:
        _sweep_cache[key] = collecting


@dataclass
class MembershipVerdict:
    member: bool
    family: str
    n: int
    forms_checked: int
    witness: LinearForm | None = None
    witness_index: int | None = None

    def __bool__(self) -> bool:
        return self.member


def brute_force_membership(point: YPoint, family: str,
                           cap: int = DEFAULT_ENUMERATION_CAP) -> MembershipVerdict:
    """Evaluate a point against every enumerated form of the family.

    Exact throughout: the point is cleared to integers and each form's
    integer coefficients are applied once.  On violation the first violated
    form in enumeration order is rematerialized as the witness and
    re-confirmed by the generic evaluator.
    """
    if family not in MEMBERSHIP_FAMILIES:
        raise InvalidParameterError(
            f"membership supports {MEMBERSHIP_FAMILIES}, got {family!r}")
    n = point.n
    yvec, denom = point.to_scaled_vector()
    sense = _SENSE[family]
    checked = 0
    for piece in _compiled_chunks(family, n, cap):
        vals = piece.coeffs * yvec[piece.coords]
        lhs = np.add.reduceat(vals, piece.offsets) if piece.offsets.size else np.array([])
        bound = denom * piece.rhs
        violated = lhs > bound if sense == "<=" else lhs < bound
        checked += piece.rhs.size
        hits = np.nonzero(violated)[0]
        if hits.size:
            idx = piece.start + int(hits[0])
            witness = family_form_at(n, family, idx, cap=cap)
            result = evaluate(witness, point)
            if result.satisfied:
                raise QappolyError("internal: witness re-evaluation disagrees")
            return MembershipVerdict(member=False, family=family, n=n,
                                     forms_checked=checked, witness=witness,
                                     witness_index=idx)
    return MembershipVerdict(member=True, family=family, n=n, forms_checked=checked)


# ---------------------------------------------------------------------------
# clique extraction through the membership oracle


@dataclass
class OracleReport:
    family: str
    n: int
    clique_size: int
    mode: str
    queries: list[tuple] = field(default_factory=list)  # (params, member)


def _sweep_qap1(graph: Graph, cap: int) -> OracleReport:
    n = graph.n
    if n < 6:
        raise InvalidParameterError(f"qap1 reduction requires n >= 6, got {n}")
    if graph.is_complete():
        raise InvalidParameterError(
            "qap1 extraction excludes the complete graph (any graph except K_n)")
    queries: list[tuple] = []
    if not graph.edges:
        return OracleReport(family="qap1", n=n, clique_size=1,
                            mode="direct edge test (no edges)", queries=queries)
    best = 2
    for k in range(1, n + 1):
        for t in range(2, n + 1):
            member = brute_force_membership(
                build_point_qap1(graph, k, 1, t), "qap1", cap=cap).member
            queries.append(((k, 1, t), member))
            if member:
                best = max(best, t)
                break
        else:
            raise QappolyError("internal: qap1 sweep found no feasible t")
    return OracleReport(family="qap1", n=n, clique_size=best,
                        mode="t-sweep over k with edge-test floor", queries=queries)


def _sweep_qap2(graph: Graph, cap: int) -> OracleReport:
    n = graph.n
    if n < 5:
        raise InvalidParameterError(
            f"qap2 reduction needs a nonempty t range 1..n-4, got n={n}")
    queries: list[tuple] = []
    # cliques of size >= n-3 are invisible to the family's size conditions;
    # the direct subset check over the O(n^3) largest subsets covers them
    top = cliques_of_size_at_least(graph, n - 3)
    if top is not None:
        return OracleReport(family="qap2", n=n, clique_size=top,
                            mode="direct subset check (sizes >= n-3)",
                            queries=queries)
    for t in range(1, n - 3):
        member = brute_force_membership(
            build_point_qap2(graph, t), "qap2", cap=cap).member
        queries.append((t, member))
        if member:
            if t >= 3:
                return OracleReport(family="qap2", n=n, clique_size=t,
                                    mode="t-sweep", queries=queries)
            size = 2 if graph.edges else 1
            return OracleReport(family="qap2", n=n, clique_size=size,
                                mode=f"edge test below the sweep floor (t*={t})",
                                queries=queries)
    raise QappolyError("internal: qap2 sweep found no feasible t")


def _sweep_qap4(graph: Graph, cap: int) -> OracleReport:
    n = graph.n
    if n < 7:
        raise InvalidParameterError(f"qap4 reduction requires n >= 7, got {n}")
    queries: list[tuple] = []
    member = brute_force_membership(build_point_qap4(graph, 6), "qap4", cap=cap).member
    queries.append((6, member))
    if member:
        # feasibility at t=6 certifies omega <= 6; small cliques are found
        # directly in polynomial time
        return OracleReport(family="qap4", n=n,
                            clique_size=max_clique_capped(graph, 6),
                            mode="direct search after feasible t=6",
                            queries=queries)
    for t in range(7, n + 1):
        member = brute_force_membership(
            build_point_qap4(graph, t), "qap4", cap=cap).member
        queries.append((t, member))
        if member:
            return OracleReport(family="qap4", n=n, clique_size=t,
                                mode="t-sweep", queries=queries)
    raise QappolyError("internal: qap4 sweep found no feasible t")


def clique_via_membership_oracle(graph: Graph, family: str,
                                 cap: int = DEFAULT_ENUMERATION_CAP) -> OracleReport:
    """Clique number computed purely through reduction points and membership
    sweeps, following each construction's extraction procedure."""
    if family == "qap1":
        return _sweep_qap1(graph, cap)
    if family == "qap2":
        return _sweep_qap2(graph, cap)
    if family == "qap4":
        return _sweep_qap4(graph, cap)
    raise InvalidParameterError(
        f"clique extraction exists for qap1, qap2, qap4; got {family!r}")


# ---------------------------------------------------------------------------
# expanded-graph helpers (used to cross-check the qap1 construction)


def expanded_graph_qap1(graph: Graph, k: int, l: int) -> Graph:
    """The n-partite expansion with the extra edges attached to cell (k, l):
    vertices are cells (i, j) labelled by flat index, edges join cells in
    graph-adjacent partitions, and (k, l) is joined to every cell outside
    partition k."""
    n = graph.n
    nn = n * n
    edges = []
    for f1 in range(1, nn + 1):
        i1, _ = pair_from_flat(n, f1)
        for f2 in range(f1 + 1, nn + 1):
            i2, _ = pair_from_flat(n, f2)
            if i1 != i2 and graph.has_edge(i1, i2):
                edges.append((f1, f2))
    klf = (k - 1) * n + l
    for f in range(1, nn + 1):
        i, _ = pair_from_flat(n, f)
        if i != k:
            edges.append((min(klf, f), max(klf, f)))
    return Graph.from_edges(nn, edges)


def neighborhood_clique_number(graph: Graph, k: int, l: int) -> int:
    """Largest clique inside the neighborhood of cell (k, l) in the expanded
    graph; the qap1 point is feasible exactly when this is at most t."""
    from .graphs import max_clique_bruteforce

    expanded = expanded_graph_qap1(graph, k, l)
    adj = expanded.adjacency()
    klf = (k - 1) * graph.n + l
    hood = sorted(adj[klf])
    induced = expanded.induced(hood)
    size, _ = max_clique_bruteforce(induced, cap=graph.n * graph.n)
    return size
