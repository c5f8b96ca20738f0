"""Exact dimension and span computations over vertex sets.

Vertices live in the (n**4 + n**2)/2-dimensional upper-triangular coordinate
space, but only coordinates that some vertex can make nonzero (all diagonal
cells, plus off-diagonal cells with distinct rows and distinct columns) are
carried in the matrices; identically-zero coordinates never affect a rank.

The vertex classification S_k, the signed-sum identities, S_0 connectivity,
and the span lemmas are all driven by a per-n ``VertexSpace`` cache holding
every vertex as a sparse 0/1 vector plus the 0/1 match matrix used for
batch evaluation of linear forms.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .errors import DimensionMismatchError, QappolyError
from .indexing import EntryKey, Pair, canon_entry, flat_index, pair_from_flat, triangle_dimension
from .inequalities import LinearForm, Qap4Params
from .modrank import (
    DEFAULT_PRIME_COUNT,
    ModularSpanBasis,
    RankReport,
    rank_consensus,
    rank_exact_rational,
)
from .perms import (
    DEFAULT_ENUMERATION_CAP,
    Permutation,
    QapVertex,
    apply_transposition,
    enumerate_permutations,
    vertex_from_permutation,
)


@dataclass(frozen=True)
class MatchPattern:
    """The (i_r, j_r) pairs whose match count classifies a vertex into S_k."""

    pairs: tuple[Pair, ...]

    def __post_init__(self):
        i_vals = [i for i, _ in self.pairs]
        j_vals = [j for _, j in self.pairs]
        if len(set(i_vals)) != len(i_vals) or len(set(j_vals)) != len(j_vals):
            raise QappolyError("pattern pairs need distinct i's and distinct j's")

    @property
    def m(self) -> int:
        return len(self.pairs)

    @classmethod
    def diagonal(cls, m: int) -> "MatchPattern":
        """The canonical pattern i_r = j_r = r."""
        return cls(tuple((r, r) for r in range(1, m + 1)))

    @classmethod
    def from_qap4(cls, params: Qap4Params) -> "MatchPattern":
        return cls(tuple(zip(params.i_set, params.j_set)))


def classify_vertex(sigma: Permutation, pattern: MatchPattern) -> int:
    """Number k of pattern pairs with sigma(i_r) = j_r, i.e. the S_k index."""
    return sum(1 for i, j in pattern.pairs if sigma(i) == j)


# ---------------------------------------------------------------------------
# vertex space cache


@dataclass
class VertexSpace:
    n: int
    perms: list[Permutation]
    index: dict[tuple[int, ...], int]
    coords: list[EntryKey]
    coord_index: dict[EntryKey, int]
    vmatrix: np.ndarray  # (n!, support) int8, one sparse vertex per row
    zt: np.ndarray       # (n*n, n!) int32 match indicators

    def row_of(self, perm: Permutation) -> int:
        return self.index[perm.image]

    def vector_of(self, perm: Permutation) -> np.ndarray:
        return self.vmatrix[self.row_of(perm)]


@lru_cache(maxsize=3)
def vertex_space(n: int, cap: int = DEFAULT_ENUMERATION_CAP) -> VertexSpace:
    perms = list(enumerate_permutations(n, cap=cap))
    index = {p.image: v for v, p in enumerate(perms)}

    coords: list[EntryKey] = [(f, f) for f in range(1, n * n + 1)]
    for f1 in range(1, n * n + 1):
        i1, j1 = pair_from_flat(n, f1)
        for f2 in range(f1 + 1, n * n + 1):
            i2, j2 = pair_from_flat(n, f2)
            if i1 != i2 and j1 != j2:
                coords.append((f1, f2))
    coord_index = {key: pos for pos, key in enumerate(coords)}

    vmatrix = np.zeros((len(perms), len(coords)), dtype=np.int8)
    zt = np.zeros((n * n, len(perms)), dtype=np.int32)
    for v, perm in enumerate(perms):
        flats = [flat_index(n, i, perm(i)) for i in range(1, n + 1)]
        for f in flats:
            vmatrix[v, f - 1] = 1  # diagonal coords sit first, in flat order
            zt[f - 1, v] = 1
        for fa, fb in itertools.combinations(flats, 2):
            vmatrix[v, coord_index[canon_entry(fa, fb)]] = 1
    return VertexSpace(n=n, perms=perms, index=index, coords=coords,
                       coord_index=coord_index, vmatrix=vmatrix, zt=zt)


def _as_permutation(v) -> Permutation:
    if isinstance(v, Permutation):
        return v
    if isinstance(v, QapVertex):
        return v.source_permutation
    raise QappolyError(f"expected a vertex or permutation, got {type(v).__name__}")


def _vertex_rows(vertices, space: VertexSpace) -> tuple[list[Permutation], np.ndarray]:
    perms = [_as_permutation(v) for v in vertices]
    if any(p.n != space.n for p in perms):
        raise DimensionMismatchError("all vertices must share the same n")
    rows = np.array([space.row_of(p) for p in perms], dtype=np.int64)
    return perms, rows


# ---------------------------------------------------------------------------
# affine dimension and facet verification


def affine_dim(vertices, prime_count: int = DEFAULT_PRIME_COUNT,
               workers: int = 1, certify: bool = False) -> RankReport:
    """Affine dimension of a vertex set, exactly.

    Differences are taken against the vertex of the lexicographically
    smallest permutation in the set; the report's consensus_rank is the
    affine dimension.  With certify=True a Fraction-based rational
    elimination must agree with the modular consensus.
    """
    vertices = list(vertices)
    if not vertices:
        raise QappolyError("affine_dim of an empty vertex set")
    n = _as_permutation(vertices[0]).n
    space = vertex_space(n)
    perms, rows = _vertex_rows(vertices, space)
    base_row = space.row_of(min(perms))
    diffs = space.vmatrix[rows].astype(np.int64) - space.vmatrix[base_row].astype(np.int64)
    report = rank_consensus(diffs, prime_count=prime_count,
                            column_dimension=triangle_dimension(n), workers=workers)
    if certify and report.consensus_rank is not None:
        exact = rank_exact_rational(diffs)
        if exact != report.consensus_rank:
            report.status = "certification mismatch"
            report.consensus_rank = None
        else:
            report.status = "ok (certified over Q)"
    return report


@lru_cache(maxsize=4)
def polytope_affine_dim(n: int, prime_count: int = DEFAULT_PRIME_COUNT,
                        workers: int = 1) -> RankReport:
    """Affine dimension of the whole polytope at size n (cached; this is the
    expensive full-vertex-set rank)."""
    space = vertex_space(n)
    return affine_dim(space.perms, prime_count=prime_count, workers=workers)


@dataclass
class FacetReport:
    verdict: str                # "facet" or "not facet"
    n: int
    tight_count: int
    polytope_dim: int
    tight_dim: int              # -1 for an empty tight set
    polytope_rank: RankReport
    tight_rank: RankReport | None


def verify_facet(form: LinearForm, n: int, prime_count: int = DEFAULT_PRIME_COUNT,
                 workers: int = 1, certify: bool = False) -> FacetReport:
    """Decide facet-ness: valid everywhere and the tight vertices span an
    affine subspace of dimension exactly one less than the polytope's."""
    if form.n != n:
        raise DimensionMismatchError(f"form has n={form.n}, expected {n}")
    space = vertex_space(n)
    slack = form.scaled_slack_on_match_rows(space.zt)
    bad = np.nonzero(slack < 0)[0]
    if bad.size:
        sigma = space.perms[int(bad[0])]
        raise QappolyError(
            f"form is not valid: violated by sigma = {sigma.one_line()}")
    full = polytope_affine_dim(n, prime_count=prime_count, workers=workers)
    if certify:
        # re-run the full set with rational certification
        full = affine_dim(space.perms, prime_count=prime_count,
                          workers=workers, certify=True)
    tight_rows = np.nonzero(slack == 0)[0]
    if tight_rows.size == 0:
        return FacetReport(verdict="not facet", n=n, tight_count=0,
                           polytope_dim=int(full.consensus_rank), tight_dim=-1,
                           polytope_rank=full, tight_rank=None)
    tight = [space.perms[int(r)] for r in tight_rows]
    tight_report = affine_dim(tight, prime_count=prime_count, workers=workers,
                              certify=certify)
    verdict = ("facet"
               if tight_report.consensus_rank == full.consensus_rank - 1
               else "not facet")
    return FacetReport(verdict=verdict, n=n, tight_count=len(tight),
                       polytope_dim=int(full.consensus_rank),
                       tight_dim=int(tight_report.consensus_rank),
                       polytope_rank=full, tight_rank=tight_report)


@dataclass
class EqualitySetReport:
    n: int
    m: int
    ok: bool
    tight_count: int
    sizes_by_k: dict[int, int]
    mismatches: list[str] = field(default_factory=list)


def check_equality_set(form: LinearForm, n: int) -> EqualitySetReport:
    """Exhaustively confirm: a vertex is tight for the qap4 form exactly
    when its pattern match count is 1 or 2."""
    if not isinstance(form.params, Qap4Params):
        raise QappolyError("equality-set check expects a qap4-built form")
    pattern = MatchPattern.from_qap4(form.params)
    space = vertex_space(n)
    slack = form.scaled_slack_on_match_rows(space.zt)
    pattern_rows = [flat_index(n, i, j) - 1 for i, j in pattern.pairs]
    k_of = np.zeros(len(space.perms), dtype=np.int64)
    for r in pattern_rows:
        k_of += space.zt[r]
    sizes = {int(k): int((k_of == k).sum()) for k in range(pattern.m + 1)}
    tight = slack == 0
    in_s1_s2 = (k_of == 1) | (k_of == 2)
    mismatch_rows = np.nonzero(tight != in_s1_s2)[0]
    mismatches = [space.perms[int(r)].one_line() for r in mismatch_rows[:5]]
    return EqualitySetReport(n=n, m=pattern.m, ok=mismatch_rows.size == 0,
                             tight_count=int(tight.sum()), sizes_by_k=sizes,
                             mismatches=mismatches)


# ---------------------------------------------------------------------------
# signed-sum identities


@dataclass
class Identity1Report:
    is_zero: bool
    disagreement_indices: tuple[int, ...]
    term_count: int
    nonzero_entries: dict


def make_identity1_family(base: Permutation, k1: int, k2: int, k3: int) -> list[Permutation]:
    """The six permutations arranging base's values at positions k1,k2,k3
    in every possible way, identical elsewhere."""
    positions = (k1, k2, k3)
    values = tuple(base(p) for p in positions)
    out = []
    for arranged in itertools.permutations(values):
        img = list(base.image)
        for pos, val in zip(positions, arranged):
            img[pos - 1] = val
        out.append(Permutation(tuple(img)))
    return out


def check_identity1(sigmas, x: int, y: int) -> Identity1Report:
    """Verify that the 12-term signed sum of vertices vanishes entrywise.

    The six input permutations must agree outside three common indices;
    their transpositions at (x, y) supply the other six terms, and each
    term is weighted by the permutation's parity.
    """
    sigmas = list(sigmas)
    if len(sigmas) != 6:
        raise QappolyError(f"identity needs exactly 6 permutations, got {len(sigmas)}")
    n = sigmas[0].n
    if any(s.n != n for s in sigmas):
        raise DimensionMismatchError("permutations have mixed sizes")
    if len({s.image for s in sigmas}) != 6:
        raise QappolyError("the six permutations must be pairwise distinct")
    disagree = tuple(i for i in range(1, n + 1)
                     if len({s(i) for s in sigmas}) > 1)
    if len(disagree) != 3:
        raise QappolyError(
            f"permutations must agree outside exactly three indices, "
            f"found disagreement at {disagree}")
    if x == y or x in disagree or y in disagree or not (1 <= x <= n and 1 <= y <= n):
        raise QappolyError(
            f"transposition indices ({x},{y}) must be distinct, in range, and "
            f"disjoint from the disagreement indices {disagree}")
    total: dict[EntryKey, int] = {}
    family = sigmas + [apply_transposition(s, x, y) for s in sigmas]
    for sigma in family:
        sign = sigma.sign()
        for key in vertex_from_permutation(sigma).entries:
            total[key] = total.get(key, 0) + sign
    nonzero = {k: v for k, v in total.items() if v != 0}
    return Identity1Report(is_zero=not nonzero, disagreement_indices=disagree,
                           term_count=len(family), nonzero_entries=nonzero)


@dataclass
class Identity2Report:
    nonzero_count: int          # over the full symmetric matrix
    plus_count: int
    minus_count: int
    affected_entries: tuple     # canonical ((a,b),(x,y)) index pairs
    affected_flats: tuple


def make_identity2_chain(sigma1: Permutation, i: int, j: int,
                         ip: int, jp: int) -> tuple[Permutation, ...]:
    s2 = apply_transposition(sigma1, i, j)
    s3 = apply_transposition(s2, ip, jp)
    s4 = apply_transposition(s3, i, j)
    return sigma1, s2, s3, s4


def check_identity2(s1: Permutation, s2: Permutation, s3: Permutation,
                    s4: Permutation, i: int, j: int, ip: int, jp: int) -> Identity2Report:
    """Census of (P(s1) - P(s2)) - (P(s4) - P(s3)).

    The chain must be s2 = s1 swapped at (i,j), s3 = s2 swapped at (i',j'),
    s4 = s3 swapped at (i,j), with {i',j'} disjoint from {i,j}; then the
    difference has a nonzero pattern independent of n.
    """
    n = s1.n
    if i == j or ip == jp or {ip, jp} & {i, j}:
        raise QappolyError(
            f"need distinct swap positions with {{i',j'}} disjoint from {{i,j}}; "
            f"got ({i},{j}) and ({ip},{jp})")
    if s2 != apply_transposition(s1, i, j) or \
       s3 != apply_transposition(s2, ip, jp) or \
       s4 != apply_transposition(s3, i, j):
        raise QappolyError("permutation chain does not follow the required swaps")
    total: dict[EntryKey, int] = {}
    for sigma, sign in ((s1, 1), (s2, -1), (s3, 1), (s4, -1)):
        for key in vertex_from_permutation(sigma).entries:
            total[key] = total.get(key, 0) + sign
    nonzero = {k: v for k, v in total.items() if v != 0}
    plus = minus = count = 0
    for (f1, f2), v in nonzero.items():
        weight = 1 if f1 == f2 else 2  # both orientations of the full matrix
        count += weight
        if v > 0:
            plus += weight
        else:
            minus += weight
    affected = tuple(sorted(
        (pair_from_flat(n, f1), pair_from_flat(n, f2)) for f1, f2 in nonzero))
    return Identity2Report(nonzero_count=count, plus_count=plus, minus_count=minus,
                           affected_entries=affected,
                           affected_flats=tuple(sorted(nonzero)))


# ---------------------------------------------------------------------------
# S_0 connectivity


@dataclass
class S0ConnectivityReport:
    n: int
    pattern: MatchPattern
    size: int
    component_count: int
    connected: bool
    status: str  # "ok" or "vacuous"


def check_s0_connectivity(n: int, pattern: MatchPattern,
                          cap: int = DEFAULT_ENUMERATION_CAP) -> S0ConnectivityReport:
    """Connectivity of the graph on S_0 whose edges join permutations one
    transposition apart (with both endpoints avoiding every pattern pair)."""
    members = [p for p in enumerate_permutations(n, cap=cap)
               if classify_vertex(p, pattern) == 0]
    if not members:
        return S0ConnectivityReport(n=n, pattern=pattern, size=0,
                                    component_count=0, connected=False,
                                    status="vacuous")
    member_index = {p.image: idx for idx, p in enumerate(members)}
    parent = list(range(len(members)))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for idx, p in enumerate(members):
        for x, y in itertools.combinations(range(1, n + 1), 2):
            img = list(p.image)
            img[x - 1], img[y - 1] = img[y - 1], img[x - 1]
            other = member_index.get(tuple(img))
            if other is not None:
                ra, rb = find(idx), find(other)
                if ra != rb:
                    parent[ra] = rb
    components = len({find(idx) for idx in range(len(members))})
    return S0ConnectivityReport(n=n, pattern=pattern, size=len(members),
                                component_count=components,
                                connected=components == 1, status="ok")


# ---------------------------------------------------------------------------
# span membership and the span lemmas


@dataclass
class SpanReport:
    member: bool
    votes: dict[int, bool]
    generator_count: int


def check_span_membership(target, generators, prime_count: int = DEFAULT_PRIME_COUNT,
                          workers: int = 1) -> SpanReport:
    """Exact linear-span membership by modular consensus.

    Equivalent to comparing rank(G) with rank(G + {target}): the target is
    reduced against an echelon basis of the generators at each prime and
    membership requires a unanimous vote.
    """
    generators = list(generators)
    if not generators:
        raise QappolyError("span membership needs at least one generator")
    n = _as_permutation(generators[0]).n
    space = vertex_space(n)
    _, rows = _vertex_rows(generators, space)
    basis = ModularSpanBasis(space.vmatrix[rows].astype(np.int64),
                             prime_count=prime_count, workers=workers)
    if isinstance(target, np.ndarray):
        vec = target
    else:
        tp = _as_permutation(target)
        if tp.n != n:
            raise DimensionMismatchError("target and generators have mixed sizes")
        vec = space.vector_of(tp).astype(np.int64)
    member, votes = basis.contains(vec)
    return SpanReport(member=member, votes=votes, generator_count=len(generators))


def s_k_sets(n: int, pattern: MatchPattern,
             cap: int = DEFAULT_ENUMERATION_CAP) -> dict[int, list[Permutation]]:
    """Partition of all permutations by pattern match count."""
    sets: dict[int, list[Permutation]] = {k: [] for k in range(pattern.m + 1)}
    for p in enumerate_permutations(n, cap=cap):
        sets[classify_vertex(p, pattern)].append(p)
    return sets


@dataclass
class SpanLemmaReport:
    lemma: str
    n: int
    samples: int
    member_count: int
    all_member: bool
    seed: int
    details: dict = field(default_factory=dict)


def _span_basis_for(space: VertexSpace, perms, prime_count: int,
                    workers: int) -> ModularSpanBasis:
    rows = np.array([space.row_of(p) for p in perms], dtype=np.int64)
    return ModularSpanBasis(space.vmatrix[rows].astype(np.int64),
                            prime_count=prime_count, workers=workers)


def verify_skasnxt4(n: int, pattern: MatchPattern | None = None, samples: int = 200,
                    seed: int = 0, prime_count: int = DEFAULT_PRIME_COUNT,
                    workers: int = 1) -> SpanLemmaReport:
    """Sampled check: every vertex in S_k (k >= 4) lies in the span of
    S_{k-1} .. S_{k-4}."""
    pattern = pattern or MatchPattern.diagonal(n)
    rng = random.Random(seed)
    space = vertex_space(n)
    sets = s_k_sets(n, pattern)
    ks = [k for k in range(4, pattern.m + 1) if sets[k]]
    bases = {}
    member_count = 0
    per_k: dict[int, int] = {k: 0 for k in ks}
    for s in range(samples):
        k = ks[s % len(ks)]
        if k not in bases:
            gens = [p for kk in (k - 1, k - 2, k - 3, k - 4) for p in sets[kk]]
            bases[k] = _span_basis_for(space, gens, prime_count, workers)
        target = rng.choice(sets[k])
        member, _ = bases[k].contains(space.vector_of(target).astype(np.int64))
        member_count += member
        per_k[k] += 1
    return SpanLemmaReport(lemma="s_k in span of the four sets below", n=n,
                           samples=samples, member_count=member_count,
                           all_member=member_count == samples, seed=seed,
                           details={"samples_per_k": per_k})


def verify_s3ss0(n: int, pattern: MatchPattern | None = None, samples: int = 200,
                 seed: int = 0, prime_count: int = DEFAULT_PRIME_COUNT,
                 workers: int = 1) -> SpanLemmaReport:
    """Sampled check: every vertex in S_3 lies in span(S_1, S_2, S_0)."""
    pattern = pattern or MatchPattern.diagonal(n)
    rng = random.Random(seed)
    space = vertex_space(n)
    sets = s_k_sets(n, pattern)
    gens = sets[1] + sets[2] + sets[0]
    basis = _span_basis_for(space, gens, prime_count, workers)
    member_count = 0
    for _ in range(samples):
        target = rng.choice(sets[3])
        member, _ = basis.contains(space.vector_of(target).astype(np.int64))
        member_count += member
    return SpanLemmaReport(lemma="s_3 in span of S, S_0", n=n, samples=samples,
                           member_count=member_count,
                           all_member=member_count == samples, seed=seed)


def verify_szeroins(n: int, pattern: MatchPattern | None = None, samples: int = 200,
                    seed: int = 0, prime_count: int = DEFAULT_PRIME_COUNT,
                    workers: int = 1) -> SpanLemmaReport:
    """Sampled check: differences of S_0 neighbors (one transposition apart,
    both in S_0) lie in span(S_1, S_2); the pattern needs m >= 7."""
    pattern = pattern or MatchPattern.diagonal(n)
    rng = random.Random(seed)
    space = vertex_space(n)
    sets = s_k_sets(n, pattern)
    basis = _span_basis_for(space, sets[1] + sets[2], prime_count, workers)
    member_count = 0
    pairs_seen = 0
    while pairs_seen < samples:
        sigma = rng.choice(sets[0])
        neighbors = []
        for x, y in itertools.combinations(range(1, n + 1), 2):
            other = apply_transposition(sigma, x, y)
            if classify_vertex(other, pattern) == 0:
                neighbors.append(other)
        if not neighbors:
            continue
        other = rng.choice(neighbors)
        diff = space.vector_of(sigma).astype(np.int64) - \
            space.vector_of(other).astype(np.int64)
        member, _ = basis.contains(diff)
        member_count += member
        pairs_seen += 1
    return SpanLemmaReport(lemma="S_0 neighbor differences in span(S)", n=n,
                           samples=samples, member_count=member_count,
                           all_member=member_count == samples, seed=seed)
