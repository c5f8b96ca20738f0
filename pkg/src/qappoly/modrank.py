"""Exact rank computation via modular arithmetic at several large primes.

Ranks over Q are established by row reduction modulo independent 31-bit
primes: the rank mod p never exceeds the rational rank and equals it for
all but finitely many primes, so agreement across >= 3 primes from the
vetted pool is taken as the exact answer (escalating to 5 primes on any
disagreement, which has never been observed for these 0/+-1 matrices).
A Fraction-based rational elimination is available for certification runs;
it is exact but far slower.

All primes are below 2**31 so products of two residues fit in int64.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .errors import QappolyError

# Verified primes just below 2**31 (all > 2**30).
PRIME_POOL = (
    2147483647, 2147483629, 2147483587, 2147483579, 2147483563,
    2147483549, 2147483543, 2147483497, 2147483489, 2147483477,
)
DEFAULT_PRIME_COUNT = 3
ESCALATED_PRIME_COUNT = 5


@dataclass
class RankReport:
    """Outcome of a multi-prime rank computation.

    ``consensus_rank`` is set only when every prime agrees; otherwise the
    status is "inconclusive" and ``retry_primes`` suggests the next primes
    to try.
    """

    row_count: int
    column_dimension: int
    ranks: list[tuple[int, int]] = field(default_factory=list)  # (prime, rank)
    consensus_rank: int | None = None
    status: str = "ok"
    retry_primes: tuple[int, ...] = ()

    @property
    def primes(self) -> tuple[int, ...]:
        return tuple(p for p, _ in self.ranks)

    def to_json(self) -> str:
        import json

        return json.dumps({
            "row_count": self.row_count,
            "column_dimension": self.column_dimension,
            "ranks": [[p, r] for p, r in self.ranks],
            "consensus_rank": self.consensus_rank,
            "status": self.status,
            "retry_primes": list(self.retry_primes),
        }, sort_keys=True)


def _echelonize_mod_p(matrix: np.ndarray, p: int):
    """Row-reduce an integer matrix mod p.

    Returns (rank, pivot columns, echelon rows): each echelon row has a
    leading 1 at its pivot column and zeros in earlier columns, which is
    all that membership reduction needs.
    """
    m = np.ascontiguousarray(np.mod(matrix, p), dtype=np.int64)
    rows, cols = m.shape
    r = 0
    pivots: list[int] = []
    for c in range(cols):
        if r == rows:
            break
        col = m[r:, c]
        nz = np.nonzero(col)[0]
        if nz.size == 0:
            continue
        pr = r + int(nz[0])
        if pr != r:
            m[[r, pr]] = m[[pr, r]]
        inv = pow(int(m[r, c]), p - 2, p)
        m[r, c:] = (m[r, c:] * inv) % p
        below = m[r + 1:, c]
        tgt = np.nonzero(below)[0]
        if tgt.size:
            block = m[r + 1 + tgt, c:]
            block -= below[tgt, None] * m[r, c:]
            block %= p
            m[r + 1 + tgt, c:] = block
        pivots.append(c)
        r += 1
    return r, pivots, m[:r]


def rank_mod_p(matrix: np.ndarray, p: int) -> int:
    rank, _, _ = _echelonize_mod_p(matrix, p)
    return rank


def _strip_zero_columns(matrix: np.ndarray) -> np.ndarray:
    """Drop identically-zero columns; they never contribute to the rank."""
    used = np.nonzero(matrix.any(axis=0))[0]
    if used.size == matrix.shape[1]:
        return matrix
    return np.ascontiguousarray(matrix[:, used])


def rank_consensus(matrix: np.ndarray, prime_count: int = DEFAULT_PRIME_COUNT,
                   column_dimension: int | None = None,
                   workers: int = 1) -> RankReport:
    """Rank of an integer matrix by modular consensus.

    Disagreement escalates once to 5 primes; if the escalated set still
    disagrees the report is marked inconclusive with retry primes.
    """
    rows, cols = matrix.shape
    report = RankReport(row_count=rows,
                        column_dimension=column_dimension if column_dimension is not None else cols)
    if rows == 0:
        report.consensus_rank = 0
        return report
    work = _strip_zero_columns(matrix)

    def run(primes):
        if workers > 1:
            with ThreadPoolExecutor(max_workers=workers) as pool:
                return list(pool.map(lambda p: (p, rank_mod_p(work, p)), primes))
        return [(p, rank_mod_p(work, p)) for p in primes]

    report.ranks = run(PRIME_POOL[:prime_count])
    values = {r for _, r in report.ranks}
    if len(values) > 1:
        extra = PRIME_POOL[prime_count:ESCALATED_PRIME_COUNT]
        report.ranks += run(extra)
        values = {r for _, r in report.ranks}
    if len(values) == 1:
        report.consensus_rank = values.pop()
    else:
        report.status = "inconclusive"
        report.retry_primes = PRIME_POOL[ESCALATED_PRIME_COUNT:]
    return report


class ModularSpanBasis:
    """Echelon bases of a fixed generator span at several primes, reused
    across many membership queries."""

    def __init__(self, generators: np.ndarray,
                 prime_count: int = DEFAULT_PRIME_COUNT, workers: int = 1):
        if generators.ndim != 2:
            raise QappolyError("generator matrix must be 2-dimensional")
        self._generators = generators
        self._workers = workers
        self.columns = generators.shape[1]
        self.primes = PRIME_POOL[:prime_count]
        self._bases: dict[int, tuple[list[int], np.ndarray]] = {}
        self._build(self.primes)

    def _build(self, primes):
        def build(p):
            _, pivots, rows = _echelonize_mod_p(self._generators, p)
            return p, (pivots, rows)

        todo = [p for p in primes if p not in self._bases]
        if self._workers > 1 and len(todo) > 1:
            with ThreadPoolExecutor(max_workers=self._workers) as pool:
                self._bases.update(pool.map(build, todo))
        else:
            self._bases.update(build(p) for p in todo)

    def rank_at(self, p: int) -> int:
        return len(self._bases[p][0])

    def contains_mod_p(self, vector: np.ndarray, p: int) -> bool:
        pivots, rows = self._bases[p]
        v = np.mod(vector.astype(np.int64), p)
        for idx, c in enumerate(pivots):
            coef = v[c]
            if coef:
                v -= coef * rows[idx]
                v %= p
        return not v.any()

    def contains(self, vector: np.ndarray) -> tuple[bool, dict[int, bool]]:
        """Consensus membership verdict plus the per-prime verdicts.

        A split vote escalates once to 5 primes before giving up.
        """
        votes = {p: self.contains_mod_p(vector, p) for p in self.primes}
        if len(set(votes.values())) > 1:
            self.primes = PRIME_POOL[:ESCALATED_PRIME_COUNT]
            self._build(self.primes)
            votes = {p: self.contains_mod_p(vector, p) for p in self.primes}
        verdicts = set(votes.values())
        if len(verdicts) == 1:
            return verdicts.pop(), votes
        raise QappolyError(
            f"span membership disagreement across primes: {votes}")


def rank_exact_rational(matrix: np.ndarray) -> int:
    """Certification path: exact rank over Q by Fraction elimination.

    Orders of magnitude slower than the modular route; intended for small
    and medium instances or opt-in certification runs.
    """
    rows = [[Fraction(int(x)) for x in row] for row in matrix]
    cols = matrix.shape[1] if matrix.ndim == 2 else 0
    rank = 0
    for c in range(cols):
        pivot = next((r for r in range(rank, len(rows)) if rows[r][c] != 0), None)
        if pivot is None:
            continue
        rows[rank], rows[pivot] = rows[pivot], rows[rank]
        inv = 1 / rows[rank][c]
        rows[rank] = [x * inv for x in rows[rank]]
        for r in range(len(rows)):
            if r != rank and rows[r][c] != 0:
                f = rows[r][c]
                rows[r] = [a - f * b for a, b in zip(rows[r], rows[rank])]
        rank += 1
        if rank == len(rows):
            break
    return rank
