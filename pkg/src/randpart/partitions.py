"""Integer partitions: representation, exact counting and enumeration.

Partitions are stored as sparse multiplicity maps ``{part size: multiplicity}``.
Counting uses Euler's pentagonal-number recurrence; the bounded-part table
``q(n, k)`` is an independent second algorithm and also drives unranking.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Iterator, Mapping

from ._validation import check_int

ORACLE_LIMIT = 40

_p_table: list[int] = [1]


@dataclass(frozen=True)
class Partition:
    """A partition of ``n`` given by its multiplicities.

    ``mults[j]`` is the number of parts equal to ``j``; only positive
    multiplicities are stored.
    """

    n: int
    mults: Mapping[int, int] = field(default_factory=dict)

    def __post_init__(self):
        mults = {int(j): int(m) for j, m in dict(self.mults).items() if m != 0}
        for j, m in mults.items():
            if m < 0:
                raise ValueError(f"negative multiplicity {m} for part {j}")
            if not 1 <= j <= self.n:
                raise ValueError(f"part size {j} outside 1..{self.n}")
        total = sum(j * m for j, m in mults.items())
        if total != self.n:
            raise ValueError(f"parts sum to {total}, expected {self.n}")
        object.__setattr__(self, "mults", dict(sorted(mults.items(), reverse=True)))

    @classmethod
    def from_parts(cls, parts) -> "Partition":
        parts = [int(x) for x in parts]
        mults: dict[int, int] = {}
        for x in parts:
            mults[x] = mults.get(x, 0) + 1
        return cls(sum(parts), mults)

    @property
    def parts(self) -> list[int]:
        """Parts in non-increasing order."""
        return [j for j, m in self.mults.items() for _ in range(m)]

    @property
    def num_parts(self) -> int:
        return sum(self.mults.values())

    @property
    def num_distinct(self) -> int:
        return len(self.mults)

    def __hash__(self):
        return hash((self.n, tuple(self.mults.items())))

    def __eq__(self, other):
        if not isinstance(other, Partition):
            return NotImplemented
        return self.n == other.n and self.mults == other.mults

    def to_json(self) -> dict:
        return {"n": self.n, "mults": {str(j): m for j, m in self.mults.items()}}

    @classmethod
    def from_json(cls, obj) -> "Partition":
        if isinstance(obj, str):
            obj = json.loads(obj)
        return cls(int(obj["n"]), {int(j): int(m) for j, m in obj["mults"].items()})


def partition_counts(n: int) -> list[int]:
    """Return the list ``[p(0), ..., p(n)]``.

    The table is memoized and grown on demand; callers must not mutate the
    returned list.
    """
    n = check_int(n, "n", minimum=0)
    table = _p_table
    for m in range(len(table), n + 1):
        total = 0
        k = 1
        while True:
            g1 = k * (3 * k - 1) // 2
            if g1 > m:
                break
            g2 = g1 + k
            term = table[m - g1]
            if g2 <= m:
                term += table[m - g2]
            if k & 1:
                total += term
            else:
                total -= term
            k += 1
        table.append(total)
    return table if len(table) == n + 1 else table[: n + 1]


def partition_count(n: int) -> int:
    """Number of partitions of ``n`` (``p(0) == 1``)."""
    n = check_int(n, "n", minimum=0)
    if n < len(_p_table):
        return _p_table[n]
    return partition_counts(n)[n]


class BoundedCountTable:
    """Table of ``q(r, k)``, the number of partitions of ``r`` into parts ``<= k``.

    Rows are indexed by ``k`` (``0..kmax``) and columns by ``r`` (``0..rmax``).
    Built once with ``q(r, k) = q(r, k-1) + q(r-k, k)`` and then read-only.
    """

    def __init__(self, rmax: int, kmax: int | None = None):
        self.rmax = check_int(rmax, "rmax", minimum=0)
        self.kmax = self.rmax if kmax is None else check_int(kmax, "kmax", minimum=0)
        rows = [[1] + [0] * self.rmax]
        for k in range(1, self.kmax + 1):
            row = list(rows[-1])
            for r in range(k, self.rmax + 1):
                row[r] += row[r - k]
            rows.append(row)
        self._rows = rows

    def __call__(self, r: int, k: int) -> int:
        if r < 0:
            return 0
        if k > self.kmax:
            if r > self.kmax:
                raise ValueError(f"k={k} exceeds table bound {self.kmax}")
            k = self.kmax
        return self._rows[k][r]

    def row(self, k: int) -> list[int]:
        return self._rows[min(k, self.kmax)]


_bounded_cache: BoundedCountTable | None = None


def bounded_table(rmax: int) -> BoundedCountTable:
    """Shared square table covering all ``r, k <= rmax`` (grown when needed)."""
    global _bounded_cache
    if _bounded_cache is None or _bounded_cache.rmax < rmax:
        _bounded_cache = BoundedCountTable(rmax)
    return _bounded_cache


def bounded_count(n: int, k: int) -> int:
    """Number of partitions of ``n`` with every part at most ``k``."""
    n = check_int(n, "n", minimum=0)
    k = check_int(k, "k", minimum=0)
    return bounded_table(n)(n, min(k, n))


def unrank_partition(n: int, rank: int, table: BoundedCountTable | None = None) -> Partition:
    """Map ``rank`` in ``[0, p(n))`` to a partition of ``n``.

    Partitions are ordered by largest part first (descending), then
    recursively on the remainder. This is a bijection onto ``Lambda(n)``.
    """
    if table is None:
        table = bounded_table(n)
    if not 0 <= rank < table(n, n):
        raise ValueError(f"rank {rank} outside [0, p({n}))")
    mults: dict[int, int] = {}
    r, k = n, n
    while r > 0:
        k = min(k, r)
        with_k = table(r - k, k)
        if rank < with_k:
            mults[k] = mults.get(k, 0) + 1
            r -= k
        else:
            rank -= with_k
            k -= 1
    return Partition(n, mults)


def enumerate_partitions(n: int, limit: int = ORACLE_LIMIT) -> Iterator[Partition]:
    """Yield every partition of ``n`` exactly once (reverse lexicographic).

    Intended as a brute-force oracle; refuses ``n > limit``.
    """
    n = check_int(n, "n", minimum=1)
    if n > limit:
        raise ValueError(f"n={n} exceeds the enumeration limit {limit}")

    def rec(r, k):
        if r == 0:
            yield {}
            return
        for j in range(min(r, k), 0, -1):
            for m in range(r // j, 0, -1):
                for rest in rec(r - m * j, j - 1):
                    out = {j: m}
                    out.update(rest)
                    yield out

    for mults in rec(n, n):
        yield Partition(n, mults)
