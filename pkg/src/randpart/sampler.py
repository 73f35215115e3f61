"""Uniform random partitions and the three part-selection procedures.

Three exact samplers are available:

``exact-unranking``
    Draw a uniform rank in ``[0, p(n))`` and unrank it with the bounded-part
    count table. Big-integer exact; practical up to a few thousand.
``fristedt-rejection``
    Draw independent ``gamma_j`` with ``P(gamma_j = k) = (1 - q^j) q^{jk}``
    for ``j = 1..n`` and keep the draw iff ``sum j gamma_j == n``.
``fristedt-split``
    The same conditioning, split at a cutoff ``K``. Multiplicities of parts
    ``> K`` are drawn independently (as a Poisson point process on pairs
    ``(j, k)`` with intensity ``q^{jk}/k``, summing ``k`` over the points at
    ``j``). Given their weight ``S``, the parts ``<= K`` form a uniformly random
    partition of ``n - S`` into parts ``<= K``, and that remainder is accepted
    with probability proportional to ``q^r c_K(r)``. The small-part law is
    sampled from a float table of ``q^r c_K(r)``, so this is the only backend
    that is exact only up to double rounding (and a remainder window holding
    all but ~1e-40 of the mass).

``auto`` uses unranking for ``n <= 1000`` and the split sampler above.

Monte Carlo runs are split into fixed-size chunks; chunk ``c`` draws from
``SeedSequence(seed, spawn_key=(c,))``, so results depend on ``seed`` only and
not on the number of worker processes.
"""

from __future__ import annotations

import enum
import json
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy.signal import lfilter

from ._validation import check_int, check_real
from .partitions import Partition, bounded_table, partition_count, unrank_partition

UNRANK_AUTO_LIMIT = 1000
UNRANK_LIMIT = 5000
CHUNK_SIZE = 1000
WORKERS_ENV = "RANDPART_WORKERS"

METHODS = ("auto", "exact-unranking", "fristedt-rejection", "fristedt-split")


class SamplerError(RuntimeError):
    """Rejection budget exhausted."""

    def __init__(self, message, trials):
        super().__init__(message)
        self.trials = trials


class Procedure(enum.IntEnum):
    """How a part is picked from a partition."""

    P1 = 1  # uniformly among distinct part sizes
    P2 = 2  # proportional to block area j * m_j
    P3 = 3  # uniformly among all parts

    @property
    def label(self) -> str:
        return {1: "P1-distinct", 2: "P2-area", 3: "P3-uniform-part"}[self.value]

    @classmethod
    def parse(cls, value) -> "Procedure":
        if isinstance(value, cls):
            return value
        if isinstance(value, str):
            for proc in cls:
                if value in (proc.label, proc.name, str(proc.value)):
                    return proc
            raise ValueError(f"unknown procedure {value!r}")
        return cls(int(value))


def default_q(n: int) -> float:
    return math.exp(-math.pi / math.sqrt(6 * n))


@dataclass(frozen=True)
class SamplerConfig:
    n: int
    q: float | None = None
    method: str = "auto"
    max_rejections: int = 10**7
    split_scale: float = 0.15

    def __post_init__(self):
        check_int(self.n, "n", minimum=1)
        if self.q is None:
            object.__setattr__(self, "q", default_q(self.n))
        q = check_real(self.q, "q")
        if not 0 < q < 1:
            raise ValueError(f"q must lie in (0, 1), got {q}")
        if self.method not in METHODS:
            raise ValueError(f"method must be one of {METHODS}, got {self.method!r}")
        check_int(self.max_rejections, "max_rejections", minimum=1)
        check_real(self.split_scale, "split_scale", minimum=0.0, strict=True)
        if self.method == "exact-unranking" and self.n > UNRANK_LIMIT:
            raise ValueError(f"exact-unranking supports n <= {UNRANK_LIMIT}")

    @property
    def backend(self) -> str:
        if self.method != "auto":
            return self.method
        return "exact-unranking" if self.n <= UNRANK_AUTO_LIMIT else "fristedt-split"

    @property
    def cutoff(self) -> int:
        """Small-part cutoff ``K`` of the split sampler."""
        return max(1, min(self.n, math.ceil(self.split_scale / -math.log(self.q))))


@dataclass
class RejectionStats:
    trials: int = 0
    accepts: int = 0

    def add(self, other: "RejectionStats"):
        self.trials += other.trials
        self.accepts += other.accepts


# -- helpers ------------------------------------------------------------------


def randbelow(rng: np.random.Generator, bound: int) -> int:
    """Exact uniform integer in ``[0, bound)`` for arbitrarily large ``bound``."""
    if bound <= 0:
        raise ValueError("bound must be positive")
    if bound <= 2**63:
        return int(rng.integers(0, bound))
    nbits = bound.bit_length()
    words = (nbits + 63) // 64
    mask = (1 << nbits) - 1
    while True:
        value = 0
        for w in rng.integers(0, 2**64, size=words, dtype=np.uint64):
            value = (value << 64) | int(w)
        value &= mask
        if value < bound:
            return value


def _to_arrays(partition: Partition):
    sizes = np.fromiter(partition.mults.keys(), dtype=np.int64)
    mults = np.fromiter(partition.mults.values(), dtype=np.int64)
    return sizes, mults


def _from_arrays(n, sizes, mults) -> Partition:
    return Partition(n, dict(zip(sizes.tolist(), mults.tolist())))


class _Budget:
    """Tracks consecutive rejections across vectorized batches."""

    def __init__(self, limit):
        self.limit = limit
        self.since_accept = 0

    def update(self, accepted: np.ndarray, stats: RejectionStats):
        hits = np.flatnonzero(accepted)
        size = accepted.size
        if hits.size:
            gaps = np.diff(np.concatenate([[-1 - self.since_accept], hits])) - 1
            worst = int(gaps.max())
            self.since_accept = size - 1 - int(hits[-1])
        else:
            worst = self.since_accept + size
            self.since_accept = worst
        if worst > self.limit:
            raise SamplerError(
                f"rejection budget exhausted: {worst} consecutive rejections after "
                f"{stats.trials} trials (limit {self.limit}); retry with another seed",
                trials=stats.trials,
            )


# -- backends -----------------------------------------------------------------


def _unranking(cfg: SamplerConfig, size: int, rng, stats: RejectionStats):
    n = cfg.n
    table = bounded_table(n)
    total = partition_count(n)
    if total <= 2**63:
        ranks = [int(r) for r in rng.integers(0, total, size=size)]
    else:
        ranks = [randbelow(rng, total) for _ in range(size)]
    out = [_to_arrays(unrank_partition(n, rank, table)) for rank in ranks]
    stats.trials += size
    stats.accepts += size
    return out


def _rejection(cfg: SamplerConfig, size: int, rng, stats: RejectionStats):
    n, lq = cfg.n, math.log(cfg.q)
    j = np.arange(1, n + 1, dtype=np.float64)
    scale = 1.0 / (j * lq)
    rate = math.exp(log_acceptance_probability(n, cfg.q))
    batch = int(min(max(64, 2 * size / max(rate, 1e-12)), max(64, 4_000_000 // n)))
    budget = _Budget(cfg.max_rejections)
    out = []
    while len(out) < size:
        # inversion: gamma_j = floor(log U / (j log q))
        gam = np.floor(np.log1p(-rng.random((batch, n))) * scale)
        weight = gam @ j
        accepted = weight == n
        stats.trials += batch
        stats.accepts += int(accepted.sum())
        budget.update(accepted, stats)
        for row in gam[accepted]:
            nz = np.flatnonzero(row)[::-1]
            out.append(((nz + 1).astype(np.int64), row[nz].astype(np.int64)))
    # trials beyond the last needed acceptance are not charged
    surplus = len(out) - size
    stats.accepts -= surplus
    return out[:size]


class _SplitTables:
    """Precomputed quantities of the split sampler for one ``(n, q, K)``."""

    def __init__(self, n: int, q: float, K: int):
        self.n, self.q, self.K = n, q, K
        lq = self.lq = math.log(q)
        # small parts: moments of sum_{j<=K} j gamma_j, then w_k(r) = q^r c_k(r)
        js = np.arange(1, K + 1, dtype=float)
        x = np.exp(js * lq)
        mean = float(np.sum(js * x / (1 - x)))
        sd = float(np.sqrt(np.sum(js**2 * x / (1 - x) ** 2)))
        kmax = n // (K + 1)
        self.rmax = rmax = int(min(n, math.ceil(mean + 16 * sd + 32))) if kmax else n
        table = np.zeros((K + 1, rmax + 1))
        table[0, 0] = 1.0
        for k in range(1, K + 1):
            rows = -(-(rmax + 1) // k)
            prev = np.zeros(rows * k)
            prev[: rmax + 1] = table[k - 1]
            cur = lfilter([1.0], [1.0, -math.exp(k * lq)], prev.reshape(rows, k), axis=0)
            table[k] = cur.reshape(-1)[: rmax + 1]
        if not np.all(np.isfinite(table)):
            raise OverflowError(f"small-part table overflow for n={n}, K={K}")
        self.table = table
        self.accept = table[K] / table[K].max()
        # large parts: points (j, k), K < j <= n // k, intensity q^{jk} / k
        self.ks = ks = np.arange(1, kmax + 1, dtype=float)
        self.lengths = lengths = np.floor(n / ks) - K
        lam = np.exp(ks * (K + 1) * lq) * -np.expm1(ks * lengths * lq) / -np.expm1(ks * lq) / ks
        self.cum = np.cumsum(lam)
        self.total = float(self.cum[-1]) if kmax else 0.0
        if not kmax:
            # no large parts: the remainder is always n
            self.accept = np.zeros(n + 1)
            self.accept[n] = 1.0
        # normal approximation of the acceptance rate; only sizes batches
        jl = np.arange(K + 1, n + 1, dtype=float)
        xl = np.exp(jl * lq)
        mu = float(np.sum(jl * xl / (1 - xl)))
        var = float(np.sum(jl**2 * xl / (1 - xl) ** 2))
        if var > 0:
            r = np.arange(self.accept.size)
            dens = np.exp(-0.5 * (n - r - mu) ** 2 / var) / math.sqrt(2 * math.pi * var)
            self.rate = float(np.clip(np.sum(dens * self.accept), 1e-6, 1.0))
        else:
            self.rate = 1.0

    def draw_large(self, rng, batch):
        counts = rng.poisson(self.total, batch) if self.total else np.zeros(batch, dtype=np.int64)
        npts = int(counts.sum())
        idx = np.searchsorted(self.cum, rng.random(npts) * self.total, side="right")
        np.minimum(idx, self.ks.size - 1, out=idx)
        k = self.ks[idx]
        length = self.lengths[idx]
        kl = k * self.lq
        off = np.floor(np.log1p(rng.random(npts) * np.expm1(length * kl)) / kl)
        np.minimum(off, length - 1, out=off)
        j = off + (self.K + 1)
        owner = np.repeat(np.arange(batch), counts)
        weight = np.bincount(owner, weights=j * k, minlength=batch)
        return counts, j.astype(np.int64), k.astype(np.int64), np.rint(weight).astype(np.int64)

    def draw_small(self, rng, remainders):
        """Uniform partitions of each remainder into parts ``<= K``; returns (B, K) mults."""
        r = np.array(remainders, dtype=np.int64)
        out = np.zeros((r.size, self.K), dtype=np.int64)
        for k in range(self.K, 1, -1):
            row = self.table[k]
            u = rng.random(r.size) * row[r]
            lo = np.zeros_like(r)
            hi = r // k
            while np.any(lo < hi):
                mid = (lo + hi + 1) // 2
                ok = row[r - mid * k] * np.exp(mid * k * self.lq) >= u
                lo = np.where(ok, mid, lo)
                hi = np.where(ok, hi, mid - 1)
            out[:, k - 1] = lo
            r = r - lo * k
        out[:, 0] = r
        return out


@lru_cache(maxsize=4)
def _split_tables(n: int, q: float, K: int) -> _SplitTables:
    return _SplitTables(n, q, K)


def _split(cfg: SamplerConfig, size: int, rng, stats: RejectionStats):
    tab = _split_tables(cfg.n, float(cfg.q), cfg.cutoff)
    n, K = cfg.n, tab.K
    budget = _Budget(cfg.max_rejections)
    per_trial = max(1.0, tab.total)
    out = []
    while len(out) < size:
        need = size - len(out)
        batch = int(min(max(16, 1.3 * need / tab.rate), max(16, 1_000_000 / per_trial)))
        counts, j, k, weight = tab.draw_large(rng, batch)
        rem = n - weight
        valid = (rem >= 0) & (rem <= tab.rmax)
        u = rng.random(batch)
        accepted = valid & (u < tab.accept[np.where(valid, rem, 0)])
        stats.trials += batch
        stats.accepts += int(accepted.sum())
        budget.update(accepted, stats)
        hits = np.flatnonzero(accepted)
        if not hits.size:
            continue
        small = tab.draw_small(rng, rem[hits])
        ends = np.cumsum(counts)
        for row, b in zip(small, hits.tolist()):
            lo, hi = ends[b] - counts[b], ends[b]
            mult = {}
            for jj, kk in zip(j[lo:hi].tolist(), k[lo:hi].tolist()):
                mult[jj] = mult.get(jj, 0) + kk
            nz = np.flatnonzero(row)
            big = sorted(mult.items(), reverse=True)
            sizes = np.array([a for a, _ in big] + (nz[::-1] + 1).tolist(), dtype=np.int64)
            mults = np.array([c for _, c in big] + row[nz[::-1]].tolist(), dtype=np.int64)
            out.append((sizes, mults))
    surplus = len(out) - size
    stats.accepts -= surplus
    return out[:size]


_BACKENDS = {
    "exact-unranking": _unranking,
    "fristedt-rejection": _rejection,
    "fristedt-split": _split,
}


def sample_arrays(cfg: SamplerConfig, size: int, rng: np.random.Generator, stats: RejectionStats | None = None):
    """Draw ``size`` uniform partitions as ``(sizes, mults)`` array pairs (sizes descending)."""
    stats = RejectionStats() if stats is None else stats
    return _BACKENDS[cfg.backend](cfg, size, rng, stats)


def sample_partitions(cfg: SamplerConfig, size: int, rng: np.random.Generator, stats: RejectionStats | None = None):
    """Draw ``size`` independent uniform partitions of ``cfg.n``."""
    return [_from_arrays(cfg.n, s, m) for s, m in sample_arrays(cfg, size, rng, stats)]


def sample_uniform_partition(cfg: SamplerConfig, rng: np.random.Generator, stats: RejectionStats | None = None) -> Partition:
    """One uniform partition of ``cfg.n``; trials are added to ``stats`` if given."""
    return sample_partitions(cfg, 1, rng, stats)[0]


def log_acceptance_probability(n: int, q: float) -> float:
    """``log P(sum_{j<=n} j gamma_j = n) = log(p(n) q^n prod_{j<=n}(1 - q^j))``.

    Uses the exact ``p(n)`` up to ``n = 20000`` and the saddle-point
    estimate beyond.
    """
    lq = math.log(q)
    j = np.arange(1, n + 1, dtype=float)
    log_prod = float(np.sum(np.log1p(-np.exp(j * lq))))
    if n <= 20000:
        log_p = math.log(partition_count(n))
    else:
        from .asymptotics import hayman_p_estimate

        log_p = hayman_p_estimate(n)
    return log_p + n * lq + log_prod


# -- part selection -------------------------------------------------------------


def _select(sizes, mults, n, proc, u):
    if proc == Procedure.P1:
        i = min(int(u * sizes.size), sizes.size - 1)
    elif proc == Procedure.P2:
        cum = np.cumsum(sizes * mults)
        i = int(np.searchsorted(cum, u * n, side="right"))
    else:
        cum = np.cumsum(mults)
        i = int(np.searchsorted(cum, u * cum[-1], side="right"))
    i = min(i, sizes.size - 1)
    return int(sizes[i]), int(mults[i])


def select_part(partition: Partition, proc, rng: np.random.Generator) -> tuple[int, int]:
    """Pick a part of ``partition`` by procedure ``proc``; returns ``(size, multiplicity)``.

    P1: uniform over distinct sizes. P2: size ``j`` with probability
    ``j m_j / n``. P3: size ``j`` with probability ``m_j / Z_n``.
    """
    proc = Procedure.parse(proc)
    if not partition.mults:
        raise ValueError("cannot select from an empty partition")
    sizes, mults = _to_arrays(partition)
    return _select(sizes, mults, partition.n, proc, rng.random())


# -- experiments ----------------------------------------------------------------


@dataclass
class SampleSummary:
    """Empirical distribution of the selected part size and multiplicity."""

    n: int
    procedure: Procedure
    N: int
    seed: int
    method: str
    part_sizes: dict[int, int] = field(default_factory=dict)
    multiplicities: dict[int, int] = field(default_factory=dict)
    rejection_stats: RejectionStats = field(default_factory=RejectionStats)

    def size_table(self):
        vals = np.array(list(self.part_sizes.keys()), dtype=np.int64)
        cnts = np.array(list(self.part_sizes.values()), dtype=np.int64)
        return vals, cnts

    def mult_table(self):
        vals = np.array(list(self.multiplicities.keys()), dtype=np.int64)
        cnts = np.array(list(self.multiplicities.values()), dtype=np.int64)
        return vals, cnts

    def size_pmf(self) -> dict[int, float]:
        return {k: v / self.N for k, v in self.part_sizes.items()}

    def mult_pmf(self) -> dict[int, float]:
        return {k: v / self.N for k, v in self.multiplicities.items()}

    def normalized_sizes(self):
        """Part sizes on the limit-law scale, with counts."""
        vals, cnts = self.size_table()
        if self.procedure == Procedure.P3:
            t = 2 * np.log(vals) / math.log(self.n) if self.n > 1 else np.zeros(vals.size)
        else:
            t = math.pi * vals / math.sqrt(6 * self.n)
        return t, cnts

    def ecdf_rows(self):
        t, cnts = self.normalized_sizes()
        cum = np.cumsum(cnts) / self.N
        return list(zip(t.tolist(), cum.tolist()))

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "procedure": self.procedure.label,
            "N": self.N,
            "seed": self.seed,
            "method": self.method,
            "part_sizes": {str(k): v for k, v in self.part_sizes.items()},
            "multiplicities": {str(k): v for k, v in self.multiplicities.items()},
            "rejection_stats": {"trials": self.rejection_stats.trials, "accepts": self.rejection_stats.accepts},
        }

    def to_json(self, **kwargs) -> str:
        return json.dumps(self.to_dict(), **kwargs)

    @classmethod
    def from_dict(cls, obj) -> "SampleSummary":
        if isinstance(obj, str):
            obj = json.loads(obj)
        return cls(
            n=obj["n"],
            procedure=Procedure.parse(obj["procedure"]),
            N=obj["N"],
            seed=obj["seed"],
            method=obj["method"],
            part_sizes={int(k): v for k, v in obj["part_sizes"].items()},
            multiplicities={int(k): v for k, v in obj["multiplicities"].items()},
            rejection_stats=RejectionStats(**obj["rejection_stats"]),
        )


def _chunk_streams(seed: int, chunk: int):
    ss = np.random.SeedSequence(seed, spawn_key=(chunk,))
    return [np.random.Generator(np.random.PCG64(s)) for s in ss.spawn(4)]


def _run_chunk(args):
    cfg, seed, chunk, size, procs = args
    streams = _chunk_streams(seed, chunk)
    stats = RejectionStats()
    draws = sample_arrays(cfg, size, streams[0], stats)
    result = {"trials": stats.trials, "accepts": stats.accepts,
              "Y": np.array([s.size for s, _ in draws], dtype=np.int64)}
    for proc in procs:
        u = streams[int(proc)].random(size)
        picks = [_select(s, m, cfg.n, proc, ui) for (s, m), ui in zip(draws, u.tolist())]
        result[int(proc)] = np.array(picks, dtype=np.int64).reshape(size, 2)
    return result


def default_workers() -> int:
    try:
        return max(1, int(os.environ.get(WORKERS_ENV, "1")))
    except ValueError:
        return 1


def _map_chunks(cfg, seed, N, procs, workers):
    jobs = []
    for c, start in enumerate(range(0, N, CHUNK_SIZE)):
        jobs.append((cfg, seed, c, min(CHUNK_SIZE, N - start), tuple(procs)))
    if workers <= 1 or len(jobs) == 1:
        return [_run_chunk(job) for job in jobs]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_run_chunk, jobs))


def _counts(values) -> dict[int, int]:
    vals, cnts = np.unique(values, return_counts=True)
    return dict(zip(vals.tolist(), cnts.tolist()))


def run_experiments(n, procs, N, seed, workers=None, method="auto", cfg: SamplerConfig | None = None):
    """Like :func:`run_experiment` for several procedures on shared partition draws.

    Each procedure's selections use their own stream, so every summary is
    identical to what :func:`run_experiment` returns for that procedure.
    """
    N = check_int(N, "N", minimum=1)
    seed = check_int(seed, "seed", minimum=0, maximum=2**64 - 1)
    procs = [Procedure.parse(p) for p in procs]
    cfg = SamplerConfig(n, method=method) if cfg is None else cfg
    workers = default_workers() if workers is None else check_int(workers, "workers", minimum=1)
    chunks = _map_chunks(cfg, seed, N, procs, workers)
    stats = RejectionStats(sum(c["trials"] for c in chunks), sum(c["accepts"] for c in chunks))
    out = {}
    for proc in procs:
        picks = np.concatenate([c[int(proc)] for c in chunks])
        out[proc] = SampleSummary(
            n=cfg.n, procedure=proc, N=N, seed=seed, method=cfg.backend,
            part_sizes=_counts(picks[:, 0]), multiplicities=_counts(picks[:, 1]),
            rejection_stats=RejectionStats(stats.trials, stats.accepts),
        )
    return out


def run_experiment(n, proc, N, seed, workers=None, method="auto") -> SampleSummary:
    """``N`` independent (uniform partition, selected part) draws.

    Deterministic in ``seed``; ``workers`` only changes wall time.
    """
    proc = Procedure.parse(proc)
    return run_experiments(n, [proc], N, seed, workers=workers, method=method)[proc]


def sample_distinct_counts(n, N, seed, workers=None, method="auto") -> np.ndarray:
    """Numbers of distinct part sizes ``Y_n`` of ``N`` uniform partitions."""
    cfg = SamplerConfig(n, method=method)
    workers = default_workers() if workers is None else workers
    chunks = _map_chunks(cfg, check_int(seed, "seed", minimum=0), check_int(N, "N", minimum=1), [], workers)
    return np.concatenate([c["Y"] for c in chunks])


def concentration_diagnostic(n, N, eps, seed, workers=None, method="auto") -> float:
    """Fraction of samples with ``|pi Y_n / sqrt(6n) - 1| > eps``."""
    eps = check_real(eps, "eps", minimum=0.0, strict=True)
    y = sample_distinct_counts(n, N, seed, workers=workers, method=method)
    dev = np.abs(math.pi * y / math.sqrt(6 * n) - 1.0)
    return float(np.mean(dev > eps))


def acceptance_rate(n, trials, seed, q=None) -> dict:
    """Empirical and exact acceptance rate of the plain rejection sampler."""
    cfg = SamplerConfig(n, q=q, method="fristedt-rejection")
    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed)))
    lq = math.log(cfg.q)
    j = np.arange(1, n + 1, dtype=float)
    scale = 1.0 / (j * lq)
    batch = max(1, min(trials, 4_000_000 // n))
    hits = done = 0
    while done < trials:
        b = min(batch, trials - done)
        gam = np.floor(np.log1p(-rng.random((b, n))) * scale)
        hits += int(np.sum(gam @ j == n))
        done += b
    return {"n": n, "q": cfg.q, "trials": trials, "accepts": hits,
            "empirical": hits / trials, "exact": math.exp(log_acceptance_probability(n, cfg.q))}
