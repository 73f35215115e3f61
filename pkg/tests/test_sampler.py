import math
from collections import Counter
from fractions import Fraction

import numpy as np
import pytest
from scipy.stats import chisquare

from randpart import exact, sampler
from randpart.partitions import Partition, partition_count
from randpart.sampler import (Procedure, RejectionStats, SampleSummary, SamplerConfig, SamplerError,
                              run_experiment, run_experiments, sample_partitions, sample_uniform_partition,
                              select_part)

import oracle

BACKENDS = ["exact-unranking", "fristedt-rejection", "fristedt-split"]


def rng(seed=0):
    return np.random.default_rng(seed)


def draw_counts(n, method, N, seed, **kw):
    cfg = SamplerConfig(n, method=method, **kw)
    parts = sample_partitions(cfg, N, rng(seed))
    for p in parts:
        assert sum(j * m for j, m in p.mults.items()) == n
    return Counter(tuple(p.parts) for p in parts)


def test_config_defaults():
    cfg = SamplerConfig(100)
    assert cfg.q == pytest.approx(math.exp(-math.pi / math.sqrt(600)))
    assert cfg.backend == "exact-unranking"
    assert SamplerConfig(1001).backend == "fristedt-split"
    with pytest.raises(ValueError):
        SamplerConfig(10, q=1.0)
    with pytest.raises(ValueError):
        SamplerConfig(10, method="magic")


@pytest.mark.parametrize("method", BACKENDS)
def test_n_one(method):
    cfg = SamplerConfig(1, method=method)
    assert sample_uniform_partition(cfg, rng()) == Partition(1, {1: 1})


@pytest.mark.parametrize("method", BACKENDS)
def test_n_four_frequencies(method):
    counts = draw_counts(4, method, 50000, 11)
    assert len(counts) == 5
    for c in counts.values():
        assert abs(c / 50000 - 0.2) <= 0.01


@pytest.mark.parametrize("method", BACKENDS)
def test_chi_square_n12(method):
    N = 77000
    counts = draw_counts(12, method, N, 5)
    cells = oracle.all_partitions(12)
    assert set(counts) == set(cells)
    assert chisquare([counts[c] for c in cells]).pvalue > 1e-3


@pytest.mark.parametrize("scale", [1.0, 3.0, 100.0])
def test_split_sampler_with_wide_cutoff(scale):
    # larger cutoffs push more part sizes through the small-part descent
    cfg = SamplerConfig(15, method="fristedt-split", split_scale=scale)
    assert cfg.cutoff > 1
    counts = draw_counts(15, "fristedt-split", 40000, 8, split_scale=scale)
    cells = oracle.all_partitions(15)
    assert chisquare([counts[c] for c in cells]).pvalue > 1e-3


def test_backends_agree_n10():
    N = 10**5
    a = draw_counts(10, "exact-unranking", N, 1)
    b = draw_counts(10, "fristedt-rejection", N, 2)
    tv = 0.5 * sum(abs(a[c] - b[c]) / N for c in oracle.all_partitions(10))
    assert tv <= 0.02


def test_non_default_q_still_uniform():
    counts = draw_counts(8, "fristedt-rejection", 44000, 3, q=0.5)
    cells = oracle.all_partitions(8)
    assert chisquare([counts[c] for c in cells]).pvalue > 1e-3


def test_rejection_budget():
    cfg = SamplerConfig(200, q=0.01, method="fristedt-rejection", max_rejections=50)
    with pytest.raises(SamplerError) as info:
        sample_uniform_partition(cfg, rng())
    assert info.value.trials >= 50
    assert "50" in str(info.value)


def test_rejection_stats_recorded():
    stats = RejectionStats()
    sample_partitions(SamplerConfig(30, method="fristedt-rejection"), 200, rng(), stats)
    assert stats.accepts == 200 and stats.trials > 200
    stats = RejectionStats()
    sample_partitions(SamplerConfig(30, method="exact-unranking"), 200, rng(), stats)
    assert stats.accepts == stats.trials == 200


@pytest.mark.parametrize("proc, expected", [
    (1, {1: Fraction(1, 2), 2: Fraction(1, 2)}),
    (2, {1: Fraction(2, 4), 2: Fraction(2, 4)}),
    (3, {1: Fraction(2, 3), 2: Fraction(1, 3)}),
])
def test_select_part_laws(proc, expected):
    lam = Partition(4, {2: 1, 1: 2})
    g = rng(proc)
    N = 10**5
    picks = Counter(select_part(lam, proc, g) for _ in range(N))
    mult = {1: 2, 2: 1}
    assert set(picks) == {(j, mult[j]) for j in expected}
    obs = [picks[(j, mult[j])] for j in sorted(expected)]
    exp = [float(expected[j]) * N for j in sorted(expected)]
    assert chisquare(obs, exp).pvalue > 1e-3


def test_select_part_vectorized_matches_scalar():
    lam = Partition(20, {7: 1, 3: 2, 1: 7})
    sizes, mults = sampler._to_arrays(lam)
    for proc in Procedure:
        for u in np.linspace(0, 0.9999, 101):
            assert sampler._select(sizes, mults, 20, proc, u) in {(7, 1), (3, 2), (1, 7)}


def test_uniform_part_n4_against_exact():
    # P(sigma_{4,3} = 1) = E(m_1 / Z) = (0 + 1/2 + 0 + 2/3 + 1) / 5 = 13/30
    exact_value = oracle.average(4, lambda p: Fraction(p.count(1), len(p)))
    assert exact_value == Fraction(13, 30)
    assert exact.sigma3_cdf_exact(4, 1) == exact_value
    res = run_experiment(4, 3, 10**5, 2024, workers=1)
    assert abs(res.size_pmf()[1] - float(exact_value)) <= 0.01


@pytest.mark.parametrize("proc", [1, 2, 3])
def test_n_one_experiment(proc):
    res = run_experiment(1, proc, 10, 0, workers=1)
    assert res.part_sizes == {1: 10} and res.multiplicities == {1: 10}


def test_summary_invariants():
    res = run_experiment(50, 2, 3000, 9, workers=1)
    assert sum(res.size_pmf().values()) == pytest.approx(1.0)
    assert sum(res.mult_pmf().values()) == pytest.approx(1.0)
    assert res.rejection_stats.accepts == res.rejection_stats.trials == 3000
    assert res.method == "exact-unranking"
    again = SampleSummary.from_dict(res.to_dict())
    assert again.to_json() == res.to_json()


def test_determinism_and_worker_invariance():
    args = (2000, [1, 2, 3], 2500, 77)
    one = run_experiments(*args, workers=1)
    two = run_experiments(*args, workers=2)
    again = run_experiments(*args, workers=1)
    for proc in Procedure:
        assert one[proc].to_json() == two[proc].to_json() == again[proc].to_json()
    assert run_experiment(2000, 3, 2500, 77, workers=1).to_json() == one[Procedure.P3].to_json()
    assert run_experiment(2000, 3, 2500, 78, workers=1).to_json() != one[Procedure.P3].to_json()


def test_workers_from_environment(monkeypatch):
    monkeypatch.setenv(sampler.WORKERS_ENV, "3")
    assert sampler.default_workers() == 3
    monkeypatch.delenv(sampler.WORKERS_ENV)
    assert sampler.default_workers() == 1


def test_large_n_split_draws_are_partitions():
    cfg = SamplerConfig(10**5)
    stats = RejectionStats()
    parts = sample_partitions(cfg, 20, rng(4), stats)
    assert all(p.n == 10**5 and sum(j * m for j, m in p.mults.items()) == 10**5 for p in parts)
    assert stats.trials >= stats.accepts == 20


def test_acceptance_probability_decreases():
    vals = [sampler.log_acceptance_probability(n, sampler.default_q(n)) for n in (10**2, 10**4, 10**6)]
    assert vals[0] > vals[1] > vals[2]
    # n = 100 uses exact p(n); compare with an empirical rate
    res = sampler.acceptance_rate(100, 20000, 5)
    assert res["empirical"] == pytest.approx(res["exact"], rel=0.15)


def test_concentration_trivial_cases():
    assert sampler.concentration_diagnostic(4, 500, 10.0, 0, workers=1) == 0
    n = 300
    assert sampler.concentration_diagnostic(n, 500, math.pi * math.sqrt(n) / math.sqrt(6), 0, workers=1) == 0


def test_concentration_large_n():
    freq = sampler.concentration_diagnostic(10**6, 10**4, 0.2, 31, workers=1)
    assert freq <= 0.01
