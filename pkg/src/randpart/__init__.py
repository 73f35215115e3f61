"""Uniform random integer partitions: exact counts, samplers, limit laws and saddle-point asymptotics."""

from .asymptotics import (SaddleSolution, SolverError, hardy_ramanujan, hardy_ramanujan_log,
                          hayman_p_estimate, locality_diagnostic, solve_saddle)
from .exact import (ExactLimitError, ExactProbability, PartitionStats, cdf_grid, exact_cdf,
                    expected_Y, expected_Ysn, expected_Z, sigma1_cdf_exact, sigma2_cdf_exact,
                    sigma3_cdf_exact, stats_of)
from .laws import (LawKind, LimitLaw, cdf_sigma1, cdf_sigma2, cdf_sigma3_normalized, debye_integral,
                   ks_distance, pmf_mult1, pmf_mult2)
from .partitions import (Partition, bounded_count, enumerate_partitions, partition_count,
                         partition_counts, unrank_partition)
from .sampler import (Procedure, RejectionStats, SampleSummary, SamplerConfig, SamplerError,
                      run_experiment, run_experiments, sample_uniform_partition, select_part)

__version__ = "0.1.0"
