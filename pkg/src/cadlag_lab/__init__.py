"""Càdlàg path toolkit: exact path algebra, Skorokhod-type moduli, a
Hermite-weighted weak metric, process simulators and Monte Carlo probes."""

__version__ = "0.1.0"

from .errors import LabError
from .paths import (CadlagPath, Mode, MonotonePath, combine, compose, evaluate, from_json,
                    from_segments, integral_path, integrate, inverse, l2_norm_sq, left_limit,
                    make_path, max_jump, to_json)
from .topology import (L2wTruncation, ModulusKind, grid_increment_max, hermite_eval,
                       jump_bound_check, l2w_distance, oscillation_modulus, triple_distance,
                       weak_inner)
from .simulators import (ChainSpec, InterarrivalDist, RadialPotential, ScenarioConfig,
                         brownian_path, chain_martingale_path, compensator_path, cv_quadrature,
                         occupation_path, renewal_path, scenario_triplet, solve_poisson, substream)
from .lab import (EmpiricalDistribution, ProbeReport, compensator_probe, fdd_probe, ks_distance,
                  l2w_probe, lenglart_check, occupation_probe, sigma_tilde_probe, tightness_table)
