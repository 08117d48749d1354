"""Exact and Monte Carlo tools for block-spin limits of the Ising model.

Cumulants over set partitions, free-measure semi-invariants, connected edge
families, the cluster-expansion lambda-series, finite-volume Gibbs measures
and the link-counting inequality used to bound semi-invariants.
"""

from .cumulants import (OrderCapExceeded, bell_number, cumulant, cumulant_by_partitions,
                        moment_from_cumulants, partitions)
from .estimation import (LinkedUniverse, UniverseError, bound_check_semi_invariant,
                         estimation_check, upsilon)
from .families import (EnumerationCapExceeded, Family, connects, enumerate_connected,
                       family_factorial, family_length, family_support)
from .free_field import free_moment, free_semi_invariant
from .gibbs import (GibbsSpec, SpinConfig, block_transform, chain_block_cumulants,
                    chain_moment, chain_semi_invariant, empirical_cumulants, energy,
                    exact_moment, exact_semi_invariant, metropolis_run, run_block_experiment,
                    transfer_pair_correlation)
from .lattice import BlockParams, Cube, block_map, block_preimage, distance, neighbors
from .series import (SeriesResult, coefficient_Vn, constants, cylinder_probability,
                     semi_invariant_coefficient, semi_invariant_series, variance_series)

__version__ = "0.1.0"
