"""Computable statistics for the times-p, times-q maps on the circle.

Exact circle arithmetic and orbit grids, equidistribution diagnostics (Weyl
sums, star discrepancy, ergodic averages), finitely supported invariant
measures with genericity checks, the conditional-summation operator calculus
with distribution functions, an exact Cantor-function suite, and an
isotonic-projected fixed-point search for common invariant functions.
"""

from .mod1 import (Mod1Rational, Mod1Fixed, OrbitGrid, PrecisionExhausted,
                   mod1, scale_pow, phase, random_point,
                   multiplicatively_independent, fixed_bits_budget)
from .equidist import (EmpiricalMeasure, WeylSum, PhaseMonomial,
                       count_in_interval, weyl_sum_single, weyl_sum_square,
                       ergodic_average, star_discrepancy, empirical_cdf)
from .measures import (AtomicMeasure, CoprimeOrbitForm, GenericityReport,
                       reduce_to_coprime, multiplicative_orbit,
                       build_atomic_measure, pushforward_times_n,
                       measure_moment, generic_point_check)
from .cantor import (TernaryDigits, CantorValue, LipschitzWitness,
                     ternary_digits, first_one_index, cantor_eval,
                     cantor_fraction, self_similarity_check, lipschitz_witness)
from .transfer import (Evaluable, Identity, Polynomial, CantorMap,
                       GridInterpolant, TransferImage, Combination,
                       StepDistribution, GridFunction, DistributionFunction,
                       FourierCoefficient, FixpointTrace, FlatFunctionError,
                       transfer_value, apply_transfer, semigroup_defect,
                       integral_identity_check, distribution_of,
                       stieltjes_fourier, transfer_residual, isotonic_project,
                       fixpoint_search)
from .kernels import BACKEND as kernel_backend

__version__ = "0.1.0"
