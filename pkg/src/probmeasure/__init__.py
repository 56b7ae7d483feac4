"""Measure-theoretic probability at desk scale.

Interval fields and lengths, distribution functions, Riemann-Stieltjes and
Lebesgue integration, expectations, and numerical checks of the classical
probability inequalities.
"""

from .distributions import (
    BRACKETS,
    Continuous,
    Discrete,
    DistributionFunction,
    DistributionSpecError,
    Mixed,
    bernoulli,
    binomial,
    discrete,
    empirical_cdf,
    exponential1,
    from_spec,
    kolmogorov_distance,
    mixed,
    normal01,
    point_mass,
    poisson,
)
from .expectation import (
    MomentResult,
    NonIntegrableLawError,
    RandomVariable,
    affine_check,
    expect,
    expect_closed_form,
    expect_of_function,
    is_integrable,
    lp_norm,
    moment,
    variance,
)
from .intervals import (
    InfiniteLengthError,
    IntervalUnion,
    MalformedIntervalError,
    SemiOpenInterval,
    complement,
    difference,
    intersect,
    length_under,
    normalize,
    union,
)
from .lebesgue import (
    RATIONALS,
    FiniteMeasureSpace,
    FunctionSequence,
    LengthSpace,
    SimpleFunction,
    approximate_by_simple,
    dct_check,
    integrate_simple,
    mct_check,
    measure_from_density,
    pos_neg_split,
    unbounded_integrable_demo,
)
from .stieltjes import (
    IntegrationResult,
    Partition,
    change_of_variables,
    euler_summation,
    finite_sum_as_integral,
    integrate,
    integrate_jump,
    integration_by_parts_residual,
    lower_sum,
    reduce_to_riemann,
    rs_sum,
    upper_sum,
)
from .inequalities import VerificationReport, run_suite, default_grid

__version__ = "0.1.0"
