"""q-orthogonal polynomial toolkit: recurrences, densities, identities,
kernel sums, and the associated Markov constructions."""

from .qcore import (
    ConvergenceError,
    DomainError,
    Poly,
    SeriesControl,
    q_binomial,
    q_factorial,
    q_number,
    q_pochhammer,
    q_pochhammer_inf,
)
from .recurrences import ALL_FAMILY_NAMES, coeffs, eval_poly, eval_seq, norm_squared
from .kernels import (
    kernel_ids,
    negativity_scan,
    poisson_mehler,
    triple_kernel,
    verify_all_kernels,
    verify_kernel,
)
from .prob import (
    ChainSpec,
    DiscreteConditional,
    SamplePath,
    chapman_kolmogorov_check,
    conditional_moment_checks,
    discrete_conditional,
    discrete_two_step_check,
    martingale_check,
    sample_chain,
    sample_marginal,
)

__all__ = [
    "ConvergenceError",
    "DomainError",
    "Poly",
    "SeriesControl",
    "q_binomial",
    "q_factorial",
    "q_number",
    "q_pochhammer",
    "q_pochhammer_inf",
    "ALL_FAMILY_NAMES",
    "coeffs",
    "eval_poly",
    "eval_seq",
    "norm_squared",
    "kernel_ids",
    "negativity_scan",
    "poisson_mehler",
    "triple_kernel",
    "verify_all_kernels",
    "verify_kernel",
    "ChainSpec",
    "DiscreteConditional",
    "SamplePath",
    "chapman_kolmogorov_check",
    "conditional_moment_checks",
    "discrete_conditional",
    "discrete_two_step_check",
    "martingale_check",
    "sample_chain",
    "sample_marginal",
]

__version__ = "0.1.0"
