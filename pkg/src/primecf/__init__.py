"""Prime counting functions, their smooth approximations, and asymptotic
continued fraction expansions."""
from .contfrac import (
    ContinuedFraction,
    Convergent,
    Poly,
    convergents,
    eval_backward,
    family_log_J,
    family_log_S,
    family_log_S_alt,
    family_prime_J,
    family_prime_S,
    family_uniform_sym,
    legendre_error_constant,
    legendre_numerator,
    legendre_shifted,
)
from .exceptions import (
    DivergenceError,
    DomainError,
    ExactnessError,
    IllConditionedError,
    OnSupportError,
    OutOfRangeError,
    PoleError,
    PrimeCFError,
    ResourceError,
    SingularityError,
)
from .moments_qd import (
    ExpDensityInterval,
    MomentSequence,
    QDApproximant,
    UniformInterval,
    contract_to_jacobi,
    moments,
    closed_form_coefficients,
    qd_scoefficients,
    stieltjes_exp_interval,
)
from .precision import PrecisionContext, get_context, local_context, set_context
from .sieve import (
    PrimePowerTally,
    SieveHandle,
    enumerate_primes,
    log_mertens_product_interval,
    mobius,
    pi_from_Pi_mobius,
    power_sum,
    prime_count,
    prime_power_count,
    reciprocal_sum_interval,
    riemann_prime_count,
)
from .special import (
    MertensFunctionTable,
    constant_H,
    constant_M,
    e1,
    ei,
    ein,
    euler_gamma,
    li,
    mertens_G,
    mertens_Hfun,
    mertens_table,
    prime_zeta,
    ri_gram,
    ri_mobius_truncated,
    zeta,
)

__version__ = "0.1.0"
