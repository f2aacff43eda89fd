"""Functional-inequality constants of Gibbs measures at small temperature."""

from ._core import (
    GibbsGrid,
    NumericalError,
    Potential,
    PreconditionError,
    gibbs,
    langevin,
    laplace_gap,
    ls_lower_bound,
    ls_upper_bound,
    ls_variational,
    lyapunov_bound,
    muckenhoupt_bracket,
    pl_constant_dynamic,
    pl_constant_static,
    poincare_spectral,
    potential,
    registered_potentials,
    rescaled_variance,
    run_sweep,
)

__all__ = [name for name in dir() if not name.startswith("_")]
