"""Low-lying Dirichlet-Pauli spectrum on a radial annulus."""

from ._core import (
    AnnulusGeometry,
    ConfigError,
    FiberSpectrum,
    GaugeData,
    NumericalGuardError,
    PotentialFeatures,
    PrefactorLaw,
    RadialField,
    ScalarPotential,
    __version__,
    ab_sweep,
    alpha_k,
    assemble,
    convergence_study,
    f_eval,
    f_minimizer,
    fiber_eigenvalues,
    make_gauge,
    potential_gauge_circulation,
    real_momentum,
    run_cli,
    smallest_eigenvalues,
    solve_fiber,
    solve_scalar_potential,
)

__all__ = [
    "AnnulusGeometry",
    "ConfigError",
    "FiberSpectrum",
    "GaugeData",
    "NumericalGuardError",
    "PotentialFeatures",
    "PrefactorLaw",
    "RadialField",
    "ScalarPotential",
    "__version__",
    "ab_sweep",
    "alpha_k",
    "assemble",
    "convergence_study",
    "f_eval",
    "f_minimizer",
    "fiber_eigenvalues",
    "make_gauge",
    "potential_gauge_circulation",
    "real_momentum",
    "run_cli",
    "smallest_eigenvalues",
    "solve_fiber",
    "solve_scalar_potential",
]
