"""Smeary location mixtures on hyperspheres.

Analytic Frechet functions, intrinsic means, and Monte Carlo machinery for
studying slower-than-parametric convergence of the mean on S^m.
"""

from .errors import (
    ContractViolationError,
    CutLocusError,
    DegenerateDataError,
    DomainError,
    RootBracketError,
    SeriesTruncationError,
    SmearyError,
)
from .family import (
    SmearyFamily,
    alpha_crit,
    c_m,
    gamma_m,
    log_sphere_volume,
    sphere_volume,
)
from .frechet import (
    FrechetCurve,
    arcsin_coeff,
    empirical_frechet,
    h_moment,
    mean_set_radius,
    population_frechet,
    population_frechet_at_center,
    population_frechet_grad,
    rho_gradient,
    taylor_coeff,
)
from .geometry import (
    ChartVector,
    SpherePoint,
    embed_chart,
    exp_at,
    exp_at_north,
    geodesic_distance,
    log_at,
    log_at_north,
    north_pole,
    pole_array,
    project_chart,
    sample_lower_half,
)
from .harness import (
    CubeCheck,
    GridConfig,
    RateEstimate,
    SimulationRecord,
    chart_invariance_check,
    clt_cube_check,
    default_beta_grid,
    default_distortion,
    derived_rng,
    estimate_rate,
    log_spaced_sizes,
    run_grid,
    sigma_theoretical,
)
from .solver import SolverOptions, SolverResult, karcher_mean

__version__ = "0.1.0"

__all__ = [
    "SmearyError",
    "ContractViolationError",
    "DomainError",
    "CutLocusError",
    "SeriesTruncationError",
    "RootBracketError",
    "DegenerateDataError",
    "SpherePoint",
    "ChartVector",
    "north_pole",
    "pole_array",
    "embed_chart",
    "project_chart",
    "geodesic_distance",
    "log_at_north",
    "exp_at_north",
    "log_at",
    "exp_at",
    "sample_lower_half",
    "SmearyFamily",
    "log_sphere_volume",
    "sphere_volume",
    "gamma_m",
    "alpha_crit",
    "c_m",
    "arcsin_coeff",
    "h_moment",
    "population_frechet",
    "population_frechet_grad",
    "population_frechet_at_center",
    "taylor_coeff",
    "mean_set_radius",
    "empirical_frechet",
    "rho_gradient",
    "FrechetCurve",
    "SolverOptions",
    "SolverResult",
    "karcher_mean",
    "GridConfig",
    "SimulationRecord",
    "RateEstimate",
    "CubeCheck",
    "derived_rng",
    "default_beta_grid",
    "default_distortion",
    "log_spaced_sizes",
    "run_grid",
    "estimate_rate",
    "clt_cube_check",
    "sigma_theoretical",
    "chart_invariance_check",
    "__version__",
]
