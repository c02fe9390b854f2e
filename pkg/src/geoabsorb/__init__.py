"""Expected visits and absorption distributions for lattice random walks
with geometric absorption, with Monte Carlo and truncated-lattice oracles."""

__version__ = "0.1.0"

from .closed_form import (
    Roots1D,
    TwoLevelSpectrum,
    absorption_prob_1d,
    absorption_prob_two_level,
    characteristic_roots_1d,
    expected_visits_1d,
    expected_visits_two_level,
    summed_visits,
    total_expected_visits,
    two_level_spectrum,
)
from .errors import (
    AccuracyError,
    CapabilityError,
    DomainError,
    EvaluationError,
    GeoAbsorbError,
    IterationError,
    SimulationError,
)
from .models import (
    LatticeState,
    TwoLevelModel,
    Walk1DModel,
    WalkNDModel,
    make_two_level,
    make_walk_1d,
    make_walk_nd,
    origin,
    recurrence_residual,
    survival_factor,
)
from .oracles import (
    EstimateWithError,
    TruncatedSolution,
    WalkTrajectory,
    mc_absorption_histogram,
    mc_expected_visits,
    simulate_walk,
    truncated_fixed_point,
    uniqueness_convergence_report,
)
from .quadrature import (
    QuadratureConfig,
    absorption_prob_nd,
    expected_visits_nd,
    gauss_legendre_rule,
    integrand,
    omega_last,
)
