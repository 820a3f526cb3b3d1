"""Оракул: дискретный лоренцев континуум для проверки модели фиктивной ямы."""
from .continuum import (
    DEFAULT_REFINEMENT,
    AmplitudeState,
    DiscretizedReservoir,
    OracleComparison,
    OracleTrajectory,
    RefinementResult,
    build_reservoir,
    compare_fictitious,
    hamiltonian,
    lorentzian_density,
    refinement_sweep,
    schrodinger_evolve,
)

__all__ = [
    "DEFAULT_REFINEMENT",
    "AmplitudeState",
    "DiscretizedReservoir",
    "OracleComparison",
    "OracleTrajectory",
    "RefinementResult",
    "build_reservoir",
    "compare_fictitious",
    "hamiltonian",
    "lorentzian_density",
    "refinement_sweep",
    "schrodinger_evolve",
]
