"""Динамика: генератор уравнений для матрицы плотности и распространение во времени."""
from .liouvillian import (
    Liouvillian,
    build_liouvillian,
    commutator_superop,
    dissipator_superop,
    effective_hamiltonian,
    evolve,
    master_equation_rhs,
    propagator,
    unvec,
    vec,
)

__all__ = [
    "Liouvillian",
    "build_liouvillian",
    "commutator_superop",
    "dissipator_superop",
    "effective_hamiltonian",
    "evolve",
    "master_equation_rhs",
    "propagator",
    "unvec",
    "vec",
]
