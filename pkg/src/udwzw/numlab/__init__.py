"""Lattice numerics for the deformed symplectic structure.

The gauge-orbit checks live in :mod:`udwzw.numlab.kernel`, which is not
imported here because it depends on :mod:`udwzw.reduction`.
"""
from .flow import flow_check, hamiltonian_vector, integrate
from .lattice import (ConvergenceFit, PhasePoint, TangentVector, currents, d_currents,
                      derivative_convergence, flow_point, hamiltonian_value, identity_point,
                      closedness_residual, omega_u, random_loop, random_point)
from .relations import verify_current_brackets, verify_loop_group_bracket, verify_symmetry_relations
from .symplectic import SymplecticData, assemble

__all__ = [
    "ConvergenceFit", "PhasePoint", "closedness_residual", "SymplecticData", "TangentVector", "assemble",
    "currents", "d_currents", "derivative_convergence", "flow_check", "flow_point",
    "hamiltonian_value", "hamiltonian_vector", "identity_point", "integrate", "omega_u",
    "random_loop", "random_point", "verify_current_brackets", "verify_loop_group_bracket",
    "verify_symmetry_relations",
]
