"""Forward scattering: Nystrom solvers and an analytic disc oracle."""
from .circle import analytic_circle_farfield
from .conditions import Dirichlet, Impedance, Scatterer, Transmission, TrigProfile
from .solver import FarFieldMatrix, check_reciprocity, solve_farfield, suggest_nodes

__all__ = [
    "Dirichlet", "Impedance", "Transmission", "TrigProfile", "Scatterer",
    "FarFieldMatrix", "solve_farfield", "suggest_nodes", "check_reciprocity", "analytic_circle_farfield",
]
