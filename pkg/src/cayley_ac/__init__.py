"""Green-function recursion, moment estimators and boundary functionals for
random Schroedinger operators on regular trees."""
from .halfplane import fixed_point, mobius_phi, weight, chi, cosh_dist
from .model import PotentialDistribution, TreeModel
from .recursion import TruncatedTree, forward_green, root_green, resolvent_oracle, population_dynamics

__all__ = [
    "fixed_point", "mobius_phi", "weight", "chi", "cosh_dist",
    "PotentialDistribution", "TreeModel",
    "TruncatedTree", "forward_green", "root_green", "resolvent_oracle", "population_dynamics",
]
