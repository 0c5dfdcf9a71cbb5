"""Exact cubical descent for bounded complexes of free abelian groups."""

from .complexes import ChainMap, ZComplex, cone, fiber, homology, is_quasi_iso, loop
from .cube import Cube, ProductCube, build_cube, cofaces, cube_product
from .diagram import CubicalDiagram, augmentation_map, is_acyclic, simple, simple_augmented
from .zmod import FgAbGroup, cokernel, snf, solve_in_lattice

__all__ = [
    "ChainMap", "ZComplex", "cone", "fiber", "homology", "is_quasi_iso", "loop",
    "Cube", "ProductCube", "build_cube", "cofaces", "cube_product",
    "CubicalDiagram", "augmentation_map", "is_acyclic", "simple", "simple_augmented",
    "FgAbGroup", "cokernel", "snf", "solve_in_lattice",
]

__version__ = "0.1.0"
