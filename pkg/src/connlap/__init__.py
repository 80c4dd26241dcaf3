"""Discrete magnetic and connection Laplacians on simplicial complexes via Whitney forms."""

from .bundle import (CoverChart, EmbeddingData, big_I, connection_pencil, flat_line_bundle_circle,
                     injectivity_check, nabla_K, trivial_bundle, weighted_mass)
from .cup import cup, cup_operator, twisted_coboundary
from .errors import DegenerateMetricError, InvalidInputError, MassDegenerateError, NumericalFailureError
from .geometry import GeometricComplex, mesh_report, preset_circle, preset_torus, realize
from .laplacian import OperatorPencil, assemble_degree0, assemble_general, cochain_from_smooth
from .simplicial import Cochain, SimplicialComplex, build_complex, coboundary_matrix
from .spectra import Spectrum, solve_pencil, verify_spectrum
from .whitney import de_rham, mass_matrix

__all__ = [
    "Cochain", "CoverChart", "DegenerateMetricError", "EmbeddingData", "GeometricComplex",
    "InvalidInputError", "MassDegenerateError", "NumericalFailureError", "OperatorPencil",
    "SimplicialComplex", "Spectrum", "assemble_degree0", "assemble_general", "big_I",
    "build_complex", "coboundary_matrix", "cochain_from_smooth", "connection_pencil", "cup",
    "cup_operator", "de_rham", "flat_line_bundle_circle", "injectivity_check", "mass_matrix",
    "mesh_report", "nabla_K", "preset_circle", "preset_torus", "realize", "solve_pencil",
    "trivial_bundle", "twisted_coboundary", "verify_spectrum", "weighted_mass",
]
