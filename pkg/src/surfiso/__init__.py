"""Projective isomorphisms between rational parametrized surfaces.

Exact-arithmetic pipeline: base-point analysis of the defining linear
series, divisor-class reduction by adjunction, classification into the
terminal base cases, reparametrization super-sets for the plane and quadric
cases, and recovery of all projective isomorphisms as parametrized matrix
families.  Affine, Euclidean and Moebius isomorphisms are derived from the
projective ones.
"""

from .adjunction import (ClassifiedMap, classify_base_case, classify_map,
                         condition_c0, condition_c1, condition_c2, h0,
                         moving_part, p_invariant, reduce_pipeline,
                         reduce_r0, reduce_r1, reduce_r2)
from .applications import (AmbientStructure, filter_affine, filter_euclidean,
                           moebius_isomorphisms, stereographic_lift)
from .basepoints import (BasePoint, BasePointTree, get_base_points,
                         measure_multiplicities, set_linear_series)
from .driver import IsomsReport, compute_isomorphisms
from .errors import (BaseCaseUnsupportedError, ContractError,
                     EmptySeriesError, ExtensionRequiredError, InputError,
                     InternalConsistencyError, InversionError, ParseError,
                     SurfisoError)
from .fields import GroundField
from .forms import Form, Parametrization, form_gcd
from .lattice import (DivisorClass, canonical_class, class_gcd, intersect,
                      self_intersection)
from .linalg import ExactMatrix, congruent_diagonalize, kernel_basis
from .recovery import (CoefficientMatrix, IsoFamily, coefficient_matrix,
                       extract_isomorphisms, implicit_forms, index_set_J,
                       verify_isomorphism, verify_matrix_identity)
from .reparam import (ReparamFamily, birational_inverse, identity_families,
                      line_classes, pencil_pair_map, superset_B1,
                      superset_B2)
from .solve import SolutionBranch, SolutionSet

__all__ = [name for name in dir() if not name.startswith('_')]
__version__ = '0.1.0'
