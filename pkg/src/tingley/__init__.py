"""Surjective isometries between trace-class unit spheres, at matrix scale.

The compiled Jacobi kernel is used when available; set ``TINGLEY_PURE_PYTHON=1``
to force the pure-Python fallback.
"""

from ._backend import BACKEND
from .errors import OracleInconsistentError, TingleyError
from .faces import FaceDescriptor, face_contains, face_of_element, pi_leq
from .generators import GenSpec, generate_isometry, generate_variant, perturb_oracle
from .geometry import PureAtom, atom_distance, atom_geometry, is_orthogonal, trace_norm
from .matrix import haar_unitary, polar_support, svd
from .oracle import IsometryVariant, SphereOracle, TableOracle, Variant
from .recovery import (
    check_face_transport,
    homogeneous_extension,
    recover_isometry,
    verify_sphere_isometry,
)

__version__ = "0.1.0"
