"""Norm-closed faces of the trace-norm unit ball, coded by partial isometries.

The face coded by ``w`` is ``{x : ||x||_1 = 1 = tr(x w)}``. Faces are never
materialized as sets.
"""

from dataclasses import dataclass

import numpy as np

from .errors import NoFaceError, PreconditionError
from .geometry import is_orthogonal, trace_norm
from .matrix import as_cmatrix, is_partial_isometry, polar_support, svd


@dataclass(frozen=True)
class FaceDescriptor:
    w: np.ndarray
    rank: int

    @classmethod
    def from_partial_isometry(cls, w, tol=1e-9):
        w = as_cmatrix(w, "w")
        if not is_partial_isometry(w, tol):
            raise PreconditionError("w is not a partial isometry")
        rank = int(round(np.trace(w.conj().T @ w).real))
        return cls(w, rank)

    @property
    def n(self):
        return self.w.shape[0]

    @property
    def maximal(self):
        return self.rank == self.n


def face_contains(face, x, tol=1e-8):
    x = as_cmatrix(x, "x")
    return bool(abs(trace_norm(x) - 1.0) <= tol and abs(np.trace(x @ face.w) - 1.0) <= tol)


def pi_leq(w, s, tol=1e-9):
    """Partial isometry order: ``s - w`` is a partial isometry orthogonal to ``w``."""
    w = as_cmatrix(w, "w")
    s = as_cmatrix(s, "s")
    if not (is_partial_isometry(w, tol) and is_partial_isometry(s, tol)):
        raise PreconditionError("pi_leq needs partial isometries")
    d = s - w
    return is_partial_isometry(d, tol) and is_orthogonal(d, w, tol)


def face_of_element(x):
    """Smallest norm-closed face containing ``x / ||x||_1``."""
    x = as_cmatrix(x, "x")
    if not np.any(x):
        raise NoFaceError("the zero matrix lies in no proper face")
    return FaceDescriptor.from_partial_isometry(polar_support(x))


def is_pure_atom(x, tol=1e-8):
    sigma = svd(x).sigma
    if abs(sigma.sum() - 1.0) > tol:
        return False
    return sigma.size == 1 or bool(sigma[1] <= tol)
