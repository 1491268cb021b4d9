"""Trace-norm geometry: norms, orthogonality, classical inequalities, atom distances."""

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatchError, NumericalInconsistencyError, PreconditionError
from .matrix import as_cmatrix, polar_support, svd

RADICAND_GUARD = 1e-12


def _pair(a, b):
    a = as_cmatrix(a, "a")
    b = as_cmatrix(b, "b")
    if a.shape != b.shape:
        raise DimensionMismatchError(f"dimensions differ: {a.shape} vs {b.shape}")
    return a, b


def trace_norm(a):
    """Schatten-1 norm: the sum of singular values."""
    return float(np.sum(svd(a).sigma))


def is_orthogonal(a, b, tol=1e-8):
    """``a b^* = 0`` and ``b^* a = 0``, relative to ``||a||_F ||b||_F``."""
    a, b = _pair(a, b)
    scale = tol * np.linalg.norm(a) * np.linalg.norm(b)
    bh = b.conj().T
    return bool(np.linalg.norm(a @ bh) <= scale and np.linalg.norm(bh @ a) <= scale)


def clarkson_mccarthy_gap(a, b):
    """Slack on both sides of ``||a||+||b|| <= ||a+b||+||a-b|| <= 2(||a||+||b||)``.

    Returns:
        ``(lower_gap, upper_gap)``; both are non-negative up to roundoff, and the
        upper gap vanishes exactly when ``a`` and ``b`` are orthogonal.
    """
    a, b = _pair(a, b)
    total = trace_norm(a) + trace_norm(b)
    mid = trace_norm(a + b) + trace_norm(a - b)
    return mid - total, 2.0 * total - mid


def is_projection(p, tol=1e-10):
    p = as_cmatrix(p)
    return bool(np.linalg.norm(p @ p - p) <= tol and np.linalg.norm(p.conj().T - p) <= tol)


def arazy_slack(x, p):
    """``||x||^2`` minus the sum of squared norms of the four corners cut by ``p``.

    Raises:
        PreconditionError: if ``p`` is not an orthogonal projection.
    """
    x, p = _pair(x, p)
    if not is_projection(p):
        raise PreconditionError("p is not an orthogonal projection")
    q = np.eye(p.shape[0]) - p
    corners = (p @ x @ p, p @ x @ q, q @ x @ p, q @ x @ q)
    return trace_norm(x) ** 2 - sum(trace_norm(c) ** 2 for c in corners)


@dataclass(frozen=True)
class PureAtom:
    """Rank-one norm-one element ``eta xi^*``."""

    eta: np.ndarray
    xi: np.ndarray

    def __post_init__(self):
        eta = np.asarray(self.eta, dtype=np.complex128).ravel()
        xi = np.asarray(self.xi, dtype=np.complex128).ravel()
        if eta.shape != xi.shape or eta.size == 0:
            raise DimensionMismatchError("eta and xi must be non-empty and of equal length")
        for name, v in (("eta", eta), ("xi", xi)):
            if abs(np.linalg.norm(v) - 1.0) > 1e-12:
                raise PreconditionError(f"{name} is not a unit vector")
        object.__setattr__(self, "eta", eta)
        object.__setattr__(self, "xi", xi)

    @classmethod
    def from_matrix(cls, e, tol=1e-8):
        """Factor a rank-one trace-norm-one matrix into an atom."""
        U, sigma, V = svd(e)
        if abs(sigma[0] - 1.0) > tol or (sigma.size > 1 and sigma[1] > tol):
            raise PreconditionError("matrix is not a pure atom")
        return cls(U[:, 0], V[:, 0])

    @property
    def n(self):
        return self.eta.size

    @property
    def matrix(self):
        return np.outer(self.eta, self.xi.conj())

    def __neg__(self):
        return PureAtom(-self.eta, self.xi)


@dataclass(frozen=True)
class AtomGeometry:
    alpha: complex
    delta_hat: float


def atom_geometry(e1, e2):
    """Pairing of ``e2`` with the support of ``e1``, and the mass of ``e2`` off it.

    ``alpha = tr(e2 s)`` and ``delta_hat = ||(1 - s^* s) e2 (1 - s s^*)||_1`` with
    ``s = s(e1)``.
    """
    if e1.n != e2.n:
        raise DimensionMismatchError("atoms live in different dimensions")
    s = polar_support(e1.matrix)
    x = e2.matrix
    eye = np.eye(e1.n)
    alpha = complex(np.trace(x @ s))
    compressed = (eye - s.conj().T @ s) @ x @ (eye - s @ s.conj().T)
    return AtomGeometry(alpha, trace_norm(compressed))


def atom_distance(e1, e2):
    """``||e2 - e1||_1`` from the closed form in ``alpha`` and ``delta_hat``.

    Raises:
        NumericalInconsistencyError: if the inner radicand is below
            ``-RADICAND_GUARD``, which no pair of genuine atoms produces.
    """
    geo = atom_geometry(e1, e2)
    c = 1.0 - geo.alpha.real
    radicand = c * c - geo.delta_hat ** 2
    if radicand < -RADICAND_GUARD:
        raise NumericalInconsistencyError(
            f"negative radicand {radicand:.3e} (alpha={geo.alpha}, delta_hat={geo.delta_hat})")
    root = np.sqrt(max(radicand, 0.0))
    return float(np.sqrt(max(c - root, 0.0)) + np.sqrt(c + root))
