"""Black-box sphere maps and the four canonical trace-norm isometries."""

import enum
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import DimensionMismatchError, MissingProbeError, PreconditionError
from .matrix import as_cmatrix, is_unitary


class Variant(str, enum.Enum):
    LINEAR = "Linear"
    TRANSPOSE = "Transpose"
    CONJUGATE = "Conjugate"
    ADJOINT = "Adjoint"

    @property
    def transposes(self):
        return self in (Variant.TRANSPOSE, Variant.ADJOINT)

    @property
    def conjugates(self):
        return self in (Variant.CONJUGATE, Variant.ADJOINT)

    @classmethod
    def from_flags(cls, transposes, conjugates):
        return {
            (False, False): cls.LINEAR,
            (True, False): cls.TRANSPOSE,
            (False, True): cls.CONJUGATE,
            (True, True): cls.ADJOINT,
        }[(bool(transposes), bool(conjugates))]


def _twist(tag, x):
    if tag.transposes:
        x = x.T
    if tag.conjugates:
        x = x.conj()
    return x


@dataclass(frozen=True)
class IsometryVariant:
    """``x -> u T(x) v`` where ``T`` is identity, transpose, conjugation or adjoint."""

    tag: Variant
    u: np.ndarray
    v: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "tag", Variant(self.tag))
        u = as_cmatrix(self.u, "u")
        v = as_cmatrix(self.v, "v")
        if u.shape != v.shape:
            raise DimensionMismatchError("u and v differ in dimension")
        if not (is_unitary(u) and is_unitary(v)):
            raise PreconditionError("u and v must be unitary")
        object.__setattr__(self, "u", u)
        object.__setattr__(self, "v", v)

    @property
    def n(self):
        return self.u.shape[0]

    def apply(self, x):
        return self.u @ _twist(self.tag, np.asarray(x, dtype=np.complex128)) @ self.v

    def inverse(self, y):
        core = self.u.conj().T @ np.asarray(y, dtype=np.complex128) @ self.v.conj().T
        # each twist is an involution, and they commute
        return _twist(self.tag, core)

    def as_oracle(self):
        return SphereOracle(self.n, self.apply)


@dataclass(frozen=True)
class SphereOracle:
    """A map on unit-trace-norm ``dim x dim`` matrices, accessed only by evaluation."""

    dim: int
    eval: Callable[[np.ndarray], np.ndarray]

    def __call__(self, x):
        x = np.asarray(x, dtype=np.complex128)
        if x.shape != (self.dim, self.dim):
            raise DimensionMismatchError(
                f"oracle acts on {self.dim}x{self.dim} matrices, got {x.shape}")
        return np.asarray(self.eval(x), dtype=np.complex128)


class TableOracle:
    """Oracle answering from a finite table of ``(x, f(x))`` samples.

    Lookups match an entry within ``match_tol`` in Frobenius norm; anything
    else raises :class:`MissingProbeError` rather than guessing.
    """

    def __init__(self, pairs, match_tol=1e-9):
        pairs = [(as_cmatrix(x, "x"), as_cmatrix(fx, "fx")) for x, fx in pairs]
        if not pairs:
            raise PreconditionError("empty oracle table")
        n = pairs[0][0].shape[0]
        if any(x.shape != (n, n) or fx.shape != (n, n) for x, fx in pairs):
            raise DimensionMismatchError("table mixes dimensions")
        self.dim = n
        self.match_tol = match_tol
        self._xs = np.stack([x for x, _ in pairs])
        self._fxs = np.stack([fx for _, fx in pairs])

    @property
    def inputs(self):
        return list(self._xs)

    def __call__(self, x):
        dist = np.linalg.norm(self._xs - np.asarray(x)[None], axis=(1, 2))
        k = int(np.argmin(dist))
        if dist[k] > self.match_tol:
            raise MissingProbeError(f"no table entry within {self.match_tol:g} of the probe")
        return self._fxs[k].copy()

    def as_oracle(self):
        return SphereOracle(self.dim, self)
