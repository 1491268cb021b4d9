"""Seeded generators: canonical isometries, sphere points, perturbed oracles."""

import hashlib
from dataclasses import dataclass

import numpy as np

from .errors import PreconditionError, UnsupportedDimensionError
from .geometry import trace_norm
from .matrix import haar_unitary
from .oracle import IsometryVariant, SphereOracle, Variant


def spawn_seeds(seed, count):
    """``count`` independent integer seeds derived from ``seed``."""
    children = np.random.SeedSequence(seed).spawn(count)
    return [int(c.generate_state(1, dtype=np.uint64)[0]) for c in children]


@dataclass(frozen=True)
class GenSpec:
    tag: Variant
    n: int
    seed: int

    def __post_init__(self):
        object.__setattr__(self, "tag", Variant(self.tag))
        if self.n < 2:
            raise UnsupportedDimensionError(f"generators need n >= 2, got {self.n}")


def generate_variant(spec, u=None, v=None):
    """The :class:`IsometryVariant` behind ``generate_isometry(spec)``.

    ``u`` and ``v`` override the Haar draws.
    """
    su, sv = spawn_seeds(spec.seed, 2)
    u = haar_unitary(spec.n, su) if u is None else u
    v = haar_unitary(spec.n, sv) if v is None else v
    return IsometryVariant(spec.tag, u, v)


def generate_isometry(spec, u=None, v=None):
    return generate_variant(spec, u, v).as_oracle()


def simplex_point(k, seed):
    """Uniform point of the probability simplex in ``R^k`` (sorted-uniform spacings)."""
    rng = np.random.default_rng(seed)
    cuts = np.sort(rng.random(k - 1))
    return np.diff(np.concatenate(([0.0], cuts, [1.0])))


def random_sphere_point(n, rank, seed):
    """``sum_k lambda_k eta_k xi_k^*`` with Haar frames and simplex weights."""
    if not 1 <= rank <= n:
        raise PreconditionError(f"rank must lie in [1, {n}], got {rank}")
    rng = np.random.default_rng(seed)
    left = haar_unitary(n, rng)[:, :rank]
    right = haar_unitary(n, rng)[:, :rank]
    lam = simplex_point(rank, rng)
    return (left * lam) @ right.conj().T


def random_density(n, rank, seed):
    """Random state: positive, trace one, of the given rank."""
    rng = np.random.default_rng(seed)
    frame = haar_unitary(n, rng)[:, :rank]
    lam = simplex_point(rank, rng)
    return (frame * lam) @ frame.conj().T


def _input_seed(seed, x):
    digest = hashlib.sha256(np.ascontiguousarray(x).tobytes()).digest()
    return [seed, int.from_bytes(digest[:8], "little")]


def perturb_oracle(f, eps, seed):
    """Wrap ``f`` so each output moves by at most ``eps`` in trace norm.

    The step direction is a deterministic function of ``(seed, x)``, so the
    wrapped oracle stays deterministic. Outputs are renormalized onto the
    sphere. ``eps == 0`` returns ``f`` unchanged.
    """
    if eps < 0:
        raise PreconditionError("eps must be non-negative")
    if eps == 0:
        return f

    def noisy(x):
        rng = np.random.default_rng(_input_seed(seed, x))
        n = f.dim
        e = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
        # half step: renormalization can at most double the displacement
        y = f(x) + 0.5 * eps * e / trace_norm(e)
        return y / trace_norm(y)

    return SphereOracle(f.dim, noisy)
