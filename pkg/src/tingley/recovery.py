"""Recovering the linear or conjugate-linear extension of a sphere isometry.

Only oracle evaluations are used. The pipeline:

1. send the diagonal matrix units back to themselves with a pair of
   unitaries (:func:`align_diagonal`);
2. read the variant tag off the ``(0, 1)`` corner (:func:`classify_2x2`);
3. read one corner phase per remaining index from the first row;
4. fold all phases into diagonal unitaries and verify the resulting
   canonical map against the oracle on random sphere points.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import (
    FaceTransportError,
    OracleInconsistentError,
    PreconditionError,
    UnsupportedDimensionError,
)
from .faces import FaceDescriptor, face_contains, is_pure_atom
from .generators import random_density, random_sphere_point, spawn_seeds
from .geometry import PureAtom, is_orthogonal, trace_norm
from .matrix import haar_unitary, is_unitary, matrix_to_json, matrix_unit, polar_support, svd
from .oracle import IsometryVariant, SphereOracle, Variant

PHASE_TOL = 1e-6
RESIDUAL_TOL = 1e-7
DEFAULT_N_VERIFY = 200


@dataclass
class CheckReport:
    """Named boolean checks plus the worst defect seen for each."""

    checks: dict = field(default_factory=dict)
    worst: dict = field(default_factory=dict)
    samples: int = 0

    def record(self, name, ok, defect=0.0):
        self.checks[name] = self.checks.get(name, True) and bool(ok)
        self.worst[name] = max(self.worst.get(name, 0.0), float(defect))

    @property
    def passed(self):
        return all(self.checks.values())

    @property
    def failing(self):
        return [name for name, ok in self.checks.items() if not ok]

    def to_dict(self):
        return {
            "passed": self.passed,
            "samples": self.samples,
            "checks": dict(self.checks),
            "worst": dict(self.worst),
            "failing": self.failing,
        }


@dataclass
class RecoveryReport:
    variant: IsometryVariant
    max_residual: float
    mean_residual: float
    samples_used: int
    checks_passed: list
    probes_used: int = 0

    @property
    def tag(self):
        return self.variant.tag

    @property
    def succeeded(self):
        return self.max_residual <= RESIDUAL_TOL and all(ok for _, ok in self.checks_passed)

    def to_dict(self):
        return {
            "tag": self.variant.tag.value,
            "u": matrix_to_json(self.variant.u),
            "v": matrix_to_json(self.variant.v),
            "max_residual": self.max_residual,
            "mean_residual": self.mean_residual,
            "samples_used": self.samples_used,
            "probes_used": self.probes_used,
            "checks_passed": [{"name": name, "ok": ok} for name, ok in self.checks_passed],
        }


def _orthogonal_pair(n, rng):
    # Two sphere points supported on complementary blocks of common frames.
    left = haar_unitary(n, rng)
    right = haar_unitary(n, rng)
    k = int(rng.integers(1, n))
    a = rng.dirichlet(np.ones(k))
    b = rng.dirichlet(np.ones(n - k))
    x = (left[:, :k] * a) @ right[:, :k].conj().T
    y = (left[:, k:] * b) @ right[:, k:].conj().T
    return x, y


def verify_sphere_isometry(f, n_samples=50, seed=0, tol=1e-8):
    """Sample the oracle and check it behaves like a surjective sphere isometry.

    Checks (named in the returned :class:`CheckReport`):

    ``sphere``
        images have unit trace norm;
    ``isometry``
        ``| ||f(x)-f(y)|| - ||x-y|| | <= tol`` on random pairs;
    ``orthogonality_forward``
        orthogonal pairs map to orthogonal pairs;
    ``orthogonality_backward``
        non-orthogonal pairs map to non-orthogonal pairs;
    ``extreme_points``
        pure atoms map to pure atoms.

    Violations are reported, never raised.
    """
    if n_samples < 2:
        raise PreconditionError("n_samples must be at least 2")
    n = f.dim
    rng = np.random.default_rng(seed)
    report = CheckReport(samples=n_samples)
    for _ in range(n_samples):
        x = random_sphere_point(n, int(rng.integers(1, n + 1)), rng)
        y = random_sphere_point(n, int(rng.integers(1, n + 1)), rng)
        fx, fy = f(x), f(y)
        for img in (fx, fy):
            d = abs(trace_norm(img) - 1.0)
            report.record("sphere", d <= tol, d)
        d = abs(trace_norm(fx - fy) - trace_norm(x - y))
        report.record("isometry", d <= tol, d)
        if not is_orthogonal(x, y, tol):
            report.record("orthogonality_backward", not is_orthogonal(fx, fy, tol))

        if n >= 2:
            a, b = _orthogonal_pair(n, rng)
            report.record("orthogonality_forward", is_orthogonal(f(a), f(b), tol))

        atom = random_sphere_point(n, 1, rng)
        report.record("extreme_points", is_pure_atom(f(atom), tol))
    return report


def _as_matrix(e):
    return e.matrix if isinstance(e, PureAtom) else np.asarray(e, dtype=np.complex128)


def phase_behavior(f, e0, tol=PHASE_TOL):
    """``+1`` if ``f(i e0) = i f(e0)``, ``-1`` if ``f(i e0) = -i f(e0)``.

    Raises:
        OracleInconsistentError: if neither identity holds within ``tol``.
    """
    e = _as_matrix(e0)
    fe = f(e)
    fie = f(1j * e)
    if trace_norm(fie - 1j * fe) <= tol:
        return 1
    if trace_norm(fie + 1j * fe) <= tol:
        return -1
    raise OracleInconsistentError(
        "phase_behavior", "f(i e) is neither i f(e) nor -i f(e)")


def align_diagonal(f, tol=1e-8):
    """Unitaries ``(u1, w1)`` with ``u1 f(E_kk) w1 = E_kk`` for every ``k``.

    Raises:
        OracleInconsistentError: if some ``f(E_kk)`` is not a pure atom or the
            images are not mutually orthogonal.
    """
    n = f.dim
    images = [f(matrix_unit(n, k, k)) for k in range(n)]
    lefts, rights = [], []
    for k, img in enumerate(images):
        if not is_pure_atom(img, tol):
            raise OracleInconsistentError("align_diagonal", f"f(E_{k}{k}) is not a pure atom")
        U, _, V = svd(img)
        lefts.append(U[:, 0])
        rights.append(V[:, 0])
    for j in range(n):
        for k in range(j + 1, n):
            if not is_orthogonal(images[j], images[k], tol):
                raise OracleInconsistentError(
                    "align_diagonal", f"f(E_{j}{j}) and f(E_{k}{k}) are not orthogonal")
    u1 = np.column_stack(lefts).conj().T
    w1 = np.column_stack(rights)
    if not (is_unitary(u1, tol) and is_unitary(w1, tol)):
        raise OracleInconsistentError("align_diagonal", "image frames are not orthonormal")
    for k, img in enumerate(images):
        if trace_norm(u1 @ img @ w1 - matrix_unit(n, k, k)) > tol:
            raise OracleInconsistentError("align_diagonal", f"E_{k}{k} not restored")
    return u1, w1


def aligned_oracle(f, u1, w1):
    return SphereOracle(f.dim, lambda x: u1 @ f(x) @ w1)


def restrict_to_corner(g, i, j, tol=PHASE_TOL):
    """The 2x2 oracle obtained by running ``g`` on the ``{i, j}`` corner.

    ``g`` must leave that corner invariant (true once the diagonal is aligned).
    """
    idx = [i, j]

    def corner(x2):
        x = np.zeros((g.dim, g.dim), dtype=np.complex128)
        x[np.ix_(idx, idx)] = x2
        y = g(x)
        block = y[np.ix_(idx, idx)]
        leak = np.linalg.norm(y) ** 2 - np.linalg.norm(block) ** 2
        if leak > tol ** 2:
            raise OracleInconsistentError("corner", f"image leaves the ({i},{j}) corner")
        return block

    return SphereOracle(2, corner)


def _read_phase(y, pos, tol):
    # The probed image must be a unimodular multiple of a single matrix unit at ``pos``.
    mu = y[pos]
    if abs(mu) < 1.0 - tol:
        return None
    mu = mu / abs(mu)
    expected = np.zeros_like(y)
    expected[pos] = mu
    if trace_norm(y - expected) > tol:
        return None
    return mu


def _counter_phase(y, i, j, tol):
    # Returns (transposed, mu) for an image of E_ij, or None.
    mu = _read_phase(y, (i, j), tol)
    if mu is not None:
        return False, mu
    mu = _read_phase(y, (j, i), tol)
    if mu is not None:
        return True, mu
    return None


def classify_2x2(g, tol=PHASE_TOL):
    """Variant of a diagonal-aligned 2x2 oracle, with its diagonal phase unitaries.

    Transpose type is read from where ``g(E_12)`` lands; conjugate type from
    ``phase_behavior`` on ``E_11``. The returned variant has ``u = diag(1, d)``
    and ``v = diag(1, conj(d))``.

    Raises:
        OracleInconsistentError: if ``g`` is not aligned, ``g(E_12)`` is not a
            unimodular multiple of a single off-diagonal unit, or the phases of
            ``g(E_12)`` and ``g(E_21)`` do not pair up.
    """
    if g.dim != 2:
        raise UnsupportedDimensionError("classify_2x2 needs a 2x2 oracle")
    for k in range(2):
        e = matrix_unit(2, k, k)
        if trace_norm(g(e) - e) > tol:
            raise OracleInconsistentError("classify_2x2", "corner diagonal is not aligned")
    read = _counter_phase(g(matrix_unit(2, 0, 1)), 0, 1, tol)
    if read is None:
        raise OracleInconsistentError(
            "classify_2x2", "g(E_12) is not concentrated on one counter-diagonal entry")
    transposed, mu = read
    back = _counter_phase(g(matrix_unit(2, 1, 0)), 1, 0, tol)
    if back is None or back[0] != transposed or abs(back[1] - mu.conjugate()) > tol:
        raise OracleInconsistentError("classify_2x2", "phases of g(E_12) and g(E_21) do not pair")
    sign = phase_behavior(g, matrix_unit(2, 0, 0), tol)
    if phase_behavior(g, matrix_unit(2, 1, 1), tol) != sign:
        raise OracleInconsistentError("classify_2x2", "diagonal atoms disagree on phase behavior")
    d = mu if transposed else mu.conjugate()
    tag = Variant.from_flags(transposed, sign < 0)
    return IsometryVariant(tag, np.diag([1.0, d]), np.diag([1.0, d.conjugate()]))


class _Counter:
    def __init__(self, f):
        self.f = f
        self.calls = 0

    def __call__(self, x):
        self.calls += 1
        return self.f(x)


def recovery_probes(n):
    """Every matrix :func:`recover_isometry` evaluates before verification."""
    probes = [matrix_unit(n, k, k) for k in range(n)]
    probes += [1j * matrix_unit(n, 0, 0), 1j * matrix_unit(n, 1, 1)]
    for k in range(1, n):
        probes += [matrix_unit(n, 0, k), matrix_unit(n, k, 0)]
    return probes


def recover_isometry(f, n_verify=DEFAULT_N_VERIFY, seed=0, tol=RESIDUAL_TOL,
                     probe_tol=PHASE_TOL, verify_points=None):
    """Recover ``(tag, u, v)`` with ``f(x) = u T(x) v`` on the sphere.

    Args:
        f: the oracle; ``f.dim >= 2``.
        n_verify: number of random sphere points for the final check.
        seed: seed for those points.
        tol: acceptance bound on the worst trace-norm residual.
        probe_tol: tolerance for reading phases off structured probes.
        verify_points: explicit verification points, replacing the random ones.

    Returns:
        RecoveryReport whose ``max_residual <= tol``.

    Raises:
        UnsupportedDimensionError: for ``f.dim < 2``.
        OracleInconsistentError: naming the failing stage; when verification
            fails the exception carries the report.
    """
    n = f.dim
    if n < 2:
        raise UnsupportedDimensionError("recovery needs n >= 2; the variants coincide at n = 1")
    counted = _Counter(f)
    f = SphereOracle(n, counted)
    checks = []

    u1, w1 = align_diagonal(f)
    checks.append(("align_diagonal", True))
    g = aligned_oracle(f, u1, w1)

    corner = classify_2x2(restrict_to_corner(g, 0, 1, probe_tol), probe_tol)
    checks.append(("classify_2x2", True))
    tag = corner.tag
    phases = [1.0 + 0j, corner.u[1, 1]]

    for k in range(2, n):
        read = _counter_phase(g(matrix_unit(n, 0, k)), 0, k, probe_tol)
        if read is None or read[0] != tag.transposes:
            raise OracleInconsistentError("corner_phases", f"g(E_0{k}) is off pattern")
        mu = read[1]
        back = _counter_phase(g(matrix_unit(n, k, 0)), k, 0, probe_tol)
        if back is None or back[0] != tag.transposes or abs(back[1] - mu.conjugate()) > probe_tol:
            raise OracleInconsistentError("corner_phases", f"phases at index {k} do not pair")
        phases.append(mu if tag.transposes else mu.conjugate())
    checks.append(("corner_phases", True))
    probes = counted.calls

    d = np.diag(phases)
    variant = IsometryVariant(tag, u1.conj().T @ d, d.conj() @ w1.conj().T)

    if verify_points is None:
        rng = np.random.default_rng(seed)
        verify_points = (random_sphere_point(n, int(rng.integers(1, n + 1)), rng)
                         for _ in range(n_verify))
    residuals = np.array([trace_norm(f(x) - variant.apply(x)) for x in verify_points])
    if residuals.size == 0:
        raise PreconditionError("no verification points")
    ok = bool(residuals.max() <= tol)
    checks.append(("verification", ok))
    report = RecoveryReport(variant, float(residuals.max()), float(residuals.mean()),
                            int(residuals.size), checks, probes)
    if not ok:
        raise OracleInconsistentError(
            "verification", f"max residual {report.max_residual:.3e} exceeds {tol:g}", report)
    return report


def homogeneous_extension(f):
    """``T(x) = ||x||_1 f(x / ||x||_1)``, ``T(0) = 0``."""

    def extended(x):
        x = np.asarray(x, dtype=np.complex128)
        r = trace_norm(x)
        if r == 0.0:
            return np.zeros_like(x)
        return r * f(x / r)

    return extended


@dataclass
class FaceTransport:
    passed: bool
    w_prime: np.ndarray
    max_violation: float


def check_face_transport(f, w, n_samples=50, seed=0, tol=1e-7):
    """Map samples of the maximal face coded by unitary ``w`` and find their face.

    Samples are ``rho w^*`` for random states ``rho`` (the first one full rank).
    The target unitary ``w'`` is the unitary polar factor of the sum of the
    images' supports; every image must then lie in the face coded by ``w'``.

    Raises:
        FaceTransportError: if the supports do not determine a unitary.
    """
    if not is_unitary(w):
        raise PreconditionError("w must be unitary")
    n = f.dim
    seeds = spawn_seeds(seed, n_samples)
    images = []
    for j, s in enumerate(seeds):
        rank = n if j == 0 else int(np.random.default_rng(s).integers(1, n + 1))
        x = random_density(n, rank, s) @ w.conj().T
        images.append(f(x))
    total = sum(polar_support(y) for y in images)
    U, sigma, V = svd(total)
    if sigma[-1] <= 1e-8 * sigma[0]:
        raise FaceTransportError("image supports do not span a unitary")
    w_prime = U @ V.conj().T
    face = FaceDescriptor.from_partial_isometry(w_prime)
    violation = max(max(abs(trace_norm(y) - 1.0), abs(np.trace(y @ w_prime) - 1.0))
                    for y in images)
    passed = all(face_contains(face, y, tol) for y in images)
    return FaceTransport(passed, w_prime, float(violation))
