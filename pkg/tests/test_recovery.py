import numpy as np
import pytest

from conftest import lapack_trace_norm
from tingley.errors import (
    MissingProbeError,
    OracleInconsistentError,
    PreconditionError,
    UnsupportedDimensionError,
)
from tingley.generators import (
    GenSpec,
    generate_isometry,
    generate_variant,
    random_sphere_point,
)
from tingley.geometry import PureAtom, is_orthogonal, trace_norm
from tingley.matrix import haar_unitary, matrix_unit, polar_support, svd
from tingley.oracle import IsometryVariant, SphereOracle, TableOracle, Variant
from tingley.recovery import (
    align_diagonal,
    aligned_oracle,
    check_face_transport,
    classify_2x2,
    homogeneous_extension,
    phase_behavior,
    recover_isometry,
    recovery_probes,
    restrict_to_corner,
    verify_sphere_isometry,
)


def identity(n):
    return SphereOracle(n, lambda x: x)


def conj_oracle(n):
    return SphereOracle(n, np.conj)


def support_transpose(n):
    # norm-preserving on the sphere, not isometric
    def f(x):
        s = polar_support(x).T
        return s / trace_norm(s)

    return SphereOracle(n, f)


def action_gap(f, g, n, samples=100, seed=0):
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(samples):
        x = random_sphere_point(n, int(rng.integers(1, n + 1)), rng)
        worst = max(worst, lapack_trace_norm(f(x) - g(x)))
    return worst


class TestVerify:
    def test_identity_passes(self):
        assert verify_sphere_isometry(identity(3), n_samples=20).passed

    def test_support_map_fails_isometry(self):
        f = support_transpose(2)
        # explicit violated pair: E11 and a full-rank diagonal state
        x, y = matrix_unit(2, 0, 0), np.diag([0.9, 0.1])
        assert abs(trace_norm(f(x) - f(y)) - trace_norm(x - y)) > 0.1
        report = verify_sphere_isometry(f, n_samples=20)
        assert not report.passed and "isometry" in report.failing

    def test_generated_adjoint_passes(self):
        f = generate_isometry(GenSpec("Adjoint", 4, 2))
        report = verify_sphere_isometry(f, n_samples=30, seed=5)
        assert report.passed
        assert set(report.checks) == {"sphere", "isometry", "orthogonality_forward",
                                      "orthogonality_backward", "extreme_points"}

    def test_needs_two_samples(self):
        with pytest.raises(PreconditionError):
            verify_sphere_isometry(identity(2), n_samples=1)


class TestPhaseBehavior:
    def test_examples(self):
        e = matrix_unit(2, 0, 0)
        assert phase_behavior(identity(2), e) == 1
        assert phase_behavior(conj_oracle(2), PureAtom([1, 0], [1, 0])) == -1

    def test_linear_oracle_commutes_with_i(self, rng):
        f = generate_isometry(GenSpec("Linear", 4, 8))
        for _ in range(20):
            assert phase_behavior(f, random_sphere_point(4, 1, rng)) == 1

    def test_inconsistent(self):
        f = SphereOracle(2, lambda x: x if np.isrealobj(x) or np.all(x.imag == 0) else x.real + 0j)
        with pytest.raises(OracleInconsistentError) as err:
            phase_behavior(f, matrix_unit(2, 0, 0))
        assert err.value.stage == "phase_behavior"


class TestAlignDiagonal:
    def test_identity(self):
        u1, w1 = align_diagonal(identity(3))
        np.testing.assert_allclose(u1 @ w1, np.eye(3), atol=1e-14)
        np.testing.assert_allclose(np.abs(u1), np.eye(3), atol=1e-14)

    def test_two_sided_unitary(self):
        u0, v0 = haar_unitary(4, 1), haar_unitary(4, 2)
        f = IsometryVariant("Linear", u0, v0).as_oracle()
        u1, w1 = align_diagonal(f)
        d = u1 @ u0
        np.testing.assert_allclose(d, np.diag(np.diag(d)), atol=1e-12)
        np.testing.assert_allclose(v0 @ w1, d.conj(), atol=1e-12)
        for k in range(4):
            e = matrix_unit(4, k, k)
            np.testing.assert_allclose(u1 @ f(e) @ w1, e, atol=1e-8)

    def test_transpose_needs_no_correction(self):
        u1, w1 = align_diagonal(SphereOracle(3, np.transpose))
        np.testing.assert_allclose(np.abs(u1), np.eye(3), atol=1e-14)

    def test_rejects_non_atom_images(self):
        with pytest.raises(OracleInconsistentError, match="align_diagonal"):
            align_diagonal(SphereOracle(2, lambda x: np.eye(2) / 2))

    def test_rejects_non_orthogonal_images(self):
        with pytest.raises(OracleInconsistentError, match="orthogonal"):
            align_diagonal(SphereOracle(2, lambda x: matrix_unit(2, 0, 0)))


class TestClassify2x2:
    def test_identity(self):
        v = classify_2x2(identity(2))
        assert v.tag is Variant.LINEAR
        np.testing.assert_allclose(v.u, np.eye(2))
        np.testing.assert_allclose(v.v, np.eye(2))

    def test_adjoint(self):
        assert classify_2x2(SphereOracle(2, lambda x: x.conj().T)).tag is Variant.ADJOINT

    @pytest.mark.parametrize("tag", list(Variant))
    def test_all_tags(self, tag):
        g = IsometryVariant(tag, np.eye(2), np.eye(2)).as_oracle()
        assert classify_2x2(g).tag is tag

    def test_recovers_diagonal_phase(self):
        mu = np.exp(0.7j)
        du, dv = np.diag([1, mu]), np.diag([1, np.conj(mu)])
        v = classify_2x2(IsometryVariant("Linear", du, dv).as_oracle())
        assert v.tag is Variant.LINEAR
        assert abs(v.u[1, 1] - mu) <= 1e-8
        np.testing.assert_allclose(v.u, du, atol=1e-8)
        np.testing.assert_allclose(v.v, dv, atol=1e-8)

    def test_rejects_spread_image(self):
        def f(x):
            y = x.copy()
            if x[0, 1] != 0:
                y = np.array([[0, 0.6], [0.8, 0]], dtype=complex)
            return y

        with pytest.raises(OracleInconsistentError, match="counter-diagonal"):
            classify_2x2(SphereOracle(2, f))

    def test_rejects_unaligned(self):
        with pytest.raises(OracleInconsistentError, match="aligned"):
            classify_2x2(SphereOracle(2, lambda x: x[::-1, ::-1].copy()))

    def test_corner_restriction(self):
        f = generate_isometry(GenSpec("Transpose", 4, 5))
        g = aligned_oracle(f, *align_diagonal(f))
        assert classify_2x2(restrict_to_corner(g, 1, 3)).tag is Variant.TRANSPOSE


class TestRecover:
    def test_identity(self):
        report = recover_isometry(identity(3))
        assert report.tag is Variant.LINEAR
        assert report.max_residual <= 1e-12
        assert report.max_residual >= report.mean_residual >= 0
        assert report.samples_used == 200

    def test_conjugate_haar(self):
        spec = GenSpec("Conjugate", 4, 17)
        f = generate_isometry(spec)
        report = recover_isometry(f, seed=3)
        assert report.tag is Variant.CONJUGATE
        assert action_gap(f, report.variant.apply, 4, samples=200) <= 1e-8
        # (u, v) agree with the generator only up to a joint phase
        gen = generate_variant(spec)
        lam = report.variant.u @ gen.u.conj().T
        np.testing.assert_allclose(lam, lam[0, 0] * np.eye(4), atol=1e-8)
        np.testing.assert_allclose(report.variant.v, np.conj(lam[0, 0]) * gen.v, atol=1e-8)

    def test_identity_from_non_maximal_elements(self, rng):
        # rank < n points are fixed; full-rank values are assembled from atoms
        n = 3

        def f(x):
            U, sigma, V = svd(x)
            if sigma[-1] <= 1e-10:
                return x
            return sum(s * np.outer(U[:, k], V[:, k].conj()) for k, s in enumerate(sigma))

        report = recover_isometry(SphereOracle(n, f))
        assert report.tag is Variant.LINEAR
        for _ in range(200):
            x = random_sphere_point(n, n, rng)
            assert lapack_trace_norm(report.variant.apply(x) - x) <= 1e-8

    def test_rejects_n1(self):
        with pytest.raises(UnsupportedDimensionError):
            recover_isometry(identity(1))

    def test_stage_named_on_bad_oracle(self):
        # isometric on atoms of the diagonal, wrong elsewhere
        def f(x):
            return np.diag(np.diag(x)) / trace_norm(np.diag(np.diag(x))) if np.diag(x).any() else x

        with pytest.raises(OracleInconsistentError) as err:
            recover_isometry(SphereOracle(3, f))
        assert err.value.stage in {"classify_2x2", "corner", "corner_phases", "verification"}

    def test_verification_failure_carries_report(self):
        # agrees with the identity on every structured probe, differs on generic points
        probes = recovery_probes(3)

        def f(x):
            if any(np.allclose(x, p) for p in probes):
                return x
            return x.T

        with pytest.raises(OracleInconsistentError) as err:
            recover_isometry(SphereOracle(3, f))
        assert err.value.stage == "verification"
        assert err.value.report.max_residual > 1e-3
        assert ("verification", False) in err.value.report.checks_passed

    def test_table_oracle(self):
        variant = generate_variant(GenSpec("Adjoint", 3, 4))
        points = [random_sphere_point(3, 2, s) for s in range(30)]
        xs = recovery_probes(3) + points
        table = TableOracle([(x, variant.apply(x)) for x in xs])
        report = recover_isometry(table.as_oracle(), verify_points=points)
        assert report.tag is Variant.ADJOINT and report.samples_used == 30

    def test_table_oracle_missing_probe(self):
        table = TableOracle([(np.eye(2) / 2, np.eye(2) / 2)])
        with pytest.raises(MissingProbeError):
            recover_isometry(table.as_oracle())

    def test_probe_budget_is_linear_in_n(self):
        for n in (2, 4, 6):
            report = recover_isometry(generate_isometry(GenSpec("Linear", n, n)), n_verify=5)
            assert report.probes_used <= len(recovery_probes(n)) + 8


class TestInvariants:
    @pytest.mark.parametrize("tag", list(Variant))
    def test_gauge_invariance(self, tag):
        spec = GenSpec(tag, 3, 21)
        base = generate_variant(spec)
        lam = np.exp(1.3j)
        f1 = base.as_oracle()
        f2 = generate_isometry(spec, u=lam * base.u, v=np.conj(lam) * base.v)
        assert action_gap(f1, f2, 3) <= 1e-12
        r1, r2 = recover_isometry(f1), recover_isometry(f2)
        assert r1.tag is r2.tag is tag
        assert action_gap(r1.variant.apply, r2.variant.apply, 3) <= 1e-8

    @pytest.mark.parametrize("tag", list(Variant))
    def test_orthogonality_transport(self, tag, rng):
        f = generate_isometry(GenSpec(tag, 4, 8))
        variant = recover_isometry(f).variant
        for _ in range(200):
            left, right = haar_unitary(4, rng), haar_unitary(4, rng)
            k = int(rng.integers(1, 4))
            a = (left[:, :k] * rng.dirichlet(np.ones(k))) @ right[:, :k].conj().T
            b = (left[:, k:] * rng.dirichlet(np.ones(4 - k))) @ right[:, k:].conj().T
            fa, fb = f(a), f(b)
            assert is_orthogonal(fa, fb)
            assert is_orthogonal(variant.inverse(fa), variant.inverse(fb))
            np.testing.assert_allclose(variant.inverse(fa), a, atol=1e-10)

    @pytest.mark.parametrize("tag", list(Variant))
    def test_phase_coherence(self, tag, rng):
        f = generate_isometry(GenSpec(tag, 3, 9))
        for _ in range(10):
            e0 = random_sphere_point(3, 1, rng)
            sign = phase_behavior(f, e0)
            assert sign == (-1 if tag.conjugates else 1)
            for theta in rng.uniform(0, 2 * np.pi, 8):
                lam = np.exp(1j * theta)
                assert lapack_trace_norm(f(lam * e0) - lam ** sign * f(e0)) <= 1e-7

    @pytest.mark.parametrize("tag", list(Variant))
    def test_diagonal_affine_transport(self, tag, rng):
        f = generate_isometry(GenSpec(tag, 2, 10))
        for _ in range(30):
            frame_l, frame_r = haar_unitary(2, rng), haar_unitary(2, rng)
            e1 = np.outer(frame_l[:, 0], frame_r[:, 0].conj())
            e2 = np.outer(frame_l[:, 1], frame_r[:, 1].conj())
            t = rng.uniform(-1, 1)
            l1, l2 = t, (1 - abs(t)) * rng.choice([-1, 1])
            lhs = f(l1 * e1 + l2 * e2)
            assert lapack_trace_norm(lhs - (l1 * f(e1) + l2 * f(e2))) <= 1e-7


class TestHomogeneousExtension:
    def test_identity(self):
        t2 = homogeneous_extension(identity(2))
        e = matrix_unit(2, 0, 0)
        np.testing.assert_allclose(t2(2 * e), 2 * e)
        np.testing.assert_array_equal(t2(np.zeros((2, 2))), np.zeros((2, 2)))

    @pytest.mark.parametrize("tag", list(Variant))
    def test_additivity(self, tag, rng):
        t2 = homogeneous_extension(generate_isometry(GenSpec(tag, 3, 12)))
        for _ in range(200):
            x = random_sphere_point(3, 3, rng) * rng.uniform(0.1, 5)
            y = random_sphere_point(3, int(rng.integers(1, 4)), rng) * rng.uniform(0.1, 5)
            gap = lapack_trace_norm(t2(x + y) - t2(x) - t2(y))
            assert gap <= 1e-7 * (lapack_trace_norm(x) + lapack_trace_norm(y))

    def test_non_isometry_fails_additivity(self):
        t2 = homogeneous_extension(support_transpose(2))
        x, y = np.diag([0.9, 0.1]), matrix_unit(2, 0, 1)
        assert lapack_trace_norm(t2(x + y) - t2(x) - t2(y)) > 1e-2


class TestFaceTransport:
    def test_identity(self):
        result = check_face_transport(identity(3), np.eye(3))
        assert result.passed
        np.testing.assert_allclose(result.w_prime, np.eye(3), atol=1e-10)

    def test_two_sided(self):
        u0, v0 = haar_unitary(3, 4), haar_unitary(3, 5)
        result = check_face_transport(IsometryVariant("Linear", u0, v0).as_oracle(), np.eye(3))
        assert result.passed
        np.testing.assert_allclose(result.w_prime, v0.conj().T @ u0.conj().T, atol=1e-8)

    def test_transpose_fixes_states(self):
        result = check_face_transport(SphereOracle(2, np.transpose), np.eye(2))
        assert result.passed
        np.testing.assert_allclose(result.w_prime, np.eye(2), atol=1e-10)

    def test_support_map_preserves_maximal_faces(self):
        # s(x)^t / rank sends the face of w into the face of conj(w), though it is
        # not an isometry: face transport alone does not certify isometries
        w = haar_unitary(3, 1)
        result = check_face_transport(support_transpose(3), w, n_samples=20)
        assert result.passed
        np.testing.assert_allclose(result.w_prime, w.conj(), atol=1e-8)

    def test_entry_scaling_flagged(self):
        def f(x):
            y = x.copy()
            y[0, 1] *= 3
            return y / trace_norm(y)

        result = check_face_transport(SphereOracle(3, f), haar_unitary(3, 1), n_samples=20)
        assert not result.passed and result.max_violation > 1e-2

    def test_requires_unitary(self):
        with pytest.raises(PreconditionError):
            check_face_transport(identity(2), matrix_unit(2, 0, 0))
