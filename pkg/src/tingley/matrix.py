"""Dense complex matrix substrate: SVD, support partial isometries, Haar unitaries.

Matrices are plain ``numpy`` arrays of dtype ``complex128`` with shape
``(n, n)``. :func:`as_cmatrix` is the single validation point.
"""

from typing import NamedTuple

import numpy as np

from . import _backend
from .errors import ConvergenceError, InvalidDimensionError, MatrixFormatError

RANK_TOL = 1e-10
SVD_TOL = 1e-13
MAX_SWEEPS = 60

# Columns below this fraction of ||a||_F are treated as numerically null during sweeps.
_NULL_COLUMN = 1e-15
_TIE_TOL = 1e-13


class SvdFactors(NamedTuple):
    """``a = U @ diag(sigma) @ V^*`` with ``sigma`` non-increasing."""

    U: np.ndarray
    sigma: np.ndarray
    V: np.ndarray

    def reconstruct(self):
        return (self.U * self.sigma) @ self.V.conj().T


def as_cmatrix(a, name="matrix"):
    """Validate and convert ``a`` to a square finite complex128 array."""
    arr = np.asarray(a, dtype=np.complex128)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise MatrixFormatError(f"{name} must be square, got shape {arr.shape}")
    if arr.shape[0] == 0:
        raise InvalidDimensionError(f"{name} has dimension 0")
    if not np.all(np.isfinite(arr)):
        raise MatrixFormatError(f"{name} has non-finite entries")
    return arr


def matrix_unit(n, i, j):
    """The matrix unit ``E_ij`` (zero-based indices)."""
    e = np.zeros((n, n), dtype=np.complex128)
    e[i, j] = 1.0
    return e


def _complete_basis(cols, keep):
    # Replace the columns not in ``keep`` with an orthonormal completion,
    # drawn deterministically from the standard basis by Gram-Schmidt.
    n = cols.shape[0]
    basis = [cols[:, k] for k in range(n) if keep[k]]
    fill = []
    for j in range(n):
        if len(basis) + len(fill) == n:
            break
        v = np.zeros(n, dtype=np.complex128)
        v[j] = 1.0
        for _ in range(2):
            for b in basis + fill:
                v = v - (b.conj() @ v) * b
        nv = np.linalg.norm(v)
        if nv > 1e-8:
            fill.append(v / nv)
    out = cols.copy()
    it = iter(fill)
    for k in range(n):
        if not keep[k]:
            out[:, k] = next(it)
    return out


def _first_nonzero(col):
    mags = np.abs(col)
    idx = int(np.argmax(mags > 1e-10 * mags.max()))
    return idx


def svd(a, kernel=None):
    """Complex SVD by cyclic one-sided Jacobi rotations.

    Args:
        a: square complex matrix.
        kernel: optional sweep function overriding the import-time backend
            (see :func:`tingley._backend.available_kernels`).

    Returns:
        :class:`SvdFactors`. Each column of ``U`` is phase-normalized so its
        first nonzero entry is real positive; numerically equal singular values
        are ordered by (position, real part) of that entry.

    Raises:
        InvalidDimensionError: for a 0x0 input.
        ConvergenceError: if the sweeps do not converge in ``MAX_SWEEPS``.
    """
    a = as_cmatrix(a)
    n = a.shape[0]
    sweeps = kernel or _backend.jacobi_sweeps
    fro = float(np.linalg.norm(a))
    at = np.array(a.T, dtype=np.complex128, order="C", copy=True)
    vt = np.eye(n, dtype=np.complex128)
    small = (_NULL_COLUMN * fro) ** 2
    if sweeps(at, vt, SVD_TOL, small, MAX_SWEEPS) < 0:
        raise ConvergenceError(f"Jacobi SVD did not converge in {MAX_SWEEPS} sweeps")

    sigma = np.linalg.norm(at, axis=1)
    keep = sigma > _NULL_COLUMN * fro
    U = np.zeros((n, n), dtype=np.complex128)
    U[:, keep] = at[keep].T / sigma[keep]
    U = _complete_basis(U, keep)
    V = vt.T.copy()

    for k in range(n):
        idx = _first_nonzero(U[:, k])
        ph = U[idx, k] / abs(U[idx, k])
        U[:, k] *= ph.conjugate()
        V[:, k] *= ph.conjugate()

    order = list(np.argsort(-sigma, kind="stable"))
    scale = sigma.max() if fro > 0 else 0.0
    start = 0
    while start < n:
        stop = start + 1
        while stop < n and sigma[order[start]] - sigma[order[stop]] <= _TIE_TOL * scale:
            stop += 1
        if stop - start > 1:
            def key(k):
                idx = _first_nonzero(U[:, k])
                return (idx, -U[idx, k].real, -U[idx, k].imag)

            order[start:stop] = sorted(order[start:stop], key=key)
        start = stop
    values = np.sort(sigma)[::-1]
    return SvdFactors(U[:, order], values, V[:, order])


def singular_values(a):
    return svd(a).sigma


def polar_support(a, rank_tol=RANK_TOL):
    """Support partial isometry ``s(a) = V_r U_r^*``, so ``tr(a s(a)) = ||a||_1``.

    Singular values at or below ``rank_tol * sigma[0]`` count as zero; the zero
    matrix has empty (zero) support.
    """
    if rank_tol <= 0:
        raise ValueError("rank_tol must be positive")
    U, sigma, V = svd(a)
    if sigma[0] == 0.0:
        return np.zeros_like(U)
    r = int(np.count_nonzero(sigma > rank_tol * sigma[0]))
    return V[:, :r] @ U[:, :r].conj().T


def haar_unitary(n, seed):
    """Haar-distributed ``n x n`` unitary, deterministic per seed.

    ``seed`` may be an int or a ``numpy.random.Generator``.
    """
    if n < 1:
        raise InvalidDimensionError(f"n must be >= 1, got {n}")
    rng = np.random.default_rng(seed)
    z = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / np.sqrt(2.0)
    q, r = np.linalg.qr(z)
    d = np.diagonal(r)
    return q * (d / np.abs(d))


def is_partial_isometry(w, tol=1e-9):
    w = as_cmatrix(w)
    return bool(np.linalg.norm(w @ w.conj().T @ w - w) <= tol)


def is_unitary(u, tol=1e-9):
    u = as_cmatrix(u)
    return bool(np.linalg.norm(u.conj().T @ u - np.eye(u.shape[0])) <= tol)


def matrix_to_json(a):
    """Shared matrix JSON form ``{"n", "re", "im"}`` (row-major)."""
    a = as_cmatrix(a)
    return {"n": int(a.shape[0]), "re": a.real.tolist(), "im": a.imag.tolist()}


def matrix_from_json(doc, name="matrix"):
    """Inverse of :func:`matrix_to_json`; errors name the offending field."""
    if not isinstance(doc, dict):
        raise MatrixFormatError(f"{name}: expected an object with fields n, re, im")
    for field in ("n", "re", "im"):
        if field not in doc:
            raise MatrixFormatError(f"{name}: missing field '{field}'")
    n = doc["n"]
    if isinstance(n, bool) or not isinstance(n, int) or n < 1:
        raise MatrixFormatError(f"{name}: field 'n' must be a positive integer")
    parts = {}
    for field in ("re", "im"):
        try:
            arr = np.array(doc[field], dtype=np.float64)
        except (TypeError, ValueError):
            raise MatrixFormatError(f"{name}: field '{field}' is not a numeric array") from None
        if arr.shape != (n, n):
            raise MatrixFormatError(
                f"{name}: field '{field}' has shape {arr.shape}, expected ({n}, {n})")
        if not np.all(np.isfinite(arr)):
            raise MatrixFormatError(f"{name}: field '{field}' has non-finite entries")
        parts[field] = arr
    return parts["re"] + 1j * parts["im"]
