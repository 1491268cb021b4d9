# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled cyclic one-sided Jacobi sweeps on complex columns."""

from libc.math cimport sqrt, fabs


def jacobi_sweeps(double complex[:, ::1] at, double complex[:, ::1] vt,
                  double tol, double small, int max_sweeps):
    """Orthogonalize the rows of ``at`` in place, mirroring rotations on ``vt``.

    Rows of ``at`` are the columns of the matrix being decomposed. Returns the
    number of sweeps performed, or -1 if ``max_sweeps`` was exhausted.
    """
    cdef Py_ssize_t n = at.shape[0]
    cdef Py_ssize_t m = at.shape[1]
    cdef Py_ssize_t p, q, k
    cdef int sweep
    cdef bint rotated
    cdef double alpha, beta, gr, gi, g, zeta, t, c, s, er, ei
    cdef double complex x, y, phase, cphase

    for sweep in range(max_sweeps):
        rotated = False
        for p in range(n - 1):
            for q in range(p + 1, n):
                alpha = 0.0
                beta = 0.0
                gr = 0.0
                gi = 0.0
                for k in range(m):
                    x = at[p, k]
                    y = at[q, k]
                    alpha += x.real * x.real + x.imag * x.imag
                    beta += y.real * y.real + y.imag * y.imag
                    # conj(x) * y
                    gr += x.real * y.real + x.imag * y.imag
                    gi += x.real * y.imag - x.imag * y.real
                if alpha <= small or beta <= small:
                    continue
                g = sqrt(gr * gr + gi * gi)
                if g <= tol * sqrt(alpha) * sqrt(beta):
                    continue
                rotated = True
                er = gr / g
                ei = gi / g
                zeta = (beta - alpha) / (2.0 * g)
                if zeta >= 0.0:
                    t = 1.0 / (zeta + sqrt(1.0 + zeta * zeta))
                else:
                    t = -1.0 / (-zeta + sqrt(1.0 + zeta * zeta))
                c = 1.0 / sqrt(1.0 + t * t)
                s = c * t
                phase = er + 1j * ei
                cphase = er - 1j * ei
                for k in range(m):
                    x = at[p, k]
                    y = at[q, k]
                    at[p, k] = c * x - s * cphase * y
                    at[q, k] = s * phase * x + c * y
                for k in range(vt.shape[1]):
                    x = vt[p, k]
                    y = vt[q, k]
                    vt[p, k] = c * x - s * cphase * y
                    vt[q, k] = s * phase * x + c * y
        if not rotated:
            return sweep + 1
    return -1
