"""Pure-Python cyclic one-sided Jacobi sweeps (fallback for the compiled kernel)."""

import math


def _rotate(rows, p, q, c, sp, sc):
    xs, ys = rows[p], rows[q]
    rows[p] = [c * x - sc * y for x, y in zip(xs, ys)]
    rows[q] = [sp * x + c * y for x, y in zip(xs, ys)]


def jacobi_sweeps(at, vt, tol, small, max_sweeps):
    """Same contract as the compiled ``tingley._jacobi.jacobi_sweeps``.

    Works on Python lists of complex rows; ``at`` and ``vt`` are numpy arrays
    written back in place on return.
    """
    n = at.shape[0]
    rows = at.tolist()
    vrows = vt.tolist()
    result = -1
    for sweep in range(max_sweeps):
        rotated = False
        for p in range(n - 1):
            for q in range(p + 1, n):
                alpha = 0.0
                beta = 0.0
                gamma = 0j
                for x, y in zip(rows[p], rows[q]):
                    alpha += x.real * x.real + x.imag * x.imag
                    beta += y.real * y.real + y.imag * y.imag
                    gamma += x.conjugate() * y
                if alpha <= small or beta <= small:
                    continue
                g = abs(gamma)
                if g <= tol * math.sqrt(alpha) * math.sqrt(beta):
                    continue
                rotated = True
                phase = gamma / g
                zeta = (beta - alpha) / (2.0 * g)
                if zeta >= 0.0:
                    t = 1.0 / (zeta + math.sqrt(1.0 + zeta * zeta))
                else:
                    t = -1.0 / (-zeta + math.sqrt(1.0 + zeta * zeta))
                c = 1.0 / math.sqrt(1.0 + t * t)
                s = c * t
                sp = s * phase
                sc = s * phase.conjugate()
                _rotate(rows, p, q, c, sp, sc)
                _rotate(vrows, p, q, c, sp, sc)
        if not rotated:
            result = sweep + 1
            break
    at[:] = rows
    vt[:] = vrows
    return result
