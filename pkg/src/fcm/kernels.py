"""Hot numeric kernels: B-spline evaluation and local accumulation.

Two interchangeable implementations live here.  The loop-based one is
compiled with numba; the vectorized numpy one serves as a fallback and as
the reference in the benchmark.  Selection happens at import time: set
``FCM_NUMBA=0`` to force the numpy path, ``FCM_NUMBA=1`` to require numba.

All accumulators mirror contributions onto both triangle halves so the
assembled matrix is bitwise symmetric, not just symmetric up to roundoff.
"""

import os

import numpy as np


def _want_numba() -> bool:
    flag = os.environ.get("FCM_NUMBA", "").strip().lower()
    if flag in ("0", "false", "off", "no"):
        return False
    try:
        import numba  # noqa: F401
    except ImportError:
        if flag in ("1", "true", "on", "yes"):
            raise ImportError("FCM_NUMBA=1 set but numba is not importable")
        return False
    return True


USING_NUMBA = _want_numba()


# ---------------------------------------------------------------------------
# scalar B-spline recursion (numba-compilable)
# ---------------------------------------------------------------------------

def _ders_basis_scalar(knots, p, span, x, out):
    """Evaluate the p+1 B-splines alive on ``span`` at ``x``.

    Fills ``out`` of shape (3, p+1) with values, first and second
    derivatives.  Triangular-table form of the Cox-de Boor recursion with
    the standard derivative back-substitution; valid for x in
    [knots[span], knots[span+1]] (closed, so edge points are fine).
    """
    ndu = np.empty((p + 1, p + 1))
    a = np.empty((2, p + 1))
    left = np.empty(p + 1)
    right = np.empty(p + 1)

    ndu[0, 0] = 1.0
    for j in range(1, p + 1):
        left[j] = x - knots[span + 1 - j]
        right[j] = knots[span + j] - x
        saved = 0.0
        for r in range(j):
            ndu[j, r] = right[r + 1] + left[j - r]
            temp = ndu[r, j - 1] / ndu[j, r]
            ndu[r, j] = saved + right[r + 1] * temp
            saved = left[j - r] * temp
        ndu[j, j] = saved

    for j in range(p + 1):
        out[0, j] = ndu[j, p]

    nd = 2  # derivative orders carried
    for r in range(p + 1):
        s1 = 0
        s2 = 1
        a[0, 0] = 1.0
        for k in range(1, nd + 1):
            d = 0.0
            rk = r - k
            pk = p - k
            if r >= k:
                a[s2, 0] = a[s1, 0] / ndu[pk + 1, rk]
                d = a[s2, 0] * ndu[rk, pk]
            j1 = 1 if rk >= -1 else -rk
            j2 = k - 1 if r - 1 <= pk else p - r
            for j in range(j1, j2 + 1):
                a[s2, j] = (a[s1, j] - a[s1, j - 1]) / ndu[pk + 1, rk + j]
                d += a[s2, j] * ndu[rk + j, pk]
            if r <= pk:
                a[s2, k] = -a[s1, k - 1] / ndu[pk + 1, r]
                d += a[s2, k] * ndu[r, pk]
            out[k, r] = d
            s1, s2 = s2, s1

    fac = float(p)
    for k in range(1, nd + 1):
        for j in range(p + 1):
            out[k, j] *= fac
        fac *= p - k


def _element_blocks_loop(pts, ox, oy, h, p, ex, ey):
    """Tensor basis values on one element at given physical points.

    Returns (val, gx, gy, lap), each (npts, (p+1)**2), local index
    m = b*(p+1) + a for x-basis a, y-basis b (x fastest).  Derivatives are
    physical (scaled by 1/h, 1/h^2).
    """
    n = pts.shape[0]
    q1 = p + 1
    m = q1 * q1
    val = np.empty((n, m))
    gx = np.empty((n, m))
    gy = np.empty((n, m))
    lap = np.empty((n, m))
    dx = np.empty((3, q1))
    dy = np.empty((3, q1))
    # local integer knot lattice; element spans [p, p+1]
    knots = np.empty(2 * p + 2)
    for j in range(2 * p + 2):
        knots[j] = float(j)
    inv_h = 1.0 / h
    inv_h2 = inv_h * inv_h
    for k in range(n):
        u = (pts[k, 0] - ox) * inv_h - ex
        v = (pts[k, 1] - oy) * inv_h - ey
        _ders_basis_scalar(knots, p, p, u + p, dx)
        _ders_basis_scalar(knots, p, p, v + p, dy)
        for b in range(q1):
            for a in range(q1):
                i = b * q1 + a
                val[k, i] = dx[0, a] * dy[0, b]
                gx[k, i] = dx[1, a] * dy[0, b] * inv_h
                gy[k, i] = dx[0, a] * dy[1, b] * inv_h
                lap[k, i] = (dx[2, a] * dy[0, b] + dx[0, a] * dy[2, b]) * inv_h2
    return val, gx, gy, lap


def _acc_same_loop(w, A, coef, K):
    """K += coef * sum_q w[q] * A[q,:] A[q,:]^T, mirrored exactly."""
    n, m = A.shape
    for q in range(n):
        c = coef * w[q]
        for i in range(m):
            ci = c * A[q, i]
            for j in range(i, m):
                t = ci * A[q, j]
                K[i, j] += t
                if i != j:
                    K[j, i] += t


def _acc_pair_loop(w, A, B, coef, K):
    """K += coef * sum_q w[q] * (A_i B_j + A_j B_i), mirrored exactly."""
    n, m = A.shape
    for q in range(n):
        c = coef * w[q]
        for i in range(m):
            for j in range(i, m):
                t = c * (A[q, i] * B[q, j] + A[q, j] * B[q, i])
                K[i, j] += t
                if i != j:
                    K[j, i] += t


def _acc_rhs_loop(w, f, A, coef, F):
    """F += coef * sum_q w[q] f[q] A[q,:]."""
    n, m = A.shape
    for q in range(n):
        c = coef * w[q] * f[q]
        for i in range(m):
            F[i] += c * A[q, i]


# ---------------------------------------------------------------------------
# vectorized numpy twins
# ---------------------------------------------------------------------------

def _ders_basis_batch(p, t):
    """Vectorized Cox-de Boor on the integer knot lattice, span [p, p+1].

    t is an array of parameters in [p, p+1]; returns (3, p+1, n).
    """
    n = t.shape[0]
    knots = np.arange(2 * p + 2, dtype=float)
    span = p
    ndu = np.empty((p + 1, p + 1, n))
    left = np.empty((p + 1, n))
    right = np.empty((p + 1, n))
    ndu[0, 0] = 1.0
    for j in range(1, p + 1):
        left[j] = t - knots[span + 1 - j]
        right[j] = knots[span + j] - t
        saved = np.zeros(n)
        for r in range(j):
            ndu[j, r] = right[r + 1] + left[j - r]
            temp = ndu[r, j - 1] / ndu[j, r]
            ndu[r, j] = saved + right[r + 1] * temp
            saved = left[j - r] * temp
        ndu[j, j] = saved

    out = np.empty((3, p + 1, n))
    out[0] = ndu[:, p, :]
    a = np.empty((2, p + 1, n))
    for r in range(p + 1):
        s1, s2 = 0, 1
        a[0, 0] = 1.0
        for k in range(1, 3):
            d = np.zeros(n)
            rk = r - k
            pk = p - k
            if r >= k:
                a[s2, 0] = a[s1, 0] / ndu[pk + 1, rk]
                d = a[s2, 0] * ndu[rk, pk]
            j1 = 1 if rk >= -1 else -rk
            j2 = k - 1 if r - 1 <= pk else p - r
            for j in range(j1, j2 + 1):
                a[s2, j] = (a[s1, j] - a[s1, j - 1]) / ndu[pk + 1, rk + j]
                d = d + a[s2, j] * ndu[rk + j, pk]
            if r <= pk:
                a[s2, k] = -a[s1, k - 1] / ndu[pk + 1, r]
                d = d + a[s2, k] * ndu[r, pk]
            out[k, r] = d
            s1, s2 = s2, s1

    fac = float(p)
    for k in range(1, 3):
        out[k] *= fac
        fac *= p - k
    return out


def _element_blocks_numpy(pts, ox, oy, h, p, ex, ey):
    n = pts.shape[0]
    q1 = p + 1
    u = (pts[:, 0] - ox) / h - ex + p
    v = (pts[:, 1] - oy) / h - ey + p
    X = _ders_basis_batch(p, u)  # (3, q1, n)
    Y = _ders_basis_batch(p, v)
    # outer products over the two axes; local index m = b*q1 + a (x fastest)
    def tensor(dx, dy):
        return (Y[dy][:, None, :] * X[dx][None, :, :]).reshape(q1 * q1, n).T

    val = tensor(0, 0)
    gx = tensor(1, 0) / h
    gy = tensor(0, 1) / h
    lap = (tensor(2, 0) + tensor(0, 2)) / (h * h)
    return (np.ascontiguousarray(val), np.ascontiguousarray(gx),
            np.ascontiguousarray(gy), np.ascontiguousarray(lap))


def _acc_same_numpy(w, A, coef, K):
    # einsum does not guarantee M[i,j] == M[j,i] bitwise, so mirror the
    # lower triangle explicitly to keep the assembled matrix symmetric
    M = np.einsum("q,qi,qj->ij", w, A, A)
    L = np.tril(M)
    K += coef * (L + np.tril(M, -1).T)


def _acc_pair_numpy(w, A, B, coef, K):
    M = np.einsum("q,qi,qj->ij", w, A, B)
    K += coef * (M + M.T)


def _acc_rhs_numpy(w, f, A, coef, F):
    F += coef * np.einsum("q,q,qi->i", w, f, A)


# ---------------------------------------------------------------------------
# implementation selection
# ---------------------------------------------------------------------------

element_blocks_numpy = _element_blocks_numpy
acc_same_numpy = _acc_same_numpy
acc_pair_numpy = _acc_pair_numpy
acc_rhs_numpy = _acc_rhs_numpy

if USING_NUMBA:
    import numba

    _jit = numba.njit(cache=True)
    # jit the scalar recursion first so the element kernel can call it
    _ders_basis_scalar = _jit(_ders_basis_scalar)
    element_blocks_numba = _jit(_element_blocks_loop)
    acc_same_numba = _jit(_acc_same_loop)
    acc_pair_numba = _jit(_acc_pair_loop)
    acc_rhs_numba = _jit(_acc_rhs_loop)

    element_blocks = element_blocks_numba
    acc_same = acc_same_numba
    acc_pair = acc_pair_numba
    acc_rhs = acc_rhs_numba
else:
    element_blocks_numba = None
    acc_same_numba = None
    acc_pair_numba = None
    acc_rhs_numba = None

    element_blocks = _element_blocks_numpy
    acc_same = _acc_same_numpy
    acc_pair = _acc_pair_numpy
    acc_rhs = _acc_rhs_numpy


def ders_basis_point(knots, p, span, x):
    """Values/first/second derivatives of the p+1 splines on ``span`` at x.

    General (possibly non-uniform) knot vector; returns (3, p+1).
    """
    out = np.empty((3, p + 1))
    _ders_basis_scalar(np.asarray(knots, float), p, span, float(x), out)
    return out
