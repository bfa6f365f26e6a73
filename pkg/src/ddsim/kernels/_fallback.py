"""Pure-Python multiprecision kernels on numpy object arrays of ``gmpy2.mpc``.

These mirror the compiled kernels in ``_mpcore`` entry for entry and are
used whenever the extension is unavailable or disabled.
"""

import gmpy2
import numpy as np

_ZERO_C = None


def _ctx(bits):
    return gmpy2.context(precision=bits)


def matmul(a, b, bits):
    """Complex matrix product ``a @ b`` rounded at ``bits``."""
    n, m = a.shape
    m2, p = b.shape
    if m != m2:
        raise ValueError("inner dimensions differ")
    with _ctx(bits):
        rows = [list(a[i]) for i in range(n)]
        cols = [list(b[:, j]) for j in range(p)]
        zero = gmpy2.mpc(0)
        out = np.empty((n, p), dtype=object)
        for i in range(n):
            ri = rows[i]
            for j in range(p):
                cj = cols[j]
                acc = zero
                for k in range(m):
                    acc = acc + ri[k] * cj[k]
                out[i, j] = acc
    return out


def eigh(a, bits, max_sweeps=80):
    """Cyclic complex Jacobi diagonalization of a Hermitian matrix.

    Parameters
    ----------
    a : ndarray of mpc
        Hermitian input, only the upper triangle and diagonal are read.
    bits : int
        Working precision.

    Returns
    -------
    w : list of mpfr
        Eigenvalues in ascending order.
    v : ndarray of mpc
        Unitary matrix whose columns are the matching eigenvectors.
    """
    n = a.shape[0]
    with _ctx(bits):
        zero = gmpy2.mpc(0)
        one = gmpy2.mpc(1)
        A = [[zero] * n for _ in range(n)]
        for i in range(n):
            for j in range(i + 1, n):
                A[i][j] = gmpy2.mpc(a[i, j])
                A[j][i] = A[i][j].conjugate()
        d = [gmpy2.mpc(a[i, i]).real for i in range(n)]
        V = [[one if i == j else zero for j in range(n)] for i in range(n)]
        tol = gmpy2.mpfr(2) ** (-2 * (bits - 4))
        for _ in range(max_sweeps):
            off = gmpy2.mpfr(0)
            for p in range(n - 1):
                for q in range(p + 1, n):
                    off += gmpy2.norm(A[p][q])
            scale = sum((x * x for x in d), gmpy2.mpfr(0)) + 2 * off
            if off == 0 or off <= tol * scale:
                break
            for p in range(n - 1):
                for q in range(p + 1, n):
                    apq = A[p][q]
                    g = abs(apq)
                    if g == 0:
                        continue
                    phc = apq.conjugate() / g
                    theta = (d[q] - d[p]) / (2 * g)
                    t = 1 / (abs(theta) + gmpy2.sqrt(theta * theta + 1))
                    if theta < 0:
                        t = -t
                    c = 1 / gmpy2.sqrt(t * t + 1)
                    s = t * c
                    for k in range(n):
                        if k == p or k == q:
                            continue
                        akp = A[k][p]
                        w = phc * A[k][q]
                        nkp = c * akp - s * w
                        nkq = s * akp + c * w
                        A[k][p] = nkp
                        A[p][k] = nkp.conjugate()
                        A[k][q] = nkq
                        A[q][k] = nkq.conjugate()
                    d[p] = d[p] - t * g
                    d[q] = d[q] + t * g
                    A[p][q] = zero
                    A[q][p] = zero
                    for k in range(n):
                        vkp = V[k][p]
                        w = phc * V[k][q]
                        V[k][p] = c * vkp - s * w
                        V[k][q] = s * vkp + c * w
        order = sorted(range(n), key=lambda i: d[i])
        w = [d[i] for i in order]
        v = np.empty((n, n), dtype=object)
        for i in range(n):
            for jj, j in enumerate(order):
                v[i, jj] = V[i][j]
    return w, v


def vdv(v, dvals, bits):
    """Return ``V diag(dvals) V^dagger``."""
    n = v.shape[0]
    with _ctx(bits):
        dl = [gmpy2.mpc(x) for x in dvals]
        W = [[v[i, k] * dl[k] for k in range(n)] for i in range(n)]
        Vc = [[v[j, k].conjugate() for k in range(n)] for j in range(n)]
        zero = gmpy2.mpc(0)
        out = np.empty((n, n), dtype=object)
        for i in range(n):
            wi = W[i]
            for j in range(n):
                vj = Vc[j]
                acc = zero
                for k in range(n):
                    acc = acc + wi[k] * vj[k]
                out[i, j] = acc
    return out
