# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled multiprecision kernels working directly on MPFR limbs.

Inputs and outputs are numpy object arrays of ``gmpy2.mpc``; internally the
real and imaginary parts live in flat ``mpfr_t`` buffers and the arithmetic
loops run without the GIL.
"""

from gmpy2 cimport *
from libc.stdlib cimport malloc, free
import gmpy2 as _gmpy2
import numpy as np

cdef extern from "mpfr.h":
    void mpfr_init2(mpfr_ptr x, mpfr_prec_t p) nogil
    void mpfr_clear(mpfr_ptr x) nogil
    int mpfr_set_ui(mpfr_ptr r, unsigned long v, mpfr_rnd_t rnd) nogil
    int mpfr_set_si(mpfr_ptr r, long v, mpfr_rnd_t rnd) nogil
    int mpfr_set4 "mpfr_set"(mpfr_ptr r, mpfr_srcptr a, mpfr_rnd_t rnd) nogil
    int mpfr_mul(mpfr_ptr r, mpfr_srcptr a, mpfr_srcptr b, mpfr_rnd_t rnd) nogil
    int mpfr_add(mpfr_ptr r, mpfr_srcptr a, mpfr_srcptr b, mpfr_rnd_t rnd) nogil
    int mpfr_sub(mpfr_ptr r, mpfr_srcptr a, mpfr_srcptr b, mpfr_rnd_t rnd) nogil
    int mpfr_div(mpfr_ptr r, mpfr_srcptr a, mpfr_srcptr b, mpfr_rnd_t rnd) nogil
    int mpfr_sqrt(mpfr_ptr r, mpfr_srcptr a, mpfr_rnd_t rnd) nogil
    int mpfr_neg(mpfr_ptr r, mpfr_srcptr a, mpfr_rnd_t rnd) nogil
    int mpfr_abs(mpfr_ptr r, mpfr_srcptr a, mpfr_rnd_t rnd) nogil
    int mpfr_hypot(mpfr_ptr r, mpfr_srcptr a, mpfr_srcptr b, mpfr_rnd_t rnd) nogil
    int mpfr_sqr(mpfr_ptr r, mpfr_srcptr a, mpfr_rnd_t rnd) nogil
    int mpfr_fma(mpfr_ptr r, mpfr_srcptr a, mpfr_srcptr b, mpfr_srcptr c, mpfr_rnd_t rnd) nogil
    int mpfr_ui_div(mpfr_ptr r, unsigned long a, mpfr_srcptr b, mpfr_rnd_t rnd) nogil
    int mpfr_mul_2si(mpfr_ptr r, mpfr_srcptr a, long e, mpfr_rnd_t rnd) nogil
    int mpfr_add_ui(mpfr_ptr r, mpfr_srcptr a, unsigned long b, mpfr_rnd_t rnd) nogil
    int mpfr_cmp(mpfr_srcptr a, mpfr_srcptr b) nogil
    int mpfr_sgn(mpfr_srcptr a) nogil
    int mpfr_zero_p(mpfr_srcptr a) nogil

import_gmpy2()

cdef mpfr_rnd_t RN = MPFR_RNDN


cdef class _Buf:
    """Flat array of ``count`` complex numbers stored as two mpfr arrays."""

    cdef __mpfr_struct* re
    cdef __mpfr_struct* im
    cdef Py_ssize_t count

    def __cinit__(self, Py_ssize_t count, long bits):
        cdef Py_ssize_t i
        self.count = 0
        self.re = <__mpfr_struct*>malloc(count * sizeof(__mpfr_struct))
        self.im = <__mpfr_struct*>malloc(count * sizeof(__mpfr_struct))
        if self.re == NULL or self.im == NULL:
            raise MemoryError()
        for i in range(count):
            mpfr_init2(&self.re[i], bits)
            mpfr_init2(&self.im[i], bits)
            mpfr_set_ui(&self.re[i], 0, RN)
            mpfr_set_ui(&self.im[i], 0, RN)
        self.count = count

    def __dealloc__(self):
        cdef Py_ssize_t i
        for i in range(self.count):
            mpfr_clear(&self.re[i])
            mpfr_clear(&self.im[i])
        free(self.re)
        free(self.im)


cdef _Buf _load(arr, long bits):
    flat = arr.reshape(-1)
    cdef Py_ssize_t n = flat.shape[0]
    cdef _Buf buf = _Buf(n, bits)
    cdef Py_ssize_t i
    cdef mpc z
    cdef mpfr f
    for i in range(n):
        x = flat[i]
        if MPFR_Check(x):
            f = <mpfr>x
            mpfr_set4(&buf.re[i], f.f, RN)
            continue
        if not MPC_Check(x):
            with _gmpy2.context(precision=bits):
                x = _gmpy2.mpc(x)
        z = <mpc>x
        mpfr_set4(&buf.re[i], z.c[0].re, RN)
        mpfr_set4(&buf.im[i], z.c[0].im, RN)
    return buf


cdef object _store(_Buf buf, Py_ssize_t rows, Py_ssize_t cols, long bits):
    out = np.empty(rows * cols, dtype=object)
    cdef Py_ssize_t i
    cdef mpc z
    for i in range(rows * cols):
        z = GMPy_MPC_New(bits, bits, NULL)
        mpfr_set4(z.c[0].re, &buf.re[i], RN)
        mpfr_set4(z.c[0].im, &buf.im[i], RN)
        out[i] = z
    return out.reshape(rows, cols)


cdef inline void _cmul_acc(mpfr_ptr accr, mpfr_ptr acci,
                           mpfr_ptr ar, mpfr_ptr ai, mpfr_ptr br, mpfr_ptr bi,
                           mpfr_ptr t) noexcept nogil:
    # acc += a * b
    mpfr_mul(t, ar, br, RN)
    mpfr_add(accr, accr, t, RN)
    mpfr_mul(t, ai, bi, RN)
    mpfr_sub(accr, accr, t, RN)
    mpfr_mul(t, ar, bi, RN)
    mpfr_add(acci, acci, t, RN)
    mpfr_mul(t, ai, br, RN)
    mpfr_add(acci, acci, t, RN)


def matmul(a, b, long bits):
    """Complex matrix product ``a @ b`` rounded at ``bits``."""
    cdef Py_ssize_t n = a.shape[0], m = a.shape[1], p = b.shape[1]
    if b.shape[0] != m:
        raise ValueError("inner dimensions differ")
    cdef _Buf A = _load(a, bits)
    cdef _Buf B = _load(b, bits)
    cdef _Buf C = _Buf(n * p, bits)
    cdef _Buf T = _Buf(1, bits)
    cdef Py_ssize_t i, j, k
    with nogil:
        for i in range(n):
            for j in range(p):
                for k in range(m):
                    _cmul_acc(&C.re[i * p + j], &C.im[i * p + j],
                              &A.re[i * m + k], &A.im[i * m + k],
                              &B.re[k * p + j], &B.im[k * p + j], &T.re[0])
    return _store(C, n, p, bits)


def vdv(v, dvals, long bits):
    """Return ``V diag(dvals) V^dagger``."""
    cdef Py_ssize_t n = v.shape[0]
    cdef _Buf V = _load(v, bits)
    cdef _Buf D = _load(np.asarray(list(dvals), dtype=object), bits)
    cdef _Buf W = _Buf(n * n, bits)
    cdef _Buf C = _Buf(n * n, bits)
    cdef _Buf T = _Buf(2, bits)
    cdef Py_ssize_t i, j, k
    cdef mpfr_ptr t = &T.re[0]
    with nogil:
        for i in range(n):
            for k in range(n):
                _cmul_acc(&W.re[i * n + k], &W.im[i * n + k],
                          &V.re[i * n + k], &V.im[i * n + k],
                          &D.re[k], &D.im[k], t)
        # conjugate V in place, then C = W V^T
        for i in range(n * n):
            mpfr_neg(&V.im[i], &V.im[i], RN)
        for i in range(n):
            for j in range(n):
                for k in range(n):
                    _cmul_acc(&C.re[i * n + j], &C.im[i * n + j],
                              &W.re[i * n + k], &W.im[i * n + k],
                              &V.re[j * n + k], &V.im[j * n + k], t)
    return _store(C, n, n, bits)


cdef void _rot(mpfr_ptr xr, mpfr_ptr xi, mpfr_ptr yr, mpfr_ptr yi,
               mpfr_ptr c, mpfr_ptr s, mpfr_ptr pr, mpfr_ptr pi,
               mpfr_ptr wr, mpfr_ptr wi, mpfr_ptr u, mpfr_ptr t) noexcept nogil:
    # w = ph * y ; x' = c x - s w ; y' = s x + c w
    mpfr_mul(wr, pr, yr, RN)
    mpfr_mul(t, pi, yi, RN)
    mpfr_sub(wr, wr, t, RN)
    mpfr_mul(wi, pr, yi, RN)
    mpfr_mul(t, pi, yr, RN)
    mpfr_add(wi, wi, t, RN)
    # new y real/imag into u/t then copy
    mpfr_mul(u, s, xr, RN)
    mpfr_mul(t, c, wr, RN)
    mpfr_add(u, u, t, RN)
    mpfr_mul(xr, c, xr, RN)
    mpfr_mul(t, s, wr, RN)
    mpfr_sub(xr, xr, t, RN)
    mpfr_set4(yr, u, RN)
    mpfr_mul(u, s, xi, RN)
    mpfr_mul(t, c, wi, RN)
    mpfr_add(u, u, t, RN)
    mpfr_mul(xi, c, xi, RN)
    mpfr_mul(t, s, wi, RN)
    mpfr_sub(xi, xi, t, RN)
    mpfr_set4(yi, u, RN)


def eigh(a, long bits, int max_sweeps=80):
    """Cyclic complex Jacobi diagonalization of a Hermitian matrix.

    Returns ascending eigenvalues (list of mpfr) and the eigenvector matrix
    (object array of mpc, eigenvectors in columns).
    """
    cdef Py_ssize_t n = a.shape[0]
    cdef _Buf A = _load(a, bits)
    cdef _Buf V = _Buf(n * n, bits)
    cdef _Buf S = _Buf(16, bits)
    cdef Py_ssize_t i, k, p, q, sweep
    cdef mpfr_ptr off = &S.re[0]
    cdef mpfr_ptr scale = &S.re[1]
    cdef mpfr_ptr tol = &S.re[2]
    cdef mpfr_ptr g = &S.re[3]
    cdef mpfr_ptr theta = &S.re[4]
    cdef mpfr_ptr tt = &S.re[5]
    cdef mpfr_ptr c = &S.re[6]
    cdef mpfr_ptr s = &S.re[7]
    cdef mpfr_ptr pr = &S.re[8]
    cdef mpfr_ptr pim = &S.re[9]
    cdef mpfr_ptr wr = &S.re[10]
    cdef mpfr_ptr wi = &S.re[11]
    cdef mpfr_ptr u = &S.re[12]
    cdef mpfr_ptr t = &S.re[13]
    cdef mpfr_ptr tg = &S.re[14]
    cdef bint done = False
    cdef __mpfr_struct* d
    with nogil:
        for i in range(n):
            mpfr_set_ui(&V.re[i * n + i], 1, RN)
            # Hermitian input: use upper triangle, mirror to lower
            for k in range(i + 1, n):
                mpfr_set4(&A.re[k * n + i], &A.re[i * n + k], RN)
                mpfr_neg(&A.im[k * n + i], &A.im[i * n + k], RN)
            mpfr_set_ui(&A.im[i * n + i], 0, RN)
        d = A.re  # diagonal entries d[i*n+i]
        mpfr_set_ui(tol, 1, RN)
        mpfr_mul_2si(tol, tol, -2 * (bits - 4), RN)
        for sweep in range(max_sweeps):
            mpfr_set_ui(off, 0, RN)
            for p in range(n - 1):
                for q in range(p + 1, n):
                    mpfr_sqr(t, &A.re[p * n + q], RN)
                    mpfr_add(off, off, t, RN)
                    mpfr_sqr(t, &A.im[p * n + q], RN)
                    mpfr_add(off, off, t, RN)
            if mpfr_zero_p(off):
                break
            mpfr_mul_2si(scale, off, 1, RN)
            for i in range(n):
                mpfr_sqr(t, &d[i * n + i], RN)
                mpfr_add(scale, scale, t, RN)
            mpfr_mul(t, tol, scale, RN)
            if mpfr_cmp(off, t) <= 0:
                break
            for p in range(n - 1):
                for q in range(p + 1, n):
                    mpfr_hypot(g, &A.re[p * n + q], &A.im[p * n + q], RN)
                    if mpfr_zero_p(g):
                        continue
                    # conj(apq)/g
                    mpfr_div(pr, &A.re[p * n + q], g, RN)
                    mpfr_div(pim, &A.im[p * n + q], g, RN)
                    mpfr_neg(pim, pim, RN)
                    mpfr_sub(theta, &d[q * n + q], &d[p * n + p], RN)
                    mpfr_div(theta, theta, g, RN)
                    mpfr_mul_2si(theta, theta, -1, RN)
                    mpfr_sqr(tt, theta, RN)
                    mpfr_add_ui(tt, tt, 1, RN)
                    mpfr_sqrt(tt, tt, RN)
                    mpfr_abs(t, theta, RN)
                    mpfr_add(tt, tt, t, RN)
                    mpfr_ui_div(tt, 1, tt, RN)
                    if mpfr_sgn(theta) < 0:
                        mpfr_neg(tt, tt, RN)
                    mpfr_sqr(c, tt, RN)
                    mpfr_add_ui(c, c, 1, RN)
                    mpfr_sqrt(c, c, RN)
                    mpfr_ui_div(c, 1, c, RN)
                    mpfr_mul(s, tt, c, RN)
                    for k in range(n):
                        if k == p or k == q:
                            continue
                        _rot(&A.re[k * n + p], &A.im[k * n + p],
                             &A.re[k * n + q], &A.im[k * n + q],
                             c, s, pr, pim, wr, wi, u, t)
                        mpfr_set4(&A.re[p * n + k], &A.re[k * n + p], RN)
                        mpfr_neg(&A.im[p * n + k], &A.im[k * n + p], RN)
                        mpfr_set4(&A.re[q * n + k], &A.re[k * n + q], RN)
                        mpfr_neg(&A.im[q * n + k], &A.im[k * n + q], RN)
                    mpfr_mul(tg, tt, g, RN)
                    mpfr_sub(&d[p * n + p], &d[p * n + p], tg, RN)
                    mpfr_add(&d[q * n + q], &d[q * n + q], tg, RN)
                    mpfr_set_ui(&A.re[p * n + q], 0, RN)
                    mpfr_set_ui(&A.im[p * n + q], 0, RN)
                    mpfr_set_ui(&A.re[q * n + p], 0, RN)
                    mpfr_set_ui(&A.im[q * n + p], 0, RN)
                    for k in range(n):
                        _rot(&V.re[k * n + p], &V.im[k * n + p],
                             &V.re[k * n + q], &V.im[k * n + q],
                             c, s, pr, pim, wr, wi, u, t)
    vals = []
    cdef mpfr f
    for i in range(n):
        f = GMPy_MPFR_New(bits, NULL)
        mpfr_set4(f.f, &A.re[i * n + i], RN)
        vals.append(f)
    vmat = _store(V, n, n, bits)
    order = sorted(range(n), key=lambda j: vals[j])
    return [vals[j] for j in order], vmat[:, order]
