"""Reference implementations that share no code with the package.

They use plain Python complex arithmetic, mpmath or scipy, never ddsim
helpers, so a bug in the package cannot hide in the oracle.
"""

from __future__ import annotations

import cmath
import math

import mpmath
import numpy as np
import scipy.linalg


def taylor_expm(a, terms: int = 30):
    """``exp(a)`` for a complex numpy matrix by Taylor series with 2^k scaling."""
    a = np.asarray(a, dtype=complex)
    n = a.shape[0]
    norm = max(sum(abs(a[i, j]) for j in range(n)) for i in range(n))
    k = max(0, int(math.ceil(math.log2(norm))) + 4) if norm > 0 else 0
    b = a / (2 ** k)
    term = np.eye(n, dtype=complex)
    out = np.eye(n, dtype=complex)
    for m in range(1, terms):
        term = term @ b / m
        out = out + term
    for _ in range(k):
        out = out @ out
    return out


def expi(h, t):
    """``exp(-i t h)`` via the Taylor oracle."""
    return taylor_expm(-1j * float(t) * np.asarray(h, dtype=complex))


def sequential_product(factors):
    """``F_L ... F_1`` for time-ordered factors ``F_1, ..., F_L``."""
    out = np.eye(factors[0].shape[0], dtype=complex)
    for f in factors:
        out = f @ out
    return out


PAULI = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}


def embed_last(op_s, bath_dim):
    return np.kron(np.eye(bath_dim), op_s)


def propagate(h, segments):
    """Propagator of ``(kind, ...)`` segments by scipy's expm in time order.

    Segments are ``('F', t)``, ``('P', axis, angle)`` or ``('R', axis, angle, width)``.
    """
    h = np.asarray(h, dtype=complex)
    bd = h.shape[0] // 2
    facs = []
    for seg in segments:
        if seg[0] == "F":
            facs.append(scipy.linalg.expm(-1j * float(seg[1]) * h))
        elif seg[0] == "P" and seg[1] == "I":
            # the identity "pulse" is a placeholder that does nothing
            facs.append(np.eye(h.shape[0], dtype=complex))
        elif seg[0] == "P":
            facs.append(embed_last(scipy.linalg.expm(-0.5j * seg[2] * PAULI[seg[1]]), bd))
        else:
            _, ax, ang, w = seg
            eta = ang / (2 * float(w))
            facs.append(scipy.linalg.expm(-1j * float(w) * (eta * embed_last(PAULI[ax], bd) + h)))
    return sequential_product(facs) if facs else np.eye(h.shape[0], dtype=complex)


def reduced_purity_loss(u, psi, rho_b):
    """``1 - Tr rho_S^2`` with the system as the last tensor factor."""
    psi = np.asarray(psi, dtype=complex)
    rho0 = np.kron(rho_b, np.outer(psi, psi.conj()))
    rho = u @ rho0 @ u.conj().T
    bd = rho_b.shape[0]
    r = rho.reshape(bd, 2, bd, 2)
    rs = np.einsum("ajak->jk", r)
    return 1 - np.real(np.trace(rs @ rs))


def mp_matrix(a, prec):
    with mpmath.workprec(prec):
        return mpmath.matrix([[mpmath.mpc(complex(x)) for x in row] for row in np.asarray(a)])


def mp_expi(h, t, prec):
    """``exp(-i t h)`` with mpmath at ``prec`` bits (Taylor/Pade inside mpmath)."""
    with mpmath.workprec(prec + 20):
        m = mp_matrix(h, prec + 20) * (-1j * mpmath.mpf(t))
        return mpmath.expm(m)


def random_hermitian(rng, n, scale=1.0):
    m = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    h = (m + m.conj().T) / 2
    return h * (scale / np.max(np.abs(np.linalg.eigvalsh(h))))


def random_unitary(rng, n):
    m = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    q, r = np.linalg.qr(m)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def spread(h):
    w = np.linalg.eigvalsh(np.asarray(h, dtype=complex))
    return float(w[-1] - w[0])


def ptrace_system_last(op, bath_dim):
    """Bath operators ``Tr_S[(I ⊗ σ) H] / 2`` by explicit index sums."""
    op = np.asarray(op, dtype=complex)
    out = {}
    for ax, s in PAULI.items():
        m = np.zeros((bath_dim, bath_dim), dtype=complex)
        for a in range(bath_dim):
            for b in range(bath_dim):
                acc = 0
                for i in range(2):
                    for j in range(2):
                        acc += s[j, i] * op[2 * a + i, 2 * b + j]
                m[a, b] = acc / 2
        out[ax] = m
    return out


def phase_of(z):
    return cmath.phase(z)
