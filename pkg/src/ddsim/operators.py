"""Precision-parametric dense operator algebra.

An :class:`OperatorMatrix` stores a square complex matrix either as a
``complex128`` numpy array (``bits <= 53``) or as a numpy object array of
``gmpy2.mpc`` values rounded at ``bits`` binary digits. All operations are
pure and return new matrices.

Real scalars produced by this module (norms, traces of Hermitian products,
eigenvalues) are ``float`` at double precision and ``gmpy2.mpfr`` above it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import gmpy2
import numpy as np

from . import kernels
from .errors import (
    BranchAmbiguity,
    DimMismatch,
    IoError,
    NotHermitian,
    NotUnitary,
    PrecisionMismatch,
)

FLOAT_BITS = 53
DEFAULT_ANALYSIS_BITS = 128

_PAULI = {
    "I": ((1, 0), (0, 1)),
    "X": ((0, 1), (1, 0)),
    "Y": ((0, -1j), (1j, 0)),
    "Z": ((1, 0), (0, -1)),
}


def mp_context(bits: int):
    """Return a gmpy2 context manager rounding at ``bits``."""
    return gmpy2.context(precision=max(int(bits), 2))


def to_mpfr(x, bits: int):
    """Convert a real scalar (float, int, str, Fraction, mpfr) to mpfr at ``bits``."""
    with mp_context(bits):
        if isinstance(x, Fraction):
            return gmpy2.mpfr(gmpy2.mpq(x.numerator, x.denominator))
        return gmpy2.mpfr(x)


def to_mpc(x, bits: int):
    """Convert a complex scalar to mpc at ``bits``."""
    with mp_context(bits):
        if isinstance(x, gmpy2.mpc):
            return gmpy2.mpc(x)
        if isinstance(x, (Fraction, str, gmpy2.mpfr)):
            return gmpy2.mpc(to_mpfr(x, bits))
        if isinstance(x, (int, np.integer)):
            return gmpy2.mpc(int(x))
        z = complex(x)
        return gmpy2.mpc(z.real, z.imag)


def real_scalar(x, bits: int):
    """Return ``x`` as float (double precision) or mpfr at ``bits``."""
    if bits <= FLOAT_BITS:
        return float(x)
    return to_mpfr(x, bits)


def _scalar(x, bits: int):
    if bits <= FLOAT_BITS:
        if isinstance(x, Fraction):
            return float(x)
        return complex(x) if not isinstance(x, (int, float)) else x
    return to_mpc(x, bits)


def _is_mp_array(data: np.ndarray) -> bool:
    return data.dtype == object


class OperatorMatrix:
    """Dense square complex matrix at a fixed binary precision.

    Parameters
    ----------
    entries : array_like
        Square 2-D array of complex values. Entries may be Python numbers,
        numpy scalars, strings, ``Fraction`` or gmpy2 values.
    bits : int, optional
        Working precision. Values up to 53 select the ``complex128`` backend.
    hermitian : bool, optional
        Flag the matrix as Hermitian. The flag is validated against the
        precision-dependent tolerance.
    """

    __slots__ = ("data", "bits", "hermitian")

    def __init__(self, entries, bits: int = FLOAT_BITS, hermitian: bool = False):
        bits = int(bits)
        if bits < 2:
            raise ValueError("precision must be at least 2 bits")
        if isinstance(entries, OperatorMatrix):
            entries = entries.data
        arr = np.asarray(entries, dtype=object if bits > FLOAT_BITS else None)
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1] or arr.shape[0] < 1:
            raise DimMismatch(f"expected a non-empty square matrix, got shape {arr.shape}")
        if bits <= FLOAT_BITS:
            if arr.dtype == object:
                data = np.array([[complex(_to_float_scalar(v)) for v in row] for row in arr])
            else:
                data = arr.astype(np.complex128)
        else:
            n = arr.shape[0]
            data = np.empty((n, n), dtype=object)
            for i in range(n):
                for j in range(n):
                    data[i, j] = to_mpc(arr[i, j], bits)
        object.__setattr__(self, "data", data)
        object.__setattr__(self, "bits", bits)
        object.__setattr__(self, "hermitian", False)
        if hermitian:
            if not self.is_hermitian():
                raise NotHermitian("matrix flagged Hermitian is not Hermitian")
            object.__setattr__(self, "hermitian", True)

    def __setattr__(self, name, value):
        raise AttributeError("OperatorMatrix is immutable")

    @classmethod
    def _wrap(cls, data: np.ndarray, bits: int, hermitian: bool = False) -> "OperatorMatrix":
        obj = object.__new__(cls)
        object.__setattr__(obj, "data", data)
        object.__setattr__(obj, "bits", bits)
        object.__setattr__(obj, "hermitian", hermitian)
        return obj

    # construction helpers
    @classmethod
    def identity(cls, dim: int, bits: int = FLOAT_BITS) -> "OperatorMatrix":
        return cls(np.eye(dim), bits, hermitian=True)

    @classmethod
    def zeros(cls, dim: int, bits: int = FLOAT_BITS) -> "OperatorMatrix":
        return cls(np.zeros((dim, dim)), bits, hermitian=True)

    @classmethod
    def pauli(cls, axis: str, bits: int = FLOAT_BITS) -> "OperatorMatrix":
        """Pauli matrix ``I``, ``X``, ``Y`` or ``Z``."""
        return cls(np.array(_PAULI[axis.upper()], dtype=complex), bits, hermitian=True)

    # basic properties
    @property
    def dim(self) -> int:
        return self.data.shape[0]

    @property
    def precision_bits(self) -> int:
        return self.bits

    @property
    def is_mp(self) -> bool:
        return self.bits > FLOAT_BITS

    def __repr__(self) -> str:
        return f"OperatorMatrix(dim={self.dim}, bits={self.bits})"

    def __getitem__(self, idx):
        return self.data[idx]

    def to_complex(self) -> np.ndarray:
        """Entries rounded to a ``complex128`` array."""
        if not self.is_mp:
            return self.data.copy()
        return np.array([[complex(v) for v in row] for row in self.data])

    def with_bits(self, bits: int) -> "OperatorMatrix":
        """Convert to another precision (exact when widening)."""
        if bits == self.bits:
            return self
        return OperatorMatrix(self.data, bits, hermitian=False)._reflag(self.hermitian)

    def _reflag(self, hermitian: bool) -> "OperatorMatrix":
        object.__setattr__(self, "hermitian", bool(hermitian))
        return self

    # arithmetic
    def _check(self, other: "OperatorMatrix"):
        if not isinstance(other, OperatorMatrix):
            raise TypeError("operand must be an OperatorMatrix")
        if other.bits != self.bits:
            raise PrecisionMismatch(f"{self.bits} vs {other.bits} bits")
        if other.dim != self.dim:
            raise DimMismatch(f"dims {self.dim} and {other.dim} differ")

    def _elementwise(self, fn, other=None, hermitian=False):
        if self.is_mp:
            with mp_context(self.bits):
                data = fn(self.data) if other is None else fn(self.data, other.data)
        else:
            data = fn(self.data) if other is None else fn(self.data, other.data)
        return OperatorMatrix._wrap(data, self.bits, hermitian)

    def __add__(self, other):
        self._check(other)
        return self._elementwise(np.add, other, self.hermitian and other.hermitian)

    def __sub__(self, other):
        self._check(other)
        return self._elementwise(np.subtract, other, self.hermitian and other.hermitian)

    def __neg__(self):
        return self._elementwise(np.negative, hermitian=self.hermitian)

    def __matmul__(self, other):
        self._check(other)
        if self.is_mp:
            data = kernels.matmul(self.data, other.data, self.bits)
        else:
            data = self.data @ other.data
        return OperatorMatrix._wrap(data, self.bits)

    def scale(self, c) -> "OperatorMatrix":
        """Multiply every entry by the scalar ``c``."""
        s = _scalar(c, self.bits)
        herm = self.hermitian and _is_real_scalar(s)
        return self._elementwise(lambda a: a * s, hermitian=herm)

    def __mul__(self, c):
        if isinstance(c, OperatorMatrix):
            raise TypeError("use @ for matrix products")
        return self.scale(c)

    __rmul__ = __mul__

    def dag(self) -> "OperatorMatrix":
        """Conjugate transpose."""
        return self._elementwise(lambda a: np.conj(a).T.copy(), hermitian=self.hermitian)

    def trace(self):
        """Complex trace (complex or mpc)."""
        if self.is_mp:
            with mp_context(self.bits):
                acc = gmpy2.mpc(0)
                for i in range(self.dim):
                    acc = acc + self.data[i, i]
            return acc
        return complex(np.trace(self.data))

    def max_abs(self):
        """Largest entry modulus."""
        if self.is_mp:
            with mp_context(self.bits):
                return max(abs(v) for v in self.data.flat)
        return float(np.max(np.abs(self.data)))

    def is_hermitian(self, rtol=None) -> bool:
        """Check ``A = A^dagger`` to ``2^(-bits+8)`` relative tolerance."""
        tol = rtol if rtol is not None else 2.0 ** (-self.bits + 8)
        scale = self.max_abs()
        if scale == 0:
            return True
        if self.is_mp:
            with mp_context(self.bits):
                diff = max(abs(v) for v in (self.data - np.conj(self.data).T).flat)
        else:
            diff = float(np.max(np.abs(self.data - self.data.conj().T)))
        return diff <= tol * scale

    def hermitize(self) -> "OperatorMatrix":
        """Return ``(A + A^dagger)/2`` flagged Hermitian."""
        half = _scalar(Fraction(1, 2), self.bits)
        out = self._elementwise(lambda a, b: (a + np.conj(b).T) * half, self)
        return out._reflag(True)

    def allclose(self, other: "OperatorMatrix", atol: float) -> bool:
        self._check(other)
        return (self - other).max_abs() <= atol


def _is_real_scalar(s) -> bool:
    if isinstance(s, (int, float, Fraction)):
        return True
    if isinstance(s, complex):
        return s.imag == 0
    try:
        return s.imag == 0
    except AttributeError:
        return True


def _to_float_scalar(v):
    if isinstance(v, Fraction):
        return float(v)
    return v


# ---------------------------------------------------------------------------
# precision policy


@dataclass(frozen=True)
class PrecisionPolicy:
    """Choice of working precision.

    ``mode='fixed'`` always uses ``bits``. ``mode='adaptive'`` picks the
    smallest multiple of 64 bits with ``2**-bits <= target / 1e6`` and never
    fewer than ``min_bits``; ``max_bits`` bounds escalation.
    """

    mode: str = "fixed"
    bits: int = DEFAULT_ANALYSIS_BITS
    target_smallest_observable: float | None = None
    min_bits: int = 64
    max_bits: int = 4096

    def __post_init__(self):
        if self.mode not in ("fixed", "adaptive"):
            raise ValueError(f"unknown precision mode {self.mode!r}")
        if self.mode == "adaptive" and not self.target_smallest_observable:
            raise ValueError("adaptive precision needs a positive target")

    @classmethod
    def fixed(cls, bits: int) -> "PrecisionPolicy":
        return cls("fixed", int(bits))

    @classmethod
    def adaptive(cls, target: float, min_bits: int = 64, max_bits: int = 4096) -> "PrecisionPolicy":
        return cls("adaptive", 0, float(target), min_bits, max_bits)

    def select_bits(self) -> int:
        if self.mode == "fixed":
            return self.bits
        return bits_for_target(self.target_smallest_observable, self.min_bits, self.max_bits)


def bits_for_target(target: float, min_bits: int = 64, max_bits: int = 4096) -> int:
    """Smallest multiple of 64 with ``2**-bits <= target / 1e6``."""
    target = float(target)
    if not target > 0:
        return max_bits
    needed = math.ceil(math.log2(1e6 / target))
    bits = max(min_bits, 64 * math.ceil(needed / 64))
    return min(bits, max_bits)


# ---------------------------------------------------------------------------
# products, traces


def tensor(a: OperatorMatrix, b: OperatorMatrix) -> OperatorMatrix:
    """Kronecker product ``a ⊗ b``."""
    if a.bits != b.bits:
        raise PrecisionMismatch(f"{a.bits} vs {b.bits} bits")
    if a.is_mp:
        with mp_context(a.bits):
            data = np.kron(a.data, b.data)
    else:
        data = np.kron(a.data, b.data)
    return OperatorMatrix._wrap(data, a.bits, a.hermitian and b.hermitian)


def tensor_all(ops: Sequence[OperatorMatrix]) -> OperatorMatrix:
    out = ops[0]
    for op in ops[1:]:
        out = tensor(out, op)
    return out


def commutator(a: OperatorMatrix, b: OperatorMatrix) -> OperatorMatrix:
    """``ab - ba``."""
    a._check(b)
    return a @ b - b @ a


def anticommutator(a: OperatorMatrix, b: OperatorMatrix) -> OperatorMatrix:
    """``ab + ba``."""
    a._check(b)
    return a @ b + b @ a


def _ptrace(op: OperatorMatrix, system_dim: int, position: str, keep: str) -> OperatorMatrix:
    if position not in ("first", "last"):
        raise ValueError("position must be 'first' or 'last'")
    if system_dim < 1 or op.dim % system_dim:
        raise DimMismatch(f"dim {op.dim} not divisible by system dim {system_dim}")
    other = op.dim // system_dim
    dims = (system_dim, other) if position == "first" else (other, system_dim)
    t = op.data.reshape(dims[0], dims[1], dims[0], dims[1])
    keep_first = (keep == "system") == (position == "first")
    if op.is_mp:
        with mp_context(op.bits):
            if keep_first:
                out = np.empty((dims[0], dims[0]), dtype=object)
                for i in range(dims[0]):
                    for j in range(dims[0]):
                        out[i, j] = sum((t[i, k, j, k] for k in range(dims[1])), gmpy2.mpc(0))
            else:
                out = np.empty((dims[1], dims[1]), dtype=object)
                for i in range(dims[1]):
                    for j in range(dims[1]):
                        out[i, j] = sum((t[k, i, k, j] for k in range(dims[0])), gmpy2.mpc(0))
    else:
        out = np.einsum("ikjk->ij", t) if keep_first else np.einsum("kikj->ij", t)
    return OperatorMatrix._wrap(out, op.bits, op.hermitian)


def partial_trace_system(rho: OperatorMatrix, system_dim: int = 2, position: str = "last") -> OperatorMatrix:
    """Reduced state of the system factor (the bath factor is traced out).

    Parameters
    ----------
    rho : OperatorMatrix
        Joint operator on ``bath ⊗ system`` (``position='last'``) or
        ``system ⊗ bath`` (``position='first'``).
    system_dim : int
        Dimension of the system factor.
    position : {'first', 'last'}
        Location of the system factor in the tensor product.
    """
    return _ptrace(rho, system_dim, position, keep="system")


def partial_trace_bath(op: OperatorMatrix, system_dim: int = 2, position: str = "last") -> OperatorMatrix:
    """Trace over the system factor, returning an operator on the bath."""
    return _ptrace(op, system_dim, position, keep="bath")


def embed_system(op_s: OperatorMatrix, bath_dim: int, position: str = "last") -> OperatorMatrix:
    """``I_B ⊗ op_s`` (or ``op_s ⊗ I_B`` when the system comes first)."""
    ib = OperatorMatrix.identity(bath_dim, op_s.bits)
    return tensor(ib, op_s) if position == "last" else tensor(op_s, ib)


def embed_bath(op_b: OperatorMatrix, system_dim: int = 2, position: str = "last") -> OperatorMatrix:
    """``op_b ⊗ I_S`` (or ``I_S ⊗ op_b`` when the system comes first)."""
    i_s = OperatorMatrix.identity(system_dim, op_b.bits)
    return tensor(op_b, i_s) if position == "last" else tensor(i_s, op_b)


def system_traceless_part(h: OperatorMatrix, system_dim: int = 2, position: str = "last") -> OperatorMatrix:
    """``H - B0 ⊗ I_S`` with ``B0 = Tr_S(H)/system_dim``."""
    b0 = partial_trace_bath(h, system_dim, position).scale(Fraction(1, system_dim))
    return h - embed_bath(b0, system_dim, position)


# ---------------------------------------------------------------------------
# spectral functions


@dataclass(frozen=True)
class HermitianEig:
    """Eigendecomposition ``h = V diag(w) V^dagger`` of a Hermitian matrix."""

    w: list
    v: np.ndarray
    bits: int

    def apply(self, values: Iterable) -> OperatorMatrix:
        """Rebuild ``V diag(values) V^dagger``."""
        vals = list(values)
        if self.bits > FLOAT_BITS:
            data = kernels.vdv(self.v, vals, self.bits)
        else:
            d = np.asarray(vals, dtype=complex)
            data = (self.v * d[None, :]) @ self.v.conj().T
        return OperatorMatrix._wrap(data, self.bits)

    def expi(self, t) -> OperatorMatrix:
        """``exp(-i t h)``."""
        if self.bits > FLOAT_BITS:
            with mp_context(self.bits):
                tt = to_mpfr(t, self.bits)
                vals = []
                for lam in self.w:
                    s, c = gmpy2.sin_cos(lam * tt)
                    vals.append(gmpy2.mpc(c, -s))
        else:
            tt = float(t)
            vals = np.exp(-1j * np.asarray(self.w, dtype=float) * tt)
        return self.apply(vals)


def eigh(h: OperatorMatrix) -> HermitianEig:
    """Eigendecomposition of a Hermitian matrix (Jacobi above double precision).

    Raises
    ------
    NotHermitian
        If ``h`` is not Hermitian to tolerance.
    """
    if not (h.hermitian or h.is_hermitian()):
        raise NotHermitian("eigendecomposition needs a Hermitian matrix")
    if h.is_mp:
        w, v = kernels.eigh(h.data, h.bits)
        return HermitianEig(list(w), v, h.bits)
    w, v = np.linalg.eigh(h.data)
    return HermitianEig([float(x) for x in w], v, h.bits)


def matrix_exp_hermitian(h: OperatorMatrix, t=1.0) -> OperatorMatrix:
    """Unitary ``exp(-i t h)`` for Hermitian ``h`` via eigendecomposition."""
    return eigh(h).expi(t)


def matrix_function_hermitian(h: OperatorMatrix, fn) -> OperatorMatrix:
    """Apply a scalar function to the eigenvalues of Hermitian ``h``.

    ``fn`` receives each eigenvalue (float or mpfr) inside the working
    precision context.
    """
    e = eigh(h)
    if h.is_mp:
        with mp_context(h.bits):
            vals = [fn(x) for x in e.w]
    else:
        vals = [fn(x) for x in e.w]
    return e.apply(vals)


def eigvalsh(h: OperatorMatrix) -> list:
    return eigh(h).w


def unitarity_defect(u: OperatorMatrix):
    """``max |(U^dagger U - I)_ij|``."""
    return (u.dag() @ u - OperatorMatrix.identity(u.dim, u.bits)).max_abs()


# mixing coefficients tried when diagonalizing a unitary through a Hermitian
# combination of its real and imaginary parts
_MIX = (0.6180339887498949, 1.7320508075688772, 0.3819660112501051, 2.718281828459045)


def matrix_log_unitary(u: OperatorMatrix, tol: float | None = None) -> OperatorMatrix:
    """Hermitian ``H`` with ``u = exp(-i H)`` on the principal branch.

    The unitary is diagonalized through the commuting Hermitian pair
    ``K = (u + u^dagger)/2`` and ``S = (u - u^dagger)/(2i)`` using the
    combination ``K + c S``; if that combination has an accidental
    degeneracy the next coefficient is tried.

    Raises
    ------
    NotUnitary
        If ``u^dagger u`` deviates from the identity.
    BranchAmbiguity
        If an eigenphase lies within tolerance of the branch cut at ``±pi``.
    """
    bits = u.bits
    utol = u.dim * 2.0 ** (-bits + 24) if tol is None else tol
    if unitarity_defect(u) > max(utol, 1e-300):
        raise NotUnitary("input is not unitary")
    half = Fraction(1, 2)
    k = (u + u.dag()).scale(half)._reflag(True)
    s = (u - u.dag()).scale(_scalar(-0.5j, bits))._reflag(True)
    check = 2.0 ** (-bits / 2) if bits > FLOAT_BITS else 1e-7
    best = None
    for c in _MIX:
        m = (k + s.scale(c)).hermitize()
        e = eigh(m)
        vmat = OperatorMatrix._wrap(e.v, bits)
        d = vmat.dag() @ u @ vmat
        off = _offdiag_max(d)
        if best is None or off < best[0]:
            best = (off, e, d)
        if off <= check:
            break
    _, e, d = best
    cut_tol = 1e-12
    if bits > FLOAT_BITS:
        with mp_context(bits):
            pi = gmpy2.const_pi()
            phases = []
            for i in range(u.dim):
                z = d.data[i, i]
                th = gmpy2.atan2(z.imag, z.real)
                if pi - abs(th) < cut_tol:
                    raise BranchAmbiguity(f"eigenphase {float(th)} at the branch cut")
                phases.append(-th)
    else:
        phases = []
        for i in range(u.dim):
            th = math.atan2(d.data[i, i].imag, d.data[i, i].real)
            if math.pi - abs(th) < cut_tol:
                raise BranchAmbiguity(f"eigenphase {th} at the branch cut")
            phases.append(-th)
    return e.apply(phases).hermitize()


def _offdiag_max(d: OperatorMatrix):
    n = d.dim
    if d.is_mp:
        with mp_context(d.bits):
            vals = [abs(d.data[i, j]) for i in range(n) for j in range(n) if i != j]
        return float(max(vals)) if vals else 0.0
    mask = ~np.eye(n, dtype=bool)
    return float(np.max(np.abs(d.data[mask]))) if n > 1 else 0.0


def op_norm(a: OperatorMatrix, kind: str = "eigen_spread"):
    """Operator norm.

    Parameters
    ----------
    a : OperatorMatrix
    kind : {'eigen_spread', 'spectral'}
        ``spectral`` is the largest singular value. ``eigen_spread`` is
        ``lambda_max - lambda_min`` and needs a Hermitian input.
    """
    if kind == "eigen_spread":
        if not (a.hermitian or a.is_hermitian()):
            raise NotHermitian("eigen_spread norm needs a Hermitian operator")
        w = eigh(a).w
        out = w[-1] - w[0]
        return out if a.is_mp else float(out)
    if kind == "spectral":
        if a.hermitian or a.is_hermitian():
            w = eigh(a).w
            out = max(abs(w[0]), abs(w[-1]))
            return out if a.is_mp else float(out)
        if not a.is_mp:
            return float(np.linalg.norm(a.data, 2))
        w = eigh((a.dag() @ a).hermitize()).w
        with mp_context(a.bits):
            top = w[-1] if w[-1] > 0 else gmpy2.mpfr(0)
            return gmpy2.sqrt(top)
    raise ValueError(f"unknown norm kind {kind!r}")


# ---------------------------------------------------------------------------
# matrix dump format


def dump_matrix(a: OperatorMatrix, path) -> None:
    """Write ``dim=<n> bits=<b>`` then one ``re im`` pair per line, row-major."""
    lines = [f"dim={a.dim} bits={a.bits}"]
    for v in a.data.flat:
        lines.append(f"{_dec(v.real, a.bits)} {_dec(v.imag, a.bits)}")
    try:
        with open(path, "w", encoding="ascii") as fh:
            fh.write("\n".join(lines) + "\n")
    except OSError as exc:
        raise IoError(str(exc)) from exc


def load_matrix(path) -> OperatorMatrix:
    """Read a matrix written by :func:`dump_matrix`."""
    try:
        with open(path, encoding="ascii") as fh:
            lines = [ln.strip() for ln in fh if ln.strip()]
    except OSError as exc:
        raise IoError(str(exc)) from exc
    header = dict(part.split("=") for part in lines[0].split())
    n, bits = int(header["dim"]), int(header["bits"])
    if len(lines) - 1 != n * n:
        raise DimMismatch(f"expected {n * n} entries, found {len(lines) - 1}")
    if bits <= FLOAT_BITS:
        vals = [complex(float(r), float(i)) for r, i in (ln.split() for ln in lines[1:])]
        return OperatorMatrix(np.array(vals).reshape(n, n), bits)
    with mp_context(bits):
        vals = [gmpy2.mpc(gmpy2.mpfr(r), gmpy2.mpfr(i)) for r, i in (ln.split() for ln in lines[1:])]
    return OperatorMatrix(np.array(vals, dtype=object).reshape(n, n), bits)


def _dec(x, bits: int) -> str:
    return format_real(x, bits)


def format_real(x, bits: int) -> str:
    """Decimal string that round-trips at ``bits`` binary digits."""
    if bits <= FLOAT_BITS:
        return repr(float(x))
    digits = int(math.ceil(bits * math.log10(2))) + 2
    with mp_context(bits):
        v = gmpy2.mpfr(x)
    if gmpy2.is_nan(v) or gmpy2.is_infinite(v):
        return repr(float(v))
    mant, exp, _ = v.digits(10, digits)
    sign = "-" if mant.startswith("-") else ""
    mant = mant.lstrip("-")
    if v == 0:
        return f"{sign}0.0e+00"
    # digits() returns 0.mant * 10**exp
    e = exp - 1
    return f"{sign}{mant[0]}.{mant[1:]}e{'+' if e >= 0 else '-'}{abs(e):02d}"


__all__ = [
    "FLOAT_BITS",
    "DEFAULT_ANALYSIS_BITS",
    "OperatorMatrix",
    "PrecisionPolicy",
    "HermitianEig",
    "bits_for_target",
    "mp_context",
    "to_mpfr",
    "to_mpc",
    "real_scalar",
    "tensor",
    "tensor_all",
    "commutator",
    "anticommutator",
    "partial_trace_system",
    "partial_trace_bath",
    "embed_system",
    "embed_bath",
    "system_traceless_part",
    "eigh",
    "eigvalsh",
    "matrix_exp_hermitian",
    "matrix_function_hermitian",
    "matrix_log_unitary",
    "unitarity_defect",
    "op_norm",
    "dump_matrix",
    "load_matrix",
    "format_real",
]
