"""Error Hamiltonians: Pauli decomposition, spin-chain models and bath states.

Joint operators act on ``bath ⊗ system`` by default (``system_position='last'``).
Units are hbar = 1 with coefficients in rad/s.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import gmpy2

from .errors import BadParams, DimMismatch
from .operators import (
    FLOAT_BITS,
    OperatorMatrix,
    eigh,
    embed_system,
    mp_context,
    op_norm,
    partial_trace_bath,
    tensor,
    tensor_all,
)

AXES = ("X", "Y", "Z")
HBAR_OVER_KB = 7.6382e-12  # K s


@dataclass(frozen=True)
class BathDecomposition:
    """Bath operators of ``H = B0 ⊗ I + BX ⊗ X + BY ⊗ Y + BZ ⊗ Z``.

    The Hermiticity invariant is checked on construction unless
    ``check=False`` is passed to :meth:`build`, which the finite-width
    recursion uses because its update rules are not Hermiticity preserving.
    """

    b0: OperatorMatrix
    bx: OperatorMatrix
    by: OperatorMatrix
    bz: OperatorMatrix
    system_position: str = "last"

    @classmethod
    def build(cls, b0, bx, by, bz, system_position="last", check=True) -> "BathDecomposition":
        ops = (b0, bx, by, bz)
        dims = {op.dim for op in ops}
        bits = {op.bits for op in ops}
        if len(dims) != 1 or len(bits) != 1:
            raise DimMismatch("bath operators must share dimension and precision")
        if check:
            ops = tuple(op.hermitize() if op.is_hermitian() else _raise_nh() for op in ops)
        return cls(*ops, system_position=system_position)

    def __post_init__(self):
        if len({self.b0.dim, self.bx.dim, self.by.dim, self.bz.dim}) != 1:
            raise DimMismatch("bath operators must share a dimension")

    @property
    def bath_dim(self) -> int:
        return self.b0.dim

    @property
    def bits(self) -> int:
        return self.b0.bits

    @property
    def couplings(self) -> tuple:
        return (self.bx, self.by, self.bz)

    def component(self, alpha: str) -> OperatorMatrix:
        return {"0": self.b0, "I": self.b0, "X": self.bx, "Y": self.by, "Z": self.bz}[alpha.upper()]

    def reassemble(self) -> OperatorMatrix:
        """Joint operator ``Σ B_α ⊗ σ_α``."""
        pos = self.system_position
        out = None
        for op, ax in zip((self.b0, self.bx, self.by, self.bz), ("I",) + AXES):
            s = OperatorMatrix.pauli(ax, op.bits)
            term = tensor(op, s) if pos == "last" else tensor(s, op)
            out = term if out is None else out + term
        return out

    def with_bits(self, bits: int) -> "BathDecomposition":
        return BathDecomposition(*(op.with_bits(bits) for op in (self.b0, self.bx, self.by, self.bz)),
                                 system_position=self.system_position)


def _raise_nh():
    from .errors import NotHermitian

    raise NotHermitian("bath operators must be Hermitian")


@dataclass(frozen=True)
class CouplingStrengths:
    """System-bath strength ``j``, pure-bath strength ``beta`` and ``g = max(j, beta)``."""

    j: float
    beta: float

    @property
    def g(self) -> float:
        return max(self.j, self.beta)


@dataclass(frozen=True)
class SpinChainParams:
    """Open 1-D Heisenberg chain whose central spin is the system qubit."""

    n_spins: int = 3
    j_coupling: float = 1e6
    beta_coupling: float = 1e4
    decay_base: float = 2.0

    def __post_init__(self):
        if self.n_spins < 3 or self.n_spins % 2 == 0:
            raise BadParams("n_spins must be odd and at least 3")
        if self.j_coupling < 0 or self.beta_coupling < 0 or self.decay_base <= 0:
            raise BadParams("couplings must be nonnegative and decay_base positive")


@dataclass(frozen=True)
class ThermalParams:
    """Bath temperature in kelvin; ``math.inf`` gives the maximally mixed state."""

    temperature: float = 1.0
    hbar_over_kb: float = HBAR_OVER_KB

    def __post_init__(self):
        if not self.temperature > 0:
            raise BadParams("temperature must be positive or infinite")


def decompose(h_e: OperatorMatrix, system_position: str = "last") -> BathDecomposition:
    """Split a joint operator into bath operators ``B_α = Tr_S[(I ⊗ σ_α) H] / 2``.

    Raises
    ------
    DimMismatch
        If the joint dimension is odd.
    """
    if h_e.dim % 2:
        raise DimMismatch("joint dimension must be even to contain a qubit")
    bath_dim = h_e.dim // 2
    parts = []
    for ax in ("I",) + AXES:
        s = embed_system(OperatorMatrix.pauli(ax, h_e.bits), bath_dim, system_position)
        parts.append(partial_trace_bath(s @ h_e, 2, system_position).scale(Fraction(1, 2)))
    herm = h_e.hermitian or h_e.is_hermitian()
    if herm:
        parts = [p.hermitize() for p in parts]
    return BathDecomposition(*parts, system_position=system_position)


def coupling_strengths(d: BathDecomposition, norm_kind: str = "eigen_spread") -> CouplingStrengths:
    """``j = max_α ||B_α||`` over X, Y, Z and ``beta = ||B0||``."""
    j = max(float(op_norm(op, norm_kind)) for op in d.couplings)
    beta = float(op_norm(d.b0, norm_kind))
    return CouplingStrengths(j, beta)


def build_spin_chain(p: SpinChainParams, system_position: str = "last", bits: int = FLOAT_BITS) -> OperatorMatrix:
    """Heisenberg chain ``Σ_{i<j} c_ij (X_i X_j + Y_i Y_j + Z_i Z_j)``.

    Pairs that include the central spin use ``j_coupling * base**-d``; all
    other pairs use ``beta_coupling * base**-d`` with ``d = |i - j|``. The
    central spin is moved to the system slot of the tensor product.
    """
    n = p.n_spins
    center = n // 2
    bath_sites = [k for k in range(n) if k != center]
    order = bath_sites + [center] if system_position == "last" else [center] + bath_sites
    slot = {site: pos for pos, site in enumerate(order)}
    dim = 2 ** n
    ident = OperatorMatrix.identity(2, bits)
    h = OperatorMatrix.zeros(dim, bits)
    for i in range(n):
        for k in range(i + 1, n):
            dist = k - i
            base = p.j_coupling if center in (i, k) else p.beta_coupling
            coeff = _coupling(base, p.decay_base, dist, bits)
            if coeff == 0:
                continue
            for ax in AXES:
                s = OperatorMatrix.pauli(ax, bits)
                factors = [ident] * n
                factors[slot[i]] = s
                factors[slot[k]] = s
                h = h + tensor_all(factors).scale(coeff)
    return h.hermitize()


def _coupling(base: float, decay: float, dist: int, bits: int):
    if bits <= FLOAT_BITS:
        return base * decay ** (-dist)
    with mp_context(bits):
        return gmpy2.mpfr(base) * gmpy2.mpfr(decay) ** (-dist)


def thermal_bath_state(h_b: OperatorMatrix, t: ThermalParams = ThermalParams()) -> OperatorMatrix:
    """Gibbs state ``exp(-hbar H_B / k_B T) / Z``.

    Eigenvalues are shifted by the ground energy before exponentiation so
    the zero-temperature limit is a ground-state projector.
    """
    dim = h_b.dim
    if math.isinf(t.temperature):
        return OperatorMatrix.identity(dim, h_b.bits).scale(Fraction(1, dim))._reflag(True)
    e = eigh(h_b if h_b.hermitian else h_b.hermitize())
    if h_b.is_mp:
        with mp_context(h_b.bits):
            k = gmpy2.mpfr(t.hbar_over_kb) / gmpy2.mpfr(t.temperature)
            w0 = e.w[0]
            weights = [gmpy2.exp(-k * (w - w0)) for w in e.w]
            z = sum(weights, gmpy2.mpfr(0))
            vals = [x / z for x in weights]
    else:
        k = t.hbar_over_kb / t.temperature
        w0 = e.w[0]
        weights = [math.exp(-k * (w - w0)) for w in e.w]
        z = sum(weights)
        vals = [x / z for x in weights]
    return e.apply(vals).hermitize()


def estimate_dot_couplings(hyperfine_sum: float, dipolar_sum: float, nuclear_spin: float) -> CouplingStrengths:
    """Order-of-magnitude strengths ``J = I ΣA`` and ``beta = I^2 ΣB``."""
    if hyperfine_sum < 0 or dipolar_sum < 0 or nuclear_spin < 0:
        raise BadParams("inputs must be nonnegative")
    return CouplingStrengths(nuclear_spin * hyperfine_sum, nuclear_spin ** 2 * dipolar_sum)


def random_hermitian(dim: int, rng, scale: float = 1.0, bits: int = FLOAT_BITS, traceless: bool = False) -> OperatorMatrix:
    """Gaussian Hermitian matrix normalized to spectral norm ``scale``."""
    import numpy as np

    m = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    h = (m + m.conj().T) / 2
    if traceless:
        h = h - np.trace(h) / dim * np.eye(dim)
    norm = np.max(np.abs(np.linalg.eigvalsh(h)))
    if norm > 0:
        h = h * (scale / norm)
    return OperatorMatrix(h, bits, hermitian=True)


def random_model(n_bath_qubits: int, rng, j: float = 1.0, beta: float = 1.0,
                 bits: int = FLOAT_BITS, axes=AXES, system_position: str = "last") -> BathDecomposition:
    """Random decomposition with traceless bath operators.

    ``B0`` has spectral norm ``beta``; each coupling listed in ``axes`` has
    spectral norm ``j``, the rest are zero.
    """
    dim = 2 ** n_bath_qubits
    b0 = random_hermitian(dim, rng, beta, bits, traceless=True)
    ops = []
    for ax in AXES:
        if ax in axes:
            ops.append(random_hermitian(dim, rng, j, bits, traceless=True))
        else:
            ops.append(OperatorMatrix.zeros(dim, bits))
    return BathDecomposition(b0, *ops, system_position=system_position)


__all__ = [
    "AXES",
    "HBAR_OVER_KB",
    "BathDecomposition",
    "CouplingStrengths",
    "SpinChainParams",
    "ThermalParams",
    "decompose",
    "coupling_strengths",
    "build_spin_chain",
    "thermal_bath_state",
    "estimate_dot_couplings",
    "random_hermitian",
    "random_model",
]
