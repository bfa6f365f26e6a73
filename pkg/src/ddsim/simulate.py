"""Exact propagation of a qubit and its bath under a pulse sequence.

The propagator of a sequence is the time-ordered product of its segment
unitaries. Segments are grouped into chunks (a free segment and the pulses
that follow it), identical chunks share one matrix, and the chunk list is
reduced pairwise with memoization. Concatenated and periodic sequences
contain few distinct aligned blocks, so a level-8 concatenated sequence
with 10^5 segments costs a few hundred matrix products. The reduction only
re-associates an exact product.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Optional

import gmpy2
import numpy as np

from .errors import BadParams, BadState, PrecisionEscalationFailed, Unsupported
from .magnus import error_phase_from_hamiltonian, fidelity_estimate
from .operators import (
    FLOAT_BITS,
    OperatorMatrix,
    PrecisionPolicy,
    eigh,
    embed_system,
    format_real,
    matrix_log_unitary,
    mp_context,
    op_norm,
    partial_trace_system,
    tensor,
    to_mpc,
    to_mpfr,
)
from .sequences import Free, IdealPulse, PulseSequence, RectPulse, is_pulse


def _bits_of(precision) -> int:
    if precision is None:
        return None
    if isinstance(precision, PrecisionPolicy):
        return precision.select_bits()
    return int(precision)


def _half_angle(angle: float, bits: int):
    """``angle / 2`` at working precision; the float pi means exact pi."""
    if bits <= FLOAT_BITS:
        return angle / 2
    with mp_context(bits):
        if abs(angle - math.pi) <= 4e-16:
            return gmpy2.const_pi() / 2
        return gmpy2.mpfr(angle) / 2


def pulse_unitary(axis: str, angle: float, bits: int) -> OperatorMatrix:
    """Bare system rotation ``exp(-i angle/2 sigma_axis)``."""
    if axis == "I":
        return OperatorMatrix.identity(2, bits)
    sig = OperatorMatrix.pauli(axis, bits)
    if abs(angle - math.pi) <= 4e-16:
        return sig.scale(-1j)
    half = _half_angle(angle, bits)
    if bits <= FLOAT_BITS:
        c, s = math.cos(half), math.sin(half)
    else:
        with mp_context(bits):
            s, c = gmpy2.sin_cos(half)
    ident = OperatorMatrix.identity(2, bits)
    return ident.scale(c) + sig.scale(-1j).scale(s)


def ideal_system_unitary(seq: PulseSequence, bits: int = FLOAT_BITS) -> OperatorMatrix:
    """Product of the bare pulse rotations in operator order (last pulse leftmost)."""
    q = OperatorMatrix.identity(2, bits)
    for s in seq.segments:
        if is_pulse(s):
            q = pulse_unitary(s.axis, s.angle, bits) @ q
    return q


class _Propagators:
    """Per-run cache of segment unitaries for one Hamiltonian."""

    def __init__(self, h_e: OperatorMatrix, system_position: str):
        self.h = h_e
        self.bits = h_e.bits
        self.pos = system_position
        self.bath_dim = h_e.dim // 2
        self._eig = None
        self._cache = {}

    def free(self, t):
        if self._eig is None:
            self._eig = eigh(self.h)
        return self._eig.expi(t)

    def segment(self, s) -> OperatorMatrix:
        hit = self._cache.get(s)
        if hit is not None:
            return hit
        if isinstance(s, Free):
            u = self.free(s.duration)
        elif isinstance(s, IdealPulse):
            u = embed_system(pulse_unitary(s.axis, s.angle, self.bits), self.bath_dim, self.pos)
        elif isinstance(s, RectPulse):
            if s.width <= 0:
                raise BadParams("rectangular pulse needs a positive width")
            # amplitude eta = angle / (2 width)
            sig = embed_system(OperatorMatrix.pauli(s.axis, self.bits), self.bath_dim, self.pos)
            eta = _half_angle(s.angle, self.bits)
            if self.bits <= FLOAT_BITS:
                eta = eta / float(s.width)
            else:
                with mp_context(self.bits):
                    eta = eta / to_mpfr(s.width, self.bits)
            gen = (self.h + sig.scale(eta)).hermitize()
            u = eigh(gen).expi(s.width)
        else:
            raise Unsupported(f"unknown segment {s!r}")
        self._cache[s] = u
        return u


def _chunks(segments) -> list:
    out = []
    cur = []
    for s in segments:
        if isinstance(s, Free) and cur:
            out.append(tuple(cur))
            cur = []
        cur.append(s)
    if cur:
        out.append(tuple(cur))
    return out


def evolve(h_e: OperatorMatrix, seq: PulseSequence, precision=None,
           system_position: str = "last", reduction: str = "tree") -> OperatorMatrix:
    """Propagator of ``seq`` under ``h_e`` (leftmost segment acts first).

    Parameters
    ----------
    h_e : OperatorMatrix
        Joint Hermitian Hamiltonian.
    seq : PulseSequence
    precision : PrecisionPolicy or int, optional
        Working precision; defaults to the precision of ``h_e``.
    system_position : {'last', 'first'}
    reduction : {'tree', 'sequential'}
        ``tree`` uses the memoized pairwise product, ``sequential`` folds
        chunk unitaries one at a time.
    """
    bits = _bits_of(precision) or h_e.bits
    if h_e.bits != bits:
        h_e = h_e.with_bits(bits)
    if h_e.dim % 2:
        raise BadParams("joint dimension must be even")
    props = _Propagators(h_e, system_position)
    chunks = _chunks(seq.segments)
    if not chunks:
        return OperatorMatrix.identity(h_e.dim, bits)
    mats = []
    ids = []
    index = {}
    for ch in chunks:
        k = index.get(ch)
        if k is None:
            u = None
            for s in ch:
                m = props.segment(s)
                u = m if u is None else m @ u
            k = len(mats)
            mats.append(u)
            index[ch] = k
        ids.append(k)
    if reduction == "sequential":
        u = mats[ids[0]]
        for k in ids[1:]:
            u = mats[k] @ u
        return u
    if reduction != "tree":
        raise BadParams(f"unknown reduction {reduction!r}")
    pairs = {}
    while len(ids) > 1:
        nxt = []
        for i in range(0, len(ids) - 1, 2):
            key = (ids[i], ids[i + 1])
            k = pairs.get(key)
            if k is None:
                k = len(mats)
                mats.append(mats[key[1]] @ mats[key[0]])
                pairs[key] = k
            nxt.append(k)
        if len(ids) % 2:
            nxt.append(ids[-1])
        ids = nxt
    return mats[ids[0]]


def default_system_state(bits: int = FLOAT_BITS) -> OperatorMatrix:
    """Density matrix of ``(|0> + |1>)/sqrt(2)``."""
    return OperatorMatrix(np.full((2, 2), 0.5), bits, hermitian=True)


def _as_density(state, bits: int) -> OperatorMatrix:
    if isinstance(state, OperatorMatrix):
        rho = state.with_bits(bits)
    else:
        arr = np.asarray(state)
        if arr.ndim == 1:
            if bits <= FLOAT_BITS:
                v = arr.astype(complex)
                rho = OperatorMatrix(np.outer(v, v.conj()), bits)
            else:
                v = [to_mpc(x, bits) for x in arr]
                with mp_context(bits):
                    mat = np.array([[a * b.conjugate() for b in v] for a in v], dtype=object)
                rho = OperatorMatrix(mat, bits)
        else:
            rho = OperatorMatrix(arr, bits)
    tr = rho.trace()
    if abs(complex(tr) - 1) > 1e-9 or not rho.is_hermitian(1e-9):
        raise BadState("state must be a normalized Hermitian density matrix")
    return rho


def purity_loss(u: OperatorMatrix, system_state=None, bath_state=None,
                system_position: str = "last", clamp: bool = True):
    """``1 - Tr[rho_S^2]`` after evolving ``rho_S ⊗ rho_B`` with ``u``.

    Parameters
    ----------
    system_state : array_like or OperatorMatrix, optional
        State vector or density matrix of the qubit; defaults to
        ``(|0> + |1>)/sqrt(2)``.
    bath_state : OperatorMatrix, optional
        Bath density matrix; defaults to the maximally mixed state.

    Raises
    ------
    BadState
        For a non-normalized state.
    """
    bits = u.bits
    bath_dim = u.dim // 2
    rho_s = default_system_state(bits) if system_state is None else _as_density(system_state, bits)
    if bath_state is None:
        rho_b = OperatorMatrix.identity(bath_dim, bits).scale(Fraction(1, bath_dim))
    else:
        rho_b = _as_density(bath_state, bits)
    if rho_b.dim * 2 != u.dim:
        raise BadState("bath state dimension does not match the propagator")
    rho0 = tensor(rho_b, rho_s) if system_position == "last" else tensor(rho_s, rho_b)
    rho = u @ rho0 @ u.dag()
    red = partial_trace_system(rho, 2, system_position)
    a, b, d = red.data[0, 0], red.data[0, 1], red.data[1, 1]
    if bits <= FLOAT_BITS:
        loss = 1.0 - (a.real ** 2 + d.real ** 2 + 2 * abs(b) ** 2)
        return max(loss, 0.0) if clamp else loss
    with mp_context(bits):
        loss = 1 - (a.real ** 2 + d.real ** 2 + 2 * gmpy2.norm(b))
        if clamp and loss < 0:
            loss = gmpy2.mpfr(0)
        return loss


def effective_error_hamiltonian(u: OperatorMatrix, seq: PulseSequence, system_position: str = "last",
                                norm_kind: str = "eigen_spread"):
    """Generator ``H'`` with ``u = exp(-i T H') (I ⊗ Q)`` and its error phase.

    ``Q`` is the bare product of the pulse rotations and ``T`` the sequence
    duration.
    """
    t = seq.total_duration
    if t <= 0:
        raise BadParams("sequence must have positive duration")
    q = embed_system(ideal_system_unitary(seq, u.bits), u.dim // 2, system_position)
    gen = matrix_log_unitary(u @ q.dag())
    h_err = gen.scale(Fraction(1) / t).hermitize()
    phi = error_phase_from_hamiltonian(h_err, t, norm_kind, system_position)
    return h_err, phi


def thompson_check(h_e: OperatorMatrix, seq: PulseSequence, norm_kind: str = "eigen_spread",
                   system_position: str = "last", rtol: float = 1e-9):
    """Compare ``||H'||`` with ``||H_e||`` for an ideal-pulse sequence.

    Returns
    -------
    holds : bool
    lhs, rhs : float
    """
    if any(isinstance(s, RectPulse) for s in seq.segments):
        raise Unsupported("the norm comparison applies to ideal pulses")
    u = evolve(h_e, seq, system_position=system_position)
    h_err, _ = effective_error_hamiltonian(u, seq, system_position, norm_kind)
    lhs = float(op_norm(h_err, norm_kind))
    rhs = float(op_norm(h_e, norm_kind))
    return lhs <= rhs * (1 + rtol), lhs, rhs


@dataclass(frozen=True)
class EvolutionResult:
    """Outcome of one simulated sequence."""

    label: str
    u_total: OperatorMatrix
    ideal_system_unitary: OperatorMatrix
    h_eff_error: Optional[OperatorMatrix]
    purity_loss: object
    error_phase_exact: object
    wall_segments: int
    n_pulses: int
    duration_s: Fraction
    precision_bits: int

    def to_record(self) -> dict:
        phase = self.error_phase_exact
        return {
            "label": self.label,
            "n_pulses": self.n_pulses,
            "duration_s": float(self.duration_s),
            "purity_loss": format_real(self.purity_loss, self.precision_bits),
            "error_phase": None if phase is None else float(phase),
            "precision_bits": self.precision_bits,
        }


def run_sequence(h_e: OperatorMatrix, seq: PulseSequence, precision=None, system_state=None,
                 bath_state=None, system_position: str = "last", compute_phase: bool = True,
                 norm_kind: str = "eigen_spread") -> EvolutionResult:
    """Evolve, then compute purity loss and (optionally) the effective error Hamiltonian."""
    from .errors import BranchAmbiguity

    u = evolve(h_e, seq, precision, system_position)
    bits = u.bits
    loss = purity_loss(u, system_state, bath_state, system_position)
    h_err = phi = None
    if compute_phase and seq.total_duration > 0:
        try:
            h_err, phi = effective_error_hamiltonian(u, seq, system_position, norm_kind)
        except BranchAmbiguity:
            h_err = phi = None
    return EvolutionResult(
        label=seq.label,
        u_total=u,
        ideal_system_unitary=ideal_system_unitary(seq, bits),
        h_eff_error=h_err,
        purity_loss=loss,
        error_phase_exact=phi,
        wall_segments=len(seq),
        n_pulses=seq.pulse_count,
        duration_s=seq.total_duration,
        precision_bits=bits,
    )


def rounding_floor(bits: int, n_segments: int, dim: int) -> float:
    """Crude absolute rounding floor of a purity computed from ``n_segments`` products."""
    return max(n_segments, 1) * dim * 2.0 ** (-bits)


def bits_for_prediction(predicted: float, n_segments: int, dim: int,
                        min_bits: int = 64, max_bits: int = 4096) -> int:
    """Smallest multiple of 64 whose rounding floor sits 10^6 below ``predicted``."""
    bits = min_bits
    while bits < max_bits and not predicted > 1e6 * rounding_floor(bits, n_segments, dim):
        bits += 64
    return bits


def escalate(compute: Callable[[int], object], predicted: float, n_segments: int, dim: int,
             min_bits: int = 64, max_bits: int = 4096, start_bits: Optional[int] = None):
    """Evaluate ``compute(bits)`` at a precision that resolves the result.

    The first precision is chosen so that ``predicted`` sits 10^6 above the
    rounding floor. While the measured magnitude lies within 100x of the
    floor the precision is doubled.

    Returns
    -------
    value, bits

    Raises
    ------
    PrecisionEscalationFailed
        When doubling would exceed ``max_bits``.
    """
    bits = start_bits or bits_for_prediction(predicted, n_segments, dim, min_bits, max_bits)
    while True:
        value = compute(bits)
        floor = rounding_floor(bits, n_segments, dim)
        if abs(value) > 100 * floor:
            return value, bits
        if bits * 2 > max_bits:
            raise PrecisionEscalationFailed(
                f"value {float(value):.3e} unresolved at {bits} bits (floor {floor:.3e})"
            )
        bits *= 2


def purity_with_escalation(model: Callable[[int], tuple], seq: PulseSequence, predicted: float,
                           system_position: str = "last", min_bits: int = 64, max_bits: int = 4096,
                           start_bits: Optional[int] = None, system_state=None):
    """Purity loss with automatic precision escalation.

    ``model(bits)`` returns ``(h_e, bath_state)`` at the requested precision.

    Returns
    -------
    loss, bits
    """
    dim = model(FLOAT_BITS)[0].dim

    def compute(bits):
        h_e, bath = model(bits)
        u = evolve(h_e, seq, bits, system_position)
        return purity_loss(u, system_state, bath, system_position, clamp=False)

    return escalate(compute, predicted, len(seq), dim, min_bits, max_bits, start_bits)


__all__ = [
    "EvolutionResult",
    "evolve",
    "purity_loss",
    "effective_error_hamiltonian",
    "thompson_check",
    "fidelity_estimate",
    "ideal_system_unitary",
    "pulse_unitary",
    "default_system_state",
    "run_sequence",
    "rounding_floor",
    "bits_for_prediction",
    "escalate",
    "purity_with_escalation",
]
