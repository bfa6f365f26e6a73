"""Magnus expansion, renormalization recursions and analytic error-phase bounds.

Conventions
-----------
``magnus_a1_a2`` takes pieces in time order (first piece acts first), so
``exp(A1 + A2)`` approximates ``exp(-i t_L H_L) ... exp(-i t_1 H_1)``.

The four-frame cycle used by the renormalization recursion is the product
``exp(-i tau H1) exp(-i tau H2) exp(-i tau H3) exp(-i tau H4)`` with ``H1``
written leftmost, i.e. the time-ordered piece list ``(H4, H3, H2, H1)``.
With that ordering the second-order term is
``-(tau^2 / 2) sum_{i<j} [H_i, H_j]``.

Every O(1) constant in the bounds is set to 1 and reported in
``params_used``.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .errors import BadParams, WidthTooLarge
from .hamiltonians import BathDecomposition, CouplingStrengths, decompose
from .operators import (
    FLOAT_BITS,
    OperatorMatrix,
    anticommutator,
    commutator,
    embed_system,
    matrix_exp_hermitian,
    op_norm,
    system_traceless_part,
)
from .sequences import as_time

WARN_THRESHOLD = 0.1

# sign of each Pauli coupling under conjugation by I, X, Y, Z
_FRAME_SIGNS = {
    "I": (1, 1, 1),
    "X": (1, -1, -1),
    "Y": (-1, 1, -1),
    "Z": (-1, -1, 1),
}


@dataclass(frozen=True)
class MagnusTerms:
    """First and second Magnus generators of a piecewise-constant evolution."""

    a1: OperatorMatrix
    a2: OperatorMatrix
    duration: Fraction

    @property
    def effective_hamiltonian(self) -> OperatorMatrix:
        """``(i / duration)(A1 + A2)``."""
        s = (self.a1 + self.a2).scale(1j)
        return s.scale(Fraction(1) / Fraction(self.duration)).hermitize()


@dataclass
class RenormalizationTrace:
    """Level-by-level bath operators of a concatenation recursion.

    Attributes
    ----------
    levels : list of BathDecomposition
        ``levels[0]`` is the input; ``levels[n]`` the closed-form level ``n``.
    recursive_levels : list of BathDecomposition
        One second-order Magnus step applied to each closed-form level.
    h : list of float
        ``max(||B_X^(n)||, ||B_Y^(n)||)`` per level.
    discrepancy : list of float
        Relative difference between the two routes per level.
    flags : list of str
        Convergence warnings (not fatal).
    """

    levels: list
    tau0: Fraction
    delta: Fraction = Fraction(0)
    norm_kind: str = "eigen_spread"
    recursive_levels: list = field(default_factory=list)
    h: list = field(default_factory=list)
    discrepancy: list = field(default_factory=list)
    flags: list = field(default_factory=list)

    def tau(self, n: int) -> Fraction:
        return Fraction(4) ** n * self.tau0


@dataclass(frozen=True)
class ErrorPhaseEstimate:
    """Analytic error phase with the parameters it was evaluated at."""

    phi: float
    scheme: str
    params_used: dict
    forms: dict = field(default_factory=dict)

    def __post_init__(self):
        if not self.phi >= 0:
            raise BadParams("error phase must be nonnegative")

    def to_record(self) -> dict:
        rec = {"scheme": self.scheme, "phi": self.phi}
        rec.update({f"param_{k}": v for k, v in self.params_used.items()})
        rec.update({f"form_{k}": v for k, v in self.forms.items()})
        return rec


@dataclass(frozen=True)
class ConvergenceReport:
    """Convergence flags with the margins they are derived from.

    Each flag is ``margin < limit`` for the matching entry in ``margins``
    and ``limits``. ``warnings`` lists margins inside the band
    ``[0.1, limit)``.
    """

    magnus_radius_ok: bool
    taunb_ok: bool
    width_ok: bool
    appendix_b_ok: bool
    optimal_tau0: float
    margins: dict
    limits: dict
    warnings: tuple = ()

    @property
    def ok(self) -> bool:
        """Flags that gate a concatenated run; the Magnus radius is informational."""
        return self.taunb_ok and self.width_ok and self.appendix_b_ok

    def to_record(self) -> dict:
        rec = {
            "magnus_radius_ok": self.magnus_radius_ok,
            "taunb_ok": self.taunb_ok,
            "width_ok": self.width_ok,
            "appendix_b_ok": self.appendix_b_ok,
            "optimal_tau0": self.optimal_tau0,
        }
        rec.update({f"margin_{k}": v for k, v in self.margins.items()})
        rec["warnings"] = ";".join(self.warnings)
        return rec


# ---------------------------------------------------------------------------
# Magnus terms


def conjugated_hamiltonians(d: BathDecomposition) -> list:
    """``[H_e, X H_e X, Y H_e Y, Z H_e Z]`` built from sign-flipped couplings."""
    out = []
    for frame in ("I", "X", "Y", "Z"):
        sx, sy, sz = _FRAME_SIGNS[frame]
        dd = BathDecomposition(d.b0, d.bx.scale(sx), d.by.scale(sy), d.bz.scale(sz),
                               system_position=d.system_position)
        out.append(dd.reassemble().hermitize())
    return out


def magnus_a1_a2(pieces: Sequence) -> MagnusTerms:
    """First two Magnus terms for time-ordered constant pieces ``(H_k, t_k)``.

    ``A1 = -i sum_k t_k H_k`` and ``A2 = -1/2 sum_{k<l} t_k t_l [H_l, H_k]``.

    Raises
    ------
    BadParams
        For an empty list or a nonpositive duration.
    """
    if not pieces:
        raise BadParams("need at least one piece")
    _validate_convention()
    return _magnus(pieces)


def _magnus(pieces):
    hs = [h for h, _ in pieces]
    ts = [as_time(t) for _, t in pieces]
    if any(t <= 0 for t in ts):
        raise BadParams("piece durations must be positive")
    bits = hs[0].bits
    acc = hs[0].scale(ts[0])  # running sum_{k<l} t_k H_k
    a2 = OperatorMatrix.zeros(hs[0].dim, bits)
    for h, t in zip(hs[1:], ts[1:]):
        a2 = a2 + commutator(h, acc).scale(t)
        acc = acc + h.scale(t)
    a1 = acc.scale(-1j)
    a2 = a2.scale(Fraction(-1, 2))
    return MagnusTerms(a1, a2, sum(ts, Fraction(0)))


@functools.lru_cache(maxsize=None)
def _validate_convention() -> bool:
    """Check the A2 ordering against an exact product once per process."""
    rng = np.random.default_rng(12345)
    hs = []
    for _ in range(3):
        m = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
        hs.append(OperatorMatrix((m + m.conj().T) / 2, FLOAT_BITS, hermitian=True))
    t = Fraction(1, 1000)
    terms = _magnus([(h, t) for h in hs])
    exact = OperatorMatrix.identity(4)
    for h in hs:
        exact = matrix_exp_hermitian(h, t) @ exact
    good = matrix_exp_hermitian(terms.effective_hamiltonian, terms.duration)
    flipped = MagnusTerms(terms.a1, -terms.a2, terms.duration)
    bad = matrix_exp_hermitian(flipped.effective_hamiltonian, terms.duration)
    if not (exact - good).max_abs() < 0.1 * (exact - bad).max_abs():
        raise RuntimeError("second-order Magnus term has the wrong ordering")
    return True


def cycle_pieces(d: BathDecomposition, tau) -> list:
    """Time-ordered pieces ``(H4, H3, H2, H1)`` of the four-frame cycle."""
    hs = conjugated_hamiltonians(d)
    return [(h, tau) for h in reversed(hs)]


def toggling_frame_pieces(d: BathDecomposition, seq) -> list:
    """Time-ordered toggling-frame pieces of an ideal Pauli pi-pulse sequence.

    Each free interval contributes ``(P^dag H_e P, t)`` where ``P`` is the
    product of the pulses applied before it. The propagator of ``seq`` is
    ``(I ⊗ Q)`` times the ordered product of these pieces, with ``Q`` the
    bare pulse product.

    Raises
    ------
    Unsupported
        For rectangular pulses or angles other than pi.
    """
    from .errors import Unsupported
    from .sequences import Free, IdealPulse

    code = {"I": 0, "X": 1, "Z": 2, "Y": 3}
    frames = {0: "I", 1: "X", 2: "Z", 3: "Y"}
    hs = dict(zip("IXYZ", conjugated_hamiltonians(d)))
    cur, out = 0, []
    for s in seq.segments:
        if isinstance(s, Free):
            if s.duration > 0:
                out.append((hs[frames[cur]], s.duration))
        elif isinstance(s, IdealPulse) and abs(s.angle - math.pi) <= 4e-16:
            cur ^= code[s.axis]
        else:
            raise Unsupported("toggling frames need ideal pi pulses")
    return out


# ---------------------------------------------------------------------------
# renormalization


def _norms(d: BathDecomposition, kind: str):
    return [float(op_norm(op, kind)) for op in d.couplings]


def _h_level(d: BathDecomposition, kind: str) -> float:
    return max(float(op_norm(d.bx, kind)), float(op_norm(d.by, kind)))


def _rel_diff(a: BathDecomposition, b: BathDecomposition, kind: str) -> float:
    """Relative difference over ``B0``, ``B_X`` and ``B_Y``; ``B_Z`` is not compared."""
    pairs = list(zip(a.couplings, b.couplings))[:2]
    scale = max([float(op_norm(x, kind)) for x, _ in pairs] + [1e-300])
    coup = max(float(op_norm((x - y).hermitize(), kind)) for x, y in pairs)
    b0_scale = max(float(op_norm(a.b0, kind)), 1e-300)
    b0 = float(op_norm((a.b0 - b.b0).hermitize(), kind)) / b0_scale
    return max(coup / scale, b0)


def renormalize_ideal(d: BathDecomposition, tau0, n_levels: int,
                      norm_kind: str = "eigen_spread", recursive: bool = True) -> RenormalizationTrace:
    """Concatenation recursion for ideal pulses, computed two ways.

    Route (a) is the closed form
    ``B_X^(n) = i tau_{n-1} [B0, B_X^(n-1)]``,
    ``B_Y^(n) = (i/2) tau_{n-1} [B0, B_Y^(n-1)]`` for ``n >= 2`` (level 1 also
    carries ``-i {B_X, B_Z}``), ``B_Z^(n) = 0``. Route (b) applies the
    second-order Magnus expansion to the four conjugated closed-form level
    ``n-1`` Hamiltonians and decomposes the result. The discrepancy compares
    only the operators the closed form keeps (``B0``, ``B_X``, ``B_Y``).
    """
    if int(n_levels) != n_levels or n_levels < 1:
        raise BadParams("n_levels must be a positive integer")
    tau0 = as_time(tau0)
    if tau0 <= 0:
        raise BadParams("tau0 must be positive")
    trace = RenormalizationTrace([d], tau0, Fraction(0), norm_kind)
    trace.h.append(_h_level(d, norm_kind))
    trace.discrepancy.append(0.0)
    b0 = d.b0
    beta = float(op_norm(b0, norm_kind))
    prev = d
    zero = OperatorMatrix.zeros(d.bath_dim, d.bits)
    half_i = 0.5j
    for n in range(1, int(n_levels) + 1):
        tp = trace.tau(n - 1)
        bx = commutator(b0, prev.bx).scale(1j).scale(tp).hermitize()
        if n == 1:
            inner = commutator(b0, prev.by) - anticommutator(prev.bx, prev.bz).scale(1j)
        else:
            inner = commutator(b0, prev.by)
        by = inner.scale(half_i).scale(tp).hermitize()
        cur = BathDecomposition(b0, bx, by, zero, system_position=d.system_position)
        trace.levels.append(cur)
        trace.h.append(_h_level(cur, norm_kind))
        if recursive:
            terms = _magnus(cycle_pieces(prev, tp))
            nxt = decompose(terms.effective_hamiltonian, d.system_position)
            trace.recursive_levels.append(nxt)
            trace.discrepancy.append(_rel_diff(cur, nxt, norm_kind))
        if float(trace.tau(n)) * beta >= WARN_THRESHOLD:
            trace.flags.append(f"level {n}: tau_n*||B0|| = {float(trace.tau(n)) * beta:.3g} >= 0.1")
        prev = cur
    return trace


def renormalize_finite_width(d: BathDecomposition, tau0, delta, n_levels: int,
                             norm_kind: str = "spectral") -> RenormalizationTrace:
    """Concatenation recursion with rectangular pulses of width ``delta``.

    Level ``n`` uses ``tau_{n-1} = 4^(n-1) tau0`` and the level ``n-1``
    operators in the commutator terms; the width terms proportional to
    ``delta / tau_{n-1}`` and the bare operator factors come from the
    original decomposition. These update rules do not preserve
    Hermiticity, so norms default to the spectral (singular value) norm.

    Raises
    ------
    WidthTooLarge
        If ``delta >= tau0``.
    """
    tau0, delta = as_time(tau0), as_time(delta)
    if delta < 0:
        raise BadParams("delta must be nonnegative")
    if delta >= tau0:
        raise WidthTooLarge("pulse width must be shorter than tau0")
    if int(n_levels) != n_levels or n_levels < 1:
        raise BadParams("n_levels must be a positive integer")
    trace = RenormalizationTrace([d], tau0, delta, norm_kind)
    trace.h.append(max(_spec_norms(d, norm_kind)[:2]))
    b0, bx0, by0, bz0 = d.b0, d.bx, d.by, d.bz
    inv_pi = 1.0 / math.pi
    prev = d
    beta = float(op_norm(b0, "spectral"))
    for n in range(1, int(n_levels) + 1):
        tp = trace.tau(n - 1)
        ratio = delta / tp
        px, py, pz = prev.bx, prev.by, prev.bz
        bx = (commutator(b0, px).scale(1j).scale(tp - delta)
              + (bx0.scale(Fraction(1, 2)) - by0.scale(inv_pi)).scale(ratio))
        xz = anticommutator(px, pz)
        by = ((commutator(b0, py) - xz.scale(1j)).scale(0.5j).scale(tp)
              + (commutator(b0, py) - xz.scale(2j) - (pz @ px).scale(2j)).scale(0.5j).scale(delta)
              + bz0.scale(inv_pi).scale(ratio))
        bz = ((px @ (bz0 + bx0)).scale(2 * inv_pi) + py @ bx0).scale(1j).scale(delta) + bz0.scale(ratio)
        cur = BathDecomposition(b0, bx, by, bz, system_position=d.system_position)
        trace.levels.append(cur)
        trace.h.append(max(_spec_norms(cur, norm_kind)[:2]))
        if float(trace.tau(n)) * beta >= WARN_THRESHOLD:
            trace.flags.append(f"level {n}: tau_n*||B0|| = {float(trace.tau(n)) * beta:.3g} >= 0.1")
        prev = cur
    return trace


def _spec_norms(d: BathDecomposition, kind: str):
    out = []
    for op in d.couplings:
        if kind == "eigen_spread" and not op.is_hermitian():
            out.append(float(op_norm(op, "spectral")))
        else:
            out.append(float(op_norm(op, kind)))
    return out


def appendix_b_norm_recursion(beta_x: float, beta_y: float, beta_z: float, beta: float,
                              tau0: float, delta: float, n: int) -> list:
    """Iterate the three upper-bound recursions for the coupling norms.

    Returns a list of ``(beta_x^(k), beta_y^(k), beta_z^(k))`` for
    ``k = 0..n``, with level 0 the inputs.
    """
    tau0, delta = float(tau0), float(delta)
    if delta >= tau0 or min(beta_x, beta_y, beta_z, beta, tau0, delta) < 0:
        raise BadParams("need nonnegative inputs and delta < tau0")
    out = [(beta_x, beta_y, beta_z)]
    px, py, pz = beta_x, beta_y, beta_z
    for k in range(1, int(n) + 1):
        tp = 4.0 ** (k - 1) * tau0
        r = delta / tp
        nx = 2 * (tp - delta) * beta * px + r * (beta_x / 2 + beta_y / math.pi)
        ny = (tp - delta) * beta * py + (tp - 2 * delta) * px * pz + r * beta_z / math.pi
        nz = delta * ((2 / math.pi) * px * (beta_z + beta_x) + py * beta_x) + r * beta_z
        out.append((nx, ny, nz))
        px, py, pz = nx, ny, nz
    return out


# ---------------------------------------------------------------------------
# error phase and analytic bounds


def error_phase_from_hamiltonian(h_eff: OperatorMatrix, t, norm_kind: str = "eigen_spread",
                                 system_position: str = "last"):
    """``Phi = t * ||H - B0 ⊗ I||``."""
    t = as_time(t) if not isinstance(t, float) else t
    if t <= 0:
        raise BadParams("duration must be positive")
    part = system_traceless_part(h_eff, 2, system_position).hermitize()
    norm = op_norm(part, norm_kind)
    if h_eff.is_mp:
        from .operators import to_mpfr

        return norm * to_mpfr(t, h_eff.bits)
    return norm * float(t)


def _params(c: CouplingStrengths, **kw) -> dict:
    out = {"J": c.j, "beta": c.beta, "G": c.g}
    out.update({k: (float(v) if isinstance(v, Fraction) else v) for k, v in kw.items()})
    return out


def bound_pdd(c: CouplingStrengths, tau0, t, delta=0.0) -> ErrorPhaseEstimate:
    """Periodic decoupling: ``Phi = T J (tau0 G + delta / tau0)``."""
    tau0, t, delta = float(tau0), float(t), float(delta)
    if tau0 <= 0 or t <= 0 or delta < 0:
        raise BadParams("need positive tau0, T and nonnegative delta")
    phi = t * c.j * (tau0 * c.g + delta / tau0)
    forms = {
        "ideal": t * c.j * tau0 * c.g,
        "two_beta_tau0_JT": 2 * c.beta * tau0 * c.j * t,
        "optimal_tau0": math.sqrt(delta / c.g) if c.g > 0 else math.inf,
    }
    return ErrorPhaseEstimate(phi, "PDD", _params(c, tau0=tau0, delta=delta, T=t, N=t / tau0, const=1.0), forms)


def bound_cdd(c: CouplingStrengths, tau0, n_f: int, regime: str = "fast_bath") -> ErrorPhaseEstimate:
    """Concatenated decoupling bound at level ``n_f`` with ``N = 4^n_f``, ``T = N tau0``.

    ``fast_bath``: ``Phi = (beta T / sqrt(N))^(log4 N) J T``.
    ``slow_bath``: ``h = (max(beta', beta) tau0)^n_f J^4`` with
    ``beta' = tau0^2 J^3`` and ``Phi = T h``. ``auto`` picks ``slow_bath``
    when ``beta < J / 10``.
    """
    if int(n_f) != n_f or n_f < 1:
        raise BadParams("n_f must be a positive integer")
    tau0 = float(tau0)
    n = 4 ** int(n_f)
    t = n * tau0
    if regime == "auto":
        regime = "slow_bath" if c.beta < c.j / 10 else "fast_bath"
    fast = (c.beta * t / math.sqrt(n)) ** n_f * (c.j * t)
    beta_p = tau0 ** 2 * c.j ** 3
    slow_h = (max(beta_p, c.beta) * tau0) ** n_f * c.j ** 4
    forms = {
        "fast_bath": fast,
        "slow_bath": t * slow_h,
        "table1_slow_bath": n * (c.j * t / n) ** (n ** math.log(2.5, 4)),
        "generalized": bound_cdd_generalized(c.j * t, n),
        "beta_prime": beta_p,
    }
    if regime == "fast_bath":
        phi, scheme = fast, "CDD"
    elif regime == "slow_bath":
        phi, scheme = t * slow_h, "CDD_slow_bath"
    else:
        raise BadParams(f"unknown regime {regime!r}")
    params = _params(c, tau0=tau0, T=t, N=n, n_f=int(n_f), const=1.0,
                     betaT_flag=c.beta * t >= 1.0)
    return ErrorPhaseEstimate(phi, scheme, params, forms)


def bound_cdd_generalized(phi0: float, n_pulses: int, alpha: float = 1.0, a: float = 1.0,
                          b: float = 1.0, log_base: float = 4.0) -> float:
    """``Phi0 (alpha N^-a)^(log N) N^b`` with the logarithm taken in ``log_base``."""
    n = float(n_pulses)
    return phi0 * (alpha * n ** (-a)) ** math.log(n, log_base) * n ** b


def bound_ratio(c_bt: float, beta_tau0: float) -> float:
    """Bound ratio ``Phi_CDD / Phi_PDD`` at fixed ``beta T = c_bt``."""
    x = float(beta_tau0)
    return (c_bt * x) ** (-0.5 * math.log(x / c_bt, 4)) / (2 * x)


def bound_tsds(c: CouplingStrengths, t, n_pulses: int) -> ErrorPhaseEstimate:
    """Trotter-Suzuki sequence: ``Phi = (T max(J, beta) / N)^sqrt(log4 N)``."""
    if n_pulses < 4:
        raise BadParams("need at least four pulses")
    t = float(t)
    expo = math.sqrt(math.log(n_pulses, 4))
    phi = (t * c.g / n_pulses) ** expo
    forms = {
        "beta_only": (c.beta * t / n_pulses) ** expo,
        "j_only": (c.j * t / n_pulses) ** expo,
    }
    return ErrorPhaseEstimate(phi, "TSDS", _params(c, T=t, N=n_pulses, const=1.0), forms)


def table1(c: CouplingStrengths, t, n_pulses: int) -> dict:
    """Asymptotic error phases of PDD, CDD and TSDS at equal ``T`` and ``N``."""
    t, n = float(t), int(n_pulses)
    expo = math.sqrt(math.log(n, 4))
    return {
        "PDD_fast": t * t * c.beta * c.j / n,
        "PDD_slow": t * t * c.j * c.j / n,
        "CDD_fast": (c.beta * t / math.sqrt(n)) ** math.log(n, 4) * c.j * t,
        "CDD_slow": n * (c.j * t / n) ** (n ** math.log(2.5, 4)),
        "TSDS_fast": (c.beta * t / n) ** expo,
        "TSDS_slow": (c.j * t / n) ** expo,
    }


def fidelity_estimate(phi: float) -> float:
    """Leading-order fidelity ``1 - Phi^2``."""
    return 1.0 - float(phi) ** 2


def convergence_check(c: CouplingStrengths, tau0, delta, n_f: int, t=None) -> ConvergenceReport:
    """Evaluate the convergence conditions of a concatenated run.

    Margins (flag passes when margin < limit):

    * ``magnus_radius``: ``(beta + 3 J) T``, limit 2, using
      ``||H|| <= ||B0|| + sum ||B_a||``.
    * ``taunb``: ``tau_{n_f} beta``, limit 1; values in ``[0.1, 1)`` warn.
    * ``width``: ``tau0 beta + delta / tau0``, limit 1.
    * ``xineq`` / ``yineq``: level-1 contraction conditions with ``a = b = 1``
      and ``beta_X`` replaced by ``J``.
    """
    tau0, delta = float(tau0), float(delta)
    if tau0 <= 0 or delta < 0:
        raise BadParams("need positive tau0 and nonnegative delta")
    t = float(t) if t is not None else 4.0 ** int(n_f) * tau0
    beta, j = c.beta, c.j
    r = delta / tau0
    margins = {
        "magnus_radius": (beta + 3 * j) * t,
        "taunb": 4.0 ** int(n_f) * tau0 * beta,
        "width": tau0 * beta + r,
        "xineq": 2 * (tau0 - delta) * beta + r * (0.5 + 1 / math.pi),
        "yineq": (tau0 - delta) * beta + (tau0 - 2 * delta) * j + r / math.pi,
    }
    limits = {"magnus_radius": 2.0, "taunb": 1.0, "width": 1.0, "xineq": 1.0, "yineq": 1.0}
    warnings = tuple(k for k in ("taunb", "width", "xineq", "yineq")
                     if WARN_THRESHOLD <= margins[k] < limits[k])
    ok = {k: margins[k] < limits[k] for k in margins}
    opt = math.sqrt(delta / beta) if beta > 0 else math.inf
    return ConvergenceReport(
        magnus_radius_ok=ok["magnus_radius"],
        taunb_ok=ok["taunb"],
        width_ok=ok["width"],
        appendix_b_ok=ok["xineq"] and ok["yineq"],
        optimal_tau0=opt,
        margins=margins,
        limits=limits,
        warnings=warnings,
    )


def system_part(h: OperatorMatrix, system_position: str = "last") -> OperatorMatrix:
    return system_traceless_part(h, 2, system_position)


def pauli_frame(axis: str, bath_dim: int, bits: int, system_position: str = "last") -> OperatorMatrix:
    return embed_system(OperatorMatrix.pauli(axis, bits), bath_dim, system_position)


__all__ = [
    "MagnusTerms",
    "RenormalizationTrace",
    "ErrorPhaseEstimate",
    "ConvergenceReport",
    "conjugated_hamiltonians",
    "magnus_a1_a2",
    "cycle_pieces",
    "toggling_frame_pieces",
    "renormalize_ideal",
    "renormalize_finite_width",
    "appendix_b_norm_recursion",
    "error_phase_from_hamiltonian",
    "bound_pdd",
    "bound_cdd",
    "bound_cdd_generalized",
    "bound_ratio",
    "bound_tsds",
    "table1",
    "fidelity_estimate",
    "convergence_check",
    "pauli_frame",
]
