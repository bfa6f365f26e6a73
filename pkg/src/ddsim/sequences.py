"""Pulse-sequence intermediate representation and generators.

A :class:`PulseSequence` is an ordered tuple of segments read in time order
(the leftmost segment acts first). Durations are exact ``Fraction`` seconds
so concatenated constructions keep exact total durations; floats are
converted through their shortest decimal representation.
"""

from __future__ import annotations

import decimal
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence, Union

from .errors import BadParams, IoError, NegativeInterval, Unsupported, WidthTooLarge

PAULI_AXES = ("X", "Y", "Z")
# Pauli labels as bit pairs so that products (up to phase) are XOR
_CODE = {"I": 0, "X": 1, "Z": 2, "Y": 3}
_AXIS = {v: k for k, v in _CODE.items()}
# frame index n_i -> conjugating Pauli
_FRAMES = ("I", "X", "Y", "Z")


def as_time(x) -> Fraction:
    """Exact rational seconds from float, int, str, Decimal or Fraction."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, float):
        if not math.isfinite(x):
            raise BadParams("durations must be finite")
        return Fraction(repr(x))
    if isinstance(x, str):
        return Fraction(x.strip())
    return Fraction(x)


def _is_pi(angle: float) -> bool:
    return abs(float(angle) - math.pi) <= 4e-16


@dataclass(frozen=True)
class Free:
    """Free evolution under the error Hamiltonian."""

    duration: Fraction

    def __post_init__(self):
        d = as_time(self.duration)
        if d < 0:
            raise BadParams("free duration must be nonnegative")
        object.__setattr__(self, "duration", d)


@dataclass(frozen=True)
class IdealPulse:
    """Instantaneous rotation ``exp(-i angle/2 sigma_axis)``.

    The float ``math.pi`` stands for an exact pi rotation. Axis ``I`` is the
    identity pulse used in group-form layouts.
    """

    axis: str
    angle: float = math.pi

    def __post_init__(self):
        ax = self.axis.upper()
        if ax not in _CODE:
            raise BadParams(f"unknown axis {self.axis!r}")
        object.__setattr__(self, "axis", ax)
        object.__setattr__(self, "angle", float(self.angle))


@dataclass(frozen=True)
class RectPulse:
    """Rectangular pulse of width ``width`` acting together with the error Hamiltonian."""

    axis: str
    angle: float
    width: Fraction

    def __post_init__(self):
        ax = self.axis.upper()
        if ax not in PAULI_AXES:
            raise BadParams(f"unknown axis {self.axis!r}")
        w = as_time(self.width)
        if w < 0:
            raise BadParams("pulse width must be nonnegative")
        object.__setattr__(self, "axis", ax)
        object.__setattr__(self, "angle", float(self.angle))
        object.__setattr__(self, "width", w)


Segment = Union[Free, IdealPulse, RectPulse]


def is_pulse(seg: Segment) -> bool:
    return not isinstance(seg, Free)


@dataclass(frozen=True)
class PulseSequence:
    """Ordered segments with a descriptive label."""

    segments: tuple = field(default_factory=tuple)
    label: str = ""

    def __post_init__(self):
        object.__setattr__(self, "segments", tuple(self.segments))

    def __len__(self) -> int:
        return len(self.segments)

    def __iter__(self):
        return iter(self.segments)

    def __add__(self, other: "PulseSequence") -> "PulseSequence":
        return PulseSequence(self.segments + other.segments, self.label or other.label)

    @property
    def total_duration(self) -> Fraction:
        total = Fraction(0)
        for s in self.segments:
            if isinstance(s, Free):
                total += s.duration
            elif isinstance(s, RectPulse):
                total += s.width
        return total

    @property
    def pulse_count(self) -> int:
        return sum(1 for s in self.segments if is_pulse(s))

    @property
    def free_count(self) -> int:
        return sum(1 for s in self.segments if isinstance(s, Free))

    @property
    def pulse_axes(self) -> str:
        return "".join(s.axis for s in self.segments if is_pulse(s))

    def compact(self) -> str:
        """Letters in time order, ``f`` for free segments."""
        return "".join("f" if isinstance(s, Free) else s.axis for s in self.segments)

    def relabel(self, label: str) -> "PulseSequence":
        return PulseSequence(self.segments, label)

    # text format
    def to_text(self) -> str:
        lines = []
        for s in self.segments:
            if isinstance(s, Free):
                lines.append(f"F {format_time(s.duration)}")
            elif isinstance(s, IdealPulse):
                lines.append(f"P {s.axis} {s.angle!r}")
            else:
                lines.append(f"R {s.axis} {s.angle!r} {format_time(s.width)}")
        return "\n".join(lines) + ("\n" if lines else "")

    @classmethod
    def from_text(cls, text: str, label: str = "") -> "PulseSequence":
        segs = []
        for num, raw in enumerate(text.splitlines(), 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.split()
            kind = parts[0].upper()
            try:
                if kind == "F" and len(parts) == 2:
                    segs.append(Free(as_time(parts[1])))
                elif kind == "P" and len(parts) in (2, 3):
                    segs.append(IdealPulse(parts[1], float(parts[2]) if len(parts) == 3 else math.pi))
                elif kind == "R" and len(parts) == 4:
                    segs.append(RectPulse(parts[1], float(parts[2]), as_time(parts[3])))
                else:
                    raise BadParams(f"line {num}: cannot parse {raw!r}")
            except (ValueError, ZeroDivisionError) as exc:
                raise BadParams(f"line {num}: {exc}") from exc
        return cls(tuple(segs), label)

    def save(self, path) -> None:
        try:
            with open(path, "w", encoding="ascii") as fh:
                fh.write(self.to_text())
        except OSError as exc:
            raise IoError(str(exc)) from exc

    @classmethod
    def load(cls, path, label: str = "") -> "PulseSequence":
        try:
            with open(path, encoding="ascii") as fh:
                return cls.from_text(fh.read(), label)
        except OSError as exc:
            raise IoError(str(exc)) from exc


def format_time(t: Fraction) -> str:
    """Exact decimal when the denominator is ``2^a 5^b``, else 40 significant digits."""
    t = Fraction(t)
    den = t.denominator
    for p in (2, 5):
        while den % p == 0:
            den //= p
    # a terminating expansion of n/d has at most len(n) + 3 log10(d) digits
    prec = 40 if den != 1 else len(str(abs(t.numerator))) + 3 * len(str(t.denominator)) + 5
    ctx = decimal.Context(prec=prec)
    return str(ctx.divide(decimal.Decimal(t.numerator), decimal.Decimal(t.denominator)).normalize(ctx))


def from_compact(pattern: str, tau, label: str = "") -> PulseSequence:
    """Build a sequence from letters such as ``"fXfZ"`` with free length ``tau``."""
    tau = as_time(tau)
    segs = []
    for ch in pattern:
        if ch == "f":
            segs.append(Free(tau))
        elif ch.upper() in _CODE:
            segs.append(IdealPulse(ch.upper()))
        elif not ch.isspace():
            raise BadParams(f"unknown symbol {ch!r}")
    return PulseSequence(tuple(segs), label)


def _positive(tau, name="tau0") -> Fraction:
    t = as_time(tau)
    if t <= 0:
        raise BadParams(f"{name} must be positive")
    return t


# ---------------------------------------------------------------------------
# generators


def gen_universal_cycle(tau0) -> PulseSequence:
    """``f X f Z f X f Z`` with free intervals ``tau0``."""
    return from_compact("fXfZfXfZ", _positive(tau0), "universal")


def gen_pdd(tau0, cycles: int) -> PulseSequence:
    """Periodic repetition of the universal cycle."""
    if int(cycles) != cycles or cycles < 1:
        raise BadParams("cycles must be a positive integer")
    cyc = gen_universal_cycle(tau0)
    return PulseSequence(cyc.segments * int(cycles), f"pdd{cycles}")


def gen_cdd(tau0, level: int) -> PulseSequence:
    """Concatenated sequence ``p_n = p_{n-1} X p_{n-1} Z p_{n-1} X p_{n-1} Z``."""
    if int(level) != level or level < 0:
        raise BadParams("level must be a nonnegative integer")
    tau0 = _positive(tau0)
    x, z = IdealPulse("X"), IdealPulse("Z")
    p = (Free(tau0),)
    for _ in range(int(level)):
        p = p + (x,) + p + (z,) + p + (x,) + p + (z,)
    return PulseSequence(p, f"cdd{level}")


def gen_cpmg(tau, reps: int) -> PulseSequence:
    """``X f X f`` repeated ``reps`` times."""
    if int(reps) != reps or reps < 1:
        raise BadParams("reps must be a positive integer")
    base = from_compact("XfXf", _positive(tau, "tau"))
    return PulseSequence(base.segments * int(reps), f"cpmg{reps}")


_CONCAT_CPMG = {1: "XfXf", 2: "fXffXf", 3: "XfXffXfXfXffXf"}


def gen_concat_cpmg(tau, level: int) -> PulseSequence:
    """Concatenated CPMG layouts for levels 1 to 3 as literal letter strings."""
    if level not in _CONCAT_CPMG:
        raise Unsupported("concatenated CPMG is only defined for levels 1, 2 and 3")
    return from_compact(_CONCAT_CPMG[level], _positive(tau, "tau"), f"ccpmg{level}")


def _merge_same(terms):
    out = []
    for idx, c in terms:
        if out and out[-1][0] == idx:
            out[-1] = (idx, out[-1][1] + c)
        else:
            out.append((idx, c))
    return out


def _strang(weight):
    half = weight / 2
    return [(0, half), (1, half), (2, half), (3, weight), (2, half), (1, half), (0, half)]


def tsds_coefficients(order: int) -> list:
    """Frame index and coefficient pairs ``(n_i, c_i)`` for a product formula.

    ``order`` is the exponent of the leading neglected term: 2 for the plain
    product, 3 for the symmetric product. Higher orders use the Suzuki
    fractal recursion, which always contains a negative coefficient.

    Raises
    ------
    NegativeInterval
        When any coefficient is negative.
    """
    if int(order) != order or order < 2:
        raise BadParams("order must be an integer >= 2")
    if order == 2:
        return [(0, Fraction(1)), (1, Fraction(1)), (2, Fraction(1)), (3, Fraction(1))]
    if order == 3:
        return _strang(Fraction(1))
    # Suzuki recursion from the symmetric second-order product up to the
    # smallest even method order >= order - 1
    target = order - 1 + ((order - 1) % 2)
    terms = _strang(1.0)
    k = 2
    while k < target:
        k += 2
        p = 1.0 / (4.0 - 4.0 ** (1.0 / (k - 1)))
        outer = [(i, c * p) for i, c in terms]
        inner = [(i, c * (1.0 - 4.0 * p)) for i, c in terms]
        terms = _merge_same(outer + outer + inner + outer + outer)
    negative = [c for _, c in terms if c < 0]
    if negative:
        raise NegativeInterval(
            f"order {order} product formula needs negative coefficient {min(negative):.6g}"
        )
    return terms  # pragma: no cover - every Suzuki level has a negative weight


def gen_tsds(order: int, tau_min) -> PulseSequence:
    """Decoupling sequence realizing a product formula over the four Pauli frames.

    Each term ``(n_i, c_i)`` becomes ``P_n f[c_i tau_min] P_n``; adjacent pulses
    are then merged with :func:`simplify_pauli`.
    """
    tau = _positive(tau_min, "tau_min")
    segs = []
    for idx, c in tsds_coefficients(order):
        if c <= 0:
            raise NegativeInterval(f"coefficient {c} is not positive")
        p = IdealPulse(_FRAMES[idx])
        segs.extend([p, Free(tau * c), p])
    return simplify_pauli(PulseSequence(tuple(segs), f"tsds{order}")).relabel(f"tsds{order}")


# ---------------------------------------------------------------------------
# transforms


def simplify_pauli(seq: PulseSequence) -> PulseSequence:
    """Merge runs of adjacent pi pulses into one Pauli (up to phase) and drop identities.

    Raises
    ------
    Unsupported
        For rectangular pulses or ideal pulses with angles other than pi.
    """
    out = []
    code = 0
    for s in seq.segments:
        if isinstance(s, RectPulse):
            raise Unsupported("simplification applies to ideal pulses only")
        if isinstance(s, IdealPulse):
            if s.axis != "I" and not _is_pi(s.angle):
                raise Unsupported("simplification needs pi pulses")
            code ^= _CODE[s.axis]
            continue
        if code:
            out.append(IdealPulse(_AXIS[code]))
            code = 0
        out.append(s)
    if code:
        out.append(IdealPulse(_AXIS[code]))
    return PulseSequence(tuple(out), seq.label)


def adjust_for_width(seq: PulseSequence, delta) -> PulseSequence:
    """Replace ideal pulses by rectangular pulses of width ``delta``.

    Each pulse takes its width from the closest preceding free segment, or
    from the following one when no free segment precedes it, so the total
    duration is unchanged. Identity pulses are dropped.

    Raises
    ------
    WidthTooLarge
        If a free segment would become empty or negative.
    """
    delta = as_time(delta)
    if delta < 0:
        raise BadParams("delta must be nonnegative")
    if delta == 0:
        return seq
    segs = [s for s in seq.segments if not (isinstance(s, IdealPulse) and s.axis == "I")]
    durations = {}
    out = []
    last_free = None
    orphan = 0
    for s in segs:
        if isinstance(s, Free):
            out.append(s)
            last_free = len(out) - 1
            durations[last_free] = s.duration - orphan * delta
            orphan = 0
        elif isinstance(s, IdealPulse):
            out.append(RectPulse(s.axis, s.angle, delta))
            if last_free is None:
                orphan += 1
            else:
                durations[last_free] -= delta
        else:
            raise Unsupported("sequence already contains rectangular pulses")
    if orphan:
        raise WidthTooLarge("trailing pulses have no free segment to take their width from")
    for idx, dur in durations.items():
        if dur <= 0:
            raise WidthTooLarge(f"pulse width {float(delta):.3g} s leaves no free evolution")
        out[idx] = Free(dur)
    return PulseSequence(tuple(out), seq.label)


def pulses_only(seq: PulseSequence) -> list:
    return [s for s in seq.segments if is_pulse(s)]


__all__ = [
    "PAULI_AXES",
    "Free",
    "IdealPulse",
    "RectPulse",
    "Segment",
    "PulseSequence",
    "as_time",
    "format_time",
    "from_compact",
    "is_pulse",
    "gen_universal_cycle",
    "gen_pdd",
    "gen_cdd",
    "gen_cpmg",
    "gen_concat_cpmg",
    "gen_tsds",
    "tsds_coefficients",
    "simplify_pauli",
    "adjust_for_width",
    "pulses_only",
]
