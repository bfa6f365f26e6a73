import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from ddsim.errors import BadParams, IoError, NegativeInterval, Unsupported, WidthTooLarge
from ddsim.sequences import (
    Free,
    IdealPulse,
    PulseSequence,
    RectPulse,
    adjust_for_width,
    as_time,
    from_compact,
    gen_cdd,
    gen_concat_cpmg,
    gen_cpmg,
    gen_pdd,
    gen_tsds,
    gen_universal_cycle,
    simplify_pauli,
    tsds_coefficients,
)

TAU = Fraction(1, 10 ** 8)


def bare_product(seq):
    """Bare pulse unitaries multiplied in time order (numpy oracle)."""
    u = np.eye(2, dtype=complex)
    for s in seq.segments:
        if isinstance(s, (IdealPulse, RectPulse)):
            p = np.cos(s.angle / 2) * np.eye(2) - 1j * np.sin(s.angle / 2) * oracles.PAULI[s.axis]
            u = p @ u
    return u


def equal_up_to_phase(a, b, tol=1e-12):
    k = np.argmax(np.abs(b))
    ph = a.flat[k] / b.flat[k]
    return abs(abs(ph) - 1) < tol and np.max(np.abs(a - ph * b)) < tol


def test_as_time_exact():
    assert as_time(1e-8) == Fraction(1, 10 ** 8)
    assert as_time("2.5e-9") == Fraction(1, 4 * 10 ** 8)


def test_universal_cycle_layout():
    s = gen_universal_cycle(TAU)
    assert s.compact() == "fXfZfXfZ"
    assert s.pulse_count == 4 and s.total_duration == 4 * TAU


def test_universal_cycle_net_identity():
    assert equal_up_to_phase(bare_product(gen_universal_cycle(TAU)), np.eye(2))


def test_universal_cycle_is_cdd1():
    assert gen_universal_cycle(TAU).segments == gen_cdd(TAU, 1).segments


def test_universal_cycle_bad_tau():
    with pytest.raises(BadParams):
        gen_universal_cycle(0)


def test_pdd_examples():
    assert gen_pdd(TAU, 1).segments == gen_universal_cycle(TAU).segments
    t = Fraction(1, 10 ** 5)
    s = gen_pdd(t / 64, 16)
    assert s.total_duration == t and s.pulse_count == 64 and s.free_count == 64
    with pytest.raises(BadParams):
        gen_pdd(TAU, 0)


def test_cdd_examples():
    assert gen_cdd(TAU, 0).segments == (Free(TAU),)
    assert gen_cdd(TAU, 2).total_duration == 16 * TAU
    assert gen_cdd(TAU, 3).pulse_count == 84


@pytest.mark.parametrize("n", range(0, 7))
def test_cdd_counts(n):
    s = gen_cdd(TAU, n)
    assert s.total_duration == 4 ** n * TAU
    assert s.pulse_count == 4 * (4 ** n - 1) // 3


@pytest.mark.parametrize("n", range(1, 6))
def test_pdd_cdd_same_frame(n):
    c, p = gen_cdd(TAU, n), gen_pdd(TAU, 4 ** (n - 1))
    assert c.total_duration == p.total_duration and c.free_count == p.free_count


def test_cpmg():
    s = gen_cpmg(TAU, 1)
    assert s.compact() == "XfXf" and s.pulse_count == 2 and s.total_duration == 2 * TAU
    assert equal_up_to_phase(bare_product(s), np.eye(2))
    assert gen_cpmg(TAU, 3).pulse_count == 6


def test_concat_cpmg_layouts():
    p2 = gen_concat_cpmg(TAU, 2)
    assert p2.compact() == "fXffXf" and p2.pulse_count == 2 and p2.free_count == 4
    assert gen_concat_cpmg(TAU, 1).total_duration == 2 * TAU
    p3 = gen_concat_cpmg(TAU, 3)
    # the level-3 layout has six X pulses
    assert p3.compact() == "XfXffXfXfXffXf" and p3.pulse_count == 6
    with pytest.raises(Unsupported):
        gen_concat_cpmg(TAU, 4)


def test_tsds_order2_is_universal_layout():
    assert gen_tsds(2, TAU).compact() == "fXfZfXfZ"


def test_tsds_order3_palindromic_positive():
    s = gen_tsds(3, TAU)
    frees = [seg.duration for seg in s.segments if isinstance(seg, Free)]
    assert all(f > 0 for f in frees)
    assert frees == frees[::-1]
    assert frees[0] == TAU / 2
    assert equal_up_to_phase(bare_product(s), np.eye(2))


def test_tsds_coefficients_sum():
    assert sum(c for _, c in tsds_coefficients(3)) == 4


@pytest.mark.parametrize("order", [4, 5])
def test_tsds_high_order_negative(order):
    with pytest.raises(NegativeInterval):
        gen_tsds(order, TAU)


def test_simplify_examples():
    assert simplify_pauli(from_compact("XX", TAU)).segments == ()
    assert simplify_pauli(from_compact("XY", TAU)).compact() == "Z"
    group = from_compact("IfIXfXYfYZfZ", TAU)
    assert simplify_pauli(group).compact() == "fXfZfXfZ"


def test_simplify_rejects_rect():
    with pytest.raises(Unsupported):
        simplify_pauli(PulseSequence((RectPulse("X", math.pi, TAU),)))


@settings(max_examples=50, deadline=None)
@given(st.text(alphabet="IXYZf", max_size=20))
def test_simplify_preserves_net_unitary(pattern):
    s = from_compact(pattern, TAU)
    t = simplify_pauli(s)
    assert equal_up_to_phase(bare_product(s), bare_product(t))
    assert t.total_duration == s.total_duration
    assert "II" not in t.compact()


def test_adjust_zero_width_unchanged():
    s = gen_universal_cycle(TAU)
    assert adjust_for_width(s, 0) is s


def test_adjust_preserves_duration():
    s = adjust_for_width(gen_universal_cycle(TAU), TAU / 10)
    assert s.total_duration == 4 * TAU and s.pulse_count == 4
    assert all(isinstance(x, RectPulse) for x in s.segments if not isinstance(x, Free))
    assert s.segments[0] == Free(TAU * 9 / 10)


def test_adjust_boundary():
    with pytest.raises(WidthTooLarge):
        adjust_for_width(gen_universal_cycle(TAU), TAU)


@settings(max_examples=30, deadline=None)
@given(n=st.integers(1, 4), frac=st.fractions(Fraction(1, 1000), Fraction(1, 5)))
def test_adjust_invariants_cdd(n, frac):
    s = gen_cdd(TAU, n)
    try:
        a = adjust_for_width(s, TAU * frac)
    except WidthTooLarge:
        assert n * frac >= 1
        return
    assert a.total_duration == s.total_duration and a.pulse_count == s.pulse_count


def test_text_round_trip_terminating_exact(tmp_path):
    s = adjust_for_width(gen_cdd(Fraction(1, 4 * 10 ** 8), 2), Fraction(1, 10 ** 12))
    p = tmp_path / "seq.txt"
    s.save(p)
    assert PulseSequence.load(p).segments == s.segments


def test_text_round_trip_repeating_forty_digits():
    s = gen_cdd(Fraction(1, 3 * 10 ** 8), 2)
    back = PulseSequence.from_text(s.to_text())
    for a, b in zip(back.segments, s.segments):
        if isinstance(a, Free):
            assert abs(a.duration - b.duration) <= b.duration * Fraction(1, 10 ** 39)
        else:
            assert a == b


def test_text_format_lines():
    s = PulseSequence((Free(TAU), IdealPulse("X"), RectPulse("Y", 1.0, Fraction(1, 10 ** 12))))
    assert s.to_text().splitlines() == ["F 1E-8", f"P X {math.pi!r}", "R Y 1.0 1E-12"]


def test_text_parse_errors(tmp_path):
    with pytest.raises(BadParams):
        PulseSequence.from_text("Q 1")
    with pytest.raises(IoError):
        PulseSequence.load(tmp_path / "missing.txt")


def test_segment_validation():
    with pytest.raises(BadParams):
        Free(-1)
    with pytest.raises(BadParams):
        IdealPulse("W")
