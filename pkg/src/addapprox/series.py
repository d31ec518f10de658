"""Truncated asymptotic-series data and expansion machinery.

A function known near zero is a ``SmallSeries`` a_0 + a_1 x + ... + a_k x^k.
Its behaviour at infinity is a ``PowerLadder`` of descending exponents
beta_1 > beta_2 > ..., optionally with known amplitudes.  Approximants built
from terms A (1 + shift*x)^p are re-expanded on either side here:

* at small x, the coefficient of x^n is  sum_t A_t binom(p_t, n) shift^n;
* at large x, term t spreads onto powers p_t - m with coefficients
  A_t binom(p_t, m) shift^(p_t - m).

Powers are kept as exact ``fractions.Fraction`` values so that power
coincidences (which drive counter-term cancellation) are decided exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational

from mpmath import mp, mpf, mpc

__all__ = [
    "as_power",
    "SmallSeries",
    "PowerLadder",
    "GeneralizedTerm",
    "binom",
    "small_expand",
    "large_expand",
    "invariance_check",
]

# Absolute tolerance for identifying powers given as floats; exact rational
# input (int, Fraction, "p/q" strings) never goes through this path.
POWER_TOLERANCE = 1e-9


def as_power(value) -> Fraction:
    """Coerce an exponent to an exact Fraction.

    Accepts Fraction/int (exact), strings like "-1/4" or "0.25" (exact), and
    floats, which are snapped to the nearest small-denominator rational and
    must land within POWER_TOLERANCE of the input.
    """
    if isinstance(value, Rational):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value.strip())
    if isinstance(value, float) or isinstance(value, mpf):
        if not math.isfinite(float(value)):
            raise ValueError("power must be finite")
        frac = Fraction(float(value)).limit_denominator(10**9)
        if abs(float(frac) - float(value)) > POWER_TOLERANCE:
            raise ValueError(f"power {value!r} is not close to a rational")
        return frac
    raise TypeError(f"cannot interpret {value!r} as a power")


def _is_finite_number(x) -> bool:
    if isinstance(x, Rational):
        return True
    try:
        xc = mpc(x)
    except (TypeError, ValueError):
        return False
    return mp.isfinite(xc)


@dataclass(frozen=True)
class SmallSeries:
    """Truncated expansion a_0..a_k about x = 0; order k = len(coeffs) - 1.

    Coefficients may be ints, Fractions, floats or mpmath scalars; exact
    inputs are kept exact.
    """

    coeffs: tuple

    def __post_init__(self):
        coeffs = tuple(self.coeffs)
        if not coeffs:
            raise ValueError("a series needs at least the constant term")
        for c in coeffs:
            if not _is_finite_number(c):
                raise ValueError(f"series coefficient {c!r} is not finite")
        object.__setattr__(self, "coeffs", coeffs)

    @property
    def order(self) -> int:
        return len(self.coeffs) - 1

    def truncated(self, order: int) -> "SmallSeries":
        if order > self.order:
            raise ValueError(f"series only carries order {self.order}, need {order}")
        return SmallSeries(self.coeffs[: order + 1])

    def __call__(self, x):
        acc = mpf(0)
        for c in reversed(self.coeffs):
            acc = acc * x + _to_mp(c)
        return acc


def _to_mp(value):
    """Fraction/int/float/mp scalar -> mpf or mpc at current precision."""
    if isinstance(value, Rational):
        return mpf(value.numerator) / value.denominator if value.denominator != 1 else mpf(value.numerator)
    if isinstance(value, complex):
        return mpc(value)
    return value if isinstance(value, (mpf, mpc)) else mpf(value)


@dataclass(frozen=True)
class PowerLadder:
    """Descending large-variable exponents beta_1 > beta_2 > ...

    amplitudes, when present, are the known large-variable coefficients
    b_1..b_p aligned with the powers.  spacing, when present, asserts the
    constant difference beta_n - beta_{n+1}.
    """

    powers: tuple
    amplitudes: tuple | None = None
    spacing: Fraction | None = None

    def __post_init__(self):
        powers = tuple(as_power(p) for p in self.powers)
        if not powers:
            raise ValueError("a power ladder needs at least one power")
        for hi, lo in zip(powers, powers[1:]):
            if not hi > lo:
                raise ValueError(f"ladder powers must strictly descend, got {hi} <= {lo}")
        spacing = None if self.spacing is None else as_power(self.spacing)
        if spacing is not None:
            for hi, lo in zip(powers, powers[1:]):
                if hi - lo != spacing:
                    raise ValueError(
                        f"ladder spacing {spacing} violated by pair ({hi}, {lo})"
                    )
        amplitudes = self.amplitudes
        if amplitudes is not None:
            amplitudes = tuple(amplitudes)
            if len(amplitudes) > len(powers):
                raise ValueError("more amplitudes than powers")
        object.__setattr__(self, "powers", powers)
        object.__setattr__(self, "spacing", spacing)
        object.__setattr__(self, "amplitudes", amplitudes)

    @classmethod
    def arithmetic(cls, first, spacing, count: int, amplitudes=None) -> "PowerLadder":
        """Ladder beta_n = first - (n-1)*spacing for n = 1..count."""
        first = as_power(first)
        spacing = as_power(spacing)
        if spacing <= 0:
            raise ValueError("spacing must be positive")
        powers = tuple(first - n * spacing for n in range(count))
        return cls(powers, amplitudes=amplitudes, spacing=spacing)

    def __len__(self) -> int:
        return len(self.powers)

    @property
    def leading(self) -> Fraction:
        return self.powers[0]


@dataclass(frozen=True)
class GeneralizedTerm:
    """One summand A (1 + shift*x)^power of an additive form."""

    power: Fraction
    amplitude: object

    def __post_init__(self):
        object.__setattr__(self, "power", as_power(self.power))
        if not _is_finite_number(self.amplitude):
            raise ValueError("term amplitude must be finite")


def binom(beta, n: int):
    """Generalized binomial coefficient beta (beta-1) ... (beta-n+1) / n!.

    Computed by the recurrence b_n = b_{n-1} (beta - n + 1) / n, which holds
    exactly in the working precision.  Exact (Fraction) when beta is exact.
    """
    if n < 0:
        raise ValueError("n must be nonnegative")
    if isinstance(beta, Rational):
        b = Fraction(1)
        for i in range(1, n + 1):
            b = b * (Fraction(beta) - i + 1) / i
        return b
    b = mpf(1)
    beta = _to_mp(beta)
    for i in range(1, n + 1):
        b = b * (beta - i + 1) / i
    return b


def _term_list(terms):
    out = []
    for t in terms:
        if isinstance(t, GeneralizedTerm):
            out.append((t.power, t.amplitude))
        else:
            power, amplitude = t
            out.append((as_power(power), amplitude))
    return out


def small_expand(terms, shift, order: int):
    """Taylor coefficients about x = 0 of sum_t A_t (1 + shift*x)^{p_t}.

    Returns [c_0, ..., c_order] with c_n = sum_t A_t binom(p_t, n) shift^n.
    The shift may be complex (conjugate-pair solutions).
    """
    if order < 0:
        raise ValueError("order must be nonnegative")
    pairs = _term_list(terms)
    shift = mpc(shift) if isinstance(shift, (complex, mpc)) else _to_mp(shift)
    out = []
    shift_pow = mpf(1)
    for n in range(order + 1):
        acc = mpc(0)
        for power, amplitude in pairs:
            acc += mpc(amplitude) * _to_mp(binom(power, n))
        out.append(acc * shift_pow)
        shift_pow = shift_pow * shift
    return out


def large_expand(terms, shift, depth: int):
    """Descending expansion at x -> infinity of sum_t A_t (1 + shift*x)^{p_t}.

    Term t contributes A_t binom(p_t, m) shift^{p_t - m} at power p_t - m for
    m = 0..depth; contributions at coinciding powers are merged.  Returns
    [(power, coefficient)] sorted by descending power.  Requires shift > 0,
    since the form must stay real and finite on [0, inf).
    """
    if depth < 1:
        raise ValueError("depth must be at least 1")
    try:
        positive = shift > 0
    except TypeError:
        positive = False
    if not positive:
        raise ValueError("large_expand requires a real positive shift")
    shift = _to_mp(shift)
    merged: dict[Fraction, mpc] = {}
    for power, amplitude in _term_list(terms):
        for m in range(depth + 1):
            p_out = power - m
            coeff = mpc(amplitude) * _to_mp(binom(power, m)) * shift ** _to_mp(power - m)
            merged[p_out] = merged.get(p_out, mpc(0)) + coeff
    return sorted(merged.items(), key=lambda kv: kv[0], reverse=True)


def invariance_check(ladder: PowerLadder) -> bool:
    """True when shifting any ladder power down by 1 lands on another ladder
    power, whenever the shifted value is still inside the ladder's range.

    For a constant-spacing ladder this is equivalent to 1 being an integer
    multiple of the spacing.
    """
    powers = set(ladder.powers)
    low = min(ladder.powers)
    for p in ladder.powers:
        shifted = p - 1
        if shifted >= low and shifted not in powers:
            return False
    return True
