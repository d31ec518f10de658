"""Construction of additive approximants from asymptotic data.

An additive approximant is a finite sum

    f*(x) = sum_i A_i (1 + shift*x)^{beta_i} + sum_j C_j (1 + shift*x)^{gamma_j}

sharing one shift parameter.  The main powers beta_i are the leading entries
of the target power ladder; the counter powers gamma_j = beta_j - 1 are added
only when the ladder is not invariant under a downward unit shift, and their
amplitudes are fixed by cancelling the spurious large-variable powers they
would otherwise leave behind.

Solving strategy.  Every matching condition is linear in the amplitudes once
the shift is frozen:

* matching the Taylor coefficient a_n gives
      sum_t A_t binom(p_t, n) = a_n * mu^n          with mu = 1/shift,
* matching a large-variable coefficient b at power beta gives
      sum_t A_t binom(p_t, p_t - beta) = b * mu^beta,
* cancelling the large-variable coefficient at power gamma gives
      sum_t A_t binom(p_t, p_t - gamma) = 0.

With N amplitudes and N+1 conditions the system is solvable exactly when the
determinant of the augmented matrix vanishes.  Expanding that determinant
along the right-hand-side column yields a finite combination of monomials
mu^{s_r}; after clearing denominators in the exponents it becomes an ordinary
polynomial in tau, where mu = tau^D and D is the least common multiple of the
exponent denominators (D = 1 for pure small-variable matching).  Its roots
enumerate every solution of the nonlinear system; each root is backsolved for
the amplitudes and verified against all conditions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from mpmath import mp, mpf, mpc

from .numeric import (
    DEFAULT_CONTEXT,
    Polynomial,
    PrecisionContext,
    SingularMatrixError,
    poly_roots,
    solve_linear,
)
from .series import PowerLadder, SmallSeries, as_power, binom, invariance_check

__all__ = [
    "AdditiveApproximant",
    "ConditionSet",
    "SolutionSet",
    "AmplitudeReport",
    "ConditionBalanceError",
    "NoValidSolutionError",
    "ResidualFailureError",
    "StrategyError",
    "counterterm_powers",
    "assemble_conditions",
    "elimination_polynomial",
    "solve",
    "amplitude",
    "strategy_amplitude",
    "evaluate",
]


class ConditionBalanceError(ValueError):
    """Condition count does not balance the unknown count."""


class NoValidSolutionError(RuntimeError):
    """Every elimination root was rejected (or none existed)."""


class ResidualFailureError(RuntimeError):
    """A retained solution failed to re-verify one of its conditions."""


class StrategyError(ValueError):
    """The requested selection strategy has no solutions to act on."""


@dataclass(frozen=True)
class AdditiveApproximant:
    """One solved additive form.

    shift is real (mpf) for real solutions and complex (mpc) for members of
    conjugate pairs; main_terms and counter_terms are tuples of
    (power: Fraction, amplitude) pairs, amplitudes matching the shift's kind.
    """

    shift: object
    main_terms: tuple
    counter_terms: tuple = ()

    @property
    def terms(self) -> tuple:
        return self.main_terms + self.counter_terms

    @property
    def is_real(self) -> bool:
        if mp.im(mpc(self.shift)) != 0:
            return False
        return all(mp.im(mpc(a)) == 0 for _, a in self.terms)

    @property
    def leading_power(self) -> Fraction:
        return self.main_terms[0][0]


@dataclass(frozen=True)
class ConditionSet:
    """Matching data: Taylor orders, large-variable amplitudes, cancellations.

    small_orders: tuple of (n, a_n), contiguous from n = 0;
    large_matches: tuple of (power, b) pairs;
    cancellations: tuple of powers whose large-variable coefficient must vanish.
    """

    small_orders: tuple
    large_matches: tuple = ()
    cancellations: tuple = ()

    def __post_init__(self):
        small = tuple((int(n), v) for n, v in self.small_orders)
        if [n for n, _ in small] != list(range(len(small))):
            raise ConditionBalanceError("small orders must be contiguous from 0")
        large = tuple((as_power(p), v) for p, v in self.large_matches)
        cancels = tuple(as_power(p) for p in self.cancellations)
        object.__setattr__(self, "small_orders", small)
        object.__setattr__(self, "large_matches", large)
        object.__setattr__(self, "cancellations", cancels)

    @property
    def order(self) -> int:
        """Number k of main ladder powers the conditions determine."""
        return len(self.small_orders) + len(self.large_matches) - 1

    @property
    def n_conditions(self) -> int:
        return len(self.small_orders) + len(self.large_matches) + len(self.cancellations)


@dataclass(frozen=True)
class SolutionSet:
    """All admissible solutions of one construction, deterministically ordered.

    classification[i] is "real" or ("pair", j) with j the index of the
    conjugate partner.
    """

    solutions: tuple
    classification: tuple

    def __len__(self) -> int:
        return len(self.solutions)

    @property
    def real_solutions(self) -> tuple:
        return tuple(
            s for s, tag in zip(self.solutions, self.classification) if tag == "real"
        )

    @property
    def n_real(self) -> int:
        return len(self.real_solutions)

    def evaluate_mean(self, x, which: str = "average", ctx: PrecisionContext = DEFAULT_CONTEXT):
        """Pointwise mean of the member forms; pairs average to real values."""
        if which == "real":
            members = self.real_solutions
            if not members:
                raise StrategyError("no real solutions to evaluate")
        elif which == "average":
            members = self.solutions
        else:
            raise ValueError(f"unknown selection {which!r}")
        with ctx.working(extra=10):
            acc = mpc(0)
            for s in members:
                acc += _evaluate_complex(s, x)
            acc /= len(members)
            return _truncate_imag(acc, ctx, what="pointwise mean")


@dataclass(frozen=True)
class AmplitudeReport:
    """Large-variable amplitude for one order under one strategy."""

    label: str
    strategy: str
    value: object
    percent_error: float | None = None
    n_solutions: int = 0
    n_real: int = 0


def counterterm_powers(ladder: PowerLadder, k: int) -> list:
    """Admissible counter powers gamma_j = beta_j - 1 for an order-k form.

    Empty when the ladder is shift-invariant.  Otherwise keeps, in descending
    order, the shifted powers that fall strictly between beta_{k+1} and
    beta_1 and do not themselves collide with a ladder power (a collision
    would cancel a legitimate contribution, not a spurious one).
    """
    if k < 1:
        raise ValueError("order k must be at least 1")
    if len(ladder) < k + 1:
        raise ValueError(
            f"ladder with {len(ladder)} powers is too short to bound counter "
            f"powers for k={k}; need beta_{k + 1}"
        )
    if invariance_check(ladder):
        return []
    lower = ladder.powers[k]
    upper = ladder.powers[0]
    members = set(ladder.powers)
    out = []
    for beta in ladder.powers[:k]:
        gamma = beta - 1
        if lower < gamma < upper and gamma not in members:
            out.append(gamma)
    return out


def assemble_conditions(
    series: SmallSeries,
    ladder: PowerLadder,
    k: int,
    q: int = 0,
    large_matches=None,
) -> ConditionSet:
    """Build the balanced condition set for an order-(k, q) construction.

    Pure extrapolation (the default) matches Taylor orders 0..k and cancels
    the first q admissible counter powers.  When large_matches supplies
    known large-variable coefficients, the remaining k+1-len(large_matches)
    conditions are Taylor orders filled from 0 upward.
    """
    if k < 1:
        raise ValueError("order k must be at least 1")
    large = tuple(large_matches) if large_matches else ()
    n_small = k + 1 - len(large)
    if n_small < 0:
        raise ConditionBalanceError(
            f"{len(large)} large-variable conditions exceed the k+1={k + 1} "
            f"conditions an order-{k} form can absorb"
        )
    if series.order < n_small - 1:
        raise ConditionBalanceError(
            f"series carries order {series.order} but {n_small} small-variable "
            f"conditions (orders 0..{n_small - 1}) are required"
        )
    if n_small >= 1 and series.coeffs[0] == 0:
        raise ValueError(
            "a_0 = 0 is not extrapolatable directly; factor out the leading "
            "behaviour first"
        )
    admissible = counterterm_powers(ladder, k)
    if q > len(admissible):
        raise ConditionBalanceError(
            f"q={q} counter-terms requested but only {len(admissible)} powers "
            f"are admissible for k={k}: {admissible}"
        )
    small = tuple((n, series.coeffs[n]) for n in range(n_small))
    return ConditionSet(small_orders=small, large_matches=large, cancellations=tuple(admissible[:q]))


# ---------------------------------------------------------------------------
# Elimination internals
# ---------------------------------------------------------------------------


def _term_powers(conditions: ConditionSet, ladder: PowerLadder):
    k = conditions.order
    if k < 1:
        raise ConditionBalanceError("conditions determine no main terms")
    if len(ladder) < k:
        raise ConditionBalanceError(
            f"ladder with {len(ladder)} powers cannot host k={k} main terms"
        )
    return list(ladder.powers[:k]) + list(conditions.cancellations)


def _condition_rows(conditions: ConditionSet, powers):
    """Rows (coefficients over amplitudes, rhs value, rhs mu-exponent, label)."""
    rows = []
    for n, a_n in conditions.small_orders:
        row = [binom(p, n) for p in powers]
        rows.append((row, a_n, Fraction(n), f"taylor-order-{n}"))
    for beta, b in conditions.large_matches:
        row = [_large_row_entry(p, beta) for p in powers]
        rows.append((row, b, beta, f"large-match-at-{beta}"))
    for gamma in conditions.cancellations:
        row = [_large_row_entry(p, gamma) for p in powers]
        rows.append((row, 0, gamma, f"cancellation-at-{gamma}"))
    return rows


def _large_row_entry(p: Fraction, target: Fraction):
    offset = p - target
    if offset.denominator == 1 and offset >= 0:
        return binom(p, int(offset))
    return Fraction(0)


def _to_mpf(value):
    if isinstance(value, Fraction):
        return mpf(value.numerator) / value.denominator
    if isinstance(value, int):
        return mpf(value)
    return mpf(value) if not isinstance(value, (mpf, mpc)) else value


def _minor_determinants(rows, ctx):
    """Determinant of the coefficient matrix with each row deleted in turn."""
    n_rows = len(rows)
    matrix = [[_to_mpf(x) for x in row] for row, *_ in rows]
    minors = []
    for r in range(n_rows):
        sub = matrix[:r] + matrix[r + 1 :]
        minors.append(_real_det(sub))
    return minors


def _real_det(rows):
    """Determinant of a real square matrix at the current working precision."""
    n = len(rows)
    a = [row[:] for row in rows]
    det = mpf(1)
    for col in range(n):
        pivot = max(range(col, n), key=lambda r: abs(a[r][col]))
        if a[pivot][col] == 0:
            return mpf(0)
        if pivot != col:
            a[col], a[pivot] = a[pivot], a[col]
            det = -det
        det *= a[col][col]
        inv = 1 / a[col][col]
        for r in range(col + 1, n):
            f = a[r][col] * inv
            if f == 0:
                continue
            for c in range(col + 1, n):
                a[r][c] -= f * a[col][c]
    return det


@dataclass(frozen=True)
class _Elimination:
    polynomial: Polynomial
    exponent_shift: Fraction
    root_power: int
    rows: tuple
    minors: tuple
    powers: tuple


def _eliminate(conditions: ConditionSet, ladder: PowerLadder, ctx: PrecisionContext):
    powers = _term_powers(conditions, ladder)
    rows = _condition_rows(conditions, powers)
    n_amp = len(powers)
    if len(rows) != n_amp + 1:
        raise ConditionBalanceError(
            f"{len(rows)} conditions cannot determine {n_amp} amplitudes plus "
            f"the shift; expected {n_amp + 1}"
        )
    guard = 30 + n_amp
    with ctx.working(extra=guard):
        minors = _minor_determinants(rows, ctx)
        nonzero_rhs = [
            (r, value, s)
            for r, (_, value, s, _) in enumerate(rows)
            if _to_mpf(value) != 0
        ]
        active = [(r, value, s) for r, value, s in nonzero_rhs if minors[r] != 0]
        if not active:
            raise NoValidSolutionError(
                "the elimination polynomial vanishes identically; the "
                "conditions are degenerate"
            )
        # the root power must clear denominators for every condition the
        # backsolve will touch, not only those contributing monomials
        denom = math.lcm(*(s.denominator for _, _, s in nonzero_rhs))
        s_min = min(s for _, _, s in active)
        degree = max(_int_exp(s - s_min, denom) for _, _, s in active)
        coeffs = [mpf(0)] * (degree + 1)
        for r, value, s in active:
            e = _int_exp(s - s_min, denom)
            sign = -1 if (r + n_amp) % 2 else 1
            coeffs[e] += sign * _to_mpf(value) * minors[r]
        # coefficients that are pure cancellation noise (possible only when
        # two conditions share an exponent) would otherwise seed spurious
        # near-infinite roots
        top = max(abs(c) for c in coeffs)
        floor = top * mpf(10) ** (-(ctx.decimal_digits + guard - 15))
        coeffs = [c if abs(c) > floor else mpf(0) for c in coeffs]
        poly = Polynomial(tuple(coeffs))
        return _Elimination(
            polynomial=poly,
            exponent_shift=s_min,
            root_power=denom,
            rows=tuple(rows),
            minors=tuple(minors),
            powers=tuple(powers),
        )


def elimination_polynomial(
    conditions: ConditionSet,
    ladder: PowerLadder,
    ctx: PrecisionContext = DEFAULT_CONTEXT,
):
    """The solvability polynomial and its variable change.

    Returns (polynomial, root_power) where the polynomial's variable tau
    satisfies mu = tau**root_power and mu is the inverse shift.  For pure
    small-variable matching root_power is 1 and the polynomial is directly
    the one in mu, of degree equal to the construction order.
    """
    elim = _eliminate(conditions, ladder, ctx)
    return elim.polynomial, elim.root_power


# ---------------------------------------------------------------------------
# Solving
# ---------------------------------------------------------------------------


def solve(
    conditions: ConditionSet,
    ladder: PowerLadder,
    ctx: PrecisionContext = DEFAULT_CONTEXT,
) -> SolutionSet:
    """Enumerate all admissible additive approximants for the conditions.

    Every root of the elimination polynomial is backsolved for the
    amplitudes; roots giving a nonpositive real shift, non-finite
    amplitudes, or (for real shifts) a branch-inconsistent large-variable
    match are discarded.  Retained solutions re-verify every condition to a
    residual of 10**-(digits-8) and are conjugate-paired.
    """
    elim = _eliminate(conditions, ladder, ctx)
    n_amp = len(elim.powers)
    guard = 30 + n_amp
    k = conditions.order
    with ctx.working(extra=guard):
        if elim.polynomial.degree < 1:
            raise NoValidSolutionError(
                "the elimination polynomial is constant; no shift satisfies "
                "the conditions"
            )
        roots = poly_roots(elim.polynomial, ctx)
        zero_tol = ctx.eps(8)
        drop_row = max(range(len(elim.rows)), key=lambda r: abs(elim.minors[r]))
        candidates = []
        for tau in roots:
            if abs(tau) <= zero_tol:
                continue
            mu = tau ** elim.root_power
            shift = 1 / mu
            is_real = mp.im(tau) == 0
            if is_real and mp.re(shift) <= 0:
                continue
            amplitudes = _backsolve(elim, tau, drop_row, ctx)
            if amplitudes is None:
                continue
            if not all(mp.isfinite(a) for a in amplitudes):
                continue
            _verify_algebraic(elim, tau, amplitudes, ctx)
            if is_real:
                shift = mpf(mp.re(shift))
                amplitudes = [mpf(mp.re(a)) for a in amplitudes]
                if not _verify_principal(conditions, elim, shift, amplitudes, ctx):
                    continue
            candidates.append(_build_approximant(elim, k, shift, amplitudes))
        if not candidates:
            raise NoValidSolutionError(
                f"all {elim.polynomial.degree} elimination roots were rejected"
            )
        candidates.sort(key=lambda s: (mp.re(mpc(s.shift)), mp.im(mpc(s.shift))))
        classification = _classify(candidates, ctx)
        return SolutionSet(solutions=tuple(candidates), classification=classification)


def _int_exp(s: Fraction, root_power: int) -> int:
    e = s * root_power
    if e.denominator != 1:
        raise ResidualFailureError(
            f"internal error: exponent {s} not cleared by root power {root_power}"
        )
    return int(e)


def _backsolve(elim: _Elimination, tau, drop_row, ctx):
    rows = [row for r, row in enumerate(elim.rows) if r != drop_row]
    matrix = [[_to_mpf(x) for x in row] for row, *_ in rows]
    rhs = [_rhs_value(value, s, tau, elim.root_power) for _, value, s, _ in rows]
    try:
        return solve_linear(matrix, rhs, ctx)
    except SingularMatrixError:
        return None


def _rhs_value(value, s: Fraction, tau, root_power: int):
    v = _to_mpf(value)
    if v == 0:
        return mpf(0)
    return v * tau ** _int_exp(s, root_power)


def _verify_algebraic(elim: _Elimination, tau, amplitudes, ctx):
    """All N+1 conditions, in the algebraic branch the root was solved in."""
    tol = ctx.eps(8)
    for row, value, s, label in elim.rows:
        lhs = mpc(0)
        scale = mpf(1)
        for coeff, a in zip(row, amplitudes):
            contrib = _to_mpf(coeff) * a
            lhs += contrib
            scale = max(scale, abs(contrib))
        rhs = _rhs_value(value, s, tau, elim.root_power)
        scale = max(scale, abs(rhs))
        if abs(lhs - rhs) > tol * scale:
            raise ResidualFailureError(
                f"condition {label} has residual {mp.nstr(abs(lhs - rhs), 3)} "
                f"(scale {mp.nstr(scale, 3)}) after backsolving"
            )


def _verify_principal(conditions, elim, shift, amplitudes, ctx) -> bool:
    """Real-shift solutions must satisfy fractional-power conditions with the
    principal (real positive) branch of mu**s; the elimination variable can
    also encode the other branch, which is not a solution of the real form."""
    tol = ctx.eps(8)
    mu = 1 / shift
    for row, value, s, _ in elim.rows:
        if s.denominator == 1:
            continue
        lhs = mpf(0)
        scale = mpf(1)
        for coeff, a in zip(row, amplitudes):
            contrib = _to_mpf(coeff) * a
            lhs += contrib
            scale = max(scale, abs(contrib))
        rhs = _to_mpf(value) * mu ** _to_mpf(s)
        scale = max(scale, abs(rhs))
        if abs(lhs - rhs) > tol * scale:
            return False
    return True


def _build_approximant(elim: _Elimination, k, shift, amplitudes):
    main = tuple((p, a) for p, a in zip(elim.powers[:k], amplitudes[:k]))
    counter = tuple((p, a) for p, a in zip(elim.powers[k:], amplitudes[k:]))
    return AdditiveApproximant(shift=shift, main_terms=main, counter_terms=counter)


def _classify(solutions, ctx):
    tol = ctx.eps(10)
    tags: list = [None] * len(solutions)
    for i, s in enumerate(solutions):
        if tags[i] is not None:
            continue
        if s.is_real:
            tags[i] = "real"
            continue
        partner = None
        for j in range(i + 1, len(solutions)):
            if tags[j] is not None or solutions[j].is_real:
                continue
            if _is_conjugate(s, solutions[j], tol):
                partner = j
                break
        if partner is None:
            raise ResidualFailureError(
                "a complex solution lacks a conjugate partner; the elimination "
                "polynomial should have real coefficients"
            )
        tags[i] = ("pair", partner)
        tags[partner] = ("pair", i)
    return tuple(tags)


def _is_conjugate(a: AdditiveApproximant, b: AdditiveApproximant, tol) -> bool:
    sa, sb = mpc(a.shift), mpc(b.shift)
    if abs(sa - mp.conj(sb)) > tol * max(1, abs(sa)):
        return False
    for (_, xa), (_, xb) in zip(a.terms, b.terms):
        xa, xb = mpc(xa), mpc(xb)
        if abs(xa - mp.conj(xb)) > tol * max(1, abs(xa)):
            return False
    return True


# ---------------------------------------------------------------------------
# Amplitudes, strategies, evaluation
# ---------------------------------------------------------------------------


def amplitude(approx: AdditiveApproximant):
    """Large-variable amplitude A_1 * shift**beta_1 of one form.

    Real for real solutions; complex for lone conjugate-pair members (their
    pair average is real).
    """
    beta1 = approx.leading_power
    a1 = approx.main_terms[0][1]
    if approx.is_real:
        return mpf(mp.re(mpc(a1))) * mpf(mp.re(mpc(approx.shift))) ** _to_mpf(beta1)
    return mpc(a1) * mpc(approx.shift) ** _to_mpf(beta1)


def strategy_amplitude(
    solutions: SolutionSet,
    strategy: str,
    reference=None,
    label: str = "",
    ctx: PrecisionContext = DEFAULT_CONTEXT,
) -> AmplitudeReport:
    """Collapse a solution set to one amplitude.

    strategy "real" averages the amplitudes of the real solutions (a single
    real solution returns itself); strategy "average" averages over all
    solutions, conjugate pairs making the mean real.
    """
    if strategy not in ("real", "average"):
        raise ValueError(f"unknown strategy {strategy!r}")
    with ctx.working(extra=10):
        if strategy == "real":
            members = solutions.real_solutions
            if not members:
                raise StrategyError(
                    "the real-only strategy needs at least one real solution"
                )
        else:
            members = solutions.solutions
        acc = mpc(0)
        for s in members:
            acc += mpc(amplitude(s))
        acc /= len(members)
        value = _truncate_imag(acc, ctx, what="strategy amplitude")
        error = None
        if reference is not None:
            ref = _to_mpf(reference)
            error = float(100 * abs(value - ref) / abs(ref))
        return AmplitudeReport(
            label=label,
            strategy=strategy,
            value=value,
            percent_error=error,
            n_solutions=len(solutions),
            n_real=solutions.n_real,
        )


def evaluate(approx: AdditiveApproximant, x, ctx: PrecisionContext = DEFAULT_CONTEXT):
    """Value of the additive form at x >= 0.

    Defined for real solutions (and, through SolutionSet.evaluate_mean, for
    conjugate-pair averages); a lone pair member evaluates to a genuinely
    complex number and is rejected.
    """
    if x < 0:
        raise ValueError(f"additive forms are defined on [0, inf); got x={x}")
    with ctx.working(extra=10):
        value = _evaluate_complex(approx, x)
        return _truncate_imag(value, ctx, what="evaluation")


def _evaluate_complex(approx: AdditiveApproximant, x):
    shift = mpc(approx.shift)
    base = 1 + shift * _to_mpf(x)
    acc = mpc(0)
    for power, a in approx.terms:
        acc += mpc(a) * base ** _to_mpf(power)
    return acc


def _truncate_imag(value, ctx, what: str):
    tol = ctx.eps(8)
    re, im = mp.re(value), mp.im(value)
    if abs(im) > tol * max(1, abs(re)):
        raise ValueError(
            f"{what} has imaginary residue {mp.nstr(im, 5)}; evaluate conjugate "
            f"pairs through their average"
        )
    return mpf(re)
