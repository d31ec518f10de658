"""Reference approximation methods used to benchmark the additive forms:
rational (Pade) approximants, their exponent-modified variant, multiplicative
factor approximants, and nested root approximants.

All constructions follow the accuracy-through-order rule: parameters are
fixed by equating the approximant's Taylor expansion to the given series
coefficient by coefficient, with the large-variable amplitude read off in
closed form afterwards.
"""

from __future__ import annotations

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
from .series import SmallSeries, PowerLadder, as_power, binom

__all__ = [
    "PadeApproximant",
    "FactorApproximant",
    "RootApproximant",
    "PowerIncompatibilityError",
    "ComplexSolutionError",
    "pade_construct",
    "pade_modified_construct",
    "pade_modified_amplitude",
    "plain_pade_amplitude",
    "factor_construct",
    "factor_expand",
    "factor_amplitude",
    "root_construct",
    "root_amplitude",
    "root_evaluate",
]


class PowerIncompatibilityError(ValueError):
    """The target leading power cannot be reached by the requested form."""


class ComplexSolutionError(ArithmeticError):
    """A construction or amplitude that must be real came out complex."""


def _to_mpf(value):
    if isinstance(value, Fraction):
        return mpf(value.numerator) / value.denominator
    if isinstance(value, int):
        return mpf(value)
    return value if isinstance(value, (mpf, mpc)) else mpf(value)


def _series_mpf(series: SmallSeries):
    return [_to_mpf(c) for c in series.coeffs]


# ---------------------------------------------------------------------------
# Pade approximants
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PadeApproximant:
    """Rational form (sum p_i x^i) / (sum q_i x^i), q_0 = 1, raised to
    `exponent` (1 for the plain approximant)."""

    numerator: tuple
    denominator: tuple
    exponent: Fraction = Fraction(1)
    pole_free: bool = True

    @property
    def num_degree(self) -> int:
        return len(self.numerator) - 1

    @property
    def den_degree(self) -> int:
        return len(self.denominator) - 1

    def rational_value(self, x):
        num = mpf(0)
        for c in reversed(self.numerator):
            num = num * x + c
        den = mpf(0)
        for c in reversed(self.denominator):
            den = den * x + c
        return num / den

    def __call__(self, x):
        value = self.rational_value(x)
        if self.exponent == 1:
            return value
        if value <= 0 and self.exponent.denominator != 1:
            raise ComplexSolutionError(
                f"rational part is {mp.nstr(value, 8)} <= 0 at x={x}; the "
                f"exponent {self.exponent} would make the value complex"
            )
        return value ** _to_mpf(self.exponent)


def pade_construct(
    series: SmallSeries,
    num_degree: int,
    den_degree: int,
    ctx: PrecisionContext = DEFAULT_CONTEXT,
) -> PadeApproximant:
    """The [num_degree / den_degree] rational approximant of the series.

    Requires num_degree + den_degree <= series.order.  Raises
    SingularMatrixError for a degenerate table entry.
    """
    m, n = num_degree, den_degree
    if m < 0 or n < 0:
        raise ValueError("degrees must be nonnegative")
    if m + n > series.order:
        raise ValueError(
            f"need series order >= {m + n}, got {series.order}"
        )
    with ctx.working(extra=10):
        a = _series_mpf(series)

        def coeff(j):
            return a[j] if 0 <= j <= series.order else mpf(0)

        if n == 0:
            q = [mpf(1)]
        else:
            rows = [[coeff(m + row + 1 - col) for col in range(1, n + 1)] for row in range(n)]
            rhs = [-coeff(m + row + 1) for row in range(n)]
            try:
                tail = solve_linear(rows, rhs, ctx)
            except SingularMatrixError as exc:
                raise SingularMatrixError(
                    f"degenerate [{m}/{n}] rational table entry: {exc}"
                ) from exc
            q = [mpf(1)] + [mpf(mp.re(x)) for x in tail]
        p = []
        for j in range(m + 1):
            p.append(sum(q[i] * coeff(j - i) for i in range(min(j, n) + 1)))
        pole_free = _positive_axis_pole_free(q, ctx)
        return PadeApproximant(
            numerator=tuple(p), denominator=tuple(q), pole_free=pole_free
        )


def _positive_axis_pole_free(den_coeffs, ctx) -> bool:
    poly = Polynomial(tuple(den_coeffs))
    if poly.degree < 1:
        return True
    tol = ctx.eps(10)
    for root in poly_roots(poly, ctx):
        if mp.im(root) == 0 and mp.re(root) > tol:
            return False
    return True


def pade_modified_construct(
    series: SmallSeries,
    n: int,
    beta1,
    ctx: PrecisionContext = DEFAULT_CONTEXT,
) -> PadeApproximant:
    """The [n/(n+1)] approximant raised to the exponent that carries the
    target leading power beta1 at infinity (num_degree - den_degree = -1, so
    the exponent is -beta1)."""
    beta1 = as_power(beta1)
    base = pade_construct(series, n, n + 1, ctx)
    return PadeApproximant(
        numerator=base.numerator,
        denominator=base.denominator,
        exponent=-beta1,
        pole_free=base.pole_free,
    )


def pade_modified_amplitude(
    series: SmallSeries,
    n: int,
    beta1,
    ctx: PrecisionContext = DEFAULT_CONTEXT,
):
    """Large-variable amplitude of the exponent-modified [n/(n+1)] form:
    (leading numerator coefficient / leading denominator coefficient) to the
    power -beta1.  Needs series order >= 2n+1."""
    approx = pade_modified_construct(series, n, beta1, ctx)
    with ctx.working(extra=10):
        num_lead = _trailing_nonzero(approx.numerator, ctx)
        den_lead = _trailing_nonzero(approx.denominator, ctx)
        ratio = num_lead / den_lead
        gamma = approx.exponent
        if ratio <= 0 and gamma.denominator != 1:
            raise ComplexSolutionError(
                f"leading coefficient ratio {mp.nstr(ratio, 8)} is not positive; "
                f"exponent {gamma} gives a complex amplitude"
            )
        return ratio ** _to_mpf(gamma)


def _trailing_nonzero(coeffs, ctx):
    tol = ctx.eps(10) * max(abs(c) for c in coeffs)
    for c in reversed(coeffs):
        if abs(c) > tol:
            return c
    raise ValueError("all coefficients vanish")


def plain_pade_amplitude(
    series: SmallSeries,
    beta1,
    ctx: PrecisionContext = DEFAULT_CONTEXT,
):
    """Large-variable amplitude of a plain rational approximant targeting
    x**beta1, when such a form exists.

    A ratio of polynomials behaves like x**(num_degree - den_degree) at
    infinity, an integer power; a fractional beta1 is therefore refused.
    """
    beta1 = as_power(beta1)
    if beta1.denominator != 1:
        raise PowerIncompatibilityError(
            f"a plain rational form reaches only integer powers of x at "
            f"infinity; the target leading power {beta1} is fractional"
        )
    diff = int(beta1)
    k = series.order
    den = (k - diff) // 2
    num = den + diff
    if den < 0 or num < 0 or num + den > k:
        raise ValueError(
            f"cannot place degrees with difference {diff} inside order {k}"
        )
    approx = pade_construct(series, num, den, ctx)
    with ctx.working(extra=10):
        return _trailing_nonzero(approx.numerator, ctx) / _trailing_nonzero(
            approx.denominator, ctx
        )


# ---------------------------------------------------------------------------
# Factor approximants
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FactorApproximant:
    """prefactor_amp * x**prefactor_pow * prod_i (1 + A_i x)**n_i.

    factors holds (A_i, n_i) pairs; is_complex marks solutions whose factor
    parameters are genuinely complex (they are returned, not dropped).
    """

    prefactor_amp: object
    prefactor_pow: Fraction
    factors: tuple
    is_complex: bool = False

    @property
    def leading_power(self):
        """Large-variable exponent prefactor_pow + sum_i n_i."""
        total = _to_mpf(self.prefactor_pow)
        for _, n_i in self.factors:
            total += mp.re(mpc(n_i)) if self.is_complex else _to_mpf(n_i)
        return total


def _log_series(coeffs, order):
    """Taylor coefficients of log(f/f(0)) up to `order` (index 0 dropped)."""
    a0 = coeffs[0]
    u = [c / a0 for c in coeffs[: order + 1]]
    u += [mpf(0)] * (order + 1 - len(u))
    ell = [mpf(0)] * (order + 1)
    for n in range(1, order + 1):
        acc = u[n]
        for j in range(1, n):
            acc -= mpf(j) / n * ell[j] * u[n - j]
        ell[n] = acc
    return ell[1:]


def _prony_nodes_weights(power_sums, size, ctx):
    """Nodes/weights with sum_i w_i z_i^m = power_sums[m-1] for m=1..2*size.

    The nodes satisfy the length-`size` linear recurrence of the power sums
    (a Hankel solve for the recurrence coefficients, then a root extraction);
    the weights follow from the Vandermonde system over m = 1..size.
    """
    s = power_sums
    rows = [[s[m + size - j] for j in range(1, size + 1)] for m in range(size)]
    rhs = [-s[m + size] for m in range(size)]
    try:
        sigma = solve_linear(rows, rhs, ctx)
    except SingularMatrixError as exc:
        raise SingularMatrixError(f"singular power-sum system: {exc}") from exc
    poly_coeffs = [sigma[size - 1 - j] for j in range(size)] + [mpc(1)]
    nodes = poly_roots(Polynomial(tuple(poly_coeffs)), ctx)
    vand = [[node**m for node in nodes] for m in range(1, size + 1)]
    weights = solve_linear(vand, [mpc(x) for x in s[:size]], ctx)
    return nodes, weights


def factor_construct(
    series: SmallSeries,
    ctx: PrecisionContext = DEFAULT_CONTEXT,
) -> FactorApproximant:
    """Multiplicative form matching the series through its order k.

    Matching log-series coefficients reduces the problem to power sums
    sum_i n_i A_i^m; the A_i are recovered as roots of the Prony recurrence
    polynomial (a Hankel solve) and the n_i by a linear solve.  For odd k
    the extra factor slot is pinned at A_1 = 1, so the first factor is
    (1 + x)**n_1 and the remaining pairs absorb the k - 1 leftover
    conditions.  Complex factor solutions are returned flagged.
    """
    k = series.order
    if k < 2:
        raise ValueError("factor construction needs series order >= 2")
    if series.coeffs[0] == 0:
        raise ValueError("a_0 must be nonzero; factor out the leading power first")
    with ctx.working(extra=15):
        coeffs = _series_mpf(series)
        ell = _log_series(coeffs, k)
        s = [(-1) ** (m + 1) * m * ell[m - 1] for m in range(1, k + 1)]
        if k % 2 == 0:
            # sum_i n_i A_i^m = S_m directly: the Vandermonde weights are the n_i
            size = k // 2
            nodes, exponents = _prony_nodes_weights(s, size, ctx)
        else:
            # pinned node at 1: T_m = S_{m+1} - S_m = sum_i n_i (A_i - 1) A_i^m
            # removes it, leaving a standard reduction of size (k-1)/2
            size = (k + 1) // 2
            t = [s[m] - s[m - 1] for m in range(1, k)]
            if size - 1 == 0:
                nodes, exponents = [], []
            else:
                nodes, raw = _prony_nodes_weights(t, size - 1, ctx)
                for node in nodes:
                    if abs(node - 1) < ctx.eps(10):
                        raise SingularMatrixError(
                            "a factor node collides with the pinned node at 1"
                        )
                exponents = [w / (node - 1) for node, w in zip(nodes, raw)]
            pinned_exp = s[0] - sum(n * a for a, n in zip(nodes, exponents))
            nodes = [mpc(1)] + list(nodes)
            exponents = [pinned_exp] + list(exponents)
        pairs = sorted(
            zip(nodes, exponents), key=lambda p: (mp.re(p[0]), mp.im(p[0]))
        )
        is_complex = any(
            abs(mp.im(a)) > ctx.eps(10) * max(1, abs(a))
            or abs(mp.im(n)) > ctx.eps(10) * max(1, abs(n))
            for a, n in pairs
        )
        if not is_complex:
            pairs = [(mpf(mp.re(a)), mpf(mp.re(n))) for a, n in pairs]
        approx = FactorApproximant(
            prefactor_amp=coeffs[0],
            prefactor_pow=Fraction(0),
            factors=tuple(pairs),
            is_complex=is_complex,
        )
        _verify_factor(approx, coeffs, k, ctx)
        return approx


def _verify_factor(approx, coeffs, k, ctx):
    expanded = factor_expand(approx, k, ctx)
    tol = ctx.eps(8)
    for n, (got, want) in enumerate(zip(expanded, coeffs)):
        scale = max(1, abs(want))
        if abs(got - want) > tol * scale:
            raise ArithmeticError(
                f"factor re-expansion misses order {n}: {mp.nstr(got, 10)} vs "
                f"{mp.nstr(want, 10)}"
            )


def factor_expand(approx: FactorApproximant, order: int, ctx=DEFAULT_CONTEXT):
    """Taylor coefficients of the factor form up to `order` (the x**alpha
    prefactor power is not applied; the prefactor amplitude is)."""
    with ctx.working(extra=10):
        out = [mpc(1)] + [mpc(0)] * order
        for a, n in approx.factors:
            # coefficients of (1 + a x)^n via the binomial recurrence
            term = []
            b = mpc(1)
            nn = mpc(n)
            for m in range(order + 1):
                if m > 0:
                    b = b * (nn - m + 1) / m
                term.append(b * mpc(a) ** m)
            out = _poly_mul_trunc(out, term, order)
        scale = mpc(_to_mpf(approx.prefactor_amp))
        result = [scale * c for c in out]
        if not approx.is_complex:
            return [mpf(mp.re(c)) for c in result]
        return result


def _poly_mul_trunc(a, b, order):
    out = [mpc(0)] * (order + 1)
    for i, ai in enumerate(a[: order + 1]):
        if ai == 0:
            continue
        for j, bj in enumerate(b[: order + 1 - i]):
            out[i + j] += ai * bj
    return out


def factor_amplitude(approx: FactorApproximant, ctx: PrecisionContext = DEFAULT_CONTEXT):
    """Large-variable amplitude prefactor_amp * prod_i A_i**n_i.

    Requires every A_i > 0 unless its exponent is an integer; complex-factor
    solutions have no real amplitude.
    """
    if approx.is_complex:
        raise ComplexSolutionError(
            "factor parameters are complex; no real large-variable amplitude"
        )
    with ctx.working(extra=10):
        value = _to_mpf(approx.prefactor_amp)
        for a, n in approx.factors:
            a, n = _to_mpf(a), _to_mpf(n)
            if a <= 0 and (n != mp.floor(n)):
                raise ComplexSolutionError(
                    f"factor coefficient {mp.nstr(a, 8)} <= 0 with non-integer "
                    f"exponent {mp.nstr(n, 8)} gives a complex amplitude"
                )
            value *= a**n
        return value


# ---------------------------------------------------------------------------
# Root approximants
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class RootApproximant:
    """Nested form prefactor_amp * x**prefactor_pow *
    ((...((1 + A_1 x)^{n_1} + A_2 x^2)^{n_2} + ...) + A_k x^k)^{n_k}."""

    prefactor_amp: object
    prefactor_pow: Fraction
    coefficients: tuple
    powers: tuple

    @property
    def order(self) -> int:
        return len(self.coefficients)


def _root_powers(k: int, ladder: PowerLadder | None, mode: str, alpha: Fraction):
    if mode == "small-only":
        if ladder is None:
            raise ValueError("small-only mode still needs the target leading power")
        powers = [Fraction(j + 1, j) for j in range(1, k)]
    elif mode in ("full-large", "mixed"):
        if ladder is None or len(ladder) < k:
            raise ValueError(f"{mode} mode needs a ladder with at least k={k} powers")
        powers = [
            (Fraction(j + 1) - (ladder.powers[k - j - 1] - ladder.powers[k - j])) / j
            for j in range(1, k)
        ]
    else:
        raise ValueError(f"unknown mode {mode!r}")
    beta1 = ladder.leading
    if beta1 == alpha:
        raise PowerIncompatibilityError(
            "the outermost exponent (beta1 - alpha)/k vanishes; the form "
            "cannot reach the target power"
        )
    powers.append(Fraction(beta1 - alpha, k))
    return powers


def _series_power_trunc(base, nu, order):
    """(base)^nu as Taylor coefficients to `order`; base[0] must be 1."""
    nu = _to_mpf(nu)
    out = [mpf(1)] + [mpf(0)] * order
    for n in range(1, order + 1):
        acc = mpf(0)
        for m in range(1, n + 1):
            b = base[m] if m < len(base) else mpf(0)
            if b == 0:
                continue
            acc += (m * (nu + 1) - n) * b * out[n - m]
        out[n] = acc / n
    return out


def _nested_taylor(coefficients, powers, order):
    """Taylor coefficients of the nested chain, constant term 1."""
    level = [mpf(1)] + [mpf(0)] * order
    for j, (a_j, n_j) in enumerate(zip(coefficients, powers), start=1):
        if j <= order:
            level = level[:]
            level[j] = level[j] + _to_mpf(a_j)
        level = _series_power_trunc(level, n_j, order)
    return level


def root_construct(
    series: SmallSeries,
    ladder: PowerLadder,
    mode: str = "small-only",
    ctx: PrecisionContext = DEFAULT_CONTEXT,
    known_amplitudes=None,
):
    """Nested root form matched to the series (and, in mixed/full-large
    modes, to known large-variable coefficients).

    small-only: inner exponents (j+1)/j, all coefficients from the Taylor
    side, solved sequentially (each order is linear in its new coefficient).
    mixed: the first p = len(known_amplitudes) large-variable coefficients
    replace the top p Taylor conditions; solved by a damped Newton iteration
    started from the small-only solution.  full-large: all conditions are
    large-variable coefficients (ladder amplitudes or known_amplitudes).

    Raises ComplexSolutionError when the construction's large-variable limit
    is undefined over the reals, which is the expected diagnostic for
    series whose nested bases turn negative.
    """
    k = series.order
    if k < 1:
        raise ValueError("root construction needs series order >= 1")
    if series.coeffs[0] == 0:
        raise ValueError("a_0 must be nonzero; factor out the leading power first")
    alpha = Fraction(0)
    powers = _root_powers(k, ladder, mode, alpha)
    chain = [_to_mpf(p) for p in powers]
    for p in chain:
        if p == 0:
            raise PowerIncompatibilityError("an inner exponent vanishes")
    with ctx.working(extra=15):
        coeffs = _series_mpf(series)
        target = [coeffs[n] / coeffs[0] for n in range(k + 1)]
        a = _solve_small_side(target, powers, k)
        if mode in ("mixed", "full-large"):
            a = _solve_with_large_side(
                a, target, powers, k, ladder, mode, known_amplitudes, alpha, coeffs[0], ctx
            )
        approx = RootApproximant(
            prefactor_amp=coeffs[0],
            prefactor_pow=alpha,
            coefficients=tuple(a),
            powers=tuple(powers),
        )
        # construction-time diagnostic: the real form must possess a real
        # large-variable limit
        root_amplitude(approx, ctx)
        return approx


def _solve_small_side(target, powers, k):
    a = [mpf(0)] * k
    for j in range(1, k + 1):
        slope = mpf(1)
        for p in powers[j - 1 :]:
            slope *= _to_mpf(p)
        base = _nested_taylor(a, powers, j)
        a[j - 1] = (target[j] - base[j]) / slope
    return a


def _solve_with_large_side(
    a0, target, powers, k, ladder, mode, known_amplitudes, alpha, scale, ctx
):
    from mpmath import findroot

    if mode == "mixed":
        known = list(known_amplitudes or [])
        if not known:
            raise ValueError("mixed mode needs known large-variable coefficients")
    else:
        known = list(
            known_amplitudes
            if known_amplitudes is not None
            else (ladder.amplitudes or [])
        )
        if len(known) < k:
            raise ValueError(
                f"full-large mode needs {k} large-variable coefficients, got {len(known)}"
            )
        known = known[:k]
    p = len(known)
    if p > k:
        raise ValueError("more large-variable conditions than coefficients")
    betas = list(ladder.powers[:p])

    def residual(*a_vec):
        a_list = list(a_vec)
        res = []
        taylor = _nested_taylor(a_list, powers, max(k - p, 0))
        for n in range(1, k - p + 1):
            res.append(taylor[n] - target[n])
        desc = _nested_descending(a_list, powers, alpha, depth=betas[0] - betas[-1] + 1)
        for beta, b in zip(betas, known):
            got = desc.get(beta - alpha, mpf(0)) * _to_mpf(scale)
            res.append(got - _to_mpf(b))
        return res

    try:
        solution = findroot(residual, [mpf(x) for x in a0], tol=ctx.eps(6) ** 2)
    except (ValueError, ZeroDivisionError) as exc:
        raise ComplexSolutionError(
            f"the large-variable matching iteration did not converge: {exc}"
        ) from exc
    return [mpf(x) for x in solution]


def _nested_descending(coefficients, powers, alpha, depth):
    """Descending expansion (dict power -> coeff) of the nested chain."""
    window = Fraction(as_power(depth))
    level = {Fraction(0): mpf(1)}
    for j, (a_j, n_j) in enumerate(zip(coefficients, powers), start=1):
        level = dict(level)
        pj = Fraction(j)
        level[pj] = level.get(pj, mpf(0)) + _to_mpf(a_j)
        level = _desc_power(level, n_j, window)
    return level


def _desc_power(terms, nu, window):
    lead = max(terms)
    c_lead = terms[lead]
    if c_lead <= 0 and as_power(nu).denominator != 1:
        raise ComplexSolutionError(
            f"leading descending coefficient {mp.nstr(c_lead, 8)} is not "
            f"positive; the fractional power {nu} makes the expansion complex"
        )
    if c_lead == 0:
        raise ComplexSolutionError("leading descending coefficient vanished")
    tail = {p - lead: c / c_lead for p, c in terms.items() if p != lead}
    out = {Fraction(0): mpf(1)}
    if tail:
        delta = -max(tail)
        cap = int(window / delta) + 2 if delta > 0 else 2
        cap = min(cap, 64)
        power_of_tail = {Fraction(0): mpf(1)}
        for m in range(1, cap + 1):
            power_of_tail = _desc_mul(power_of_tail, tail, window)
            if not power_of_tail:
                break
            b = binom(as_power(nu), m)
            for pw, c in power_of_tail.items():
                out[pw] = out.get(pw, mpf(0)) + _to_mpf(b) * c
    nu_frac = as_power(nu)
    lead_pow = c_lead ** int(nu_frac) if nu_frac.denominator == 1 else c_lead ** _to_mpf(nu)
    scaled = {}
    new_lead = nu_frac * lead
    for pw, c in out.items():
        if pw >= -window:
            scaled[new_lead + pw] = c * lead_pow
    return scaled


def _desc_mul(a, b, window):
    out = {}
    for pa, ca in a.items():
        for pb, cb in b.items():
            pw = pa + pb
            if pw < -window:
                continue
            out[pw] = out.get(pw, mpf(0)) + ca * cb
    return out


def root_amplitude(approx: RootApproximant, ctx: PrecisionContext = DEFAULT_CONTEXT):
    """Large-variable amplitude computed by carrying the leading coefficient
    outward through the nesting.

    At level j the inner expansion behaves like C x^p; the new monomial
    A_j x^j either dominates, is dominated, or combines exactly, and the sum
    is raised to the level exponent.  A nonpositive base under a fractional
    exponent means the limit is complex and the form undefined over the
    reals.
    """
    with ctx.working(extra=10):
        power = Fraction(0)
        coeff = mpf(1)
        for j, (a_j, n_j) in enumerate(
            zip(approx.coefficients, approx.powers), start=1
        ):
            a_j = _to_mpf(a_j)
            if power > j:
                base = coeff
            elif power < j:
                base = a_j
                power = Fraction(j)
            else:
                base = coeff + a_j
            n_frac = as_power(n_j)
            if base <= 0 and n_frac.denominator != 1:
                raise ComplexSolutionError(
                    f"nested base {mp.nstr(base, 8)} <= 0 under fractional "
                    f"exponent {n_frac} at level {j}: the large-variable limit "
                    f"is complex"
                )
            if base == 0:
                coeff = mpf(0)
            else:
                coeff = base ** _to_mpf(n_j) if base > 0 else base ** int(n_frac)
            power = power * n_frac
        return _to_mpf(approx.prefactor_amp) * coeff


def root_evaluate(approx: RootApproximant, x, ctx: PrecisionContext = DEFAULT_CONTEXT):
    """Pointwise value; raises ComplexSolutionError if a nested base turns
    negative under a fractional exponent at this x."""
    if x < 0:
        raise ValueError("root forms are defined on [0, inf)")
    with ctx.working(extra=10):
        x = _to_mpf(x)
        value = mpf(1)
        for j, (a_j, n_j) in enumerate(
            zip(approx.coefficients, approx.powers), start=1
        ):
            base = value + _to_mpf(a_j) * x**j
            n_frac = as_power(n_j)
            if base < 0 and n_frac.denominator != 1:
                raise ComplexSolutionError(
                    f"nested base is negative at x={mp.nstr(x, 6)}, level {j}"
                )
            value = base ** int(n_frac) if n_frac.denominator == 1 else base ** _to_mpf(n_j)
        pref = _to_mpf(approx.prefactor_amp)
        if approx.prefactor_pow != 0:
            pref *= x ** _to_mpf(approx.prefactor_pow)
        return pref * value
