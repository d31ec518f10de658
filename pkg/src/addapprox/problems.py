"""The three benchmark problems as self-describing bundles: series
generators, power ladders, exact reference values and independent oracles.

* partition: the quartic partition integral (1/sqrt(pi)) Int exp(-z^2-gz^4) dz,
  whose Taylor coefficients about g=0 diverge factorially while the
  large-coupling powers descend in steps of 1/2 from -1/4;
* oscillator: the quartic-well ground-state energy series, large-coupling
  powers descending in steps of 2/3 from 1/3 (counter-terms required);
* electron: the one-dimensional high-density correlation energy, a two-point
  problem with only two Taylor terms plus two known large-variable
  amplitudes.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from importlib import resources

from mpmath import mp, mpf

from .additive import SolutionSet, assemble_conditions, solve
from .numeric import DEFAULT_CONTEXT, PrecisionContext
from .series import PowerLadder, SmallSeries

__all__ = [
    "BenchmarkProblem",
    "PROBLEM_NAMES",
    "get_problem",
    "reference_tables",
    "partition_coeffs",
    "partition_exact",
    "partition_ladder",
    "partition_large_amplitude",
    "oscillator_coeffs",
    "oscillator_ladder",
    "electron_series",
    "electron_ladder",
    "electron_large_matches",
    "solve_problem",
]


@lru_cache(maxsize=1)
def reference_tables() -> dict:
    """The shipped table of published reference values."""
    path = resources.files("addapprox.data").joinpath("reference_tables.json")
    return json.loads(path.read_text())


# ---------------------------------------------------------------------------
# Partition integral
# ---------------------------------------------------------------------------


def partition_coeffs(k: int, ctx: PrecisionContext = DEFAULT_CONTEXT) -> SmallSeries:
    """Taylor coefficients (-1)^n Gamma(2n + 1/2) / (sqrt(pi) n!) for n <= k,
    evaluated through log-gamma at the working precision."""
    if k < 0:
        raise ValueError("order must be nonnegative")
    with ctx.working(extra=10):
        log_sqrt_pi = mp.log(mp.pi) / 2
        out = []
        for n in range(k + 1):
            ln = mp.loggamma(2 * n + mpf(1) / 2) - mp.loggamma(n + 1) - log_sqrt_pi
            out.append((-1) ** n * mp.exp(ln))
        return SmallSeries(tuple(out))


def partition_exact(g, ctx: PrecisionContext = DEFAULT_CONTEXT):
    """The integral (1/sqrt(pi)) Int_-inf^inf exp(-z^2 - g z^4) dz by adaptive
    quadrature (relative accuracy far below 1e-10), exploiting symmetry."""
    g = mpf(g)
    if g < 0:
        raise ValueError("the integral converges only for g >= 0")
    digits = max(30, ctx.decimal_digits // 2)
    with mp.workdps(digits):
        if g == 0:
            return mpf(1)
        width = min(mpf(1), g ** mpf("-0.25"))
        points = [0, width, 10 * width, mp.inf]
        value = mp.quad(lambda z: mp.e ** (-(z**2) - g * z**4), points)
        return 2 * value / mp.sqrt(mp.pi)


def partition_ladder(length: int = 24) -> PowerLadder:
    """Powers -(2n-1)/4, spacing 1/2; shift-invariant, so no counter-terms."""
    amplitudes = tuple(
        float(partition_large_amplitude(n, PrecisionContext(15))) for n in range(1, 5)
    )
    return PowerLadder.arithmetic(
        Fraction(-1, 4), Fraction(1, 2), length, amplitudes=amplitudes
    )


def partition_large_amplitude(n: int, ctx: PrecisionContext = DEFAULT_CONTEXT):
    """Exact large-coupling coefficient b_n = (-1)^(n-1) Gamma((2n-1)/4) /
    (2 sqrt(pi) (n-1)!)."""
    if n < 1:
        raise ValueError("amplitudes are indexed from 1")
    with ctx.working(extra=10):
        m = n - 1
        value = mp.gamma(mpf(2 * m + 1) / 4) / (2 * mp.sqrt(mp.pi) * mp.factorial(m))
        return (-1) ** m * value


# ---------------------------------------------------------------------------
# Quartic oscillator
# ---------------------------------------------------------------------------


@lru_cache(maxsize=None)
def _oscillator_rationals(order: int) -> tuple:
    """Exact ground-state energy coefficients by the textbook recursion.

    Writing the wavefunction as exp(-x^2/2) times a polynomial correction per
    order, the coefficient A[n][m] of x^(2m) at order n obeys

        2m A[n][m] = (m+1)(2m+1) A[n][m+1] - A[n-1][m-2]
                     + sum_{j=1}^{n-1} e_j A[n-j][m],

    descending from A[n][2n] = -A[n-1][2n-2]/(4n), with the order-n energy
    correction e_n = -A[n][1].  All arithmetic is exact rational.
    """
    table: list[dict] = [dict() for _ in range(order + 1)]
    table[0][0] = Fraction(1)
    energies: list[Fraction] = [Fraction(1, 2)]

    def get(n, m):
        if n < 0 or m < 0:
            return Fraction(0)
        return table[n].get(m, Fraction(0))

    for n in range(1, order + 1):
        table[n][2 * n] = -get(n - 1, 2 * n - 2) / (4 * n)
        for m in range(2 * n - 1, 0, -1):
            acc = Fraction((2 * m + 2) * (2 * m + 1), 2) * get(n, m + 1)
            acc -= get(n - 1, m - 2)
            for j in range(1, n):
                acc += energies[j] * get(n - j, m)
            table[n][m] = acc / (2 * m)
        energies.append(-table[n][1])
    return tuple(energies)


def oscillator_coeffs(k: int) -> SmallSeries:
    """Ground-state energy Taylor coefficients as exact rationals.

    The first eight values are pinned against their published forms; the
    recursion extends them to any order.
    """
    if k < 0:
        raise ValueError("order must be nonnegative")
    coeffs = _oscillator_rationals(max(k, 7))
    published = tuple(
        Fraction(s) for s in reference_tables()["problems"]["oscillator"]["coefficients_exact"]
    )
    if coeffs[:8] != published:
        raise AssertionError(
            "oscillator coefficient recursion disagrees with the pinned "
            "reference rationals; refusing to extrapolate from it"
        )
    return SmallSeries(coeffs[: k + 1])


def oscillator_ladder(length: int = 24) -> PowerLadder:
    """Powers 1 - 2n/3, spacing 2/3; not shift-invariant (counter-terms)."""
    amplitudes = tuple(reference_tables()["problems"]["oscillator"]["large_amplitudes"])
    return PowerLadder.arithmetic(
        Fraction(1, 3), Fraction(2, 3), length, amplitudes=amplitudes
    )


# ---------------------------------------------------------------------------
# Electron correlation energy
# ---------------------------------------------------------------------------


def electron_series(ctx: PrecisionContext = DEFAULT_CONTEXT) -> SmallSeries:
    """High-density expansion -pi^2/360 + 0.00845 r_s."""
    with ctx.working(extra=10):
        a0 = -(mp.pi**2) / 360
        a1 = mpf("0.00845")
        return SmallSeries((a0, a1))


def electron_ladder(length: int = 12) -> PowerLadder:
    """Powers -(n+1)/2, spacing 1/2; shift-invariant."""
    b1, b2 = [float(v) for v in reference_tables()["problems"]["electron"]["large_amplitudes"]]
    return PowerLadder.arithmetic(
        Fraction(-1), Fraction(1, 2), length, amplitudes=(b1, b2)
    )


def electron_large_matches(ctx: PrecisionContext = DEFAULT_CONTEXT) -> tuple:
    """Known low-density coefficients: b_1 = 3/4 - log(sqrt(2 pi)) (negative)
    at power -1, and the published b_2 at power -3/2."""
    with ctx.working(extra=10):
        b1 = -(mp.log(mp.sqrt(2 * mp.pi)) - mpf(3) / 4)
        b2 = mpf("0.359933")
        return ((Fraction(-1), b1), (Fraction(-3, 2), b2))


# ---------------------------------------------------------------------------
# Problem registry
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class BenchmarkProblem:
    """A named benchmark: coefficient generator, ladder, exact amplitude,
    optional pointwise oracle and optional two-point large-variable data."""

    name: str
    variable: str
    series: object
    ladder: object
    exact_amplitude: object
    oracle: object = None
    large_matches: object = None
    max_order: int | None = None

    @property
    def reference(self) -> dict:
        return reference_tables()["problems"][self.name]


def _partition_exact_amplitude(ctx):
    return partition_large_amplitude(1, ctx)


def _oscillator_exact_amplitude(ctx):
    return mpf(reference_tables()["problems"]["oscillator"]["exact_amplitude"])


def _electron_exact_amplitude(ctx):
    return electron_large_matches(ctx)[0][1]


PROBLEMS = {
    "partition": BenchmarkProblem(
        name="partition",
        variable="g",
        series=partition_coeffs,
        ladder=partition_ladder,
        exact_amplitude=_partition_exact_amplitude,
        oracle=partition_exact,
    ),
    "oscillator": BenchmarkProblem(
        name="oscillator",
        variable="g",
        series=lambda k, ctx=DEFAULT_CONTEXT: oscillator_coeffs(k),
        ladder=oscillator_ladder,
        exact_amplitude=_oscillator_exact_amplitude,
    ),
    "electron": BenchmarkProblem(
        name="electron",
        variable="r_s",
        series=lambda k, ctx=DEFAULT_CONTEXT: electron_series(ctx),
        ladder=electron_ladder,
        exact_amplitude=_electron_exact_amplitude,
        large_matches=electron_large_matches,
        max_order=3,
    ),
}

PROBLEM_NAMES = tuple(PROBLEMS)


def get_problem(name: str) -> BenchmarkProblem:
    try:
        return PROBLEMS[name]
    except KeyError:
        raise KeyError(
            f"unknown problem {name!r}; available: {', '.join(PROBLEM_NAMES)}"
        ) from None


@lru_cache(maxsize=None)
def solve_problem(name: str, k: int, q: int = 0, digits: int = 60) -> SolutionSet:
    """Solve one benchmark construction, cached across callers.

    For the electron problem the known large-variable coefficients are always
    part of the conditions (two-point construction); elsewhere the conditions
    are pure Taylor matching plus q cancellations.
    """
    problem = get_problem(name)
    if problem.max_order is not None and k > problem.max_order:
        raise ValueError(f"{name} supports orders up to {problem.max_order}")
    ctx = PrecisionContext(decimal_digits=digits)
    ladder = problem.ladder(max(k + 2, 8))
    if problem.large_matches is not None:
        large = problem.large_matches(ctx)
        n_small = k + 1 - len(large)
        series = problem.series(max(n_small - 1, 0), ctx)
        conditions = assemble_conditions(series, ladder, k, q=q, large_matches=large)
    else:
        series = problem.series(k, ctx)
        conditions = assemble_conditions(series, ladder, k, q=q)
    return solve(conditions, ladder, ctx)
