"""Precision-configurable scalar arithmetic, dense linear algebra and
complete complex root finding for univariate polynomials.

Everything here runs on mpmath scalars so the rest of the package can be
driven at 60+ decimal digits.  A :class:`PrecisionContext` is passed
explicitly to every routine that rounds; internal work is carried out with
guard digits on top of the context's nominal precision so that results are
accurate to the nominal precision itself.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from mpmath import mp, mpf, mpc

__all__ = [
    "PrecisionContext",
    "Polynomial",
    "SingularMatrixError",
    "RootConvergenceError",
    "solve_linear",
    "determinant",
    "poly_roots",
]


class SingularMatrixError(ValueError):
    """A pivot fell below the singularity threshold during elimination."""


class RootConvergenceError(RuntimeError):
    """The simultaneous root iteration exhausted its iteration budget."""

    def __init__(self, message, residuals=None):
        super().__init__(message)
        self.residuals = residuals or []


@dataclass(frozen=True)
class PrecisionContext:
    """Working precision for all scalar arithmetic.

    decimal_digits is the nominal precision of reported results; routines
    add guard digits internally.  root_tolerance bounds the scaled residual
    |p(z)| of every accepted polynomial root; by default it is
    10**-(decimal_digits - 12).
    """

    decimal_digits: int = 60
    root_tolerance: float | None = None

    def __post_init__(self):
        if self.decimal_digits < 15:
            raise ValueError("decimal_digits must be at least 15")
        if self.root_tolerance is not None and not self.root_tolerance > 0:
            raise ValueError("root_tolerance must be positive")

    def working(self, extra: int = 0):
        """Context manager setting mpmath's precision with guard digits."""
        return mp.workdps(self.decimal_digits + extra)

    def eps(self, drop: int = 0):
        """10**-(decimal_digits - drop) as an mpf."""
        return mpf(10) ** (drop - self.decimal_digits)

    @property
    def root_tol(self):
        if self.root_tolerance is not None:
            return mpf(self.root_tolerance)
        return self.eps(12)


DEFAULT_CONTEXT = PrecisionContext()


@dataclass(frozen=True)
class Polynomial:
    """Dense univariate polynomial, coefficients in ascending degree."""

    coeffs: tuple

    def __post_init__(self):
        coeffs = tuple(self.coeffs)
        # trim exact trailing zeros; keep at least the constant term
        while len(coeffs) > 1 and coeffs[-1] == 0:
            coeffs = coeffs[:-1]
        object.__setattr__(self, "coeffs", coeffs)

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def __call__(self, z):
        acc = mpc(0)
        for c in reversed(self.coeffs):
            acc = acc * z + c
        return acc

    def derivative(self) -> "Polynomial":
        if self.degree == 0:
            return Polynomial((mpf(0),))
        return Polynomial(tuple(n * c for n, c in enumerate(self.coeffs) if n > 0))


def _as_rows(matrix):
    return [[mpc(x) for x in row] for row in matrix]


def solve_linear(matrix, rhs, ctx: PrecisionContext = DEFAULT_CONTEXT):
    """Solve the square system A x = b by Gaussian elimination.

    Partial pivoting with implicit row scaling; raises SingularMatrixError
    when the best available pivot is below 10**-(digits-3) of its row's
    original scale.
    """
    n = len(matrix)
    if any(len(row) != n for row in matrix) or len(rhs) != n:
        raise ValueError("matrix must be square and match the rhs length")
    with ctx.working(extra=20):
        a = _as_rows(matrix)
        b = [mpc(x) for x in rhs]
        scales = []
        for row in a:
            s = max(abs(x) for x in row)
            scales.append(s if s > 0 else mpf(1))
        threshold = mpf(10) ** (3 - ctx.decimal_digits)
        perm = list(range(n))
        for col in range(n):
            pivot_row = max(range(col, n), key=lambda r: abs(a[r][col]) / scales[perm[r]])
            if abs(a[pivot_row][col]) < threshold * scales[perm[pivot_row]]:
                raise SingularMatrixError(
                    f"pivot {abs(a[pivot_row][col])} below threshold in column {col}"
                )
            if pivot_row != col:
                a[col], a[pivot_row] = a[pivot_row], a[col]
                b[col], b[pivot_row] = b[pivot_row], b[col]
                perm[col], perm[pivot_row] = perm[pivot_row], perm[col]
            inv = 1 / a[col][col]
            for r in range(col + 1, n):
                factor = a[r][col] * inv
                if factor == 0:
                    continue
                a[r][col] = mpc(0)
                for c in range(col + 1, n):
                    a[r][c] -= factor * a[col][c]
                b[r] -= factor * b[col]
        x = [mpc(0)] * n
        for row in range(n - 1, -1, -1):
            acc = b[row]
            for c in range(row + 1, n):
                acc -= a[row][c] * x[c]
            x[row] = acc / a[row][row]
        return x


def determinant(matrix, ctx: PrecisionContext = DEFAULT_CONTEXT):
    """Determinant via LU with partial pivoting; zero is a valid result."""
    n = len(matrix)
    if any(len(row) != n for row in matrix):
        raise ValueError("matrix must be square")
    with ctx.working(extra=20):
        a = _as_rows(matrix)
        det = mpc(1)
        for col in range(n):
            pivot_row = max(range(col, n), key=lambda r: abs(a[r][col]))
            if a[pivot_row][col] == 0:
                return mpc(0)
            if pivot_row != col:
                a[col], a[pivot_row] = a[pivot_row], a[col]
                det = -det
            det *= a[col][col]
            inv = 1 / a[col][col]
            for r in range(col + 1, n):
                factor = a[r][col] * inv
                if factor == 0:
                    continue
                for c in range(col + 1, n):
                    a[r][c] -= factor * a[col][c]
        return det


def _initial_circle(coeffs, degree):
    """Starting points for the simultaneous iteration: a circle whose radius
    is the geometric mean of the root magnitudes, with an angular offset to
    avoid symmetry traps."""
    c0 = abs(coeffs[0])
    cd = abs(coeffs[degree])
    radius = (c0 / cd) ** (mpf(1) / degree) if c0 > 0 else mpf(1)
    if radius == 0:
        radius = mpf(1)
    out = []
    for j in range(degree):
        theta = mpf(2) * mp.pi * j / degree + mpf("0.3764")
        out.append(radius * mp.exp(1j * theta))
    return out


def poly_roots(
    p: Polynomial,
    ctx: PrecisionContext = DEFAULT_CONTEXT,
    max_iterations: int = 1000,
):
    """All complex roots of p, with multiplicity, by the Aberth-Ehrlich
    simultaneous iteration followed by a Newton polish.

    Returns exactly degree(p) roots ordered by (real part, imaginary part).
    Each root z satisfies |p(z)| <= root_tolerance * sum_k |c_k z^k|.
    Raises RootConvergenceError when the iteration budget is exhausted.
    """
    if p.degree < 1:
        raise ValueError("poly_roots requires degree >= 1")
    guard = 20 + p.degree
    with ctx.working(extra=guard):
        coeffs = [mpc(c) for c in p.coeffs]
        # normalize scale so evaluation magnitudes stay moderate
        scale = max(abs(c) for c in coeffs)
        coeffs = [c / scale for c in coeffs]
        # factor out roots at the origin
        n_zero = 0
        while n_zero < len(coeffs) - 1 and coeffs[n_zero] == 0:
            n_zero += 1
        work = Polynomial(tuple(coeffs[n_zero:]))
        roots = [mpc(0)] * n_zero
        if work.degree >= 1:
            roots.extend(_aberth(work, ctx, max_iterations))
        real_coeffs = all(mp.im(c) == 0 for c in coeffs)
        cleaned = []
        snap = mpf(10) ** (-(ctx.decimal_digits // 2))
        for z in roots:
            if real_coeffs and abs(mp.im(z)) <= snap * max(1, abs(z)):
                z = _newton_polish(work, mpc(mp.re(z)), steps=4) if abs(z) > 0 else z
                z = mpc(mp.re(z))
            cleaned.append(z)
        cleaned.sort(key=lambda z: (mp.re(z), mp.im(z)))
        if work.degree >= 1:
            nonzero = [z for z in cleaned if z != 0]
            _check_root_residuals(work, nonzero, ctx)
        return cleaned


def _aberth(p: Polynomial, ctx, max_iterations):
    dp = p.derivative()
    zs = _initial_circle(p.coeffs, p.degree)
    tol = mpf(10) ** (-(mp.dps - 8))
    for _ in range(max_iterations):
        converged = True
        new = list(zs)
        for j, z in enumerate(zs):
            pz = p(z)
            dpz = dp(z)
            if dpz == 0:
                new[j] = z + tol * (1 + abs(z))
                converged = False
                continue
            newton = pz / dpz
            s = mpc(0)
            for i, zi in enumerate(zs):
                if i != j:
                    diff = z - zi
                    if diff == 0:
                        diff = tol * (1 + abs(z))
                    s += 1 / diff
            denom = 1 - newton * s
            step = newton if denom == 0 else newton / denom
            new[j] = z - step
            if abs(step) > tol * max(1, abs(z)):
                converged = False
        zs = new
        if converged:
            break
    else:
        residuals = sorted(abs(p(z)) for z in zs)
        raise RootConvergenceError(
            f"no convergence within {max_iterations} iterations; "
            f"best residuals {[mp.nstr(r, 5) for r in residuals[:3]]}",
            residuals=residuals,
        )
    return [_newton_polish(p, z, steps=3) for z in zs]


def _newton_polish(p: Polynomial, z, steps=3):
    dp = p.derivative()
    for _ in range(steps):
        dpz = dp(z)
        if dpz == 0:
            break
        z = z - p(z) / dpz
    return z


def _check_root_residuals(p: Polynomial, roots, ctx):
    tol = ctx.root_tol
    for z in roots:
        scale = sum(abs(c) * max(1, abs(z)) ** k for k, c in enumerate(p.coeffs))
        if abs(p(z)) > tol * scale:
            raise RootConvergenceError(
                f"root {mp.nstr(z, 8)} residual {mp.nstr(abs(p(z)), 3)} "
                f"exceeds tolerance {mp.nstr(tol * scale, 3)}"
            )
