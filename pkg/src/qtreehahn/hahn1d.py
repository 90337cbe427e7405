"""One-dimensional q-Hahn and q-Racah polynomials, exactly.

Two genuinely independent evaluation routes are kept for the q-Hahn
family: a terminating 3-phi-2 sum, and a raising chain applied to the
top-level seed in closed form.  Tests compare them point by point; the
rest of the package consumes the memoized `hahn_eval`.

The polynomials here are normalized so that the raising chain is exactly
the level-lift: the value at level N is the chain applied to the level-n
values, scaled by q^((N-n)(N-n+1)/2) / (q;q)_{N-n}.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from .lattice import GridFunction, ParamSet
from .qnum import (
    QContext,
    Rational,
    as_fraction,
    phi_sum,
    pochhammer,
    q_binomial,
    q_factorial,
    rational_sqrt,
)
from .qops import apply_D

__all__ = [
    "NonSquareRadicand",
    "Hahn1DSpec",
    "Racah1DSpec",
    "hahn_seed",
    "hahn_via_phi2",
    "hahn_via_raising",
    "hahn_eval",
    "hahn_norm",
    "verify_hahn_recurrences",
    "vandermonde_sum_check",
    "racah",
    "racah_eval",
    "gr_hahn_bridge",
    "gr_racah_bridge",
]


class NonSquareRadicand(ArithmeticError):
    """An explicit half-integer exponent landed on a non-square rational."""


@dataclass(frozen=True)
class Hahn1DSpec:
    """Degree, parameter pair and level of a one-dimensional q-Hahn polynomial."""

    ctx: QContext
    n: int
    alpha: Fraction
    beta: Fraction
    N: int

    def __post_init__(self):
        object.__setattr__(self, "alpha", as_fraction(self.alpha))
        object.__setattr__(self, "beta", as_fraction(self.beta))
        if not (0 <= self.n <= self.N):
            raise ValueError(f"need 0 <= n <= N, got n={self.n}, N={self.N}")


@dataclass(frozen=True)
class Racah1DSpec:
    """Degree, three parameters and level of a one-dimensional q-Racah polynomial.

    The lattice is always the finite one: the fourth textbook parameter is
    pinned to q**(-N) by the level.
    """

    ctx: QContext
    n: int
    alpha: Fraction
    beta: Fraction
    delta: Fraction
    N: int

    def __post_init__(self):
        object.__setattr__(self, "alpha", as_fraction(self.alpha))
        object.__setattr__(self, "beta", as_fraction(self.beta))
        object.__setattr__(self, "delta", as_fraction(self.delta))
        if not (0 <= self.n <= self.N):
            raise ValueError(f"need 0 <= n <= N, got n={self.n}, N={self.N}")


def _check_x(x: int, N: int):
    if not (0 <= x <= N):
        raise ValueError(f"lattice point x={x} outside 0..{N}")


@lru_cache(maxsize=None)
def _seed_value(ctx: QContext, n: int, x: int, alpha: Fraction, beta: Fraction) -> Fraction:
    """Top-level value at its own level:

        q^(-n^2/2) (q; q)_n (alpha beta q^(n+1))^x (beta^-1 q^-n; q)_x / (alpha q; q)_x.
    """
    q = ctx.q
    den = pochhammer(ctx, alpha * q, x)
    if den == 0:
        raise ZeroDivisionError(f"(alpha q; q)_x vanished for alpha={alpha}, x={x}")
    return (
        ctx.q_half_power(-n * n)
        * q_factorial(ctx, n)
        * (alpha * beta * ctx.q_power(n + 1)) ** x
        * pochhammer(ctx, ctx.q_power(-n) / beta, x)
        / den
    )


def hahn_seed(spec: Hahn1DSpec, x: int) -> Fraction:
    """Value at level N = n, the function whose raising chain generates all levels."""
    if spec.N != spec.n:
        raise ValueError(f"seed lives at its own level: N={spec.N} != n={spec.n}")
    _check_x(x, spec.N)
    return _seed_value(spec.ctx, spec.n, x, spec.alpha, spec.beta)


def hahn_via_phi2(spec: Hahn1DSpec, x: int) -> Fraction:
    """Hypergeometric route:

        q^(-nN + n^2/2) (q;q)_N / (q;q)_{N-n}
            * 3phi2[q^-n, alpha beta q^(n+1), q^-x; alpha q, q^-N; q, q].
    """
    _check_x(x, spec.N)
    ctx, n, N = spec.ctx, spec.n, spec.N
    prefactor = (
        ctx.q_half_power(n * n - 2 * n * N)
        * q_factorial(ctx, N)
        / q_factorial(ctx, N - n)
    )
    series = phi_sum(
        ctx,
        (ctx.q_power(-n), spec.alpha * spec.beta * ctx.q_power(n + 1), ctx.q_power(-x)),
        (spec.alpha * ctx.q, ctx.q_power(-N)),
        ctx.q,
        min(n, x),
    )
    return prefactor * series


def hahn_via_raising(spec: Hahn1DSpec, x: int) -> Fraction:
    """Chain route: the raising chain from the level-n seed, in closed form.

        q^(-n(N-n)) * sum_y [N-x, n-y]_q [x, y]_q q^(y(y+N-x-n)) seed(y)
    """
    _check_x(x, spec.N)
    ctx, n, N = spec.ctx, spec.n, spec.N
    total = Fraction(0)
    for y in range(max(0, x - (N - n)), min(x, n) + 1):
        total += (
            q_binomial(ctx, N - x, n - y)
            * q_binomial(ctx, x, y)
            * ctx.q_power(y * (y + N - x - n))
            * _seed_value(ctx, n, y, spec.alpha, spec.beta)
        )
    return ctx.q_power(-n * (N - n)) * total


@lru_cache(maxsize=None)
def hahn_eval(
    ctx: QContext, n: int, x: int, alpha: Fraction, beta: Fraction, N: int
) -> Fraction:
    """Memoized q-Hahn value used throughout the package (phi-sum route)."""
    return hahn_via_phi2(Hahn1DSpec(ctx, n, alpha, beta, N), x)


def hahn_norm(spec: Hahn1DSpec) -> Fraction:
    """Squared norm for the lattice inner product with parameters (alpha, beta):

        (alpha beta q^(n+1); q)_{N+1} (q; q)_n (beta q; q)_n
        / ((1 - alpha beta q^(2n+1)) (q; q)_{N-n} (alpha q; q)_n)
        * alpha^n q^(((N-2n)^2 + N + 2n - 2n^2)/2).
    """
    ctx, n, N = spec.ctx, spec.n, spec.N
    alpha, beta = spec.alpha, spec.beta
    q = ctx.q
    expo = (N - 2 * n) ** 2 + N + 2 * n - 2 * n * n  # always even
    return (
        pochhammer(ctx, alpha * beta * ctx.q_power(n + 1), N + 1)
        * q_factorial(ctx, n)
        * pochhammer(ctx, beta * q, n)
        / (
            (1 - alpha * beta * ctx.q_power(2 * n + 1))
            * q_factorial(ctx, N - n)
            * pochhammer(ctx, alpha * q, n)
        )
        * alpha**n
        * ctx.q_power(expo // 2)
    )


def _hahn_grid(ctx: QContext, n: int, alpha: Fraction, beta: Fraction, N: int) -> GridFunction:
    """The level-N polynomial as a two-variable grid function (x, N - x)."""
    values = tuple(hahn_eval(ctx, n, N - x2, alpha, beta, N) for x2 in range(N + 1))
    # enumeration of [2; N] is (0, N), (1, N-1), ..., (N, 0)
    return GridFunction(2, N, tuple(reversed(values)))


def verify_hahn_recurrences(
    ctx: QContext, alpha: Rational, beta: Rational, n_max: int
) -> list[dict]:
    """Exact check of the three structure relations of the q-Hahn family.

    For all 0 <= n <= N <= n_max and all lattice points:

      * raising: the raising operator sends the level-(N-1) polynomial to
        (q^(n-N) - 1) times the level-N one,
      * lowering: the lowering operator sends the level-(N+1) polynomial to
        q^(-n) (alpha beta q^(N+n+2) - 1) times the level-N one,
      * eigen: the full operator D at level N multiplies the polynomial by
        q^(-n) (1 - q^n) (1 - alpha beta q^(n+1)).

    Raising and lowering are checked against their explicit two-variable
    displays; the eigen relation goes through the operator module.
    """
    alpha, beta = as_fraction(alpha), as_fraction(beta)
    q = ctx.q
    p = ParamSet(ctx, (alpha, beta), unchecked=True)
    reports = []

    def value(n, x, N):
        return hahn_eval(ctx, n, x, alpha, beta, N)

    raise_fail = None
    raise_cases = 0
    for n in range(n_max + 1):
        for N in range(n + 1, n_max + 1):
            for x1 in range(N + 1):
                x2 = N - x1
                lhs = Fraction(0)
                if x1 > 0:
                    lhs += (
                        ctx.q_power(-x1 - x2)
                        * (1 - ctx.q_power(x1))
                        * value(n, x1 - 1, N - 1)
                    )
                if x2 > 0:
                    lhs += ctx.q_power(-x2) * (1 - ctx.q_power(x2)) * value(n, x1, N - 1)
                rhs = (ctx.q_power(-x1 - x2 + n) - 1) * value(n, x1, N)
                raise_cases += 1
                if lhs != rhs and raise_fail is None:
                    raise_fail = {"n": n, "N": N, "x1": x1}
    reports.append(
        {
            "identity": "raising_shifts_level",
            "cases": raise_cases,
            "status": "pass" if raise_fail is None else "fail",
            "counterexample": raise_fail,
        }
    )

    lower_fail = None
    lower_cases = 0
    for n in range(n_max + 1):
        for N in range(n, n_max + 1):
            for x1 in range(N + 1):
                x2 = N - x1
                lhs = (alpha * ctx.q_power(x1 + 1) - 1) * value(n, x1 + 1, N + 1)
                lhs += (
                    alpha
                    * ctx.q_power(x1 + 1)
                    * (beta * ctx.q_power(x2 + 1) - 1)
                    * value(n, x1, N + 1)
                )
                rhs = (
                    ctx.q_power(-n)
                    * (alpha * beta * ctx.q_power(x1 + x2 + n + 2) - 1)
                    * value(n, x1, N)
                )
                lower_cases += 1
                if lhs != rhs and lower_fail is None:
                    lower_fail = {"n": n, "N": N, "x1": x1}
    reports.append(
        {
            "identity": "lowering_shifts_level",
            "cases": lower_cases,
            "status": "pass" if lower_fail is None else "fail",
            "counterexample": lower_fail,
        }
    )

    eigen_fail = None
    eigen_cases = 0
    for n in range(n_max + 1):
        lam = ctx.q_power(-n) * (1 - ctx.q_power(n)) * (1 - alpha * beta * ctx.q_power(n + 1))
        for N in range(n, n_max + 1):
            grid = _hahn_grid(ctx, n, alpha, beta, N)
            eigen_cases += 1
            if apply_D(grid, p) != grid.scale(lam) and eigen_fail is None:
                eigen_fail = {"n": n, "N": N}
    reports.append(
        {
            "identity": "diagonal_operator_eigenvalue",
            "cases": eigen_cases,
            "status": "pass" if eigen_fail is None else "fail",
            "counterexample": eigen_fail,
        }
    )
    return reports


def vandermonde_sum_check(
    ctx: QContext, n: int, j: int, alpha: Rational, beta: Rational
) -> bool:
    """Exact check of the alternating seed sum used to normalize kernels:

        sum_{x=0}^{j} (-1)^x q^(x(x-1)/2) seed(x) / ((q;q)_x (q;q)_{j-x})
            = (alpha beta q^(n+1); q)_j / ((alpha q; q)_j (q; q)_j)
              * q^(-n^2/2) (q; q)_n          for 0 <= j <= n.
    """
    if not (0 <= j <= n):
        raise ValueError(f"need 0 <= j <= n, got j={j}, n={n}")
    alpha, beta = as_fraction(alpha), as_fraction(beta)
    lhs = Fraction(0)
    for x in range(j + 1):
        lhs += (
            (-1) ** x
            * ctx.q_power(x * (x - 1) // 2)
            * _seed_value(ctx, n, x, alpha, beta)
            / (q_factorial(ctx, x) * q_factorial(ctx, j - x))
        )
    rhs = (
        pochhammer(ctx, alpha * beta * ctx.q_power(n + 1), j)
        / (pochhammer(ctx, alpha * ctx.q, j) * q_factorial(ctx, j))
        * ctx.q_half_power(-n * n)
        * q_factorial(ctx, n)
    )
    return lhs == rhs


def racah(spec: Racah1DSpec, x: int) -> Fraction:
    """q-Racah value on the finite lattice:

        q^(-n(N-n)) (beta delta q; q)_n (q^(N-n+1); q)_n
        / ((alpha beta q^(n+1); q)_n (q; q)_n)
        * 4phi3[q^-n, delta q^(x-N), q^-x, alpha beta q^(n+1);
                alpha q, beta delta q, q^-N; q, q].
    """
    _check_x(x, spec.N)
    ctx, n, N = spec.ctx, spec.n, spec.N
    alpha, beta, delta = spec.alpha, spec.beta, spec.delta
    q = ctx.q
    den = pochhammer(ctx, alpha * beta * ctx.q_power(n + 1), n) * q_factorial(ctx, n)
    if den == 0:
        raise ZeroDivisionError(
            f"(alpha beta q^(n+1); q)_n (q;q)_n vanished for alpha={alpha}, beta={beta}"
        )
    prefactor = (
        ctx.q_power(-n * (N - n))
        * pochhammer(ctx, beta * delta * q, n)
        * pochhammer(ctx, ctx.q_power(N - n + 1), n)
        / den
    )
    series = phi_sum(
        ctx,
        (
            ctx.q_power(-n),
            delta * ctx.q_power(x - N),
            ctx.q_power(-x),
            alpha * beta * ctx.q_power(n + 1),
        ),
        (alpha * q, beta * delta * q, ctx.q_power(-N)),
        q,
        min(n, x),
    )
    return prefactor * series


@lru_cache(maxsize=None)
def racah_eval(
    ctx: QContext,
    n: int,
    x: int,
    alpha: Fraction,
    beta: Fraction,
    delta: Fraction,
    N: int,
) -> Fraction:
    """Memoized q-Racah value, the connection-coefficient workhorse."""
    return racah(Racah1DSpec(ctx, n, alpha, beta, delta, N), x)


def gr_hahn_bridge(spec: Hahn1DSpec, x: int) -> Fraction:
    """Value of the standard-reference q-Hahn polynomial h_n:

        h_n = (-1)^(N-n) q^(-n/2) (alpha q; q)_n * Q_n

    where Q_n is this package's normalization.  Always exact: q^(n/2) is a
    power of the context's square root.
    """
    ctx, n, N = spec.ctx, spec.n, spec.N
    return (
        (-1) ** (N - n)
        * ctx.q_half_power(-n)
        * pochhammer(ctx, spec.alpha * ctx.q, n)
        * hahn_eval(ctx, n, x, spec.alpha, spec.beta, N)
    )


def gr_racah_bridge(spec: Racah1DSpec, x: int, squared: bool = True) -> Fraction:
    """Standard-reference q-Racah normalization:

        r~_n = (-1)^n (alpha beta q^(n+1); q)_n (alpha q; q)_n (q; q)_n
               * (q^(-N+n+1) delta)^(-n/2) * r_n.

    For odd n the radicand q^(-N+n+1) delta must be a positive rational
    square for r~_n itself to be rational; `squared=True` (the default)
    sidesteps the branch question by returning r~_n**2, which is always
    rational.  With squared=False a non-square radicand raises
    NonSquareRadicand, and the positive square root is always taken.
    """
    ctx, n, N = spec.ctx, spec.n, spec.N
    value = racah_eval(ctx, n, x, spec.alpha, spec.beta, spec.delta, N)
    poly = (
        pochhammer(ctx, spec.alpha * spec.beta * ctx.q_power(n + 1), n)
        * pochhammer(ctx, spec.alpha * ctx.q, n)
        * q_factorial(ctx, n)
    )
    radicand = ctx.q_power(-N + n + 1) * spec.delta
    if squared:
        return poly * poly * radicand ** (-n) * value * value
    if n % 2 == 0:
        scale = radicand ** (-n // 2)
    else:
        try:
            root = rational_sqrt(radicand)
        except ValueError as exc:
            raise NonSquareRadicand(
                f"(q^(-N+n+1) delta) = {radicand} has no rational square root"
            ) from exc
        scale = root ** (-n)
    return (-1) ** n * poly * scale * value
