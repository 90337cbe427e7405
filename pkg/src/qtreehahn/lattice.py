"""Compositions of N into h parts and weighted grid functions on them.

The domain [h; N] is the set of h-tuples of nonnegative integers summing
to N, enumerated lexicographically.  Functions on the domain are stored
densely in that order, and the inner product below makes the raising and
lowering operators of `qops` mutually adjoint up to sign.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Iterable, Sequence

from .qnum import QContext, Rational, as_fraction, pochhammer, q_factorial

__all__ = [
    "DimensionMismatch",
    "IndexOutOfRange",
    "ParamSet",
    "GridFunction",
    "composition_count",
    "enumerate_compositions",
    "rank_of",
    "unrank",
    "partial_sums",
    "weight",
    "inner_product",
    "norm_squared",
    "weight_positivity_check",
]


class DimensionMismatch(ValueError):
    """Two grid functions (or a function and a parameter set) disagree in shape."""


class IndexOutOfRange(IndexError):
    """Rank or composition outside the declared domain."""


def composition_count(h: int, N: int) -> int:
    """Number of points in [h; N], i.e. C(N+h-1, h-1)."""
    if h < 1 or N < 0:
        raise ValueError(f"need h >= 1 and N >= 0, got h={h}, N={N}")
    return math.comb(N + h - 1, h - 1)


def enumerate_compositions(h: int, N: int) -> list[tuple[int, ...]]:
    """All of [h; N] in lexicographic order, e.g. (0,2), (1,1), (2,0)."""
    if h < 1 or N < 0:
        raise ValueError(f"need h >= 1 and N >= 0, got h={h}, N={N}")
    if h == 1:
        return [(N,)]
    out = []
    for first in range(N + 1):
        for rest in enumerate_compositions(h - 1, N - first):
            out.append((first,) + rest)
    return out


def rank_of(x: Sequence[int]) -> int:
    """Position of a composition in the lexicographic enumeration of its domain."""
    h = len(x)
    N = sum(x)
    if h < 1 or any(v < 0 for v in x):
        raise IndexOutOfRange(f"not a composition: {tuple(x)}")
    rank = 0
    remaining = N
    for i in range(h - 1):
        for v in range(x[i]):
            rank += composition_count(h - 1 - i, remaining - v)
        remaining -= x[i]
    return rank


def unrank(h: int, N: int, rank: int) -> tuple[int, ...]:
    """Inverse of rank_of on [h; N]."""
    if not (0 <= rank < composition_count(h, N)):
        raise IndexOutOfRange(f"rank {rank} outside [h;N] for h={h}, N={N}")
    out = []
    remaining = N
    for i in range(h - 1):
        v = 0
        while True:
            block = composition_count(h - 1 - i, remaining - v)
            if rank < block:
                break
            rank -= block
            v += 1
        out.append(v)
        remaining -= v
    out.append(remaining)
    return tuple(out)


def partial_sums(x: Sequence[int]) -> tuple[int, ...]:
    """(X_0, X_1, ..., X_h) with X_k = x_1 + ... + x_k and X_0 = 0."""
    sums = [0]
    for v in x:
        sums.append(sums[-1] + v)
    return tuple(sums)


@dataclass(frozen=True)
class ParamSet:
    """A q-context together with the per-variable parameters alpha_1..alpha_h.

    By default the constructor insists the parameters sit in a regime where
    the weight below is positive on every [h; N] with N <= n_max: either
    all alphas in (0, 1/q) or all alphas > q**(-n_max).  Identities hold
    for generic parameters, so `unchecked=True` waives the range condition;
    the no-pole condition alpha_i != q**(-m) (1 <= m <= n_max) is always
    enforced because those points make weights and norms degenerate.
    """

    ctx: QContext
    alphas: tuple[Fraction, ...]
    n_max: int = 12
    unchecked: bool = False

    def __post_init__(self):
        alphas = tuple(as_fraction(a) for a in self.alphas)
        if not alphas:
            raise ValueError("need at least one parameter")
        object.__setattr__(self, "alphas", alphas)
        q = self.ctx.q
        for a in alphas:
            for m in range(1, self.n_max + 1):
                if a * q**m == 1:
                    raise ValueError(
                        f"alpha={a} equals q**(-{m}); weights degenerate below n_max"
                    )
        if not self.unchecked:
            in_unit_band = all(0 < a < 1 / q for a in alphas)
            above_band = all(a > q ** (-self.n_max) for a in alphas)
            if not (in_unit_band or above_band):
                raise ValueError(
                    "parameters outside the positivity regime; "
                    "pass unchecked=True for generic identity testing"
                )

    @property
    def h(self) -> int:
        return len(self.alphas)

    def prefix_product(self, k: int) -> Fraction:
        """A_k = alpha_1 * ... * alpha_k (A_0 = 1)."""
        if not (0 <= k <= self.h):
            raise IndexOutOfRange(f"prefix length {k} outside 0..{self.h}")
        out = Fraction(1)
        for a in self.alphas[:k]:
            out *= a
        return out

    def span_product(self, lo: int, hi: int) -> Fraction:
        """alpha_{lo+1} * ... * alpha_{hi}."""
        if not (0 <= lo <= hi <= self.h):
            raise IndexOutOfRange(f"span ({lo}, {hi}] outside 0..{self.h}")
        out = Fraction(1)
        for a in self.alphas[lo:hi]:
            out *= a
        return out

    def restrict(self, lo: int, hi: int) -> "ParamSet":
        """Parameter set for the variables in the span (lo, hi]."""
        if not (0 <= lo < hi <= self.h):
            raise IndexOutOfRange(f"span ({lo}, {hi}] outside 0..{self.h}")
        return ParamSet(self.ctx, self.alphas[lo:hi], self.n_max, unchecked=True)

    def __hash__(self):
        return hash((self.ctx, self.alphas))


@dataclass(frozen=True)
class GridFunction:
    """Dense rational-valued function on [h; N], stored in lexicographic order."""

    h: int
    N: int
    values: tuple[Fraction, ...]

    def __post_init__(self):
        expected = composition_count(self.h, self.N)
        if len(self.values) != expected:
            raise DimensionMismatch(
                f"[{self.h}; {self.N}] has {expected} points, got {len(self.values)} values"
            )
        object.__setattr__(self, "values", tuple(as_fraction(v) for v in self.values))

    @classmethod
    def from_callable(cls, h: int, N: int, fn: Callable[[tuple[int, ...]], Rational]):
        return cls(h, N, tuple(as_fraction(fn(x)) for x in enumerate_compositions(h, N)))

    @classmethod
    def constant(cls, h: int, N: int, value: Rational = 1):
        v = as_fraction(value)
        return cls(h, N, (v,) * composition_count(h, N))

    @classmethod
    def zero(cls, h: int, N: int):
        return cls.constant(h, N, 0)

    @classmethod
    def delta(cls, h: int, N: int, at: Sequence[int]):
        """Indicator of a single composition."""
        at = tuple(at)
        if len(at) != h or sum(at) != N or any(v < 0 for v in at):
            raise IndexOutOfRange(f"{at} is not in [h;N] for h={h}, N={N}")
        vals = [Fraction(0)] * composition_count(h, N)
        vals[rank_of(at)] = Fraction(1)
        return cls(h, N, tuple(vals))

    def at(self, x: Sequence[int]) -> Fraction:
        x = tuple(x)
        if len(x) != self.h or sum(x) != self.N or any(v < 0 for v in x):
            raise IndexOutOfRange(f"{x} is not in [h;N] for h={self.h}, N={self.N}")
        return self.values[rank_of(x)]

    def domain(self) -> list[tuple[int, ...]]:
        return enumerate_compositions(self.h, self.N)

    def _check_same_shape(self, other: "GridFunction"):
        if self.h != other.h or self.N != other.N:
            raise DimensionMismatch(
                f"[{self.h};{self.N}] vs [{other.h};{other.N}]"
            )

    def __add__(self, other: "GridFunction") -> "GridFunction":
        self._check_same_shape(other)
        return GridFunction(
            self.h, self.N, tuple(a + b for a, b in zip(self.values, other.values))
        )

    def __sub__(self, other: "GridFunction") -> "GridFunction":
        self._check_same_shape(other)
        return GridFunction(
            self.h, self.N, tuple(a - b for a, b in zip(self.values, other.values))
        )

    def scale(self, c: Rational) -> "GridFunction":
        c = as_fraction(c)
        return GridFunction(self.h, self.N, tuple(c * v for v in self.values))

    def is_zero(self) -> bool:
        return all(v == 0 for v in self.values)

    def to_json_obj(self) -> dict:
        return {
            "h": self.h,
            "N": self.N,
            "values": [
                {"x": list(x), "v": str(v)}
                for x, v in zip(self.domain(), self.values)
            ],
        }

    @classmethod
    def from_json_obj(cls, obj: dict) -> "GridFunction":
        h, N = obj["h"], obj["N"]
        vals = [Fraction(0)] * composition_count(h, N)
        for row in obj["values"]:
            vals[rank_of(tuple(row["x"]))] = as_fraction(row["v"])
        return cls(h, N, tuple(vals))


def weight(x: Sequence[int], p: ParamSet) -> Fraction:
    """Weight of a composition in the inner product:

        q^(N(N+1)/2) * prod_i (q a_i; q)_{x_i} / (q; q)_{x_i} * (a_i q)^(N - X_i)

    with X_i the partial sums of x and N their total.
    """
    x = tuple(x)
    if len(x) != p.h:
        raise DimensionMismatch(f"composition has {len(x)} parts, params have {p.h}")
    return _weight_cached(x, p)


@lru_cache(maxsize=None)
def _weight_cached(x: tuple[int, ...], p: ParamSet) -> Fraction:
    ctx = p.ctx
    q = ctx.q
    N = sum(x)
    out = ctx.q_power(N * (N + 1) // 2)
    X = 0
    for xi, ai in zip(x, p.alphas):
        X += xi
        out *= pochhammer(ctx, q * ai, xi) / q_factorial(ctx, xi)
        out *= (ai * q) ** (N - X)
    return out


def inner_product(f1: GridFunction, f2: GridFunction, p: ParamSet) -> Fraction:
    """Weighted inner product on [h; N].  Exact, bilinear, symmetric."""
    f1._check_same_shape(f2)
    if f1.h != p.h:
        raise DimensionMismatch(f"function on {f1.h} variables, params have {p.h}")
    total = Fraction(0)
    for x, v1, v2 in zip(f1.domain(), f1.values, f2.values):
        if v1 == 0 or v2 == 0:
            continue
        total += weight(x, p) * v1 * v2
    return total


def norm_squared(f: GridFunction, p: ParamSet) -> Fraction:
    return inner_product(f, f, p)


def weight_positivity_check(h: int, N: int, p: ParamSet) -> bool:
    """True when every point of [h; N] has strictly positive weight."""
    return all(weight(x, p) > 0 for x in enumerate_compositions(h, N))
