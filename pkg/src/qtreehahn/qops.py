"""Raising, lowering and diagonalizable difference operators on [h; N].

The three operators implemented here close into a small algebra:

    R . L  and  L . R  both equal the diagonalizable operator D up to an
    explicit scalar, L is (minus) the adjoint of R for the lattice inner
    product, and chains of R applied to kernel vectors of L build an
    orthogonal decomposition of every level.

`verify_operator_algebra` and `spectral_decomposition_check` re-derive all
of this numerically, with exact rational equality, for a given parameter
set; they are used both as tests and from the command line.
"""

from __future__ import annotations

import random
from fractions import Fraction
from typing import Callable

from . import _linalg
from .lattice import (
    GridFunction,
    ParamSet,
    composition_count,
    enumerate_compositions,
    inner_product,
    partial_sums,
)
from .qnum import pochhammer

__all__ = [
    "EmptyDomain",
    "InvalidSlice",
    "apply_D",
    "apply_R",
    "apply_L",
    "apply_D_at_vertex",
    "raise_chain",
    "lower_chain",
    "to_matrix",
    "kernel_basis",
    "eigenvalue",
    "verify_operator_algebra",
    "spectral_decomposition_check",
]


class EmptyDomain(ValueError):
    """Lowering below level zero: the target domain has no points."""


class InvalidSlice(ValueError):
    """A variable span (lo, hi] that is not a nonempty subrange of 1..h."""


def eigenvalue(p: ParamSet, n: int) -> Fraction:
    """q^(-n) (1 - q^n) (1 - A_h q^(n+h-1)), the eigenvalue of D on level-n vectors."""
    ctx = p.ctx
    return (
        ctx.q_power(-n)
        * (1 - ctx.q_power(n))
        * (1 - p.prefix_product(p.h) * ctx.q_power(n + p.h - 1))
    )


def apply_D(f: GridFunction, p: ParamSet) -> GridFunction:
    """The full diagonalizable operator on [h; N] (a same-level map)."""
    return apply_D_at_vertex(f, p, 0, p.h)


def apply_D_at_vertex(f: GridFunction, p: ParamSet, lo: int, hi: int) -> GridFunction:
    """Same operator restricted to the variables x_{lo+1}..x_{hi}.

    Acts fiberwise: the untouched coordinates are parameters.  A span of
    length one yields the zero operator.  With (lo, hi) = (0, h) this is
    the full operator.
    """
    if not (0 <= lo < hi <= p.h):
        raise InvalidSlice(f"span ({lo}, {hi}] is not inside 1..{p.h}")
    if f.h != p.h:
        raise InvalidSlice(f"function has {f.h} variables, params have {p.h}")
    ctx = p.ctx
    q = ctx.q
    alphas = p.alphas
    width = hi - lo

    domain = f.domain()
    table = dict(zip(domain, f.values))
    out = []
    for x in domain:
        X = partial_sums(x)
        # local data for the span (lo, hi]
        n_loc = X[hi] - X[lo]
        value = Fraction(0)
        # off-diagonal terms: move one unit from slot i to slot j, i != j
        for j in range(lo + 1, hi + 1):
            a_prefix = p.span_product(lo, j - 1)  # local A_{j-1}
            coeff_j = a_prefix * (alphas[j - 1] * ctx.q_power(x[j - 1] + 1) - 1)
            if coeff_j == 0:
                continue
            for i in range(lo + 1, hi + 1):
                if i == j or x[i - 1] == 0:
                    continue
                shifted = list(x)
                shifted[i - 1] -= 1
                shifted[j - 1] += 1
                fv = table[tuple(shifted)]
                if fv == 0:
                    continue
                expo = (
                    (j - 1 - lo)
                    + (X[j - 1] - X[lo])
                    + (X[i - 1] - X[lo])
                    - n_loc
                    - (1 if i < j else 0)
                )
                value += (
                    coeff_j
                    * ctx.q_power(expo)
                    * (1 - ctx.q_power(x[i - 1]))
                    * fv
                )
        # diagonal terms
        fv = table[x]
        if fv != 0:
            diag = Fraction(0)
            for j in range(lo + 1, hi + 1):
                if x[j - 1] == 0:
                    continue
                a_prefix = p.span_product(lo, j - 1)
                diag += (
                    a_prefix
                    * ctx.q_power((j - 1 - lo) + 2 * (X[j - 1] - X[lo]) - n_loc)
                    * (alphas[j - 1] * ctx.q_power(x[j - 1]) - 1)
                    * (1 - ctx.q_power(x[j - 1]))
                )
            diag += (p.span_product(lo, hi) * ctx.q_power(width + n_loc - 1) - 1) * (
                1 - ctx.q_power(-n_loc)
            )
            value += diag * fv
        out.append(value)
    return GridFunction(f.h, f.N, tuple(out))


def apply_R(f: GridFunction, p: ParamSet) -> GridFunction:
    """Raising operator from [h; N] to [h; N+1]:

        (R f)(x) = sum_i q^(X_{i-1} - N - 1) (1 - q^(x_i)) f(x - e_i)

    with N the level of f and the partial sums taken at the target point.
    """
    if f.h != p.h:
        raise InvalidSlice(f"function has {f.h} variables, params have {p.h}")
    ctx = p.ctx
    N = f.N
    table = dict(zip(f.domain(), f.values))
    out = []
    for x in enumerate_compositions(f.h, N + 1):
        X = partial_sums(x)
        value = Fraction(0)
        for i in range(1, f.h + 1):
            if x[i - 1] == 0:
                continue
            lowered = list(x)
            lowered[i - 1] -= 1
            fv = table[tuple(lowered)]
            if fv == 0:
                continue
            value += ctx.q_power(X[i - 1] - N - 1) * (1 - ctx.q_power(x[i - 1])) * fv
        out.append(value)
    return GridFunction(f.h, N + 1, tuple(out))


def apply_L(f: GridFunction, p: ParamSet) -> GridFunction:
    """Lowering operator from [h; N] to [h; N-1]:

        (L f)(x) = sum_j A_{j-1} q^(j - 1 + X_{j-1}) (alpha_j q^(x_j + 1) - 1) f(x + e_j).
    """
    if f.h != p.h:
        raise InvalidSlice(f"function has {f.h} variables, params have {p.h}")
    if f.N == 0:
        raise EmptyDomain("cannot lower a level-0 function")
    ctx = p.ctx
    N = f.N
    table = dict(zip(f.domain(), f.values))
    out = []
    for x in enumerate_compositions(f.h, N - 1):
        X = partial_sums(x)
        value = Fraction(0)
        for j in range(1, f.h + 1):
            raised = list(x)
            raised[j - 1] += 1
            fv = table[tuple(raised)]
            if fv == 0:
                continue
            value += (
                p.prefix_product(j - 1)
                * ctx.q_power(j - 1 + X[j - 1])
                * (p.alphas[j - 1] * ctx.q_power(x[j - 1] + 1) - 1)
                * fv
            )
        out.append(value)
    return GridFunction(f.h, N - 1, tuple(out))


def raise_chain(f: GridFunction, p: ParamSet, to_level: int) -> GridFunction:
    """Apply R repeatedly until the function lives on [h; to_level]."""
    if to_level < f.N:
        raise ValueError(f"cannot raise from level {f.N} down to {to_level}")
    g = f
    while g.N < to_level:
        g = apply_R(g, p)
    return g


def lower_chain(f: GridFunction, p: ParamSet, to_level: int) -> GridFunction:
    """Apply L repeatedly until the function lives on [h; to_level]."""
    if to_level > f.N:
        raise ValueError(f"cannot lower from level {f.N} up to {to_level}")
    g = f
    while g.N > to_level:
        g = apply_L(g, p)
    return g


def to_matrix(
    op: Callable[[GridFunction], GridFunction], h: int, level: int
) -> list[list[Fraction]]:
    """Matrix of a linear operator on delta functions of [h; level].

    Columns follow the lexicographic enumeration of the source domain,
    rows that of the image domain (determined by applying op once).
    """
    domain = enumerate_compositions(h, level)
    columns = [op(GridFunction.delta(h, level, x)) for x in domain]
    nrows = len(columns[0].values)
    return [[col.values[r] for col in columns] for r in range(nrows)]


def kernel_basis(h: int, n: int, p: ParamSet) -> list[GridFunction]:
    """Exact basis of the kernel of the lowering operator on [h; n].

    For n = 0 the lowering map has an empty target, so the kernel is the
    whole (one-dimensional) space.
    """
    if n == 0:
        return [GridFunction.constant(h, 0, 1)]
    matrix = to_matrix(lambda g: apply_L(g, p), h, n)
    vectors = _linalg.nullspace(matrix, ncols=composition_count(h, n))
    return [GridFunction(h, n, tuple(vec)) for vec in vectors]


def _random_function(h: int, N: int, rng: random.Random) -> GridFunction:
    vals = tuple(
        Fraction(rng.randint(-9, 9), rng.randint(1, 9))
        for _ in range(composition_count(h, N))
    )
    return GridFunction(h, N, vals)


def _funcs_for_level(h: int, N: int, rng: random.Random) -> list[GridFunction]:
    """Every delta plus two random functions: enough to pin a linear identity."""
    funcs = [GridFunction.delta(h, N, x) for x in enumerate_compositions(h, N)]
    funcs.append(_random_function(h, N, rng))
    funcs.append(_random_function(h, N, rng))
    return funcs


def verify_operator_algebra(h: int, n_max: int, p: ParamSet, seed: int = 0) -> list[dict]:
    """Re-derive the operator algebra exactly on every level up to n_max.

    Checks, on all delta functions and a couple of random rational
    functions per level:

      * R.L and L.R equal D minus their explicit scalars,
      * the commutator of those two products is the explicit multiple of
        the identity,
      * L is minus the adjoint of R,
      * L moved across a chain of R's leaves a lower chain plus a scalar
        multiple of the shorter chain,
      * a full chain of L's collapsing a chain of R's on a kernel vector
        reproduces the closed-form scalar,
      * chains started from kernels of different levels stay orthogonal,
        chains from the same level scale norms by the closed-form factor,
        and every chain is injective.

    Returns one report dict per identity; "status" is "pass" or "fail"
    and a failing report carries a counterexample locator.
    """
    ctx = p.ctx
    q = ctx.q
    A_h = p.prefix_product(h)
    rng = random.Random(seed)
    reports = []

    def run(name: str, cases) -> None:
        count = 0
        for locator, ok in cases:
            count += 1
            if not ok:
                reports.append(
                    {
                        "identity": name,
                        "h": h,
                        "cases": count,
                        "status": "fail",
                        "counterexample": locator,
                    }
                )
                return
        reports.append({"identity": name, "h": h, "cases": count, "status": "pass"})

    def rl_cases():
        for N in range(1, n_max + 1):
            scalar = (1 - ctx.q_power(-N)) * (A_h * ctx.q_power(N + h - 1) - 1)
            for k, f in enumerate(_funcs_for_level(h, N, rng)):
                lhs = apply_R(apply_L(f, p), p)
                rhs = apply_D(f, p) - f.scale(scalar)
                yield {"N": N, "f": k}, lhs == rhs

    run("raise_after_lower_equals_D_minus_scalar", rl_cases())

    def lr_cases():
        for N in range(0, n_max):
            scalar = (1 - ctx.q_power(-N - 1)) * (A_h * ctx.q_power(N + h) - 1)
            for k, f in enumerate(_funcs_for_level(h, N, rng)):
                lhs = apply_L(apply_R(f, p), p)
                rhs = apply_D(f, p) - f.scale(scalar)
                yield {"N": N, "f": k}, lhs == rhs

    run("lower_after_raise_equals_D_minus_scalar", lr_cases())

    def commutator_cases():
        for N in range(1, n_max):
            scalar = ctx.q_power(-N - 1) * (1 - q) * (A_h * ctx.q_power(2 * N + h) - 1)
            for k, f in enumerate(_funcs_for_level(h, N, rng)):
                lhs = apply_L(apply_R(f, p), p) - apply_R(apply_L(f, p), p)
                yield {"N": N, "f": k}, lhs == f.scale(scalar)

    run("commutator_is_scalar", commutator_cases())

    def adjoint_cases():
        for N in range(1, n_max + 1):
            upper = _funcs_for_level(h, N, rng)
            lower = _funcs_for_level(h, N - 1, rng)
            raised = [apply_R(f2, p) for f2 in lower]
            for k1, f1 in enumerate(upper):
                lf1 = apply_L(f1, p)
                for k2, f2 in enumerate(lower):
                    ok = inner_product(lf1, f2, p) == -inner_product(
                        f1, raised[k2], p
                    )
                    yield {"N": N, "f1": k1, "f2": k2}, ok

    run("lowering_is_minus_adjoint_of_raising", adjoint_cases())

    def chain_swap_cases():
        for n in range(0, n_max):
            for k, f in enumerate(_funcs_for_level(h, n, rng)):
                chain = [f]
                for _ in range(n_max - n):
                    chain.append(apply_R(chain[-1], p))
                lchain = []
                if n > 0:
                    lchain.append(apply_L(f, p))
                    for _ in range(n_max - n):
                        lchain.append(apply_R(lchain[-1], p))
                for N in range(n + 1, n_max + 1):
                    scalar = (
                        ctx.q_power(-N)
                        * (1 - ctx.q_power(N - n))
                        * (A_h * ctx.q_power(N + n + h - 1) - 1)
                    )
                    lhs = apply_L(chain[N - n], p)
                    rhs = chain[N - 1 - n].scale(scalar)
                    if n > 0:
                        rhs = rhs + lchain[N - n]
                    yield {"n": n, "N": N, "f": k}, lhs == rhs

    run("lowering_moves_through_raising_chain", chain_swap_cases())

    def collapse_cases():
        for n in range(0, n_max + 1):
            kernel = kernel_basis(h, n, p)
            for k, f in enumerate(kernel):
                chain = [f]
                for N in range(n + 1, n_max + 1):
                    chain.append(apply_R(chain[-1], p))
                for N in range(n, n_max + 1):
                    lowered = chain[N - n]
                    for m in range(N, n - 1, -1):
                        scalar = (
                            (-1) ** (N - m)
                            * ctx.q_power(-(N - m) * (N + m + 1) // 2)
                            * pochhammer(ctx, ctx.q_power(m - n + 1), N - m)
                            * pochhammer(ctx, A_h * ctx.q_power(n + m + h), N - m)
                        )
                        rhs = chain[m - n].scale(scalar)
                        yield {"n": n, "m": m, "N": N, "f": k}, lowered == rhs
                        if m > n:
                            lowered = apply_L(lowered, p)

    run("lowering_chain_collapses_raising_chain_on_kernel", collapse_cases())

    def chain_norm_cases():
        kernels = {n: kernel_basis(h, n, p) for n in range(n_max + 1)}
        raised = {
            n: {n: list(kernels[n])} for n in range(n_max + 1)
        }
        for n in range(n_max + 1):
            for N in range(n + 1, n_max + 1):
                raised[n][N] = [apply_R(g, p) for g in raised[n][N - 1]]
        for n in range(0, n_max + 1):
            for m in range(0, n + 1):
                for N in range(n, n_max + 1):
                    factor = (
                        ctx.q_power(-(N - n) * (N + n + 1) // 2)
                        * pochhammer(ctx, q, N - n)
                        * pochhammer(ctx, A_h * ctx.q_power(2 * n + h), N - n)
                    )
                    for k2, f2 in enumerate(kernels[n]):
                        g2 = raised[n][N][k2]
                        for k1, f1 in enumerate(kernels[m]):
                            g1 = raised[m][N][k1]
                            got = inner_product(g1, g2, p)
                            if m == n:
                                want = factor * inner_product(f1, f2, p)
                            else:
                                want = Fraction(0)
                            yield {"n": n, "m": m, "N": N, "f1": k1, "f2": k2}, got == want

    run("raising_chain_preserves_orthogonality_and_scales_norms", chain_norm_cases())

    def injectivity_cases():
        for n in range(0, n_max + 1):
            kernel = kernel_basis(h, n, p)
            for N in range(n, n_max + 1):
                raised = [raise_chain(f, p, N) for f in kernel]
                matrix = [list(g.values) for g in raised]
                ok = _linalg.rank(matrix) == len(kernel)
                yield {"n": n, "N": N}, ok

    run("raising_chain_is_injective_on_kernel", injectivity_cases())

    return reports


def spectral_decomposition_check(h: int, N: int, p: ParamSet) -> dict:
    """Decompose [h; N] into raised kernels and test the eigenvalues of D.

    Verifies that the kernel dimensions sum to the dimension of the level,
    that the raised kernels together span it, and that D acts on each
    raised kernel by q^(-n) (1 - q^n) (1 - A_h q^(n+h-1)).
    """
    dims = []
    raised_all = []
    eigen_ok = True
    failure = None
    for n in range(N + 1):
        kernel = kernel_basis(h, n, p)
        dims.append(len(kernel))
        lam = eigenvalue(p, n)
        for k, f in enumerate(kernel):
            g = raise_chain(f, p, N)
            raised_all.append(g)
            if apply_D(g, p) != g.scale(lam):
                eigen_ok = False
                if failure is None:
                    failure = {"n": n, "f": k}
    total = composition_count(h, N)
    dim_ok = sum(dims) == total
    span_ok = _linalg.rank([list(g.values) for g in raised_all]) == total
    status = "pass" if (dim_ok and span_ok and eigen_ok) else "fail"
    return {
        "h": h,
        "N": N,
        "kernel_dims": dims,
        "dimension_total": total,
        "dimensions_sum": dim_ok,
        "raised_kernels_span": span_ok,
        "eigenvalues_match": eigen_ok,
        "status": status,
        "counterexample": failure,
    }
