"""Multidimensional q-Hahn bases indexed by labeled planar binary trees.

Every internal vertex of a labeled tree contributes one one-dimensional
q-Hahn factor whose parameters are the products attached to its children
and whose lattice data come from the variables under it:

    value(x) = prod over vertices U of
        q^(-rcs(U) lv(U)) *
        Q_{c(U)}(lv(U) - lcs(U);
                 lp(U) q^(2 lcs(U) - 1),
                 rp(U) q^(2 rcs(U) - 1),
                 v(U) - lcs(U) - rcs(U))

and vanishes unless v(U) >= cs(U) at every vertex.  For each tree the
labelings of total degree n give an orthogonal basis of the level-N
lattice functions; the squared norms factor over vertices.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

from .hahn1d import hahn_eval
from .lattice import GridFunction, ParamSet, composition_count
from .qnum import pochhammer, pochhammer_many, q_factorial
from .qops import apply_D, apply_D_at_vertex, eigenvalue, raise_chain
from .trees import PlanarTree, attributes, coefficient_sums, enumerate_labelings

__all__ = [
    "TreeBasisElement",
    "eval_Q",
    "gamma_vertex",
    "norm_Q",
    "basis",
    "raise_basis_element",
    "verify_eigen",
    "vertex_eigenvalue",
    "xi_polynomial",
    "xi_norm",
    "theta_polynomial",
    "theta_labeling_to_preorder",
    "norm_exponent",
]


def norm_exponent(N: int, n: int) -> int:
    """The (always even) exponent 2e with q^e = q^(((N-2n)^2 + N + 2n - 2n^2)/2)."""
    return (N - 2 * n) ** 2 + N + 2 * n - 2 * n * n


def eval_Q(
    tree: PlanarTree,
    labeling: Sequence[int],
    params: ParamSet,
    x: Sequence[int],
) -> Fraction:
    """Value at a lattice point of the basis function for (tree, labeling)."""
    labeling = tuple(labeling)
    x = tuple(x)
    if len(x) != tree.h:
        raise ValueError(f"point has {len(x)} parts, tree has {tree.h} leaves")
    if len(labeling) != tree.n_internal:
        raise ValueError(
            f"labeling has {len(labeling)} entries, tree has {tree.n_internal} vertices"
        )
    if any(c < 0 for c in labeling):
        raise ValueError(f"labeling must be nonnegative, got {labeling}")
    ctx = params.ctx
    cs = coefficient_sums(tree, labeling)

    # support: every subtree must carry at least its coefficient sum
    for vert in tree.vertices:
        if sum(x[vert.lo : vert.hi]) < cs[vert.index]:
            return Fraction(0)

    value = Fraction(1)
    for vert in tree.vertices:
        lcs = cs[vert.left] if vert.left is not None else 0
        rcs = cs[vert.right] if vert.right is not None else 0
        lv = sum(x[vert.lo : vert.split])
        v = lv + sum(x[vert.split : vert.hi])
        lp = params.span_product(vert.lo, vert.split) * ctx.q_power(vert.split - vert.lo)
        rp = params.span_product(vert.split, vert.hi) * ctx.q_power(vert.hi - vert.split)
        value *= ctx.q_power(-rcs * lv) * hahn_eval(
            ctx,
            labeling[vert.index],
            lv - lcs,
            lp * ctx.q_power(2 * lcs - 1),
            rp * ctx.q_power(2 * rcs - 1),
            v - lcs - rcs,
        )
        if value == 0:
            return value
    return value


def vertex_eigenvalue(tree: PlanarTree, labeling: Sequence[int], params: ParamSet, u: int) -> Fraction:
    """Eigenvalue q^(-cs) (1 - q^cs) (1 - p(U) q^(cs-1)) of the vertex operator."""
    ctx = params.ctx
    vert = tree.vertices[u]
    cs = coefficient_sums(tree, labeling)[u]
    p_u = params.span_product(vert.lo, vert.hi) * ctx.q_power(vert.hi - vert.lo)
    return ctx.q_power(-cs) * (1 - ctx.q_power(cs)) * (1 - p_u * ctx.q_power(cs - 1))


def gamma_vertex(
    tree: PlanarTree, labeling: Sequence[int], params: ParamSet, u: int
) -> Fraction:
    """Per-vertex factor of the squared norm:

        (q, p q^(cs+lcs+rcs-1), rp q^(2 rcs); q)_c / (lp q^(2 lcs); q)_c
        * (lp q^(2 lcs))^(c + rcs) * q^(-2 lcs rcs - c)

    (equal to 1 at a leaf, which carries no vertex).
    """
    ctx = params.ctx
    vert = tree.vertices[u]
    cs_all = coefficient_sums(tree, labeling)
    c = tuple(labeling)[u]
    lcs = cs_all[vert.left] if vert.left is not None else 0
    rcs = cs_all[vert.right] if vert.right is not None else 0
    cs = cs_all[u]
    p_u = params.span_product(vert.lo, vert.hi) * ctx.q_power(vert.hi - vert.lo)
    lp = params.span_product(vert.lo, vert.split) * ctx.q_power(vert.split - vert.lo)
    rp = params.span_product(vert.split, vert.hi) * ctx.q_power(vert.hi - vert.split)
    lp_shift = lp * ctx.q_power(2 * lcs)
    numerator = pochhammer_many(
        ctx,
        (ctx.q, p_u * ctx.q_power(cs + lcs + rcs - 1), rp * ctx.q_power(2 * rcs)),
        c,
    )
    denominator = pochhammer(ctx, lp_shift, c)
    return (
        numerator
        / denominator
        * lp_shift ** (c + rcs)
        * ctx.q_power(-2 * lcs * rcs - c)
    )


def norm_Q(
    tree: PlanarTree, labeling: Sequence[int], params: ParamSet, N: int
) -> Fraction:
    """Closed-form squared norm of the basis function at level N:

        (A_h q^(h+2n); q)_{N-n} / (q; q)_{N-n}
        * q^(((N-2n)^2 + N + 2n - 2n^2)/2)
        * prod over vertices of gamma_vertex.
    """
    ctx = params.ctx
    h = tree.h
    n = sum(labeling)
    if n > N:
        raise ValueError(f"degree {n} exceeds level {N}")
    out = (
        pochhammer(ctx, params.prefix_product(h) * ctx.q_power(h + 2 * n), N - n)
        / q_factorial(ctx, N - n)
        * ctx.q_power(norm_exponent(N, n) // 2)
    )
    for u in range(tree.n_internal):
        out *= gamma_vertex(tree, labeling, params, u)
    return out


@dataclass(frozen=True)
class TreeBasisElement:
    """A labeled tree at a level, together with its materialized grid."""

    tree: PlanarTree
    labeling: tuple[int, ...]
    params: ParamSet
    N: int
    grid: GridFunction

    @property
    def n(self) -> int:
        return sum(self.labeling)

    def norm_squared(self) -> Fraction:
        return norm_Q(self.tree, self.labeling, self.params, self.N)


@lru_cache(maxsize=None)
def basis(
    tree: PlanarTree, params: ParamSet, n: int, N: int
) -> tuple[TreeBasisElement, ...]:
    """All degree-n basis elements of the tree, materialized on [h; N].

    Labelings are enumerated lexicographically over the pre-order vertex
    list; the result is cached, so treat it as read-only.
    """
    if not (0 <= n <= N):
        raise ValueError(f"need 0 <= n <= N, got n={n}, N={N}")
    out = []
    for labeling in enumerate_labelings(tree, n):
        grid = GridFunction.from_callable(
            tree.h, N, lambda x: eval_Q(tree, labeling, params, x)
        )
        out.append(TreeBasisElement(tree, labeling, params, N, grid))
    return tuple(out)


def raise_basis_element(elem: TreeBasisElement, target_N: int) -> TreeBasisElement:
    """Lift to a higher level through the raising chain.

    The chain from level n scaled by q^((N-n)(N-n+1)/2) / (q;q)_{N-n}
    reproduces the closed-form values; lifting from an intermediate level
    divides out the scale already applied.
    """
    if target_N < elem.N:
        raise ValueError(f"cannot raise from level {elem.N} down to {target_N}")
    ctx = elem.params.ctx
    n, M, N = elem.n, elem.N, target_N
    chain = raise_chain(elem.grid, elem.params, N)
    scale = (
        ctx.q_power(((N - n) * (N - n + 1) - (M - n) * (M - n + 1)) // 2)
        * q_factorial(ctx, M - n)
        / q_factorial(ctx, N - n)
    )
    return TreeBasisElement(elem.tree, elem.labeling, elem.params, N, chain.scale(scale))


def verify_eigen(
    tree: PlanarTree, labeling: Sequence[int], params: ParamSet, N: int
) -> dict:
    """Check that every vertex operator acts diagonally on the basis function.

    The operator of `qops` restricted to the span of a vertex U multiplies
    the function by q^(-cs) (1 - q^cs) (1 - p(U) q^(cs-1)); the full
    operator (the root case with cs = n) is checked explicitly as well.
    """
    labeling = tuple(labeling)
    grid = GridFunction.from_callable(
        tree.h, N, lambda x: eval_Q(tree, labeling, params, x)
    )
    failures = []
    for vert in tree.vertices:
        lam = vertex_eigenvalue(tree, labeling, params, vert.index)
        got = apply_D_at_vertex(grid, params, vert.lo, vert.hi)
        if got != grid.scale(lam):
            failures.append({"vertex": vert.index, "span": [vert.lo, vert.hi]})
    lam_global = eigenvalue(params, sum(labeling))
    if apply_D(grid, params) != grid.scale(lam_global):
        failures.append({"vertex": "global"})
    return {
        "tree": tree.serialize(),
        "labeling": list(labeling),
        "N": N,
        "status": "pass" if not failures else "fail",
        "failures": failures,
    }


# --- closed forms for the two comb trees ---------------------------------


def xi_polynomial(
    params: ParamSet, m: Sequence[int], x: Sequence[int]
) -> Fraction:
    """Right-comb basis function from its explicit product form.

    m = (m_1, ..., m_{h-1}) labels the comb top-down; with
    j_k = m_{k+1} + ... + m_{h-1} the value is

        prod_{k=1}^{h-1} q^(-j_k x_k)
            Q_{m_k}(x_k; alpha_k, (A_h / A_k) q^(h-k+2 j_k - 1),
                    X_h - X_{k-1} - j_k)

    and vanishes unless x_k + ... + x_h >= j_{k-1} for every k.
    """
    m = tuple(m)
    x = tuple(x)
    h = params.h
    if len(m) != h - 1 or len(x) != h:
        raise ValueError(f"need {h - 1} labels and {h} variables")
    ctx = params.ctx
    j = [sum(m[k:]) for k in range(h)]  # j[k] = m_{k+1} + ... + m_{h-1}; j[0] = n
    for k in range(1, h):
        if sum(x[k - 1 :]) < j[k - 1]:
            return Fraction(0)
    X = 0
    total = sum(x)
    value = Fraction(1)
    A_h = params.prefix_product(h)
    for k in range(1, h):
        beta = (
            A_h / params.prefix_product(k) * ctx.q_power(h - k + 2 * j[k] - 1)
        )
        value *= ctx.q_power(-j[k] * x[k - 1]) * hahn_eval(
            ctx, m[k - 1], x[k - 1], params.alphas[k - 1], beta, total - X - j[k]
        )
        if value == 0:
            return value
        X += x[k - 1]
    return value


def xi_norm(params: ParamSet, m: Sequence[int], N: int) -> Fraction:
    """Squared norm of the right-comb function from its explicit product form:

        (A_h q^(h+2n); q)_{N-n} / (q; q)_{N-n} * q^(((N-2n)^2+N+2n-2n^2)/2)
        * prod_{k=1}^{h-1}
            (q, (A_h/A_{k-1}) q^(h-k+j_{k-1}+j_k), (A_h/A_k) q^(h-k+2 j_k); q)_{m_k}
            / (alpha_k q; q)_{m_k} * (alpha_k q)^(j_{k-1}) * q^(-m_k).
    """
    m = tuple(m)
    h = params.h
    if len(m) != h - 1:
        raise ValueError(f"need {h - 1} labels for h = {h}")
    ctx = params.ctx
    n = sum(m)
    if n > N:
        raise ValueError(f"degree {n} exceeds level {N}")
    j = [sum(m[k:]) for k in range(h)]
    A_h = params.prefix_product(h)
    out = (
        pochhammer(ctx, A_h * ctx.q_power(h + 2 * n), N - n)
        / q_factorial(ctx, N - n)
        * ctx.q_power(norm_exponent(N, n) // 2)
    )
    for k in range(1, h):
        alpha_k = params.alphas[k - 1]
        out *= (
            pochhammer_many(
                ctx,
                (
                    ctx.q,
                    A_h / params.prefix_product(k - 1) * ctx.q_power(h - k + j[k - 1] + j[k]),
                    A_h / params.prefix_product(k) * ctx.q_power(h - k + 2 * j[k]),
                ),
                m[k - 1],
            )
            / pochhammer(ctx, alpha_k * ctx.q, m[k - 1])
            * (alpha_k * ctx.q) ** j[k - 1]
            * ctx.q_power(-m[k - 1])
        )
    return out


def theta_polynomial(
    params: ParamSet, nv: Sequence[int], x: Sequence[int]
) -> Fraction:
    """Left-comb basis function from its explicit product form.

    nv = (n_2, ..., n_h) labels the comb bottom-up (n_k at the vertex
    covering the first k leaves); with i_k = n_2 + ... + n_{k-1} the value
    is

        prod_{k=2}^{h} Q_{n_k}(X_{k-1} - i_k;
                               A_{k-1} q^(k+2 i_k - 2), alpha_k, X_k - i_k)

    and vanishes unless X_{k-1} >= i_k and X_k >= i_k + n_k for every k.
    """
    nv = tuple(nv)
    x = tuple(x)
    h = params.h
    if len(nv) != h - 1 or len(x) != h:
        raise ValueError(f"need {h - 1} labels and {h} variables")
    ctx = params.ctx
    # i[k] = n_2 + ... + n_{k-1}, stored for k = 2..h+1
    i = {2: 0}
    for k in range(2, h + 1):
        i[k + 1] = i[k] + nv[k - 2]
    X = [0]
    for v in x:
        X.append(X[-1] + v)
    value = Fraction(1)
    for k in range(2, h + 1):
        if X[k - 1] < i[k] or X[k] < i[k + 1]:
            return Fraction(0)
        value *= hahn_eval(
            ctx,
            nv[k - 2],
            X[k - 1] - i[k],
            params.prefix_product(k - 1) * ctx.q_power(k + 2 * i[k] - 2),
            params.alphas[k - 1],
            X[k] - i[k],
        )
        if value == 0:
            return value
    return value


def theta_labeling_to_preorder(tree_h: int, nv: Sequence[int]) -> tuple[int, ...]:
    """Map bottom-up comb labels (n_2..n_h) to the left comb's pre-order order."""
    nv = tuple(nv)
    if len(nv) != tree_h - 1:
        raise ValueError(f"need {tree_h - 1} labels for h = {tree_h}")
    return tuple(reversed(nv))
