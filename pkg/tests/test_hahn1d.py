"""One-variable q-Hahn and q-Racah families: routes, norms, bridges."""

from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qtreehahn import (
    GridFunction,
    Hahn1DSpec,
    NonSquareRadicand,
    QContext,
    Racah1DSpec,
    gr_hahn_bridge,
    gr_racah_bridge,
    hahn_eval,
    hahn_norm,
    hahn_seed,
    hahn_via_phi2,
    hahn_via_raising,
    inner_product,
    racah,
    racah_eval,
    vandermonde_sum_check,
    verify_hahn_recurrences,
)
from qtreehahn._linalg import solve

from conftest import make_ctx, make_params

CTX = make_ctx()

unit_fractions = st.tuples(
    st.integers(min_value=1, max_value=9), st.integers(min_value=1, max_value=9)
).map(lambda t: Fraction(t[0], t[0] + t[1]))


def spec(n, N, which="primary", ctx=CTX):
    p = make_params(2, which)
    return Hahn1DSpec(ctx=ctx, n=n, alpha=p.alphas[0], beta=p.alphas[1], N=N)


def test_spec_validation():
    with pytest.raises(ValueError):
        spec(3, 2)
    with pytest.raises(ValueError):
        spec(-1, 2)
    with pytest.raises(ValueError):
        Racah1DSpec(
            ctx=CTX, n=4, alpha=Fraction(1, 2), beta=Fraction(1, 3),
            delta=Fraction(1, 5), N=3,
        )
    with pytest.raises(ValueError):
        hahn_via_phi2(spec(1, 2), 3)
    with pytest.raises(ValueError):
        hahn_via_phi2(spec(1, 2), -1)


def test_seed_lives_at_its_own_level():
    s = spec(2, 2)
    for x in range(3):
        assert hahn_seed(s, x) == hahn_via_phi2(s, x)
    with pytest.raises(ValueError):
        hahn_seed(spec(1, 2), 0)


def test_two_routes_agree():
    for which in ("primary", "secondary"):
        for N in range(5):
            for n in range(N + 1):
                s = spec(n, N, which)
                for x in range(N + 1):
                    assert hahn_via_phi2(s, x) == hahn_via_raising(s, x)
                    assert hahn_eval(CTX, n, x, s.alpha, s.beta, N) == hahn_via_phi2(
                        s, x
                    )


@settings(max_examples=40)
@given(
    unit_fractions,
    unit_fractions,
    st.integers(0, 4),
    st.integers(0, 4),
    st.sampled_from([Fraction(1, 2), Fraction(2, 3), Fraction(1, 5)]),
)
def test_two_routes_agree_generic(alpha, beta, n, N, s_val):
    if n > N:
        n, N = N, n
    ctx = QContext(s=s_val)
    sp = Hahn1DSpec(ctx=ctx, n=n, alpha=alpha, beta=beta, N=N)
    for x in range(N + 1):
        assert hahn_via_phi2(sp, x) == hahn_via_raising(sp, x)


def test_constant_and_top_degree():
    # Degree 0 at any level is the constant 1.
    for N in range(4):
        s0 = spec(0, N)
        assert all(hahn_via_phi2(s0, x) == 1 for x in range(N + 1))


def test_polynomial_degree_in_shifted_variable():
    # On z = q^(-x) the degree-n member is a polynomial of exact degree n:
    # fit an interpolating polynomial through all N+1 points and look at the
    # coefficients above n.
    N = 5
    zs = [CTX.q_power(-x) for x in range(N + 1)]
    vdm = [[z**k for k in range(N + 1)] for z in zs]
    for n in range(N + 1):
        s = spec(n, N)
        coeffs = solve(vdm, [hahn_via_phi2(s, x) for x in range(N + 1)])
        assert all(c == 0 for c in coeffs[n + 1 :])
        assert coeffs[n] != 0


def test_norm_against_brute_gram():
    for which in ("primary", "secondary"):
        p = make_params(2, which)
        a, b = p.alphas
        for N in range(5):
            grids = [
                GridFunction.from_callable(
                    2, N, lambda x, n=n: hahn_eval(CTX, n, x[0], a, b, N)
                )
                for n in range(N + 1)
            ]
            for i, gi in enumerate(grids):
                for j, gj in enumerate(grids):
                    got = inner_product(gi, gj, p)
                    if i == j:
                        assert got == hahn_norm(spec(i, N, which))
                    else:
                        assert got == 0


def test_endpoint_values():
    ctx = CTX
    n, N = 2, 5
    s = spec(n, N)
    from qtreehahn import pochhammer

    head = ctx.q_half_power(-n * (2 * N - n)) * pochhammer(
        ctx, ctx.q_power(N - n + 1), n
    )
    assert hahn_via_phi2(s, 0) == head
    tail = (
        head
        * (s.alpha * s.beta * ctx.q_power(n + 1)) ** n
        * pochhammer(ctx, ctx.q_power(-n) / s.beta, n)
        / pochhammer(ctx, s.alpha * ctx.q, n)
    )
    assert hahn_via_phi2(s, N) == tail


def test_recurrence_reports():
    p = make_params(2)
    reports = verify_hahn_recurrences(CTX, p.alphas[0], p.alphas[1], 4)
    assert [r["identity"] for r in reports] == [
        "raising_shifts_level",
        "lowering_shifts_level",
        "diagonal_operator_eigenvalue",
    ]
    for r in reports:
        assert r["status"] == "pass"
        assert r["counterexample"] is None


def test_vandermonde_domain():
    with pytest.raises(ValueError):
        vandermonde_sum_check(CTX, 2, 3, Fraction(1, 2), Fraction(1, 3))
    assert vandermonde_sum_check(CTX, 3, 2, Fraction(1, 2), Fraction(1, 3))


def racah_spec(n, N, delta=Fraction(2, 7)):
    p = make_params(2)
    return Racah1DSpec(
        ctx=CTX, n=n, alpha=p.alphas[0], beta=p.alphas[1], delta=delta, N=N
    )


def test_racah_degree_zero_is_one():
    for N in range(4):
        s = racah_spec(0, N)
        assert all(racah(s, x) == 1 for x in range(N + 1))


def test_racah_eval_memoized_consistency():
    s = racah_spec(2, 4)
    for x in range(5):
        assert racah_eval(CTX, 2, x, s.alpha, s.beta, s.delta, 4) == racah(s, x)


def test_racah_degenerates_to_hahn_at_delta_zero():
    # At delta = 0 the 4phi3 collapses to the 3phi2 of the q-Hahn family up
    # to the same prefactor structure; compare against the explicit ratio.
    n, N = 2, 4
    s = racah_spec(n, N, delta=Fraction(0))
    from qtreehahn import pochhammer, q_factorial

    pre = (
        CTX.q_power(-n * (N - n))
        * pochhammer(CTX, CTX.q_power(N - n + 1), n)
        / (
            pochhammer(CTX, s.alpha * s.beta * CTX.q_power(n + 1), n)
            * q_factorial(CTX, n)
        )
    )
    hahn_pre = (
        CTX.q_half_power(n * n - 2 * n * N) * q_factorial(CTX, N) / q_factorial(CTX, N - n)
    )
    for x in range(N + 1):
        hahn_val = hahn_eval(CTX, n, x, s.alpha, s.beta, N)
        assert racah(s, x) * hahn_pre == hahn_val * pre


def test_gr_racah_bridge_squared_mode():
    # Degree zero: the bridge is exactly 1.
    s0 = racah_spec(0, 3)
    assert all(gr_racah_bridge(s0, x) == 1 for x in range(4))
    # Squared mode is always rational and equals the square of the
    # unsquared value whenever the radicand is a perfect square.
    n, N = 3, 4
    delta = CTX.q_power(N - n - 1) * Fraction(9, 4)  # radicand (3/2)^2
    s = racah_spec(n, N, delta=delta)
    for x in range(N + 1):
        u = gr_racah_bridge(s, x, squared=False)
        assert gr_racah_bridge(s, x, squared=True) == u * u


def test_gr_racah_bridge_non_square_radicand():
    n, N = 1, 3
    delta = CTX.q_power(N - n - 1) * 2  # radicand 2: not a rational square
    s = racah_spec(n, N, delta=delta)
    with pytest.raises(NonSquareRadicand):
        gr_racah_bridge(s, 1, squared=False)
    # Squared mode never needs the root.
    assert isinstance(gr_racah_bridge(s, 1, squared=True), Fraction)


def test_gr_hahn_bridge_degree_zero():
    for N in range(4):
        s = spec(0, N)
        assert all(gr_hahn_bridge(s, x) == (-1) ** N for x in range(N + 1))
