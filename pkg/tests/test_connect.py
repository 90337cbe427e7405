"""Connection coefficients: one-move expansions, paths, oracles, bridges."""

from fractions import Fraction

import pytest

from qtreehahn import (
    ConnectionMatrix,
    GridFunction,
    MoveCoefficientSpec,
    NotInKernel,
    NotRightReachable,
    all_trees,
    apply_L,
    comb_connection_product,
    connection_by_path,
    connection_oracle,
    dunkl_expansion_coeffs,
    enumerate_labelings,
    find_rl_path,
    gr_conversion_factor,
    gr_correspondence_check,
    gr_substitution,
    gr_weight_factor,
    kernel_basis,
    kernel_interpolation_basis,
    left_comb,
    one_move_coefficients,
    parse_tree,
    pochhammer,
    q_factorial,
    racah_eval,
    right_comb,
    theta_labeling_to_preorder,
    theta_polynomial,
    three_dim_racah_example_check,
    transplant_right_to_left,
    xi_polynomial,
)

from conftest import make_params

P3 = make_params(3)
CTX = P3.ctx


# --- single moves --------------------------------------------------------


def test_one_move_three_leaves_is_single_racah_row():
    a1, a2, a3 = P3.alphas
    rc = right_comb(3)
    _, move = transplant_right_to_left(rc, 0)
    for n in range(4):
        for cvec in enumerate_labelings(rc, n):
            c0, c1 = cvec
            expansion = dict(one_move_coefficients(move, cvec, P3))
            for u in range(n + 1):
                want = racah_eval(
                    CTX, u, c1, a2, a1, a2 * a3 * CTX.q_power(n + 1), n
                )
                assert expansion.get((n - u, u), Fraction(0)) == want


def test_one_move_spec_fields():
    rc = right_comb(4)
    _, move = transplant_right_to_left(rc, 0)
    p4 = make_params(4)
    spec = MoveCoefficientSpec.from_labeling(move, (1, 2, 3), p4)
    # blocks at the root of (1 (2 (3 4))): T' = leaf, T'' = leaf, T''' = (3 4)
    assert (spec.i, spec.l, spec.j) == (0, 0, 3)
    assert spec.n_U == 6
    assert spec.v == 5
    q = CTX.q
    assert spec.p1 == p4.alphas[0] * q
    assert spec.p2 == p4.alphas[1] * q
    assert spec.p3 == p4.alphas[2] * p4.alphas[3] * q * q
    with pytest.raises(ValueError):
        MoveCoefficientSpec.from_labeling(move, (1, 2), p4)


def test_one_move_degree_zero_is_trivial():
    p4 = make_params(4)
    for tree in all_trees(4):
        for vert in tree.vertices:
            if vert.right is None:
                continue
            _, move = transplant_right_to_left(tree, vert.index)
            zeros = (0,) * tree.n_internal
            assert one_move_coefficients(move, zeros, p4) == [(zeros, Fraction(1))]


def test_one_move_preserves_degree_and_blocks():
    p4 = make_params(4)
    tree = right_comb(4)
    _, move = transplant_right_to_left(tree, 1)
    for cvec in enumerate_labelings(tree, 3):
        for dvec, value in one_move_coefficients(move, cvec, p4):
            assert sum(dvec) == 3
            assert value != 0
            assert dvec[0] == cvec[0]  # label above the moved vertex is kept


# --- paths against the oracle -------------------------------------------


def test_path_equals_oracle_three_leaves():
    rc, lc = right_comb(3), left_comb(3)
    for n in range(5):
        got = connection_by_path(rc, lc, n, P3)
        want = connection_oracle(rc, lc, n, P3)
        assert got.rows == want.rows
        assert got.path is not None and want.path is None
        assert got.orthogonality_check()
        assert got.defining_relation_check()
        assert got.defining_relation_check(N=n + 2)


def test_path_equals_oracle_four_leaves_spot():
    p4 = make_params(4)
    rc, lc = right_comb(4), left_comb(4)
    mid = parse_tree("((1 2) (3 4))")
    for src, tgt in [(rc, lc), (rc, mid), (mid, lc)]:
        for n in range(3):
            got = connection_by_path(src, tgt, n, p4)
            assert got.rows == connection_oracle(src, tgt, n, p4).rows


def test_connection_is_path_independent():
    # Right comb to left comb on four leaves: the shortest path has two
    # moves, and a distinct three-move detour gives the same matrix.
    p4 = make_params(4)
    rc, lc = right_comb(4), left_comb(4)
    short = find_rl_path(rc, lc)
    assert len(short) == 2

    t1, m1 = transplant_right_to_left(rc, 1)  # (1 ((2 3) 4))
    t2, m2 = transplant_right_to_left(t1, 0)  # ((1 (2 3)) 4)
    t3, m3 = transplant_right_to_left(t2, 1)  # (((1 2) 3) 4)
    assert t3 == lc
    long_path = [m1, m2, m3]

    for n in range(4):
        a = connection_by_path(rc, lc, n, p4, path=short)
        b = connection_by_path(rc, lc, n, p4, path=long_path)
        assert a.rows == b.rows


def test_connection_composition():
    p4 = make_params(4)
    rc, lc = right_comb(4), left_comb(4)
    mid = parse_tree("((1 2) (3 4))")
    for n in range(3):
        ab = connection_by_path(rc, mid, n, p4)
        bc = connection_by_path(mid, lc, n, p4)
        ac = connection_by_path(rc, lc, n, p4)
        assert ab.compose(bc).rows == ac.rows
    with pytest.raises(ValueError):
        connection_by_path(rc, mid, 1, p4).compose(
            connection_by_path(rc, mid, 1, p4)
        )


def test_connection_invert_matches_reverse_oracle():
    rc, lc = right_comb(3), left_comb(3)
    for n in range(4):
        inv = connection_by_path(rc, lc, n, P3).invert()
        assert inv.source == lc and inv.target == rc
        assert inv.path is None
        assert inv.rows == connection_oracle(lc, rc, n, P3).rows
    with pytest.raises(NotRightReachable):
        connection_by_path(lc, rc, 2, P3)


def test_identity_matrix_for_equal_trees():
    rc = right_comb(3)
    conn = connection_by_path(rc, rc, 2, P3)
    assert conn.path == ()
    assert conn.is_identity()
    assert connection_oracle(rc, rc, 2, P3).is_identity()
    assert not connection_by_path(rc, left_comb(3), 2, P3).is_identity()


def test_connection_value_and_json():
    rc, lc = right_comb(3), left_comb(3)
    conn = connection_by_path(rc, lc, 1, P3)
    assert conn.value((1, 0), (0, 1)) == conn.rows[(1, 0)][(0, 1)]
    obj = conn.to_json_obj()
    assert obj["source"] == "(1 (2 3))"
    assert obj["target"] == "((1 2) 3)"
    assert obj["n"] == 1
    assert [m["vertex"] for m in obj["path"]] == [0]
    assert all(set(e) == {"c", "d", "value"} for e in obj["matrix"])
    dense = conn.to_dense()
    assert len(dense) == len(conn.source_labelings())
    assert len(dense[0]) == len(conn.target_labelings())


def test_path_validation():
    rc, lc = right_comb(4), left_comb(4)
    _, m1 = transplant_right_to_left(rc, 1)
    with pytest.raises(ValueError):
        connection_by_path(rc, lc, 1, make_params(4), path=[m1])
    bad_order = list(reversed(find_rl_path(rc, lc)))
    with pytest.raises(ValueError):
        connection_by_path(rc, lc, 1, make_params(4), path=bad_order)


# --- edge-value expansion and interpolation kernel ----------------------


def test_dunkl_coeffs_for_theta_are_deltas():
    for n in range(4):
        for i in range(n + 1):
            grid = GridFunction.from_callable(
                3, n, lambda x: theta_polynomial(P3, (i, n - i), x)
            )
            coeffs = dunkl_expansion_coeffs(grid, P3)
            assert coeffs == [
                Fraction(1) if t == i else Fraction(0) for t in range(n + 1)
            ]


def test_dunkl_coeffs_constant():
    assert dunkl_expansion_coeffs(GridFunction.constant(3, 0, 1), P3) == [
        Fraction(1)
    ]


def test_dunkl_rejects_non_kernel():
    bad = GridFunction.delta(3, 2, (1, 1, 0))
    with pytest.raises(NotInKernel):
        dunkl_expansion_coeffs(bad, P3)
    with pytest.raises(ValueError):
        dunkl_expansion_coeffs(GridFunction.zero(4, 1), make_params(4))


def test_edge_values_closed_form():
    # Values of the right-comb kernel functions on the edge x2 = 0 have a
    # closed product form; the expansion coefficients above only consume
    # these values.
    a1, a2, a3 = P3.alphas
    for n in range(5):
        for j in range(n + 1):
            for k in range(n + 1):
                got = xi_polynomial(P3, (n - j, j), (k, 0, n - k))
                want = (
                    (-a1) ** k
                    * CTX.q_half_power(k * (k + 1) - n * n)
                    * q_factorial(CTX, n - j)
                    * pochhammer(CTX, a2 * a3 * CTX.q_power(n + j - k + 2), k)
                    * pochhammer(CTX, CTX.q_power(n - j - k + 1), j)
                    / pochhammer(CTX, a1 * CTX.q, k)
                )
                assert got == want


def test_kernel_interpolation_basis():
    for N in range(5):
        fs = [kernel_interpolation_basis(P3, N, k) for k in range(N + 1)]
        for k, f in enumerate(fs):
            # Edge deltas and kernel membership are re-verified here on
            # top of the constructor's own checks.
            for m in range(N + 1):
                assert f.at((m, 0, N - m)) == (1 if m == k else 0)
            if N >= 1:
                assert apply_L(f, P3).is_zero()
            # Support: x1 <= k <= x1 + x2, and nowhere else.
            for x in f.domain():
                inside = x[0] <= k <= x[0] + x[1]
                assert (f.at(x) != 0) == inside
        # Any kernel function is the edge-value combination of these.
        for g in kernel_basis(3, N, P3):
            combo = GridFunction.zero(3, N)
            for k, f in enumerate(fs):
                combo = combo + f.scale(g.at((k, 0, N - k)))
            assert combo == g
    with pytest.raises(ValueError):
        kernel_interpolation_basis(P3, 2, 3)
    with pytest.raises(ValueError):
        kernel_interpolation_basis(make_params(4), 2, 1)


# --- comb-to-comb closed form and the classical bridge ------------------


def test_comb_product_matches_connection_matrix():
    for h, n_top in ((3, 3), (4, 2)):
        p = make_params(h)
        rc, lc = right_comb(h), left_comb(h)
        for n in range(n_top + 1):
            conn = connection_by_path(rc, lc, n, p)
            for m in enumerate_labelings(rc, n):
                for nv in enumerate_labelings(lc, n):
                    # nv here is bottom-up (n_2, ..., n_h).
                    dvec = theta_labeling_to_preorder(h, nv)
                    assert comb_connection_product(p, n, nv, m) == conn.value(
                        m, dvec
                    )


def test_comb_product_validation():
    with pytest.raises(ValueError):
        comb_connection_product(P3, 2, (1, 1), (1, 0, 0))
    with pytest.raises(ValueError):
        comb_connection_product(P3, 2, (1, 0), (1, 1))


def test_gr_substitution_shape():
    p4 = make_params(4)
    sub = gr_substitution(p4, 2)
    assert sub["s"] == 2
    assert sub["b"] == p4.alphas[0]
    assert sub["N"] == 2
    assert len(sub["a"]) == 3
    a2, a3 = p4.alphas[1], p4.alphas[2]
    assert sub["a"][1] == a2 * CTX.q and sub["a"][2] == a3 * CTX.q
    span = p4.alphas[1] * p4.alphas[2] * p4.alphas[3]
    assert sub["a"][0] == CTX.q_power(-2 * 2 - 4 + 2) / span


def test_gr_trivial_values():
    p4 = make_params(4)
    assert gr_weight_factor(p4, 0) == 1
    assert gr_conversion_factor(p4, 0, (0, 0, 0)) == 1
    assert gr_conversion_factor(p4, 0, (0, 0, 0), squared=False) == 1
    with pytest.raises(ValueError):
        gr_conversion_factor(p4, 1, (0, 0))


def test_gr_correspondence_reports():
    for h in (3, 4):
        p = make_params(h)
        for n in range(3):
            rep = gr_correspondence_check(p, n)
            assert rep["status"] == "pass", rep
            assert rep["product_identity"]
            assert rep["signed_identity"]
            assert rep["weight_orthogonality"]
            assert rep["pairs_checked"] > 0
            assert rep["counterexample"] is None


def test_five_leaf_example_reports():
    p5 = make_params(5)
    for n in range(2):
        rep = three_dim_racah_example_check(p5, n)
        assert rep["status"] == "pass", rep
        assert rep["final_tree"] == "(((1 2) (3 4)) 5)"
