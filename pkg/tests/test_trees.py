"""Planar binary trees, labelings, and right-to-left transplantations."""

from fractions import Fraction
from math import comb

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qtreehahn import (
    NonConsecutiveLeaves,
    NotRightReachable,
    ParseError,
    PlanarTree,
    RightChildIsLeaf,
    all_trees,
    canonical_path_to_left_comb,
    coefficient_sums,
    enumerate_labelings,
    find_rl_path,
    left_comb,
    parse_tree,
    right_comb,
    rl_neighbors,
    transplant_right_to_left,
)
from qtreehahn.trees import attributes

from conftest import make_params

CATALAN = {2: 1, 3: 2, 4: 5, 5: 14, 6: 42}


def test_parse_serialize_round_trip():
    for h in range(2, 6):
        for tree in all_trees(h):
            assert parse_tree(tree.serialize()) == tree
    assert parse_tree("( 1   ( 2 3 ) )") == parse_tree("(1 (2 3))")
    assert parse_tree("(1 2)").shape == (1, 2)
    assert str(parse_tree("((1 2) 3)")) == "((1 2) 3)"


def test_parse_errors():
    for text in ["(1 2", "1 2)", "()", "((1 2)", "(1 2) 3", "(1 (2 3)))", "(1 x)"]:
        with pytest.raises(ParseError):
            parse_tree(text)
    for text in ["(2 1)", "(1 3)", "((1 3) 2)"]:
        with pytest.raises(NonConsecutiveLeaves):
            parse_tree(text)
    # NonConsecutiveLeaves is a ParseError.
    assert issubclass(NonConsecutiveLeaves, ParseError)


def test_catalan_counts():
    for h, count in CATALAN.items():
        trees = all_trees(h)
        assert len(trees) == count
        assert len(set(trees)) == count
        assert all(t.h == h and t.n_internal == h - 1 for t in trees)
    with pytest.raises(ValueError):
        all_trees(1)


def test_combs():
    assert right_comb(4).serialize() == "(1 (2 (3 4)))"
    assert left_comb(4).serialize() == "(((1 2) 3) 4)"
    assert right_comb(2) == left_comb(2) == parse_tree("(1 2)")
    with pytest.raises(ValueError):
        right_comb(1)
    with pytest.raises(ValueError):
        left_comb(0)


def test_vertices_preorder_spans():
    tree = parse_tree("((1 2) (3 4))")
    v0, v1, v2 = tree.vertices
    assert (v0.lo, v0.hi, v0.split, v0.level) == (0, 4, 2, 0)
    assert (v1.lo, v1.hi, v1.split, v1.level) == (0, 2, 1, 1)
    assert (v2.lo, v2.hi, v2.split, v2.level) == (2, 4, 3, 1)
    assert v0.parent is None and v1.parent == 0 and v2.parent == 0
    assert (v0.left, v0.right) == (1, 2)
    assert (v1.left_leaf, v1.right_leaf) == (1, 2)
    assert (v2.left_leaf, v2.right_leaf) == (3, 4)
    assert tree.subtree_shape(2) == (3, 4)


def test_labelings_and_coefficient_sums():
    tree = parse_tree("((1 2) (3 4))")
    for n in range(5):
        labs = enumerate_labelings(tree, n)
        assert len(labs) == comb(n + 2, 2)
        assert labs == sorted(labs)
    assert coefficient_sums(tree, (1, 2, 3)) == [6, 2, 3]
    with pytest.raises(ValueError):
        coefficient_sums(tree, (1, 2))


def test_attributes_hand_example():
    tree = parse_tree("((1 2) 3)")
    p = make_params(3)
    a1, a2, a3 = p.alphas
    q = p.ctx.q
    x = (2, 0, 1)
    lab = (1, 2)
    attrs = attributes(tree, params=p, x=x, labeling=lab)
    root, inner = attrs
    assert root.p == a1 * a2 * a3 * q**3
    assert root.lp == a1 * a2 * q**2
    assert root.rp == a3 * q
    assert (root.v, root.lv, root.rv) == (3, 2, 1)
    assert (root.c, root.lcs, root.rcs, root.cs) == (1, 2, 0, 3)
    assert inner.p == a1 * a2 * q**2
    assert (inner.lv, inner.rv) == (2, 0)
    assert (inner.c, inner.lcs, inner.rcs, inner.cs) == (2, 0, 0, 2)
    # Partial calls leave the unrequested fields as None.
    bare = attributes(tree)[0]
    assert bare.p is None and bare.v is None and bare.cs is None
    with pytest.raises(ValueError):
        attributes(tree, x=(1, 0))


def test_transplant_shapes():
    t, rec = transplant_right_to_left(parse_tree("(1 (2 3))"), 0)
    assert t.serialize() == "((1 2) 3)"
    assert (rec.base, rec.s_local, rec.r_local, rec.h_local) == (0, 1, 2, 3)
    assert (rec.block_left, rec.block_mid, rec.block_right) == (0, 0, 0)

    rc4 = right_comb(4)
    t0, rec0 = transplant_right_to_left(rc4, 0)
    assert t0.serialize() == "((1 2) (3 4))"
    assert (rec0.base, rec0.s_local, rec0.r_local, rec0.h_local) == (0, 1, 2, 4)
    assert (rec0.block_left, rec0.block_mid, rec0.block_right) == (0, 0, 1)

    t1, rec1 = transplant_right_to_left(rc4, 1)
    assert t1.serialize() == "(1 ((2 3) 4))"
    assert (rec1.base, rec1.s_local, rec1.r_local, rec1.h_local) == (1, 1, 2, 3)
    assert rec1.to_json_obj() == {
        "vertex": 1,
        "spans": {"s": 1, "r": 2, "h": 3},
        "base": 1,
    }


def test_transplant_errors():
    with pytest.raises(RightChildIsLeaf):
        transplant_right_to_left(left_comb(3), 0)
    with pytest.raises(IndexError):
        transplant_right_to_left(right_comb(3), 5)


def test_rl_neighbors():
    assert rl_neighbors(left_comb(5)) == []
    neigh = rl_neighbors(right_comb(4))
    assert [t.serialize() for t, _ in neigh] == [
        "((1 2) (3 4))",
        "(1 ((2 3) 4))",
    ]
    # Moves preserve the leaf count and vertex count.
    for t, rec in neigh:
        assert t.h == 4 and t.n_internal == 3
        assert rec.source == right_comb(4) and rec.target == t


def test_find_rl_path_basics():
    rc, lc = right_comb(4), left_comb(4)
    assert find_rl_path(rc, rc) == []
    path = find_rl_path(rc, lc)
    assert len(path) == 2
    with pytest.raises(NotRightReachable):
        find_rl_path(lc, rc)
    with pytest.raises(NotRightReachable):
        find_rl_path(right_comb(3), right_comb(4))


def test_shortest_path_lengths_combs():
    for h in range(3, 7):
        assert len(find_rl_path(right_comb(h), left_comb(h))) == h - 2


def test_paths_replay_to_target():
    for h in (3, 4, 5):
        lc = left_comb(h)
        for tree in all_trees(h):
            for path in (find_rl_path(tree, lc), canonical_path_to_left_comb(tree)):
                cur = tree
                for rec in path:
                    assert rec.source == cur
                    cur, rec2 = transplant_right_to_left(cur, rec.vertex)
                    assert rec2 == rec
                assert cur == lc


def test_canonical_path_terminates_only_at_left_comb():
    assert canonical_path_to_left_comb(left_comb(6)) == []
    path = canonical_path_to_left_comb(right_comb(6))
    assert path and path[-1].target == left_comb(6)


@settings(max_examples=30)
@given(st.sampled_from(all_trees(5)), st.data())
def test_move_block_bookkeeping(tree, data):
    movable = [v.index for v in tree.vertices if v.right is not None]
    if not movable:
        return
    u = data.draw(st.sampled_from(movable))
    target, rec = transplant_right_to_left(tree, u)
    # The three blocks plus the two rearranged vertices account for the
    # whole moved subtree.
    sub_internal = rec.h_local - 1
    assert rec.block_left + rec.block_mid + rec.block_right + 2 == sub_internal
    assert 1 <= rec.s_local < rec.r_local < rec.h_local
    assert 0 <= rec.base <= tree.h - rec.h_local
    assert target != tree
    assert target.h == tree.h
