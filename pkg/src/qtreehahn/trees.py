"""Planar rooted binary trees whose leaves bind variables left to right.

A tree with h leaves has h - 1 internal vertices, listed everywhere in
pre-order.  A coefficient labeling attaches a nonnegative integer to each
internal vertex; labelings with total n index the degree-n basis
functions of `multihahn`.

The only structural move is the right-to-left transplantation

    (T' (T'' T'''))  ->  ((T' T'') T''')

applied at a vertex whose right child is internal.  Iterating it from any
tree reaches the left comb; paths of such moves drive the connection
coefficients in `connect`.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence, Union

from .lattice import ParamSet, enumerate_compositions

__all__ = [
    "ParseError",
    "NonConsecutiveLeaves",
    "RightChildIsLeaf",
    "NotRightReachable",
    "Vertex",
    "PlanarTree",
    "MoveRecord",
    "VertexAttributes",
    "parse_tree",
    "right_comb",
    "left_comb",
    "all_trees",
    "enumerate_labelings",
    "coefficient_sums",
    "attributes",
    "transplant_right_to_left",
    "rl_neighbors",
    "find_rl_path",
    "canonical_path_to_left_comb",
]

Shape = Union[int, tuple]


class ParseError(ValueError):
    """Malformed tree text."""


class NonConsecutiveLeaves(ParseError):
    """Leaf labels are not 1..h in left-to-right order."""


class RightChildIsLeaf(ValueError):
    """Transplantation requested at a vertex whose right child is a leaf."""


class NotRightReachable(ValueError):
    """No path of right-to-left moves joins the two trees."""


@dataclass(frozen=True)
class Vertex:
    """One internal vertex: its leaf span (lo, hi], split point and links."""

    index: int
    lo: int
    hi: int
    split: int
    level: int
    parent: Optional[int]
    left: Optional[int]        # pre-order index of an internal left child
    right: Optional[int]       # pre-order index of an internal right child
    left_leaf: Optional[int]   # leaf number when the left child is a leaf
    right_leaf: Optional[int]  # leaf number when the right child is a leaf


def _leaf_span(shape: Shape) -> tuple[int, int]:
    if isinstance(shape, int):
        return shape - 1, shape
    lo, _ = _leaf_span(shape[0])
    _, hi = _leaf_span(shape[1])
    return lo, hi


@dataclass(frozen=True)
class PlanarTree:
    """Immutable planar binary tree; equality and hashing follow the shape."""

    shape: Shape

    def __post_init__(self):
        _validate_shape(self.shape)
        vertices = []
        _build_vertices(self.shape, None, 0, vertices)
        object.__setattr__(self, "_vertices", tuple(vertices))

    @property
    def vertices(self) -> tuple[Vertex, ...]:
        """Internal vertices in pre-order."""
        return self._vertices

    @property
    def h(self) -> int:
        return _leaf_span(self.shape)[1]

    @property
    def n_internal(self) -> int:
        return len(self._vertices)

    def serialize(self) -> str:
        return _serialize(self.shape)

    def __str__(self) -> str:
        return self.serialize()

    def __repr__(self) -> str:
        return f"PlanarTree({self.serialize()!r})"

    def __hash__(self):
        return hash(self.shape)

    def __eq__(self, other):
        return isinstance(other, PlanarTree) and self.shape == other.shape

    def subtree_shape(self, u: int) -> Shape:
        """Shape of the subtree rooted at internal vertex u."""
        found = _find_shape(self.shape, u, [0])
        assert found is not None
        return found


def _validate_shape(shape: Shape):
    leaves = []
    _collect_leaves(shape, leaves)
    if leaves != list(range(1, len(leaves) + 1)):
        raise NonConsecutiveLeaves(f"leaves read {leaves}, expected 1..{len(leaves)}")


def _collect_leaves(shape: Shape, out: list):
    if isinstance(shape, int):
        out.append(shape)
    else:
        if not (isinstance(shape, tuple) and len(shape) == 2):
            raise ParseError(f"bad shape node {shape!r}")
        _collect_leaves(shape[0], out)
        _collect_leaves(shape[1], out)


def _build_vertices(shape: Shape, parent, level, out) -> Optional[int]:
    """Append internal vertices in pre-order; return this subtree's root index."""
    if isinstance(shape, int):
        return None
    lo, hi = _leaf_span(shape)
    _, split = _leaf_span(shape[0])
    index = len(out)
    out.append(None)  # reserve the slot to keep pre-order numbering
    left = _build_vertices(shape[0], index, level + 1, out)
    right = _build_vertices(shape[1], index, level + 1, out)
    out[index] = Vertex(
        index=index,
        lo=lo,
        hi=hi,
        split=split,
        level=level,
        parent=parent,
        left=left,
        right=right,
        left_leaf=shape[0] if isinstance(shape[0], int) else None,
        right_leaf=shape[1] if isinstance(shape[1], int) else None,
    )
    return index


def _find_shape(shape: Shape, target: int, counter: list) -> Optional[Shape]:
    if isinstance(shape, int):
        return None
    if counter[0] == target:
        return shape
    counter[0] += 1
    found = _find_shape(shape[0], target, counter)
    if found is not None:
        return found
    return _find_shape(shape[1], target, counter)


def _serialize(shape: Shape) -> str:
    if isinstance(shape, int):
        return str(shape)
    return f"({_serialize(shape[0])} {_serialize(shape[1])})"


def parse_tree(text: str) -> PlanarTree:
    """Parse '(T T)' nested-pair notation with 1-based leaf numbers.

    Examples: '(1 2)', '((1 2) 3)', '(1 (2 3))', '((1 2)(3 4))'.
    """
    tokens = []
    i = 0
    while i < len(text):
        ch = text[i]
        if ch in "()":
            tokens.append(ch)
            i += 1
        elif ch.isspace():
            i += 1
        elif ch.isdigit():
            j = i
            while j < len(text) and text[j].isdigit():
                j += 1
            tokens.append(int(text[i:j]))
            i = j
        else:
            raise ParseError(f"unexpected character {ch!r} at position {i}")
    pos = [0]

    def parse_node() -> Shape:
        if pos[0] >= len(tokens):
            raise ParseError("unexpected end of input")
        tok = tokens[pos[0]]
        pos[0] += 1
        if isinstance(tok, int):
            return tok
        if tok == "(":
            left = parse_node()
            right = parse_node()
            if pos[0] >= len(tokens) or tokens[pos[0]] != ")":
                raise ParseError("expected ')'")
            pos[0] += 1
            return (left, right)
        raise ParseError(f"unexpected token {tok!r}")

    shape = parse_node()
    if pos[0] != len(tokens):
        raise ParseError(f"trailing tokens after position {pos[0]}")
    return PlanarTree(shape)


def right_comb(h: int) -> PlanarTree:
    """(1 (2 (3 ... (h-1 h)))) — every left child is a leaf."""
    if h < 2:
        raise ValueError(f"need at least two leaves, got {h}")
    shape: Shape = h
    for leaf in range(h - 1, 0, -1):
        shape = (leaf, shape)
    return PlanarTree(shape)


def left_comb(h: int) -> PlanarTree:
    """ ((((1 2) 3) ...) h) — every right child is a leaf."""
    if h < 2:
        raise ValueError(f"need at least two leaves, got {h}")
    shape: Shape = 1
    for leaf in range(2, h + 1):
        shape = (shape, leaf)
    return PlanarTree(shape)


def all_trees(h: int) -> list[PlanarTree]:
    """Every planar binary tree on h leaves (Catalan many), deterministically."""
    if h < 2:
        raise ValueError(f"need at least two leaves, got {h}")

    def build(lo: int, hi: int) -> list[Shape]:
        if hi - lo == 1:
            return [hi]
        shapes = []
        for split in range(lo + 1, hi):
            for left in build(lo, split):
                for right in build(split, hi):
                    shapes.append((left, right))
        return shapes

    return [PlanarTree(s) for s in build(0, h)]


def enumerate_labelings(tree: PlanarTree, n: int) -> list[tuple[int, ...]]:
    """All coefficient labelings of total n, lexicographic over pre-order."""
    if tree.n_internal == 0:
        return [()] if n == 0 else []
    return enumerate_compositions(tree.n_internal, n)


def coefficient_sums(tree: PlanarTree, labeling: Sequence[int]) -> list[int]:
    """Subtree coefficient sums cs(U) per internal vertex, pre-order."""
    labeling = tuple(labeling)
    if len(labeling) != tree.n_internal:
        raise ValueError(
            f"labeling has {len(labeling)} entries, tree has {tree.n_internal} vertices"
        )
    sums = [0] * tree.n_internal
    for v in reversed(tree.vertices):  # children have larger pre-order indices
        total = labeling[v.index]
        if v.left is not None:
            total += sums[v.left]
        if v.right is not None:
            total += sums[v.right]
        sums[v.index] = total
    return sums


@dataclass(frozen=True)
class VertexAttributes:
    """Per-vertex data; fields are None when their input was not supplied."""

    index: int
    p: Optional[Fraction] = None
    lp: Optional[Fraction] = None
    rp: Optional[Fraction] = None
    v: Optional[int] = None
    lv: Optional[int] = None
    rv: Optional[int] = None
    c: Optional[int] = None
    lcs: Optional[int] = None
    rcs: Optional[int] = None
    cs: Optional[int] = None


def attributes(
    tree: PlanarTree,
    params: Optional[ParamSet] = None,
    x: Optional[Sequence[int]] = None,
    labeling: Optional[Sequence[int]] = None,
) -> list[VertexAttributes]:
    """Vertex products p, variable sums v and coefficient sums per vertex.

    p(U) multiplies the parameters under U and a factor q per leaf;
    lp/rp are the same for the children, with a single leaf contributing
    alpha_i q.  v(U) sums the variables under U.  cs(U) sums the labeling
    on the subtree; lcs/rcs on the child subtrees.
    """
    if params is not None and params.h != tree.h:
        raise ValueError(f"params have {params.h} entries, tree has {tree.h} leaves")
    if x is not None and len(x) != tree.h:
        raise ValueError(f"point has {len(x)} entries, tree has {tree.h} leaves")
    cs = coefficient_sums(tree, labeling) if labeling is not None else None
    labeling = tuple(labeling) if labeling is not None else None

    def span_p(lo, hi):
        return params.span_product(lo, hi) * params.ctx.q_power(hi - lo)

    def span_v(lo, hi):
        return sum(x[lo:hi])

    out = []
    for v in tree.vertices:
        entry = {"index": v.index}
        if params is not None:
            entry["p"] = span_p(v.lo, v.hi)
            entry["lp"] = span_p(v.lo, v.split)
            entry["rp"] = span_p(v.split, v.hi)
        if x is not None:
            entry["v"] = span_v(v.lo, v.hi)
            entry["lv"] = span_v(v.lo, v.split)
            entry["rv"] = span_v(v.split, v.hi)
        if labeling is not None:
            entry["c"] = labeling[v.index]
            entry["lcs"] = cs[v.left] if v.left is not None else 0
            entry["rcs"] = cs[v.right] if v.right is not None else 0
            entry["cs"] = cs[v.index]
        out.append(VertexAttributes(**entry))
    return out


@dataclass(frozen=True)
class MoveRecord:
    """One right-to-left transplantation, with everything needed to map
    labelings of the source tree onto labelings of the target tree.

    `vertex` indexes the source tree's pre-order; spans are local to the
    moved subtree: s leaves in T', r - s in T'', h_local - r in T''',
    with `base` the number of leaves strictly to the left of the subtree.
    """

    source: PlanarTree
    target: PlanarTree
    vertex: int
    base: int
    s_local: int
    r_local: int
    h_local: int
    block_left: int    # internal vertices of T'
    block_mid: int     # internal vertices of T''
    block_right: int   # internal vertices of T'''

    def to_json_obj(self) -> dict:
        return {
            "vertex": self.vertex,
            "spans": {"s": self.s_local, "r": self.r_local, "h": self.h_local},
            "base": self.base,
        }


def transplant_right_to_left(tree: PlanarTree, u: int) -> tuple[PlanarTree, MoveRecord]:
    """Apply (T' (T'' T''')) -> ((T' T'') T''') at vertex u."""
    if not (0 <= u < tree.n_internal):
        raise IndexError(f"vertex {u} outside 0..{tree.n_internal - 1}")
    vert = tree.vertices[u]
    if vert.right is None:
        raise RightChildIsLeaf(f"vertex {u} of {tree} has a leaf right child")
    right_vert = tree.vertices[vert.right]

    counter = [0]

    def rebuild(shape: Shape) -> Shape:
        if isinstance(shape, int):
            return shape
        here = counter[0]
        counter[0] += 1
        if here == u:
            t1 = shape[0]
            t2, t3 = shape[1]
            return (( _copy(t1), _copy(t2)), _copy(t3))
        left = rebuild(shape[0])
        right = rebuild(shape[1])
        return (left, right)

    def _copy(shape: Shape) -> Shape:
        return shape  # shapes are immutable nested tuples

    new_tree = PlanarTree(rebuild(tree.shape))
    record = MoveRecord(
        source=tree,
        target=new_tree,
        vertex=u,
        base=vert.lo,
        s_local=vert.split - vert.lo,
        r_local=right_vert.split - vert.lo,
        h_local=vert.hi - vert.lo,
        block_left=(vert.split - vert.lo) - 1,
        block_mid=(right_vert.split - vert.split) - 1,
        block_right=(vert.hi - right_vert.split) - 1,
    )
    return new_tree, record


def rl_neighbors(tree: PlanarTree) -> list[tuple[PlanarTree, MoveRecord]]:
    """All single right-to-left moves, in pre-order of the moved vertex."""
    out = []
    for v in tree.vertices:
        if v.right is not None:
            out.append(transplant_right_to_left(tree, v.index))
    return out


def find_rl_path(source: PlanarTree, target: PlanarTree) -> list[MoveRecord]:
    """Shortest path of right-to-left moves, BFS with pre-order tie-break.

    Returns [] when source == target; raises NotRightReachable when no
    such path exists (the move is not symmetric).
    """
    if source.h != target.h:
        raise NotRightReachable(
            f"trees have different leaf counts {source.h} and {target.h}"
        )
    if source == target:
        return []
    seen = {source: None}  # tree -> (previous tree, MoveRecord)
    frontier = [source]
    while frontier:
        next_frontier = []
        for tree in frontier:
            for neighbor, record in rl_neighbors(tree):
                if neighbor in seen:
                    continue
                seen[neighbor] = (tree, record)
                if neighbor == target:
                    path = []
                    node = neighbor
                    while seen[node] is not None:
                        prev, rec = seen[node]
                        path.append(rec)
                        node = prev
                    return list(reversed(path))
                next_frontier.append(neighbor)
        frontier = next_frontier
    raise NotRightReachable(f"no right-to-left path from {source} to {target}")


def canonical_path_to_left_comb(tree: PlanarTree) -> list[MoveRecord]:
    """Deterministic path to the left comb: always move at the highest
    admissible vertex (smallest level, then leftmost)."""
    path = []
    current = tree
    while True:
        candidates = [v for v in current.vertices if v.right is not None]
        if not candidates:
            break
        best = min(candidates, key=lambda v: (v.level, v.index))
        current, record = transplant_right_to_left(current, best.index)
        path.append(record)
    return path
