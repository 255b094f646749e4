"""Block structure of a bipartite tournament relative to an undeletable
vertex set M.

When every single vertex added to M keeps T[M] acyclic (M-consistency), the
canonical sequence (X'_1, X'_2, ...) of T[M] extends to a partition of all
of V(T): each vertex is either equivalent to one layer X'_i (same
M-neighborhoods as its members), in conflict with exactly one layer (it has
both an in- and an out-neighbor inside it), or universal (it can sit before
or after all of M in a topological sort).  The resulting alternating blocks
(X_i, Y_i) are the backbone of the constrained-solver pipeline.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Iterable, NamedTuple, Sequence

from .errors import BlockIndexOutOfRange, EmptyM, GroundSetMismatch, NotMConsistent
from .graph import BipartiteTournament, Vertex
from .structure import CanonicalSequence, canonical_sequence, is_acyclic


class ClassKind(Enum):
    EQUIVALENT = "equivalent"
    CONFLICTING = "conflicting"
    UNIVERSAL_MINUS = "universal-"
    UNIVERSAL_PLUS = "universal+"


class Classification(NamedTuple):
    """Outcome of classifying one vertex against the layers of T[M].

    ``block`` is the 0-based index into the canonical sequence of T[M] for
    the equivalent/conflicting kinds, and None for the universal kinds.
    """

    kind: ClassKind
    block: int | None = None


class BackEdgeKind(Enum):
    SHORT = "short"
    LONG = "long"


class BackEdge(NamedTuple):
    """Arc from a higher-indexed block to a strictly lower-indexed one."""

    tail: Vertex
    head: Vertex
    tail_block: int
    head_block: int

    @property
    def kind(self) -> BackEdgeKind:
        gap = self.tail_block - self.head_block
        if gap < 1:
            raise ValueError("not a back edge")
        return BackEdgeKind.SHORT if gap == 1 else BackEdgeKind.LONG


@dataclass(frozen=True)
class MSequence:
    """Alternating block partition (X_1, Y_1, ..., X_l, Y_l) of V(T).

    X_i holds the vertices equivalent to layer i of T[M]; Y_i holds the
    vertices conflicting with it, plus the universal vertices folded into
    Y_1 (can precede M) and Y_l (can follow M).  ``m_set`` records the M the
    partition was built from.
    """

    blocks: tuple[tuple[frozenset, frozenset], ...]
    m_set: frozenset

    def __len__(self) -> int:
        return len(self.blocks)

    def x(self, i: int) -> frozenset:
        return self.blocks[i][0]

    def y(self, i: int) -> frozenset:
        return self.blocks[i][1]

    def block_vertices(self, i: int) -> frozenset:
        return self.blocks[i][0] | self.blocks[i][1]

    def block_index(self, v: Vertex) -> int:
        for i, (x, y) in enumerate(self.blocks):
            if v in x or v in y:
                return i
        raise KeyError(f"{v!r} not in any block")

    def block_index_map(self) -> dict:
        out = {}
        for i, (x, y) in enumerate(self.blocks):
            for v in x:
                out[v] = i
            for v in y:
                out[v] = i
        return out

    def flatten(self) -> list[frozenset]:
        """Ordered partition (X_1, Y_1, X_2, ...) with empty sets dropped."""
        out = []
        for x, y in self.blocks:
            if x:
                out.append(x)
            if y:
                out.append(y)
        return out


def is_m_consistent(T: BipartiteTournament, M: Iterable[Vertex]) -> tuple[bool, Vertex | None]:
    """Does every single added vertex keep T[M] acyclic?

    Returns ``(True, None)``, or ``(False, witness)`` where the witness is a
    vertex v with T[M + v] cyclic (v in M itself when T[M] is already
    cyclic).
    """
    M = set(M)
    for v in M:
        T.check_vertex(v)
    m_mask = T.mask_of(M)
    if not is_acyclic(T, M):
        # report some M-vertex as the witness of the degenerate failure
        return False, min(M)
    for v in T.vertices():
        if v in M:
            continue
        if not _acyclic_with(T, m_mask, v):
            return False, v
    return True, None


def _acyclic_with(T: BipartiteTournament, m_mask: int, v: Vertex) -> bool:
    from .structure import _peel_layers_mask
    return _peel_layers_mask(T, m_mask | (1 << T.gid(v))) is not None


def _layer_profiles(T: BipartiteTournament, M: frozenset,
                    canon: CanonicalSequence) -> list[tuple[frozenset, frozenset]]:
    """(out-neighborhood in M, in-neighborhood in M) for each layer of T[M].

    All members of one layer share their M-neighborhoods, so one
    representative suffices.
    """
    profiles = []
    for layer in canon:
        rep = min(layer)
        profiles.append((T.out_neighbors(rep, M), T.in_neighbors(rep, M)))
    return profiles


def _classify_against(T: BipartiteTournament, M: frozenset, canon: CanonicalSequence,
                      profiles: list[tuple[frozenset, frozenset]], v: Vertex) -> Classification:
    out_m = T.out_neighbors(v, M)
    in_m = T.in_neighbors(v, M)
    for i, (p_out, p_in) in enumerate(profiles):
        if out_m == p_out and in_m == p_in:
            return Classification(ClassKind.EQUIVALENT, i)
    # Not equivalent to any layer.  A vertex with no in-neighbors in M can
    # open a topological sort of T[M + v]; one with no out-neighbors can
    # close it.  (A vertex qualifying for both would be equivalent to a
    # layer, so the minus-first order only settles a vacuous tie.)
    if not in_m:
        return Classification(ClassKind.UNIVERSAL_MINUS)
    if not out_m:
        return Classification(ClassKind.UNIVERSAL_PLUS)
    for i, layer in enumerate(canon):
        if out_m & layer:
            if not (in_m & layer):
                raise NotMConsistent(
                    f"{v!r} has its first out-neighbor layer {i} free of "
                    "in-neighbors yet is not equivalent; tournament is not "
                    "M-consistent")
            return Classification(ClassKind.CONFLICTING, i)
    raise AssertionError("unreachable: nonempty out_m must meet some layer")


def classify(T: BipartiteTournament, M: Iterable[Vertex], v: Vertex) -> Classification:
    """Classify ``v`` against the layers of T[M].

    Requires M nonempty and T M-consistent.  Universality is decided by the
    constructive neighborhood case analysis (first layer holding an
    out-neighbor, etc.), not by enumerating topological sorts.
    """
    M = frozenset(M)
    if not M:
        raise EmptyM("classification needs a nonempty M")
    ok, witness = is_m_consistent(T, M)
    if not ok:
        raise NotMConsistent(f"witness vertex {witness!r}")
    T.check_vertex(v)
    sub = T.induced(M)
    canon_sub = canonical_sequence(sub.tournament)
    canon = CanonicalSequence(tuple(
        frozenset(sub.to_host[u] for u in layer) for layer in canon_sub))
    profiles = _layer_profiles(T, M, canon)
    return _classify_against(T, M, canon, profiles, v)


def m_sequence(T: BipartiteTournament, M: Iterable[Vertex]) -> MSequence:
    """The unique alternating block partition of V(T) relative to M.

    Requires M nonempty and T M-consistent.
    """
    M = frozenset(M)
    if not M:
        raise EmptyM("the block partition needs a nonempty M")
    ok, witness = is_m_consistent(T, M)
    if not ok:
        raise NotMConsistent(f"witness vertex {witness!r}")
    sub = T.induced(M)
    canon_sub = canonical_sequence(sub.tournament)
    canon = CanonicalSequence(tuple(
        frozenset(sub.to_host[u] for u in layer) for layer in canon_sub))
    profiles = _layer_profiles(T, M, canon)
    l = len(canon)
    xs: list[set] = [set() for _ in range(l)]
    ys: list[set] = [set() for _ in range(l)]
    for v in T.vertices():
        c = _classify_against(T, M, canon, profiles, v)
        if c.kind is ClassKind.EQUIVALENT:
            xs[c.block].add(v)
        elif c.kind is ClassKind.CONFLICTING:
            ys[c.block].add(v)
        elif c.kind is ClassKind.UNIVERSAL_MINUS:
            ys[0].add(v)
        else:
            ys[l - 1].add(v)
    return MSequence(tuple(
        (frozenset(xs[i]), frozenset(ys[i])) for i in range(l)), M)


def back_edges(T: BipartiteTournament, seq: MSequence) -> list[BackEdge]:
    """All arcs from a higher-indexed block to a strictly lower one,
    in row-major arc scan order."""
    idx = seq.block_index_map()
    out = []
    for (u, w) in T.arcs():
        if u not in idx or w not in idx:
            continue
        bi, bj = idx[u], idx[w]
        if bi > bj:
            out.append(BackEdge(u, w, bi, bj))
    return out


def is_conflict_back_edge(T: BipartiteTournament, M: Iterable[Vertex], e: BackEdge) -> bool:
    """Does the back edge close a square with two M-vertices?

    For e = u -> w this asks for m1 in N^+(w) & M and m2 in N^-(u) & M with
    the arc m1 -> m2; long back edges always qualify.
    """
    M = frozenset(M)
    heads = T.out_neighbors(e.head, M)
    tails = T.in_neighbors(e.tail, M)
    for m1 in sorted(heads):
        for m2 in sorted(tails):
            if T.has_arc(m1, m2):
                return True
    return False


class Boundaries(NamedTuple):
    left: frozenset
    right: frozenset


def boundaries(T: BipartiteTournament, seq: MSequence,
               order: Sequence[Vertex], i: int) -> Boundaries:
    """Vertices of X_i placed before the first / after the last M-vertex of
    X_i by the topological order ``order``.

    M-sequence layers always contain an M-vertex, so both boundaries are
    proper (possibly empty) fringes.
    """
    if not (0 <= i < len(seq)):
        raise BlockIndexOutOfRange(f"block {i} of {len(seq)}")
    M = seq.m_set
    xi = seq.x(i)
    ordered = [v for v in order if v in xi]
    m_positions = [p for p, v in enumerate(ordered) if v in M]
    if not m_positions:
        return Boundaries(frozenset(ordered), frozenset(ordered))
    first, last = m_positions[0], m_positions[-1]
    return Boundaries(frozenset(ordered[:first]), frozenset(ordered[last + 1:]))


def vicinity(T: BipartiteTournament, seq: MSequence,
             order: Sequence[Vertex], i: int) -> frozenset:
    """Union of block i's boundaries, the right boundary of block i-1, Y_i,
    and the left boundary of block i+1; missing neighbor blocks contribute
    nothing."""
    if not (0 <= i < len(seq)):
        raise BlockIndexOutOfRange(f"block {i} of {len(seq)}")
    own = boundaries(T, seq, order, i)
    parts = set(own.left) | set(own.right) | set(seq.y(i))
    if i > 0:
        parts |= boundaries(T, seq, order, i - 1).right
    if i + 1 < len(seq):
        parts |= boundaries(T, seq, order, i + 1).left
    return frozenset(parts)


def is_refinement(p1: Sequence[Iterable[Vertex]], p2: Sequence[Iterable[Vertex]]) -> bool:
    """Is every set of partition p1 contained in some set of p2?

    Both arguments must partition the same ground set.
    """
    sets1 = [frozenset(s) for s in p1]
    sets2 = [frozenset(s) for s in p2]
    ground1: set = set()
    for s in sets1:
        ground1 |= s
    ground2: set = set()
    for s in sets2:
        ground2 |= s
    if ground1 != ground2:
        raise GroundSetMismatch(
            f"partitions cover different ground sets ({len(ground1)} vs {len(ground2)} vertices)")
    for s in sets1:
        if not s:
            continue
        if not any(s <= t for t in sets2):
            return False
    return True
