"""Bipartite tournaments and mixed multigraphs.

A bipartite tournament on sides A (size m) and B (size n) is stored as an
m-by-n orientation matrix: ``orient[i][j]`` is True when the arc runs
a_i -> b_j and False when it runs b_j -> a_i.  The encoding makes
"exactly one arc per cross pair, none within a side" unrepresentable as an
error state, so only the matrix shape needs validation.

Vertices are identified by ``(side, index)``; display labels are separate
and presentation-only, so identities survive induced-subgraph mappings.
Instances are immutable after construction and safe to share between
concurrent solver branches.
"""

from __future__ import annotations

from enum import Enum
from typing import Iterable, NamedTuple, Sequence

from .errors import DimensionMismatch

SIDE_A = "A"
SIDE_B = "B"


class Vertex(NamedTuple):
    side: str
    index: int

    def default_label(self) -> str:
        return ("a" if self.side == SIDE_A else "b") + str(self.index)


class Arc(Enum):
    U_TO_V = "u->v"
    V_TO_U = "v->u"
    NO_ARC = "none"


class SubTournament(NamedTuple):
    """An induced subtournament plus the identity mapping to its host."""

    tournament: "BipartiteTournament"
    to_host: dict  # Vertex in sub -> Vertex in host
    from_host: dict  # Vertex in host -> Vertex in sub


class BipartiteTournament:
    """Immutable bipartite tournament with an orientation-matrix encoding.

    Empty sides (m == 0 or n == 0) are legal; such tournaments are trivially
    acyclic and serve as recursion base cases.
    """

    __slots__ = ("m", "n", "orient", "labels", "_out_mask", "_in_mask", "_squares")

    def __init__(self, m: int, n: int, orient: Sequence[Sequence[object]],
                 labels: Sequence[str] | None = None):
        if m < 0 or n < 0:
            raise DimensionMismatch(f"negative side size: m={m}, n={n}")
        if len(orient) != m:
            raise DimensionMismatch(f"expected {m} rows, got {len(orient)}")
        rows = []
        for i, row in enumerate(orient):
            row = tuple(bool(x) for x in row)
            if len(row) != n:
                raise DimensionMismatch(f"row {i} has {len(row)} entries, expected {n}")
            rows.append(row)
        if labels is not None:
            labels = tuple(str(x) for x in labels)
            if len(labels) != m + n:
                raise DimensionMismatch(
                    f"expected {m + n} labels, got {len(labels)}")
            if len(set(labels)) != len(labels):
                raise DimensionMismatch("labels must be unique")
        object.__setattr__(self, "m", m)
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "orient", tuple(rows))
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "_out_mask", None)
        object.__setattr__(self, "_in_mask", None)
        object.__setattr__(self, "_squares", None)

    def __setattr__(self, name, value):
        raise AttributeError("BipartiteTournament is immutable")

    def __reduce__(self):
        return (BipartiteTournament, (self.m, self.n, self.orient, self.labels))

    # -- identity ---------------------------------------------------------

    def __eq__(self, other) -> bool:
        if not isinstance(other, BipartiteTournament):
            return NotImplemented
        return (self.m, self.n, self.orient, self.labels) == \
            (other.m, other.n, other.orient, other.labels)

    def __hash__(self) -> int:
        return hash((self.m, self.n, self.orient, self.labels))

    def __repr__(self) -> str:
        return f"BipartiteTournament(m={self.m}, n={self.n})"

    # -- vertices ---------------------------------------------------------

    @property
    def num_vertices(self) -> int:
        return self.m + self.n

    def a_vertices(self) -> list[Vertex]:
        return [Vertex(SIDE_A, i) for i in range(self.m)]

    def b_vertices(self) -> list[Vertex]:
        return [Vertex(SIDE_B, j) for j in range(self.n)]

    def vertices(self) -> list[Vertex]:
        return self.a_vertices() + self.b_vertices()

    def is_vertex(self, v: Vertex) -> bool:
        if v.side == SIDE_A:
            return 0 <= v.index < self.m
        if v.side == SIDE_B:
            return 0 <= v.index < self.n
        return False

    def check_vertex(self, v: Vertex) -> None:
        if not self.is_vertex(v):
            raise ValueError(f"{v!r} is not a vertex of {self!r}")

    def label(self, v: Vertex) -> str:
        self.check_vertex(v)
        if self.labels is None:
            return v.default_label()
        return self.labels[self.gid(v)]

    def vertex_by_label(self, label: str) -> Vertex:
        for v in self.vertices():
            if self.label(v) == label:
                return v
        raise KeyError(f"no vertex labelled {label!r}")

    # -- global ids and bitmask adjacency (internal fast path) -------------

    def gid(self, v: Vertex) -> int:
        """Global id: a_i -> i, b_j -> m + j."""
        return v.index if v.side == SIDE_A else self.m + v.index

    def vertex_of_gid(self, g: int) -> Vertex:
        if g < self.m:
            return Vertex(SIDE_A, g)
        return Vertex(SIDE_B, g - self.m)

    def mask_of(self, vs: Iterable[Vertex]) -> int:
        mask = 0
        for v in vs:
            mask |= 1 << self.gid(v)
        return mask

    def vertices_of_mask(self, mask: int) -> list[Vertex]:
        out = []
        while mask:
            low = mask & -mask
            out.append(self.vertex_of_gid(low.bit_length() - 1))
            mask ^= low
        return out

    @property
    def full_mask(self) -> int:
        return (1 << self.num_vertices) - 1

    def _adjacency_masks(self) -> tuple[list[int], list[int]]:
        if self._out_mask is None:
            m, n = self.m, self.n
            out = [0] * (m + n)
            inc = [0] * (m + n)
            for i in range(m):
                row = self.orient[i]
                for j in range(n):
                    if row[j]:
                        out[i] |= 1 << (m + j)
                        inc[m + j] |= 1 << i
                    else:
                        out[m + j] |= 1 << i
                        inc[i] |= 1 << (m + j)
            object.__setattr__(self, "_out_mask", out)
            object.__setattr__(self, "_in_mask", inc)
        return self._out_mask, self._in_mask

    @property
    def out_mask(self) -> list[int]:
        return self._adjacency_masks()[0]

    @property
    def in_mask(self) -> list[int]:
        return self._adjacency_masks()[1]

    # -- arcs and neighborhoods --------------------------------------------

    def arc(self, u: Vertex, v: Vertex) -> Arc:
        self.check_vertex(u)
        self.check_vertex(v)
        if u.side == v.side:
            return Arc.NO_ARC
        if u.side == SIDE_A:
            return Arc.U_TO_V if self.orient[u.index][v.index] else Arc.V_TO_U
        return Arc.V_TO_U if self.orient[v.index][u.index] else Arc.U_TO_V

    def has_arc(self, u: Vertex, v: Vertex) -> bool:
        """True iff the arc u -> v exists."""
        return self.arc(u, v) is Arc.U_TO_V

    def out_neighbors(self, v: Vertex, within: Iterable[Vertex] | None = None) -> frozenset:
        self.check_vertex(v)
        mask = self.out_mask[self.gid(v)]
        if within is not None:
            mask &= self.mask_of(within)
        return frozenset(self.vertices_of_mask(mask))

    def in_neighbors(self, v: Vertex, within: Iterable[Vertex] | None = None) -> frozenset:
        self.check_vertex(v)
        mask = self.in_mask[self.gid(v)]
        if within is not None:
            mask &= self.mask_of(within)
        return frozenset(self.vertices_of_mask(mask))

    def arcs(self) -> list[tuple[Vertex, Vertex]]:
        """All arcs, tail first, in row-major scan order."""
        out = []
        for i in range(self.m):
            for j in range(self.n):
                a, b = Vertex(SIDE_A, i), Vertex(SIDE_B, j)
                out.append((a, b) if self.orient[i][j] else (b, a))
        return out

    # -- induced subgraphs ---------------------------------------------------

    def induced(self, keep: Iterable[Vertex]) -> SubTournament:
        """Induced subtournament on ``keep``, with both identity mappings.

        Kept vertices are renumbered contiguously in ascending index order
        per side, so the mapping round-trips identities.
        """
        keep = set(keep)
        for v in keep:
            self.check_vertex(v)
        a_keep = sorted(i for (s, i) in keep if s == SIDE_A)
        b_keep = sorted(j for (s, j) in keep if s == SIDE_B)
        orient = [[self.orient[i][j] for j in b_keep] for i in a_keep]
        labels = None
        if self.labels is not None:
            labels = [self.labels[i] for i in a_keep] + \
                [self.labels[self.m + j] for j in b_keep]
        sub = BipartiteTournament(len(a_keep), len(b_keep), orient, labels)
        to_host = {}
        for new_i, old_i in enumerate(a_keep):
            to_host[Vertex(SIDE_A, new_i)] = Vertex(SIDE_A, old_i)
        for new_j, old_j in enumerate(b_keep):
            to_host[Vertex(SIDE_B, new_j)] = Vertex(SIDE_B, old_j)
        from_host = {old: new for new, old in to_host.items()}
        return SubTournament(sub, to_host, from_host)

    def remove(self, drop: Iterable[Vertex]) -> SubTournament:
        drop = set(drop)
        for v in drop:
            self.check_vertex(v)
        return self.induced(set(self.vertices()) - drop)

    # -- twins ----------------------------------------------------------------

    def false_twin_classes(self) -> list[frozenset]:
        """Partition of V into classes of vertices with identical in/out
        neighborhoods (necessarily same-side).  Deterministic order: classes
        sorted by their smallest member.
        """
        groups: dict[tuple, list[Vertex]] = {}
        out, inc = self._adjacency_masks()
        for v in self.vertices():
            g = self.gid(v)
            groups.setdefault((v.side, out[g], inc[g]), []).append(v)
        classes = [frozenset(vs) for vs in groups.values()]
        return sorted(classes, key=lambda c: min(c))


def new_tournament(m: int, n: int, orient: Sequence[Sequence[object]],
                   labels: Sequence[str] | None = None) -> BipartiteTournament:
    """Validated construction; rejects ragged or mis-sized matrices."""
    return BipartiteTournament(m, n, orient, labels)


class MixedMultigraph:
    """A multigraph whose parts induce bipartite tournaments, joined by
    undirected cross-part edges.

    ``parts`` is a list of bipartite tournaments; a vertex of the whole graph
    is addressed as ``(part_index, Vertex)``.  ``undirected`` is a multiset
    (list) of cross-part edges; edges within a part are rejected.
    """

    __slots__ = ("parts", "undirected")

    def __init__(self, parts: Sequence[BipartiteTournament],
                 undirected: Sequence[tuple[tuple[int, Vertex], tuple[int, Vertex]]]):
        parts = tuple(parts)
        edges = []
        for (pi, u), (pj, v) in undirected:
            if not (0 <= pi < len(parts) and 0 <= pj < len(parts)):
                raise ValueError(f"part index out of range in edge {((pi, u), (pj, v))!r}")
            if pi == pj:
                raise ValueError(f"undirected edge within part {pi}: {u!r} -- {v!r}")
            parts[pi].check_vertex(u)
            parts[pj].check_vertex(v)
            # store with the lower part index first, for a stable identity
            e = ((pi, u), (pj, v)) if pi < pj else ((pj, v), (pi, u))
            edges.append(e)
        object.__setattr__(self, "parts", parts)
        object.__setattr__(self, "undirected", tuple(edges))

    def __setattr__(self, name, value):
        raise AttributeError("MixedMultigraph is immutable")

    def __reduce__(self):
        return (MixedMultigraph, (self.parts, self.undirected))

    def __eq__(self, other):
        if not isinstance(other, MixedMultigraph):
            return NotImplemented
        return (self.parts, self.undirected) == (other.parts, other.undirected)

    def __hash__(self):
        return hash((self.parts, self.undirected))

    def vertices(self) -> list[tuple[int, Vertex]]:
        out = []
        for pi, part in enumerate(self.parts):
            out.extend((pi, v) for v in part.vertices())
        return out

    @property
    def num_vertices(self) -> int:
        return sum(p.num_vertices for p in self.parts)

    def undirected_degree(self, part_index: int) -> int:
        """Number of undirected edges incident on a part."""
        return sum(1 for (pi, _), (pj, _) in self.undirected
                   if part_index in (pi, pj))

    def is_undirected_matching(self) -> bool:
        seen = set()
        for e in self.undirected:
            for end in e:
                if end in seen:
                    return False
                seen.add(end)
        return True
