"""Feedback vertex set solvers for bipartite tournaments.

Four routes with very different trust stories:

* ``oracle_min_fvs``  -- exhaustive subset enumeration, the reference every
  other solver is tested against; capped at small instances.
* ``approx4``         -- greedy square deletion, factor-4 approximation.
* ``branch_solve``    -- budgeted branching over squares and constraint
  edges, with safe reduction and a packing lower bound.
* ``exact_min_fvs``   -- ascending-budget iteration over ``branch_solve``.

All solvers honor ``Constraints``: a set of undeletable vertices, a set of
vertices forced into the solution, an edge set the solution must cover, and
a size budget.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from enum import Enum
from itertools import combinations
from typing import Iterable, NamedTuple

from .errors import InstanceTooLarge
from .graph import BipartiteTournament, Vertex
from .structure import all_squares, find_square


class SolveStatus(Enum):
    SOLUTION = "solution"
    NO_SOLUTION = "no-solution"
    BUDGET_EXCEEDED = "budget-exceeded"  # node limit hit; answer unknown


class SolveStats(NamedTuple):
    nodes: int
    wall_ms: float


class SolveResult(NamedTuple):
    status: SolveStatus
    solution: frozenset | None
    stats: SolveStats

    @property
    def found(self) -> bool:
        return self.status is SolveStatus.SOLUTION


@dataclass(frozen=True)
class Constraints:
    """Side conditions for a constrained feedback vertex set.

    ``forbidden`` vertices may never be deleted, ``required_in`` vertices are
    always deleted (and count against the budget immediately), and every
    edge of ``cover_edges`` must lose at least one endpoint.
    """

    forbidden: frozenset = frozenset()
    required_in: frozenset = frozenset()
    cover_edges: frozenset = frozenset()
    budget: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "forbidden", frozenset(self.forbidden))
        object.__setattr__(self, "required_in", frozenset(self.required_in))
        object.__setattr__(self, "cover_edges",
                           frozenset(tuple(e) for e in self.cover_edges))
        if self.forbidden & self.required_in:
            raise ValueError("forbidden and required_in overlap")

    def is_free(self) -> bool:
        return not self.forbidden and not self.required_in and not self.cover_edges


def verify_fvs(T: BipartiteTournament, S: Iterable[Vertex]) -> bool:
    """Is T - S acyclic?  Decided by square-freeness of the remainder."""
    S = set(S)
    for v in S:
        T.check_vertex(v)
    alive = set(T.vertices()) - S
    return find_square(T, within=alive) is None


def satisfies(T: BipartiteTournament, S: Iterable[Vertex], constraints: Constraints) -> bool:
    """Full validity check of a candidate solution against the constraints."""
    S = frozenset(S)
    if constraints.forbidden & S:
        return False
    if not constraints.required_in <= S:
        return False
    if constraints.budget is not None and len(S) > constraints.budget:
        return False
    for (u, w) in constraints.cover_edges:
        if u not in S and w not in S:
            return False
    return verify_fvs(T, S)


ORACLE_DEFAULT_CAP = 16


def oracle_min_fvs(T: BipartiteTournament, constraints: Constraints | None = None,
                   cap: int = ORACLE_DEFAULT_CAP) -> SolveResult:
    """Reference solver: enumerate candidate sets in increasing size.

    Returns the lexicographically first minimum valid solution, which makes
    the outcome deterministic.  Optimal by construction; only usable up to
    ``cap`` vertices.
    """
    if T.num_vertices > cap:
        raise InstanceTooLarge(f"{T.num_vertices} vertices exceeds oracle cap {cap}")
    if constraints is None:
        constraints = Constraints()
    t0 = time.perf_counter()
    nodes = 0

    req = sorted(constraints.required_in)
    req_mask = T.mask_of(req)
    forb_mask = T.mask_of(constraints.forbidden)
    pool = sorted(set(T.vertices()) - constraints.forbidden - constraints.required_in)
    budget = constraints.budget
    max_extra = len(pool)
    if budget is not None:
        max_extra = min(max_extra, budget - len(req))
        if max_extra < 0:
            return SolveResult(SolveStatus.NO_SOLUTION, None,
                               SolveStats(0, _ms(t0)))

    squares = [mask for _, mask in all_squares(T)]
    # squares no candidate can hit are a certificate of infeasibility
    usable = T.full_mask & ~forb_mask
    if any(mask & usable == 0 for mask in squares):
        return SolveResult(SolveStatus.NO_SOLUTION, None, SolveStats(0, _ms(t0)))
    cover = [(1 << T.gid(u)) | (1 << T.gid(w)) for (u, w) in sorted(constraints.cover_edges)]
    if any(c & usable == 0 for c in cover):
        return SolveResult(SolveStatus.NO_SOLUTION, None, SolveStats(0, _ms(t0)))

    pool_bits = [1 << T.gid(v) for v in pool]
    for size in range(max_extra + 1):
        for combo in combinations(pool_bits, size):
            nodes += 1
            s_mask = req_mask
            for b in combo:
                s_mask |= b
            if any(c & s_mask == 0 for c in cover):
                continue
            if any(q & s_mask == 0 for q in squares):
                continue
            sol = frozenset(T.vertices_of_mask(s_mask))
            return SolveResult(SolveStatus.SOLUTION, sol, SolveStats(nodes, _ms(t0)))
    return SolveResult(SolveStatus.NO_SOLUTION, None, SolveStats(nodes, _ms(t0)))


def _ms(t0: float) -> float:
    return (time.perf_counter() - t0) * 1000.0


def approx4(T: BipartiteTournament, k: int) -> frozenset | None:
    """Greedy square deletion: while a square exists, delete all four of its
    vertices.

    Returns a feedback vertex set of size at most 4k, or None after deleting
    more than k squares -- which certifies that no feedback vertex set of
    size at most k exists (every deleted square is vertex-disjoint from the
    others, and each needs its own deletion).
    """
    alive = set(T.vertices())
    taken: set = set()
    squares = 0
    while True:
        sq = find_square(T, within=alive)
        if sq is None:
            return frozenset(taken)
        squares += 1
        if squares > k:
            return None
        for v in sq.vertices():
            alive.discard(v)
            taken.add(v)


def squares_packing_lower_bound(T: BipartiteTournament,
                                forbidden: Iterable[Vertex] = (),
                                alive: Iterable[Vertex] | None = None) -> int:
    """Greedy vertex-disjoint square packing among live vertices.

    Each packed square must lose at least one deletable vertex, so the count
    lower-bounds the number of deletions still required.  Squares consisting
    purely of forbidden vertices are not packed here; they are an
    infeasibility signal handled by the solvers.
    """
    alive_mask = T.full_mask if alive is None else T.mask_of(alive)
    forb_mask = T.mask_of(forbidden)
    used = 0
    count = 0
    for _, mask in all_squares(T):
        if mask & alive_mask != mask or mask & used:
            continue
        if mask & ~forb_mask == 0:
            continue
        used |= mask
        count += 1
    return count


class Reduction(NamedTuple):
    tournament: BipartiteTournament
    k: int
    to_host: dict  # Vertex in reduced -> Vertex in original


def reduce_instance(T: BipartiteTournament, k: int) -> Reduction:
    """Two safe reduction rules, applied to a fixpoint.

    R1 deletes every vertex contained in no square: such a vertex lies on no
    4-cycle, hence on no cycle at all that a minimum solution would need it
    for, and its removal changes no square.

    R2 truncates every false-twin class to k+1 representatives: a square
    contains at most one vertex per class and twins are interchangeable in
    squares, so any budget-k solution leaves a surviving representative that
    can stand in for a truncated twin.

    The budget is unchanged; solutions of the reduced instance are solutions
    of the original verbatim (the mapping records identities).
    """
    current = T
    to_host = {v: v for v in T.vertices()}
    while True:
        in_square = 0
        for _, mask in all_squares(current):
            in_square |= mask
        keep = [v for v in current.vertices() if (in_square >> current.gid(v)) & 1]
        if len(keep) < current.num_vertices:
            sub = current.induced(keep)
            to_host = {v: to_host[sub.to_host[v]] for v in sub.tournament.vertices()}
            current = sub.tournament
            continue
        truncated = False
        keep_set = set(current.vertices())
        for cls in current.false_twin_classes():
            if len(cls) > k + 1:
                for v in sorted(cls)[k + 1:]:
                    keep_set.discard(v)
                truncated = True
        if truncated:
            sub = current.induced(keep_set)
            to_host = {v: to_host[sub.to_host[v]] for v in sub.tournament.vertices()}
            current = sub.tournament
            continue
        return Reduction(current, k, to_host)


@dataclass
class _SearchState:
    T: BipartiteTournament
    forb_mask: int
    square_masks: list
    budget_total: int
    node_limit: int | None
    nodes: int = 0


class _NodeLimit(Exception):
    pass


def branch_solve(T: BipartiteTournament, constraints: Constraints | None = None,
                 node_limit: int | None = None) -> SolveResult:
    """Budgeted branching solver, sound and complete within its budget.

    Uncovered constraint edges are resolved first by two-way branching on
    their deletable endpoints; then the first square (in the fixed scan
    order) is branched on, trying each deletable vertex in lexicographic
    order.  Required vertices are deleted up front and count against the
    budget.  A branch dies when a square or constraint edge has no deletable
    endpoint, or when the greedy square-packing bound exceeds the remaining
    budget.  Single-threaded and deterministic: the first solution in branch
    order is returned.
    """
    if constraints is None:
        constraints = Constraints()
    t0 = time.perf_counter()
    budget = constraints.budget if constraints.budget is not None else T.num_vertices

    base: set = set(constraints.required_in)
    remaining = budget - len(base)
    if remaining < 0:
        return SolveResult(SolveStatus.NO_SOLUTION, None, SolveStats(0, _ms(t0)))

    # Reduction rules assume plain FVS semantics; apply them only when no
    # constraint refers to specific vertices (work == T otherwise, so vertex
    # coordinates in the constraints stay valid).
    lift: dict = {}
    work = T
    if constraints.is_free():
        red = reduce_instance(T, budget)
        work = red.tournament
        lift = red.to_host

    forb_mask = work.mask_of(constraints.forbidden)
    removed0 = work.mask_of(base)
    cover = sorted((u, w) for (u, w) in constraints.cover_edges)
    square_masks = [m for _, m in all_squares(work)]

    state = _SearchState(work, forb_mask, square_masks, budget, node_limit)

    def packing_bound(removed: int) -> int | None:
        """Greedy disjoint live squares; None signals an unbreakable square."""
        used = 0
        count = 0
        for mask in state.square_masks:
            if mask & removed or mask & used:
                continue
            if mask & ~state.forb_mask == 0:
                return None
            used |= mask
            count += 1
        return count

    def rec(removed: int, left: int, cover_idx: int) -> int | None:
        state.nodes += 1
        if state.node_limit is not None and state.nodes > state.node_limit:
            raise _NodeLimit
        # resolve constraint edges before touching squares
        while cover_idx < len(cover):
            u, w = cover[cover_idx]
            bu = 1 << work.gid(u)
            bw = 1 << work.gid(w)
            if removed & (bu | bw):
                cover_idx += 1
                continue
            if left <= 0:
                return None
            for b in (bu, bw):
                if not b & state.forb_mask:
                    result = rec(removed | b, left - 1, cover_idx + 1)
                    if result is not None:
                        return result
            return None
        bound = packing_bound(removed)
        if bound is None:
            return None
        if bound > left:
            return None
        sq = find_square(work, within=_alive_vertices(work, removed))
        if sq is None:
            return removed
        if left <= 0:
            return None
        for v in sq.vertices():
            b = 1 << work.gid(v)
            if b & state.forb_mask:
                continue
            result = rec(removed | b, left - 1, cover_idx)
            if result is not None:
                return result
        return None

    try:
        answer = rec(removed0, remaining, 0)
    except _NodeLimit:
        return SolveResult(SolveStatus.BUDGET_EXCEEDED, None,
                           SolveStats(state.nodes, _ms(t0)))
    stats = SolveStats(state.nodes, _ms(t0))
    if answer is None:
        return SolveResult(SolveStatus.NO_SOLUTION, None, stats)
    picked = {lift.get(v, v) for v in work.vertices_of_mask(answer)}
    solution = frozenset(picked | base)
    assert satisfies(T, solution, constraints), "internal: invalid solution produced"
    return SolveResult(SolveStatus.SOLUTION, solution, stats)


def _alive_vertices(T: BipartiteTournament, removed: int) -> list[Vertex]:
    return T.vertices_of_mask(T.full_mask & ~removed)


def exact_min_fvs(T: BipartiteTournament) -> frozenset:
    """Minimum feedback vertex set by ascending-budget iteration."""
    for k in range(T.num_vertices + 1):
        res = branch_solve(T, Constraints(budget=k))
        if res.found:
            return res.solution
    raise AssertionError("unreachable: deleting everything is always a solution")
