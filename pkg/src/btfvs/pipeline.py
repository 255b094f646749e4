"""The constrained-instance reduction cascade.

A budget-k feedback vertex set question on a tournament T is expanded into
families of constrained instances (T, M, P, F, k): M is a vertex set the
solution must avoid, P a set it must contain, F an edge set it must cover.
Seeding guesses M via a t-wise independent sample space; successive stages
then branch on structural obstructions until instances are "decoupled"
enough to hand to the mixed-multigraph endgame solver.

Two properties shape the implementation:

* Soundness is unconditional.  Every stage only grows P and F in ways that
  make any child solution a parent solution, and the driver re-verifies
  every candidate before answering yes.
* Completeness is relative to the constants profile.  The published
  constants make the families astronomically large (or empty) at desk
  scale, so every constant is a named knob; when an enumeration would
  overflow its cap the stage raises instead of silently truncating, and the
  driver falls back to the branching solver so the final answer is always
  correct.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, replace
from itertools import combinations, permutations
from math import comb
from typing import Iterable, NamedTuple

from .dfvc import DfvcInstance, dfvc_solve
from .errors import FamilyCapExceeded, NotPrimePower, PreconditionViolated
from .graph import BipartiteTournament, MixedMultigraph, Vertex
from .matching import (consistent_with_mixed, enumerate_min_vertex_covers,
                       max_bipartite_matching, min_vertex_cover,
                       x_preferred_cover)
from .msequence import MSequence, back_edges, is_conflict_back_edge, m_sequence
from .samplespace import prime_power_decompose, twise_space, twise_space_size
from .solvers import (Constraints, SolveStats, SolveStatus, approx4,
                      branch_solve, reduce_instance, verify_fvs)
from .structure import is_acyclic, canonical_sequence


@dataclass(frozen=True)
class ConstantsProfile:
    """Named constants of the cascade.

    The ``paper`` profile (see :meth:`for_budget`) uses the published
    polylog-in-k defaults, which are astronomically large for any desk-size
    budget and make families empty or enormous.  Tests use :meth:`toy`.
    ``family_cap`` bounds every enumeration; exceeding it raises
    FamilyCapExceeded rather than truncating.
    """

    hom_window: int        # homogeneity window on each side's order
    large_ratio: int       # oversize threshold for sub-blocks
    weak_matching: int     # residual back-edge matching bound per block pair
    block_degree: int      # constraint-edge incidence bound per block
    part_fvs_f: int        # part feedback-vertex-set window seed
    part_degree_d: int     # part constraint-edge incidence window seed
    budget_slack: int      # exemption-subset size in seeding/branching stages
    sample_q: int          # sample-space alphabet (rounded up to prime power)
    family_cap: int = 50_000

    def __post_init__(self):
        for name in ("hom_window", "large_ratio", "weak_matching",
                     "block_degree", "part_fvs_f", "part_degree_d",
                     "budget_slack", "sample_q", "family_cap"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be a positive integer")

    @classmethod
    def for_budget(cls, k: int) -> "ConstantsProfile":
        """The ``paper`` profile: published constants, with log read as
        ceil(log2) and floors at 1."""
        lg = max(1, math.ceil(math.log2(max(k, 2))))
        return cls(
            hom_window=10 * lg ** 3,
            large_ratio=10 * lg ** 5,
            weak_matching=201 * lg ** 8,
            block_degree=201 * lg ** 10,
            part_fvs_f=201 * lg ** 12,
            part_degree_d=201 * lg ** 12,
            budget_slack=max(1, (2 * k) // max(1, lg ** 2)),
            sample_q=max(2, lg ** 2),
        )

    @classmethod
    def toy(cls, family_cap: int = 20_000) -> "ConstantsProfile":
        """Small constants that keep every stage executable on tiny
        instances; completeness claims are relative to these knobs."""
        return cls(hom_window=2, large_ratio=3, weak_matching=2,
                   block_degree=3, part_fvs_f=1, part_degree_d=2,
                   budget_slack=1, sample_q=2, family_cap=family_cap)


@dataclass(frozen=True)
class CfvsInstance:
    """One constrained question: an FVS of T of size <= k that avoids M,
    contains P, and covers F."""

    T: BipartiteTournament
    M: frozenset
    P: frozenset
    F: frozenset
    k: int

    def __post_init__(self):
        object.__setattr__(self, "M", frozenset(self.M))
        object.__setattr__(self, "P", frozenset(self.P))
        object.__setattr__(self, "F", frozenset(tuple(e) for e in self.F))
        if self.M & self.P:
            raise ValueError("undeletable and forced sets overlap")
        for v in self.M | self.P:
            self.T.check_vertex(v)
        for (u, w) in self.F:
            if not self.T.has_arc(u, w):
                raise ValueError(f"constraint edge {u!r}->{w!r} is not an arc")

    def live_f(self) -> frozenset:
        """Constraint edges with both endpoints outside P (still uncovered)."""
        return frozenset((u, w) for (u, w) in self.F
                         if u not in self.P and w not in self.P)

    def constraints(self) -> Constraints:
        return Constraints(forbidden=self.M, required_in=self.P,
                           cover_edges=self.F, budget=self.k)

    def is_solution(self, H: Iterable[Vertex]) -> bool:
        from .solvers import satisfies
        return satisfies(self.T, frozenset(H), self.constraints())


class LiveView(NamedTuple):
    """T - P with its block structure, plus both identity mappings."""

    tournament: BipartiteTournament
    to_host: dict
    from_host: dict
    seq: MSequence  # in live coordinates

    def host_blocks(self) -> list[tuple[frozenset, frozenset]]:
        return [(frozenset(self.to_host[v] for v in x),
                 frozenset(self.to_host[v] for v in y))
                for (x, y) in self.seq.blocks]

    def host_back_edges(self) -> list:
        return [(self.to_host[e.tail], self.to_host[e.head],
                 e.tail_block, e.head_block)
                for e in back_edges(self.tournament, self.seq)]


def live_structure(inst: CfvsInstance) -> LiveView:
    sub = inst.T.remove(inst.P)
    m_live = frozenset(sub.from_host[v] for v in inst.M)
    seq = m_sequence(sub.tournament, m_live)
    return LiveView(sub.tournament, sub.to_host, sub.from_host, seq)


# ---------------------------------------------------------------------------
# seeding


def next_prime_power(q: int) -> int:
    x = max(2, q)
    while True:
        try:
            prime_power_decompose(x)
            return x
        except NotPrimePower:
            x += 1


def m_family(T: BipartiteTournament, k: int, profile: ConstantsProfile) -> list[frozenset]:
    """Candidate undeletable sets: one selection per sample-space function,
    minus every exemption subset of size up to ``budget_slack``;
    deduplicated, deterministic order."""
    n = T.num_vertices
    if n == 0:
        return []
    q = next_prime_power(profile.sample_q)
    t = profile.hom_window
    space_size = twise_space_size(n, t, q)
    if space_size > profile.family_cap:
        raise FamilyCapExceeded("sample space", space_size, profile.family_cap)
    space = twise_space(n, t, q)
    verts = T.vertices()
    slack = profile.budget_slack

    selections = []
    would_be = 0
    for f in space.functions:
        z = frozenset(verts[i] for i in range(n) if f[i] == 1)
        selections.append(z)
        would_be += sum(comb(len(z), r) for r in range(min(slack, len(z)) + 1))
    if would_be > profile.family_cap:
        raise FamilyCapExceeded("undeletable-set family", would_be, profile.family_cap)

    out: list[frozenset] = []
    seen: set = set()
    for z in selections:
        zs = sorted(z)
        for r in range(min(slack, len(z)) + 1):
            for combo in combinations(zs, r):
                m_set = z - frozenset(combo)
                if m_set not in seen:
                    seen.add(m_set)
                    out.append(m_set)
    return out


def is_m_homogeneous(T: BipartiteTournament, M: Iterable[Vertex],
                     H: Iterable[Vertex], window: int) -> bool:
    """Can some topological sort of T - H put an M-vertex inside every
    ``window`` consecutive same-side positions?

    Topological sorts of an acyclic bipartite tournament permute only the
    canonical layers internally, so the decision reduces to a greedy pass
    per side: within each layer the M-vertices can cut the non-M run
    wherever we like, and minimizing the trailing run is always optimal.
    """
    if window < 1:
        raise ValueError("window must be positive")
    M = frozenset(M)
    H = frozenset(H)
    rem = T.remove(H)
    m_live = {rem.from_host[v] for v in M if v in rem.from_host}
    layers = canonical_sequence(rem.tournament)
    for side in ("A", "B"):
        run = 0
        for layer in layers:
            if not any(v.side == side for v in layer):
                continue
            m_i = sum(1 for v in layer if v in m_live)
            f_i = len(layer) - m_i
            if m_i == 0:
                run += f_i
            else:
                capacity = (window - 1 - run) + (m_i - 1) * (window - 1)
                run = max(0, f_i - capacity)
            if run >= window:
                return False
    return True


def derive_forced_p(T: BipartiteTournament, M: Iterable[Vertex]) -> frozenset:
    """Vertices outside M whose addition to M closes a cycle; any solution
    avoiding M must delete all of them."""
    M = frozenset(M)
    return frozenset(v for v in T.vertices()
                     if v not in M and not is_acyclic(T, M | {v}))


def seed_instances(T: BipartiteTournament, k: int,
                   profile: ConstantsProfile) -> list[CfvsInstance]:
    """One constrained instance per viable undeletable-set guess.

    Guesses with a cyclic induced subgraph admit no avoiding solution and
    are dropped; the empty guess carries no structure and is dropped too
    (the fallback solver covers it).
    """
    out = []
    for M in m_family(T, k, profile):
        if not M or not is_acyclic(T, M):
            continue
        P = derive_forced_p(T, M)
        out.append(CfvsInstance(T, M, P, frozenset(), k))
    return out


# ---------------------------------------------------------------------------
# oversized-block stage


def large_sets(inst: CfvsInstance, profile: ConstantsProfile) -> frozenset:
    """Union of oversized sub-blocks: X_i whose size reaches ``large_ratio``
    times its M-count, and Y_i of size at least ``large_ratio``."""
    live = live_structure(inst)
    ratio = profile.large_ratio
    picked: set = set()
    for (x, y) in live.seq.blocks:
        m_i = sum(1 for v in x if v in live.seq.m_set)
        if (m_i == 0 and len(x) >= ratio) or (m_i > 0 and len(x) >= ratio * m_i):
            picked |= x
        if len(y) >= ratio:
            picked |= y
    return frozenset(live.to_host[v] for v in picked)


def is_regular(inst: CfvsInstance, profile: ConstantsProfile) -> bool:
    """Every big X_i keeps an M share of at least 1/large_ratio, and every
    Y_i stays below large_ratio."""
    live = live_structure(inst)
    ratio = profile.large_ratio
    for (x, y) in live.seq.blocks:
        if len(y) > ratio:
            return False
        if len(x) >= ratio:
            m_i = sum(1 for v in x if v in live.seq.m_set)
            if m_i * ratio < len(x):
                return False
    return True


def stage_regular(inst: CfvsInstance, profile: ConstantsProfile) -> list[CfvsInstance]:
    """Force all oversized-sub-block vertices into the solution except an
    exempted subset B of size up to ``budget_slack``.

    Exemptions must include every M-vertex of the oversized union: children
    with forced M-vertices would violate the instance invariant and can
    never have a solution, so they are pruned rather than emitted.
    """
    big = large_sets(inst, profile)
    mandatory = big & inst.M
    slack = profile.budget_slack
    if len(mandatory) > slack:
        return []
    pool = sorted(big - inst.M)
    free = slack - len(mandatory)
    would_be = sum(comb(len(pool), r) for r in range(min(free, len(pool)) + 1))
    if would_be > profile.family_cap:
        raise FamilyCapExceeded("oversized-block stage", would_be, profile.family_cap)
    out = []
    for r in range(min(free, len(pool)) + 1):
        for combo in combinations(pool, r):
            exempt = mandatory | frozenset(combo)
            forced = big - exempt
            new_p = inst.P | forced
            if len(new_p) > inst.k:
                continue  # cannot be part of any budget-k solution
            child = replace(inst, P=new_p)
            if is_regular(child, profile):
                out.append(child)
    return out


# ---------------------------------------------------------------------------
# back-edge coupling stage


def long_back(inst: CfvsInstance) -> frozenset:
    """All back edges jumping at least two blocks, as host arcs."""
    live = live_structure(inst)
    return frozenset((u, w) for (u, w, bi, bj) in live.host_back_edges()
                     if bi - bj >= 2)


def short_back_large(inst: CfvsInstance, profile: ConstantsProfile) -> frozenset:
    """Union of the consecutive-block back-edge sets whose matching size
    reaches ``weak_matching``, as host arcs."""
    live = live_structure(inst)
    by_pair: dict = {}
    for (u, w, bi, bj) in live.host_back_edges():
        if bi - bj == 1:
            by_pair.setdefault(bj, []).append((u, w))
    picked: set = set()
    for bj, edges in by_pair.items():
        if len(max_bipartite_matching(edges)) >= profile.weak_matching:
            picked.update(edges)
    return frozenset(picked)


def is_weakly_coupled(inst: CfvsInstance, profile: ConstantsProfile) -> bool:
    """F's live edges are conflict back edges, every long back edge is in F,
    and after removing F the per-pair back-edge matchings stay small.

    Edges of F already covered by P are vacuous and exempt from the back-edge
    requirement.
    """
    live = live_structure(inst)
    hbe = live.host_back_edges()
    back_map = {(u, w): (bi, bj) for (u, w, bi, bj) in hbe}
    live_f = inst.live_f()
    m_host = inst.M
    for (u, w) in live_f:
        if (u, w) not in back_map:
            return False
        bi, bj = back_map[(u, w)]
        e = _host_back_edge(live, u, w, bi, bj)
        if not is_conflict_back_edge(inst.T, m_host, e):
            return False
    for (u, w, bi, bj) in hbe:
        if bi - bj >= 2 and (u, w) not in inst.F:
            return False
    by_pair: dict = {}
    for (u, w, bi, bj) in hbe:
        if bi - bj == 1 and (u, w) not in inst.F:
            by_pair.setdefault(bj, []).append((u, w))
    return all(len(max_bipartite_matching(edges)) <= profile.weak_matching
               for edges in by_pair.values())


def _host_back_edge(live: LiveView, u, w, bi, bj):
    from .msequence import BackEdge
    return BackEdge(u, w, bi, bj)


def stage_weak(inst: CfvsInstance, profile: ConstantsProfile) -> list[CfvsInstance]:
    """Commit to covering the heavily-matched short back edges minus an
    exempted subset B, plus every long back edge (and anything the parent
    already required)."""
    big = short_back_large(inst, profile)
    longs = long_back(inst)
    pool = sorted(big)
    slack = profile.budget_slack
    would_be = sum(comb(len(pool), r) for r in range(min(slack, len(pool)) + 1))
    if would_be > profile.family_cap:
        raise FamilyCapExceeded("back-edge coupling stage", would_be, profile.family_cap)
    out = []
    for r in range(min(slack, len(pool)) + 1):
        for combo in combinations(pool, r):
            f_new = (big - frozenset(combo)) | longs | inst.F
            child = replace(inst, F=f_new)
            if is_weakly_coupled(child, profile):
                out.append(child)
    return out


# ---------------------------------------------------------------------------
# conflict-graph branching stage


def is_matched(inst: CfvsInstance) -> bool:
    """Do the live constraint edges form a matching?"""
    seen: set = set()
    for (u, w) in inst.live_f():
        if u in seen or w in seen:
            return False
        seen.add(u)
        seen.add(w)
    return True


def matched_branching(edges: Iterable[tuple], budget: int,
                      cap: int | None = None) -> list[frozenset]:
    """Two-way branching on vertices meeting two or more constraint edges:
    either the vertex joins the solution, or all its edge-neighbors do.

    Returns the vertex sets added along each surviving branch; a branch is
    pruned when its additions exceed the budget or when the residual edges
    (pairwise disjoint ones counted greedily) cannot fit the remainder.
    Leaves have maximum degree one, i.e. a matching of residual edges.
    The one-or-two cost split per branch keeps the number of leaves with s
    additions within the (s+2)nd Fibonacci number.
    """
    edges = sorted(set(tuple(e) for e in edges))
    leaves: list[frozenset] = []
    visited = 0

    def residual_lower_bound(es: list) -> int:
        used: set = set()
        count = 0
        for (u, w) in es:
            if u in used or w in used:
                continue
            used.update((u, w))
            count += 1
        return count

    def rec(es: list, added: frozenset, left: int):
        nonlocal visited
        visited += 1
        if cap is not None and visited > cap:
            raise FamilyCapExceeded("conflict branching", visited, cap)
        if left < 0 or residual_lower_bound(es) > left:
            return
        deg: dict = {}
        for (u, w) in es:
            deg[u] = deg.get(u, 0) + 1
            deg[w] = deg.get(w, 0) + 1
        heavy = sorted(v for v, d in deg.items() if d >= 2)
        if not heavy:
            leaves.append(added)
            return
        v = heavy[0]
        # v joins the solution
        rec([e for e in es if v not in e], added | {v}, left - 1)
        # v stays; all its edge-neighbors join
        nbrs = frozenset(u if w == v else w for (u, w) in es if v in (u, w))
        rest = [e for e in es if not (set(e) & nbrs)]
        rec(rest, added | nbrs, left - len(nbrs))

    rec(edges, frozenset(), budget)
    return leaves


def stage_matched(inst: CfvsInstance, profile: ConstantsProfile) -> list[CfvsInstance]:
    """Branch until the live constraint edges form a matching; children keep
    F and grow P by the branch additions."""
    live_edges = inst.live_f()
    remaining = inst.k - len(inst.P)
    if remaining < 0:
        return []
    out = []
    for added in matched_branching(live_edges, remaining, cap=profile.family_cap):
        child = replace(inst, P=inst.P | added)
        if is_regular(child, profile) and is_weakly_coupled(child, profile) \
                and is_matched(child):
            out.append(child)
    return out


# ---------------------------------------------------------------------------
# block-degree cleaning stage


def is_low_block_degree(inst: CfvsInstance, profile: ConstantsProfile) -> bool:
    """Every long back edge is required by F, and each block sees at most
    ``block_degree`` constraint edges whose other endpoint was already
    forced into P."""
    live = live_structure(inst)
    hbe = live.host_back_edges()
    for (u, w, bi, bj) in hbe:
        if bi - bj >= 2 and (u, w) not in inst.F:
            return False
    block_of = {}
    for i, (x, y) in enumerate(live.host_blocks()):
        for v in x | y:
            block_of[v] = i
    ghost = [(u, w) for (u, w) in inst.F
             if u in inst.P or w in inst.P]
    counts: dict = {}
    for (u, w) in ghost:
        for v in (u, w):
            if v in block_of:
                counts[block_of[v]] = counts.get(block_of[v], 0) + 1
    return all(c <= profile.block_degree for c in counts.values())


def stage_lowblockdegree(inst: CfvsInstance, profile: ConstantsProfile) -> list[CfvsInstance]:
    """Clean the blocks with heavy constraint-edge incidence.

    For every family of heavy blocks, every guess of the surviving fringe
    vertices M' (with its ordering), the non-surviving conflicting vertices,
    the back-edge neighbors of the fringe, a minimum cover of the remaining
    back edges, and a preferred cover of the incident constraint edges are
    all forced into P.  Children that force an M-vertex are impossible and
    pruned.
    """
    if not is_weakly_coupled(inst, profile):
        raise PreconditionViolated("weakly-coupled")
    if not is_matched(inst):
        raise PreconditionViolated("matched")
    live = live_structure(inst)
    host_blocks = live.host_blocks()
    block_of: dict = {}
    for i, (x, y) in enumerate(host_blocks):
        for v in x | y:
            block_of[v] = i
    live_f = sorted(inst.live_f())
    incid: dict = {}
    for (u, w) in live_f:
        for v in (u, w):
            if v in block_of:
                incid[block_of[v]] = incid.get(block_of[v], 0) + 1
    candidates = sorted(i for i, c in incid.items() if c >= profile.block_degree)
    t_cap = max(0, (2 * inst.k) // profile.block_degree)
    hbe = live.host_back_edges()

    out = []
    work = 0

    def bump(n=1):
        nonlocal work
        work += n
        if work > profile.family_cap:
            raise FamilyCapExceeded("block-degree stage", work, profile.family_cap)

    for fam_size in range(min(t_cap, len(candidates)) + 1):
        for fam in combinations(candidates, fam_size):
            bump()
            fam = set(fam)
            x_union: set = set()
            y_union: set = set()
            pool: set = set()
            for i in fam:
                x, y = host_blocks[i]
                x_union |= x
                y_union |= y
                pool |= (x - inst.M) | y
                for j in (i - 1, i + 1):
                    if 0 <= j < len(host_blocks):
                        pool |= host_blocks[j][0] - inst.M
            pool = sorted(pool)
            m_cap = 3 * profile.hom_window * max(1, len(fam))
            for fringe_size in range(min(m_cap, len(pool)) + 1):
                for fringe in combinations(pool, fringe_size):
                    bump()
                    fringe = frozenset(fringe)
                    p1 = set(inst.P) | (y_union - fringe)
                    # back-edge neighbors of the fringe
                    for (u, w, _, _) in hbe:
                        if u in fringe and w not in fringe:
                            p1.add(w)
                        elif w in fringe and u not in fringe:
                            p1.add(u)
                    for order in permutations(sorted(fringe)):
                        bump()
                        p2 = set(p1)
                        for v in sorted(x_union - fringe - inst.M):
                            if not consistent_with_mixed(inst.T, list(order), v):
                                p2.add(v)
                        rem_back = [(u, w) for (u, w, _, _) in hbe
                                    if (u in x_union - fringe or w in x_union - fringe)
                                    and u not in p2 and w not in p2]
                        for cover in enumerate_min_vertex_covers(rem_back,
                                                                 cap=profile.family_cap):
                            bump()
                            p3 = p2 | cover
                            q_edges = [(u, w) for (u, w) in live_f
                                       if (u in (x_union | y_union) or w in (x_union | y_union))
                                       and u not in p3 and w not in p3]
                            p4 = p3 | x_preferred_cover(q_edges, x_union | y_union)
                            if p4 & inst.M or len(p4) > inst.k:
                                continue
                            child = replace(inst, P=frozenset(p4))
                            if is_low_block_degree(child, profile):
                                out.append(child)
    # deduplicate children that different guesses collapse onto
    seen: set = set()
    unique = []
    for child in out:
        key = (child.P, child.F)
        if key not in seen:
            seen.add(key)
            unique.append(child)
    return unique


# ---------------------------------------------------------------------------
# decoupling stage and the endgame reduction


def partition_parts(inst: CfvsInstance, profile: ConstantsProfile) -> list[frozenset]:
    """Greedy split of the blocks into consecutive runs, cutting whenever
    the run's feedback-vertex-set size (via the 4-approximation, run with
    budget ``part_fvs_f``) or its live constraint-edge incidence reaches the
    respective window.  The final run may satisfy neither window."""
    for name, pred in (("regular", is_regular), ("weakly-coupled", is_weakly_coupled)):
        if not pred(inst, profile):
            raise PreconditionViolated(name)
    if not is_matched(inst):
        raise PreconditionViolated("matched")
    if not is_low_block_degree(inst, profile):
        raise PreconditionViolated("low-block-degree")
    live = live_structure(inst)
    blocks = [x | y for (x, y) in live.host_blocks()]
    live_f = inst.live_f()
    parts: list[frozenset] = []
    current: set = set()
    for blk in blocks:
        current |= blk
        approx = approx4(inst.T.induced(current).tournament, profile.part_fvs_f)
        fvs_hit = approx is None or len(approx) >= profile.part_fvs_f
        deg = sum(1 for (u, w) in live_f if u in current or w in current)
        if fvs_hit or deg >= profile.part_degree_d:
            parts.append(frozenset(current))
            current = set()
    if current:
        parts.append(frozenset(current))
    return parts


def _split_ok(inst: CfvsInstance, profile: ConstantsProfile,
              parts: list[frozenset], live: LiveView) -> bool:
    """Does this particular consecutive-block split witness decoupling?"""
    t_limit = max(1, inst.k // profile.part_fvs_f)
    if len(parts) > t_limit:
        return False
    live_f = inst.live_f()
    d = profile.part_degree_d
    deg_lo = max(1, (200 * d) // 201)
    for part in parts:
        sub = inst.T.induced(part).tournament
        approx = approx4(sub, sub.num_vertices)
        size = len(approx)
        window_fvs = profile.part_fvs_f <= size <= 4 * profile.part_fvs_f
        deg = sum(1 for (u, w) in live_f if u in part or w in part)
        window_deg = deg_lo <= deg <= d
        if not (window_fvs or window_deg):
            return False
    part_of: dict = {}
    for i, part in enumerate(parts):
        for v in part:
            part_of[v] = i
    for (u, w, bi, bj) in live.host_back_edges():
        if bi - bj != 1 or (u, w) in inst.F:
            continue
        if part_of.get(u) == part_of.get(w):
            continue
        e = _host_back_edge(live, u, w, bi, bj)
        if is_conflict_back_edge(inst.T, inst.M, e):
            return False
    return True


def find_decoupling(inst: CfvsInstance, profile: ConstantsProfile) -> list[frozenset] | None:
    """A consecutive-block partition witnessing decoupling, or None.

    The greedy window partition is tried first when its preconditions hold;
    every other consecutive split is searched after that (the definition
    only asks for existence, independent of the other stage predicates).
    The exhaustive search is skipped when 2^(blocks-1) exceeds the family
    cap; the greedy split then decides alone.
    """
    live = live_structure(inst)
    greedy: list[frozenset] | None = None
    try:
        greedy = partition_parts(inst, profile)
    except PreconditionViolated:
        pass
    if greedy is not None and _split_ok(inst, profile, greedy, live):
        return greedy
    blocks = [x | y for (x, y) in live.host_blocks()]
    l = len(blocks)
    if l == 0 or 2 ** (l - 1) > profile.family_cap:
        return None
    for cuts in range(2 ** (l - 1)):
        parts: list[frozenset] = []
        current: set = set(blocks[0])
        for i in range(1, l):
            if (cuts >> (i - 1)) & 1:
                parts.append(frozenset(current))
                current = set()
            current |= blocks[i]
        parts.append(frozenset(current))
        if parts == greedy:
            continue
        if _split_ok(inst, profile, parts, live):
            return parts
    return None


def is_decoupled(inst: CfvsInstance, profile: ConstantsProfile,
                 parts: list[frozenset] | None = None) -> bool:
    """Is there a consecutive-block partition within the part-count bound
    whose parts each hit a window, with F carrying the cross-part short
    conflict back edges?  With ``parts`` given, checks that split alone."""
    if parts is not None:
        return _split_ok(inst, profile, parts, live_structure(inst))
    return find_decoupling(inst, profile) is not None


def stage_decoupled(inst: CfvsInstance, profile: ConstantsProfile) -> list[CfvsInstance]:
    """Resolve cross-part back edges: guess the subset B left uncovered,
    then branch over the sides of a minimum vertex cover D of the rest
    (each subset C of D joins the solution together with the uncovered
    neighbors of D - C)."""
    parts = partition_parts(inst, profile)
    part_of: dict = {}
    for i, part in enumerate(parts):
        for v in part:
            part_of[v] = i
    live = live_structure(inst)
    cross = sorted({(u, w) for (u, w, _, _) in live.host_back_edges()
                    if part_of.get(u) != part_of.get(w)})
    cap_b = 2 * len(parts) * (2 * profile.hom_window ** 2)
    would_be = sum(comb(len(cross), r) for r in range(min(cap_b, len(cross)) + 1))
    if would_be > profile.family_cap:
        raise FamilyCapExceeded("decoupling stage", would_be, profile.family_cap)
    out = []
    seen: set = set()
    work = 0
    for r in range(min(cap_b, len(cross)) + 1):
        for combo in combinations(cross, r):
            uncovered = set(combo)
            must_hit = [e for e in cross if e not in uncovered]
            cover = sorted(min_vertex_cover(must_hit))
            neigh: dict = {}
            for (u, w) in must_hit:
                neigh.setdefault(u, set()).add(w)
                neigh.setdefault(w, set()).add(u)
            work += 2 ** len(cover)
            if work > profile.family_cap:
                raise FamilyCapExceeded("decoupling stage", work, profile.family_cap)
            for csize in range(len(cover) + 1):
                for chosen in combinations(cover, csize):
                    chosen = set(chosen)
                    forced = set(chosen)
                    for v in cover:
                        if v not in chosen:
                            forced |= neigh.get(v, set())
                    new_p = inst.P | forced
                    if new_p & inst.M or len(new_p) > inst.k:
                        continue
                    child = replace(inst, P=frozenset(new_p))
                    key = (child.P, child.F)
                    if key in seen:
                        continue
                    seen.add(key)
                    if is_regular(child, profile) and is_weakly_coupled(child, profile) \
                            and is_matched(child) and is_low_block_degree(child, profile) \
                            and is_decoupled(child, profile):
                        out.append(child)
    return out


class DfvcReduction(NamedTuple):
    instance: DfvcInstance
    to_host: dict  # (part_index, local vertex) -> host vertex


def to_dfvc(inst: CfvsInstance, profile: ConstantsProfile) -> DfvcReduction:
    """Package a decoupled instance as a mixed multigraph: the parts keep
    their induced tournaments, the live cross-part constraint edges become
    undirected, M becomes the forbidden set, and the budget drops by |P|.

    Constraint edges already covered by P have an endpoint outside the
    graph and nothing left to enforce, so only live edges cross over.
    """
    parts = find_decoupling(inst, profile)
    if parts is None:
        raise PreconditionViolated("decoupled")
    part_of: dict = {}
    for i, part in enumerate(parts):
        for v in part:
            part_of[v] = i
    tournaments = []
    from_host_maps = []
    to_host: dict = {}
    for i, part in enumerate(parts):
        sub = inst.T.induced(part)
        tournaments.append(sub.tournament)
        from_host_maps.append(sub.from_host)
        for local, host in sub.to_host.items():
            to_host[(i, local)] = host
    undirected = []
    for (u, w) in sorted(inst.live_f()):
        pi, pj = part_of.get(u), part_of.get(w)
        if pi is None or pj is None or pi == pj:
            continue
        undirected.append(((pi, from_host_maps[pi][u]), (pj, from_host_maps[pj][w])))
    forbidden = frozenset((part_of[v], from_host_maps[part_of[v]][v])
                          for v in inst.M if v in part_of)
    graph = MixedMultigraph(tournaments, undirected)
    return DfvcReduction(
        DfvcInstance(graph, forbidden, inst.k - len(inst.P)), to_host)


# ---------------------------------------------------------------------------
# driver


STAGES = ("seed", "regular", "weak", "matched", "lowblockdegree", "decoupled")


class PipelineResult(NamedTuple):
    status: SolveStatus
    solution: frozenset | None
    stats: SolveStats
    trace: tuple[tuple[str, int], ...]
    diagnostics: tuple[str, ...]
    used_fallback: bool

    @property
    def found(self) -> bool:
        return self.status is SolveStatus.SOLUTION


def run_cascade(T: BipartiteTournament, k: int, profile: ConstantsProfile,
                collect=None) -> tuple[list[CfvsInstance], list[tuple[str, int]], list[str]]:
    """Run all six stages, returning the final family, a per-stage size
    trace, and diagnostics for stages that overflowed their caps.

    ``collect(stage_name, parent, children)`` is invoked per expansion when
    given; parents whose expansion overflows are skipped (their subtree is
    lost, which only costs completeness, never soundness).
    """
    trace: list[tuple[str, int]] = []
    diagnostics: list[str] = []
    try:
        family = seed_instances(T, k, profile)
    except FamilyCapExceeded as exc:
        return [], [("seed", 0)], [str(exc)]
    if collect is not None:
        collect("seed", None, family)
    trace.append(("seed", len(family)))
    stage_fns = (("regular", stage_regular), ("weak", stage_weak),
                 ("matched", stage_matched),
                 ("lowblockdegree", stage_lowblockdegree),
                 ("decoupled", stage_decoupled))
    for name, fn in stage_fns:
        nxt: list[CfvsInstance] = []
        for parent in family:
            try:
                children = fn(parent, profile)
            except FamilyCapExceeded as exc:
                diagnostics.append(f"{name}: {exc}")
                continue
            except PreconditionViolated as exc:
                diagnostics.append(f"{name}: {exc}")
                continue
            if collect is not None:
                collect(name, parent, children)
            nxt.extend(children)
            if len(nxt) > profile.family_cap:
                diagnostics.append(
                    f"{name}: accumulated family exceeds cap {profile.family_cap}; "
                    "remaining parents skipped")
                break
        family = nxt
        trace.append((name, len(family)))
    return family, trace, diagnostics


def pipeline_solve(T: BipartiteTournament, k: int,
                   profile: ConstantsProfile | None = None,
                   workers: int = 1, collect=None) -> PipelineResult:
    """Full composition: reduce, seed, cascade, endgame, verify -- with an
    unconditional fallback to the branching solver.

    Every candidate answer is re-verified against the original tournament
    before being returned, so a yes is always a real feedback vertex set of
    size at most k regardless of the profile; when the cascade produces
    nothing usable the fallback answers, so the result is always correct.
    ``collect`` is forwarded to the cascade for family inspection.
    """
    if profile is None:
        profile = ConstantsProfile.for_budget(max(k, 0))
    t0 = time.perf_counter()
    diagnostics: list[str] = []
    if k < 0:
        return PipelineResult(SolveStatus.NO_SOLUTION, None,
                              SolveStats(0, _ms(t0)), (), (), False)
    red = reduce_instance(T, k)
    work = red.tournament
    if work.num_vertices == 0:
        # reduction removed everything: the input was square-free
        return PipelineResult(SolveStatus.SOLUTION, frozenset(),
                              SolveStats(0, _ms(t0)), (("reduce", 0),), (), False)
    family, trace, diags = run_cascade(work, k, profile, collect=collect)
    diagnostics.extend(diags)

    jobs = []
    for child in family:
        try:
            reduction = to_dfvc(child, profile)
        except (PreconditionViolated, FamilyCapExceeded) as exc:
            diagnostics.append(f"endgame: {exc}")
            continue
        jobs.append((child, reduction))

    def attempt(job):
        child, reduction = job
        res = dfvc_solve(reduction.instance)
        if not res.found:
            return None
        lifted_work = child.P | {reduction.to_host[gv] for gv in res.solution}
        lifted = frozenset(red.to_host[v] for v in lifted_work)
        if len(lifted) <= k and verify_fvs(T, lifted):
            return lifted
        return None

    answer = None
    if workers > 1 and len(jobs) > 1:
        import concurrent.futures
        with concurrent.futures.ThreadPoolExecutor(max_workers=workers) as pool:
            for result in pool.map(attempt, jobs):
                if result is not None:
                    answer = result
                    break
    else:
        for job in jobs:
            result = attempt(job)
            if result is not None:
                answer = result
                break

    if answer is not None:
        return PipelineResult(SolveStatus.SOLUTION, answer,
                              SolveStats(len(jobs), _ms(t0)),
                              tuple(trace), tuple(diagnostics), False)

    fb = branch_solve(T, Constraints(budget=k))
    return PipelineResult(fb.status, fb.solution,
                          SolveStats(fb.stats.nodes, _ms(t0)),
                          tuple(trace), tuple(diagnostics), True)


def _ms(t0: float) -> float:
    return (time.perf_counter() - t0) * 1000.0
