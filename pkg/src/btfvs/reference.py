"""Definition-literal reference implementations.

Everything here is deliberately written the slow, obvious way -- straight
from the definitions, sharing no code path with the production
implementations -- so the two can be played against each other by the
verification suite.  None of it is meant for instances beyond desk scale.
"""

from __future__ import annotations

from itertools import combinations

from .graph import SIDE_A, SIDE_B, BipartiteTournament, Vertex
from .msequence import Classification, ClassKind


def dfs_has_cycle(T: BipartiteTournament, within: set | None = None) -> bool:
    """Plain DFS cycle detection; independent of both peeling and squares."""
    verts = T.vertices() if within is None else sorted(within)
    vset = set(verts)
    color: dict = {}

    def visit(u: Vertex) -> bool:
        color[u] = 1
        for w in sorted(T.out_neighbors(u)):
            if w not in vset:
                continue
            c = color.get(w, 0)
            if c == 1:
                return True
            if c == 0 and visit(w):
                return True
        color[u] = 2
        return False

    return any(color.get(v, 0) == 0 and visit(v) for v in verts)


def brute_squares(T: BipartiteTournament, within: set | None = None) -> list[tuple]:
    """All squares by raw 4-tuple enumeration."""
    if within is None:
        within = set(T.vertices())
    a_side = sorted(v for v in within if v.side == SIDE_A)
    b_side = sorted(v for v in within if v.side != SIDE_A)
    out = []
    for a in a_side:
        for b in b_side:
            for a2 in a_side:
                for b2 in b_side:
                    if a == a2 or b == b2:
                        continue
                    if T.has_arc(a, b) and T.has_arc(b, a2) and \
                            T.has_arc(a2, b2) and T.has_arc(b2, a):
                        out.append((a, b, a2, b2))
    return out


def all_topological_sorts(T: BipartiteTournament, limit: int | None = None) -> list[list[Vertex]]:
    """Every topological sort, by recursive in-degree-zero choice."""
    verts = T.vertices()
    results: list[list[Vertex]] = []
    indeg = {v: len(T.in_neighbors(v)) for v in verts}

    def rec(prefix: list[Vertex], remaining: set):
        if limit is not None and len(results) >= limit:
            return
        if not remaining:
            results.append(list(prefix))
            return
        for v in sorted(remaining):
            if all(u not in remaining for u in T.in_neighbors(v)):
                prefix.append(v)
                remaining.discard(v)
                rec(prefix, remaining)
                remaining.add(v)
                prefix.pop()

    rec([], set(verts))
    return results


def classify_brute(T: BipartiteTournament, M: frozenset, v: Vertex) -> list[Classification]:
    """Every classification tag ``v`` satisfies, tested definition by
    definition.  A correct build sees exactly one tag per vertex.

    Universality is decided by literally searching for a topological sort of
    T[M + v] with v first or last.
    """
    sub = T.induced(M)
    from .structure import canonical_sequence
    canon = [frozenset(sub.to_host[u] for u in layer)
             for layer in canonical_sequence(sub.tournament)]
    tags: list[Classification] = []

    # equivalent: same M-neighborhoods as some vertex of some layer
    for i, layer in enumerate(canon):
        if any(T.out_neighbors(v, M) == T.out_neighbors(u, M)
               and T.in_neighbors(v, M) == T.in_neighbors(u, M)
               for u in layer):
            tags.append(Classification(ClassKind.EQUIVALENT, i))

    # conflicting: both kinds of neighbors inside layer i, none wrongly
    # placed outside it
    for i, layer in enumerate(canon):
        if not (T.out_neighbors(v, layer) and T.in_neighbors(v, layer)):
            continue
        if any(T.out_neighbors(v, canon[j]) for j in range(i)):
            continue
        if any(T.in_neighbors(v, canon[j]) for j in range(i + 1, len(canon))):
            continue
        tags.append(Classification(ClassKind.CONFLICTING, i))

    # universal: not equivalent anywhere, T[M + v] acyclic, and some
    # topological sort of it starts or ends with v
    if not any(t.kind is ClassKind.EQUIVALENT for t in tags):
        ext = T.induced(M | {v})
        if not dfs_has_cycle(ext.tournament):
            v_new = ext.from_host[v]
            sorts = all_topological_sorts(ext.tournament)
            if any(s[0] == v_new for s in sorts):
                tags.append(Classification(ClassKind.UNIVERSAL_MINUS))
            if any(s[-1] == v_new for s in sorts):
                tags.append(Classification(ClassKind.UNIVERSAL_PLUS))
    return tags


def enumerate_fvs_avoiding(T: BipartiteTournament, avoid: frozenset,
                           max_size: int | None = None) -> list[frozenset]:
    """All feedback vertex sets disjoint from ``avoid`` (any size by
    default), by subset enumeration."""
    from .solvers import verify_fvs
    pool = sorted(set(T.vertices()) - avoid)
    hi = len(pool) if max_size is None else min(max_size, len(pool))
    out = []
    for size in range(hi + 1):
        for combo in combinations(pool, size):
            if verify_fvs(T, combo):
                out.append(frozenset(combo))
    return out


def window_property_brute(T: BipartiteTournament, M: frozenset, H: frozenset,
                          window: int) -> bool:
    """Does SOME topological sort of T - H place an M-vertex inside every
    ``window`` consecutive positions of each side?  Brute force over all
    topological sorts; only for tiny remainders."""
    rem = T.remove(H)
    sub = rem.tournament
    m_sub = {rem.from_host[v] for v in M if v in rem.from_host}
    for order in all_topological_sorts(sub):
        if _windows_ok(order, m_sub, sub, window):
            return True
    return False


def _windows_ok(order, m_set, T: BipartiteTournament, window: int) -> bool:
    for side in (SIDE_A, SIDE_B):
        run = 0
        for v in order:
            if v.side != side:
                continue
            if v in m_set:
                run = 0
            else:
                run += 1
                if run >= window:
                    return False
    return True


def min_vertex_covers_brute(edges: list[tuple]) -> list[frozenset]:
    """All minimum vertex covers of an edge list, by subset enumeration."""
    verts = sorted({v for e in edges for v in e})
    for size in range(len(verts) + 1):
        found = [frozenset(c) for c in combinations(verts, size)
                 if all(u in c or w in c for (u, w) in edges)]
        if found:
            return found
    return [frozenset()]


def max_matching_size_brute(edges: list[tuple]) -> int:
    """Maximum matching size by subset enumeration over edge subsets."""
    best = 0
    for size in range(len(edges), 0, -1):
        if size <= best:
            break
        for combo in combinations(edges, size):
            seen: set = set()
            ok = True
            for (u, w) in combo:
                if u in seen or w in seen:
                    ok = False
                    break
                seen.add(u)
                seen.add(w)
            if ok:
                best = max(best, size)
                break
    return best


def dfvc_oracle(graph, forbidden: set, budget: int | None = None):
    """Minimum deletion set for a mixed multigraph by subset enumeration:
    must hit every undirected edge and leave every part acyclic.

    Returns (size, solution) or (None, None) when no valid set exists within
    the budget.
    """
    verts = [gv for gv in graph.vertices() if gv not in forbidden]
    hi = len(verts) if budget is None else min(budget, len(verts))
    for size in range(hi + 1):
        for combo in combinations(verts, size):
            chosen = set(combo)
            if not all(a in chosen or b in chosen for a, b in graph.undirected):
                continue
            ok = True
            for pi, part in enumerate(graph.parts):
                keep = {v for v in part.vertices() if (pi, v) not in chosen}
                if dfs_has_cycle(part, keep):
                    ok = False
                    break
            if ok:
                return size, frozenset(chosen)
    return None, None


# ---------------------------------------------------------------------------
# definition-literal checkers for the constrained-instance predicates.
# Block structure is rebuilt from the brute-force classifier, matchings and
# covers from subset enumeration, so none of this shares code with the
# production predicates.


def brute_blocks(T: BipartiteTournament, M: frozenset) -> list[tuple[set, set]]:
    """Block partition recomputed vertex by vertex from classify_brute."""
    from .structure import canonical_sequence
    sub = T.induced(M)
    l = len(canonical_sequence(sub.tournament))
    xs: list = [set() for _ in range(l)]
    ys: list = [set() for _ in range(l)]
    for v in T.vertices():
        tags = classify_brute(T, M, v)
        assert len(tags) == 1, f"classification not unique for {v!r}"
        tag = tags[0]
        kind = tag.kind.value
        if kind == "equivalent":
            xs[tag.block].add(v)
        elif kind == "conflicting":
            ys[tag.block].add(v)
        elif kind == "universal-":
            ys[0].add(v)
        else:
            ys[l - 1].add(v)
    return list(zip(xs, ys))


def _live_blocks(inst) -> tuple[list[tuple[set, set]], dict]:
    live = inst.T.remove(inst.P)
    m_live = frozenset(live.from_host[v] for v in inst.M)
    blocks = brute_blocks(live.tournament, m_live)
    host_blocks = [({live.to_host[v] for v in x}, {live.to_host[v] for v in y})
                   for (x, y) in blocks]
    idx = {}
    for i, (x, y) in enumerate(host_blocks):
        for v in x | y:
            idx[v] = i
    return host_blocks, idx


def _live_f(inst) -> set:
    return {(u, w) for (u, w) in inst.F if u not in inst.P and w not in inst.P}


def _closes_square_with_two_m(T, M, u, w) -> bool:
    return any(T.has_arc(w, m1) and T.has_arc(m1, m2) and T.has_arc(m2, u)
               for m1 in M for m2 in M)


def regular_ref(inst, profile) -> bool:
    blocks, _ = _live_blocks(inst)
    m_set = set(inst.M)
    for (x, y) in blocks:
        if len(y) > profile.large_ratio:
            return False
        if len(x) >= profile.large_ratio:
            if len(x & m_set) < len(x) / profile.large_ratio:
                return False
    return True


def matched_ref(inst) -> bool:
    seen: set = set()
    for (u, w) in _live_f(inst):
        if u in seen or w in seen:
            return False
        seen.update((u, w))
    return True


def weakly_coupled_ref(inst, profile) -> bool:
    blocks, idx = _live_blocks(inst)
    for (u, w) in _live_f(inst):
        if idx[u] - idx[w] < 1:
            return False
        if not _closes_square_with_two_m(inst.T, inst.M, u, w):
            return False
    backs = [(u, w) for (u, w) in inst.T.arcs()
             if u in idx and w in idx and idx[u] > idx[w]]
    for (u, w) in backs:
        if idx[u] - idx[w] >= 2 and (u, w) not in inst.F:
            return False
    for j in range(len(blocks) - 1):
        pair = [(u, w) for (u, w) in backs
                if idx[u] == j + 1 and idx[w] == j and (u, w) not in inst.F]
        if max_matching_size_brute(pair) > profile.weak_matching:
            return False
    return True


def low_block_degree_ref(inst, profile) -> bool:
    _, idx = _live_blocks(inst)
    backs = [(u, w) for (u, w) in inst.T.arcs()
             if u in idx and w in idx and idx[u] > idx[w]]
    if any(idx[u] - idx[w] >= 2 and (u, w) not in inst.F for (u, w) in backs):
        return False
    counts: dict = {}
    for (u, w) in inst.F:
        if u in inst.P or w in inst.P:
            for v in (u, w):
                if v in idx:
                    counts[idx[v]] = counts.get(idx[v], 0) + 1
    return all(c <= profile.block_degree for c in counts.values())


def _greedy_square_deletion_size(T, keep: set) -> int:
    """Independent re-coding of the factor-4 heuristic: repeatedly drop the
    first square found by raw enumeration."""
    alive = set(keep)
    deleted = 0
    while True:
        squares = brute_squares(T, alive)
        if not squares:
            return deleted
        for v in squares[0]:
            alive.discard(v)
        deleted += 4


def decoupled_ref(inst, profile) -> bool:
    """Existential search over consecutive-block splits, windows checked via
    an independently coded greedy square-deletion size."""
    blocks, idx = _live_blocks(inst)
    merged = [x | y for (x, y) in blocks]
    l = len(merged)
    live_f = _live_f(inst)
    t_limit = max(1, inst.k // profile.part_fvs_f)
    d = profile.part_degree_d
    deg_lo = max(1, (200 * d) // 201)

    backs = [(u, w) for (u, w) in inst.T.arcs()
             if u in idx and w in idx and idx[u] - idx[w] == 1]

    def split_ok(parts) -> bool:
        if len(parts) > t_limit:
            return False
        for part in parts:
            size = _greedy_square_deletion_size(inst.T, set(part))
            win_f = profile.part_fvs_f <= size <= 4 * profile.part_fvs_f
            deg = sum(1 for (u, w) in live_f if u in part or w in part)
            if not (win_f or deg_lo <= deg <= d):
                return False
        part_of = {v: i for i, part in enumerate(parts) for v in part}
        for (u, w) in backs:
            if (u, w) in inst.F or part_of[u] == part_of[w]:
                continue
            if _closes_square_with_two_m(inst.T, inst.M, u, w):
                return False
        return True

    if l == 0:
        return True
    for cuts in range(2 ** (l - 1)):
        parts = []
        current = set(merged[0])
        for i in range(1, l):
            if (cuts >> (i - 1)) & 1:
                parts.append(frozenset(current))
                current = set()
            current |= merged[i]
        parts.append(frozenset(current))
        if split_ok(parts):
            return True
    return False
