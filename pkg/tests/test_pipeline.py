from __future__ import annotations

import pytest

from btfvs.errors import FamilyCapExceeded, PreconditionViolated
from btfvs.generators import GenKind, GenSpec, SplitMix64, generate
from btfvs.msequence import m_sequence
from btfvs.pipeline import (STAGES, CfvsInstance, ConstantsProfile,
                            derive_forced_p, is_decoupled, is_low_block_degree,
                            is_m_homogeneous, is_matched, is_regular,
                            is_weakly_coupled, long_back,
                            m_family, matched_branching, partition_parts,
                            pipeline_solve, run_cascade, seed_instances,
                            stage_decoupled, stage_regular, stage_weak,
                            to_dfvc)
from btfvs.reference import window_property_brute
from btfvs.samplespace import twise_space_size
from btfvs.solvers import SolveStatus, oracle_min_fvs, verify_fvs
from btfvs.structure import is_acyclic

from conftest import a, b, tournament

TOY = ConstantsProfile.toy()


def seeded_cfvs(seed: int, max_side=4, k=3):
    """A CFVS instance with nonempty M derived from a random tournament."""
    rng = SplitMix64(seed)
    m = 2 + rng.below(max_side - 1)
    n = 2 + rng.below(max_side - 1)
    T = generate(GenSpec(m, n, GenKind.UNIFORM_RANDOM, seed=seed))
    from btfvs.solvers import exact_min_fvs
    H = exact_min_fvs(T)
    rest = sorted(set(T.vertices()) - H)
    if not rest:
        return None
    M = frozenset(rng.sample(rest, 1 + rng.below(len(rest))))
    if not is_acyclic(T, M):
        return None
    P = derive_forced_p(T, M)
    return CfvsInstance(T, M, P, frozenset(), k)


def cfvs_solution(inst: CfvsInstance):
    res = oracle_min_fvs(inst.T, inst.constraints())
    return res.solution if res.found else None


class TestProfile:
    def test_default_constants_grow(self):
        p = ConstantsProfile.for_budget(64)
        assert p.hom_window == 10 * 6 ** 3
        assert p.large_ratio == 10 * 6 ** 5
        assert p.sample_q == 36

    def test_all_fields_positive(self):
        with pytest.raises(ValueError):
            ConstantsProfile.toy()._replace if False else ConstantsProfile(
                hom_window=0, large_ratio=1, weak_matching=1, block_degree=1,
                part_fvs_f=1, part_degree_d=1, budget_slack=1, sample_q=2)


class TestMFamily:
    def test_no_exemptions(self):
        T = generate(GenSpec(2, 2, GenKind.UNIFORM_RANDOM, seed=4))
        prof = ConstantsProfile(hom_window=1, large_ratio=3, weak_matching=2,
                                block_degree=3, part_fvs_f=1, part_degree_d=2,
                                budget_slack=1, sample_q=2)
        fam = m_family(T, 2, prof)
        # slack 1 still allows the bare selections; all must be present
        space_size = twise_space_size(4, 1, 2)
        assert len(fam) <= space_size * (1 + 4)
        assert all(isinstance(s, frozenset) for s in fam)

    def test_family_size_recount(self):
        from itertools import combinations
        from btfvs.samplespace import twise_space
        T = generate(GenSpec(3, 3, GenKind.UNIFORM_RANDOM, seed=5))
        prof = ConstantsProfile(hom_window=2, large_ratio=3, weak_matching=2,
                                block_degree=3, part_fvs_f=1, part_degree_d=2,
                                budget_slack=1, sample_q=2)
        fam = m_family(T, 2, prof)
        space = twise_space(6, 2, 2)
        verts = T.vertices()
        expect = set()
        for f in space.functions:
            z = frozenset(verts[i] for i in range(6) if f[i] == 1)
            expect.add(z)
            for r in range(min(1, len(z)) + 1):
                for combo in combinations(sorted(z), r):
                    expect.add(z - frozenset(combo))
        assert set(fam) == expect

    def test_cap_exceeded(self):
        T = generate(GenSpec(4, 4, GenKind.UNIFORM_RANDOM, seed=6))
        prof = ConstantsProfile(hom_window=3, large_ratio=3, weak_matching=2,
                                block_degree=3, part_fvs_f=1, part_degree_d=2,
                                budget_slack=1, sample_q=2, family_cap=10)
        with pytest.raises(FamilyCapExceeded) as exc:
            m_family(T, 2, prof)
        assert exc.value.would_be > 10

    def test_deterministic(self):
        T = generate(GenSpec(3, 2, GenKind.UNIFORM_RANDOM, seed=7))
        assert m_family(T, 2, TOY) == m_family(T, 2, TOY)


class TestHomogeneity:
    def test_everything_in_m(self):
        T = generate(GenSpec(3, 3, GenKind.UNIFORM_RANDOM, seed=8))
        H = next(iter([frozenset()] if is_acyclic(T) else
                      [oracle_min_fvs(T).solution]))
        M = frozenset(set(T.vertices()) - H)
        assert is_m_homogeneous(T, M, H, window=1)

    def test_empty_m_fails_small_window(self):
        T = generate(GenSpec(3, 3, GenKind.ACYCLIC, seed=9))
        assert not is_m_homogeneous(T, frozenset(), frozenset(), window=2)

    def test_agrees_with_bruteforce_over_sorts(self):
        checked = 0
        for seed in range(60):
            T = generate(GenSpec(3, 3, GenKind.UNIFORM_RANDOM, seed=seed + 30))
            res = oracle_min_fvs(T)
            H = res.solution
            if T.num_vertices - len(H) > 7:
                pass  # brute force stays cheap anyway at 3x3
            rng = SplitMix64(seed)
            rest = sorted(set(T.vertices()) - H)
            if not rest:
                continue
            M = frozenset(v for v in rest if rng.coin())
            for window in (1, 2, 3):
                got = is_m_homogeneous(T, M, H, window)
                want = window_property_brute(T, M, H, window)
                assert got == want, (seed, window)
                checked += 1
        assert checked > 100


class TestSeeding:
    def test_seeds_are_valid_instances(self):
        T = generate(GenSpec(3, 3, GenKind.UNIFORM_RANDOM, seed=11))
        for inst in seed_instances(T, 3, TOY):
            assert inst.M
            assert is_acyclic(inst.T, inst.M)
            assert not (inst.M & inst.P)
            # forced set is exactly the cycle-closers
            assert inst.P == derive_forced_p(T, inst.M)

    def test_forced_p_examples(self, square_2x2):
        M = frozenset({a(0), b(0), a(1)})
        assert derive_forced_p(square_2x2, M) == frozenset({b(1)})
        T = generate(GenSpec(3, 3, GenKind.ACYCLIC, seed=12))
        assert derive_forced_p(T, frozenset(T.vertices()[:2])) == frozenset()

    def test_forced_p_matches_per_vertex_oracle(self):
        for seed in range(30):
            T = generate(GenSpec(3, 3, GenKind.UNIFORM_RANDOM, seed=seed + 60))
            rng = SplitMix64(seed)
            M = frozenset(v for v in T.vertices() if rng.coin())
            if not is_acyclic(T, M):
                continue
            got = derive_forced_p(T, M)
            want = {v for v in T.vertices()
                    if v not in M and not is_acyclic(T, M | {v})}
            assert got == want


class TestPredicates:
    def test_regular_when_m_covers_everything(self):
        for seed in range(20):
            inst = seeded_cfvs(seed)
            if inst is None:
                continue
            full = CfvsInstance(inst.T, frozenset(set(inst.T.vertices()) - inst.P),
                                inst.P, frozenset(), inst.k) \
                if is_acyclic(inst.T, set(inst.T.vertices()) - inst.P) else None
            if full is not None:
                assert is_regular(full, TOY)

    def test_regular_checker_agreement(self):
        # second implementation straight from the definition text
        for seed in range(40):
            inst = seeded_cfvs(seed)
            if inst is None:
                continue
            live = inst.T.remove(inst.P)
            m_live = frozenset(live.from_host[v] for v in inst.M)
            seq = m_sequence(live.tournament, m_live)
            ratio = TOY.large_ratio
            expected = True
            for (x, y) in seq.blocks:
                if len(x) >= ratio:
                    m_i = len(x & m_live)
                    if m_i < len(x) / ratio:
                        expected = False
                if len(y) > ratio:
                    expected = False
            assert is_regular(inst, TOY) == expected

    def test_matched_predicate(self):
        for seed in range(40):
            inst = seeded_cfvs(seed)
            if inst is None:
                continue
            live_f = inst.live_f()
            seen = set()
            ok = True
            for (u, w) in live_f:
                if u in seen or w in seen:
                    ok = False
                seen.update((u, w))
            assert is_matched(inst) == ok


class TestStageRegular:
    def test_children_are_regular_and_supersets(self):
        for seed in range(40):
            inst = seeded_cfvs(seed)
            if inst is None:
                continue
            try:
                children = stage_regular(inst, TOY)
            except FamilyCapExceeded:
                continue
            for child in children:
                assert is_regular(child, TOY)
                assert child.P >= inst.P
                assert child.M == inst.M
                assert not (child.P & child.M)

    def test_backward_direction(self):
        # any child solution solves the parent
        for seed in range(40):
            inst = seeded_cfvs(seed)
            if inst is None:
                continue
            try:
                children = stage_regular(inst, TOY)
            except FamilyCapExceeded:
                continue
            for child in children[:4]:
                sol = cfvs_solution(child)
                if sol is not None:
                    assert inst.is_solution(sol)


class TestStageWeak:
    def test_children_weakly_coupled_and_cover_parent_f(self):
        for seed in range(40):
            inst = seeded_cfvs(seed)
            if inst is None:
                continue
            try:
                regs = stage_regular(inst, TOY)
            except FamilyCapExceeded:
                continue
            for parent in regs[:3]:
                try:
                    children = stage_weak(parent, TOY)
                except FamilyCapExceeded:
                    continue
                for child in children:
                    assert is_weakly_coupled(child, TOY)
                    assert child.F >= parent.F
                    assert child.F >= long_back(parent)


class TestMatchedBranching:
    def path_edges(self, length: int):
        # alternating path a0-b0-a1-b1-...
        out = []
        for i in range(length):
            out.append((a(i // 2 + i % 2), b(i // 2)) if i % 2 else
                       (a(i // 2), b(i // 2)))
        return out

    def star_edges(self, degree: int):
        return [(a(0), b(j)) for j in range(degree)]

    def test_star_two_leaves(self):
        leaves = matched_branching(self.star_edges(4), budget=10)
        # center in, or all leaves in
        assert frozenset({a(0)}) in leaves
        assert frozenset({b(j) for j in range(4)}) in leaves
        assert len(leaves) == 2

    def test_leaves_leave_matchings(self):
        for seed in range(30):
            T = generate(GenSpec(4, 4, GenKind.UNIFORM_RANDOM, seed=seed))
            arcs = T.arcs()
            rng = SplitMix64(seed)
            edges = {arcs[rng.below(len(arcs))] for _ in range(6)}
            for added in matched_branching(list(edges), budget=8):
                residual = [e for e in edges if not (set(e) & added)]
                seen = set()
                for (u, w) in residual:
                    assert u not in seen and w not in seen
                    seen.update((u, w))

    def test_fibonacci_bound_star_path_random(self):
        def fib(n):
            x, y = 0, 1
            for _ in range(n):
                x, y = y, x + y
            return x

        cases = [self.star_edges(5), self.path_edges(8)]
        for seed in range(20):
            T = generate(GenSpec(5, 5, GenKind.UNIFORM_RANDOM, seed=seed + 100))
            arcs = T.arcs()
            rng = SplitMix64(seed)
            cases.append(list({arcs[rng.below(len(arcs))] for _ in range(8)}))
        for edges in cases:
            leaves = matched_branching(edges, budget=20)
            by_cost: dict = {}
            for added in leaves:
                by_cost[len(added)] = by_cost.get(len(added), 0) + 1
            for s, count in by_cost.items():
                assert count <= fib(s + 2), (s, count, edges)


class TestCascade:
    def test_stage_children_keep_backward_direction(self):
        # every stage: a child solution, when one exists, solves the parent
        violations = 0
        runs = 0
        for seed in range(25):
            T = generate(GenSpec(2 + seed % 3, 2 + (seed // 2) % 3,
                                 GenKind.UNIFORM_RANDOM, seed=seed + 200))
            pairs = []

            def collect(stage, parent, children):
                if parent is not None:
                    pairs.extend((stage, parent, c) for c in children)

            family, trace, diags = run_cascade(T, 3, TOY, collect=collect)
            runs += 1
            for stage, parent, child in pairs[:40]:
                sol = cfvs_solution(child)
                if sol is None:
                    continue
                if not parent.is_solution(sol):
                    violations += 1
        assert runs == 25
        assert violations == 0

    def test_seed_children_solve_the_plain_question(self):
        for seed in range(15):
            T = generate(GenSpec(3, 3, GenKind.UNIFORM_RANDOM, seed=seed + 300))
            k = 3
            for inst in seed_instances(T, k, TOY)[:20]:
                sol = cfvs_solution(inst)
                if sol is not None:
                    assert verify_fvs(T, sol) and len(sol) <= k


class TestDecoupling:
    def _flowing_instance(self):
        for seed in range(200):
            inst = seeded_cfvs(seed, max_side=4, k=4)
            if inst is None:
                continue
            try:
                if not (is_regular(inst, TOY) and is_weakly_coupled(inst, TOY)
                        and is_matched(inst) and is_low_block_degree(inst, TOY)):
                    continue
            except Exception:
                continue
            return inst
        pytest.skip("no flowing instance found")

    def test_partition_covers_live_vertices(self):
        inst = self._flowing_instance()
        parts = partition_parts(inst, TOY)
        union = set()
        for part in parts:
            assert part
            union |= part
        assert union == set(inst.T.vertices()) - inst.P

    def test_partition_parts_are_consecutive_blocks(self):
        inst = self._flowing_instance()
        live = inst.T.remove(inst.P)
        m_live = frozenset(live.from_host[v] for v in inst.M)
        seq = m_sequence(live.tournament, m_live)
        block_of = {}
        for i, (x, y) in enumerate(seq.blocks):
            for v in x | y:
                block_of[live.to_host[v]] = i
        parts = partition_parts(inst, TOY)
        covered = []
        for part in parts:
            idxs = sorted({block_of[v] for v in part})
            assert idxs == list(range(idxs[0], idxs[-1] + 1))
            covered.extend(idxs)
        assert covered == sorted(covered)

    def test_precondition_errors_name_the_predicate(self):
        inst = None
        for seed in range(100):
            cand = seeded_cfvs(seed)
            if cand is not None and not is_regular(cand, TOY):
                inst = cand
                break
        if inst is None:
            pytest.skip("all instances regular at toy scale")
        with pytest.raises(PreconditionViolated) as exc:
            partition_parts(inst, TOY)
        assert exc.value.predicate == "regular"

    def test_stage_decoupled_children_pass_all_predicates(self):
        found = 0
        for seed in range(80):
            inst = seeded_cfvs(seed, max_side=4, k=4)
            if inst is None:
                continue
            try:
                if not (is_regular(inst, TOY) and is_weakly_coupled(inst, TOY)
                        and is_matched(inst) and is_low_block_degree(inst, TOY)):
                    continue
                children = stage_decoupled(inst, TOY)
            except (FamilyCapExceeded, PreconditionViolated):
                continue
            for child in children:
                found += 1
                assert is_regular(child, TOY) and is_weakly_coupled(child, TOY)
                assert is_matched(child) and is_low_block_degree(child, TOY)
                assert is_decoupled(child, TOY)
        if not found:
            pytest.skip("no decoupled children at this scale")


class TestEndgame:
    def test_to_dfvc_shape_and_lift(self):
        exercised = 0
        for seed in range(120):
            inst = seeded_cfvs(seed, max_side=4, k=4)
            if inst is None:
                continue
            try:
                children = stage_decoupled(inst, TOY) \
                    if (is_regular(inst, TOY) and is_weakly_coupled(inst, TOY)
                        and is_matched(inst) and is_low_block_degree(inst, TOY)) else []
            except (FamilyCapExceeded, PreconditionViolated):
                continue
            for child in children[:3]:
                try:
                    red = to_dfvc(child, TOY)
                except PreconditionViolated:
                    continue
                exercised += 1
                d = red.instance
                assert d.budget == child.k - len(child.P)
                # forbidden covers M
                lifted_forbidden = {red.to_host[gv] for gv in d.forbidden}
                assert lifted_forbidden == set(child.M)
                # undirected edges are live cross-part constraint edges
                for (ga, gb) in d.graph.undirected:
                    u, w = red.to_host[ga], red.to_host[gb]
                    assert (u, w) in child.F or (w, u) in child.F
                from btfvs.dfvc import dfvc_solve
                res = dfvc_solve(d)
                if res.found:
                    lifted = child.P | {red.to_host[gv] for gv in res.solution}
                    assert len(lifted) <= child.k
                    assert not (lifted & child.M)
        if not exercised:
            pytest.skip("endgame not reached at this scale")


class TestPipelineSolve:
    def test_square_budget_one(self, square_2x2):
        res = pipeline_solve(square_2x2, 1, TOY)
        assert res.found and len(res.solution) == 1
        assert verify_fvs(square_2x2, res.solution)

    def test_acyclic_budget_zero(self):
        T = generate(GenSpec(4, 4, GenKind.ACYCLIC, seed=13))
        res = pipeline_solve(T, 0, TOY)
        assert res.found and res.solution == frozenset()

    def test_negative_budget(self, square_2x2):
        assert pipeline_solve(square_2x2, -1, TOY).status is SolveStatus.NO_SOLUTION

    def test_matches_oracle_small(self):
        for seed in range(25):
            T = generate(GenSpec(2 + seed % 4, 2 + (seed // 3) % 4,
                                 GenKind.UNIFORM_RANDOM, seed=seed + 400))
            opt = len(oracle_min_fvs(T).solution)
            for k in (max(0, opt - 1), opt):
                res = pipeline_solve(T, k, TOY)
                want = k >= opt
                assert res.found == want, (seed, k, opt)
                if res.found:
                    assert verify_fvs(T, res.solution)
                    assert len(res.solution) <= k

    def test_workers_agree(self):
        T = generate(GenSpec(4, 4, GenKind.UNIFORM_RANDOM, seed=21))
        opt = len(oracle_min_fvs(T).solution)
        seq = pipeline_solve(T, opt, TOY)
        par = pipeline_solve(T, opt, TOY, workers=2)
        assert seq.found == par.found

    def test_trace_reports_stage_sizes(self):
        T = generate(GenSpec(3, 3, GenKind.UNIFORM_RANDOM, seed=22))
        res = pipeline_solve(T, 3, TOY)
        names = [name for name, _ in res.trace]
        if names and names[0] != "reduce":
            assert names[0] == "seed"
            assert set(names) <= set(STAGES) | {"reduce"}
