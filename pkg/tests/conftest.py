"""Shared fixtures and instance builders."""

from __future__ import annotations

import pytest

from btfvs.graph import BipartiteTournament, Vertex
from btfvs.generators import GenKind, GenSpec, generate


def tournament(orient) -> BipartiteTournament:
    m = len(orient)
    n = len(orient[0]) if orient else 0
    return BipartiteTournament(m, n, orient)


def a(i: int) -> Vertex:
    return Vertex("A", i)


def b(j: int) -> Vertex:
    return Vertex("B", j)


@pytest.fixture
def square_2x2() -> BipartiteTournament:
    """The directed square a0 -> b0 -> a1 -> b1 -> a0."""
    return tournament([[True, False], [False, True]])


@pytest.fixture
def chain_2x2() -> BipartiteTournament:
    """Acyclic chain a0 -> b0 -> a1 -> b1 with a0 -> b1."""
    return tournament([[True, True], [False, True]])


def random_instances(count: int, max_side: int, seed: int,
                     kinds=(GenKind.UNIFORM_RANDOM,), min_side: int = 1):
    """Deterministic stream of generated instances cycling over kinds."""
    out = []
    i = 0
    while len(out) < count:
        kind = kinds[i % len(kinds)]
        m = min_side + (i * 7 + seed) % (max_side - min_side + 1)
        n = min_side + (i * 11 + seed // 3 + 1) % (max_side - min_side + 1)
        spec = GenSpec(m=m, n=n, kind=kind, seed=seed + i,
                       k_plant=min(3, m + n),
                       twin_a=1 + i % 3, twin_b=1 + (i + 1) % 3)
        out.append((spec, generate(spec)))
        i += 1
    return out
