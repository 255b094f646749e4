"""Deterministic instance generators.

Randomness comes from SplitMix64, a tiny published 64-bit generator chosen
for bit-exact portability: the same GenSpec yields the same instance on any
platform or Python version.  Each instance derives its own stream by mixing
the GenSpec fields into the seed, so corpora can be generated out of order
or in parallel without coordination.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

from .graph import BipartiteTournament


class SplitMix64:
    """splitmix64: state advances by the golden-gamma constant, outputs are
    finalized with two xor-shift multiplies."""

    MASK = (1 << 64) - 1

    def __init__(self, seed: int):
        self.state = seed & self.MASK

    def next_u64(self) -> int:
        self.state = (self.state + 0x9E3779B97F4A7C15) & self.MASK
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & self.MASK
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & self.MASK
        return z ^ (z >> 31)

    def coin(self) -> bool:
        return bool(self.next_u64() & 1)

    def below(self, n: int) -> int:
        """Uniform integer in [0, n) by rejection."""
        if n <= 0:
            raise ValueError("below() needs n >= 1")
        span = (1 << 64) - ((1 << 64) % n)
        while True:
            x = self.next_u64()
            if x < span:
                return x % n

    def shuffle(self, items: list) -> list:
        for i in range(len(items) - 1, 0, -1):
            j = self.below(i + 1)
            items[i], items[j] = items[j], items[i]
        return items

    def sample(self, items: list, count: int) -> list:
        pool = list(items)
        self.shuffle(pool)
        return pool[:count]

    def split(self, *tags: int) -> "SplitMix64":
        """Child stream keyed by integer tags; streams are independent for
        distinct tag tuples."""
        child = SplitMix64(self.state)
        for t in tags:
            child.state = (child.state ^ (t & self.MASK)) & self.MASK
            child.next_u64()
        return child


class GenKind(Enum):
    UNIFORM_RANDOM = "uniform"
    ACYCLIC = "acyclic"
    PLANTED_FVS = "planted"
    TWIN_HEAVY = "twinheavy"


@dataclass(frozen=True)
class GenSpec:
    """Deterministic recipe for one instance.

    ``k_plant`` applies to PLANTED_FVS; ``twin_a``/``twin_b`` are the
    row/column duplication factors of TWIN_HEAVY.
    """

    m: int
    n: int
    kind: GenKind
    seed: int
    k_plant: int = 0
    twin_a: int = 1
    twin_b: int = 1

    def stream(self) -> SplitMix64:
        base = SplitMix64(self.seed)
        tag = {GenKind.UNIFORM_RANDOM: 1, GenKind.ACYCLIC: 2,
               GenKind.PLANTED_FVS: 3, GenKind.TWIN_HEAVY: 4}[self.kind]
        return base.split(tag, self.m, self.n, self.k_plant,
                          self.twin_a, self.twin_b)

    def file_stem(self) -> str:
        return f"{self.kind.value}-{self.m}x{self.n}-{self.seed}"


def _acyclic_orient(m: int, n: int, rng: SplitMix64) -> list[list[bool]]:
    """Random interleaving of the two sides realized as an orientation:
    a_i -> b_j exactly when a_i precedes b_j in the interleaving."""
    slots = ["A"] * m + ["B"] * n
    rng.shuffle(slots)
    pos_a, pos_b = [], []
    for p, s in enumerate(slots):
        (pos_a if s == "A" else pos_b).append(p)
    return [[pos_a[i] < pos_b[j] for j in range(n)] for i in range(m)]


def generate(spec: GenSpec) -> BipartiteTournament:
    """Materialize the instance described by ``spec``; bit-identical across
    runs for a fixed spec."""
    rng = spec.stream()
    m, n = spec.m, spec.n
    if spec.kind is GenKind.UNIFORM_RANDOM:
        orient = [[rng.coin() for _ in range(n)] for _ in range(m)]
    elif spec.kind is GenKind.ACYCLIC:
        orient = _acyclic_orient(m, n, rng)
    elif spec.kind is GenKind.PLANTED_FVS:
        orient = _acyclic_orient(m, n, rng)
        base = BipartiteTournament(m, n, orient)
        planted = rng.sample(base.vertices(), min(spec.k_plant, m + n))
        planted_a = {v.index for v in planted if v.side == "A"}
        planted_b = {v.index for v in planted if v.side == "B"}
        for i in range(m):
            for j in range(n):
                if i in planted_a or j in planted_b:
                    orient[i][j] = rng.coin()
    elif spec.kind is GenKind.TWIN_HEAVY:
        ta = max(1, spec.twin_a)
        tb = max(1, spec.twin_b)
        core_m = (m + ta - 1) // ta if m else 0
        core_n = (n + tb - 1) // tb if n else 0
        core = [[rng.coin() for _ in range(core_n)] for _ in range(core_m)]
        orient = [[core[i // ta][j // tb] for j in range(n)] for i in range(m)]
    else:  # pragma: no cover
        raise ValueError(f"unknown kind {spec.kind!r}")
    return BipartiteTournament(m, n, orient)


def planted_optimum_bound(spec: GenSpec) -> int:
    """Upper bound on the optimum guaranteed by the planted construction."""
    if spec.kind is not GenKind.PLANTED_FVS:
        raise ValueError("only PLANTED_FVS instances carry a planted bound")
    return min(spec.k_plant, spec.m + spec.n)
