"""Instances, allocations and exact Nash-social-welfare keys.

All values are kept in half-units: a light good is worth 2, a good counted
at the high value is worth ``p``.  Every bundle value is then an integer and
NSW comparisons reduce to comparing integer products.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from functools import cached_property, total_ordering
from typing import Iterable, Sequence


class AllocationError(ValueError):
    pass


@dataclass(frozen=True)
class Instance:
    """A 2-value instance with values 1 and p/2.

    ``heavy[i][g]`` is true iff agent ``i`` values good ``g`` at p/2.
    """

    n: int
    m: int
    p: int
    heavy: tuple[tuple[bool, ...], ...]

    def __post_init__(self) -> None:
        if self.n < 1:
            raise ValueError(f"need at least one agent, got n={self.n}")
        if self.m < 0:
            raise ValueError(f"negative good count m={self.m}")
        if self.p < 3 or self.p % 2 == 0:
            raise ValueError(f"p must be an odd integer >= 3, got {self.p}")
        rows = tuple(tuple(bool(b) for b in row) for row in self.heavy)
        if len(rows) != self.n or any(len(r) != self.m for r in rows):
            raise ValueError("heavy relation must be an n x m matrix")
        object.__setattr__(self, "heavy", rows)

    @classmethod
    def from_rows(cls, p: int, rows: Sequence[Sequence[int | bool]], m: int | None = None) -> Instance:
        rows = [list(r) for r in rows]
        if m is None:
            m = len(rows[0]) if rows else 0
        return cls(len(rows), m, p, tuple(tuple(bool(b) for b in r) for r in rows))

    @classmethod
    def uniform(cls, n: int, n_heavy: int, n_light: int, p: int) -> Instance:
        """Identical agents: the first ``n_heavy`` goods are heavy for everyone."""
        row = (True,) * n_heavy + (False,) * n_light
        return cls(n, n_heavy + n_light, p, (row,) * n)

    @cached_property
    def admirers(self) -> tuple[tuple[int, ...], ...]:
        return tuple(
            tuple(i for i in range(self.n) if self.heavy[i][g]) for g in range(self.m)
        )

    @cached_property
    def likes(self) -> tuple[tuple[int, ...], ...]:
        return tuple(
            tuple(g for g in range(self.m) if self.heavy[i][g]) for i in range(self.n)
        )

    def is_heavy_good(self, g: int) -> bool:
        return bool(self.admirers[g])

    @property
    def heavy_goods(self) -> list[int]:
        return [g for g in range(self.m) if self.admirers[g]]

    @property
    def light_goods(self) -> list[int]:
        return [g for g in range(self.m) if not self.admirers[g]]

    def masked(self, goods: Iterable[int]) -> Instance:
        """Copy of the instance in which ``goods`` are light for every agent."""
        drop = set(goods)
        rows = tuple(
            tuple(b and g not in drop for g, b in enumerate(row)) for row in self.heavy
        )
        return Instance(self.n, self.m, self.p, rows)


@dataclass
class Allocation:
    """Owner and heavy/light typing of every good, with cached bundle values.

    ``heavy_of[i]`` holds the goods counted at p/2 for ``i``; ``light_of[i]``
    the goods counted at 1.
    """

    p: int
    owner: list[int]
    as_heavy: list[bool]
    values2: list[int]
    heavy_of: list[set[int]] = field(repr=False)
    light_of: list[set[int]] = field(repr=False)

    @classmethod
    def empty(cls, inst: Instance) -> Allocation:
        return cls(
            inst.p,
            [-1] * inst.m,
            [False] * inst.m,
            [0] * inst.n,
            [set() for _ in range(inst.n)],
            [set() for _ in range(inst.n)],
        )

    @classmethod
    def from_owners(
        cls,
        inst: Instance,
        owner: Sequence[int],
        as_heavy: Sequence[bool] | None = None,
    ) -> Allocation:
        """Build an allocation; by default a good is typed heavy iff its owner likes it."""
        if len(owner) != inst.m:
            raise AllocationError(f"owner map has {len(owner)} entries, expected {inst.m}")
        alloc = cls.empty(inst)
        for g, i in enumerate(owner):
            if not 0 <= i < inst.n:
                raise AllocationError(f"good {g} has invalid owner {i}")
            h = inst.heavy[i][g] if as_heavy is None else bool(as_heavy[g])
            if h and not inst.heavy[i][g]:
                raise AllocationError(f"good {g} typed heavy but agent {i} does not like it")
            alloc._place(g, i, h)
        return alloc

    @property
    def n(self) -> int:
        return len(self.values2)

    @property
    def m(self) -> int:
        return len(self.owner)

    def _place(self, g: int, i: int, heavy: bool) -> None:
        self.owner[g] = i
        self.as_heavy[g] = heavy
        if heavy:
            self.heavy_of[i].add(g)
            self.values2[i] += self.p
        else:
            self.light_of[i].add(g)
            self.values2[i] += 2

    def _remove(self, g: int) -> None:
        i = self.owner[g]
        if self.as_heavy[g]:
            self.heavy_of[i].discard(g)
            self.values2[i] -= self.p
        else:
            self.light_of[i].discard(g)
            self.values2[i] -= 2
        self.owner[g] = -1

    def move(self, g: int, to: int, heavy: bool) -> None:
        """Reassign good ``g`` to agent ``to`` with the given typing (unchecked)."""
        if self.owner[g] >= 0:
            self._remove(g)
        self._place(g, to, heavy)

    def copy(self) -> Allocation:
        return Allocation(
            self.p,
            list(self.owner),
            list(self.as_heavy),
            list(self.values2),
            [set(s) for s in self.heavy_of],
            [set(s) for s in self.light_of],
        )

    def bundle(self, i: int) -> frozenset[int]:
        return frozenset(self.heavy_of[i] | self.light_of[i])

    def heavy_count(self, i: int) -> int:
        return len(self.heavy_of[i])

    def light_count(self, i: int) -> int:
        return len(self.light_of[i])

    def key(self) -> NswKey:
        return nsw_key(self.values2)

    def signature(self) -> tuple[tuple[int, ...], tuple[bool, ...]]:
        return tuple(self.owner), tuple(self.as_heavy)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Allocation):
            return NotImplemented
        return self.p == other.p and self.signature() == other.signature()


def compute_values(inst: Instance, alloc: Allocation) -> list[int]:
    """Recompute per-agent half-unit values from the owner and typing maps."""
    if len(alloc.owner) != inst.m:
        raise AllocationError("allocation does not cover the instance's goods")
    values = [0] * inst.n
    for g, i in enumerate(alloc.owner):
        if not 0 <= i < inst.n:
            raise AllocationError(f"good {g} is unassigned")
        if alloc.as_heavy[g]:
            if not inst.heavy[i][g]:
                raise AllocationError(f"good {g} typed heavy for agent {i}, who does not like it")
            values[i] += inst.p
        else:
            values[i] += 2
    return values


def check_allocation(inst: Instance, alloc: Allocation) -> None:
    """Raise ``AllocationError`` if the cached bookkeeping disagrees with a recount."""
    values = compute_values(inst, alloc)
    if values != alloc.values2:
        raise AllocationError(f"cached values {alloc.values2} != recomputed {values}")
    for i in range(inst.n):
        for g in alloc.heavy_of[i]:
            if alloc.owner[g] != i or not alloc.as_heavy[g]:
                raise AllocationError(f"heavy set of agent {i} is stale at good {g}")
        for g in alloc.light_of[i]:
            if alloc.owner[g] != i or alloc.as_heavy[g]:
                raise AllocationError(f"light set of agent {i} is stale at good {g}")


@total_ordering
@dataclass(frozen=True)
class NswKey:
    """Exact NSW comparison key.

    ``product`` is the plain product of half-unit values (0 as soon as one
    bundle is empty).  Zero-welfare keys are ordered by fewer empty bundles,
    then by the product of the non-empty ones.
    """

    product: int
    zeros: int
    nonzero_product: int

    def _order(self) -> tuple[int, int]:
        return (-self.zeros, self.nonzero_product)

    def __lt__(self, other: NswKey) -> bool:
        return self._order() < other._order()

    def log10(self) -> float:
        """log10 of NSW^n in half-units; reporting only, -inf for zero welfare."""
        if self.zeros:
            return float("-inf")
        return math.log10(self.product)


def nsw_key(values2: Iterable[int]) -> NswKey:
    product = 1
    nonzero = 1
    zeros = 0
    for v in values2:
        if v == 0:
            zeros += 1
        else:
            nonzero *= v
        product *= v
    return NswKey(product, zeros, nonzero)


def nsw_compare(a: NswKey, b: NswKey) -> int:
    """-1, 0 or 1 as ``a`` is worse than, equal to, or better than ``b``."""
    oa, ob = a._order(), b._order()
    return (oa > ob) - (oa < ob)


def min_value_x(values2: Sequence[int], agents: Iterable[int] | None = None) -> int:
    if agents is None:
        return min(values2)
    return min(values2[i] for i in agents)


class Band(enum.Enum):
    BELOW = "below"
    AT_MIN = "x"
    HALF_UP = "x+1/2"
    ONE_UP = "x+1"
    ABOVE = "above"


def band_of(values2: Sequence[int], i: int, x2: int) -> Band:
    d = values2[i] - x2
    if d < 0:
        return Band.BELOW
    return (Band.AT_MIN, Band.HALF_UP, Band.ONE_UP)[d] if d <= 2 else Band.ABOVE
