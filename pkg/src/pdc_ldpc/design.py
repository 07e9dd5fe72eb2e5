"""Difference-set blueprints for progressive differences convolutional LDPC codes.

A design is fixed by the block width ``a``, the column weight ``w`` and, for
every column ``i`` of the syndrome former block column, an ordered list of
``w - 1`` gaps between consecutive ones.  Column indices are 0-based in the
Python API; the uniform construction evaluates its closed form with the
1-based index ``i + 1``.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass
from itertools import accumulate
from typing import NamedTuple, Sequence

__all__ = [
    "DifferenceDesign",
    "ExpansionSets",
    "SearchExhaustedError",
    "SixCycleWitness",
    "expansion_sets",
    "is_four_cycle_free",
    "lh_lower_bound",
    "load_design",
    "random_design",
    "save_design",
    "six_cycle_witnesses",
    "uniform_design",
]

DEFAULT_ATTEMPTS = 10**6


class SearchExhaustedError(RuntimeError):
    """Random design search ran out of attempts."""


@dataclass(frozen=True)
class DifferenceDesign:
    """Blueprint of a PDC-LDPC code.

    Attributes:
        a: block width; the design rate is ``(a - 1) / a``.
        w: column weight of the syndrome former block column.
        diffs: ``a`` tuples of ``w - 1`` positive gaps each.
        construction: ``"uniform"``, ``"random"`` or ``None`` for hand-made designs.
        seed: seed of the random search, when relevant.
    """

    a: int
    w: int
    diffs: tuple[tuple[int, ...], ...]
    construction: str | None = None
    seed: int | None = None

    def __post_init__(self):
        if self.a < 1:
            raise ValueError(f"a must be >= 1, got {self.a}")
        if self.w < 2:
            raise ValueError(f"w must be >= 2, got {self.w}")
        diffs = tuple(tuple(int(d) for d in col) for col in self.diffs)
        if len(diffs) != self.a:
            raise ValueError(f"expected {self.a} difference lists, got {len(diffs)}")
        for i, col in enumerate(diffs):
            if len(col) != self.w - 1:
                raise ValueError(f"column {i}: expected {self.w - 1} differences, got {len(col)}")
            if any(d < 1 for d in col):
                raise ValueError(f"column {i}: differences must be >= 1, got {col}")
        object.__setattr__(self, "diffs", diffs)

    @classmethod
    def from_lists(cls, diffs: Sequence[Sequence[int]], **kwargs) -> "DifferenceDesign":
        """Build a design from a nested list, inferring ``a`` and ``w``."""
        diffs = [list(col) for col in diffs]
        if not diffs:
            raise ValueError("at least one column is required")
        return cls(a=len(diffs), w=len(diffs[0]) + 1, diffs=tuple(map(tuple, diffs)), **kwargs)

    @property
    def b(self) -> int:
        return self.a - 1

    @property
    def rate(self) -> float:
        return (self.a - 1) / self.a

    def positions(self, i: int) -> tuple[int, ...]:
        """Row offsets of the ones in column ``i``: 0 followed by the cumulative gaps."""
        return (0, *accumulate(self.diffs[i]))

    @property
    def lh(self) -> int:
        """Number of rows of the syndrome former block column."""
        return 1 + max(sum(col) for col in self.diffs)

    def to_dict(self) -> dict:
        return {
            "a": self.a,
            "w": self.w,
            "diffs": [list(col) for col in self.diffs],
            "construction": self.construction,
            "seed": self.seed,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "DifferenceDesign":
        try:
            return cls(
                a=int(data["a"]),
                w=int(data["w"]),
                diffs=tuple(tuple(col) for col in data["diffs"]),
                construction=data.get("construction"),
                seed=data.get("seed"),
            )
        except (KeyError, TypeError) as exc:
            raise ValueError(f"malformed design: {exc}") from exc

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


def save_design(design: DifferenceDesign, path) -> None:
    with open(path, "w") as fh:
        fh.write(design.to_json() + "\n")


def load_design(path) -> DifferenceDesign:
    with open(path) as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ValueError(f"{path}: not valid JSON ({exc})") from exc
    if not isinstance(data, dict):
        raise ValueError(f"{path}: expected a JSON object")
    return DifferenceDesign.from_dict(data)


def uniform_design(a: int, w: int) -> DifferenceDesign:
    """Uniform construction.

    Odd positions (1st, 3rd, ...) of column ``i`` hold ``4**m * (2*(a - i) + 1)``
    and even positions hold ``4**m * (4*i - 2)``, with ``i`` 1-based and ``m``
    the pair index; each column is truncated to ``w - 1`` entries.
    """
    if a < 1:
        raise ValueError(f"a must be >= 1, got {a}")
    if w < 2:
        raise ValueError(f"w must be >= 2, got {w}")
    diffs = []
    for i in range(1, a + 1):
        col = []
        for j in range(w - 1):
            m, odd = divmod(j, 2)
            col.append(4**m * (4 * i - 2) if odd else 4**m * (2 * (a - i) + 1))
        diffs.append(tuple(col))
    return DifferenceDesign(a=a, w=w, diffs=tuple(diffs), construction="uniform")


class ExpansionSets(NamedTuple):
    """Consecutive-run sums of every column.

    ``per_column[i]`` and ``combined`` are sorted lists that keep multiplicity.
    """

    per_column: list[list[int]]
    combined: list[int]


def _run_sums(diffs: Sequence[int]):
    """Yield ``(lo, hi, value)`` for every run ``diffs[lo:hi]``; lo/hi index the column's ones."""
    pos = (0, *accumulate(diffs))
    for lo in range(len(pos)):
        for hi in range(lo + 1, len(pos)):
            yield lo, hi, pos[hi] - pos[lo]


def expansion_sets(design: DifferenceDesign) -> ExpansionSets:
    per_column = [sorted(v for _, _, v in _run_sums(col)) for col in design.diffs]
    combined = sorted(v for col in per_column for v in col)
    return ExpansionSets(per_column, combined)


def _has_duplicates(values: list[int]) -> bool:
    return any(x == y for x, y in zip(values, values[1:]))


def is_four_cycle_free(design: DifferenceDesign) -> bool:
    """True when the combined expansion multiset has no repeated value."""
    return not _has_duplicates(expansion_sets(design).combined)


class SixCycleWitness(NamedTuple):
    """``first + second == total`` with each value taken from the named column's expansion set."""

    first_column: int
    first: int
    second_column: int
    second: int
    sum_column: int
    total: int


def six_cycle_witnesses(design: DifferenceDesign) -> list[SixCycleWitness]:
    """All triples ``s + s' = s''`` drawn from the expansion sets.

    Columns may repeat, and the same element may be used twice: shifted copies
    of one base column can close a cycle.  The only triples left out are those
    where the three gaps are nested runs of a single column copy (the sum of
    two adjacent runs is itself a run), which never form a cycle.
    """
    elements = [(i, lo, hi, v) for i, col in enumerate(design.diffs) for lo, hi, v in _run_sums(col)]
    by_value: dict[int, list[tuple[int, int, int]]] = {}
    for i, lo, hi, v in elements:
        by_value.setdefault(v, []).append((i, lo, hi))

    witnesses = []
    for p, (i, lo1, hi1, v1) in enumerate(elements):
        for j, lo2, hi2, v2 in elements[p:]:
            for k, lo3, hi3 in by_value.get(v1 + v2, ()):
                if i == j == k and _same_copy(lo1, hi1, lo2, hi2, lo3, hi3):
                    continue
                witnesses.append(SixCycleWitness(i, v1, j, v2, k, v1 + v2))
    return witnesses


def _same_copy(lo1, hi1, lo2, hi2, lo3, hi3) -> bool:
    # the two short runs are adjacent inside one copy and the long run spans both
    return (hi1 == lo2 and (lo3, hi3) == (lo1, hi2)) or (hi2 == lo1 and (lo3, hi3) == (lo2, hi1))


def lh_lower_bound(a: int, w: int) -> int:
    """Smallest number of syndrome former rows a 4-cycle-free design can have."""
    if a < 1 or w < 2:
        raise ValueError(f"need a >= 1 and w >= 2, got a={a}, w={w}")
    return 1 + a * w * (w - 1) // 2


def random_design(
    a: int,
    w: int,
    max_diff: int,
    seed: int = 0,
    avoid_six_cycles: bool = False,
    max_attempts: int = DEFAULT_ATTEMPTS,
) -> DifferenceDesign:
    """Rejection-sample a 4-cycle-free design with gaps drawn from ``[1, max_diff]``.

    Raises:
        SearchExhaustedError: no acceptable design within ``max_attempts`` draws.
    """
    if max_diff < 1:
        raise ValueError(f"max_diff must be >= 1, got {max_diff}")
    if max_attempts < 1:
        raise ValueError(f"max_attempts must be >= 1, got {max_attempts}")
    # every value of the combined multiset is at most (w - 1) * max_diff
    if (w - 1) * max_diff < lh_lower_bound(a, w) - 1:
        raise SearchExhaustedError(
            f"search exhausted: max_diff={max_diff} cannot give {a * w * (w - 1) // 2} distinct run sums"
        )
    rng = random.Random(seed)
    for _ in range(max_attempts):
        diffs = tuple(tuple(rng.randint(1, max_diff) for _ in range(w - 1)) for _ in range(a))
        if not _distinct_run_sums(diffs):
            continue
        design = DifferenceDesign(a=a, w=w, diffs=diffs, construction="random", seed=seed)
        if avoid_six_cycles and six_cycle_witnesses(design):
            continue
        return design
    raise SearchExhaustedError(f"search exhausted after {max_attempts} attempts (a={a}, w={w}, max_diff={max_diff})")


def _distinct_run_sums(diffs) -> bool:
    # hot loop of the random search: bail out at the first repeat
    seen = set()
    for col in diffs:
        for lo in range(len(col)):
            total = 0
            for d in col[lo:]:
                total += d
                if total in seen:
                    return False
                seen.add(total)
    return True
