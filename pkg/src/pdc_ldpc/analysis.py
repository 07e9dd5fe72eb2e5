"""Girth and minimum distance of finite parity-check matrices."""

from __future__ import annotations

import logging
from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from math import comb

import numpy as np

from .design import DifferenceDesign
from .matrix import SparseBitMatrix, gf2_systematic, tail_biting_matrix

__all__ = [
    "DistanceReport",
    "GirthReport",
    "ORACLE_MAX_K",
    "default_length",
    "girth",
    "measure_tail_biting",
    "min_distance",
    "min_distance_oracle",
    "pair_codeword_estimate",
]

log = logging.getLogger(__name__)

ORACLE_MAX_K = 24


@dataclass(frozen=True)
class GirthReport:
    """Shortest Tanner graph cycle.

    ``girth`` is ``None`` for an acyclic graph.  ``witness`` alternates
    variable and check indices, starting with a variable node:
    ``(v0, c0, v1, c1, ...)``; the cycle closes from the last check back to ``v0``.
    """

    girth: int | None
    witness: tuple[int, ...] = ()

    @property
    def acyclic(self) -> bool:
        return self.girth is None


@dataclass(frozen=True)
class DistanceReport:
    """Minimum distance result.

    ``d_min`` is ``None`` when no nonzero codeword of weight ``<= weight_cap``
    exists; ``multiplicity`` is then 0.
    """

    d_min: int | None
    multiplicity: int
    method: str
    weight_cap: int | None
    example: tuple[int, ...] = ()


def girth(h: SparseBitMatrix, max_girth: int | None = None) -> GirthReport:
    """Shortest cycle of the Tanner graph of ``h`` by BFS from every variable node.

    Only variable nodes in one orbit representative set are used as roots
    when ``h`` declares a cyclic symmetry.  Cycles longer than ``max_girth``
    are not searched for.
    """
    cols = h.columns
    rows = h.ones
    n = h.cols
    roots = range(n)
    if h.cyclic_shift is not None and h.is_shift_invariant(*h.cyclic_shift):
        roots = range(h.cyclic_shift[1])

    best = max_girth + 1 if max_girth is not None else None
    best_witness: tuple[int, ...] = ()
    for root in roots:
        found = _shortest_cycle_through(root, cols, rows, n, best)
        if found is not None and (best is None or len(found) < best):
            best, best_witness = len(found), found
            if best == 4:
                break
    if not best_witness:
        return GirthReport(None)
    return GirthReport(best, best_witness)


def _shortest_cycle_through(root, cols, rows, n, bound):
    # Nodes: variable v -> v, check c -> n + c.
    dist = {root: 0}
    parent = {root: -1}
    queue = deque([root])
    best = None
    best_pair = None
    while queue:
        u = queue.popleft()
        du = dist[u]
        limit = best if best is not None else bound
        if limit is not None and 2 * du + 1 >= limit:
            break
        nbrs = (n + c for c in cols[u]) if u < n else rows[u - n]
        for x in nbrs:
            if x == parent[u]:
                continue
            if x in dist:
                length = du + dist[x] + 1
                if (best is None or length < best) and (bound is None or length < bound):
                    best, best_pair = length, (u, x)
            else:
                dist[x] = du + 1
                parent[x] = u
                queue.append(x)
    if best is None:
        return None
    u, x = best_pair
    left = _path_to_root(u, parent)
    right = _path_to_root(x, parent)
    if set(left[:-1]) & set(right[:-1]):
        # walk through a shared prefix: not a simple cycle through this root
        return None
    cycle = left[::-1] + right[:-1]
    # rotate so the cycle starts at a variable node
    return tuple(c - n if k % 2 else c for k, c in enumerate(cycle))


def _path_to_root(node, parent):
    path = [node]
    while parent[node] != -1:
        node = parent[node]
        path.append(node)
    return path


def min_distance(h: SparseBitMatrix, weight_cap: int | None = None) -> DistanceReport:
    """Exact minimum distance and multiplicity up to ``weight_cap``.

    Codewords are enumerated by deciding, row by row, which columns whose
    first one lies in that row belong to the support.  The parity of that
    choice is forced by the row's pending syndrome bit, every codeword is
    produced exactly once (from its first row), and a branch is cut as soon
    as its weight plus ``ceil(pending / max column weight)`` exceeds the
    best weight seen.  For matrices with a declared cyclic symmetry only
    codewords touching row 0 are enumerated and counts are scaled back up.

    ``weight_cap`` defaults to twice the largest column weight.
    """
    col_masks = h.column_masks()
    weights = [m.bit_count() for m in col_masks]
    w_max = max(weights, default=0)
    if weight_cap is None:
        weight_cap = 2 * w_max
    if weight_cap < 1:
        raise ValueError(f"weight_cap must be >= 1, got {weight_cap}")

    zero_cols = [c for c, m in enumerate(col_masks) if m == 0]
    if zero_cols:
        return DistanceReport(1, len(zero_cols), "column-subset search", weight_cap, (zero_cols[0],))

    span = _tail_biting_span(h)
    if span is not None and h.rows > weight_cap * (span - 1):
        return _gapped_search(h, col_masks, w_max, weight_cap, span)

    starting: list[list[int]] = [[] for _ in range(h.rows)]
    for c, m in enumerate(col_masks):
        starting[(m & -m).bit_length() - 1].append(c)

    symmetric = h.cyclic_shift is not None and h.cyclic_shift[0] == 1 and h.is_shift_invariant(*h.cyclic_shift)
    search = _OrderedSearch(col_masks, starting, h.ones, w_max, weight_cap)
    start_rows = [0] if symmetric else range(h.rows)
    for r0 in start_rows:
        search.run_from(r0)

    if search.best > weight_cap:
        return DistanceReport(None, 0, "column-subset search", weight_cap)
    found = search.found
    if symmetric:
        # each codeword through row 0 stands for n / |rows touched| translates
        total = sum((Fraction(h.rows, touched) for _, touched in found), Fraction(0))
        if total.denominator != 1:
            raise AssertionError(f"non-integral multiplicity {total}")
        multiplicity = int(total)
    else:
        multiplicity = len(found)
    return DistanceReport(search.best, multiplicity, "column-subset search", weight_cap, found[0][0])


def _tail_biting_span(h: SparseBitMatrix) -> int | None:
    """Row span of the widest column for an ``n x (n * a)`` block-shift-invariant matrix, else None."""
    if h.cyclic_shift is None or h.cyclic_shift[0] != 1:
        return None
    a = h.cyclic_shift[1]
    n = h.rows
    if n == 0 or h.cols != n * a or not h.is_shift_invariant(1, a):
        return None
    # block 0 columns hold the row offsets directly; every other block is a rotation
    return 1 + max(max(col) for col in h.columns[:a])


def _gapped_search(h, col_masks, w_max, weight_cap, span):
    # Rotate any low-weight codeword so that it starts right after a run of
    # >= span - 1 empty blocks; it then lies in blocks 0 .. n - span without
    # wrapping and is a path of the convolutional code starting at block 0.
    # A codeword with no such run needs n / (span - 1) > weight_cap blocks.
    a = h.cyclic_shift[1]
    n = h.rows
    starting: list[list[int]] = [[] for _ in range(n)]
    for t in range(n - span + 1):
        starting[t] = list(range(t * a, (t + 1) * a))
    search = _OrderedSearch(col_masks, starting, h.ones, w_max, weight_cap)
    search.run_from(0)
    if search.best > weight_cap:
        return DistanceReport(None, 0, "column-subset search", weight_cap)
    return DistanceReport(search.best, n * len(search.found), "column-subset search", weight_cap, search.found[0][0])


class _OrderedSearch:
    def __init__(self, col_masks, starting, row_cols, w_max, cap):
        self.col_masks = col_masks
        self.starting = starting
        self.row_cols = row_cols
        self.first_row = [(m & -m).bit_length() - 1 for m in col_masks]
        self.w_max = w_max
        self.best = cap + 1
        self.found: list[tuple[tuple[int, ...], int]] = []

    def _bound(self, pending: int, r: int, slack: int) -> int:
        """Lower bound on the columns still needed to clear ``pending``.

        Uses the largest number of pending bits a single still-available
        column covers; the cheap ``w_max`` version is tried first and the
        exact cover is only computed when it could prune (``slack`` is the
        weight still allowed).
        """
        n = pending.bit_count()
        weak = -(-n // self.w_max)
        if weak > slack or n <= slack:
            return weak
        cover = 1
        masks, first_row, row_cols = self.col_masks, self.first_row, self.row_cols
        x = pending
        while x and cover < self.w_max:
            low = x & -x
            x ^= low
            for c in row_cols[low.bit_length() - 1]:
                if first_row[c] > r:
                    k = (masks[c] & pending).bit_count()
                    if k > cover:
                        cover = k
        return -(-n // cover)

    def _record(self, chosen):
        weight = len(chosen)
        if weight > self.best:
            return
        touched = 0
        for c in chosen:
            touched |= self.col_masks[c]
        if weight < self.best:
            self.best = weight
            self.found = []
        self.found.append((tuple(sorted(chosen)), touched.bit_count()))

    def run_from(self, r0: int):
        # a codeword's first row is hit by an even number (>= 2) of its columns
        self._choose(r0, 0, [], odd=False)

    def _choose(self, r, pending, chosen, odd):
        masks = self.col_masks
        cands = self.starting[r]
        used = len(chosen)
        n_pending = pending.bit_count()
        # a column clears at most the pending bits it overlaps
        gains = sorted(((masks[c] & pending).bit_count() for c in cands), reverse=True)
        size = 1 if odd else 2
        while size <= len(cands) and used + size <= self.best:
            left = max(0, n_pending - sum(gains[:size]))
            if used + size + -(-left // self.w_max) > self.best:
                size += 2
                continue
            for subset in combinations(cands, size):
                p = pending
                for c in subset:
                    p ^= masks[c]
                if p == 0:
                    self._record(chosen + list(subset))
                elif used + size + self._bound(p, r, self.best - used - size) <= self.best:
                    self._descend(r, p, chosen + list(subset))
            size += 2

    def _descend(self, r, pending, chosen):
        first = (pending & -pending).bit_length() - 1
        used = len(chosen)
        # rows before the next pending one may take an even number of new columns
        if used + 2 <= self.best:
            if used + 2 + -(-pending.bit_count() // self.w_max) <= self.best:
                rows = [q for q in range(r + 1, first) if self.starting[q]]
            else:
                # only rows with a column overlapping the pending bits can pay off
                rows = set()
                x = pending
                while x:
                    low = x & -x
                    x ^= low
                    for c in self.row_cols[low.bit_length() - 1]:
                        if r < self.first_row[c] < first:
                            rows.add(self.first_row[c])
                rows = sorted(rows)
            for q in rows:
                self._choose(q, pending, chosen, odd=False)
        self._choose(first, pending, chosen, odd=True)


def min_distance_oracle(h: SparseBitMatrix) -> DistanceReport:
    """Exhaustive minimum distance over all ``2**k - 1`` nonzero codewords.

    Raises:
        ValueError: the code dimension exceeds :data:`ORACLE_MAX_K`.
    """
    reduced, pivots, info = gf2_systematic(h)
    k = len(info)
    if k > ORACLE_MAX_K:
        raise ValueError(f"code dimension {k} exceeds the exhaustive limit {ORACLE_MAX_K}")
    if k == 0:
        return DistanceReport(None, 0, "exhaustive codeword enumeration", None)

    # generator row for info column j: bit j plus every pivot whose reduced row contains j
    gens = []
    for j in info:
        g = 1 << j
        for row, p in zip(reduced, pivots):
            if row >> j & 1:
                g |= 1 << p
        gens.append(g)

    words = (h.cols + 63) // 64
    gen_arr = np.array([[(g >> (64 * wd)) & (2**64 - 1) for wd in range(words)] for g in gens], dtype=np.uint64)
    low_k = k // 2
    low = _span(gen_arr[:low_k], words)
    high = _span(gen_arr[low_k:], words)

    best = h.cols + 1
    count = 0
    best_word = None
    for hi_idx in range(high.shape[0]):
        block = low ^ high[hi_idx]
        wt = np.bitwise_count(block).sum(axis=1, dtype=np.int64)
        if hi_idx == 0:
            wt[0] = h.cols + 1  # the zero codeword
        m = wt.min()
        if m < best:
            best, count = int(m), int((wt == m).sum())
            best_word = block[int(wt.argmin())]
        elif m == best:
            count += int((wt == m).sum())
    support = tuple(
        wd * 64 + b for wd in range(words) for b in range(64) if int(best_word[wd]) >> b & 1
    )
    return DistanceReport(best, count, "exhaustive codeword enumeration", None, support)


def _span(gens: np.ndarray, words: int) -> np.ndarray:
    """All ``2**len(gens)`` XOR combinations, index bit ``j`` selecting ``gens[j]``."""
    out = np.zeros((1, words), dtype=np.uint64)
    for g in gens:
        out = np.concatenate([out, out ^ g])
    return out


def pair_codeword_estimate(a: int, n_bits: int) -> float:
    """Estimated number of weight-``2w`` codewords, ``C(a, 2) * n_bits / a``.

    Each pair of base columns yields one such codeword per block shift, by
    placing every column of the pair at the other one's row offsets.  Other
    codewords of the same weight make this an estimate, not a count.
    """
    return comb(a, 2) * n_bits / a


def default_length(design: DifferenceDesign, weight_cap: int | None = None) -> int:
    """Default tail-biting length: ``4 * lh``, raised so the gapped distance search is exact.

    Beyond ``cap * (lh - 1)`` blocks no codeword of weight ``<= cap`` can wrap
    around, so the measured values are those of the long-length limit.
    """
    cap = weight_cap or 2 * design.w
    return max(4 * design.lh, cap * (design.lh - 1) + 1)


def measure_tail_biting(design: DifferenceDesign, n_blocks: int | None = None, weight_cap: int | None = None):
    """Girth and distance of the tail-biting code, also checked at twice the length.

    Returns:
        ``(girth_report, distance_report, stable)``, where ``stable`` is False
        when the measurements at ``n_blocks`` and ``2 * n_blocks`` disagree on
        girth or minimum distance.
    """
    cap = weight_cap or 2 * design.w
    n_blocks = n_blocks or default_length(design, cap)
    reports = []
    for n in (n_blocks, 2 * n_blocks):
        h = tail_biting_matrix(design, n)
        reports.append((girth(h), min_distance(h, cap)))
    (g1, d1), (g2, d2) = reports
    stable = g1.girth == g2.girth and d1.d_min == d2.d_min
    if not stable:
        log.warning(
            "tail-biting measurements disagree: n_blocks=%d gives girth %s / d_min %s, "
            "n_blocks=%d gives girth %s / d_min %s",
            n_blocks, g1.girth, d1.d_min, 2 * n_blocks, g2.girth, d2.d_min,
        )
    return g1, d1, stable
