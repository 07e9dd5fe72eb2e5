"""Syndrome formers, finite parity-check matrices and GF(2) algebra.

Matrices are row-sparse: each row is a sorted tuple of column indices.
GF(2) elimination packs rows into Python integers and XORs them.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

from .design import DifferenceDesign

__all__ = [
    "SparseBitMatrix",
    "StructureError",
    "SyndromeFormer",
    "circulant_form",
    "conv_window",
    "gf2_systematic",
    "rank_gf2",
    "read_alist",
    "syndrome_former",
    "tail_biting_matrix",
    "write_alist",
]


class StructureError(ValueError):
    """A matrix does not have the structure an operation relies on."""


@dataclass(frozen=True, eq=False)
class SparseBitMatrix:
    """Binary matrix stored as per-row sorted column indices.

    ``cyclic_shift`` optionally records a ``(row_step, col_step)`` pair under
    which the matrix is invariant when rows and columns are rotated together
    (tail-biting matrices carry ``(1, a)``).  Analysis code uses it to cut work.
    """

    rows: int
    cols: int
    ones: tuple[tuple[int, ...], ...]
    cyclic_shift: tuple[int, int] | None = field(default=None)

    def __post_init__(self):
        ones = tuple(tuple(sorted(set(int(c) for c in row))) for row in self.ones)
        if len(ones) != self.rows:
            raise ValueError(f"expected {self.rows} rows, got {len(ones)}")
        for r, row in enumerate(ones):
            if row and (row[0] < 0 or row[-1] >= self.cols):
                raise ValueError(f"row {r}: column index out of range [0, {self.cols})")
        object.__setattr__(self, "ones", ones)

    @classmethod
    def from_dense(cls, dense, cyclic_shift=None) -> "SparseBitMatrix":
        dense = np.asarray(dense) % 2
        if dense.ndim != 2:
            raise ValueError("expected a 2-D array")
        return cls(
            dense.shape[0],
            dense.shape[1],
            tuple(tuple(np.flatnonzero(row).tolist()) for row in dense),
            cyclic_shift,
        )

    @classmethod
    def from_columns(cls, rows: int, columns: Sequence[Iterable[int]], cyclic_shift=None) -> "SparseBitMatrix":
        acc: list[list[int]] = [[] for _ in range(rows)]
        for c, col in enumerate(columns):
            for r in col:
                acc[r].append(c)
        return cls(rows, len(columns), tuple(map(tuple, acc)), cyclic_shift)

    def __eq__(self, other):
        if not isinstance(other, SparseBitMatrix):
            return NotImplemented
        return (self.rows, self.cols, self.ones) == (other.rows, other.cols, other.ones)

    def __hash__(self):
        return hash((self.rows, self.cols, self.ones))

    def __repr__(self):
        return f"SparseBitMatrix(rows={self.rows}, cols={self.cols}, nnz={self.nnz})"

    @property
    def shape(self) -> tuple[int, int]:
        return self.rows, self.cols

    @property
    def nnz(self) -> int:
        return sum(len(row) for row in self.ones)

    @cached_property
    def columns(self) -> tuple[tuple[int, ...], ...]:
        """Column view: per-column sorted row indices."""
        acc: list[list[int]] = [[] for _ in range(self.cols)]
        for r, row in enumerate(self.ones):
            for c in row:
                acc[c].append(r)
        return tuple(map(tuple, acc))

    @cached_property
    def edges(self) -> tuple[np.ndarray, np.ndarray]:
        """``(row_index, col_index)`` arrays of the ones in row-major order."""
        r = np.fromiter((r for r, row in enumerate(self.ones) for _ in row), dtype=np.int64, count=self.nnz)
        c = np.fromiter((c for row in self.ones for c in row), dtype=np.int64, count=self.nnz)
        return r, c

    def row_weights(self) -> np.ndarray:
        return np.array([len(row) for row in self.ones], dtype=np.int64)

    def column_weights(self) -> np.ndarray:
        return np.bincount(self.edges[1], minlength=self.cols)

    def to_dense(self) -> np.ndarray:
        out = np.zeros(self.shape, dtype=np.uint8)
        r, c = self.edges
        out[r, c] = 1
        return out

    def row_masks(self) -> list[int]:
        """Each row packed into an integer, bit ``c`` set for column ``c``."""
        return [sum(1 << c for c in row) for row in self.ones]

    def column_masks(self) -> list[int]:
        """Each column packed into an integer, bit ``r`` set for row ``r``."""
        return [sum(1 << r for r in col) for col in self.columns]

    def syndrome(self, bits) -> np.ndarray:
        bits = np.asarray(bits, dtype=np.uint8)
        if bits.shape != (self.cols,):
            raise ValueError(f"expected {self.cols} bits, got shape {bits.shape}")
        r, c = self.edges
        return (np.bincount(r, weights=bits[c], minlength=self.rows).astype(np.int64) & 1).astype(np.uint8)

    def permute_columns(self, perm: Sequence[int]) -> "SparseBitMatrix":
        """Matrix whose column ``j`` is column ``perm[j]`` of this one."""
        perm = list(perm)
        if sorted(perm) != list(range(self.cols)):
            raise ValueError("perm is not a permutation of the columns")
        inverse = [0] * self.cols
        for j, p in enumerate(perm):
            inverse[p] = j
        return SparseBitMatrix(self.rows, self.cols, tuple(tuple(inverse[c] for c in row) for row in self.ones))

    def is_shift_invariant(self, row_step: int, col_step: int) -> bool:
        """Check that rotating rows by ``row_step`` and columns by ``col_step`` maps the matrix onto itself."""
        if self.rows == 0 or self.cols == 0:
            return True
        for r, row in enumerate(self.ones):
            shifted = tuple(sorted((c + col_step) % self.cols for c in row))
            if self.ones[(r + row_step) % self.rows] != shifted:
                return False
        return True


@dataclass(frozen=True, eq=False)
class SyndromeFormer:
    """The ``a x lh`` syndrome former and its memory figures.

    ``hs[i, r]`` is 1 when column ``i`` of the block column has a one in row ``r``;
    ``hs.T`` is the block column repeated along the diagonal of the
    semi-infinite parity-check matrix.
    """

    design: DifferenceDesign
    hs: np.ndarray

    @property
    def lh(self) -> int:
        return self.hs.shape[1]

    @property
    def ms(self) -> int:
        return self.lh - 1

    @property
    def vs(self) -> int:
        return self.lh * self.design.a

    def row_vector(self, i: int) -> np.ndarray:
        """``H_i``: row ``i`` of the block column, length ``a``."""
        return self.hs[:, i]


def syndrome_former(design: DifferenceDesign) -> SyndromeFormer:
    hs = np.zeros((design.a, design.lh), dtype=np.uint8)
    for i in range(design.a):
        hs[i, list(design.positions(i))] = 1
    hs.setflags(write=False)
    return SyndromeFormer(design, hs)


def conv_window(design: DifferenceDesign, n_blocks: int) -> SparseBitMatrix:
    """Top-left ``n_blocks x (n_blocks * a)`` window of the semi-infinite parity-check matrix.

    Column ``t * a + i`` is column ``i`` of block ``t``; its ones sit at rows
    ``t + p`` for each offset ``p`` of that column, dropped when past the window.
    """
    if n_blocks < 1:
        raise ValueError(f"n_blocks must be >= 1, got {n_blocks}")
    a = design.a
    offsets = [design.positions(i) for i in range(a)]
    columns = [[t + p for p in offsets[i] if t + p < n_blocks] for t in range(n_blocks) for i in range(a)]
    return SparseBitMatrix.from_columns(n_blocks, columns)


def tail_biting_matrix(design: DifferenceDesign, n_blocks: int) -> SparseBitMatrix:
    """Tail-biting termination: row offsets wrap modulo ``n_blocks``.

    Raises:
        ValueError: ``n_blocks`` is smaller than the syndrome former height, so
            a wrapped column could overlap itself.
    """
    if n_blocks < design.lh:
        raise ValueError(f"n_blocks must be >= lh = {design.lh}, got {n_blocks}")
    a = design.a
    offsets = [design.positions(i) for i in range(a)]
    columns = [[(t + p) % n_blocks for p in offsets[i]] for t in range(n_blocks) for i in range(a)]
    return SparseBitMatrix.from_columns(n_blocks, columns, cyclic_shift=(1, a))


def circulant_form(h: SparseBitMatrix, a: int) -> tuple[list[np.ndarray], list[int]]:
    """Regroup the columns of a tail-biting matrix into ``a`` circulant blocks.

    New column ``i * n + t`` is old column ``t * a + i``: first every column of
    type 0, then every column of type 1, and so on.

    Returns:
        The ``a`` dense ``n x n`` blocks and the permutation (``perm[new] = old``).

    Raises:
        StructureError: the column count is not a multiple of ``a`` or a block
            is not circulant.
    """
    if a < 1 or h.cols % a or h.cols // a != h.rows:
        raise StructureError(f"expected an n x (n * {a}) matrix, got {h.rows} x {h.cols}")
    n = h.rows
    perm = [t * a + i for i in range(a) for t in range(n)]
    dense = h.permute_columns(perm).to_dense()
    blocks = [dense[:, i * n:(i + 1) * n] for i in range(a)]
    for i, block in enumerate(blocks):
        if not np.array_equal(np.roll(block, (1, 1), axis=(0, 1)), block):
            raise StructureError(f"block {i} is not circulant")
    return blocks, perm


def _as_row_masks(m) -> tuple[list[int], int]:
    if isinstance(m, SparseBitMatrix):
        return m.row_masks(), m.cols
    dense = np.asarray(m, dtype=np.uint8) % 2
    return [int("".join(map(str, row[::-1])) or "0", 2) for row in dense.tolist()], dense.shape[1]


def _eliminate(rows: list[int], ncols: int) -> tuple[list[int], list[int]]:
    """Reduced row echelon form over GF(2); returns (nonzero rows, pivot columns)."""
    pivots: list[int] = []
    reduced: list[int] = []
    rows = [r for r in rows if r]
    for col in range(ncols):
        bit = 1 << col
        for idx, row in enumerate(rows):
            if row & bit:
                pivot = rows.pop(idx)
                break
        else:
            continue
        rows = [r ^ pivot if r & bit else r for r in rows]
        reduced = [r ^ pivot if r & bit else r for r in reduced]
        reduced.append(pivot)
        pivots.append(col)
        rows = [r for r in rows if r]
        if not rows:
            break
    return reduced, pivots


def rank_gf2(m) -> int:
    """Rank over GF(2) of a :class:`SparseBitMatrix` or dense 0/1 array."""
    rows, ncols = _as_row_masks(m)
    return len(_eliminate(rows, ncols)[1])


def gf2_systematic(m) -> tuple[list[int], list[int], list[int]]:
    """Systematize a parity-check matrix.

    Returns:
        ``(reduced_rows, pivot_cols, info_cols)``: the reduced row echelon
        rows as bit masks, the pivot column of each reduced row, and the
        remaining (information) columns in increasing order.
    """
    rows, ncols = _as_row_masks(m)
    reduced, pivots = _eliminate(rows, ncols)
    pivot_set = set(pivots)
    return reduced, pivots, [c for c in range(ncols) if c not in pivot_set]


def write_alist(h: SparseBitMatrix, path) -> None:
    """Write ``rows cols`` then one line of 1-based column indices per row."""
    with open(path, "w") as fh:
        fh.write(f"{h.rows} {h.cols}\n")
        for row in h.ones:
            fh.write(" ".join(str(c + 1) for c in row) + "\n")


def read_alist(path) -> SparseBitMatrix:
    with open(path) as fh:
        lines = fh.read().splitlines()
    if not lines:
        raise ValueError(f"{path}: empty matrix file")
    try:
        rows, cols = map(int, lines[0].split())
        ones = [tuple(int(tok) - 1 for tok in line.split()) for line in lines[1:rows + 1]]
    except ValueError as exc:
        raise ValueError(f"{path}: malformed matrix file ({exc})") from exc
    ones += [()] * (rows - len(ones))
    return SparseBitMatrix(rows, cols, tuple(ones))
