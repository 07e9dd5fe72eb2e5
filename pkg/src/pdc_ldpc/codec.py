"""Encoders and the sum-product decoder.

LLR sign convention: a positive LLR means bit 0 is more likely.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .design import DifferenceDesign
from .matrix import SparseBitMatrix, gf2_systematic, tail_biting_matrix

__all__ = [
    "DecodeResult",
    "DecoderConfig",
    "StreamEncoder",
    "SumProductDecoder",
    "TailBitingEncoder",
    "boxplus",
    "decode_sum_product",
    "encode_stream",
    "encode_tail_biting",
]

# neutral element of boxplus for padded check slots; finite so pad - pad stays defined
_PAD = 1e300


class StreamEncoder:
    """Block-by-block systematic encoder for the semi-infinite code.

    Each output block is the ``a - 1`` information bits followed by one
    parity bit.  The parity makes the check of the current block-row even:
    the first row vector of the block column is all ones, so the parity bit
    is the XOR of the information bits and the contributions of the
    previous ``lh - 1`` code blocks.
    """

    def __init__(self, design: DifferenceDesign):
        self.design = design
        self._taps = [design.positions(i)[1:] for i in range(design.a)]
        self.reset()

    def reset(self):
        # _acc[k] holds the parity owed to the check k blocks ahead
        self._acc = np.zeros(self.design.lh, dtype=np.uint8)

    def push(self, info) -> np.ndarray:
        a = self.design.a
        info = np.asarray(info, dtype=np.uint8)
        if info.shape != (a - 1,):
            raise ValueError(f"expected {a - 1} information bits, got shape {info.shape}")
        block = np.empty(a, dtype=np.uint8)
        block[:-1] = info & 1
        block[-1] = (int(block[:-1].sum()) + int(self._acc[0])) & 1
        self._acc = np.roll(self._acc, -1)
        self._acc[-1] = 0
        for i in np.flatnonzero(block):
            for p in self._taps[i]:
                self._acc[p - 1] ^= 1
        return block


def encode_stream(design: DifferenceDesign, info_blocks) -> np.ndarray:
    """Encode ``(..., n_blocks, a - 1)`` information bits into ``(..., n_blocks, a)`` code blocks.

    Leading dimensions are independent streams, each starting from the
    all-zero state.
    """
    a = design.a
    info = np.asarray(info_blocks, dtype=np.uint8)
    if info.ndim < 2 or info.shape[-1] != a - 1:
        raise ValueError(f"expected information blocks of width {a - 1}, got shape {info.shape}")
    lead = info.shape[:-2]
    n = info.shape[-2]
    info = info.reshape(-1, n, a - 1) & 1
    frames = info.shape[0]
    out = np.zeros((frames, n, a), dtype=np.uint8)
    out[:, :, :-1] = info
    info_parity = info.sum(axis=2, dtype=np.int64) & 1
    owed = np.zeros((frames, n + design.lh), dtype=np.uint8)
    taps = [np.array(design.positions(i)[1:], dtype=np.int64) for i in range(a)]
    for t in range(n):
        out[:, t, -1] = (info_parity[:, t] + owed[:, t]) & 1
        for i in range(a):
            hit = out[:, t, i].astype(bool)
            if hit.any():
                owed[np.ix_(hit, t + taps[i])] ^= 1
    return out.reshape(*lead, n, a)


class TailBitingEncoder:
    """Systematic encoder for the tail-biting code, via GF(2) elimination of its parity-check matrix."""

    def __init__(self, design: DifferenceDesign, n_blocks: int):
        self.design = design
        self.n_blocks = n_blocks
        self.h = tail_biting_matrix(design, n_blocks)
        reduced, pivots, info = gf2_systematic(self.h)
        self.info_positions = info
        self._pivots = pivots
        # for every pivot, the information columns its reduced row depends on
        self._deps = [[j for j in info if row >> j & 1] for row in reduced]

    @property
    def k(self) -> int:
        return len(self.info_positions)

    @property
    def n(self) -> int:
        return self.h.cols

    def encode(self, info_bits) -> np.ndarray:
        info_bits = np.asarray(info_bits, dtype=np.uint8)
        if info_bits.shape != (self.k,):
            raise ValueError(f"expected {self.k} information bits, got shape {info_bits.shape}")
        word = np.zeros(self.n, dtype=np.uint8)
        word[self.info_positions] = info_bits & 1
        for p, deps in zip(self._pivots, self._deps):
            word[p] = int(word[deps].sum()) & 1
        return word


def encode_tail_biting(design: DifferenceDesign, n_blocks: int, info_bits) -> np.ndarray:
    return TailBitingEncoder(design, n_blocks).encode(info_bits)


@dataclass(frozen=True)
class DecoderConfig:
    max_iterations: int = 50
    early_stop: bool = True
    llr_clamp: float = 25.0

    def __post_init__(self):
        if self.max_iterations < 1:
            raise ValueError(f"max_iterations must be >= 1, got {self.max_iterations}")
        if not self.llr_clamp > 0:
            raise ValueError(f"llr_clamp must be > 0, got {self.llr_clamp}")


@dataclass(frozen=True)
class DecodeResult:
    hard_bits: np.ndarray
    iterations_used: int
    converged: bool


def boxplus(x, y):
    """Exact pairwise check-node combination ``2 atanh(tanh(x/2) tanh(y/2))``.

    Written as a min term plus two ``log1p`` corrections so it neither
    overflows nor loses precision for large magnitudes.
    """
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    ax, ay = np.abs(x), np.abs(y)
    mag = np.minimum(ax, ay) + np.log1p(np.exp(-(ax + ay))) - np.log1p(np.exp(-np.abs(ax - ay)))
    return np.sign(x) * np.sign(y) * np.maximum(mag, 0.0)


class SumProductDecoder:
    """Flooding sum-product decoder bound to one parity-check matrix.

    Edge bookkeeping is computed once, so one instance can decode many
    words.  Instances hold no per-call state.
    """

    def __init__(self, h: SparseBitMatrix, cfg: DecoderConfig | None = None):
        self.h = h
        self.cfg = cfg or DecoderConfig()
        er, ec = h.edges
        self._er, self._ec = er, ec
        degrees = h.row_weights()
        self._width = int(degrees.max(initial=0))
        starts = np.concatenate([[0], np.cumsum(degrees)[:-1]]).astype(np.int64)
        self._slot = np.arange(len(er)) - starts[er]

    def _check_update(self, v2c: np.ndarray) -> np.ndarray:
        m, width = self.h.rows, self._width
        grid = np.full((m, width + 1), _PAD)
        grid[self._er, self._slot] = v2c
        # prefix[:, k] combines slots < k, suffix[:, k] combines slots >= k
        prefix = np.full((m, width + 1), _PAD)
        suffix = np.full((m, width + 1), _PAD)
        for k in range(1, width + 1):
            prefix[:, k] = boxplus(prefix[:, k - 1], grid[:, k - 1])
        for k in range(width - 1, -1, -1):
            suffix[:, k] = boxplus(suffix[:, k + 1], grid[:, k])
        return boxplus(prefix[self._er, self._slot], suffix[self._er, self._slot + 1])

    def decode(self, llr) -> DecodeResult:
        cfg = self.cfg
        clamp = cfg.llr_clamp
        llr = np.clip(np.asarray(llr, dtype=np.float64), -clamp, clamp)
        if llr.shape != (self.h.cols,):
            raise ValueError(f"expected {self.h.cols} LLRs, got shape {llr.shape}")

        total = llr
        hard = (total < 0).astype(np.uint8)
        if cfg.early_stop and self._solved(hard, total):
            return DecodeResult(hard, 0, True)

        v2c = llr[self._ec]
        for it in range(1, cfg.max_iterations + 1):
            c2v = np.clip(self._check_update(v2c), -clamp, clamp)
            total = llr + np.bincount(self._ec, weights=c2v, minlength=self.h.cols)
            v2c = np.clip(total[self._ec] - c2v, -clamp, clamp)
            hard = (total < 0).astype(np.uint8)
            if cfg.early_stop and self._solved(hard, total):
                return DecodeResult(hard, it, True)
        return DecodeResult(hard, cfg.max_iterations, self._solved(hard, total))

    def _solved(self, hard, total) -> bool:
        # a zero posterior is undecided, whatever the syndrome says
        return not self.h.syndrome(hard).any() and bool(np.all(total != 0))


def decode_sum_product(h: SparseBitMatrix, llr, cfg: DecoderConfig | None = None) -> DecodeResult:
    return SumProductDecoder(h, cfg).decode(llr)
