"""BPSK over AWGN and a reproducible Monte Carlo BER/FER harness.

Randomness: every frame draws from ``numpy.random.default_rng([point_seed,
frame_index])`` (PCG64 seeded through SeedSequence, Gaussian samples from
``standard_normal``), so a frame's outcome depends only on its own index and
results do not change with the number of worker processes.  The seed of
sweep point ``j`` is derived from the master seed by
:func:`point_seed`.
"""

from __future__ import annotations

import csv
import hashlib
import json
import logging
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from .codec import DecoderConfig, SumProductDecoder, encode_stream
from .design import DifferenceDesign
from .matrix import conv_window

__all__ = [
    "CSV_HEADER",
    "SimRecord",
    "awgn_llr",
    "bpsk_modulate",
    "default_workers",
    "noise_variance",
    "point_seed",
    "read_csv",
    "run_ber_point",
    "sweep",
    "uncoded_ber",
]

log = logging.getLogger(__name__)

CSV_HEADER = ["ebno_db", "info_bits", "bit_errors", "frames", "frame_errors", "ber", "fer", "mean_iters", "seed"]
WORKERS_ENV = "PDC_LDPC_WORKERS"


def default_workers() -> int:
    try:
        return max(1, int(os.environ.get(WORKERS_ENV, "1")))
    except ValueError:
        return 1


def bpsk_modulate(bits) -> np.ndarray:
    """Map bit 0 to +1.0 and bit 1 to -1.0."""
    return 1.0 - 2.0 * np.asarray(bits, dtype=np.float64)


def noise_variance(ebno_db: float, rate: float) -> float:
    """Per-dimension noise variance for unit-energy BPSK at the given Eb/N0 and code rate."""
    if not rate > 0 or rate > 1:
        raise ValueError(f"rate must be in (0, 1], got {rate}")
    return 1.0 / (2.0 * rate * 10.0 ** (ebno_db / 10.0))


def awgn_llr(symbols, ebno_db: float, rate: float, seed=None) -> np.ndarray:
    """Add white Gaussian noise to BPSK symbols and return channel LLRs ``2 y / sigma^2``.

    ``seed`` may be anything :func:`numpy.random.default_rng` accepts,
    including a ``Generator``.
    """
    sigma2 = noise_variance(ebno_db, rate)
    symbols = np.asarray(symbols, dtype=np.float64)
    rng = np.random.default_rng(seed)
    y = symbols + np.sqrt(sigma2) * rng.standard_normal(symbols.shape)
    return 2.0 * y / sigma2


def uncoded_ber(ebno_db: float) -> float:
    """BER of uncoded BPSK, ``Q(sqrt(2 Eb/N0))``."""
    return 0.5 * math.erfc(math.sqrt(10.0 ** (ebno_db / 10.0)))


def point_seed(master_seed: int, index: int) -> int:
    """Seed of sweep point ``index``: SeedSequence mixing of ``[master_seed, index]``, 63 bits."""
    state = np.random.SeedSequence([master_seed, index]).generate_state(1, dtype=np.uint64)
    return int(state[0] >> np.uint64(1))


@dataclass
class SimRecord:
    ebno_db: float
    info_bits_counted: int
    bit_errors: int
    frames: int
    frame_errors: int
    mean_iterations: float
    config_echo: dict = field(default_factory=dict)

    @property
    def ber(self) -> float:
        return self.bit_errors / self.info_bits_counted if self.info_bits_counted else 0.0

    @property
    def fer(self) -> float:
        return self.frame_errors / self.frames if self.frames else 0.0

    @property
    def seed(self):
        return self.config_echo.get("seed")

    def csv_row(self) -> list:
        return [
            repr(float(self.ebno_db)),
            self.info_bits_counted,
            self.bit_errors,
            self.frames,
            self.frame_errors,
            repr(self.ber),
            repr(self.fer),
            repr(float(self.mean_iterations)),
            self.seed,
        ]


def design_hash(design: DifferenceDesign) -> str:
    payload = json.dumps({"a": design.a, "w": design.w, "diffs": [list(c) for c in design.diffs]})
    return hashlib.sha256(payload.encode()).hexdigest()[:16]


# per-process decoder cache; frames of one point share the matrix
_CACHE: dict = {}


def _decoder(design: DifferenceDesign, n_blocks: int, cfg: DecoderConfig) -> SumProductDecoder:
    key = (design.a, design.w, design.diffs, n_blocks, cfg)
    if key not in _CACHE:
        _CACHE.clear()
        _CACHE[key] = SumProductDecoder(conv_window(design, n_blocks), cfg)
    return _CACHE[key]


def _simulate_frame(design, n_blocks, guard_blocks, ebno_db, cfg, seed, frame) -> tuple[int, int]:
    """Return ``(info bit errors in the counted blocks, iterations used)`` for one frame."""
    rng = np.random.default_rng([seed, frame])
    a = design.a
    info = rng.integers(0, 2, size=(n_blocks, a - 1), dtype=np.uint8)
    code = encode_stream(design, info)
    llr = awgn_llr(bpsk_modulate(code.ravel()), ebno_db, design.rate, rng)
    result = _decoder(design, n_blocks, cfg).decode(llr)
    decided = result.hard_bits.reshape(n_blocks, a)[guard_blocks:n_blocks - guard_blocks, :-1]
    errors = int(np.count_nonzero(decided != info[guard_blocks:n_blocks - guard_blocks]))
    return errors, result.iterations_used


def _run_batch(args):
    design, n_blocks, guard_blocks, ebno_db, cfg, seed, frames = args
    return [_simulate_frame(design, n_blocks, guard_blocks, ebno_db, cfg, seed, f) for f in frames]


def run_ber_point(
    design: DifferenceDesign,
    ebno_db: float,
    n_blocks: int | None = None,
    guard_blocks: int | None = None,
    min_frame_errors: int = 100,
    max_frames: int = 10**6,
    cfg: DecoderConfig | None = None,
    seed: int = 0,
    workers: int | None = None,
) -> SimRecord:
    """Measure BER/FER at one Eb/N0 on truncated windows of ``n_blocks`` blocks.

    Errors are counted on information bits of blocks
    ``[guard_blocks, n_blocks - guard_blocks)`` only.  Frames are processed
    in index order until ``min_frame_errors`` frame errors or ``max_frames``
    frames; the stopping frame does not depend on ``workers``.
    """
    cfg = cfg or DecoderConfig()
    n_blocks = n_blocks if n_blocks is not None else 20 * design.lh
    guard_blocks = guard_blocks if guard_blocks is not None else design.lh
    if n_blocks <= 2 * guard_blocks:
        raise ValueError(f"n_blocks ({n_blocks}) must exceed 2 * guard_blocks ({guard_blocks})")
    if guard_blocks < 0:
        raise ValueError(f"guard_blocks must be >= 0, got {guard_blocks}")
    if max_frames < 1:
        raise ValueError(f"max_frames must be >= 1, got {max_frames}")
    if min_frame_errors < 1:
        raise ValueError(f"min_frame_errors must be >= 1, got {min_frame_errors}")
    if design.a < 2:
        raise ValueError("a rate-0 code (a = 1) carries no information bits")
    workers = workers or default_workers()

    bits_per_frame = (n_blocks - 2 * guard_blocks) * (design.a - 1)
    batch = max(8, 4 * workers)
    frames = frame_errors = bit_errors = iterations = 0
    pool = ProcessPoolExecutor(workers) if workers > 1 else None
    try:
        while frames < max_frames and frame_errors < min_frame_errors:
            todo = range(frames, min(frames + batch, max_frames))
            if pool is None:
                results = _run_batch((design, n_blocks, guard_blocks, ebno_db, cfg, seed, todo))
            else:
                chunks = [todo[i::workers] for i in range(workers)]
                parts = list(pool.map(_run_batch, [(design, n_blocks, guard_blocks, ebno_db, cfg, seed, c) for c in chunks]))
                results = [parts[i % workers][i // workers] for i in range(len(todo))]
            for errors, iters in results:
                frames += 1
                bit_errors += errors
                frame_errors += errors > 0
                iterations += iters
                if frame_errors >= min_frame_errors:
                    break
    finally:
        if pool is not None:
            pool.shutdown()

    echo = {
        "design_hash": design_hash(design),
        "design": design.to_dict(),
        "ebno_db": ebno_db,
        "rate": design.rate,
        "n_blocks": n_blocks,
        "guard_blocks": guard_blocks,
        "min_frame_errors": min_frame_errors,
        "max_frames": max_frames,
        "decoder": asdict(cfg),
        "seed": seed,
    }
    return SimRecord(ebno_db, frames * bits_per_frame, bit_errors, frames, frame_errors, iterations / frames, echo)


def sweep(design: DifferenceDesign, ebno_list, csv_path=None, seed: int = 0, **kwargs) -> list[SimRecord]:
    """Run :func:`run_ber_point` for every Eb/N0, point ``j`` seeded with ``point_seed(seed, j)``.

    When ``csv_path`` is given, each row is written and flushed as soon as
    its point finishes, and the configuration of every point goes to a
    sidecar ``<csv_path>.json``.
    """
    ebno_list = [float(x) for x in ebno_list]
    if not ebno_list:
        raise ValueError("ebno_list must not be empty")
    records = []
    fh = writer = None
    if csv_path is not None:
        fh = open(csv_path, "w", newline="")
        writer = csv.writer(fh)
        writer.writerow(CSV_HEADER)
        fh.flush()
    try:
        for j, ebno in enumerate(ebno_list):
            rec = run_ber_point(design, ebno, seed=point_seed(seed, j), **kwargs)
            rec.config_echo["master_seed"] = seed
            rec.config_echo["point_index"] = j
            records.append(rec)
            log.info("Eb/N0 %.2f dB: ber=%.3e fer=%.3e frames=%d", ebno, rec.ber, rec.fer, rec.frames)
            if writer is not None:
                writer.writerow(rec.csv_row())
                fh.flush()
    finally:
        if fh is not None:
            fh.close()
            sidecar = Path(str(csv_path) + ".json")
            sidecar.write_text(json.dumps([r.config_echo for r in records], indent=2) + "\n")
    return records


def read_csv(path) -> list[SimRecord]:
    """Parse a results CSV back into records (config taken from the sidecar when present)."""
    sidecar = Path(str(path) + ".json")
    echoes = json.loads(sidecar.read_text()) if sidecar.exists() else []
    records = []
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames != CSV_HEADER:
            raise ValueError(f"{path}: unexpected header {reader.fieldnames}")
        for i, row in enumerate(reader):
            echo = dict(echoes[i]) if i < len(echoes) else {}
            echo["seed"] = int(row["seed"]) if row["seed"] not in ("", "None") else None
            records.append(
                SimRecord(
                    ebno_db=float(row["ebno_db"]),
                    info_bits_counted=int(row["info_bits"]),
                    bit_errors=int(row["bit_errors"]),
                    frames=int(row["frames"]),
                    frame_errors=int(row["frame_errors"]),
                    mean_iterations=float(row["mean_iters"]),
                    config_echo=echo,
                )
            )
    return records
