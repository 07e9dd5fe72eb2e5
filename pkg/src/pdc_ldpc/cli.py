"""Command-line front end: ``pdc-ldpc {construct,analyze,encode,decode,simulate}``.

Exit codes: 0 success, 1 usage error, 2 search or validation failure.
Packed bit streams are LSB-first within each byte.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys

import numpy as np

from .analysis import default_length, girth, min_distance
from .channel import default_workers, sweep
from .codec import DecoderConfig, SumProductDecoder, encode_stream
from .design import (
    DifferenceDesign,
    SearchExhaustedError,
    is_four_cycle_free,
    lh_lower_bound,
    load_design,
    random_design,
    save_design,
    six_cycle_witnesses,
    uniform_design,
)
from .matrix import conv_window, rank_gf2, syndrome_former, tail_biting_matrix, write_alist

log = logging.getLogger("pdc_ldpc")

EXIT_OK, EXIT_USAGE, EXIT_FAIL = 0, 1, 2

REQUIREMENTS = ("four-cycle-free", "six-cycle-free", "full-rank", "lh-bound", "dmin-le-2w", "stable")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on bad usage; 2 is reserved for validation failures here
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def parse_ebno(text: str) -> list[float]:
    """Parse ``start:step:stop`` (inclusive) into a list of Eb/N0 values."""
    try:
        start, step, stop = (float(x) for x in text.split(":"))
    except ValueError:
        raise UsageError(f"--ebno expects start:step:stop, got {text!r}") from None
    if step <= 0:
        raise UsageError(f"--ebno step must be > 0, got {step}")
    if stop < start:
        raise UsageError(f"--ebno stop ({stop}) is below start ({start})")
    count = int(np.floor((stop - start) / step + 1e-9)) + 1
    return [round(start + j * step, 12) for j in range(count)]


def _design_summary(design: DifferenceDesign) -> dict:
    hs = syndrome_former(design)
    return {
        "lh": hs.lh,
        "ms": hs.ms,
        "vs": hs.vs,
        "lh_bound": lh_lower_bound(design.a, design.w),
        "four_cycle_free": is_four_cycle_free(design),
        "six_cycle_free": not six_cycle_witnesses(design),
    }


def cmd_construct(args) -> int:
    if args.uniform:
        design = uniform_design(args.a, args.w)
    else:
        if args.max_diff is None:
            raise UsageError("--random requires --max-diff")
        design = random_design(
            args.a, args.w, args.max_diff, seed=args.seed,
            avoid_six_cycles=args.avoid_six_cycles, max_attempts=args.max_attempts,
        )
    save_design(design, args.out)
    summary = _design_summary(design)
    if args.alist:
        n = args.alist_blocks or 4 * design.lh
        write_alist(tail_biting_matrix(design, n), args.alist)
        summary["alist_blocks"] = n
    for key, value in summary.items():
        print(f"{key} = {json.dumps(value)}")
    return EXIT_OK


def cmd_analyze(args) -> int:
    design = load_design(args.design)
    cap = args.weight_cap or 2 * design.w
    n = args.n_blocks or default_length(design, cap)
    report = {"design": design.to_dict(), "n_blocks": n, "weight_cap": cap}
    report.update(_design_summary(design))

    measured = []
    for blocks in (n, 2 * n) if args.check_stability else (n,):
        h = tail_biting_matrix(design, blocks)
        measured.append((girth(h), min_distance(h, cap), h))
    g, dist, h = measured[0]
    report["girth"] = g.girth if g.girth is not None else "acyclic"
    report["girth_witness"] = list(g.witness)
    report["d_min"] = dist.d_min if dist.d_min is not None else f">{cap}"
    report["multiplicity"] = dist.multiplicity
    report["distance_method"] = dist.method
    rank = rank_gf2(h)
    report["k"] = h.cols - rank
    report["k_exceeds_design"] = h.cols - rank > n * (design.a - 1)
    window = conv_window(design, n)
    report["full_rank"] = rank_gf2(window) == window.rows
    if args.check_stability:
        (g2, d2, _) = measured[1]
        report["stable"] = g2.girth == g.girth and d2.d_min == dist.d_min

    checks = {
        "four-cycle-free": report["four_cycle_free"],
        "six-cycle-free": report["six_cycle_free"],
        "full-rank": report["full_rank"],
        "lh-bound": report["lh"] >= report["lh_bound"],
        "dmin-le-2w": dist.d_min is not None and dist.d_min <= 2 * design.w,
        "stable": report.get("stable", True),
    }
    requested = {name: checks[name] for name in args.require}
    if args.min_girth is not None:
        requested[f"girth>={args.min_girth}"] = g.girth is None or g.girth >= args.min_girth
    if args.min_dmin is not None:
        requested[f"d_min>={args.min_dmin}"] = dist.d_min is None or dist.d_min >= args.min_dmin
    report["requirements"] = requested

    text = json.dumps(report, indent=2)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)
    failed = [name for name, ok in requested.items() if not ok]
    if failed:
        log.error("requirements not met: %s", ", ".join(failed))
        return EXIT_FAIL
    return EXIT_OK


def _read_bits(stream) -> np.ndarray:
    data = np.frombuffer(stream.read(), dtype=np.uint8)
    return np.unpackbits(data, bitorder="little")


def _write_bits(stream, bits) -> None:
    stream.write(np.packbits(np.asarray(bits, dtype=np.uint8), bitorder="little").tobytes())
    stream.flush()


def cmd_encode(args) -> int:
    design = load_design(args.design)
    a = design.a
    if a < 2:
        raise UsageError("a design with a = 1 carries no information")
    bits = _read_bits(args.input)
    # whole blocks, and a code stream that fills whole bytes
    n = -(-len(bits) // (a - 1))
    while (n * a) % 8:
        n += 1
    info = np.zeros(n * (a - 1), dtype=np.uint8)
    info[: len(bits)] = bits
    code = encode_stream(design, info.reshape(n, a - 1))
    log.info("encoded %d information bits into %d blocks", len(bits), n)
    _write_bits(args.output, code.ravel())
    return EXIT_OK


def cmd_decode(args) -> int:
    design = load_design(args.design)
    a = design.a
    if args.llr:
        llr = np.frombuffer(args.input.read(), dtype="<f8").astype(np.float64)
    else:
        bits = _read_bits(args.input)
        p = args.crossover
        llr = (1.0 - 2.0 * bits) * np.log((1.0 - p) / p)
    if len(llr) == 0 or len(llr) % a:
        log.error("input holds %d code bits, not a positive multiple of a = %d", len(llr), a)
        return EXIT_FAIL
    n = len(llr) // a
    cfg = DecoderConfig(args.max_iterations, not args.no_early_stop, args.llr_clamp)
    result = SumProductDecoder(conv_window(design, n), cfg).decode(llr)
    info = result.hard_bits.reshape(n, a)[:, :-1].ravel()
    if args.info_bytes is not None:
        info = info[: 8 * args.info_bytes]
    else:
        info = info[: len(info) // 8 * 8]
    _write_bits(args.output, info)
    log.info("decoded %d blocks: converged=%s after %d iterations", n, result.converged, result.iterations_used)
    if not result.converged:
        log.error("decoder did not converge")
        return EXIT_FAIL
    return EXIT_OK


def cmd_simulate(args) -> int:
    points = parse_ebno(args.ebno)
    design = load_design(args.design)
    cfg = DecoderConfig(args.max_iterations, not args.no_early_stop, args.llr_clamp)
    records = sweep(
        design, points, csv_path=args.out, seed=args.seed,
        n_blocks=args.n_blocks, guard_blocks=args.guard_blocks,
        min_frame_errors=args.min_frame_errors, max_frames=args.max_frames,
        cfg=cfg, workers=args.workers,
    )
    for rec in records:
        print(f"{rec.ebno_db:g} dB  ber={rec.ber:.3e}  fer={rec.fer:.3e}  frames={rec.frames}")
    return EXIT_OK


def _add_decoder_flags(p):
    p.add_argument("--max-iterations", type=int, default=50, help="sum-product iteration cap (default 50)")
    p.add_argument("--llr-clamp", type=float, default=25.0, help="message magnitude ceiling (default 25)")
    p.add_argument("--no-early-stop", action="store_true", help="always run the full iteration budget")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="pdc-ldpc", description=__doc__.splitlines()[0])
    parser.add_argument("-q", "--quiet", action="store_true", help="log warnings and errors only")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("construct", help="build a design and write it as JSON")
    p.add_argument("--a", type=int, required=True, help="block width; rate is (a-1)/a")
    p.add_argument("--w", type=int, required=True, help="column weight")
    kind = p.add_mutually_exclusive_group(required=True)
    kind.add_argument("--uniform", action="store_true", help="closed-form uniform construction")
    kind.add_argument("--random", action="store_true", help="random search (needs --max-diff)")
    p.add_argument("--max-diff", type=int, help="largest gap drawn by the random search")
    p.add_argument("--seed", type=int, default=0, help="random search seed (default 0)")
    p.add_argument("--avoid-six-cycles", action="store_true", help="also reject designs with a 6-cycle witness")
    p.add_argument("--max-attempts", type=int, default=10**6, help="random search budget (default 1e6)")
    p.add_argument("--out", required=True, help="design JSON path")
    p.add_argument("--alist", help="also export the tail-biting parity-check matrix to this path")
    p.add_argument("--alist-blocks", type=int, help="tail-biting length of the export (default 4*lh)")
    p.set_defaults(func=cmd_construct)

    p = sub.add_parser("analyze", help="girth, distance and structural checks of a design")
    p.add_argument("design", help="design JSON path")
    p.add_argument("--n-blocks", type=int, help="tail-biting length (default max(4*lh, cap*(lh-1)+1))")
    p.add_argument("--weight-cap", type=int, help="distance search ceiling (default 2w)")
    p.add_argument("--check-stability", action="store_true", help="repeat at twice the length and compare")
    p.add_argument("--require", action="append", default=[], choices=REQUIREMENTS,
                   help="guarantee that must hold for exit code 0 (repeatable)")
    p.add_argument("--min-girth", type=int, help="require girth >= this value")
    p.add_argument("--min-dmin", type=int, help="require d_min >= this value")
    p.add_argument("--out", help="write the JSON report here instead of stdout")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("encode", help="stream-encode packed information bits")
    p.add_argument("--design", required=True, help="design JSON path")
    p.add_argument("--input", type=argparse.FileType("rb"), default=sys.stdin.buffer, help="default stdin")
    p.add_argument("--output", type=argparse.FileType("wb"), default=sys.stdout.buffer, help="default stdout")
    p.set_defaults(func=cmd_encode)

    p = sub.add_parser("decode", help="decode a packed code stream (or raw LLRs) with sum-product")
    p.add_argument("--design", required=True, help="design JSON path")
    p.add_argument("--input", type=argparse.FileType("rb"), default=sys.stdin.buffer, help="default stdin")
    p.add_argument("--output", type=argparse.FileType("wb"), default=sys.stdout.buffer, help="default stdout")
    p.add_argument("--llr", action="store_true", help="input is little-endian float64 LLRs, positive means 0")
    p.add_argument("--crossover", type=float, default=0.01, help="BSC crossover probability for hard input")
    p.add_argument("--info-bytes", type=int, help="truncate the output to this many bytes")
    _add_decoder_flags(p)
    p.set_defaults(func=cmd_decode)

    p = sub.add_parser("simulate", help="BER/FER sweep over AWGN, written as CSV plus JSON sidecar")
    p.add_argument("design", help="design JSON path")
    p.add_argument("--ebno", required=True, help="Eb/N0 range in dB as start:step:stop, inclusive")
    p.add_argument("--out", default="results.csv", help="CSV path; sidecar is <out>.json")
    p.add_argument("--n-blocks", type=int, help="window length in blocks (default 20*lh)")
    p.add_argument("--guard-blocks", type=int, help="blocks discarded at each end (default lh)")
    p.add_argument("--min-frame-errors", type=int, default=100, help="stop a point after this many frame errors")
    p.add_argument("--max-frames", type=int, default=10**6, help="frame budget per point")
    p.add_argument("--seed", type=int, default=0, help="master seed (default 0)")
    p.add_argument("--workers", type=int, default=None,
                   help="worker processes (default $PDC_LDPC_WORKERS or 1); results do not depend on it")
    _add_decoder_flags(p)
    p.set_defaults(func=cmd_simulate)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.WARNING if args.quiet else logging.INFO,
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    resolved = {k: (v if isinstance(v, (int, float, str, bool, list, type(None))) else getattr(v, "name", str(v)))
                for k, v in vars(args).items() if k != "func"}
    if args.command == "simulate" and resolved.get("workers") is None:
        resolved["workers"] = default_workers()
    log.info("configuration: %s", json.dumps(resolved, sort_keys=True))
    try:
        return args.func(args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"pdc-ldpc: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SearchExhaustedError as exc:
        print(f"pdc-ldpc: {exc}", file=sys.stderr)
        return EXIT_FAIL
    except (ValueError, OSError) as exc:
        print(f"pdc-ldpc: error: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
