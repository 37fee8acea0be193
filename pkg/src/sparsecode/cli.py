"""
Command-line entry point.

    sparsecode patterns --nt 4 --ns 2 --list
    sparsecode sparsify --input dense.json --output sparse.json --report report.json
    sparsecode codebook pack --nt 4 --ns 2 --size 8 --iters 10000 --seed 1 --output pack.json
    sparsecode eval rate --dense dense.json --sparse sparse.json --out rate.csv
    sparsecode eval papr --codebook dense.json --codebook-b sparse.json --out papr.csv
    sparsecode eval distortion --dims 4x2,6x3 --trials 2000 --out dist.csv

Every output file gets a ``<file>.manifest.json`` sidecar. CSV outputs start
with ``#`` lines carrying the manifest digest and the column names. The
digest covers everything that determines the data (subcommand, data flags,
seed, version, input file hashes) and excludes file paths and
``--threads``, so it is stable across reruns and thread counts.

Exit status: 0 success, 1 bad input or usage, 2 numerical failure.
"""
from __future__ import annotations

import argparse
import datetime
import hashlib
import json
import sys
import time

import numpy as np

from . import __version__
from ._mc import default_threads
from .codebook_io import CodebookFormatError, load, min_chordal_distance, save, generate_packing
from .evaluation import RateConfig, distortion_sweep, rate_experiment
from .numeric import NumericalError
from .patterns import count_patterns, enumerate_patterns
from .sparsifier import Method, build_sparse_codebook
from .waveform import WaveformConfig, papr_ccdf

_NOT_HASHED = {"threads", "output", "out", "report", "func", "command", "action"}
_INPUT_FLAGS = ("input", "dense", "sparse", "codebook", "codebook_b")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(f"{self.prog}: error: {message}")


def _sha256_file(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as f:
        for block in iter(lambda: f.read(1 << 16), b""):
            h.update(block)
    return h.hexdigest()


class _Run:
    """Bookkeeping for one invocation: manifest contents and digest."""

    def __init__(self, args, argv):
        self.t0 = time.perf_counter()
        self.command = args.command + (f" {args.action}" if getattr(args, "action", None) else "")
        self.flags = {k: v for k, v in sorted(vars(args).items()) if k not in ("func",)}
        self.inputs = {}
        for key in _INPUT_FLAGS:
            path = getattr(args, key, None)
            if path:
                try:
                    self.inputs[path] = _sha256_file(path)
                except FileNotFoundError:
                    raise FileNotFoundError(f"input file not found: {path}") from None
        core = {
            "subcommand": self.command,
            # inputs enter by content hash, not by path
            "flags": {k: v for k, v in self.flags.items()
                      if k not in _NOT_HASHED and k not in _INPUT_FLAGS},
            "seed": getattr(args, "seed", None),
            "version": __version__,
            "inputs": sorted(self.inputs.values()),
        }
        self.digest = hashlib.sha256(json.dumps(core, sort_keys=True).encode()).hexdigest()
        self.argv = list(argv)

    def write_manifest(self, out_path):
        doc = {
            "subcommand": self.command,
            "argv": self.argv,
            "flags": self.flags,
            "seed": self.flags.get("seed"),
            "version": __version__,
            "inputs": self.inputs,
            "digest": self.digest,
            "duration_s": round(time.perf_counter() - self.t0, 3),
            "timestamp": datetime.datetime.now(datetime.timezone.utc).isoformat(),
        }
        with open(f"{out_path}.manifest.json", "w") as f:
            json.dump(doc, f, indent=1, default=str)
            f.write("\n")

    def write_csv(self, path, columns, rows):
        with open(path, "w") as f:
            f.write(f"# sparsecode {self.command} manifest sha256:{self.digest}\n")
            f.write("# " + ",".join(columns) + "\n")
            for row in rows:
                f.write(",".join(_fmt(v) for v in row) + "\n")
        self.write_manifest(path)


def _fmt(v) -> str:
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return repr(float(v))


def _threads(args) -> int:
    return args.threads if args.threads is not None else default_threads()


def parse_snr_range(text: str) -> tuple:
    """``start:step:stop`` (inclusive) or a comma-separated list, in dB."""
    try:
        if ":" in text:
            a, st, b = (float(x) for x in text.split(":"))
            if st <= 0 or b < a:
                raise ValueError
            n = int(np.floor((b - a) / st + 1e-9)) + 1
            return tuple(float(round(a + i * st, 10)) for i in range(n))
        return tuple(float(x) for x in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad SNR range {text!r}; use start:step:stop") from None


def parse_dims(text: str) -> list:
    out = []
    try:
        for part in text.split(","):
            nt, ns = part.lower().split("x")
            out.append((int(nt), int(ns)))
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad dims {text!r}; use e.g. 4x2,6x3") from None
    return out


def cmd_patterns(args, run):
    n = count_patterns(args.nt, args.ns)
    print(n)
    if args.list:
        for pat in enumerate_patterns(args.nt, args.ns):
            print(pat)


def cmd_sparsify(args, run):
    dense = load(args.input)
    sparse, reports = build_sparse_codebook(dense, tol=args.tol, threads=_threads(args))
    save(sparse, args.output)
    run.write_manifest(args.output)
    n_exact = sum(r.method is Method.EXACT for r in reports)
    if args.report:
        doc = {
            "manifest": f"sha256:{run.digest}",
            "tol": args.tol,
            "nt": dense.nt,
            "ns": dense.ns,
            "exact": n_exact,
            "spca": len(reports) - n_exact,
            "entries": [r.to_dict() for r in reports],
        }
        with open(args.report, "w") as f:
            json.dump(doc, f, indent=1)
            f.write("\n")
        run.write_manifest(args.report)
    print(f"{len(reports)} entries: {n_exact} exact, {len(reports) - n_exact} spca")


def cmd_pack(args, run):
    cb = generate_packing(args.nt, args.ns, args.size, args.iters, args.seed)
    save(cb, args.output)
    run.write_manifest(args.output)
    print(f"min chordal distance {min_chordal_distance(cb):.6f}")


def cmd_rate(args, run):
    dense, sparse = load(args.dense), load(args.sparse)
    cfg = RateConfig(nr=args.nr, snr_db=args.snr, trials=args.trials, k=args.k, seed=args.seed)
    a, b = rate_experiment(cfg, dense, sparse, threads=_threads(args))
    rows = zip(a.snr_db, a.mean, a.se, b.mean, b.se)
    run.write_csv(args.out, ["snr_db", "rate_dense", "se_dense", "rate_sparse", "se_sparse"], rows)


def cmd_papr(args, run):
    cfg = WaveformConfig(n_prb=args.prbs, fft_size=args.fft, oversample=args.oversample,
                         modulation=args.mod)
    index = None if args.index is None else args.index - 1
    curves = []
    for path in filter(None, (args.codebook, args.codebook_b)):
        cb = load(path)
        curves.append(papr_ccdf(cfg, cb, args.symbols, args.seed, index=index,
                                agg=args.papr_agg, threads=_threads(args)))
    upper = max(c.samples_db.max() for c in curves)
    grid = curves[0].grid(upper)
    cols = ["threshold_db", "ccdf_a"] + (["ccdf_b"] if len(curves) > 1 else [])
    rows = zip(grid, *(c.ccdf(grid) for c in curves))
    run.write_csv(args.out, cols, rows)
    for name, c in zip("ab", curves):
        print(f"{name}: PAPR at CCDF 1e-2 = {c.papr_at(1e-2):.3f} dB")


def cmd_distortion(args, run):
    rows = distortion_sweep(args.dims, args.trials, args.seed, threads=_threads(args))
    run.write_csv(args.out, ["nt", "ns", "mean_sigma_e", "se"],
                  ((r.nt, r.ns, r.mean, r.se) for r in rows))


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--threads", type=int, default=None,
                        help="worker threads (default: $SPARSECODE_THREADS or 1)")

    p = _Parser(prog="sparsecode", description="Sparsify MIMO precoding codebooks.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    q = sub.add_parser("patterns", help="count or list sparsity patterns")
    q.add_argument("--nt", type=int, required=True)
    q.add_argument("--ns", type=int, required=True)
    q.add_argument("--list", action="store_true")
    q.set_defaults(func=cmd_patterns)

    q = sub.add_parser("sparsify", parents=[common], help="sparsify a codebook file")
    q.add_argument("--input", required=True)
    q.add_argument("--output", required=True)
    q.add_argument("--report")
    q.add_argument("--tol", type=float, default=1e-8)
    q.set_defaults(func=cmd_sparsify)

    cb = sub.add_parser("codebook", help="codebook utilities")
    cbs = cb.add_subparsers(dest="action", required=True, parser_class=_Parser)
    q = cbs.add_parser("pack", help="max-min chordal packing by random search")
    q.add_argument("--nt", type=int, required=True)
    q.add_argument("--ns", type=int, required=True)
    q.add_argument("--size", type=int, required=True)
    q.add_argument("--iters", type=int, default=10_000)
    q.add_argument("--seed", type=int, default=0)
    q.add_argument("--output", required=True)
    q.set_defaults(func=cmd_pack)

    ev = sub.add_parser("eval", help="Monte Carlo experiments")
    evs = ev.add_subparsers(dest="action", required=True, parser_class=_Parser)

    q = evs.add_parser("rate", parents=[common], help="achievable rate, dense vs sparse")
    q.add_argument("--dense", required=True)
    q.add_argument("--sparse", required=True)
    q.add_argument("--nr", type=int, default=32)
    q.add_argument("--snr", type=parse_snr_range, default=parse_snr_range("-10:2:30"))
    q.add_argument("--trials", type=int, default=10_000)
    q.add_argument("--k", type=int, default=1)
    q.add_argument("--seed", type=int, default=0)
    q.add_argument("--out", required=True)
    q.set_defaults(func=cmd_rate)

    q = evs.add_parser("papr", parents=[common], help="PAPR CCDF of DFT-s-OFDM")
    q.add_argument("--codebook", required=True)
    q.add_argument("--codebook-b")
    q.add_argument("--prbs", type=int, default=52)
    q.add_argument("--fft", type=int, default=1024)
    q.add_argument("--oversample", type=int, default=8)
    q.add_argument("--mod", choices=["qam4", "qam16", "qam64"], default="qam4")
    q.add_argument("--symbols", type=int, default=20_000)
    q.add_argument("--index", type=int, help="use only this 1-based codebook index")
    q.add_argument("--papr-agg", choices=["mean", "pool"], default="mean")
    q.add_argument("--seed", type=int, default=0)
    q.add_argument("--out", required=True)
    q.set_defaults(func=cmd_papr)

    q = evs.add_parser("distortion", parents=[common], help="SPCA distortion on random points")
    q.add_argument("--dims", type=parse_dims, default=parse_dims("4x2,5x2,6x2,7x2,8x2,9x2,10x2"))
    q.add_argument("--trials", type=int, default=2000)
    q.add_argument("--seed", type=int, default=0)
    q.add_argument("--out", required=True)
    q.set_defaults(func=cmd_distortion)
    return p


def _join_snr_value(argv: list) -> list:
    # "--snr -10:2:30" would otherwise be read as an unknown option
    out, i = [], 0
    while i < len(argv):
        if argv[i] == "--snr" and i + 1 < len(argv):
            out.append(f"--snr={argv[i + 1]}")
            i += 2
        else:
            out.append(argv[i])
            i += 1
    return out


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    parser = build_parser()
    try:
        args = parser.parse_args(_join_snr_value(argv))
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return 1
    except SystemExit as exc:  # --help / --version
        return int(exc.code or 0)
    try:
        if getattr(args, "threads", None) is not None and args.threads < 1:
            raise ValueError("--threads must be >= 1")
        run = _Run(args, argv)
        args.func(args, run)
    except (NumericalError, np.linalg.LinAlgError) as exc:
        print(f"sparsecode: numerical failure: {exc}", file=sys.stderr)
        return 2
    except (CodebookFormatError, ValueError, IndexError, OSError) as exc:
        msg = f"{exc.strerror}: {exc.filename}" if isinstance(exc, OSError) and exc.filename else str(exc)
        print(f"sparsecode: error: {msg}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
