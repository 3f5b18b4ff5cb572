"""Command line front end.

Exit status: 0 on success, 2 on a configuration error, 3 on a pipeline error.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from ..exceptions import ConfigurationError, PipelineError
from ..lattice import SCHEME_PAIRS, SCHEMES, get_scheme, min_squared_distance
from ..link import loopback
from ..metrics import run_ber_sweep, run_entropy_sweep
from ..phy import PLACEMENTS
from .config import build_config, load_config_file, resolve_snr
from .demo import image_demo
from .io import atomic_write_bytes, atomic_write_text

EXIT_OK, EXIT_CONFIG, EXIT_PIPELINE = 0, 2, 3

BER_SWEEP_SCHEMES = [name for pair in SCHEME_PAIRS.values() for name in pair]
ENTROPY_SCHEMES = ["conv-z2", "conv-z8", "coset-z-1s2r"]
ENTROPY_GRID_DB = [float(x) for x in np.arange(-5.0, 25.1, 2.5)]
LOOPBACK_TOLERANCE = 0.02


def _parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="key = value configuration file")
    common.add_argument("--seed", type=int, help="overrides the config file and $LATTICEWIRE_SEED")
    common.add_argument("--out", help="output directory (default: output.dir or .)")
    common.add_argument("--scheme", action="append", help="scheme preset; repeat for several")
    common.add_argument("--snr", action="append", help="SNR in dB or a placement name; repeat for several")

    p = argparse.ArgumentParser(prog="latticewire", description="Lattice coset coding wiretap simulator")
    sub = p.add_subparsers(dest="command", required=True)
    sub.add_parser("ber-sweep", parents=[common], help="BER per scheme and SNR")
    sub.add_parser("entropy-sweep", parents=[common], help="conditional entropy per scheme and SNR")
    sub.add_parser("image-demo", parents=[common], help="send the test image to Bob and Eve")
    sub.add_parser("loopback-test", parents=[common], help="noiseless end-to-end check")
    info = sub.add_parser("scheme-info", parents=[common], help="print a scheme's parameters and cosets")
    info.add_argument("name", nargs="?", help="scheme preset")
    return p


def _config(args):
    raw = load_config_file(args.config) if args.config else {}
    cfg = build_config(raw, seed_override=args.seed)
    if args.scheme:
        cfg.schemes = [get_scheme(s).name for s in args.scheme]
    if args.snr:
        cfg.snr_db = [resolve_snr(s) for s in args.snr]
    if args.out:
        cfg.output_dir = args.out
    return cfg


def _ber_sweep(cfg, out) -> int:
    seed = cfg.require_seed()
    schemes = cfg.schemes_or(BER_SWEEP_SCHEMES)
    snrs = cfg.snr_or(PLACEMENTS.values())
    jitter = cfg.jitter_db or 0.0
    res = run_ber_sweep(schemes, snrs, cfg.secret_bits, seed, jitter, cfg.decoder)
    path = Path(cfg.output_dir) / "ber_sweep.csv"
    atomic_write_text(path, res.to_csv())
    for p in res.points:
        flag = "  (sync failures above limit)" if p.flagged else ""
        print(f"{p.scheme:>14} {p.snr_db:6.2f} dB  BER {p.ber:.4g} over {p.bits_counted} bits{flag}", file=out)
    print(f"wrote {path}", file=out)
    return EXIT_OK


def _entropy_sweep(cfg, out) -> int:
    seed = cfg.require_seed()
    schemes = cfg.schemes_or(ENTROPY_SCHEMES)
    snrs = cfg.snr_or(ENTROPY_GRID_DB)
    res = run_entropy_sweep(schemes, snrs, cfg.trials, seed, cfg.bin_width, cfg.entropy_noise)
    path = Path(cfg.output_dir) / "entropy_sweep.csv"
    atomic_write_text(path, res.to_csv())
    for e in res.points:
        print(f"{e.scheme:>14} {e.snr_db:6.2f} dB  H(s|y) {e.h_cond:.4f} bits (k={e.k})", file=out)
    print(f"wrote {path}", file=out)
    return EXIT_OK


def _image_demo(cfg, out) -> int:
    res = image_demo(cfg)
    for r in res.receivers:
        if r.error:
            print(f"{r.role:>4} {r.snr_db:6.2f} dB  FAILED: {r.error}", file=out)
        else:
            print(f"{r.role:>4} {r.snr_db:6.2f} dB  BER {r.point.ber:.4g}  -> {r.path}", file=out)
    print(f"wrote {res.csv_path}", file=out)
    return EXIT_PIPELINE if res.failed else EXIT_OK


def _loopback_test(cfg, out) -> int:
    seed = cfg.require_seed()
    rng = np.random.default_rng(seed)
    status = EXIT_OK
    for name in cfg.schemes_or(SCHEMES):
        rep = loopback(name, rng)
        ok = rep.exact and rep.rms_error <= LOOPBACK_TOLERANCE
        path = Path(cfg.output_dir) / f"{rep.scheme}_loopback_tx.f32"
        iq = np.empty(2 * rep.tx_samples.size, dtype="<f4")
        iq[0::2], iq[1::2] = rep.tx_samples.real, rep.tx_samples.imag
        atomic_write_bytes(path, iq.tobytes())
        verdict = "ok" if ok else "MISMATCH"
        print(f"{rep.scheme:>14}  rms {rep.rms_error:.4f}  exact {rep.exact}  {verdict}  -> {path}", file=out)
        if not ok:
            status = EXIT_PIPELINE
    return status


def _fmt_points(points) -> str:
    return "{" + ", ".join("(" + ",".join(str(int(v)) for v in p) + ")" for p in points) + "}"


def _scheme_info(cfg, name, out) -> int:
    s = get_scheme(name or cfg.scheme)
    cb = s.codebook()
    print(f"scheme {s.name}: lattice {s.lattice}, L={s.L}, M={s.M}, k={s.k}, r={s.r}", file=out)
    if s.code_name:
        print(f"binary code: {s.code_name}", file=out)
    print(f"codewords: {cb.size}, minimum squared distance: {min_squared_distance(cb)}", file=out)
    for j in range(cb.cosets.shape[0]):
        print(f"coset {j}: {_fmt_points(cb.cosets[j])}", file=out)
    return EXIT_OK


def run_cli(argv=None, out=None) -> int:
    out = out or sys.stdout
    try:
        args = _parser().parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_CONFIG
    try:
        cfg = _config(args)
        if args.command == "scheme-info":
            return _scheme_info(cfg, args.name, out)
        handler = {
            "ber-sweep": _ber_sweep,
            "entropy-sweep": _entropy_sweep,
            "image-demo": _image_demo,
            "loopback-test": _loopback_test,
        }[args.command]
        return handler(cfg, out)
    except ConfigurationError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except PipelineError as exc:
        print(f"pipeline error: {exc}", file=sys.stderr)
        return EXIT_PIPELINE


def main() -> None:
    sys.exit(run_cli())
