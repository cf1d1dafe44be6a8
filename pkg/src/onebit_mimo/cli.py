"""Command-line entry point: ``onebit-mimo <command> [flags]``."""

import argparse
import logging
import sys

import numpy as np

from .channel import beta_percentile, generate_channels, load_channel_set, save_channel_set
from .estimators import EstimatorConfig
from .experiment import (
    FIXED,
    PERCENTILE_90,
    ExperimentSpec,
    median_by,
    par_report,
    records_to_csv,
    records_to_json,
    run_experiment,
)

__all__ = ["main"]


def _floats(text):
    return [float(x) for x in text.split(",") if x.strip()]


def _ints(text):
    return [int(x) for x in text.split(",") if x.strip()]


def _add_channel_args(p):
    p.add_argument("--n", type=int, default=16, help="antennas per side")
    p.add_argument("--paths", type=int, default=3, help="propagation paths L")
    p.add_argument("--channels", type=int, default=100, help="number of channels")
    p.add_argument("--channel-file", help="load channels from a JSON channel set")
    p.add_argument("--seed", type=int, default=0, help="master seed")
    p.add_argument("--out", help="output path (default: stdout)")


def _add_run_args(p, snr_default, pilots_default):
    _add_channel_args(p)
    p.add_argument("--snr", type=_floats, default=snr_default, help="comma list, dB")
    p.add_argument("--pilots", type=_ints, default=pilots_default, help="comma list")
    p.add_argument("--training", action="append", choices=["zc", "dft"],
                   help="repeatable; default zc")
    p.add_argument("--algo", action="append", choices=["pga", "fw", "mlfro"],
                   help="repeatable; default pga and fw")
    p.add_argument("--beta", default="auto",
                   help="nuclear-ball radius, or 'auto' for the 90th percentile")
    p.add_argument("--tmax", type=int, default=80)
    p.add_argument("--eps", type=float, default=1e-10)
    p.add_argument("--eta0", type=float, default=None, help="default 0.1/B")
    p.add_argument("--sigma-clip", type=float, default=0.5)
    p.add_argument("--frobenius-radius", type=float, default=None,
                   help="baseline radius, default N")
    p.add_argument("--real-kappa", action="store_true",
                   help="restrict the NMSE scale factor to real values")
    p.add_argument("--timing", action="store_true",
                   help="record wall time (output is then not reproducible)")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--format", choices=["csv", "json"], default="csv")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="onebit-mimo",
        description="Low-rank MIMO channel estimation from one-bit measurements",
    )
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate-channels", help="write a JSON channel set")
    _add_channel_args(p)

    _add_run_args(sub.add_parser("run", help="full grid of SNRs x pilot counts"),
                  [0.0], [64])
    _add_run_args(sub.add_parser("sweep-snr", help="NMSE versus SNR"),
                  [-10.0, -5.0, 0.0, 5.0, 10.0, 15.0, 20.0], [64])
    _add_run_args(sub.add_parser("sweep-pilots", help="NMSE versus pilot count"),
                  [0.0], [16, 32, 48, 64])

    p = sub.add_parser("par-report", help="peak-to-average ratio of G = HS")
    _add_channel_args(p)
    return parser


def _load_channels(args):
    if args.channel_file:
        channels, meta = load_channel_set(args.channel_file)
        args.n = meta["N"]
        args.paths = meta["L"]
        return channels
    return generate_channels(args.n, args.paths, args.channels, args.seed)


def _emit(text, out):
    if out:
        with open(out, "w", encoding="utf-8", newline="\n") as f:
            f.write(text)
    else:
        sys.stdout.write(text)


def _spec_from_args(args):
    channels = _load_channels(args) if args.channel_file else None
    if args.beta == "auto":
        beta_mode, beta_value = PERCENTILE_90, 20.1
    else:
        beta_mode, beta_value = FIXED, float(args.beta)
    cfg = EstimatorConfig(
        beta=beta_value,
        eta0=args.eta0,
        t_max=args.tmax,
        epsilon=args.eps,
        frobenius_radius=args.frobenius_radius,
    )
    return ExperimentSpec(
        N=args.n,
        L=args.paths,
        num_channels=args.channels,
        snr_db_grid=args.snr,
        pilot_grid=args.pilots,
        training_kinds=args.training or ["zc"],
        algorithms=args.algo or ["pga", "fw"],
        beta_mode=beta_mode,
        beta_value=beta_value,
        master_seed=args.seed,
        config=cfg,
        sigma_clip=args.sigma_clip,
        complex_kappa=not args.real_kappa,
        record_timing=args.timing,
        channels=channels,
    )


def _cmd_generate(args):
    channels = _load_channels(args)
    if not args.out:
        raise SystemExit("generate-channels needs --out")
    save_channel_set(args.out, channels, args.n, args.paths, args.seed)
    print(f"wrote {len(channels)} channels to {args.out}; "
          f"90th percentile nuclear norm {beta_percentile(channels):.4f}",
          file=sys.stderr)
    return 0


def _cmd_run(args):
    spec = _spec_from_args(args)
    records = run_experiment(spec, jobs=args.jobs)
    text = records_to_csv(records) if args.format == "csv" else records_to_json(records)
    _emit(text, args.out)
    for key, med in median_by(records, "training", "algorithm", "snr_db", "np").items():
        print("median nmse %s: %.3f dB" % (key, med), file=sys.stderr)
    failed = sum(r.error is not None for r in records)
    if failed:
        print(f"{failed} cell(s) failed", file=sys.stderr)
        return 1
    return 0


def _cmd_par(args):
    channels = _load_channels(args)
    rows = par_report(channels, args.n)
    lines = ["channel_id,training,par_db"]
    lines += [f"{cid},{kind},{par!r}" for cid, kind, par in rows]
    _emit("\n".join(lines) + "\n", args.out)
    for kind in ("zc", "dft"):
        vals = [p for _, k, p in rows if k == kind]
        print(f"{kind}: median PAR {np.median(vals):.2f} dB, mean {np.mean(vals):.2f} dB",
              file=sys.stderr)
    return 0


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    if args.command == "generate-channels":
        return _cmd_generate(args)
    if args.command == "par-report":
        return _cmd_par(args)
    return _cmd_run(args)


if __name__ == "__main__":
    sys.exit(main())
