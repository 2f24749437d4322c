"""``papr-lab`` command line.

Exit codes: 0 success, 2 configuration error, 3 numerical failure.
"""
import argparse
import logging
import os
import sys
import time

from .config import KEYS, load_config
from .errors import ConfigError, NumericalError
from . import harness

log = logging.getLogger("papr_lab")

EXIT_CONFIG = 2
EXIT_NUMERICAL = 3


def _add_common(p):
    p.add_argument("--config", help="flat key = value configuration file")
    p.add_argument("--set", dest="overrides", action="append", default=[], metavar="KEY=VALUE",
                   help="override one configuration key (repeatable)")
    for key in KEYS:
        p.add_argument(f"--{key}", dest=f"key:{key}", metavar="VALUE", help=argparse.SUPPRESS)
    p.add_argument("--workers", type=int, help="worker processes (results do not depend on it)")
    p.add_argument("-v", "--verbose", action="store_true")


def build_parser():
    parser = argparse.ArgumentParser(prog="papr-lab", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ccdf", help="PAPR CCDF for every variant and clipping ratio")
    _add_common(p)
    p.add_argument("--out", required=True, help="output directory")

    p = sub.add_parser("ber", help="bit error rate over AWGN for every variant and clipping ratio")
    _add_common(p)
    p.add_argument("--out", required=True, help="output directory")

    p = sub.add_parser("dump-filter", help="write filter coefficients as CSV")
    _add_common(p)
    p.add_argument("--variant", required=True, choices=["previous", "proposed", "lpf"])
    p.add_argument("--out", required=True, help="output CSV path")
    return parser


def _config_from_args(args):
    overrides = list(args.overrides)
    for key in KEYS:
        value = getattr(args, f"key:{key}")
        if value is not None:
            overrides.append(f"{key}={value}")
    if args.workers is not None:
        overrides.append(f"run.workers={args.workers}")
    return load_config(args.config, overrides)


def _print_table(rows):
    if not rows:
        return
    cols = list(rows[0])
    print("  ".join(f"{c:>18}" for c in cols))
    for r in rows:
        print("  ".join(f"{harness.fmt(r[c]):>18}" for c in cols))


def run(args):
    cfg = _config_from_args(args)
    if args.command == "dump-filter":
        f = harness.dump_filter(cfg, args.variant, args.out)
        kind = "taps" if f.is_fir else "biquad sections"
        print(f"wrote {len(f.coefficients())} {kind} to {args.out}")
        return 0

    t0 = time.perf_counter()
    if args.command == "ccdf":
        result = harness.run_ccdf_experiment(cfg)
        digests = harness.emit_ccdf_csv(result, args.out)
        extra = [("unclipped_papr_db_at_ccdf", harness.fmt(result.reference_db))]
        print(f"unclipped PAPR at CCDF {cfg.ccdf_report_probability:g}: {result.reference_db:.2f} dB")
        _print_table(result.summary)
    else:
        result = harness.run_ber_experiment(cfg)
        digests = harness.emit_ber_csv(result, args.out)
        extra = [("bits_processed", str(result.bits_processed))]
        _print_table(result.summary)
    harness.write_manifest(cfg, args.out, digests, time.perf_counter() - t0, extra)
    print(f"results in {os.path.abspath(args.out)}")
    return 0


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return run(args)
    except ConfigError as exc:
        print(f"papr-lab: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NumericalError as exc:
        print(f"papr-lab: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except OSError as exc:
        print(f"papr-lab: cannot write output: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
