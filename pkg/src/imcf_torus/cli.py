"""Command line: ``imcf-torus run | verify | sweep``.

Exit codes: 0 success, 1 verification failure, 2 usage or config error,
3 invalid scenario.
"""

from __future__ import annotations

import argparse
import logging
import sys

from . import experiment as ex
from . import geometry as geo
from . import io
from . import verify as vf

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_USAGE = 2
EXIT_SCENARIO = 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _cmd_run(args):
    cfg = ex.load_config(args.config)
    try:
        res = ex.execute(cfg)
    except geo.CurveError as exc:
        print(f"invalid scenario: {exc}", file=sys.stderr)
        return EXIT_SCENARIO
    s = ex.write_run(args.out, res)
    print(
        f"stop={s['stop']} T_max in [{s['t_max_lo']:.9f}, {s['t_max_hi']:.9f}] "
        f"samples={s['n_samples']} eps_hat={s['eps_hat_min']:.4f} -> {args.out}"
    )
    return EXIT_OK


def _cmd_verify(args):
    try:
        checks = vf.verify_dir(args.out)
    except (vf.MissingArtifact, ValueError) as exc:
        print(f"cannot verify: {exc}", file=sys.stderr)
        return EXIT_USAGE
    for c in checks:
        print(c.line())
    return EXIT_OK if all(c.passed for c in checks) else EXIT_FAIL


def _cmd_sweep(args):
    cfg = ex.load_config(args.config)
    rows = ex.sweep(cfg, args.out, args.workers)
    cols = ("cell", "R", "r", "coeffs", "status", "stop", "t_max_hi", "u_min_ratio", "eps_hat_min")
    print("\t".join(cols))
    for r in rows:
        print("\t".join(_short(r[c]) for c in cols))
    return EXIT_OK


def _short(v):
    return f"{v:.6g}" if isinstance(v, float) else str(v)


def build_parser():
    p = _Parser(prog="imcf-torus", description="Inverse mean curvature flow of rotational tori.")
    p.add_argument("-v", "--verbose", action="store_true", help="log progress")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)
    r = sub.add_parser("run", help="evolve one scenario and write its outputs")
    r.add_argument("--config", required=True)
    r.add_argument("--out", required=True)
    r.set_defaults(func=_cmd_run)
    v = sub.add_parser("verify", help="re-check a run directory")
    v.add_argument("--out", required=True)
    v.set_defaults(func=_cmd_verify)
    s = sub.add_parser("sweep", help="run a parameter grid in parallel")
    s.add_argument("--config", required=True)
    s.add_argument("--out", default=None)
    s.add_argument("--workers", type=int, default=None, help="process count (capped by IMCF_THREADS)")
    s.set_defaults(func=_cmd_sweep)
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING)
    try:
        return args.func(args)
    except io.ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
