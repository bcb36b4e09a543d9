"""Command-line entry point: ``zeris metric | sweep | figure``.

Every subcommand writes a CSV table (to ``--out`` or standard output) whose
``#`` header records the resolved parameters, the seed and the tool version.
"""

from __future__ import annotations

import argparse
import logging
import sys
from dataclasses import replace
from typing import Sequence

from .experiments import ESTIMATORS, METRICS, PRESETS, SweepSpec, figure_preset, run_sweep
from .params import load_config

log = logging.getLogger("zeris")


def _csv_list(text: str) -> tuple[str, ...]:
    return tuple(s.strip() for s in text.split(",") if s.strip())


def _assignment(text: str) -> tuple[str, str]:
    if "=" not in text:
        raise argparse.ArgumentTypeError(f"expected key=value, got {text!r}")
    key, value = text.split("=", 1)
    return key.strip(), value.strip()


def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--config", help="flat key = value parameter file (powers may use *_dbm keys)")
    p.add_argument("--set", dest="overrides", action="append", type=_assignment, default=[],
                   metavar="KEY=VALUE", help="override one parameter; repeatable")
    p.add_argument("--seed", type=int, default=None, help="Monte Carlo seed (default 0)")
    p.add_argument("--trials", type=int, default=None, help="Monte Carlo trials per point")
    p.add_argument("--estimators", type=_csv_list, default=None,
                   help=f"comma-separated subset of {','.join(ESTIMATORS)}")
    p.add_argument("--out", help="CSV path (default: standard output)")
    p.add_argument("--l", dest="L", type=int, default=None, help="quadrature points (default 1500)")
    p.add_argument("--workers", type=int, default=1, help="worker processes")
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    parser = argparse.ArgumentParser(prog="zeris", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    m = sub.add_parser("metric", parents=[common], help="evaluate a single operating point")
    m.add_argument("--modes", type=_csv_list, default=("I", "II", "III"))
    m.add_argument("--metrics", type=_csv_list, default=METRICS)
    m.add_argument("--ps-dbm", type=float, default=None, help="PS transmit power in dBm")

    s = sub.add_parser("sweep", parents=[common], help="run an explicit sweep")
    s.add_argument("--variable", required=True, choices=("Ps_dbm", "tau", "N", "N1"))
    s.add_argument("--range", nargs=3, type=float, required=True, metavar=("START", "STOP", "STEP"))
    s.add_argument("--modes", type=_csv_list, default=("I", "II", "III"))
    s.add_argument("--metrics", type=_csv_list, default=("JOP", "JIP"))

    f = sub.add_parser("figure", parents=[common], help="run a figure preset")
    f.add_argument("name", help=f"one of {', '.join(PRESETS)}")
    return parser


def _overrides(args) -> dict:
    values: dict = {}
    if args.config:
        values.update(load_config(args.config))
    if args.overrides:
        from .params import parse_config

        values.update(parse_config("\n".join(f"{k} = {v}" for k, v in args.overrides)))
    return values


def _spec(args) -> SweepSpec:
    fixed = _overrides(args)
    extra = {}
    if args.seed is not None:
        extra["seed"] = args.seed
    if args.trials is not None:
        extra["n_trials"] = args.trials
    if args.estimators is not None:
        extra["estimators"] = args.estimators

    if args.command == "figure":
        spec = figure_preset(args.name)
        return replace(spec, fixed={**spec.fixed, **fixed}, **extra)

    if args.command == "metric":
        ps = args.ps_dbm
        if ps is None:
            ps = fixed.pop("Ps", None)
            from .params import SystemParams, watt_to_dbm

            ps = watt_to_dbm(ps) if ps is not None else SystemParams().Ps_dbm
        fixed.pop("Ps", None)
        return SweepSpec("Ps_dbm", (ps, ps, 1.0), args.modes, args.metrics, fixed=fixed, name="metric", **extra)

    return SweepSpec(args.variable, tuple(args.range), args.modes, args.metrics, fixed=fixed, name="sweep", **extra)


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        spec = _spec(args)
    except (KeyError, ValueError) as exc:
        parser.error(str(exc.args[0] if isinstance(exc, KeyError) and exc.args else exc))
    log.info("running %s over %d grid points", spec.name, len(spec.grid()) * len(spec.groups))
    table = run_sweep(spec, workers=args.workers, L=args.L)
    text = table.to_csv(args.out)
    if not args.out:
        sys.stdout.write(text)
    return 0


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
