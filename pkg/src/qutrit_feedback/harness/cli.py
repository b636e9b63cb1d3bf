"""Command line: ``run``, ``classify-map`` and ``verify-codes``.

Exit status 0 on success, 1 for configuration errors (bad keys, values or
unwritable paths) and 2 for numerical failures, including failed code checks.
"""
from __future__ import annotations

import argparse
import os
import sys

from ..errors import ConfigError, NumericalError
from .config import PRESETS, config_from_mapping, load_config
from .run import OUTPUT_ENV, classify_map, default_output_dir, run_experiment, verify_codes


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="qutrit-feedback",
                                description="Feedback-protected qutrits: simulations and checks.")
    sub = p.add_subparsers(dest="command", required=True)

    r = sub.add_parser("run", help="run a preset or a YAML-configured experiment",
                       epilog=f"presets: {', '.join(sorted(PRESETS))}; output directory defaults "
                              f"to ${OUTPUT_ENV} or ./output")
    r.add_argument("--experiment", help="preset name, or 'custom'")
    r.add_argument("--config", help="YAML file with ExperimentConfig keys")
    r.add_argument("--seed", type=int)
    r.add_argument("--n-traj", type=int, dest="n_traj")
    r.add_argument("--dt", type=float)
    r.add_argument("--t-max", type=float, dest="t_max")
    r.add_argument("--tau", type=float)
    r.add_argument("--eta", type=float)
    r.add_argument("--alpha", type=float)
    r.add_argument("--beta", type=float)
    r.add_argument("--delta-var", type=float, dest="delta_var")
    r.add_argument("--workers", type=int)
    r.add_argument("--out", help="output directory")

    c = sub.add_parser("classify-map", help="regime table over the (a, b, c) grid")
    c.add_argument("--structure", required=True, help="E, V or Lambda")
    c.add_argument("--resolution", type=int, default=15)
    c.add_argument("--numerical", action="store_true",
                   help="also detect the regime from master-equation runs")
    c.add_argument("--out", help="CSV path")

    v = sub.add_parser("verify-codes", help="check the jump and diffusion code algebra")
    v.add_argument("--beta", type=float, default=1.0)
    v.add_argument("--gamma", type=float, default=1.0)
    v.add_argument("--structure", help="search E, V or Lambda for a correctable codespace")
    return p


def _run(args) -> int:
    keys = ("experiment", "seed", "n_traj", "dt", "t_max", "tau", "eta", "alpha", "beta",
            "delta_var", "workers")
    overrides = {k: getattr(args, k) for k in keys}
    if args.config:
        cfg = load_config(args.config, overrides)
    else:
        cfg = config_from_mapping({}, overrides)
    paths = run_experiment(cfg, args.out or cfg.output_path or default_output_dir())
    for path in paths:
        print(path)
    return 0


def _classify(args) -> int:
    out = args.out or os.path.join(default_output_dir(), f"regimes_{args.structure}.csv")
    rows = classify_map(args.structure, args.resolution, out, args.numerical)
    print(f"{out}: {len(rows)} rows")
    return 0


def _verify(args) -> int:
    ok, lines = verify_codes(args.beta, args.structure, args.gamma)
    print("\n".join(lines))
    return 0 if ok else 2


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    handler = {"run": _run, "classify-map": _classify, "verify-codes": _verify}[args.command]
    try:
        return handler(args)
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 2
    except (ConfigError, ValueError, OSError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
