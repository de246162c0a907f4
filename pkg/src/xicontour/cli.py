"""``xi-contour`` command line.

    xi-contour contour  --config FILE [--out DIR] [--workers N] [--window W] [--grid R]
    xi-contour chambers --config FILE ...
    xi-contour verify   --config FILE ...
    xi-contour bounds   (--config FILE | --n N [--t T --d D] [--lines M] [--cusps L])

``--config`` also accepts the name of a packaged config (pentagon, inf,
two_circles, sqrt2).  Exit codes: 0 success, 1 verification failure,
2 usage or config error.
"""
from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

from . import __version__
from .config import load_config, packaged_config
from .exceptions import ConfigError, XiContourError
from .parametrization import sign_string
from .report import (
    basis_of,
    bounds_table,
    chambers_payload,
    planar,
    run_signs,
    run_verification,
    write_csv,
    write_json,
    write_svg,
)
from .spectrum import affine_dimension, build_lifted

EXIT_OK, EXIT_VERIFY, EXIT_CONFIG = 0, 1, 2


def _parser():
    p = argparse.ArgumentParser(prog="xi-contour", description="Reduced discriminant contours and chambers of exponential sums.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)
    for name, help_ in (
        ("contour", "trace signed contours; write CSV polylines and an SVG"),
        ("chambers", "count chambers; write report.json"),
        ("verify", "run the property suite and golden checks"),
        ("bounds", "print the bound formulas"),
    ):
        sp = sub.add_parser(name, help=help_)
        sp.add_argument("--config", required=name != "bounds", help="YAML config file or packaged config name")
        sp.add_argument("--out", help="output directory (default: config 'output')")
        sp.add_argument("--workers", type=int, default=1, help="parallel sign-class jobs")
        sp.add_argument("--window", type=float, help="clip window half-width")
        sp.add_argument("--grid", type=int, help="flood-fill resolution")
        if name == "bounds":
            sp.add_argument("--n", type=int)
            sp.add_argument("--t", type=int)
            sp.add_argument("--d", type=int)
            sp.add_argument("--lines", type=int)
            sp.add_argument("--cusps", type=int)
    return p


def _load(arg):
    path = Path(arg)
    if not path.exists() and not arg.endswith((".yaml", ".yml")):
        path = packaged_config(arg)
    return load_config(path)


def _case_dir(cfg, args) -> Path:
    out = Path(args.out or cfg.output) / cfg.case
    out.mkdir(parents=True, exist_ok=True)
    return out


def _sidecar(out: Path, cfg, command: str):
    meta = {"command": command, "config": cfg.source, "version": __version__, "timestamp": time.strftime("%Y-%m-%dT%H:%M:%S%z")}
    (out / "report.meta.json").write_text(json.dumps(meta, sort_keys=True, indent=2) + "\n")


def cmd_contour(cfg, args) -> int:
    if not planar(cfg):
        print(f"{cfg.case}: reduced space is not 2-dimensional; nothing to draw")
        return EXIT_OK
    out = _case_dir(cfg, args)
    jobs = run_signs(cfg, count=False, workers=args.workers)
    for job in jobs:
        write_csv(out / f"{sign_string(job.sigma)}.csv", job, cfg.window)
    write_svg(out / "contour.svg", jobs, cfg.window)
    nonempty = sum(1 for j in jobs if not j.contour.empty)
    print(f"{cfg.case}: {len(jobs)} sign classes, {nonempty} nonempty -> {out}")
    return EXIT_OK


def cmd_chambers(cfg, args) -> int:
    if not planar(cfg):
        print(f"{cfg.case}: reduced space is not 2-dimensional; no chambers to count")
        return EXIT_OK
    out = _case_dir(cfg, args)
    B = basis_of(cfg)
    jobs = run_signs(cfg, B, count=True, workers=args.workers)
    payload = chambers_payload(cfg, jobs, B)
    write_json(out / "report.json", payload)
    _sidecar(out, cfg, "chambers")
    for s, entry in payload["signs"].items():
        print(f"{s}: {entry.get('chamberCount')} chambers, {entry.get('innerChambers')} inner")
    return EXIT_OK


def cmd_verify(cfg, args) -> int:
    checks = run_verification(cfg, workers=args.workers)
    for c in checks:
        print(c.line())
    failed = [c for c in checks if not c.passed]
    if args.out:
        out = _case_dir(cfg, args)
        write_json(out / "verify.json", {"case": cfg.case, "checks": [{"name": c.name, "passed": c.passed, "detail": c.detail} for c in checks]})
        _sidecar(out, cfg, "verify")
    print(f"{len(checks) - len(failed)}/{len(checks)} checks passed")
    return EXIT_VERIFY if failed else EXIT_OK


def cmd_bounds(cfg, args) -> int:
    if cfg is not None:
        n, t = cfg.spectrum.n, cfg.spectrum.t
        d = affine_dimension(build_lifted(cfg.spectrum))
    else:
        if args.n is None:
            raise ConfigError("bounds needs --config or --n")
        n, t, d = args.n, args.t, args.d
        if (t is None) != (d is None):
            raise ConfigError("--t and --d go together")
    table = bounds_table(n, t, d, args.lines, args.cusps)
    for key, val in table.items():
        print(f"{key}: {val}")
    return EXIT_OK


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    try:
        cfg = _load(args.config) if args.config else None
        if cfg is not None:
            if args.window is not None:
                cfg.window = args.window
            if args.grid is not None:
                cfg.grid = args.grid
        handler = {"contour": cmd_contour, "chambers": cmd_chambers, "verify": cmd_verify, "bounds": cmd_bounds}[args.command]
        return handler(cfg, args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except XiContourError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VERIFY


if __name__ == "__main__":
    sys.exit(main())
