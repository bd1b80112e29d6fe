"""Command-line orchestration: pipelines, images, and JSON reports.

Subcommands: families, render, criterion, dimension, separation, solve,
reproduce-figure. Reports are UTF-8 JSON with alphabetically sorted keys and
shortest-roundtrip float formatting, and embed the fully resolved job
configuration, so identical configurations yield byte-identical files.
"""

from __future__ import annotations

import argparse
import json
import os
import re
import sys
from dataclasses import asdict, dataclass, field

import numpy as np

from . import (criterion, dynamics, families, metrics, render, solver,
               topology)
from .errors import JuliaBubblesError

WORKERS_ENV = "JULIABUBBLES_WORKERS"
MAX_RESOLUTION = 8192
MAX_BUDGET = 10 ** 7

# Figure presets: family, parameters, and a budget override where the map is
# parabolic (slow convergence needs the larger budget).
FIGURE_PRESETS = {
    1: ("devaney_marotta", {}, None),
    2: ("cubic_bubble", {"a": 0.06 + 1.31j}, None),
    3: ("para_cubic", {"a": -1.8}, 100000),
    4: ("g", {"a": 2.5}, None),
    5: ("g", {"a": 0.5}, None),
    6: ("h", {"a": 1.05}, 100000),
}

_NUM_RE = re.compile(r"^[+-]?(?:\d+(?:\.\d*)?|\.\d+)(?:[eE][+-]?\d+)?$")


def _parse_num(s, default=None):
    if s in ("", "+", "-") and default is not None:
        return default if s != "-" else -default
    if not _NUM_RE.match(s):
        raise ValueError(f"bad numeric literal {s!r}")
    return float(s)


def parse_complex(text: str) -> complex:
    """Parse RE, IMi, or RE+IMi / RE-IMi with optional exponents.

    Examples: "2.5", "1.31i", "0.06+1.31i", "1e-3-2.0e+1i", "-i", "3+i".
    """
    s = text.strip().replace(" ", "")
    try:
        if not s:
            raise ValueError("empty string")
        if not s.endswith("i"):
            return complex(_parse_num(s), 0.0)
        body = s[:-1]
        # split real/imaginary at the last sign that is not an exponent sign
        split = 0
        for k in range(len(body) - 1, 0, -1):
            if body[k] in "+-" and body[k - 1] not in "eE":
                split = k
                break
        re_s, im_s = body[:split], body[split:]
        re_part = _parse_num(re_s) if re_s else 0.0
        return complex(re_part, _parse_num(im_s, default=1.0))
    except ValueError as exc:
        raise ValueError(f"cannot parse complex number {text!r}; "
                         "expected RE, IMi, or RE+IMi") from exc


def format_complex(z) -> str:
    z = complex(z)
    if z.imag == 0.0:
        return repr(z.real)
    sign = "+" if z.imag >= 0 else "-"
    return f"{z.real!r}{sign}{abs(z.imag)!r}i"


@dataclass
class JobConfig:
    """Fully resolved job parameters, embedded in every report."""

    command: str
    family: str = ""
    params: dict = field(default_factory=dict)
    center: complex = None
    width: float = None
    resolution: int = 512
    budget: int = None
    stages: list = field(default_factory=list)
    out: str = None
    ppm: str = None
    workers: int = 1
    seed: int = 0

    def __post_init__(self):
        if not (16 <= self.resolution <= MAX_RESOLUTION):
            raise ValueError(f"config key 'resolution': {self.resolution} "
                             f"outside [16, {MAX_RESOLUTION}]")
        if self.budget is not None and not (1 <= self.budget <= MAX_BUDGET):
            raise ValueError(f"config key 'budget': {self.budget} "
                             f"outside [1, {MAX_BUDGET}]")
        if self.workers < 1:
            raise ValueError(f"config key 'workers': {self.workers} < 1")

    def as_dict(self):
        d = asdict(self)
        d["params"] = {k: _jsonable(v) for k, v in self.params.items()}
        d["center"] = None if self.center is None else format_complex(self.center)
        return d


def _jsonable(x):
    if isinstance(x, complex):
        return format_complex(x)
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, (np.floating,)):
        return float(x)
    if isinstance(x, np.ndarray):
        return [_jsonable(v) for v in x.tolist()]
    if isinstance(x, dict):
        return {k: _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    return x


def write_report(path, config: JobConfig, payload: dict):
    doc = {"config": config.as_dict(), "report": _jsonable(payload)}
    text = json.dumps(doc, sort_keys=True, indent=2) + "\n"
    if path is None:
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)


# ---------------------------------------------------------------------------
# argument handling
# ---------------------------------------------------------------------------

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


class UsageError(Exception):
    pass


def _build_parser():
    top = _Parser(prog="juliabubbles",
                  description="Rational-map Julia set topology toolkit")
    sub = top.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--family", default=None,
                       help="catalog family name (see 'families')")
        p.add_argument("--res", type=int, default=512,
                       help="grid resolution (square)")
        p.add_argument("--budget", type=int, default=None,
                       help="iteration budget per pixel")
        p.add_argument("--center", type=parse_complex, default=None,
                       help="window center, RE+IMi grammar")
        p.add_argument("--width", type=float, default=None,
                       help="window width (square window)")
        p.add_argument("--workers", type=int, default=None,
                       help="render worker threads")
        p.add_argument("--seed", type=int, default=0, help="RNG seed")
        p.add_argument("--out", default=None, help="report path (else stdout)")
        p.add_argument("--config", default=None,
                       help="JSON config file; flags override its keys")

    sub.add_parser("families", help="list the family catalog")

    p = sub.add_parser("render", help="classification grid and PPM image")
    common(p)
    p.add_argument("--ppm", default=None, help="PPM image output path")

    p = sub.add_parser("criterion", help="Cantor-bubble criterion verdict")
    common(p)

    p = sub.add_parser("dimension", help="box dimension of the Julia pixel set")
    common(p)

    p = sub.add_parser("separation",
                       help="relative separation and turning of bubble curves")
    common(p)
    p.add_argument("--curves", type=int, default=30,
                   help="number of largest curves to compare")

    p = sub.add_parser("solve", help="superattracting parameter solve")
    p.add_argument("--p", type=int, required=True, help="cycle period")
    p.add_argument("--v0", type=parse_complex, required=True,
                   help="Newton starting parameter")
    p.add_argument("--max-iters", type=int, default=50)
    p.add_argument("--chain", action="store_true",
                   help="run the criterion on the solved map")
    p.add_argument("--res", type=int, default=512)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default=None)

    p = sub.add_parser("reproduce-figure", help="canned figure presets 1-6")
    p.add_argument("figure", type=int, choices=sorted(FIGURE_PRESETS))
    p.add_argument("--res", type=int, default=1024)
    p.add_argument("--workers", type=int, default=None)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default=None)
    p.add_argument("--ppm", default=None)
    return top


def _family_params(extra):
    """Leftover --key value pairs become family parameters."""
    params = {}
    i = 0
    while i < len(extra):
        key = extra[i]
        if not key.startswith("--") or i + 1 >= len(extra):
            raise UsageError(f"unrecognized argument {key!r}; family "
                             "parameters are given as --name value pairs")
        raw = extra[i + 1]
        name = key[2:]
        try:
            params[name] = int(raw)
        except ValueError:
            try:
                params[name] = parse_complex(raw)
            except ValueError as exc:
                raise UsageError(f"family parameter --{name}: {exc}") from exc
        i += 2
    return params


def _apply_config_file(args):
    if getattr(args, "config", None) is None:
        return {}
    try:
        with open(args.config, encoding="utf-8") as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"config file {args.config}: {exc}") from exc
    if not isinstance(data, dict):
        raise UsageError(f"config file {args.config}: expected a JSON object")
    return data


def _resolve_workers(args):
    if getattr(args, "workers", None) is not None:
        return args.workers
    env = os.environ.get(WORKERS_ENV)
    if env:
        try:
            return max(1, int(env))
        except ValueError as exc:
            raise UsageError(f"{WORKERS_ENV}={env!r} is not an integer") from exc
    return 1


# ---------------------------------------------------------------------------
# pipelines
# ---------------------------------------------------------------------------

def _pipeline_grid(config: JobConfig):
    """family -> attractors -> window -> grid, shared by most subcommands."""
    instance = families.make(config.family, **config.params)
    attractors = dynamics.find_attractors(instance)
    if config.center is not None and config.width is not None:
        window = render.Window.square(config.center, config.width,
                                      config.resolution)
    else:
        window = criterion.default_window(instance, attractors,
                                          config.resolution)
    budget = config.budget
    if budget is None:
        budget = dynamics.default_budget(attractors)
    grid = render.render_grid(instance, window, attractors, budget=budget,
                              workers=config.workers)
    return instance, attractors, window, grid


def _window_dict(window):
    return {"center": format_complex(window.center), "width": window.width,
            "height": window.height, "nx": window.nx, "ny": window.ny}


def _cmd_families(_args):
    listing = families.list_families()
    sys.stdout.write(json.dumps(listing, sort_keys=True, indent=2) + "\n")
    return 0


def _cmd_render(config: JobConfig):
    _, _, window, grid = _pipeline_grid(config)
    if config.ppm:
        render.write_ppm(grid, render.default_palette, config.ppm)
    fractions = {name: float(np.mean(grid.kind == code))
                 for code, name in enumerate(render.KIND_NAMES)}
    write_report(config.out, config, {
        "window": _window_dict(window),
        "fractions": fractions,
        "undecided_fraction": grid.undecided_fraction,
        "ppm": config.ppm,
    })
    return 0


def _cmd_criterion(config: JobConfig):
    instance = families.make(config.family, **config.params)
    window = None
    if config.center is not None and config.width is not None:
        window = render.Window.square(config.center, config.width,
                                      config.resolution)
    verdict = criterion.check_theorem1(instance, window=window,
                                       resolution=config.resolution,
                                       budget=config.budget)
    write_report(config.out, config, verdict.as_dict())
    return 0


def _cmd_dimension(config: JobConfig):
    instance, _, window, grid = _pipeline_grid(config)
    potential = None
    f = instance.map
    if f.num.degree >= f.den.degree + 2:
        potential = dynamics.escape_potential_grid(
            f, grid, dynamics.escape_radius(f))
    mask = topology.julia_mask(grid, potential)
    fit = topology.box_dimension(grid, mask)
    write_report(config.out, config, {
        "window": _window_dict(window),
        "dimension": fit["slope"], "r_squared": fit["r2"],
        "box_counts": fit["counts"],
        "julia_pixels": int(mask.sum()),
    })
    return 0


def _cmd_separation(config: JobConfig, n_curves):
    instance, _, window, grid = _pipeline_grid(config)
    potential = None
    f = instance.map
    if f.num.degree >= f.den.degree + 2:
        potential = dynamics.escape_potential_grid(
            f, grid, dynamics.escape_radius(f))
    graph = topology.label_components(grid, potential)
    curves = topology.largest_bounded_curves(graph, n=n_curves)
    report = metrics.separation_report(curves, max_curves=n_curves)
    turnings = [metrics.bounded_turning(c, pixel_width=window.pixel_width)
                for c in curves[:10]]
    write_report(config.out, config, {
        "window": _window_dict(window),
        "curve_count": report.curve_count,
        "min_relative_separation": report.min_delta,
        "turning_constants": turnings,
        "critical_accumulation_distance":
            metrics.critical_accumulation_distance(instance, curves),
    })
    return 0


def _cmd_solve(args, config: JobConfig):
    result = solver.solve_superattracting(
        args.p, args.v0, max_iters=args.max_iters,
        chain_criterion=args.chain, resolution=args.res)
    payload = {
        "parameter": format_complex(result.parameter),
        "residual": result.residual,
        "newton_iters": result.newton_iters,
        "cycle_points": [format_complex(z) for z in result.cycle.points],
        "cycle_period": result.cycle.period,
        "cycle_multiplier": format_complex(result.cycle.multiplier),
        "other_critical_fate": result.other_critical_fate.kind,
        "verdict": None if result.verdict is None else result.verdict.as_dict(),
    }
    write_report(config.out, config, payload)
    return 0


def run(argv) -> int:
    parser = _build_parser()
    try:
        args, extra = parser.parse_known_args(argv)
        if args.command == "families":
            if extra:
                raise UsageError(f"unrecognized arguments: {' '.join(extra)}")
            return _cmd_families(args)
        if args.command == "solve":
            if extra:
                raise UsageError(f"unrecognized arguments: {' '.join(extra)}")
            config = JobConfig(command="solve", family="solver_cubic",
                               params={"p": args.p,
                                       "v0": args.v0},
                               resolution=args.res, seed=args.seed,
                               out=args.out,
                               stages=["solve"] + (["criterion"] if args.chain
                                                   else []))
            return _cmd_solve(args, config)
        if args.command == "reproduce-figure":
            if extra:
                raise UsageError(f"unrecognized arguments: {' '.join(extra)}")
            family, params, budget = FIGURE_PRESETS[args.figure]
            config = JobConfig(command="reproduce-figure", family=family,
                               params=dict(params), resolution=args.res,
                               budget=budget, out=args.out, ppm=args.ppm,
                               workers=_resolve_workers(args), seed=args.seed,
                               stages=["render", "criterion"])
            _, _, window, grid = _pipeline_grid(config)
            if config.ppm:
                render.write_ppm(grid, render.default_palette, config.ppm)
            instance = families.make(family, **params)
            verdict = criterion.check_theorem1(instance,
                                               resolution=config.resolution,
                                               budget=config.budget)
            write_report(config.out, config, {
                "figure": args.figure,
                "window": _window_dict(window),
                "undecided_fraction": grid.undecided_fraction,
                "verdict": verdict.as_dict(),
                "ppm": config.ppm,
            })
            return 0

        file_cfg = _apply_config_file(args)
        params = dict(file_cfg.get("params", {}))
        params = {k: (parse_complex(v) if isinstance(v, str) else v)
                  for k, v in params.items()}
        params.update(_family_params(extra))
        family = args.family or file_cfg.get("family")
        if not family:
            raise UsageError("config key 'family' is required")
        center = args.center
        if center is None and "center" in file_cfg:
            center = parse_complex(str(file_cfg["center"]))
        config = JobConfig(
            command=args.command, family=family, params=params,
            center=center,
            width=args.width if args.width is not None
            else file_cfg.get("width"),
            resolution=args.res, budget=args.budget or file_cfg.get("budget"),
            out=args.out, ppm=getattr(args, "ppm", None),
            workers=_resolve_workers(args), seed=args.seed,
            stages=[args.command])
        if args.command == "render":
            return _cmd_render(config)
        if args.command == "criterion":
            return _cmd_criterion(config)
        if args.command == "dimension":
            return _cmd_dimension(config)
        if args.command == "separation":
            return _cmd_separation(config, args.curves)
        raise UsageError(f"unknown command {args.command!r}")
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2
    except (JuliaBubblesError, ValueError, KeyError, OSError) as exc:
        cmd = argv[0] if argv else "?"
        print(f"error in stage '{cmd}': {exc}", file=sys.stderr)
        return 1


def main():
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
