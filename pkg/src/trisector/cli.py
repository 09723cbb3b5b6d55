"""Command-line entry point: ``trisector {series,trace,analyze,verify}``.

Settings come from an optional ``key = value`` file (``--config``) and are
then overridden by explicit flags.  Every JSON report echoes the effective
configuration.
"""

from __future__ import annotations

import argparse
import configparser
import json
import logging
import sys
from dataclasses import asdict, dataclass, fields, replace
from pathlib import Path
from typing import Sequence

from .analysis import annihilator_rank, crossing_census, distance_profile
from .geometry import (
    events_sorted,
    find_axis_crossings,
    find_self_intersections,
    find_tangent_events,
    find_tangent_through_focus,
    parabola_source,
    series_source,
    trace,
)
from .solver import Branch, SingularSystemError, residual_orders, solve_branch
from .svg import curve_figure
from .verify import CRITERIA, Settings, run_criteria

log = logging.getLogger("trisector")


@dataclass(frozen=True)
class RunConfig:
    branch: str = "conjugate"
    order: int = 20
    seed: str = "parabola"
    t_min: float = -1.0
    t_max: float = 1.0
    samples: int = 4001
    iterations: int = 5
    event_tol: float = 1e-12
    depth: int = 3
    degree: int = 4
    out_dir: str = "."

    def validate(self) -> None:
        if self.order < 2 or self.order % 2:
            raise ValueError(f"order must be an even integer >= 2, got {self.order}")
        if self.iterations < 0:
            raise ValueError("iterations must be >= 0")
        if not self.event_tol > 0:
            raise ValueError("tolerances must be > 0")
        if self.samples < 2:
            raise ValueError("need at least 2 samples")
        if not self.t_max > self.t_min:
            raise ValueError("empty parameter domain")
        if self.depth < 1 or self.degree < 1:
            raise ValueError("depth and degree must be >= 1")
        Branch(self.branch)
        if self.seed not in ("parabola", "trisector", "conjugate"):
            raise ValueError(f"unknown seed {self.seed!r}")


def load_config(path: str | Path) -> dict:
    """Read a flat ``key = value`` file into typed RunConfig fields."""
    parser = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    parser.read_string("[run]\n" + Path(path).read_text(encoding="utf-8"))
    types = {f.name: f.type for f in fields(RunConfig)}
    out = {}
    for key, raw in parser["run"].items():
        key = key.replace("-", "_")
        if key not in types:
            raise ValueError(f"unknown config key {key!r}")
        kind = types[key]
        out[key] = int(raw) if kind == "int" else float(raw) if kind == "float" else raw
    return out


def _emit(report: dict, out: Path | None, name: str) -> None:
    text = json.dumps(report, sort_keys=True, indent=2, ensure_ascii=False) + "\n"
    sys.stdout.write(text)
    if out is not None:
        out.mkdir(parents=True, exist_ok=True)
        (out / name).write_text(text, encoding="utf-8")


def _source(cfg: RunConfig):
    if cfg.seed == "parabola":
        return parabola_source(cfg.iterations)
    return series_source(solve_branch(cfg.seed, cfg.order), cfg.iterations)


def _trace(cfg: RunConfig):
    return trace(_source(cfg), cfg.t_min, cfg.t_max, cfg.samples)


# -- commands ---------------------------------------------------------------------


def cmd_series(cfg: RunConfig, out: Path | None) -> int:
    try:
        sol = solve_branch(cfg.branch, cfg.order)
    except SingularSystemError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    first, second = residual_orders(sol)
    ok = first.is_zero() and second.is_zero()
    report = {
        "config": asdict(cfg),
        "branch": sol.branch.value,
        "order": sol.order,
        "m": {str(k): c.to_string() for k, c in enumerate(sol.m) if c},
        "lambda": {str(k): c.to_string() for k, c in enumerate(sol.lam) if c},
        "determinants": {str(k): d.to_string() for k, d in sorted(sol.determinants.items())},
        "determinants_float": {str(k): float(d) for k, d in sorted(sol.determinants.items())},
        "residuals": {
            "first_vanishes_through": sol.order if first.is_zero() else None,
            "second_vanishes_through": sol.order - 1 if second.is_zero() else None,
            "vanish": ok,
        },
    }
    _emit(report, out, f"series_{sol.branch.value}_{sol.order}.json")
    if not ok:
        print("error: residuals do not vanish", file=sys.stderr)
    return 0 if ok else 1


def cmd_trace(cfg: RunConfig, out: Path | None, svg: str | None, csv: str | None,
              circles: int, reflected: bool, events: bool) -> int:
    curve = _trace(cfg)
    found = []
    if events:
        found = events_sorted(
            find_axis_crossings(curve, param_tol=cfg.event_tol)
            + find_tangent_events(curve, param_tol=cfg.event_tol)
            + find_tangent_through_focus(curve, param_tol=cfg.event_tol)
            + find_self_intersections(curve)
        )
    echo = json.dumps(asdict(cfg), sort_keys=True)
    try:
        if csv:
            Path(csv).write_text(f"# config: {echo}\n" + curve.to_csv(), encoding="utf-8")
        if svg:
            fig = curve_figure(curve, reflected=reflected, circles=circles, events=found)
            Path(svg).write_text(fig.render().replace(
                "<rect", f"<desc>{echo}</desc>\n<rect", 1), encoding="utf-8")
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    report = {
        "config": asdict(cfg),
        "seed": curve.seed_descriptor,
        "generation": curve.generation,
        "samples": len(curve),
        "gaps": [list(g) for g in curve.gaps],
        "events": [e.to_json() for e in found],
        "files": {"csv": csv, "svg": svg},
    }
    _emit(report, out, "trace.json")
    return 0


def cmd_analyze(cfg: RunConfig, out: Path | None, what: str, point: Sequence[float] | None) -> int:
    report: dict = {"config": asdict(cfg), "analysis": what}
    ok = True
    if what == "census":
        rep = crossing_census(_trace(cfg), cfg.depth)
        report["census"] = rep.to_json()
        ok = rep.verdict != "fail"
    elif what == "profile":
        if point is None:
            print("error: profile needs --point X Y", file=sys.stderr)
            return 2
        mins = distance_profile(point, _trace(cfg))
        report["point"] = list(point)
        report["minima"] = [{"t": t, "d2": d} for t, d in mins]
        if mins:
            t, d = min(mins, key=lambda m: m[1])
            report["global"] = {"t": t, "d2": d}
    else:
        M = (cfg.degree + 1) * (cfg.degree + 2) // 2
        need = M + 10
        order = max(cfg.order, need + need % 2)
        res = annihilator_rank(solve_branch(cfg.branch, order), cfg.degree)
        report["annihilator"] = res.to_json()
        report["solved_order"] = order
    _emit(report, out, f"analyze_{what}.json")
    return 0 if ok else 1


def cmd_verify(cfg: RunConfig, out: Path | None, only: list[str] | None) -> int:
    settings = Settings(depth=cfg.depth, event_tol=cfg.event_tol, samples=cfg.samples)
    verdicts = run_criteria(only, settings)
    for v in verdicts:
        print(v.line(), file=sys.stderr)
    report = {
        "config": asdict(cfg),
        "verdicts": [v.to_json() for v in verdicts],
        "all_passed": all(v.passed for v in verdicts),
    }
    _emit(report, out, "verify.json")
    return 0 if report["all_passed"] else 1


# -- argument parsing -------------------------------------------------------------


def _positive(kind):
    def conv(text: str):
        value = kind(text)
        if not value > 0:
            raise argparse.ArgumentTypeError(f"must be > 0, got {text}")
        return value
    return conv


def _even(text: str) -> int:
    value = int(text)
    if value < 2 or value % 2:
        raise argparse.ArgumentTypeError(f"order must be an even integer >= 2, got {text}")
    return value


def _non_negative(text: str) -> int:
    value = int(text)
    if value < 0:
        raise argparse.ArgumentTypeError(f"must be >= 0, got {text}")
    return value


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="key = value settings file")
    common.add_argument("--out", help="also write the JSON report into this directory")
    common.add_argument("-v", "--verbose", action="store_true")

    p = argparse.ArgumentParser(prog="trisector", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("series", parents=[common], help="solve a branch to a given order")
    s.add_argument("--branch", choices=[b.value for b in Branch])
    s.add_argument("--order", type=_even)

    t = sub.add_parser("trace", parents=[common], help="trace an iterate, write CSV/SVG")
    t.add_argument("--iterations", type=_non_negative)
    t.add_argument("--seed", choices=["parabola", "trisector", "conjugate"])
    t.add_argument("--domain", nargs=2, type=float, metavar=("T_MIN", "T_MAX"))
    t.add_argument("--samples", type=int)
    t.add_argument("--svg")
    t.add_argument("--csv")
    t.add_argument("--emit-circles", type=_non_negative, default=0, metavar="N")
    t.add_argument("--reflected", action="store_true", help="also draw the mirror image")
    t.add_argument("--events", action="store_true", help="locate and mark feature events")

    a = sub.add_parser("analyze", parents=[common], help="census, distance profile, annihilator")
    a.add_argument("what", choices=["census", "profile", "annihilator"])
    a.add_argument("--branch", choices=[b.value for b in Branch])
    a.add_argument("--iterations", type=_non_negative)
    a.add_argument("--domain", nargs=2, type=float, metavar=("T_MIN", "T_MAX"))
    a.add_argument("--depth", type=_positive(int))
    a.add_argument("--degree", type=_positive(int))
    a.add_argument("--point", nargs=2, type=float, metavar=("X", "Y"))

    v = sub.add_parser("verify", parents=[common], help="run the acceptance criteria")
    v.add_argument("--only", action="append", choices=[*CRITERIA, "determinism"])
    v.add_argument("--depth", type=_positive(int))
    v.add_argument("--tol", type=_positive(float), help="event refinement tolerance")
    return p


def resolve_config(args: argparse.Namespace) -> RunConfig:
    base = load_config(args.config) if getattr(args, "config", None) else {}
    cfg = replace(RunConfig(), **base)
    overrides = {}
    for name in ("branch", "order", "iterations", "seed", "samples", "depth", "degree"):
        value = getattr(args, name, None)
        if value is not None:
            overrides[name] = value
    if getattr(args, "tol", None) is not None:
        overrides["event_tol"] = args.tol
    if getattr(args, "domain", None):
        overrides["t_min"], overrides["t_max"] = args.domain
    if getattr(args, "out", None):
        overrides["out_dir"] = args.out
    cfg = replace(cfg, **overrides)
    cfg.validate()
    return cfg


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = resolve_config(args)
    except (ValueError, OSError) as exc:
        parser.error(str(exc))
    out = Path(args.out) if args.out else None
    if args.command == "series":
        return cmd_series(cfg, out)
    if args.command == "trace":
        return cmd_trace(cfg, out, args.svg, args.csv, args.emit_circles, args.reflected, args.events)
    if args.command == "analyze":
        return cmd_analyze(cfg, out, args.what, args.point)
    return cmd_verify(cfg, out, args.only)


if __name__ == "__main__":
    sys.exit(main())
