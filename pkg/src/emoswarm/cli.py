"""Command-line front end.

    emoswarm run --emotion anger --n 12 --domain 4.3x3.6 --out anger.csv --render
    emoswarm render anger.csv --frames-dir frames --frame-stride 50
    emoswarm metrics anger.csv --format json
    emoswarm behaviors

Exit codes: 0 success, 1 runtime error, 2 configuration error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
import time
from dataclasses import asdict, dataclass, field
from pathlib import Path

from . import engine
from .geometry import Domain
from .logfile import FORMATS, MalformedLog, infer_format, read_log, write_log
from .metrics import swarm_metrics
from .render import DEFAULT_TRAILS, default_trail_ids, render_frames

EXIT_OK, EXIT_RUNTIME, EXIT_CONFIG = 0, 1, 2
DEFAULT_DOMAIN = (1.0, 1.0)
DEFAULT_N = 15
METRIC_COLUMNS = ("robot_id", "path_length", "net_displacement", "mean_speed", "peak_speed", "angularity")


class ConfigError(ValueError):
    def __init__(self, field: str, message: str):
        super().__init__(f"invalid {field}: {message}")
        self.field = field


@dataclass
class RunConfig:
    emotion: str
    n: int = DEFAULT_N
    width: float = DEFAULT_DOMAIN[0]
    height: float = DEFAULT_DOMAIN[1]
    duration: float | None = None
    dt: float = engine.DEFAULT_DT
    seed: int = 0
    out: Path | None = None
    format: str | None = None
    render: bool = False
    frames_dir: Path | None = None
    frame_stride: int = 10
    trails: int = DEFAULT_TRAILS
    overrides: dict = field(default_factory=dict)
    metrics: bool = False

    @property
    def domain(self) -> Domain:
        return Domain.from_size(self.width, self.height)

    def resolve(self) -> engine.BehaviorSpec:
        """Fill defaults, check every field, and build the behavior spec."""
        if self.emotion not in engine.EMOTIONS:
            raise ConfigError("emotion", f"{self.emotion!r}; valid emotions: {', '.join(engine.EMOTIONS)}")
        if self.n < 1:
            raise ConfigError("n", f"need at least one robot, got {self.n}")
        if not (self.width > 0 and self.height > 0 and math.isfinite(self.width * self.height)):
            raise ConfigError("domain", f"sides must be positive, got {self.width}x{self.height}")
        if self.duration is None:
            self.duration = engine.DEFAULT_DURATION[self.emotion]
        if not (self.duration > 0 and math.isfinite(self.duration)):
            raise ConfigError("duration", f"must be positive, got {self.duration}")
        if not (0 < self.dt <= 0.1):
            raise ConfigError("dt", f"must lie in (0, 0.1], got {self.dt}")
        if self.out is None:
            self.out = Path(f"{self.emotion}.{self.format or 'csv'}")
        self.out = Path(self.out)
        if self.format is None:
            self.format = infer_format(self.out)
        if self.format not in FORMATS:
            raise ConfigError("format", f"{self.format!r}; expected one of {FORMATS}")
        _check_writable(self.out.parent, "out")
        if self.frame_stride < 1:
            raise ConfigError("frame-stride", f"must be >= 1, got {self.frame_stride}")
        if self.trails < 0:
            raise ConfigError("trails", f"must be >= 0, got {self.trails}")
        if self.render:
            if self.frames_dir is None:
                self.frames_dir = self.out.with_name(self.out.stem + "_frames")
            self.frames_dir = Path(self.frames_dir)
            _check_writable(_existing_parent(self.frames_dir), "frames-dir")
        domain = self.domain
        try:
            spec = engine.default_spec(self.emotion, domain)
            return engine.apply_overrides(spec, self.overrides, domain)
        except engine.SpecError as exc:
            raise ConfigError(f"--set {exc.field}", str(exc)) from None
        except ValueError as exc:
            raise ConfigError("domain", str(exc)) from None

    def to_dict(self) -> dict:
        d = asdict(self)
        for key in ("out", "frames_dir"):
            d[key] = str(d[key]) if d[key] is not None else None
        return d


def _existing_parent(path: Path) -> Path:
    path = path.resolve()
    while not path.exists():
        path = path.parent
    return path


def _check_writable(directory: Path, name: str):
    directory = Path(directory) if str(directory) else Path(".")
    if not directory.is_dir():
        raise ConfigError(name, f"directory {str(directory)!r} does not exist")
    if not os.access(directory, os.W_OK):
        raise ConfigError(name, f"directory {str(directory)!r} is not writable")


def parse_domain(text: str) -> tuple[float, float]:
    try:
        w, h = text.lower().split("x")
        return float(w), float(h)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected WIDTHxHEIGHT in meters, got {text!r}") from None


def parse_override(text: str) -> tuple[str, str]:
    if "=" not in text:
        raise argparse.ArgumentTypeError(f"expected key=value, got {text!r}")
    key, value = text.split("=", 1)
    return key.strip(), value.strip()


def cmd_run(cfg: RunConfig, stdout=None) -> int:
    stdout = stdout or sys.stdout
    spec = cfg.resolve()
    start = time.perf_counter()
    log = engine.run(spec, cfg.n, cfg.domain, cfg.duration, cfg.dt, cfg.seed)
    log.metadata["config"] = cfg.to_dict()
    write_log(log, cfg.out, cfg.format)
    wall = time.perf_counter() - start
    print(
        f"{cfg.emotion}: N={cfg.n} steps={log.metadata['steps']} wall={wall:.2f}s -> {cfg.out}",
        file=stdout,
    )
    if cfg.render:
        ids = default_trail_ids(cfg.n, cfg.trails)
        paths = render_frames(log, cfg.frames_dir, cfg.frame_stride, ids)
        print(f"wrote {len(paths)} frames to {cfg.frames_dir}", file=stdout)
    if cfg.metrics:
        print(format_metrics(swarm_metrics(log), "table"), file=stdout, end="")
    return EXIT_OK


def cmd_render(log_path, frames_dir, frame_stride: int = 10, trails: int = DEFAULT_TRAILS, stdout=None) -> list[Path]:
    log = read_log(log_path)
    ids = default_trail_ids(log.n_robots, trails)
    paths = render_frames(log, frames_dir, frame_stride, ids)
    print(f"wrote {len(paths)} frames to {frames_dir}", file=stdout or sys.stdout)
    return paths


def format_metrics(rows: list[dict], fmt: str = "table") -> str:
    if fmt == "json":
        return json.dumps(rows, indent=2) + "\n"
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=METRIC_COLUMNS, lineterminator="\n")
        writer.writeheader()
        for row in rows:
            writer.writerow({k: (repr(v) if isinstance(v, float) else v) for k, v in row.items()})
        return buf.getvalue()
    head = f"{'robot':>6} {'path[m]':>9} {'net[m]':>9} {'mean[m/s]':>10} {'peak[m/s]':>10} {'angular[rad]':>13}"
    lines = [head, "-" * len(head)]
    for r in rows:
        lines.append(
            f"{str(r['robot_id']):>6} {r['path_length']:9.4f} {r['net_displacement']:9.4f} "
            f"{r['mean_speed']:10.4f} {r['peak_speed']:10.4f} {r['angularity']:13.6f}"
        )
    return "\n".join(lines) + "\n"


def cmd_metrics(log_path, fmt: str = "table", stdout=None) -> list[dict]:
    rows = swarm_metrics(read_log(log_path))
    (stdout or sys.stdout).write(format_metrics(rows, fmt))
    return rows


def cmd_behaviors(stdout=None):
    stdout = stdout or sys.stdout
    for emotion in engine.EMOTIONS:
        shape, attrs = engine.BEHAVIOR_TABLE[emotion]
        print(f"{emotion:10s} {shape:24s} {', '.join(attrs)}", file=stdout)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="emoswarm", description="Emotion-expressive swarm behaviors.")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="simulate a behavior and write its trajectory log")
    run.add_argument("--emotion", required=True, choices=engine.EMOTIONS)
    run.add_argument("--n", type=int, default=DEFAULT_N, help="number of robots")
    run.add_argument("--domain", type=parse_domain, default=DEFAULT_DOMAIN, metavar="WxH")
    run.add_argument("--duration", type=float, default=None, help="seconds (default: per-emotion horizon)")
    run.add_argument("--dt", type=float, default=engine.DEFAULT_DT)
    run.add_argument("--seed", type=int, default=0)
    run.add_argument("--out", type=Path, default=None)
    run.add_argument("--format", choices=FORMATS, default=None)
    run.add_argument("--render", action="store_true", help="also write SVG frames")
    run.add_argument("--frames-dir", type=Path, default=None)
    run.add_argument("--frame-stride", type=int, default=10, help="steps per frame")
    run.add_argument("--trails", type=int, default=DEFAULT_TRAILS, help="robots drawn with trails")
    run.add_argument("--set", dest="overrides", type=parse_override, action="append", default=[],
                     metavar="KEY=VALUE", help="override a behavior parameter, e.g. diffeo.K=1.5")
    run.add_argument("--metrics", action="store_true", help="print the motion metrics table")

    render = sub.add_parser("render", help="write SVG frames from a trajectory log")
    render.add_argument("log", type=Path)
    render.add_argument("--frames-dir", type=Path, required=True)
    render.add_argument("--frame-stride", type=int, default=10)
    render.add_argument("--trails", type=int, default=DEFAULT_TRAILS)

    metrics = sub.add_parser("metrics", help="per-robot and swarm motion metrics of a log")
    metrics.add_argument("log", type=Path)
    metrics.add_argument("--format", choices=("table", "json", "csv"), default="table")

    sub.add_parser("behaviors", help="list the emotions and their attributes")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "run":
            cfg = RunConfig(
                emotion=args.emotion,
                n=args.n,
                width=args.domain[0],
                height=args.domain[1],
                duration=args.duration,
                dt=args.dt,
                seed=args.seed,
                out=args.out,
                format=args.format,
                render=args.render,
                frames_dir=args.frames_dir,
                frame_stride=args.frame_stride,
                trails=args.trails,
                overrides=dict(args.overrides),
                metrics=args.metrics,
            )
            return cmd_run(cfg)
        if args.command == "render":
            if args.frame_stride < 1:
                raise ConfigError("frame-stride", f"must be >= 1, got {args.frame_stride}")
            cmd_render(args.log, args.frames_dir, args.frame_stride, args.trails)
        elif args.command == "metrics":
            cmd_metrics(args.log, args.format)
        else:
            cmd_behaviors()
        return EXIT_OK
    except ConfigError as exc:
        print(f"emoswarm: error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (MalformedLog, OSError, ValueError, RuntimeError) as exc:
        print(f"emoswarm: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
