"""Command-line pipeline: cvvp-gt | stabilize | decide | simulate | report.

Each stage reads and writes the JSON-lines formats in docs/formats.md,
so stages compose through files and an external estimator can slot in at
the prediction file. Every output is accompanied by the serialized run
configuration; reruns with the same configuration and inputs are
byte-identical.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import asdict, dataclass, fields
from pathlib import Path

from . import decision, simulate, stabilize, traces
from .cvvp import ImportanceParams, cvvp_values, video_cvvp_series


@dataclass(frozen=True)
class RunConfig:
    """All pipeline tunables; flags mirror these field names."""

    th_dist: float = 30.0
    th_cvvp: float = 0.6
    t_min: int = 20
    clip_len: int = 120
    fps: int = 30
    grid_res: float = 1.0
    idle_timeout: float = 10.0
    switch_prob: float = 0.05
    seed: int = 0
    exclude_all_enforced: bool = True

    def __post_init__(self):
        ImportanceParams(th_dist=self.th_dist)  # range checks live there
        self.stabilize_params()
        if self.fps < 1:
            raise ValueError(f"fps {self.fps} < 1")
        if self.grid_res <= 0:
            raise ValueError(f"grid_res {self.grid_res} <= 0")

    def importance_params(self) -> ImportanceParams:
        return ImportanceParams(th_dist=self.th_dist)

    def stabilize_params(self) -> stabilize.StabilizeParams:
        return stabilize.StabilizeParams(th_cvvp=self.th_cvvp,
                                         t_min=self.t_min,
                                         clip_len=self.clip_len)

    def evaluation_config(self) -> simulate.EvaluationConfig:
        return simulate.EvaluationConfig(
            importance=self.importance_params(),
            stabilize=self.stabilize_params(),
            grid_res=self.grid_res, rng_seed=self.seed,
            switch_prob=self.switch_prob, idle_timeout=self.idle_timeout,
            exclude_all_enforced=self.exclude_all_enforced)


def _parse_config_file(path) -> dict:
    """key = value lines; values parse as JSON, falling back to strings."""
    values = {}
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{lineno}: expected key = value")
            key, _, value = line.partition("=")
            key = key.strip().replace("-", "_")
            value = value.strip()
            try:
                values[key] = json.loads(value)
            except json.JSONDecodeError:
                values[key] = value
    return values


def _build_config(args) -> RunConfig:
    values = {}
    if args.config:
        file_values = _parse_config_file(args.config)
        known = {f.name for f in fields(RunConfig)}
        unknown = set(file_values) - known
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        values.update(file_values)
    for f in fields(RunConfig):
        flag = getattr(args, f.name, None)
        if flag is not None:
            values[f.name] = flag
    return RunConfig(**values)


def _write_config_sidecar(config: RunConfig, out_path, command: str,
                          extra=None) -> None:
    payload = {"command": command, **asdict(config)}
    if extra:
        payload.update(extra)
    sidecar = Path(str(out_path) + ".config.json")
    with open(sidecar, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _add_config_flags(parser) -> None:
    parser.add_argument("--config", help="key = value file of tunables")
    for f in fields(RunConfig):
        flag = "--" + f.name.replace("_", "-")
        if f.type == "bool":
            parser.add_argument(flag, default=None, type=_parse_bool,
                                metavar="BOOL")
        else:
            kind = float if f.type == "float" else int
            parser.add_argument(flag, default=None, type=kind)


def _parse_bool(text: str) -> bool:
    lowered = text.lower()
    if lowered in ("1", "true", "yes", "on"):
        return True
    if lowered in ("0", "false", "no", "off"):
        return False
    raise argparse.ArgumentTypeError(f"expected a boolean, got {text!r}")


def cmd_cvvp_gt(args) -> int:
    config = _build_config(args)
    labels = traces.load_labels(args.labels, fill_gaps=args.fill_gaps)
    series = video_cvvp_series(labels, config.importance_params(),
                               grid_res=config.grid_res)
    pred = traces.CvvpPredictionFile(video_id=labels.video_id,
                                     values=tuple(cvvp_values(series)))
    Path(args.out).parent.mkdir(parents=True, exist_ok=True)
    traces.save_predictions(pred, args.out)
    _write_config_sidecar(config, args.out, "cvvp-gt",
                          extra={"labels": str(args.labels)})
    print(f"wrote ground-truth cvvp for {labels.frame_count} frames "
          f"of {labels.video_id!r} to {args.out}")
    return 0


def cmd_stabilize(args) -> int:
    config = _build_config(args)
    pred = traces.load_predictions(args.cvvp)
    seconds = stabilize.per_second_average(pred.values, config.fps)
    norm = stabilize.normalize(seconds, config.th_cvvp)
    solver = (stabilize.stabilize_bruteforce if args.brute_force
              else stabilize.stabilize_dp)
    schedule = stabilize.stabilize_video(norm, config.stabilize_params(),
                                         solver=solver)
    Path(args.out).parent.mkdir(parents=True, exist_ok=True)
    traces.save_schedule(pred.video_id, schedule, args.out)
    _write_config_sidecar(config, args.out, "stabilize",
                          extra={"cvvp": str(args.cvvp),
                                 "solver": "brute-force" if args.brute_force
                                 else "dp"})
    print(f"wrote {schedule.total_seconds}-second schedule "
          f"({len(schedule.segments)} segments) to {args.out}")
    return 0


def cmd_decide(args) -> int:
    config = _build_config(args)
    video_id, schedule = traces.load_schedule(args.schedule)
    events = decision.load_events(args.events) if args.events else []
    viewers = args.viewer or None
    session_config = decision.DecisionConfig(
        idle_timeout=config.idle_timeout,
        restore_manual_after_enforced=args.restore_manual)
    session_traces = decision.run_session(schedule, events,
                                          config=session_config,
                                          viewers=viewers)
    Path(args.out).parent.mkdir(parents=True, exist_ok=True)
    decision.save_mode_traces(session_traces, args.out)
    _write_config_sidecar(config, args.out, "decide",
                          extra={"schedule": str(args.schedule),
                                 "events": str(args.events),
                                 "restore_manual": args.restore_manual})
    print(f"wrote mode traces for {len(session_traces)} viewer(s) "
          f"of {video_id!r} to {args.out}")
    return 0


def _load_video_inputs(args):
    by_video = {}
    for path in args.labels:
        labels = traces.load_labels(path)
        by_video[labels.video_id] = {"labels": labels}
    for path in args.trajectory:
        traj = traces.load_trajectory(path)
        if traj.video_id not in by_video:
            raise ValueError(f"trajectory {path} is for unknown video "
                             f"{traj.video_id!r}")
        by_video[traj.video_id]["saliency"] = traj
    for path in args.predictions:
        pred = traces.load_predictions(path)
        if pred.video_id not in by_video:
            raise ValueError(f"predictions {path} are for unknown video "
                             f"{pred.video_id!r}")
        by_video[pred.video_id]["predictions"] = pred
    events_by_video = {}
    for spec_arg in args.events or []:
        video, _, path = spec_arg.partition("=")
        if not path:
            raise ValueError("--events expects VIDEO=PATH")
        events_by_video[video] = tuple(decision.load_events(path))

    inputs = []
    for video in sorted(by_video):
        entry = by_video[video]
        for key in ("saliency", "predictions"):
            if key not in entry:
                raise ValueError(f"video {video!r} has labels but no {key}")
        inputs.append(simulate.VideoInputs(
            labels=entry["labels"], saliency=entry["saliency"],
            predictions=entry["predictions"],
            events=events_by_video.get(video)))
    return inputs


def cmd_simulate(args) -> int:
    config = _build_config(args)
    inputs = _load_video_inputs(args)
    report = simulate.evaluate(inputs, config.evaluation_config())
    outdir = Path(args.out)
    outdir.mkdir(parents=True, exist_ok=True)
    simulate.write_report(report, outdir)
    with open(outdir / "config.json", "w", encoding="utf-8") as fh:
        json.dump({"command": "simulate", **asdict(config)}, fh,
                  indent=2, sort_keys=True)
        fh.write("\n")
    print(f"evaluated {len(report.per_video)} video(s); "
          f"excluded: {list(report.excluded_videos) or 'none'}")
    for vid in sorted(report.per_video):
        vrep = report.per_video[vid]
        print(f"  {vid}: accuracy={vrep.inference_accuracy:.3f} "
              f"mean_error={vrep.error.mean:.3f}")
    return 0


def cmd_report(args) -> int:
    outdir = Path(args.dir)
    with open(outdir / "summary.json", "r", encoding="utf-8") as fh:
        summary = json.load(fh)
    recomputed = simulate.recompute_summary(outdir)

    mismatches = []
    for vid, entry in recomputed["videos"].items():
        stored = summary["videos"][vid]
        if entry["mean_cvvp_error"] != stored["mean_cvvp_error"]:
            mismatches.append(f"{vid}: mean_cvvp_error")
        for strategy, value in entry["importance"].items():
            if value != stored["importance"][strategy]:
                mismatches.append(f"{vid}: importance[{strategy}]")
    for strategy, value in recomputed["aggregate"]["importance"].items():
        if value != summary["aggregate"]["importance"][strategy]:
            mismatches.append(f"aggregate: importance[{strategy}]")
    if recomputed["aggregate"]["mean_cvvp_error"] != \
            summary["aggregate"]["mean_cvvp_error"]:
        mismatches.append("aggregate: mean_cvvp_error")

    print(f"{'video':<16} {'strategy':<18} {'importance':>10}")
    for vid in sorted(recomputed["videos"]):
        for strategy, value in sorted(
                recomputed["videos"][vid]["importance"].items()):
            print(f"{vid:<16} {strategy:<18} {value:>10.4f}")
    if mismatches:
        print("summary.json disagrees with per-frame outputs:",
              ", ".join(mismatches), file=sys.stderr)
        return 1
    print("summary.json matches recomputation from per-frame outputs")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cvvp360",
        description="view-mode decision pipeline for multi-viewer 360 video")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("cvvp-gt",
                       help="ground-truth convergence values from labels")
    p.add_argument("--labels", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--fill-gaps", action="store_true",
                   help="hold last labels over missing frames")
    _add_config_flags(p)
    p.set_defaults(fn=cmd_cvvp_gt)

    p = sub.add_parser("stabilize",
                       help="binary mode schedule from a cvvp file")
    p.add_argument("--cvvp", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--brute-force", action="store_true",
                   help="exhaustive per-clip solver instead of the DP")
    _add_config_flags(p)
    p.set_defaults(fn=cmd_stabilize)

    p = sub.add_parser("decide",
                       help="replay viewer sessions against a schedule")
    p.add_argument("--schedule", required=True)
    p.add_argument("--events")
    p.add_argument("--viewer", action="append",
                   help="include a viewer even without events (repeatable)")
    p.add_argument("--restore-manual", action="store_true",
                   help="restore the pre-enforcement choice on release")
    p.add_argument("--out", required=True)
    _add_config_flags(p)
    p.set_defaults(fn=cmd_decide)

    p = sub.add_parser("simulate",
                       help="evaluate strategies over one or more videos")
    p.add_argument("--labels", action="append", required=True)
    p.add_argument("--trajectory", action="append", required=True)
    p.add_argument("--predictions", action="append", required=True)
    p.add_argument("--events", action="append", metavar="VIDEO=PATH")
    p.add_argument("--out", required=True, help="output directory")
    _add_config_flags(p)
    p.set_defaults(fn=cmd_simulate)

    p = sub.add_parser("report",
                       help="recompute totals from persisted frame outputs")
    p.add_argument("--dir", required=True)
    p.set_defaults(fn=cmd_report)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
