#!/usr/bin/env python3
"""End-to-end pipeline demo on generated fixtures.

Generates a synthetic dataset, then drives the CLI through every stage:
ground-truth convergence, schedule stabilization, session replay, the
strategy evaluation report, and the report audit.
"""

import subprocess
import sys
import tempfile
from pathlib import Path

REPO = Path(__file__).resolve().parents[1]


def run(*argv):
    print("+", " ".join(str(a) for a in argv))
    subprocess.run([str(a) for a in argv], check=True)


def main():
    workdir = Path(tempfile.mkdtemp(prefix="cvvp360-demo-"))
    data = workdir / "data"
    out = workdir / "out"
    cli = [sys.executable, "-m", "cvvp360.cli"]
    env_tunables = ["--fps", "5", "--t-min", "20", "--clip-len", "120"]

    run(sys.executable, REPO / "scripts" / "make_fixtures.py",
        "--out", data, "--videos", "2", "--seconds", "240", "--fps", "5")

    for video in ("synth0", "synth1"):
        run(*cli, "cvvp-gt", "--labels", data / f"labels_{video}.jsonl",
            "--out", out / f"gt_{video}.jsonl", *env_tunables)
        run(*cli, "stabilize", "--cvvp", data / f"pred_{video}.jsonl",
            "--out", out / f"schedule_{video}.jsonl", *env_tunables)
        run(*cli, "decide", "--schedule", out / f"schedule_{video}.jsonl",
            "--events", data / f"events_{video}.jsonl",
            "--out", out / f"modes_{video}.jsonl")

    simulate = [*cli, "simulate", "--out", out / "report", *env_tunables,
                "--seed", "0"]
    for video in ("synth0", "synth1"):
        simulate += ["--labels", data / f"labels_{video}.jsonl",
                     "--trajectory", data / f"trajectory_{video}.jsonl",
                     "--predictions", data / f"pred_{video}.jsonl",
                     "--events", f"{video}={data / f'events_{video}.jsonl'}"]
    run(*simulate)
    run(*cli, "report", "--dir", out / "report")
    print(f"\ndemo outputs under {workdir}")


if __name__ == "__main__":
    main()
