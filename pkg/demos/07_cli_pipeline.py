"""The full command-line pipeline, run in-process on a tiny budget.

Every stage is a subcommand.  Each one writes its outputs plus a
manifest.json recording the command, the resolved config, the input
and output paths, and the wall time.  Rerunning a stage with the same
arguments reproduces every output byte except the timing field.
"""

from __future__ import annotations

import os
import pathlib
import tempfile

from shotwright.cli import main

workdir = pathlib.Path(tempfile.mkdtemp(prefix="shotwright-demo-"))
os.chdir(workdir)
print(f"working in {workdir}")


def run(*argv: str) -> None:
    print(f"\n$ shotwright {' '.join(argv)}")
    code = main(list(argv))
    if code != 0:
        raise SystemExit(f"stage failed with exit code {code}")


run("synth-data", "--out", "data", "--scenes", "10", "--shots", "10",
    "--seed", "3", "--determinism", "0.9")
run("pretrain", "--dataset", "data/dataset.txt", "--out", "pre",
    "--epochs", "2", "--batch-size", "8", "--actor-lr", "1e-3")
run("train-rl", "--dataset", "data/dataset.txt", "--ckpt", "pre/checkpoint.txt",
    "--out", "rl", "--iterations", "2", "--batch-size", "8")
run("eval", "--dataset", "data/dataset.txt", "--ckpt", "rl/checkpoint.txt",
    "--out", "report", "--policy", "greedy", "--emit-csv")
run("broadcast-sim", "--out", "cast", "--style", "event_chaser",
    "--length", "80", "--seed", "1", "--clone-epochs", "4",
    "--aggregation-rounds", "1", "--rl-iterations", "1")

print("\nfiles produced:")
for path in sorted(workdir.rglob("*")):
    if path.is_file():
        print(f"  {path.relative_to(workdir)}")

print("\nthe eval stage's metric report:")
print((workdir / "report" / "report.txt").read_text(), end="")

print("\none manifest, as written (timing field varies run to run):")
print((workdir / "rl" / "manifest.json").read_text(), end="")
