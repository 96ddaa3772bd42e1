"""Regenerate the shipped problem suites under ``suites/``.

    python3 scripts/make_suites.py [--root suites]

The standard suite holds toy problems that have nontrivial landmarks; the
merged suite pairs problems of the standard suite at random (fixed seed).
"""
from __future__ import annotations

import argparse
import shutil
from pathlib import Path

from relscore import toys
from relscore.landmarks import extract_landmarks
from relscore.merge import generate_merged_suite
from relscore.pddl import load_task

STANDARD = [
    ("blocksworld", "bw-5-1", lambda: toys.blocksworld_problem(5, 1)),
    ("blocksworld", "bw-6-2", lambda: toys.blocksworld_problem(6, 2)),
    ("blocksworld", "bw-7-3", lambda: toys.blocksworld_problem(7, 3)),
    ("gripper", "gripper-4", lambda: toys.gripper_problem(4)),
    ("gripper", "gripper-6", lambda: toys.gripper_problem(6)),
    ("logistics", "log-2-2-3-0", lambda: toys.logistics_problem(2, 2, 3, 1, 0)),
    ("logistics", "log-2-2-4-1", lambda: toys.logistics_problem(2, 2, 4, 1, 1)),
    ("logistics", "log-3-2-4-2", lambda: toys.logistics_problem(3, 2, 4, 1, 2)),
    ("ferry", "ferry-3-3-0", lambda: toys.ferry_problem(3, 3, 0)),
    ("ferry", "ferry-4-4-1", lambda: toys.ferry_problem(4, 4, 1)),
]
MERGED_PAIRS = 20
MERGED_SEED = 2024


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--root", default=str(Path(__file__).resolve().parent.parent / "suites"))
    args = ap.parse_args()
    root = Path(args.root)
    std = root / "standard"
    merged = root / "merged"
    for d in (std, merged):
        if d.exists():
            shutil.rmtree(d)
    pool = []
    for dom, name, gen in STANDARD:
        ddir = std / dom
        ddir.mkdir(parents=True, exist_ok=True)
        (ddir / "domain.pddl").write_text(toys.DOMAINS[dom])
        (ddir / f"{name}.pddl").write_text(gen())
        task = load_task(ddir / "domain.pddl", ddir / f"{name}.pddl")
        n = len(extract_landmarks(task).nontrivial)
        if n == 0:
            raise SystemExit(f"{name} has no nontrivial landmarks")
        print(f"standard/{dom}/{name}: {task.summary()}, {n} nontrivial landmarks")
        pool.append((ddir / "domain.pddl", ddir / f"{name}.pddl"))
    for e in generate_merged_suite(pool, MERGED_PAIRS, MERGED_SEED, merged, relative_to=root.parent):
        print(f"merged/{e['problem']}: {e['sources'][0][1]} + {e['sources'][1][1]}")

if __name__ == "__main__":
    main()
