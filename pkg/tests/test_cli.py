import json
import subprocess
import sys

import pytest

from relscore import toys
from relscore.cli import main

FAST = ["--min-nodes", "200", "--max-nodes", "20000"]


@pytest.fixture
def gripper(tmp_path):
    d = tmp_path / "domain.pddl"
    p = tmp_path / "p.pddl"
    d.write_text(toys.GRIPPER)
    p.write_text(toys.gripper_problem(2))
    return d, p


def _plan(d, p, *extra):
    return ["plan", "--domain", str(d), "--problem", str(p), *FAST, *extra]


def test_plan_writes_valid_plan(gripper, tmp_path, capsys):
    d, p = gripper
    out = tmp_path / "plan.txt"
    assert main(_plan(d, p, "--out", str(out))) == 0
    assert "; status solved" in capsys.readouterr().out
    assert main(["validate", "--domain", str(d), "--problem", str(p), "--plan", str(out)]) == 0
    out.write_text("(move rooma roomb)\n(move rooma roomb)\n")
    assert main(["validate", "--domain", str(d), "--problem", str(p), "--plan", str(out)]) == 1


def test_plan_json(gripper, capsys):
    d, p = gripper
    assert main(_plan(d, p, "--json", "--heuristic", "lmcount")) == 0
    info = json.loads(capsys.readouterr().out)
    assert info["status"] == "solved" and info["plan_length"] == len(info["plan"])


def test_exit_codes(gripper, tmp_path, capsys):
    d, p = gripper
    assert main(["plan", "--domain", str(tmp_path / "nope.pddl"), "--problem", str(p)]) == 3
    bad = tmp_path / "bad.pddl"
    bad.write_text("(define (problem x) (:domain gripper")
    assert main(["plan", "--domain", str(d), "--problem", str(bad)]) == 3
    stuck = tmp_path / "stuck.pddl"
    stuck.write_text("(define (problem s) (:domain gripper) (:objects r - room b - ball g - gripper)"
                     " (:init (at-robby r)) (:goal (at b r)))")
    assert main(["plan", "--domain", str(d), "--problem", str(stuck)]) == 1
    big = tmp_path / "big.pddl"
    big.write_text(toys.gripper_problem(12))
    assert main(_plan(d, big, "--heuristic", "blind", "--weight", "1", "--time-limit", "0.05")) == 2
    capsys.readouterr()


def test_plan_is_deterministic(gripper, tmp_path, capsys):
    d, p = gripper
    outs = []
    for k in range(2):
        tree, rel = tmp_path / f"t{k}", tmp_path / f"r{k}"
        assert main(_plan(d, p, "--json", "--seed", "3", "--dump-tree", str(tree), "--dump-relevance", str(rel))) == 0
        info = json.loads(capsys.readouterr().out)
        outs.append((info["plan"], info["expansions"], tree.read_bytes(), rel.read_bytes()))
    assert outs[0] == outs[1]


def test_oracle_and_score(example_paths, capsys):
    d, p = example_paths
    assert main(["oracle", "--domain", str(d), "--problem", str(p), "--fact", "(p2)", "--exact"]) == 0
    assert "exact 2/3" in capsys.readouterr().out
    assert main(["oracle", "--domain", str(d), "--problem", str(p), "--fact", "(p2)", "--samples", "2000",
                 "--verbose"]) == 0
    assert "estimate" in capsys.readouterr().out
    assert main(["score", "--domain", str(d), "--problem", str(p), "--fact", "(p2)", "--json"]) == 0
    assert json.loads(capsys.readouterr().out)["xi"] == pytest.approx(2 / 3)
    assert main(["score", "--domain", str(d), "--problem", str(p), "--fact", "(nope)"]) == 3


def test_landmarks_and_merge(gripper, tmp_path, capsys):
    d, p = gripper
    assert main(["landmarks", "--domain", str(d), "--problem", str(p)]) == 0
    assert capsys.readouterr().out.strip()
    assert main(["merge", "--domain1", str(d), "--problem1", str(p), "--domain2", str(d), "--problem2", str(p),
                 "--out-dir", str(tmp_path / "m")]) == 0
    md, mp = tmp_path / "m" / "merged-domain.pddl", tmp_path / "m" / "merged-problem.pddl"
    capsys.readouterr()
    assert main(_plan(md, mp)) == 0


def test_compare_cli(tmp_path, capsys):
    res = tmp_path / "r.csv"
    assert main(["compare", "--results", str(res)]) == 3
    res.write_text(
        "problem,heuristic,status,search_time_s,explore_time_s,expansions,plan_length,peak_mem_mb,seed,weight,rho\n"
        "a,relevance,solved,2,0,2,1,1,0,10,0.2\na,lmcount,solved,1,0,1,1,1,0,10,0.2\n"
        "b,relevance,solved,4,0,4,1,1,0,10,0.2\nb,lmcount,solved,1,0,1,1,1,0,10,0.2\n"
    )
    assert main(["compare", "--results", str(res), "--population", "--csv", str(tmp_path / "c.csv")]) == 0
    assert "3.00 ± 1.00" in capsys.readouterr().out
    assert "expansions_ratio_stddev,1" in (tmp_path / "c.csv").read_text()


def test_module_entry_point():
    out = subprocess.run([sys.executable, "-m", "relscore", "--help"], capture_output=True, text=True)
    assert out.returncode == 0 and "plan" in out.stdout
