"""Suite runs in isolated worker processes, and S1/S2 comparison reports.

A suite directory holds problem files ``X.pddl``; the domain of ``X.pddl``
is ``X-domain.pddl`` when present, else ``domain.pddl`` in the same folder.
Files whose name contains ``domain`` are never problems. Subfolders are
searched recursively and problem ids are paths relative to the suite root,
without the ``.pddl`` suffix.
"""
from __future__ import annotations

import csv
import json
import logging
import math
import os
import resource
import statistics
import subprocess
import sys
from concurrent.futures import ThreadPoolExecutor, as_completed
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path
from typing import Iterable, Optional, Sequence

log = logging.getLogger(__name__)

COLUMNS = [
    "problem", "heuristic", "status", "search_time_s", "explore_time_s", "expansions",
    "plan_length", "peak_mem_mb", "seed", "weight", "rho",
]
TIME_FLOOR = 1e-6
COUNT_FLOOR = 1


@dataclass(frozen=True)
class BenchConfig:
    heuristics: tuple[str, ...] = ("relevance", "lmcount")
    weight: int = 10
    rho: float = 0.2
    min_nodes: int = 100_000
    max_nodes: int = 2_000_000
    seed: int = 0
    time_limit: float = 120.0
    mem_limit_mb: float = 1024.0
    jobs: int = 1


@dataclass(frozen=True)
class RunRecord:
    problem: str
    heuristic: str
    status: str
    search_time_s: float
    explore_time_s: float
    expansions: int
    plan_length: int
    peak_mem_mb: float
    seed: int
    weight: int
    rho: float

    @property
    def solved(self) -> bool:
        return self.status == "solved"

    def row(self) -> dict:
        d = asdict(self)
        d["search_time_s"] = f"{self.search_time_s:.6f}"
        d["explore_time_s"] = f"{self.explore_time_s:.6f}"
        d["peak_mem_mb"] = f"{self.peak_mem_mb:.1f}"
        return d

    @classmethod
    def from_row(cls, row: dict) -> "RunRecord":
        conv = {f.name: f.type for f in fields(cls)}
        out = {}
        for k in COLUMNS:
            v = row[k]
            t = conv[k]
            out[k] = int(float(v)) if t == "int" else float(v) if t == "float" else v
        return cls(**out)


def discover_suite(suite_dir) -> list[tuple[str, Path, Path]]:
    root = Path(suite_dir)
    if not root.is_dir():
        raise FileNotFoundError(f"suite directory {root} does not exist")
    out = []
    for p in sorted(root.rglob("*.pddl")):
        if "domain" in p.name:
            continue
        dom = p.with_name(p.stem + "-domain.pddl")
        if not dom.exists():
            dom = p.with_name("domain.pddl")
        if not dom.exists():
            log.warning("no domain file for %s, skipped", p)
            continue
        pid = str(p.relative_to(root).with_suffix(""))
        out.append((pid, dom, p))
    return out


def _limit_memory(mb: float):
    def apply():
        # backstop only; the search checks its own peak RSS against the limit
        cap = int((mb + 768) * 1024 * 1024)
        resource.setrlimit(resource.RLIMIT_AS, (cap, cap))
    return apply


def run_one(pid: str, domain: Path, problem: Path, heuristic: str, cfg: BenchConfig) -> RunRecord:
    cmd = [
        sys.executable, "-m", "relscore", "plan",
        "--domain", str(domain), "--problem", str(problem),
        "--heuristic", heuristic, "--weight", str(cfg.weight),
        "--time-limit", str(cfg.time_limit), "--mem-limit", str(cfg.mem_limit_mb),
        "--seed", str(cfg.seed), "--rho", str(cfg.rho),
        "--min-nodes", str(cfg.min_nodes), "--max-nodes", str(cfg.max_nodes), "--json",
    ]
    env = dict(os.environ, OMP_NUM_THREADS="1", OPENBLAS_NUM_THREADS="1")
    base = dict(problem=pid, heuristic=heuristic, seed=cfg.seed, weight=cfg.weight, rho=cfg.rho)
    try:
        proc = subprocess.run(
            cmd, capture_output=True, text=True, env=env,
            timeout=2 * cfg.time_limit + 60, preexec_fn=_limit_memory(cfg.mem_limit_mb),
        )
    except subprocess.TimeoutExpired:
        return RunRecord(status="out_of_time", search_time_s=cfg.time_limit, explore_time_s=0.0,
                         expansions=0, plan_length=0, peak_mem_mb=0.0, **base)
    try:
        data = json.loads(proc.stdout.strip().splitlines()[-1])
    except (IndexError, json.JSONDecodeError):
        err = proc.stderr.strip().splitlines()
        status = "out_of_memory" if "MemoryError" in proc.stderr else "error"
        log.warning("%s/%s: worker failed (%s)", pid, heuristic, err[-1] if err else proc.returncode)
        return RunRecord(status=status, search_time_s=0.0, explore_time_s=0.0,
                         expansions=0, plan_length=0, peak_mem_mb=0.0, **base)
    return RunRecord(
        status=data["status"],
        search_time_s=float(data["search_time_s"]),
        explore_time_s=float(data["explore_time_s"]),
        expansions=int(data["expansions"]),
        plan_length=int(data["plan_length"]),
        peak_mem_mb=float(data["peak_mem_mb"]),
        **base,
    )


def read_results(path) -> list[RunRecord]:
    p = Path(path)
    if not p.exists():
        return []
    with p.open(newline="") as fh:
        return [RunRecord.from_row(r) for r in csv.DictReader(fh)]


def run_suite(suite_dir, cfg: BenchConfig, out_csv) -> list[RunRecord]:
    """Run every (problem, heuristic) pair missing from ``out_csv``; returns all records."""
    problems = discover_suite(suite_dir)
    out = Path(out_csv)
    done = read_results(out)
    have = {(r.problem, r.heuristic) for r in done}
    jobs = [(pid, d, p, h) for pid, d, p in problems for h in cfg.heuristics if (pid, h) not in have]
    log.info("%d runs to do, %d already in %s", len(jobs), len(have), out)
    new_file = not out.exists() or out.stat().st_size == 0
    out.parent.mkdir(parents=True, exist_ok=True)
    with out.open("a", newline="") as fh, ThreadPoolExecutor(max_workers=max(1, cfg.jobs)) as pool:
        w = csv.DictWriter(fh, fieldnames=COLUMNS)
        if new_file:
            w.writeheader()
        futs = {pool.submit(run_one, pid, d, p, h, cfg): (pid, h) for pid, d, p, h in jobs}
        fresh = []
        for fut in as_completed(futs):
            rec = fut.result()
            w.writerow(rec.row())
            fh.flush()
            fresh.append(rec)
            log.info("%s %s: %s (%d expansions)", rec.problem, rec.heuristic, rec.status, rec.expansions)
    keys = [(pid, h) for pid, _, _ in problems for h in cfg.heuristics]
    order = {k: i for i, k in enumerate(keys)}
    allrec = done + fresh
    allrec.sort(key=lambda r: order.get((r.problem, r.heuristic), len(order)))
    return allrec


# ----------------------------------------------------------------- reports


@dataclass
class RatioStat:
    mean: Optional[float]
    stddev: Optional[float]
    n: int

    def text(self) -> str:
        if self.mean is None:
            return "N/A"
        if abs(self.mean) < 0.01:
            return f"{self.mean:.2e} ± {self.stddev:.2e}"
        return f"{self.mean:.2f} ± {self.stddev:.2f}"


@dataclass
class ComparisonReport:
    s1: str
    s2: str
    suite_size: int
    solved_s1: int
    solved_s2: int
    s1_only: int
    s2_only: int
    both: int
    neither: int
    time_ratio: RatioStat
    expansions_ratio: RatioStat
    length_ratio: RatioStat
    median_expansions: dict = field(default_factory=dict)  # heuristic -> median over both-solved
    meta: dict = field(default_factory=dict)

    def to_csv(self) -> str:
        rows = [["metric", "value"]]
        for k in ("suite_size", "solved_s1", "solved_s2", "s1_only", "s2_only", "both", "neither"):
            rows.append([k, str(getattr(self, k))])
        for k in ("time_ratio", "expansions_ratio", "length_ratio"):
            st = getattr(self, k)
            rows.append([f"{k}_mean", "N/A" if st.mean is None else f"{st.mean:.6g}"])
            rows.append([f"{k}_stddev", "N/A" if st.stddev is None else f"{st.stddev:.6g}"])
            rows.append([f"{k}_n", str(st.n)])
        for h, m in self.median_expansions.items():
            rows.append([f"median_expansions_{h}", "N/A" if m is None else f"{m:g}"])
        return "\n".join(",".join(r) for r in rows) + "\n"

    def to_markdown(self) -> str:
        a, b = self.s1, self.s2
        lines = [
            f"| problems | solved by {a} | solved by {b} | {a} only | {b} only | both | neither |",
            "|---|---|---|---|---|---|---|",
            f"| {self.suite_size} | {self.solved_s1} | {self.solved_s2} | {self.s1_only} | "
            f"{self.s2_only} | {self.both} | {self.neither} |",
            "",
            f"| ratio {a}/{b} (both solved) | mean ± stddev | n |",
            "|---|---|---|",
            f"| search time | {self.time_ratio.text()} | {self.time_ratio.n} |",
            f"| expansions | {self.expansions_ratio.text()} | {self.expansions_ratio.n} |",
            f"| plan length | {self.length_ratio.text()} | {self.length_ratio.n} |",
            "",
        ]
        for h, m in self.median_expansions.items():
            lines.append(f"median expansions ({h}, both solved): {'N/A' if m is None else f'{m:g}'}")
        for k, v in self.meta.items():
            lines.append(f"- {k}: {v}")
        return "\n".join(lines) + "\n"


def ratio_stat(pairs: Sequence[tuple[float, float]], floor: float, ddof: int = 1) -> RatioStat:
    """Mean and standard deviation of ``a / b`` with both sides floored."""
    if not pairs:
        return RatioStat(None, None, 0)
    rs = [max(a, floor) / max(b, floor) for a, b in pairs]
    mean = statistics.fmean(rs)
    if len(rs) > ddof:
        sd = math.sqrt(sum((r - mean) ** 2 for r in rs) / (len(rs) - ddof))
    else:
        sd = 0.0
    return RatioStat(mean, sd, len(rs))


def compare(records: Iterable[RunRecord], s1: str = "relevance", s2: str = "lmcount",
            ddof: int = 1) -> ComparisonReport:
    by = {}
    problems = []
    for r in records:
        if r.heuristic not in (s1, s2):
            continue
        if r.problem not in problems:
            problems.append(r.problem)
        by[(r.problem, r.heuristic)] = r
    ok1 = {p for p in problems if (p, s1) in by and by[(p, s1)].solved}
    ok2 = {p for p in problems if (p, s2) in by and by[(p, s2)].solved}
    both = [p for p in problems if p in ok1 and p in ok2]
    pairs = [(by[(p, s1)], by[(p, s2)]) for p in both]
    med = {}
    for h, idx in ((s1, 0), (s2, 1)):
        med[h] = statistics.median(x[idx].expansions for x in pairs) if pairs else None
    return ComparisonReport(
        s1=s1, s2=s2, suite_size=len(problems),
        solved_s1=len(ok1), solved_s2=len(ok2),
        s1_only=len(ok1 - ok2), s2_only=len(ok2 - ok1), both=len(both),
        neither=len([p for p in problems if p not in ok1 and p not in ok2]),
        time_ratio=ratio_stat([(a.search_time_s, b.search_time_s) for a, b in pairs], TIME_FLOOR, ddof),
        expansions_ratio=ratio_stat([(a.expansions, b.expansions) for a, b in pairs], COUNT_FLOOR, ddof),
        length_ratio=ratio_stat([(a.plan_length, b.plan_length) for a, b in pairs], COUNT_FLOOR, ddof),
        median_expansions=med,
        meta={
            "stddev": "sample (n-1)" if ddof == 1 else "population (n)",
            "expansions": "pops of non-goal nodes",
            "search time": "excludes parsing, grounding and tree exploration",
            "lmcount": "no landmark orderings or preferred operators",
        },
    )
