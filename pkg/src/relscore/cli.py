"""Command-line interface: ``relscore <command> ...``.

Exit codes: 0 solved / ok, 1 unsolvable, 2 resource limit, 3 input error.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from .pddl import GroundingError, PDDLError, heuristic_task, load_task

EXIT_OK, EXIT_UNSOLVABLE, EXIT_LIMIT, EXIT_INPUT = 0, 1, 2, 3


def _explore_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--rho", type=float, default=0.2, help="stop when frontier/total xi mass <= rho")
    p.add_argument("--min-nodes", type=int, default=100_000)
    p.add_argument("--max-nodes", type=int, default=2_000_000)
    p.add_argument("--seed", type=int, default=0)


def _task_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--domain", required=True)
    p.add_argument("--problem", required=True)


def _explore_cfg(args):
    from .explorer import ExploreConfig

    min_nodes = min(args.min_nodes, args.max_nodes)
    return ExploreConfig(rho=args.rho, min_nodes=min_nodes, max_nodes=args.max_nodes, seed=args.seed)


def cmd_plan(args) -> int:
    from .planner import PlanConfig, plan_task
    from .search import SearchLimits, validate_plan

    task = load_task(args.domain, args.problem)
    cfg = PlanConfig(
        heuristic=args.heuristic, weight=args.weight, explore=_explore_cfg(args),
        limits=SearchLimits(time_limit=args.time_limit, mem_limit_mb=args.mem_limit),
    )
    try:
        run = plan_task(task, cfg)
    except MemoryError:
        out = {"status": "out_of_memory", "search_time_s": 0.0, "explore_time_s": 0.0, "expansions": 0,
               "plan_length": 0, "peak_mem_mb": args.mem_limit, "plan": []}
        print(json.dumps(out) if args.json else "out_of_memory")
        return EXIT_LIMIT
    res = run.result
    if res.solved and not validate_plan(task, res.plan):
        raise AssertionError("search returned an invalid plan")
    if args.dump_tree and run.tree is not None:
        Path(args.dump_tree).write_text(run.tree.dump())
    if args.dump_relevance and run.table is not None:
        Path(args.dump_relevance).write_text(run.table.dump())
    if args.out and res.solved:
        Path(args.out).write_text(res.plan_text())
    info = {
        "status": res.status,
        "search_time_s": res.search_time,
        "explore_time_s": run.explore_time,
        "expansions": res.expansions,
        "generated": res.generated,
        "evaluations": res.evaluations,
        "plan_length": res.plan_length,
        "peak_mem_mb": res.peak_memory / (1024 * 1024),
        "seed": args.seed,
        "heuristic": args.heuristic,
        "tree_nodes": len(run.tree) if run.tree is not None else 0,
        "plan": res.plan_text().splitlines(),
    }
    if args.json:
        print(json.dumps(info))
    else:
        if res.solved:
            sys.stdout.write(res.plan_text())
        print(f"; status {res.status}, {res.expansions} expansions, plan length {res.plan_length}, "
              f"search {res.search_time:.3f}s, preprocessing {run.explore_time:.3f}s")
    return {"solved": EXIT_OK, "unsolvable": EXIT_UNSOLVABLE}.get(res.status, EXIT_LIMIT)


def _full_tree(args):
    from .explorer import explore_fully

    task = heuristic_task(load_task(args.domain, args.problem))
    return explore_fully(task, max_nodes=args.max_nodes, seed=args.seed)


def cmd_oracle(args) -> int:
    from . import oracle
    from .rng import Rng

    tree = _full_tree(args)
    fact = tree.task.fact_id(args.fact)
    if args.exact:
        val = oracle.enumerate_relevance(tree, fact)
        print(f"{tree.task.facts[fact]} exact {val} = {float(val):.12g}")
    else:
        rng = Rng(args.seed)
        if args.verbose:
            freq = oracle.subtree_frequencies(tree, args.samples, rng)
            hits = 0
            for nodes, c in sorted(freq.items(), key=lambda kv: (-kv[1], sorted(kv[0]))):
                has = any(tree.kind[n] == 0 and tree.label[n] == fact for n in nodes)
                hits += c if has else 0
                labels = sorted({tree.label_str(n) for n in nodes if tree.kind[n] == 0})
                print(f"{c / args.samples:.5f} {'*' if has else ' '} {' '.join(labels)}")
            est = hits / args.samples
        else:
            est = oracle.estimate_relevance(tree, fact, args.samples, rng)
        print(f"{tree.task.facts[fact]} estimate {est:.6f} ({args.samples} samples)")
    return EXIT_OK


def cmd_score(args) -> int:
    from .explorer import explore
    from .relevance import RelevanceTable

    task = heuristic_task(load_task(args.domain, args.problem))
    tree = explore(task, _explore_cfg(args))
    table = RelevanceTable(tree)
    d = table.decomposition(args.fact)
    d["tree"] = tree.meta
    if args.json:
        print(json.dumps(d, indent=2))
        return EXIT_OK
    print(f"Xi{d['fact']} = {d['xi']:.12g}  ({tree.meta['nodes']} nodes, ratio {tree.meta['ratio']:.4f})")
    for t in d["flcas"]:
        print(f"  fLCA node {t['node']}: xi {t['xi']:.6g}")
    for t in d["alcas"]:
        print(f"  aLCA node {t['node']} {t['label']}: xi {t['xi']:.6g} x local {t['local']:.6g}")
    return EXIT_OK


def cmd_landmarks(args) -> int:
    from .landmarks import extract_landmarks, landmark_report

    task = load_task(args.domain, args.problem)
    lms = extract_landmarks(task)
    print(landmark_report(heuristic_task(task), lms))
    return EXIT_OK


def cmd_merge(args) -> int:
    from .merge import merge_files, write_merged

    labels = tuple(x.strip() for x in args.labels.split(","))
    spec = merge_files(args.domain1, args.problem1, args.domain2, args.problem2, labels=labels, seed=args.seed)
    for p in write_merged(spec, args.out_dir):
        print(p)
    return EXIT_OK


def cmd_bench(args) -> int:
    from .bench import BenchConfig, compare, run_suite

    cfg = BenchConfig(
        heuristics=tuple(h.strip() for h in args.heuristics.split(",")),
        weight=args.weight, rho=args.rho, min_nodes=args.min_nodes, max_nodes=args.max_nodes,
        seed=args.seed, time_limit=args.time_limit, mem_limit_mb=args.mem_limit, jobs=args.jobs,
    )
    recs = run_suite(args.suite, cfg, args.out)
    if len(cfg.heuristics) >= 2:
        print(compare(recs, cfg.heuristics[0], cfg.heuristics[1]).to_markdown())
    return EXIT_OK


def cmd_compare(args) -> int:
    from .bench import compare, read_results

    recs = read_results(args.results)
    if not recs:
        print(f"no records in {args.results}", file=sys.stderr)
        return EXIT_INPUT
    rep = compare(recs, args.s1, args.s2, ddof=0 if args.population else 1)
    if args.csv:
        Path(args.csv).write_text(rep.to_csv())
    print(rep.to_markdown())
    return EXIT_OK


def cmd_validate(args) -> int:
    from .search import parse_plan, validate_plan

    task = load_task(args.domain, args.problem, prune=False)
    plan = parse_plan(task, Path(args.plan).read_text())
    ok = validate_plan(task, plan)
    print("valid" if ok else "invalid")
    return EXIT_OK if ok else EXIT_UNSOLVABLE


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="relscore", description="Relevance-score planning toolkit")
    ap.add_argument("-v", "--verbose-log", action="store_true", help="log progress to stderr")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("plan", help="weighted A* on a PDDL task")
    _task_args(p)
    p.add_argument("--heuristic", choices=["relevance", "lmcount", "blind"], default="relevance")
    p.add_argument("--weight", type=int, default=10)
    p.add_argument("--time-limit", type=float, default=300.0)
    p.add_argument("--mem-limit", type=float, default=8192.0, help="MiB")
    p.add_argument("--out", help="write the plan here")
    p.add_argument("--json", action="store_true")
    p.add_argument("--dump-tree")
    p.add_argument("--dump-relevance")
    _explore_args(p)
    p.set_defaults(func=cmd_plan)

    p = sub.add_parser("oracle", help="Monte-Carlo or exact relevance of one fact")
    _task_args(p)
    p.add_argument("--fact", required=True)
    g = p.add_mutually_exclusive_group()
    g.add_argument("--samples", type=int, default=100_000)
    g.add_argument("--exact", action="store_true")
    p.add_argument("--verbose", action="store_true", help="print the subtree frequency table")
    _explore_args(p)
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("score", help="relevance of one fact and its decomposition")
    _task_args(p)
    p.add_argument("--fact", required=True)
    p.add_argument("--json", action="store_true")
    _explore_args(p)
    p.set_defaults(func=cmd_score)

    p = sub.add_parser("landmarks", help="relaxed fact landmarks")
    _task_args(p)
    p.set_defaults(func=cmd_landmarks)

    p = sub.add_parser("merge", help="landmark-free merge of two problems")
    p.add_argument("--domain1", required=True)
    p.add_argument("--problem1", required=True)
    p.add_argument("--domain2", required=True)
    p.add_argument("--problem2", required=True)
    p.add_argument("--out-dir", required=True)
    p.add_argument("--labels", default="p1,p2")
    p.add_argument("--seed", type=int, default=None)
    p.set_defaults(func=cmd_merge)

    p = sub.add_parser("bench", help="run a suite")
    p.add_argument("--suite", required=True)
    p.add_argument("--heuristics", default="relevance,lmcount")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--weight", type=int, default=10)
    p.add_argument("--time-limit", type=float, default=120.0)
    p.add_argument("--mem-limit", type=float, default=1024.0, help="MiB")
    p.add_argument("--out", required=True)
    _explore_args(p)
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("compare", help="report from a results CSV")
    p.add_argument("--results", required=True)
    p.add_argument("--s1", default="relevance")
    p.add_argument("--s2", default="lmcount")
    p.add_argument("--csv", help="also write the report as CSV")
    p.add_argument("--population", action="store_true", help="population instead of sample stddev")
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("validate", help="check a plan file against a task")
    _task_args(p)
    p.add_argument("--plan", required=True)
    p.set_defaults(func=cmd_validate)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose_log else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (PDDLError, GroundingError, FileNotFoundError, KeyError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except RuntimeError as exc:
        # oracle on a tree that is too large
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_LIMIT


if __name__ == "__main__":
    sys.exit(main())
