"""End-to-end planning: load, build a heuristic, search."""
from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Optional

from .explorer import ExploreConfig, explore
from .landmarks import LandmarkCountHeuristic, extract_landmarks
from .pddl import heuristic_task, load_task
from .pddl.task import Task
from .relevance import RelevanceHeuristic, RelevanceTable
from .search import BlindHeuristic, PlanResult, SearchLimits, weighted_astar

HEURISTICS = ("relevance", "lmcount", "blind")


@dataclass
class PlanConfig:
    heuristic: str = "relevance"
    weight: int = 10
    explore: ExploreConfig = field(default_factory=ExploreConfig)
    limits: SearchLimits = field(default_factory=SearchLimits)


@dataclass
class PlanRun:
    task: Task
    result: PlanResult
    explore_time: float
    tree: object = None
    table: Optional[RelevanceTable] = None
    landmarks: object = None


def build_heuristic(task: Task, cfg: PlanConfig):
    """Returns ``(heuristic, preprocessing seconds, tree, table, landmarks)``."""
    t0 = time.perf_counter()
    if cfg.heuristic == "relevance":
        tree = explore(heuristic_task(task), cfg.explore)
        table = RelevanceTable(tree)
        return RelevanceHeuristic(table), time.perf_counter() - t0, tree, table, None
    if cfg.heuristic == "lmcount":
        lms = extract_landmarks(task)
        return LandmarkCountHeuristic(task, lms), time.perf_counter() - t0, None, None, lms
    if cfg.heuristic == "blind":
        return BlindHeuristic(task), 0.0, None, None, None
    raise ValueError(f"unknown heuristic {cfg.heuristic!r}; choose from {', '.join(HEURISTICS)}")


def plan_task(task: Task, cfg: PlanConfig) -> PlanRun:
    h, prep, tree, table, lms = build_heuristic(task, cfg)
    res = weighted_astar(task, h, cfg.weight, cfg.limits, seed=cfg.explore.seed)
    return PlanRun(task, res, prep, tree, table, lms)


def plan_files(domain, problem, cfg: PlanConfig) -> PlanRun:
    return plan_task(load_task(domain, problem), cfg)
