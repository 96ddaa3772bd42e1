"""Toy STRIPS domains and seeded problem generators (PDDL text)."""
from __future__ import annotations

import random

BLOCKSWORLD = """\
(define (domain blocksworld)
  (:requirements :strips)
  (:predicates (on ?x ?y) (ontable ?x) (clear ?x) (handempty) (holding ?x))
  (:action pick-up
    :parameters (?x)
    :precondition (and (clear ?x) (ontable ?x) (handempty))
    :effect (and (not (ontable ?x)) (not (clear ?x)) (not (handempty)) (holding ?x)))
  (:action put-down
    :parameters (?x)
    :precondition (holding ?x)
    :effect (and (not (holding ?x)) (clear ?x) (handempty) (ontable ?x)))
  (:action stack
    :parameters (?x ?y)
    :precondition (and (holding ?x) (clear ?y))
    :effect (and (not (holding ?x)) (not (clear ?y)) (clear ?x) (handempty) (on ?x ?y)))
  (:action unstack
    :parameters (?x ?y)
    :precondition (and (on ?x ?y) (clear ?x) (handempty))
    :effect (and (holding ?x) (clear ?y) (not (clear ?x)) (not (handempty)) (not (on ?x ?y)))))
"""

GRIPPER = """\
(define (domain gripper)
  (:requirements :strips :typing)
  (:types room ball gripper)
  (:predicates (at-robby ?r - room) (at ?b - ball ?r - room) (free ?g - gripper)
               (carry ?b - ball ?g - gripper))
  (:action move
    :parameters (?from ?to - room)
    :precondition (at-robby ?from)
    :effect (and (at-robby ?to) (not (at-robby ?from))))
  (:action pick
    :parameters (?b - ball ?r - room ?g - gripper)
    :precondition (and (at ?b ?r) (at-robby ?r) (free ?g))
    :effect (and (carry ?b ?g) (not (at ?b ?r)) (not (free ?g))))
  (:action drop
    :parameters (?b - ball ?r - room ?g - gripper)
    :precondition (and (carry ?b ?g) (at-robby ?r))
    :effect (and (at ?b ?r) (free ?g) (not (carry ?b ?g)))))
"""

LOGISTICS = """\
(define (domain logistics)
  (:requirements :strips :typing)
  (:types truck airplane - vehicle
          package vehicle - physobj
          airport - location
          location city)
  (:predicates (in-city ?l - location ?c - city) (at ?o - physobj ?l - location)
               (in ?p - package ?v - vehicle))
  (:action load-truck
    :parameters (?p - package ?t - truck ?l - location)
    :precondition (and (at ?t ?l) (at ?p ?l))
    :effect (and (not (at ?p ?l)) (in ?p ?t)))
  (:action unload-truck
    :parameters (?p - package ?t - truck ?l - location)
    :precondition (and (at ?t ?l) (in ?p ?t))
    :effect (and (not (in ?p ?t)) (at ?p ?l)))
  (:action load-airplane
    :parameters (?p - package ?a - airplane ?l - airport)
    :precondition (and (at ?p ?l) (at ?a ?l))
    :effect (and (not (at ?p ?l)) (in ?p ?a)))
  (:action unload-airplane
    :parameters (?p - package ?a - airplane ?l - airport)
    :precondition (and (in ?p ?a) (at ?a ?l))
    :effect (and (not (in ?p ?a)) (at ?p ?l)))
  (:action drive-truck
    :parameters (?t - truck ?from ?to - location ?c - city)
    :precondition (and (at ?t ?from) (in-city ?from ?c) (in-city ?to ?c))
    :effect (and (not (at ?t ?from)) (at ?t ?to)))
  (:action fly-airplane
    :parameters (?a - airplane ?from ?to - airport)
    :precondition (at ?a ?from)
    :effect (and (not (at ?a ?from)) (at ?a ?to))))
"""

FERRY = """\
(define (domain ferry)
  (:requirements :strips :equality :negative-preconditions)
  (:predicates (car ?c) (location ?l) (at-ferry ?l) (at ?c ?l) (empty-ferry) (on ?c))
  (:action sail
    :parameters (?from ?to)
    :precondition (and (location ?from) (location ?to) (at-ferry ?from) (not (= ?from ?to)))
    :effect (and (at-ferry ?to) (not (at-ferry ?from))))
  (:action board
    :parameters (?c ?l)
    :precondition (and (car ?c) (location ?l) (at ?c ?l) (at-ferry ?l) (empty-ferry))
    :effect (and (on ?c) (not (at ?c ?l)) (not (empty-ferry))))
  (:action debark
    :parameters (?c ?l)
    :precondition (and (car ?c) (location ?l) (on ?c) (at-ferry ?l) (not (empty-ferry)))
    :effect (and (at ?c ?l) (empty-ferry) (not (on ?c)))))
"""

DOMAINS = {"blocksworld": BLOCKSWORLD, "gripper": GRIPPER, "logistics": LOGISTICS, "ferry": FERRY}


def _problem(name: str, domain: str, objects: str, init: list[str], goal: list[str]) -> str:
    lines = [f"(define (problem {name})", f"  (:domain {domain})", f"  (:objects {objects})", "  (:init"]
    lines += [f"    {x}" for x in init]
    lines.append("  )")
    lines.append("  (:goal (and " + " ".join(goal) + "))")
    lines.append(")")
    return "\n".join(lines) + "\n"


def _towers(r: random.Random, blocks: list[str]) -> list[list[str]]:
    order = blocks[:]
    r.shuffle(order)
    towers: list[list[str]] = []
    for b in order:
        if towers and r.random() < 0.6:
            r.choice(towers).append(b)
        else:
            towers.append([b])
    return towers


def blocksworld_problem(n: int, seed: int) -> str:
    r = random.Random(seed)
    blocks = [f"b{i}" for i in range(n)]
    init = ["(handempty)"]
    for t in _towers(r, blocks):
        init.append(f"(ontable {t[0]})")
        init += [f"(on {t[i]} {t[i - 1]})" for i in range(1, len(t))]
        init.append(f"(clear {t[-1]})")
    goal = []
    for t in _towers(r, blocks):
        goal += [f"(on {t[i]} {t[i - 1]})" for i in range(1, len(t))]
    if not goal:
        goal = [f"(on {blocks[1]} {blocks[0]})"]
    return _problem(f"bw-{n}-{seed}", "blocksworld", " ".join(blocks), init, goal)


def gripper_problem(n_balls: int, seed: int = 0) -> str:
    balls = [f"ball{i}" for i in range(n_balls)]
    objs = f"rooma roomb - room left right - gripper {' '.join(balls)} - ball"
    init = ["(at-robby rooma)", "(free left)", "(free right)"] + [f"(at {b} rooma)" for b in balls]
    goal = [f"(at {b} roomb)" for b in balls]
    return _problem(f"gripper-{n_balls}", "gripper", objs, init, goal)


def logistics_problem(cities: int, locs: int, packages: int, airplanes: int, seed: int) -> str:
    r = random.Random(seed)
    cs = [f"c{i}" for i in range(cities)]
    places = {c: [f"{c}-ap"] + [f"{c}-l{j}" for j in range(1, locs)] for c in cs}
    trucks = [f"t{i}" for i in range(cities)]
    planes = [f"a{i}" for i in range(airplanes)]
    pkgs = [f"p{i}" for i in range(packages)]
    all_locs = [l for c in cs for l in places[c]]
    objs = " ".join(
        [" ".join(cs) + " - city", " ".join(places[c][0] for c in cs) + " - airport"]
        + ([" ".join(l for c in cs for l in places[c][1:]) + " - location"] if locs > 1 else [])
        + [" ".join(trucks) + " - truck"]
        + ([" ".join(planes) + " - airplane"] if planes else [])
        + [" ".join(pkgs) + " - package"]
    )
    init = [f"(in-city {l} {c})" for c in cs for l in places[c]]
    init += [f"(at {t} {r.choice(places[c])})" for t, c in zip(trucks, cs)]
    init += [f"(at {a} {r.choice(cs)}-ap)" for a in planes]
    goal = []
    for p in pkgs:
        src, dst = r.sample(all_locs, 2)
        init.append(f"(at {p} {src})")
        goal.append(f"(at {p} {dst})")
    return _problem(f"log-{cities}-{locs}-{packages}-{seed}", "logistics", objs, init, goal)


def ferry_problem(n_locs: int, n_cars: int, seed: int) -> str:
    r = random.Random(seed)
    ls = [f"l{i}" for i in range(n_locs)]
    cars = [f"car{i}" for i in range(n_cars)]
    init = [f"(location {l})" for l in ls] + [f"(car {c})" for c in cars]
    init += ["(empty-ferry)", f"(at-ferry {r.choice(ls)})"]
    goal = []
    for c in cars:
        src, dst = r.sample(ls, 2)
        init.append(f"(at {c} {src})")
        goal.append(f"(at {c} {dst})")
    return _problem(f"ferry-{n_locs}-{n_cars}-{seed}", "ferry", " ".join(ls + cars), init, goal)


__all__ = [
    "DOMAINS", "BLOCKSWORLD", "GRIPPER", "LOGISTICS", "FERRY",
    "blocksworld_problem", "gripper_problem", "logistics_problem", "ferry_problem",
]
