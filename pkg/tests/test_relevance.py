import itertools
from fractions import Fraction

import numpy as np
import pytest

from relscore import kernels, oracle
from relscore.explorer import ExploreConfig, explore, explore_fully
from relscore.generators import diamond_task, layered_task, random_task
from relscore.pddl import heuristic_task
from relscore.relevance import (
    RelevanceHeuristic,
    RelevanceTable,
    build_lca_index,
    h_relevance,
    local_relevance,
    round_half_up,
    state_vector,
    truncate_view,
    xi_of_label,
)
from relscore.tree import ACTION, FACT, ROOT

BACKENDS = kernels.available()


def _tree(seed, **kw):
    task = heuristic_task(random_task(seed, **kw))
    return explore_fully(task, max_nodes=30_000)


def test_round_half_up():
    assert round_half_up(2.5) == 3
    assert round_half_up(2.4999) == 2
    assert round_half_up(0.5) == 1
    assert round_half_up(1.5 - 1e-12) == 2
    assert round_half_up(0.0) == 0


def test_state_vector():
    v = state_vector(0b1011, 6)
    assert v.tolist() == [1, 1, 0, 1, 0, 0]
    assert state_vector(0, 0).tolist() == []


@pytest.mark.parametrize("backend", BACKENDS)
def test_example_values(example_tree, backend):
    tab = RelevanceTable(example_tree, backend=backend)
    assert tab.xi("(p1)") == 1.0
    assert abs(tab.xi("(p2)") - 2 / 3) < 1e-12
    assert tab.xi("(g)") == 1.0
    assert tab.xi("success") == 0.0
    assert tab.raw_h(example_tree.task.init_state) == pytest.approx(1 + 1 + 2 / 3)
    assert tab.h(example_tree.task.init_state) == 3


def test_example_decomposition(example_tree):
    tab = RelevanceTable(example_tree)
    d = tab.decomposition("(p2)")
    assert len(d["flcas"]) == 2 and d["alcas"] == []
    assert sum(t["xi"] for t in d["flcas"]) == pytest.approx(2 / 3)


def test_diamond_half():
    t = explore_fully(heuristic_task(diamond_task()))
    assert xi_of_label(t, None, "(q)") == 0.5


def test_h_zero_at_goal(example_tree):
    task = example_tree.task
    s = task.state(["(g)"])
    assert h_relevance(example_tree, None, s) == 0


def test_truncation_cuts_subtrees(example_tree):
    task = example_tree.task
    s = task.state(["(p1)"])
    tab = RelevanceTable(example_tree)
    # p1's achiever never needs p2, so truncating at p1 changes nothing for p2
    assert tab.xi_sigma("(p2)", s) == pytest.approx(2 / 3)
    view = truncate_view(example_tree, task.state(["(g)"]))
    assert view.nodes() == {0, 1}
    assert view.is_leaf(1)
    assert tab.xi_sigma("(p1)", task.state(["(g)"])) == 0.0


def _pairwise_lca(tree, u, v):
    pu = set(tree.path(u))
    while v not in pu:
        v = tree.parent[v]
    return v


@pytest.mark.parametrize("seed", range(40))
def test_lca_index_against_pairwise_oracle(seed):
    tree = _tree(seed, n_facts=8, n_actions=12)
    tab = RelevanceTable(tree)
    for fid in range(len(tree.task.facts)):
        e = tab.entry(fid)
        occ = tree.nodes_with_label(fid)
        assert sorted(e.nodes) == sorted(occ)
        assert list(e.signatures) == sorted(e.signatures)
        lcas = {_pairwise_lca(tree, a, b) for a, b in itertools.combinations(occ, 2)}
        assert e.alcas == {n for n in lcas if tree.kind[n] in (ACTION, ROOT)}
        under = {n for n in occ if any(a in tree.path(n) for a in e.alcas)}
        assert e.flcas == set(occ) - under
        # Xi = sum over fLCAs + top-level aLCA terms
        tops = [a for a in e.alcas if not any(b in tree.path(a)[1:] for b in e.alcas)]
        total = sum(tree.xi[n] for n in e.flcas) + sum(tree.xi[a] * local_relevance(tree, fid, a) for a in tops)
        assert total == pytest.approx(tab.xi(fid), abs=1e-12)


@pytest.mark.parametrize("seed", range(60))
def test_matches_exact_oracle_with_truncation(seed):
    tree = _tree(seed, n_facts=7, n_actions=10)
    if oracle.choice_points(tree) > 16:
        pytest.skip("too many choice points for the exact oracle")
    task = tree.task
    tab = RelevanceTable(tree)
    for state in (0, task.init_state, task.init_state | (1 << (seed % len(task.facts)))):
        exact = oracle.enumerate_all(tree, state)
        got = tab.scores(state)
        for f in range(len(task.facts)):
            assert abs(float(exact.get(f, Fraction(0))) - got[f]) < 1e-12


@pytest.mark.skipif(len(BACKENDS) < 2, reason="compiled kernels not built")
@pytest.mark.parametrize("seed", range(15))
def test_backends_agree(seed):
    task = heuristic_task(random_task(seed, n_facts=14, n_actions=30))
    tree = explore(task, ExploreConfig(rho=0.05, min_nodes=2000, max_nodes=20_000, seed=seed))
    a = RelevanceTable(tree, backend="python")
    b = RelevanceTable(tree, backend="cython")
    for name in ("vt_node", "vt_parent", "vt_kind", "seg_end", "tin", "tout"):
        assert np.array_equal(getattr(a, name), getattr(b, name)), name
    for state in (0, task.init_state, (1 << len(task.facts)) - 1 - task.init_state):
        assert np.array_equal(a.scores(state), b.scores(state))


def test_scores_bounded_and_partial_trees_lower_bound():
    task = heuristic_task(layered_task(3, layers=4, width=3))
    full = RelevanceTable(explore_fully(task))
    part = RelevanceTable(explore(task, ExploreConfig(rho=0.9, min_nodes=1, max_nodes=10_000)))
    assert np.all(part.xi_global <= full.xi_global + 1e-12)
    assert np.all((full.xi_global >= 0) & (full.xi_global <= 1))


def test_heuristic_cache(example_tree):
    h = RelevanceHeuristic(RelevanceTable(example_tree))
    s = example_tree.task.init_state
    assert h(s) == h(s) == 3
    assert h.evaluations == 1


def test_build_lca_index_wrapper(example_tree):
    e = build_lca_index(example_tree, "(p1)")
    assert len(e.nodes) == 3
    assert all(example_tree.kind[n] == FACT for n in e.nodes)
