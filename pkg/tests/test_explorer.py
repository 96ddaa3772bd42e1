import numpy as np
import pytest

from relscore.explorer import ExploreConfig, Explorer, choose, explore, explore_fully, sumxi
from relscore.generators import chain_task, layered_task, random_task
from relscore.pddl import heuristic_task
from relscore.relevance import RelevanceTable
from relscore.rng import Rng
from relscore.sumtree import SumTree


def test_config_validation():
    with pytest.raises(ValueError):
        ExploreConfig(rho=0.0)
    with pytest.raises(ValueError):
        ExploreConfig(min_nodes=10, max_nodes=5)


def test_choose_proportional(example_tree):
    t = example_tree
    g = t.children(0)[0]
    opts = [g] + list(t.children(g))
    rng = Rng(3)
    counts = {o: 0 for o in opts}
    for _ in range(20000):
        counts[choose(t, opts, rng)] += 1
    total = sumxi(t, opts)
    for o in opts:
        assert counts[o] / 20000 == pytest.approx(t.xi[o] / total, abs=0.015)
    with pytest.raises(ValueError):
        choose(t, [], rng)


def test_sumtree_find_and_zero():
    st = SumTree(2)
    for i, w in enumerate([1.0, 0.0, 3.0, 0.5]):
        st[i] = w
    assert st.total() == pytest.approx(4.5)
    assert st.find(0.5) == 0
    assert st.find(1.0) == 2
    assert st.find(4.2) == 3
    st[2] = 0.0
    assert st.total() == pytest.approx(1.5)
    assert st.find(1.2) == 3


def test_exploration_is_deterministic():
    task = heuristic_task(random_task(11, n_facts=10, n_actions=16))
    cfg = ExploreConfig(rho=0.3, min_nodes=50, max_nodes=5000, seed=4)
    assert explore(task, cfg).dump() == explore(task, cfg).dump()


def test_rho_stopping_rule():
    task = heuristic_task(random_task(5, n_facts=12, n_actions=24))
    cfg = ExploreConfig(rho=0.5, min_nodes=1, max_nodes=500_000, seed=0)
    t = explore(task, cfg)
    assert t.meta["exhausted"] or t.meta["ratio"] <= 0.5


def test_min_nodes_respected():
    task = heuristic_task(random_task(5, n_facts=12, n_actions=24))
    t = explore(task, ExploreConfig(rho=1.0, min_nodes=300, max_nodes=500_000))
    assert len(t) >= 300 or t.meta["exhausted"]


def test_max_nodes_cap():
    task = heuristic_task(random_task(5, n_facts=14, n_actions=40))
    t = explore(task, ExploreConfig(rho=0.01, min_nodes=100, max_nodes=200))
    assert t.meta["capped"]
    assert len(t) < 200 + 50  # one dive may overshoot by at most one enumeration


def test_explore_fully_raises_when_too_big():
    task = heuristic_task(random_task(5, n_facts=14, n_actions=40))
    with pytest.raises(RuntimeError):
        explore_fully(task, max_nodes=50)


def test_chain_exhausts_in_one_dive():
    ex = Explorer(heuristic_task(chain_task(6)), ExploreConfig(rho=0.01, min_nodes=1, max_nodes=1000))
    ex.dive()
    assert ex.tree.is_exhausted()


@pytest.mark.parametrize("seed", range(6))
def test_relevance_grows_with_dives(seed):
    task = heuristic_task(layered_task(seed, layers=3, width=3))
    ex = Explorer(task, ExploreConfig(rho=0.01, min_nodes=1, max_nodes=100_000, seed=seed))
    prev = RelevanceTable(ex.tree).xi_global
    while ex.tree.frontier:
        ex.dive()
        cur = RelevanceTable(ex.tree).xi_global
        assert np.all(cur >= prev - 1e-12)
        prev = cur
