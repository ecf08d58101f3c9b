import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mosoo.indicators import unary_epsilon
from mosoo.optimizer import HMaxPolicy, deepest_j_optimal_depth, loss_vector, mosoo_run, soo_run
from mosoo.pareto import DimensionMismatchError, nd_indices
from mosoo.partition import RANDOM, Box, Tree
from mosoo.problems import NonFiniteObjectiveError, holder_family, make_problem, scalar_problem, worked_example


def leaves_after(trace, t):
    expansions = sum(len(r.expanded) for r in trace.records if r.t <= t)
    return 1 + (trace.K - 1) * expansions


def test_hmax_policies():
    p = HMaxPolicy.power(0.5)
    assert [p(t) for t in (1, 3, 4, 99, 100)] == [1, 1, 2, 9, 10]
    assert HMaxPolicy.constant(4)(10 ** 6) == 4
    assert HMaxPolicy.unbounded()(1) == float("inf")
    assert all(p(t) <= p(t + 1) for t in range(1, 500))
    for bad in (lambda: HMaxPolicy.power(1.0), lambda: HMaxPolicy.constant(-1),
                lambda: HMaxPolicy("linear", 1)):
        with pytest.raises(ValueError):
            bad()


def test_worked_example_first_iterations():
    _, trace = mosoo_run(worked_example(), 3, 10_000, HMaxPolicy.unbounded())
    rec = {r.t: r for r in trace.records[:4]}
    assert rec[1].expanded_keys == [(0, 0)] and leaves_after(trace, 1) == 3
    assert rec[2].expanded_keys == [(1, 1)] and leaves_after(trace, 2) == 5
    assert np.array_equal(rec[2].expanded[0].rep, [0.0, 0.0])
    assert len(rec[4].expanded) == 3 and leaves_after(trace, 4) == 13


def test_mosoo_selection_replays_from_trace():
    """Each expanded set equals the non-dominated leaves of its depth given the carried set."""
    _, trace = mosoo_run(make_problem("fonseca_fleming"), 3, 600)
    children = {}
    for node in trace.expanded:
        children[node.key] = node
    for sweep in trace.sweeps():
        carried = []
        for rec in sweep:
            # leaves of this depth at selection time: nodes of that depth not expanded earlier
            earlier = {n.key for r in trace.records if r.t < rec.t for n in r.expanded}
            at_depth = sorted((n for n in _all_nodes(trace.tree.root) if n.depth == rec.depth
                               and n.key not in earlier and _born_before(n, rec.t, trace)),
                              key=lambda n: n.index)
            pool = at_depth + carried
            keep = nd_indices([n.value for n in pool]) if pool else []
            carried = [pool[i] for i in keep]
            chosen = [pool[i] for i in keep if i < len(at_depth)]
            assert [n.key for n in chosen][:len(rec.expanded)] == rec.expanded_keys
            assert set(rec.expanded_keys) <= {n.key for n in at_depth}


def _all_nodes(root):
    stack = [root]
    while stack:
        node = stack.pop()
        yield node
        stack.extend(node.children)


def _born_before(node, t, trace):
    if node.parent is None:
        return True
    birth = next(r.t for r in trace.records if any(n is node.parent for n in r.expanded))
    return birth < t


def test_budget_one_returns_root():
    archive, trace = mosoo_run(worked_example(), 3, 1)
    assert archive == [worked_example()((0.0, 0.0))]
    assert trace.evaluations == 1 and trace.records == []
    best, x, _ = soo_run(scalar_problem(lambda x: x[0] ** 2, [-1], [1]), 3, 1)
    assert best == 0.0 and x == (0.0,)


def test_invalid_runs():
    with pytest.raises(ValueError):
        mosoo_run(worked_example(), 3, 0)
    with pytest.raises(DimensionMismatchError):
        soo_run(worked_example(), 3, 10)
    bad = scalar_problem(lambda x: float("nan") if x[0] == 0.5 else x[0], [0.0], [1.0])
    with pytest.raises(NonFiniteObjectiveError) as info:
        mosoo_run(bad, 3, 100)
    assert info.value.x == (0.5,)


def test_soo_finds_quadratic_minimum():
    best, x, trace = soo_run(scalar_problem(lambda x: (x[0] - 0.25) ** 2, [0], [1]), 3, 200)
    assert best <= 1e-6
    assert trace.evaluations <= 200


def test_soo_on_constant_function_expands_one_node_per_depth():
    _, _, trace = soo_run(scalar_problem(lambda x: 1.0, [0], [1]), 3, 400, HMaxPolicy.unbounded())
    for rec in trace.records:
        assert len(rec.expanded) <= 1
        if rec.expanded:
            leaves_here = sorted((n.index for n in _all_nodes(trace.tree.root)
                                  if n.depth == rec.depth and (n.is_leaf or n is rec.expanded[0])))
            assert rec.expanded[0].index == min(i for i in leaves_here
                                                if not _expanded_before(trace, rec, (rec.depth, i)))


def _expanded_before(trace, rec, key):
    return any(key in r.expanded_keys for r in trace.records if r is not rec and r.t < rec.t)


def test_soo_counts_iterations_per_expansion():
    _, _, trace = soo_run(scalar_problem(lambda x: (x[0] - 0.3) ** 2, [0], [1]), 3, 300)
    expanding = [r.t for r in trace.records if r.expanded]
    assert expanding == list(range(1, len(expanding) + 1))


@pytest.mark.parametrize("K", [2, 3, 4, 5])
def test_budget_and_accounting(K):
    _, trace = mosoo_run(worked_example(), K, 777)
    fresh = K - 1 if K % 2 else K
    assert trace.evaluations == 1 + fresh * len(trace.expanded)
    assert trace.evaluations <= 777
    assert 777 - trace.evaluations < fresh
    evals = [r.evaluations for r in trace.records]
    assert evals == sorted(evals)


def test_determinism_with_random_splits():
    problem = make_problem("sphere_pair")
    runs = [mosoo_run(problem, 3, 900, split=RANDOM, seed=11) for _ in range(2)]
    assert runs[0][0] == runs[1][0]
    assert [r.expanded_keys for r in runs[0][1].records] == [r.expanded_keys for r in runs[1][1].records]
    assert runs[0][1].log == runs[1][1].log
    other = mosoo_run(problem, 3, 900, split=RANDOM, seed=12)[1]
    assert [n.split_dim for n in other.expanded] != [n.split_dim for n in runs[0][1].expanded]


def test_constant_depth_cap_stalls():
    _, trace = mosoo_run(worked_example(), 3, 10_000, HMaxPolicy.constant(2))
    assert trace.stop_reason == "stalled"
    assert max(r.depth for r in trace.records) <= 2
    assert trace.evaluations == 1 + 2 * len(trace.expanded)


def test_refinement_below_float_resolution():
    # coincident optima: the search refines one point far past double precision
    problem = holder_family(1, a1=0.57, a2=0.57)
    _, trace = mosoo_run(problem, 3, 10_000)
    assert trace.stop_reason == "budget"
    assert trace.tree.depth > 40
    assert min(y for _, _, y in trace.log) == (0.0, 0.0)


def test_archive_quality_is_monotone():
    problem = worked_example()
    front = [problem((x, 0.66)) for x in np.linspace(-0.25, 0.25, 101)]
    values = []
    for _, archive in mosoo_run(problem, 3, 1500)[1].archive_history():
        values.append(unary_epsilon(archive.vectors, front))
    assert all(b <= a for a, b in zip(values, values[1:]))


def test_loss_vector():
    assert loss_vector([(1, 3), (3, 1)], (1, 1)) == (0, 0)
    assert loss_vector([(2, 2)], (1, 1)) == (1, 1)
    _, trace = mosoo_run(worked_example(), 3, 10_000)
    r = loss_vector(trace, (0.0, 0.0))
    assert all(0 <= v <= 1e-3 for v in r)
    with pytest.raises(DimensionMismatchError):
        loss_vector([(1, 2)], (0, 0, 0))


def test_deepest_optimal_depth_on_hand_built_tree():
    tree = Tree(Box((0.0,), (1.0,)), 3)
    f = lambda x: (float(x[0]),)
    tree.init_root(f)
    assert deepest_j_optimal_depth(tree, (0.16,)) == -1
    nodes = {(0, 0): tree.root}
    for key in [(0, 0), (1, 0), (1, 2), (2, 1), (2, 6), (3, 4)]:
        for child in tree.expand(nodes[key], f):
            nodes[child.key] = child
    assert deepest_j_optimal_depth(tree, (0.16,)) == 3
    assert deepest_j_optimal_depth(tree, (0.7,)) == 2
    with pytest.raises(ValueError):
        deepest_j_optimal_depth(tree, (1.5,))


def test_deepest_optimal_depth_after_first_iteration():
    problem = worked_example()
    _, trace = mosoo_run(problem, 3, 3)
    assert deepest_j_optimal_depth(trace, problem.optima[0]) == 0


@settings(max_examples=15, deadline=None)
@given(seed=st.integers(0, 2 ** 31), K=st.sampled_from([3, 5]))
def test_single_objective_mosoo_matches_soo(seed, K):
    rng = np.random.default_rng(seed)
    w = rng.normal(size=4)
    f = lambda x: float(np.sin(w[0] * x[0] + w[1]) + np.cos(w[2] * x[1] + w[3]) + 1e-3 * x[0])
    problem = scalar_problem(f, [0, 0], [3, 3])
    _, mo = mosoo_run(problem, K, 800, HMaxPolicy.unbounded())
    _, _, so = soo_run(problem, K, 800, HMaxPolicy.unbounded())
    assert [n.key for n in mo.expanded] == [n.key for n in so.expanded]
