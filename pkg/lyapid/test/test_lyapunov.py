"""Tests for the Lyapunov algebra: solving, identification, membership and kernel witnesses."""

from fractions import Fraction as F
from itertools import combinations, product
import os
import random

import pytest

from lyapid.census import enumerate_dags
from lyapid.exact import MatrixError, RatMatrix, det, rank, read_matrix
from lyapid.graph import Digraph, Edge, GraphError
from lyapid.lyapunov import (DriftMatrix, NotInModelError, SymIndex, UnstableDriftError, build_A, build_B,
                             check_covariance, default_noise, identify_M, is_stable, kernel_coefficients,
                             kernel_witness, membership, missing_edge_value, missing_edge_values,
                             sample_model_point, sample_stable_sparse, solve_for_sigma)


@pytest.fixture
def backward_drift(data_dir):
    return DriftMatrix(read_matrix(os.path.join(data_dir, 'drift_backward.csv')))


@pytest.fixture
def backward_sigma(data_dir):
    return read_matrix(os.path.join(data_dir, 'sigma_backward.csv'))


def simple_graphs(n):
    """Every simple digraph on n nodes, cyclic ones included."""
    pairs = list(combinations(range(1, n + 1), 2))
    for choice in product((None, 0, 1), repeat=len(pairs)):
        edges = [(i, j) if c == 0 else (j, i) for (i, j), c in zip(pairs, choice) if c is not None]
        yield Digraph(n, frozenset(edges))


def test_sym_index_orders():
    index = SymIndex(3)
    assert index.pairs == [(1, 1), (1, 2), (1, 3), (2, 2), (2, 3), (3, 3)]
    assert len(index) == 6
    assert SymIndex.edge_columns(Digraph(3, frozenset([(1, 2), (2, 3)]))) == [(1, 1), (1, 2), (2, 2), (2, 3), (3, 3)]


def test_drift_weight_convention(backward_drift, backward_path):
    assert backward_drift.weight(2, 1) == 1
    assert backward_drift.weight(1, 2) == 0
    assert backward_drift.support() == backward_path


def test_drift_from_matrix_checks_support(backward_drift, forward_path):
    with pytest.raises(GraphError, match='weight on 2->1, 3->2'):
        DriftMatrix.from_matrix(backward_drift.matrix, forward_path)
    with pytest.raises(GraphError):
        DriftMatrix.from_matrix(backward_drift.matrix, Digraph(2))
    with pytest.raises(MatrixError):
        DriftMatrix(RatMatrix.zeros(2, 3))


def test_build_B_vectorizes(backward_drift, backward_sigma):
    lhs = backward_drift.matrix @ backward_sigma + backward_sigma @ backward_drift.matrix.transpose()
    assert build_B(backward_drift).apply(backward_sigma.vec()) == lhs.vec()


def test_solve_for_sigma_example(backward_drift, backward_sigma):
    assert solve_for_sigma(backward_drift) == backward_sigma
    assert solve_for_sigma(backward_drift, default_noise(3)) == backward_sigma


def test_solve_for_sigma_identity():
    assert solve_for_sigma(DriftMatrix(RatMatrix.identity(3).scale(-1))) == RatMatrix.identity(3)


@pytest.mark.parametrize('rows', [[[1]], [[0]], [[-1, 3], [-3, 1]]])
def test_unstable_drift(rows):
    drift = DriftMatrix(RatMatrix.from_rows(rows))
    with pytest.raises(UnstableDriftError):
        solve_for_sigma(drift)
    assert not is_stable(drift)


def test_noise_must_be_positive_definite(backward_drift):
    with pytest.raises(MatrixError):
        solve_for_sigma(backward_drift, RatMatrix.diagonal([1, 0, 1]))
    with pytest.raises(MatrixError):
        solve_for_sigma(backward_drift, RatMatrix.identity(2))


def test_sampled_drift_is_stable_and_supported(flip_start):
    for seed in range(5):
        m = sample_stable_sparse(flip_start, seed)
        assert m.support() == flip_start
        assert is_stable(m)
        assert sample_stable_sparse(flip_start, seed) == m


def test_build_A_solves_for_the_drift(backward_path, backward_drift, backward_sigma):
    a = build_A(backward_path, backward_sigma)
    assert a.shape == (6, 5)
    x = [backward_drift.weight(i, j) for i, j in SymIndex.edge_columns(backward_path)]
    assert a.apply(x) == tuple(-v for v in SymIndex(3).vech(default_noise(3)))


def test_build_A_entries(backward_sigma, forward_path):
    a = build_A(forward_path, backward_sigma)
    # column 1->2: row (1,2) gets s_11, row (2,2) gets 2 s_21, row (2,3) gets s_31
    assert a.column(1) == (0, F(15, 8), 0, F(7, 4), F(1, 4), 0)
    # column 3->3: row (1,3) gets s_13, row (2,3) gets s_23, row (3,3) gets 2 s_33
    assert a.column(4) == (0, 0, F(1, 4), 0, F(1, 2), 2)


def test_identify_example(backward_path, backward_drift, backward_sigma):
    assert identify_M(backward_path, backward_sigma) == backward_drift


def test_identify_identity_covariance():
    for g in (Digraph(3, frozenset([(1, 2), (2, 3)])), Digraph.complete(4)):
        assert identify_M(g, RatMatrix.identity(g.n)).matrix == RatMatrix.identity(g.n).scale(-1)


def test_identify_outside_model(forward_path, backward_sigma):
    with pytest.raises(NotInModelError):
        identify_M(forward_path, backward_sigma)
    with pytest.raises(GraphError):
        identify_M(Digraph(3, frozenset([(1, 2), (2, 1)])), backward_sigma)
    with pytest.raises(MatrixError):
        identify_M(forward_path, RatMatrix.from_rows([[1, 2, 0], [2, 1, 0], [0, 0, 1]]))


def test_identify_round_trip():
    rng = random.Random(0)
    dags = {n: list(enumerate_dags(n)) for n in range(1, 5)}
    dags[5] = [Digraph.complete(5), Digraph(5, frozenset([(1, 3), (2, 3), (3, 4), (3, 5), (5, 4)]))]
    for seed in range(200):
        n = rng.randint(1, 5)
        g = rng.choice(dags[n])
        m = sample_stable_sparse(g, seed)
        assert identify_M(g, solve_for_sigma(m)) == m


def test_missing_edge_value_example(forward_path, backward_sigma):
    complete = Digraph.complete(3)
    assert missing_edge_value(complete, backward_sigma, default_noise(3), (1, 3)) == F(-5341, 1024)
    assert missing_edge_values(forward_path, backward_sigma) == {Edge(1, 3): F(-5341, 1024)}
    assert not membership(forward_path, backward_sigma)


def test_missing_edge_value_errors(forward_path, backward_sigma):
    with pytest.raises(GraphError):
        missing_edge_value(forward_path, backward_sigma, None, (1, 3))
    with pytest.raises(GraphError):
        missing_edge_value(Digraph.complete(3), backward_sigma, None, (3, 1))
    with pytest.raises(GraphError):
        missing_edge_values(forward_path, backward_sigma, gprime=Digraph.complete(3, [3, 2, 1]))


def test_membership_forward():
    rng = random.Random(1)
    dags = {n: list(enumerate_dags(n)) for n in range(2, 5)}
    for seed in range(200):
        g = rng.choice(dags[rng.randint(2, 4)])
        _, sigma = sample_model_point(g, seed)
        assert membership(g, sigma)


def test_membership_rejects_bigger_model(backward_path, backward_sigma):
    assert membership(backward_path, backward_sigma)
    assert not membership(Digraph(3), backward_sigma)
    with pytest.raises(MatrixError):
        membership(backward_path, RatMatrix.from_rows([[1, 2, 0], [2, 1, 0], [0, 0, 1]]))


def completions(g):
    """Two different completions of a simple non-complete graph: its own and the reverse orientation."""
    missing = {(i, j) for i, j in combinations(range(1, g.n + 1), 2) if not g.is_adjacent(i, j)}
    own = g.completion()
    return own, Digraph(g.n, g.edges | {Edge(j, i) if own.has_edge(i, j) else Edge(i, j) for i, j in missing})


def check_completion_invariance(seeds):
    for g in simple_graphs(4):
        if len(g.edges) == 6:
            continue
        first, second = completions(g)
        assert first != second
        for seed in seeds:
            for source in (g, first):
                _, sigma = sample_model_point(source, seed)
                assert membership(g, sigma, gprime=first) == membership(g, sigma, gprime=second)


def test_membership_does_not_depend_on_the_completion():
    check_completion_invariance(range(2))


@pytest.mark.slow
def test_membership_does_not_depend_on_the_completion_exhaustive():
    check_completion_invariance(range(10))


def test_rank_of_coefficient_matrix():
    for g in simple_graphs(4):
        for seed in range(5):
            _, sigma = sample_model_point(g, seed)
            assert rank(build_A(g, sigma)) == len(g.edges) + g.n


def test_isolated_vertex():
    for index, g in enumerate(enumerate_dags(4)):
        if index % 5:
            continue
        for i in range(1, 5):
            isolated = g.isolate(i)
            for source in (g, isolated):
                _, sigma = sample_model_point(source, index)
                zeros = all(sigma[i - 1, j - 1] == 0 for j in range(1, 5) if j != i)
                assert membership(isolated, sigma) == (membership(g, sigma) and zeros)


def test_sink_vertex():
    bases = list(enumerate_dags(3)) + [Digraph(4, frozenset([(1, 2), (3, 2), (2, 4)])), Digraph.complete(4)]
    for g in bases:
        with_sink = g.add_sink()
        for source in (with_sink, g.completion().add_sink()):
            _, sigma = sample_model_point(source, 3)
            marginal = sigma.submatrix(range(g.n), range(g.n))
            assert membership(with_sink, sigma) == membership(g, marginal)


def test_normed_variance_factorization(forward_path):
    rng = random.Random(7)
    complete = Digraph.complete(3)
    ratio = None
    for _ in range(20):
        s12, s13, s23 = (F(rng.randint(-4, 4), 10) for _ in range(3))
        sigma = RatMatrix.from_rows([[1, s12, s13], [s12, 1, s23], [s13, s23, 1]])
        value = missing_edge_value(complete, sigma, None, (1, 3))
        factors = (s13 - s12 * s23) * (1 - s12 * s13 * s23)
        assert (value == 0) == (factors == 0)
        if factors != 0:
            ratio = value / factors if ratio is None else ratio
            assert value / factors == ratio
    vanishing = RatMatrix.from_rows([[1, F(1, 2), F(1, 6)], [F(1, 2), 1, F(1, 3)], [F(1, 6), F(1, 3), 1]])
    assert missing_edge_values(forward_path, vanishing) == {Edge(1, 3): 0}


def kernel_instance(n, p, seed):
    """A randomly relabelled almost-complete DAG and its super-covered edge."""
    rng = random.Random(seed)
    a, b = p + 1, p + 2
    c1, c2 = sorted(rng.sample(range(p + 3, n + 1), 2))
    edges = Digraph.complete(n).edges - {Edge(c1, c2)}
    labels = list(range(1, n + 1))
    rng.shuffle(labels)
    relabel = dict(zip(range(1, n + 1), labels))
    g1 = Digraph(n, frozenset(Edge(relabel[e.src], relabel[e.dst]) for e in edges))
    return g1, Edge(relabel[a], relabel[b])


def test_kernel_coefficients_worked_example():
    g1 = Digraph.complete(5).isolate(5).union(Digraph(5, frozenset([(1, 5), (2, 5), (3, 5)])))
    assert not g1.has_edge(4, 5)
    _, sigma = sample_model_point(g1.union(Digraph(5, frozenset([(3, 2)]))), 0)
    coefficients = kernel_coefficients(g1, (2, 3), sigma)
    assert coefficients == {(1, 2): sigma[0, 2], (1, 3): -sigma[0, 1], (2, 3): sigma[0, 0]}


@pytest.mark.parametrize('seed', range(50))
def test_kernel_witness(seed):
    rng = random.Random(seed)
    n = rng.randint(4, 6)
    p = rng.randint(0, n - 4)
    g1, edge = kernel_instance(n, p, seed)
    assert g1.is_super_covered(edge)
    _, sigma = sample_model_point(g1.union(g1.flip_edge(edge)), seed)
    witness = kernel_witness(g1, edge, sigma)
    value = witness.value(edge.src, edge.dst)
    assert value != 0
    block = sorted(g1.parents(edge.src) | {edge.dst})
    minor = det(sigma.submatrix([v - 1 for v in block], [v - 1 for v in block]))
    assert value in (minor, -minor)
    assert build_A(witness.graph, sigma).apply(witness.vector) == (0,) * len(SymIndex(n))
    assert witness.graph.has_edge(edge.dst, edge.src)


def test_kernel_witness_rejects_bad_instances(forward_path, backward_sigma):
    with pytest.raises(GraphError):
        kernel_witness(forward_path, (1, 2), backward_sigma)
    complete = Digraph.complete(4)
    with pytest.raises(GraphError):
        kernel_witness(complete, (1, 2), RatMatrix.identity(4))


def test_check_covariance(backward_sigma):
    assert check_covariance(backward_sigma, 3) is backward_sigma
    with pytest.raises(MatrixError):
        check_covariance(backward_sigma, 4)
    with pytest.raises(MatrixError):
        check_covariance(RatMatrix.from_rows([[1, 2], [3, 1]]))
