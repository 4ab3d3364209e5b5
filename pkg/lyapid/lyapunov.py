"""
Algebra of the continuous Lyapunov equation M S + S M^T + C = 0.

The drift entry m[j][i] weights the edge i -> j. Vectorization is column-wise,
so vec(M) lists m[1][1], m[2][1], ..., i.e. the edges 1->1, 1->2, ..., 1->n,
2->1, ... in that order. Half-vectorized rows are the pairs (k, l), k <= l,
in lexicographic order.
"""

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
import logging
from math import comb
import random

from .exact import (MatrixError, RatMatrix, SingularMatrixError, det, is_positive_definite, kron,
                    select_independent_rows, solve)
from .graph import Digraph, Edge, GraphError

log = logging.getLogger(__name__)

SAMPLE_NUMERATORS = [k for k in range(-9, 10) if k != 0]
SAMPLE_DENOMINATORS = (1, 2, 3, 4)


class UnstableDriftError(ValueError):
    """The drift matrix is not stable, so the Lyapunov equation has no covariance solution."""


class NotInModelError(ValueError):
    """A covariance matrix does not belong to the model of the given graph."""


class InconsistencyError(RuntimeError):
    """A computation contradicted a proven property; this indicates a bug."""


class SymIndex:
    """Row and column orders of the coefficient matrix A_G(S)."""

    def __init__(self, n):
        self.n = n
        self.pairs = [(k, l) for k in range(1, n + 1) for l in range(k, n + 1)]

    def __len__(self):
        return len(self.pairs)

    def vech(self, m):
        return tuple(m[k - 1, l - 1] for k, l in self.pairs)

    @staticmethod
    def edge_columns(g):
        """Edges of g plus all self-loops, as (i, j) pairs in column-wise vec order."""
        return [(i, j) for i in range(1, g.n + 1) for j in range(1, g.n + 1)
                if i == j or g.has_edge(i, j)]


@dataclass(frozen=True)
class DriftMatrix:
    """A drift matrix M; `weight(i, j)` is the entry for the edge i -> j."""

    matrix: RatMatrix

    def __post_init__(self):
        if not self.matrix.is_square:
            raise MatrixError('Drift matrix must be square, got {}x{}'.format(*self.matrix.shape))

    @property
    def n(self):
        return self.matrix.rows

    def weight(self, i, j):
        return self.matrix[j - 1, i - 1]

    def support(self):
        """The graph of non-zero off-diagonal entries."""
        return Digraph(self.n, frozenset(Edge(i, j) for i in range(1, self.n + 1) for j in range(1, self.n + 1)
                                         if i != j and self.weight(i, j) != 0))

    @classmethod
    def from_matrix(cls, matrix, graph=None):
        """Wrap `matrix`, checking that it is supported on `graph` when one is given."""
        drift = cls(matrix)
        if graph is not None:
            if graph.n != drift.n:
                raise GraphError('Drift matrix has {} rows but the graph has {} nodes'.format(drift.n, graph.n))
            extra = drift.support().edges - graph.edges
            if extra:
                raise GraphError('Drift matrix is not supported on the graph: weight on {}'.format(
                    ', '.join(str(e) for e in sorted(extra))))
        return drift


def default_noise(n):
    """C = 2 I_n."""
    return RatMatrix.identity(n).scale(2)


def check_noise(c, n):
    if c.shape != (n, n):
        raise MatrixError('Noise matrix must be {0}x{0}, got {1}x{2}'.format(n, *c.shape))
    if not c.is_symmetric():
        raise MatrixError('Noise matrix is not symmetric')
    if not is_positive_definite(c):
        raise MatrixError('Noise matrix is not positive definite')
    return c


def check_covariance(sigma, n=None, positive_definite=True):
    if not sigma.is_square:
        raise MatrixError('Covariance matrix must be square, got {}x{}'.format(*sigma.shape))
    if n is not None and sigma.rows != n:
        raise MatrixError('Covariance matrix is {0}x{0} but the graph has {1} nodes'.format(sigma.rows, n))
    if not sigma.is_symmetric():
        raise MatrixError('Covariance matrix is not symmetric')
    if positive_definite and not is_positive_definite(sigma):
        raise MatrixError('Covariance matrix is not positive definite')
    return sigma


def _noise_or_default(c, n):
    return default_noise(n) if c is None else check_noise(c, n)


def build_B(m):
    """B(M) = I (x) M + M (x) I, so that B(M) vec(S) = vec(M S + S M^T)."""
    identity = RatMatrix.identity(m.n)
    return kron(identity, m.matrix) + kron(m.matrix, identity)


def solve_for_sigma(m, c=None):
    """The covariance S solving M S + S M^T + C = 0.

    :raises UnstableDriftError: if B(M) is singular or the solution is not positive definite
    """
    n = m.n
    c = _noise_or_default(c, n)
    try:
        vec_sigma = solve(build_B(m), [-x for x in c.vec()])
    except SingularMatrixError:
        raise UnstableDriftError('Drift matrix is not stable: B(M) is singular') from None
    sigma = RatMatrix(n, n, [vec_sigma[j * n + i] for i in range(n) for j in range(n)])
    if not sigma.is_symmetric():
        raise InconsistencyError('Lyapunov solution for a symmetric noise matrix is not symmetric')
    if not is_positive_definite(sigma):
        raise UnstableDriftError('Drift matrix is not stable: the Lyapunov solution is not positive definite')
    return sigma


def is_stable(m):
    """Stability via the Lyapunov certificate, without eigenvalues."""
    try:
        solve_for_sigma(m)
    except UnstableDriftError:
        return False
    return True


def sample_stable_sparse(g, seed):
    """A random stable drift matrix supported on g, deterministic in `seed`.

    Off-diagonal weights are small rationals; each diagonal entry is
    -(1 + sum of the absolute off-diagonal weights in its row), which makes
    the matrix strictly row diagonally dominant with a negative diagonal.
    """
    rng = random.Random(seed)
    n = g.n
    rows = [[Fraction(0)] * n for _ in range(n)]
    for edge in g.sorted_edges():
        rows[edge.dst - 1][edge.src - 1] = Fraction(rng.choice(SAMPLE_NUMERATORS), rng.choice(SAMPLE_DENOMINATORS))
    for i in range(n):
        rows[i][i] = -(1 + sum(abs(x) for x in rows[i]))
    return DriftMatrix(RatMatrix.from_rows(rows))


@lru_cache(maxsize=4096)
def sample_model_point(g, seed, c=None):
    """A drift matrix sampled on g and its covariance matrix."""
    m = sample_stable_sparse(g, seed)
    return m, solve_for_sigma(m, c)


def build_A(g, sigma):
    """Coefficient matrix of the Lyapunov equation in the drift entries of g.

    Rows are the pairs (k, l), k <= l; columns are the edges of g including
    self-loops. The column of i -> j holds, in row (k, l):
    - 0 if j is neither k nor l,
    - s_li if j = k != l,
    - s_ki if j = l != k,
    - 2 s_ji if j = k = l.
    """
    index = SymIndex(g.n)
    columns = SymIndex.edge_columns(g)
    entries = []
    for k, l in index.pairs:
        for i, j in columns:
            if j == k == l:
                entries.append(2 * sigma[j - 1, i - 1])
            elif j == k:
                entries.append(sigma[l - 1, i - 1])
            elif j == l:
                entries.append(sigma[k - 1, i - 1])
            else:
                entries.append(0)
    return RatMatrix(len(index), len(columns), entries)


def identify_M(g, sigma, c=None):
    """The drift matrix on g that produces sigma.

    :raises NotInModelError: if no drift matrix supported on g solves the equation
    """
    if not g.is_simple:
        raise GraphError('Drift identification needs a simple graph')
    n = g.n
    check_covariance(sigma, n)
    c = _noise_or_default(c, n)
    index = SymIndex(n)
    a = build_A(g, sigma)
    rhs = [-x for x in index.vech(c)]
    rows = select_independent_rows(a)
    if len(rows) < a.cols:
        raise InconsistencyError('A_G(S) has rank {} < {} columns for a simple graph'.format(len(rows), a.cols))
    x = solve(a.submatrix(rows, range(a.cols)), [rhs[r] for r in rows])
    for row, (lhs, target) in enumerate(zip(a.apply(x), rhs)):
        if lhs != target:
            raise NotInModelError('Covariance matrix is not in the model: equation {} fails'.format(
                index.pairs[row]))
    entries = [[Fraction(0)] * n for _ in range(n)]
    for (i, j), value in zip(SymIndex.edge_columns(g), x):
        entries[j - 1][i - 1] = value
    return DriftMatrix(RatMatrix.from_rows(entries))


def _check_completion(gprime):
    if not gprime.is_simple or len(gprime.edges) != comb(gprime.n, 2):
        raise GraphError('{!r} is not a completion'.format(gprime))


def _replaced_column_det(a, columns, edge, vech_c):
    column = columns.index((edge.src, edge.dst))
    return det(a.with_column(column, [-x for x in vech_c]))


def missing_edge_value(gprime, sigma, c, edge):
    """Determinant of A_G'(S) with the column of `edge` replaced by -vech(C)."""
    _check_completion(gprime)
    edge = edge if isinstance(edge, Edge) else Edge(*edge)
    if edge not in gprime.edges:
        raise GraphError('Edge {} is not in the completion'.format(edge))
    c = _noise_or_default(c, gprime.n)
    return _replaced_column_det(build_A(gprime, sigma), SymIndex.edge_columns(gprime), edge,
                                SymIndex(gprime.n).vech(c))


def missing_edge_values(g, sigma, c=None, gprime=None):
    """All missing-edge relations of g with respect to `gprime` (default: its completion)."""
    gprime = g.completion() if gprime is None else gprime
    _check_completion(gprime)
    if gprime.n != g.n or not g.edges <= gprime.edges:
        raise GraphError('{!r} is not a completion of {!r}'.format(gprime, g))
    c = _noise_or_default(c, g.n)
    a = build_A(gprime, sigma)
    columns = SymIndex.edge_columns(gprime)
    vech_c = SymIndex(g.n).vech(c)
    values = {}
    for edge in sorted(gprime.edges - g.edges):
        values[edge] = _replaced_column_det(a, columns, edge, vech_c)
        log.debug('Missing-edge relation for %s: %s', edge, values[edge])
    return values


def membership(g, sigma, c=None, gprime=None):
    """Whether sigma lies in the model of the simple graph g."""
    check_covariance(sigma, g.n)
    return all(value == 0 for value in missing_edge_values(g, sigma, c, gprime).values())


@dataclass(frozen=True)
class KernelWitness:
    """A non-zero kernel vector of A_G(S) for the union graph G of an almost-complete DAG and its flip."""

    graph: Digraph
    columns: tuple
    vector: tuple
    coefficients: dict

    def value(self, i, j):
        return self.vector[self.columns.index((i, j))]


def _check_kernel_instance(g1, edge):
    if not g1.is_simple or not g1.is_dag:
        raise GraphError('Kernel witness needs a simple DAG')
    if len(g1.edges) != comb(g1.n, 2) - 1:
        raise GraphError('Kernel witness needs an almost-complete DAG')
    edge = edge if isinstance(edge, Edge) else Edge(*edge)
    if not g1.is_super_covered(edge):
        raise GraphError('Edge {} is not super-covered'.format(edge))
    missing = next((i, j) for i in range(1, g1.n + 1) for j in range(i + 1, g1.n + 1) if not g1.is_adjacent(i, j))
    if not set(missing) <= g1.children(edge.dst):
        raise GraphError('The missing pair {}-{} is not between children of {}'.format(*missing, edge.dst))
    return edge


def kernel_coefficients(g1, edge, sigma):
    """Coefficients d of the kernel combination, keyed by pairs (s, t) with s before t.

    With P the parents of the edge source and Q = P + {source, target}, a
    prefix of the topological order, d(s, t) = (-1)^(pos s + pos t + 1) times
    det of the rows P and columns Q - {s, t} of sigma.
    """
    edge = _check_kernel_instance(g1, edge)
    order = g1.topological_order()
    position = {v: pos for pos, v in enumerate(order, start=1)}
    parents = sorted(g1.parents(edge.src), key=position.get)
    q = parents + [edge.src, edge.dst]
    if sorted(position[v] for v in q) != list(range(1, len(q) + 1)):
        raise InconsistencyError('Parents and edge endpoints do not start the topological order')
    rows = [v - 1 for v in parents]
    coefficients = {}
    for a in range(len(q)):
        for b in range(a + 1, len(q)):
            s, t = q[a], q[b]
            columns = [v - 1 for v in q if v not in (s, t)]
            sign = -1 if (position[s] + position[t] + 1) % 2 else 1
            coefficients[(s, t)] = sign * det(sigma.submatrix(rows, columns))
    return coefficients


def kernel_witness(g1, edge, sigma):
    """Kernel vector of A_G(S) for G = g1 plus the reversed edge.

    Combines columns of the kernel basis H(S) of the full coefficient matrix,
    whose column (k, l) holds -s_lj in row i -> j when i = k and s_kj when i = l.
    """
    edge = _check_kernel_instance(g1, edge)
    check_covariance(sigma, g1.n, positive_definite=False)
    union = g1.union(Digraph(g1.n, frozenset([edge.reversed()])))
    coefficients = kernel_coefficients(g1, edge, sigma)
    n = g1.n
    full = {}
    for i in range(1, n + 1):
        for j in range(1, n + 1):
            total = Fraction(0)
            for (k, l), d in coefficients.items():
                if i == k:
                    total -= d * sigma[l - 1, j - 1]
                elif i == l:
                    total += d * sigma[k - 1, j - 1]
            full[(i, j)] = total
    columns = tuple(SymIndex.edge_columns(union))
    for pair, value in full.items():
        if value != 0 and pair not in columns:
            raise InconsistencyError('Kernel combination is non-zero on the non-edge {}->{}'.format(*pair))
    return KernelWitness(union, columns, tuple(full[pair] for pair in columns), coefficients)
