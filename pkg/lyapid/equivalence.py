"""
Deciders for model equivalence and structural identifiability of DAGs.

Three independent routes decide whether two DAGs have the same Lyapunov
model: comparing 4-node induced subgraphs (`model_equiv`), searching for a
sequence of super-covered edge flips (`transform_sequence`) and testing
sampled model points against the missing-edge relations (`oracle_equiv`).
"""

from dataclasses import dataclass
from enum import Enum
from functools import lru_cache
from itertools import combinations
import logging

import networkx as nx

from .exact import format_rational
from .graph import Digraph, Edge, GraphError, isomorphic
from .lyapunov import InconsistencyError, missing_edge_values, sample_model_point

log = logging.getLogger(__name__)

DEFAULT_ORACLE_SAMPLES = 3


class FourNodeType(Enum):
    """Isomorphism types of non-identifiable DAGs on four nodes."""

    I = 'I'
    II = 'II'
    III = 'III'
    IV = 'IV'
    V = 'V'
    VI = 'VI'
    VII = 'VII'
    IDENTIFIABLE = 'identifiable'


FOUR_NODE_PATTERNS = {
    FourNodeType.I: Digraph(4, frozenset([(1, 4), (2, 3), (2, 4), (3, 4)])),
    FourNodeType.II: Digraph(4, frozenset([(1, 2), (1, 3), (1, 4), (2, 3), (2, 4)])),
    FourNodeType.III: Digraph(4, frozenset([(1, 3), (1, 4), (2, 3), (2, 4), (3, 4)])),
    FourNodeType.IV: Digraph.complete(4),
    FourNodeType.V: Digraph(4, frozenset([(1, 2), (1, 3), (2, 3)])),
    FourNodeType.VI: Digraph(4, frozenset([(1, 2), (3, 4)])),
    FourNodeType.VII: Digraph(4, frozenset([(1, 2)])),
}


def _edge_strings(edges):
    return [str(e) for e in edges]


def _check_pair(g1, g2):
    if g1.n != g2.n:
        raise GraphError('Graphs have different node counts ({} and {})'.format(g1.n, g2.n))
    for g in (g1, g2):
        if not g.is_simple or not g.is_dag:
            raise GraphError('{!r} is not a simple DAG'.format(g))


@dataclass(frozen=True)
class FlipSequence:
    """Super-covered edge flips turning `start` into `end`, in order."""

    start: Digraph
    end: Digraph
    flips: tuple

    def __len__(self):
        return len(self.flips)

    def as_dict(self):
        return {'equivalent': True, 'flips': _edge_strings(self.flips)}


@dataclass(frozen=True)
class NotEquivalent:
    """Why the flip search stopped: skeletons differ, or the next edge is not super-covered."""

    reason: str
    edge: Edge
    flips: tuple = ()

    def __len__(self):
        return len(self.flips)

    def as_dict(self):
        return {'equivalent': False,
                'certificate': {'reason': self.reason,
                                'edge': str(self.edge),
                                'flips': _edge_strings(self.flips)}}


@dataclass(frozen=True)
class EquivalenceClass:
    """All DAGs reachable by super-covered flips; the representative has the smallest encoding."""

    members: frozenset
    representative: Digraph

    def __len__(self):
        return len(self.members)

    def __contains__(self, g):
        return g in self.members

    def sorted_members(self):
        return sorted(self.members, key=lambda g: g.encoding)


@dataclass(frozen=True)
class Distinction:
    """Evidence that two DAGs are not model equivalent."""

    reason: str
    nodes: tuple

    def as_dict(self):
        return {'reason': self.reason, 'nodes': list(self.nodes)}


@dataclass(frozen=True)
class OracleWitness:
    """A sampled model point of one graph that violates a relation of the other."""

    seed: int
    direction: str
    edge: Edge
    value: object

    def as_dict(self):
        return {'seed': self.seed, 'direction': self.direction, 'edge': str(self.edge),
                'det': format_rational(self.value)}


@lru_cache(maxsize=None)
def classify_four_node(g):
    """The non-identifiable type of a 4-node DAG, or IDENTIFIABLE."""
    if g.n != 4:
        raise GraphError('Four-node classification needs 4 nodes, got {}'.format(g.n))
    if not g.is_simple or not g.is_dag:
        raise GraphError('{!r} is not a simple DAG'.format(g))
    for kind, pattern in FOUR_NODE_PATTERNS.items():
        if isomorphic(g, pattern):
            return kind
    return FourNodeType.IDENTIFIABLE


def has_super_covered_edge(g):
    return bool(g.super_covered_edges())


def identifiable_by_subgraphs(g):
    """Identifiability read off small induced subgraphs alone.

    With four or more nodes, every edge i -> j needs two more nodes k, l such
    that g[i, j, k, l] is none of the non-identifiable 4-node types. With
    fewer nodes, no weakly connected component may be a 2- or 3-clique.
    """
    if not g.is_simple or not g.is_dag:
        raise GraphError('{!r} is not a simple DAG'.format(g))
    if g.n < 4:
        for component in nx.weakly_connected_components(g.to_networkx()):
            size = len(component)
            if size in (2, 3) and len(g.induced_subgraph(component).edges) == size * (size - 1) // 2:
                return False
        return True
    nodes = set(range(1, g.n + 1))
    for edge in g.sorted_edges():
        others = sorted(nodes - {edge.src, edge.dst})
        if not any(classify_four_node(g.induced_subgraph({edge.src, edge.dst, k, l})) is FourNodeType.IDENTIFIABLE
                   for k, l in combinations(others, 2)):
            return False
    return True


def is_identifiable(g):
    """Whether g is alone in its equivalence class, checked by two independent routes."""
    by_flips = not has_super_covered_edge(g)
    by_subgraphs = identifiable_by_subgraphs(g)
    if by_flips != by_subgraphs:
        raise InconsistencyError('Identifiability routes disagree for {!r}'.format(g))
    return by_flips


@lru_cache(maxsize=65536)
def equivalence_class(g):
    """Closure of g under super-covered edge flips."""
    if not g.is_simple or not g.is_dag:
        raise GraphError('{!r} is not a simple DAG'.format(g))
    members = {g}
    frontier = [g]
    while frontier:
        current = frontier.pop()
        for edge in current.super_covered_edges():
            flipped = current.flip_edge(edge)
            if not flipped.is_dag:
                raise InconsistencyError('Flipping super-covered {} in {!r} made a cycle'.format(edge, current))
            if flipped not in members:
                members.add(flipped)
                frontier.append(flipped)
    return EquivalenceClass(frozenset(members), min(members, key=lambda m: m.encoding))


def _skeleton_difference(g1, g2):
    difference = g1.skeleton().pairs ^ g2.skeleton().pairs
    return min(difference) if difference else None


def distinguishing_subset(g1, g2):
    """First evidence that g1 and g2 differ, or None when they are model equivalent."""
    _check_pair(g1, g2)
    pair = _skeleton_difference(g1, g2)
    if pair is not None:
        return Distinction('skeleton', pair)
    if g1.n < 4:
        if g2 in equivalence_class(g1):
            return None
        return Distinction('subgraph', tuple(range(1, g1.n + 1)))
    for nodes in combinations(range(1, g1.n + 1), 4):
        h1, h2 = g1.induced_subgraph(nodes), g2.induced_subgraph(nodes)
        if h1 != h2 and h2 not in equivalence_class(h1):
            return Distinction('subgraph', nodes)
    return None


def model_equiv(g1, g2):
    return distinguishing_subset(g1, g2) is None


def transform_sequence(g1, g2):
    """Greedy super-covered flips from g1 to g2.

    Each step flips the first edge of g1 \\ g2 in the order that sorts edges
    by the topological position of their head, and among equal heads puts the
    later tail first. Returns a FlipSequence or NotEquivalent.
    """
    _check_pair(g1, g2)
    pair = _skeleton_difference(g1, g2)
    if pair is not None:
        i, j = pair
        edge = next(e for e in (Edge(i, j), Edge(j, i)) if e in g1.edges or e in g2.edges)
        return NotEquivalent('skeleton', edge)
    current = g1
    flips = []
    while True:
        delta = current.edges - g2.edges
        if not delta:
            return FlipSequence(g1, g2, tuple(flips))
        position = {v: pos for pos, v in enumerate(current.topological_order())}
        edge = min(delta, key=lambda e: (position[e.dst], -position[e.src]))
        if not current.is_super_covered(edge):
            log.debug('Flip search stuck at %s after %d flips', edge, len(flips))
            return NotEquivalent('not super-covered', edge, tuple(flips))
        current = current.flip_edge(edge)
        flips.append(edge)


def markov_equiv(g1, g2):
    """Same skeleton and same v-structures."""
    _check_pair(g1, g2)
    return g1.skeleton() == g2.skeleton() and g1.v_structures() == g2.v_structures()


def oracle_witness(g1, g2, k=DEFAULT_ORACLE_SAMPLES, seed=0, c=None):
    """First sampled point separating the two models, or None if all 2k tests pass.

    Points for seeds seed..seed+k-1 are drawn from each model and checked
    against the relations of the other one.
    """
    _check_pair(g1, g2)
    for sample_seed in range(seed, seed + k):
        for direction, source, target in (('forward', g1, g2), ('backward', g2, g1)):
            _, sigma = sample_model_point(source, sample_seed, c)
            for edge, value in missing_edge_values(target, sigma, c).items():
                if value != 0:
                    return OracleWitness(sample_seed, direction, edge, value)
    return None


def oracle_equiv(g1, g2, k=DEFAULT_ORACLE_SAMPLES, seed=0, c=None):
    return oracle_witness(g1, g2, k, seed, c) is None


def ci_violation(g):
    """A non-adjacent pair joined by a trek, or None."""
    if not g.is_simple or not g.is_dag:
        raise GraphError('{!r} is not a simple DAG'.format(g))
    for i, j in combinations(range(1, g.n + 1), 2):
        if not g.is_adjacent(i, j) and g.has_trek(i, j):
            return i, j
    return None


def ci_defined(g):
    """Whether the model is cut out by its conditional independences."""
    return ci_violation(g) is None


def is_polytree(g):
    if not g.is_simple or not g.is_dag or g.n == 0:
        return False
    return nx.is_tree(g.to_networkx().to_undirected())
