"""
Labeled directed graphs on the nodes 1..n.

Self-loops i -> i are implicit on every node and are never stored, so an edge
count always means the number of stored non-loop edges. A graph is an
immutable value. Its bit encoding (bit (i-1)*n + (j-1) set for i -> j) is used
as a hash key by the census and orders the members of an equivalence class.

The mask helpers near the bottom of the module work on tuples of parent and
child bit masks with 0-based nodes; Digraph methods and the census share them
so both decide super-coveredness with the same code.
"""

from dataclasses import dataclass
from functools import cached_property
from itertools import combinations, permutations
import logging
from math import comb

import networkx as nx

log = logging.getLogger(__name__)

MAX_ENCODED_NODES = 7
MAX_ISOMORPHISM_NODES = 8


class GraphError(ValueError):
    """An operation was given a graph, node or edge it cannot work with."""


class GraphParseError(GraphError):
    """An edge-list document could not be parsed."""


@dataclass(frozen=True, order=True)
class Edge:
    """A stored edge src -> dst between distinct nodes."""

    src: int
    dst: int

    def __post_init__(self):
        if self.src == self.dst:
            raise GraphError('Edge {0}->{0} is a self-loop; self-loops are implicit'.format(self.src))

    def __iter__(self):
        return iter((self.src, self.dst))

    def __str__(self):
        return '{}->{}'.format(self.src, self.dst)

    def reversed(self):
        return Edge(self.dst, self.src)


@dataclass(frozen=True)
class Skeleton:
    """The undirected adjacency pairs {i, j} of a graph, stored as (i, j) with i < j."""

    n: int
    pairs: frozenset

    def __str__(self):
        return ', '.join('{}-{}'.format(i, j) for i, j in sorted(self.pairs))


@dataclass(frozen=True)
class Digraph:
    """A directed graph on nodes 1..n, possibly with 2-cycles."""

    n: int
    edges: frozenset = frozenset()

    def __post_init__(self):
        if self.n < 0:
            raise GraphError('Node count must be non-negative, got {}'.format(self.n))
        edges = frozenset(e if isinstance(e, Edge) else Edge(*e) for e in self.edges)
        for edge in edges:
            for node in edge:
                if not 1 <= node <= self.n:
                    raise GraphError('Edge {} uses node {} outside 1..{}'.format(edge, node, self.n))
        object.__setattr__(self, 'edges', edges)

    def __repr__(self):
        return 'Digraph({}, [{}])'.format(self.n, ', '.join(str(e) for e in self.sorted_edges()))

    @classmethod
    def from_encoding(cls, n, code):
        """Rebuild a graph from its bit encoding."""
        edges = []
        for bit in iter_bits(code):
            i, j = divmod(bit, n)
            edges.append(Edge(i + 1, j + 1))
        return cls(n, frozenset(edges))

    @classmethod
    def complete(cls, n, order=None):
        """The complete DAG whose edges all point forward in `order` (default 1..n)."""
        order = list(order) if order is not None else list(range(1, n + 1))
        return cls(n, frozenset(Edge(i, j) for i, j in combinations(order, 2)))

    @cached_property
    def encoding(self):
        return sum(1 << ((e.src - 1) * self.n + (e.dst - 1)) for e in self.edges)

    @cached_property
    def masks(self):
        """Parent and child bit masks with 0-based nodes."""
        return node_masks(self.n, self.encoding)

    @cached_property
    def ancestor_masks(self):
        return ancestor_masks(self.masks[0])

    @cached_property
    def is_simple(self):
        return not any(e.reversed() in self.edges for e in self.edges)

    @cached_property
    def is_dag(self):
        return topological_order_masks(self.masks[0]) is not None

    def sorted_edges(self):
        return sorted(self.edges)

    def has_edge(self, i, j):
        return (i, j) in self._pairs

    @cached_property
    def _pairs(self):
        return frozenset((e.src, e.dst) for e in self.edges)

    def is_adjacent(self, i, j):
        return self.has_edge(i, j) or self.has_edge(j, i)

    def _check_node(self, i):
        if not 1 <= i <= self.n:
            raise GraphError('Node {} is outside 1..{}'.format(i, self.n))

    def _check_edge(self, edge):
        edge = edge if isinstance(edge, Edge) else Edge(*edge)
        if edge not in self.edges:
            raise GraphError('Edge {} is not in the graph'.format(edge))
        return edge

    def parents(self, i):
        self._check_node(i)
        return {k + 1 for k in iter_bits(self.masks[0][i - 1])}

    def children(self, i):
        self._check_node(i)
        return {k + 1 for k in iter_bits(self.masks[1][i - 1])}

    def neighbors(self, i):
        return self.parents(i) | self.children(i)

    def ancestors(self, i):
        """Nodes with a directed path to i, including i itself."""
        self._check_node(i)
        return {k + 1 for k in iter_bits(self.ancestor_masks[i - 1])}

    def has_trek(self, i, j):
        """Whether some node is an ancestor of both i and j."""
        self._check_node(i)
        self._check_node(j)
        return bool(self.ancestor_masks[i - 1] & self.ancestor_masks[j - 1])

    def marginally_independent(self, k, nodes):
        if k in nodes:
            raise GraphError('Node {} cannot be tested against a set containing it'.format(k))
        return not any(self.has_trek(k, s) for s in nodes)

    def skeleton(self):
        return Skeleton(self.n, frozenset((min(e.src, e.dst), max(e.src, e.dst)) for e in self.edges))

    def v_structures(self):
        """Unshielded colliders (i, k, j) with i -> k <- j, i < j and i, j non-adjacent."""
        found = set()
        for k in range(1, self.n + 1):
            for i, j in combinations(sorted(self.parents(k)), 2):
                if not self.is_adjacent(i, j):
                    found.add((i, k, j))
        return frozenset(found)

    def induced_subgraph(self, nodes):
        """Restrict to `nodes`, relabelled 1..|nodes| in increasing order."""
        nodes = sorted(set(nodes))
        for node in nodes:
            self._check_node(node)
        relabel = {node: pos for pos, node in enumerate(nodes, start=1)}
        return Digraph(len(nodes), frozenset(Edge(relabel[e.src], relabel[e.dst]) for e in self.edges
                                             if e.src in relabel and e.dst in relabel))

    def _require_simple_dag(self, what):
        if not self.is_simple or not self.is_dag:
            raise GraphError('{} requires a simple DAG'.format(what))

    def is_super_covered(self, edge):
        """Whether flipping `edge` keeps the Lyapunov model unchanged.

        An edge i -> j is super-covered when
        - ch(i) = ch(j) + {j} and pa(i) + {i} = pa(j);
        - every parent of j points to every child of i;
        - every other node is a common neighbour of i and j or has no trek to either.
        """
        edge = self._check_edge(edge)
        self._require_simple_dag('Super-covered edge test')
        parents, children = self.masks
        return super_covered_masks(parents, children, self.ancestor_masks, edge.src - 1, edge.dst - 1)

    def is_covered(self, edge):
        """Chickering's condition pa(i) + {i} = pa(j)."""
        edge = self._check_edge(edge)
        self._require_simple_dag('Covered edge test')
        return self.parents(edge.src) | {edge.src} == self.parents(edge.dst)

    def super_covered_edges(self):
        self._require_simple_dag('Super-covered edge search')
        parents, children = self.masks
        return [Edge(i + 1, j + 1)
                for i, j in super_covered_edges_masks(parents, children, self.ancestor_masks)]

    def flip_edge(self, edge):
        edge = self._check_edge(edge)
        if edge.reversed() in self.edges:
            raise GraphError('Cannot flip {}: {} is already present'.format(edge, edge.reversed()))
        return Digraph(self.n, (self.edges - {edge}) | {edge.reversed()})

    def topological_order(self):
        """Linear order with every edge pointing forward; the lowest-index source goes first."""
        order = topological_order_masks(self.masks[0])
        if order is None:
            raise GraphError('Graph has a directed cycle and no topological order')
        return [v + 1 for v in order]

    def completion(self):
        """A simple supergraph with an edge between every pair of nodes.

        DAGs are completed along their topological order; other simple graphs
        orient each missing pair from the lower to the higher node.
        """
        if not self.is_simple:
            raise GraphError('Only simple graphs have a completion')
        if self.is_dag:
            position = {v: pos for pos, v in enumerate(self.topological_order())}
        else:
            position = {v: v for v in range(1, self.n + 1)}
        added = set()
        for i, j in combinations(range(1, self.n + 1), 2):
            if not self.is_adjacent(i, j):
                added.add(Edge(i, j) if position[i] < position[j] else Edge(j, i))
        result = Digraph(self.n, self.edges | added)
        assert len(result.edges) == comb(self.n, 2)
        return result

    def union(self, other):
        if other.n != self.n:
            raise GraphError('Cannot join graphs on {} and {} nodes'.format(self.n, other.n))
        return Digraph(self.n, self.edges | other.edges)

    def add_sink(self):
        """Add a node n+1 with an edge into it from every existing node."""
        sink = self.n + 1
        return Digraph(sink, self.edges | {Edge(v, sink) for v in range(1, sink)})

    def isolate(self, i):
        """Delete every edge into and out of node i."""
        self._check_node(i)
        return Digraph(self.n, frozenset(e for e in self.edges if i not in (e.src, e.dst)))

    def to_networkx(self):
        graph = nx.DiGraph()
        graph.add_nodes_from(range(1, self.n + 1))
        graph.add_edges_from(tuple(e) for e in self.edges)
        return graph


def isomorphic(g1, g2):
    """Whether some relabelling of the nodes of g1 gives g2 (brute force)."""
    if g1.n != g2.n:
        raise GraphError('Cannot compare graphs on {} and {} nodes'.format(g1.n, g2.n))
    if g1.n > MAX_ISOMORPHISM_NODES:
        raise GraphError('Isomorphism test is limited to {} nodes'.format(MAX_ISOMORPHISM_NODES))
    if len(g1.edges) != len(g2.edges):
        return False
    degrees1 = sorted((len(g1.parents(v)), len(g1.children(v))) for v in range(1, g1.n + 1))
    degrees2 = sorted((len(g2.parents(v)), len(g2.children(v))) for v in range(1, g2.n + 1))
    if degrees1 != degrees2:
        return False
    target = g2._pairs
    for perm in permutations(range(1, g1.n + 1)):
        if all((perm[e.src - 1], perm[e.dst - 1]) in target for e in g1.edges):
            return True
    return False


def parse_graph(text):
    """Read an edge-list document.

    The first non-comment line holds the node count n; each further line holds
    one edge "i j". Lines starting with '#' and blank lines are skipped.
    """
    n = None
    edges = set()
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.split('#', 1)[0].strip()
        if not line:
            continue
        fields = line.split()
        try:
            values = [int(field) for field in fields]
        except ValueError:
            raise GraphParseError('line {}: expected integers, got "{}"'.format(number, raw.strip())) from None
        if n is None:
            if len(values) != 1 or values[0] < 1:
                raise GraphParseError('line {}: expected a positive node count, got "{}"'.format(
                    number, raw.strip()))
            n = values[0]
            continue
        if len(values) != 2:
            raise GraphParseError('line {}: expected an edge "i j", got "{}"'.format(number, raw.strip()))
        i, j = values
        if not (1 <= i <= n and 1 <= j <= n):
            raise GraphParseError('line {}: node outside 1..{} in "{}"'.format(number, n, raw.strip()))
        if i == j:
            raise GraphParseError('line {}: explicit self-loop {}->{}; self-loops are implicit'.format(
                number, i, j))
        if (i, j) in edges:
            raise GraphParseError('line {}: duplicate edge {}->{}'.format(number, i, j))
        edges.add((i, j))
    if n is None:
        raise GraphParseError('document has no node count')
    return Digraph(n, frozenset(edges))


def read_graph(file_path):
    """Parse the edge-list file at `file_path`."""
    with open(file_path, 'r') as file_stream:
        text = file_stream.read()
    try:
        return parse_graph(text)
    except GraphParseError as err:
        raise GraphParseError('{}: {}'.format(file_path, err)) from None


def format_graph(g):
    lines = [str(g.n)] + ['{} {}'.format(e.src, e.dst) for e in g.sorted_edges()]
    return '\n'.join(lines) + '\n'


# Mask helpers. Nodes are 0-based here; parents[v] has bit u set for u -> v.

def iter_bits(mask):
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def node_masks(n, code):
    """Parent and child masks of the graph with bit encoding `code`."""
    row_mask = (1 << n) - 1
    parents = [0] * n
    children = [0] * n
    for i in range(n):
        row = (code >> (i * n)) & row_mask
        children[i] = row
        for j in iter_bits(row):
            parents[j] |= 1 << i
    return tuple(parents), tuple(children)


def topological_order_masks(parents):
    """Repeatedly take the lowest-index node without unplaced parents; None if cyclic."""
    n = len(parents)
    placed = 0
    order = []
    while len(order) < n:
        for v in range(n):
            if not (placed >> v) & 1 and not parents[v] & ~placed:
                break
        else:
            return None
        order.append(v)
        placed |= 1 << v
    return order


def ancestor_masks(parents):
    n = len(parents)
    ancestors = [1 << v for v in range(n)]
    order = topological_order_masks(parents)
    if order is not None:
        for v in order:
            for p in iter_bits(parents[v]):
                ancestors[v] |= ancestors[p]
        return tuple(ancestors)
    changed = True
    while changed:
        changed = False
        for v in range(n):
            combined = ancestors[v]
            for p in iter_bits(parents[v]):
                combined |= ancestors[p]
            if combined != ancestors[v]:
                ancestors[v] = combined
                changed = True
    return tuple(ancestors)


def super_covered_masks(parents, children, ancestors, i, j):
    bit_i, bit_j = 1 << i, 1 << j
    if children[i] != children[j] | bit_j or parents[i] | bit_i != parents[j]:
        return False
    for k in iter_bits(parents[j]):
        if children[i] & ~(children[k] | (1 << k)):
            return False
    common = (parents[i] | children[i]) & (parents[j] | children[j])
    reach = ancestors[i] | ancestors[j]
    for k in range(len(parents)):
        if k == i or k == j or (common >> k) & 1:
            continue
        if ancestors[k] & reach:
            return False
    return True


def super_covered_edges_masks(parents, children, ancestors):
    found = []
    for i in range(len(parents)):
        for j in iter_bits(children[i]):
            if super_covered_masks(parents, children, ancestors, i, j):
                found.append((i, j))
    return found


def flip_code(n, code, i, j):
    """Encoding after replacing 0-based edge i -> j by j -> i."""
    return code ^ (1 << (i * n + j)) ^ (1 << (j * n + i))


