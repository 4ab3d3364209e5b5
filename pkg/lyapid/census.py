"""
Exhaustive census of labeled DAGs and their equivalence classes.

DAGs are enumerated as all orientation assignments (absent, i -> j, j -> i)
of the vertex pairs, filtered by acyclicity. Work is split into chunks by the
presence pattern of the first few pairs; DAGs with one skeleton always land
in one chunk, so Lyapunov orbits and Markov signatures are counted inside a
chunk and the chunk results are simply added up.
"""

from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from itertools import combinations, product
import logging
from math import comb
import time
from typing import ClassVar

from tqdm import tqdm

from .equivalence import FourNodeType, classify_four_node, equivalence_class
from .graph import (MAX_ENCODED_NODES, Digraph, ancestor_masks, flip_code, iter_bits, node_masks,
                    super_covered_edges_masks, topological_order_masks)
from .lyapunov import InconsistencyError

log = logging.getLogger(__name__)

MAX_CENSUS_NODES = 6
DEFAULT_PREFIX_PAIRS = 8


@dataclass
class CensusReport:
    """Counts for one node count, in the column order of the published table."""

    n: int
    dag_count: int
    lyap_class_count: int
    lyap_identifiable_count: int
    markov_class_count: int
    markov_identifiable_count: int
    runtime_seconds: float = 0.0
    threads: int = 1

    COLUMNS: ClassVar[tuple] = ('n', 'DAGs', 'Lyapunov distinct', 'Lyapunov identifiable',
                                'Bayesian distinct', 'Bayesian identifiable')

    def counts(self):
        return (self.n, self.dag_count, self.lyap_class_count, self.lyap_identifiable_count,
                self.markov_class_count, self.markov_identifiable_count)

    def as_dict(self):
        return asdict(self)

    @classmethod
    def csv_header(cls):
        return ','.join(cls.COLUMNS)

    def csv_row(self):
        return ','.join(str(x) for x in self.counts())


@dataclass
class FourNodeTypeRow:
    """Labeled classes of one non-identifiable 4-node type."""

    kind: FourNodeType
    classes: int = 0
    class_sizes: tuple = ()
    dags: int = 0
    representatives: set = field(default_factory=set, repr=False)


def _pair_bits(n):
    return [(1 << (i * n + j), 1 << (j * n + i)) for i, j in combinations(range(n), 2)]


def _dag_masks(n, prefix, pattern):
    """(code, parents, children) for every DAG whose first `prefix` pairs match `pattern`."""
    options = []
    for p, (forward, backward) in enumerate(_pair_bits(n)):
        if p < prefix:
            options.append((forward, backward) if (pattern >> p) & 1 else (0,))
        else:
            options.append((0, forward, backward))
    for choice in product(*options):
        code = sum(choice)
        parents, children = node_masks(n, code)
        if topological_order_masks(parents) is not None:
            yield code, parents, children


def _check_census_range(n, limit):
    if not 1 <= n <= limit:
        raise ValueError('Node count must be between 1 and {}, got {}'.format(limit, n))


def enumerate_dag_codes(n):
    _check_census_range(n, MAX_ENCODED_NODES)
    for code, _, _ in _dag_masks(n, 0, 0):
        yield code


def enumerate_dags(n):
    """Every labeled DAG on n nodes, exactly once."""
    for code in enumerate_dag_codes(n):
        yield Digraph.from_encoding(n, code)


def markov_signature(n, code, parents, children):
    """Skeleton plus sorted v-structures, as a hashable value."""
    adjacent = [parents[v] | children[v] for v in range(n)]
    skeleton = code
    for v in range(n):
        skeleton |= parents[v] << (v * n)
    colliders = []
    for k in range(n):
        for i, j in combinations(list(iter_bits(parents[k])), 2):
            if not (adjacent[i] >> j) & 1:
                colliders.append((i, k, j))
    return skeleton, tuple(colliders)


def flip_orbit(n, code, flips):
    """Encodings reachable from `code` by super-covered flips."""
    orbit = {code}
    frontier = [(code, flips)]
    while frontier:
        current, edges = frontier.pop()
        for i, j in edges:
            flipped = flip_code(n, current, i, j)
            if flipped in orbit:
                continue
            parents, children = node_masks(n, flipped)
            if topological_order_masks(parents) is None:
                raise InconsistencyError('Super-covered flip of {}->{} created a cycle'.format(i + 1, j + 1))
            orbit.add(flipped)
            frontier.append((flipped, super_covered_edges_masks(parents, children, ancestor_masks(parents))))
    return orbit


def census_chunk(task):
    """Counts for the DAGs of one presence pattern."""
    n, prefix, pattern = task
    signatures = Counter()
    visited = set()
    tally = Counter()
    for code, parents, children in _dag_masks(n, prefix, pattern):
        tally['dags'] += 1
        signature = markov_signature(n, code, parents, children)
        signatures[signature] += 1
        flips = super_covered_edges_masks(parents, children, ancestor_masks(parents))
        if not flips:
            tally['lyap_identifiable'] += 1
            tally['lyap_classes'] += 1
            continue
        if code in visited:
            continue
        orbit = flip_orbit(n, code, flips)
        visited |= orbit
        tally['lyap_classes'] += 1
        for member in orbit:
            member_parents, member_children = node_masks(n, member)
            if markov_signature(n, member, member_parents, member_children) != signature:
                raise InconsistencyError('Lyapunov class of {} is not inside one Markov class'.format(code))
    tally['markov_classes'] += len(signatures)
    tally['markov_identifiable'] += sum(1 for count in signatures.values() if count == 1)
    return tally


def run_census(n, threads=1, prefix_pairs=DEFAULT_PREFIX_PAIRS, progress=False):
    """Count DAGs, Lyapunov classes and Markov classes on n nodes.

    :param threads: number of worker processes; 1 runs in this process
    :param prefix_pairs: pairs whose presence pattern defines one work chunk
    :param progress: show a progress bar on stderr
    """
    _check_census_range(n, MAX_CENSUS_NODES)
    if threads < 1:
        raise ValueError('Worker count must be positive, got {}'.format(threads))
    prefix = min(comb(n, 2), prefix_pairs)
    tasks = [(n, prefix, pattern) for pattern in range(1 << prefix)]
    log.info('Census for n=%d: %d chunks on %d worker(s)', n, len(tasks), threads)
    start = time.perf_counter()
    totals = Counter()
    bar_options = dict(total=len(tasks), disable=not progress, desc='n={}'.format(n), unit='chunk')
    if threads == 1:
        for tally in tqdm(map(census_chunk, tasks), **bar_options):
            totals.update(tally)
    else:
        with ProcessPoolExecutor(max_workers=threads) as executor:
            for tally in tqdm(executor.map(census_chunk, tasks), **bar_options):
                totals.update(tally)
    report = CensusReport(n=n,
                          dag_count=totals['dags'],
                          lyap_class_count=totals['lyap_classes'],
                          lyap_identifiable_count=totals['lyap_identifiable'],
                          markov_class_count=totals['markov_classes'],
                          markov_identifiable_count=totals['markov_identifiable'],
                          runtime_seconds=time.perf_counter() - start,
                          threads=threads)
    if report.lyap_class_count < report.markov_class_count:
        raise InconsistencyError('Fewer Lyapunov classes than Markov classes: {}'.format(report))
    log.info('Census for n=%d finished in %.2fs: %s', n, report.runtime_seconds, report.csv_row())
    return report


def four_node_breakdown():
    """Labeled equivalence classes of the non-identifiable 4-node DAGs, by type."""
    rows = {kind: FourNodeTypeRow(kind) for kind in FourNodeType if kind is not FourNodeType.IDENTIFIABLE}
    for g in enumerate_dags(4):
        kind = classify_four_node(g)
        if kind is FourNodeType.IDENTIFIABLE:
            if g.super_covered_edges():
                raise InconsistencyError('{!r} has a super-covered edge but matches no type'.format(g))
            continue
        row = rows[kind]
        row.dags += 1
        members = equivalence_class(g)
        if members.representative not in row.representatives:
            row.representatives.add(members.representative)
            row.classes += 1
            row.class_sizes = tuple(sorted(set(row.class_sizes) | {len(members)}))
    return rows
