"""
Minimal covers of a support set by hypercube edges.

A pair cover is a list of Hamming-1 pairs whose members contain every
support state. The minimal size is |S| - ν(S), where ν is the maximum
matching of the hypercube subgraph induced by S: matched edges cover two
states each and every remaining state needs a pair of its own.
"""

import logging
from collections import deque
from collections.abc import Iterable
from dataclasses import dataclass
from pathlib import Path
from typing import Any

from ..core.bitvector import BitVector, hamming
from ..core.distribution import DiscreteDistribution
from ..core.serialization import dump_document
from ..systems.error_handling import (
    ArgumentError,
    DegenerateDistributionError,
    DimensionError,
    synthesis_step,
)
from ..utils.constants import SCHEMA_COVER

logger = logging.getLogger(__name__)

_UNREACHED = -1


@dataclass(frozen=True)
class HypercubeGraph:
    """
    The hypercube subgraph induced by a set of states.

    Attributes:
        n: Number of units
        vertices: State indices in ascending order
        adjacency: Ascending neighbour indices for every vertex
    """

    n: int
    vertices: tuple[int, ...]
    adjacency: dict[int, tuple[int, ...]]

    @property
    def even(self) -> tuple[int, ...]:
        """Vertices of even popcount parity."""
        return tuple(v for v in self.vertices if not v.bit_count() & 1)

    @property
    def odd(self) -> tuple[int, ...]:
        return tuple(v for v in self.vertices if v.bit_count() & 1)

    def edges(self) -> list[tuple[int, int]]:
        return [(u, v) for u in self.vertices for v in self.adjacency[u] if u < v]


@dataclass(frozen=True)
class PairCover:
    """
    Hamming-1 pairs whose union covers a support set.

    Attributes:
        n: Number of units
        pairs: (lower, higher) index-ordered pairs, sorted
    """

    n: int
    pairs: tuple[tuple[BitVector, BitVector], ...]

    def __post_init__(self) -> None:
        for u, v in self.pairs:
            if u.n != self.n or v.n != self.n:
                raise DimensionError(f"pair ({u}, {v}) does not have {self.n} units")
            if hamming(u, v) != 1:
                raise ArgumentError(
                    f"pair ({u}, {v}) differs in {hamming(u, v)} units"
                )

    @property
    def k(self) -> int:
        return len(self.pairs)

    def members(self) -> set[int]:
        return {state.index for pair in self.pairs for state in pair}

    def covers(self, support: Iterable[BitVector]) -> bool:
        members = self.members()
        return all(state.index in members for state in support)

    def to_dict(self) -> dict[str, Any]:
        return {
            "schema": SCHEMA_COVER,
            "n": self.n,
            "k": self.k,
            "pairs": [[u.index, v.index] for u, v in self.pairs],
        }


def write_cover(cover: PairCover, path: str | Path) -> None:
    dump_document(cover.to_dict(), path)


def induced_hypercube_graph(support: Iterable[BitVector]) -> HypercubeGraph:
    """
    Build the subgraph of {0,1}^n induced by a support set.

    Raises:
        DegenerateDistributionError: If the support is empty
        DimensionError: If the states have different lengths
    """
    states = list(support)
    if not states:
        raise DegenerateDistributionError("support is empty")
    n = states[0].n
    if any(state.n != n for state in states):
        raise DimensionError("support states have mixed lengths")
    vertices = tuple(sorted({state.index for state in states}))
    present = set(vertices)
    adjacency: dict[int, tuple[int, ...]] = {}
    for u in vertices:
        neighbours = (u ^ (1 << bit) for bit in range(n))
        adjacency[u] = tuple(sorted(w for w in neighbours if w in present))
    return HypercubeGraph(n, vertices, adjacency)


def _layer(
    graph: HypercubeGraph,
    left: tuple[int, ...],
    match_left: dict[int, int | None],
    match_right: dict[int, int | None],
    dist: dict[int, int],
) -> bool:
    """Breadth-first layering from the free left vertices."""
    queue: deque[int] = deque()
    for u in left:
        if match_left[u] is None:
            dist[u] = 0
            queue.append(u)
        else:
            dist[u] = _UNREACHED
    found = False
    while queue:
        u = queue.popleft()
        for v in graph.adjacency[u]:
            w = match_right[v]
            if w is None:
                found = True
            elif dist[w] == _UNREACHED:
                dist[w] = dist[u] + 1
                queue.append(w)
    return found


def _augment(
    graph: HypercubeGraph,
    root: int,
    match_left: dict[int, int | None],
    match_right: dict[int, int | None],
    dist: dict[int, int],
) -> bool:
    """Iterative depth-first search for one augmenting path from root."""
    stack = [(root, iter(graph.adjacency[root]))]
    via: list[int] = []
    while stack:
        u, neighbours = stack[-1]
        for v in neighbours:
            w = match_right[v]
            if w is None:
                via.append(v)
                for (left, _), right in zip(stack, via, strict=True):
                    match_left[left] = right
                    match_right[right] = left
                return True
            if dist[w] == dist[u] + 1:
                via.append(v)
                stack.append((w, iter(graph.adjacency[w])))
                break
        else:
            dist[u] = _UNREACHED
            stack.pop()
            if via:
                via.pop()
    return False


@synthesis_step("max_matching")
def max_matching(graph: HypercubeGraph) -> tuple[tuple[int, int], ...]:
    """
    Maximum-cardinality matching of an induced hypercube graph.

    Hopcroft-Karp phases over the parity bipartition: even states on the
    left, odd on the right, vertices and neighbours in ascending order.

    Returns:
        Matched edges as (lower, higher) index pairs, sorted
    """
    left = graph.even
    match_left: dict[int, int | None] = dict.fromkeys(left)
    match_right: dict[int, int | None] = dict.fromkeys(graph.odd)
    dist: dict[int, int] = {}
    phases = 0
    while _layer(graph, left, match_left, match_right, dist):
        phases += 1
        for u in left:
            if match_left[u] is None:
                _augment(graph, u, match_left, match_right, dist)
    edges = sorted(
        (min(u, v), max(u, v)) for u, v in match_left.items() if v is not None
    )
    logger.debug(f"Matching of size {len(edges)} after {phases} phases")
    return tuple(edges)


def pair_cover_for_support(n: int, support: Iterable[BitVector]) -> PairCover:
    """
    Minimal pair cover of an explicit support set.

    Matched states are paired together; each unmatched state is paired
    with the neighbour that differs in unit 1.
    """
    graph = induced_hypercube_graph(support)
    if graph.n != n:
        raise DimensionError(f"support has {graph.n} units, expected {n}")
    matching = max_matching(graph)
    matched = {state for edge in matching for state in edge}
    pairs = list(matching)
    for u in graph.vertices:
        if u not in matched:
            partner = u ^ 1
            pairs.append((min(u, partner), max(u, partner)))
    pairs.sort()
    cover = PairCover(
        n, tuple((BitVector(n, u), BitVector(n, v)) for u, v in pairs)
    )
    logger.info(
        f"Pair cover: |S|={len(graph.vertices)}, matching={len(matching)}, k={cover.k}"
    )
    return cover


def minimal_pair_cover(p: DiscreteDistribution) -> PairCover:
    """
    Minimal pair cover of a distribution's support.

    Raises:
        DegenerateDistributionError: If the support is empty
    """
    support = p.support()
    if not support:
        raise DegenerateDistributionError("distribution has empty support")
    return pair_cover_for_support(p.n, support)
