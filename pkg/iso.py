"""
Canonical labeling, isomorphism and automorphism utilities
"""

import hashlib
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np
from tqdm import tqdm

from algebra import p_rank
from config import settings
from designs import AffineDesign
from errors import TooLarge
from graph import Graph
from graph6 import encode_graph6

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class CanonicalForm:
    """graph6 bytes of the canonically relabeled graph plus the labeling that produced it.

    ``labeling[v]`` is the canonical position of input vertex v. Equality
    compares the encoding only.
    """

    encoding: bytes
    labeling: Tuple[int, ...] = field(compare=False)

    @property
    def digest(self) -> str:
        return hashlib.sha256(self.encoding).hexdigest()

    def __str__(self) -> str:
        return self.encoding.decode("ascii")


@dataclass(frozen=True)
class AutomorphismGroup:
    order: int
    generators: List[Tuple[int, ...]]

    def as_dict(self):
        return {"order": self.order, "generators": [list(g) for g in self.generators]}


@dataclass
class _Leaf:
    trace: Tuple[bytes, ...]
    cert: bytes
    order: np.ndarray  # order[position] = vertex
    path: Tuple[int, ...]

    @property
    def key(self) -> Tuple[Tuple[bytes, ...], bytes]:
        return self.trace, self.cert


class _UnionFind:
    def __init__(self, n: int):
        self.parent = list(range(n))

    def find(self, x: int) -> int:
        while self.parent[x] != x:
            self.parent[x] = self.parent[self.parent[x]]
            x = self.parent[x]
        return x

    def union(self, x: int, y: int) -> None:
        rx, ry = self.find(x), self.find(y)
        if rx != ry:
            self.parent[max(rx, ry)] = min(rx, ry)


class _Search:
    """Individualization-refinement search tree over one graph.

    Colors are refined by the multiset of (neighbour color, adjacency,
    common-neighbour count) per vertex. The canonical leaf is the maximum of
    (refinement trace, packed upper triangle); automorphisms found on the
    way prune equivalent branches and give |Aut| as a product of orbit sizes
    along the first path.
    """

    def __init__(self, G: Graph, initial_colors: Optional[Sequence[int]] = None):
        self.n = G.n
        self.adjacency = G.adjacency
        A = G.matrix
        cn = G.cn_matrix
        width = int(cn.max()) + 1 if self.n else 1
        self.base = A * width + cn
        self.span = 2 * width
        self.upper = np.triu_indices(self.n, 1)
        if initial_colors is None:
            self.initial = np.zeros(self.n, dtype=np.int64)
        else:
            self.initial = np.unique(np.asarray(initial_colors), return_inverse=True)[1].ravel().astype(np.int64)
        self.generators: List[np.ndarray] = []
        self.first: Optional[_Leaf] = None
        self.best: Optional[_Leaf] = None
        self.orbit_sizes: List[int] = []
        self.nodes = 0

    def _refine(self, colors: np.ndarray) -> Tuple[np.ndarray, bytes]:
        digest = hashlib.sha1()
        count = len(np.unique(colors))
        while True:
            keys = np.sort(colors[None, :] * self.span + self.base, axis=1)
            table, inverse = np.unique(np.column_stack([colors, keys]), axis=0, return_inverse=True)
            digest.update(table.tobytes())
            colors = inverse.ravel().astype(np.int64)
            if table.shape[0] == count:
                return colors, digest.digest()
            count = table.shape[0]

    @staticmethod
    def _individualize(colors: np.ndarray, vertex: int) -> np.ndarray:
        split = colors * 2 + 1
        split[vertex] -= 1
        return np.unique(split, return_inverse=True)[1].ravel().astype(np.int64)

    @staticmethod
    def _target_cell(colors: np.ndarray) -> Optional[List[int]]:
        sizes = np.bincount(colors)
        candidates = np.flatnonzero(sizes > 1)
        if not len(candidates):
            return None
        target = candidates[np.argmin(sizes[candidates])]
        return np.flatnonzero(colors == target).tolist()

    def _orbit_forest(self, prefix: Tuple[int, ...]) -> _UnionFind:
        forest = _UnionFind(self.n)
        for gamma in self.generators:
            if all(gamma[v] == v for v in prefix):
                for x, y in enumerate(gamma.tolist()):
                    forest.union(x, y)
        return forest

    def _worth_exploring(self, trace: Tuple[bytes, ...]) -> bool:
        if self.first is None:
            return True
        depth = len(trace)
        if trace == self.first.trace[:depth]:
            return True
        return trace >= self.best.trace[:depth]

    def _record(self, source: _Leaf, target: np.ndarray) -> bool:
        gamma = np.empty(self.n, dtype=np.int64)
        gamma[source.order] = target
        if not np.array_equal(self.adjacency[np.ix_(gamma, gamma)], self.adjacency):
            logger.error("Equal leaves gave a non-automorphism; discarding it")
            return False
        if not np.array_equal(gamma, np.arange(self.n)):
            self.generators.append(gamma)
        return True

    def _leaf(self, colors: np.ndarray, trace: Tuple[bytes, ...], path: Tuple[int, ...]) -> Optional[int]:
        order = np.argsort(colors)
        cert = np.packbits(self.adjacency[np.ix_(order, order)][self.upper]).tobytes()
        leaf = _Leaf(trace, cert, order, path)
        if self.first is None:
            self.first = self.best = leaf
            return None
        if leaf.key == self.first.key:
            self._record(self.first, order)
            common = 0
            while common < len(path) and path[common] == self.first.path[common]:
                common += 1
            return common
        if leaf.key == self.best.key:
            self._record(self.best, order)
        elif leaf.key > self.best.key:
            self.best = leaf
        return None

    def _explore(self, colors: np.ndarray, trace: Tuple[bytes, ...], path: Tuple[int, ...]) -> Optional[int]:
        self.nodes += 1
        cell = self._target_cell(colors)
        if cell is None:
            return self._leaf(colors, trace, path)
        depth = len(path)
        explored: List[int] = []
        for vertex in cell:
            if explored:
                forest = self._orbit_forest(path)
                root = forest.find(vertex)
                if any(forest.find(u) == root for u in explored):
                    continue
            child, digest = self._refine(self._individualize(colors, vertex))
            child_trace = trace + (digest,)
            explored.append(vertex)
            if not self._worth_exploring(child_trace):
                continue
            jump = self._explore(child, child_trace, path + (vertex,))
            if jump is not None and jump < depth:
                return jump

        if self.first.path[:depth] == path:
            forest = self._orbit_forest(path)
            root = forest.find(self.first.path[depth])
            size = sum(1 for v in cell if forest.find(v) == root)
            self.orbit_sizes.append(size)
            logger.debug(f"first path depth {depth}: cell of {len(cell)}, orbit {size}")
        return None

    def run(self) -> "_Search":
        if self.n == 0:
            self.first = self.best = _Leaf((), b"", np.zeros(0, dtype=np.int64), ())
            return self
        colors, digest = self._refine(self.initial)
        self._explore(colors, (digest,), ())
        return self

    @property
    def order(self) -> int:
        total = 1
        for size in self.orbit_sizes:
            total *= size
        return total

    def canonical(self) -> CanonicalForm:
        order = self.best.order
        labeling = np.empty(self.n, dtype=np.int64)
        labeling[order] = np.arange(self.n)
        encoding = encode_graph6(self.adjacency[np.ix_(order, order)])
        return CanonicalForm(encoding, tuple(int(x) for x in labeling))


def _search(G: Graph, initial_colors: Optional[Sequence[int]] = None) -> _Search:
    if G.n > settings.CANONICAL_MAX_VERTICES:
        raise TooLarge(f"canonical labeling is capped at {settings.CANONICAL_MAX_VERTICES} vertices, got {G.n}")
    search = _Search(G, initial_colors).run()
    logger.debug(f"search on {G.n} vertices: {search.nodes} nodes, {len(search.generators)} generators")
    return search


def canonical_form(G: Graph, initial_colors: Optional[Sequence[int]] = None) -> CanonicalForm:
    """Relabeling-invariant graph6 encoding of G (respecting vertex colors if given)."""
    return _search(G, initial_colors).canonical()


def fingerprint(G: Graph) -> Tuple:
    """Cheap invariants: n, degree sequence, common-neighbour multisets, closed-walk counts."""
    A = G.matrix
    cn = G.cn_matrix
    upper = np.triu_indices(G.n, 1)
    adjacent = G.adjacency[upper]
    walks = []
    power = A
    for _ in range(3):
        power = power @ A
        walks.append(int(np.trace(power)))
    return (
        G.n,
        tuple(sorted(G.degrees.tolist())),
        tuple(np.sort(cn[upper][adjacent]).tolist()),
        tuple(np.sort(cn[upper][~adjacent]).tolist()),
        tuple(walks),
    )


def are_isomorphic(G1: Graph, G2: Graph) -> bool:
    if fingerprint(G1) != fingerprint(G2):
        return False
    return canonical_form(G1) == canonical_form(G2)


def automorphism_group(G: Graph, initial_colors: Optional[Sequence[int]] = None) -> AutomorphismGroup:
    """|Aut(G)| with generators, each verified to preserve adjacency."""
    if G.n > settings.AUT_MAX_VERTICES:
        logger.warning(f"automorphism search on {G.n} vertices is best-effort above {settings.AUT_MAX_VERTICES}")
    search = _search(G, initial_colors)
    generators = [tuple(int(x) for x in gamma) for gamma in search.generators]
    logger.info(f"|Aut| = {search.order} for {G!r} ({len(generators)} generators)")
    return AutomorphismGroup(search.order, generators)


def automorphism_group_order(G: Graph) -> int:
    return automorphism_group(G).order


@dataclass
class IsoClass:
    representative: int
    members: List[int]
    canonical_hash: str
    aut_order: int
    rank2: int
    rank3: int

    def as_dict(self):
        return {
            "representative": self.representative,
            "members": self.members,
            "size": len(self.members),
            "canonical_hash": self.canonical_hash,
            "aut_order": self.aut_order,
            "rank2": self.rank2,
            "rank3": self.rank3,
        }


def _classify_entry(adjacency: np.ndarray) -> Tuple[Tuple[int, int], bytes, int]:
    G = Graph(adjacency, validate=False)
    search = _search(G)
    return (p_rank(G, 2), p_rank(G, 3)), search.canonical().encoding, search.order


def classify(graphs: Sequence[Graph], workers: Optional[int] = None, progress: bool = False) -> List[IsoClass]:
    """Partition graphs into isomorphism classes, keyed by (2-rank, 3-rank, canonical form).

    Classes are ordered by their representative, the lowest input index.
    """
    workers = settings.CLASSIFY_WORKERS if workers is None else workers
    matrices = [G.adjacency for G in graphs]
    if workers > 0 and len(matrices) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            entries = list(tqdm(pool.map(_classify_entry, matrices), total=len(matrices),
                                desc="classify", disable=not progress))
    else:
        entries = [_classify_entry(m) for m in tqdm(matrices, desc="classify", disable=not progress)]

    classes: dict = {}
    for index, (ranks, encoding, order) in enumerate(entries):
        key = (len(matrices[index]), ranks, encoding)
        if key not in classes:
            classes[key] = IsoClass(index, [], hashlib.sha256(encoding).hexdigest(), order, ranks[0], ranks[1])
        classes[key].members.append(index)
    result = sorted(classes.values(), key=lambda c: c.representative)
    logger.info(f"Classified {len(graphs)} graphs into {len(result)} classes")
    return result


def incidence_graph(D: AffineDesign) -> Tuple[Graph, np.ndarray]:
    """Point-block incidence graph with colors 0 for points and 1 for blocks."""
    incidence = D.incidence_matrix()
    v, b = incidence.shape
    adjacency = np.zeros((v + b, v + b), dtype=bool)
    adjacency[:v, v:] = incidence
    adjacency[v:, :v] = incidence.T
    colors = np.concatenate([np.zeros(v, dtype=np.int64), np.ones(b, dtype=np.int64)])
    return Graph(adjacency), colors


def designs_isomorphic(D1: AffineDesign, D2: AffineDesign) -> bool:
    """Isomorphism of designs as incidence structures (class numbering ignored)."""
    if (D1.q, D1.r, D1.v, D1.m) != (D2.q, D2.r, D2.v, D2.m):
        return False
    G1, colors1 = incidence_graph(D1)
    G2, colors2 = incidence_graph(D2)
    return canonical_form(G1, colors1) == canonical_form(G2, colors2)
