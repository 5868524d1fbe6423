"""
Graph representation and combinatorial certification
"""

import logging
from dataclasses import dataclass, field
from functools import cached_property
from typing import Dict, List, Optional, Sequence, Tuple

import networkx as nx
import numpy as np

from errors import (
    AmbiguousPartition,
    Degenerate,
    Disconnected,
    InfeasibleParameters,
    NoPartition,
    NotDistanceRegular,
    NotDivisible,
    NotRegular,
    NotSrg,
    SameVertex,
    SpecError,
    UnknownFixture,
    VertexOutOfRange,
)

logger = logging.getLogger(__name__)


class InvalidGraph(SpecError):
    pass


class Graph:
    """Simple undirected graph on vertices 0..n-1.

    The adjacency matrix is kept as a read-only boolean array; bit rows
    (Python ints) back the pairwise intersection queries. ``origin`` records,
    for constructed graphs, the index of the point set each vertex came from.
    """

    def __init__(self, adjacency, origin: Optional[Sequence[int]] = None, validate: bool = True):
        adjacency = np.array(adjacency, dtype=bool)
        if validate:
            if adjacency.ndim != 2 or adjacency.shape[0] != adjacency.shape[1]:
                raise InvalidGraph(f"adjacency must be square, got shape {adjacency.shape}")
            if not np.array_equal(adjacency, adjacency.T):
                raise InvalidGraph("adjacency is not symmetric")
            if np.any(np.diagonal(adjacency)):
                raise InvalidGraph("adjacency has loops")
        adjacency.setflags(write=False)
        self.adjacency = adjacency
        self.origin = None if origin is None else np.asarray(origin, dtype=np.int64)

    @property
    def n(self) -> int:
        return self.adjacency.shape[0]

    def __len__(self) -> int:
        return self.n

    def __eq__(self, other) -> bool:
        return isinstance(other, Graph) and np.array_equal(self.adjacency, other.adjacency)

    def __hash__(self) -> int:
        return hash(np.packbits(self.adjacency).tobytes())

    def __repr__(self) -> str:
        return f"Graph(n={self.n}, edges={self.edge_count})"

    @cached_property
    def rows(self) -> List[int]:
        """Neighbourhoods as bitsets: bit v of rows[u] is set iff u ~ v."""
        packed = np.packbits(self.adjacency, axis=1, bitorder="little")
        return [int.from_bytes(row.tobytes(), "little") for row in packed]

    @cached_property
    def degrees(self) -> np.ndarray:
        return self.adjacency.sum(axis=1)

    @cached_property
    def matrix(self) -> np.ndarray:
        """Adjacency as int64 0/1 matrix."""
        return self.adjacency.astype(np.int64)

    @cached_property
    def cn_matrix(self) -> np.ndarray:
        """Common-neighbour counts for every ordered pair; the diagonal holds degrees."""
        return self.matrix @ self.matrix

    @property
    def edge_count(self) -> int:
        return int(self.adjacency.sum()) // 2

    def is_regular(self) -> bool:
        return self.n == 0 or bool(np.all(self.degrees == self.degrees[0]))

    def is_complete(self) -> bool:
        return self.edge_count == self.n * (self.n - 1) // 2

    def is_edgeless(self) -> bool:
        return self.edge_count == 0

    def neighbours(self, v: int) -> np.ndarray:
        return np.flatnonzero(self.adjacency[v])

    def relabel(self, perm: Sequence[int]) -> "Graph":
        """Graph in which vertex v is renamed perm[v]."""
        perm = np.asarray(perm, dtype=np.int64)
        if sorted(perm.tolist()) != list(range(self.n)):
            raise InvalidGraph("relabeling is not a permutation of the vertices")
        inverse = np.argsort(perm)
        origin = None if self.origin is None else self.origin[inverse]
        return Graph(self.adjacency[np.ix_(inverse, inverse)], origin=origin, validate=False)

    def to_networkx(self) -> nx.Graph:
        return nx.from_numpy_array(self.matrix)

    @classmethod
    def from_networkx(cls, nx_graph: nx.Graph) -> "Graph":
        nodes = sorted(nx_graph.nodes())
        return cls(nx.to_numpy_array(nx_graph, nodelist=nodes, dtype=int) != 0)

    @classmethod
    def from_edges(cls, n: int, edges) -> "Graph":
        adjacency = np.zeros((n, n), dtype=bool)
        for u, v in edges:
            adjacency[u, v] = adjacency[v, u] = True
        return cls(adjacency)


def common_neighbours(G: Graph, x: int, y: int) -> int:
    """|N(x) & N(y)| by bitset intersection."""
    for vertex in (x, y):
        if not 0 <= vertex < G.n:
            raise VertexOutOfRange(f"vertex {vertex} not in 0..{G.n - 1}")
    if x == y:
        raise SameVertex(f"common_neighbours needs two distinct vertices, got {x} twice")
    return bin(G.rows[x] & G.rows[y]).count("1")


@dataclass(frozen=True)
class SrgParams:
    v: int
    k: int
    lam: int
    mu: int

    def as_tuple(self) -> Tuple[int, int, int, int]:
        return (self.v, self.k, self.lam, self.mu)

    def complement(self) -> "SrgParams":
        v, k, lam, mu = self.as_tuple()
        return SrgParams(v, v - k - 1, v - 2 * k + mu - 2, v - 2 * k + lam)


def srg_complement_params(params: SrgParams) -> SrgParams:
    """(v, v-k-1, v-2k+mu-2, v-2k+lam)."""
    return params.complement()


def _split_surd(square: int) -> Tuple[int, int]:
    """Write sqrt(square) as c*sqrt(r) with r squarefree."""
    coefficient, radicand = 1, square
    factor = 2
    while factor * factor <= radicand:
        while radicand % (factor * factor) == 0:
            radicand //= factor * factor
            coefficient *= factor
        factor += 1
    return coefficient, radicand


@dataclass(frozen=True)
class MultiplicitySplit:
    """One solution of the multiplicity constraints.

    ``f_free``/``g_free`` mark a zero eigenvalue pair whose split does not
    matter; the whole multiplicity is then reported in f1 (resp. g1).
    """

    f1: int
    f2: int
    g1: int
    g2: int
    f_free: bool = False
    g_free: bool = False


@dataclass(frozen=True)
class DdgParams:
    """Certified (v, k, lambda1, lambda2, m, n); m = 1 encodes an SRG with lambda = mu."""

    v: int
    k: int
    lambda1: int
    lambda2: int
    m: int
    n: int

    def __post_init__(self):
        if self.m * self.n != self.v:
            raise InfeasibleParameters(f"m*n = {self.m * self.n} differs from v = {self.v}")
        if self.theta_f_sq < 0 or self.theta_g_sq < 0:
            raise InfeasibleParameters(
                f"negative eigenvalue square: k-lambda1 = {self.theta_f_sq}, k^2-lambda2*v = {self.theta_g_sq}"
            )

    def as_tuple(self) -> Tuple[int, ...]:
        return (self.v, self.k, self.lambda1, self.lambda2, self.m, self.n)

    @property
    def is_srg(self) -> bool:
        return self.m == 1 or self.n == 1

    @property
    def theta_f_sq(self) -> int:
        return self.k - self.lambda1

    @property
    def theta_g_sq(self) -> int:
        return self.k * self.k - self.lambda2 * self.v

    @property
    def f_total(self) -> int:
        return self.m * (self.n - 1)

    @property
    def g_total(self) -> int:
        return self.m - 1

    def srg(self) -> SrgParams:
        return SrgParams(self.v, self.k, self.lambda1, self.lambda1 if self.m == 1 else self.lambda2)

    def multiplicity_splits(self) -> List[MultiplicitySplit]:
        """Every (f1, f2, g1, g2) satisfying the sum constraints and zero trace.

        The trace condition k + (f1-f2)*theta_f + (g1-g2)*theta_g = 0 is
        solved exactly by grouping the surds by squarefree radicand.
        """
        F, G = self.f_total, self.g_total
        f_free, g_free = self.theta_f_sq == 0 or F == 0, self.theta_g_sq == 0 or G == 0
        cf, rf = _split_surd(self.theta_f_sq) if self.theta_f_sq else (0, 1)
        cg, rg = _split_surd(self.theta_g_sq) if self.theta_g_sq else (0, 1)

        f_diffs = [F] if f_free else range(-F, F + 1, 2)
        g_diffs = [G] if g_free else range(-G, G + 1, 2)
        splits = []
        for a in f_diffs:
            for b in g_diffs:
                totals: Dict[int, int] = {1: self.k}
                if not f_free:
                    totals[rf] = totals.get(rf, 0) + a * cf
                if not g_free:
                    totals[rg] = totals.get(rg, 0) + b * cg
                if all(value == 0 for value in totals.values()):
                    splits.append(MultiplicitySplit((F + a) // 2, (F - a) // 2, (G + b) // 2, (G - b) // 2,
                                                    f_free, g_free))
        return splits


@dataclass(frozen=True)
class Partition:
    """Vertex classes given as a label per vertex, normalised by first appearance."""

    labels: Tuple[int, ...]

    @classmethod
    def from_labels(cls, labels: Sequence[int]) -> "Partition":
        remap: Dict[int, int] = {}
        normalised = []
        for label in labels:
            label = int(label)
            if label not in remap:
                remap[label] = len(remap)
            normalised.append(remap[label])
        return cls(tuple(normalised))

    @classmethod
    def from_classes(cls, classes: Sequence[Sequence[int]], n: int) -> "Partition":
        labels = [-1] * n
        for index, members in enumerate(classes):
            for v in members:
                labels[v] = index
        if -1 in labels:
            raise SpecError("classes do not cover every vertex")
        return cls.from_labels(labels)

    @property
    def m(self) -> int:
        return max(self.labels) + 1 if self.labels else 0

    @property
    def classes(self) -> List[List[int]]:
        result: List[List[int]] = [[] for _ in range(self.m)]
        for v, label in enumerate(self.labels):
            result[label].append(v)
        return result

    @property
    def sizes(self) -> List[int]:
        return [len(members) for members in self.classes]


@dataclass(frozen=True)
class PartitionResult:
    params: DdgParams
    partition: Partition
    splits: List[MultiplicitySplit] = field(default_factory=list)
    alternatives: List[Tuple[int, Partition]] = field(default_factory=list)


def _check_basic(G: Graph) -> None:
    if G.n < 2:
        raise Degenerate(f"graph on {G.n} vertices")
    if not G.is_regular():
        bad = int(np.flatnonzero(G.degrees != G.degrees[0])[0])
        raise NotRegular(
            f"vertex {bad} has degree {int(G.degrees[bad])}, vertex 0 has {int(G.degrees[0])}",
            {"vertex": bad, "degree": int(G.degrees[bad]), "expected": int(G.degrees[0])},
        )
    if G.is_complete():
        raise Degenerate("graph is complete")
    if G.is_edgeless():
        raise Degenerate("graph is edgeless")


def _first_mismatch(mask: np.ndarray, values: np.ndarray, expected: int) -> Tuple[int, int]:
    rows, cols = np.nonzero(mask & (values != expected))
    return int(rows[0]), int(cols[0])


def verify_ddg(G: Graph, partition: Optional[Partition] = None) -> PartitionResult:
    """Certify G as a divisible design graph by exhaustive pair counting."""
    _check_basic(G)
    if partition is None:
        candidates = discover_partition(G)
        lambda1, partition = candidates[0]
        logger.debug(f"Using discovered partition with lambda1={lambda1}, m={partition.m}")
        alternatives = candidates[1:]
    else:
        alternatives = []
        if len(partition.labels) != G.n:
            raise SpecError(f"partition covers {len(partition.labels)} vertices, graph has {G.n}")

    sizes = set(partition.sizes)
    if len(sizes) != 1:
        raise NotDivisible(f"class sizes differ: {sorted(sizes)}", details={"sizes": partition.sizes})
    n_class = sizes.pop()
    labels = np.asarray(partition.labels)
    cn = G.cn_matrix
    off_diagonal = ~np.eye(G.n, dtype=bool)
    same = (labels[:, None] == labels[None, :]) & off_diagonal
    cross = (labels[:, None] != labels[None, :])

    lambda1 = lambda2 = None
    if same.any():
        lambda1 = int(cn[same][0])
        if np.any(cn[same] != lambda1):
            x, y = _first_mismatch(same, cn, lambda1)
            raise NotDivisible(f"same-class pair ({x},{y}) has {int(cn[x, y])} common neighbours, expected {lambda1}",
                               witness=(x, y))
    if cross.any():
        lambda2 = int(cn[cross][0])
        if np.any(cn[cross] != lambda2):
            x, y = _first_mismatch(cross, cn, lambda2)
            raise NotDivisible(f"cross-class pair ({x},{y}) has {int(cn[x, y])} common neighbours, expected {lambda2}",
                               witness=(x, y))
    if lambda1 is None:
        lambda1 = lambda2
    if lambda2 is None:
        lambda2 = lambda1

    params = DdgParams(G.n, int(G.degrees[0]), lambda1, lambda2, partition.m, n_class)
    splits = params.multiplicity_splits()
    if not splits:
        raise InfeasibleParameters(f"no integral multiplicities for {params.as_tuple()}")
    logger.info(f"Certified DDG {params.as_tuple()}")
    return PartitionResult(params, partition, splits, alternatives)


def discover_partition(G: Graph, strict: bool = False) -> List[Tuple[int, Partition]]:
    """All (lambda1, partition) interpretations of G as a DDG, preferred one first.

    A candidate value lambda1 is valid when {x~y : cn(x,y) = lambda1} plus the
    identity is an equivalence relation with equal classes and a constant
    count across classes. Proper interpretations (m > 1, n > 1) come first,
    then lexicographically smallest normalised labels.
    """
    _check_basic(G)
    cn = G.cn_matrix
    n = G.n
    off_diagonal = ~np.eye(n, dtype=bool)
    candidates: List[Tuple[int, Partition]] = []
    for value in np.unique(cn[off_diagonal]):
        relation = (cn == value) | ~off_diagonal
        classes = np.unique(relation, axis=0)
        class_sizes = classes.sum(axis=1)
        if not np.array_equal(classes.sum(axis=0), np.ones(n)):
            continue
        if len(set(class_sizes.tolist())) != 1:
            continue
        cross_values = np.unique(cn[~relation])
        if len(cross_values) > 1:
            continue
        labels = np.argmax(classes, axis=0)
        candidates.append((int(value), Partition.from_labels(labels)))

    if not candidates:
        raise NoPartition("no common-neighbour value induces a canonical partition")

    def preference(candidate):
        _, partition = candidate
        proper = partition.m > 1 and len(partition.labels) // partition.m > 1
        return (not proper, partition.labels)

    candidates.sort(key=preference)
    if len(candidates) > 1:
        logger.warning(f"{len(candidates)} canonical partitions found; using lambda1={candidates[0][0]}")
        if strict:
            raise AmbiguousPartition("several canonical partitions", candidates)
    return candidates


def verify_srg(G: Graph) -> SrgParams:
    """Exhaustive check of the lambda/mu conditions."""
    _check_basic(G)
    cn = G.cn_matrix
    adjacent = G.adjacency
    non_adjacent = ~adjacent & ~np.eye(G.n, dtype=bool)
    lam = int(cn[adjacent][0])
    if np.any(cn[adjacent] != lam):
        x, y = _first_mismatch(adjacent, cn, lam)
        raise NotSrg(f"adjacent pair ({x},{y}) has {int(cn[x, y])} common neighbours, expected {lam}", (x, y))
    mu = int(cn[non_adjacent][0])
    if np.any(cn[non_adjacent] != mu):
        x, y = _first_mismatch(non_adjacent, cn, mu)
        raise NotSrg(f"non-adjacent pair ({x},{y}) has {int(cn[x, y])} common neighbours, expected {mu}", (x, y))
    params = SrgParams(G.n, int(G.degrees[0]), lam, mu)
    logger.info(f"Certified SRG {params.as_tuple()}")
    return params


def complement(G: Graph) -> Graph:
    adjacency = ~G.adjacency
    np.fill_diagonal(adjacency, False)
    return Graph(adjacency, origin=G.origin, validate=False)


@dataclass(frozen=True)
class IntersectionArray:
    b: Tuple[int, ...]
    c: Tuple[int, ...]

    @property
    def diameter(self) -> int:
        return len(self.c)

    def __str__(self) -> str:
        return "{" + ",".join(map(str, self.b)) + ";" + ",".join(map(str, self.c)) + "}"


def distance_matrix(G: Graph) -> np.ndarray:
    """All-pairs BFS distances by frontier expansion; -1 marks unreachable pairs."""
    n = G.n
    dist = np.full((n, n), -1, dtype=np.int64)
    np.fill_diagonal(dist, 0)
    frontier = np.eye(n, dtype=np.int64)
    step = 0
    while frontier.any():
        step += 1
        reached = (frontier @ G.matrix > 0) & (dist < 0)
        dist[reached] = step
        frontier = reached.astype(np.int64)
    return dist


def intersection_array(G: Graph) -> IntersectionArray:
    """{b_0..b_{d-1}; c_1..c_d} when G is distance-regular."""
    if G.n == 0 or not nx.is_connected(G.to_networkx()):
        raise Disconnected("intersection array needs a connected graph")
    dist = distance_matrix(G)
    diameter = int(dist.max())
    layers = [(dist == i).astype(np.int64) for i in range(diameter + 1)]
    b_values, c_values = [], []
    for i in range(diameter + 1):
        at_distance = dist == i
        # counts[x, y] = |{z ~ y : dist(x, z) = i -/+ 1}|
        if i > 0:
            counts = (layers[i - 1] @ G.matrix)[at_distance]
            if len(np.unique(counts)) != 1:
                raise NotDistanceRegular(f"c_{i} is not constant: {sorted(set(counts.tolist()))}")
            c_values.append(int(counts[0]))
        if i < diameter:
            counts = (layers[i + 1] @ G.matrix)[at_distance]
            if len(np.unique(counts)) != 1:
                raise NotDistanceRegular(f"b_{i} is not constant: {sorted(set(counts.tolist()))}")
            b_values.append(int(counts[0]))
    array = IntersectionArray(tuple(b_values), tuple(c_values))
    logger.info(f"Intersection array {array}")
    return array


def _folded_cube(dimension: int) -> nx.Graph:
    # sorted bit tuples number the vertices by their binary value
    graph = nx.convert_node_labels_to_integers(nx.hypercube_graph(dimension), ordering="sorted")
    full = 2 ** dimension - 1
    graph.add_edges_from((v, full ^ v) for v in list(graph.nodes()))
    return graph


def _shrikhande() -> nx.Graph:
    graph = nx.Graph()
    cells = [(a, b) for a in range(4) for b in range(4)]
    steps = [(0, 1), (0, 3), (1, 0), (3, 0), (1, 1), (3, 3)]
    for a, b in cells:
        for da, db in steps:
            graph.add_edge(a * 4 + b, ((a + da) % 4) * 4 + (b + db) % 4)
    return graph


_FIXTURE_GRAPHS = {
    "octahedron_line": lambda: nx.line_graph(nx.octahedral_graph()),
    "k4_cartesian_k2": lambda: nx.cartesian_product(nx.complete_graph(4), nx.complete_graph(2)),
    "petersen": nx.petersen_graph,
    "rook_4x4": lambda: nx.cartesian_product(nx.complete_graph(4), nx.complete_graph(4)),
    "shrikhande": _shrikhande,
    "clebsch": lambda: _folded_cube(4),
}


def fixture_graph(name: str) -> Graph:
    """Deterministic reference graphs for isomorphism checks."""
    builder = _FIXTURE_GRAPHS.get(name)
    if builder is None:
        raise UnknownFixture(f"unknown fixture graph {name!r}; known: {sorted(_FIXTURE_GRAPHS)}")
    nx_graph = builder()
    mapping = {node: index for index, node in enumerate(sorted(nx_graph.nodes()))}
    return Graph.from_networkx(nx.relabel_nodes(nx_graph, mapping))


def fixture_graph_names() -> List[str]:
    return sorted(_FIXTURE_GRAPHS)
