"""
Graph assembly from affine designs, selector squares and block bijections
"""

import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from algebra import ddg_spectrum
from designs import AffineDesign, affine_geometry_design, hadamard_3_design, read_design, read_hadamard, verify_affine
from errors import BadBijection, DiagonalViolation, DimensionMismatch, IndexOutOfRange, NotSymmetric, SpecError
from gf import FiniteField, field_new
from graph import DdgParams, Graph, SrgParams
from latin import LatinSquare, SelectorSquare, derived_square, diagonal_avoids, parse_mask, read_square
from models import ConstructionSpec, DesignSource
from utils import FixtureResolver

logger = logging.getLogger(__name__)

# Tuples as quoted in the literature that disagree with the closed forms.
PUBLISHED_TUPLES = {
    (1, 2, 3): (56, 28, 14, 12, 7, 8),
    (2, 3, 2): (27, 18, 9, 12, 18, 3),
}


@dataclass(frozen=True)
class BijectionFamily:
    """Block-label permutations sigma_{i,j}, stored once per pair i < j.

    sigma(i, j) maps labels of class e(i,j) in design i to labels of class
    e(j,i) in design j; sigma(j, i) is its inverse and sigma(i, i) is the
    identity.
    """

    q: int
    perms: Dict[Tuple[int, int], Tuple[int, ...]] = field(default_factory=dict)

    def __post_init__(self):
        identity = list(range(self.q))
        for (i, j), perm in self.perms.items():
            if i == j:
                if list(perm) != identity:
                    raise BadBijection(f"sigma({i},{i}) must be the identity, got {list(perm)}")
            elif i > j:
                raise BadBijection(f"bijections are stored for i < j, got ({i},{j})")
            if sorted(perm) != identity:
                raise BadBijection(f"sigma({i},{j}) = {list(perm)} is not a permutation of 0..{self.q - 1}")

    @classmethod
    def identity(cls, q: int) -> "BijectionFamily":
        return cls(q)

    @classmethod
    def random(cls, q: int, size: int, rng: np.random.Generator) -> "BijectionFamily":
        perms = {(i, j): tuple(int(x) for x in rng.permutation(q))
                 for i in range(size) for j in range(i + 1, size)}
        return cls(q, perms)

    def sigma(self, i: int, j: int) -> np.ndarray:
        if i == j:
            return np.arange(self.q)
        if i < j:
            return np.asarray(self.perms.get((i, j), range(self.q)), dtype=np.int64)
        return np.argsort(self.sigma(j, i))

    def validate(self, size: int) -> None:
        for (i, j) in self.perms:
            if not (0 <= i < size and 0 <= j < size):
                raise BadBijection(f"bijection for pair ({i},{j}) refers to a missing design (have {size})")


def _check_designs(designs: Sequence[AffineDesign], count: int, q: int, d: int) -> None:
    if len(designs) != count:
        raise DimensionMismatch(f"need {count} designs, got {len(designs)}")
    r = q ** (d - 2)
    classes = (q ** d - 1) // (q - 1)
    for index, D in enumerate(designs):
        if (D.q, D.r, D.m) != (q, r, classes):
            raise DimensionMismatch(
                f"design {index} has (q, r, m) = ({D.q}, {D.r}, {D.m}), expected ({q}, {r}, {classes})")
        verify_affine(D)


def _infer_qd(designs: Sequence[AffineDesign]) -> Tuple[int, int]:
    if not designs:
        raise DimensionMismatch("no designs supplied")
    q, v = designs[0].q, designs[0].v
    d = 0
    while q ** d < v:
        d += 1
    if q ** d != v or d < 2:
        raise DimensionMismatch(f"design with q={q} has {v} points, not a power q^d with d >= 2")
    return q, d


def _assemble(designs: Sequence[AffineDesign], selector: SelectorSquare, bijections: BijectionFamily,
              special: Optional[int] = None, special_adjacent: bool = False) -> Graph:
    """Adjacency: x in P_i, y in P_j adjacent iff label_j(y) != sigma_ij(label_i(x)) in class e(i,j)."""
    if not selector.symmetric:
        raise NotSymmetric("selector square must be symmetric")
    size = selector.side
    if len(designs) != size:
        raise DimensionMismatch(f"selector side {size} needs {size} designs, got {len(designs)}")
    bijections.validate(size)
    v_block = designs[0].v
    n_total = size * v_block
    adjacency = np.zeros((n_total, n_total), dtype=bool)
    for i in range(size):
        for j in range(i, size):
            symbol = int(selector.entries[i, j])
            rows = slice(i * v_block, (i + 1) * v_block)
            cols = slice(j * v_block, (j + 1) * v_block)
            if special is not None and symbol == special:
                block = np.full((v_block, v_block), special_adjacent, dtype=bool)
            else:
                left = designs[i].labels[symbol]
                right = designs[j].labels[symbol]
                block = bijections.sigma(i, j)[left][:, None] != right[None, :]
            adjacency[rows, cols] = block
            adjacency[cols, rows] = block.T
    np.fill_diagonal(adjacency, False)
    origin = np.repeat(np.arange(size), v_block)
    return Graph(adjacency, origin=origin)


def construction1(designs: Sequence[AffineDesign], square: SelectorSquare,
                  bijections: Optional[BijectionFamily] = None) -> Graph:
    q, d = _infer_qd(designs)
    m = (q ** d - 1) // (q - 1)
    if not (isinstance(square, LatinSquare) and square.latin):
        raise SpecError("construction 1 needs a Latin square")
    if square.side != m:
        raise DimensionMismatch(f"construction 1 with q={q}, d={d} needs a square of side {m}, got {square.side}")
    _check_designs(designs, m, q, d)
    graph = _assemble(designs, square, bijections or BijectionFamily.identity(q))
    logger.info(f"Construction 1 (q={q}, d={d}): {graph.n} vertices")
    return graph


def construction2(designs: Sequence[AffineDesign], source: LatinSquare, h: int, mask: Sequence[int],
                  bijections: Optional[BijectionFamily] = None) -> Graph:
    """Construction 1 on the square derived from ``source`` by deleting index h (0-based)."""
    q, d = _infer_qd(designs)
    m_star = (q ** d - 1) // (q - 1)
    if not (isinstance(source, LatinSquare) and source.latin):
        raise SpecError("construction 2 needs a Latin source square")
    if source.side != m_star:
        raise DimensionMismatch(f"construction 2 with q={q}, d={d} needs a source of side {m_star}")
    if m_star < 3:
        raise DimensionMismatch("construction 2 needs at least three parallel classes")
    selector = derived_square(source, h, mask)
    _check_designs(designs, m_star - 1, q, d)
    graph = _assemble(designs, selector, bijections or BijectionFamily.identity(q))
    logger.info(f"Construction 2 (q={q}, d={d}, h={h}, mask={list(mask)}): {graph.n} vertices")
    return graph


def construction2_partition(designs: Sequence[AffineDesign], source: LatinSquare, h: int,
                            mask: Sequence[int]) -> np.ndarray:
    """Predicted canonical classes of a Construction 2 graph as vertex labels.

    Two vertices are in one class iff they share a design and a block of the
    class missing from that design's row: source(i', h) when the diagonal was
    kept, source(i', i') when it was swapped.
    """
    kept = [i for i in range(source.side) if i != h]
    v_block = designs[0].v
    labels = np.empty(len(kept) * v_block, dtype=np.int64)
    for index, original in enumerate(kept):
        missing = source.entries[original, original] if mask[index] else source.entries[original, h]
        labels[index * v_block:(index + 1) * v_block] = index * designs[0].q + designs[index].labels[missing]
    return labels


def construction3(designs: Sequence[AffineDesign], square: SelectorSquare,
                  bijections: Optional[BijectionFamily] = None) -> Graph:
    """Side m+1 square; the last symbol means no edges between the two point sets."""
    q, d = _infer_qd(designs)
    m = (q ** d - 1) // (q - 1)
    if not (isinstance(square, LatinSquare) and square.latin):
        raise SpecError("construction 3 needs a Latin square")
    if square.side != m + 1:
        raise DimensionMismatch(f"construction 3 with q={q}, d={d} needs a square of side {m + 1}")
    _check_designs(designs, m + 1, q, d)
    graph = _assemble(designs, square, bijections or BijectionFamily.identity(q), special=m)
    logger.info(f"Construction 3 (q={q}, d={d}): {graph.n} vertices")
    return graph


def construction4(designs: Sequence[AffineDesign], square: SelectorSquare,
                  bijections: Optional[BijectionFamily] = None) -> Graph:
    """Side m+1 square without m+1 on the diagonal; the last symbol means complete joins."""
    q, d = _infer_qd(designs)
    m = (q ** d - 1) // (q - 1)
    if not (isinstance(square, LatinSquare) and square.latin):
        raise SpecError("construction 4 needs a Latin square")
    if square.side != m + 1:
        raise DimensionMismatch(f"construction 4 with q={q}, d={d} needs a square of side {m + 1}")
    if not diagonal_avoids(square, m):
        raise DiagonalViolation(f"symbol {m + 1} appears on the main diagonal",
                                {"positions": np.flatnonzero(square.diagonal == m).tolist()})
    _check_designs(designs, m + 1, q, d)
    graph = _assemble(designs, square, bijections or BijectionFamily.identity(q),
                      special=m, special_adjacent=True)
    logger.info(f"Construction 4 (q={q}, d={d}): {graph.n} vertices")
    return graph


@dataclass(frozen=True)
class ExpectedParams:
    which: int
    q: int
    d: int
    ddg: DdgParams
    srg: Optional[SrgParams]
    eigenvalues: Tuple[str, ...]
    class_size: int

    def as_dict(self):
        return {
            "construction": self.which,
            "q": self.q,
            "d": self.d,
            "ddg": list(self.ddg.as_tuple()),
            "srg": list(self.srg.as_tuple()) if self.srg else None,
            "eigenvalues": list(self.eigenvalues),
            "class_size": self.class_size,
        }


def expected_params(which: int, q: int, d: int) -> ExpectedParams:
    """Closed-form parameters, with eigenvalues derived from the parameters themselves."""
    if d < 2 or q < 2:
        raise DimensionMismatch(f"need q >= 2 and d >= 2, got q={q}, d={d}")
    m1 = (q ** d - 1) // (q - 1)
    if which == 1:
        params = DdgParams(q ** d * m1, q ** (d - 1) * (q ** d - 1),
                           q ** (d - 1) * (q ** d - q ** (d - 1) - 1),
                           q ** (d - 2) * (q - 1) * (q ** d - 1), m1, q ** d)
    elif which == 2:
        n = q ** (d - 1)
        v = q ** (d + 1) * (q ** (d - 1) - 1) // (q - 1)
        params = DdgParams(v, q ** d * (q ** (d - 1) - 1),
                           q ** d * (q ** (d - 1) - q ** (d - 2) - 1),
                           q ** (d - 1) * (q - 1) * (q ** (d - 1) - 1), v // n, n)
    elif which == 3:
        v = q ** d * (q ** d + q - 2) // (q - 1)
        k = q ** (d - 1) * (q ** d - 1)
        lambda1 = q ** (d - 1) * (q ** d - q ** (d - 1) - 1)
        lambda2 = q ** (d - 1) * (q - 1) * (q ** (d - 1) - 1)
        if lambda1 == lambda2:
            params = DdgParams(v, k, lambda1, lambda1, 1, v)
        else:
            params = DdgParams(v, k, lambda1, lambda2, m1 + 1, q ** d)
    elif which == 4:
        v = q ** d * (q ** d + q - 2) // (q - 1)
        lam = q ** (d - 1) * (q - 1) * (q ** (d - 1) + 1)
        params = DdgParams(v, q ** (d - 1) * (q ** d + q - 1), lam, lam, 1, v)
    else:
        raise SpecError(f"construction must be 1, 2, 3 or 4, got {which}")

    published = PUBLISHED_TUPLES.get((which, q, d))
    if published is not None and published != params.as_tuple():
        logger.warning(f"Construction {which} (q={q}, d={d}): published tuple {published} "
                       f"differs from {params.as_tuple()}; keeping the latter")

    srg = params.srg() if params.is_srg else None
    spectrum = ddg_spectrum(params)
    eigenvalues = tuple(str(value) for value in spectrum.distinct_values())
    return ExpectedParams(which, q, d, params, srg, eigenvalues, params.n)


def read_bijections(path: Union[str, Path], q: int) -> BijectionFamily:
    """Lines 'i j : p_0 ... p_{q-1}' with 0-based design indices i < j."""
    perms = {}
    for line_no, line in enumerate(Path(path).read_text().splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        pair, sep, images = line.partition(":")
        try:
            i, j = (int(x) for x in pair.split())
            perm = tuple(int(x) for x in images.split())
        except ValueError:
            raise BadBijection(f"{path}:{line_no}: expected 'i j : p_0 ... p_{q - 1}', got {line!r}")
        if not sep or len(perm) != q:
            raise BadBijection(f"{path}:{line_no}: need {q} images after ':'")
        perms[(i, j)] = perm
    return BijectionFamily(q, perms)


def write_bijections(path: Union[str, Path], bijections: BijectionFamily) -> None:
    with open(path, "w") as handle:
        for (i, j), perm in sorted(bijections.perms.items()):
            handle.write(f"{i} {j} : {' '.join(str(x) for x in perm)}\n")


def load_design(source: DesignSource, F: FiniteField, d: int) -> AffineDesign:
    if source.kind == "ag":
        return affine_geometry_design(F, d)
    if source.kind == "hadamard":
        return hadamard_3_design(read_hadamard(FixtureResolver.resolve("hadamard", source.path)))
    return read_design(FixtureResolver.resolve("designs", source.path))


@dataclass
class BuildResult:
    spec: ConstructionSpec
    graph: Graph
    expected: ExpectedParams
    square: SelectorSquare
    bijections: BijectionFamily
    partition_labels: Optional[np.ndarray] = None


def build_from_spec(spec: ConstructionSpec) -> BuildResult:
    """Resolve every input a spec names and run its construction."""
    F = field_new(spec.q)
    count = spec.design_count
    designs: List[AffineDesign] = []
    for index in range(count):
        design = load_design(spec.designs.get(index, DesignSource()), F, spec.d)
        if index in spec.numbering:
            design = design.renumbered([c - 1 for c in spec.numbering[index]])
        designs.append(design)
    unknown = sorted((set(spec.designs) | set(spec.numbering)) - set(range(count)))
    if unknown:
        raise IndexOutOfRange(f"design indices {unknown} outside 0..{count - 1}")

    square = read_square(FixtureResolver.resolve("latin", spec.latin))
    if spec.bijections:
        bijections = read_bijections(FixtureResolver.resolve("bijections", spec.bijections), spec.q)
    elif spec.seed is not None:
        bijections = BijectionFamily.random(spec.q, count, np.random.default_rng(spec.seed))
    else:
        bijections = BijectionFamily.identity(spec.q)

    partition_labels = None
    if spec.which == 1:
        graph = construction1(designs, square, bijections)
    elif spec.which == 2:
        h = spec.h - 1
        mask = parse_mask(spec.mask, square.side - 1)
        graph = construction2(designs, square, h, mask, bijections)
        partition_labels = construction2_partition(designs, square, h, mask)
    elif spec.which == 3:
        graph = construction3(designs, square, bijections)
    else:
        graph = construction4(designs, square, bijections)
    return BuildResult(spec, graph, expected_params(spec.which, spec.q, spec.d), square, bijections,
                       partition_labels)
