"""
Affine designs: AG(d,q) hyperplane designs and Hadamard 3-designs
"""

import itertools
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence, Union

import numpy as np

from cache import cached
from config import settings
from errors import (
    AxiomViolation,
    DimensionMismatch,
    EntryOutOfRange,
    IndexOutOfRange,
    NotHadamard,
    NotNormalized,
    ParameterMismatch,
    SpecError,
    TooLarge,
)
from gf import FiniteField
from utils import MatrixParser

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class DesignParams:
    q: int
    r: int
    epsilon: int
    v: int
    b: int
    m: int
    k: int
    lam: int

    @classmethod
    def from_qr(cls, q: int, r: int) -> "DesignParams":
        """Parameter table of an affine design with parameters (q, r)."""
        if q < 2 or r < 1 or (r - 1) % (q - 1):
            raise ParameterMismatch(f"(q, r) = ({q}, {r}) gives a non-integral epsilon")
        epsilon = (r - 1) // (q - 1)
        return cls(q=q, r=r, epsilon=epsilon, v=q * q * r, b=q ** 3 * epsilon + q * q + q,
                   m=q * q * epsilon + q + 1, k=q * r, lam=q * epsilon + 1)

    def as_dict(self):
        return {"q": self.q, "r": self.r, "epsilon": self.epsilon, "v": self.v,
                "b": self.b, "m": self.m, "k": self.k, "lambda": self.lam}


@dataclass(frozen=True, eq=False)
class AffineDesign:
    """Resolvable design stored as the class-by-point matrix of block labels.

    ``labels[j, x]`` is the label in 0..q-1 of the block of parallel class j
    containing point x.
    """

    q: int
    r: int
    labels: np.ndarray
    points: Optional[np.ndarray] = None
    name: str = field(default="design")

    def __post_init__(self):
        self.labels.setflags(write=False)

    @property
    def m(self) -> int:
        return self.labels.shape[0]

    @property
    def v(self) -> int:
        return self.labels.shape[1]

    def __repr__(self) -> str:
        return f"AffineDesign({self.name}, q={self.q}, r={self.r}, m={self.m}, v={self.v})"

    def __eq__(self, other) -> bool:
        return (isinstance(other, AffineDesign) and self.q == other.q and self.r == other.r
                and np.array_equal(self.labels, other.labels))

    def __hash__(self) -> int:
        return hash((self.q, self.r, self.labels.tobytes()))

    def block_of(self, j: int, x: int) -> int:
        if not (0 <= j < self.m and 0 <= x < self.v):
            raise IndexOutOfRange(f"(class {j}, point {x}) outside {self.m} classes x {self.v} points")
        return int(self.labels[j, x])

    def renumbered(self, order: Sequence[int]) -> "AffineDesign":
        """Design whose class t is this design's class order[t]."""
        order = [int(j) for j in order]
        if sorted(order) != list(range(self.m)):
            raise IndexOutOfRange(f"class numbering {order} is not a permutation of 0..{self.m - 1}")
        return AffineDesign(self.q, self.r, self.labels[order].copy(), self.points,
                            name=f"{self.name}[renumbered]")

    def incidence_matrix(self) -> np.ndarray:
        """Point-by-block 0/1 matrix, blocks ordered by (class, label)."""
        blocks = self.labels[:, None, :] == np.arange(self.q)[None, :, None]
        return blocks.reshape(self.m * self.q, self.v).T


@cached(key_prefix="ag")
def affine_geometry_design(F: FiniteField, d: int, point_cap: Optional[int] = None) -> AffineDesign:
    """Points and hyperplanes of AG(d, q).

    Points are F^d in lexicographic order. Class j belongs to the j-th
    normal vector with first nonzero coordinate 1 (lexicographic order), and
    the label of x is the value of that linear functional at x.
    """
    if d < 2:
        raise DimensionMismatch(f"affine geometry needs d >= 2, got {d}")
    q = F.q
    cap = settings.DESIGN_POINT_CAP if point_cap is None else point_cap
    if q ** d > cap:
        raise TooLarge(f"AG({d},{q}) has {q ** d} points, cap is {cap}", {"points": q ** d, "cap": cap})

    points = np.array(list(itertools.product(range(q), repeat=d)), dtype=np.int64)
    nonzero = points[1:]
    first_nonzero = nonzero[np.arange(len(nonzero)), np.argmax(nonzero != 0, axis=1)]
    normals = nonzero[first_nonzero == 1]
    labels = np.stack([F.dot(points, normal) for normal in normals])
    points.setflags(write=False)
    design = AffineDesign(q, q ** (d - 2), labels, points, name=f"AG({d},{q})")
    logger.debug(f"Generated {design}")
    return design


def sylvester_hadamard(order: int) -> np.ndarray:
    """Normalized Sylvester Hadamard matrix of a power-of-two order."""
    if order < 1 or order & (order - 1):
        raise NotHadamard(f"Sylvester matrices exist only for powers of two, got {order}")
    H = np.ones((1, 1), dtype=np.int64)
    block = np.array([[1, 1], [1, -1]], dtype=np.int64)
    while H.shape[0] < order:
        H = np.kron(block, H)
    return H


def check_hadamard(H: np.ndarray) -> np.ndarray:
    H = np.asarray(H, dtype=np.int64)
    if H.ndim != 2 or H.shape[0] != H.shape[1]:
        raise NotHadamard(f"Hadamard matrix must be square, got shape {H.shape}")
    if not np.all(np.abs(H) == 1):
        raise NotHadamard("entries must be +1 or -1")
    n = H.shape[0]
    if not np.array_equal(H @ H.T, n * np.eye(n, dtype=np.int64)):
        raise NotHadamard(f"H H^T != {n} I")
    return H


def hadamard_3_design(H: np.ndarray) -> AffineDesign:
    """Affine design with q = 2 from a normalized Hadamard matrix.

    Points are the n columns; row i >= 1 gives the class {+1 positions,
    -1 positions}, labelled 0 and 1.
    """
    H = check_hadamard(H)
    n = H.shape[0]
    if n < 4:
        raise NotHadamard(f"Hadamard 3-designs need order >= 4, got {n}")
    if not (np.all(H[0] == 1) and np.all(H[:, 0] == 1)):
        raise NotNormalized("first row and column must be all +1")
    labels = (H[1:] < 0).astype(np.int64)
    return AffineDesign(2, n // 4, labels, name=f"Hadamard3({n})")


def verify_affine(D: AffineDesign) -> DesignParams:
    """Check both affine axioms exhaustively and return the certified parameters."""
    q, r, labels = D.q, D.r, D.labels
    if labels.size and (labels.min() < 0 or labels.max() >= q):
        raise EntryOutOfRange(f"block labels must lie in 0..{q - 1}")
    try:
        params = DesignParams.from_qr(q, r)
    except ParameterMismatch:
        logger.error(f"{D}: epsilon = (r-1)/(q-1) is not an integer")
        raise
    if D.v != params.v:
        raise ParameterMismatch(f"{D}: v = {D.v}, expected q^2 r = {params.v}")
    if D.m != params.m:
        raise ParameterMismatch(f"{D}: {D.m} parallel classes, expected q^2 eps + q + 1 = {params.m}")

    block_size = q * r
    for j in range(D.m):
        sizes = np.bincount(labels[j], minlength=q)
        if np.any(sizes != block_size):
            block = int(np.flatnonzero(sizes != block_size)[0])
            raise AxiomViolation("ii", f"class {j}: block {block} has {int(sizes[block])} points, expected {block_size}",
                                 {"class": j, "block": block, "size": int(sizes[block])})

    for j in range(D.m - 1):
        codes = labels[j][None, :] * q + labels[j + 1:]
        for offset, row in enumerate(codes):
            meets = np.bincount(row, minlength=q * q)
            if np.any(meets != r):
                cell = int(np.flatnonzero(meets != r)[0])
                other = j + 1 + offset
                raise AxiomViolation(
                    "i", f"block {cell // q} of class {j} meets block {cell % q} of class {other} in "
                         f"{int(meets[cell])} points, expected {r}",
                    {"blocks": [[j, cell // q], [other, cell % q]], "size": int(meets[cell])},
                )

    if D.v <= settings.PAIR_CHECK_MAX_POINTS:
        incidence = D.incidence_matrix().astype(np.int64)
        together = incidence @ incidence.T
        off_diagonal = ~np.eye(D.v, dtype=bool)
        if np.any(together[off_diagonal] != params.lam):
            x, y = np.argwhere(off_diagonal & (together != params.lam))[0]
            raise ParameterMismatch(
                f"points {x} and {y} lie together in {together[x, y]} blocks, expected {params.lam}",
                {"points": [int(x), int(y)]},
            )
    else:
        logger.info(f"{D}: pair check skipped above {settings.PAIR_CHECK_MAX_POINTS} points")
    logger.debug(f"Verified {D}: {params}")
    return params


def read_design(path: Union[str, Path]) -> AffineDesign:
    """Header 'q r m v', then m lines of v 0-based block labels."""
    rows = MatrixParser.parse_int_rows(Path(path).read_text())
    if not rows or len(rows[0]) != 4:
        raise SpecError(f"{path}: header must be 'q r m v'")
    q, r, m, v = rows[0]
    body = rows[1:]
    if len(body) != m or any(len(row) != v for row in body):
        raise DimensionMismatch(f"{path}: expected {m} lines of {v} labels")
    return AffineDesign(q, r, np.array(body, dtype=np.int64).reshape(m, v), name=Path(path).name)


def write_design(path: Union[str, Path], D: AffineDesign) -> None:
    with open(path, "w") as handle:
        handle.write(f"{D.q} {D.r} {D.m} {D.v}\n")
        for row in D.labels:
            handle.write(" ".join(str(int(x)) for x in row) + "\n")


def parse_hadamard(text: str) -> np.ndarray:
    """n lines of n entries in {+1,-1} or {+,-}."""
    return check_hadamard(MatrixParser.parse_sign_rows(text))


def read_hadamard(path: Union[str, Path]) -> np.ndarray:
    return parse_hadamard(Path(path).read_text())


def write_hadamard(path: Union[str, Path], H: np.ndarray) -> None:
    with open(path, "w") as handle:
        for row in np.asarray(H):
            handle.write(" ".join("+1" if x > 0 else "-1" for x in row) + "\n")
