"""
Symmetric Latin squares and edge-class selector squares
"""

import itertools
import logging
from dataclasses import dataclass
from math import factorial
from pathlib import Path
from typing import Iterable, List, Optional, Sequence, Union

import numpy as np

from config import settings
from errors import EntryOutOfRange, IndexOutOfRange, NotSquare, TooLarge

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class SelectorSquare:
    """Square of 0-based symbols in range(symbol_count); need not be Latin."""

    entries: np.ndarray
    symbol_count: int
    symmetric: bool

    def __post_init__(self):
        self.entries.setflags(write=False)

    @property
    def side(self) -> int:
        return self.entries.shape[0]

    def __eq__(self, other) -> bool:
        return (isinstance(other, SelectorSquare)
                and self.symbol_count == other.symbol_count
                and np.array_equal(self.entries, other.entries))

    def __hash__(self) -> int:
        return hash((self.symbol_count, self.entries.tobytes()))

    def one_based(self) -> List[List[int]]:
        return (self.entries + 1).tolist()

    @property
    def diagonal(self) -> np.ndarray:
        return np.diagonal(self.entries)


@dataclass(frozen=True, eq=False)
class LatinSquare(SelectorSquare):
    latin: bool = True
    reduced: bool = False


def _is_latin(entries: np.ndarray) -> bool:
    side = entries.shape[0]
    target = np.arange(side)
    return (bool(np.all(np.sort(entries, axis=1) == target))
            and bool(np.all(np.sort(entries, axis=0) == target[:, None])))


def check_square(A: Union[Sequence[Sequence[int]], np.ndarray], symbol_count: Optional[int] = None,
                 one_based: bool = True) -> SelectorSquare:
    """Classify an integer matrix as a LatinSquare or a SelectorSquare.

    Input symbols are 1-based unless ``one_based`` is False. Symbols may run
    up to ``symbol_count`` (default side + 1, so the derived squares of
    Construction 2 are accepted). The input is never modified.
    """
    try:
        matrix = np.array(A, dtype=np.int64)
    except (TypeError, ValueError) as e:
        raise NotSquare(f"square entries must be integers: {e}")
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1] or matrix.shape[0] == 0:
        raise NotSquare(f"expected a non-empty square matrix, got shape {matrix.shape}")
    side = matrix.shape[0]
    entries = matrix - 1 if one_based else matrix.copy()
    limit = side + 1 if symbol_count is None else symbol_count
    if entries.min() < 0 or entries.max() >= limit:
        bad = np.argwhere((entries < 0) | (entries >= limit))[0]
        raise EntryOutOfRange(
            f"entry at ({bad[0]},{bad[1]}) is outside 1..{limit}",
            {"row": int(bad[0]), "column": int(bad[1]), "value": int(matrix[bad[0], bad[1]])},
        )
    symmetric = bool(np.array_equal(entries, entries.T))
    if _is_latin(entries):
        target = np.arange(side)
        reduced = bool(np.array_equal(entries[0], target) and np.array_equal(entries[:, 0], target))
        return LatinSquare(entries, side, symmetric, True, reduced)
    return SelectorSquare(entries, limit, symmetric)


def cayley_table(factors: Sequence[int]) -> LatinSquare:
    """Cayley table of the abelian group C_f1 x C_f2 x ...

    Elements are numbered in mixed radix with the first factor most
    significant, so the identity is element 0 and the table is reduced.
    """
    factors = [int(f) for f in factors] or [1]
    if any(f < 1 for f in factors):
        raise EntryOutOfRange(f"cyclic orders must be positive, got {factors}")
    order = int(np.prod(factors))
    if order > settings.DESIGN_POINT_CAP:
        raise TooLarge(f"group of order {order} exceeds the size cap")
    coords = np.array(list(itertools.product(*[range(f) for f in factors])), dtype=np.int64)
    moduli = np.array(factors, dtype=np.int64)
    weights = np.array([int(np.prod(factors[i + 1:])) for i in range(len(factors))], dtype=np.int64)
    sums = (coords[:, None, :] + coords[None, :, :]) % moduli
    entries = sums @ weights
    return LatinSquare(entries, order, True, True, True)


def steiner_loop_table(points: int, triples: Iterable[Sequence[int]]) -> LatinSquare:
    """Commutative loop of a Steiner triple system on ``points`` points.

    Symbol 0 is the identity and point p is symbol p + 1; x*x = e and x*y is
    the third point of the triple through x and y.
    """
    side = points + 1
    entries = np.full((side, side), -1, dtype=np.int64)
    entries[0] = np.arange(side)
    entries[:, 0] = np.arange(side)
    np.fill_diagonal(entries, 0)
    for triple in triples:
        a, b, c = (int(p) + 1 for p in triple)
        for x, y, z in ((a, b, c), (a, c, b), (b, c, a)):
            if entries[x, y] != -1:
                raise EntryOutOfRange(f"pair ({x - 1},{y - 1}) lies in two triples")
            entries[x, y] = entries[y, x] = z
    if np.any(entries < 0):
        raise EntryOutOfRange("triples do not cover every pair of points")
    square = check_square(entries, symbol_count=side, one_based=False)
    if not isinstance(square, LatinSquare):
        raise EntryOutOfRange("triples do not form a Steiner triple system")
    return square


def relabel(square: SelectorSquare, phi: Sequence[int]) -> SelectorSquare:
    """Simultaneous relabeling: L'(phi i, phi j) = phi(L(i, j))."""
    phi = np.asarray(phi, dtype=np.int64)
    inverse = np.argsort(phi)
    entries = phi[square.entries[np.ix_(inverse, inverse)]]
    return check_square(entries, symbol_count=square.symbol_count, one_based=False)


def _loop_canonical_key(entries: np.ndarray, relabelings: np.ndarray) -> bytes:
    """Lexicographically least image of a reduced square under every relabeling fixing 0."""
    inverses = np.argsort(relabelings, axis=1)
    # images[p, a, b] = phi_p(L(phi_p^-1 a, phi_p^-1 b))
    moved = entries[inverses[:, :, None], inverses[:, None, :]]
    images = relabelings[np.arange(len(relabelings))[:, None, None], moved]
    flat = images.reshape(len(relabelings), -1).astype(np.uint8)
    return np.unique(flat, axis=0)[0].tobytes()


def _reduced_symmetric_squares(side: int):
    """Yield every reduced symmetric Latin square of the given side (0-based)."""
    square = -np.ones((side, side), dtype=np.int64)
    square[0] = np.arange(side)
    square[:, 0] = np.arange(side)
    used = np.zeros((side, side), dtype=bool)
    for i in range(side):
        used[i, i] = True
        used[0, i] = True
    cells = [(i, j) for i in range(1, side) for j in range(i, side)]

    def place(index: int):
        if index == len(cells):
            yield square.copy()
            return
        i, j = cells[index]
        for symbol in range(side):
            if used[i, symbol] or used[j, symbol]:
                continue
            square[i, j] = square[j, i] = symbol
            used[i, symbol] = used[j, symbol] = True
            yield from place(index + 1)
            used[i, symbol] = used[j, symbol] = False
        square[i, j] = square[j, i] = -1

    yield from place(0)


def enumerate_reduced_symmetric(m: int) -> List[LatinSquare]:
    """Reduced symmetric Latin squares of side m up to commutative-loop isomorphism.

    Each class is represented by its lexicographically least member, and
    classes are returned in increasing order of that representative.
    """
    if m < 1:
        raise EntryOutOfRange(f"side must be positive, got {m}")
    if m > settings.LATIN_ENUM_MAX_SIDE:
        raise TooLarge(f"enumeration is capped at side {settings.LATIN_ENUM_MAX_SIDE}, got {m}")
    relabelings = np.array([(0,) + p for p in itertools.permutations(range(1, m))], dtype=np.int64)
    logger.info(f"Enumerating reduced symmetric squares of side {m} ({factorial(m - 1)} relabelings per square)")

    representatives = {}
    total = 0
    for entries in _reduced_symmetric_squares(m):
        total += 1
        key = _loop_canonical_key(entries, relabelings)
        representatives.setdefault(key, None)
    logger.info(f"Side {m}: {total} reduced symmetric squares, {len(representatives)} classes")

    result = []
    for key in sorted(representatives):
        entries = np.frombuffer(key, dtype=np.uint8).astype(np.int64).reshape(m, m)
        result.append(LatinSquare(entries, m, True, True, True))
    return result


def derived_square(source: LatinSquare, h: int, mask: Sequence[int]) -> SelectorSquare:
    """Delete row and column h (0-based) and optionally swap diagonal entries.

    For each remaining index i with mask[i] set, the diagonal entry becomes
    the deleted entry source(i', h), where i' is the original index of i.
    """
    side = source.side
    if not 0 <= h < side:
        raise IndexOutOfRange(f"h={h} is outside 0..{side - 1}")
    mask = [int(bit) for bit in mask]
    if len(mask) != side - 1 or any(bit not in (0, 1) for bit in mask):
        raise IndexOutOfRange(f"mask must hold {side - 1} bits, got {mask}")
    kept = np.array([i for i in range(side) if i != h], dtype=np.int64)
    entries = source.entries[np.ix_(kept, kept)].copy()
    for i, bit in enumerate(mask):
        if bit:
            entries[i, i] = source.entries[kept[i], h]
    return SelectorSquare(entries, side, bool(np.array_equal(entries, entries.T)))


def diagonal_avoids(square: SelectorSquare, symbol: int) -> bool:
    """True iff the 0-based symbol is absent from the main diagonal."""
    return not bool(np.any(square.diagonal == symbol))


def parse_mask(bits: Union[str, Sequence[int]], length: int) -> List[int]:
    """Accept '0101', '0,1,0,1' or a sequence of ints."""
    if isinstance(bits, str):
        cleaned = bits.replace(",", "").replace(" ", "")
        if cleaned and set(cleaned) - {"0", "1"}:
            raise IndexOutOfRange(f"mask {bits!r} must contain only 0 and 1")
        values = [int(c) for c in cleaned]
    else:
        values = [int(b) for b in bits]
    if len(values) != length:
        raise IndexOutOfRange(f"mask needs {length} bits, got {len(values)}")
    return values


def read_square(path: Union[str, Path]) -> SelectorSquare:
    """Read the text format: line 1 the side m, then m rows of 1-based symbols."""
    with open(path, "r") as handle:
        tokens = [line.split() for line in handle if line.strip()]
    if not tokens or len(tokens[0]) != 1:
        raise NotSquare(f"{path}: first line must hold the side")
    side = int(tokens[0][0])
    rows = tokens[1:]
    if len(rows) != side or any(len(row) != side for row in rows):
        raise NotSquare(f"{path}: expected {side} rows of {side} symbols")
    return check_square([[int(x) for x in row] for row in rows])


def write_square(path: Union[str, Path], square: SelectorSquare) -> None:
    with open(path, "w") as handle:
        handle.write(f"{square.side}\n")
        for row in square.one_based():
            handle.write(" ".join(str(x) for x in row) + "\n")
