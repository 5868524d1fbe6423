"""
Finite field arithmetic over GF(q), q a prime power
"""

import logging
from typing import Optional, Tuple

import numpy as np

from cache import cached
from errors import ElementOutOfRange, FieldDivisionByZero, NotPrimePower

logger = logging.getLogger(__name__)


def prime_power(q: int) -> Optional[Tuple[int, int]]:
    """Return (p, e) with q = p**e, or None when q is not a prime power."""
    if q < 2:
        return None
    p = next(d for d in range(2, q + 1) if q % d == 0)
    e, rest = 0, q
    while rest % p == 0:
        rest //= p
        e += 1
    return (p, e) if rest == 1 else None


def _poly_mod(num: list, den: list, p: int) -> list:
    """Remainder of num modulo monic den, coefficients low to high."""
    num = list(num)
    deg = len(den) - 1
    for top in range(len(num) - 1, deg - 1, -1):
        c = num[top] % p
        if c:
            for i in range(deg + 1):
                num[top - deg + i] = (num[top - deg + i] - c * den[i]) % p
    rem = [c % p for c in num[:deg]]
    while rem and rem[-1] == 0:
        rem.pop()
    return rem


def _monic(degree: int, code: int, p: int) -> list:
    """Monic polynomial of the given degree whose lower coefficients pack to code."""
    coeffs = []
    for _ in range(degree):
        coeffs.append(code % p)
        code //= p
    return coeffs + [1]


def _is_irreducible(poly: list, p: int) -> bool:
    degree = len(poly) - 1
    for d in range(1, degree // 2 + 1):
        for code in range(p ** d):
            if not _poly_mod(poly, _monic(d, code, p), p):
                return False
    return True


def smallest_irreducible(p: int, e: int) -> Tuple[int, ...]:
    """Lexicographically smallest monic irreducible of degree e over GF(p).

    Candidates are ordered by the base-p packing of their lower coefficients,
    constant term least significant.
    """
    for code in range(p ** e):
        poly = _monic(e, code, p)
        if _is_irreducible(poly, p):
            return tuple(poly)
    raise RuntimeError(f"no irreducible polynomial of degree {e} over GF({p})")


class FiniteField:
    """GF(q) with elements encoded as integers 0..q-1.

    For q = p**e with e > 1 an element is the polynomial sum(c_i x^i) reduced
    modulo ``modulus`` and packed as sum(c_i p^i). 0 and 1 are the additive
    and multiplicative identities in every case.
    """

    def __init__(self, q: int):
        pe = prime_power(q)
        if pe is None:
            raise NotPrimePower(f"{q} is not a prime power", {"q": q})
        self.q = q
        self.p, self.e = pe
        self.modulus = smallest_irreducible(self.p, self.e) if self.e > 1 else (0, 1)

        p, e = self.p, self.e
        weights = p ** np.arange(e)
        digits = (np.arange(q)[:, None] // weights) % p  # q x e

        add_digits = (digits[:, None, :] + digits[None, :, :]) % p
        self.add_table = (add_digits * weights).sum(axis=2)

        # shifted[i][a] = digits of a * x**i
        shifted = np.empty((e, q, e), dtype=np.int64)
        current = digits.copy()
        lower = np.array(self.modulus[:e], dtype=np.int64)
        for i in range(e):
            shifted[i] = current
            top = current[:, e - 1].copy()
            current = np.concatenate([np.zeros((q, 1), dtype=np.int64), current[:, :e - 1]], axis=1)
            current = (current - top[:, None] * lower[None, :]) % p
        mul_digits = (digits.T[:, None, :, None] * shifted[:, :, None, :]).sum(axis=0) % p
        self.mul_table = (mul_digits * weights).sum(axis=2)

        self.neg_table = np.argmin(self.add_table, axis=1)
        inv = np.zeros(q, dtype=np.int64)
        rows, cols = np.nonzero(self.mul_table[1:, 1:] == 1)
        inv[rows + 1] = cols + 1
        self.inv_table = inv

        for table in (self.add_table, self.mul_table, self.neg_table, self.inv_table):
            table.setflags(write=False)
        self._generator: Optional[int] = None
        logger.debug(f"Built GF({q}) with modulus {self.modulus}")

    def __repr__(self) -> str:
        return f"GF({self.q})"

    def __eq__(self, other) -> bool:
        return isinstance(other, FiniteField) and self.q == other.q and self.modulus == other.modulus

    def __hash__(self) -> int:
        return hash((self.q, self.modulus))

    def __reduce__(self):
        return (field_new, (self.q,))

    def _check(self, *elements: int) -> None:
        for a in elements:
            if not (isinstance(a, (int, np.integer)) and 0 <= a < self.q):
                raise ElementOutOfRange(f"{a!r} is not an element of GF({self.q})", {"element": repr(a)})

    def add(self, a: int, b: int) -> int:
        self._check(a, b)
        return int(self.add_table[a, b])

    def mul(self, a: int, b: int) -> int:
        self._check(a, b)
        return int(self.mul_table[a, b])

    def neg(self, a: int) -> int:
        self._check(a)
        return int(self.neg_table[a])

    def sub(self, a: int, b: int) -> int:
        return self.add(a, self.neg(b))

    def inv(self, a: int) -> int:
        self._check(a)
        if a == 0:
            raise FieldDivisionByZero(f"0 has no inverse in GF({self.q})")
        return int(self.inv_table[a])

    def element_order(self, a: int) -> int:
        """Multiplicative order of a nonzero element."""
        self._check(a)
        if a == 0:
            raise FieldDivisionByZero("0 has no multiplicative order")
        order, x = 1, a
        while x != 1:
            x = int(self.mul_table[x, a])
            order += 1
        return order

    @property
    def generator(self) -> int:
        """Smallest element generating the multiplicative group."""
        if self._generator is None:
            self._generator = next(a for a in range(1, self.q) if self.element_order(a) == self.q - 1)
        return self._generator

    def dot(self, vectors: np.ndarray, normal: np.ndarray) -> np.ndarray:
        """Evaluate the linear functional with coefficients ``normal`` on rows of ``vectors``."""
        acc = np.zeros(len(vectors), dtype=np.int64)
        for coord, coeff in enumerate(normal):
            acc = self.add_table[acc, self.mul_table[coeff, vectors[:, coord]]]
        return acc

    def verify_axioms(self) -> bool:
        """Exhaustively check the field axioms on the tables."""
        q = self.q
        add, mul = self.add_table, self.mul_table
        elements = np.arange(q)
        checks = {
            "add commutative": np.array_equal(add, add.T),
            "mul commutative": np.array_equal(mul, mul.T),
            "add associative": np.array_equal(add[add[:, :, None], elements[None, None, :]],
                                              add[elements[:, None, None], add[None, :, :]]),
            "mul associative": np.array_equal(mul[mul[:, :, None], elements[None, None, :]],
                                              mul[elements[:, None, None], mul[None, :, :]]),
            "distributive": np.array_equal(mul[elements[:, None, None], add[None, :, :]],
                                           add[mul[:, :, None], mul[:, None, :]]),
            "additive identity": np.array_equal(add[0], elements),
            "multiplicative identity": np.array_equal(mul[1], elements),
            "addition bijective": all(len(np.unique(row)) == q for row in add),
            "additive inverses": bool(np.all(add[elements, self.neg_table] == 0)),
            "multiplicative inverses": bool(np.all(mul[elements[1:], self.inv_table[1:]] == 1)),
        }
        failed = [name for name, ok in checks.items() if not ok]
        if failed:
            logger.error(f"GF({q}) axiom failures: {failed}")
            return False
        return True


@cached(key_prefix="gf")
def field_new(q: int) -> FiniteField:
    """Return GF(q); identical tables for identical q."""
    if not isinstance(q, (int, np.integer)) or q < 2:
        raise NotPrimePower(f"field order must be an integer >= 2, got {q!r}", {"q": repr(q)})
    field = FiniteField(int(q))
    if not field.verify_axioms():
        raise RuntimeError(f"GF({q}) tables failed the axiom check")
    return field


def field_ops(F: FiniteField, op: str, a: int, b: Optional[int] = None) -> int:
    """Dispatch a named field operation."""
    if op in ("add", "mul", "sub"):
        if b is None:
            raise ValueError(f"{op} needs two operands")
        return getattr(F, op)(a, b)
    if op in ("neg", "inv"):
        return getattr(F, op)(a)
    raise ValueError(f"Unknown field operation: {op}")
