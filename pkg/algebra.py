"""
Spectra, exact ranks and Hadamard conversions
"""

import logging
from dataclasses import dataclass, field
from math import isqrt
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from config import settings
from designs import check_hadamard
from errors import (
    InfeasibleParameters,
    NotGraphical,
    NotHadamard,
    NotPrime,
    NotRegularHadamard,
    SpectrumMismatch,
    WrongParameters,
)
from graph import DdgParams, Graph, SrgParams, _split_surd, verify_ddg, verify_srg

logger = logging.getLogger(__name__)

CERTIFICATE_PRIMES = (2147483647, 2147483629, 2147483587)


@dataclass(frozen=True)
class QuadraticSurd:
    """coefficient * sqrt(radicand), radicand squarefree (1 for integers)."""

    coefficient: int
    radicand: int = 1

    @classmethod
    def from_square(cls, square: int, sign: int = 1) -> "QuadraticSurd":
        if square == 0:
            return cls(0, 1)
        c, r = _split_surd(square)
        return cls(sign * c, r)

    @property
    def is_integer(self) -> bool:
        return self.radicand == 1 or self.coefficient == 0

    @property
    def square(self) -> int:
        return self.coefficient * self.coefficient * self.radicand

    def __float__(self) -> float:
        return self.coefficient * float(np.sqrt(self.radicand))

    def __neg__(self) -> "QuadraticSurd":
        return QuadraticSurd(-self.coefficient, self.radicand)

    def sort_key(self) -> Tuple[int, int]:
        sign = (self.coefficient > 0) - (self.coefficient < 0)
        return sign * self.square, self.radicand

    def __str__(self) -> str:
        if self.is_integer:
            return str(self.coefficient)
        if abs(self.coefficient) == 1:
            return f"{'-' if self.coefficient < 0 else ''}sqrt({self.radicand})"
        return f"{self.coefficient}*sqrt({self.radicand})"


@dataclass(frozen=True)
class SpectrumTerm:
    value: QuadraticSurd
    multiplicity: int

    def as_dict(self):
        return {"eigenvalue": str(self.value), "multiplicity": self.multiplicity}


@dataclass
class Spectrum:
    """Candidate spectra for a parameter set; resolved once a graph has picked one."""

    params: DdgParams
    candidates: List[Tuple[SpectrumTerm, ...]]
    resolved: bool = False
    method: Optional[str] = None

    @property
    def terms(self) -> Tuple[SpectrumTerm, ...]:
        if len(self.candidates) != 1:
            raise SpectrumMismatch(f"{len(self.candidates)} candidate spectra remain; certify against a graph")
        return self.candidates[0]

    def distinct_values(self) -> List[QuadraticSurd]:
        """Every eigenvalue with positive multiplicity in some candidate, largest first."""
        values = {term.value for candidate in self.candidates for term in candidate}
        return sorted(values, key=QuadraticSurd.sort_key, reverse=True)

    def multiplicities(self) -> Dict[str, int]:
        return {str(term.value): term.multiplicity for term in self.terms}

    def __str__(self) -> str:
        return "{" + ", ".join(f"{term.value}^{term.multiplicity}" for term in self.terms) + "}"

    def as_dict(self):
        return {
            "params": list(self.params.as_tuple()),
            "resolved": self.resolved,
            "method": self.method,
            "candidates": [[term.as_dict() for term in candidate] for candidate in self.candidates],
        }


def _candidate_terms(params: DdgParams, split) -> Tuple[SpectrumTerm, ...]:
    counts: Dict[QuadraticSurd, int] = {QuadraticSurd(params.k): 1}
    theta_f = QuadraticSurd.from_square(params.theta_f_sq)
    theta_g = QuadraticSurd.from_square(params.theta_g_sq)
    for value, multiplicity in ((theta_f, split.f1), (-theta_f, split.f2),
                                (theta_g, split.g1), (-theta_g, split.g2)):
        counts[value] = counts.get(value, 0) + multiplicity
    terms = [SpectrumTerm(value, count) for value, count in counts.items() if count > 0]
    return tuple(sorted(terms, key=lambda term: term.value.sort_key(), reverse=True))


def ddg_spectrum(params: DdgParams) -> Spectrum:
    """Every spectrum consistent with the DDG parameters.

    Eigenvalues are k, +-sqrt(k^2 - v*lambda2) and +-sqrt(k - lambda1);
    multiplicities come from the sum and zero-trace conditions.
    """
    candidates: List[Tuple[SpectrumTerm, ...]] = []
    for split in params.multiplicity_splits():
        terms = _candidate_terms(params, split)
        if terms not in candidates:
            candidates.append(terms)
    if not candidates:
        raise InfeasibleParameters(f"no multiplicities satisfy the trace condition for {params.as_tuple()}",
                                   {"params": list(params.as_tuple())})
    logger.debug(f"{params.as_tuple()}: {len(candidates)} candidate spectra")
    return Spectrum(params, candidates, resolved=len(candidates) == 1)


def bareiss_rank(matrix: np.ndarray) -> int:
    """Rank over Q by fraction-free elimination on Python integers."""
    M = np.array(matrix, dtype=object)
    rows, cols = M.shape
    rank, previous = 0, 1
    for col in range(cols):
        if rank == rows:
            break
        nonzero = [r for r in range(rank, rows) if M[r, col] != 0]
        if not nonzero:
            continue
        if nonzero[0] != rank:
            M[[rank, nonzero[0]]] = M[[nonzero[0], rank]]
        pivot = M[rank, col]
        if rank + 1 < rows:
            factors = M[rank + 1:, col].copy()
            M[rank + 1:, col:] = (pivot * M[rank + 1:, col:] - np.outer(factors, M[rank, col:])) // previous
        previous = pivot
        rank += 1
    return rank


def _is_prime(p: int) -> bool:
    if p < 2:
        return False
    factor = 2
    while factor * factor <= p:
        if p % factor == 0:
            return False
        factor += 1
    return True


def _rank_mod_p(matrix: np.ndarray, p: int) -> int:
    """Rank over GF(p), p < 2^31, with int64 arithmetic."""
    M = np.mod(np.asarray(matrix, dtype=np.int64), p)
    rows, cols = M.shape
    rank = 0
    for col in range(cols):
        if rank == rows:
            break
        nonzero = np.flatnonzero(M[rank:, col])
        if not len(nonzero):
            continue
        pivot_row = rank + int(nonzero[0])
        if pivot_row != rank:
            M[[rank, pivot_row]] = M[[pivot_row, rank]]
        M[rank] = (M[rank] * pow(int(M[rank, col]), -1, p)) % p
        below = M[rank + 1:, col]
        hits = rank + 1 + np.flatnonzero(below)
        if len(hits):
            M[hits] = (M[hits] - M[hits, col][:, None] * M[rank]) % p
        rank += 1
    return rank


def _rank_mod_2(rows: Sequence[int]) -> int:
    pivots: Dict[int, int] = {}
    for row in rows:
        x = row
        while x:
            top = x.bit_length() - 1
            if top not in pivots:
                pivots[top] = x
                break
            x ^= pivots[top]
    return len(pivots)


def p_rank(G: Graph, p: int) -> int:
    """Rank of the adjacency matrix over GF(p)."""
    if not _is_prime(p):
        raise NotPrime(f"{p} is not prime")
    if p == 2:
        return _rank_mod_2(G.rows)
    return _rank_mod_p(G.matrix, p)


def exact_multiplicity(G: Graph, theta: int) -> int:
    """Multiplicity of the integer eigenvalue theta: n - rank(A - theta I) over Q."""
    return G.n - bareiss_rank(G.matrix - theta * np.eye(G.n, dtype=np.int64))


def surd_pair_multiplicity(G: Graph, square: int) -> int:
    """Combined multiplicity of +-sqrt(square): n - rank(A^2 - square I) over Q."""
    A = G.matrix
    return G.n - bareiss_rank(A @ A - square * np.eye(G.n, dtype=np.int64))


def _factor_matrices(G: Graph, values: Sequence[QuadraticSurd]) -> Dict[QuadraticSurd, np.ndarray]:
    """One integer polynomial in A per eigenvalue, conjugate surds sharing A^2 - tI."""
    A = G.matrix
    identity = np.eye(G.n, dtype=np.int64)
    factors: Dict[QuadraticSurd, np.ndarray] = {}
    for value in values:
        if value.is_integer:
            factors[value] = A - value.coefficient * identity
        elif -value not in factors:
            factors[value] = A @ A - value.square * identity
    return factors


def _annihilates(factors: Sequence[np.ndarray]) -> bool:
    """True iff the product of the factor matrices is exactly zero."""
    ordered = sorted(factors, key=lambda F: int(np.abs(F).max()))
    product = ordered[0]
    bound = int(np.abs(product).max())
    for F in ordered[1:]:
        bound *= F.shape[0] * int(np.abs(F).max())
        if bound < 2 ** 62:
            product = product @ F
        else:
            product = np.array(product, dtype=object) @ np.array(F, dtype=object)
        bound = max(int(np.abs(product).max()), 1) if product.size else 1
    return not np.any(product != 0)


def _kernel_dimensions(G: Graph, values: Sequence[QuadraticSurd]) -> Tuple[Dict[QuadraticSurd, int], str]:
    factors = _factor_matrices(G, values)
    n = G.n
    if n > settings.BAREISS_MAX_VERTICES and _annihilates(list(factors.values())):
        # The product vanishing splits R^n into the kernels, so upper bounds summing to n are exact.
        for p in CERTIFICATE_PRIMES:
            bounds = {value: n - _rank_mod_p(F, p) for value, F in factors.items()}
            if sum(bounds.values()) == n:
                return bounds, f"modular-certificate(p={p})"
            logger.debug(f"modular bounds mod {p} sum to {sum(bounds.values())}, not {n}")
    return {value: n - bareiss_rank(F) for value, F in factors.items()}, "bareiss"


def certify_spectrum(G: Graph, params: Optional[DdgParams] = None) -> Spectrum:
    """Pick the candidate spectrum the graph actually has, by exact kernel dimensions."""
    if params is None:
        params = verify_ddg(G).params
    spectrum = ddg_spectrum(params)
    values = spectrum.distinct_values()
    dimensions, method = _kernel_dimensions(G, values)

    observed: Dict[QuadraticSurd, int] = {}
    for value in values:
        if value.is_integer:
            observed[value] = dimensions[value]
        else:
            pair = dimensions[value] if value in dimensions else dimensions[-value]
            observed[value] = pair // 2
    actual = tuple(term for term in (SpectrumTerm(value, count) for value, count in observed.items())
                   if term.multiplicity > 0)
    for candidate in spectrum.candidates:
        if set(candidate) == set(actual):
            logger.info(f"Spectrum of {G!r} certified by {method}")
            return Spectrum(params, [candidate], resolved=True, method=method)
    raise SpectrumMismatch(
        f"observed multiplicities match none of the {len(spectrum.candidates)} candidates",
        {"observed": {str(value): count for value, count in observed.items()}, "method": method},
    )


@dataclass(frozen=True)
class HadamardMatrix:
    matrix: np.ndarray = field(repr=False)
    sign: str

    @property
    def order(self) -> int:
        return self.matrix.shape[0]

    @property
    def row_sum(self) -> int:
        return int(self.matrix[0].sum())

    @property
    def graphical(self) -> bool:
        """Symmetric with a constant diagonal."""
        M = self.matrix
        return bool(np.array_equal(M, M.T) and np.all(np.diagonal(M) == M[0, 0]))

    @property
    def regular(self) -> bool:
        """Every row sum equals every column sum."""
        M = self.matrix
        return bool(np.all(M.sum(axis=1) == self.row_sum) and np.all(M.sum(axis=0) == self.row_sum))


def hadamard_srg_params(n: int, sign: str) -> SrgParams:
    """SRG parameters matching a regular graphical Hadamard matrix of order n.

    sign '-' gives (n, n/2 - s/2, n/4 - s/2, n/4 - s/2) with s = sqrt(n);
    sign '+' uses + s/2.
    """
    if sign not in ("+", "-"):
        raise WrongParameters(f"sign must be '+' or '-', got {sign!r}")
    s = isqrt(n) if n > 0 else 0
    if n <= 0 or s * s != n or s % 2:
        raise WrongParameters(f"order {n} is not the square of an even integer")
    delta = s // 2 if sign == "+" else -(s // 2)
    lam = n // 4 + delta
    return SrgParams(n, n // 2 + delta, lam, lam)


def srg_to_hadamard(G: Graph, sign: Optional[str] = None) -> HadamardMatrix:
    """H = J - 2A for an SRG with Hadamard parameters."""
    params = verify_srg(G)
    matches = []
    for candidate in ("-", "+"):
        try:
            if hadamard_srg_params(G.n, candidate) == params:
                matches.append(candidate)
        except WrongParameters:
            break
    if sign is not None:
        matches = [s for s in matches if s == sign]
    if not matches:
        raise WrongParameters(f"SRG{params.as_tuple()} has no Hadamard parameters"
                              + (f" for sign {sign!r}" if sign else ""))
    H = np.ones((G.n, G.n), dtype=np.int64) - 2 * G.matrix
    if not np.array_equal(H @ H.T, G.n * np.eye(G.n, dtype=np.int64)):
        raise NotHadamard("J - 2A is not a Hadamard matrix")
    logger.info(f"SRG{params.as_tuple()} -> regular graphical Hadamard matrix, sign {matches[0]}")
    return HadamardMatrix(H, matches[0])


def hadamard_to_srg(H: np.ndarray, sign: str) -> Graph:
    """A = (J - H) / 2 for a regular graphical Hadamard matrix of the given sign."""
    H = check_hadamard(H)
    n = H.shape[0]
    if not np.array_equal(H, H.T) or len(set(np.diagonal(H).tolist())) != 1:
        raise NotGraphical("Hadamard matrix must be symmetric with constant diagonal")
    if np.diagonal(H)[0] != 1:
        raise NotGraphical("diagonal must be +1 for A = (J - H)/2 to have zero diagonal")
    sums = H.sum(axis=1)
    if len(set(sums.tolist())) != 1:
        raise NotRegularHadamard(f"row sums are not constant: {sorted(set(sums.tolist()))}")
    expected = hadamard_srg_params(n, sign)
    graph = Graph((np.ones((n, n), dtype=np.int64) - H) // 2)
    params = verify_srg(graph)
    if params != expected:
        raise WrongParameters(f"Hadamard matrix gives SRG{params.as_tuple()}, sign {sign!r} needs "
                              f"SRG{expected.as_tuple()}")
    return graph
