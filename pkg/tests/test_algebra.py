"""
Tests for spectra, ranks and Hadamard conversions
"""

import networkx as nx
import numpy as np
import pytest

from algebra import (
    HadamardMatrix,
    QuadraticSurd,
    bareiss_rank,
    certify_spectrum,
    ddg_spectrum,
    exact_multiplicity,
    hadamard_srg_params,
    hadamard_to_srg,
    p_rank,
    srg_to_hadamard,
    surd_pair_multiplicity,
)
from construct import construction1, construction2, construction3, construction4
from designs import sylvester_hadamard
from errors import (
    InfeasibleParameters,
    NotGraphical,
    NotPrime,
    NotRegularHadamard,
    SpectrumMismatch,
    WrongParameters,
)
from graph import DdgParams, Graph, fixture_graph


def _naive_rank_mod_2(matrix):
    """Row reduction over GF(2) on lists of bits."""
    rows = [[int(x) % 2 for x in row] for row in matrix]
    rank = 0
    for col in range(len(rows[0]) if rows else 0):
        pivot = next((r for r in range(rank, len(rows)) if rows[r][col]), None)
        if pivot is None:
            continue
        rows[rank], rows[pivot] = rows[pivot], rows[rank]
        for r in range(len(rows)):
            if r != rank and rows[r][col]:
                rows[r] = [a ^ b for a, b in zip(rows[r], rows[rank])]
        rank += 1
    return rank


class TestQuadraticSurd:
    """Test cases for exact eigenvalue values."""

    @pytest.mark.parametrize("square,sign,text", [
        (16, 1, "4"), (16, -1, "-4"), (12, 1, "2*sqrt(3)"), (14, 1, "sqrt(14)"), (2, -1, "-sqrt(2)"), (0, 1, "0"),
    ])
    def test_str(self, square, sign, text):
        """Test the printed form."""
        assert str(QuadraticSurd.from_square(square, sign)) == text

    def test_integer_and_float(self):
        """Test integrality and float conversion."""
        assert QuadraticSurd.from_square(9).is_integer
        assert not QuadraticSurd.from_square(8).is_integer
        assert float(QuadraticSurd.from_square(8)) == pytest.approx(8 ** 0.5)
        assert -QuadraticSurd(3) == QuadraticSurd(-3)


class TestDdgSpectrum:
    """Test cases for spectra from parameters."""

    def test_octahedron_line_parameters(self):
        """Test the unique spectrum of (12,6,2,3,3,4)."""
        spectrum = ddg_spectrum(DdgParams(12, 6, 2, 3, 3, 4))
        assert spectrum.resolved
        assert str(spectrum) == "{6^1, 2^3, 0^2, -2^6}"

    def test_construction1_q3(self):
        """Test the spectrum of (36,24,15,16,4,9)."""
        spectrum = ddg_spectrum(DdgParams(36, 24, 15, 16, 4, 9))
        assert spectrum.multiplicities() == {"24": 1, "3": 12, "0": 3, "-3": 20}

    def test_srg_as_ddg(self):
        """Test lambda = mu parameters give the SRG multiplicities."""
        spectrum = ddg_spectrum(DdgParams(16, 6, 2, 2, 1, 16))
        assert spectrum.multiplicities() == {"6": 1, "2": 6, "-2": 9}

    def test_several_candidates(self):
        """Test unresolved spectra refuse to pick a candidate."""
        spectrum = ddg_spectrum(DdgParams(45, 24, 15, 12, 5, 9))
        assert len(spectrum.candidates) > 1
        assert not spectrum.resolved
        with pytest.raises(SpectrumMismatch):
            spectrum.terms

    def test_infeasible(self):
        """Test a trace condition that no multiplicities satisfy."""
        with pytest.raises(InfeasibleParameters):
            ddg_spectrum(DdgParams(12, 6, 4, 2, 3, 4))

    def test_as_dict(self):
        """Test the report form lists every candidate."""
        payload = ddg_spectrum(DdgParams(4, 2, 2, 0, 2, 2)).as_dict()
        assert payload["params"] == [4, 2, 2, 0, 2, 2]
        assert payload["candidates"] == [[
            {"eigenvalue": "2", "multiplicity": 1},
            {"eigenvalue": "0", "multiplicity": 2},
            {"eigenvalue": "-2", "multiplicity": 1},
        ]]


class TestCertifySpectrum:
    """Test cases for spectra certified on graphs."""

    def test_four_cycle(self):
        """Test the 4-cycle."""
        spectrum = certify_spectrum(Graph.from_networkx(nx.cycle_graph(4)))
        assert spectrum.multiplicities() == {"2": 1, "0": 2, "-2": 1}
        assert spectrum.method == "bareiss"

    def test_construction1_graphs(self, ag_designs, latin_square):
        """Test two Construction 1 graphs."""
        small = certify_spectrum(construction1(ag_designs(2, 2, 3), latin_square("c3")))
        assert small.multiplicities() == {"6": 1, "2": 3, "0": 2, "-2": 6}
        large = certify_spectrum(construction1(ag_designs(2, 3, 7), latin_square("ls7_3")))
        assert large.multiplicities() == {"28": 1, "4": 21, "0": 6, "-4": 28}

    def test_construction2_graphs(self, ag_designs, latin_square):
        """Test Construction 2 spectra at q=3 and at q=2, d=3."""
        graph = construction2(ag_designs(3, 2, 3), latin_square("c4"), 0, [0, 0, 0])
        assert certify_spectrum(graph).multiplicities() == {"18": 1, "3": 6, "0": 8, "-3": 12}
        graph = construction2(ag_designs(2, 3, 6), latin_square("ls7_1"), 0, [0, 1, 0, 1, 1, 0])
        assert certify_spectrum(graph).multiplicities() == {"24": 1, "4": 15, "0": 11, "-4": 21}

    def test_resolves_ambiguous_parameters(self, ag_designs, latin_square):
        """Test a graph picks exactly one of several candidate spectra."""
        graph = construction3(ag_designs(3, 2, 5), latin_square("c5"))
        spectrum = certify_spectrum(graph)
        assert spectrum.resolved
        assert sum(spectrum.multiplicities().values()) == 45

    @pytest.mark.parametrize("square,plus,minus", [("klein", 5, 10)])
    def test_srg_multiplicities(self, ag_designs, latin_square, square, plus, minus):
        """Test the Construction 4 SRG on 16 vertices."""
        graph = construction4(ag_designs(2, 2, 4), latin_square(square))
        assert certify_spectrum(graph).multiplicities() == {"10": 1, "2": plus, "-2": minus}

    def test_construction3_64(self, ag_designs, latin_square):
        """Test SRG(64,28,12,12) multiplicities."""
        graph = construction3(ag_designs(2, 3, 8), latin_square("c8"))
        assert certify_spectrum(graph).multiplicities() == {"28": 1, "4": 28, "-4": 35}

    def test_modular_certificate(self, mocker):
        """Test the modular path agrees with exact elimination."""
        graph = fixture_graph("octahedron_line")
        exact = certify_spectrum(graph)
        mocker.patch("algebra.settings.BAREISS_MAX_VERTICES", 4)
        modular = certify_spectrum(graph)
        assert modular.method.startswith("modular-certificate")
        assert modular.multiplicities() == exact.multiplicities()

    def test_wrong_params(self):
        """Test parameters that do not belong to the graph."""
        with pytest.raises(SpectrumMismatch):
            certify_spectrum(fixture_graph("rook_4x4"), DdgParams(12, 6, 2, 3, 3, 4))

    def test_construction4_378(self, ag_designs, latin_square):
        """Test the 378-vertex SRG through the modular certificate."""
        graph = construction4(ag_designs(3, 3, 14), latin_square("c14"))
        spectrum = certify_spectrum(graph)
        assert spectrum.multiplicities() == {"261": 1, "9": 174, "-9": 203}
        assert spectrum.method.startswith("modular-certificate")


class TestRanks:
    """Test cases for exact and modular ranks."""

    def test_bareiss_rank(self):
        """Test rational rank on small matrices."""
        assert bareiss_rank(np.array([[1, 2], [2, 4]])) == 1
        assert bareiss_rank(np.eye(3, dtype=int)) == 3
        assert bareiss_rank(np.zeros((3, 3), dtype=int)) == 0
        assert bareiss_rank(np.array([[0, 1], [1, 0]])) == 2

    def test_p_rank_complete_graph(self):
        """Test J - I of order 4 over GF(2) and GF(3)."""
        graph = Graph.from_networkx(nx.complete_graph(4))
        assert p_rank(graph, 2) == 4
        assert p_rank(graph, 3) == 3

    def test_p_rank_not_prime(self):
        """Test composite p is rejected."""
        with pytest.raises(NotPrime):
            p_rank(fixture_graph("petersen"), 4)

    @pytest.mark.parametrize("seed", range(20))
    def test_2_rank_against_row_reduction(self, seed):
        """Test the bitset GF(2) rank against plain row reduction up to 16 vertices."""
        rng = np.random.default_rng(seed)
        n = 2 + seed % 15
        upper = np.triu(rng.random((n, n)) < 0.5, 1)
        graph = Graph(upper | upper.T)
        assert p_rank(graph, 2) == _naive_rank_mod_2(graph.matrix)

    @pytest.mark.parametrize("p", [2, 3, 5, 7])
    def test_p_rank_relabeling_invariance(self, rng, ag_designs, latin_square, p):
        """Test p-ranks do not depend on the vertex order."""
        graph = construction1(ag_designs(3, 2, 4), latin_square("c4"))
        rank = p_rank(graph, p)
        for _ in range(10):
            assert p_rank(graph.relabel(rng.permutation(graph.n)), p) == rank

    @pytest.mark.parametrize("square,rank", [("abelian8_c2xc2xc2", 8), ("c8", 10), ("abelian8_c4xc2", 8)])
    def test_2_ranks_separate_loops(self, ag_designs, latin_square, square, rank):
        """Test 2-ranks of Construction 3 graphs on the abelian groups of order 8."""
        graph = construction3(ag_designs(2, 3, 8), latin_square(square))
        assert p_rank(graph, 2) == rank

    def test_exact_multiplicities(self):
        """Test kernel dimensions on the rook graph."""
        graph = fixture_graph("rook_4x4")
        assert exact_multiplicity(graph, 2) == 6
        assert exact_multiplicity(graph, 6) == 1
        assert surd_pair_multiplicity(graph, 4) == 15

    def test_3_rank_378(self, ag_designs, latin_square):
        """Test the 3-rank of the 378-vertex Construction 4 graph."""
        graph = construction4(ag_designs(3, 3, 14), latin_square("c14"))
        assert p_rank(graph, 3) == 66


class TestHadamard:
    """Test cases for regular graphical Hadamard matrices."""

    def test_srg_params(self):
        """Test both signs at order 16."""
        assert hadamard_srg_params(16, "-").as_tuple() == (16, 6, 2, 2)
        assert hadamard_srg_params(16, "+").as_tuple() == (16, 10, 6, 6)
        assert hadamard_srg_params(36, "-").as_tuple() == (36, 15, 6, 6)

    @pytest.mark.parametrize("n,sign", [(12, "-"), (9, "+"), (16, "x")])
    def test_srg_params_rejected(self, n, sign):
        """Test orders that are not even squares and bad signs."""
        with pytest.raises(WrongParameters):
            hadamard_srg_params(n, sign)

    def test_rook_round_trip(self):
        """Test SRG(16,6,2,2) to a Hadamard matrix and back."""
        rook = fixture_graph("rook_4x4")
        H = srg_to_hadamard(rook)
        assert H.sign == "-"
        assert H.order == 16 and H.row_sum == 4
        assert H.graphical and H.regular
        assert hadamard_to_srg(H.matrix, "-") == rook

    def test_construction4_plus_sign(self, ag_designs, latin_square):
        """Test the Construction 4 graph gives the '+' sign."""
        graph = construction4(ag_designs(2, 2, 4), latin_square("klein"))
        H = srg_to_hadamard(graph)
        assert H.sign == "+"
        assert H.row_sum == -4

    def test_matrix_flags(self):
        """Test the graphical and regular flags on a Sylvester matrix."""
        H = HadamardMatrix(sylvester_hadamard(4), "-")
        assert not H.graphical
        assert not H.regular
        flipped = HadamardMatrix(np.array([[1, 1, 1, -1], [1, 1, -1, 1], [1, -1, 1, 1], [-1, 1, 1, 1]]), "-")
        assert flipped.graphical and flipped.regular

    def test_wrong_sign_requested(self):
        """Test asking for the other sign."""
        with pytest.raises(WrongParameters):
            srg_to_hadamard(fixture_graph("rook_4x4"), "+")

    def test_not_hadamard_parameters(self):
        """Test the Clebsch graph has no Hadamard parameters."""
        with pytest.raises(WrongParameters):
            srg_to_hadamard(fixture_graph("clebsch"))

    def test_not_graphical(self):
        """Test a Sylvester matrix with a non-constant diagonal."""
        with pytest.raises(NotGraphical):
            hadamard_to_srg(sylvester_hadamard(4), "-")

    def test_not_regular(self):
        """Test a symmetric unit-diagonal matrix with unequal row sums."""
        H = np.array([[1, 1, 1, 1], [1, 1, -1, -1], [1, -1, 1, -1], [1, -1, -1, 1]])
        with pytest.raises(NotRegularHadamard):
            hadamard_to_srg(H, "-")

    def test_order_4(self):
        """Test the smallest regular graphical matrix and its sign."""
        H = np.array([[1, 1, 1, -1], [1, 1, -1, 1], [1, -1, 1, 1], [-1, 1, 1, 1]])
        assert hadamard_to_srg(H, "-").edge_count == 2
        with pytest.raises(WrongParameters):
            hadamard_to_srg(H, "+")
