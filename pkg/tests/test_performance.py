"""
Performance benchmarks (pytest-benchmark)
"""

import pytest

from algebra import certify_spectrum, p_rank
from construct import construction1, construction3
from graph import verify_ddg
from iso import canonical_form


@pytest.mark.slow
class TestPerformance:
    """Benchmarks for the hot paths."""

    def test_construct_and_verify_56(self, benchmark, ag_designs, latin_square):
        """Benchmark Construction 1 at q=2, d=3 plus certification."""
        designs, square = ag_designs(2, 3, 7), latin_square("ls7_1")

        def run():
            return verify_ddg(construction1(designs, square)).params

        assert benchmark(run).as_tuple() == (56, 28, 12, 14, 7, 8)

    def test_spectrum_64(self, benchmark, ag_designs, latin_square):
        """Benchmark exact spectrum certification on 64 vertices."""
        graph = construction3(ag_designs(2, 3, 8), latin_square("c8"))
        spectrum = benchmark(certify_spectrum, graph)
        assert spectrum.resolved

    def test_2_rank_64(self, benchmark, ag_designs, latin_square):
        """Benchmark the bitset GF(2) rank."""
        graph = construction3(ag_designs(2, 3, 8), latin_square("c8"))
        assert benchmark(p_rank, graph, 2) == 10

    def test_canonical_form_36(self, benchmark, ag_designs, latin_square):
        """Benchmark canonical labeling of a 36-vertex DDG."""
        graph = construction1(ag_designs(3, 2, 4), latin_square("klein"))
        form = benchmark(canonical_form, graph)
        assert len(form.encoding) > 1
