"""
Tests for affine designs module
"""

import os

import numpy as np
import pytest

from designs import (
    AffineDesign,
    DesignParams,
    affine_geometry_design,
    check_hadamard,
    hadamard_3_design,
    parse_hadamard,
    read_design,
    read_hadamard,
    sylvester_hadamard,
    verify_affine,
    write_design,
    write_hadamard,
)
from errors import (
    AxiomViolation,
    DimensionMismatch,
    IndexOutOfRange,
    NotHadamard,
    NotNormalized,
    ParameterMismatch,
    TooLarge,
)
from gf import field_new


class TestDesignParams:
    """Test cases for the affine design parameter table."""

    def test_ag42(self):
        """Test AG(4,2) parameters."""
        params = DesignParams.from_qr(2, 4)
        assert (params.v, params.b, params.m, params.k, params.lam, params.epsilon) == (16, 30, 15, 8, 7, 3)

    def test_ag33(self):
        """Test AG(3,3) parameters."""
        params = DesignParams.from_qr(3, 3)
        assert (params.v, params.b, params.m, params.k, params.lam) == (27, 39, 13, 9, 4)

    def test_non_integral_epsilon(self):
        """Test (r-1)/(q-1) must be an integer."""
        with pytest.raises(ParameterMismatch):
            DesignParams.from_qr(3, 2)


class TestAffineGeometry:
    """Test cases for AG(d,q) generation."""

    @pytest.mark.parametrize("q,d", [(2, 2), (2, 3), (2, 4), (3, 2), (3, 3), (4, 2), (5, 2)])
    def test_generated_designs_verify(self, q, d):
        """Test both affine axioms on every generated design."""
        design = affine_geometry_design(field_new(q), d)
        params = verify_affine(design)
        assert design.v == q ** d
        assert design.m == (q ** d - 1) // (q - 1)
        assert params.r == q ** (d - 2)

    def test_ag22_labels(self):
        """Test the class and label order of AG(2,2)."""
        design = affine_geometry_design(field_new(2), 2)
        assert design.labels.tolist() == [[0, 1, 0, 1], [0, 0, 1, 1], [0, 1, 1, 0]]

    def test_block_of(self):
        """Test block lookup and its range check."""
        design = affine_geometry_design(field_new(3), 2)
        assert design.block_of(0, 1) == 1
        with pytest.raises(IndexOutOfRange):
            design.block_of(4, 0)
        with pytest.raises(IndexOutOfRange):
            design.block_of(0, 9)

    def test_point_cap(self):
        """Test oversized geometries are refused."""
        with pytest.raises(TooLarge):
            affine_geometry_design(field_new(2), 20)
        with pytest.raises(TooLarge):
            affine_geometry_design(field_new(3), 3, point_cap=10)

    def test_dimension_too_small(self):
        """Test d >= 2 is required."""
        with pytest.raises(DimensionMismatch):
            affine_geometry_design(field_new(3), 1)

    def test_incidence_matrix(self):
        """Test point-block incidences."""
        design = affine_geometry_design(field_new(3), 2)
        incidence = design.incidence_matrix()
        assert incidence.shape == (9, 12)
        assert np.all(incidence.sum(axis=0) == 3)
        assert np.all(incidence.sum(axis=1) == 4)


class TestAxiomViolations:
    """Test cases for rejected designs."""

    def test_unequal_blocks(self):
        """Test axiom (ii): a class whose blocks differ in size."""
        labels = affine_geometry_design(field_new(2), 2).labels.copy()
        labels[0, 0] = 1
        with pytest.raises(AxiomViolation) as excinfo:
            verify_affine(AffineDesign(2, 1, labels))
        assert excinfo.value.axiom == "ii"
        assert excinfo.value.exit_code == 3

    def test_repeated_class(self):
        """Test axiom (i): two identical classes meet in too many points."""
        labels = affine_geometry_design(field_new(2), 2).labels.copy()
        labels[2] = labels[1]
        with pytest.raises(AxiomViolation) as excinfo:
            verify_affine(AffineDesign(2, 1, labels))
        assert excinfo.value.axiom == "i"
        assert excinfo.value.witness["size"] == 2

    def test_wrong_class_count(self):
        """Test the number of classes must match q and r."""
        labels = affine_geometry_design(field_new(2), 2).labels[:2].copy()
        with pytest.raises(ParameterMismatch):
            verify_affine(AffineDesign(2, 1, labels))


class TestHadamard:
    """Test cases for Hadamard matrices and 3-designs."""

    @pytest.mark.parametrize("order", [1, 2, 4, 8, 16])
    def test_sylvester(self, order):
        """Test H H^T = nI for Sylvester matrices."""
        H = sylvester_hadamard(order)
        assert np.array_equal(H @ H.T, order * np.eye(order, dtype=int))
        assert np.all(H[0] == 1) and np.all(H[:, 0] == 1)

    def test_sylvester_rejects_non_power(self):
        """Test non powers of two are refused."""
        with pytest.raises(NotHadamard):
            sylvester_hadamard(12)

    def test_3_design_matches_ag32(self):
        """Test the Sylvester 3-design of order 8 is AG(3,2) label for label."""
        design = hadamard_3_design(sylvester_hadamard(8))
        verify_affine(design)
        assert np.array_equal(design.labels, affine_geometry_design(field_new(2), 3).labels)

    def test_3_design_order_16(self):
        """Test the order-16 3-design is an affine design with q=2, r=4."""
        design = hadamard_3_design(sylvester_hadamard(16))
        params = verify_affine(design)
        assert (params.v, params.m, params.r) == (16, 15, 4)

    def test_not_normalized(self):
        """Test normalisation is required."""
        H = sylvester_hadamard(8)
        H[:, 1] *= -1
        with pytest.raises(NotNormalized):
            hadamard_3_design(H)

    def test_not_hadamard(self):
        """Test non-orthogonal rows are rejected."""
        H = sylvester_hadamard(4)
        H[1, 1] = 1
        with pytest.raises(NotHadamard):
            check_hadamard(H)

    def test_parse_compact_rows(self):
        """Test '+'/'-' rows are accepted."""
        H = parse_hadamard("++\n+-\n")
        assert H.tolist() == [[1, 1], [1, -1]]


class TestDesignFiles:
    """Test cases for design and Hadamard files."""

    def test_design_file(self, temp_dir):
        """Test writing and reading a renumbered design."""
        design = affine_geometry_design(field_new(3), 2).renumbered([3, 2, 1, 0])
        path = os.path.join(temp_dir, "design.txt")
        write_design(path, design)
        assert read_design(path) == design

    def test_renumbered_rejects_non_permutation(self):
        """Test class numberings must be permutations."""
        with pytest.raises(IndexOutOfRange):
            affine_geometry_design(field_new(2), 2).renumbered([0, 0, 1])

    def test_hadamard_file(self, temp_dir):
        """Test the Hadamard text format."""
        path = os.path.join(temp_dir, "h8.txt")
        write_hadamard(path, sylvester_hadamard(8))
        assert np.array_equal(read_hadamard(path), sylvester_hadamard(8))
