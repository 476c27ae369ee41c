#!/usr/bin/env python3
"""
Tests for the exact nilpotent Lie algebra layer.
"""

import numpy as np
import pytest
import sympy as sp
from hypothesis import given, settings

from modules.algebra_core import (
    DimensionMismatch,
    LatticeData,
    NilpotentLieAlgebra,
    Subspace,
    UnsupportedStep,
    is_zero_vector,
    make_vector,
    parse_vector,
)
from modules.validation import AlgebraDefinition, ConfigurationValidator, ValidationError
from strategies import rational_vectors


def _algebra(raw):
    return NilpotentLieAlgebra.from_definition(ConfigurationValidator().validate_algebra(raw))


def filiform(dim):
    brackets = [[1, j, j + 1, "1"] for j in range(2, dim)]
    return _algebra({
        "name": f"filiform{dim}", "dim": dim, "step": dim - 1,
        "layers": [2] + [1] * (dim - 2), "brackets": brackets,
    })


class TestStructure:
    def test_bundled_algebras_load(self, heisenberg, filiform4, abelian2, heisenberg_r):
        assert (heisenberg.dim, heisenberg.step) == (3, 2)
        assert (filiform4.dim, filiform4.step) == (4, 3)
        assert (abelian2.dim, abelian2.step) == (2, 1)
        assert (heisenberg_r.dim, heisenberg_r.step) == (4, 2)

    def test_heisenberg_bracket(self, heisenberg):
        e1, e2, e3 = heisenberg.basis
        assert heisenberg.bracket(e1, e2) == e3
        assert heisenberg.bracket(e2, e1) == -e3
        assert is_zero_vector(heisenberg.bracket(e1, e3))

    def test_central_series_dimensions(self, heisenberg, filiform4, heisenberg_r, abelian2):
        assert [s.dim for s in heisenberg.central_series()] == [3, 1, 0]
        assert [s.dim for s in filiform4.central_series()] == [4, 2, 1, 0]
        assert [s.dim for s in heisenberg_r.central_series()] == [4, 1, 0]
        assert [s.dim for s in abelian2.central_series()] == [2, 0]

    def test_center(self, heisenberg, heisenberg_r, filiform4):
        assert heisenberg.center.same_as(Subspace.span([heisenberg.basis[2]], 3))
        assert heisenberg_r.center.dim == 2
        assert filiform4.center.same_as(Subspace.span([filiform4.basis[3]], 4))

    def test_jacobi_residual_zero(self, filiform4):
        basis = filiform4.basis
        for x in basis:
            for y in basis:
                for z in basis:
                    assert is_zero_vector(filiform4.jacobi_residual(x, y, z))

    def test_float_bracket_matches_exact(self, filiform4):
        x = make_vector(["1/2", "3", "-1", "2"])
        y = make_vector(["2", "-1/3", "5", "0"])
        exact = np.array([float(c) for c in filiform4.bracket(x, y)])
        floating = filiform4.bracket(np.array([0.5, 3, -1, 2.0]), np.array([2, -1 / 3, 5, 0.0]))
        np.testing.assert_allclose(floating, exact, atol=1e-14)

    def test_ad_matrix(self, heisenberg):
        ad = heisenberg.ad_matrix(heisenberg.basis[0])
        assert ad.col(1) == heisenberg.basis[2]
        assert ad.col(0) == make_vector([0, 0, 0])
        assert ad * heisenberg.basis[1] == heisenberg.bracket(heisenberg.basis[0], heisenberg.basis[1])

    def test_ideals(self, filiform4):
        for j in range(1, 4):
            assert filiform4.is_ideal(filiform4.series_term(j))
        assert not filiform4.is_ideal(Subspace.span([filiform4.basis[1]], 4))


class TestValidation:
    def test_wrong_step_rejected(self):
        with pytest.raises(ValidationError, match="step"):
            _algebra({"dim": 3, "step": 1, "layers": [3], "brackets": [[1, 2, 3, "1"]]})

    def test_broken_malcev_flag_rejected(self):
        with pytest.raises(ValidationError, match="central series term"):
            _algebra({"dim": 3, "step": 2, "layers": [1, 2], "brackets": [[1, 2, 3, "1"]]})

    def test_non_nilpotent_rejected(self):
        with pytest.raises(ValidationError):
            _algebra({"dim": 2, "step": 1, "layers": [2], "brackets": [[1, 2, 1, "1"]]})

    def test_jacobi_violation_rejected(self):
        # [E1,[E2,E3]] + [E2,[E3,E1]] + [E3,[E1,E2]] = -[E2,E4] = -E5
        raw = {
            "dim": 5, "step": 3, "layers": [2, 1, 2],
            "brackets": [[1, 2, 3, "1"], [1, 3, 4, "1"], [2, 4, 5, "1"]],
        }
        with pytest.raises(ValidationError, match="Jacobi"):
            _algebra(raw)

    def test_antisymmetry_conflict_rejected(self):
        raw = {"dim": 3, "step": 2, "layers": [2, 1], "brackets": [[1, 2, 3, "1"], [2, 1, 3, "1"]]}
        with pytest.raises(ValidationError, match="Antisymmetry"):
            _algebra(raw)

    def test_layer_sum_mismatch(self):
        with pytest.raises(ValidationError):
            AlgebraDefinition(dim=3, step=2, layers=[1, 1])

    def test_dimension_mismatch(self, heisenberg):
        with pytest.raises(DimensionMismatch):
            heisenberg.bracket(make_vector([1, 0]), make_vector([0, 1, 0]))

    def test_parse_vector_nested_commas(self):
        v = parse_vector("1,(1+sqrt(5))/2,0", 3)
        assert v[1] == (1 + sp.sqrt(5)) / 2
        with pytest.raises(DimensionMismatch):
            parse_vector("1,2", 3)


class TestBCH:
    def test_heisenberg_closed_form(self, heisenberg):
        x = make_vector(["1/2", "2", "1"])
        y = make_vector(["-1", "3", "0"])
        expected = x + y + heisenberg.bracket(x, y) / 2
        assert heisenberg.bch_multiply(x, y) == expected

    def test_group_commutator_heisenberg(self, heisenberg):
        x = make_vector(["2", "0", "0"])
        y = make_vector(["0", "3", "0"])
        assert heisenberg.group_commutator(x, y) == heisenberg.bracket(x, y)

    def test_inverse(self, filiform4):
        x = make_vector(["1", "-2", "1/3", "4"])
        assert is_zero_vector(filiform4.bch_multiply(x, -x))

    @given(rational_vectors(4), rational_vectors(4), rational_vectors(4))
    @settings(max_examples=1000, deadline=None)
    def test_associativity_filiform(self, a, b, c):
        algebra = filiform(4)
        x, y, z = make_vector(a), make_vector(b), make_vector(c)
        left = algebra.bch_multiply(algebra.bch_multiply(x, y), z)
        right = algebra.bch_multiply(x, algebra.bch_multiply(y, z))
        assert is_zero_vector(left - right)

    @given(rational_vectors(4))
    @settings(max_examples=30, deadline=None)
    def test_second_kind_round_trip(self, coords):
        algebra = filiform(4)
        c = make_vector(coords)
        assert algebra.to_second_kind(algebra.from_second_kind(c)) == c

    def test_float_kernel_matches_exact(self, filiform4):
        x = make_vector(["1", "1/2", "-1", "0"])
        y = make_vector(["-1/2", "2", "0", "1"])
        exact = np.array([float(c) for c in filiform4.bch_multiply(x, y)])
        floating = filiform4.bch_multiply(np.array([1, 0.5, -1, 0.0]), np.array([-0.5, 2, 0, 1.0]))
        np.testing.assert_allclose(floating, exact, atol=1e-14)

    def test_step_beyond_truncation_rejected(self):
        algebra = filiform(6)
        x = algebra.basis[0]
        with pytest.raises(UnsupportedStep):
            algebra.bch_multiply(x, algebra.basis[1])

    def test_exp_ad_is_automorphism(self, filiform4):
        g = make_vector(["1", "2", "0", "0"])
        ad = filiform4.exp_ad(g)
        e1, e2 = filiform4.basis[0], filiform4.basis[1]
        assert ad * filiform4.bracket(e1, e2) == filiform4.bracket(ad * e1, ad * e2)


class TestLattice:
    def test_central_lattice_basis(self, heisenberg, heisenberg_r):
        assert LatticeData(heisenberg).central_lattice_basis() == [heisenberg.basis[2]]
        assert len(LatticeData(heisenberg_r).central_lattice_basis()) == 2

    def test_non_integer_bracket_rejected(self):
        algebra = _algebra({"dim": 3, "step": 2, "layers": [2, 1], "brackets": [[1, 2, 3, "1/2"]]})
        with pytest.raises(ValidationError, match="non-integer"):
            LatticeData(algebra)

    def test_euclidean_product_orthonormal(self, heisenberg):
        lattice = LatticeData(heisenberg)
        e = heisenberg.basis
        assert lattice.euclidean_product(e[0], e[0]) == 1
        assert lattice.euclidean_product(e[0], e[1]) == 0
