#!/usr/bin/env python3
"""
Tests for the representation solver: Green inversion, invariant distributions,
Sobolev estimates and the Hermite spectral model.
"""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.linalg import eigh_tridiagonal

from modules.adapted_rep import build_adapted
from modules.algebra_core import LatticeData, make_vector
from modules.coadjoint import LinearForm
from modules.config_manager import builtin_algebra
from modules.diophantine import certify, frequency_vector
from modules.recipes import parse_recipe
from modules.rep_solver import (
    ComponentFailure,
    Grid,
    ModeMismatch,
    NonIntegerMY,
    ObstructionNonzero,
    RepFunction,
    ResolutionLoss,
    SolverSettings,
    TailCheckFailed,
    apply_X,
    apply_Y,
    c_alpha,
    c_alpha_ell,
    check_central_bound,
    check_green_estimates,
    check_invdist_estimate,
    check_laplacian_bound,
    check_sobolev_scaling,
    diophantine_lower_bound_check,
    full_sobolev_norm,
    global_solve,
    green,
    heisenberg_laplacian_eigenvalues,
    hermite_basis_for,
    invariant_distribution,
    schwartz_seminorm,
    y_commutator_terms,
    y_sobolev_norm,
)
from modules.validation import ValidationError
from strategies import schwartz_recipes

GOLDEN_X = ["1", "(1+sqrt(5))/2", "0"]


def heisenberg_rep(m, x=(1, 0, 0)):
    algebra = builtin_algebra("heisenberg")
    return build_adapted(LinearForm.from_values(algebra, [0, 0, m]), make_vector(x))


def make_f(rep, recipe, mode="grid", settings=None):
    return RepFunction.from_callable(rep, parse_recipe(recipe), settings, mode=mode)


@st.composite
def odd_recipes(draw):
    """Obstruction-free data: odd functions have D(f) = 0."""
    terms = []
    for _ in range(draw(st.integers(min_value=1, max_value=3))):
        coefficient = draw(st.integers(min_value=1, max_value=3))
        kind = draw(st.sampled_from(["dgaussian", "hermite", "tgauss"]))
        if kind == "hermite":
            atom = f"hermite({draw(st.sampled_from([1, 3, 5]))})"
        elif kind == "tgauss":
            atom = f"t^{draw(st.sampled_from([1, 3]))}*gaussian({draw(st.sampled_from(['1/2', '1', '2']))})"
        else:
            atom = f"dgaussian({draw(st.sampled_from(['1/2', '1', '3/2', '2']))})"
        terms.append(f"{coefficient}*{atom}")
    return " + ".join(terms)


class TestGrid:
    def test_nodes_and_integral(self):
        grid = Grid(4096, 12.0)
        assert grid.nodes[2048] == 0.0
        values = np.exp(-np.pi * grid.nodes ** 2)
        assert abs(grid.integrate(values) - 1.0) < 1e-12

    def test_settings_validation(self):
        with pytest.raises(ValidationError):
            SolverSettings(grid_n=15)
        with pytest.raises(ValidationError):
            SolverSettings(tail_tol=0.0)


class TestOperators:
    def test_derivative_of_gaussian(self):
        f = make_f(heisenberg_rep(1), "gaussian")
        expected = -2 * np.pi * f.t * np.exp(-np.pi * f.t ** 2)
        np.testing.assert_allclose(apply_X(f).values, expected, atol=1e-8)

    @pytest.mark.parametrize("m, recipe", [(1, "gaussian"), (2, "gaussian(2)"), (3, "dgaussian + hermite(2)")])
    def test_commutator_is_central(self, m, recipe):
        # [pi(Y), pi(X)] = -2 pi i B Id
        f = make_f(heisenberg_rep(m), recipe)
        lhs = apply_Y(apply_X(f)).values - apply_X(apply_Y(f)).values
        rhs = -2j * np.pi * f.b * f.values
        assert np.abs(lhs - rhs).max() <= 1e-9 * 2 * np.pi * abs(f.b) * np.abs(f.values).max()


class TestGreenInversion:
    @given(schwartz_recipes(), st.integers(min_value=1, max_value=10))
    @settings(max_examples=100, deadline=None)
    def test_inversion_residual(self, recipe, m):
        f = make_f(heisenberg_rep(m), recipe)
        u = green(f)
        residual = np.sqrt(f.grid.integrate(np.abs(apply_X(u).values - f.values) ** 2).real)
        assert residual <= 1e-8 * f.l2_norm()

    @given(schwartz_recipes())
    @settings(max_examples=100, deadline=None)
    def test_derivatives_are_annihilated(self, recipe):
        g = make_f(heisenberg_rep(1), recipe)
        assert abs(invariant_distribution(apply_X(g))) <= 1e-10

    def test_obstruction_of_gaussian(self):
        f = make_f(heisenberg_rep(1), "gaussian")
        assert abs(invariant_distribution(f) - 1.0) < 1e-12
        u = green(f)
        assert u.kind == "bounded"
        assert abs(u.right_limit - 1.0) < 1e-12

    def test_obstruction_free_solution_decays(self):
        f = make_f(heisenberg_rep(1), "dgaussian")
        assert abs(invariant_distribution(f)) <= 1e-12
        u = green(f)
        assert u.kind == "schwartz"
        np.testing.assert_allclose(u.values.real, np.exp(-np.pi * u.t ** 2), atol=1e-12)

    def test_only_one_distribution(self):
        with pytest.raises(ValidationError):
            invariant_distribution(make_f(heisenberg_rep(1), "dgaussian"), e=1)


class TestEstimates:
    def test_c_alpha_closed_form(self):
        assert abs(c_alpha(1.0) - np.sqrt(0.5)) < 1e-10
        with pytest.raises(ValidationError):
            c_alpha(0.5)
        with pytest.raises(ValidationError):
            c_alpha_ell(1.0, 0)

    @given(schwartz_recipes(), st.integers(min_value=1, max_value=10), st.sampled_from([0.75, 1.0, 2.0]))
    @settings(max_examples=100, deadline=None)
    def test_invariant_distribution_estimate(self, recipe, m, alpha):
        row = check_invdist_estimate(make_f(heisenberg_rep(m), recipe), alpha)
        assert row["ratio"] <= 1.0 + 1e-9

    @given(schwartz_recipes(), st.integers(min_value=1, max_value=10), st.sampled_from([0.75, 1.0, 2.0]))
    @settings(max_examples=100, deadline=None)
    def test_green_part_one(self, recipe, m, alpha):
        report = check_green_estimates(make_f(heisenberg_rep(m), recipe), alpha, -1.0, part=1)
        assert report["max_ratio"] <= 1.0 + 1e-9

    @given(odd_recipes(), st.integers(min_value=1, max_value=10), st.sampled_from([1.5, 2.0]))
    @settings(max_examples=100, deadline=None)
    def test_green_part_two(self, recipe, m, alpha):
        report = check_green_estimates(make_f(heisenberg_rep(m), recipe), alpha, -1.0, part=2)
        assert [row["name"] for row in report["rows"]] == [
            "green_part2_l0", "green_part2_l1", "green_part2_l2"
        ]
        assert report["max_ratio"] <= 1.0 + 1e-9

    @pytest.mark.parametrize("m", [1, 2, 3, 4, 5])
    def test_green_bound_scales_with_delta(self, m):
        alpha = 1.5
        f1 = make_f(heisenberg_rep(m), "dgaussian")
        f2 = make_f(heisenberg_rep(2 * m), "dgaussian")
        assert abs(f2.b) == 2 * abs(f1.b)
        rhs1 = check_green_estimates(f1, alpha, -1.0)["rows"][0]["rhs"]
        rhs2 = check_green_estimates(f2, alpha, -1.0)["rows"][0]["rhs"]
        expected = 2.0 * y_sobolev_norm(f1, alpha) / y_sobolev_norm(f2, alpha)
        assert rhs1 / rhs2 == pytest.approx(expected, rel=0.05)

    def test_part_two_needs_obstruction_free_data(self):
        with pytest.raises(ObstructionNonzero):
            check_green_estimates(make_f(heisenberg_rep(1), "gaussian"), 1.5, -1.0, part=2)

    def test_part_one_beta_range(self):
        with pytest.raises(ValidationError):
            check_green_estimates(make_f(heisenberg_rep(1), "gaussian"), 1.5, 0.0, part=1)

    def test_laplacian_bound(self):
        row = check_laplacian_bound(make_f(heisenberg_rep(1), "dgaussian"), 1.5)
        assert row["ratio"] <= 1.0

    def test_laplacian_bound_needs_heisenberg(self, filiform4):
        rep = build_adapted(LinearForm.from_values(filiform4, [0, 0, 0, 1]), filiform4.basis[0])
        with pytest.raises(ModeMismatch):
            check_laplacian_bound(make_f(rep, "dgaussian"), 1.5)

    def test_commutator_expansion(self):
        terms = y_commutator_terms(make_f(heisenberg_rep(2), "dgaussian + hermite(3)"))
        assert terms["residual"] <= 1e-9 * terms["scale"]

    @pytest.mark.parametrize("m", [1, 3])
    def test_central_bound(self, m):
        row = check_central_bound(make_f(heisenberg_rep(m), "dgaussian", mode="hermite"))
        assert row["ratio"] <= 1.0


class TestFailureModes:
    def test_tail_check(self):
        with pytest.raises(TailCheckFailed):
            make_f(heisenberg_rep(1), "gaussian(1/1000)")

    def test_resolution_loss(self):
        f = make_f(heisenberg_rep(1), "gaussian", settings=SolverSettings(grid_n=64))
        with pytest.raises(ResolutionLoss):
            apply_X(f)

    def test_full_norm_needs_hermite(self):
        with pytest.raises(ModeMismatch):
            full_sobolev_norm(make_f(heisenberg_rep(1), "dgaussian"), 1.0)

    def test_hermite_needs_heisenberg(self, filiform4):
        rep = build_adapted(LinearForm.from_values(filiform4, [0, 0, 0, 1]), filiform4.basis[0])
        with pytest.raises(ModeMismatch):
            make_f(rep, "dgaussian", mode="hermite")


class TestHermite:
    @staticmethod
    def _finite_difference(m, count, h):
        omega = 2 * np.pi * abs(m)
        s = np.sqrt(omega)
        half = 10.0 / s
        step = h / s
        n = int(round(2 * half / step)) - 1
        t = -half + step * np.arange(1, n + 1)
        diagonal = 2.0 / step ** 2 + (omega * t) ** 2
        off = np.full(n - 1, -1.0 / step ** 2)
        values = eigh_tridiagonal(
            diagonal, off, eigvals_only=True, select="i", select_range=(0, count - 1)
        )
        return values + (2 * np.pi * m) ** 2

    @pytest.mark.parametrize("m", [1, 2, 3, 4, 5, -3])
    def test_laplacian_spectrum_matches_finite_differences(self, m):
        coarse = self._finite_difference(m, 21, 0.01)
        fine = self._finite_difference(m, 21, 0.005)
        extrapolated = (4.0 * fine - coarse) / 3.0
        reference = heisenberg_laplacian_eigenvalues(m, 21)
        np.testing.assert_allclose(reference, extrapolated, rtol=1e-6)

    @pytest.mark.parametrize("m", [1, 4])
    def test_basis_eigenvalues(self, m):
        basis = hermite_basis_for(heisenberg_rep(m), 32)
        np.testing.assert_allclose(basis.eigenvalues, heisenberg_laplacian_eigenvalues(m, 32))

    def test_spectrum_does_not_depend_on_x_length(self):
        # X = 2 E1 doubles B and <X,U> together
        basis = hermite_basis_for(heisenberg_rep(3, (2, 0, 0)), 5)
        np.testing.assert_allclose(basis.eigenvalues, heisenberg_laplacian_eigenvalues(3, 5))
        assert basis.eigenvalues[0] == pytest.approx(2 * np.pi * 3 + 36 * np.pi ** 2)

    def test_full_sobolev_norm_of_ground_state(self):
        f = make_f(heisenberg_rep(1), "gaussian", mode="hermite")
        assert np.abs(f.values[1:]).max() < 1e-10
        ratio = full_sobolev_norm(f, 1.0) ** 2 / f.l2_norm() ** 2
        assert ratio == pytest.approx(1 + 2 * np.pi + 4 * np.pi ** 2, rel=1e-9)

    @given(
        schwartz_recipes(),
        st.integers(min_value=1, max_value=10),
        st.floats(min_value=-2.0, max_value=3.0),
        st.floats(min_value=0.0, max_value=2.0),
    )
    @settings(max_examples=50, deadline=None)
    def test_y_sobolev_norm_is_monotone_in_alpha(self, recipe, m, alpha, step):
        f = make_f(heisenberg_rep(m), recipe)
        assert y_sobolev_norm(f, alpha) <= y_sobolev_norm(f, alpha + step) * (1 + 1e-12)

    def test_grid_hermite_round_trip(self):
        f = make_f(heisenberg_rep(2), "dgaussian + 2*t^2*gaussian(1/2)")
        back = f.to_hermite().to_grid()
        np.testing.assert_allclose(back.values, f.values, atol=1e-10)

    def test_apply_x_agrees_across_modes(self):
        f = make_f(heisenberg_rep(1), "hermite(2) + dgaussian")
        grid_result = apply_X(f).values
        hermite_result = apply_X(f.to_hermite()).to_grid().values
        np.testing.assert_allclose(hermite_result, grid_result, atol=1e-9)

    def test_apply_y_agrees_across_modes(self):
        f = make_f(heisenberg_rep(2), "gaussian(2)")
        grid_result = apply_Y(f).values
        hermite_result = apply_Y(f.to_hermite()).to_grid().values
        np.testing.assert_allclose(hermite_result, grid_result, atol=1e-9)

    def test_y_sobolev_norm_closed_form(self):
        f = make_f(heisenberg_rep(1), "gaussian")
        assert abs(y_sobolev_norm(f, 0.0) - 2 ** -0.25) < 1e-12
        # int (1 + 4 pi^2 t^2) exp(-2 pi t^2) dt = (1 + pi) / sqrt(2)
        assert abs(y_sobolev_norm(f, 1.0) - np.sqrt((1 + np.pi) / np.sqrt(2))) < 1e-12

    def test_y_sobolev_norm_counts_the_bounded_tail(self):
        u = green(make_f(heisenberg_rep(1), "gaussian"))
        on_grid = float(np.sqrt(u.grid.integrate(np.abs(u.values) ** 2 / (1 + (2 * np.pi * u.t) ** 2)).real))
        assert y_sobolev_norm(u, -1.0) > on_grid

    def test_seminorms(self):
        f = make_f(heisenberg_rep(1), "gaussian")
        assert abs(schwartz_seminorm(f, 0, 0) - 1.0) < 1e-12
        assert abs(schwartz_seminorm(f, 1, 0) - np.sqrt(2 * np.pi) * np.exp(-0.5)) < 1e-4


class TestOrbitFamilies:
    def test_sobolev_scaling_heisenberg_family(self):
        family = [(f"m={m}", make_f(heisenberg_rep(m), "dgaussian")) for m in range(1, 11)]
        report = check_sobolev_scaling(family, 1.5, -1.0)
        assert len(report["rows"]) == 10
        assert report["calibration"] > 0

    @pytest.mark.parametrize("m", [1, 2, 5, 10, -7])
    def test_diophantine_chain(self, heisenberg, m):
        rep = heisenberg_rep(m, GOLDEN_X)
        report = certify(frequency_vector(heisenberg, rep.x), 0.0, 1000)
        result = diophantine_lower_bound_check(make_f(rep, "gaussian"), LatticeData(heisenberg), report)
        assert result["M_Y"] == [0, -m]
        assert result["ratio"] <= 1.0

    def test_half_integer_form_rejected(self, heisenberg):
        rep = heisenberg_rep("1/2", GOLDEN_X)
        report = certify(frequency_vector(heisenberg, rep.x), 0.0, 1000)
        with pytest.raises(NonIntegerMY):
            diophantine_lower_bound_check(make_f(rep, "gaussian"), LatticeData(heisenberg), report)

    def test_global_norm_is_orthogonal_sum(self):
        components = [(f"m={m}", make_f(heisenberg_rep(m), "dgaussian")) for m in (1, 2, 3)]
        solution = global_solve(components, 1.5, -1.0)
        assert solution.labels == ["m=1", "m=2", "m=3"]
        expected = sum(n ** 2 for n in solution.norms)
        assert abs(solution.global_norm ** 2 - expected) <= 1e-12 * expected
        assert solution.uniform_bound <= 1.0

    def test_failing_component_is_attributed(self):
        components = [
            ("good", make_f(heisenberg_rep(1), "dgaussian")),
            ("bad", make_f(heisenberg_rep(2), "gaussian")),
        ]
        with pytest.raises(ComponentFailure) as excinfo:
            global_solve(components, 1.5, -1.0, part=2)
        assert excinfo.value.label == "bad"
        assert isinstance(excinfo.value.cause, ObstructionNonzero)
