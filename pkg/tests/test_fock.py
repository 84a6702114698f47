# tests/test_fock.py
import numpy as np
import pytest
from numpy.testing import assert_allclose
from src.fock.space import FockSpace, TimeGrid, phi_at, vacuum_amplitude
from src.fock.evolution import (
    check_interaction_picture, check_smatrix, check_wick_identity, continuum_source_exponent,
    discrete_source_exponent, gaussian_pulse, sliced_evolution, slicing_convergence,
    smatrix_order_one, smatrix_truncated, split_evolution
)
from src.fock.crosscheck import (
    check_cross_module_z, check_operator_wick, check_smatrix_series,
    normal_ordered_product, time_ordered_product
)


class TestSpace:

    def test_ladder_commutator(self, single_mode):
        assert single_mode.commutator_defect() < 1e-12

    def test_field_is_hermitian(self, single_mode):
        assert phi_at(single_mode, 0.7).hermiticity_defect() < 1e-14

    def test_interaction_picture_field(self, single_mode):
        t = 0.9
        expected = single_mode.free_evolution(-t) @ single_mode.phi_schrodinger @ single_mode.free_evolution(t)
        assert_allclose(phi_at(single_mode, t).matrix, expected, atol=1e-13)

    def test_klein_gordon_second_difference(self):
        space = FockSpace(dim=16, omega=1.3)
        t, h = 0.4, 1e-3
        second = (phi_at(space, t + h).matrix - 2 * phi_at(space, t).matrix + phi_at(space, t - h).matrix) / h ** 2
        assert_allclose(second, -space.omega ** 2 * phi_at(space, t).matrix, atol=1e-5)

    @pytest.mark.parametrize("t,t_prime", [(0.9, 0.2), (0.2, 0.9)])
    def test_vacuum_two_point(self, t, t_prime):
        space = FockSpace(dim=4, omega=1.3)
        value = time_ordered_product(space, [t, t_prime])[0, 0]
        expected = np.exp(-1j * space.omega * abs(t - t_prime)) / (2 * space.omega)
        assert value == pytest.approx(expected, abs=1e-14)

    def test_dimension_bound(self):
        with pytest.raises(ValueError):
            FockSpace(dim=1)

    def test_midpoint_times(self):
        grid = TimeGrid(0.0, 1.0, 4)
        assert grid.dt == pytest.approx(0.25)
        assert_allclose(grid.times, [0.125, 0.375, 0.625, 0.875])
        assert grid.refine(2).steps == 8

    def test_empty_interval_rejected(self):
        with pytest.raises(ValueError):
            TimeGrid(1.0, 1.0, 10)


class TestSlicing:

    def test_free_slices_are_identity(self, single_mode, pulse_grid):
        evolution = sliced_evolution(single_mode, pulse_grid, 0.0, np.zeros(pulse_grid.steps))
        assert_allclose(evolution.matrix, np.eye(single_mode.dim), atol=1e-14)

    def test_evolution_is_unitary(self, single_mode, pulse_grid, pulse):
        evolution = sliced_evolution(single_mode, pulse_grid, 0.1, pulse(pulse_grid.times))
        assert evolution.unitarity_defect() < 1e-10

    def test_sample_count_checked(self, single_mode, pulse_grid):
        with pytest.raises(ValueError):
            sliced_evolution(single_mode, pulse_grid, 0.0, np.zeros(3))

    def test_split_agrees_without_coupling(self, single_mode, pulse_grid, pulse):
        samples = pulse(pulse_grid.times)
        summed = sliced_evolution(single_mode, pulse_grid, 0.0, samples).matrix
        split = split_evolution(single_mode, pulse_grid, 0.0, samples).matrix
        assert_allclose(summed, split, atol=1e-12)

    def test_factorization_converges_at_second_order(self, single_mode, pulse_grid, pulse):
        report = slicing_convergence(single_mode, pulse_grid, 0.1, pulse)
        assert report.passed
        assert report.data["steps_sequence"] == [200, 400, 800]
        assert len(report.data["split_convergence_ratios"]) == 2

    def test_interaction_picture_limit(self, single_mode):
        report = check_interaction_picture(single_mode, TimeGrid(0.0, 1.0, 50), 0.1)
        assert report.passed
        assert len(report.data["convergence_ratios"]) == 2
        assert all(3.5 <= ratio <= 4.5 for ratio in report.data["convergence_ratios"])

    def test_interaction_picture_rejects_wrong_order(self, single_mode):
        report = check_interaction_picture(single_mode, TimeGrid(0.0, 1.0, 50), 0.1, ratio_min=7.0, ratio_max=9.0)
        assert not report.passed


class TestWickIdentity:

    def test_source_exponents_agree(self, pulse_grid, pulse):
        samples = pulse(pulse_grid.times)
        discrete = discrete_source_exponent(pulse_grid, 1.0, samples)
        continuum = continuum_source_exponent(pulse, 0.0, 4.0, 1.0)
        assert discrete == pytest.approx(continuum, rel=1e-3)

    def test_default_pulse(self, single_mode, pulse_grid, pulse):
        report = check_wick_identity(single_mode, pulse_grid, pulse)
        assert report.passed, [str(case) for case in report.cases if not case.passed]
        names = [case.name for case in report.cases]
        assert names == ["vacuum_discrete", "vacuum_continuum", "operator_block", "dt_convergence", "unitarity"]
        for ratio in report.data["dt_convergence_ratios"]:
            assert 3.5 <= ratio <= 4.5
        assert not report.warnings

    def test_truncation_warning(self):
        space = FockSpace(dim=2, omega=1.0)
        report = check_wick_identity(space, TimeGrid(0.0, 4.0, 50), gaussian_pulse(1.0, 2.0, 0.5))
        assert report.warnings
        assert report.data["top_level_population"] > 1e-8

    def test_single_step_runs(self, single_mode, pulse):
        report = check_wick_identity(single_mode, TimeGrid(0.0, 4.0, 1), pulse)
        assert report.data["steps_sequence"] == [1, 2, 4]
        assert len(report.data["dt_convergence_ratios"]) == 2

    @pytest.mark.parametrize("times", [(0.3, 1.1), (0.3, 1.1, 0.7), (0.3, 1.1, 0.7, 1.9)])
    def test_operator_expansion(self, single_mode, times):
        report = check_operator_wick(single_mode, times)
        assert report.passed

    def test_normal_ordering_kills_vacuum(self, single_mode):
        product = normal_ordered_product(single_mode, [0.2, 0.5, 1.3])
        assert abs(product[0, 0]) < 1e-15

    def test_time_ordering_is_symmetric(self, single_mode):
        a = time_ordered_product(single_mode, [0.2, 1.5, 0.9])
        b = time_ordered_product(single_mode, [1.5, 0.9, 0.2])
        assert_allclose(a, b)


class TestSmatrix:

    def test_vacuum_normalization_is_exact(self, single_mode):
        smatrix = smatrix_truncated(single_mode, TimeGrid(0.0, 1.0, 100), 0.1)
        assert vacuum_amplitude(smatrix) == pytest.approx(1.0, abs=1e-14)
        assert smatrix.element(4, 0) != 0

    def test_first_order_needs_positive_coupling(self, single_mode):
        with pytest.raises(ValueError):
            smatrix_order_one(single_mode, TimeGrid(0.0, 1.0, 10), 0.0)

    def test_first_order_matches_dyson(self, single_mode):
        report = check_smatrix(single_mode, TimeGrid(0.0, 1.0, 400), 0.1)
        assert report.passed

    @pytest.mark.parametrize("steps", [100, 800])
    def test_first_order_extraction_removes_third_order(self, single_mode, steps):
        report = check_smatrix(single_mode, TimeGrid(0.0, 1.0, steps), 0.1)
        order_one = next(case for case in report.cases if case.name == "order_one_level_4")
        assert order_one.deviation < 1e-3

    def test_series_matches_dyson(self, single_mode):
        report = check_smatrix_series(single_mode, TimeGrid(0.0, 1.0, 6))
        assert report.passed


class TestCrossModule:

    def test_vacuum_amplitude_from_series(self, single_mode, pulse_grid, pulse):
        report = check_cross_module_z(single_mode, pulse_grid, 0.1, pulse, tolerance=1e-2)
        assert report.passed
        assert len(report.data["coefficients"]) == 2
