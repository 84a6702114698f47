# tests/test_oracle.py
import numpy as np
import pytest
from src.models.errors import CapExceededError, QuadratureError
from src.models.model_spec import Geometry, ModelSpec
from src.models.run_config import QuadratureMode
from src.lattice.kernel import build_kernel, propagator
from src.oracle.moments import moment_oracle
from src.oracle.quadrature import QuadratureSpec, field_cutoff, quadrature_green, quadrature_z
from src.oracle.routes import compare_routes, observable_points


class TestMoments:

    def test_two_point(self, point_propagator):
        assert moment_oracle(point_propagator, [0, 0]) == pytest.approx(1j * point_propagator.matrix[0, 0])

    def test_four_point(self, point_propagator):
        c = 1j * point_propagator.matrix[0, 0]
        assert moment_oracle(point_propagator, [0, 0, 0, 0]) == pytest.approx(3 * c ** 2)

    def test_odd_moment_vanishes(self, point_propagator):
        assert moment_oracle(point_propagator, [0, 0, 0]) == 0

    def test_mixed_sites(self, chain3_spec):
        prop = propagator(build_kernel(chain3_spec))
        d = 1j * prop.matrix
        expected = d[0, 1] * d[2, 2] + d[0, 2] * d[1, 2] + d[0, 2] * d[1, 2]
        assert moment_oracle(prop, [0, 1, 2, 2]) == pytest.approx(expected)

    def test_cap(self, point_propagator):
        with pytest.raises(CapExceededError):
            moment_oracle(point_propagator, [0] * 14, cap=12)


class TestQuadrature:

    def test_free_two_site_chain(self, chain2_spec):
        source = np.array([0.3, -0.2])
        delta = propagator(build_kernel(chain2_spec)).matrix
        coefficients = quadrature_z(chain2_spec, QuadratureSpec(), source=source, p_max=0)
        assert coefficients[0] == pytest.approx(np.exp(-0.5j * source @ delta @ source), abs=1e-8)

    def test_free_normalization(self, point_spec):
        coefficients = quadrature_z(point_spec, QuadratureSpec(), source=[0.0], p_max=0)
        assert coefficients[0] == pytest.approx(1.0, abs=1e-12)

    def test_free_two_point(self, point_spec, point_propagator):
        values = quadrature_green(point_spec, QuadratureSpec(), [0, 0], p_max=0)
        assert values[0] == pytest.approx(1j * point_propagator.matrix[0, 0], rel=1e-10)

    def test_too_few_nodes(self):
        with pytest.raises(ValueError):
            QuadratureSpec(nodes=32)

    def test_too_many_sites(self):
        spec = ModelSpec(geometry=Geometry.CHAIN, sites=4)
        with pytest.raises(QuadratureError):
            quadrature_z(spec, QuadratureSpec(), p_max=0)

    def test_full_mode_single_site_only(self, chain3_spec):
        with pytest.raises(QuadratureError):
            quadrature_z(chain3_spec, QuadratureSpec(mode=QuadratureMode.FULL))

    def test_cutoff_is_positive(self, point_spec):
        assert field_cutoff(point_spec, QuadratureSpec()) > 0

    def test_doubled(self):
        assert QuadratureSpec().doubled().nodes == 128


class TestRoutes:

    def test_observable_points(self):
        assert observable_points(3) == {"g2": (0, 2), "g4": (0, 0, 2, 2)}

    def test_point_model(self, point_spec):
        report = compare_routes(point_spec, QuadratureSpec(), [0.25], p_max=2, tolerance=1e-6)
        assert report.passed, [str(case) for case in report.cases if not case.passed]
        names = {case.name for case in report.cases}
        assert {"z_order_2", "g2_order_2", "g4_order_2", "grid_gate", "full_mode"} <= names

    def test_three_site_chain(self, chain3_spec):
        report = compare_routes(chain3_spec, QuadratureSpec(), [0.2, -0.1, 0.3], p_max=1, tolerance=1e-4)
        assert report.passed, [str(case) for case in report.cases if not case.passed]
        assert "grid_gate" in {case.name for case in report.cases}

    @pytest.mark.parametrize("sites", [1, 2])
    def test_free_theory_routes_agree(self, sites):
        geometry = Geometry.POINT if sites == 1 else Geometry.CHAIN
        spec = ModelSpec(geometry=geometry, sites=sites, coupling=0.0)
        report = compare_routes(spec, QuadratureSpec(), [0.25, -0.15][:sites], p_max=0, tolerance=1e-8)
        assert report.passed, [str(case) for case in report.cases if not case.passed]
        assert max(case.deviation for case in report.cases if case.deviation is not None) < 1e-8

    def test_tiny_tolerance_fails(self, point_spec):
        report = compare_routes(point_spec, QuadratureSpec(), [0.25], p_max=1, tolerance=1e-300, grid_gate=False)
        assert not report.passed
        assert report.first_failure is not None
