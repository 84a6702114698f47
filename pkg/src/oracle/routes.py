# src/oracle/routes.py
from dataclasses import replace
from typing import Dict, List, Sequence
import numpy as np
from src.logger.config import setup_logger
from src.models.model_spec import ModelSpec
from src.models.report import VerificationReport, relative_deviation
from src.models.run_config import QuadratureMode
from src.lattice.kernel import build_kernel, propagator
from src.genfun.series import DEFAULT_ORDER_CAP, green, normalize, series_divide, z_series
from src.oracle.quadrature import QuadratureSpec, field_cutoff, quadrature_green, quadrature_z

logger = setup_logger(__name__)

FULL_MODE_MAX_COUPLING = 0.1


def observable_points(n_sites: int) -> Dict[str, tuple]:
    """Точки сравнения: 2-точечная (0, N−1) и 4-точечная (0, 0, N−1, N−1)"""
    last = n_sites - 1
    return {"g2": (0, last), "g4": (0, 0, last, last)}


def _quadrature_route(spec: ModelSpec, quad: QuadratureSpec, source: np.ndarray, p_max: int) -> Dict[str, List[complex]]:
    per_order = replace(quad, mode=QuadratureMode.PER_ORDER)
    values = {
        "z": series_divide(quadrature_z(spec, per_order, source, p_max), quadrature_z(spec, per_order, None, p_max))
    }
    for name, points in observable_points(spec.n_sites).items():
        values[name] = quadrature_green(spec, per_order, points, p_max)
    return values


def compare_routes(spec: ModelSpec, quad: QuadratureSpec, source: Sequence[float], p_max: int,
                   tolerance: float = 1e-6, gate_tolerance: float = 1e-8, full_tolerance: float = 1e-2,
                   grid_gate: bool = True, order_cap: int = DEFAULT_ORDER_CAP) -> VerificationReport:
    """
    Сравнивает по порядкам λ нормированные Z(J), G2 и G4 из ряда по производным
    по источнику с прямым интегрированием

    Args:
        spec: Модель (не более трех узлов)
        quad: Параметры квадратуры
        source: Вектор J
        p_max: Наибольший порядок
        tolerance: Допуск на относительное отклонение в каждом порядке
        gate_tolerance: Допуск на изменение квадратуры при удвоении узлов
        full_tolerance: Допуск для полного режима (один узел, λ ≤ 0.1)
        grid_gate: Проверять независимость от сетки
        order_cap: Предел на p_max

    Returns:
        VerificationReport
    """
    source = np.asarray(source, dtype=float)
    report = VerificationReport(suite="compare_routes")

    prop = propagator(build_kernel(spec))
    series = normalize(z_series(prop, p_max, order_cap=order_cap))
    series_values = {"z": series.at_source(source)}
    for name, points in observable_points(spec.n_sites).items():
        series_values[name] = list(green(series, points).per_order)

    quadrature_values = _quadrature_route(spec, quad, source, p_max)

    for name, expected in series_values.items():
        for p, (a, b) in enumerate(zip(expected, quadrature_values[name])):
            deviation = relative_deviation(a, b)
            case = report.add_deviation(f"{name}_order_{p}", deviation, tolerance, value=a, expected=b)
            if not case.passed:
                logger.warning(f"{name}, порядок {p}: отклонение {deviation:.3e} > {tolerance}")

    if grid_gate:
        refined = _quadrature_route(spec, quad.doubled(), source, p_max)
        change = max(
            relative_deviation(a, b)
            for name in quadrature_values
            for a, b in zip(quadrature_values[name], refined[name])
        )
        report.add_deviation("grid_gate", change, gate_tolerance, note=f"{quad.nodes} → {2 * quad.nodes} узлов")

    if spec.n_sites == 1 and spec.coupling <= FULL_MODE_MAX_COUPLING:
        full = replace(quad, mode=QuadratureMode.FULL)
        full_value = quadrature_z(spec, full, source) / quadrature_z(spec, full, None)
        series_sum = series.value_at(source, spec.coupling)
        report.add_deviation("full_mode", relative_deviation(series_sum, full_value), full_tolerance,
                             value=series_sum, expected=full_value, note=f"λ = {spec.coupling}")
    elif quad.is_full:
        message = f"полный режим сравнивается только для одного узла и λ ≤ {FULL_MODE_MAX_COUPLING}"
        report.warnings.append(message)
        logger.warning(message)

    report.data.update({
        "series": series_values,
        "quadrature": quadrature_values,
        "field_cutoff": field_cutoff(spec, quad),
        "nodes": quad.nodes,
        "p_max": p_max
    })
    logger.info(f"Сравнение маршрутов ({spec}): {report}")
    return report
