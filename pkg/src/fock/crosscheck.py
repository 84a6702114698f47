# src/fock/crosscheck.py
from itertools import combinations
from math import factorial, sqrt
from typing import List, Sequence
import numpy as np
from src.logger.config import setup_logger
from src.models.report import VerificationReport, relative_deviation
from src.lattice.kernel import single_mode_propagator
from src.wick.expansion import DEFAULT_FIELD_CAP, enumerate_pairings
from src.genfun.series import PerturbativeSeries, smatrix_series, z_at_source
from src.fock.space import FockSpace, TimeGrid, phi_at, vacuum_amplitude
from src.fock.evolution import SourceProfile, sliced_evolution, dyson_first_order

logger = setup_logger(__name__)


def time_ordered_product(space: FockSpace, times: Sequence[float]) -> np.ndarray:
    """T(φ̂(t₁)…φ̂(t_m)): поздние времена левее"""
    product = np.eye(space.dim, dtype=complex)
    for t in sorted(times, reverse=True):
        product = product @ phi_at(space, t).matrix
    return product


def normal_ordered_product(space: FockSpace, times: Sequence[float]) -> np.ndarray:
    """
    :φ̂(t₁)…φ̂(t_m): сумма по подмножествам полей, отданных в рождение,
    операторы рождения стоят левее уничтожения
    """
    m = len(times)
    phases = np.exp(1j * space.omega * np.asarray(times, dtype=float))
    norm = (2.0 * space.omega) ** (-m / 2.0)

    result = np.zeros((space.dim, space.dim), dtype=complex)
    for k in range(m + 1):
        weight = sum(
            np.prod(phases[list(created)]) * np.prod(np.conj(np.delete(phases, list(created))))
            for created in combinations(range(m), k)
        )
        result += weight * (np.linalg.matrix_power(space.creation, k) @ np.linalg.matrix_power(space.annihilation, m - k))
    return norm * result


def contraction(omega: float, t: float, s: float) -> complex:
    """S(t, s) = ⟨0|Tφ̂(t)φ̂(s)|0⟩ = e^{−iω|t−s|}/(2ω)"""
    return complex(np.exp(-1j * omega * abs(t - s)) / (2.0 * omega))


def check_operator_wick(space: FockSpace, times: Sequence[float], tolerance: float = 1e-10,
                        cap: int = DEFAULT_FIELD_CAP) -> VerificationReport:
    """
    T(φ̂₁…φ̂_m) = Σ по спариваниям Π S · :Π неспаренных φ̂: как матричное равенство

    Сравниваются столбцы n < d − m, на которые усечение не влияет.
    """
    times = [float(t) for t in times]
    m = len(times)
    if space.dim <= m:
        raise ValueError(f"Для {m} полей нужна размерность > {m}, получено {space.dim}")

    lhs = time_ordered_product(space, times)
    rhs = np.zeros_like(lhs)
    for r in range(m // 2 + 1):
        for term in enumerate_pairings(m, r, cap=cap):
            weight = np.prod([contraction(space.omega, times[p - 1], times[q - 1]) for p, q in term.pairs])
            rhs += weight * normal_ordered_product(space, [times[n - 1] for n in term.unpaired])

    columns = space.dim - m
    deviation = float(np.max(np.abs(lhs[:, :columns] - rhs[:, :columns])))
    report = VerificationReport(suite="operator_wick")
    report.add_deviation(f"m={m}", deviation, tolerance, note=f"столбцы 0…{columns - 1}")
    return report


def normal_ordered_amplitude(omega: float, times: Sequence[float], level: int) -> complex:
    """⟨n|:φ̂(t₁)…φ̂(t_k):|0⟩ = δ_nk √(k!) Π e^{iωt}/√(2ω)"""
    k = len(times)
    if level != k:
        return 0j
    phases = np.prod(np.exp(1j * omega * np.asarray(times, dtype=float)))
    return complex(sqrt(factorial(k)) * phases / (2.0 * omega) ** (k / 2.0))


def series_matrix_element(series: PerturbativeSeries, times: Sequence[float], omega: float,
                          level: int) -> List[complex]:
    """⟨n|Ŝ_p|0⟩ по порядкам для ряда полиномов по формальным φ (узел x ↔ время t_x)"""
    times = np.asarray(times, dtype=float)
    if len(times) != series.propagator.n_sites:
        raise ValueError(f"Ряд на {series.propagator.n_sites} узлах, передано {len(times)} времен")

    per_order = []
    for term in series.order_terms:
        total = 0j
        for (j_key, phi_key), value in term.terms.items():
            if j_key:
                raise ValueError("Матричный элемент определен только для членов без источников")
            total += value * normal_ordered_amplitude(omega, times[list(phi_key)], level)
        per_order.append(total)
    return per_order


def check_smatrix_series(space: FockSpace, grid: TimeGrid, tolerance: float = 1e-10,
                         level: int = 4) -> VerificationReport:
    """
    Ŝ из символьного ряда (первый порядок) против члена Дайсона из матриц

    Оба маршрута берут одни и те же середины срезов и вес вершины dt.
    """
    prop = single_mode_propagator(grid.times, space.omega)
    series = smatrix_series(prop, 1, vertex_weight=grid.dt)
    elements = series_matrix_element(series, grid.times, space.omega, level)
    vacuum = series_matrix_element(series, grid.times, space.omega, 0)
    dyson = dyson_first_order(space, grid, level)

    report = VerificationReport(suite="smatrix_series")
    report.add("vacuum_series", vacuum[0] == 1.0 and vacuum[1] == 0, value=vacuum, expected=[1.0, 0.0])
    report.add_deviation(f"order_one_level_{level}", relative_deviation(elements[1], dyson), tolerance,
                         value=elements[1], expected=dyson)
    report.data["steps"] = grid.steps
    return report


def check_cross_module_z(space: FockSpace, grid: TimeGrid, coupling: float, source: SourceProfile,
                         tolerance: float = 1e-2, order: int = 1) -> VerificationReport:
    """
    ⟨0|U_M|0⟩ из произведения срезов против z_series на внешнем пропагаторе
    одной моды, сумма до порядка λ^order

    Источник входит как s_j = J(t_j)·dt, вес вершины равен dt.
    """
    samples = source(grid.times)
    fock_value = vacuum_amplitude(sliced_evolution(space, grid, coupling, samples))

    prop = single_mode_propagator(grid.times, space.omega)
    coefficients = z_at_source(prop, samples * grid.dt, order, vertex_weight=grid.dt)
    series_value = sum(coupling ** p * value for p, value in enumerate(coefficients))

    report = VerificationReport(suite="cross_module_z")
    report.add_deviation(f"order_{order}", relative_deviation(fock_value, series_value), tolerance,
                         value=fock_value, expected=series_value)
    report.data["coefficients"] = coefficients
    report.data["coupling"] = coupling
    logger.info(f"Z из фоковского пространства {fock_value:.8g}, из ряда {series_value:.8g}")
    return report
