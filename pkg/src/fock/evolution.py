# src/fock/evolution.py
from typing import Callable, List
import numpy as np
import scipy.linalg
from scipy.integrate import cumulative_trapezoid, trapezoid
from src.logger.config import setup_logger
from src.models.errors import VacuumAmplitudeError
from src.models.report import VerificationReport
from src.lattice.kernel import single_mode_propagator
from src.fock.space import FockOperator, FockSpace, TimeGrid, phi_at, vacuum_amplitude

logger = setup_logger(__name__)

SourceProfile = Callable[[np.ndarray], np.ndarray]

ROUNDOFF_FLOOR = 1e-13
REFERENCE_POINTS = 200_001
VACUUM_TOLERANCE = 1e-12


def gaussian_pulse(amplitude: float, center: float, width: float) -> SourceProfile:
    """J(t) = A exp(−(t − t_c)²/(2w²))"""
    if width <= 0:
        raise ValueError(f"Ширина импульса должна быть > 0: {width}")

    def profile(t: np.ndarray) -> np.ndarray:
        return amplitude * np.exp(-0.5 * ((np.asarray(t, dtype=float) - center) / width) ** 2)

    return profile


def _samples(grid: TimeGrid, source) -> np.ndarray:
    samples = np.asarray(source, dtype=float)
    if samples.shape != (grid.steps,):
        raise ValueError(f"Ожидается {grid.steps} отсчетов источника, получено {samples.shape}")
    return samples


def sliced_evolution(space: FockSpace, grid: TimeGrid, coupling: float, source) -> FockOperator:
    """
    Упорядоченное по времени произведение срезов exp(−i dt (λ/4! φ̂(t_k)⁴ − J_k φ̂(t_k)))

    Более поздний срез стоит левее.

    Args:
        space: Фоковское пространство
        grid: Временная сетка
        coupling: λ
        source: Отсчеты J(t_k), по одному на срез

    Returns:
        FockOperator U_M(t1, t0; J)
    """
    samples = _samples(grid, source)
    evolution = np.eye(space.dim, dtype=complex)

    for t, j in zip(grid.times, samples):
        phi = phi_at(space, t).matrix
        hamiltonian = coupling / 24.0 * np.linalg.matrix_power(phi, 4) - j * phi
        evolution = scipy.linalg.expm(-1j * grid.dt * hamiltonian) @ evolution

    return FockOperator(evolution)


def split_evolution(space: FockSpace, grid: TimeGrid, coupling: float, source) -> FockOperator:
    """Произведение exp(A_k/2) exp(B_k) exp(A_k/2) с A_k = −i dt λ/4! φ̂⁴, B_k = i dt J_k φ̂"""
    samples = _samples(grid, source)
    evolution = np.eye(space.dim, dtype=complex)

    for t, j in zip(grid.times, samples):
        phi = phi_at(space, t).matrix
        half_vertex = scipy.linalg.expm(-0.5j * grid.dt * coupling / 24.0 * np.linalg.matrix_power(phi, 4))
        source_step = scipy.linalg.expm(1j * grid.dt * j * phi)
        evolution = half_vertex @ source_step @ half_vertex @ evolution

    return FockOperator(evolution)


def interaction_evolution_exact(space: FockSpace, t0: float, t1: float, coupling: float) -> FockOperator:
    """U_I(t1, t0) = e^{iH₀t1} e^{−i(H₀ + λ/4! φ̂⁴)(t1 − t0)} e^{−iH₀t0}"""
    hamiltonian = space.hamiltonian + coupling / 24.0 * np.linalg.matrix_power(space.phi_schrodinger, 4)
    schrodinger = scipy.linalg.expm(-1j * (t1 - t0) * hamiltonian)
    return FockOperator(space.free_evolution(-t1) @ schrodinger @ space.free_evolution(t0))


def discrete_source_exponent(grid: TimeGrid, omega: float, samples: np.ndarray) -> complex:
    """Σ_jk s_j Δ_F(t_j, t_k) s_k, s = J dt"""
    prop = single_mode_propagator(grid.times, omega)
    weighted = samples * grid.dt
    return complex(weighted @ prop.matrix @ weighted)


def continuum_source_exponent(source: SourceProfile, t0: float, t1: float, omega: float,
                              points: int = REFERENCE_POINTS) -> complex:
    """
    ∫∫ J(t) Δ_F(t, t′) J(t′) dt dt′ на мелкой сетке

    Интеграл сводится к 2·(−i/2ω)∫ J(t) e^{−iωt} [∫_{t0}^{t} J(t′) e^{iωt′} dt′] dt.
    """
    t = np.linspace(t0, t1, points)
    j = source(t)
    inner = cumulative_trapezoid(j * np.exp(1j * omega * t), t, initial=0.0)
    outer = trapezoid(j * np.exp(-1j * omega * t) * inner, t)
    return complex(-1j / omega * outer)


def normal_ordered_exponential(space: FockSpace, grid: TimeGrid, samples: np.ndarray) -> np.ndarray:
    """:exp(i Σ_k s_k φ̂(t_k)): = e^{βa†} e^{γa}"""
    weighted = samples * grid.dt / np.sqrt(2.0 * space.omega)
    beta = 1j * np.sum(weighted * np.exp(1j * space.omega * grid.times))
    gamma = 1j * np.sum(weighted * np.exp(-1j * space.omega * grid.times))
    return scipy.linalg.expm(beta * space.creation) @ scipy.linalg.expm(gamma * space.annihilation)


def top_level_population(op: FockOperator) -> float:
    """|⟨d−1|U|0⟩|², доля вакуума, утекшая на верхний уровень усечения"""
    return float(abs(op.element(op.dim - 1, 0)) ** 2)


def _convergence_cases(report: VerificationReport, name: str, errors: List[float],
                       ratio_min: float, ratio_max: float):
    """Проверка второго порядка: отношения соседних ошибок в [ratio_min, ratio_max]"""
    ratios = [errors[k] / errors[k + 1] if errors[k + 1] > 0 else float('inf') for k in range(len(errors) - 1)]
    report.data[f"{name}_errors"] = errors
    report.data[f"{name}_ratios"] = ratios

    if max(errors) < ROUNDOFF_FLOOR:
        report.add(name, True, value=errors, note="расхождение на уровне округления, порядок не определяется")
        return

    converged = all(ratio_min <= ratio <= ratio_max for ratio in ratios)
    report.add(name, converged, value=ratios, expected=[ratio_min, ratio_max],
               note="" if converged else "сходимость второго порядка не достигнута")
    if not converged:
        logger.warning(f"{name}: отношения {ratios} вне [{ratio_min}, {ratio_max}]")


def check_wick_identity(space: FockSpace, grid: TimeGrid, source: SourceProfile,
                        tolerance: float = 1e-3, refinements: int = 3,
                        ratio_min: float = 3.5, ratio_max: float = 4.5,
                        unitarity_tolerance: float = 1e-8, truncation_threshold: float = 1e-8,
                        reference_points: int = REFERENCE_POINTS) -> VerificationReport:
    """
    T exp(i∫Jφ̂) = :exp(i∫Jφ̂): exp(−(i/2)∫∫JΔ_F J) на усеченном пространстве

    Левая часть: произведение срезов при λ = 0. Сравнение идет с дискретной
    гауссовой экспонентой на той же сетке, с непрерывным интегралом (с измерением
    порядка сходимости по dt) и поэлементно на нижнем блоке матрицы.
    """
    report = VerificationReport(suite="wick_identity")
    samples = source(grid.times)

    evolution = sliced_evolution(space, grid, 0.0, samples)
    lhs = vacuum_amplitude(evolution)
    discrete = np.exp(-0.5j * discrete_source_exponent(grid, space.omega, samples))
    continuum = np.exp(-0.5j * continuum_source_exponent(source, grid.t0, grid.t1, space.omega, reference_points))

    report.add_deviation("vacuum_discrete", abs(lhs - discrete), tolerance, value=lhs, expected=complex(discrete))
    report.add_deviation("vacuum_continuum", abs(lhs - continuum), tolerance, value=lhs, expected=complex(continuum))

    block = max(1, space.dim // 2)
    normal = normal_ordered_exponential(space, grid, samples) * discrete
    operator_residual = float(np.max(np.abs(evolution.matrix[:block, :block] - normal[:block, :block])))
    report.add_deviation("operator_block", operator_residual, tolerance, note=f"блок {block}×{block}")

    errors = [abs(lhs - continuum)]
    for k in range(1, refinements):
        refined = grid.refine(2 ** k)
        refined_lhs = vacuum_amplitude(sliced_evolution(space, refined, 0.0, source(refined.times)))
        errors.append(float(abs(refined_lhs - continuum)))
    _convergence_cases(report, "dt_convergence", [float(e) for e in errors], ratio_min, ratio_max)

    report.add_deviation("unitarity", evolution.unitarity_defect(), unitarity_tolerance)

    population = top_level_population(evolution)
    report.data.update({
        "dim": space.dim,
        "steps": grid.steps,
        "top_level_population": population,
        "steps_sequence": [grid.steps * 2 ** k for k in range(refinements)]
    })
    if population > truncation_threshold:
        message = f"усечение d={space.dim}: заселенность верхнего уровня {population:.3e} > {truncation_threshold}"
        report.warnings.append(message)
        logger.warning(message)

    logger.info(f"Тождество Вика на операторном уровне: {report}")
    return report


def slicing_deviation(space: FockSpace, grid: TimeGrid, coupling: float, samples: np.ndarray) -> float:
    """‖(U_sum − U_split)|0⟩‖ между нарезкой суммы и нарезкой произведения"""
    summed = sliced_evolution(space, grid, coupling, samples).matrix[:, 0]
    split = split_evolution(space, grid, coupling, samples).matrix[:, 0]
    return float(np.linalg.norm(summed - split))


def slicing_convergence(space: FockSpace, grid: TimeGrid, coupling: float, source: SourceProfile,
                        refinements: int = 3, ratio_min: float = 3.5, ratio_max: float = 4.5) -> VerificationReport:
    """
    T exp(V_A + V_B) против T(exp(V_A) exp(V_B)): расхождение должно убывать как dt²
    """
    report = VerificationReport(suite="slicing_factorization")
    deviations = []
    for k in range(refinements):
        refined = grid.refine(2 ** k)
        deviations.append(slicing_deviation(space, refined, coupling, source(refined.times)))
        logger.info(f"Нарезка {refined.steps} шагов: расхождение {deviations[-1]:.3e}")

    _convergence_cases(report, "split_convergence", deviations, ratio_min, ratio_max)
    report.data["coupling"] = coupling
    report.data["steps_sequence"] = [grid.steps * 2 ** k for k in range(refinements)]
    return report


def check_interaction_picture(space: FockSpace, grid: TimeGrid, coupling: float, refinements: int = 3,
                              ratio_min: float = 3.5, ratio_max: float = 4.5) -> VerificationReport:
    """Срезы при J = 0 сходятся к точному U_I со вторым порядком по dt"""
    report = VerificationReport(suite="interaction_picture")
    exact = interaction_evolution_exact(space, grid.t0, grid.t1, coupling).matrix[:, 0]
    deviations = []
    for k in range(refinements):
        refined = grid.refine(2 ** k)
        sliced = sliced_evolution(space, refined, coupling, np.zeros(refined.steps)).matrix[:, 0]
        deviations.append(float(np.linalg.norm(sliced - exact)))
        logger.info(f"Картина взаимодействия, {refined.steps} шагов: расхождение {deviations[-1]:.3e}")

    report.data["deviations"] = deviations
    _convergence_cases(report, "convergence", deviations, ratio_min, ratio_max)
    return report


def smatrix_truncated(space: FockSpace, grid: TimeGrid, coupling: float) -> FockOperator:
    """Ŝ = U(λ, J=0)/⟨0|U(λ, J=0)|0⟩"""
    evolution = sliced_evolution(space, grid, coupling, np.zeros(grid.steps))
    amplitude = vacuum_amplitude(evolution)
    if abs(amplitude) < np.finfo(float).tiny:
        raise VacuumAmplitudeError(f"⟨0|U|0⟩ = {amplitude} при λ = {coupling}")

    return FockOperator(evolution.matrix / amplitude)


def _symmetric_difference(space: FockSpace, grid: TimeGrid, coupling: float) -> np.ndarray:
    """D(λ) = (Ŝ(λ) − Ŝ(−λ))/(2λ) = S₁ + λ²S₃ + O(λ⁴)"""
    plus = smatrix_truncated(space, grid, coupling).matrix
    minus = smatrix_truncated(space, grid, -coupling).matrix
    return (plus - minus) / (2.0 * coupling)


def smatrix_order_one(space: FockSpace, grid: TimeGrid, coupling: float) -> FockOperator:
    """
    Коэффициент при λ в Ŝ

    Симметричная разность убирает четные порядки, экстраполяция Ричардсона
    (4·D(λ/2) − D(λ))/3 убирает λ²S₃. Остаток O(λ⁴).
    """
    if coupling <= 0:
        raise ValueError(f"Для выделения первого порядка нужно λ > 0: {coupling}")
    half = _symmetric_difference(space, grid, 0.5 * coupling)
    full = _symmetric_difference(space, grid, coupling)
    return FockOperator((4.0 * half - full) / 3.0)


def dyson_first_order(space: FockSpace, grid: TimeGrid, level: int) -> complex:
    """−i(1/4!) Σ_k dt ⟨n|φ̂(t_k)⁴|0⟩"""
    total = 0j
    for t in grid.times:
        total += np.linalg.matrix_power(phi_at(space, t).matrix, 4)[level, 0]
    return complex(-1j / 24.0 * grid.dt * total)


def check_smatrix(space: FockSpace, grid: TimeGrid, coupling: float, tolerance: float = 1e-2,
                  level: int = 4) -> VerificationReport:
    """⟨0|Ŝ|0⟩ = 1 и первый порядок ⟨n|Ŝ|0⟩ против члена Дайсона на той же сетке"""
    report = VerificationReport(suite="smatrix")
    smatrix = smatrix_truncated(space, grid, coupling)
    vacuum = smatrix.element(0, 0)
    report.add_deviation("vacuum_normalized", abs(vacuum - 1.0), VACUUM_TOLERANCE, value=vacuum, expected=1.0)

    first_order = smatrix_order_one(space, grid, coupling).element(level, 0)
    dyson = dyson_first_order(space, grid, level)
    deviation = abs(first_order - dyson) / max(abs(first_order), abs(dyson), 1e-12)
    report.add_deviation(f"order_one_level_{level}", deviation, tolerance, value=first_order, expected=dyson)

    report.data.update({"coupling": coupling, "steps": grid.steps, "duration": grid.duration})
    logger.info(f"Проверка Ŝ: {report}")
    return report
