# src/cli/commands.py
from typing import Any, Callable, Dict, List, Tuple
import numpy as np
from src.logger.config import setup_logger
from src.models.report import VerificationReport
from src.models.run_config import RunConfig
from src.wick.expansion import expand_all, timeordered_expansion, verify_coefficient_identity
from src.lattice.kernel import build_kernel, fourier_propagator, kernel_residual, propagator
from src.genfun.identities import verify_c_equals_b, verify_kd_identity
from src.genfun.series import green, normalize, z_series
from src.fock.space import FockSpace, TimeGrid
from src.fock.evolution import (
    check_interaction_picture, check_smatrix, check_wick_identity, gaussian_pulse, slicing_convergence
)
from src.fock.crosscheck import check_cross_module_z, check_operator_wick, check_smatrix_series
from src.oracle.moments import moment_oracle
from src.oracle.quadrature import QuadratureSpec
from src.oracle.routes import compare_routes

logger = setup_logger(__name__)

CommandResult = Tuple[List[VerificationReport], Dict[str, Any]]

# Ĉⁿ на больших решетках дает слишком много мономов
C_EQUALS_B_MAX_SITES = 8
EXPANSION_MAX_FIELDS = 8
SMATRIX_LEVEL = 4
SMATRIX_SERIES_STEPS = 6
OPERATOR_WICK_TIMES = (0.3, 1.1, 0.7, 1.9)


def cmd_wick_verify(config: RunConfig) -> CommandResult:
    """Тождество коэффициентов в точной арифметике и согласие симметризованного разложения с перебором"""
    coefficients = verify_coefficient_identity(config.m_max)

    expansion = VerificationReport(suite="wick_expansion")
    for m in range(min(config.m_max, EXPANSION_MAX_FIELDS) + 1):
        symmetrized = timeordered_expansion(m)
        enumerated = expand_all(m, cap=config.field_cap)
        for r in range(m // 2 + 1):
            counted = enumerated.multiplicity(r)
            expected = symmetrized.multiplicity(r)
            expansion.add(f"m={m},r={r}", counted == expected, value=counted, expected=expected)

    results = {"cases_checked": len(coefficients.cases), "m_max": config.m_max}
    return [coefficients, expansion], results


def cmd_propagator(config: RunConfig) -> CommandResult:
    """Пропагатор решетки, тождество KΔ = −I и Ĉⁿ G = Bⁿ G"""
    spec = config.build_model_spec()
    kernel = build_kernel(spec)
    prop = propagator(kernel, tolerance=config.identity_tolerance)

    checks = VerificationReport(suite="propagator")
    checks.add_deviation("residual", kernel_residual(kernel, prop), config.identity_tolerance)
    checks.add_deviation("symmetric", float(np.max(np.abs(prop.matrix - prop.matrix.T))), config.identity_tolerance)
    if spec.is_periodic:
        fourier = fourier_propagator(spec)
        checks.add_deviation("fourier", float(np.max(np.abs(prop.matrix - fourier.matrix))),
                             config.identity_tolerance)
    else:
        checks.warnings.append("Фурье-сравнение пропущено: граница не периодическая")

    suites = [checks, verify_kd_identity(kernel, prop, tolerance=config.identity_tolerance)]
    if spec.n_sites <= C_EQUALS_B_MAX_SITES:
        suites.append(verify_c_equals_b(kernel, prop, config.n_max, config.on_shell, config.identity_tolerance))
    else:
        message = f"Ĉⁿ G = Bⁿ G пропущено: {spec.n_sites} узлов > {C_EQUALS_B_MAX_SITES}"
        checks.warnings.append(message)
        logger.warning(message)

    return suites, {"n_sites": spec.n_sites, "propagator": prop.matrix, "residual": prop.residual}


def cmd_z_series(config: RunConfig) -> CommandResult:
    """Ряд Z[J] по порядкам λ, нормированный на вакуум, и его значения при заданном J"""
    spec = config.build_model_spec()
    prop = propagator(build_kernel(spec), tolerance=config.identity_tolerance)
    series = z_series(prop, config.p_max, order_cap=config.order_cap)
    normalized = normalize(series)
    source = np.asarray(config.source_vector(spec.n_sites))

    results = {
        "vacuum": series.vacuum(),
        "at_source": normalized.at_source(source),
        "sum_at_source": normalized.value_at(source, spec.coupling),
        "terms": [term.to_list() for term in normalized.order_terms],
        "monomials": [len(term) for term in normalized.order_terms]
    }
    return [], results


def cmd_green(config: RunConfig) -> CommandResult:
    """n-точечная функция Грина по порядкам; свободный порядок сверяется с гауссовым моментом"""
    spec = config.build_model_spec()
    prop = propagator(build_kernel(spec), tolerance=config.identity_tolerance)
    series = normalize(z_series(prop, config.p_max, order_cap=config.order_cap))
    result = green(series, config.points)

    checks = VerificationReport(suite="green")
    free = moment_oracle(prop, config.points, cap=config.moment_cap)
    checks.add_deviation("free_order_matches_moment", abs(result.per_order[0] - free), config.identity_tolerance,
                         value=result.per_order[0], expected=free)
    if result.note:
        checks.warnings.append(result.note)

    return [checks], {"green": result.to_dict(), "total": result.total(spec.coupling)}


def cmd_compare(config: RunConfig) -> CommandResult:
    """Ряд по производным против прямой квадратуры на малых решетках"""
    spec = config.build_model_spec()
    quad = QuadratureSpec(nodes=config.quad_nodes, mode=config.quad_mode)
    report = compare_routes(
        spec, quad, config.source_vector(spec.n_sites), config.p_max,
        tolerance=config.compare_tolerance,
        gate_tolerance=config.gate_tolerance,
        full_tolerance=config.full_tolerance,
        grid_gate=config.grid_gate,
        order_cap=config.order_cap
    )
    return [report], {"n_sites": spec.n_sites}


def cmd_fock(config: RunConfig) -> CommandResult:
    """Проверки одной моды в усеченном фоковском пространстве"""
    space = FockSpace(dim=config.dim, omega=config.mass)
    grid = TimeGrid(config.t0, config.t1, config.steps)
    pulse = gaussian_pulse(config.pulse_amplitude, config.pulse_center, config.pulse_width)

    suites = [
        check_wick_identity(
            space, grid, pulse,
            tolerance=config.wick_tolerance,
            refinements=config.refinements,
            ratio_min=config.ratio_min,
            ratio_max=config.ratio_max,
            unitarity_tolerance=config.unitarity_tolerance,
            truncation_threshold=config.truncation_threshold
        ),
        slicing_convergence(space, grid, config.coupling, pulse, refinements=config.refinements,
                            ratio_min=config.ratio_min, ratio_max=config.ratio_max),
        check_interaction_picture(space, grid, config.coupling, refinements=config.refinements,
                                  ratio_min=config.ratio_min, ratio_max=config.ratio_max),
        check_cross_module_z(space, grid, config.coupling, pulse, tolerance=config.crossmodule_tolerance)
    ]

    skipped = VerificationReport(suite="fock_skipped")
    if space.dim > SMATRIX_LEVEL:
        t_end = config.t0 + config.smatrix_duration
        if config.coupling > 0:
            suites.append(check_smatrix(space, TimeGrid(config.t0, t_end, 2 * config.steps), config.coupling,
                                        tolerance=config.smatrix_tolerance, level=SMATRIX_LEVEL))
        else:
            skipped.warnings.append("Ŝ: первый порядок требует λ > 0")
        suites.append(check_smatrix_series(space, TimeGrid(config.t0, t_end, SMATRIX_SERIES_STEPS),
                                           tolerance=config.identity_tolerance, level=SMATRIX_LEVEL))
        suites.append(check_operator_wick(space, OPERATOR_WICK_TIMES, tolerance=config.identity_tolerance,
                                          cap=config.field_cap))
    else:
        skipped.warnings.append(f"Ŝ и операторный Вик пропущены: размерность {space.dim} ≤ {SMATRIX_LEVEL}")

    if skipped.warnings:
        suites.append(skipped)

    return suites, {"dim": space.dim, "omega": space.omega, "steps": grid.steps, "dt": grid.dt}


COMMANDS: Dict[str, Callable[[RunConfig], CommandResult]] = {
    "wick-verify": cmd_wick_verify,
    "propagator": cmd_propagator,
    "z-series": cmd_z_series,
    "green": cmd_green,
    "compare": cmd_compare,
    "fock-check": cmd_fock
}
