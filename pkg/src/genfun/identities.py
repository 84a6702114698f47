# src/genfun/identities.py
from typing import Dict
import numpy as np
from src.logger.config import setup_logger
from src.models.report import VerificationReport
from src.models.run_config import OnShellRule
from src.lattice.kernel import Kernel, Propagator
from src.genfun.polynomial import GaussianPolynomial, Monomial, accumulate, merge_keys, remove_site, source_derivative

logger = setup_logger(__name__)

IDENTITY_TOLERANCE = 1e-10


def _check_sizes(kernel: Kernel, prop: Propagator):
    if kernel.n_sites != prop.n_sites:
        raise ValueError(f"Размеры K ({kernel.n_sites}) и Δ ({prop.n_sites}) не совпадают")


def verify_kd_identity(kernel: Kernel, prop: Propagator, tolerance: float = IDENTITY_TOLERANCE) -> VerificationReport:
    """
    Проверяет Σ_y K_xy D_y exp(−(i/2)JΔJ) = J_x exp(−(i/2)JΔJ) на каждом узле

    Для внешнего пропагатора (не −K⁻¹) проверка не проходит.
    """
    _check_sizes(kernel, prop)
    report = VerificationReport(suite="kd_identity")
    gaussian = GaussianPolynomial.gaussian(prop)
    derivatives = [source_derivative(gaussian, y) for y in range(prop.n_sites)]

    worst = 0.0
    for x in range(prop.n_sites):
        lhs = GaussianPolynomial.zero(prop)
        for y in range(prop.n_sites):
            if kernel.matrix[x, y] != 0:
                lhs = lhs + derivatives[y].scale(complex(kernel.matrix[x, y]))
        rhs = GaussianPolynomial({((x,), ()): 1.0}, prop)
        deviation = lhs.max_deviation(rhs)
        worst = max(worst, deviation)
        report.add_deviation(f"site={x}", deviation, tolerance)

    report.data["residual"] = worst
    report.data["external"] = prop.is_external
    if not report.passed:
        logger.warning(f"Тождество K·D = J нарушено: невязка {worst:.3e}")
    logger.info(f"Тождество K·D = J: {report}")
    return report


def apply_c_operator(poly: GaussianPolynomial, kernel: Kernel,
                     on_shell: OnShellRule = OnShellRule.DROP) -> GaussianPolynomial:
    """
    Действие Ĉ = Σ_x φ_x K_x (1/i)δ/δJ_x на P·exp(−(i/2)JΔJ)

    Гауссова часть дает Σ_x φ_x (−KΔJ)_x P. Полиномиальная часть несет (Kφ)_z;
    на массовой поверхности Kφ = −iεφ: при DROP этот член отбрасывается,
    при RETAIN остается Σ_z φ_z(−ε ∂_z P).
    """
    prop = poly.propagator
    _check_sizes(kernel, prop)
    transfer = -(kernel.matrix @ prop.matrix)
    result: Dict[Monomial, complex] = {}

    for (j_key, phi_key), value in poly.terms.items():
        for x in range(prop.n_sites):
            phi_grown = merge_keys(phi_key, (x,))
            for z in np.flatnonzero(transfer[x]):
                accumulate(result, (merge_keys(j_key, (int(z),)), phi_grown), transfer[x, z] * value)

        if on_shell == OnShellRule.RETAIN:
            for z in set(j_key):
                accumulate(result, (remove_site(j_key, z), merge_keys(phi_key, (z,))),
                           -kernel.epsilon * j_key.count(z) * value)

    return GaussianPolynomial(result, prop)


def verify_c_equals_b(kernel: Kernel, prop: Propagator, n_max: int,
                      on_shell: OnShellRule = OnShellRule.DROP,
                      tolerance: float = IDENTITY_TOLERANCE) -> VerificationReport:
    """
    Сравнивает Ĉⁿ G с Bⁿ G, B = Σ_z J_z φ_z, для n = 0…n_max

    Bⁿ строится прямым перемножением полиномов, независимо от Ĉ.
    """
    if n_max < 0:
        raise ValueError(f"n_max должно быть ≥ 0: {n_max}")
    _check_sizes(kernel, prop)

    report = VerificationReport(suite="c_equals_b")
    b = GaussianPolynomial({((z,), (z,)): 1.0 for z in range(prop.n_sites)}, prop)
    c_power = GaussianPolynomial.gaussian(prop)
    b_power = GaussianPolynomial.gaussian(prop)

    for n in range(n_max + 1):
        if n > 0:
            c_power = apply_c_operator(c_power, kernel, on_shell)
            b_power = b_power * b
        deviation = c_power.max_deviation(b_power)
        case = report.add_deviation(f"n={n}", deviation, tolerance, value=len(c_power), expected=len(b_power))
        if not case.passed:
            logger.warning(f"Ĉ^{n} ≠ B^{n}: расхождение {deviation:.3e} (режим {on_shell.value})")

    report.data["on_shell"] = on_shell.value
    report.data["n_max"] = n_max
    logger.info(f"Тождество Ĉⁿ = Bⁿ: {report}")
    return report
