# src/genfun/series.py
from dataclasses import dataclass
from itertools import combinations_with_replacement
from math import factorial
from collections import Counter
from typing import Dict, List, Sequence, Tuple
import numpy as np
from src.logger.config import setup_logger
from src.models.errors import CapExceededError
from src.lattice.kernel import Propagator
from src.genfun.polynomial import (
    GaussianPolynomial, Monomial, SiteKey, EMPTY, accumulate, check_site, merge_keys, remove_site,
    source_derivative, evaluate, evaluate_at_zero
)

logger = setup_logger(__name__)

DEFAULT_ORDER_CAP = 4
VERTEX_FACTOR = -1j / 24.0


@dataclass(frozen=True)
class PerturbativeSeries:
    """
    Ряд по степеням λ: order_terms[p] хранит коэффициент при λ^p (сам λ не входит)

    vertex_weight: вес суммы по вершинам (1 на решетке, dt на временной сетке).
    """
    order_terms: Tuple[GaussianPolynomial, ...]
    normalized: bool = False
    vertex_weight: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, 'order_terms', tuple(self.order_terms))
        if not self.order_terms:
            raise ValueError("Ряд должен содержать хотя бы нулевой порядок")

    def __str__(self) -> str:
        state = "нормирован" if self.normalized else "не нормирован"
        return f"PerturbativeSeries(p_max={self.max_order}, {state})"

    def __len__(self) -> int:
        return len(self.order_terms)

    def __getitem__(self, order: int) -> GaussianPolynomial:
        return self.order_terms[order]

    @property
    def max_order(self) -> int:
        return len(self.order_terms) - 1

    @property
    def propagator(self) -> Propagator:
        return self.order_terms[0].propagator

    def vacuum(self) -> List[complex]:
        """Коэффициенты Z[0] по порядкам: свободные члены (без J и без φ)"""
        return [complex(term.constant_term) for term in self.order_terms]

    def at_source(self, source) -> List[complex]:
        """Численные коэффициенты по порядкам в точке J"""
        return [evaluate(term, source) for term in self.order_terms]

    def value_at(self, source, coupling: float) -> complex:
        """Сумма ряда Σ λ^p Z_p(J), обрезанная на p_max"""
        return sum(coupling ** p * value for p, value in enumerate(self.at_source(source)))

    def structurally_equal(self, other: 'PerturbativeSeries') -> bool:
        return len(self) == len(other) and all(a == b for a, b in zip(self.order_terms, other.order_terms))


@dataclass(frozen=True)
class GreenResult:
    """n-точечная функция Грина по порядкам λ"""
    points: Tuple[int, ...]
    per_order: Tuple[complex, ...]
    normalized: bool
    note: str = ""

    def __str__(self) -> str:
        values = ", ".join(f"{value:.6g}" for value in self.per_order)
        return f"G{self.points} = [{values}]"

    @property
    def is_parity_zero(self) -> bool:
        return len(self.points) % 2 == 1

    def total(self, coupling: float) -> complex:
        return sum(coupling ** p * value for p, value in enumerate(self.per_order))

    def to_dict(self) -> dict:
        return {
            "points": list(self.points),
            "per_order": list(self.per_order),
            "normalized": self.normalized,
            "note": self.note
        }


def vertex_operator(poly: GaussianPolynomial) -> GaussianPolynomial:
    """Σ_x D_x⁴ P, сумма по узлам в порядке их номеров"""
    total = GaussianPolynomial.zero(poly.propagator)
    for x in range(poly.n_sites):
        term = poly
        for _ in range(4):
            term = source_derivative(term, x)
        total = total + term
    return total


def _check_order(p_max: int, order_cap: int):
    if p_max < 0:
        raise ValueError(f"Порядок ряда должен быть ≥ 0: {p_max}")
    if p_max > order_cap:
        raise CapExceededError("p_max", p_max, order_cap)


def z_series(prop: Propagator, p_max: int, order_cap: int = DEFAULT_ORDER_CAP,
             vertex_weight: float = 1.0) -> PerturbativeSeries:
    """
    Строит ряд ⟨0|U_M|0⟩ = exp(−i(λ/4!) w Σ_x D_x⁴) exp(−(i/2)JΔJ) до порядка p_max

    Порядок p: (1/p!)(−i w/4!)^p V^p G, V = Σ_x D_x⁴, G: гауссов множитель.

    Args:
        prop: Пропагатор
        p_max: Наибольший порядок по λ
        order_cap: Предел на p_max
        vertex_weight: Мера суммы по вершинам

    Returns:
        PerturbativeSeries (не нормированный)
    """
    _check_order(p_max, order_cap)

    terms = [GaussianPolynomial.gaussian(prop)]
    for p in range(1, p_max + 1):
        terms.append(vertex_operator(terms[-1]).scale(VERTEX_FACTOR * vertex_weight / p))
        logger.info(f"Порядок λ^{p} ряда Z[J]: {len(terms[-1])} мономов")

    return PerturbativeSeries(order_terms=tuple(terms), vertex_weight=vertex_weight)


def reciprocal_series(denominator: Sequence[complex], length: int) -> List[complex]:
    """Коэффициенты ряда 1/z до длины length"""
    if not denominator or denominator[0] == 0:
        raise ValueError("Нулевой порядок делителя должен быть ненулевым")
    z = list(denominator) + [0j] * max(0, length - len(denominator))
    inverse = [1.0 / z[0]]
    for n in range(1, length):
        inverse.append(-sum(z[k] * inverse[n - k] for k in range(1, n + 1)) / z[0])
    return inverse


def series_divide(numerator: Sequence, denominator: Sequence[complex]) -> list:
    """
    Формальное деление ряда на ряд по λ, обрезанное на длине числителя

    Элементы числителя: числа или GaussianPolynomial.
    """
    inverse = reciprocal_series(denominator, len(numerator))
    quotient = []
    for p in range(len(numerator)):
        total = numerator[p] * inverse[0]
        for k in range(1, p + 1):
            if inverse[k] != 0:
                total = total + numerator[p - k] * inverse[k]
        quotient.append(total)
    return quotient


def _force_vacuum(terms: List[GaussianPolynomial]) -> List[GaussianPolynomial]:
    """Свободный член: ровно 1 в нулевом порядке и 0 в остальных"""
    return [term.with_constant(1.0 if p == 0 else 0.0) for p, term in enumerate(terms)]


def normalize(series: PerturbativeSeries) -> PerturbativeSeries:
    """
    Делит ряд на его значение при J = 0 (ряд по λ), так что Z[0] = 1

    Returns:
        Нормированный PerturbativeSeries
    """
    vacuum = series.vacuum()
    quotient = series_divide(list(series.order_terms), vacuum)
    logger.info(f"Ряд нормирован: Z[0] по порядкам {[f'{value:.6g}' for value in vacuum]}")
    return PerturbativeSeries(
        order_terms=tuple(_force_vacuum(quotient)),
        normalized=True,
        vertex_weight=series.vertex_weight
    )


def green(series: PerturbativeSeries, points: Sequence[int], allow_unnormalized: bool = False) -> GreenResult:
    """
    n-точечная функция Грина (1/iⁿ) δⁿZ/δJ(x₁)…δJ(x_n) при J = 0 по порядкам

    Args:
        series: Нормированный ряд (или любой при allow_unnormalized=True)
        points: Узлы x₁…x_n
        allow_unnormalized: Разрешить ненормированный ряд

    Returns:
        GreenResult; при нечетном n все порядки равны точному нулю
    """
    if not series.normalized and not allow_unnormalized:
        raise ValueError("Функции Грина считаются по нормированному ряду; передайте allow_unnormalized=True явно")

    points = tuple(int(x) for x in points)
    zero_poly = GaussianPolynomial.zero(series.propagator)
    for x in points:
        check_site(zero_poly, x)

    n = len(points)
    if n % 2 == 1:
        return GreenResult(
            points=points,
            per_order=tuple(0j for _ in series.order_terms),
            normalized=series.normalized,
            note="нечетное число точек: ноль по четности гауссова множителя"
        )

    per_order = []
    for term in series.order_terms:
        current = term.truncate_j_degree(n)
        for k, x in enumerate(points):
            current = source_derivative(current, x).truncate_j_degree(n - k - 1)
        per_order.append(evaluate_at_zero(current))

    return GreenResult(points=points, per_order=tuple(per_order), normalized=series.normalized)


# Локальная вершинная алгебра: полиномы от u_a = −(ΔJ)_a со сверткой c_ab = iΔ_ab

def _local_derivative(poly: Dict[SiteKey, complex], a: int, contraction: np.ndarray) -> Dict[SiteKey, complex]:
    """D_a P = u_a P + Σ_b c_ab ∂P/∂u_b"""
    result: Dict[SiteKey, complex] = {}
    for key, value in poly.items():
        grown = merge_keys(key, (a,))
        result[grown] = result.get(grown, 0j) + value
        for b in set(key):
            reduced = remove_site(key, b)
            result[reduced] = result.get(reduced, 0j) + value * key.count(b) * contraction[a, b]
    return result


def _local_value(poly: Dict[SiteKey, complex], u: np.ndarray) -> complex:
    return sum(value * np.prod(u[list(key)]) for key, value in poly.items())


def z_at_source(prop: Propagator, source, p_max: int, vertex_weight: float = 1.0,
                order_cap: int = DEFAULT_ORDER_CAP) -> List[complex]:
    """
    Коэффициенты Z_p(J) ряда z_series в фиксированной числовой точке J

    Вершины раскрываются по набору узлов, поэтому работает и на длинных
    временных сетках, где полный полином по J не строится.
    """
    _check_order(p_max, order_cap)
    j = np.asarray(source, dtype=complex)
    if j.shape != (prop.n_sites,):
        raise ValueError(f"Ожидается источник длины {prop.n_sites}, получено {j.shape}")

    u = -(prop.matrix @ j)
    contraction = 1j * prop.matrix
    gaussian = np.exp(-0.5j * (j @ prop.matrix @ j))

    values = [complex(gaussian)]
    for p in range(1, p_max + 1):
        total = 0j
        for sites in combinations_with_replacement(range(prop.n_sites), p):
            multiplicity = factorial(p)
            for count in Counter(sites).values():
                multiplicity //= factorial(count)

            poly: Dict[SiteKey, complex] = {(): 1.0}
            for a in sites:
                for _ in range(4):
                    poly = _local_derivative(poly, a, contraction)
            total += multiplicity * _local_value(poly, u)

        coefficient = (VERTEX_FACTOR * vertex_weight) ** p / factorial(p)
        values.append(complex(coefficient * total * gaussian))
        logger.info(f"Z_{p}(J) на {prop.n_sites} узлах: {values[-1]:.6g}")
    return values


def _source_exponential(prop: Propagator, degree: int) -> GaussianPolynomial:
    """Σ_{k ≤ degree} (iB)^k/k!, B = Σ_z J_z φ_z"""
    b = GaussianPolynomial({((z,), (z,)): 1.0 for z in range(prop.n_sites)}, prop)
    power = GaussianPolynomial.constant(prop, 1.0)
    total = power
    for k in range(1, degree + 1):
        power = (power * b).scale(1j / k)
        total = total + power
    return total


def smatrix_series(prop: Propagator, p_max: int, vertex_weight: float = 1.0,
                   order_cap: int = DEFAULT_ORDER_CAP) -> PerturbativeSeries:
    """
    Ŝ = N_r U_M|_{J=0} как нормированный ряд полиномов по формальным φ

    U_M = exp(−i(λ/4!) w Σ D_x⁴) [:exp(iB): exp(−(i/2)JΔJ)], после чего J = 0.
    В порядке p остается 4(p_max − p) производных, мономы старшей степени по J отбрасываются.
    """
    _check_order(p_max, order_cap)

    current = _source_exponential(prop, 4 * p_max)
    orders = [current.j_free()]
    for p in range(1, p_max + 1):
        remaining = 4 * (p_max - p)
        total = GaussianPolynomial.zero(prop)
        for x in range(prop.n_sites):
            term = current
            for k in range(4):
                term = source_derivative(term, x).truncate_j_degree(remaining + 3 - k)
            total = total + term
        current = total.scale(VERTEX_FACTOR * vertex_weight / p)
        orders.append(current.j_free())

    vacuum = [complex(term.constant_term) for term in orders]
    quotient = series_divide(orders, vacuum)
    logger.info(f"Ряд Ŝ до порядка {p_max}: {[len(term) for term in quotient]} мономов по порядкам")
    return PerturbativeSeries(order_terms=tuple(_force_vacuum(quotient)), normalized=True,
                              vertex_weight=vertex_weight)
