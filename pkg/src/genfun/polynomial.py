# src/genfun/polynomial.py
from dataclasses import dataclass, field
from numbers import Number
from types import MappingProxyType
from typing import Dict, Iterable, Mapping, Tuple
import numpy as np
from src.lattice.kernel import Propagator

SiteKey = Tuple[int, ...]
Monomial = Tuple[SiteKey, SiteKey]

EMPTY: Monomial = ((), ())


def merge_keys(a: SiteKey, b: SiteKey) -> SiteKey:
    return tuple(sorted(a + b))


def remove_site(key: SiteKey, site: int) -> SiteKey:
    """Убирает одно вхождение site из отсортированного ключа"""
    position = key.index(site)
    return key[:position] + key[position + 1:]


def accumulate(target: Dict[Monomial, complex], key: Monomial, value: complex):
    target[key] = target.get(key, 0j) + value


@dataclass(frozen=True, eq=False)
class GaussianPolynomial:
    """
    Полином от источников J_x и формальных символов φ_x, умноженный на
    неявный гауссов множитель exp(−(i/2) JᵀΔJ)

    Ключ монома: (отсортированные узлы J, отсортированные узлы φ).
    Нулевые коэффициенты не хранятся, поэтому равенство структурное.
    """
    terms: Mapping[Monomial, complex]
    propagator: Propagator = field(compare=False)

    def __post_init__(self):
        merged: Dict[Monomial, complex] = {}
        for (j_key, phi_key), value in self.terms.items():
            accumulate(merged, (tuple(sorted(j_key)), tuple(sorted(phi_key))), complex(value))
        cleaned = {key: value for key, value in merged.items() if value != 0}
        object.__setattr__(self, 'terms', MappingProxyType(dict(sorted(cleaned.items()))))

    @classmethod
    def gaussian(cls, propagator: Propagator) -> 'GaussianPolynomial':
        """Чистый гауссов множитель, Z₀[J]"""
        return cls({EMPTY: 1.0}, propagator)

    @classmethod
    def constant(cls, propagator: Propagator, value: complex) -> 'GaussianPolynomial':
        return cls({EMPTY: value}, propagator)

    @classmethod
    def zero(cls, propagator: Propagator) -> 'GaussianPolynomial':
        return cls({}, propagator)

    @classmethod
    def from_terms(cls, propagator: Propagator, terms: Iterable[Tuple[Monomial, complex]]) -> 'GaussianPolynomial':
        collected: Dict[Monomial, complex] = {}
        for key, value in terms:
            accumulate(collected, key, value)
        return cls(collected, propagator)

    def __str__(self) -> str:
        return f"GaussianPolynomial({len(self.terms)} мономов, степень J ≤ {self.j_degree})"

    def __len__(self) -> int:
        return len(self.terms)

    def __eq__(self, other) -> bool:
        if not isinstance(other, GaussianPolynomial):
            return NotImplemented
        return dict(self.terms) == dict(other.terms)

    __hash__ = None

    def _check_compatible(self, other: 'GaussianPolynomial'):
        if other.propagator is not self.propagator and not np.array_equal(
                other.propagator.matrix, self.propagator.matrix):
            raise ValueError("Полиномы относятся к разным пропагаторам")

    def __add__(self, other: 'GaussianPolynomial') -> 'GaussianPolynomial':
        if not isinstance(other, GaussianPolynomial):
            return NotImplemented
        self._check_compatible(other)
        combined = dict(self.terms)
        for key, value in other.terms.items():
            accumulate(combined, key, value)
        return GaussianPolynomial(combined, self.propagator)

    def __neg__(self) -> 'GaussianPolynomial':
        return self.scale(-1.0)

    def __sub__(self, other: 'GaussianPolynomial') -> 'GaussianPolynomial':
        return self + (-other)

    def __mul__(self, other) -> 'GaussianPolynomial':
        """Умножает полиномиальные части; гауссов множитель остается один"""
        if isinstance(other, Number):
            return self.scale(other)
        if not isinstance(other, GaussianPolynomial):
            return NotImplemented
        self._check_compatible(other)
        product: Dict[Monomial, complex] = {}
        for (j_a, phi_a), a in self.terms.items():
            for (j_b, phi_b), b in other.terms.items():
                accumulate(product, (merge_keys(j_a, j_b), merge_keys(phi_a, phi_b)), a * b)
        return GaussianPolynomial(product, self.propagator)

    def __rmul__(self, other) -> 'GaussianPolynomial':
        if isinstance(other, Number):
            return self.scale(other)
        return NotImplemented

    def scale(self, factor: complex) -> 'GaussianPolynomial':
        return GaussianPolynomial({key: value * factor for key, value in self.terms.items()}, self.propagator)

    @property
    def n_sites(self) -> int:
        return self.propagator.n_sites

    @property
    def j_degree(self) -> int:
        return max((len(j_key) for j_key, _ in self.terms), default=0)

    @property
    def has_phi(self) -> bool:
        return any(phi_key for _, phi_key in self.terms)

    @property
    def is_zero(self) -> bool:
        return not self.terms

    @property
    def constant_term(self) -> complex:
        return self.terms.get(EMPTY, 0j)

    def truncate_j_degree(self, degree: int) -> 'GaussianPolynomial':
        """Отбрасывает мономы со степенью по J больше degree"""
        return GaussianPolynomial(
            {key: value for key, value in self.terms.items() if len(key[0]) <= degree}, self.propagator
        )

    def j_free(self) -> 'GaussianPolynomial':
        """Часть без источников: значение полинома при J = 0 как полином по φ"""
        return self.truncate_j_degree(0)

    def with_constant(self, value: complex) -> 'GaussianPolynomial':
        terms = dict(self.terms)
        terms[EMPTY] = value
        return GaussianPolynomial(terms, self.propagator)

    def max_deviation(self, other: 'GaussianPolynomial') -> float:
        """Наибольшее расхождение коэффициентов по объединению мономов"""
        keys = set(self.terms) | set(other.terms)
        return max((abs(self.terms.get(key, 0j) - other.terms.get(key, 0j)) for key in keys), default=0.0)

    def to_list(self) -> list:
        return [
            {"j": list(j_key), "phi": list(phi_key), "value": value}
            for (j_key, phi_key), value in self.terms.items()
        ]


def check_site(poly: GaussianPolynomial, x: int):
    if not 0 <= x < poly.n_sites:
        raise ValueError(f"Узел {x} вне решетки из {poly.n_sites} узлов")


def source_derivative(poly: GaussianPolynomial, x: int) -> GaussianPolynomial:
    """
    Применяет (1/i) ∂/∂J_x к P·exp(−(i/2)JΔJ)

    Результат: (−i ∂_x P − (ΔJ)_x P)·exp(−(i/2)JΔJ).

    Args:
        poly: Гауссов полином
        x: Узел решетки

    Returns:
        GaussianPolynomial
    """
    check_site(poly, x)
    row = poly.propagator.matrix[x]
    couplings = [(y, complex(row[y])) for y in np.flatnonzero(row)]
    result: Dict[Monomial, complex] = {}

    for (j_key, phi_key), value in poly.terms.items():
        multiplicity = j_key.count(x)
        if multiplicity:
            accumulate(result, (remove_site(j_key, x), phi_key), -1j * multiplicity * value)
        for y, delta_xy in couplings:
            accumulate(result, (merge_keys(j_key, (int(y),)), phi_key), -delta_xy * value)

    return GaussianPolynomial(result, poly.propagator)


def evaluate_at_zero(poly: GaussianPolynomial) -> complex:
    """Значение при J = 0: гауссов множитель равен 1, остается свободный член"""
    if poly.has_phi:
        raise ValueError("Полином содержит формальные символы φ; значение при J = 0 не является числом")
    return complex(poly.constant_term)


def evaluate(poly: GaussianPolynomial, source) -> complex:
    """Численное значение P(J)·exp(−(i/2)JᵀΔJ) на векторе источников"""
    if poly.has_phi:
        raise ValueError("Полином содержит формальные символы φ")
    j = np.asarray(source, dtype=complex)
    if j.shape != (poly.n_sites,):
        raise ValueError(f"Ожидается источник длины {poly.n_sites}, получено {j.shape}")

    polynomial_part = sum(value * np.prod(j[list(j_key)]) for (j_key, _), value in poly.terms.items())
    gaussian = np.exp(-0.5j * (j @ poly.propagator.matrix @ j))
    return complex(polynomial_part * gaussian)
