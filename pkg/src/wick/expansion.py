# src/wick/expansion.py
from dataclasses import dataclass, field
from itertools import combinations
from math import factorial
from typing import Iterable, Iterator, List, Tuple
import sympy
from sympy import Rational
from src.logger.config import setup_logger
from src.models.errors import CapExceededError
from src.models.report import VerificationReport
from src.wick.scalar import ExactScalar, as_exact

logger = setup_logger(__name__)

DEFAULT_FIELD_CAP = 16

Pair = Tuple[int, int]


@dataclass(frozen=True)
class WickTerm:
    """
    Один член разложения T-произведения: набор спариваний S_pq, нормально
    упорядоченные неспаренные поля и точный коэффициент
    """
    pairs: Tuple[Pair, ...]
    unpaired: Tuple[int, ...]
    coefficient: ExactScalar = field(default_factory=ExactScalar)

    def __post_init__(self):
        canonical = tuple(sorted((min(p, q), max(p, q)) for p, q in self.pairs))
        object.__setattr__(self, 'pairs', canonical)
        object.__setattr__(self, 'unpaired', tuple(self.unpaired))

        indices = self.indices
        if len(set(indices)) != len(indices):
            raise ValueError(f"Индексы члена Вика повторяются: pairs={self.pairs}, unpaired={self.unpaired}")
        if any(p == q for p, q in self.pairs):
            raise ValueError(f"Поле не может спариваться само с собой: {self.pairs}")

    def __str__(self) -> str:
        contractions = "".join(f"S{p}{q}" for p, q in self.pairs)
        normal = f":{''.join(f'φ{n}' for n in self.unpaired)}:" if self.unpaired else ""
        return f"{self.coefficient}·{contractions}{normal}" if (contractions or normal) else str(self.coefficient)

    @property
    def r(self) -> int:
        """Число спариваний"""
        return len(self.pairs)

    @property
    def indices(self) -> Tuple[int, ...]:
        return tuple(i for pair in self.pairs for i in pair) + self.unpaired

    @property
    def pair_set(self) -> frozenset:
        return frozenset(self.pairs)


@dataclass(frozen=True)
class WickExpansion:
    """
    Разложение T(φ1…φm) по нормально упорядоченным членам

    symmetrized=True: один представитель на слой r с коэффициентом f_{m,r}
    (немые индексы слиты). symmetrized=False: все спаривания по отдельности
    с единичными коэффициентами.
    """
    m: int
    terms: Tuple[WickTerm, ...]
    symmetrized: bool = True

    def __post_init__(self):
        object.__setattr__(self, 'terms', tuple(self.terms))
        present = {term.r for term in self.terms}
        expected = set(range(self.m // 2 + 1))
        if present != expected:
            raise ValueError(f"Слои r разложения m={self.m} должны быть 0…{self.m // 2} без пропусков, получено {sorted(present)}")

    def __str__(self) -> str:
        return " + ".join(str(term) for term in self.terms)

    def stratum(self, r: int) -> Tuple[WickTerm, ...]:
        return tuple(term for term in self.terms if term.r == r)

    def multiplicity(self, r: int) -> int:
        """Суммарный вес слоя r; в обеих формах равен f_{m,r}"""
        total = sympy.Add(*(as_exact(term.coefficient) for term in self.stratum(r)))
        if not total.is_Integer:
            raise ValueError(f"Вес слоя r={r} не является целым: {total}")
        return int(total)


def pairing_count(m: int, r: int) -> int:
    """
    Число способов выбрать r непересекающихся пар из m полей

    Args:
        m: Число полей, m ≥ 0
        r: Число спариваний

    Returns:
        f_{m,r} = m!/(r!(m−2r)!2^r); 0 при r < 0 или 2r > m
    """
    if m < 0:
        raise ValueError(f"Число полей должно быть ≥ 0: {m}")
    if r < 0 or 2 * r > m:
        return 0
    return factorial(m) // (factorial(r) * factorial(m - 2 * r) * 2 ** r)


def _all_pairings(items: List[int]) -> Iterator[List[Pair]]:
    """Все разбиения items на пары; первый элемент всегда спаривается первым"""
    items = list(items)
    if not items:
        yield []
        return

    first = items.pop(0)
    for i, item in enumerate(items):
        for rest in _all_pairings(items[:i] + items[i + 1:]):
            yield [(first, item)] + rest


def enumerate_pairings(m: int, r: int, cap: int = DEFAULT_FIELD_CAP) -> List[WickTerm]:
    """
    Перечисляет все способы выбрать r непересекающихся пар из индексов 1…m

    Args:
        m: Число полей
        r: Число спариваний
        cap: Предел на m (рост (m−1)!!)

    Returns:
        Список WickTerm с единичными коэффициентами в каноническом порядке
    """
    if m > cap:
        raise CapExceededError("m", m, cap)
    if m < 0 or r < 0 or 2 * r > m:
        raise ValueError(f"Нельзя выбрать {r} пар из {m} полей")

    indices = range(1, m + 1)
    terms = []
    for chosen in combinations(indices, 2 * r):
        chosen_set = set(chosen)
        unpaired = tuple(i for i in indices if i not in chosen_set)
        for pairing in _all_pairings(list(chosen)):
            terms.append(WickTerm(pairs=tuple(pairing), unpaired=unpaired))

    terms.sort(key=lambda term: (term.pairs, term.unpaired))
    return terms


def timeordered_expansion(m: int) -> WickExpansion:
    """
    Симметризованное разложение T(φ1…φm): слой r представлен одним членом
    S_{m−2r+1,m−2r+2}…·:φ1…φ_{m−2r}: с коэффициентом f_{m,r}
    """
    if m < 0:
        raise ValueError(f"Число полей должно быть ≥ 0: {m}")

    terms = []
    for r in range(m // 2 + 1):
        k = m - 2 * r
        pairs = tuple((k + 2 * j + 1, k + 2 * j + 2) for j in range(r))
        terms.append(WickTerm(
            pairs=pairs,
            unpaired=tuple(range(1, k + 1)),
            coefficient=ExactScalar(pairing_count(m, r))
        ))
    return WickExpansion(m=m, terms=tuple(terms), symmetrized=True)


def expand_all(m: int, cap: int = DEFAULT_FIELD_CAP) -> WickExpansion:
    """Несимметризованное разложение: все спаривания с различными S_{ni nj}"""
    terms: List[WickTerm] = []
    for r in range(m // 2 + 1):
        terms.extend(enumerate_pairings(m, r, cap=cap))
    return WickExpansion(m=m, terms=tuple(terms), symmetrized=False)


def c_coefficient(k: int, r: int) -> ExactScalar:
    """C_{k,r} = i^{2r+k} / (k! r! 2^r)"""
    if k < 0 or r < 0:
        raise ValueError(f"Индексы C должны быть ≥ 0: k={k}, r={r}")
    return ExactScalar(Rational(1, factorial(k) * factorial(r) * 2 ** r), 2 * r + k)


def coefficient_cases(m_max: int) -> Iterable[Tuple[int, int]]:
    for m in range(m_max + 1):
        for r in range(m // 2 + 1):
            yield m, r


def verify_coefficient_identity(m_max: int) -> VerificationReport:
    """
    Проверяет в точной арифметике i^m/m!·f_{m,r} = C_{m−2r,r}
    для всех 0 ≤ m ≤ m_max и 0 ≤ r ≤ ⌊m/2⌋

    Args:
        m_max: Наибольшее число полей, ≥ 1

    Returns:
        VerificationReport со случаем на каждую пару (m, r)
    """
    if m_max < 1:
        raise ValueError(f"m_max должно быть ≥ 1: {m_max}")

    report = VerificationReport(suite="wick_coefficients")
    for m, r in coefficient_cases(m_max):
        lhs = ExactScalar(Rational(pairing_count(m, r), factorial(m)), m)
        rhs = c_coefficient(m - 2 * r, r)
        case = report.add(f"m={m},r={r}", lhs == rhs, value=str(lhs), expected=str(rhs))
        if not case.passed:
            logger.warning(f"Тождество коэффициентов нарушено при m={m}, r={r}: {lhs} != {rhs}")

    report.data["m_max"] = m_max
    report.data["cases_checked"] = len(report.cases)
    logger.info(f"Тождество коэффициентов Вика: {report}")
    return report
