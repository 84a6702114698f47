# src/oracle/moments.py
import math
from typing import Sequence
from src.models.errors import CapExceededError
from src.lattice.kernel import Propagator
from src.wick.expansion import enumerate_pairings

DEFAULT_MOMENT_CAP = 12


def moment_oracle(prop: Propagator, sites: Sequence[int], cap: int = DEFAULT_MOMENT_CAP) -> complex:
    """
    Гауссов момент как сумма по совершенным паросочетаниям Π iΔ_xy

    Args:
        prop: Пропагатор
        sites: Мультимножество узлов
        cap: Предел на размер мультимножества

    Returns:
        Сумма по паросочетаниям; 0 для нечетного размера
    """
    sites = [int(x) for x in sites]
    if len(sites) > cap:
        raise CapExceededError("размер момента", len(sites), cap)
    for x in sites:
        if not 0 <= x < prop.n_sites:
            raise ValueError(f"Узел {x} вне решетки из {prop.n_sites} узлов")
    if len(sites) % 2 == 1:
        return 0j

    m = len(sites)
    products = []
    for term in enumerate_pairings(m, m // 2, cap=cap):
        value = 1.0 + 0j
        for p, q in term.pairs:
            value *= 1j * prop.matrix[sites[p - 1], sites[q - 1]]
        products.append(value)

    return complex(math.fsum(v.real for v in products), math.fsum(v.imag for v in products))
