# src/models/errors.py
from typing import Optional


class CapExceededError(ValueError):
    """Превышен сконфигурированный предел (число полей, порядок ряда, размер момента)"""

    def __init__(self, what: str, value: int, cap: int):
        self.value = value
        self.cap = cap
        super().__init__(f"{what} = {value} превышает предел {cap}")


class PropagatorError(RuntimeError):
    """Линейное решение для пропагатора не удалось или невязка KΔ + I слишком велика"""

    def __init__(self, message: str, residual: Optional[float] = None):
        self.residual = residual
        super().__init__(message if residual is None else f"{message} (невязка {residual:.3e})")


class QuadratureError(RuntimeError):
    """Квадратура не может дать надежный результат при заданной сетке"""

    def __init__(self, message: str, tail: Optional[float] = None):
        self.tail = tail
        super().__init__(message)


class VacuumAmplitudeError(RuntimeError):
    """Вакуумная амплитуда ⟨0|U|0⟩ обратилась в ноль при нормировке"""
    pass
