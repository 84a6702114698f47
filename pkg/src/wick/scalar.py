# src/wick/scalar.py
from dataclasses import dataclass
from fractions import Fraction
from typing import Union
import sympy
from sympy import I, Rational


@dataclass(frozen=True, eq=False)
class ExactScalar:
    """
    Рациональное число, умноженное на i^k (k хранится по модулю 4)

    Умножение и деление остаются в этой форме. Сложение и сравнение идут через
    значение sympy rational·I^k, поэтому ExactScalar(-1, 0) == ExactScalar(1, 2).
    """
    rational: Rational = Rational(1)
    i_power: int = 0

    def __post_init__(self):
        if isinstance(self.rational, float):
            raise TypeError(f"Неточное значение {self.rational!r} не допускается")
        object.__setattr__(self, 'rational', Rational(self.rational))
        object.__setattr__(self, 'i_power', int(self.i_power) % 4)

    @classmethod
    def i_to(cls, k: int) -> 'ExactScalar':
        return cls(Rational(1), k)

    @property
    def value(self) -> sympy.Expr:
        """Гауссово рациональное число rational·I^k"""
        return self.rational * I ** self.i_power

    def __mul__(self, other) -> 'ExactScalar':
        if isinstance(other, ExactScalar):
            return ExactScalar(self.rational * other.rational, self.i_power + other.i_power)
        if isinstance(other, (int, Fraction, Rational)) and not isinstance(other, bool):
            return ExactScalar(self.rational * Rational(other), self.i_power)
        return NotImplemented

    __rmul__ = __mul__

    def __truediv__(self, other) -> 'ExactScalar':
        if isinstance(other, ExactScalar):
            return ExactScalar(self.rational / other.rational, self.i_power - other.i_power)
        if isinstance(other, (int, Fraction, Rational)) and not isinstance(other, bool):
            return ExactScalar(self.rational / Rational(other), self.i_power)
        return NotImplemented

    def __add__(self, other) -> sympy.Expr:
        return self.value + as_exact(other)

    __radd__ = __add__

    def __neg__(self) -> 'ExactScalar':
        return ExactScalar(self.rational, self.i_power + 2)

    def __eq__(self, other) -> bool:
        if isinstance(other, (ExactScalar, sympy.Basic, int)) and not isinstance(other, bool):
            return sympy.expand(self.value - as_exact(other)) == 0
        return NotImplemented

    def __hash__(self) -> int:
        return hash(self.value)

    def __complex__(self) -> complex:
        return complex(self.value)

    def __str__(self) -> str:
        suffix = {0: "", 1: "·i", 2: "·i²", 3: "·i³"}[self.i_power]
        return f"{self.rational}{suffix}"

    @property
    def is_zero(self) -> bool:
        return self.rational == 0


def as_exact(value: Union[ExactScalar, sympy.Expr, int, Fraction]) -> sympy.Expr:
    """Точное значение sympy; числа с плавающей точкой отклоняются"""
    if isinstance(value, ExactScalar):
        return value.value
    if isinstance(value, sympy.Basic):
        if value.has(sympy.Float):
            raise TypeError(f"Неточное значение {value!r} не допускается")
        return value
    if isinstance(value, (int, Fraction)) and not isinstance(value, bool):
        return Rational(value)
    raise TypeError(f"Неточное значение {value!r} ({type(value).__name__}) не допускается")
