# src/fock/space.py
from dataclasses import dataclass
from functools import cached_property
import numpy as np


@dataclass(frozen=True, eq=False)
class FockOperator:
    """Плотная комплексная матрица d×d на усеченном базисе чисел заполнения"""
    matrix: np.ndarray

    def __post_init__(self):
        array = np.array(self.matrix, dtype=complex)
        if array.ndim != 2 or array.shape[0] != array.shape[1]:
            raise ValueError(f"Оператор должен быть квадратной матрицей, получена форма {array.shape}")
        array.setflags(write=False)
        object.__setattr__(self, 'matrix', array)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def element(self, row: int, column: int) -> complex:
        return complex(self.matrix[row, column])

    def unitarity_defect(self) -> float:
        """‖U†U − I‖_max"""
        return float(np.max(np.abs(self.matrix.conj().T @ self.matrix - np.eye(self.dim))))

    def hermiticity_defect(self) -> float:
        return float(np.max(np.abs(self.matrix - self.matrix.conj().T)))


@dataclass(frozen=True)
class FockSpace:
    """
    Усеченное пространство Фока одной моды нулевого импульса

    dim: число уровней d, omega: частота ω = m. H₀ = ω a†a (нулевая энергия опущена).
    """
    dim: int
    omega: float = 1.0

    def __post_init__(self):
        if self.dim < 2:
            raise ValueError(f"Размерность фоковского пространства должна быть ≥ 2: {self.dim}")
        if self.omega <= 0:
            raise ValueError(f"Частота моды должна быть > 0: {self.omega}")

    def __str__(self) -> str:
        return f"FockSpace(d={self.dim}, ω={self.omega})"

    @cached_property
    def annihilation(self) -> np.ndarray:
        return np.diag(np.sqrt(np.arange(1, self.dim)), k=1).astype(complex)

    @cached_property
    def creation(self) -> np.ndarray:
        return self.annihilation.conj().T

    @cached_property
    def levels(self) -> np.ndarray:
        return np.arange(self.dim, dtype=float)

    @cached_property
    def hamiltonian(self) -> np.ndarray:
        return np.diag(self.omega * self.levels).astype(complex)

    @cached_property
    def phi_schrodinger(self) -> np.ndarray:
        return (self.annihilation + self.creation) / np.sqrt(2.0 * self.omega)

    def free_evolution(self, t: float) -> np.ndarray:
        """e^{−iH₀t}, диагональная"""
        return np.diag(np.exp(-1j * self.omega * self.levels * t))

    def commutator_defect(self) -> float:
        """Отклонение [a, a†] от I без угла (d−1, d−1), где сказывается усечение"""
        commutator = self.annihilation @ self.creation - self.creation @ self.annihilation
        head = self.dim - 1
        return float(np.max(np.abs(commutator[:head, :head] - np.eye(head))))


@dataclass(frozen=True)
class TimeGrid:
    """Равномерная сетка на [t0, t1]; срезы берутся в серединах интервалов"""
    t0: float
    t1: float
    steps: int

    def __post_init__(self):
        if self.steps < 1:
            raise ValueError(f"Число шагов должно быть ≥ 1: {self.steps}")
        if self.t1 <= self.t0:
            raise ValueError(f"t1 = {self.t1} должно быть больше t0 = {self.t0}")

    def __str__(self) -> str:
        return f"[{self.t0}, {self.t1}] × {self.steps}"

    @property
    def dt(self) -> float:
        return (self.t1 - self.t0) / self.steps

    @property
    def duration(self) -> float:
        return self.t1 - self.t0

    @property
    def times(self) -> np.ndarray:
        return self.t0 + (np.arange(self.steps) + 0.5) * self.dt

    def refine(self, factor: int) -> 'TimeGrid':
        return TimeGrid(self.t0, self.t1, self.steps * factor)


def phi_at(space: FockSpace, t: float) -> FockOperator:
    """φ̂_I(t) = (a e^{−iωt} + a† e^{iωt})/√(2ω)"""
    phase = np.exp(-1j * space.omega * t)
    return FockOperator(
        (space.annihilation * phase + space.creation * np.conj(phase)) / np.sqrt(2.0 * space.omega)
    )


def vacuum_amplitude(op: FockOperator) -> complex:
    """⟨0|U|0⟩"""
    return op.element(0, 0)
