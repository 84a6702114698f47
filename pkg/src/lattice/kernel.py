# src/lattice/kernel.py
from dataclasses import dataclass, field
from typing import Optional, Sequence
import numpy as np
import scipy.linalg
from src.logger.config import setup_logger
from src.models.errors import PropagatorError
from src.models.model_spec import ModelSpec, Geometry

logger = setup_logger(__name__)

RESIDUAL_TOLERANCE = 1e-10
SYMMETRY_TOLERANCE = 1e-12


def _readonly(matrix) -> np.ndarray:
    array = np.array(matrix, dtype=complex)
    array.setflags(write=False)
    return array


@dataclass(frozen=True, eq=False)
class Kernel:
    """Дискретный кинетический оператор ∂_t² − ∇² + m² − iε как симметричная матрица"""
    matrix: np.ndarray
    spec: ModelSpec

    def __post_init__(self):
        object.__setattr__(self, 'matrix', _readonly(self.matrix))
        if not np.array_equal(self.matrix, self.matrix.T):
            raise ValueError("Матрица ядра K должна быть симметричной")

    @property
    def n_sites(self) -> int:
        return self.matrix.shape[0]

    @property
    def epsilon(self) -> float:
        return self.spec.epsilon


@dataclass(frozen=True, eq=False)
class Propagator:
    """
    Матрица пропагатора Фейнмана Δ

    external=True означает, что матрица задана снаружи и соотношение KΔ = −I
    для нее не гарантируется.
    """
    matrix: np.ndarray
    external: bool = False
    residual: Optional[float] = field(default=None, compare=False)

    def __post_init__(self):
        object.__setattr__(self, 'matrix', _readonly(self.matrix))

    def __str__(self) -> str:
        kind = "external" if self.external else "lattice"
        return f"Propagator({kind}, N={self.n_sites})"

    @property
    def n_sites(self) -> int:
        return self.matrix.shape[0]

    @property
    def is_external(self) -> bool:
        return self.external


def _add_neighbours(matrix: np.ndarray, index, size: int, stride: int, weight: float, periodic: bool, offset: int):
    """Добавляет weight к связям узла с соседями вдоль одной оси"""
    for step in (-1, 1):
        neighbour = offset + step
        if periodic:
            neighbour %= size
        elif not 0 <= neighbour < size:
            continue
        matrix[index, index + (neighbour - offset) * stride] += weight


def build_kernel(spec: ModelSpec) -> Kernel:
    """
    Собирает матрицу K для геометрии модели

    Временная ось дает (φ_{j+1} − 2φ_j + φ_{j−1})/a², пространственная ось
    решетки 1+1 входит как −∇². На диагонали добавляется m² − iε.
    Узел решетки (t, x) имеет индекс t·Nx + x.
    """
    mass_term = spec.mass ** 2 - 1j * spec.epsilon
    inv_a2 = 1.0 / spec.spacing ** 2
    periodic = spec.is_periodic

    if spec.geometry == Geometry.POINT:
        matrix = np.array([[mass_term]], dtype=complex)

    elif spec.geometry in (Geometry.CHAIN, Geometry.GRID):
        nt, nx = spec.sites, spec.spatial_sites
        matrix = np.zeros((nt * nx, nt * nx), dtype=complex)

        for t in range(nt):
            for x in range(nx):
                index = t * nx + x
                matrix[index, index] += mass_term - 2.0 * inv_a2
                _add_neighbours(matrix, index, nt, nx, inv_a2, periodic, t)

                if spec.geometry == Geometry.GRID:
                    matrix[index, index] += 2.0 * inv_a2
                    _add_neighbours(matrix, index, nx, 1, -inv_a2, periodic, x)

    else:
        raise ValueError(f"Неподдерживаемая геометрия: {spec.geometry}")

    logger.info(f"Ядро K собрано: {spec}")
    return Kernel(matrix=matrix, spec=spec)


def propagator(kernel: Kernel, tolerance: float = RESIDUAL_TOLERANCE) -> Propagator:
    """
    Решает KΔ = −I плотным симметричным решателем

    Args:
        kernel: Ядро K
        tolerance: Допуск на ‖KΔ + I‖_max

    Returns:
        Propagator с симметризованной матрицей
    """
    n = kernel.n_sites
    identity = np.eye(n, dtype=complex)

    try:
        delta = scipy.linalg.solve(kernel.matrix, -identity, assume_a='sym')
    except (np.linalg.LinAlgError, ValueError) as e:
        raise PropagatorError(f"Решение KΔ = −I не удалось: {e}")

    delta = 0.5 * (delta + delta.T)
    if not np.all(np.isfinite(delta)):
        raise PropagatorError("Пропагатор содержит нечисловые элементы")

    residual = float(np.max(np.abs(kernel.matrix @ delta + identity)))
    if residual >= tolerance:
        raise PropagatorError("Невязка KΔ + I превышает допуск", residual=residual)

    logger.info(f"Пропагатор N={n} построен, невязка {residual:.2e}")
    return Propagator(matrix=delta, residual=residual)


def fourier_propagator(spec: ModelSpec) -> Propagator:
    """
    Пропагатор через диагонализацию дискретным преобразованием Фурье

    Для периодической цепочки собственные значения K равны
    m² − iε + (2cos(2πk/N) − 2)/a², а Δ циркулянтна: Δ_jl = c[(j − l) mod N].
    """
    mass_term = spec.mass ** 2 - 1j * spec.epsilon
    inv_a2 = 1.0 / spec.spacing ** 2

    if spec.geometry == Geometry.POINT:
        return Propagator(matrix=[[-1.0 / mass_term]])

    if not spec.is_periodic:
        raise ValueError("Фурье-диагонализация определена только для периодических границ")

    nt, nx = spec.sites, spec.spatial_sites
    time_modes = (2.0 * np.cos(2.0 * np.pi * np.arange(nt) / nt) - 2.0) * inv_a2

    if spec.geometry == Geometry.CHAIN:
        column = np.fft.ifft(-1.0 / (mass_term + time_modes))
        shift = np.subtract.outer(np.arange(nt), np.arange(nt)) % nt
        return Propagator(matrix=column[shift])

    if spec.geometry == Geometry.GRID:
        space_modes = (2.0 * np.cos(2.0 * np.pi * np.arange(nx) / nx) - 2.0) * inv_a2
        eigenvalues = mass_term + time_modes[:, None] - space_modes[None, :]
        block = np.fft.ifft2(-1.0 / eigenvalues)

        t_index, x_index = np.divmod(np.arange(nt * nx), nx)
        dt = np.subtract.outer(t_index, t_index) % nt
        dx = np.subtract.outer(x_index, x_index) % nx
        return Propagator(matrix=block[dt, dx])

    raise ValueError(f"Неподдерживаемая геометрия: {spec.geometry}")


def external_propagator(matrix, tolerance: float = SYMMETRY_TOLERANCE) -> Propagator:
    """Оборачивает внешнюю симметричную матрицу как Propagator без проверки KΔ = −I"""
    array = np.array(matrix, dtype=complex)
    if array.ndim != 2 or array.shape[0] != array.shape[1]:
        raise ValueError(f"Ожидается квадратная матрица, получена форма {array.shape}")
    if not np.allclose(array, array.T, rtol=0.0, atol=tolerance):
        raise ValueError("Внешний пропагатор должен быть симметричной матрицей")
    return Propagator(matrix=array, external=True)


def single_mode_propagator(times: Sequence[float], omega: float) -> Propagator:
    """Δ_F(t, t′) = −i e^{−iω|t−t′|}/(2ω) одной моды на временной сетке"""
    if omega <= 0:
        raise ValueError(f"Частота моды должна быть > 0: {omega}")
    t = np.asarray(times, dtype=float)
    separation = np.abs(np.subtract.outer(t, t))
    return external_propagator(-1j * np.exp(-1j * omega * separation) / (2.0 * omega))


def kernel_residual(kernel: Kernel, prop: Propagator) -> float:
    """‖KΔ + I‖_max"""
    if kernel.n_sites != prop.n_sites:
        raise ValueError(f"Размеры K ({kernel.n_sites}) и Δ ({prop.n_sites}) не совпадают")
    return float(np.max(np.abs(kernel.matrix @ prop.matrix + np.eye(kernel.n_sites))))
