# src/oracle/quadrature.py
import math
from dataclasses import dataclass, replace
from typing import List, Optional, Sequence, Tuple
import numpy as np
import scipy.linalg
from numpy.polynomial.hermite import hermgauss
from src.logger.config import setup_logger
from src.models.errors import QuadratureError
from src.models.model_spec import ModelSpec
from src.models.run_config import QuadratureMode
from src.lattice.kernel import Kernel, build_kernel
from src.genfun.series import VERTEX_FACTOR, series_divide

logger = setup_logger(__name__)

MIN_NODES = 64
MAX_SITES = 3
TAIL_BOUND = 1e-12


@dataclass(frozen=True)
class QuadratureSpec:
    """
    Тензорная квадратура Гаусса–Эрмита вдоль повернутого контура каждой собственной моды Re K

    Граница поля Φ_max следует из узлов и масштаба мод, см. field_cutoff.
    """
    nodes: int = MIN_NODES
    mode: QuadratureMode = QuadratureMode.PER_ORDER
    chunk_size: int = 1 << 16

    def __post_init__(self):
        if self.nodes < MIN_NODES:
            raise ValueError(f"Число узлов квадратуры должно быть ≥ {MIN_NODES}: {self.nodes}")
        if self.chunk_size < 1:
            raise ValueError(f"Размер блока должен быть ≥ 1: {self.chunk_size}")

    def __str__(self) -> str:
        return f"Quadrature({self.nodes} узлов, {self.mode.value})"

    @property
    def is_full(self) -> bool:
        return self.mode == QuadratureMode.FULL

    def doubled(self) -> 'QuadratureSpec':
        return replace(self, nodes=2 * self.nodes)


class _Contour:
    """Повернутый контур: φ = O ψ, ψ_a = e^{−iθ_a} √(2/|c_a|) s, c_a = ε + i r_a"""

    def __init__(self, kernel: Kernel, nodes: int):
        n = kernel.n_sites
        if n > MAX_SITES:
            raise QuadratureError(f"Тензорная квадратура поддерживает не более {MAX_SITES} узлов, получено {n}")
        if not np.allclose(kernel.matrix.imag, -kernel.epsilon * np.eye(n), rtol=0.0, atol=1e-14):
            raise QuadratureError("Мнимая часть K должна быть −εI")

        eigenvalues, self.modes = scipy.linalg.eigh(kernel.matrix.real)
        damping = kernel.epsilon + 1j * eigenvalues
        self.factor = np.exp(-0.5j * np.angle(damping)) * np.sqrt(2.0 / np.abs(damping))
        self.nodes, self.weights = hermgauss(nodes)
        self.n_sites = n

        s_max = float(np.max(np.abs(self.nodes)))
        self.tail = math.exp(-s_max ** 2)
        if self.tail >= TAIL_BOUND:
            raise QuadratureError(f"Хвост подынтегральной функции {self.tail:.2e} ≥ {TAIL_BOUND}; нужно больше узлов",
                                  tail=self.tail)
        self.cutoff = float(s_max * np.max(np.abs(self.factor)))

    def integrate(self, source: np.ndarray, points: Sequence[int], powers: int, chunk_size: int,
                  coupling: Optional[float] = None) -> List[complex]:
        """
        Σ весов · e^{iJφ} · Π φ_points · (Σφ⁴)^p для p = 0…powers

        При заданном coupling вместо степеней берется один интеграл с e^{−iλ/4! Σφ⁴}.
        """
        n, count = self.n_sites, len(self.nodes)
        total = count ** n
        partial: List[Tuple[List[float], List[float]]] = [([], []) for _ in range(1 if coupling is not None else powers + 1)]

        for start in range(0, total, chunk_size):
            index = np.unravel_index(np.arange(start, min(start + chunk_size, total)), (count,) * n)
            psi = np.stack([self.factor[a] * self.nodes[index[a]] for a in range(n)])
            weight = np.prod(np.stack([self.weights[i] for i in index]), axis=0)
            phi = self.modes @ psi

            integrand = weight * np.exp(1j * (source @ phi))
            for x in points:
                integrand = integrand * phi[x]
            quartic = np.sum(phi ** 4, axis=0)

            if coupling is not None:
                chunk_sums = [np.sum(integrand * np.exp(-1j * coupling / 24.0 * quartic))]
            else:
                chunk_sums = []
                for _ in range(powers + 1):
                    chunk_sums.append(np.sum(integrand))
                    integrand = integrand * quartic

            for (real, imag), value in zip(partial, chunk_sums):
                real.append(float(value.real))
                imag.append(float(value.imag))

        return [complex(math.fsum(real), math.fsum(imag)) for real, imag in partial]


def _prepare(spec: ModelSpec, quad: QuadratureSpec, source) -> Tuple[_Contour, np.ndarray]:
    contour = _Contour(build_kernel(spec), quad.nodes)
    j = np.zeros(contour.n_sites) if source is None else np.asarray(source, dtype=float)
    if j.shape != (contour.n_sites,):
        raise ValueError(f"Ожидается источник длины {contour.n_sites}, получено {j.shape}")
    return contour, j


def _order_factor(p: int) -> complex:
    return VERTEX_FACTOR ** p / math.factorial(p)


def quadrature_z(spec: ModelSpec, quad: QuadratureSpec, source=None, p_max: int = 2):
    """
    Прямое интегрирование дискретного интеграла по траекториям

    Args:
        spec: Модель (не более трех узлов)
        quad: Параметры квадратуры
        source: Вектор J (None означает J = 0)
        p_max: Наибольший порядок в поэлементном режиме

    Returns:
        Поэлементный режим: список (1/p!)(−i/4!)^p ∫(Σφ⁴)^p e^{−(i/2)φKφ + iJφ} / ∫e^{−(i/2)φKφ}.
        Полный режим (только один узел): ∫e^{−(i/2)φKφ + iJφ − iλ/4! φ⁴} / ∫e^{−(i/2)φKφ}.
    """
    contour, j = _prepare(spec, quad, source)
    free = contour.integrate(np.zeros(contour.n_sites), (), 0, quad.chunk_size)[0]

    if quad.is_full:
        if contour.n_sites != 1:
            raise QuadratureError("Полный режим поддерживается только для одного узла")
        value = contour.integrate(j, (), 0, quad.chunk_size, coupling=spec.coupling)[0]
        return value / free

    raw = contour.integrate(j, (), p_max, quad.chunk_size)
    coefficients = [_order_factor(p) * value / free for p, value in enumerate(raw)]
    logger.info(f"Квадратура {quad} на {contour.n_sites} узлах, Φ_max = {contour.cutoff:.3g}: "
                f"{[f'{c:.6g}' for c in coefficients]}")
    return coefficients


def quadrature_green(spec: ModelSpec, quad: QuadratureSpec, points: Sequence[int], p_max: int = 2) -> List[complex]:
    """Нормированная функция Грина ⟨φ_{x1}…φ_{xn}⟩ по порядкам λ"""
    contour, zero = _prepare(spec, quad, None)
    points = [int(x) for x in points]
    for x in points:
        if not 0 <= x < contour.n_sites:
            raise ValueError(f"Узел {x} вне решетки из {contour.n_sites} узлов")

    free = contour.integrate(zero, (), 0, quad.chunk_size)[0]
    vacuum = contour.integrate(zero, (), p_max, quad.chunk_size)
    moments = contour.integrate(zero, points, p_max, quad.chunk_size)

    vacuum = [_order_factor(p) * value / free for p, value in enumerate(vacuum)]
    moments = [_order_factor(p) * value / free for p, value in enumerate(moments)]
    return series_divide(moments, vacuum)


def field_cutoff(spec: ModelSpec, quad: QuadratureSpec) -> float:
    """Φ_max: наибольший модуль поля на узлах квадратуры"""
    return _Contour(build_kernel(spec), quad.nodes).cutoff
