# src/models/run_config.py
from enum import Enum
from typing import List, Optional
from pydantic import Field, field_validator
from pydantic_settings import BaseSettings, SettingsConfigDict
from src.models.model_spec import ModelSpec, Geometry, Boundary


class OutputFormat(Enum):
    JSON = "json"
    CSV = "csv"


class QuadratureMode(Enum):
    PER_ORDER = "per_order"
    FULL = "full"


class OnShellRule(Enum):
    """Что делать с членом K_x φ_x, возникающим при действии Ĉ на полином"""
    DROP = "drop"
    RETAIN = "retain"


class RunConfig(BaseSettings):
    """
    Полная конфигурация запуска: модель, параметры наборов проверок, допуски и вывод

    Значения берутся из конфигурационного файла, флаги CLI передаются поверх.
    Неизвестные ключи отклоняются, все допуски строго положительны.
    """

    model_config = SettingsConfigDict(env_prefix="ZGEN_", extra="forbid", populate_by_name=True)

    # Модель
    geometry: Geometry = Geometry.POINT
    sites: int = Field(1, ge=1)
    spatial_sites: int = Field(1, ge=1)
    spacing: float = Field(1.0, gt=0)
    mass: float = Field(1.0, gt=0)
    epsilon: float = Field(0.1, gt=0)
    coupling: float = Field(0.1, ge=0, alias="lambda")
    boundary: Boundary = Boundary.PERIODIC

    # Ряды и комбинаторика
    p_max: int = Field(2, ge=0)
    order_cap: int = Field(4, ge=0)
    m_max: int = Field(12, ge=1)
    field_cap: int = Field(16, ge=0)
    n_max: int = Field(3, ge=0)
    moment_cap: int = Field(12, ge=0)
    on_shell: OnShellRule = OnShellRule.DROP
    points: List[int] = Field(default_factory=lambda: [0, 0])
    source: List[float] = Field(default_factory=list)
    source_value: float = 0.25

    # Квадратура
    quad_nodes: int = Field(64, ge=64)
    quad_mode: QuadratureMode = QuadratureMode.PER_ORDER
    grid_gate: bool = True

    # Фоковское пространство и временная сетка
    steps: int = Field(200, ge=1)
    dim: int = Field(16, ge=2)
    t0: float = 0.0
    t1: float = 4.0
    pulse_amplitude: float = 0.2
    pulse_center: float = 2.0
    pulse_width: float = 0.5
    smatrix_duration: float = Field(1.0, gt=0)
    refinements: int = Field(3, ge=3)

    # Допуски
    identity_tolerance: float = Field(1e-10, gt=0)
    compare_tolerance: float = Field(1e-6, gt=0)
    full_tolerance: float = Field(1e-2, gt=0)
    gate_tolerance: float = Field(1e-8, gt=0)
    wick_tolerance: float = Field(1e-3, gt=0)
    ratio_min: float = Field(3.5, gt=0)
    ratio_max: float = Field(4.5, gt=0)
    smatrix_tolerance: float = Field(1e-2, gt=0)
    crossmodule_tolerance: float = Field(1e-2, gt=0)
    unitarity_tolerance: float = Field(1e-8, gt=0)
    truncation_threshold: float = Field(1e-8, gt=0)

    # Вывод
    output: Optional[str] = None
    format: OutputFormat = OutputFormat.JSON

    @field_validator("t1")
    @classmethod
    def _check_interval(cls, value: float, info) -> float:
        t0 = info.data.get("t0", 0.0)
        if value <= t0:
            raise ValueError(f"t1 = {value} должно быть больше t0 = {t0}")
        return value

    @field_validator("ratio_max")
    @classmethod
    def _check_ratio_window(cls, value: float, info) -> float:
        ratio_min = info.data.get("ratio_min", 3.5)
        if value <= ratio_min:
            raise ValueError(f"ratio_max = {value} должно быть больше ratio_min = {ratio_min}")
        return value

    def build_model_spec(self) -> ModelSpec:
        """Собирает ModelSpec из полей модели"""
        return ModelSpec(
            geometry=self.geometry,
            sites=self.sites,
            spatial_sites=self.spatial_sites,
            spacing=self.spacing,
            mass=self.mass,
            epsilon=self.epsilon,
            boundary=self.boundary,
            coupling=self.coupling
        )

    def source_vector(self, n_sites: int) -> List[float]:
        """Источник J для сравнения маршрутов: явный список или постоянное значение на всех узлах"""
        if self.source:
            if len(self.source) != n_sites:
                raise ValueError(f"Длина source = {len(self.source)} не совпадает с числом узлов {n_sites}")
            return list(self.source)
        return [self.source_value] * n_sites

    def parameters(self) -> dict:
        """Параметры запуска для заголовка отчета (без пути вывода)"""
        data = self.model_dump(mode="json", by_alias=True, exclude={"output"})
        return dict(sorted(data.items()))
