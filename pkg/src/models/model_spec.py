# src/models/model_spec.py
from enum import Enum
from dataclasses import dataclass


class Geometry(Enum):
    POINT = "point"
    CHAIN = "chain"
    GRID = "grid"


class Boundary(Enum):
    PERIODIC = "periodic"
    DIRICHLET = "dirichlet"


@dataclass(frozen=True)
class ModelSpec:
    """
    Геометрия решетки и параметры модели φ⁴

    sites: число узлов по времени, spatial_sites: по пространству (только для GRID).
    Все величины безразмерны, шаг решетки входит в разностный шаблон.
    """
    geometry: Geometry = Geometry.POINT
    sites: int = 1
    spatial_sites: int = 1
    spacing: float = 1.0
    mass: float = 1.0
    epsilon: float = 0.1
    boundary: Boundary = Boundary.PERIODIC
    coupling: float = 0.0

    def __post_init__(self):
        if self.sites < 1 or self.spatial_sites < 1:
            raise ValueError(f"Число узлов должно быть ≥ 1: sites={self.sites}, spatial_sites={self.spatial_sites}")
        if self.geometry == Geometry.POINT and (self.sites != 1 or self.spatial_sites != 1):
            raise ValueError("Геометрия point допускает только один узел")
        if self.geometry == Geometry.CHAIN and self.spatial_sites != 1:
            raise ValueError("Геометрия chain не имеет пространственных узлов")
        if self.spacing <= 0:
            raise ValueError(f"Шаг решетки должен быть > 0: {self.spacing}")
        if self.mass <= 0:
            raise ValueError(f"Масса должна быть > 0: {self.mass}")
        if self.epsilon <= 0:
            raise ValueError(f"ε должно быть строго > 0: {self.epsilon}")
        if self.coupling < 0:
            raise ValueError(f"Константа связи должна быть ≥ 0: {self.coupling}")

    def __str__(self) -> str:
        return (f"{self.geometry.value} N={self.n_sites} a={self.spacing} m={self.mass} "
                f"ε={self.epsilon} λ={self.coupling} {self.boundary.value}")

    @property
    def n_sites(self) -> int:
        return self.sites * self.spatial_sites

    @property
    def is_periodic(self) -> bool:
        return self.boundary == Boundary.PERIODIC
