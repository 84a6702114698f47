# src/models/report.py
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional


@dataclass
class CheckCase:
    """Один проверяемый случай набора: измеренное значение, ожидаемое и результат"""
    name: str
    passed: bool
    value: Any = None
    expected: Any = None
    deviation: Optional[float] = None
    tolerance: Optional[float] = None
    note: str = ""

    def __str__(self) -> str:
        status = "OK" if self.passed else "FAIL"
        if self.deviation is None:
            return f"{self.name}: {status}"
        return f"{self.name}: {status} (отклонение {self.deviation:.3e}, допуск {self.tolerance})"

    def to_dict(self) -> Dict[str, Any]:
        return {
            "name": self.name,
            "passed": self.passed,
            "value": self.value,
            "expected": self.expected,
            "deviation": self.deviation,
            "tolerance": self.tolerance,
            "note": self.note
        }


@dataclass
class VerificationReport:
    """
    Результат набора проверок

    Набор проходит тогда и только тогда, когда проходят все случаи.
    Предупреждения (например, об усечении фоковского пространства) на результат не влияют.
    """
    suite: str
    cases: List[CheckCase] = field(default_factory=list)
    data: Dict[str, Any] = field(default_factory=dict)
    warnings: List[str] = field(default_factory=list)

    def add(self, name: str, passed: bool, **details) -> CheckCase:
        case = CheckCase(name=name, passed=bool(passed), **details)
        self.cases.append(case)
        return case

    def add_deviation(self, name: str, deviation: float, tolerance: float, **details) -> CheckCase:
        """Добавляет случай, проходящий при deviation < tolerance"""
        deviation = float(deviation)
        return self.add(name, deviation < tolerance, deviation=deviation, tolerance=tolerance, **details)

    def extend(self, other: 'VerificationReport', prefix: str = ""):
        """Переносит случаи и предупреждения другого отчета"""
        for case in other.cases:
            case.name = f"{prefix}{case.name}"
            self.cases.append(case)
        self.warnings.extend(other.warnings)

    @property
    def passed(self) -> bool:
        return all(case.passed for case in self.cases)

    @property
    def first_failure(self) -> Optional[CheckCase]:
        return next((case for case in self.cases if not case.passed), None)

    def __bool__(self) -> bool:
        return self.passed

    def __str__(self) -> str:
        failed = sum(1 for case in self.cases if not case.passed)
        return f"{self.suite}: {len(self.cases) - failed}/{len(self.cases)} OK"

    def to_dict(self) -> Dict[str, Any]:
        return {
            "suite": self.suite,
            "passed": self.passed,
            "cases": [case.to_dict() for case in self.cases],
            "data": self.data,
            "warnings": list(self.warnings)
        }


def relative_deviation(a: complex, b: complex) -> float:
    """|a − b| / max(|a|, |b|, 1e−12)"""
    return float(abs(a - b) / max(abs(a), abs(b), 1e-12))
