# src/cli/report.py
import csv
import io
import json
import math
import sys
from enum import Enum
from typing import Any, Dict, Iterator, List, Optional, Tuple
import numpy as np
from src.logger.config import setup_logger
from src.models.report import VerificationReport
from src.models.run_config import OutputFormat, RunConfig

logger = setup_logger(__name__)

SCHEMA_VERSION = 1

CSV_COLUMNS = [
    "command", "suite", "case", "passed", "value_re", "value_im",
    "expected_re", "expected_im", "deviation", "tolerance", "note"
]


def encode(value: Any) -> Any:
    """Приводит значение к JSON-совместимому виду; комплексные числа как [re, im]"""
    if value is None or isinstance(value, (bool, str)):
        return value
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        value = float(value)
        return value if math.isfinite(value) else str(value)
    if isinstance(value, (complex, np.complexfloating)):
        return [encode(value.real), encode(value.imag)]
    if isinstance(value, np.ndarray):
        return encode(value.tolist())
    if isinstance(value, Enum):
        return value.value
    if isinstance(value, dict):
        return {str(key): encode(item) for key, item in value.items()}
    if isinstance(value, (list, tuple)):
        return [encode(item) for item in value]
    if hasattr(value, "to_dict"):
        return encode(value.to_dict())
    return str(value)


def build_document(command: str, config: RunConfig, suites: List[VerificationReport],
                   results: Optional[Dict[str, Any]] = None) -> Dict[str, Any]:
    """Документ отчета: версия схемы, параметры запуска, наборы проверок и результаты"""
    return {
        "schema": SCHEMA_VERSION,
        "command": command,
        "parameters": config.parameters(),
        "passed": all(suite.passed for suite in suites),
        "suites": [suite.to_dict() for suite in suites],
        "results": results or {}
    }


def _split(value: Any) -> Tuple[Any, Any]:
    encoded = encode(value)
    if isinstance(value, (complex, np.complexfloating)):
        return encoded[0], encoded[1]
    if encoded is None or isinstance(encoded, (int, float, str)):
        return encoded, ""
    return json.dumps(encoded, sort_keys=True, ensure_ascii=False), ""


def _flatten(prefix: str, value: Any) -> Iterator[Tuple[str, Any]]:
    if isinstance(value, dict):
        for key in sorted(value):
            yield from _flatten(f"{prefix}.{key}" if prefix else str(key), value[key])
    elif isinstance(value, (list, tuple)) and value and all(
            isinstance(item, (int, float, complex, np.number)) and not isinstance(item, bool) for item in value):
        for index, item in enumerate(value):
            yield f"{prefix}[{index}]", item
    else:
        yield prefix, value


def render_csv(document: Dict[str, Any], suites: List[VerificationReport]) -> str:
    """Одна строка на случай проверки и на каждое скалярное значение результатов"""
    buffer = io.StringIO()
    writer = csv.DictWriter(buffer, fieldnames=CSV_COLUMNS, lineterminator="\n")
    writer.writeheader()
    command = document["command"]

    for suite in suites:
        for case in suite.cases:
            value_re, value_im = _split(case.value)
            expected_re, expected_im = _split(case.expected)
            writer.writerow({
                "command": command, "suite": suite.suite, "case": case.name, "passed": case.passed,
                "value_re": value_re, "value_im": value_im,
                "expected_re": expected_re, "expected_im": expected_im,
                "deviation": "" if case.deviation is None else encode(case.deviation),
                "tolerance": "" if case.tolerance is None else encode(case.tolerance),
                "note": case.note
            })

    for name, value in _flatten("", document["results"]):
        value_re, value_im = _split(value)
        writer.writerow({
            "command": command, "suite": "results", "case": name, "passed": "",
            "value_re": value_re, "value_im": value_im,
            "expected_re": "", "expected_im": "", "deviation": "", "tolerance": "", "note": ""
        })
    return buffer.getvalue()


def render(document: Dict[str, Any], suites: List[VerificationReport], output_format: OutputFormat) -> str:
    if output_format == OutputFormat.CSV:
        return render_csv(document, suites)
    return json.dumps(encode(document), sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def write_report(text: str, output: Optional[str]):
    """Пишет отчет в файл или в stdout"""
    if output is None:
        sys.stdout.write(text)
        return
    with open(output, 'w', encoding='utf-8', newline='') as file:
        file.write(text)
    logger.info(f"Отчет записан в {output}")
