# src/cli/app.py
import argparse
from typing import Any, Dict, List, Optional
from src.logger.config import setup_logger
from src.config.manager import config_manager
from src.models.errors import PropagatorError, QuadratureError, VacuumAmplitudeError
from src.models.run_config import OutputFormat
from src.cli.commands import COMMANDS
from src.cli.report import build_document, render, write_report

logger = setup_logger(__name__)

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_USAGE = 2

# Флаг CLI → ключ конфигурации
FLAG_KEYS = {
    "p_max": "p_max",
    "m_max": "m_max",
    "steps": "steps",
    "dim": "dim",
    "coupling": "lambda",
    "mass": "mass",
    "epsilon": "epsilon",
    "points": "points",
    "output": "output",
    "format": "format"
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="zgen",
        description="Проверки производящего функционала Z[J] теории φ⁴ на решетке"
    )
    subparsers = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", metavar="PATH", help="YAML или текстовый файл key = value")
    common.add_argument("--output", metavar="PATH", help="Файл отчета (по умолчанию stdout)")
    common.add_argument("--format", choices=[item.value for item in OutputFormat])
    common.add_argument("--p-max", dest="p_max", type=int)
    common.add_argument("--m-max", dest="m_max", type=int)
    common.add_argument("--steps", type=int)
    common.add_argument("--dim", type=int)
    common.add_argument("--lambda", dest="coupling", type=float)
    common.add_argument("--mass", type=float)
    common.add_argument("--epsilon", type=float)

    for name, handler in COMMANDS.items():
        sub = subparsers.add_parser(name, parents=[common], help=handler.__doc__)
        if name == "green":
            sub.add_argument("--points", type=int, nargs="+", help="Узлы x₁…x_n")
    return parser


def collect_overrides(args: argparse.Namespace) -> Dict[str, Any]:
    """Значения флагов, заданных явно, в ключах конфигурации"""
    return {
        key: getattr(args, flag)
        for flag, key in FLAG_KEYS.items()
        if getattr(args, flag, None) is not None
    }


def main(argv: Optional[List[str]] = None) -> int:
    """
    Точка входа CLI

    Args:
        argv: Аргументы командной строки без имени программы

    Returns:
        0 - все проверки прошли, 1 - проверка не прошла, 2 - ошибка использования или конфигурации
    """
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else EXIT_USAGE

    try:
        config_manager.load(args.config)
        config = config_manager.get_run_config(collect_overrides(args))
    except (FileNotFoundError, ValueError) as e:
        logger.error(f"Ошибка конфигурации: {e}")
        return EXIT_USAGE

    logger.info(f"Команда {args.command} запущена")
    try:
        suites, results = COMMANDS[args.command](config)
    except (PropagatorError, VacuumAmplitudeError) as e:
        logger.error(f"Команда {args.command} не выполнена: {e}")
        return EXIT_FAILURE
    except (ValueError, QuadratureError) as e:
        logger.error(f"Некорректные параметры {args.command}: {e}")
        return EXIT_USAGE

    document = build_document(args.command, config, suites, results)
    try:
        write_report(render(document, suites, config.format), config.output)
    except OSError as e:
        logger.error(f"Не удалось записать отчет: {e}")
        return EXIT_USAGE

    for suite in suites:
        for message in suite.warnings:
            logger.warning(f"{suite.suite}: {message}")
        failure = suite.first_failure
        if failure is not None:
            logger.error(f"{suite.suite}: первый непрошедший случай {failure}")

    if not document["passed"]:
        return EXIT_FAILURE
    logger.info(f"Команда {args.command}: все проверки прошли")
    return EXIT_OK
