# src/config/manager.py
import yaml
import os
from typing import Dict, Any, Optional
from pydantic import ValidationError
from src.logger.config import setup_logger
from src.models.run_config import RunConfig

logger = setup_logger(__name__)


class ConfigManager:
    """Централизованный менеджер конфигурации запусков с кешированием"""

    _instance: Optional['ConfigManager'] = None
    _config: Optional[Dict[str, Any]] = None

    def __new__(cls) -> 'ConfigManager':
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def load(self, config_path: Optional[str]) -> Dict[str, Any]:
        """
        Загружает конфигурацию из файла

        Args:
            config_path: Путь к YAML (.yaml/.yml) или текстовому файлу формата key = value.
                         None означает запуск на значениях по умолчанию.

        Returns:
            Словарь сырых значений из файла
        """
        if config_path is None:
            self._config = {}
            return self._config

        if not os.path.exists(config_path):
            raise FileNotFoundError(f"Файл конфигурации {config_path} не найден")

        try:
            with open(config_path, 'r', encoding='utf-8') as file:
                text = file.read()
        except OSError as e:
            raise ValueError(f"Ошибка чтения конфигурации {config_path}: {e}")

        if config_path.endswith(('.yaml', '.yml')):
            try:
                data = yaml.safe_load(text) or {}
            except yaml.YAMLError as e:
                raise ValueError(f"Ошибка парсинга YAML файла: {e}")
            if not isinstance(data, dict):
                raise ValueError(f"Корень {config_path} должен быть словарем")
        else:
            data = self.parse_plain_text(text)

        self._config = data
        logger.info(f"Конфигурация загружена из {config_path}: {len(data)} ключей")
        return data

    @staticmethod
    def parse_plain_text(text: str) -> Dict[str, Any]:
        """
        Разбирает текстовый формат: одна пара key = value на строку

        Пустые строки и комментарии (#) пропускаются. Значение со запятыми
        превращается в список, пустое значение в пустой список.
        """
        data: Dict[str, Any] = {}
        for number, raw_line in enumerate(text.splitlines(), start=1):
            line = raw_line.split('#', 1)[0].strip()
            if not line:
                continue

            if '=' not in line:
                raise ValueError(f"Строка {number}: ожидается 'key = value', получено '{raw_line.strip()}'")

            key, value = (part.strip() for part in line.split('=', 1))
            if not key:
                raise ValueError(f"Строка {number}: пустой ключ")
            if key in data:
                raise ValueError(f"Строка {number}: ключ '{key}' задан повторно")

            if ',' in value:
                data[key] = [item.strip() for item in value.split(',') if item.strip()]
            elif key in ('points', 'source') and value in ('', '[]'):
                data[key] = []
            else:
                data[key] = value
        return data

    @property
    def config(self) -> Dict[str, Any]:
        """Возвращает сырую конфигурацию из последнего загруженного файла"""
        if self._config is None:
            self.load(None)
        return self._config

    @staticmethod
    def _canonical_keys(values: Dict[str, Any]) -> Dict[str, Any]:
        """coupling и lambda - один ключ"""
        result = dict(values)
        if "coupling" in result:
            result["lambda"] = result.pop("coupling")
        return result

    def get_run_config(self, overrides: Optional[Dict[str, Any]] = None) -> RunConfig:
        """
        Возвращает провалидированную конфигурацию запуска

        Args:
            overrides: Значения флагов CLI; побеждают значения из файла

        Returns:
            RunConfig
        """
        values = self._canonical_keys(self.config)
        for key, value in self._canonical_keys(overrides or {}).items():
            if value is not None:
                values[key] = value

        # Одиночное значение для списочного ключа из текстового файла
        for key in ('points', 'source'):
            if isinstance(values.get(key), (str, int, float)):
                values[key] = [values[key]]

        try:
            return RunConfig(**values)
        except ValidationError as e:
            problems = "; ".join(
                f"{'.'.join(str(part) for part in error['loc'])}: {error['msg']}" for error in e.errors()
            )
            raise ValueError(f"Некорректная конфигурация: {problems}")

    def clear_cache(self):
        """Сбрасывает загруженную конфигурацию"""
        self._config = None


# Глобальный экземпляр для использования в приложении
config_manager = ConfigManager()
