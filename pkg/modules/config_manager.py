#!/usr/bin/env python3
"""
Configuration manager module for nilcohom
Handles loading and validating algebra definition files and run configurations.
"""

import json
import logging
from functools import lru_cache
from pathlib import Path
from typing import Any, Dict, Optional, Union

from jsonschema import ValidationError as SchemaError
from jsonschema import validate

from modules.algebra_core import NilpotentLieAlgebra
from modules.constants import ALGEBRA_SCHEMA, CONFIG_SCHEMA
from modules.resource_manager import resource_manager, retry_on_io_error
from modules.validation import ConfigurationValidator, RunConfig, ValidationError

PROJECT_ROOT = Path(__file__).resolve().parent.parent
ALGEBRA_DIR = PROJECT_ROOT / "algebras"


class ConfigManager:
    """Loads algebra files and run configurations with schema validation."""

    def __init__(self, config_file: Optional[str] = None):
        """
        Initialize configuration manager.

        Args:
            config_file: Optional JSON run-configuration file
        """
        self.config_file = self._sanitize_path(config_file) if config_file else None
        self.validator = ConfigurationValidator()
        self.raw_config: Dict[str, Any] = {}

    def load_run_config(self, overrides: Optional[Dict[str, Any]] = None) -> RunConfig:
        """
        Merge the optional config file with command-line overrides and validate.

        Args:
            overrides: Values given on the command line; None entries are ignored

        Returns:
            RunConfig: Validated run configuration

        Raises:
            FileNotFoundError: If the config file is missing
            ValidationError: If the file or merged values are invalid
        """
        data: Dict[str, Any] = {}
        if self.config_file is not None:
            data = self._load_json(self.config_file, PROJECT_ROOT / CONFIG_SCHEMA)
        self.raw_config = dict(data)
        for key, value in (overrides or {}).items():
            if value is not None:
                data[key] = value
        config = self.validator.validate_run_config(data)
        logging.debug(f"Run configuration resolved for '{config.subcommand}'")
        return config

    def load_algebra(self, path: Union[str, Path]) -> NilpotentLieAlgebra:
        """
        Load an algebra file; bare names resolve to the bundled ``algebras/`` files.

        Raises:
            FileNotFoundError: If no such file exists
            ValidationError: If the file violates the schema or the algebra axioms
        """
        path = self._resolve_algebra_path(path)
        raw = self._load_json(path, PROJECT_ROOT / ALGEBRA_SCHEMA)
        definition = self.validator.validate_algebra(raw)
        algebra = NilpotentLieAlgebra.from_definition(definition)
        logging.info(f"Loaded algebra '{algebra.name}' (dim {algebra.dim}, step {algebra.step})")
        return algebra

    def _resolve_algebra_path(self, path: Union[str, Path]) -> Path:
        candidate = self._sanitize_path(path)
        if candidate.exists():
            return candidate
        for bundled in (ALGEBRA_DIR / str(path), ALGEBRA_DIR / f"{path}.alg"):
            if bundled.exists():
                return bundled
        raise FileNotFoundError(f"File not found: {path}")

    @retry_on_io_error(max_retries=3, base_delay=0.5)
    def _load_json(self, file_path: Union[str, Path], schema_path: Optional[Path] = None) -> Dict:
        """
        Read a JSON input (.alg or run config) and check it against ``schema_path`` when given.

        Raises:
            FileNotFoundError: missing input, never retried
            ValidationError: malformed JSON or a schema violation
        """
        safe_path = self._sanitize_path(file_path)
        try:
            with resource_manager.safe_file_operation(safe_path, "r") as file:
                data = json.load(file)
        except FileNotFoundError:
            raise FileNotFoundError(f"File not found: {safe_path}")
        except json.JSONDecodeError as e:
            raise ValidationError(f"Invalid JSON in {safe_path}: {e}")
        if schema_path:
            self._validate_json_with_schema(data, schema_path)
        return data

    def _validate_json_with_schema(self, data: Dict, schema_path: Path) -> None:
        try:
            with resource_manager.safe_file_operation(schema_path, "r") as schema_file:
                schema = json.load(schema_file)
        except FileNotFoundError:
            logging.warning(f"Schema file not found: {schema_path}. Skipping validation.")
            return
        try:
            validate(instance=data, schema=schema)
            logging.debug(f"Successfully validated JSON against {schema_path.name}")
        except SchemaError as e:
            location = "/".join(str(p) for p in e.path)
            raise ValidationError(f"Schema error in {schema_path.name}: {e.message} at '{location}'")

    def _sanitize_path(self, path: Union[str, Path]) -> Path:
        """
        Reject path traversal and resolve to an absolute path.

        Raises:
            ValidationError: If the path contains '..'
        """
        path_obj = Path(path)
        if ".." in path_obj.parts:
            raise ValidationError(f"Invalid path: {path}")
        return path_obj.resolve()


def load_algebra(path: Union[str, Path]) -> NilpotentLieAlgebra:
    return ConfigManager().load_algebra(path)


@lru_cache(maxsize=8)
def builtin_algebra(name: str) -> NilpotentLieAlgebra:
    """One of the bundled algebras: heisenberg, filiform4, abelian2, heisenberg_r."""
    return load_algebra(ALGEBRA_DIR / f"{name}.alg")
