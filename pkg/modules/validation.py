#!/usr/bin/env python3
"""
Validation module for nilcohom
Provides runtime validation of algebra definitions and run configurations using
dataclasses and type hints.
"""

import logging
import os
from dataclasses import asdict, dataclass, field, fields
from fractions import Fraction
from pathlib import Path
from typing import Any, Dict, List, Optional

from modules.constants import (
    DEFAULT_ALPHA,
    DEFAULT_BETA,
    DEFAULT_DT,
    DEFAULT_ESTIMATE_SLACK,
    DEFAULT_GRID_L,
    DEFAULT_GRID_N,
    DEFAULT_HERMITE_MODES,
    DEFAULT_M_MAX,
    DEFAULT_NYQUIST_TOL,
    DEFAULT_T,
    DEFAULT_TAIL_TOL,
    DEFAULT_TAU,
    DEFAULT_ZERO_TOL_REL,
    OUTPUT_DIR,
)


class ValidationError(Exception):
    """Invalid user input, or data outside the domain of a routine."""
    pass


class InternalError(Exception):
    """A constructed object failed its own consistency check (a bug, not bad input)."""
    pass


SUBCOMMANDS = ("analyze", "orbit", "adapt", "solve", "diophantine", "simulate")
MODES = ("grid", "hermite")


def parse_rational(text: Any) -> Fraction:
    """Parse an exact rational given as int or 'p/q' string."""
    if isinstance(text, bool):
        raise ValidationError(f"Invalid rational: {text!r}")
    if isinstance(text, int):
        return Fraction(text)
    try:
        return Fraction(str(text).strip())
    except (ValueError, ZeroDivisionError):
        raise ValidationError(f"Invalid rational: {text!r}")


@dataclass
class BracketEntry:
    """One structure constant c_{ij}^l, stored 0-indexed."""
    i: int
    j: int
    l: int
    value: Fraction

    @classmethod
    def from_list(cls, entry: List[Any], dim: int) -> "BracketEntry":
        if len(entry) != 4:
            raise ValidationError(f"Bracket entry must be [i, j, l, p/q]: {entry}")
        i, j, l = entry[:3]
        for idx in (i, j, l):
            if not isinstance(idx, int) or not 1 <= idx <= dim:
                raise ValidationError(f"Bracket index {idx} out of range 1..{dim}")
        if i == j:
            raise ValidationError(f"Bracket entry [E{i},E{j}] must have i != j")
        return cls(i - 1, j - 1, l - 1, parse_rational(entry[3]))


@dataclass
class AlgebraDefinition:
    """Validated algebra definition file."""
    dim: int
    step: int
    layers: List[int]
    brackets: List[BracketEntry] = field(default_factory=list)
    name: str = "algebra"
    labels: Optional[List[str]] = None

    def __post_init__(self):
        if not isinstance(self.dim, int) or self.dim < 1:
            raise ValidationError("dim must be a positive integer")
        if not isinstance(self.step, int) or self.step < 1:
            raise ValidationError("step must be a positive integer")
        if len(self.layers) != self.step or any(n < 1 for n in self.layers):
            raise ValidationError(
                f"layers must list {self.step} positive layer sizes, got {self.layers}"
            )
        if sum(self.layers) != self.dim:
            raise ValidationError(
                f"layer sizes {self.layers} do not add up to dim {self.dim}"
            )
        if self.labels is not None and len(self.labels) != self.dim:
            raise ValidationError("labels must have one entry per basis vector")

        seen = {}
        for entry in self.brackets:
            key = (entry.i, entry.j, entry.l)
            if key in seen and seen[key] != entry.value:
                raise ValidationError(f"Conflicting entries for c_{key}")
            seen[key] = entry.value


@dataclass
class RunConfig:
    """Validated run configuration for one CLI invocation."""
    subcommand: str
    algebra_path: Optional[str] = None
    lambda_form: Optional[str] = None
    x_vector: Optional[str] = None
    f_recipe: Optional[str] = None
    omega: Optional[str] = None
    observable: Optional[str] = None
    x0: Optional[str] = None
    alpha: float = DEFAULT_ALPHA
    beta: float = DEFAULT_BETA
    part: int = 1
    grid_n: int = DEFAULT_GRID_N
    grid_l: float = DEFAULT_GRID_L
    mode: str = "grid"
    hermite_modes: int = DEFAULT_HERMITE_MODES
    tau: float = DEFAULT_TAU
    m_max: int = DEFAULT_M_MAX
    t_values: List[float] = field(default_factory=lambda: [DEFAULT_T])
    dt: float = DEFAULT_DT
    tail_tol: float = DEFAULT_TAIL_TOL
    nyquist_tol: float = DEFAULT_NYQUIST_TOL
    zero_tol_rel: float = DEFAULT_ZERO_TOL_REL
    estimate_slack: float = DEFAULT_ESTIMATE_SLACK
    out_dir: str = OUTPUT_DIR
    json_output: bool = False
    precision: int = 17
    seed: Optional[int] = None

    def __post_init__(self):
        if self.subcommand not in SUBCOMMANDS:
            raise ValidationError(f"Unknown subcommand: {self.subcommand}")
        if self.mode not in MODES:
            raise ValidationError(f"mode must be one of {MODES}")
        if self.part not in (1, 2):
            raise ValidationError("part must be 1 or 2")

        for name in ("tail_tol", "nyquist_tol", "zero_tol_rel", "estimate_slack", "dt"):
            value = getattr(self, name)
            if not isinstance(value, (int, float)) or value <= 0:
                raise ValidationError(f"{name} must be positive, got {value}")

        if self.grid_n < 16 or self.grid_n % 2:
            raise ValidationError("grid_n must be an even integer >= 16")
        if self.grid_l <= 0:
            raise ValidationError("grid_l must be positive")
        if self.hermite_modes < 1:
            raise ValidationError("hermite_modes must be >= 1")
        if self.m_max < 1:
            raise ValidationError("m_max must be >= 1")
        if self.tau < 0:
            raise ValidationError("tau must be >= 0")
        if not self.t_values or any(t <= 0 for t in self.t_values):
            raise ValidationError("t_values must be a non-empty list of positive times")
        if not 1 <= self.precision <= 40:
            raise ValidationError("precision must be between 1 and 40 digits")

        out = Path(self.out_dir)
        try:
            out.mkdir(parents=True, exist_ok=True)
        except OSError as e:
            raise ValidationError(f"Output directory {out} not creatable: {e}")
        if not os.access(out, os.W_OK):
            raise ValidationError(f"Output directory {out} is not writable")

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "RunConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ValidationError(f"Unknown run configuration keys: {sorted(unknown)}")
        return cls(**data)


class ConfigurationValidator:
    """Turns raw algebra files and merged run settings into validated dataclasses.

    Bracket-entry problems are collected in ``errors`` and reported together.
    """

    def __init__(self):
        self.errors: List[str] = []

    def validate_algebra(self, algebra_dict: Dict[str, Any]) -> AlgebraDefinition:
        """
        Validate and convert an algebra dictionary to a validated dataclass.

        Args:
            algebra_dict: Raw algebra definition (parsed .alg file)

        Returns:
            Validated AlgebraDefinition instance

        Raises:
            ValidationError: If validation fails
        """
        self.errors = []

        try:
            dim = algebra_dict["dim"]
            entries = []
            for entry in algebra_dict.get("brackets", []):
                try:
                    entries.append(BracketEntry.from_list(entry, dim))
                except ValidationError as e:
                    self.errors.append(str(e))

            if self.errors:
                raise ValidationError(f"Algebra validation failed: {self.errors}")

            definition = AlgebraDefinition(
                dim=dim,
                step=algebra_dict["step"],
                layers=list(algebra_dict["layers"]),
                brackets=entries,
                name=algebra_dict.get("name", "algebra"),
                labels=algebra_dict.get("labels"),
            )
            logging.debug(f"Algebra definition '{definition.name}' validated")
            return definition

        except KeyError as e:
            raise ValidationError(f"Missing required algebra field: {e}")
        except ValidationError:
            raise
        except Exception as e:
            raise ValidationError(f"Algebra validation error: {e}")

    def validate_run_config(self, config_dict: Dict[str, Any]) -> RunConfig:
        """Validate and convert a run-configuration dictionary."""
        try:
            config = RunConfig.from_dict(config_dict)
            logging.debug("Run configuration validation successful")
            return config
        except ValidationError:
            raise
        except TypeError as e:
            raise ValidationError(f"Run configuration error: {e}")
