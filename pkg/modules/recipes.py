#!/usr/bin/env python3
"""
Recipe module for nilcohom
Parses symbolic data recipes such as ``2*t^2*gaussian(1/2) + dgaussian`` into
vectorised callables on the t-line.
"""

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, List, Tuple

import numpy as np

from modules.validation import ValidationError

_ATOM = re.compile(r"^(gaussian|dgaussian|hermite)(?:\(([^()]*)\))?$|^t\^(\d+)$|^t$")


def hermite_function(n: int, t: np.ndarray) -> np.ndarray:
    """Normalised Hermite function h_n(t) by the stable three-term recurrence."""
    prev = np.pi ** -0.25 * np.exp(-0.5 * t * t)
    if n == 0:
        return prev
    cur = np.sqrt(2.0) * t * prev
    for k in range(2, n + 1):
        prev, cur = cur, np.sqrt(2.0 / k) * t * cur - np.sqrt((k - 1) / k) * prev
    return cur


@dataclass(frozen=True)
class Atom:
    name: str
    param: Fraction

    def __call__(self, t: np.ndarray) -> np.ndarray:
        a = float(self.param)
        if self.name == "gaussian":
            return np.exp(-np.pi * a * t * t)
        if self.name == "dgaussian":
            return -2.0 * np.pi * a * t * np.exp(-np.pi * a * t * t)
        if self.name == "hermite":
            return hermite_function(int(self.param), t)
        return t ** int(self.param)

    @property
    def decays(self) -> bool:
        return self.name != "power"


@dataclass(frozen=True)
class Term:
    coefficient: complex
    atoms: Tuple[Atom, ...]

    def __call__(self, t: np.ndarray) -> np.ndarray:
        value = np.full_like(t, self.coefficient, dtype=complex)
        for atom in self.atoms:
            value = value * atom(t)
        return value


@dataclass(frozen=True)
class Recipe:
    """Finite sum of products of atoms with rational parameters."""
    text: str
    terms: Tuple[Term, ...]

    def __call__(self, t: np.ndarray) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        total = np.zeros_like(t, dtype=complex)
        for term in self.terms:
            total = total + term(t)
        return total

    def as_callable(self) -> Callable[[np.ndarray], np.ndarray]:
        return self.__call__


def _split_top_level(text: str, sep: str) -> List[str]:
    parts, depth, current = [], 0, ""
    for ch in text:
        if ch == sep and depth == 0:
            parts.append(current)
            current = ""
            continue
        depth += (ch == "(") - (ch == ")")
        current += ch
    parts.append(current)
    return parts


def _parse_atom(token: str) -> Atom:
    match = _ATOM.match(token)
    if not match:
        raise ValidationError(f"Unknown recipe atom: {token!r}")
    name, param, power = match.groups()
    if token == "t":
        return Atom("power", Fraction(1))
    if power is not None:
        return Atom("power", Fraction(int(power)))
    try:
        value = Fraction(param) if param else Fraction(1)
    except (ValueError, ZeroDivisionError):
        raise ValidationError(f"Invalid recipe parameter in {token!r}")
    if name == "hermite":
        if value.denominator != 1 or value < 0:
            raise ValidationError(f"hermite(n) needs a non-negative integer, got {param}")
    elif value <= 0:
        raise ValidationError(f"{name}(a) needs a > 0, got {param}")
    return Atom(name, value)


def parse_recipe(text: str) -> Recipe:
    """
    Parse ``term + term + ...`` where a term is ``[coef*]atom[*atom...]`` and an
    atom is ``gaussian(a)``, ``dgaussian(a)``, ``hermite(n)``, ``t`` or ``t^p``.

    Raises:
        ValidationError: On unknown atoms, bad parameters, or data with no decaying factor
    """
    if not text or not text.strip():
        raise ValidationError("Empty recipe")
    normalized = re.sub(r"(?<![eE(*])-", "+-", text.replace(" ", "")).lstrip("+")
    terms = []
    for raw in _split_top_level(normalized, "+"):
        if not raw:
            continue
        factors = _split_top_level(raw, "*")
        coefficient = 1.0
        sign = 1.0
        if factors[0].startswith("-"):
            sign = -1.0
            factors[0] = factors[0][1:]
        atoms = []
        for factor in factors:
            if not factor:
                raise ValidationError(f"Malformed recipe term: {raw!r}")
            try:
                coefficient *= float(Fraction(factor))
                continue
            except (ValueError, ZeroDivisionError):
                pass
            atoms.append(_parse_atom(factor))
        if not any(atom.decays for atom in atoms):
            raise ValidationError(f"Recipe term {raw!r} has no decaying factor")
        terms.append(Term(sign * coefficient, tuple(atoms)))
    return Recipe(text, tuple(terms))
