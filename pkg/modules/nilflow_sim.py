#!/usr/bin/env python3
"""
Nilflow simulator for nilcohom
Right translation by exp(tX) on Gamma \\ N in second-kind Malcev coordinates,
with Birkhoff averages of torus-character and coboundary observables.
"""

import logging
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

from modules.algebra_core import NilpotentLieAlgebra, VectorLike, vector_to_float
from modules.constants import NYQUIST_FRACTION
from modules.validation import ValidationError

TWO_PI = 2.0 * np.pi


class UnderResolved(ValidationError):
    """Time step too coarse for the observable's frequencies."""
    pass


@dataclass(frozen=True, eq=False)
class NilPoint:
    """Point Gamma x with x = exp(x_1 E_1) ... exp(x_d E_d), coordinates reduced to [0, 1)."""
    algebra: NilpotentLieAlgebra
    coords: np.ndarray

    @classmethod
    def identity(cls, algebra: NilpotentLieAlgebra) -> "NilPoint":
        return cls(algebra, np.zeros(algebra.dim))

    @classmethod
    def from_coords(cls, algebra: NilpotentLieAlgebra, coords: Sequence[float]) -> "NilPoint":
        return cls(algebra, reduce_mod_lattice(algebra, np.asarray(coords, dtype=float)))

    @property
    def torus(self) -> np.ndarray:
        """Projection to the abelianised torus (first-layer coordinates)."""
        return self.coords[: self.algebra.generator_count]


def reduce_mod_lattice(algebra: NilpotentLieAlgebra, coords: np.ndarray) -> np.ndarray:
    """
    Left-multiply by exp(-floor(x_i) E_i) for i = 1..d in order. Each factor
    changes coordinate i and deeper ones only, so earlier coordinates stay in [0, 1).
    """
    coords = np.array(coords, dtype=float)
    for i in range(algebra.dim):
        shift = np.floor(coords[i])
        if shift == 0.0:
            continue
        step = np.zeros(algebra.dim)
        step[i] = -shift
        log = algebra.bch_multiply(step, algebra.from_second_kind(coords))
        coords = algebra.to_second_kind(log)
        coords[i] = coords[i] - np.floor(coords[i])
    return coords


def _translate(algebra: NilpotentLieAlgebra, coords: np.ndarray, x: np.ndarray, t: float) -> np.ndarray:
    log = algebra.bch_multiply(algebra.from_second_kind(coords), t * x)
    return algebra.to_second_kind(log)


def flow_step(point: NilPoint, x: VectorLike, t: float) -> NilPoint:
    """phi_X^t(Gamma x) = Gamma x exp(tX)."""
    algebra = point.algebra
    moved = _translate(algebra, point.coords, vector_to_float(x), t)
    return NilPoint(algebra, reduce_mod_lattice(algebra, moved))


def flow_jacobian_det(point: NilPoint, x: VectorLike, t: float, eps: float = 1e-5) -> float:
    """Determinant of the coordinate Jacobian of the unreduced flow map (Haar proxy)."""
    algebra = point.algebra
    xv = vector_to_float(x)
    jac = np.zeros((algebra.dim, algebra.dim))
    for j in range(algebra.dim):
        h = np.zeros(algebra.dim)
        h[j] = eps
        plus = _translate(algebra, point.coords + h, xv, t)
        minus = _translate(algebra, point.coords - h, xv, t)
        jac[:, j] = (plus - minus) / (2 * eps)
    return float(np.linalg.det(jac))


@dataclass(frozen=True)
class Observable:
    """
    ``constant`` (1), ``character`` chi_M o p, or ``coboundary`` X u with
    u = sum c_M chi_M o p. ``modes`` holds (M, c_M).
    """
    kind: str
    modes: Tuple[Tuple[Tuple[int, ...], complex], ...] = field(default_factory=tuple)

    def __post_init__(self):
        if self.kind not in ("constant", "character", "coboundary"):
            raise ValidationError(f"Unknown observable kind: {self.kind}")
        if self.kind == "character" and len(self.modes) != 1:
            raise ValidationError("character observable needs exactly one M")
        if self.kind == "coboundary" and not self.modes:
            raise ValidationError("coboundary observable needs at least one mode")

    @classmethod
    def parse(cls, text: str, generators: int) -> "Observable":
        """``const``, ``char:1,-1`` or ``cob:1,-1;0.5*2,0``."""
        text = text.strip()
        if text == "const":
            return cls("constant")
        kind, _, body = text.partition(":")
        kinds = {"char": "character", "cob": "coboundary"}
        if kind not in kinds or not body:
            raise ValidationError(f"Invalid observable: {text!r}")
        modes = []
        for item in body.split(";"):
            coef, _, m_text = item.rpartition("*")
            try:
                m = tuple(int(v) for v in m_text.split(","))
                c = complex(coef) if coef else 1.0
            except ValueError:
                raise ValidationError(f"Invalid observable mode: {item!r}")
            if len(m) != generators:
                raise ValidationError(f"Mode {m} needs {generators} entries")
            modes.append((m, c))
        return cls(kinds[kind], tuple(modes))

    @property
    def sup_bound(self) -> float:
        """sup |u| <= sum |c_M| for the coboundary primitive."""
        return float(sum(abs(c) for _, c in self.modes))

    def frequencies(self, omega: np.ndarray) -> np.ndarray:
        return np.array([np.dot(m, omega) for m, _ in self.modes])

    def primitive(self, torus: np.ndarray) -> complex:
        """u(p(x)) for coboundary observables."""
        return complex(sum(c * np.exp(1j * TWO_PI * np.dot(m, torus)) for m, c in self.modes))


def _step_integral(nu: np.ndarray, dt: float) -> np.ndarray:
    """int_0^dt exp(2 pi i nu s) ds."""
    small = np.abs(nu) * dt < 1e-12
    safe = np.where(small, 1.0, nu)
    exact = (np.exp(1j * TWO_PI * safe * dt) - 1.0) / (1j * TWO_PI * safe)
    return np.where(small, dt + 0j, exact)


def birkhoff_series(
    x0: NilPoint, x: VectorLike, obs: Observable, t_values: Sequence[float], dt: float
) -> List[complex]:
    """
    (1/T) int_0^T obs(phi^t x0) dt for each T, integrating exactly in t on every
    step from the simulated orbit point.
    """
    algebra = x0.algebra
    xv = vector_to_float(x)
    omega = xv[: algebra.generator_count]
    if obs.kind == "constant":
        return [1.0 + 0j for _ in t_values]
    nu = obs.frequencies(omega)
    if np.abs(nu).max() * dt > NYQUIST_FRACTION:
        raise UnderResolved(
            f"max |<M,Omega>| dt = {np.abs(nu).max() * dt:.3g} exceeds {NYQUIST_FRACTION}"
        )
    weights = np.array([c for _, c in obs.modes])
    if obs.kind == "coboundary":
        weights = weights * 1j * TWO_PI * nu
    modes = np.array([m for m, _ in obs.modes], dtype=float)

    targets = sorted(t_values)
    results: Dict[float, complex] = {}
    point = x0
    elapsed = 0.0
    accumulated = 0j
    for target in targets:
        while elapsed < target:
            h = min(dt, target - elapsed)
            phases = np.exp(1j * TWO_PI * (modes @ point.torus))
            accumulated += complex(np.sum(weights * phases * _step_integral(nu, h)))
            point = flow_step(point, xv, h)
            elapsed += h
            if target - elapsed < 1e-12 * max(1.0, target):
                elapsed = target
        results[target] = accumulated / target
    return [results[t] for t in t_values]


def birkhoff_average(x0: NilPoint, x: VectorLike, obs: Observable, t_total: float, dt: float) -> complex:
    if t_total <= 0:
        raise ValidationError("T must be positive")
    return birkhoff_series(x0, x, obs, [t_total], dt)[0]


def character_closed_form(nu: float, t_total: float) -> Tuple[float, float]:
    """(|sin(pi nu T) / (pi nu T)|, 1 / (pi T |nu|)) for a character of frequency nu."""
    if nu == 0:
        return 1.0, float("inf")
    arg = np.pi * nu * t_total
    return abs(np.sin(arg) / arg), 1.0 / (np.pi * t_total * abs(nu))


def equidistribution_report(
    x0: NilPoint, x: VectorLike, m_list: Sequence[Sequence[int]], t_values: Sequence[float], dt: float
) -> List[Dict[str, Any]]:
    """Measured |average| of chi_M along the orbit against the closed form and its bound."""
    xv = vector_to_float(x)
    omega = xv[: x0.algebra.generator_count]
    rows = []
    for m in m_list:
        if not any(m):
            logging.debug("Skipping M = 0 (constant character)")
            continue
        obs = Observable("character", ((tuple(int(v) for v in m), 1.0),))
        nu = float(np.dot(m, omega))
        averages = birkhoff_series(x0, xv, obs, t_values, dt)
        for t_total, avg in zip(t_values, averages):
            closed, bound = character_closed_form(nu, t_total)
            resonant = abs(nu) < 1e-15
            rows.append({
                "M": list(m),
                "T": t_total,
                "frequency": nu,
                "measured": abs(avg),
                "closed_form": closed,
                "bound": bound,
                "resonant": resonant,
                "passed": (not resonant) and abs(avg) <= bound + 1e-10,
            })
    return rows
