#!/usr/bin/env python3
"""
Diophantine module for nilcohom
Frequency vectors of flow directions and finite-range certification of the
Diophantine condition |<M, Omega>| >= K / |M|^(n-1+tau) with |M| the max-norm.
"""

import logging
from dataclasses import dataclass, field
from math import gcd
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np
import sympy as sp
from tqdm import tqdm

from modules.algebra_core import NilpotentLieAlgebra, Vector, to_exact
from modules.constants import (
    DEFAULT_COLLAPSE_RATIO,
    MAX_SCAN_POINTS,
    RELATION_TOL,
    SCAN_BLOCK,
)
from modules.validation import ValidationError

_SPLITTER = 134217729.0  # 2^27 + 1


class RationalRelation(ValidationError):
    """<M, Omega> = 0 exactly for some M in range."""

    def __init__(self, witness: Sequence[int]):
        super().__init__(f"Exact integer relation found: M = {list(witness)}")
        self.witness = list(witness)


def frequency_vector(algebra: NilpotentLieAlgebra, x: Vector) -> List[sp.Expr]:
    """Omega_X: the first-layer Malcev coordinates of X."""
    return [sp.sympify(x[i]) for i in algebra.layer_indices(1)]


def _split(value: sp.Expr) -> Tuple[float, float]:
    """Double-double (hi, lo) from a 40-digit evaluation."""
    precise = sp.N(value, 40)
    hi = float(precise)
    lo = float(precise - sp.Float(hi, 40))
    return hi, lo


def _two_sum(a: np.ndarray, b: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    s = a + b
    bb = s - a
    return s, (a - (s - bb)) + (b - bb)


def _two_prod(a: np.ndarray, b: float) -> Tuple[np.ndarray, np.ndarray]:
    p = a * b
    c = _SPLITTER * a
    a_hi = c - (c - a)
    a_lo = a - a_hi
    d = _SPLITTER * b
    b_hi = d - (d - b)
    b_lo = b - b_hi
    err = ((a_hi * b_hi - p) + a_hi * b_lo + a_lo * b_hi) + a_lo * b_lo
    return p, err


def dd_dot(rows: np.ndarray, hi: np.ndarray, lo: np.ndarray) -> np.ndarray:
    """sum_j rows[j] * (hi[j] + lo[j]) with compensated accumulation; rows hold integers."""
    total = np.zeros(rows.shape[1])
    carry = np.zeros(rows.shape[1])
    for j in range(rows.shape[0]):
        p, e = _two_prod(rows[j], hi[j])
        e = e + rows[j] * lo[j]
        total, t = _two_sum(total, p)
        carry += t + e
    return total + carry


def _normalize_witness(m: Sequence[int]) -> List[int]:
    m = [int(v) for v in m]
    for v in m:
        if v != 0:
            return m if v > 0 else [-x for x in m]
    return m


def _exact_relation(omega: Sequence[sp.Expr], m: Sequence[int]) -> bool:
    return sp.simplify(sum(int(mi) * w for mi, w in zip(m, omega))) == 0


@dataclass
class DiophantineReport:
    """Finite-range measurement of the Diophantine constant."""
    omega: List[sp.Expr]
    tau: float
    m_max: int
    k_best: float
    witness: Optional[List[int]]
    irrational_flag: bool
    shells: np.ndarray = field(default_factory=lambda: np.zeros(0))
    collapse_shell: Optional[int] = None
    convergents: List[Tuple[int, int]] = field(default_factory=list)
    convergent_agreement: Optional[bool] = None
    k_asymptotic: Optional[float] = None

    @property
    def exponent(self) -> float:
        return len(self.omega) - 1 + self.tau

    def shell_rows(self) -> List[Tuple[int, float]]:
        return [(r, float(v)) for r, v in enumerate(self.shells, start=1) if np.isfinite(v)]

    def to_report(self) -> Dict[str, Any]:
        return {
            "omega": [str(w) for w in self.omega],
            "omega_values": [float(sp.N(w, 30)) for w in self.omega],
            "tau": self.tau,
            "M_max": self.m_max,
            "K_best": self.k_best,
            "witness": self.witness,
            "irrational_in_range": self.irrational_flag,
            "collapse_shell": self.collapse_shell,
            "convergents": [f"{p}/{q}" for p, q in self.convergents],
            "convergent_agreement": self.convergent_agreement,
            "K_asymptotic": self.k_asymptotic,
        }


def _rational_relation(omega: Sequence[sp.Expr], m_max: int) -> Optional[List[int]]:
    """Exact n=2 relation (a2, -a1)/g for rational inputs, if in range."""
    if len(omega) != 2 or not all(w.is_rational for w in omega):
        return None
    lcm = sp.ilcm(*[sp.Rational(w).q for w in omega])
    a1, a2 = (int(w * lcm) for w in omega)
    if a1 == 0 and a2 == 0:
        return [1, 0]
    g = gcd(a1, a2)
    relation = [a2 // g, -a1 // g]
    if max(abs(v) for v in relation) <= m_max:
        return _normalize_witness(relation)
    return None


def _scan_budget(n: int, m_max: int, solved: int) -> int:
    if n < 2:
        return m_max
    points = solved * (2 * m_max + 1) ** (n - 1)
    if points <= MAX_SCAN_POINTS:
        return m_max
    reduced = int(((MAX_SCAN_POINTS / solved) ** (1.0 / (n - 1)) - 1) // 2)
    logging.warning(
        f"Diophantine scan for n={n} truncated from M_max={m_max} to {reduced} "
        f"({MAX_SCAN_POINTS} point budget)"
    )
    return max(reduced, 1)


def _scan(
    omega: Sequence[sp.Expr], tau: float, m_max: int
) -> Tuple[np.ndarray, Optional[List[int]], Optional[List[int]], float]:
    """
    Per-shell minima of |<M, Omega>| |M|^(n-1+tau) over 0 < |M| <= m_max.

    For each solved coordinate i and each choice of the other coordinates M'
    with r' = |M'|, the optimum over M_i lies among floor/ceil of the target,
    of the target clipped to [-r', r'], and +-(r'+1) on the target's side.
    Two solved coordinates (largest |omega_i|) make every shell minimum exact.
    """
    n = len(omega)
    split = [_split(w) for w in omega]
    hi = np.array([s[0] for s in split])
    lo = np.array([s[1] for s in split])
    magnitude = np.abs(hi)
    exponent = n - 1 + tau
    order = [i for i in np.argsort(-magnitude, kind="stable") if magnitude[i] > 0]
    solved_coords = order[:2] if n >= 2 else order[:1]

    shells = np.full(m_max + 1, np.inf)
    best_value, best_m = np.inf, None
    relation: Optional[List[int]] = None
    if not solved_coords:
        return shells[1:], None, [1] + [0] * (n - 1), 0.0

    for pivot in solved_coords:
        others = [j for j in range(n) if j != pivot]
        side = 2 * m_max + 1
        total = side ** len(others)
        blocks = range(0, total, SCAN_BLOCK)
        for start in tqdm(blocks, desc="Diophantine scan", unit="block", disable=len(blocks) < 64):
            idx = np.arange(start, min(start + SCAN_BLOCK, total))
            if others:
                free = np.array(np.unravel_index(idx, (side,) * len(others)), dtype=float) - m_max
                r_prime = np.abs(free).max(axis=0)
                partial = dd_dot(free, hi[others], lo[others])
            else:
                free = np.zeros((0, len(idx)))
                r_prime = np.zeros(len(idx))
                partial = np.zeros(len(idx))
            target = -partial / hi[pivot]
            clipped = np.clip(target, -r_prime, r_prime)
            outer = np.where(target >= 0, r_prime + 1, -(r_prime + 1))
            candidates = np.stack(
                [np.floor(target), np.ceil(target), np.floor(clipped), np.ceil(clipped), outer]
            )
            candidates = np.clip(candidates, -m_max, m_max)

            for row in candidates:
                full = np.zeros((n, len(idx)))
                full[others] = free
                full[pivot] = row
                r = np.maximum(r_prime, np.abs(row)).astype(int)
                keep = r > 0
                if not keep.any():
                    continue
                full, r = full[:, keep], r[keep]
                dot = np.abs(dd_dot(full, hi, lo))
                scale = np.abs(full).T @ magnitude
                suspicious = np.nonzero(dot <= RELATION_TOL * scale)[0]
                for s in suspicious:
                    if relation is not None and r[s] >= max(map(abs, relation)):
                        continue
                    m = _normalize_witness(full[:, s])
                    if _exact_relation(omega, m):
                        relation = m
                values = dot * r.astype(float) ** exponent
                np.minimum.at(shells, r, values)
                k = int(np.argmin(values))
                if values[k] < best_value:
                    best_value = float(values[k])
                    best_m = _normalize_witness(full[:, k])
    return shells[1:], best_m, relation, best_value


def _collapse_shell(shells: np.ndarray, ratio: float) -> Optional[int]:
    running = np.inf
    for r, value in enumerate(shells, start=1):
        if np.isfinite(running) and value < ratio * running:
            return r
        running = min(running, value)
    return None


def continued_fraction_convergents(alpha: sp.Expr, q_max: int) -> List[Tuple[int, int]]:
    """Convergents p/q of alpha with q <= q_max."""
    result = []
    terms = sp.continued_fraction_iterator(alpha)
    for convergent in sp.continued_fraction_convergents(terms):
        convergent = sp.Rational(convergent)
        if convergent.q > q_max or len(result) > 200:
            break
        result.append((int(convergent.p), int(convergent.q)))
    return result


def _convergent_check(
    omega: Sequence[sp.Expr], tau: float, m_max: int, witness: Optional[List[int]]
) -> Tuple[List[Tuple[int, int]], Optional[bool], Optional[float]]:
    w1, w2 = omega
    if w1 == 0:
        return [], None, None
    convergents = continued_fraction_convergents(sp.simplify(w2 / w1), m_max)
    agreement = None
    if witness is not None:
        agreement = any(
            _normalize_witness([-p, q]) == witness for p, q in convergents
        )
    tail = convergents[len(convergents) // 2:]
    asymptotic = None
    if tail:
        w1f, w2f = float(sp.N(w1, 30)), float(sp.N(w2, 30))
        asymptotic = min(abs(q * w2f - p * w1f) * q ** (1 + tau) for p, q in tail if q > 0)
    return convergents, agreement, asymptotic


def certify(
    omega: Sequence, tau: float, m_max: int, collapse_ratio: float = DEFAULT_COLLAPSE_RATIO
) -> DiophantineReport:
    """
    K_best = min over 0 < |M| <= m_max of |<M, Omega>| |M|^(n-1+tau).

    Raises:
        RationalRelation: an exact integer relation lies in range
    """
    if m_max < 1:
        raise ValidationError("M_max must be >= 1")
    if tau < 0:
        raise ValidationError("tau must be >= 0")
    omega = [to_exact(w) for w in omega]
    n = len(omega)

    relation = _rational_relation(omega, m_max)
    if relation is not None:
        raise RationalRelation(relation)

    effective = _scan_budget(n, m_max, min(n, 2))
    shells, best_m, relation, k_best = _scan(omega, tau, effective)
    if relation is not None:
        raise RationalRelation(relation)

    report = DiophantineReport(
        omega=omega,
        tau=tau,
        m_max=effective,
        k_best=k_best,
        witness=best_m,
        irrational_flag=True,
        shells=shells,
        collapse_shell=_collapse_shell(shells, collapse_ratio),
    )
    if n == 2:
        report.convergents, report.convergent_agreement, report.k_asymptotic = _convergent_check(
            omega, tau, effective, best_m
        )
    logging.info(
        f"Diophantine scan: K_best={k_best:.6g} at M={best_m}, collapse shell {report.collapse_shell}"
    )
    return report


def is_irrational_in_range(omega: Sequence, m_max: int) -> Tuple[bool, Optional[List[int]]]:
    """False with a witness iff <M, Omega> = 0 exactly for some 0 < |M| <= m_max."""
    try:
        certify(omega, 0.0, m_max)
    except RationalRelation as e:
        return False, e.witness
    return True, None
