#!/usr/bin/env python3
"""
Representation solver module for nilcohom
Discretised model of H_pi = L^2(R, H') for an adapted representation: the
operators pi(X) = d/dt and pi(Y) = 2 pi i B(X,Y) t, the Green operator, the
invariant distribution, Sobolev norms and checks of the Green estimates.

Grid mode samples on the periodic window [-L, L) and differentiates spectrally;
hermite mode (standard Heisenberg, X normal to n') stores coefficients in the
eigenbasis of pi(Laplacian).
"""

import logging
import multiprocessing as mp
from dataclasses import dataclass, field, replace
from functools import cached_property, lru_cache
from math import factorial
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
import sympy as sp
from scipy import integrate
from tqdm import tqdm

from modules.adapted_rep import AdaptedRepData
from modules.algebra_core import LatticeData, is_zero_vector
from modules.coadjoint import (
    NotWeaklyIntegral,
    b_form,
    delta_norm,
    is_standard_heisenberg,
    restriction_norm,
    weakly_integral,
)
from modules.constants import (
    DEFAULT_ESTIMATE_SLACK,
    DEFAULT_GRID_L,
    DEFAULT_GRID_N,
    DEFAULT_HERMITE_MODES,
    DEFAULT_NYQUIST_TOL,
    DEFAULT_SCALING_SLACK,
    DEFAULT_TAIL_TOL,
    DEFAULT_ZERO_TOL_REL,
)
from modules.validation import ValidationError

TWO_PI = 2.0 * np.pi
HERMITE_TAIL_MODES = 8


class ResolutionLoss(ValidationError):
    """Spectral content reaches the grid Nyquist band."""
    pass


class TailCheckFailed(ValidationError):
    """Function does not decay at the window edges."""
    pass


class ObstructionNonzero(ValidationError):
    """D(f) exceeds zero_tol where an obstruction-free input is required."""
    pass


class ModeMismatch(ValidationError):
    pass


class NonIntegerMY(NotWeaklyIntegral):
    """M_Y has non-integer entries."""
    pass


class ComponentFailure(ValidationError):
    """A component of a global solve failed."""

    def __init__(self, label: str, cause: Exception):
        super().__init__(f"Component '{label}' failed: {cause}")
        self.label = label
        self.cause = cause


class EstimateViolated(Exception):
    """A measured quantity exceeded its proven bound (a solver bug)."""
    pass


@dataclass(frozen=True)
class SolverSettings:
    grid_n: int = DEFAULT_GRID_N
    grid_l: float = DEFAULT_GRID_L
    hermite_modes: int = DEFAULT_HERMITE_MODES
    tail_tol: float = DEFAULT_TAIL_TOL
    nyquist_tol: float = DEFAULT_NYQUIST_TOL
    zero_tol_rel: float = DEFAULT_ZERO_TOL_REL
    estimate_slack: float = DEFAULT_ESTIMATE_SLACK

    def __post_init__(self):
        if self.grid_n < 16 or self.grid_n % 2:
            raise ValidationError("grid_n must be an even integer >= 16")
        for name in ("grid_l", "tail_tol", "nyquist_tol", "zero_tol_rel", "estimate_slack"):
            if getattr(self, name) <= 0:
                raise ValidationError(f"{name} must be positive")


@dataclass(frozen=True)
class Grid:
    """Uniform periodic nodes t_j = -L + 2Lj/N."""
    n: int
    half_width: float

    @cached_property
    def nodes(self) -> np.ndarray:
        return -self.half_width + 2.0 * self.half_width * np.arange(self.n) / self.n

    @property
    def spacing(self) -> float:
        return 2.0 * self.half_width / self.n

    @cached_property
    def frequencies(self) -> np.ndarray:
        xi = np.fft.fftfreq(self.n, d=self.spacing)
        xi[self.n // 2] = 0.0
        return xi

    @cached_property
    def outer_band(self) -> np.ndarray:
        xi = np.abs(np.fft.fftfreq(self.n, d=self.spacing))
        return xi > 0.75 * xi.max()

    def integrate(self, values: np.ndarray, right_value: complex = 0.0) -> complex:
        """Trapezoid on [-L, L] with the value at +L supplied separately."""
        return self.spacing * (values.sum() - 0.5 * values[0] + 0.5 * right_value)


@lru_cache(maxsize=16)
def _hermite_table(modes: int, scale: float, n: int, half_width: float) -> np.ndarray:
    """psi_k(t_j) = sqrt(s) h_k(s t_j), rows k, normalised recurrence."""
    x = scale * Grid(n, half_width).nodes
    table = np.zeros((modes, n))
    table[0] = np.pi ** -0.25 * np.exp(-0.5 * x * x)
    if modes > 1:
        table[1] = np.sqrt(2.0) * x * table[0]
    for k in range(2, modes):
        table[k] = np.sqrt(2.0 / k) * x * table[k - 1] - np.sqrt((k - 1) / k) * table[k - 2]
    return np.sqrt(scale) * table


@dataclass(frozen=True)
class HermiteBasis:
    """Eigenbasis of pi(Laplacian) for the standard Heisenberg algebra."""
    modes: int
    scale: float
    omega: float
    central: float

    @property
    def eigenvalues(self) -> np.ndarray:
        return self.omega * (2 * np.arange(self.modes) + 1) + self.central

    def table(self, grid: Grid) -> np.ndarray:
        return _hermite_table(self.modes, self.scale, grid.n, grid.half_width)


def heisenberg_laplacian_eigenvalues(m: float, count: int) -> np.ndarray:
    """mu_n = 2 pi |m| (2n+1) + 4 pi^2 m^2 for lambda = m E3*, for any admissible X."""
    n = np.arange(count)
    return TWO_PI * abs(m) * (2 * n + 1) + (TWO_PI * m) ** 2


def hermite_basis_for(rep: AdaptedRepData, modes: int) -> HermiteBasis:
    algebra = rep.algebra
    if not is_standard_heisenberg(algebra):
        raise ModeMismatch("hermite mode needs the standard Heisenberg algebra")
    if not is_zero_vector((rep.x - rep.x_component * rep.u).applyfunc(sp.simplify)):
        raise ModeMismatch("hermite mode needs X normal to n'")
    a = rep.x_component_value
    b = rep.b_value
    lam_z = float(sp.N(rep.central_character(algebra.basis[2]), 30))
    return HermiteBasis(
        modes=modes,
        scale=float(np.sqrt(TWO_PI * abs(b) * abs(a))),
        omega=TWO_PI * abs(b) / abs(a),
        central=(TWO_PI * lam_z) ** 2,
    )


@dataclass(frozen=True, eq=False)
class RepFunction:
    """
    Vector of H_pi with a scalar H'. ``values`` are node samples in grid mode and
    eigenbasis coefficients in hermite mode. ``kind`` is "schwartz" for decaying
    data or "bounded" for Green outputs tending to ``right_limit`` at +L.
    """
    rep: AdaptedRepData
    grid: Grid
    values: np.ndarray
    settings: SolverSettings = field(default_factory=SolverSettings)
    mode: str = "grid"
    kind: str = "schwartz"
    right_limit: complex = 0j
    hermite: Optional[HermiteBasis] = None

    @classmethod
    def from_callable(
        cls,
        rep: AdaptedRepData,
        func: Callable[[np.ndarray], np.ndarray],
        settings: Optional[SolverSettings] = None,
        mode: str = "grid",
    ) -> "RepFunction":
        settings = settings or SolverSettings()
        grid = Grid(settings.grid_n, settings.grid_l)
        samples = np.asarray(func(grid.nodes), dtype=complex)
        f = cls(rep, grid, samples, settings)
        f.check_tails()
        return f.to_hermite() if mode == "hermite" else f

    @property
    def t(self) -> np.ndarray:
        return self.grid.nodes

    @property
    def b(self) -> float:
        return self.rep.b_value

    def _with(self, values: np.ndarray, **changes) -> "RepFunction":
        return replace(self, values=values, **changes)

    def zero_tol(self) -> float:
        return self.settings.zero_tol_rel * self.l2_norm()

    def check_tails(self) -> None:
        if self.mode == "hermite":
            tail = np.linalg.norm(self.values[-HERMITE_TAIL_MODES:])
            if tail > self.settings.tail_tol * max(1.0, np.linalg.norm(self.values)):
                raise TailCheckFailed(f"Hermite coefficient tail {tail:.3e} above tail_tol")
            return
        edge = max(abs(self.values[0]), abs(self.values[-1]))
        if edge > self.settings.tail_tol * max(1.0, float(np.abs(self.values).max())):
            raise TailCheckFailed(
                f"Function does not decay at the window edges (|f(+-L)| = {edge:.3e})"
            )

    def to_hermite(self) -> "RepFunction":
        if self.mode == "hermite":
            return self
        basis = self.hermite or hermite_basis_for(self.rep, self.settings.hermite_modes)
        coefficients = self.grid.spacing * (basis.table(self.grid) @ self.values)
        f = replace(self, values=coefficients, mode="hermite", hermite=basis)
        f.check_tails()
        return f

    def to_grid(self) -> "RepFunction":
        if self.mode == "grid":
            return self
        samples = self.values @ self.hermite.table(self.grid)
        return replace(self, values=samples, mode="grid")

    def l2_norm(self) -> float:
        if self.mode == "hermite":
            return float(np.linalg.norm(self.values))
        return y_sobolev_norm(self, 0.0)


def _spectral_derivative(f: RepFunction) -> np.ndarray:
    grid = f.grid
    sigma = (f.right_limit - f.values[0]) / (2.0 * grid.half_width)
    periodic = f.values - sigma * (grid.nodes + grid.half_width)
    spectrum = np.fft.fft(periodic)
    peak = np.abs(spectrum).max()
    if peak > 0 and np.abs(spectrum[grid.outer_band]).max() > f.settings.nyquist_tol * peak:
        raise ResolutionLoss("Spectral content near the Nyquist band; refine grid_n")
    return np.fft.ifft(1j * TWO_PI * grid.frequencies * spectrum) + sigma


def apply_X(f: RepFunction) -> RepFunction:
    """pi_*(X) = d/dt."""
    if f.mode == "hermite":
        c = f.values
        k = np.arange(len(c))
        out = np.zeros_like(c)
        out[:-1] += np.sqrt((k[:-1] + 1) / 2.0) * c[1:]
        out[1:] -= np.sqrt(k[1:] / 2.0) * c[:-1]
        result = f._with(f.hermite.scale * out)
        result.check_tails()
        return result
    if f.kind == "schwartz":
        f.check_tails()
    derivative = _spectral_derivative(f)
    result = f._with(derivative, kind="schwartz", right_limit=0j)
    if f.kind == "bounded":
        result.check_tails()
    return result


def apply_Y(f: RepFunction) -> RepFunction:
    """pi_*(Y) = 2 pi i B(X,Y) t."""
    if f.mode == "hermite":
        c = f.values
        k = np.arange(len(c))
        out = np.zeros_like(c)
        out[:-1] += np.sqrt((k[:-1] + 1) / 2.0) * c[1:]
        out[1:] += np.sqrt(k[1:] / 2.0) * c[:-1]
        return f._with(1j * TWO_PI * f.b * out / f.hermite.scale)
    return f._with(
        1j * TWO_PI * f.b * f.t * f.values,
        right_limit=1j * TWO_PI * f.b * f.grid.half_width * f.right_limit,
    )


def invariant_distribution(f: RepFunction, e: int = 0) -> complex:
    """D_e(f) = integral of <f(t), e>; H' is one-dimensional so only e = 0 exists."""
    if e != 0:
        raise ValidationError(f"H' is one-dimensional; basis index {e} does not exist")
    g = f.to_grid()
    return complex(g.grid.integrate(g.values, g.right_limit))


def green(f: RepFunction) -> RepFunction:
    """
    (G_X f)(t) = integral of f over [-L, t]: the periodic antiderivative of
    f - D/2L plus the ramp D (t + L) / 2L.
    """
    f = f.to_grid()
    if f.kind != "schwartz":
        raise TailCheckFailed("green needs decaying input")
    f.check_tails()
    grid = f.grid
    total = invariant_distribution(f)
    centred = f.values - total / (2.0 * grid.half_width)
    spectrum = np.fft.fft(centred)
    antiderivative = np.zeros_like(spectrum)
    nonzero = grid.frequencies != 0
    antiderivative[nonzero] = spectrum[nonzero] / (1j * TWO_PI * grid.frequencies[nonzero])
    periodic = np.fft.ifft(antiderivative)
    values = periodic - periodic[0] + total * (grid.nodes + grid.half_width) / (2.0 * grid.half_width)
    kind = "schwartz" if abs(total) <= f.zero_tol() else "bounded"
    return f._with(values, kind=kind, right_limit=total)


def _weight(f: RepFunction, exponent: float, t: np.ndarray) -> np.ndarray:
    return (1.0 + (TWO_PI * f.b * t) ** 2) ** exponent


def _right_tail(b: float, exponent: float, half_width: float) -> float:
    value, _ = integrate.quad(lambda s: (1.0 + (TWO_PI * b * s) ** 2) ** exponent, half_width, np.inf)
    return value


def y_sobolev_norm(f: RepFunction, alpha: float) -> float:
    """L^2 norm of (1 + 4 pi^2 B^2 t^2)^(alpha/2) f, including the constant tail past +L."""
    g = f.to_grid()
    weighted = _weight(g, alpha, g.t) * np.abs(g.values) ** 2
    right = _weight(g, alpha, np.array([g.grid.half_width]))[0] * abs(g.right_limit) ** 2
    total = g.grid.integrate(weighted, right).real
    if g.kind == "bounded" and g.right_limit != 0:
        total += abs(g.right_limit) ** 2 * _right_tail(g.b, alpha, g.grid.half_width)
    return float(np.sqrt(max(total, 0.0)))


def full_sobolev_norm(f: RepFunction, alpha: float) -> float:
    """sqrt(sum (1 + mu_n)^alpha |c_n|^2) in the pi(Laplacian) eigenbasis."""
    if f.mode != "hermite":
        raise ModeMismatch("full_sobolev_norm needs hermite mode")
    weights = (1.0 + f.hermite.eigenvalues) ** alpha
    return float(np.sqrt(np.sum(weights * np.abs(f.values) ** 2)))


@lru_cache(maxsize=64)
def c_alpha(alpha: float) -> float:
    """(integral over R of (1 + 4 pi^2 s^2)^-alpha)^(1/2), alpha > 1/2."""
    if alpha <= 0.5:
        raise ValidationError(f"C_alpha needs alpha > 1/2, got {alpha}")
    value, _ = integrate.quad(lambda s: (1.0 + (TWO_PI * s) ** 2) ** -alpha, -np.inf, np.inf)
    return float(np.sqrt(value))


@lru_cache(maxsize=64)
def c_alpha_ell(alpha: float, ell: int) -> float:
    """
    C_{alpha,l}^2 = int_0^inf (1+4 pi^2 u^2)^-(l+alpha) (2 pi)^(2l) u^(2l+1) / (2l+1) du,
    finite for alpha > 1.
    """
    if alpha <= 1.0:
        raise ValidationError(f"C_(alpha,l) needs alpha > 1, got {alpha}")
    value, _ = integrate.quad(
        lambda u: (1.0 + (TWO_PI * u) ** 2) ** -(ell + alpha)
        * TWO_PI ** (2 * ell) * u ** (2 * ell + 1) / (2 * ell + 1),
        0.0,
        np.inf,
        limit=200,
    )
    return float(np.sqrt(value))


def _bound_row(name: str, lhs: float, rhs: float, slack: float) -> Dict[str, Any]:
    ratio = lhs / rhs if rhs > 0 else (0.0 if lhs == 0 else float("inf"))
    if lhs > rhs * (1.0 + slack) + 1e-15:
        raise EstimateViolated(f"{name}: measured {lhs:.6e} exceeds bound {rhs:.6e}")
    return {"name": name, "lhs": lhs, "rhs": rhs, "ratio": ratio}


def _require_obstruction_free(f: RepFunction, what: str) -> None:
    value = invariant_distribution(f)
    if abs(value) > f.zero_tol():
        raise ObstructionNonzero(
            f"{what} needs D(f) = 0 but |D(f)| = {abs(value):.3e} > zero_tol {f.zero_tol():.3e}"
        )


def check_invdist_estimate(f: RepFunction, alpha: float) -> Dict[str, Any]:
    """|D(f)| <= C_alpha |B|^(-1/2) ||(I - pi(Y)^2)^(alpha/2) f||."""
    constant = c_alpha(alpha)
    lhs = abs(invariant_distribution(f))
    rhs = constant * abs(f.b) ** -0.5 * y_sobolev_norm(f, alpha)
    row = _bound_row("invariant_distribution", lhs, rhs, f.settings.estimate_slack)
    row["constant"] = constant
    return row


def check_green_estimates(
    f: RepFunction, alpha: float, beta: float, part: int = 1, ells: Sequence[int] = (0, 1, 2)
) -> Dict[str, Any]:
    """
    Part 1: ||G f||_beta <= C_alpha C_{-beta} delta^-1 ||f||_alpha (alpha > 1/2, beta < -1/2).
    Part 2: ||pi(Y)^l G f|| <= C_{alpha,l} delta^-1 ||f||_{l+alpha} for obstruction-free f.
    """
    delta = abs(f.b)
    slack = f.settings.estimate_slack
    u = green(f)
    report: Dict[str, Any] = {"part": part, "alpha": alpha, "beta": beta, "rows": []}
    if part == 1:
        if beta >= -0.5:
            raise ValidationError(f"part 1 needs beta < -1/2, got {beta}")
        constant = c_alpha(alpha) * c_alpha(-beta)
        lhs = y_sobolev_norm(u, beta)
        rhs = constant / delta * y_sobolev_norm(f, alpha)
        report["rows"].append(_bound_row("green_part1", lhs, rhs, slack))
    else:
        _require_obstruction_free(f, "part 2")
        u = u.to_grid()
        for ell in ells:
            constant = c_alpha_ell(alpha, ell)
            weighted = (TWO_PI * f.b * u.t) ** ell * u.values
            lhs = float(np.sqrt(u.grid.integrate(np.abs(weighted) ** 2).real))
            rhs = constant / delta * y_sobolev_norm(f, ell + alpha)
            row = _bound_row(f"green_part2_l{ell}", lhs, rhs, slack)
            row["constant"] = constant
            report["rows"].append(row)
    report["max_ratio"] = max(row["ratio"] for row in report["rows"])
    return report


def y_commutator_terms(f: RepFunction) -> Dict[str, Any]:
    """pi(Y) G f = G pi(Y) f + 2 pi i B G^2 f, compared node by node."""
    _require_obstruction_free(f, "commutator expansion")
    f = f.to_grid()
    gf = green(f)
    lhs = apply_Y(gf).values
    rhs = green(apply_Y(f)).values + 1j * TWO_PI * f.b * green(gf).values
    residual = float(np.abs(lhs - rhs).max())
    return {"residual": residual, "scale": float(np.abs(lhs).max())}


def check_laplacian_bound(f: RepFunction, alpha: float) -> Dict[str, Any]:
    """
    Degree-two bound for P = Delta_0 = -(Y^2 + Z^2) on the Heisenberg algebra:
    pi(P) = 4 pi^2 B^2 t^2 + 4 pi^2 lambda(Z)^2, pi(dP) = 8 pi^2 B^2 t, pi(d^2 P) = 8 pi^2 B^2.
    """
    if not is_standard_heisenberg(f.rep.algebra):
        raise ModeMismatch("check_laplacian_bound needs the standard Heisenberg algebra")
    _require_obstruction_free(f, "Laplacian bound")
    f = f.to_grid()
    b = f.b
    delta = abs(b)
    lam_z = float(sp.N(f.rep.central_character(f.rep.algebra.basis[2]), 30))
    t = f.t
    symbols = [
        (TWO_PI * b * t) ** 2 + (TWO_PI * lam_z) ** 2,
        2.0 * TWO_PI ** 2 * b * b * t,
        np.full_like(t, 2.0 * TWO_PI ** 2 * b * b),
    ]
    u = green(f)
    lhs = float(np.sqrt(f.grid.integrate(np.abs(symbols[0] * u.values) ** 2).real))
    rhs = 0.0
    for m in range(3):
        inner = 0.0
        for j in range(m + 1):
            ell = m - j
            g = f._with((TWO_PI * delta * np.abs(t)) ** ell * symbols[m] * f.values)
            inner += c_alpha_ell(alpha, j) / delta * y_sobolev_norm(g, j + alpha) / (
                factorial(j) * factorial(ell)
            )
        rhs += inner / (TWO_PI * delta) ** m
    return _bound_row("laplacian_r1", lhs, rhs, f.settings.estimate_slack)


def check_central_bound(f: RepFunction) -> Dict[str, Any]:
    """w_Z(O) ||f|| <= ||f||_1 / (2 pi)."""
    if f.mode != "hermite":
        raise ModeMismatch("check_central_bound needs hermite mode")
    w_z = float(sp.N(restriction_norm(f.rep.lam, f.rep.algebra.center), 30))
    return _bound_row(
        "central", w_z * f.l2_norm(), full_sobolev_norm(f, 1.0) / TWO_PI, f.settings.estimate_slack
    )


def schwartz_seminorm(f: RepFunction, i: int, j: int) -> float:
    """sup_t (1 + t^2)^(j/2) |f^(i)(t)| on the window."""
    g = f.to_grid()
    for _ in range(i):
        g = apply_X(g)
    return float(np.max((1.0 + g.t ** 2) ** (j / 2.0) * np.abs(g.values)))


def check_sobolev_scaling(
    family: Sequence[Tuple[str, RepFunction]],
    alpha: float,
    beta: float,
    slack: float = DEFAULT_SCALING_SLACK,
) -> Dict[str, Any]:
    """
    Measured ||G f||_beta / (max(1, w_k^beta) max(1, delta^(-1-k beta)) ||f||_alpha)
    across an orbit family, asserted not to exceed ``slack`` times its first value.
    """
    rows = []
    calibration = None
    for label, f in tqdm(family, desc="Sobolev scaling", unit="orbit", disable=len(family) < 4):
        _require_obstruction_free(f, "Sobolev scaling")
        k = f.rep.algebra.step
        w_k = float(sp.N(f.rep.w_k, 30))
        delta = abs(f.b)
        fh = f.to_hermite()
        u = green(fh).to_hermite()
        envelope = max(1.0, w_k ** beta) * max(1.0, delta ** (-1.0 - k * beta))
        ratio = full_sobolev_norm(u, beta) / (envelope * full_sobolev_norm(fh, alpha))
        if calibration is None:
            calibration = ratio
        rows.append({"label": label, "delta": delta, "w_k": w_k, "ratio": ratio})
        if ratio > slack * calibration:
            raise EstimateViolated(
                f"Sobolev scaling for {label}: ratio {ratio:.3e} exceeds {slack} x {calibration:.3e}"
            )
    return {"alpha": alpha, "beta": beta, "slack": slack, "calibration": calibration, "rows": rows}


def diophantine_lower_bound_check(
    f: RepFunction, lattice: LatticeData, report, mode_norm: Optional[float] = None
) -> Dict[str, Any]:
    """
    delta_O(X)^-1 ||f|| <= C_Gamma |M_Y|^(n-1+tau) ||f|| with C_Gamma = 1/K, where
    M_Y = (B(E_i, Y))_i over the generators and Y is a layer-(k-1) basis vector.
    |M_Y| here is Euclidean while K comes from the max-norm scan in certify;
    |M|_inf <= |M|_2 keeps the chain valid.
    """
    rep = f.rep
    algebra = rep.algebra
    generators = list(algebra.layer_indices(1))
    candidates = algebra.layer_indices(max(algebra.step - 1, 1))
    y_index = max(candidates, key=lambda i: abs(sp.N(b_form(rep.lam, rep.x, algebra.basis[i]))))
    y = algebra.basis[y_index]
    m_y = [sp.simplify(b_form(rep.lam, algebra.basis[i], y)) for i in generators]
    if not all(v.is_integer for v in m_y):
        raise NonIntegerMY(f"M_Y = {[str(v) for v in m_y]} is not an integer vector")
    if not weakly_integral(rep.lam, lattice):
        raise NotWeaklyIntegral("lambda is not weakly integral")
    if all(v == 0 for v in m_y):
        raise ValidationError("M_Y vanishes: Y is not paired with the generators")

    m_vec = np.array([int(v) for v in m_y])
    if np.abs(m_vec).max() > report.m_max:
        raise ValidationError(
            f"|M_Y| = {np.abs(m_vec).max()} lies outside the certified range {report.m_max}"
        )
    if report.k_best <= 0:
        raise ValidationError("Diophantine report has K = 0; X is not certified")
    exponent = len(generators) - 1 + report.tau
    c_gamma = 1.0 / report.k_best
    delta = float(sp.N(delta_norm(rep.lam, rep.x), 30))
    norm = f.l2_norm()
    lhs = norm / delta
    rhs = c_gamma * float(np.linalg.norm(m_vec)) ** exponent * norm
    result = _bound_row("diophantine_chain", lhs, rhs, f.settings.estimate_slack)
    result.update({"M_Y": m_vec.tolist(), "C_Gamma": c_gamma, "exponent": exponent})
    if f.mode == "hermite":
        full = full_sobolev_norm(f, exponent)
        result["sobolev_norm"] = full
        result["sobolev_row"] = _bound_row("diophantine_sobolev", rhs, c_gamma * full, f.settings.estimate_slack)
    return result


@dataclass
class GlobalSolution:
    labels: List[str]
    solutions: List[RepFunction]
    norms: List[float]
    global_norm: float
    uniform_bound: float


def _solve_component(label: str, f: RepFunction, alpha: float, beta: float, part: int):
    try:
        u = green(f)
        estimates = check_green_estimates(f, alpha, beta, part)
        return label, u, y_sobolev_norm(u, beta), estimates["max_ratio"]
    except (ValidationError, EstimateViolated) as e:
        raise ComponentFailure(label, e)


def global_solve(
    components: Sequence[Tuple[str, RepFunction]],
    alpha: float,
    beta: float,
    part: int = 1,
    workers: Optional[int] = None,
) -> GlobalSolution:
    """Green solutions per orbit component assembled as an orthogonal sum."""
    results = []
    with tqdm(total=len(components), desc="Solving components", unit="orbit") as pbar:
        if workers and workers > 1:
            with mp.Pool(processes=workers) as pool:
                tasks = [
                    (label, pool.apply_async(_solve_component, args=(label, f, alpha, beta, part)))
                    for label, f in components
                ]
                for label, task in tasks:
                    try:
                        results.append(task.get(timeout=300))
                    except ComponentFailure:
                        raise
                    except Exception as e:
                        raise ComponentFailure(label, e)
                    finally:
                        pbar.update(1)
        else:
            for label, f in components:
                results.append(_solve_component(label, f, alpha, beta, part))
                pbar.update(1)

    norms = [r[2] for r in results]
    solution = GlobalSolution(
        labels=[r[0] for r in results],
        solutions=[r[1] for r in results],
        norms=norms,
        global_norm=float(np.sqrt(np.sum(np.square(norms)))),
        uniform_bound=max(r[3] for r in results) if results else 0.0,
    )
    logging.info(f"Solved {len(results)} components, global norm {solution.global_norm:.6e}")
    return solution
