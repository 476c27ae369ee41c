#!/usr/bin/env python3
"""
Adapted representation module for nilcohom
Builds the codimension-one ideal n', the direction Y, the unit normal U, the
shifted form and the polynomial operator symbols that realise an irreducible
representation on L^2(R, H') with pi(X) = d/dt and pi(Y) = 2 pi i B(X,Y) t.
"""

import logging
from dataclasses import dataclass
from math import factorial
from typing import Any, Dict, List, Tuple

import sympy as sp

from modules.algebra_core import NilpotentLieAlgebra, Subspace, Vector, is_zero_vector, norm
from modules.coadjoint import LinearForm, b_form, coadjoint_act, orbit_invariants
from modules.validation import InternalError, ValidationError


class NotMaximalRank(ValidationError):
    pass


class DegenerateDirection(ValidationError):
    """delta_O(X) = 0: X lies in n_{k-1}^perp(O)."""
    pass


class NotInIdeal(ValidationError):
    pass


class ModelLimitation(ValidationError):
    """The scalar H' model cannot represent this element."""
    pass


def bracket_norm_constant(algebra: NilpotentLieAlgebra) -> sp.Expr:
    """
    C with ||[U, Y]|| <= C |U| |Y| for Y in n_{k-1}: the Frobenius norm of the
    structure constants c_{ij}^l with j in the layers spanning n_{k-1}.
    """
    tail = algebra.tail_indices(max(algebra.step - 1, 1))
    total = sum(
        algebra.constants[i][j][l] ** 2
        for i in range(algebra.dim)
        for j in tail
        for l in range(algebra.dim)
    )
    return sp.sqrt(total)


def _normalize_sign(v: Vector) -> Vector:
    for c in v:
        if c != 0:
            return v if c > 0 else -v
    return v


@dataclass(frozen=True)
class AdaptedRepData:
    """Everything needed to realise pi_lambda adapted to the flow direction X."""
    lam: LinearForm
    x: Vector
    y: Vector
    b_xy: sp.Expr
    nprime: Subspace
    u: Vector
    x_component: sp.Expr
    t0: sp.Expr
    lambda_shifted: LinearForm
    nk2: Subspace
    w_k: sp.Expr
    constant_c: sp.Expr

    @property
    def algebra(self) -> NilpotentLieAlgebra:
        return self.lam.algebra

    @property
    def delta(self) -> sp.Expr:
        return abs(self.b_xy)

    @property
    def b_value(self) -> float:
        return float(sp.N(self.b_xy, 30))

    @property
    def delta_value(self) -> float:
        return abs(self.b_value)

    @property
    def x_component_value(self) -> float:
        return float(sp.N(self.x_component, 30))

    def central_character(self, z: Vector) -> sp.Expr:
        """lambda(z) for z in n_k (orbit invariant)."""
        return self.lambda_shifted(z)

    def normal_projection_holds(self) -> bool:
        """|<X,U>| * C * w_k >= delta_O(X, Y)."""
        lhs = sp.N(self.x_component * self.constant_c * self.w_k, 30)
        return bool(lhs >= sp.N(self.delta, 30) * (1 - sp.Rational(1, 10 ** 25)))

    def to_report(self) -> Dict[str, Any]:
        labels = self.algebra.labels
        symbols = {}
        for b in self.nprime.basis:
            key = "+".join(f"({c})*{labels[i]}" for i, c in enumerate(b) if c != 0)
            symbols[key] = [[j, [str(c) for c in v]] for j, v in operator_symbol(self, b)]
        return {
            "Y": [str(c) for c in self.y],
            "B_XY": str(self.b_xy),
            "delta": str(self.delta),
            "delta_value": self.delta_value,
            "nprime_basis": self.nprime.as_lists(),
            "U": [str(c) for c in self.u],
            "X_dot_U": str(self.x_component),
            "t0": str(self.t0),
            "lambda_shifted": self.lambda_shifted.as_strings(),
            "nk2_basis": self.nk2.as_lists(),
            "bracket_norm_constant": str(self.constant_c),
            "normal_projection_bound": self.normal_projection_holds(),
            "operator_symbols": symbols,
        }


def build_adapted(lam: LinearForm, x: Vector) -> AdaptedRepData:
    """
    Construct the adapted representation data for (lambda, X).

    Raises:
        NotMaximalRank: lambda vanishes on n_k
        DegenerateDirection: delta_O(X) = 0
    """
    algebra = lam.algebra
    x = sp.ImmutableMatrix(x)
    invariants = orbit_invariants(lam, x)
    if not invariants.maximal_rank:
        raise NotMaximalRank("Orbit is not of maximal rank (lambda vanishes on n_k)")
    if invariants.delta == 0:
        raise DegenerateDirection("delta_O(X) = 0: X lies in n_{k-1}^perp(O)")

    phi = [sp.Integer(0)] * algebra.dim
    for i, value in invariants.delta_xy.items():
        phi[i] = value
    y = _normalize_sign(sp.ImmutableMatrix(phi) / invariants.delta)
    y = sp.ImmutableMatrix(y.applyfunc(sp.simplify))
    b_xy = sp.simplify(b_form(lam, x, y))

    psi = sp.Matrix(1, algebra.dim, [b_form(lam, e, y) for e in algebra.basis])
    nprime = Subspace.span(psi.nullspace(), algebra.dim)
    if nprime.dim != algebra.dim - 1 or not algebra.is_ideal(nprime):
        raise InternalError("n' is not a codimension-one ideal")

    psi_col = sp.ImmutableMatrix(psi.T)
    u = (psi_col / norm(psi_col)).applyfunc(sp.simplify)
    if sp.N((x.T * u)[0, 0]) < 0:
        u = -u
    x_component = sp.simplify((x.T * u)[0, 0])

    t0 = sp.simplify(lam(y) / b_xy)
    shifted = coadjoint_act(t0 * x, lam)
    if sp.simplify(shifted(y)) != 0:
        raise InternalError(f"lambda shift left lambda(Y) = {shifted(y)}")

    top = list(algebra.layer_indices(algebra.step))
    row = sp.Matrix(1, len(top), [shifted(algebra.basis[i]) for i in top])
    nk2_vectors = []
    for null in row.nullspace():
        full = [sp.Integer(0)] * algebra.dim
        for pos, idx in enumerate(top):
            full[idx] = null[pos]
        nk2_vectors.append(sp.ImmutableMatrix(full))

    if algebra.step >= 3:
        logging.warning(
            "Step >= 3: H' is modelled by its central character only; "
            "exact when the restricted orbit is determined by it"
        )

    rep = AdaptedRepData(
        lam=lam,
        x=x,
        y=y,
        b_xy=b_xy,
        nprime=nprime,
        u=sp.ImmutableMatrix(u),
        x_component=x_component,
        t0=t0,
        lambda_shifted=shifted,
        nk2=Subspace.span(nk2_vectors, algebra.dim),
        w_k=invariants.w_k,
        constant_c=bracket_norm_constant(algebra),
    )
    logging.debug(f"Adapted representation built: delta={rep.delta}, <X,U>={x_component}")
    return rep


def operator_symbol(rep: AdaptedRepData, e: Vector) -> List[Tuple[int, Vector]]:
    """[(j, ad(X)^j E / j!)] up to the last nonzero term; pi_*(E) = sum t^j pi'_*(...)."""
    e = sp.ImmutableMatrix(e)
    if not rep.nprime.contains(e):
        raise NotInIdeal(f"{list(e)} is not in n'")
    algebra = rep.algebra
    terms = []
    current = e
    for j in range(algebra.step):
        if j > 0 and is_zero_vector(current):
            break
        terms.append((j, sp.ImmutableMatrix((current / factorial(j)).applyfunc(sp.expand))))
        current = algebra.bracket(rep.x, current)
    return terms


def scalar_multiplier(rep: AdaptedRepData, e: Vector) -> List[sp.Expr]:
    """
    Polynomial coefficients p_j with pi_*(E) = sum_j p_j t^j in the scalar model,
    where pi'_*(Y) = 0 and pi'_*(z) = 2 pi i lambda(z) on n_k.
    """
    algebra = rep.algebra
    top = set(algebra.layer_indices(algebra.step))
    pivot = next(i for i, c in enumerate(rep.y) if c != 0 and i not in top)
    coefficients = []
    for _, v in operator_symbol(rep, e):
        a = v[pivot] / rep.y[pivot]
        z = (v - a * rep.y).applyfunc(sp.simplify)
        if any(z[i] != 0 for i in range(algebra.dim) if i not in top):
            raise ModelLimitation(
                f"Symbol coefficient {list(v)} leaves span(Y) + n_k; "
                f"the scalar H' model cannot represent it"
            )
        coefficients.append(sp.expand(2 * sp.pi * sp.I * rep.central_character(z)))
    return coefficients


@dataclass(frozen=True)
class ReducedAlgebra:
    """n'' = n' / n_k'' with the induced form."""
    representatives: Tuple[Vector, ...]
    constants: Tuple[Tuple[Tuple[sp.Expr, ...], ...], ...]
    y_coordinates: Tuple[sp.Expr, ...]
    y_central: bool
    lambda_y: sp.Expr

    @property
    def dim(self) -> int:
        return len(self.representatives)


def quotient_reduction(rep: AdaptedRepData) -> ReducedAlgebra:
    algebra = rep.algebra
    reps: List[Vector] = []
    for b in rep.nprime.basis:
        if not (rep.nk2 + Subspace.span(reps, algebra.dim)).contains(b):
            reps.append(b)
    system = sp.Matrix.hstack(*(reps + list(rep.nk2.basis)))

    def reduce(v: Vector) -> Tuple[sp.Expr, ...]:
        solution, params = system.gauss_jordan_solve(sp.Matrix(v))
        if params.shape[0]:
            raise InternalError("Quotient representatives are not independent")
        return tuple(sp.simplify(c) for c in solution[: len(reps)])

    constants = tuple(
        tuple(reduce(algebra.bracket(a, b)) for b in reps) for a in reps
    )
    y_coordinates = reduce(rep.y)
    y_central = all(
        all(c == 0 for c in reduce(algebra.bracket(rep.y, r))) for r in reps
    )
    reduced = ReducedAlgebra(
        representatives=tuple(reps),
        constants=constants,
        y_coordinates=y_coordinates,
        y_central=y_central,
        lambda_y=sp.simplify(rep.lambda_shifted(rep.y)),
    )
    if not reduced.y_central or reduced.lambda_y != 0:
        raise InternalError("Image of Y in n'/n_k'' is not central with vanishing form")
    return reduced
