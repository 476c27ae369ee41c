#!/usr/bin/env python3
"""
Coadjoint orbit module for nilcohom
Linear forms on the algebra, the skew form B_lambda, orbit invariants, rank
classification, polarizing subalgebras and integrality tests.
"""

import logging
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Any, Dict, List, Optional, Sequence

import sympy as sp

from modules.algebra_core import (
    LatticeData,
    NilpotentLieAlgebra,
    Subspace,
    Vector,
    is_zero_vector,
    make_vector,
    parse_vector,
)
from modules.validation import InternalError, ValidationError


class UnsupportedAlgebra(ValidationError):
    """Operation is only implemented for a specific algebra."""
    pass


class NotWeaklyIntegral(ValidationError):
    """lambda is not integral on log Z(Gamma)."""
    pass


@dataclass(frozen=True)
class LinearForm:
    """lambda in n*, coordinates in the dual Malcev basis."""
    algebra: NilpotentLieAlgebra
    coeffs: Vector

    def __post_init__(self):
        if len(self.coeffs) != self.algebra.dim:
            raise ValidationError(
                f"Linear form has {len(self.coeffs)} coordinates, algebra dim is {self.algebra.dim}"
            )

    @classmethod
    def from_values(cls, algebra: NilpotentLieAlgebra, values: Sequence) -> "LinearForm":
        return cls(algebra, make_vector(values, algebra.dim))

    @classmethod
    def parse(cls, algebra: NilpotentLieAlgebra, text: str) -> "LinearForm":
        return cls(algebra, parse_vector(text, algebra.dim))

    def __call__(self, v: Vector) -> sp.Expr:
        return sp.expand((self.coeffs.T * sp.ImmutableMatrix(v))[0, 0])

    def is_zero(self) -> bool:
        return is_zero_vector(self.coeffs)

    def as_strings(self) -> List[str]:
        return [str(c) for c in self.coeffs]


def b_form(lam: LinearForm, x: Vector, y: Vector) -> sp.Expr:
    """B_lambda(x, y) = lambda([x, y])."""
    return lam(lam.algebra.bracket(x, y))


def b_matrix(lam: LinearForm) -> sp.ImmutableMatrix:
    algebra = lam.algebra
    basis = algebra.basis
    return sp.ImmutableMatrix(
        algebra.dim, algebra.dim, lambda i, j: b_form(lam, basis[i], basis[j])
    )


def coadjoint_act(g_log: Vector, lam: LinearForm) -> LinearForm:
    """lambda o Ad(exp(-g_log))."""
    ad = lam.algebra.exp_ad(-sp.ImmutableMatrix(g_log))
    row = (lam.coeffs.T * ad).applyfunc(sp.expand)
    return LinearForm(lam.algebra, sp.ImmutableMatrix(row.T))


def radical(lam: LinearForm) -> Subspace:
    """r_lambda, the radical of B_lambda (stabilizer algebra of lambda)."""
    return Subspace.span(sp.Matrix(b_matrix(lam)).nullspace(), lam.algebra.dim)


def _top_tail_indices(algebra: NilpotentLieAlgebra) -> range:
    """Basis indices spanning n_{k-1} (all of n when k = 1)."""
    return algebra.tail_indices(max(algebra.step - 1, 1))


def nk1_perp(lam: LinearForm) -> Subspace:
    """n_{k-1}^perp(lambda) = {T : B_lambda(T, Y) = 0 for all Y in n_{k-1}}."""
    algebra = lam.algebra
    rows = [
        [b_form(lam, algebra.basis[i], algebra.basis[y]) for i in range(algebra.dim)]
        for y in _top_tail_indices(algebra)
    ]
    return Subspace.span(sp.Matrix(rows).nullspace(), algebra.dim)


def restriction_norm(lam: LinearForm, sub: Subspace) -> sp.Expr:
    """Norm of lambda restricted to ``sub`` for the Malcev-orthonormal product."""
    projected = sub.orthogonal_projector() * lam.coeffs
    return sp.sqrt(sp.simplify((lam.coeffs.T * projected)[0, 0]))


def delta_functional(lam: LinearForm, x: Vector) -> Dict[int, sp.Expr]:
    """Coefficients of Y -> B_lambda(x, Y) on the basis of n_{k-1}."""
    algebra = lam.algebra
    return {i: b_form(lam, x, algebra.basis[i]) for i in _top_tail_indices(algebra)}


def delta_norm(lam: LinearForm, x: Vector) -> sp.Expr:
    """delta_O(X): dual norm of the functional Y -> B_lambda(X, Y) on n_{k-1}."""
    return sp.sqrt(sum(v ** 2 for v in delta_functional(lam, x).values()))


def perp_inclusions(lam: LinearForm) -> Dict[str, bool]:
    """The three structural facts about n_{k-1}^perp, checked exactly."""
    algebra = lam.algebra
    perp = nk1_perp(lam)
    return {
        "radical_in_perp": perp.contains_subspace(radical(lam)),
        "n2_in_perp": perp.contains_subspace(algebra.series_term(2)),
        "perp_is_subalgebra": algebra.is_subalgebra(perp),
    }


def maximal_rank_conditions(lam: LinearForm) -> Dict[str, bool]:
    """Three equivalent characterisations of maximal rank, computed independently."""
    algebra = lam.algebra
    top = algebra.layer_indices(algebra.step)
    # step-1 algebras only carry characters, never maximal-rank orbits
    restricted_nonzero = algebra.step >= 2 and any(lam(algebra.basis[i]) != 0 for i in top)
    perp = nk1_perp(lam)
    perp_proper = perp.dim < algebra.dim
    first_layer = list(algebra.layer_indices(1))
    projected = [sp.ImmutableMatrix([b[i] for i in first_layer]) for b in perp.basis]
    projection_rank = Subspace.span(projected, len(first_layer)).dim
    return {
        "lambda_nonzero_on_nk": bool(restricted_nonzero),
        "perp_proper": perp_proper,
        "projection_not_surjective": projection_rank < len(first_layer),
    }


@dataclass(frozen=True)
class OrbitInvariants:
    """Orbit-level data for a form lambda and a flow direction X."""
    lam: LinearForm
    x: Vector
    b_matrix: sp.ImmutableMatrix
    radical_basis: Subspace
    nk1_perp_basis: Subspace
    maximal_rank: bool
    w_k: sp.Expr
    w_z: sp.Expr
    delta_xy: Dict[int, sp.Expr]
    delta: sp.Expr

    @cached_property
    def rank(self) -> int:
        return sp.Matrix(self.b_matrix).rank(simplify=True)

    def to_report(self) -> Dict[str, Any]:
        labels = self.lam.algebra.labels
        return {
            "lambda": self.lam.as_strings(),
            "X": [str(c) for c in self.x],
            "b_matrix": [[str(v) for v in self.b_matrix.row(i)] for i in range(self.b_matrix.rows)],
            "rank": self.rank,
            "radical_basis": self.radical_basis.as_lists(),
            "nk1_perp_basis": self.nk1_perp_basis.as_lists(),
            "maximal_rank": self.maximal_rank,
            "w_k": str(self.w_k),
            "w_k_value": float(sp.N(self.w_k, 30)),
            "w_Z": str(self.w_z),
            "w_Z_value": float(sp.N(self.w_z, 30)),
            "delta_XY": {labels[i]: str(abs(v)) for i, v in self.delta_xy.items()},
            "delta": str(self.delta),
            "delta_value": float(sp.N(self.delta, 30)),
        }


def orbit_invariants(lam: LinearForm, x: Vector) -> OrbitInvariants:
    algebra = lam.algebra
    top = Subspace.span([algebra.basis[i] for i in algebra.layer_indices(algebra.step)], algebra.dim)
    conditions = maximal_rank_conditions(lam)
    if len(set(conditions.values())) != 1:
        raise InternalError(f"Maximal-rank characterisations disagree: {conditions}")
    return OrbitInvariants(
        lam=lam,
        x=sp.ImmutableMatrix(x),
        b_matrix=b_matrix(lam),
        radical_basis=radical(lam),
        nk1_perp_basis=nk1_perp(lam),
        maximal_rank=conditions["lambda_nonzero_on_nk"],
        w_k=restriction_norm(lam, top),
        w_z=restriction_norm(lam, algebra.center),
        delta_xy=delta_functional(lam, x),
        delta=delta_norm(lam, x),
    )


def _restricted_radical(lam: LinearForm, indices: Sequence[int]) -> List[Vector]:
    """Radical of lambda restricted to the ideal spanned by ``indices``."""
    algebra = lam.algebra
    if not indices:
        return []
    block = sp.Matrix(
        len(indices), len(indices),
        lambda a, b: b_form(lam, algebra.basis[indices[a]], algebra.basis[indices[b]]),
    )
    vectors = []
    for null in block.nullspace():
        full = [sp.Integer(0)] * algebra.dim
        for pos, idx in enumerate(indices):
            full[idx] = null[pos]
        vectors.append(sp.ImmutableMatrix(full))
    return vectors


def polarizing_subalgebra(lam: LinearForm) -> Subspace:
    """
    Vergne polarization: sum of the radicals of lambda restricted to the ideals
    g_j spanned by the last j Malcev basis vectors.
    """
    algebra = lam.algebra
    d = algebra.dim
    vectors: List[Vector] = []
    for j in range(1, d + 1):
        vectors.extend(_restricted_radical(lam, list(range(d - j, d))))
    m = Subspace.span(vectors, d)

    rank = sp.Matrix(b_matrix(lam)).rank(simplify=True)
    isotropic = all(b_form(lam, a, b) == 0 for a in m.basis for b in m.basis)
    if not isotropic or m.dim != d - rank // 2 or not algebra.is_subalgebra(m):
        raise InternalError(
            f"Polarizing construction failed: isotropic={isotropic}, dim={m.dim}, "
            f"expected {d - rank // 2}"
        )
    return m


def is_standard_heisenberg(algebra: NilpotentLieAlgebra) -> bool:
    if algebra.dim != 3 or algebra.step != 2 or algebra.layers != (2, 1):
        return False
    expected = sp.ImmutableMatrix([0, 0, 1])
    return (
        algebra.bracket(algebra.basis[0], algebra.basis[1]) == expected
        and is_zero_vector(algebra.bracket(algebra.basis[0], algebra.basis[2]))
        and is_zero_vector(algebra.bracket(algebra.basis[1], algebra.basis[2]))
    )


def weakly_integral(lam: LinearForm, lattice: LatticeData) -> bool:
    """lambda(log Z(Gamma)) lies in Z."""
    if not is_standard_heisenberg(lattice.algebra):
        logging.warning(
            "Integrality is decided only weakly (on log Z(Gamma)) outside the Heisenberg case"
        )
    return all(sp.simplify(lam(e)).is_integer for e in lattice.central_lattice_basis())


def _farey(order: int) -> List[Fraction]:
    return sorted({Fraction(j, q) for q in range(1, order + 1) for j in range(q)})


def heisenberg_multiplicity(m: int, lattice: Optional[LatticeData] = None) -> int:
    """
    Multiplicity of the Schrodinger representation pi_m in L^2(Gamma \\ H).

    Counts double cosets Gamma exp(aE1) M (polarization M = exp span(E2, E3))
    whose conjugated stabilizer lattice carries the trivial character of mE3*.
    Only rational a with denominator <= |m| can qualify.
    """
    if lattice is not None and not is_standard_heisenberg(lattice.algebra):
        raise UnsupportedAlgebra("heisenberg_multiplicity needs the standard Heisenberg lattice")
    if m == 0:
        raise NotWeaklyIntegral(
            "m = 0 is not a maximal-rank orbit; characters live on the torus component"
        )
    if lattice is None:
        from modules.config_manager import builtin_algebra
        lattice = LatticeData(builtin_algebra("heisenberg"))

    algebra = lattice.algebra
    lam = LinearForm.from_values(algebra, [0, 0, m])
    stabilizer_generators = [algebra.basis[1], algebra.basis[2]]
    count = 0
    for a in _farey(abs(m)):
        ad = algebra.exp_ad(sp.Rational(a.numerator, a.denominator) * algebra.basis[0])
        if all(lam(ad * g).is_integer for g in stabilizer_generators):
            count += 1
    logging.debug(f"Closed orbits with trivial stabilizer character for m={m}: {count}")
    return count
