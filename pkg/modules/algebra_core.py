#!/usr/bin/env python3
"""
Exact nilpotent Lie algebra arithmetic for nilcohom.

Brackets, ad-operators, the descending central series, the centre, Malcev flag
bookkeeping and the Baker-Campbell-Hausdorff group law. Exact values are sympy
column vectors (``ImmutableMatrix`` of shape (dim, 1)); numpy arrays select the
float kernels used by the nilflow simulator.
"""

import logging
from dataclasses import dataclass, field
from functools import cached_property
from math import factorial
from typing import Dict, List, Sequence, Tuple, Union

import numpy as np
import sympy as sp

from modules.constants import MAX_BCH_STEP
from modules.validation import AlgebraDefinition, ValidationError

Vector = sp.ImmutableMatrix
VectorLike = Union[Vector, np.ndarray]


class UnsupportedStep(ValidationError):
    """The operation needs a truncated BCH series beyond the supported step."""
    pass


class DimensionMismatch(ValidationError):
    """Vector length does not match the algebra dimension."""
    pass


def to_exact(value) -> sp.Expr:
    """Convert a scalar to an exact sympy number (floats are taken at face value)."""
    if isinstance(value, str):
        return sp.sympify(value, rational=True)
    if isinstance(value, float):
        return sp.Rational(value)
    return sp.sympify(value)


def make_vector(values: Sequence, dim: int = None) -> Vector:
    """Column vector from a sequence of scalars or strings."""
    entries = [to_exact(v) for v in values]
    if dim is not None and len(entries) != dim:
        raise DimensionMismatch(f"Expected {dim} coordinates, got {len(entries)}")
    return sp.ImmutableMatrix(len(entries), 1, entries)


def parse_vector(text: str, dim: int) -> Vector:
    """Parse a comma separated coordinate list such as ``"1,(1+sqrt(5))/2,0"``."""
    parts = []
    depth = 0
    current = ""
    for ch in text:
        if ch == "," and depth == 0:
            parts.append(current)
            current = ""
            continue
        depth += (ch == "(") - (ch == ")")
        current += ch
    parts.append(current)
    try:
        return make_vector([p.strip() for p in parts], dim)
    except (sp.SympifyError, TypeError) as e:
        raise ValidationError(f"Invalid vector {text!r}: {e}")


def zero_vector(dim: int) -> Vector:
    return sp.ImmutableMatrix.zeros(dim, 1)


def is_zero_vector(v: Vector) -> bool:
    return all(sp.simplify(c) == 0 for c in v)


def vector_to_float(v: VectorLike) -> np.ndarray:
    if isinstance(v, np.ndarray):
        return v.astype(float)
    return np.array([float(sp.N(c, 30)) for c in v], dtype=float)


@dataclass(frozen=True)
class Subspace:
    """Subspace of Q^d (or R^d) held as an exact row-echelon basis."""
    ambient: int
    basis: Tuple[Vector, ...] = field(default_factory=tuple)

    @classmethod
    def span(cls, vectors: Sequence[Vector], ambient: int) -> "Subspace":
        vectors = [sp.ImmutableMatrix(v) for v in vectors]
        if not vectors:
            return cls(ambient, ())
        rows = sp.Matrix.hstack(*vectors).T
        reduced, pivots = rows.rref(simplify=True)
        basis = tuple(
            sp.ImmutableMatrix(reduced.row(r).T) for r in range(len(pivots))
        )
        return cls(ambient, basis)

    @classmethod
    def whole(cls, ambient: int) -> "Subspace":
        return cls.span([sp.ImmutableMatrix.eye(ambient).col(i) for i in range(ambient)], ambient)

    @classmethod
    def zero(cls, ambient: int) -> "Subspace":
        return cls(ambient, ())

    @property
    def dim(self) -> int:
        return len(self.basis)

    def matrix(self) -> sp.Matrix:
        """Basis vectors as columns (ambient x dim)."""
        if not self.basis:
            return sp.zeros(self.ambient, 0)
        return sp.Matrix.hstack(*self.basis)

    def contains(self, v: Vector) -> bool:
        if is_zero_vector(v):
            return True
        if not self.basis:
            return False
        return Subspace.span(list(self.basis) + [v], self.ambient).dim == self.dim

    def contains_subspace(self, other: "Subspace") -> bool:
        return all(self.contains(b) for b in other.basis)

    def __add__(self, other: "Subspace") -> "Subspace":
        return Subspace.span(list(self.basis) + list(other.basis), self.ambient)

    def same_as(self, other: "Subspace") -> bool:
        return self.dim == other.dim and self.contains_subspace(other)

    def orthogonal_projector(self) -> sp.Matrix:
        """Orthogonal projector for the fixed Malcev-orthonormal product."""
        if not self.basis:
            return sp.zeros(self.ambient, self.ambient)
        a = self.matrix()
        return a * (a.T * a).inv() * a.T

    def as_lists(self) -> List[List[str]]:
        return [[str(c) for c in b] for b in self.basis]


@dataclass(frozen=True)
class NilpotentLieAlgebra:
    """
    Nilpotent Lie algebra given by exact structure constants in a Malcev basis.

    ``constants[i][j][l]`` is c_{ij}^l with [E_i, E_j] = sum_l c_{ij}^l E_l. The
    basis is ordered by Malcev layers (sizes ``layers``); construction checks
    antisymmetry, the Jacobi identity, the declared step, the Malcev flag and the
    inclusion of the last central series term in the centre.
    """
    dim: int
    step: int
    layers: Tuple[int, ...]
    constants: Tuple[Tuple[Tuple[sp.Rational, ...], ...], ...]
    labels: Tuple[str, ...]
    name: str = "algebra"

    def __post_init__(self):
        self._check_antisymmetry()
        self._check_jacobi()
        self._check_central_series()
        self._check_malcev_flag()
        logging.debug(f"Algebra '{self.name}' validated: dim={self.dim}, step={self.step}")

    @classmethod
    def from_definition(cls, definition: AlgebraDefinition) -> "NilpotentLieAlgebra":
        d = definition.dim
        table = [[[sp.Integer(0)] * d for _ in range(d)] for _ in range(d)]
        given: Dict[Tuple[int, int, int], sp.Rational] = {}
        for entry in definition.brackets:
            value = sp.Rational(entry.value.numerator, entry.value.denominator)
            given[(entry.i, entry.j, entry.l)] = value
        for (i, j, l), value in given.items():
            mirrored = given.get((j, i, l))
            if mirrored is not None and mirrored != -value:
                raise ValidationError(
                    f"Antisymmetry violated: c_{i + 1}{j + 1}^{l + 1} = {value} but "
                    f"c_{j + 1}{i + 1}^{l + 1} = {mirrored}"
                )
            table[i][j][l] = value
            table[j][i][l] = -value

        labels = definition.labels or cls._malcev_labels(definition.layers)
        return cls(
            dim=d,
            step=definition.step,
            layers=tuple(definition.layers),
            constants=tuple(tuple(tuple(row) for row in plane) for plane in table),
            labels=tuple(labels),
            name=definition.name,
        )

    @staticmethod
    def _malcev_labels(layers: Sequence[int]) -> List[str]:
        return [f"E{i}^{j}" for j, size in enumerate(layers, start=1) for i in range(1, size + 1)]

    # -- structure -------------------------------------------------------

    @cached_property
    def _bracket_forms(self) -> Tuple[sp.ImmutableMatrix, ...]:
        """Per output index l, the matrix (c_{ij}^l)_{ij}."""
        d = self.dim
        return tuple(
            sp.ImmutableMatrix(d, d, lambda i, j: self.constants[i][j][l])
            for l in range(d)
        )

    @cached_property
    def structure_array(self) -> np.ndarray:
        """Float copy of the structure constants, indexed [i, j, l]."""
        return np.array(
            [[[float(c) for c in row] for row in plane] for plane in self.constants],
            dtype=float,
        )

    def basis_vector(self, i: int) -> Vector:
        return sp.ImmutableMatrix.eye(self.dim).col(i)

    @cached_property
    def basis(self) -> Tuple[Vector, ...]:
        return tuple(self.basis_vector(i) for i in range(self.dim))

    def layer_of(self, i: int) -> int:
        """1-based Malcev layer of basis index i."""
        upper = 0
        for layer, size in enumerate(self.layers, start=1):
            upper += size
            if i < upper:
                return layer
        raise IndexError(i)

    def layer_indices(self, layer: int) -> range:
        start = sum(self.layers[: layer - 1])
        return range(start, start + self.layers[layer - 1])

    def tail_indices(self, layer: int) -> range:
        """Basis indices of layers >= layer (a basis of n_layer)."""
        return range(sum(self.layers[: layer - 1]), self.dim)

    @property
    def generator_count(self) -> int:
        return self.layers[0]

    def _check_dim(self, *vectors: VectorLike) -> None:
        for v in vectors:
            if len(v) != self.dim:
                raise DimensionMismatch(
                    f"Vector of length {len(v)} in algebra of dimension {self.dim}"
                )

    # -- operations ------------------------------------------------------

    def bracket(self, x: VectorLike, y: VectorLike) -> VectorLike:
        """[x, y] evaluated from the structure-constant table."""
        self._check_dim(x, y)
        if isinstance(x, np.ndarray) or isinstance(y, np.ndarray):
            return np.einsum(
                "i,j,ijl->l", np.asarray(x, float), np.asarray(y, float), self.structure_array
            )
        xt = sp.ImmutableMatrix(x).T
        y = sp.ImmutableMatrix(y)
        return sp.ImmutableMatrix(
            self.dim, 1, [sp.expand((xt * form * y)[0, 0]) for form in self._bracket_forms]
        )

    def ad_matrix(self, x: Vector) -> sp.ImmutableMatrix:
        """Matrix of ad(x): column j is [x, E_j]."""
        self._check_dim(x)
        return sp.ImmutableMatrix.hstack(*[self.bracket(x, e) for e in self.basis])

    def exp_ad(self, x: Vector) -> sp.ImmutableMatrix:
        """Ad(exp x) = sum_{j<=k} ad(x)^j / j!, finite by nilpotency."""
        ad = sp.Matrix(self.ad_matrix(x))
        result = sp.eye(self.dim)
        power = sp.eye(self.dim)
        for j in range(1, self.step + 1):
            power = power * ad
            result += power / factorial(j)
        return sp.ImmutableMatrix(result.applyfunc(sp.expand))

    def central_series(self) -> List[Subspace]:
        """n_1, ..., n_k, n_{k+1} = {0} with n_j = [n_{j-1}, n]."""
        return list(self._central_series)

    @cached_property
    def _central_series(self) -> Tuple[Subspace, ...]:
        series = [Subspace.whole(self.dim)]
        while series[-1].dim > 0:
            brackets = [self.bracket(b, e) for b in series[-1].basis for e in self.basis]
            series.append(Subspace.span(brackets, self.dim))
            if len(series) > self.dim + 1:
                break
        return tuple(series)

    def series_term(self, j: int) -> Subspace:
        """n_j (1-based); {0} beyond the step."""
        if j < 1:
            return Subspace.whole(self.dim)
        series = self._central_series
        return series[j - 1] if j <= len(series) else Subspace.zero(self.dim)

    @cached_property
    def center(self) -> Subspace:
        stacked = sp.Matrix.vstack(*[sp.Matrix(self.ad_matrix(e)) for e in self.basis])
        return Subspace.span(stacked.nullspace(), self.dim)

    def is_subalgebra(self, sub: Subspace) -> bool:
        return all(sub.contains(self.bracket(a, b)) for a in sub.basis for b in sub.basis)

    def is_ideal(self, sub: Subspace) -> bool:
        return all(sub.contains(self.bracket(e, b)) for e in self.basis for b in sub.basis)

    def jacobi_residual(self, x: Vector, y: Vector, z: Vector) -> Vector:
        return (
            self.bracket(x, self.bracket(y, z))
            + self.bracket(y, self.bracket(z, x))
            + self.bracket(z, self.bracket(x, y))
        )

    def bch_multiply(self, x: VectorLike, y: VectorLike) -> VectorLike:
        """
        log(exp x exp y) through order 4:
        x + y + [x,y]/2 + ([x,[x,y]] - [y,[x,y]])/12 - [y,[x,[x,y]]]/24.
        """
        if self.step > MAX_BCH_STEP:
            raise UnsupportedStep(
                f"BCH series is truncated at order {MAX_BCH_STEP}; algebra has step {self.step}"
            )
        self._check_dim(x, y)
        xy = self.bracket(x, y)
        xxy = self.bracket(x, xy)
        yxy = self.bracket(y, xy)
        yxxy = self.bracket(y, xxy)
        if isinstance(xy, np.ndarray):
            return x + y + xy / 2 + (xxy - yxy) / 12 - yxxy / 24
        half, twelfth, twentyfourth = sp.Rational(1, 2), sp.Rational(1, 12), sp.Rational(1, 24)
        result = x + y + half * xy + twelfth * (xxy - yxy) - twentyfourth * yxxy
        return sp.ImmutableMatrix(result.applyfunc(sp.expand))

    def group_commutator(self, x: VectorLike, y: VectorLike) -> VectorLike:
        """log of (exp x)(exp y)(exp x)^-1(exp y)^-1."""
        return self.bch_multiply(self.bch_multiply(x, y), self.bch_multiply(-x, -y))

    def from_second_kind(self, coords: VectorLike) -> VectorLike:
        """log(exp(x_1 E_1) ... exp(x_d E_d))."""
        floating = isinstance(coords, np.ndarray)
        eye = np.eye(self.dim) if floating else None
        result = np.zeros(self.dim) if floating else zero_vector(self.dim)
        for i in range(self.dim):
            term = coords[i] * (eye[i] if floating else self.basis_vector(i))
            result = self.bch_multiply(result, term)
        return result

    def to_second_kind(self, v: VectorLike) -> VectorLike:
        """Inverse of ``from_second_kind``: peel exp(x_i E_i) from the left."""
        floating = isinstance(v, np.ndarray)
        coords = np.zeros(self.dim) if floating else [sp.Integer(0)] * self.dim
        eye = np.eye(self.dim) if floating else None
        current = v
        for i in range(self.dim):
            coords[i] = current[i]
            step = -(current[i] * (eye[i] if floating else self.basis_vector(i)))
            current = self.bch_multiply(step, current)
        return coords if floating else sp.ImmutableMatrix(self.dim, 1, coords)

    # -- validation ------------------------------------------------------

    def _check_antisymmetry(self) -> None:
        for i in range(self.dim):
            for j in range(self.dim):
                for l in range(self.dim):
                    if self.constants[i][j][l] != -self.constants[j][i][l]:
                        raise ValidationError(f"Antisymmetry violated at ({i}, {j}, {l})")

    def _check_jacobi(self) -> None:
        basis = self.basis
        for i in range(self.dim):
            for j in range(i + 1, self.dim):
                for l in range(j + 1, self.dim):
                    residual = self.jacobi_residual(basis[i], basis[j], basis[l])
                    if not is_zero_vector(residual):
                        raise ValidationError(
                            f"Jacobi identity fails for ({self.labels[i]}, "
                            f"{self.labels[j]}, {self.labels[l]}): {list(residual)}"
                        )

    def _check_central_series(self) -> None:
        series = self._central_series
        if series[-1].dim != 0:
            raise ValidationError(f"Algebra '{self.name}' is not nilpotent")
        actual_step = len(series) - 1
        if actual_step != self.step:
            raise ValidationError(
                f"Declared step {self.step} but central series has length {actual_step}"
            )
        if not self.center.contains_subspace(series[self.step - 1]):
            raise ValidationError("Last central series term is not central")

    def _check_malcev_flag(self) -> None:
        for drop in range(1, self.dim):
            tail = Subspace.span(list(self.basis[drop:]), self.dim)
            if not self.is_subalgebra(tail):
                raise ValidationError(
                    f"Malcev flag broken: span of basis without the first {drop} "
                    f"elements is not a subalgebra"
                )
        for layer in range(1, self.step + 1):
            tail = Subspace.span([self.basis[i] for i in self.tail_indices(layer)], self.dim)
            if not tail.same_as(self.series_term(layer)):
                raise ValidationError(
                    f"Layers {layer}..{self.step} do not span the central series term n_{layer}"
                )


@dataclass(frozen=True)
class LatticeData:
    """
    Lattice declared through a Malcev basis strongly based at it.

    Lattice elements are exactly the integer-exponent Malcev words. Only the
    necessary condition that brackets of basis elements have integer
    coefficients is verified.
    """
    algebra: NilpotentLieAlgebra

    def __post_init__(self):
        for i in range(self.algebra.dim):
            for j in range(self.algebra.dim):
                for l, c in enumerate(self.algebra.constants[i][j]):
                    if not c.is_integer:
                        raise ValidationError(
                            f"Bracket [{self.algebra.labels[i]}, {self.algebra.labels[j]}] "
                            f"has non-integer coefficient {c} on {self.algebra.labels[l]}; "
                            f"basis cannot be strongly based at a lattice"
                        )
        logging.debug(
            "Strongly-based property accepted as declared; only integer brackets verified"
        )

    @cached_property
    def central_basis_indices(self) -> Tuple[int, ...]:
        algebra = self.algebra
        return tuple(
            i for i in range(algebra.dim) if algebra.center.contains(algebra.basis_vector(i))
        )

    def central_lattice_basis(self) -> List[Vector]:
        """Integer basis of log Z(Gamma) read off the central Malcev basis vectors."""
        indices = self.central_basis_indices
        basis = [self.algebra.basis_vector(i) for i in indices]
        if len(basis) != self.algebra.center.dim:
            logging.warning(
                "Centre is not spanned by Malcev basis vectors; log Z(Gamma) is "
                "approximated by the integer span of the central basis vectors"
            )
        return basis

    def euclidean_product(self, x: Vector, y: Vector) -> sp.Expr:
        """The Malcev basis is orthonormal."""
        return sp.expand((sp.ImmutableMatrix(x).T * sp.ImmutableMatrix(y))[0, 0])


def norm(v: Vector) -> sp.Expr:
    return sp.sqrt(sp.expand(sum(c ** 2 for c in v)))


def bracket(algebra: NilpotentLieAlgebra, x: VectorLike, y: VectorLike) -> VectorLike:
    return algebra.bracket(x, y)


def central_series(algebra: NilpotentLieAlgebra) -> List[Subspace]:
    return algebra.central_series()


def ad_matrix(algebra: NilpotentLieAlgebra, x: Vector) -> sp.ImmutableMatrix:
    return algebra.ad_matrix(x)


def bch_multiply(algebra: NilpotentLieAlgebra, x: VectorLike, y: VectorLike) -> VectorLike:
    return algebra.bch_multiply(x, y)
