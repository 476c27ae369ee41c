"""Hypothesis strategies shared by the property suites."""

from fractions import Fraction

import hypothesis.strategies as st

# Small exact rationals keep sympy simplification fast.
rationals = st.fractions(min_value=-5, max_value=5, max_denominator=6)
nonzero_rationals = rationals.filter(lambda q: q != 0)


def rational_vectors(dim: int):
    return st.lists(rationals, min_size=dim, max_size=dim).map(
        lambda values: [str(Fraction(v)) for v in values]
    )


@st.composite
def schwartz_recipes(draw, max_terms: int = 3):
    """Sums of gaussian(a), dgaussian(a) and hermite(n) terms with moderate widths."""
    terms = []
    for _ in range(draw(st.integers(min_value=1, max_value=max_terms))):
        coefficient = draw(st.integers(min_value=-3, max_value=3).filter(lambda c: c != 0))
        kind = draw(st.sampled_from(["gaussian", "dgaussian", "hermite", "tgauss"]))
        if kind == "hermite":
            atom = f"hermite({draw(st.integers(min_value=0, max_value=6))})"
        else:
            a = draw(st.fractions(min_value=Fraction(1, 2), max_value=3, max_denominator=4))
            if kind == "tgauss":
                atom = f"t^{draw(st.integers(min_value=1, max_value=3))}*gaussian({a})"
            else:
                atom = f"{kind}({a})"
        terms.append(f"{coefficient}*{atom}")
    return " + ".join(terms)
