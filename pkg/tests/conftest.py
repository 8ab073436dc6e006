"""Shared hypothesis strategies and helpers for the test suite."""
from __future__ import annotations

import math

from hypothesis import strategies as st

from crosswitch.fields import FieldSpec, PiecewiseSystem, Poly2

# Coefficients kept in a tame range so oracle comparisons stay well scaled.
coeffs = st.floats(min_value=-4.0, max_value=4.0, allow_nan=False,
                   allow_infinity=False).map(lambda c: 0.0 if abs(c) < 1e-12 else c)

nonzero_coeffs = st.one_of(
    st.floats(min_value=0.1, max_value=4.0),
    st.floats(min_value=-4.0, max_value=-0.1),
)

exponents = st.tuples(st.integers(0, 3), st.integers(0, 3))


@st.composite
def poly2(draw, max_terms: int = 5, include_constant: bool = False):
    n = draw(st.integers(0, max_terms))
    terms = [(i, j, draw(coeffs)) for i, j in draw(st.lists(exponents, min_size=n, max_size=n))]
    if include_constant:
        terms.append((0, 0, draw(nonzero_coeffs)))
    return Poly2(terms)


@st.composite
def field_spec(draw, nonzero_origin: bool = True):
    """A polynomial field; by default both components have a nonzero value at 0."""
    return FieldSpec(
        draw(poly2(include_constant=nonzero_origin)),
        draw(poly2(include_constant=nonzero_origin)),
    )


@st.composite
def generic_system(draw):
    """System whose four components are all nonzero at the origin."""
    return PiecewiseSystem(draw(field_spec()), draw(field_spec()))


points = st.tuples(
    st.floats(min_value=-2.0, max_value=2.0, allow_nan=False),
    st.floats(min_value=-2.0, max_value=2.0, allow_nan=False),
)


def close(a: float, b: float, tol: float = 1e-9) -> bool:
    """Mixed absolute/relative comparison used throughout the suite."""
    return abs(a - b) <= tol * (1.0 + abs(a) + abs(b))


def assert_close(a: float, b: float, tol: float = 1e-9, what: str = "") -> None:
    assert close(a, b, tol), f"{what} mismatch: {a!r} vs {b!r} (tol {tol})"


def is_finite_pair(p) -> bool:
    return math.isfinite(p[0]) and math.isfinite(p[1])
