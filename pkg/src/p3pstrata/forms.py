"""Closed-form polynomial generators for the singular strata.

All builders take the squared side lengths (exact rationals) and return
SparsePoly values.  Two variable conventions are used:

* E-space: 3 variables standing for the squared distances (e1^2, e2^2, e3^2);
  the natural home of the danger-cylinder form and the Cayley-Menger
  determinant, which are polynomials in squares.
* e-space: the same polynomial with every exponent doubled, evaluable
  directly at a distance triple.
"""
from __future__ import annotations

from fractions import Fraction
from typing import List

from .polynomials import SparsePoly


def _q(v) -> Fraction:
    if isinstance(v, Fraction):
        return v
    return Fraction(v)


def inflate_squares(p: SparsePoly) -> SparsePoly:
    """Rewrite a polynomial in squared variables as one in the plain variables."""
    return SparsePoly(p.nvars, {tuple(2 * a for a in m): c for m, c in p.terms.items()})


def danger_cylinder_sq_poly(q12, q13, q23) -> SparsePoly:
    """The cylinder criterion as a quadratic in (E1, E2, E3) = squared distances.

    Vanishes exactly when the camera center lies on the right cylinder over
    the circumcircle; proportional to the Jacobian determinant of the
    distance system times e1 e2 e3.
    """
    q12, q13, q23 = _q(q12), _q(q13), _q(q23)
    return SparsePoly(3, {
        (2, 0, 0): q23,
        (1, 1, 0): q12 - q13 - q23,
        (1, 0, 1): -q12 + q13 - q23,
        (0, 2, 0): q13,
        (0, 1, 1): -q12 - q13 + q23,
        (0, 0, 2): q12,
        (0, 0, 0): -q12 * q13 * q23,
    })


def danger_cylinder_poly(q12, q13, q23) -> SparsePoly:
    """The cylinder criterion as a quartic in the distances themselves."""
    return inflate_squares(danger_cylinder_sq_poly(q12, q13, q23))


def _det(mat: List[List[SparsePoly]]) -> SparsePoly:
    n = len(mat)
    if n == 1:
        return mat[0][0]
    out = SparsePoly.zero(mat[0][0].nvars)
    for j, entry in enumerate(mat[0]):
        if entry.is_zero():
            continue
        minor = [row[:j] + row[j + 1:] for row in mat[1:]]
        term = entry * _det(minor)
        out = out + term if j % 2 == 0 else out - term
    return out


def cayley_menger_det_poly(q12, q13, q23) -> SparsePoly:
    """Bordered distance determinant in (E1, E2, E3); equals 288 * volume^2.

    Vanishes exactly when the camera center is coplanar with the triangle.
    """
    q12, q13, q23 = _q(q12), _q(q13), _q(q23)
    c = lambda v: SparsePoly.constant(3, v)  # noqa: E731
    E1, E2, E3 = (SparsePoly.variable(i, 3) for i in range(3))
    M = [
        [c(0), c(1), c(1), c(1), c(1)],
        [c(1), c(0), c(q12), c(q13), E1],
        [c(1), c(q12), c(0), c(q23), E2],
        [c(1), c(q13), c(q23), c(0), E3],
        [c(1), E1, E2, E3, c(0)],
    ]
    return _det(M)


def g_generators_sq(q12, q13, q23) -> List[SparsePoly]:
    """The three generatrix-ideal generators, in (E1, E2, E3)."""
    q12, q13, q23 = _q(q12), _q(q13), _q(q23)
    g1 = SparsePoly(3, {
        (2, 0, 0): -q12 + q13,
        (1, 1, 0): -2 * q13,
        (1, 0, 1): 2 * q12,
        (0, 2, 0): q13,
        (0, 1, 0): -q12 * q13,
        (0, 0, 2): -q12,
        (0, 0, 1): q12 * q13,
    })
    g2 = SparsePoly(3, {
        (2, 0, 0): q23,
        (1, 1, 0): -2 * q23,
        (1, 0, 0): -q12 * q23,
        (0, 2, 0): -q12 + q23,
        (0, 1, 1): 2 * q12,
        (0, 0, 2): -q12,
        (0, 0, 1): q12 * q23,
    })
    g3 = SparsePoly(3, {
        (2, 0, 0): q23,
        (1, 0, 1): -2 * q23,
        (1, 0, 0): -q13 * q23,
        (0, 2, 0): -q13,
        (0, 1, 1): 2 * q13,
        (0, 1, 0): q13 * q23,
        (0, 0, 2): -q13 + q23,
    })
    return [g1, g2, g3]


def i1_generator_polys(q12, q13, q23) -> List[SparsePoly]:
    """Four generators of the generatrix ideal, in e-space.

    The first three are the displayed cubic-ideal generators; the fourth is
    the negated cylinder form (the ideal contains it).
    """
    gs = [inflate_squares(g) for g in g_generators_sq(q12, q13, q23)]
    gs.append(inflate_squares(-danger_cylinder_sq_poly(q12, q13, q23)))
    return gs


def cylinder_xyz_poly(t) -> SparsePoly:
    """The planar circle equation (x, y, z unused) cutting out the cylinder.

    x^2 + y^2 - x2 x + k y with k chosen so A, B, C lie on the circle; exact
    when the triangle placement is rational.
    """
    if t.exact_placement is not None:
        x2, x3, y3 = t.exact_placement
    else:
        x2, x3, y3 = Fraction(t.x2), Fraction(t.x3), Fraction(t.y3)
    k = (x2 * x3 - x3 * x3 - y3 * y3) / y3
    return SparsePoly(3, {
        (2, 0, 0): Fraction(1),
        (0, 2, 0): Fraction(1),
        (1, 0, 0): -x2,
        (0, 1, 0): k,
    })
