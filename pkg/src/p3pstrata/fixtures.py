"""The seven reference triangles and their complementary-surface components.

For each triangle the degree-2 locus of complementary solutions in
(e1', e2', e3') decomposes into coordinate planes, six quadrics (apple and
lemon surfaces, in three +/- pairs that merge or fuse into quartics for
special shapes), the quartic cylinder form, and one irreducible degree-16
surface.  Everything transcribed here is exact; the degree-16 component is
reachable only through fitting, so only its five leading coefficients (the
e1'^8 e2'^(8-2j) e3'^(2j) terms) are recorded for ratio checks.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional, Tuple

from .p3p import Triangle, triangle_from_squared_sides
from .polynomials import Monomial, SparsePoly


@dataclass(frozen=True)
class FixtureComponent:
    """One displayed component of the complementary locus."""
    name: str
    poly: SparsePoly
    kind: str  # "quadric" | "quartic" | "trivial"
    trivial: bool = False


@dataclass(frozen=True)
class FixtureTriangle:
    name: str
    key: str
    sides: Tuple[float, float, float]
    sides_sq: Tuple[Fraction, Fraction, Fraction]
    triangle: Triangle
    components: Tuple[FixtureComponent, ...]
    deg16_leading: Dict[Monomial, int]

    def nontrivial_components(self) -> List[FixtureComponent]:
        return [c for c in self.components if not c.trivial]


def _poly(terms: Dict[Monomial, int]) -> SparsePoly:
    return SparsePoly(3, {m: Fraction(c) for m, c in terms.items()})


def _quadric_pair(i: int, j: int, a: int, b: int, const: int
                  ) -> List[FixtureComponent]:
    """a*ei^2 -/+ b*ei*ej + a*ej^2 - const, named by the sign of the cross
    term; b = 0 collapses the pair to a single circle quadric."""
    sq_i = tuple(2 if k == i else 0 for k in range(3))
    sq_j = tuple(2 if k == j else 0 for k in range(3))
    cross = tuple((1 if k in (i, j) else 0) for k in range(3))
    tag = f"e{i + 1}e{j + 1}"
    if b == 0:
        p = _poly({sq_i: a, sq_j: a, (0, 0, 0): -const})
        return [FixtureComponent(f"quadric_{tag}", p, "quadric")]
    out = []
    for sgn, word in ((-1, "minus"), (+1, "plus")):
        p = _poly({sq_i: a, cross: sgn * b, sq_j: a, (0, 0, 0): -const})
        out.append(FixtureComponent(f"quadric_{tag}_{word}", p, "quadric"))
    return out


def _trivials() -> List[FixtureComponent]:
    return [FixtureComponent(f"axis_e{i + 1}",
                             SparsePoly(3, {tuple(1 if k == i else 0
                                                  for k in range(3)): Fraction(1)}),
                             "trivial", trivial=True)
            for i in range(3)]


def _cyl_quartic(terms: Dict[Monomial, int]) -> FixtureComponent:
    return FixtureComponent("quartic_cylinder", _poly(terms), "quartic")


def _build() -> List[FixtureTriangle]:
    out = []

    # equilateral (1,1,1): the three +/- quadric pairs share one shape; the
    # quartic cylinder form is the displayed degree-4 component
    comps = (_quadric_pair(0, 1, 1, 1, 1) + _quadric_pair(0, 2, 1, 1, 1)
             + _quadric_pair(1, 2, 1, 1, 1)
             + [_cyl_quartic({(4, 0, 0): 1, (2, 2, 0): -1, (2, 0, 2): -1,
                              (0, 4, 0): 1, (0, 2, 2): -1, (0, 0, 4): 1,
                              (0, 0, 0): -1})]
             + _trivials())
    out.append(FixtureTriangle(
        "equilateral", "1-1-1", (1.0, 1.0, 1.0),
        (Fraction(1), Fraction(1), Fraction(1)),
        triangle_from_squared_sides(1, 1, 1), tuple(comps),
        {(8, 8, 0): 3, (8, 6, 2): -6, (8, 4, 4): 9, (8, 2, 6): -6,
         (8, 0, 8): 3}))

    # isosceles right (sqrt2,1,1): the 13 and 23 pairs have irrational cross
    # terms and are displayed fused as quartic pair products
    comps = (_quadric_pair(0, 1, 1, 0, 2)
             + [FixtureComponent("quartic_e1e3_pair",
                                 _poly({(4, 0, 0): 1, (0, 0, 4): 1,
                                        (2, 0, 0): -2, (0, 0, 2): -2,
                                        (0, 0, 0): 1}), "quartic"),
                FixtureComponent("quartic_e2e3_pair",
                                 _poly({(0, 4, 0): 1, (0, 0, 4): 1,
                                        (0, 2, 0): -2, (0, 0, 2): -2,
                                        (0, 0, 0): 1}), "quartic"),
                _cyl_quartic({(4, 0, 0): 1, (2, 0, 2): -2, (0, 4, 0): 1,
                              (0, 2, 2): -2, (0, 0, 4): 2, (0, 0, 0): -2})]
             + _trivials())
    out.append(FixtureTriangle(
        "isosceles_right", "sqrt2-1-1", (2.0 ** 0.5, 1.0, 1.0),
        (Fraction(2), Fraction(1), Fraction(1)),
        triangle_from_squared_sides(2, 1, 1), tuple(comps),
        {(8, 8, 0): 4, (8, 6, 2): -8, (8, 4, 4): 8, (8, 2, 6): -4,
         (8, 0, 8): 1}))

    # isosceles acute (4,3,3)
    comps = (_quadric_pair(0, 1, 9, 2, 144) + _quadric_pair(0, 2, 3, 4, 27)
             + _quadric_pair(1, 2, 3, 4, 27)
             + [_cyl_quartic({(4, 0, 0): 9, (2, 2, 0): -2, (2, 0, 2): -16,
                              (0, 4, 0): 9, (0, 2, 2): -16, (0, 0, 4): 16,
                              (0, 0, 0): -1296})]
             + _trivials())
    out.append(FixtureTriangle(
        "isosceles_acute", "4-3-3", (4.0, 3.0, 3.0),
        (Fraction(16), Fraction(9), Fraction(9)),
        triangle_from_squared_sides(16, 9, 9), tuple(comps),
        {(8, 8, 0): 1280, (8, 6, 2): -2560, (8, 4, 4): 2720,
         (8, 2, 6): -1440, (8, 0, 8): 405}))

    # isosceles obtuse (5,3,3)
    comps = (_quadric_pair(0, 1, 9, 7, 225) + _quadric_pair(0, 2, 3, 5, 27)
             + _quadric_pair(1, 2, 3, 5, 27)
             + [_cyl_quartic({(4, 0, 0): 9, (2, 2, 0): 7, (2, 0, 2): -25,
                              (0, 4, 0): 9, (0, 2, 2): -25, (0, 0, 4): 25,
                              (0, 0, 0): -2025})]
             + _trivials())
    out.append(FixtureTriangle(
        "isosceles_obtuse", "5-3-3", (5.0, 3.0, 3.0),
        (Fraction(25), Fraction(9), Fraction(9)),
        triangle_from_squared_sides(25, 9, 9), tuple(comps),
        {(8, 8, 0): 6875, (8, 6, 2): -13750, (8, 4, 4): 11825,
         (8, 2, 6): -4950, (8, 0, 8): 891}))

    # general right (5,4,3): the 12 pair merges (right angle at C)
    comps = (_quadric_pair(0, 1, 1, 0, 25) + _quadric_pair(0, 2, 5, 6, 80)
             + _quadric_pair(1, 2, 5, 8, 45)
             + [_cyl_quartic({(4, 0, 0): 9, (2, 0, 2): -18, (0, 4, 0): 16,
                              (0, 2, 2): -32, (0, 0, 4): 25,
                              (0, 0, 0): -3600})]
             + _trivials())
    out.append(FixtureTriangle(
        "general_right", "5-4-3", (5.0, 4.0, 3.0),
        (Fraction(25), Fraction(16), Fraction(9)),
        triangle_from_squared_sides(25, 16, 9), tuple(comps),
        {(8, 8, 0): 625, (8, 6, 2): -1600, (8, 4, 4): 1824,
         (8, 2, 6): -1024, (8, 0, 8): 256}))

    # general obtuse (7,5,3)
    comps = (_quadric_pair(0, 1, 1, 1, 49) + _quadric_pair(0, 2, 7, 11, 175)
             + _quadric_pair(1, 2, 7, 13, 63)
             + [_cyl_quartic({(4, 0, 0): 9, (2, 2, 0): 15, (2, 0, 2): -33,
                              (0, 4, 0): 25, (0, 2, 2): -65, (0, 0, 4): 49,
                              (0, 0, 0): -11025})]
             + _trivials())
    out.append(FixtureTriangle(
        "general_obtuse", "7-5-3", (7.0, 5.0, 3.0),
        (Fraction(49), Fraction(25), Fraction(9)),
        triangle_from_squared_sides(49, 25, 9), tuple(comps),
        {(8, 8, 0): 7203, (8, 6, 2): -19110, (8, 4, 4): 20025,
         (8, 2, 6): -9750, (8, 0, 8): 1875}))

    # general acute (7,6,5): the main worked example
    comps = (_quadric_pair(0, 1, 5, 2, 245) + _quadric_pair(0, 2, 35, 38, 1260)
             + _quadric_pair(1, 2, 7, 10, 175)
             + [_cyl_quartic({(4, 0, 0): 25, (2, 2, 0): -12, (2, 0, 2): -38,
                              (0, 4, 0): 36, (0, 2, 2): -60, (0, 0, 4): 49,
                              (0, 0, 0): -44100})]
             + _trivials())
    out.append(FixtureTriangle(
        "general_acute", "7-6-5", (7.0, 6.0, 5.0),
        (Fraction(49), Fraction(36), Fraction(25)),
        triangle_from_squared_sides(49, 36, 25), tuple(comps),
        {(8, 8, 0): 57624, (8, 6, 2): -141120, (8, 4, 4): 171072,
         (8, 2, 6): -103680, (8, 0, 8): 31104}))

    return out


_FIXTURES = None


def load_fixtures() -> List[FixtureTriangle]:
    """The seven reference triangles, ordered from most to least symmetric."""
    global _FIXTURES
    if _FIXTURES is None:
        _FIXTURES = _build()
    return list(_FIXTURES)


def fixture_by_name(name: str) -> FixtureTriangle:
    """Look up a fixture by name (e.g. "general_acute") or key ("7-6-5")."""
    for f in load_fixtures():
        if name in (f.name, f.key):
            return f
    raise KeyError(f"no fixture named {name!r}; have "
                   + ", ".join(f.name for f in load_fixtures()))
