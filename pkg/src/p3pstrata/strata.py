"""Geometric strata of camera centers for a fixed control triangle.

A center is Regular (four simple solutions), on the danger cylinder (one
double solution), on one of three Morley generatrices of that cylinder (a
triple solution), or on the circumcircle itself (a positive-dimensional
solution family).  This module holds the closed-form membership forms, the
Morley construction, and the classifier that ties them to the dual-space
multiplicity machinery.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from . import dualspace, forms
from .p3p import (CameraCenter, DegenerateTriangle, P3PInstance, Triangle,
                  _center_array, _known_array, detect_continuum, distances,
                  distances_sq_exact, instance_from_center, system_polys)
from .polynomials import SparsePoly
from .tolerances import DEFAULT_TOLERANCES, Tolerances


class CubicRootFailure(RuntimeError):
    """The generatrix-angle cubic did not yield three usable angles."""


class Stratum(enum.Enum):
    REGULAR = "Regular"
    DANGER_CYLINDER = "DangerCylinder"
    MORLEY_GENERATRIX = "MorleyGeneratrix"
    CIRCUMCIRCLE = "Circumcircle"
    DEGENERATE = "Degenerate"


@dataclass(frozen=True)
class StratumLabel:
    """Finest stratum containing the center, with the expected multiplicity."""
    kind: Stratum
    mu: Union[int, str, None]
    reason: str
    i3_degenerate: bool = False

    def as_dict(self) -> dict:
        return {"kind": self.kind.value, "mu": self.mu, "reason": self.reason,
                "i3_degenerate": self.i3_degenerate}


@dataclass
class MorleyData:
    """Morley triangle of the control triangle plus generatrix data.

    D, E, F are the trisector-intersection vertices nearest the sides
    opposite A, B, C respectively.  thetas are the circumcircle angles of
    the three generatrix base points, each lifted vertically to a line of
    triple solutions.
    """
    D: np.ndarray
    E: np.ndarray
    F: np.ndarray
    side: float
    thetas: np.ndarray
    generatrix_bases: np.ndarray


# -- membership forms -------------------------------------------------------


def danger_cylinder_value_e(t: Triangle, e=None, *, e_sq=None):
    """Cylinder form on solution triples; zero iff the center projects
    onto the circumcircle.

    Pass e_sq (exact squared distances) for Fraction arithmetic, or e for
    the float path.
    """
    p = forms.danger_cylinder_sq_poly(*t.sides_sq)
    if e_sq is not None:
        return p.eval_exact([v if isinstance(v, Fraction) else Fraction(v)
                             for v in e_sq])
    e = _known_array(e)
    return p.eval_float(e * e)


def danger_cylinder_value_xyz(t: Triangle, O):
    """Circle form x^2 + y^2 - x2*x + k*y at the center's plane projection.

    Exact when both the triangle placement and the center are rational.
    """
    place = t.exact_placement
    if isinstance(O, CameraCenter):
        Oex = O.exact()
        if place is not None and Oex is not None:
            x2, x3, y3 = place
            x, y, _ = Oex
            k = (x2 * x3 - x3 * x3 - y3 * y3) / y3
            return x * x + y * y - x2 * x + k * y
    arr = _center_array(O)
    x, y = float(arr[0]), float(arr[1])
    x2, x3, y3 = t.x2, t.x3, t.y3
    k = (x2 * x3 - x3 * x3 - y3 * y3) / y3
    return x * x + y * y - x2 * x + k * y


def circumcircle_data(t: Triangle) -> Tuple[Tuple[float, float], float]:
    """Circumcircle of the placed triangle: ((cx, cy), R)."""
    return t.circumcircle()


def cayley_menger_volume_sq(t: Triangle, e=None, *, e_sq=None):
    """Squared volume of the tetrahedron over the triangle with apex
    distances e: the bordered distance determinant over 288.
    """
    p = forms.cayley_menger_det_poly(*t.sides_sq)
    if e_sq is not None:
        v = p.eval_exact([x if isinstance(x, Fraction) else Fraction(x)
                          for x in e_sq])
        return v / 288
    e = _known_array(e)
    return p.eval_float(e * e) / 288.0


def i1_generators(t: Triangle) -> List[SparsePoly]:
    """Generators of the triple-solution locus, as polynomials in the
    distances; all four vanish along Morley generatrices."""
    return forms.i1_generator_polys(*t.sides_sq)


def _normalized_cylinder_value(t: Triangle, O) -> float:
    """Float cylinder membership value, scale-invariant.

    Coordinates are divided by the circumdiameter and the circle form is
    taken with unit leading coefficient, so the value is comparable to an
    absolute tolerance for any triangle size.
    """
    arr = _center_array(O)
    (cx, cy), R = t.circumcircle()
    d = 2.0 * R
    x, y = arr[0] / d, arr[1] / d
    # circle form in rescaled coordinates: (x-cx/d)^2 + (y-cy/d)^2 - 1/4
    return (x - cx / d) ** 2 + (y - cy / d) ** 2 - 0.25


def _on_cylinder(t: Triangle, O, tol: Tolerances) -> Tuple[bool, float]:
    place = t.exact_placement
    Oex = O.exact() if isinstance(O, CameraCenter) else None
    if place is not None and Oex is not None:
        val = danger_cylinder_value_xyz(t, O)
        if val == 0:
            return True, 0.0
    nv = _normalized_cylinder_value(t, O)
    return abs(nv) < tol.membership, nv


def _i3_flag(t: Triangle, O, tol: Tolerances) -> bool:
    """Plane projection at B, C, or the circumcircle antipode of A.

    These cylinder points carry a pseudo triple zero: a second solution
    collides only after sign folding, so they are kept in the double-zero
    stratum but flagged.
    """
    arr = _center_array(O)
    (cx, cy), R = t.circumcircle()
    p = np.array([arr[0], arr[1]])
    targets = [np.array([t.x2, 0.0]), np.array([t.x3, t.y3]),
               np.array([2 * cx, 2 * cy])]
    return any(np.linalg.norm(p - q) < tol.i3_rel * 2 * R for q in targets)


# -- Morley construction ----------------------------------------------------


def _angles(t: Triangle) -> Tuple[float, float, float]:
    q12, q13, q23 = (float(q) for q in t.sides_sq)
    s12, s13, s23 = t.s12, t.s13, t.s23
    A = math.acos((q12 + q13 - q23) / (2 * s12 * s13))
    B = math.acos((q12 + q23 - q13) / (2 * s12 * s23))
    C = math.acos((q13 + q23 - q12) / (2 * s13 * s23))
    return A, B, C


def _rot(v: np.ndarray, ang: float) -> np.ndarray:
    c, s = math.cos(ang), math.sin(ang)
    return np.array([c * v[0] - s * v[1], s * v[0] + c * v[1]])


def _ray_intersect(p1, d1, p2, d2) -> np.ndarray:
    M = np.column_stack([d1, -d2])
    ts = np.linalg.solve(M, p2 - p1)
    return p1 + ts[0] * d1


def morley_triangle(t: Triangle, tol: Tolerances = DEFAULT_TOLERANCES) -> MorleyData:
    """Morley triangle by adjacent interior trisector intersections.

    Each vertex is the meet of the two trisectors hugging one side; the
    result is equilateral for every triangle.  The generatrix angles are
    filled in as well.
    """
    A3, B3, C3 = (a / 3 for a in _angles(t))
    pA = np.array([0.0, 0.0])
    pB = np.array([t.x2, 0.0])
    pC = np.array([t.x3, t.y3])
    # vertices are CCW (y3 > 0): at each corner, rotating the ray toward the
    # next CCW vertex by +angle/3 sweeps into the interior
    D = _ray_intersect(pB, _rot(pC - pB, +B3), pC, _rot(pB - pC, -C3))
    E = _ray_intersect(pC, _rot(pA - pC, +C3), pA, _rot(pC - pA, -A3))
    F = _ray_intersect(pA, _rot(pB - pA, +A3), pB, _rot(pA - pB, -B3))
    sides = [np.linalg.norm(D - E), np.linalg.norm(E - F), np.linalg.norm(F - D)]
    side = float(np.mean(sides))
    thetas, bases = morley_angles(t, tol)
    return MorleyData(D=D, E=E, F=F, side=side, thetas=thetas,
                      generatrix_bases=bases)


def generatrix_sine_cubic(t: Triangle) -> np.ndarray:
    """Coefficients (descending) of the cubic whose roots are sin(theta)
    for the three generatrix angles."""
    q12, q13, q23 = (float(q) for q in t.sides_sq)
    K = q12 * t.s13 * t.s23
    m = q12 * q13 + q12 * q23 - q13 * q13 + 2 * q13 * q23 - q23 * q23
    return np.array([8 * K, 0.0, -6 * K, m])


def _probe_is_triple(t: Triangle, theta: float, tol: Tolerances) -> bool:
    (cx, cy), R = t.circumcircle()
    O = CameraCenter(cx + R * math.cos(theta), cy + R * math.sin(theta), R)
    inst = instance_from_center(t, O)
    xi = np.array(distances(t, O), dtype=complex)
    fs = system_polys(inst)
    return dualspace.macaulay_dual_dim(fs, xi, 2, tol.tau_rank) == 3


def morley_angles(t: Triangle, tol: Tolerances = DEFAULT_TOLERANCES
                  ) -> Tuple[np.ndarray, np.ndarray]:
    """Circumcircle angles of the three generatrix base points.

    The sines come from a cubic; the lift to angles follows the trisected
    angle-difference pattern, with the reflected alternatives (same sines,
    different bases) eliminated by a multiplicity probe at height R rather
    than trusted from symmetry.
    """
    coeffs = generatrix_sine_cubic(t)
    roots = np.roots(coeffs)
    if np.max(np.abs(roots.imag)) > 1e-8 * max(1.0, np.max(np.abs(roots.real))):
        raise CubicRootFailure(f"complex sine roots {roots}")
    sines = np.sort(roots.real)
    if np.max(np.abs(sines)) > 1 + 1e-9:
        raise CubicRootFailure(f"sine root outside [-1,1]: {sines}")

    A, B, _ = _angles(t)
    theta0 = A / 3 - B / 3 + math.pi / 6
    cands: List[float] = []
    for k in range(3):
        cands.append((theta0 + 2 * math.pi * k / 3) % (2 * math.pi))
        cands.append((math.pi - theta0 + 2 * math.pi * k / 3) % (2 * math.pi))
    dedup: List[float] = []
    for th in sorted(cands):
        if not any(abs(complex(math.cos(th), math.sin(th))
                       - complex(math.cos(u), math.sin(u))) < 1e-9 for u in dedup):
            dedup.append(th)
    kept = [th for th in dedup if _probe_is_triple(t, th, tol)]
    if len(kept) != 3:
        raise CubicRootFailure(
            f"generatrix probe kept {len(kept)} of {len(dedup)} candidates")
    thetas = np.array(sorted(kept))
    # sanity: the kept sines solve the cubic
    lead = coeffs[0]
    for th in thetas:
        r = float(np.polyval(coeffs, math.sin(th)) / lead)
        if abs(r) > 1e-10:
            raise CubicRootFailure(f"angle {th} has cubic residual {r:.2e}")
    (cx, cy), R = t.circumcircle()
    bases = np.array([[cx + R * math.cos(th), cy + R * math.sin(th)]
                      for th in thetas])
    return thetas, bases


# -- classifier --------------------------------------------------------------


def _collinear_with_side(t: Triangle, O) -> bool:
    arr = _center_array(O)
    V = t.vertices()
    for i in range(3):
        for j in range(i + 1, 3):
            d = V[j] - V[i]
            w = arr - V[i]
            if np.linalg.norm(np.cross(d, w)) < 1e-12 * np.linalg.norm(d) * max(
                    np.linalg.norm(w), t.side_scale):
                return True
    return False


def classify(t: Triangle, O: CameraCenter,
             tol: Tolerances = DEFAULT_TOLERANCES
             ) -> Tuple[StratumLabel, Optional[dualspace.DualSpaceReport]]:
    """Assign the finest stratum to a camera center.

    Order: degeneracies, then the solution continuum (where dual dimensions
    diverge and the eliminant test is decisive), then cylinder membership
    with the multiplicity deciding double against triple, else regular.
    """
    arr = _center_array(O)
    V = t.vertices()
    if min(np.linalg.norm(arr - V[i]) for i in range(3)) < 1e-12 * t.side_scale:
        return (StratumLabel(Stratum.DEGENERATE, None,
                             "center coincides with a control point"), None)
    if _collinear_with_side(t, O):
        return (StratumLabel(Stratum.DEGENERATE, None,
                             "center collinear with two control points"), None)

    inst = instance_from_center(t, O)
    on_cyl, cyl_val = _on_cylinder(t, O, tol)
    (cx, cy), R = t.circumcircle()
    xi = np.array(distances(t, O), dtype=complex)

    if on_cyl and abs(arr[2]) < 1e-6 * 2 * R and detect_continuum(inst, tol):
        report = dualspace.dual_space_report(inst, xi, tol)
        return (StratumLabel(Stratum.CIRCUMCIRCLE, "infinite_suspected",
                             "center on the circumcircle; perturbed eliminant "
                             "collapses (solution continuum)"), report)

    if on_cyl:
        report = dualspace.dual_space_report(inst, xi, tol)
        i3 = _i3_flag(t, O, tol)
        if i3:
            # projection at B, C, or A's antipode: a pseudo triple zero.
            # The extra colliding branch is a sign artifact, not a Morley
            # generatrix, so the label stays with the cylinder.
            return (StratumLabel(Stratum.DANGER_CYLINDER, report.mu,
                                 "on the danger cylinder above a degenerate "
                                 "base point (pseudo triple zero)",
                                 i3_degenerate=True), report)
        if report.mu == 3:
            gens = i1_generators(t)
            vals = []
            for g in gens:
                scale = g.max_abs_coeff() * (2 * R) ** g.degree()
                vals.append(abs(g.eval_float(xi.real)) / scale)
            report.diagnostics["i1_normalized"] = vals
            note = "" if max(vals) < 1e-6 else \
                "; warning: triple-locus generators not all small"
            return (StratumLabel(Stratum.MORLEY_GENERATRIX, 3,
                                 "on a Morley generatrix of the danger "
                                 f"cylinder (multiplicity 3){note}",
                                 i3_degenerate=i3), report)
        if report.mu == 2:
            return (StratumLabel(Stratum.DANGER_CYLINDER, 2,
                                 f"on the danger cylinder (|value| = "
                                 f"{abs(cyl_val):.2e} normalized)",
                                 i3_degenerate=i3), report)
        if report.mu == "infinite_suspected":
            if detect_continuum(inst, tol):
                return (StratumLabel(Stratum.CIRCUMCIRCLE, "infinite_suspected",
                                     "dual dimensions kept growing and the "
                                     "eliminant collapses"), report)
            return (StratumLabel(Stratum.DEGENERATE, report.mu,
                                 "multiplicity did not stabilize"), report)
        return (StratumLabel(Stratum.REGULAR, report.mu,
                             "cylinder value within tolerance but the "
                             "solution is numerically simple"), report)

    report = dualspace.dual_space_report(inst, xi, tol)
    return (StratumLabel(Stratum.REGULAR, report.mu,
                         f"off-cylinder (normalized value {cyl_val:.2e})"),
            report)
