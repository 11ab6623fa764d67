"""P3P distance system: instances, solving, and camera-center recovery.

The unknowns are the three distances (e1, e2, e3) from the camera center to
the triangle vertices A, B, C.  Each pair gives a law-of-cosines quadric

    ei^2 + ej^2 - 2 cos(theta_ij) ei ej = sij^2

and the solver eliminates e1 through the classical ratio substitution
e2 = u e1, e3 = v e1, reducing to a degree-4 eliminant in u.  Solutions come
in +/- pairs; only the representative with Re(e1) >= 0 is reported.

Equation order everywhere is (f23, f13, f12): equation k omits variable e_k.
"""
from __future__ import annotations

import cmath
import math
import warnings
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .polynomials import SparsePoly
from .tolerances import DEFAULT_TOLERANCES, Tolerances


class DegenerateTriangle(ValueError):
    """Side lengths violate the strict triangle inequality."""


class VertexCoincidence(ValueError):
    """Camera center coincides with a triangle vertex."""


class CoplanarDegeneracy(ValueError):
    """Pose recovery needs O, A, B, C non-coplanar and A, B, C non-collinear."""


class InconsistentDistances(ValueError):
    """Distance triple does not correspond to any real camera center."""


class NumericalFailure(RuntimeError):
    """No eliminant root survived Newton polishing."""


class RootCountWarning(UserWarning):
    """Cluster multiplicities did not sum to the eliminant degree 4."""


class ContinuumDetected(Exception):
    """The instance has a positive-dimensional solution set.

    Raised when the degree-4 eliminant degenerates to the zero polynomial
    (camera center on the circumcircle).  Carries up to 16 representative
    solutions sampled along the circumcircle arc.
    """

    def __init__(self, message: str, representatives: List["SolutionTriple"]):
        super().__init__(message)
        self.representatives = representatives


def _exact(v) -> Fraction:
    """Exact rational value of a number (floats are exact binary rationals)."""
    if isinstance(v, Fraction):
        return v
    if isinstance(v, (int, str)):
        return Fraction(v)
    if isinstance(v, float):
        if not math.isfinite(v):
            raise ValueError("non-finite coordinate")
        return Fraction(v)
    raise TypeError(f"cannot treat {type(v).__name__} as exact rational")


def _fraction_sqrt(q: Fraction) -> Optional[Fraction]:
    """Exact square root of a non-negative rational, or None if irrational."""
    if q < 0:
        return None
    rn = math.isqrt(q.numerator)
    rd = math.isqrt(q.denominator)
    if rn * rn == q.numerator and rd * rd == q.denominator:
        return Fraction(rn, rd)
    return None


class Triangle:
    """Side lengths plus the canonical planar placement.

    A = (0,0,0), B = (x2,0,0), C = (x3,y3,0) with x2 = s12 and C in the upper
    half plane.  Squared side lengths are stored as exact rationals so that
    triangles with irrational sides but rational squared sides (e.g. the
    isosceles right fixture) keep an exact arithmetic path.
    """

    __slots__ = ("sq12", "sq13", "sq23", "s12", "s13", "s23",
                 "x2", "x3", "y3", "exact_placement")

    def __init__(self, sq12: Fraction, sq13: Fraction, sq23: Fraction):
        sq12, sq13, sq23 = Fraction(sq12), Fraction(sq13), Fraction(sq23)
        if min(sq12, sq13, sq23) <= 0:
            raise DegenerateTriangle("squared sides must be positive")
        heron16 = (2 * (sq12 * sq13 + sq13 * sq23 + sq12 * sq23)
                   - sq12 * sq12 - sq13 * sq13 - sq23 * sq23)
        if heron16 <= 0:
            raise DegenerateTriangle(
                f"triangle inequality fails for squared sides ({sq12}, {sq13}, {sq23})")
        self.sq12, self.sq13, self.sq23 = sq12, sq13, sq23
        self.s12 = math.sqrt(sq12)
        self.s13 = math.sqrt(sq13)
        self.s23 = math.sqrt(sq23)
        self.x2 = self.s12
        self.x3 = float(sq12 + sq13 - sq23) / (2.0 * self.s12)
        # y3 via the area: numerically stable for thin triangles
        self.y3 = math.sqrt(float(heron16)) / (2.0 * self.s12)
        self.exact_placement = self._exact_placement(heron16)

    def _exact_placement(self, heron16: Fraction):
        s12r = _fraction_sqrt(self.sq12)
        if s12r is None:
            return None
        x3 = (self.sq12 + self.sq13 - self.sq23) / (2 * s12r)
        y3 = _fraction_sqrt(self.sq13 - x3 * x3)
        if y3 is None or y3 == 0:
            return None
        return (s12r, x3, y3)

    @property
    def sides(self) -> Tuple[float, float, float]:
        return (self.s12, self.s13, self.s23)

    @property
    def sides_sq(self) -> Tuple[Fraction, Fraction, Fraction]:
        return (self.sq12, self.sq13, self.sq23)

    @property
    def side_scale(self) -> float:
        return math.sqrt(float(self.sq12 + self.sq13 + self.sq23))

    def vertices(self) -> np.ndarray:
        return np.array([[0.0, 0.0, 0.0],
                         [self.x2, 0.0, 0.0],
                         [self.x3, self.y3, 0.0]])

    def circumcircle(self) -> Tuple[Tuple[float, float], float]:
        """Center (in the placement plane) and radius of the circumcircle."""
        cx = 0.5 * self.x2
        cy = (self.x3 * self.x3 + self.y3 * self.y3 - self.x2 * self.x3) / (2.0 * self.y3)
        return (cx, cy), math.hypot(cx, cy)

    def exact_circumcircle(self):
        """((cx, cy), R^2) as Fractions when the placement is rational."""
        if self.exact_placement is None:
            return None
        x2, x3, y3 = self.exact_placement
        cx = x2 / 2
        cy = (x3 * x3 + y3 * y3 - x2 * x3) / (2 * y3)
        return (cx, cy), cx * cx + cy * cy

    def __repr__(self):
        return f"Triangle(s12={self.s12:.6g}, s13={self.s13:.6g}, s23={self.s23:.6g})"


def make_triangle(s12, s13, s23) -> Triangle:
    """Triangle from side lengths (exact when the inputs are exact)."""
    q = [_exact(s) for s in (s12, s13, s23)]
    if min(q) <= 0:
        raise DegenerateTriangle("sides must be positive")
    return Triangle(q[0] * q[0], q[1] * q[1], q[2] * q[2])


def triangle_from_squared_sides(sq12, sq13, sq23) -> Triangle:
    """Triangle from squared side lengths; keeps irrational sides exact."""
    return Triangle(_exact(sq12), _exact(sq13), _exact(sq23))


@dataclass(frozen=True)
class CameraCenter:
    """A camera center in the triangle placement frame."""
    x: float
    y: float
    z: float

    def as_array(self) -> np.ndarray:
        return np.array([float(self.x), float(self.y), float(self.z)])

    def exact(self) -> Tuple[Fraction, Fraction, Fraction]:
        return (_exact(self.x), _exact(self.y), _exact(self.z))

    def mirrored(self) -> "CameraCenter":
        return CameraCenter(self.x, self.y, -self.z)


def _center_array(O) -> np.ndarray:
    if isinstance(O, CameraCenter):
        return O.as_array()
    arr = np.asarray(O, dtype=float)
    if arr.shape != (3,):
        raise ValueError("camera center must have 3 coordinates")
    return arr


@dataclass(frozen=True)
class P3PInstance:
    """A triangle plus the three viewing-angle cosines of system (pairwise quadrics)."""
    triangle: Triangle
    cos12: float
    cos13: float
    cos23: float

    @property
    def cosines(self) -> Tuple[float, float, float]:
        return (float(self.cos12), float(self.cos13), float(self.cos23))


@dataclass(frozen=True)
class SolutionTriple:
    """One solution of the distance system, with residual bookkeeping.

    residual is max |equation value| over the three quadrics (absolute;
    compare against tolerances relative to s12^2).  multiplicity_hint is the
    post-polish root-cluster size, when the solver computed one.
    """
    e1: complex
    e2: complex
    e3: complex
    residual: float
    is_physical: bool
    multiplicity_hint: Optional[int] = None

    @property
    def e(self) -> np.ndarray:
        return np.array([self.e1, self.e2, self.e3])


@dataclass(frozen=True)
class Pose:
    """Rigid camera pose: world point X maps to R X + t in the camera frame."""
    R: np.ndarray
    t: np.ndarray

    def transform(self, X) -> np.ndarray:
        return np.asarray(X, dtype=float) @ self.R.T + self.t


def distances(t: Triangle, O) -> Tuple[float, float, float]:
    """Euclidean distances from the center to A, B, C."""
    p = _center_array(O)
    d = np.linalg.norm(t.vertices() - p[None, :], axis=1)
    return (float(d[0]), float(d[1]), float(d[2]))


def distances_sq_exact(t: Triangle, O) -> Optional[Tuple[Fraction, Fraction, Fraction]]:
    """Exact squared distances, when the placement is rational; else None."""
    if t.exact_placement is None:
        return None
    if isinstance(O, CameraCenter):
        x, y, z = O.exact()
    else:
        x, y, z = (_exact(v) for v in O)
    x2, x3, y3 = t.exact_placement
    e1 = x * x + y * y + z * z
    e2 = (x - x2) * (x - x2) + y * y + z * z
    e3 = (x - x3) * (x - x3) + (y - y3) * (y - y3) + z * z
    return (e1, e2, e3)


def instance_from_center(t: Triangle, O) -> P3PInstance:
    """Build the instance whose cosines a camera at O would observe."""
    e1, e2, e3 = distances(t, O)
    if min(e1, e2, e3) < 1e-12 * t.side_scale:
        raise VertexCoincidence("camera center coincides with a triangle vertex")
    q12, q13, q23 = (float(q) for q in t.sides_sq)
    c12 = (e1 * e1 + e2 * e2 - q12) / (2.0 * e1 * e2)
    c13 = (e1 * e1 + e3 * e3 - q13) / (2.0 * e1 * e3)
    c23 = (e2 * e2 + e3 * e3 - q23) / (2.0 * e2 * e3)
    return P3PInstance(t, c12, c13, c23)


def system_polys(inst: P3PInstance) -> Tuple[SparsePoly, SparsePoly, SparsePoly]:
    """The three quadrics in (e1, e2, e3), order (f23, f13, f12)."""
    c12, c13, c23 = (_exact(c) for c in inst.cosines)
    q12, q13, q23 = inst.triangle.sides_sq

    def quadric(i, j, c, q):
        terms = {}
        ei = [0, 0, 0]
        ei[i] = 2
        terms[tuple(ei)] = Fraction(1)
        ej = [0, 0, 0]
        ej[j] = 2
        terms[tuple(ej)] = Fraction(1)
        eij = [0, 0, 0]
        eij[i] = eij[j] = 1
        terms[tuple(eij)] = -2 * c
        terms[(0, 0, 0)] = -q
        return SparsePoly(3, terms)

    return (quadric(1, 2, c23, q23),
            quadric(0, 2, c13, q13),
            quadric(0, 1, c12, q12))


def _fvals(e: np.ndarray, c, q) -> np.ndarray:
    e1, e2, e3 = e
    return np.array([
        e2 * e2 + e3 * e3 - 2.0 * c[2] * e2 * e3 - q[2],
        e1 * e1 + e3 * e3 - 2.0 * c[1] * e1 * e3 - q[1],
        e1 * e1 + e2 * e2 - 2.0 * c[0] * e1 * e2 - q[0]])


def _fjac(e: np.ndarray, c) -> np.ndarray:
    e1, e2, e3 = e
    return np.array([
        [0.0, 2.0 * (e2 - c[2] * e3), 2.0 * (e3 - c[2] * e2)],
        [2.0 * (e1 - c[1] * e3), 0.0, 2.0 * (e3 - c[1] * e1)],
        [2.0 * (e1 - c[0] * e2), 2.0 * (e2 - c[0] * e1), 0.0]])


def _polish(e0: np.ndarray, c, q, tol: Tolerances) -> Tuple[np.ndarray, float]:
    """Newton iteration on the full 3x3 system; returns best point seen."""
    scale = math.sqrt(sum(q))
    e = e0.astype(complex)
    best = e.copy()
    best_res = float(np.max(np.abs(_fvals(e, c, q))))
    for _ in range(tol.newton_max_iter):
        fv = _fvals(e, c, q)
        J = _fjac(e, c)
        try:
            step = np.linalg.solve(J, -fv)
        except np.linalg.LinAlgError:
            step, *_ = np.linalg.lstsq(J, -fv, rcond=None)
        if not np.all(np.isfinite(step.view(float))):
            break
        e = e + step
        if np.linalg.norm(e) > 1e8 * scale:
            break
        res = float(np.max(np.abs(_fvals(e, c, q))))
        if res < best_res:
            best, best_res = e.copy(), res
        if np.linalg.norm(step) < tol.newton_step_rel * (1.0 + np.linalg.norm(e)):
            break
    return best, best_res


def _canonical_sign(e: np.ndarray) -> np.ndarray:
    """Pick the +/- pair representative: Re(e1) >= 0, ties on Re(e2), Re(e3)."""
    for comp in e:
        if comp.real > 0:
            return e
        if comp.real < 0:
            return -e
    for comp in e:
        if comp.imag > 0:
            return e
        if comp.imag < 0:
            return -e
    return e


def _quartic_coeffs(q12, q13, q23, c12, c13, c23) -> np.ndarray:
    """Descending coefficients of the degree-4 eliminant in u = e2/e1.

    Resultant in v of the two conics obtained after eliminating e1^2, divided
    by q12^2 so the coefficients are homogeneous of degree 2 in the squared
    sides.
    """
    A = np.array([1.0, -2.0 * c12, 1.0])
    cpoly = q13 * A - np.array([0.0, 0.0, q12])
    fpoly = q23 * A - np.array([q12, 0.0, 0.0])
    b = 2.0 * c13 * q12
    epoly = np.array([2.0 * c23 * q12, 0.0])
    af_cd = q12 * np.polysub(cpoly, fpoly)
    ae_bd = q12 * np.polysub(np.array([b]), epoly)
    bf_ce = np.polysub(b * fpoly, np.polymul(cpoly, epoly))
    quart = np.polysub(np.polymul(af_cd, af_cd), np.polymul(ae_bd, bf_ce))
    return quart / (q12 * q12)


_ANCHOR_PERMS = ((0, 1, 2), (1, 0, 2), (2, 1, 0))


def _solve_anchor(qmat: np.ndarray, cmat: np.ndarray, perm, c_orig, q_orig,
                  tol: Tolerances) -> Tuple[List[Tuple[np.ndarray, float]], int]:
    """Solve with variables reordered by perm; returns (polished roots, deficit)."""
    p = list(perm)
    Q = qmat[np.ix_(p, p)]
    C = cmat[np.ix_(p, p)]
    q12, q13, q23 = Q[0, 1], Q[0, 2], Q[1, 2]
    c12, c13, c23 = C[0, 1], C[0, 2], C[1, 2]
    quart = _quartic_coeffs(q12, q13, q23, c12, c13, c23)
    coeff_scale = float(np.max(np.abs(quart)))
    if coeff_scale == 0.0:
        return [], 4
    trimmed = quart.copy()
    deficit = 0
    while len(trimmed) > 1 and abs(trimmed[0]) < 1e-12 * coeff_scale:
        trimmed = trimmed[1:]
        deficit += 1
    roots = np.roots(trimmed) if len(trimmed) > 1 else np.array([])
    out: List[Tuple[np.ndarray, float]] = []
    for u in roots:
        A_u = u * u - 2.0 * c12 * u + 1.0
        if abs(A_u) < 1e-14 * (1.0 + abs(u) ** 2):
            deficit += 1
            continue
        c_u = q13 * A_u - q12
        f_u = q23 * A_u - q12 * u * u
        denom = 2.0 * q12 * (c23 * u - c13)
        if abs(denom) > 1e-10 * q12 * (1.0 + abs(u)):
            v = (c_u - f_u) / denom
        else:
            # conics share the v^2 coefficient; fall back to the roots of P1
            vroots = np.roots([-q12, 2.0 * c13 * q12, c_u])
            v = min(vroots, key=lambda vv: abs(-q12 * vv * vv + 2.0 * c23 * q12 * u * vv + f_u))
        e1 = cmath.sqrt(q12 / A_u)
        e_perm = np.array([e1, u * e1, v * e1])
        e_full = np.empty(3, dtype=complex)
        for i in range(3):
            e_full[p[i]] = e_perm[i]
        polished, res = _polish(e_full, c_orig, q_orig, tol)
        out.append((polished, res))
    return out, deficit


def _cluster(points: List[Tuple[np.ndarray, float]], radius: float
             ) -> List[Tuple[np.ndarray, float, int]]:
    """Greedy clustering of polished roots; representative = best residual."""
    clusters: List[List[Tuple[np.ndarray, float]]] = []
    for e, res in points:
        for cl in clusters:
            if np.linalg.norm(cl[0][0] - e) < radius:
                cl.append((e, res))
                break
        else:
            clusters.append([(e, res)])
    out = []
    for cl in clusters:
        rep, res = min(cl, key=lambda pr: pr[1])
        out.append((rep, res, len(cl)))
    return out


def _make_solution(e: np.ndarray, res: float, hint: Optional[int],
                   scale: float, tol: Tolerances) -> SolutionTriple:
    e = _canonical_sign(e)
    imag_tol = tol.imag_tol_rel * scale
    physical = bool(np.all(np.abs(e.imag) <= imag_tol) and np.all(e.real > 0))
    return SolutionTriple(complex(e[0]), complex(e[1]), complex(e[2]),
                          float(res), physical, hint)


def solve(inst: P3PInstance, tol: Tolerances = DEFAULT_TOLERANCES) -> List[SolutionTriple]:
    """All solutions of the distance system, one representative per +/- pair.

    Raises ContinuumDetected when the eliminant degenerates (center on the
    circumcircle) and NumericalFailure when no root survives polishing.
    Emits RootCountWarning when cluster multiplicities do not sum to 4.
    """
    c = np.array(inst.cosines)
    if np.any(np.abs(c) >= 1.0):
        raise ValueError("cosines must lie strictly inside (-1, 1)")
    q = np.array([float(v) for v in inst.triangle.sides_sq])
    if detect_continuum(inst, tol):
        raise ContinuumDetected(
            "degenerate eliminant: positive-dimensional solution set",
            _continuum_representatives(inst, tol))
    qmat = np.zeros((3, 3))
    qmat[0, 1] = qmat[1, 0] = q[0]
    qmat[0, 2] = qmat[2, 0] = q[1]
    qmat[1, 2] = qmat[2, 1] = q[2]
    cmat = np.zeros((3, 3))
    cmat[0, 1] = cmat[1, 0] = c[0]
    cmat[0, 2] = cmat[2, 0] = c[1]
    cmat[1, 2] = cmat[2, 1] = c[2]

    scale = math.sqrt(float(np.sum(q)))
    res_accept = tol.residual_rel * q[0]
    best: Optional[Tuple[List[Tuple[np.ndarray, float]], int, int]] = None
    for perm in _ANCHOR_PERMS:
        polished, deficit = _solve_anchor(qmat, cmat, perm, c, q, tol)
        good = [(e, r) for e, r in polished if r <= res_accept]
        anchored_ok = all(abs(e[perm[0]]) > 1e-8 * scale for e, _ in good)
        if len(good) + deficit == 4 and len(good) == len(polished) and anchored_ok:
            best = (polished, deficit, len(good))
            break
        if best is None or len(good) > best[2]:
            best = (polished, deficit, len(good))
    polished, deficit, _ = best

    radius = tol.cluster_radius_rel * scale
    canon = [( _canonical_sign(e), r) for e, r in polished]
    kept = [(e, r) for e, r in canon if r <= res_accept]
    dropped = len(canon) - len(kept)
    if not kept:
        raise NumericalFailure("Newton polish failed on every eliminant root")
    clusters = _cluster(kept, radius)
    total = sum(size for _, _, size in clusters) + deficit + dropped
    if total != 4:
        warnings.warn(RootCountWarning(
            f"root multiplicities sum to {total}, expected 4 "
            f"(deficit {deficit}, dropped {dropped})"))
    elif deficit or dropped:
        warnings.warn(RootCountWarning(
            f"{deficit} root(s) at infinity, {dropped} dropped by residual"))
    sols = [_make_solution(e, r, size, scale, tol) for e, r, size in clusters]
    sols.sort(key=lambda s: (round(s.e1.real, 9), round(s.e1.imag, 9),
                             round(s.e2.real, 9), round(s.e2.imag, 9),
                             round(s.e3.real, 9)))
    return sols


def _known_array(known) -> np.ndarray:
    if isinstance(known, SolutionTriple):
        return known.e
    arr = np.asarray(known, dtype=complex)
    if arr.shape != (3,):
        raise ValueError("known solution must have 3 components")
    return arr


def complementary_solutions(inst: P3PInstance, known,
                            tol: Tolerances = DEFAULT_TOLERANCES) -> List[SolutionTriple]:
    """Solutions of inst cluster-separated from the known one."""
    k = _known_array(known)
    radius = tol.cluster_radius_rel * inst.triangle.side_scale
    out = []
    for s in solve(inst, tol):
        d = min(np.linalg.norm(s.e - k), np.linalg.norm(s.e + k))
        if d > radius:
            out.append(s)
    return out


def detect_continuum(inst: P3PInstance, tol: Tolerances = DEFAULT_TOLERANCES) -> bool:
    """True iff the degree-4 eliminant is numerically the zero polynomial.

    The coefficient scale is taken from a deterministic cosine perturbation
    of the same instance, so the test is relative, not absolute.
    """
    q = np.array([float(v) for v in inst.triangle.sides_sq])
    qn = q / q[0]
    c = np.array(inst.cosines)
    coeffs = _quartic_coeffs(qn[0], qn[1], qn[2], c[0], c[1], c[2])
    delta = 1e-3 * (1.0 - np.abs(c)) * np.array([1.0, -1.0, 1.0])
    cp = c + delta
    ref = _quartic_coeffs(qn[0], qn[1], qn[2], cp[0], cp[1], cp[2])
    scale = float(np.max(np.abs(ref)))
    if scale == 0.0:
        return True
    return float(np.max(np.abs(coeffs))) <= tol.continuum_rel * scale


def _continuum_representatives(inst: P3PInstance, tol: Tolerances,
                               count: int = 16) -> List[SolutionTriple]:
    """Sample solutions along the circumcircle arc that realizes the cosines."""
    t = inst.triangle
    (cx, cy), R = t.circumcircle()
    c = np.array(inst.cosines)
    q = np.array([float(v) for v in t.sides_sq])
    scale = t.side_scale
    kept = []
    for phi in np.linspace(0.0, 2.0 * math.pi, 256, endpoint=False):
        p = (cx + R * math.cos(phi), cy + R * math.sin(phi), 0.0)
        e = np.array(distances(t, p), dtype=complex)
        if np.min(np.abs(e)) < 1e-9 * scale:
            continue
        res = float(np.max(np.abs(_fvals(e, c, q))))
        if res < 1e-8 * q[0]:
            kept.append(_make_solution(e, res, None, scale, tol))
    if len(kept) > count:
        idx = np.linspace(0, len(kept) - 1, count).astype(int)
        kept = [kept[i] for i in idx]
    return kept


def locate_center(t: Triangle, sol,
                  tol: Tolerances = DEFAULT_TOLERANCES) -> Tuple[CameraCenter, CameraCenter]:
    """The +/- z mirror pair of centers realizing a real distance triple.

    Only the squared distances enter, so real solutions with mixed signs are
    accepted (their centers are genuine).  Complex or zero components raise
    InconsistentDistances, as does z^2 below the clamping window.
    """
    e = _known_array(sol)
    scale = t.side_scale
    if np.max(np.abs(e.imag)) > tol.imag_tol_rel * scale:
        raise InconsistentDistances("complex distance triple has no real center")
    er = np.abs(e.real)
    if np.min(er) < 1e-12 * scale:
        raise InconsistentDistances("zero distance component")
    sq1, sq2, sq3 = er ** 2
    x2, x3, y3 = t.x2, t.x3, t.y3
    x = (x2 * x2 + sq1 - sq2) / (2.0 * x2)
    y = (x3 * x3 + y3 * y3 + sq1 - sq3 - 2.0 * x * x3) / (2.0 * y3)
    z2 = sq1 - x * x - y * y
    _, R = t.circumcircle()
    if z2 < -tol.z_clamp * (2.0 * R) ** 2:
        raise InconsistentDistances(f"negative squared height {z2:.3e}")
    z = math.sqrt(max(z2, 0.0))
    return (CameraCenter(x, y, z), CameraCenter(x, y, -z))


def recover_pose(sol: SolutionTriple, X, x) -> Pose:
    """Camera pose from one physical solution and the 3D/2D correspondences.

    X: rows are the world points A, B, C; x: rows are the unit bearing
    vectors in the camera frame.  Maps ei * xi = R Xi + t.
    """
    if not sol.is_physical:
        raise ValueError("pose recovery needs a physical (real positive) solution")
    X = np.asarray(X, dtype=float)
    x = np.asarray(x, dtype=float)
    if X.shape != (3, 3) or x.shape != (3, 3):
        raise ValueError("X and x must be 3x3 (one point per row)")
    e = np.array([sol.e1.real, sol.e2.real, sol.e3.real])
    p = e[:, None] * x
    pscale = np.prod(np.linalg.norm(p, axis=1))
    if abs(np.linalg.det(p.T)) < 1e-10 * pscale:
        raise CoplanarDegeneracy("camera center is coplanar with the object points")
    n1, n2 = X[0] - X[1], X[2] - X[0]
    n3 = np.cross(n1, n2)
    if np.linalg.norm(n3) < 1e-12 * np.linalg.norm(n1) * np.linalg.norm(n2):
        raise CoplanarDegeneracy("object points are collinear")
    m1, m2 = p[0] - p[1], p[2] - p[0]
    M = np.column_stack([m1, m2, np.cross(m1, m2)])
    N = np.column_stack([n1, n2, n3])
    R = M @ np.linalg.inv(N)
    tvec = p[0] - R @ X[0]
    return Pose(R, tvec)
