"""Complementary solutions swept over the danger cylinder and the deltoidal
surface they trace.

Every camera center on the cylinder has one double solution and (generically)
two simple complementary ones.  Re-located in space, the complementary
centers fill a surface of degree 12 that hugs the cylinder from inside,
touching it along the three Morley generatrices and meeting it at the
circumcircle; in distance coordinates the surface has degree 16.  This
module sweeps, fits both models, and verifies the tangency and cusp
structure.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np

from . import dualspace, forms, strata
from .fixtures import FixtureTriangle
from .p3p import (CameraCenter, InconsistentDistances, NumericalFailure,
                  P3PInstance, RootCountWarning, SolutionTriple, Triangle,
                  distances, instance_from_center, locate_center, solve,
                  system_polys)
from .polynomials import (AmbiguousFitError, ImplicitSurfaceModel, SparsePoly,
                          fit_implicit, monomial_basis)
from .tolerances import DEFAULT_TOLERANCES, Tolerances


@dataclass(frozen=True)
class SweepConfig:
    """Grid over the danger cylinder: angles x heights, h > 0 throughout."""
    triangle: Triangle
    theta_samples: int = 64
    height_samples: int = 8
    height_range: Optional[Tuple[float, float]] = None
    include_morley: bool = False
    theta_shift: float = 0.0

    def __post_init__(self):
        if self.theta_samples < 8:
            raise ValueError("theta_samples must be >= 8")
        if self.height_samples < 4:
            raise ValueError("height_samples must be >= 4")
        if self.height_range is not None:
            lo, hi = self.height_range
            if not (0 < lo <= hi):
                raise ValueError("height_range needs 0 < h_min <= h_max")

    def heights(self) -> np.ndarray:
        (_, R) = self.triangle.circumcircle()
        lo, hi = self.height_range if self.height_range is not None \
            else (0.25 * R, 2.0 * R)
        return np.linspace(lo, hi, self.height_samples)

    def thetas(self) -> np.ndarray:
        n = self.theta_samples
        return 2.0 * math.pi * (np.arange(n) + self.theta_shift) / n


@dataclass
class ComplementaryRecord:
    """One complementary solution of one swept cylinder center."""
    theta: float
    h: float
    source_center: CameraCenter
    source_mu: int
    seed: SolutionTriple
    complement_e: SolutionTriple
    complement_centers: Tuple[CameraCenter, ...]
    on_morley_generatrix: bool
    branch_index: int

    @property
    def is_real(self) -> bool:
        return bool(self.complement_centers)


@dataclass
class SweepResult:
    """Records plus the per-point failures the sweep skipped over."""
    config: SweepConfig
    records: List[ComplementaryRecord]
    failures: List[dict]
    morley_thetas: Optional[np.ndarray]

    def __iter__(self):
        return iter(self.records)

    def __len__(self):
        return len(self.records)

    def real_records(self) -> List[ComplementaryRecord]:
        return [r for r in self.records if r.complement_centers]


def _real_triple(s: SolutionTriple, scale: float, tol: Tolerances) -> Optional[np.ndarray]:
    e = s.e
    if np.max(np.abs(e.imag)) < tol.imag_tol_rel * scale:
        return e.real
    return None


def _split_seed(sols: Sequence[SolutionTriple], xi: np.ndarray, mu: int
                ) -> Tuple[SolutionTriple, List[SolutionTriple]]:
    """Seed cluster and complements, absorbing by root count.

    A multiplicity-mu root can fragment numerically into clusters wider
    than the merge radius, so the seed absorbs the nearest solutions until
    mu roots (counted with cluster hints) are accounted for; whatever
    remains is genuinely complementary.
    """
    ordered = sorted(sols, key=lambda s: np.linalg.norm(s.e - xi))
    need = max(mu, 1)
    absorbed = 0
    comps: List[SolutionTriple] = []
    for s in ordered:
        if absorbed < need:
            absorbed += max(s.multiplicity_hint, 1)
        else:
            comps.append(s)
    return ordered[0], comps


def sweep_cylinder(cfg: SweepConfig, tol: Tolerances = DEFAULT_TOLERANCES
                   ) -> SweepResult:
    """Solve at every grid point of the cylinder and record the solutions
    complementary to the swept center's own (singular) one.

    Per-point failures are collected, not raised.  Records carry the source
    multiplicity and both mirror centers of each real complement.
    """
    t = cfg.triangle
    (ccx, ccy), R = t.circumcircle()
    scale = t.side_scale
    try:
        morley_thetas, _ = strata.morley_angles(t, tol)
    except strata.CubicRootFailure:
        morley_thetas = None

    thetas = list(cfg.thetas())
    forced: List[float] = []
    if cfg.include_morley and morley_thetas is not None:
        for mt in morley_thetas:
            if not any(abs(complex(math.cos(mt), math.sin(mt))
                           - complex(math.cos(th), math.sin(th))) < 1e-12
                       for th in thetas):
                forced.append(float(mt))
    heights = cfg.heights()

    records: List[ComplementaryRecord] = []
    failures: List[dict] = []
    for th in thetas + forced:
        on_gen = morley_thetas is not None and bool(any(
            abs(complex(math.cos(th), math.sin(th))
                - complex(math.cos(mt), math.sin(mt))) < 1e-9
            for mt in morley_thetas))
        for h in heights:
            O = CameraCenter(ccx + R * math.cos(th), ccy + R * math.sin(th),
                             float(h))
            try:
                inst = instance_from_center(t, O)
                with warnings.catch_warnings():
                    warnings.simplefilter("ignore", RootCountWarning)
                    sols = solve(inst, tol)
                xi = np.array(distances(t, O))
                fs = system_polys(inst)
                mu = dualspace.multiplicity(fs, xi.astype(complex), 4,
                                            tol.tau_rank)
                mu = int(mu) if isinstance(mu, int) else 0
                seed, comps = _split_seed(sols, xi, mu)
            except Exception as ex:  # per-point, not fatal
                failures.append({"theta": float(th), "h": float(h),
                                 "error": f"{type(ex).__name__}: {ex}"})
                continue
            for bi, comp in enumerate(comps):
                centers: Tuple[CameraCenter, ...] = ()
                er = _real_triple(comp, scale, tol)
                if er is not None:
                    try:
                        pair = locate_center(t, np.abs(er), tol)
                        centers = tuple(pair) if pair[0].z != 0 else (pair[0],)
                    except InconsistentDistances:
                        centers = ()
                records.append(ComplementaryRecord(
                    theta=float(th), h=float(h), source_center=O,
                    source_mu=mu, seed=seed, complement_e=comp,
                    complement_centers=centers,
                    on_morley_generatrix=on_gen, branch_index=bi))
    return SweepResult(cfg, records, failures, morley_thetas)


# -- fitting -----------------------------------------------------------------


def _sweep_triangle(records, triangle: Optional[Triangle]) -> Triangle:
    if isinstance(records, SweepResult):
        return records.config.triangle
    if triangle is None:
        raise ValueError("pass triangle= when records is a plain list")
    return triangle


def _complement_centers_xyz(records: Iterable[ComplementaryRecord]
                            ) -> np.ndarray:
    pts = []
    for r in records:
        for c in r.complement_centers:
            pts.append([c.x, c.y, c.z])
    return np.array(pts)


def _complement_e_samples(records: Iterable[ComplementaryRecord],
                          scale: float, tol: Tolerances) -> np.ndarray:
    pts = []
    for r in records:
        er = _real_triple(r.complement_e, scale, tol)
        if er is not None:
            pts.append(er)
    return np.array(pts)


def fit_deltoid_xyz(records, degree: int = 12, *,
                    triangle: Optional[Triangle] = None,
                    tol: Tolerances = DEFAULT_TOLERANCES) -> ImplicitSurfaceModel:
    """Implicitize the complementary-center cloud in space coordinates.

    Coordinates are normalized by the circumdiameter.  The even-exponent
    basis is tried first; if it is ambiguous or misses the cloud, the full
    degree-12 basis is fitted instead, and the model's meta says which
    basis won.
    """
    t = _sweep_triangle(records, triangle)
    (_, R) = t.circumcircle()
    d = 2.0 * R
    pts = _complement_centers_xyz(records)
    if pts.size == 0:
        raise ValueError("no real complementary centers to fit")
    samples = pts / d
    model = None
    try:
        model = fit_implicit(samples, monomial_basis(3, degree, even_only=True),
                             gap=tol.fit_gap)
        model.meta["basis_kind"] = "even"
    except AmbiguousFitError:
        model = None
    if model is None or model.rms_residual > tol.fit_rms:
        model = fit_implicit(samples, monomial_basis(3, degree), gap=tol.fit_gap)
        model.meta["basis_kind"] = "full"
    model.meta["coordinate_scale"] = d
    model.meta["space"] = "xyz"
    return model


def fit_deltoid_e(records, degree: int = 16, *,
                  triangle: Optional[Triangle] = None,
                  tol: Tolerances = DEFAULT_TOLERANCES) -> ImplicitSurfaceModel:
    """Implicitize the complementary solutions in distance coordinates.

    Even-exponent basis (the surface is invariant under per-coordinate sign
    change); samples are normalized by the circumdiameter.  Complex
    complements are fitted alongside the real ones: obtuse triangles have
    angle windows where both complements of a real source go complex, and
    dropping those samples leaves a near-null direction that is flat on the
    real cloud but order one on the complex windows, contaminating the
    fitted coefficients by far more than the fit residual suggests.
    """
    t = _sweep_triangle(records, triangle)
    (_, R) = t.circumcircle()
    d = 2.0 * R
    pts = np.array([np.asarray(r.complement_e.e) for r in records])
    if pts.size == 0:
        raise ValueError("no complementary solutions to fit")
    if np.max(np.abs(pts.imag)) < tol.imag_tol_rel * t.side_scale:
        pts = pts.real
    model = fit_implicit(pts / d, monomial_basis(3, degree, even_only=True),
                         gap=tol.fit_gap)
    model.meta["basis_kind"] = "even"
    model.meta["coordinate_scale"] = d
    model.meta["space"] = "e"
    return model


# -- membership and contact checks -------------------------------------------


@dataclass
class ComponentMatch:
    """Normalized component values at one complementary solution."""
    best_name: str
    best_value: float
    values: Dict[str, float]

    def matched(self, threshold: float) -> List[str]:
        return sorted([n for n, v in self.values.items() if v < threshold],
                      key=lambda n: self.values[n])


def _membership_value(value: float | complex, grad_norm: float,
                      coeff_scale: float, grad_floor: float) -> float:
    """Gradient-floored first-order distance |p| / (||grad p|| + eta * M).

    Away from critical points this is the usual Newton distance estimate,
    so it stays order one at points genuinely off the component.  Near
    cusps the gradient vanishes and the raw estimate diverges; the floor
    eta * M (M = coefficient scale) caps the denominator there, bounding
    the score by |p| / (eta * M), which is tiny everywhere on the surface.
    """
    return abs(value) / (grad_norm + grad_floor * coeff_scale)


def component_membership(fixture: FixtureTriangle, complement_e,
                         e_model: Optional[ImplicitSurfaceModel] = None, *,
                         tol: Tolerances = DEFAULT_TOLERANCES
                         ) -> ComponentMatch:
    """Which displayed component is this complementary solution on?

    Every non-trivial transcribed component (quadrics and quartics) is
    scored by a gradient-floored first-order distance in circumdiameter
    units; the fitted degree-16 model joins the candidate list when given.
    Complex solutions are scored where they live: truncating to the real
    part would move the point off every component.
    """
    if hasattr(complement_e, "e"):
        complement_e = np.asarray(complement_e.e)
    e = np.asarray(complement_e)
    if not np.iscomplexobj(e):
        e = e.astype(float)
    (_, R) = fixture.triangle.circumcircle()
    d = 2.0 * R
    eta = tol.membership_grad_floor
    values: Dict[str, float] = {}
    for comp in fixture.nontrivial_components():
        p = comp.poly
        M = max(abs(float(c)) * d ** sum(m) for m, c in p.terms.items())
        g = np.array([p.partial(i).eval_float(e) for i in range(3)])
        values[comp.name] = _membership_value(
            p.eval_float(e), float(np.linalg.norm(g)) * d, M, eta)
    if e_model is not None:
        u = e / d
        M = float(np.max(np.abs(e_model.coefficients)))
        g = np.asarray(e_model.gradient(u))
        values["deg16_fitted"] = _membership_value(
            e_model.evaluate(u), float(np.linalg.norm(g)), M, eta)
    best = min(values, key=values.get)
    return ComponentMatch(best, values[best], values)


def _first_order_distance(value: float, grad: np.ndarray,
                          eps: float = 1e-300) -> float:
    return abs(value) / (float(np.linalg.norm(grad)) + eps)


def negative_controls(fixture: FixtureTriangle, count: int,
                      e_model: Optional[ImplicitSurfaceModel] = None,
                      records: Optional[Iterable[ComplementaryRecord]] = None,
                      *,
                      margin: float = 0.02,
                      model_margin: float = 0.05,
                      box: Tuple[float, float] = (1.2, 2.5),
                      seed: int = 0,
                      max_draws: int = 200000) -> np.ndarray:
    """Random e triples verifiably off every displayed component.

    Uniform coordinate draws from box * circumradius are kept only when
    three independent geometric rejections all pass: distance to the
    sampled complement cloud (sign-folded) above model_margin times the
    circumdiameter, raw first-order distance |p| / ||grad p|| to every
    transcribed component above margin times the circumdiameter, and raw
    first-order distance to the fitted model above model_margin.  None of
    the rejections uses the floored membership score itself, so the
    survivors make honest negatives for it.
    """
    (_, R) = fixture.triangle.circumcircle()
    d = 2.0 * R
    comps = [(c.poly, [c.poly.partial(i) for i in range(3)])
             for c in fixture.nontrivial_components()]
    cloud = None
    if records is not None:
        pts = [np.real(np.asarray(r.complement_e.e)) for r in records]
        if pts:
            cloud = np.array(pts)
            cloud = np.vstack([cloud, -cloud])
    rng = np.random.default_rng(seed)
    out: List[np.ndarray] = []
    for _ in range(max_draws):
        if len(out) >= count:
            break
        e = rng.uniform(box[0], box[1], size=3) * R
        if cloud is not None and \
                np.min(np.linalg.norm(cloud - e, axis=1)) < model_margin * d:
            continue
        ok = True
        for poly, grads in comps:
            g = np.array([float(gp.eval_float(e)) for gp in grads])
            if _first_order_distance(float(poly.eval_float(e)), g) < margin * d:
                ok = False
                break
        if ok and e_model is not None:
            u = e / d
            dist = _first_order_distance(float(e_model.evaluate(u)),
                                         np.asarray(e_model.gradient(u)))
            if dist < model_margin:
                ok = False
        if ok:
            out.append(e)
    if len(out) < count:
        raise RuntimeError(
            f"only {len(out)}/{count} negative controls found in "
            f"{max_draws} draws; margin too strict for this geometry")
    return np.array(out)


def tangency_check(t: Triangle, cylinder_poly: SparsePoly,
                   model: ImplicitSurfaceModel, probes: np.ndarray,
                   eps: float = 1e-30) -> float:
    """Max normalized gradient cross product between cylinder and model.

    Small everywhere the two surfaces are tangent; order one where they
    cross transversally.  Probes are raw space points.
    """
    probes = np.atleast_2d(np.asarray(probes, dtype=float))
    scale = float(model.meta.get("coordinate_scale", 1.0))
    worst = 0.0
    for p in probes:
        g1 = np.array([float(cylinder_poly.partial(i).eval_float(p))
                       for i in range(3)])
        g2 = model.gradient(p / scale)
        cr = np.linalg.norm(np.cross(g1, g2))
        den = np.linalg.norm(g1) * np.linalg.norm(g2) + eps
        worst = max(worst, cr / den)
    return worst


def cusp_check(model: ImplicitSurfaceModel, mu3_points: np.ndarray,
               mu2_points: np.ndarray) -> List[float]:
    """Model gradient norms at triple-source complements, normalized by the
    median gradient norm over double-source complements.

    Values far below one certify the cusp locus; the contrast baseline makes
    the threshold transfer across triangle scales.
    """
    scale = float(model.meta.get("coordinate_scale", 1.0))
    mu3_points = np.atleast_2d(np.asarray(mu3_points, dtype=float))
    mu2_points = np.atleast_2d(np.asarray(mu2_points, dtype=float))
    base = np.median([np.linalg.norm(model.gradient(p / scale))
                      for p in mu2_points])
    return [float(np.linalg.norm(model.gradient(p / scale)) / base)
            for p in mu3_points]


def plane_fit_residual(points) -> float:
    """Root-mean-square distance of points to their least-squares plane."""
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    if len(pts) < 4:
        raise ValueError("plane fit needs at least 4 points")
    ctr = pts - pts.mean(axis=0)
    sv = np.linalg.svd(ctr, compute_uv=False)
    return float(sv[-1] / math.sqrt(len(pts)))


def trace_cusp_curves(t: Triangle, heights: Optional[Sequence[float]] = None,
                      *, tol: Tolerances = DEFAULT_TOLERANCES
                      ) -> List[np.ndarray]:
    """Complement centers along each Morley generatrix over a height ladder.

    Returns one (n, 3) array per generatrix (the cusp curve it feeds),
    ordered by ascending height, keeping the z >= 0 mirror representative;
    heights whose complements are complex contribute no point.
    """
    (_, R) = t.circumcircle()
    if heights is None:
        heights = np.linspace(0.05 * R, 6.0 * R, 24)
    thetas, bases = strata.morley_angles(t, tol)
    curves: List[np.ndarray] = []
    for k in range(3):
        bx, by = float(bases[k][0]), float(bases[k][1])
        pts: List[List[float]] = []
        for h in np.asarray(heights, dtype=float):
            O = CameraCenter(bx, by, float(h))
            try:
                inst = instance_from_center(t, O)
                with warnings.catch_warnings():
                    warnings.simplefilter("ignore", RootCountWarning)
                    sols = solve(inst, tol)
                xi = np.array(distances(t, O))
                fs = system_polys(inst)
                mu = dualspace.multiplicity(fs, xi.astype(complex), 4,
                                            tol.tau_rank)
                mu = mu if isinstance(mu, int) else 0
                _, comps = _split_seed(sols, xi, mu)
            except Exception:
                continue
            for comp in comps:
                er = _real_triple(comp, t.side_scale, tol)
                if er is None:
                    continue
                try:
                    pair = locate_center(t, np.abs(er), tol)
                except InconsistentDistances:
                    continue
                for c in pair:
                    if c.z >= 0:
                        pts.append([c.x, c.y, c.z])
                        break
        curves.append(np.array(pts, dtype=float).reshape(-1, 3))
    return curves


def sweep_figure8(t: Triangle, circle_radius_fraction: float, h: float,
                  samples: int = 256, tol: Tolerances = DEFAULT_TOLERANCES
                  ) -> List[dict]:
    """Drive the center around a horizontal circle and log where the other
    solutions sit.

    At fraction 1 the circle lies on the cylinder and the complementary
    centers trace the deltoidal surface, passing its cusps at the Morley
    angles; inside (fraction < 1) all solutions stay simple.
    """
    if not (0 < circle_radius_fraction <= 1):
        raise ValueError("circle_radius_fraction must be in (0, 1]")
    (ccx, ccy), R = t.circumcircle()
    r = circle_radius_fraction * R
    out = []
    for i in range(samples):
        th = 2.0 * math.pi * i / samples
        O = CameraCenter(ccx + r * math.cos(th), ccy + r * math.sin(th),
                         float(h))
        entry = {"theta": th, "O": O, "mu": None, "complements": [],
                 "complement_e": [], "error": None}
        try:
            inst = instance_from_center(t, O)
            with warnings.catch_warnings():
                warnings.simplefilter("ignore", RootCountWarning)
                sols = solve(inst, tol)
            xi = np.array(distances(t, O))
            fs = system_polys(inst)
            mu = dualspace.multiplicity(fs, xi.astype(complex), 4, tol.tau_rank)
            mu = mu if isinstance(mu, int) else 0
            entry["mu"] = mu
            _, comps = _split_seed(sols, xi, mu)
            for s in comps:
                entry["complement_e"].append(s)
                er = _real_triple(s, t.side_scale, tol)
                if er is None:
                    continue
                try:
                    entry["complements"].extend(locate_center(t, np.abs(er), tol))
                except InconsistentDistances:
                    pass
        except Exception as ex:
            entry["error"] = f"{type(ex).__name__}: {ex}"
        out.append(entry)
    return out


# -- end-to-end report --------------------------------------------------------


@dataclass
class DeltoidReport:
    xyz_model: ImplicitSurfaceModel
    e_model: ImplicitSurfaceModel
    tangency_max_cross_norm: float
    cusp_gradient_norms: List[float]
    intersection_samples: List[Tuple[np.ndarray, float, float]]

    def as_dict(self) -> dict:
        return {
            "xyz_model": {"basis_kind": self.xyz_model.meta.get("basis_kind"),
                          "rms_residual": self.xyz_model.rms_residual,
                          "max_residual": self.xyz_model.max_residual,
                          "sample_count": self.xyz_model.sample_count},
            "e_model": {"basis_kind": self.e_model.meta.get("basis_kind"),
                        "rms_residual": self.e_model.rms_residual,
                        "max_residual": self.e_model.max_residual,
                        "sample_count": self.e_model.sample_count},
            "tangency_max_cross_norm": self.tangency_max_cross_norm,
            "cusp_gradient_norms": self.cusp_gradient_norms,
            "intersection_samples": [
                {"point": list(map(float, p)),
                 "dist_generatrices": dg, "dist_circumcircle": dc}
                for p, dg, dc in self.intersection_samples],
        }


def generatrix_probes(t: Triangle, h_fractions: Sequence[float] = (0.5, 1.0, 2.0),
                      tol: Tolerances = DEFAULT_TOLERANCES) -> np.ndarray:
    """Points on the three Morley generatrices at the given height/R ratios."""
    thetas, bases = strata.morley_angles(t, tol)
    (_, R) = t.circumcircle()
    return np.array([[bx, by, f * R] for (bx, by) in bases
                     for f in h_fractions])


def build_deltoid_report(t: Triangle, cfg: Optional[SweepConfig] = None,
                         tol: Tolerances = DEFAULT_TOLERANCES) -> DeltoidReport:
    """Sweep, fit both models, and run the contact checks in one pass."""
    if cfg is None:
        cfg = SweepConfig(t, include_morley=True)
    sweep = sweep_cylinder(cfg, tol)
    xyz_model = fit_deltoid_xyz(sweep, tol=tol)
    e_model = fit_deltoid_e(sweep, tol=tol)

    probes = generatrix_probes(t, tol=tol)
    cyl = forms.cylinder_xyz_poly(t)
    tang = tangency_check(t, cyl, xyz_model, probes)

    scale = t.side_scale
    mu3 = _complement_e_samples(
        (r for r in sweep.records if r.source_mu >= 3), scale, tol)
    mu2 = _complement_e_samples(
        (r for r in sweep.records if r.source_mu == 2), scale, tol)
    cusp = cusp_check(e_model, mu3, mu2) if mu3.size and mu2.size else []

    (ccx, ccy), R = t.circumcircle()
    _, bases = strata.morley_angles(t, tol)
    samples: List[Tuple[np.ndarray, float, float]] = []
    for r in sweep.real_records():
        for c in r.complement_centers:
            p = np.array([c.x, c.y, c.z])
            if abs(strata._normalized_cylinder_value(t, c)) < 1e-4:
                dg = min(math.hypot(p[0] - bx, p[1] - by) for bx, by in bases)
                rho = math.hypot(p[0] - ccx, p[1] - ccy)
                dc = math.hypot(rho - R, p[2])
                samples.append((p, dg, dc))
    return DeltoidReport(xyz_model=xyz_model, e_model=e_model,
                         tangency_max_cross_norm=tang,
                         cusp_gradient_norms=cusp,
                         intersection_samples=samples)
