"""Local dual spaces of the distance system at a solution.

Order by order, the dual space of functionals vanishing on the shifted ideal
is the nullspace of a Macaulay matrix; its stabilized dimension is the
multiplicity mu.  At breadth-one (Jacobian corank 1) points the incremental
criterion value c_k = u^H Delta_k[f](xi) decides whether the dimension grows
at order k.

Conventions: differential monomials are normalized, d^a = partial^a / a!.
Delta_k is pinned by requiring its degree-k pure-power part to equal
sum_{|a|=k} v^a d^a for the Jacobian's unit right null vector v; criterion
values are therefore comparable between nearby points but only their
vanishing is meaningful across configurations.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from . import forms
from .p3p import (P3PInstance, RootCountWarning, SolutionTriple, Triangle,
                  _known_array, instance_from_center, solve, system_polys)
from .polynomials import Monomial, SparsePoly, monomial_basis, taylor_coefficients
from .tolerances import DEFAULT_TOLERANCES, Tolerances


class ZeroComponent(ValueError):
    """Jacobian entries divide by the solution components."""


class BreadthViolation(ValueError):
    """The incremental criterion requires Jacobian corank exactly 1."""


class IllConditionedDual(RuntimeError):
    """No order-k functional with the required pure-power part exists."""


def jacobian_at(t: Triangle, e) -> np.ndarray:
    """Jacobian of the cosine-eliminated system at a solution.

    Rows in equation order (f23, f13, f12); the diagonal is structurally
    zero.  Equals the plain system Jacobian whenever e solves the instance
    built from its own distances.
    """
    e = _known_array(e)
    q12, q13, q23 = (float(q) for q in t.sides_sq)
    if np.min(np.abs(e)) < 1e-300:
        raise ZeroComponent("solution has a zero component")
    e1, e2, e3 = e
    return np.array([
        [0.0, (q23 + e2 * e2 - e3 * e3) / e2, (q23 - e2 * e2 + e3 * e3) / e3],
        [(q13 + e1 * e1 - e3 * e3) / e1, 0.0, (q13 - e1 * e1 + e3 * e3) / e3],
        [(q12 + e1 * e1 - e2 * e2) / e1, (q12 - e1 * e1 + e2 * e2) / e2, 0.0]])


@dataclass(frozen=True)
class CorankResult:
    """Rank decision for a Jacobian, with the realized singular values."""
    corank: int
    u: np.ndarray
    v: np.ndarray
    singular_values: np.ndarray

    @property
    def gap(self) -> float:
        """sigma_3 / sigma_1: the ratio the corank-1 decision rests on."""
        s = self.singular_values
        return float(s[-1] / s[0]) if s[0] > 0 else 0.0


def _phase_normalize(w: np.ndarray) -> np.ndarray:
    i = int(np.argmax(np.abs(w)))
    piv = w[i]
    if piv == 0:
        return w
    return w * (abs(piv) / piv)


def corank_and_nullvec(J: np.ndarray, tau_rank: float = DEFAULT_TOLERANCES.tau_rank
                       ) -> CorankResult:
    """Numerical corank plus left (u) and right (v) null vectors.

    u and v are the singular vectors of the smallest singular value, unit
    norm, phase-normalized so their largest-magnitude entry is positive real.
    """
    J = np.asarray(J)
    U, S, Vh = np.linalg.svd(J)
    if S[0] == 0:
        corank = J.shape[0]
    else:
        corank = int(np.sum(S < tau_rank * S[0]))
    u = _phase_normalize(U[:, -1].conj())
    v = _phase_normalize(Vh[-1, :].conj())
    return CorankResult(corank, u, v, S)


def left_nullvec_closed_form(t: Triangle, e) -> Optional[np.ndarray]:
    """The closed-form left null vector at a cylinder solution.

    Component order matches the (f23, f13, f12) Jacobian rows.  Returns None
    when a denominator is not bounded away from zero.
    """
    e = _known_array(e)
    q12, q13, q23 = (float(q) for q in t.sides_sq)
    E1, E2, E3 = e[0] ** 2, e[1] ** 2, e[2] ** 2
    d2 = E1 - E3 - q13
    d3 = E1 - E2 - q12
    floor = 1e-9 * (q12 + q13 + q23)
    if min(abs(d2), abs(d3)) < floor:
        return None
    return np.array([1.0, (-E2 + E3 + q23) / d2, (E2 - E3 + q23) / d3])


# -- Macaulay matrices ---------------------------------------------------


def _taylor_tables(fs: Sequence[SparsePoly], xi: np.ndarray, order: int
                   ) -> List[Dict[Monomial, complex]]:
    return [taylor_coefficients(f, xi, order) for f in fs]


def _macaulay_matrix(tabs: List[Dict[Monomial, complex]], nvars: int, k: int
                     ) -> np.ndarray:
    cols = monomial_basis(nvars, k)
    rows = []
    for beta in monomial_basis(nvars, k - 1):
        for tab in tabs:
            row = []
            for alpha in cols:
                g = tuple(a - b for a, b in zip(alpha, beta))
                row.append(tab.get(g, 0.0) if min(g) >= 0 else 0.0)
            rows.append(row)
    M = np.array(rows, dtype=complex)
    norms = np.linalg.norm(M, axis=1)
    norms[norms == 0] = 1.0
    return M / norms[:, None]


def _nullity(M: np.ndarray, tau_rank: float) -> int:
    sv = np.linalg.svd(M, compute_uv=False)
    if sv[0] == 0:
        return M.shape[1]
    return M.shape[1] - int(np.sum(sv > tau_rank * sv[0]))


def macaulay_dual_dim(fs: Sequence[SparsePoly], xi, order_k: int,
                      tau_rank: float = DEFAULT_TOLERANCES.tau_rank) -> int:
    """Dimension of the order-k truncated dual space at xi."""
    xi = np.asarray(xi, dtype=complex)
    if order_k <= 0:
        return 1
    tabs = _taylor_tables(fs, xi, order_k)
    return _nullity(_macaulay_matrix(tabs, fs[0].nvars, order_k), tau_rank)


def macaulay_dual_dims(fs: Sequence[SparsePoly], xi, max_order: int,
                       tau_rank: float = DEFAULT_TOLERANCES.tau_rank) -> List[int]:
    """Dual-space dimensions d_0 .. d_max_order (stops early on stabilization)."""
    xi = np.asarray(xi, dtype=complex)
    tabs = _taylor_tables(fs, xi, max_order)
    nvars = fs[0].nvars
    dims = [1]
    for k in range(1, max_order + 1):
        dims.append(_nullity(_macaulay_matrix(tabs, nvars, k), tau_rank))
        if dims[-1] == dims[-2]:
            break
    return dims


def multiplicity(fs: Sequence[SparsePoly], xi, max_order: int = DEFAULT_TOLERANCES.max_order,
                 tau_rank: float = DEFAULT_TOLERANCES.tau_rank) -> Union[int, str]:
    """Stabilized dual dimension, or "infinite_suspected" if still growing."""
    dims = macaulay_dual_dims(fs, xi, max_order, tau_rank)
    if len(dims) >= 2 and dims[-1] == dims[-2]:
        return dims[-1]
    return "infinite_suspected"


# -- incremental breadth-one criterion ------------------------------------


def criterion_c1(t: Triangle, e=None, *, e_sq=None):
    """Order-1 criterion: the danger-cylinder polynomial at the solution.

    Exact Fraction arithmetic when squared distances are passed; float
    otherwise.
    """
    p = forms.danger_cylinder_sq_poly(*t.sides_sq)
    if e_sq is not None:
        return p.eval_exact([Fraction(v) if not isinstance(v, Fraction) else v
                             for v in e_sq])
    e = _known_array(e)
    return p.eval_float(e ** 2)


def criterion_ck(fs: Sequence[SparsePoly], xi, u, k: int,
                 tau_rank: float = DEFAULT_TOLERANCES.tau_rank,
                 tnorm_floor: float = 1e-6) -> complex:
    """Order-k criterion value u^H Delta_k[f](xi) for k in {2, 3}.

    Delta_k is the element of the closedness-condition nullspace whose
    degree-k pure-power part equals sum_{|a|=k} v^a d^a.  Raises
    BreadthViolation off corank-1 points and IllConditionedDual when no such
    functional exists (the order-(k-1) dual basis does not extend).
    """
    if k < 2:
        raise ValueError("criterion defined for k >= 2")
    xi = np.asarray(xi, dtype=complex)
    nvars = fs[0].nvars
    tabs = _taylor_tables(fs, xi, k)
    J = np.array([[tab.get(tuple(1 if j == i else 0 for j in range(nvars)), 0.0)
                   for i in range(nvars)] for tab in tabs])
    cres = corank_and_nullvec(J, tau_rank)
    if cres.corank != 1:
        raise BreadthViolation(f"Jacobian corank is {cres.corank}, need 1")
    v = cres.v
    u = np.asarray(u, dtype=complex)

    cols = [a for a in monomial_basis(nvars, k) if sum(a) >= 1]
    rows = []
    for beta in monomial_basis(nvars, k - 1):
        if sum(beta) == 0:
            continue
        for tab in tabs:
            row = []
            for alpha in cols:
                g = tuple(a - b for a, b in zip(alpha, beta))
                row.append(tab.get(g, 0.0) if min(g) >= 0 else 0.0)
            rows.append(row)
    M = np.array(rows, dtype=complex)
    norms = np.linalg.norm(M, axis=1)
    norms[norms == 0] = 1.0
    M = M / norms[:, None]
    _, S, Vh = np.linalg.svd(M, full_matrices=True)
    ncols = M.shape[1]
    sv = np.zeros(ncols)
    sv[:len(S)] = S
    smax = sv[0]
    if smax == 0:
        null = [Vh[j].conj() for j in range(ncols)]
    else:
        null = [Vh[j].conj() for j in range(ncols) if sv[j] < tau_rank * smax]

    top = [a for a in cols if sum(a) == k]
    idx = [cols.index(a) for a in top]
    p = np.array([np.prod([v[i] ** a[i] for i in range(nvars)]) for a in top])
    pn2 = np.vdot(p, p)
    ts = np.array([np.vdot(p, nv[idx]) / pn2 for nv in null])
    tnorm = float(np.linalg.norm(ts))
    if tnorm < tnorm_floor:
        raise IllConditionedDual(
            f"no order-{k} functional extends the dual basis (projection {tnorm:.2e})")
    delta = sum(np.conj(t) * nv for t, nv in zip(ts, null)) / tnorm ** 2
    val = 0.0 + 0.0j
    for tab, ui in zip(tabs, u):
        acc = sum(delta[j] * tab.get(alpha, 0.0) for j, alpha in enumerate(cols))
        val += np.conj(ui) * acc
    return complex(val)


# -- reports ---------------------------------------------------------------


@dataclass
class DualSpaceReport:
    """Everything the dual-space analysis says about one solution."""
    corank: int
    null_vector_u: Optional[np.ndarray]
    dims: List[int]
    mu: Union[int, str]
    c1: float
    c2: Optional[complex]
    c3: Optional[complex]
    tolerances_used: Tolerances
    diagnostics: dict = field(default_factory=dict)

    def as_dict(self) -> dict:
        def cplx(z):
            if z is None:
                return None
            z = complex(z)
            return {"re": z.real, "im": z.imag}
        return {
            "corank": self.corank,
            "null_vector_u": None if self.null_vector_u is None else
                [cplx(z) for z in self.null_vector_u],
            "dims": list(self.dims),
            "mu": self.mu,
            "c1": float(self.c1),
            "c2": cplx(self.c2),
            "c3": cplx(self.c3),
            "tolerances": self.tolerances_used.as_dict(),
            "diagnostics": {k: str(v) for k, v in self.diagnostics.items()},
        }


def dual_space_report(inst: P3PInstance, xi,
                      tol: Tolerances = DEFAULT_TOLERANCES) -> DualSpaceReport:
    """Full dual-space analysis of one solution of an instance."""
    xi = _known_array(xi)
    fs = system_polys(inst)
    t = inst.triangle
    J = jacobian_at(t, xi) if np.min(np.abs(xi)) > 1e-300 else None
    diagnostics = {}
    if J is None:
        cres = None
        corank = 0
        u = None
        diagnostics["jacobian"] = "zero solution component"
    else:
        cres = corank_and_nullvec(J, tol.tau_rank)
        corank, u = cres.corank, cres.u
        diagnostics["sv_ratio"] = cres.gap
    dims = macaulay_dual_dims(fs, xi, tol.max_order, tol.tau_rank)
    mu = dims[-1] if len(dims) >= 2 and dims[-1] == dims[-2] else "infinite_suspected"
    c1 = criterion_c1(t, xi)
    c2 = c3 = None
    if corank == 1:
        try:
            c2 = criterion_ck(fs, xi, u, 2, tol.tau_rank)
        except IllConditionedDual as ex:
            diagnostics["c2"] = ex
        try:
            c3 = criterion_ck(fs, xi, u, 3, tol.tau_rank)
        except IllConditionedDual as ex:
            diagnostics["c3"] = ex
    else:
        diagnostics.setdefault("criterion", f"corank {corank}, breadth-one path skipped")
    return DualSpaceReport(corank=corank, null_vector_u=u, dims=dims, mu=mu,
                           c1=float(np.real_if_close(c1)) if not isinstance(c1, Fraction) else float(c1),
                           c2=c2, c3=c3, tolerances_used=tol,
                           diagnostics=diagnostics)


# -- perturbation-cluster oracle -------------------------------------------


def cluster_multiplicity_oracle(inst: P3PInstance, xi, *, eps: float = 1e-6,
                                trials: int = 20, radius: Optional[float] = None,
                                min_gap: float = 30.0, seed: int = 0,
                                tol: Tolerances = DEFAULT_TOLERANCES
                                ) -> List[Optional[int]]:
    """Count roots of cosine-perturbed instances converging to xi.

    Each trial perturbs the three cosines by eps-scaled Gaussian noise,
    re-solves, and counts the roots nearest xi.  With an explicit radius the
    count is #{roots within radius}; otherwise the split point is the largest
    ratio jump in the sorted distances, and a trial reports None (ambiguous)
    when that jump is below min_gap.
    """
    import warnings as _w

    xi = _known_array(xi)
    rng = np.random.default_rng(seed)
    c0 = np.array(inst.cosines)
    counts: List[Optional[int]] = []
    for _ in range(trials):
        c = c0 + eps * rng.standard_normal(3)
        c = np.clip(c, -1 + 1e-12, 1 - 1e-12)
        pert = P3PInstance(inst.triangle, c[0], c[1], c[2])
        with _w.catch_warnings():
            _w.simplefilter("ignore", RootCountWarning)
            try:
                sols = solve(pert, tol)
            except Exception:
                counts.append(None)
                continue
        dists = sorted(min(np.linalg.norm(s.e - xi), np.linalg.norm(s.e + xi))
                       for s in sols)
        if not dists:
            counts.append(None)
            continue
        if radius is not None:
            counts.append(sum(1 for d in dists if d < radius))
            continue
        if len(dists) == 1:
            counts.append(1)
            continue
        floor = 1e-14 * inst.triangle.side_scale
        ratios = [dists[i + 1] / max(dists[i], floor) for i in range(len(dists) - 1)]
        best = int(np.argmax(ratios))
        counts.append(best + 1 if ratios[best] >= min_gap else None)
    return counts
