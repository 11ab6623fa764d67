"""Sparse multivariate polynomials over exact rationals, plus implicit fitting.

A polynomial is a mapping from exponent tuples to Fraction coefficients.  A
monomial is a plain tuple of non-negative ints, one entry per variable; the
canonical term order everywhere (iteration, serialization, bases) is graded
lexicographic, ascending: lower total degree first, ties broken by the
exponent tuple.

The text serialization is one term per line, ``coeff * x1^a1 x2^a2 ...`` with
rational coefficients written as ``p/q`` and unit exponents written without
the ``^``; a constant term is written ``coeff * 1``.  A header line
``vars: <name> <name> ...`` names the variables.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Iterable, List, Sequence, Tuple

import numpy as np

Monomial = Tuple[int, ...]
Scalar = Fraction | int

_GRADED_LEX = lambda m: (sum(m), m)  # noqa: E731


def _as_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, str)):
        return Fraction(x)
    raise TypeError(f"exact coefficient expected, got {type(x).__name__}")


class SparsePoly:
    """Sparse polynomial with exact Fraction coefficients.

    Zero coefficients are never stored; the zero polynomial has no terms.
    """

    __slots__ = ("nvars", "terms")

    def __init__(self, nvars: int, terms: Dict[Monomial, Fraction] | None = None):
        self.nvars = int(nvars)
        clean: Dict[Monomial, Fraction] = {}
        for mono, coeff in (terms or {}).items():
            mono = tuple(int(a) for a in mono)
            if len(mono) != self.nvars or any(a < 0 for a in mono):
                raise ValueError(f"bad exponent tuple {mono} for {self.nvars} variables")
            c = _as_fraction(coeff)
            if c != 0:
                clean[mono] = c
        self.terms = clean

    # -- constructors -------------------------------------------------

    @classmethod
    def zero(cls, nvars: int) -> "SparsePoly":
        return cls(nvars)

    @classmethod
    def constant(cls, nvars: int, value) -> "SparsePoly":
        return cls(nvars, {(0,) * nvars: _as_fraction(value)})

    @classmethod
    def variable(cls, index: int, nvars: int) -> "SparsePoly":
        mono = [0] * nvars
        mono[index] = 1
        return cls(nvars, {tuple(mono): Fraction(1)})

    # -- ring operations ----------------------------------------------

    def _coerce(self, other) -> "SparsePoly":
        if isinstance(other, SparsePoly):
            if other.nvars != self.nvars:
                raise ValueError("variable count mismatch")
            return other
        return SparsePoly.constant(self.nvars, other)

    def __add__(self, other) -> "SparsePoly":
        other = self._coerce(other)
        terms = dict(self.terms)
        for mono, coeff in other.terms.items():
            terms[mono] = terms.get(mono, Fraction(0)) + coeff
        return SparsePoly(self.nvars, terms)

    __radd__ = __add__

    def __neg__(self) -> "SparsePoly":
        return SparsePoly(self.nvars, {m: -c for m, c in self.terms.items()})

    def __sub__(self, other) -> "SparsePoly":
        return self + (-self._coerce(other))

    def __rsub__(self, other) -> "SparsePoly":
        return self._coerce(other) - self

    def __mul__(self, other) -> "SparsePoly":
        if not isinstance(other, SparsePoly):
            c = _as_fraction(other)
            return SparsePoly(self.nvars, {m: k * c for m, k in self.terms.items()})
        other = self._coerce(other)
        terms: Dict[Monomial, Fraction] = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                mono = tuple(a + b for a, b in zip(m1, m2))
                terms[mono] = terms.get(mono, Fraction(0)) + c1 * c2
        return SparsePoly(self.nvars, terms)

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "SparsePoly":
        if n < 0:
            raise ValueError("negative power")
        out = SparsePoly.constant(self.nvars, 1)
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def __eq__(self, other) -> bool:
        if not isinstance(other, SparsePoly):
            return NotImplemented
        return self.nvars == other.nvars and self.terms == other.terms

    def __hash__(self):
        return hash((self.nvars, frozenset(self.terms.items())))

    # -- queries --------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def degree(self) -> int:
        """Total degree; -1 for the zero polynomial."""
        return max((sum(m) for m in self.terms), default=-1)

    def sorted_terms(self) -> List[Tuple[Monomial, Fraction]]:
        """Terms in canonical (ascending graded lex) order."""
        return sorted(self.terms.items(), key=lambda kv: _GRADED_LEX(kv[0]))

    def max_abs_coeff(self) -> Fraction:
        return max((abs(c) for c in self.terms.values()), default=Fraction(0))

    # -- evaluation and calculus ----------------------------------------

    def eval_exact(self, point: Sequence) -> Fraction:
        """Evaluate at a rational point; exact."""
        pt = [_as_fraction(x) for x in point]
        if len(pt) != self.nvars:
            raise ValueError("point arity mismatch")
        total = Fraction(0)
        for mono, coeff in self.terms.items():
            term = coeff
            for x, a in zip(pt, mono):
                if a:
                    term *= x ** a
            total += term
        return total

    def eval_float(self, point: Sequence) -> float | complex:
        """Evaluate in floating point, summing in canonical term order."""
        pt = np.asarray(point)
        if pt.shape != (self.nvars,):
            raise ValueError("point arity mismatch")
        total = pt[0] * 0  # inherits float or complex dtype
        for mono, coeff in self.sorted_terms():
            term = float(coeff)
            for x, a in zip(pt, mono):
                if a:
                    term = term * x ** a
            total = total + term
        return total

    def partial(self, var: int) -> "SparsePoly":
        """Partial derivative with respect to variable ``var``."""
        if not 0 <= var < self.nvars:
            raise ValueError("variable index out of range")
        terms: Dict[Monomial, Fraction] = {}
        for mono, coeff in self.terms.items():
            a = mono[var]
            if a == 0:
                continue
            lowered = list(mono)
            lowered[var] = a - 1
            terms[tuple(lowered)] = coeff * a
        return SparsePoly(self.nvars, terms)

    def gradient(self) -> List["SparsePoly"]:
        return [self.partial(i) for i in range(self.nvars)]

    def __repr__(self) -> str:
        if self.is_zero():
            return "SparsePoly(0)"
        bits = []
        for mono, coeff in self.sorted_terms()[:6]:
            bits.append(f"{coeff}*{mono}")
        more = "..." if len(self.terms) > 6 else ""
        return f"SparsePoly({' + '.join(bits)}{more})"


def taylor_coefficients(p: SparsePoly, xi: Sequence, max_order: int) -> Dict[Monomial, complex]:
    """Normalized Taylor coefficients c_gamma of p at xi, |gamma| <= max_order.

    p(x) = sum_gamma c_gamma (x - xi)^gamma with c_gamma = d^gamma p (xi) / gamma!.
    Evaluation is floating point (xi may be complex); the differentiation is exact.
    """
    import math

    out: Dict[Monomial, complex] = {}
    frontier: Dict[Monomial, SparsePoly] = {(0,) * p.nvars: p}
    for order in range(max_order + 1):
        nxt: Dict[Monomial, SparsePoly] = {}
        for gamma, q in frontier.items():
            fact = 1
            for a in gamma:
                fact *= math.factorial(a)
            if not q.is_zero():
                out[gamma] = q.eval_float(xi) / fact
            if order < max_order:
                # extend each gamma by one derivative, avoiding duplicates by
                # only raising at or after the last raised variable
                start = 0
                for i in range(p.nvars - 1, -1, -1):
                    if gamma[i] > 0:
                        start = i
                        break
                for i in range(start, p.nvars):
                    g2 = list(gamma)
                    g2[i] += 1
                    key = tuple(g2)
                    if key not in nxt:
                        nxt[key] = q.partial(i)
        frontier = nxt
    return out


def monomial_basis(nvars: int, max_degree: int, even_only: bool = False) -> List[Monomial]:
    """All exponent tuples with total degree <= max_degree, graded lex ascending.

    With even_only, only tuples whose every exponent is even.
    """
    if nvars < 1 or max_degree < 0:
        raise ValueError("need nvars >= 1 and max_degree >= 0")
    out: List[Monomial] = []

    def rec(prefix: List[int], remaining: int, budget: int):
        if remaining == 0:
            out.append(tuple(prefix))
            return
        step = 2 if even_only else 1
        for a in range(0, budget + 1, step):
            rec(prefix + [a], remaining - 1, budget - a)

    rec([], nvars, max_degree)
    out.sort(key=_GRADED_LEX)
    return out


# -- text serialization ------------------------------------------------


def format_poly(p: SparsePoly, names: Sequence[str]) -> str:
    """Serialize to the one-term-per-line text format."""
    if len(names) != p.nvars:
        raise ValueError("variable name count mismatch")
    lines = ["vars: " + " ".join(names)]
    if p.is_zero():
        lines.append("0 * 1")
    for mono, coeff in p.sorted_terms():
        if not any(mono):
            lines.append(f"{coeff} * 1")
            continue
        factors = []
        for name, a in zip(names, mono):
            if a == 1:
                factors.append(name)
            elif a > 1:
                factors.append(f"{name}^{a}")
        lines.append(f"{coeff} * " + " ".join(factors))
    return "\n".join(lines) + "\n"


def parse_poly(text: str) -> Tuple[SparsePoly, List[str]]:
    """Parse the text format back; inverse of format_poly."""
    lines = [ln.strip() for ln in text.splitlines() if ln.strip()]
    if not lines or not lines[0].startswith("vars:"):
        raise ValueError("missing 'vars:' header")
    names = lines[0][len("vars:"):].split()
    if not names:
        raise ValueError("empty variable list")
    index = {n: i for i, n in enumerate(names)}
    nvars = len(names)
    terms: Dict[Monomial, Fraction] = {}
    for ln in lines[1:]:
        if "*" not in ln:
            raise ValueError(f"malformed term line: {ln!r}")
        coeff_s, _, mono_s = ln.partition("*")
        coeff = Fraction(coeff_s.strip())
        mono = [0] * nvars
        for factor in mono_s.split():
            if factor == "1":
                continue
            name, _, exp_s = factor.partition("^")
            if name not in index:
                raise ValueError(f"unknown variable {name!r}")
            mono[index[name]] += int(exp_s) if exp_s else 1
        key = tuple(mono)
        terms[key] = terms.get(key, Fraction(0)) + coeff
    return SparsePoly(nvars, terms), names


# -- implicit surface fitting -------------------------------------------


class AmbiguousFitError(ValueError):
    """The sample cloud admits more than one basis-expressible surface."""


@dataclass
class ImplicitSurfaceModel:
    """Result of a nullspace implicit fit.

    coefficients has unit Euclidean norm, sign-normalized so the largest
    absolute entry (earliest in basis order on ties) is positive.  Residuals
    are measured on the held-out rows only.
    """

    basis: List[Monomial]
    coefficients: np.ndarray
    rms_residual: float
    max_residual: float
    sample_count: int
    meta: dict = field(default_factory=dict)

    def design_matrix(self, points: np.ndarray) -> np.ndarray:
        return _design_matrix(np.asarray(points, dtype=float), self.basis)

    def evaluate(self, points: np.ndarray) -> np.ndarray:
        """Model values at points (rows); a single point may be passed flat."""
        pts = np.asarray(points)
        single = pts.ndim == 1
        if single:
            pts = pts[None, :]
        A = _design_matrix(pts, self.basis)
        vals = A @ self.coefficients
        return vals[0] if single else vals

    def gradient(self, point: np.ndarray) -> np.ndarray:
        """Gradient of the model at one point."""
        pt = np.asarray(point)
        nv = len(pt)
        grad = np.zeros(nv, dtype=pt.dtype)
        for coeff, mono in zip(self.coefficients, self.basis):
            if coeff == 0:
                continue
            for v in range(nv):
                a = mono[v]
                if a == 0:
                    continue
                term = coeff * a
                for w in range(nv):
                    e = mono[w] - (1 if w == v else 0)
                    if e:
                        term = term * pt[w] ** e
                grad[v] += term
        return grad

    def coefficient(self, mono: Monomial) -> float:
        """Coefficient of one basis monomial (0.0 if absent from the basis)."""
        mono = tuple(mono)
        for c, m in zip(self.coefficients, self.basis):
            if m == mono:
                return float(c)
        return 0.0


def _design_matrix(points: np.ndarray, basis: Sequence[Monomial]) -> np.ndarray:
    A = np.empty((len(points), len(basis)), dtype=complex if np.iscomplexobj(points) else float)
    for j, mono in enumerate(basis):
        col = np.ones(len(points), dtype=A.dtype)
        for v, a in enumerate(mono):
            if a:
                col = col * points[:, v] ** a
        A[:, j] = col
    return A


def fit_implicit(samples, basis: Sequence[Monomial], *,
                 gap: float = 10.0, holdout_stride: int = 5) -> ImplicitSurfaceModel:
    """Fit one implicit polynomial vanishing on the sample cloud.

    The smallest right-singular direction of the train-split design matrix is
    the coefficient vector; rows with index % holdout_stride == holdout_stride-1
    are held out for the residual report.  Raises AmbiguousFitError when the
    second-smallest singular value is within ``gap`` of the smallest (the
    cloud lies on more than one basis-expressible surface).

    Complex sample points are accepted: the surface keeps real coefficients,
    so each complex point contributes its real and imaginary parts as two
    rows of constraints.  Mixing complex conjugate points with the real ones
    conditions the nullspace far better than the real slice alone.
    """
    pts = np.asarray(samples)
    if not np.iscomplexobj(pts):
        pts = pts.astype(float)
    if pts.ndim != 2:
        raise ValueError("samples must be a 2-d array of points")
    basis = [tuple(m) for m in basis]
    if len(pts) < 2 * len(basis):
        raise ValueError(f"need at least {2 * len(basis)} samples for a basis of size {len(basis)}, got {len(pts)}")
    idx = np.arange(len(pts))
    hold = idx % holdout_stride == holdout_stride - 1
    A_train = _design_matrix(pts[~hold], basis)
    A_hold = _design_matrix(pts[hold], basis)
    if np.iscomplexobj(A_train):
        A_train = np.vstack([A_train.real, A_train.imag])
    _, svals, vh = np.linalg.svd(A_train, full_matrices=False)
    if svals[-2] < gap * svals[-1] or svals[-2] == 0:
        raise AmbiguousFitError(
            f"rank deficiency exceeds one: sigma[-2]/sigma[-1] = "
            f"{svals[-2] / svals[-1] if svals[-1] else float('inf'):.3g} < {gap:g}")
    coeffs = vh[-1]
    pivot = int(np.argmax(np.abs(coeffs)))
    if coeffs[pivot] < 0:
        coeffs = -coeffs
    res = np.abs(A_hold @ coeffs) if len(A_hold) else np.zeros(0)
    rms = float(np.sqrt(np.mean(res ** 2))) if len(res) else 0.0
    mx = float(np.max(res)) if len(res) else 0.0
    return ImplicitSurfaceModel(
        basis=list(basis), coefficients=coeffs, rms_residual=rms,
        max_residual=mx, sample_count=len(pts),
        meta={"singular_gap": float(svals[-2] / svals[-1]) if svals[-1] else float("inf")})
