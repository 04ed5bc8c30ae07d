#!/usr/bin/env python3
"""
weingarten.py

Weingarten relations Phi(k_m, k_p) = 0 between the principal curvatures of a
rotational surface. With k_m = K'(x) and k_p = K(x)/x every relation becomes
a first-order ODE K' = F(x, K) on the momentum; the families below are solved
in closed form, anything else numerically by solve_generic().

Relations (CLI mini-language in parentheses):
  Linear          k_m = p k_p + q               (linear:p=..,q=..)
  SpecialLinear   a K_G + 2 b H + c = 0          (special:a=..,b=..,c=..)
  Cubic           k_m = mu k_p^3                 (cubic:mu=..)
  Hyperbola       k_m^2 - 2 k_p k_m + mu = 0     (hyperbola:mu=..)
  ConstPrincipal  k_m = value  or  k_p = value   (const:meridian=.. / const:parallel=..)
  Generic         K' = F(x, K)
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Callable, Dict, Mapping, Optional, Union

import numpy as np

from curvature import CurvatureRecord
from errors import (
    BadParams,
    EmptyDomain,
    GenericNotPointwise,
    ImmediateExit,
    NeedsNonzeroA,
)
from momentum import (
    CONE,
    ELASTICOID,
    ELLIPSOID,
    HORIZONTAL_PLANE,
    ONE_SHEET_HYPERBOLOID,
    PARABOLOID,
    SPHERE,
    TORUS,
    TWO_SHEETS_HYPERBOLOID,
    KINDS,
    CatalogEntry,
    MomentumFn,
    catalog,
    elastic_type,
    from_expression,
)
from numerics import DEFAULT_TOL, Event, Interval, Tolerance, Trajectory, monotone_slopes, solve_ivp

log = logging.getLogger(__name__)

FieldFn = Callable[[float, float], float]

# steps per unit of the solved x-window; keeps the Hermite table accurate
GENERIC_STEPS = 512


# ------------------------- relations -------------------------

class WRelation:
    """Base for the relation variants; residual() is Phi(k_m, k_p)."""

    name = "relation"

    def residual(self, rec: CurvatureRecord) -> float:
        raise NotImplementedError

    def field(self) -> FieldFn:
        raise NotImplementedError

    def params(self) -> Dict[str, float]:
        return {}


@dataclass(frozen=True)
class Linear(WRelation):
    p: float
    q: float = 0.0
    name = "linear"

    def __post_init__(self) -> None:
        if self.p == 0:
            raise BadParams("Linear: p must be nonzero (got 0)")

    def residual(self, rec: CurvatureRecord) -> float:
        return rec.k_m - self.p * rec.k_p - self.q

    def field(self) -> FieldFn:
        p, q = self.p, self.q
        return lambda x, K: p * K / x + q

    def params(self) -> Dict[str, float]:
        return {"p": self.p, "q": self.q}


@dataclass(frozen=True)
class SpecialLinear(WRelation):
    a: float
    b: float
    c: float = 0.0
    name = "special"

    def __post_init__(self) -> None:
        if self.a == 0 and self.b == 0:
            raise BadParams("SpecialLinear: a^2 + b^2 must be nonzero (got a=0, b=0)")

    def residual(self, rec: CurvatureRecord) -> float:
        return self.a * rec.K_G + 2.0 * self.b * rec.H + self.c

    def field(self) -> FieldFn:
        a, b, c = self.a, self.b, self.c
        return lambda x, K: -(b * K + c * x) / (a * K + b * x)

    def params(self) -> Dict[str, float]:
        return {"a": self.a, "b": self.b, "c": self.c}


@dataclass(frozen=True)
class Cubic(WRelation):
    mu: float
    name = "cubic"

    def __post_init__(self) -> None:
        if self.mu == 0:
            raise BadParams("Cubic: mu must be nonzero (got 0)")

    def residual(self, rec: CurvatureRecord) -> float:
        return rec.k_m - self.mu * rec.k_p**3

    def field(self) -> FieldFn:
        mu = self.mu
        return lambda x, K: mu * (K / x) ** 3

    def params(self) -> Dict[str, float]:
        return {"mu": self.mu}


@dataclass(frozen=True)
class Hyperbola(WRelation):
    """k_m = k_p + branch * sqrt(k_p^2 - mu) on the ODE side."""
    mu: float
    branch: int = 1
    name = "hyperbola"

    def __post_init__(self) -> None:
        if self.mu == 0:
            raise BadParams("Hyperbola: mu must be nonzero (got 0)")
        if self.branch not in (1, -1):
            raise BadParams(f"Hyperbola: branch must be +1 or -1 (got {self.branch})")

    def residual(self, rec: CurvatureRecord) -> float:
        return rec.k_m**2 - 2.0 * rec.k_p * rec.k_m + self.mu

    def field(self) -> FieldFn:
        mu, sgn = self.mu, self.branch

        def F(x: float, K: float) -> float:
            kp = K / x
            return kp + sgn * math.sqrt(kp * kp - mu)

        return F

    def params(self) -> Dict[str, float]:
        return {"mu": self.mu}


MERIDIAN = "meridian"
PARALLEL = "parallel"


@dataclass(frozen=True)
class ConstPrincipal(WRelation):
    which: str
    value: float
    name = "const"

    def __post_init__(self) -> None:
        if self.which not in (MERIDIAN, PARALLEL):
            raise BadParams(f"ConstPrincipal: which must be meridian or parallel (got {self.which!r})")

    def residual(self, rec: CurvatureRecord) -> float:
        k = rec.k_m if self.which == MERIDIAN else rec.k_p
        return k - self.value

    def field(self) -> FieldFn:
        v = self.value
        if self.which == MERIDIAN:
            return lambda x, K: v
        return lambda x, K: K / x

    def params(self) -> Dict[str, float]:
        return {self.which: self.value}


@dataclass(frozen=True)
class Generic(WRelation):
    F: FieldFn
    name = "generic"

    def residual(self, rec: CurvatureRecord) -> float:
        raise GenericNotPointwise("Generic relation K' = F(x, K) has no pointwise residual; compare against the ODE")

    def field(self) -> FieldFn:
        return self.F


def _parse_params(body: str, text: str) -> Dict[str, float]:
    out: Dict[str, float] = {}
    for item in filter(None, (p.strip() for p in body.split(","))):
        key, eq, val = item.partition("=")
        if not eq:
            raise BadParams(f"expected key=value in {text!r} (got {item!r})")
        try:
            out[key.strip()] = float(val)
        except ValueError:
            raise BadParams(f"{key.strip()}: not a number ({val!r})") from None
    return out


def _take(params: Dict[str, float], text: str, required, optional: Mapping[str, float] = {}) -> Dict[str, float]:
    unknown = set(params) - set(required) - set(optional)
    if unknown:
        raise BadParams(f"{text!r}: unknown parameter(s) {', '.join(sorted(unknown))}")
    missing = [k for k in required if k not in params]
    if missing:
        raise BadParams(f"{text!r}: missing parameter(s) {', '.join(missing)}")
    return {**optional, **params}


def parse_relation(text: str) -> WRelation:
    """'cubic:mu=1' -> Cubic(mu=1); see the module docstring for the forms."""
    head, _, body = text.strip().partition(":")
    head = head.strip().lower()
    params = _parse_params(body, text)
    if head == "linear":
        v = _take(params, text, ("p",), {"q": 0.0})
        return Linear(v["p"], v["q"])
    if head == "special":
        v = _take(params, text, ("a", "b"), {"c": 0.0})
        return SpecialLinear(v["a"], v["b"], v["c"])
    if head == "cubic":
        return Cubic(_take(params, text, ("mu",))["mu"])
    if head == "hyperbola":
        return Hyperbola(_take(params, text, ("mu",))["mu"])
    if head == "const":
        if len(params) != 1 or next(iter(params)) not in (MERIDIAN, PARALLEL):
            raise BadParams(f"{text!r}: expected const:meridian=<v> or const:parallel=<v>")
        which, value = next(iter(params.items()))
        return ConstPrincipal(which, value)
    raise BadParams(f"unknown relation {head!r}; known: linear, special, cubic, hyperbola, const")


def residual(r: WRelation, rec: CurvatureRecord) -> float:
    return r.residual(rec)


# ------------------------- closed-form families -------------------------

HINT = Interval(0.0, math.inf)


def _fmt(params: Mapping[str, float]) -> str:
    return ",".join(f"{k}={v:g}" for k, v in params.items())


def solve_linear(p: float, q: float, c: float, tol: Optional[Tolerance] = None) -> MomentumFn:
    """K = q x/(1-p) + c x^p  (p != 1);  K = q x ln x + c x  (p = 1)."""
    Linear(p, q)
    if p == 1.0:
        def ev(x): return q * x * np.log(x) + c * x
        def dv(x): return q * (np.log(x) + 1.0) + c
    else:
        r = q / (1.0 - p)
        def ev(x): return r * x + c * np.power(x, p)
        def dv(x): return r + c * p * np.power(x, p - 1.0)
    params = {"p": p, "q": q, "c": c}
    return from_expression(ev, HINT, f"Linear({_fmt(params)})", deriv=dv, params=params, tol=tol)


def classify_linear(p: float, q: float, c: float) -> str:
    if q != 0.0:
        return "linear weingarten"
    if c == 0.0:
        return "plane"
    named = {1.0: "sphere", -1.0: "catenoid", 0.5: "onducycloid", -0.5: "antiparaboloid"}
    if p in named:
        return named[p]
    return f"{p / (p - 1.0):g}-elastic"


def solve_special_linear(a: float, b: float, c: float, d: float, sign: int = 1,
                         tol: Optional[Tolerance] = None) -> MomentumFn:
    """
    Branch of a K^2 + 2 b x K + c x^2 = d:
        K = (-b x + sign * sqrt((b^2 - a c) x^2 + a d)) / a

    With c = d = 0 the two branches are K = 0 (a plane) and K = -2 b x / a;
    the latter is a sphere of radius -a / (2 b) and is selected by
    sign = -sgn(b). So a=-2, b=1 needs sign=-1 for the unit sphere.
    """
    SpecialLinear(a, b, c)
    if a == 0.0:
        raise NeedsNonzeroA(
            f"special linear with a=0 is linear: use linear:p=-1,q={-c / b:g} with c={d / (2 * b):g}"
        )
    if sign not in (1, -1):
        raise BadParams(f"solve_special_linear: sign must be +1 or -1 (got {sign})")
    g, ad = b * b - a * c, a * d

    def ev(x):
        return (-b * x + sign * np.sqrt(g * x * x + ad)) / a

    def dv(x):
        if g == 0.0:
            return -b / a + 0.0 * np.asarray(x, dtype=float)
        return (-b + sign * g * x / np.sqrt(g * x * x + ad)) / a

    params = {"a": a, "b": b, "c": c, "d": d}
    return from_expression(ev, HINT, f"SpecialLinear({_fmt(params)})", deriv=dv, params=params, tol=tol)


def special_linear_implicit(a: float, b: float, c: float, d: float, x, K):
    """a K^2 + 2 b x K + c x^2 - d; zero on every solution branch."""
    return a * K * K + 2.0 * b * x * K + c * x * x - d


def solve_cubic(mu: float, c: float, sign: int = 1, tol: Optional[Tolerance] = None) -> MomentumFn:
    """K = sign * x / sqrt(mu + c x^2)."""
    Cubic(mu)
    if sign not in (1, -1):
        raise BadParams(f"solve_cubic: sign must be +1 or -1 (got {sign})")

    def ev(x):
        return sign * x / np.sqrt(mu + c * x * x)

    def dv(x):
        return sign * mu / (mu + c * x * x) ** 1.5

    params = {"mu": mu, "c": c}
    return from_expression(ev, HINT, f"Cubic({_fmt(params)})", deriv=dv, params=params, tol=tol)


@dataclass(frozen=True)
class QuadricClass:
    kind: str
    params: Mapping[str, float] = field(default_factory=dict)

    # kind -> catalog kind
    CATALOG = {
        "Plane": HORIZONTAL_PLANE,
        "Sphere": SPHERE,
        "EllipsoidOfRevolution": ELLIPSOID,
        "TwoSheetsHyperboloid": TWO_SHEETS_HYPERBOLOID,
        "ParaboloidOfRevolution": PARABOLOID,
        "OneSheetHyperboloid": ONE_SHEET_HYPERBOLOID,
    }

    def entry(self, sign: int = 1) -> CatalogEntry:
        return CatalogEntry(self.CATALOG[self.kind], dict(self.params), negate=sign < 0)


def classify_cubic(mu: float, c: float) -> QuadricClass:
    """The quadric of revolution k_m = mu k_p^3 integrates to, for the constant c."""
    Cubic(mu)
    if mu > 0:
        if c == 0.0:
            return QuadricClass("Sphere", {"R": math.sqrt(mu)})
        if c == 1.0:
            return QuadricClass("ParaboloidOfRevolution", {"a": math.sqrt(mu)})
        if c < 1.0:
            a2 = mu / (1.0 - c)
            return QuadricClass("EllipsoidOfRevolution", {"a": math.sqrt(a2), "b": math.sqrt(a2 * a2 / mu)})
        a2 = mu / (c - 1.0)
        return QuadricClass("TwoSheetsHyperboloid", {"a": math.sqrt(a2), "b": math.sqrt(a2 * a2 / mu)})
    if not c > 1.0:
        raise EmptyDomain(f"Cubic(mu={mu:g}): mu < 0 needs c > 1 (got c={c:g})")
    a2 = mu / (1.0 - c)
    return QuadricClass("OneSheetHyperboloid", {"a": math.sqrt(a2), "b": math.sqrt(-a2 * a2 / mu)})


def solve_hyperbola(mu: float, a_coef: float) -> MomentumFn:
    """Elasticoid K = a x^2 + mu/(4a), i.e. modulus k = -mu/(4a)."""
    Hyperbola(mu)
    if not a_coef > 0:
        raise BadParams(f"solve_hyperbola: a_coef must be > 0 (got {a_coef})")
    k = -mu / (4.0 * a_coef)
    if not k > -1.0:
        raise EmptyDomain(f"Hyperbola(mu={mu:g}): K = a x^2 + {-k:g} >= 1 for every x (a_coef={a_coef:g})")
    return catalog(CatalogEntry(ELASTICOID, {"a": a_coef, "k": k}))


def sphere_branch(mu: float) -> MomentumFn:
    """Constant solution k_m = k_p = sqrt(mu): K = sqrt(mu) x, a sphere of radius 1/sqrt(mu)."""
    Hyperbola(mu)
    if not mu > 0:
        raise EmptyDomain(f"Hyperbola(mu={mu:g}): the umbilical branch needs mu > 0")
    return catalog(CatalogEntry(SPHERE, {"R": 1.0 / math.sqrt(mu)}))


def classify_hyperbola(mu: float, a_coef: Optional[float] = None) -> str:
    if a_coef is None:
        sphere_branch(mu)
        return "sphere"
    if not a_coef > 0:
        raise BadParams(f"classify_hyperbola: a_coef must be > 0 (got {a_coef})")
    return elastic_type(-mu / (4.0 * a_coef))


@dataclass(frozen=True)
class CylinderMarker:
    """The x = const solution of k_p = value; not a graph over x."""
    radius: float

    @property
    def label(self) -> str:
        return f"Cylinder(R={self.radius:g})"


def solve_const_principal(which: str, value: float, c: float = 0.0,
                          cylinder: bool = False) -> Union[MomentumFn, CylinderMarker]:
    """
    meridian: K = value x + c (plane, cone, sphere or torus)
    parallel: K = value x (plane or sphere), or the cylinder marker
    """
    ConstPrincipal(which, value)
    if which == PARALLEL:
        if cylinder:
            if value == 0:
                raise BadParams("solve_const_principal: a cylinder needs k_p != 0")
            return CylinderMarker(1.0 / abs(value))
        c = 0.0
    if value == 0.0:
        if c == 0.0:
            return catalog(CatalogEntry(HORIZONTAL_PLANE))
        if not abs(c) < 1.0:
            raise EmptyDomain(f"K = {c:g} is not a sine")
        return catalog(CatalogEntry(CONE, {"theta0": math.asin(c)}))
    R = 1.0 / abs(value)
    negate = value < 0
    if c == 0.0:
        return catalog(CatalogEntry(SPHERE, {"R": R}, negate))
    # value x + c = +-(x - a)/R
    a = -c / value
    if not a + R > 0:
        raise EmptyDomain(f"K = {value:g} x + {c:g} has |K| >= 1 for every x > 0")
    return catalog(CatalogEntry(TORUS, {"a": a, "R": R}, negate))


# ------------------------- numerical solve -------------------------

def _tabulated(traj_lo: Optional[Trajectory], traj_hi: Optional[Trajectory]) -> Trajectory:
    parts_s, parts_y, parts_p = [], [], []
    if traj_lo is not None and len(traj_lo.s) > 1:
        parts_s.append(traj_lo.s[::-1][:-1])
        parts_y.append(traj_lo.y[::-1][:-1])
        parts_p.append(traj_lo.yp[::-1][:-1])
    parts_s.append(traj_hi.s)
    parts_y.append(traj_hi.y)
    parts_p.append(traj_hi.yp)
    return Trajectory(np.concatenate(parts_s), np.concatenate(parts_y), np.concatenate(parts_p))


def solve_generic(
    F: FieldFn,
    x0: float,
    K0: float,
    x_span: Interval,
    tol: Optional[Tolerance] = None,
    label: str = "Generic",
) -> MomentumFn:
    """
    Integrate K' = F(x, K) from (x0, K0) both ways across x_span (its finite
    window when unbounded). Each direction stops where K^2 reaches 1 or F
    stops being finite. The result is tabulated as a monotone cubic Hermite
    interpolant of the solver's nodes; its derivative is F(x, K(x)).
    """
    tol = tol or DEFAULT_TOL
    x0, K0 = float(x0), float(K0)
    if not abs(K0) < 1.0:
        raise BadParams(f"solve_generic: |K0| must be < 1 (got {K0})")
    lo, hi = x_span.window()
    lo = max(lo, 0.0)
    if not lo <= x0 <= hi:
        raise BadParams(f"solve_generic: x0={x0} outside {x_span.as_tuple()}")
    max_step = (hi - lo) / GENERIC_STEPS

    def field_(x: float, y: np.ndarray) -> np.ndarray:
        try:
            return np.array([float(F(x, y[0]))])
        except (ArithmeticError, ValueError):
            return np.array([math.nan])

    events = [Event(lambda x, y: 1.0 - y[0] * y[0], "turning", terminal=True, direction=-1)]
    runs = {}
    for name, end in (("lo", lo), ("hi", hi)):
        if end == x0:
            runs[name] = None
            continue
        runs[name] = solve_ivp(field_, [K0], end, tol, events=events, s0=x0, max_step=max_step)
        if runs[name].status != "completed":
            log.debug("%s: %s side stopped at x=%r (%s)", label, name, runs[name].s_final, runs[name].status)

    x_lo = runs["lo"].s_final if runs["lo"] is not None else x0
    x_hi = runs["hi"].s_final if runs["hi"] is not None else x0
    if not x_lo < x_hi:
        raise ImmediateExit(f"{label}: solution leaves |K| < 1 immediately at x0={x0!r}")
    start = Trajectory(np.array([x0]), np.array([[K0]]), np.array([field_(x0, np.array([K0]))]))
    table = _tabulated(runs["lo"], runs["hi"] or start)
    table = Trajectory(table.s, table.y, monotone_slopes(table.s, table.y[:, 0], table.yp[:, 0])[:, None])

    def ev(x):
        xa = np.asarray(x, dtype=float)
        vals = np.asarray(table(xa), dtype=float)[..., 0]
        inside = (xa >= x_lo) & (xa <= x_hi)
        out = np.where(inside, vals, np.nan)
        return float(out) if out.ndim == 0 else out

    def dv(x):
        if np.ndim(x):
            return np.array([dv(float(t)) for t in np.ravel(x)]).reshape(np.shape(x))
        k = ev(x)
        if not math.isfinite(k):
            return math.nan
        try:
            return float(F(float(x), k))
        except (ArithmeticError, ValueError):
            return math.nan

    dom = Interval(x_lo, x_hi)
    log.debug("%s: tabulated on (%r, %r) with %d nodes", label, x_lo, x_hi, len(table.s))
    return MomentumFn(ev, dv, dom, label, {"x0": x0, "K0": K0})


def solve_relation(rel: WRelation, c: float = 0.0, sign: int = 1,
                   tol: Optional[Tolerance] = None) -> Union[MomentumFn, CylinderMarker]:
    """Closed-form solution of rel for the integration constant c (a_coef for Hyperbola)."""
    if isinstance(rel, Linear):
        return solve_linear(rel.p, rel.q, c, tol)
    if isinstance(rel, SpecialLinear):
        if rel.a == 0.0:
            return solve_linear(-1.0, -rel.c / rel.b, c / (2.0 * rel.b), tol)
        return solve_special_linear(rel.a, rel.b, rel.c, c, sign, tol)
    if isinstance(rel, Cubic):
        return solve_cubic(rel.mu, c, sign, tol)
    if isinstance(rel, Hyperbola):
        return solve_hyperbola(rel.mu, c) if c > 0 else sphere_branch(rel.mu)
    if isinstance(rel, ConstPrincipal):
        return solve_const_principal(rel.which, rel.value, c)
    raise GenericNotPointwise("a Generic relation has no closed form; use solve_generic")


def classify_relation(rel: WRelation, c: float = 0.0) -> Dict[str, object]:
    """Machine-readable classification for reports; classes are lowercase catalog names."""
    if isinstance(rel, Cubic):
        q = classify_cubic(rel.mu, c)
        return {"class": KINDS[q.entry().kind][0], **dict(q.params)}
    if isinstance(rel, Hyperbola):
        return {"class": classify_hyperbola(rel.mu, c if c > 0 else None)}
    if isinstance(rel, Linear):
        return {"class": classify_linear(rel.p, rel.q, c)}
    if isinstance(rel, SpecialLinear):
        if rel.a == 0.0:
            return {"class": classify_linear(-1.0, -rel.c / rel.b, c / (2.0 * rel.b))}
        return {"class": "special linear weingarten"}
    if isinstance(rel, ConstPrincipal):
        m = solve_const_principal(rel.which, rel.value, c)
        return {"class": KINDS[m.kind][0] if isinstance(m, MomentumFn) else "cylinder"}
    return {"class": "generic"}
