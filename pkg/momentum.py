#!/usr/bin/env python3
"""
momentum.py

The geometric linear momentum K(x) of a generatrix: K = sin(theta) of the
unit tangent as a function of the distance x > 0 to the axis. Its derivative
is the curvature, K'(x) = kappa(x), and K determines the curve up to a
translation along the axis.

Provides:
- MomentumFn: eval / deriv / open domain where K^2 < 1
- catalog(): closed-form momenta of the classical surfaces of revolution
- from_expression(): user K, domain located numerically
- scale(): homothety K_lambda(x) = K(x / lambda)
- momentum_of_samples(): K = z' / |alpha'| from any sampled parametrization
- elastic_type(): the seven elastic-curve types by modulus

Catalog entries are addressable from the CLI as name:param=value,...
  sphere:R=2   ellipsoid:a=2,b=1   torus:a=2,R=1   elasticoid:a=1,k=0.5
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Callable, Dict, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from errors import BadParams, EmptyDomain
from numerics import (
    DEFAULT_TOL,
    Interval,
    Tolerance,
    bisect_boundary,
    fd_derivative,
    find_root,
)

log = logging.getLogger(__name__)

RealFn = Callable[[float], float]

# a finite domain end counts as a turning point when |K^2 - 1| is below this
TURNING_TOL = 1e-8


@dataclass(frozen=True)
class MomentumFn:
    eval: RealFn
    deriv: RealFn
    domain: Interval
    label: str = "K"
    params: Mapping[str, float] = field(default_factory=dict)
    kind: str = "Expression"

    def __post_init__(self) -> None:
        if self.domain.lo < 0:
            raise BadParams(f"{self.label}: domain must lie in x >= 0 (got lo={self.domain.lo})")
        object.__setattr__(self, "params", MappingProxyType(dict(self.params)))

    def __call__(self, x):
        return self.eval(x)

    def value(self, x: float) -> float:
        with np.errstate(all="ignore"):
            return float(self.eval(x))

    def slope(self, x: float) -> float:
        with np.errstate(all="ignore"):
            return float(self.deriv(x))

    def is_turning_end(self, x_end: float) -> bool:
        """True when the finite domain end x_end is a turning point (K^2 = 1)."""
        if not math.isfinite(x_end):
            return False
        try:
            k = self.value(x_end)
        except (ArithmeticError, ValueError):
            return False
        return math.isfinite(k) and abs(k * k - 1.0) <= TURNING_TOL

    def describe(self) -> Dict[str, object]:
        return {
            "label": self.label,
            "kind": self.kind,
            "params": dict(self.params),
            "domain": [self.domain.lo, self.domain.hi],
        }


# ------------------------- catalog -------------------------

HORIZONTAL_PLANE = "HorizontalPlane"
CONE = "Cone"
SPHERE = "Sphere"
TORUS = "Torus"
CATENOID = "Catenoid"
ONDUCYCLOID = "Onducycloid"
PSEUDOSPHERE = "Pseudosphere"
ANTIPARABOLOID = "Antiparaboloid"
ELLIPSOID = "Ellipsoid"
ONE_SHEET_HYPERBOLOID = "OneSheetHyperboloid"
TWO_SHEETS_HYPERBOLOID = "TwoSheetsHyperboloid"
PARABOLOID = "Paraboloid"
ELASTICOID = "Elasticoid"
DELAUNAY = "DelaunayMomentum"
DARBOUX = "DarbouxMomentum"

# kind -> (cli name, required params, example params)
KINDS: Dict[str, Tuple[str, Tuple[str, ...], Dict[str, float]]] = {
    HORIZONTAL_PLANE: ("plane", (), {}),
    CONE: ("cone", ("theta0",), {"theta0": 0.5}),
    SPHERE: ("sphere", ("R",), {"R": 1.0}),
    TORUS: ("torus", ("a", "R"), {"a": 2.0, "R": 1.0}),
    CATENOID: ("catenoid", ("a",), {"a": 1.0}),
    ONDUCYCLOID: ("onducycloid", ("R",), {"R": 1.0}),
    PSEUDOSPHERE: ("pseudosphere", ("a",), {"a": 1.0}),
    ANTIPARABOLOID: ("antiparaboloid", ("c",), {"c": 1.0}),
    ELLIPSOID: ("ellipsoid", ("a", "b"), {"a": 2.0, "b": 1.0}),
    ONE_SHEET_HYPERBOLOID: ("hyperboloid1", ("a", "b"), {"a": 1.0, "b": 1.0}),
    TWO_SHEETS_HYPERBOLOID: ("hyperboloid2", ("a", "b"), {"a": 1.0, "b": 1.0}),
    PARABOLOID: ("paraboloid", ("a",), {"a": 1.0}),
    ELASTICOID: ("elasticoid", ("a", "k"), {"a": 1.0, "k": 1.5}),
    DELAUNAY: ("delaunay", ("H0", "c"), {"H0": 0.5, "c": 0.1}),
    DARBOUX: ("darboux", ("K0", "c"), {"K0": -1.0, "c": 0.75}),
}
CLI_NAMES = {name: kind for kind, (name, _, _) in KINDS.items()}


@dataclass(frozen=True)
class CatalogEntry:
    kind: str
    params: Mapping[str, float] = field(default_factory=dict)
    negate: bool = False

    def __post_init__(self) -> None:
        if self.kind not in KINDS:
            raise BadParams(f"unknown catalog kind {self.kind!r}; known: {', '.join(KINDS)}")
        missing = [p for p in KINDS[self.kind][1] if p not in self.params]
        if missing:
            raise BadParams(f"{self.kind}: missing parameter(s) {', '.join(missing)}")
        object.__setattr__(self, "params", MappingProxyType({k: float(v) for k, v in self.params.items()}))

    @property
    def label(self) -> str:
        inner = ",".join(f"{k}={v:g}" for k, v in self.params.items())
        sign = "-" if self.negate else ""
        return f"{sign}{self.kind}({inner})"


def parse_entry(text: str, negate: bool = False) -> CatalogEntry:
    """'ellipsoid:a=2,b=1' -> CatalogEntry(Ellipsoid, {a: 2, b: 1})"""
    name, _, rest = text.strip().partition(":")
    kind = CLI_NAMES.get(name.strip().lower())
    if kind is None:
        raise BadParams(f"unknown surface {name!r}; known: {', '.join(sorted(CLI_NAMES))}")
    params: Dict[str, float] = {}
    for item in filter(None, (p.strip() for p in rest.split(","))):
        key, eq, val = item.partition("=")
        if not eq:
            raise BadParams(f"expected key=value in {text!r} (got {item!r})")
        try:
            params[key.strip()] = float(val)
        except ValueError:
            raise BadParams(f"{key.strip()}: not a number ({val!r})") from None
    return CatalogEntry(kind, params, negate)


def _require(ok: bool, kind: str, constraint: str, got: str) -> None:
    if not ok:
        raise BadParams(f"{kind}: {constraint} (got {got})")


def _valid_at(fn: RealFn, x: float) -> bool:
    try:
        with np.errstate(all="ignore"):
            k = float(fn(x))
    except (ArithmeticError, ValueError):
        return False
    return math.isfinite(k) and k * k < 1.0


def _component(fn: RealFn, cuts: Sequence[float], label: str) -> Interval:
    """
    Widest open interval of x > 0 between consecutive cut points on which
    K^2 < 1. The cut points are the analytically known places where K = +-1
    or where the formula itself breaks down.
    """
    pts = sorted({c for c in cuts if math.isfinite(c) and c > 0.0})
    edges = [0.0] + pts + [math.inf]
    best: Optional[Tuple[float, float]] = None
    for lo, hi in zip(edges[:-1], edges[1:]):
        mid = 0.5 * (lo + hi) if math.isfinite(hi) else 2.0 * lo + 1.0
        if not _valid_at(fn, mid):
            continue
        if best is None or (hi - lo) > (best[1] - best[0]):
            best = (lo, hi)
    if best is None:
        raise EmptyDomain(f"{label}: K^2 >= 1 for every x > 0")
    return Interval(best[0], best[1])


def _quadratic_roots(a: float, b: float, c: float) -> List[float]:
    """Real roots of a*x^2 + b*x + c = 0 (linear if a == 0)."""
    if a == 0.0:
        return [] if b == 0.0 else [-c / b]
    disc = b * b - 4.0 * a * c
    if disc < 0.0:
        return []
    sq = math.sqrt(disc)
    # stable form
    q = -0.5 * (b + math.copysign(sq, b)) if b != 0.0 else -0.5 * sq
    roots = []
    if q != 0.0:
        roots.append(c / q)
    roots.append(q / a)
    return roots


def _positive_sqrt_roots(values: Sequence[float]) -> List[float]:
    """x > 0 with x^2 = v for each v > 0."""
    return [math.sqrt(v) for v in values if v > 0.0 and math.isfinite(v)]


def catalog(entry: CatalogEntry) -> MomentumFn:
    """Closed-form momentum, analytic derivative and maximal domain for a catalog entry."""
    kind, p = entry.kind, entry.params
    sqrt = np.sqrt

    if kind == HORIZONTAL_PLANE:
        def ev(x): return 0.0 * np.asarray(x, dtype=float)
        def dv(x): return 0.0 * np.asarray(x, dtype=float)
        dom = Interval(0.0, math.inf)

    elif kind == CONE:
        t0 = p["theta0"]
        _require(abs(t0) < 0.5 * math.pi, kind, "theta0 must lie in (-pi/2, pi/2)", f"{t0}")
        s0 = math.sin(t0)
        def ev(x): return s0 + 0.0 * np.asarray(x, dtype=float)
        def dv(x): return 0.0 * np.asarray(x, dtype=float)
        dom = Interval(0.0, math.inf)

    elif kind == SPHERE:
        R = p["R"]
        _require(R > 0, kind, "R must be > 0", f"{R}")
        def ev(x): return x / R
        def dv(x): return 1.0 / R + 0.0 * np.asarray(x, dtype=float)
        dom = Interval(0.0, R)

    elif kind == TORUS:
        a, R = p["a"], p["R"]
        _require(R > 0, kind, "R must be > 0", f"{R}")
        _require(a != 0, kind, "a must be nonzero", f"{a}")
        _require(a + R > 0, kind, "a + R must be > 0 (no part of the circle has x > 0)", f"a={a}, R={R}")
        def ev(x): return (x - a) / R
        def dv(x): return 1.0 / R + 0.0 * np.asarray(x, dtype=float)
        dom = Interval(max(a - R, 0.0), a + R)

    elif kind == CATENOID:
        a = p["a"]
        _require(a > 0, kind, "a must be > 0", f"{a}")
        def ev(x): return a / x
        def dv(x): return -a / (x * x)
        dom = Interval(a, math.inf)

    elif kind == ONDUCYCLOID:
        R = p["R"]
        _require(R > 0, kind, "R must be > 0", f"{R}")
        def ev(x): return sqrt(x) / math.sqrt(2.0 * R)
        def dv(x): return 1.0 / (2.0 * sqrt(2.0 * R * x))
        dom = Interval(0.0, 2.0 * R)

    elif kind == PSEUDOSPHERE:
        a = p["a"]
        _require(a > 0, kind, "a must be > 0", f"{a}")
        def ev(x): return sqrt(1.0 - x * x / (a * a))
        def dv(x): return -x / (a * a * sqrt(1.0 - x * x / (a * a)))
        dom = Interval(0.0, a)

    elif kind == ANTIPARABOLOID:
        c = p["c"]
        _require(c > 0, kind, "c must be > 0", f"{c}")
        def ev(x): return c / sqrt(x)
        def dv(x): return -0.5 * c / (x * sqrt(x))
        dom = Interval(c * c, math.inf)

    elif kind == ELLIPSOID:
        a, b = p["a"], p["b"]
        _require(a > 0 and b > 0, kind, "a and b must be > 0", f"a={a}, b={b}")
        a4, g = a**4, a * a - b * b
        def ev(x): return b * x / sqrt(a4 - g * x * x)
        def dv(x): return b * a4 / (a4 - g * x * x) ** 1.5
        dom = Interval(0.0, a)

    elif kind == ONE_SHEET_HYPERBOLOID:
        a, b = p["a"], p["b"]
        _require(a > 0 and b > 0, kind, "a and b must be > 0", f"a={a}, b={b}")
        a4, g = a**4, a * a + b * b
        def ev(x): return b * x / sqrt(g * x * x - a4)
        def dv(x): return -b * a4 / (g * x * x - a4) ** 1.5
        dom = Interval(a, math.inf)

    elif kind == TWO_SHEETS_HYPERBOLOID:
        a, b = p["a"], p["b"]
        _require(a > 0 and b > 0, kind, "a and b must be > 0", f"a={a}, b={b}")
        a4, g = a**4, a * a + b * b
        def ev(x): return b * x / sqrt(a4 + g * x * x)
        def dv(x): return b * a4 / (a4 + g * x * x) ** 1.5
        dom = Interval(0.0, math.inf)

    elif kind == PARABOLOID:
        a = p["a"]
        _require(a > 0, kind, "a must be > 0", f"{a}")
        def ev(x): return x / sqrt(a * a + x * x)
        def dv(x): return a * a / (a * a + x * x) ** 1.5
        dom = Interval(0.0, math.inf)

    elif kind == ELASTICOID:
        a, k = p["a"], p["k"]
        _require(a > 0, kind, "a must be > 0", f"{a}")
        _require(k > -1, kind, "k must be > -1", f"{k}")
        def ev(x): return a * x * x - k
        def dv(x): return 2.0 * a * x
        dom = Interval(math.sqrt(max(k - 1.0, 0.0) / a), math.sqrt((k + 1.0) / a))

    elif kind == DELAUNAY:
        H0, c = p["H0"], p["c"]
        _require(H0 != 0 or c != 0, kind, "H0 and c cannot both vanish (use plane)", "H0=0, c=0")
        def ev(x): return H0 * x + c / x
        def dv(x): return H0 - c / (x * x)
        cuts = _quadratic_roots(H0, -1.0, c) + _quadratic_roots(H0, 1.0, c)
        dom = _component(ev, cuts, entry.label)

    elif kind == DARBOUX:
        K0, c = p["K0"], p["c"]
        _require(K0 != 0, kind, "K0 must be nonzero", f"{K0}")
        def ev(x): return sqrt(K0 * x * x + c)
        def dv(x): return K0 * x / sqrt(K0 * x * x + c)
        cuts = _positive_sqrt_roots([-c / K0, (1.0 - c) / K0])
        dom = _component(ev, cuts, entry.label)

    else:  # pragma: no cover - CatalogEntry validates kind
        raise BadParams(f"unknown catalog kind {kind!r}")

    if entry.negate:
        ev0, dv0 = ev, dv
        def ev(x): return -ev0(x)
        def dv(x): return -dv0(x)

    return MomentumFn(ev, dv, dom, entry.label, dict(p), kind)


def catalog_named(text: str, negate: bool = False) -> MomentumFn:
    return catalog(parse_entry(text, negate))


# ------------------------- user expressions -------------------------

def _scan_grid(hint: Interval, samples: int) -> np.ndarray:
    lo, hi = hint.lo, hint.hi
    if math.isfinite(lo) and math.isfinite(hi):
        return lo + (hi - lo) * (np.arange(samples) + 0.5) / samples
    if math.isfinite(lo):
        base = max(1.0, abs(lo))
        return lo + np.geomspace(1e-9 * base, 1e9 * base, samples)
    if math.isfinite(hi):
        base = max(1.0, abs(hi))
        return hi - np.geomspace(1e9 * base, 1e-9 * base, samples)
    raise BadParams("from_expression: domain hint must have at least one finite end")


def _refine_end(fn: RealFn, inside: float, outside: float, tol: Tolerance) -> float:
    """Boundary of K^2 < 1 between a valid and an invalid sample."""
    try:
        with np.errstate(all="ignore"):
            k_out = float(fn(outside))
    except (ArithmeticError, ValueError):
        k_out = math.nan
    width = tol.abs * max(1.0, abs(inside))
    if math.isfinite(k_out):
        lo, hi = min(inside, outside), max(inside, outside)

        def g(x: float) -> float:
            with np.errstate(all="ignore"):
                return 1.0 - float(fn(x)) ** 2

        try:
            return find_root(g, Interval(lo, hi, False, False), tol)
        except (ArithmeticError, ValueError):
            pass
    return bisect_boundary(lambda x: _valid_at(fn, x), inside, outside, width)


def locate_domain(fn: RealFn, hint: Interval, tol: Optional[Tolerance] = None,
                  samples: int = 2048, label: str = "K") -> Interval:
    """
    Open sub-interval of `hint` where K is finite and K^2 < 1.

    The hint is scanned on a grid (geometric towards an infinite end). Of the
    valid runs the one holding the hint midpoint wins, else the widest. Ends
    strictly inside the hint are refined by find_root on 1 - K^2, or by
    bisection where K is not finite on the far side.
    """
    tol = tol or DEFAULT_TOL
    grid = _scan_grid(hint, samples)
    ok = np.array([_valid_at(fn, float(x)) for x in grid])
    if not ok.any():
        raise EmptyDomain(f"{label}: K^2 >= 1 (or K undefined) throughout {hint.as_tuple()}")

    runs: List[Tuple[int, int]] = []
    i = 0
    n = len(grid)
    while i < n:
        if ok[i]:
            j = i
            while j + 1 < n and ok[j + 1]:
                j += 1
            runs.append((i, j))
            i = j + 1
        else:
            i += 1

    chosen = None
    if hint.bounded:
        mid = 0.5 * (hint.lo + hint.hi)
        for r in runs:
            if grid[r[0]] <= mid <= grid[r[1]]:
                chosen = r
                break
    if chosen is None:
        chosen = max(runs, key=lambda r: grid[r[1]] - grid[r[0]])

    i0, i1 = chosen
    lo = hint.lo if i0 == 0 else _refine_end(fn, float(grid[i0]), float(grid[i0 - 1]), tol)
    hi = hint.hi if i1 == n - 1 else _refine_end(fn, float(grid[i1]), float(grid[i1 + 1]), tol)
    if lo < 0.0:
        lo = 0.0
    log.debug("%s: domain located at (%r, %r)", label, lo, hi)
    return Interval(lo, hi)


def from_expression(
    eval: RealFn,
    domain_hint: Interval,
    label: str = "K",
    deriv: Optional[RealFn] = None,
    params: Optional[Mapping[str, float]] = None,
    tol: Optional[Tolerance] = None,
) -> MomentumFn:
    """
    MomentumFn for a user-supplied K. Without an explicit derivative, K' is a
    central finite difference of eval.
    """
    if domain_hint.lo < 0.0:
        domain_hint = Interval(0.0, domain_hint.hi, True, domain_hint.hi_open)
    dom = locate_domain(eval, domain_hint, tol, label=label)
    if deriv is None:
        def deriv(x, _f=eval):
            if np.ndim(x):
                return np.array([fd_derivative(_f, float(t)) for t in np.ravel(x)]).reshape(np.shape(x))
            return fd_derivative(_f, x)
    return MomentumFn(eval, deriv, dom, label, dict(params or {}))


def scale(m: MomentumFn, lam: float) -> MomentumFn:
    """Homothety by lam > 0: K_lam(x) = K(x / lam), K_lam'(x) = K'(x / lam) / lam."""
    lam = float(lam)
    if not lam > 0.0 or not math.isfinite(lam):
        raise BadParams(f"scale: lambda must be > 0 (got {lam})")
    if lam == 1.0:
        return m
    ev0, dv0 = m.eval, m.deriv

    def ev(x):
        return ev0(x / lam)

    def dv(x):
        return dv0(x / lam) / lam

    params = dict(m.params)
    params["scale"] = params.get("scale", 1.0) * lam
    return MomentumFn(ev, dv, m.domain.scaled(lam), f"{m.label}*{lam:g}", params, m.kind)


# ------------------------- sampled curves -------------------------

def momentum_of_samples(x: Sequence[float], z: Sequence[float]) -> Tuple[np.ndarray, np.ndarray]:
    """
    Momentum along a curve sampled in ANY parameter: K = z' / |alpha'|.
    Chord-based, so values sit at the chord midpoints: (x_mid, K_mid).
    """
    xs = np.asarray(x, dtype=float)
    zs = np.asarray(z, dtype=float)
    if xs.shape != zs.shape or xs.ndim != 1 or len(xs) < 2:
        raise BadParams("momentum_of_samples: need two equal-length 1-d arrays with >= 2 samples")
    dx, dz = np.diff(xs), np.diff(zs)
    speed = np.hypot(dx, dz)
    if np.any(speed == 0.0):
        raise BadParams("momentum_of_samples: repeated consecutive samples")
    return 0.5 * (xs[:-1] + xs[1:]), dz / speed


ELASTIC_K1 = 0.65222


def elastic_type(k: float, tol: float = 1e-5) -> str:
    """Type of the elastic curve K = a x^2 - k by its modulus k > -1."""
    k = float(k)
    if not k > -1.0:
        raise BadParams(f"elastic_type: modulus must be > -1 (got {k})")
    if abs(k) <= tol:
        return "right lintearia"
    if abs(k - ELASTIC_K1) <= tol:
        return "pseudolemniscate"
    if abs(k - 1.0) <= tol:
        return "convict curve"
    if k < 0.0:
        return "pseudo-sinusoid"
    if k < ELASTIC_K1:
        return "elastic 0<k<k1"
    if k < 1.0:
        return "elastic k1<k<1"
    return "pseudotrochoid"
