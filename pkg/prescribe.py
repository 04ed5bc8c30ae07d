#!/usr/bin/env python3
"""
prescribe.py

Rotational surfaces with prescribed mean or Gauss curvature as functions of
the distance x to the axis:

    x K(x)  = 2 int x H(x) dx + c
    K(x)^2  = 2 int x K_G(x) dx + c

Each integration constant c gives one member of a one-parameter family. The
classical cases are checked against closed forms: H = 0 (plane, catenoid),
H = H0 (Delaunay roulettes), K_G = K0 (Darboux surfaces, pseudosphere).

Prescribed functions from the CLI:
  const:0.5          H = 0.5
  poly:0,-1          K_G = -x        (coefficients in increasing degree)
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Callable, Optional, Sequence, Tuple

import numpy as np
from numpy.polynomial import polynomial as P

from errors import BadParams, DegenerateCurve, EmptyDomain, SignBreakdown
from generatrix import GeneratrixCurve
from momentum import MomentumFn, locate_domain
from numerics import (
    DEFAULT_TOL,
    Interval,
    Tolerance,
    elliptic_e_inc,
    integrate_adaptive,
)

log = logging.getLogger(__name__)

RealFn = Callable[[float], float]

MEAN_CURVATURE = "MeanCurvature"
GAUSS_CURVATURE = "GaussCurvature"

# |K| below this with K_G != 0 is where k_m = x K_G / K blows up
SIGN_EPS = 1e-8

POSITIVE = "Positive"
CONICAL_POINT = "ConicalPoint"
HYPERBOLOID_TYPE = "HyperboloidType"
PSEUDOSPHERE = "Pseudosphere"
DARBOUX_FAMILIES = (POSITIVE, CONICAL_POINT, HYPERBOLOID_TYPE, PSEUDOSPHERE)


# ------------------------- prescribed functions -------------------------

@dataclass(frozen=True)
class PolyFn:
    """f(x) = c0 + c1 x + c2 x^2 + ...; moment(a, b) = int_a^b t f(t) dt exactly."""
    coeffs: Tuple[float, ...]

    def __call__(self, x):
        return P.polyval(x, self.coeffs)

    def moment(self, a: float, b: float) -> float:
        anti = P.polyint((0.0,) + tuple(self.coeffs))
        return float(P.polyval(b, anti) - P.polyval(a, anti))

    @property
    def label(self) -> str:
        if len(self.coeffs) == 1:
            return f"const:{self.coeffs[0]:g}"
        return "poly:" + ",".join(f"{c:g}" for c in self.coeffs)


def parse_prescribed(text: str) -> PolyFn:
    head, _, body = text.strip().partition(":")
    head = head.strip().lower()
    try:
        values = tuple(float(v) for v in body.split(",") if v.strip())
    except ValueError:
        raise BadParams(f"{text!r}: coefficients must be numbers") from None
    if head == "const":
        if len(values) != 1:
            raise BadParams(f"{text!r}: const takes exactly one value")
        return PolyFn(values)
    if head == "poly":
        if not values:
            raise BadParams(f"{text!r}: poly needs at least one coefficient")
        return PolyFn(values)
    raise BadParams(f"unknown prescribed function {head!r}; use const:<v> or poly:<c0>,<c1>,...")


def _moment(fn: RealFn, a: float, b: float, tol: Tolerance) -> float:
    exact = getattr(fn, "moment", None)
    if exact is not None:
        return exact(a, b)
    return integrate_adaptive(lambda t: t * np.asarray(fn(t), dtype=float), a, b, tol, singular_ends=False)


def _elementwise(scalar: RealFn) -> RealFn:
    def f(x):
        if np.ndim(x):
            return np.array([scalar(float(t)) for t in np.ravel(x)]).reshape(np.shape(x))
        return scalar(float(x))

    return f


# ------------------------- builds -------------------------

@dataclass(frozen=True)
class PrescribedBuild:
    momentum: MomentumFn
    constant: float
    source: str
    base_x: float


HINT = Interval(0.0, math.inf)


def from_mean_curvature(
    Hfn: RealFn,
    c: float,
    base_x: float = 0.0,
    tol: Optional[Tolerance] = None,
    domain_hint: Interval = HINT,
) -> PrescribedBuild:
    """K(x) = (2 int_{base_x}^x t H(t) dt + c) / x, K'(x) = 2 H(x) - K(x)/x."""
    tol = tol or DEFAULT_TOL
    base_x, c = float(base_x), float(c)
    if base_x < 0 or not math.isfinite(base_x):
        raise BadParams(f"from_mean_curvature: base_x must be >= 0 (got {base_x})")

    def k_scalar(x: float) -> float:
        if not x > 0.0:
            return math.nan
        try:
            return (2.0 * _moment(Hfn, base_x, x, tol) + c) / x
        except (ArithmeticError, ValueError):
            return math.nan

    def dk_scalar(x: float) -> float:
        if not x > 0.0:
            return math.nan
        return 2.0 * float(Hfn(x)) - k_scalar(x) / x

    ev, dv = _elementwise(k_scalar), _elementwise(dk_scalar)
    name = getattr(Hfn, "label", "H")
    label = f"H[{name}](c={c:g})"
    dom = locate_domain(ev, domain_hint, tol, label=label)
    m = MomentumFn(ev, dv, dom, label, {"c": c, "base_x": base_x}, "PrescribedH")
    return PrescribedBuild(m, c, MEAN_CURVATURE, base_x)


def from_gauss_curvature(
    Kgfn: RealFn,
    c: float,
    base_x: float = 0.0,
    sign: int = 1,
    tol: Optional[Tolerance] = None,
    domain_hint: Interval = HINT,
) -> PrescribedBuild:
    """
    K(x) = sign * sqrt(2 int_{base_x}^x t K_G(t) dt + c), K'(x) = x K_G(x) / K(x).

    Where |K| < SIGN_EPS and K_G != 0 the meridian curvature is infinite;
    such points are left out of the domain (and K' raises SignBreakdown).
    """
    tol = tol or DEFAULT_TOL
    base_x, c = float(base_x), float(c)
    if sign not in (1, -1):
        raise BadParams(f"from_gauss_curvature: sign must be +1 or -1 (got {sign})")
    if base_x < 0 or not math.isfinite(base_x):
        raise BadParams(f"from_gauss_curvature: base_x must be >= 0 (got {base_x})")

    def root(x: float) -> float:
        """|K| = sqrt(2 int t K_G + c), NaN off the real branch."""
        if not x > 0.0:
            return math.nan
        try:
            r = 2.0 * _moment(Kgfn, base_x, x, tol) + c
        except (ArithmeticError, ValueError):
            return math.nan
        return math.sqrt(r) if r >= 0.0 else math.nan

    def k_scalar(x: float) -> float:
        k = root(x)
        if k < SIGN_EPS and float(Kgfn(x)) != 0.0:
            return math.nan
        return sign * k

    def dk_scalar(x: float) -> float:
        k = root(x)
        if not math.isfinite(k):
            return math.nan
        kg = float(Kgfn(x))
        if kg == 0.0:
            return 0.0
        if k < SIGN_EPS:
            raise SignBreakdown(f"K -> 0 at x={x!r} with K_G = {kg!r}")
        return x * kg / (sign * k)

    ev, dv = _elementwise(k_scalar), _elementwise(dk_scalar)
    name = getattr(Kgfn, "label", "K_G")
    label = f"K_G[{name}](c={c:g})"
    dom = locate_domain(ev, domain_hint, tol, label=label)
    for end in (dom.lo, dom.hi):
        if math.isfinite(end) and end > 0.0:
            r = 2.0 * _moment(Kgfn, base_x, end, tol) + c
            if abs(r) < 1e-6 and float(Kgfn(end)) != 0.0:
                log.warning("%s: domain truncated at x=%r where K -> 0 (k_m unbounded)", label, end)
    m = MomentumFn(ev, dv, dom, label, {"c": c, "base_x": base_x}, "PrescribedKG")
    return PrescribedBuild(m, c, GAUSS_CURVATURE, base_x)


# ------------------------- Delaunay -------------------------

@dataclass(frozen=True)
class DelaunayParams:
    a: float
    b: float
    eps: int

    def __post_init__(self) -> None:
        if not (self.a > 0 and self.b > 0):
            raise BadParams(f"DelaunayParams: a, b must be > 0 (got a={self.a}, b={self.b})")
        if self.eps not in (1, -1):
            raise BadParams(f"DelaunayParams: eps must be +1 or -1 (got {self.eps})")
        if self.eps == 1 and not self.a > self.b:
            raise BadParams(f"DelaunayParams: elliptic roulette needs a > b (got a={self.a}, b={self.b})")

    def rhs(self, x):
        """(dx/dz)^2 along the roulette."""
        q = x * x + self.eps * self.b * self.b
        return (4.0 * self.a * self.a * x * x - q * q) / (q * q)


def delaunay_params(H0: float, c: float) -> Optional[DelaunayParams]:
    """a = 1/(2 H0), eps b^2 = c/H0; None for the sphere (c = 0)."""
    if H0 == 0:
        raise BadParams("delaunay_params: H0 must be nonzero (H = 0 gives plane or catenoid)")
    if c == 0:
        return None
    eb2 = c / H0
    return DelaunayParams(1.0 / (2.0 * abs(H0)), math.sqrt(abs(eb2)), 1 if eb2 > 0 else -1)


def classify_cmc(H0: float, c: float) -> str:
    if H0 == 0:
        return "plane" if c == 0 else "catenoid"
    if c == 0:
        return "sphere"
    return "onduloid" if c / H0 > 0 else "nodoid"


def delaunay_residual(curve: GeneratrixCurve, p: DelaunayParams, min_slope: float = 0.0) -> float:
    """
    sup |cot(theta)^2 - rhs(x)| over the curve samples, i.e. the roulette ODE
    (dx/dz)^2 = rhs(x) with the exact tangent. Samples with |sin theta| <=
    min_slope are skipped.
    """
    s = np.sin(curve.theta)
    keep = np.abs(s) > min_slope
    if min_slope == 0.0 and not np.all(s != 0.0):
        raise DegenerateCurve("delaunay_residual: curve has z-stationary samples")
    if not keep.any():
        raise DegenerateCurve(f"delaunay_residual: no sample with |dz/ds| > {min_slope}")
    cot2 = (np.cos(curve.theta[keep]) / s[keep]) ** 2
    return float(np.max(np.abs(cot2 - p.rhs(curve.x[keep]))))


def catenary_residual(curve: GeneratrixCurve, a: float) -> float:
    """max |x - a cosh((z - z*)/a)| with the axial offset z* fitted by median."""
    sgn = np.sign(np.cos(curve.theta))
    sgn[sgn == 0] = 1.0
    ratio = np.maximum(curve.x / a, 1.0)
    zstar = float(np.median(curve.z - sgn * a * np.arccosh(ratio)))
    return float(np.max(np.abs(curve.x - a * np.cosh((curve.z - zstar) / a))))


# ------------------------- Darboux -------------------------

def darboux_family(K0: float, c: float) -> Tuple[str, float, float]:
    """(family, k, a) for K^2 = K0 x^2 + c, a = 1/sqrt|K0|."""
    if K0 == 0:
        raise BadParams("darboux_family: K0 must be nonzero")
    a = 1.0 / math.sqrt(abs(K0))
    if K0 > 0:
        if not c < 1.0:
            raise EmptyDomain(f"K_G = {K0:g} > 0 needs c < 1 (got c={c:g})")
        return POSITIVE, math.sqrt(1.0 - c), a
    if not c > 0.0:
        raise EmptyDomain(f"K_G = {K0:g} < 0 needs c > 0 (got c={c:g})")
    if c < 1.0:
        return CONICAL_POINT, math.sqrt(1.0 - c), a
    if c == 1.0:
        return PSEUDOSPHERE, 0.0, a
    return HYPERBOLOID_TYPE, math.sqrt(c - 1.0), a


def _cumulative(f: RealFn, ts: np.ndarray) -> np.ndarray:
    """int_0^t f for each t in the sorted array ts (ts[0] may be negative)."""
    out = np.zeros(len(ts))
    i0 = int(np.argmin(np.abs(ts)))
    base = integrate_adaptive(f, 0.0, ts[i0]) if ts[i0] != 0.0 else 0.0
    out[i0] = base
    for i in range(i0 + 1, len(ts)):
        out[i] = out[i - 1] + integrate_adaptive(f, ts[i - 1], ts[i])
    for i in range(i0 - 1, -1, -1):
        out[i] = out[i + 1] - integrate_adaptive(f, ts[i], ts[i + 1])
    return out


def darboux_profile(K0: float, family: str, k: float = 1.0, n: int = 201, t_max: float = 5.0) -> np.ndarray:
    """
    (n, 2) array of (r, z) on the classical constant-K_G profiles, a = 1/sqrt|K0|:

      Positive         r = a k cos t,   z = a E(k, t)
      ConicalPoint     r = a k sinh t,  z = a int_0^t sqrt(1 - k^2 cosh^2 u) du, 0 < k < 1
      HyperboloidType  r = a k cosh t,  z = a int_0^t sqrt(1 - k^2 sinh^2 u) du, k != 0
      Pseudosphere     r = a sech t,    z = a (tanh t - t),  0 <= t <= t_max

    t ranges are cut where the integrands stop being real.
    """
    if K0 == 0:
        raise BadParams("darboux_profile: K0 must be nonzero")
    if family not in DARBOUX_FAMILIES:
        raise BadParams(f"darboux_profile: unknown family {family!r}")
    if n < 2:
        raise BadParams(f"darboux_profile: n must be >= 2 (got {n})")
    if (family == POSITIVE) != (K0 > 0):
        raise BadParams(f"darboux_profile: family {family} does not match K0={K0:g}")
    a = 1.0 / math.sqrt(abs(K0))

    if family == POSITIVE:
        if not k > 0:
            raise BadParams(f"Positive: k must be > 0 (got {k})")
        tm = 0.5 * math.pi if k <= 1.0 else math.asin(1.0 / k)
        t = np.linspace(-tm, tm, n)
        r = a * k * np.cos(t)
        z = a * np.array([elliptic_e_inc(k, float(v)) for v in t])
    elif family == CONICAL_POINT:
        if not 0.0 < k < 1.0:
            raise BadParams(f"ConicalPoint: k must lie in (0, 1) (got {k})")
        t = np.linspace(0.0, math.acosh(1.0 / k), n)
        r = a * k * np.sinh(t)
        z = a * _cumulative(lambda u: np.sqrt(np.maximum(0.0, 1.0 - (k * np.cosh(u)) ** 2)), t)
    elif family == HYPERBOLOID_TYPE:
        if k == 0:
            raise BadParams("HyperboloidType: k must be nonzero")
        k = abs(k)
        tm = math.asinh(1.0 / k)
        t = np.linspace(-tm, tm, n)
        r = a * k * np.cosh(t)
        z = a * _cumulative(lambda u: np.sqrt(np.maximum(0.0, 1.0 - (k * np.sinh(u)) ** 2)), t)
    else:
        t = np.linspace(0.0, t_max, n)
        r = a / np.cosh(t)
        z = a * (np.tanh(t) - t)
    return np.column_stack([r, z])


@dataclass(frozen=True)
class DarbouxReport:
    family: str
    k: float
    a: float
    distance: float
    samples: int


def cross_validate_darboux(K0: float, c: float, n: int = 201, tol: Optional[Tolerance] = None) -> DarbouxReport:
    """
    Compare the prescribed-K_G momentum K^2 = K0 x^2 + c with the classical
    profile of the matching family: along one monotone-in-r half of the
    profile, z differences from a reference point must equal +-int K/sqrt(1-K^2).
    """
    tol = tol or DEFAULT_TOL
    family, k, a = darboux_family(K0, c)
    build = from_gauss_curvature(PolyFn((float(K0),)), c, 0.0, 1, tol)
    m = build.momentum
    prof = darboux_profile(K0, family, k if family != PSEUDOSPHERE else 1.0, n)
    if family in (POSITIVE, HYPERBOLOID_TYPE):
        prof = prof[n // 2:]
    r, zp = prof[:, 0], prof[:, 1]
    lo, hi = m.domain.lo, m.domain.hi
    keep = (r > lo) & (r < hi)
    r, zp = r[keep], zp[keep]
    if len(r) < 3:
        raise EmptyDomain(f"cross_validate_darboux: profile and domain {m.domain.as_tuple()} barely overlap")
    ref = len(r) // 2

    ev = m.eval

    def slope(x):
        with np.errstate(all="ignore"):
            kk = np.asarray(ev(x), dtype=float)
            return kk / np.sqrt(1.0 - kk * kk)

    zm = np.array([integrate_adaptive(slope, r[ref], float(x), tol) if i != ref else 0.0
                   for i, x in enumerate(r)])
    dz = zp - zp[ref]
    distance = min(float(np.max(np.abs(dz - s * zm))) for s in (1.0, -1.0))
    log.debug("darboux %s k=%g: distance %.3g over %d samples", family, k, distance, len(r))
    return DarbouxReport(family, k, a, distance, len(r))
