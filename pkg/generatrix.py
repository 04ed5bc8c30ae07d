#!/usr/bin/env python3
"""
generatrix.py

Rebuild the plane curve alpha = (x, z) from its momentum K(x).

reconstruct() integrates the Frenet system in arc length

    x' = cos(theta),  z' = sin(theta),  theta' = K'(x)

with theta0 = asin(K(x0)). Along the solution sin(theta) = K(x) is a first
integral, so the curve is the one determined by K. Turning points (K^2 = 1,
cos(theta) = 0) are ordinary points of this system and are only recorded.

graph_z_of_x() is the quadrature form z(x) = +-int K / sqrt(1 - K^2), valid
between turning points; arclength() is s(x) = int 1 / sqrt(1 - K^2).
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Callable, List, Optional, TextIO, Tuple, Union

import numpy as np

from errors import BadParams, ImmediateExit, OutOfDomain, TurningPointInside
from momentum import MomentumFn, TURNING_TOL
from numerics import (
    DEFAULT_TOL,
    Event,
    Tolerance,
    integrate_adaptive,
    solve_ivp,
    write_csv,
)

log = logging.getLogger(__name__)

DEFAULT_SAMPLES = 1025
# dense output is cubic Hermite; this keeps its error far below tol
STEPS_PER_SPAN = 2048


@dataclass(frozen=True)
class CurveState:
    s: float
    x: float
    z: float
    theta: float


@dataclass(frozen=True, eq=False)
class GeneratrixCurve:
    """
    Arc-length samples of a reconstructed generatrix.

    s, x, z, theta are equal-length arrays, s strictly increasing.
    exit_reason is None when the whole requested span was integrated.
    """
    s: np.ndarray
    x: np.ndarray
    z: np.ndarray
    theta: np.ndarray
    momentum: MomentumFn
    turning_points: Tuple[float, ...] = ()
    exit_reason: Optional[str] = None
    dense: Optional[Callable[[np.ndarray], np.ndarray]] = None
    span: Tuple[float, float] = (0.0, 0.0)
    z0: float = 0.0

    def __len__(self) -> int:
        return len(self.s)

    @property
    def samples(self) -> List[CurveState]:
        return [CurveState(*map(float, row)) for row in zip(self.s, self.x, self.z, self.theta)]

    @property
    def length(self) -> float:
        return float(self.s[-1] - self.s[0])

    def rows(self):
        return zip(self.s, self.x, self.z, self.theta)


def _exit_events(m: MomentumFn) -> List[Event]:
    evs = [Event(lambda s, y: math.cos(y[2]), "turning")]
    evs.append(Event(lambda s, y: y[0], "axis", terminal=True, direction=-1))
    lo, hi = m.domain.lo, m.domain.hi
    if lo > 0.0 and not m.is_turning_end(lo):
        evs.append(Event(lambda s, y: y[0] - lo, "domain_lo", terminal=True, direction=-1))
    if math.isfinite(hi) and not m.is_turning_end(hi):
        evs.append(Event(lambda s, y: hi - y[0], "domain_hi", terminal=True, direction=-1))
    return evs


_EXIT_TEXT = {
    "axis": "curve reached the axis x = 0",
    "domain_lo": "curve left the domain through its lower end",
    "domain_hi": "curve left the domain through its upper end",
}


def reconstruct(
    m: MomentumFn,
    x0: float,
    z0: float = 0.0,
    branch: int = 1,
    s_span: float = 1.0,
    tol: Optional[Tolerance] = None,
    n_samples: int = DEFAULT_SAMPLES,
) -> GeneratrixCurve:
    """
    Unit-speed generatrix through (x0, z0) of length s_span.

    Away from turning points, branch is the sign of cos(theta0) (+1: x grows).
    At a turning start (K(x0)^2 = 1) both continuations share theta0; branch
    +1 follows the curve forward in s, -1 the part before the turning point
    (s runs over [-s_span, 0]).

    The curve is truncated, with exit_reason set, when it hits the axis, a
    non-turning domain end, or a point where K' stops being finite.
    """
    tol = tol or DEFAULT_TOL
    if branch not in (1, -1):
        raise BadParams(f"reconstruct: branch must be +1 or -1 (got {branch})")
    if not (s_span > 0 and math.isfinite(s_span)):
        raise BadParams(f"reconstruct: s_span must be > 0 (got {s_span})")
    x0, z0 = float(x0), float(z0)
    if not (x0 > 0.0 and m.domain.contains(x0, closed=True)):
        raise OutOfDomain(f"{m.label}: x0={x0!r} outside {m.domain.as_tuple()}")
    k0 = m.value(x0)
    if not math.isfinite(k0) or abs(k0) > 1.0 + TURNING_TOL:
        raise OutOfDomain(f"{m.label}: K(x0) = {k0!r} is not a sine")
    k0 = max(-1.0, min(1.0, k0))
    turning_start = abs(k0 * k0 - 1.0) <= TURNING_TOL
    if turning_start:
        theta0 = math.copysign(0.5 * math.pi, k0)
        s_end = branch * s_span
    else:
        theta0 = math.asin(k0) if branch > 0 else math.pi - math.asin(k0)
        s_end = s_span

    deriv = m.deriv

    def frenet(s: float, y: np.ndarray) -> np.ndarray:
        try:
            kappa = float(deriv(y[0]))
        except (ArithmeticError, ValueError):
            kappa = math.nan
        return np.array([math.cos(y[2]), math.sin(y[2]), kappa])

    # z enters nothing but z itself, so integrate from 0 and shift
    traj = solve_ivp(
        frenet,
        [x0, 0.0, theta0],
        s_end,
        tol,
        events=_exit_events(m),
        max_step=s_span / STEPS_PER_SPAN,
    )

    turning = [h.s for h in traj.events if h.name == "turning"]
    if turning_start:
        turning = [0.0] + [t for t in turning if abs(t) > max(tol.abs, 1e-9)]
    exit_reason = None
    if traj.status == "singular":
        exit_reason = f"K' not finite: {traj.message} (x={traj.y_final[0]!r})"
    elif traj.status == "event":
        last = traj.events[-1] if traj.events else None
        name = last.name if last is not None else "event"
        exit_reason = _EXIT_TEXT.get(name, name) + f" at s={traj.s_final!r}"
    if exit_reason:
        log.warning("%s: truncated after %.6g of %.6g: %s", m.label, abs(traj.s_final), s_span, exit_reason)

    s_lo, s_hi = sorted((float(traj.s[0]), traj.s_final))
    if s_hi - s_lo <= 0.0:
        raise ImmediateExit(f"{m.label}: curve leaves the domain immediately at x0={x0!r}")

    curve = GeneratrixCurve(
        s=np.empty(0),
        x=np.empty(0),
        z=np.empty(0),
        theta=np.empty(0),
        momentum=m,
        turning_points=tuple(sorted(turning)),
        exit_reason=exit_reason,
        dense=traj,
        span=(s_lo, s_hi),
        z0=z0,
    )
    log.debug("%s: reconstructed s in [%g, %g], %d turning points", m.label, s_lo, s_hi, len(turning))
    return resample(curve, n_samples)


def resample(c: GeneratrixCurve, n: int) -> GeneratrixCurve:
    """n states equally spaced in s, taken from the dense output of the solve."""
    n = int(n)
    if n < 2:
        raise BadParams(f"resample: n must be >= 2 (got {n})")
    if c.dense is None:
        raise BadParams("resample: curve carries no dense output")
    s = np.linspace(c.span[0], c.span[1], n)
    y = np.asarray(c.dense(s))
    return replace(c, s=s, x=y[:, 0].copy(), z=y[:, 1] + c.z0, theta=y[:, 2].copy())


def restrict(c: GeneratrixCurve, s_lo: float, s_hi: float, n: Optional[int] = None) -> GeneratrixCurve:
    """The sub-arc s_lo <= s <= s_hi, resampled with n states (default: as many as c has)."""
    lo, hi = c.span
    if not lo <= s_lo < s_hi <= hi:
        raise BadParams(f"restrict: [{s_lo}, {s_hi}] not a sub-span of [{lo}, {hi}]")
    return resample(replace(c, span=(float(s_lo), float(s_hi))), n or len(c))


# ------------------------- quadrature forms -------------------------

def _check_monotone_span(m: MomentumFn, x_lo: float, x_hi: float, samples: int = 1024) -> None:
    if not x_lo < x_hi:
        raise BadParams(f"need x_lo < x_hi (got {x_lo}, {x_hi})")
    slack = 1e-12 * max(1.0, abs(x_hi))
    if x_lo < m.domain.lo - slack or x_hi > m.domain.hi + slack:
        raise OutOfDomain(f"{m.label}: [{x_lo}, {x_hi}] not inside {m.domain.as_tuple()}")
    xs = x_lo + (x_hi - x_lo) * (np.arange(1, samples + 1) / (samples + 1))
    with np.errstate(all="ignore"):
        k = np.asarray(m.eval(xs), dtype=float) * np.ones_like(xs)
    bad = ~np.isfinite(k) | (k * k >= 1.0)
    if bad.any():
        raise TurningPointInside(
            f"{m.label}: 1 - K^2 vanishes inside ({x_lo}, {x_hi}) near x={float(xs[bad][0])!r}"
        )


def _integrand(m: MomentumFn, numerator: bool):
    ev = m.eval

    def f(x):
        with np.errstate(all="ignore"):
            k = np.asarray(ev(x), dtype=float)
            root = np.sqrt(1.0 - k * k)
            return (k if numerator else 1.0) / root

    return f


def graph_z_of_x(
    m: MomentumFn,
    x_lo: float,
    x_hi: float,
    sign: int = 1,
    n: int = 101,
    tol: Optional[Tolerance] = None,
) -> np.ndarray:
    """
    (n, 2) array of (x, z) on a uniform x grid with z(x_lo) = 0,
    z = sign * int_{x_lo}^{x} K / sqrt(1 - K^2).
    """
    tol = tol or DEFAULT_TOL
    if sign not in (1, -1):
        raise BadParams(f"graph_z_of_x: sign must be +1 or -1 (got {sign})")
    if n < 2:
        raise BadParams(f"graph_z_of_x: n must be >= 2 (got {n})")
    _check_monotone_span(m, x_lo, x_hi)
    f = _integrand(m, numerator=True)
    xs = np.linspace(x_lo, x_hi, n)
    z = np.zeros(n)
    for i in range(1, n):
        z[i] = z[i - 1] + integrate_adaptive(f, xs[i - 1], xs[i], tol)
    return np.column_stack([xs, sign * z])


def arclength(m: MomentumFn, x_lo: float, x_hi: float, tol: Optional[Tolerance] = None) -> float:
    """s(x_hi) - s(x_lo) = int dx / sqrt(1 - K^2) between turning points."""
    _check_monotone_span(m, x_lo, x_hi)
    return integrate_adaptive(_integrand(m, numerator=False), x_lo, x_hi, tol or DEFAULT_TOL)


def write_curve_csv(curve: GeneratrixCurve, out: Union[str, Path, TextIO]) -> None:
    write_csv(("s", "x", "z", "theta"), curve.rows(), out)
