#!/usr/bin/env python3
"""
curvature.py

Principal curvatures of the surface of revolution swept by a momentum:

    k_m = K'(x)     (meridians)
    k_p = K(x) / x  (parallels)
    H   = (k_m + k_p) / 2,   K_G = k_m * k_p

plus W-diagram sampling and a polyline curvature oracle.
"""

from __future__ import annotations

import logging
import math
from dataclasses import astuple, dataclass
from pathlib import Path
from typing import Iterable, List, TextIO, Union

import numpy as np

from errors import BadParams, OutOfDomain, TooFewSamples
from generatrix import GeneratrixCurve
from momentum import MomentumFn
from numerics import write_csv

log = logging.getLogger(__name__)

CLIP = 1e6
COVERAGE = 0.99


@dataclass(frozen=True)
class CurvatureRecord:
    x: float
    k_m: float
    k_p: float
    H: float
    K_G: float


def _record(x: float, k: float, dk: float) -> CurvatureRecord:
    k_m = dk
    k_p = k / x
    return CurvatureRecord(x, k_m, k_p, 0.5 * (k_m + k_p), k_m * k_p)


def curvatures(m: MomentumFn, x: float) -> CurvatureRecord:
    x = float(x)
    if not (x > 0.0 and m.domain.contains(x)):
        raise OutOfDomain(f"{m.label}: x={x!r} not inside {m.domain.as_tuple()}")
    return _record(x, m.value(x), m.slope(x))


def _chebyshev(lo: float, hi: float, n: int) -> np.ndarray:
    j = np.arange(n)
    nodes = np.cos(math.pi * (2 * j + 1) / (2 * n))
    return np.sort(0.5 * (lo + hi) + 0.5 * (hi - lo) * nodes)


def wdiagram(m: MomentumFn, n: int = 200) -> List[CurvatureRecord]:
    """
    n records at Chebyshev nodes over the central 99% of the domain (an
    unbounded domain is first cut to its finite window). Records with a
    non-finite or |curvature| > 1e6 value are dropped.
    """
    if n < 2:
        raise BadParams(f"wdiagram: n must be >= 2 (got {n})")
    lo, hi = m.domain.window()
    margin = 0.5 * (1.0 - COVERAGE) * (hi - lo)
    xs = _chebyshev(lo + margin, hi - margin, n)
    with np.errstate(all="ignore"):
        k = np.asarray(m.eval(xs), dtype=float) * np.ones_like(xs)
        dk = np.asarray(m.deriv(xs), dtype=float) * np.ones_like(xs)
    out = []
    dropped = 0
    for x, kv, dv in zip(xs, k, dk):
        rec = _record(float(x), float(kv), float(dv))
        if all(math.isfinite(v) and abs(v) <= CLIP for v in (rec.k_m, rec.k_p)):
            out.append(rec)
        else:
            dropped += 1
    if dropped:
        log.warning("%s: wdiagram dropped %d of %d records beyond |k| = %g", m.label, dropped, n, CLIP)
    return out


def discrete_curvature(c: GeneratrixCurve) -> np.ndarray:
    """(n-1, 2) array of (x_mid, kappa) with kappa = dtheta/ds between samples."""
    if len(c.s) < 3:
        raise TooFewSamples(f"discrete_curvature: need >= 3 samples (got {len(c.s)})")
    kappa = np.diff(c.theta) / np.diff(c.s)
    x_mid = 0.5 * (c.x[:-1] + c.x[1:])
    return np.column_stack([x_mid, kappa])


def is_umbilical(m: MomentumFn, n: int = 200, rtol: float = 1e-9) -> bool:
    """True when k_m == k_p at every W-diagram sample."""
    recs = wdiagram(m, n)
    return all(abs(r.k_m - r.k_p) <= rtol * max(1.0, abs(r.k_m), abs(r.k_p)) for r in recs)


def write_records_csv(records: Iterable[CurvatureRecord], out: Union[str, Path, TextIO]) -> None:
    write_csv(("x", "k_m", "k_p", "H", "K_G"), (astuple(r) for r in records), out)
