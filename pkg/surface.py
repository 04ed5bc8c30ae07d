#!/usr/bin/env python3
"""
surface.py

Revolve a generatrix about the z-axis into a structured (s, phi) quad grid

    X(s_i, phi_j) = (x(s_i) cos phi_j, x(s_i) sin phi_j, z(s_i)),  phi_j in [-pi, pi)

then estimate the principal curvatures from the vertices alone (discrete
first and second fundamental forms by finite differences) and export
Wavefront OBJ / CSV.

Meridians and parallels are grid lines and also curvature lines, so the
shape operator is diagonal in grid coordinates:
    k_m ~ L / E   (along s),   k_p ~ N / G   (along phi)
"""

from __future__ import annotations

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Optional, Union

import numpy as np

from errors import AxisTouch, BadParams, DegenerateGrid
from generatrix import GeneratrixCurve
from numerics import fmt17, write_csv

log = logging.getLogger(__name__)

MIN_NTHETA = 8
MIN_NS = 5
OBJ_HEADER = "# surface of revolution; axis of revolution = third coordinate (z)"


@dataclass(frozen=True, eq=False)
class RevolutionMesh:
    grid: np.ndarray          # (n_s, n_theta, 3)
    s: np.ndarray             # (n_s,)
    phi: np.ndarray           # (n_theta,)
    theta_closed: bool
    source: Optional[GeneratrixCurve] = None

    @property
    def shape(self):
        return self.grid.shape[:2]

    @property
    def vertices(self) -> np.ndarray:
        """(n_s * n_theta, 3) in row-major grid order."""
        return self.grid.reshape(-1, 3)


@dataclass(frozen=True, eq=False)
class MeshCurvature:
    k_m: np.ndarray           # (n_s, n_theta)
    k_p: np.ndarray
    low_confidence: np.ndarray  # (n_s,) True on one-sided boundary rows


def _map_rows(fn: Callable[[int, int], np.ndarray], n_rows: int, workers: int) -> np.ndarray:
    """fn(lo, hi) -> rows lo..hi-1; blocks run concurrently, reassembled in order."""
    if workers <= 1 or n_rows < 2 * workers:
        return fn(0, n_rows)
    edges = np.linspace(0, n_rows, workers + 1).astype(int)
    with ThreadPoolExecutor(max_workers=workers) as pool:
        parts = list(pool.map(lambda k: fn(int(edges[k]), int(edges[k + 1])), range(workers)))
    return np.concatenate(parts, axis=0)


def revolve(c: GeneratrixCurve, n_theta: int = 64, workers: int = 1) -> RevolutionMesh:
    """Full 2 pi revolution; row i is the parallel through sample s_i."""
    n_theta = int(n_theta)
    if n_theta < MIN_NTHETA:
        raise BadParams(f"revolve: n_theta must be >= {MIN_NTHETA} (got {n_theta})")
    x = np.asarray(c.x, dtype=float)
    z = np.asarray(c.z, dtype=float)
    if np.any(~(x > 0.0)):
        i = int(np.argmin(x))
        raise AxisTouch(f"revolve: sample {i} has x={x[i]!r} <= 0")
    phi = -math.pi + 2.0 * math.pi * np.arange(n_theta) / n_theta
    cph, sph = np.cos(phi), np.sin(phi)

    def rows(lo: int, hi: int) -> np.ndarray:
        xr = x[lo:hi, None]
        return np.stack(
            [xr * cph[None, :], xr * sph[None, :], np.broadcast_to(z[lo:hi, None], (hi - lo, n_theta))],
            axis=-1,
        )

    grid = _map_rows(rows, len(x), workers)
    return RevolutionMesh(grid, np.asarray(c.s, dtype=float).copy(), phi, True, c)


def _s_derivatives(X: np.ndarray, s: np.ndarray):
    """First and second s-derivatives; three-point stencils inside, one-sided at the ends."""
    n = len(s)
    Xs = np.empty_like(X)
    Xss = np.empty_like(X)
    h1 = (s[1:-1] - s[:-2])[:, None, None]
    h2 = (s[2:] - s[1:-1])[:, None, None]
    Xm, X0, Xp = X[:-2], X[1:-1], X[2:]
    den = h1 * h2 * (h1 + h2)
    Xs[1:-1] = (h1 * h1 * Xp - h2 * h2 * Xm + (h2 * h2 - h1 * h1) * X0) / den
    Xss[1:-1] = 2.0 * (h1 * Xp - (h1 + h2) * X0 + h2 * Xm) / den
    # second-order one-sided (end spacing taken as uniform)
    h0 = s[1] - s[0]
    Xs[0] = (-3.0 * X[0] + 4.0 * X[1] - X[2]) / (2.0 * h0)
    Xss[0] = (2.0 * X[0] - 5.0 * X[1] + 4.0 * X[2] - X[3]) / (h0 * h0)
    hn = s[n - 1] - s[n - 2]
    Xs[n - 1] = (3.0 * X[n - 1] - 4.0 * X[n - 2] + X[n - 3]) / (2.0 * hn)
    Xss[n - 1] = (2.0 * X[n - 1] - 5.0 * X[n - 2] + 4.0 * X[n - 3] - X[n - 4]) / (hn * hn)
    return Xs, Xss


def mesh_principal_curvatures(mesh: RevolutionMesh, workers: int = 1) -> MeshCurvature:
    """
    Discrete (k_m, k_p) at every vertex from the vertex positions only.
    Boundary rows use one-sided s-stencils and are flagged low_confidence.
    """
    X = mesh.grid
    n_s, n_t = mesh.shape
    if n_s < MIN_NS or n_t < MIN_NTHETA:
        raise DegenerateGrid(f"mesh_principal_curvatures: need >= {MIN_NS}x{MIN_NTHETA} grid (got {n_s}x{n_t})")
    if not mesh.theta_closed:
        raise DegenerateGrid("mesh_principal_curvatures: phi direction must be closed")
    if np.any(np.diff(mesh.s) <= 0.0):
        raise DegenerateGrid("mesh_principal_curvatures: s samples must increase strictly")
    dphi = 2.0 * math.pi / n_t
    Xs, Xss = _s_derivatives(X, mesh.s)

    def rows(lo: int, hi: int) -> np.ndarray:
        Xr = X[lo:hi]
        Xp, Xm = np.roll(Xr, -1, axis=1), np.roll(Xr, 1, axis=1)
        Xt = (Xp - Xm) / (2.0 * dphi)
        Xtt = (Xp - 2.0 * Xr + Xm) / (dphi * dphi)
        Xsr = Xs[lo:hi]
        nrm = np.cross(Xsr, Xt)
        length = np.linalg.norm(nrm, axis=-1)
        with np.errstate(all="ignore"):
            N = nrm / length[..., None]
            E = np.einsum("ijk,ijk->ij", Xsr, Xsr)
            G = np.einsum("ijk,ijk->ij", Xt, Xt)
            L = np.einsum("ijk,ijk->ij", Xss[lo:hi], N)
            Nn = np.einsum("ijk,ijk->ij", Xtt, N)
            return np.stack([L / E, Nn / G], axis=-1)

    est = _map_rows(rows, n_s, workers)
    if not np.all(np.isfinite(est[1:-1])):
        raise DegenerateGrid("mesh_principal_curvatures: degenerate tangent plane inside the grid")
    low = np.zeros(n_s, dtype=bool)
    low[[0, -1]] = True
    log.debug("mesh curvature on %dx%d grid", n_s, n_t)
    return MeshCurvature(est[..., 0], est[..., 1], low)


def export_obj(mesh: RevolutionMesh, path: Union[str, Path], triangulate: bool = False) -> Path:
    """
    Vertices in row-major grid order, then quads (or two triangles per quad)
    with 1-based indices; the phi seam is closed when theta_closed.
    """
    path = Path(path)
    n_s, n_t = mesh.shape
    lines = [OBJ_HEADER]
    for v in mesh.vertices:
        lines.append(f"v {fmt17(v[0])} {fmt17(v[1])} {fmt17(v[2])}")
    cols = n_t if mesh.theta_closed else n_t - 1
    for i in range(n_s - 1):
        for j in range(cols):
            jn = (j + 1) % n_t
            a = i * n_t + j + 1
            b = (i + 1) * n_t + j + 1
            c = (i + 1) * n_t + jn + 1
            d = i * n_t + jn + 1
            if triangulate:
                lines.append(f"f {a} {b} {c}")
                lines.append(f"f {a} {c} {d}")
            else:
                lines.append(f"f {a} {b} {c} {d}")
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    log.info("OBJ written: %s (%d vertices)", path, n_s * n_t)
    return path


def write_mesh_curvature_csv(mesh: RevolutionMesh, curv: MeshCurvature, out) -> None:
    n_s, n_t = mesh.shape

    def rows():
        for i in range(n_s):
            for j in range(n_t):
                x, y, z = mesh.grid[i, j]
                yield (str(i), str(j), x, y, z, curv.k_m[i, j], curv.k_p[i, j])

    write_csv(("i", "j", "x", "y", "z", "k_m_est", "k_p_est"), rows(), out)
