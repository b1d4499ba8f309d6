"""Adaptive multidimensional quadrature over simple solid volumes.

Integrands here are smooth inside the volume but sharply peaked where the
volume comes closest to an exterior field point, so we use per-cell tensor
Gauss rules with an embedded lower-order error estimate and refine the cells
whose error dominates the running total. Cell bookkeeping is deterministic
(fixed traversal order, pairwise reduction via np.sum on an ordered array),
so results are bit-stable regardless of how evaluation is batched.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

_RULES = ("adaptive_subdivision", "tensor_gauss")


@dataclass(frozen=True)
class QuadratureSpec:
    relative_tolerance: float = 1e-3
    max_subdivisions: int = 12
    rule: str = "adaptive_subdivision"

    def __post_init__(self):
        if not 0 < self.relative_tolerance < 1:
            raise ValueError("relative_tolerance must be in (0, 1)")
        if self.max_subdivisions < 0:
            raise ValueError("max_subdivisions must be >= 0")
        if self.rule not in _RULES:
            raise ValueError(f"rule must be one of {_RULES}")


class ConvergenceError(RuntimeError):
    """Tolerance not met; carries the achieved estimate and error bound."""

    def __init__(self, value, error, tolerance):
        self.value = value
        self.error = error
        self.tolerance = tolerance
        super().__init__(
            f"quadrature did not converge: relative error {error} "
            f"(target {tolerance}); achieved estimate {value}")


def _leggauss(order):
    # cached Gauss-Legendre nodes/weights on [-1, 1]
    if order not in _leggauss.cache:
        _leggauss.cache[order] = np.polynomial.legendre.leggauss(order)
    return _leggauss.cache[order]


_leggauss.cache = {}


def _tensor_nodes(cells, order):
    """Tensor Gauss nodes/weights for a stack of 3D cells.

    cells: (nc, 3, 2) array of per-dimension bounds in local coordinates.
    Returns nodes (nc, order^3, 3) and weights (nc, order^3).
    """
    x, w = _leggauss(order)
    lo = cells[:, :, 0][:, None, :]   # (nc, 1, 3)
    hi = cells[:, :, 1][:, None, :]
    mid = 0.5 * (lo + hi)
    half = 0.5 * (hi - lo)
    # per-dimension nodes: (nc, order, 3)
    pts1 = mid + half * x[None, :, None]
    wts1 = half * w[None, :, None]
    i, j, k = np.meshgrid(np.arange(order), np.arange(order),
                          np.arange(order), indexing="ij")
    i, j, k = i.ravel(), j.ravel(), k.ravel()
    nodes = np.stack([pts1[:, i, 0], pts1[:, j, 1], pts1[:, k, 2]], axis=-1)
    weights = wts1[:, i, 0] * wts1[:, j, 1] * wts1[:, k, 2]
    return nodes, weights


class CylinderVolume:
    """Solid cylinder about a coordinate axis, in local (r, phi, s) coords.

    axis: 0/1/2 — the coordinate the cylinder axis runs along.
    span: (s0, s1) extent along the axis; radius: cylinder radius.
    radial_edges: optional seed grid in r (graded meshes help when the
    integrand peaks near the axis); axial_cells: seed slab count.
    """

    def __init__(self, axis, radius, span, center=(0.0, 0.0, 0.0),
                 radial_edges=None, axial_cells=4, azimuthal_cells=2):
        if radius <= 0 or span[1] <= span[0]:
            raise ValueError("need positive radius and nonempty span")
        self.axis = axis
        self.radius = float(radius)
        self.span = (float(span[0]), float(span[1]))
        self.center = np.asarray(center, dtype=float)
        self.radial_edges = (np.asarray(radial_edges, dtype=float)
                             if radial_edges is not None else
                             np.linspace(0.0, radius, 5))
        self.axial_cells = axial_cells
        self.azimuthal_cells = azimuthal_cells
        self._trans = [(1, 2), (0, 2), (0, 1)][axis]

    @property
    def total_volume(self):
        return math.pi * self.radius ** 2 * (self.span[1] - self.span[0])

    def initial_cells(self):
        r = self.radial_edges
        p = np.linspace(0.0, 2 * math.pi, self.azimuthal_cells + 1)
        s = np.linspace(self.span[0], self.span[1], self.axial_cells + 1)
        cells = []
        for i in range(len(r) - 1):
            for j in range(len(p) - 1):
                for k in range(len(s) - 1):
                    cells.append([[r[i], r[i + 1]], [p[j], p[j + 1]],
                                  [s[k], s[k + 1]]])
        return np.asarray(cells)

    def to_points(self, local):
        """Map local (r, phi, s) points (n, 3) -> physical (n, 3) + jacobian."""
        r, phi, s = local[:, 0], local[:, 1], local[:, 2]
        pts = np.empty_like(local)
        t1, t2 = self._trans
        pts[:, t1] = r * np.cos(phi)
        pts[:, t2] = r * np.sin(phi)
        pts[:, self.axis] = s
        return pts + self.center, r


class BoxVolume:
    """Axis-aligned box; local coordinates are physical coordinates."""

    def __init__(self, lo, hi, seed_cells=(2, 2, 1)):
        self.lo = np.asarray(lo, dtype=float)
        self.hi = np.asarray(hi, dtype=float)
        if np.any(self.hi <= self.lo):
            raise ValueError("box must have positive extent")
        self.seed_cells = seed_cells

    @property
    def total_volume(self):
        return float(np.prod(self.hi - self.lo))

    def initial_cells(self):
        edges = [np.linspace(self.lo[d], self.hi[d], self.seed_cells[d] + 1)
                 for d in range(3)]
        cells = []
        for i in range(self.seed_cells[0]):
            for j in range(self.seed_cells[1]):
                for k in range(self.seed_cells[2]):
                    cells.append([[edges[0][i], edges[0][i + 1]],
                                  [edges[1][j], edges[1][j + 1]],
                                  [edges[2][k], edges[2][k + 1]]])
        return np.asarray(cells)

    def to_points(self, local):
        return local.copy(), np.ones(len(local))


def _eval_cells(f, volume, cells, order):
    nodes, weights = _tensor_nodes(cells, order)
    nc, npts, _ = nodes.shape
    pts, jac = volume.to_points(nodes.reshape(-1, 3))
    vals = np.atleast_2d(np.asarray(f(pts), dtype=float))
    if vals.ndim == 1:
        vals = vals[:, None]
    if vals.shape[0] != nc * npts:
        vals = vals.reshape(nc * npts, -1)
    m = vals.shape[1]
    vals = (vals * jac[:, None]).reshape(nc, npts, m)
    return np.einsum("cpm,cp->cm", vals, weights)


def _split(cells):
    """Octree split: each cell into 8 children (2 per dimension)."""
    mid = 0.5 * (cells[:, :, 0] + cells[:, :, 1])
    children = []
    for bx in (0, 1):
        for by in (0, 1):
            for bz in (0, 1):
                child = cells.copy()
                for d, b in zip(range(3), (bx, by, bz)):
                    if b == 0:
                        child[:, d, 1] = mid[:, d]
                    else:
                        child[:, d, 0] = mid[:, d]
                children.append(child)
    return np.concatenate(children)


@dataclass
class QuadratureResult:
    value: np.ndarray       # integral, per component
    error: np.ndarray       # absolute error estimate, per component
    n_evaluations: int
    n_cells: int
    converged: bool


def integrate(f, volume, spec: QuadratureSpec = QuadratureSpec(),
              order=4, error_order=6):
    """Integrate vector-valued f over volume.

    The low/high order pair gives per-cell error estimates; cells whose
    error exceeds their fair share of the budget are octree-refined until
    the summed error is below relative_tolerance * |integral| per component.
    """
    cells = volume.initial_cells()
    depths = np.zeros(len(cells), dtype=int)
    lo = _eval_cells(f, volume, cells, order)
    hi = _eval_cells(f, volume, cells, error_order)
    errs = np.abs(hi - lo)
    vals = hi
    nev = len(cells) * (order ** 3 + error_order ** 3)

    for _ in range(200):
        total = np.sum(vals, axis=0)
        err_tot = np.sum(errs, axis=0)
        scale = np.maximum(np.abs(total), 1e-300)
        rel = err_tot / scale
        if spec.rule == "tensor_gauss" or np.all(
                rel <= spec.relative_tolerance):
            return QuadratureResult(total, err_tot, nev, len(cells),
                                    bool(np.all(rel <= spec.relative_tolerance)))
        # budget per cell; refine every cell holding more than its share
        budget = spec.relative_tolerance * scale / len(cells)
        bad = np.any(errs > budget, axis=1) & (depths < spec.max_subdivisions)
        if not bad.any():
            raise ConvergenceError(total, float(rel.max()),
                                   spec.relative_tolerance)
        children = _split(cells[bad])
        cdepths = np.tile(depths[bad] + 1, 8)
        clo = _eval_cells(f, volume, children, order)
        chi = _eval_cells(f, volume, children, error_order)
        nev += len(children) * (order ** 3 + error_order ** 3)
        keep = ~bad
        cells = np.concatenate([cells[keep], children])
        depths = np.concatenate([depths[keep], cdepths])
        vals = np.concatenate([vals[keep], chi])
        errs = np.concatenate([errs[keep], np.abs(chi - clo)])

    total = np.sum(vals, axis=0)
    err_tot = np.sum(errs, axis=0)
    raise ConvergenceError(total, float(
        (err_tot / np.maximum(np.abs(total), 1e-300)).max()),
        spec.relative_tolerance)
