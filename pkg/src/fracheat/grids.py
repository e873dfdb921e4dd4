"""Bounded model domains and the uniform lattices used to discretize them.

Supported shapes: an interval (a, b), a disk, and an axis-aligned rectangle.
Each domain knows its volume, the exact distance-to-boundary function delta,
and a boundary quadrature rule with outward normals.  Grids are uniform
lattices intersected with the open domain; only strictly interior nodes
carry degrees of freedom, matching a zero exterior condition.

The boundary rules are exact for the integrands they are used on here
(two endpoint atoms for the interval, the trapezoid rule on the circle,
per-edge midpoint rules on the rectangle); build_grid snaps h so that an
integer number of cells spans the interval / rectangle when the requested
spacing is within 1e-9 of allowing it, which keeps boundary nodes on the
lattice.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .errors import ValidationError


class Interval:
    smoothness = "smooth"

    def __init__(self, a, b):
        self.a, self.b = float(a), float(b)
        if not self.b > self.a:
            raise ValidationError(f"empty interval ({a}, {b})")

    @property
    def n(self):
        return 1

    def volume(self):
        return self.b - self.a

    def diameter(self):
        return self.b - self.a

    def delta(self, x):
        """Distance to the boundary, positive inside, negative outside."""
        x = np.asarray(x, dtype=float)
        out = np.minimum(x - self.a, self.b - x)
        return out if out.ndim else float(out)

    def contains(self, x):
        return self.delta(x) > 0

    def bounding_box(self):
        return np.array([self.a]), np.array([self.b])

    def boundary_rule(self, h=None):
        """Nodes, weights, outward normals.  Counting measure on {a, b}."""
        nodes = np.array([[self.a], [self.b]])
        weights = np.array([1.0, 1.0])
        normals = np.array([[-1.0], [1.0]])
        return nodes, weights, normals

    def to_json(self):
        return {"type": "interval", "a": self.a, "b": self.b}


class Disk:
    smoothness = "smooth"

    def __init__(self, center=(0.0, 0.0), radius=1.0):
        self.center = np.asarray(center, dtype=float)
        self.radius = float(radius)
        if self.radius <= 0:
            raise ValidationError("disk radius must be positive")

    @property
    def n(self):
        return 2

    def volume(self):
        return np.pi * self.radius ** 2

    def diameter(self):
        return 2 * self.radius

    def delta(self, x):
        x = np.atleast_2d(np.asarray(x, dtype=float))
        d = self.radius - np.hypot(x[:, 0] - self.center[0],
                                   x[:, 1] - self.center[1])
        return d if d.shape != (1,) else float(d[0])

    def contains(self, x):
        return self.delta(x) > 0

    def bounding_box(self):
        return self.center - self.radius, self.center + self.radius

    def boundary_rule(self, h=None):
        """Equispaced circle nodes; trapezoid weights are spectrally accurate
        for smooth periodic integrands."""
        m = max(64, int(np.ceil(2 * np.pi * self.radius / (h or self.radius / 32))))
        phi = 2 * np.pi * np.arange(m) / m
        normals = np.column_stack((np.cos(phi), np.sin(phi)))
        nodes = self.center[None, :] + self.radius * normals
        weights = np.full(m, 2 * np.pi * self.radius / m)
        return nodes, weights, normals

    def to_json(self):
        return {"type": "disk", "center": self.center.tolist(),
                "radius": self.radius}


class Rectangle:
    # corners make the boundary only Lipschitz; downstream consumers that
    # assume C^{1,1} boundaries should check this flag
    smoothness = "lipschitz_corners"

    def __init__(self, ax, bx, ay, by):
        self.ax, self.bx = float(ax), float(bx)
        self.ay, self.by = float(ay), float(by)
        if not (self.bx > self.ax and self.by > self.ay):
            raise ValidationError("rectangle sides must have positive length")

    @property
    def n(self):
        return 2

    def volume(self):
        return (self.bx - self.ax) * (self.by - self.ay)

    def diameter(self):
        return math.hypot(self.bx - self.ax, self.by - self.ay)

    def delta(self, x):
        x = np.atleast_2d(np.asarray(x, dtype=float))
        d = np.minimum.reduce([x[:, 0] - self.ax, self.bx - x[:, 0],
                               x[:, 1] - self.ay, self.by - x[:, 1]])
        return d if d.shape != (1,) else float(d[0])

    def contains(self, x):
        return self.delta(x) > 0

    def bounding_box(self):
        return (np.array([self.ax, self.ay]), np.array([self.bx, self.by]))

    def boundary_rule(self, h=None):
        """Composite midpoint rule per edge; corners are never nodes."""
        h = h or min(self.bx - self.ax, self.by - self.ay) / 32
        nodes, weights, normals = [], [], []
        edges = [
            ((self.ax, self.ay), (self.bx, self.ay), (0.0, -1.0)),
            ((self.bx, self.ay), (self.bx, self.by), (1.0, 0.0)),
            ((self.bx, self.by), (self.ax, self.by), (0.0, 1.0)),
            ((self.ax, self.by), (self.ax, self.ay), (-1.0, 0.0)),
        ]
        for p0, p1, nu in edges:
            p0 = np.asarray(p0)
            p1 = np.asarray(p1)
            length = float(np.abs(p1 - p0).sum())
            m = max(2, int(np.ceil(length / h)))
            t = (np.arange(m) + 0.5) / m
            nodes.append(p0[None, :] + t[:, None] * (p1 - p0)[None, :])
            weights.append(np.full(m, length / m))
            normals.append(np.tile(nu, (m, 1)))
        return (np.concatenate(nodes), np.concatenate(weights),
                np.concatenate(normals))

    def to_json(self):
        return {"type": "rectangle", "ax": self.ax, "bx": self.bx,
                "ay": self.ay, "by": self.by}


def domain_from_json(doc):
    if isinstance(doc, str):
        doc = json.loads(doc)
    kind = doc.get("type")
    if kind == "interval":
        return Interval(doc["a"], doc["b"])
    if kind == "disk":
        return Disk(doc.get("center", (0.0, 0.0)), doc.get("radius", 1.0))
    if kind == "rectangle":
        return Rectangle(doc["ax"], doc["bx"], doc["ay"], doc["by"])
    raise ValidationError(f"unknown domain type {kind!r}")


@dataclass
class DomainGrid:
    """Interior lattice nodes of a domain, in lexicographic order.

    nodes: (N, n) array of strictly interior lattice points.
    delta: exact boundary distances at the nodes.
    h: effective lattice spacing (after snapping).
    aligned: True when the lattice lines up with the domain boundary, so
        hat functions centred at interior nodes are supported in the closed
        domain (always checked for the interval / rectangle; False for the
        disk, where boundary-adjacent hats overhang by O(h)).
    shape: lattice extent per axis, or None for non-tensor node sets.
    """

    domain: object
    nodes: np.ndarray
    delta: np.ndarray
    h: float
    aligned: bool
    shape: tuple | None
    index: np.ndarray  # integer lattice coordinates of each node

    def __len__(self):
        return len(self.nodes)

    def inner_region(self, rho):
        """Mask of nodes with delta >= rho (the rho-interior)."""
        if rho < 0:
            raise ValidationError("rho must be nonnegative")
        return self.delta >= rho - 1e-12

    def node_weight(self):
        """Quadrature weight h^n per node."""
        return self.h ** self.domain.n


def _snap(length, h):
    """Number of cells and snapped spacing; None when not alignable."""
    m = length / h
    if abs(m - round(m)) < 1e-9 and round(m) >= 2:
        m = int(round(m))
        return m, length / m
    return None, h


def build_grid(domain, h):
    """Uniform lattice of spacing ~h intersected with the open domain."""
    h = float(h)
    if h <= 0:
        raise ValidationError("h must be positive")
    if h >= domain.diameter() / 8:
        raise ValidationError(
            f"h = {h} too coarse for domain of diameter {domain.diameter()}")

    if domain.n == 1:
        m, h_eff = _snap(domain.b - domain.a, h)
        if m is None:
            idx = np.arange(1, int(np.floor((domain.b - domain.a) / h)) + 1)
            x = domain.a + idx * h
            keep = domain.delta(x) > 1e-12 * domain.diameter()
            idx, x = idx[keep], x[keep]
            aligned, h_eff = False, h
        else:
            idx = np.arange(1, m)
            x = domain.a + idx * h_eff
            aligned = True
        nodes = x[:, None]
        delta = np.asarray(domain.delta(x))
        return DomainGrid(domain, nodes, delta, h_eff, aligned,
                          (len(x),), idx[:, None])

    # n = 2: anchor at the rectangle corner or the disk bounding-box corner
    if isinstance(domain, Rectangle):
        mx, hx = _snap(domain.bx - domain.ax, h)
        my, hy = _snap(domain.by - domain.ay, h)
        aligned = mx is not None and my is not None and abs(hx - hy) < 1e-12
        h_eff = hx if aligned else h
        origin = np.array([domain.ax, domain.ay])
    else:
        aligned = False
        h_eff = h
        origin = domain.center - domain.radius

    nx = int(np.floor((domain.diameter() if isinstance(domain, Disk)
                       else domain.bx - domain.ax) / h_eff)) + 1
    ny = int(np.floor((domain.diameter() if isinstance(domain, Disk)
                       else domain.by - domain.ay) / h_eff)) + 1
    ii, jj = np.meshgrid(np.arange(nx + 1), np.arange(ny + 1), indexing="ij")
    pts = origin[None, :] + h_eff * np.column_stack((ii.ravel(), jj.ravel()))
    idx = np.column_stack((ii.ravel(), jj.ravel()))
    delta = np.asarray(domain.delta(pts))
    keep = delta > 1e-12 * domain.diameter()
    nodes, delta, idx = pts[keep], delta[keep], idx[keep]
    if len(nodes) == 0:
        raise ValidationError("empty interior lattice; shrink h")
    order = np.lexsort((nodes[:, 1], nodes[:, 0]))
    return DomainGrid(domain, nodes[order], delta[order], h_eff, aligned,
                      None, idx[order])


def divergence_check(domain, h=None):
    """Quadrature of the identity  int_{dOmega} x . nu dsigma = n |Omega|.

    Returns (quadrature value, exact value).  Used as a self-test of the
    boundary rules and normals.
    """
    nodes, weights, normals = domain.boundary_rule(h)
    lhs = float(np.sum(weights * np.sum(nodes * normals, axis=1)))
    return lhs, domain.n * domain.volume()
