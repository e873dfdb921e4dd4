"""Boundary quotients, empirical Holder seminorms, and the Pohozaev residual.

Solutions decay like delta^s at the boundary, so the carrier of boundary
regularity is the quotient q = u / delta^s: its trace on the boundary feeds
the Pohozaev boundary term, and its interior Holder seminorms are the
hypotheses under which the identity holds.  Everything here is a discrete
surrogate: node-pair ratios for C^beta with beta <= 1, and seminorms of the
element gradient for beta > 1 (a node-pair ratio cannot exceed order one).

Traces are Richardson extrapolations of q along inward normals.  The
quotient is only C^{s-eps} up to the boundary, which supports low-order
extrapolation only; two stencils are evaluated so every trace carries an
uncertainty, and disagreement flags data outside the delta^s class (for
example heat solutions at t = 0 from rough data).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import special

from .errors import ValidationError
from .operator import GridFunction
from .measures import symbol

MAX_EXACT_PAIR_NODES = 6000


def holder_seminorm(points, values, beta, max_pairs=2_000_000, seed=0):
    """sup over node pairs of |f(x) - f(y)| / |x - y|^beta.

    Exact over all pairs up to MAX_EXACT_PAIR_NODES nodes (blockwise), else
    a seeded random subsample of max_pairs pairs; the returned report says
    which.  beta = 0 degenerates to half the oscillation, which is still
    monotone under region nesting.
    """
    points = np.atleast_2d(np.asarray(points, dtype=float))
    values = np.asarray(values, dtype=float)
    n = len(values)
    if points.shape[0] != n:
        raise ValidationError("points and values lengths differ")
    if n < 2:
        raise ValidationError("need at least two nodes for a seminorm")
    if not 0.0 <= beta <= 1.0:
        raise ValidationError("pair seminorm needs beta in [0, 1]")
    best = 0.0
    if n <= MAX_EXACT_PAIR_NODES:
        cols = np.arange(n)
        block = max(1, int(2e6) // n)
        for i0 in range(0, n - 1, block):
            i1 = min(i0 + block, n - 1)
            diff = np.abs(values[i0:i1, None] - values[None, :])
            dist = np.linalg.norm(points[i0:i1, None, :] - points[None, :, :],
                                  axis=-1)
            upper = cols[None, :] > np.arange(i0, i1)[:, None]
            r = diff[upper] / dist[upper] ** beta
            if r.size:
                best = max(best, float(np.max(r)))
        coverage = 1.0
    else:
        rng = np.random.default_rng(seed)
        total = n * (n - 1) // 2
        m = min(max_pairs, total)
        i = rng.integers(0, n, size=m)
        j = rng.integers(0, n, size=m)
        ok = i != j
        i, j = i[ok], j[ok]
        dist = np.linalg.norm(points[i] - points[j], axis=-1)
        best = float(np.max(np.abs(values[i] - values[j]) / dist ** beta))
        coverage = len(i) / total
    return best, coverage


def region_seminorm(f, grid, rho, beta):
    """[f]_{C^beta} over the rho-interior, with the beta > 1 surrogate.

    beta <= 1: node-pair seminorm of nodal values on Omega_rho.
    beta == 1: sup of the element gradient over cells centred in Omega_rho.
    beta in (1, 2): order beta-1 pair seminorm of the element gradient.
    f may be a GridFunction or a nodal value array.
    """
    if not isinstance(f, GridFunction):
        f = GridFunction(grid, f)
    if beta < 1.0:
        mask = grid.inner_region(rho)
        if int(mask.sum()) < 2:
            raise ValidationError(f"rho = {rho} leaves fewer than 2 nodes")
        val, _ = holder_seminorm(grid.nodes[mask], f.values[mask], beta)
        return val
    centers, _, grads = f.cell_quadrature()
    d = grid.domain.delta(centers[:, 0] if grid.domain.n == 1 else centers)
    mask = np.asarray(d) >= rho - 1e-12
    if int(mask.sum()) < 2:
        raise ValidationError(f"rho = {rho} leaves fewer than 2 cells")
    g = grads[mask]
    if abs(beta - 1.0) < 1e-12:
        return float(np.max(np.linalg.norm(g, axis=1)))
    pts = centers[mask]
    # vector-valued pair seminorm of the gradient, order beta - 1
    best = 0.0
    n = len(pts)
    cols = np.arange(n)
    block = max(1, int(2e6) // n)
    for i0 in range(0, n - 1, block):
        i1 = min(i0 + block, n - 1)
        dv = np.linalg.norm(g[i0:i1, None, :] - g[None, :, :], axis=-1)
        dx = np.linalg.norm(pts[i0:i1, None, :] - pts[None, :, :], axis=-1)
        upper = cols[None, :] > np.arange(i0, i1)[:, None]
        r = dv[upper] / dx[upper] ** (beta - 1.0)
        if r.size:
            best = max(best, float(np.max(r)))
    return best


@dataclass
class BoundaryProfile:
    """Nodal boundary quotient plus extrapolated traces.

    trace and trace_alt come from the two Richardson stencils; their gap is
    the per-point uncertainty, and flags marks points where the gap exceeds
    10% of the trace scale (extrapolation not converged).
    """

    s: float
    quotient: np.ndarray
    boundary_points: np.ndarray
    normals: np.ndarray
    boundary_weights: np.ndarray
    trace: np.ndarray
    trace_alt: np.ndarray
    stencil: tuple
    stencil_alt: tuple

    @property
    def uncertainty(self):
        return np.abs(self.trace - self.trace_alt)

    @property
    def flags(self):
        scale = max(float(np.max(np.abs(self.trace))), 1e-30)
        return self.uncertainty > 0.1 * scale

    @property
    def converged(self):
        return not bool(np.any(self.flags))


def _extrapolate(u, domain, points, normals, h, s, stencil):
    """Richardson trace of u/delta^s at boundary points along -normals.

    Samples at delta = m1 h and m2 h; the weights (m2, -m1)/(m2 - m1)
    eliminate the linear term of q(delta).
    """
    m1, m2 = stencil
    q = []
    for mm in (m1, m2):
        probe = points - mm * h * normals
        x = probe[:, 0] if domain.n == 1 else probe
        d = np.asarray(domain.delta(x), dtype=float)
        vals = np.asarray(u(x), dtype=float)
        q.append(vals / d ** s)
    return (m2 * q[0] - m1 * q[1]) / (m2 - m1)


def quotient_profile(u, grid, s, stencil=(2, 4), stencil_alt=(3, 6)):
    """Per-node u/delta^s and its extrapolated boundary trace.

    The probe depths are multiples of h: deep enough that the discrete
    boundary layer (the first one or two cells, where the scheme's own
    error concentrates) is skipped, shallow enough to stay in the
    delta^s regime.
    """
    if not isinstance(u, GridFunction):
        u = GridFunction(grid, u)
    s = float(s)
    if not 0 < s < 1:
        raise ValidationError("s must lie in (0, 1)")
    quotient = u.values / grid.delta ** s
    pts, wts, normals = grid.domain.boundary_rule(grid.h)
    trace = _extrapolate(u, grid.domain, pts, normals, grid.h, s, stencil)
    alt = _extrapolate(u, grid.domain, pts, normals, grid.h, s, stencil_alt)
    return BoundaryProfile(s, quotient, pts, normals, wts, trace, alt,
                           tuple(stencil), tuple(stencil_alt))


@dataclass
class SeminormScan:
    beta: float
    rhos: np.ndarray
    seminorms: np.ndarray
    slope: float
    target: float
    ok: bool


def _scan(f, grid, betas, rhos, targets, slack):
    out = []
    for beta, target in zip(betas, targets):
        vals = np.array([region_seminorm(f, grid, rho, beta) for rho in rhos])
        if np.any(vals <= 0):
            slope = 0.0  # interior-supported data saturate at exact zeros
        else:
            slope = float(np.polyfit(np.log(rhos), np.log(vals), 1)[0])
        out.append(SeminormScan(float(beta), np.asarray(rhos, dtype=float),
                                vals, slope, float(target),
                                bool(slope >= target - slack)))
    return out


def default_rho_ladder(grid, lo_cells=16, count=4):
    """Geometric rho ladder from lo_cells*h up, capped at diameter/8.

    The lower end keeps at least lo_cells cells inside the extraction layer
    so seminorms sample the continuum rate rather than the discrete one.
    """
    hi = grid.domain.diameter() / 8
    lo = max(lo_cells * grid.h, float(np.min(grid.delta)))
    if lo >= hi:
        raise ValidationError("grid too coarse for an interior rho ladder")
    return np.geomspace(hi, lo, count)


def hypothesis_scan(u, grid, s, alpha=None, betas_a=None, betas_b=None,
                    rhos=None, slack=0.15):
    """Seminorm-vs-rho scans for the two interior growth hypotheses.

    (a) [u]_{C^beta(Omega_rho)} <= C rho^{s-beta} for beta in [s, 1+2s);
    (b) [u/delta^s]_{C^beta(Omega_rho)} <= C rho^{alpha-beta} for beta in
    [alpha, s+alpha].  A scan passes when the fitted log-log slope is at
    least the cited exponent minus slack (growth no faster than allowed).
    """
    if not isinstance(u, GridFunction):
        u = GridFunction(grid, u)
    s = float(s)
    alpha = s - 0.05 if alpha is None else float(alpha)
    if not 0 < alpha < 1:
        raise ValidationError("alpha must lie in (0, 1)")
    betas_a = [s, 1.0] if betas_a is None else list(betas_a)
    betas_b = [alpha] if betas_b is None else list(betas_b)
    if any(not s - 1e-12 <= b < 1 + 2 * s for b in betas_a):
        raise ValidationError("scan (a) needs beta in [s, 1+2s)")
    if any(not alpha - 1e-12 <= b <= s + alpha + 1e-12 for b in betas_b):
        raise ValidationError("scan (b) needs beta in [alpha, s+alpha]")
    rhos = default_rho_ladder(grid) if rhos is None else np.asarray(
        rhos, dtype=float)
    scans_a = _scan(u, grid, betas_a, rhos, [s - b for b in betas_a], slack)
    quotient = u.values / grid.delta ** s
    scans_b = _scan(quotient, grid, betas_b, rhos,
                    [alpha - b for b in betas_b], slack)
    return scans_a, scans_b


def boundedness_check(values):
    """Hypothesis (c) surrogate: the nodal sup of Lu is finite."""
    values = np.asarray(values, dtype=float)
    m = float(np.max(np.abs(values))) if values.size else 0.0
    return m, bool(np.isfinite(m))


# -- Pohozaev identity -----------------------------------------------------


@dataclass
class PohozaevReport:
    lhs: float
    volume_term: float
    boundary_term: float
    residual: float
    trace_converged: bool

    @property
    def rhs(self):
        return self.volume_term + self.boundary_term


def pohozaev_residual(u, lu, grid, s, measure=None, stencil=(2, 4),
                      stencil_alt=(3, 6)):
    """Residual of int (x.grad u) Lu = (2s-n)/2 int u Lu - boundary term.

    The boundary term is Gamma(1+s)^2/2 int (u/delta^s)^2 (x.nu) dsigma,
    whose constant is specific to the symbol |xi|^{2s}; measures whose
    symbol deviates from it are rejected.  Volume integrals use cell
    midpoints: the integrand x.grad(u) Lu is cellwise smooth there, while
    node quadrature would straddle the gradient jumps.
    """
    if not isinstance(u, GridFunction):
        u = GridFunction(grid, u)
    n = grid.domain.n
    if measure is not None:
        xi = np.ones(n) / np.sqrt(n)
        a_val = float(symbol(measure, xi[None, :] if n == 2 else np.array(
            [1.0])))
        if not (measure.is_isotropic() and abs(a_val - 1.0) <= 1e-10):
            raise ValidationError(
                "Pohozaev constants hold for the symbol |xi|^{2s} only")
        if abs(measure.s - s) > 1e-12:
            raise ValidationError("order mismatch between measure and s")

    centers, vols, grads = u.cell_quadrature()
    # Lu is right-hand-side data: nonzero up to the boundary, so cell values
    # come from dof-corner averages (constant extension), not the
    # zero-extended interpolant used for u itself
    if callable(lu) and not isinstance(lu, GridFunction):
        lu_mid = np.asarray(lu(centers[:, 0] if n == 1 else centers),
                            dtype=float)
    else:
        lu_vals = lu.values if isinstance(lu, GridFunction) else np.asarray(
            lu, dtype=float)
        lu_mid = u.cell_average_of(lu_vals)
    u_mid = np.asarray(u(centers[:, 0] if n == 1 else centers), dtype=float)
    x_dot_grad = np.sum(centers * grads, axis=1)
    lhs = float(np.sum(vols * x_dot_grad * lu_mid))
    volume = (2 * s - n) / 2 * float(np.sum(vols * u_mid * lu_mid))

    prof = quotient_profile(u, grid, s, stencil, stencil_alt)
    x_dot_nu = np.sum(prof.boundary_points * prof.normals, axis=1)
    gamma = float(special.gamma(1 + s))
    boundary = -0.5 * gamma ** 2 * float(
        np.sum(prof.boundary_weights * prof.trace ** 2 * x_dot_nu))

    rhs = volume + boundary
    residual = abs(lhs - rhs) / max(abs(lhs), abs(rhs), 1e-30)
    return PohozaevReport(lhs, volume, boundary, residual, prof.converged)
