"""Heat-semigroup solutions by eigenexpansion, decay and tail control.

Time propagation is exact on the computed eigensystem: project the datum,
damp each coefficient by e^{-lambda_k t}, resum.  No time stepping and no
CFL; the only truncation is the eigencount m, and that error is reported as
a norm envelope instead of silently absorbed.

Derivatives in time multiply mode k by (-lambda_k)^j; products
lambda_k^j e^{-lambda_k t} are evaluated in log space since j lambda^j can
overflow long before the exponential wins.

The tail machinery makes the Weyl envelope operational: once eigenvalues sit
in [C0 k^gamma / 2, 3 C0 k^gamma / 2], the spectral tail sum_{k>=k0}
lambda_k^w e^{-lambda_k t0} is dominated by an incomplete-gamma expression
whose blow-up order in t0 is exactly beta + 1 = w + n/2s.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import special

from .boundary import holder_seminorm
from .errors import NumericalError, ValidationError
from .operator import GridFunction
from .spectral import EigenSystem, bootstrap_exponents


@dataclass
class HeatSolution:
    """Eigenbasis coefficients of one initial datum.

    coefficients[k] = phi_k^T M u0.  Bessel: their square sum never exceeds
    the datum's L^2 norm (equality when m is the full basis, up to
    discretization).
    """

    eig: EigenSystem
    coefficients: np.ndarray
    u0: np.ndarray

    @property
    def m(self):
        return len(self.coefficients)

    def datum_norm(self):
        return self.eig.matrices.l2_norm(self.u0)

    def truncation_envelope(self, t):
        """Crude remainder bound ||u0|| e^{-lambda_m t} for the dropped modes."""
        lam_top = float(self.eig.eigenvalues[-1])
        return self.datum_norm() * float(np.exp(-lam_top * t))


def project(eig, u0):
    """Expand nodal data u0 in the eigenbasis.

    Bessel and the coefficient bound max|u_k| <= ||u0||_{L^2} are checked
    here: both are exact linear algebra, so violations mean a broken
    eigensystem rather than discretization error.
    """
    if isinstance(u0, GridFunction):
        u0 = u0.values
    u0 = np.asarray(u0, dtype=float)
    if u0.shape != (len(eig.grid),):
        raise ValidationError("datum does not match grid size")
    coeff = eig.vectors.T @ (eig.matrices.mass_matrix @ u0)
    norm = eig.matrices.l2_norm(u0)
    if np.sum(coeff ** 2) > norm ** 2 * (1 + 1e-10) + 1e-12:
        raise NumericalError("Bessel inequality violated by projection")
    if coeff.size and np.max(np.abs(coeff)) > norm * (1 + 1e-10) + 1e-12:
        raise NumericalError("coefficient bound violated by projection")
    return HeatSolution(eig, coeff, u0)


def _damped(sol, j, t):
    """Coefficients (-1)^j lambda^j u_k e^{-lambda t}, log-space magnitudes."""
    lam = sol.eig.eigenvalues
    t = float(t)
    if t < 0:
        raise ValidationError("t must be nonnegative")
    if j == 0:
        return sol.coefficients * np.exp(-lam * t)
    if t == 0.0:
        return (-1.0) ** j * sol.coefficients * lam ** j
    mag = np.exp(j * np.log(lam) - lam * t)
    return (-1.0) ** j * sol.coefficients * mag


def evaluate(sol, t):
    """u(., t) as a grid function."""
    return GridFunction(sol.eig.grid, sol.eig.vectors @ _damped(sol, 0, t))


def time_derivative(sol, j, t):
    """d^j/dt^j u(., t); j = 0 reproduces evaluate."""
    j = int(j)
    if j < 0:
        raise ValidationError("derivative order must be nonnegative")
    return GridFunction(sol.eig.grid, sol.eig.vectors @ _damped(sol, j, t))


def l2_decay(sol, ts):
    """||u(., t)||_{L^2} = sqrt(sum u_k^2 e^{-2 lambda_k t}) on a t grid."""
    ts = np.asarray(ts, dtype=float)
    if np.any(np.diff(ts) <= 0):
        raise ValidationError("t grid must be increasing")
    lam = sol.eig.eigenvalues
    sq = sol.coefficients ** 2
    return np.sqrt(np.array([np.sum(sq * np.exp(-2 * lam * t)) for t in ts]))


def decay_slope(sol, t_lo=None, t_hi=None, samples=12):
    """Fitted slope of log ||u||^2 against t; tends to -2 lambda_1.

    Defaults t in [3, 6] / lambda_1, late enough that the ground mode
    dominates, early enough that the norm is far from underflow.
    """
    lam1 = float(sol.eig.eigenvalues[0])
    t_lo = 3.0 / lam1 if t_lo is None else float(t_lo)
    t_hi = 6.0 / lam1 if t_hi is None else float(t_hi)
    ts = np.linspace(t_lo, t_hi, samples)
    norms = l2_decay(sol, ts)
    if np.any(norms <= 0):
        raise NumericalError("decay slope fit hit an exactly zero norm")
    slope = float(np.polyfit(ts, 2 * np.log(norms), 1)[0])
    return slope, -2.0 * lam1


# -- spectral tail bound ---------------------------------------------------


@dataclass
class TailBound:
    t0: float
    w: int
    gamma: float
    beta: float
    k0: int
    c0: float
    bound: float
    direct_sum: float


def _envelope_start(lam, c0, gamma, run=10):
    """First index k (1-based) with lambda_j in [c0 j^g/2, 3 c0 j^g/2]
    for j = k .. k+run-1."""
    ks = np.arange(1, len(lam) + 1, dtype=float)
    inside = (lam >= 0.5 * c0 * ks ** gamma) & (lam <= 1.5 * c0 * ks ** gamma)
    for k in range(len(lam) - run + 1):
        if inside[k:k + run].all():
            return k + 1
    raise NumericalError(
        "no run of eigenvalues inside the Weyl envelope; "
        "k0 too small or eigensystem too short")


def tail_bound_value(c0, gamma, beta, w, t0, k0):
    """Closed form of the dominating tail expression, no envelope audit.

    (3/2)^w c0^w 2^{beta+1} / (gamma (c0 t0)^{beta+1})
        * Gamma_upper(beta+1, c0 t0 k0^gamma / 2)

    k0 = 0 collapses the incomplete gamma to the full Gamma(beta+1).
    """
    z0 = 0.5 * c0 * t0 * k0 ** gamma
    upper_gamma = special.gammaincc(beta + 1, z0) * special.gamma(beta + 1)
    return ((1.5 ** w) * c0 ** w * 2.0 ** (beta + 1)
            / (gamma * (c0 * t0) ** (beta + 1)) * upper_gamma)


def tail_bound(eig, c0, w, t0, k0=None, run=10):
    """Explicit dominating bound for sum_{k>=k0} lambda_k^w e^{-lambda_k t0}.

    bound = (3/2)^w c0^w 2^{beta+1} / (gamma (c0 t0)^{beta+1})
            * Gamma_upper(beta+1, c0 t0 k0^gamma / 2)

    k0 defaults to the first index where the computed eigenvalues enter the
    envelope band and stay for `run` consecutive indices.  The directly
    summed tail over the available spectrum must not exceed the bound; a
    violation raises (given the envelope, the inequality cannot fail).
    """
    if t0 <= 0:
        raise ValidationError("t0 must be positive")
    s = eig.matrices.measure.s
    n = eig.matrices.measure.n
    gamma = 2 * s / n
    beta = w + n / (2 * s) - 1
    lam = np.asarray(eig.eigenvalues, dtype=float)
    if k0 is None:
        k0 = _envelope_start(lam, c0, gamma, run)
    else:
        k0 = int(k0)
        if not 1 <= k0 <= len(lam):
            raise ValidationError(
                f"k0={k0} outside the computed spectrum (1..{len(lam)})")
        ks = np.arange(k0, min(k0 + run, len(lam) + 1), dtype=float)
        seg = lam[k0 - 1:k0 - 1 + len(ks)]
        if not np.all((seg >= 0.5 * c0 * ks ** gamma)
                      & (seg <= 1.5 * c0 * ks ** gamma)):
            raise NumericalError(f"eigenvalues leave the envelope at k0={k0}")
    bound = tail_bound_value(c0, gamma, beta, w, t0, k0)
    with np.errstate(over="ignore"):
        direct = float(np.sum(np.exp(
            w * np.log(lam[k0 - 1:]) - lam[k0 - 1:] * t0)))
    if direct > bound * (1 + 1e-12):
        raise NumericalError(
            f"tail bound {bound:.6g} fails to dominate direct sum "
            f"{direct:.6g} at t0={t0}")
    return TailBound(float(t0), int(w), float(gamma), float(beta), int(k0),
                     float(c0), float(bound), direct)


# -- uniform-in-time monitors ------------------------------------------------


@dataclass
class UniformBoundAudit:
    t0: float
    ts: np.ndarray
    cs_seminorm: np.ndarray
    quotient_norm: np.ndarray
    monotone_cs: bool
    monotone_quotient: bool
    c1: float
    c2: float
    sweep_t0: np.ndarray
    sweep_c1: np.ndarray
    blowup_exponent: float
    blowup_order: float
    blowup_ok: bool


def _cs_seminorm(u, grid, s):
    """Discrete C^s seminorm of the zero-extended solution.

    Node pairs plus the boundary quadrature points (where the extension
    vanishes), so decay toward the boundary is part of the seminorm.
    """
    pts_b, _, _ = grid.domain.boundary_rule(grid.h)
    pts = np.vstack((grid.nodes, pts_b))
    vals = np.concatenate((u.values, np.zeros(len(pts_b))))
    val, _ = holder_seminorm(pts, vals, s)
    return val


def _quotient_seminorm(u, grid, s, eps):
    """C^{s - eps} seminorm of u / delta^s over the interior nodes."""
    q = u.values / grid.delta ** s
    val, _ = holder_seminorm(grid.nodes, q, s - eps)
    return val


def uniform_bound_audit(sol, t0, eps=0.05, doublings=4, sweep=4):
    """Monitors behind the uniform-in-time regularity statement.

    On t in {t0, 2 t0, ...}: the C^s seminorm of the zero-extended u(., t)
    and the C^{s-eps} seminorm of the boundary quotient u/delta^s; both
    should be largest at t = t0 for data controlled by the summable
    envelope.  Sweeping t0 downward fits the blow-up exponent of the
    implied constant, which the theory caps at w + n/2s.  Sampled-grid
    monitor only; it cannot certify the continuum sup over t >= t0.
    """
    if t0 <= 0:
        raise ValidationError("t0 must be positive")
    if not 0 < eps < sol.eig.matrices.measure.s:
        raise ValidationError("eps must lie in (0, s)")
    grid = sol.eig.grid
    s = sol.eig.matrices.measure.s
    n = sol.eig.matrices.measure.n
    ts = t0 * 2.0 ** np.arange(doublings + 1)
    cs = np.empty(len(ts))
    qn = np.empty(len(ts))
    for i, t in enumerate(ts):
        u = evaluate(sol, t)
        cs[i] = _cs_seminorm(u, grid, s)
        qn[i] = _quotient_seminorm(u, grid, s, eps)
    plan = bootstrap_exponents(n, s)
    order = plan.w + n / (2 * s)
    sweep_t0 = t0 * 0.5 ** np.arange(sweep)
    sweep_c1 = np.empty(sweep)
    for i, tt in enumerate(sweep_t0):
        u = evaluate(sol, tt)
        sweep_c1[i] = _cs_seminorm(u, grid, s)
    fit = float(np.polyfit(np.log(sweep_t0), np.log(sweep_c1), 1)[0])
    blowup = -fit  # monitor ~ t0^{-blowup}
    return UniformBoundAudit(
        float(t0), ts, cs, qn,
        bool(np.all(np.diff(cs) <= cs[:-1] * 1e-9 + 1e-12)),
        bool(np.all(np.diff(qn) <= qn[:-1] * 1e-9 + 1e-12)),
        float(cs[0]), float(qn[0]), sweep_t0, sweep_c1,
        float(blowup), float(order), bool(blowup <= order + 0.5))
