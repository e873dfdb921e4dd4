"""Dirichlet eigenpairs, Weyl-ratio audits, and bootstrap exponent arithmetic.

Eigenpairs come from the dense symmetric generalized problem K phi = lambda
M phi.  Everything downstream (heat evolution, tail bounds, sup-norm audits)
consumes the EigenSystem container, so the solver pins the normalization
(M-orthonormal) and a deterministic sign convention once, here.

The bootstrap iteration p_{k+1} = n p_k / (n - 2 p_k s) is exact rational
arithmetic; floats entered as decimal literals are parsed through their
string form so 0.3 means 3/10, not the binary float.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy import linalg

from .errors import NumericalError, ValidationError
from .operator import GridFunction, OperatorMatrices

RESIDUAL_TOL = 1e-8


@dataclass
class EigenSystem:
    """Ordered Dirichlet eigenpairs of one assembled operator.

    eigenvalues are ascending and positive; vectors columns are
    M-orthonormal with the first component of magnitude above
    1e-12 * max made positive.
    """

    matrices: OperatorMatrices
    eigenvalues: np.ndarray
    vectors: np.ndarray  # (nodes, m)

    @property
    def m(self):
        return len(self.eigenvalues)

    @property
    def grid(self):
        return self.matrices.grid

    def eigenfunction(self, k):
        """k-th eigenfunction (0-based) as a grid function."""
        return GridFunction(self.grid, self.vectors[:, k])

    def sup_norms(self):
        return np.max(np.abs(self.vectors), axis=0)

    def check(self, tol=RESIDUAL_TOL):
        """Orthonormality and residual invariants; raises on violation."""
        M = self.matrices.mass_matrix
        K = self.matrices.stiffness
        G = self.vectors.T @ (M @ self.vectors)
        ortho = float(np.max(np.abs(G - np.eye(self.m))))
        if ortho > tol:
            raise NumericalError(f"M-orthonormality defect {ortho:.3e}")
        if self.eigenvalues[0] <= 0:
            raise NumericalError("nonpositive ground eigenvalue")
        R = K @ self.vectors - (M @ self.vectors) * self.eigenvalues
        res = np.linalg.norm(R, axis=0)
        scale = np.linalg.norm(K @ self.vectors, axis=0)
        worst = int(np.argmax(res / scale))
        if res[worst] > tol * scale[worst]:
            raise NumericalError(
                f"eigen residual {res[worst]/scale[worst]:.3e} at k={worst}")
        return ortho, float(np.max(res / scale))


def eigenpairs(matrices, m=None):
    """Lowest m Dirichlet eigenpairs of K phi = lambda M phi."""
    n = matrices.stiffness.shape[0]
    m = n if m is None else int(m)
    if not 1 <= m <= n:
        raise ValidationError(f"m={m} outside 1..{n}")
    try:
        vals, vecs = linalg.eigh(matrices.stiffness, matrices.mass_matrix,
                                 subset_by_index=[0, m - 1])
    except linalg.LinAlgError as err:
        raise NumericalError(f"eigensolve failed: {err}") from err
    # deterministic sign: first significant component positive
    for k in range(m):
        v = vecs[:, k]
        lead = np.flatnonzero(np.abs(v) > 1e-12 * np.abs(v).max())
        if v[lead[0]] < 0:
            vecs[:, k] = -v
    eig = EigenSystem(matrices, vals, vecs)
    eig.check()
    return eig


@dataclass
class WeylAudit:
    k_lo: int
    k_hi: int
    ratios: np.ndarray
    median: float
    drift: float
    c0: float
    lower: float
    upper: float
    sandwich_ok: bool
    drifting: bool

    @property
    def median_error(self):
        return abs(self.median - self.c0) / self.c0


def weyl_audit(eig, weyl, k_range=None, drift_tol=0.15, mc_slack=3.0):
    """Ratios lambda_k k^{-2s/n} over a window against the Weyl constant.

    Default window [m/3, 5m/6]: low k is preasymptotic, top k carries the
    discretization error.  drift is the relative change of a linear fit of
    the ratio across the window; beyond drift_tol the report flags that the
    window has not settled.  Sandwich compliance allows mc_slack Monte Carlo
    standard deviations on both ends (exact constants have sigma = 0).
    """
    s = eig.matrices.measure.s
    n = eig.matrices.measure.n
    m = eig.m
    if k_range is None:
        k_range = (max(1, m // 3), max(2, (5 * m) // 6))
    k_lo, k_hi = int(k_range[0]), int(k_range[1])
    if not 1 <= k_lo < k_hi <= m:
        raise ValidationError(f"window [{k_lo}, {k_hi}] outside 1..{m}")
    ks = np.arange(k_lo, k_hi + 1)
    ratios = eig.eigenvalues[ks - 1] / ks.astype(float) ** (2 * s / n)
    med = float(np.median(ratios))
    coef = np.polyfit(ks.astype(float), ratios, 1)
    drift = float(coef[0] * (k_hi - k_lo) / med)
    slack = mc_slack * weyl.mc_sigma
    ok = (weyl.lower - slack <= weyl.c0 <= weyl.upper + slack)
    return WeylAudit(k_lo, k_hi, ratios, med, drift, weyl.c0,
                     weyl.lower, weyl.upper, ok, abs(drift) > drift_tol)


@dataclass
class SupNormAudit:
    w: int
    slope: float
    bound_slope: float
    implied_c: float
    table: np.ndarray  # columns k, lambda_k, sup norm
    ok: bool


def sup_norm_audit(eig, w, k_min=2, slack=0.1):
    """Fit log sup-norm against log lambda; the bound predicts slope w-1.

    Eigenfunctions are L^2-normalized already, so the fitted line's level is
    the implied constant in sup|phi_k| <= C lambda_k^{w-1}.  The bound is far
    from sharp; ok only asserts the slope does not exceed w - 1 + slack.
    """
    lam = eig.eigenvalues[k_min - 1:]
    sup = eig.sup_norms()[k_min - 1:]
    if len(lam) < 3:
        raise ValidationError("need at least 3 eigenpairs above k_min")
    slope, _ = np.polyfit(np.log(lam), np.log(sup), 1)
    implied_c = float(np.max(sup / lam ** (w - 1)))
    ks = np.arange(k_min, eig.m + 1)
    table = np.column_stack((ks, lam, sup))
    return SupNormAudit(int(w), float(slope), float(w - 1), implied_c,
                        table, bool(slope <= w - 1 + slack))


# -- bootstrap exponents ---------------------------------------------------


@dataclass
class BootstrapPlan:
    """Exact record of the L^p improvement iteration.

    exponents holds p_0 = 2, ..., p_N as Fractions; w is the number of
    L^2 -> L^2 smoothing steps needed for an L^infinity bound, so
    sup|phi| <= C lambda^{w-1} ||phi||_{L^2}.  reduction flags n <= 2s,
    where a single step already lands in the supercritical case.
    """

    n: int
    s: Fraction
    branch: str
    exponents: list
    big_n: int
    w: int
    reduction: bool

    def to_dict(self):
        return {"n": self.n, "s": str(self.s), "branch": self.branch,
                "p": [float(p) for p in self.exponents],
                "p_exact": [str(p) for p in self.exponents],
                "N": self.big_n, "w": self.w, "reduction": self.reduction}


def _as_fraction(s):
    if isinstance(s, Fraction):
        return s
    if isinstance(s, int):
        return Fraction(s)
    # parse decimal literals through the string form: 0.3 -> 3/10
    return Fraction(str(s))


def bootstrap_exponents(n, s):
    """Branch and exponent sequence of the iterated L^p improvement.

    r = n/2s sorts the cases: r < 2 one step suffices (w = 2); r = 2 is the
    critical case needing an intermediate exponent (w = 3); r > 2 iterates
    p_{k+1} = n p_k / (n - 2 p_k s) from p_0 = 2 until n <= 2 p_N s, then
    w = N + 2 if p_N > n/2s strictly and N + 3 in the equality case, where
    the final exponent is again critical.
    """
    n = int(n)
    if n < 1:
        raise ValidationError("n must be a positive integer")
    s = _as_fraction(s)
    if not 0 < s < 1:
        raise ValidationError("s must lie in (0, 1)")
    r = Fraction(n) / (2 * s)
    reduction = r <= 1  # n <= 2s forces n = 1
    p = [Fraction(2)]
    if r < 2:
        return BootstrapPlan(n, s, "subcritical", p, 0, 2, reduction)
    if r == 2:
        return BootstrapPlan(n, s, "critical", p, 0, 3, reduction)
    while n > 2 * p[-1] * s:
        nxt = n * p[-1] / (n - 2 * p[-1] * s)
        if nxt <= p[-1]:
            raise NumericalError("bootstrap iteration not increasing")
        p.append(nxt)
    big_n = len(p) - 1
    w = big_n + 2 if p[-1] > r else big_n + 3
    return BootstrapPlan(n, s, "supercritical", p, big_n, w, reduction)


# -- persistence -----------------------------------------------------------


def save_eigensystem(eig, csv_path, vec_path, config_hash=""):
    """CSV (k, lambda_k, sup norm) plus the eigenvector blob."""
    sup = eig.sup_norms()
    with open(csv_path, "w", newline="") as fh:
        wr = csv.writer(fh)
        wr.writerow(["k", "lambda", "sup_norm", "config"])
        for k in range(eig.m):
            wr.writerow([k + 1, repr(float(eig.eigenvalues[k])),
                         repr(float(sup[k])), config_hash])
    np.save(vec_path, eig.vectors)


def load_eigenvalues(csv_path):
    with open(csv_path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    return np.array([float(r["lambda"]) for r in rows])
