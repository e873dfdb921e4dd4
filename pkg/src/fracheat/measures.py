"""Symmetric stable spectral measures and their Fourier symbols.

Every operator in this package is determined by an order s in (0, 1) and a
nonnegative, antipodally symmetric density a(theta) on the unit sphere of
R^n (n = 1 or 2).  The Fourier symbol is

    A(xi) = integral_{S^{n-1}} |xi . theta|^{2s} a(theta) dtheta,

positively homogeneous of degree 2s and sandwiched by the ellipticity
constants:

    mu1 |xi|^{2s} <= A(xi) <= mu2 |xi|^{2s},
    mu2 = integral a(theta) dtheta,   mu1 = inf_{|nu|=1} A(nu).

For n = 1 the sphere is the two-point set {+1, -1} with counting measure, so
A(xi) = (a_plus + a_minus) |xi|^{2s} exactly.  For n = 2 the density is a
step function in the angle and each segment integral of |cos|^{2s} has a
closed form through the regularized incomplete beta function, so symbol
evaluation is exact there too; a plain Gauss-Legendre path is kept as an
independent cross-check.

    >>> m = SpectralMeasure.isotropic(1, 0.5)
    >>> symbol(m, 2.0)
    2.0
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import optimize, special

from .errors import NumericalError, ValidationError

TWO_PI = 2.0 * np.pi

# Angular resolution used when scanning for mu1 on S^1.  Each local minimum
# found on the grid is afterwards polished by a bounded 1-d minimizer, so the
# reported mu1 is the true minimum of the exact angular profile and not just
# the best grid value.
DIRECTION_GRID = 4096


def abs_cos_power_antiderivative(x, s):
    """F(x) = integral_0^x |cos(phi)|^{2s} dphi, valid for any real x.

    On a quarter period the substitution u = sin^2(phi) gives
    F(x) = B(1/2, s + 1/2) * I_{sin^2 x}(1/2, s + 1/2) / 2 with I the
    regularized incomplete beta function; the rest follows from the symmetry
    and pi-periodicity of |cos|^{2s}.  Odd in x.
    """
    x = np.asarray(x, dtype=float)
    half_beta = 0.5 * special.beta(0.5, s + 0.5)

    def quarter(y):
        return half_beta * special.betainc(0.5, s + 0.5, np.sin(y) ** 2)

    sign = np.sign(x)
    ax = np.abs(x)
    per = 2.0 * half_beta  # integral over one pi-period
    k = np.floor(ax / np.pi)
    r = ax - k * np.pi
    base = np.where(r <= 0.5 * np.pi, quarter(r), per - quarter(np.pi - r))
    out = sign * (k * per + base)
    return out if out.ndim else float(out)


def sphere_mass_constant(s):
    """integral_0^{2 pi} |cos(phi)|^{2s} dphi = 2 B(1/2, s + 1/2)."""
    return 2.0 * special.beta(0.5, s + 0.5)


def _validate_order(s):
    s = float(s)
    if not 0.0 < s < 1.0:
        raise ValidationError(f"order s must lie in (0, 1), got {s}")
    return s


class SpectralMeasure:
    """Nonnegative, antipodally symmetric angular density with an order s.

    n = 1: two atoms a_plus, a_minus on {+1, -1}; symmetry forces
    a_plus == a_minus and the constructor stores their even part.

    n = 2: a piecewise-constant density given as (start, end, weight) arc
    segments in radians.  Overlapping segments add.  The constructor
    canonicalizes everything to a step function on [0, 2 pi) and symmetrizes
    by the even part a(theta) <- (a(theta) + a(theta + pi)) / 2, which
    preserves total mass.  With strict_symmetry=True an asymmetric input is
    rejected instead.

    lambda2 is the declared pointwise cap: 0 <= a <= lambda2 everywhere.
    Construction fails if the cap is violated or the measure has no mass.
    """

    def __init__(self, n, s, *, atoms=None, segments=None, lambda2=None,
                 strict_symmetry=False):
        self.n = int(n)
        self.s = _validate_order(s)
        if self.n not in (1, 2):
            raise ValidationError(f"only n in (1, 2) is supported, got {n}")

        if self.n == 1:
            if atoms is None or segments is not None:
                raise ValidationError("n=1 takes atoms=(a_plus, a_minus)")
            a_plus, a_minus = (float(a) for a in atoms)
            if a_plus < 0 or a_minus < 0:
                raise ValidationError("atom weights must be nonnegative")
            if strict_symmetry and not math.isclose(a_plus, a_minus,
                                                    rel_tol=0, abs_tol=1e-12):
                raise ValidationError(
                    f"atoms break symmetry: {a_plus} != {a_minus}")
            even = 0.5 * (a_plus + a_minus)
            self.atoms = (even, even)
            self._breaks = None
            self._values = None
            peak = even
        else:
            if segments is None or atoms is not None:
                raise ValidationError("n=2 takes segments=[(start, end, w)]")
            self._breaks, self._values = _canonical_step(
                segments, strict=strict_symmetry)
            self.atoms = None
            peak = float(self._values.max(initial=0.0))

        self.lambda2 = float(lambda2) if lambda2 is not None else peak
        if self.lambda2 < 0:
            raise ValidationError("lambda2 must be nonnegative")
        if peak > self.lambda2 * (1 + 1e-12) + 1e-300:
            raise ValidationError(
                f"density exceeds declared cap: max a = {peak}, "
                f"lambda2 = {self.lambda2}")
        if self.mass() <= 0.0:
            raise ValidationError("measure has zero mass; operator degenerate")

    # -- basic queries ----------------------------------------------------

    def mass(self):
        """Total angular mass, which equals the upper ellipticity constant."""
        if self.n == 1:
            return self.atoms[0] + self.atoms[1]
        return float(np.sum(self._values * np.diff(self._breaks)))

    def density(self, phi):
        """a(theta(phi)) for n=2, with phi in radians (any real)."""
        if self.n != 2:
            raise ValidationError("density(phi) is defined for n=2 only")
        phi = np.mod(np.asarray(phi, dtype=float), TWO_PI)
        idx = np.clip(np.searchsorted(self._breaks, phi, side="right") - 1,
                      0, len(self._values) - 1)
        return self._values[idx]

    def segments(self):
        """Canonical (start, end, weight) triples with nonzero weight."""
        if self.n != 2:
            raise ValidationError("segments() is defined for n=2 only")
        out = []
        for lo, hi, w in zip(self._breaks[:-1], self._breaks[1:], self._values):
            if w != 0.0:
                out.append((float(lo), float(hi), float(w)))
        return out

    def is_isotropic(self, tol=1e-12):
        if self.n == 1:
            return True  # A is a multiple of |xi|^{2s} for any two-atom density
        vals = self._values
        return float(vals.max() - vals.min()) <= tol * max(vals.max(), 1.0)

    # -- constructors ------------------------------------------------------

    @classmethod
    def isotropic(cls, n, s, strength=1.0):
        """The constant density normalized so that A(xi) = strength * |xi|^{2s}."""
        s = _validate_order(s)
        if n == 1:
            w = 0.5 * float(strength)
            return cls(1, s, atoms=(w, w), lambda2=w)
        c = float(strength) / sphere_mass_constant(s)
        return cls(2, s, segments=[(0.0, TWO_PI, c)], lambda2=c)

    @classmethod
    def from_json(cls, doc):
        """Build from a JSON document (dict or string).

        n=2 form: {"n": 2, "s": 0.5, "segments": [{"from": a, "to": b,
        "weight": w}, ...], "lambda2": 1.0} ; n=1 replaces "segments" with
        "atoms": [a_plus, a_minus].  "strict_symmetry" is optional.
        """
        if isinstance(doc, str):
            doc = json.loads(doc)
        try:
            n = doc["n"]
            s = doc["s"]
        except KeyError as err:
            raise ValidationError(f"measure JSON misses key {err}") from None
        strict = bool(doc.get("strict_symmetry", False))
        lam2 = doc.get("lambda2")
        if n == 1:
            return cls(1, s, atoms=tuple(doc["atoms"]), lambda2=lam2,
                       strict_symmetry=strict)
        segs = [(seg["from"], seg["to"], seg["weight"])
                for seg in doc["segments"]]
        return cls(2, s, segments=segs, lambda2=lam2, strict_symmetry=strict)

    def to_json(self):
        doc = {"n": self.n, "s": self.s, "lambda2": self.lambda2}
        if self.n == 1:
            doc["atoms"] = list(self.atoms)
        else:
            doc["segments"] = [{"from": a, "to": b, "weight": w}
                               for a, b, w in self.segments()]
        return doc


def _canonical_step(segments, strict=False):
    """Turn raw arc segments into a symmetric step function on [0, 2 pi).

    Returns (breaks, values) with breaks[0] = 0, breaks[-1] = 2 pi and
    values[k] the density on [breaks[k], breaks[k+1]).
    """
    raw = []
    for seg in segments:
        a, b, w = (float(v) for v in seg)
        if w < 0:
            raise ValidationError(f"segment weight must be nonnegative: {w}")
        if not b > a:
            raise ValidationError(f"empty or reversed segment ({a}, {b})")
        if b - a > TWO_PI + 1e-12:
            raise ValidationError("segment longer than the full circle")
        a_mod = a % TWO_PI
        span = b - a
        # split wrap-around segments at 2 pi
        if a_mod + span <= TWO_PI + 1e-15:
            raw.append((a_mod, min(a_mod + span, TWO_PI), w))
        else:
            raw.append((a_mod, TWO_PI, w))
            raw.append((0.0, a_mod + span - TWO_PI, w))

    edges = {0.0, TWO_PI}
    for a, b, _ in raw:
        edges.update((a, b, (a + np.pi) % TWO_PI, (b + np.pi) % TWO_PI))
    breaks = np.array(sorted(edges))
    mids = 0.5 * (breaks[:-1] + breaks[1:])

    values = np.zeros_like(mids)
    for a, b, w in raw:
        values[(mids > a) & (mids < b)] += w

    # antipodal partner value at each piece
    mids_shift = (mids + np.pi) % TWO_PI
    idx = np.clip(np.searchsorted(breaks, mids_shift, side="right") - 1,
                  0, len(values) - 1)
    partner = values[idx]
    if strict:
        scale = max(float(values.max(initial=0.0)), 1.0)
        gap = float(np.max(np.abs(values - partner), initial=0.0))
        if gap > 1e-12 * scale:
            raise ValidationError(
                f"density breaks antipodal symmetry by {gap:.3e}")
    values = 0.5 * (values + partner)
    return breaks, values


# -- symbol evaluation ------------------------------------------------------


def symbol(measure, xi, method="exact", quad_order=64):
    """Fourier symbol A(xi) of the operator generated by `measure`.

    xi: scalar (n=1) or array of shape (..., n).  Vectorized.  method="exact"
    uses the closed forms described in the module docstring; "quadrature"
    uses Gauss-Legendre with `quad_order` nodes per density segment and
    exists as an independent cross-check of the exact path.
    """
    s = measure.s
    if measure.n == 1:
        xi = np.asarray(xi, dtype=float)
        if xi.ndim and xi.shape[-1] == 1:
            xi = xi[..., 0]
        out = measure.mass() * np.abs(xi) ** (2 * s)
        return out if out.ndim else float(out)

    xi = np.atleast_2d(np.asarray(xi, dtype=float))
    if xi.shape[-1] != 2:
        raise ValidationError("n=2 symbol expects xi with trailing dim 2")
    r = np.hypot(xi[..., 0], xi[..., 1])
    psi = np.arctan2(xi[..., 1], xi[..., 0])
    ang = _angular_profile(measure, psi, method=method, quad_order=quad_order)
    out = r ** (2 * s) * ang
    return out if out.shape != (1,) else float(out[0])


def _angular_profile(measure, psi, method="exact", quad_order=64):
    """g(psi) = A(unit vector at angle psi), exact or by quadrature."""
    s = measure.s
    psi = np.asarray(psi, dtype=float)
    total = np.zeros_like(psi)
    if method == "exact":
        for a, b, w in measure.segments():
            total += w * (abs_cos_power_antiderivative(b - psi, s)
                          - abs_cos_power_antiderivative(a - psi, s))
        return total
    if method != "quadrature":
        raise ValidationError(f"unknown symbol method {method!r}")
    nodes, weights = np.polynomial.legendre.leggauss(int(quad_order))
    for a, b, w in measure.segments():
        phi = 0.5 * (b - a) * nodes + 0.5 * (a + b)
        jac = 0.5 * (b - a)
        # |cos(phi - psi)|^{2s} summed over quadrature nodes
        vals = np.abs(np.cos(phi[None, ...] - psi[..., None])) ** (2 * s)
        total += w * jac * vals @ weights
    return total


@dataclass
class SymbolProfile:
    """Callable symbol together with its homogeneity data and mu bounds."""

    measure: SpectralMeasure
    quad_order: int = 64
    mu1: float = field(init=False)
    mu2: float = field(init=False)

    def __post_init__(self):
        self.mu1, self.mu2 = ellipticity(self.measure)

    @property
    def order(self):
        """Homogeneity degree of A: A(nu xi) = nu^order A(xi) for nu > 0."""
        return 2.0 * self.measure.s

    def __call__(self, xi, method="exact"):
        return symbol(self.measure, xi, method=method,
                      quad_order=self.quad_order)


def ellipticity(measure, n_directions=DIRECTION_GRID, polish=True):
    """(mu1, mu2) with mu1 = inf over unit directions of A and mu2 the mass.

    For n=1 both are exact.  For n=2 the angular profile is scanned on
    `n_directions` equispaced angles over a half period; every grid-local
    minimum is then polished by a bounded scalar minimizer so the reported
    mu1 resolves the true minimum value to ~1e-12 rather than to the grid
    spacing.
    """
    mu2 = measure.mass()
    if measure.n == 1:
        return mu2, mu2  # |nu . theta| = 1 on the two-point sphere

    grid = np.linspace(0.0, np.pi, int(n_directions), endpoint=False)
    vals = _angular_profile(measure, grid)
    mu1 = float(vals.min())
    if polish:
        step = np.pi / len(grid)
        # local minima of the periodic grid profile
        left = np.roll(vals, 1)
        right = np.roll(vals, -1)
        for i in np.nonzero((vals <= left) & (vals <= right))[0]:
            lo, hi = grid[i] - step, grid[i] + step
            res = optimize.minimize_scalar(
                lambda p: float(_angular_profile(measure, np.array([p]))[0]),
                bounds=(lo, hi), method="bounded",
                options={"xatol": 1e-12})
            mu1 = min(mu1, float(res.fun))
    if mu1 <= 1e-14 * max(mu2, 1.0):
        raise ValidationError("degenerate measure: mu1 = 0 within tolerance")
    return mu1, mu2


# -- certificates ------------------------------------------------------------


@dataclass
class CertificateReport:
    ok: bool
    n_trials: int
    max_slack: float          # max over trials of lhs - rhs (<= tol when ok)
    worst_case: tuple
    tolerance: float


def power_concavity(s, n_trials=10_000, seed=0, tol=1e-12):
    """Check 2 a^{2s} + 2 b^{2s} >= (a+b)^{2s} + (a-b)^{2s} for a >= b >= 0.

    This is the scalar inequality behind the second-difference bound on the
    symbol; it holds because t -> t^{2s} ... is subadditive-type concave in
    t^2 for s in (0,1).  Random pairs are drawn over several magnitude
    scales so the check is not confined to O(1) inputs.
    """
    s = _validate_order(s)
    rng = np.random.default_rng(seed)
    scales = 10.0 ** rng.uniform(-3, 3, n_trials)
    a = rng.uniform(0.0, 1.0, n_trials) * scales
    b = rng.uniform(0.0, 1.0, n_trials) * a  # enforce b <= a
    lhs = (a + b) ** (2 * s) + (a - b) ** (2 * s)
    rhs = 2 * a ** (2 * s) + 2 * b ** (2 * s)
    slack = lhs - rhs
    scale_ref = np.maximum(rhs, 1e-300)
    rel = slack / scale_ref
    i = int(np.argmax(rel))
    return CertificateReport(
        ok=bool(rel[i] <= tol),
        n_trials=n_trials,
        max_slack=float(rel[i]),
        worst_case=(float(a[i]), float(b[i])),
        tolerance=tol,
    )


def second_difference_certificate(measure, n_trials=10_000, seed=0, tol=1e-10):
    """Check A(xi+eta) + A(xi-eta) - 2 A(xi) <= 2 |eta|^{2s} mu2 on random pairs.

    Slack is reported relative to the bound 2 |eta|^{2s} mu2.  Violations
    beyond tol raise NumericalError: this inequality is what transfers the
    scalar power concavity to the full symbol, so a failure means the
    measure or the symbol evaluation is broken.
    """
    s = measure.s
    rng = np.random.default_rng(seed)
    n = measure.n
    shape = (n_trials, n) if n == 2 else (n_trials,)
    scales = 10.0 ** rng.uniform(-2, 2, n_trials)
    xi = rng.standard_normal(shape)
    eta = rng.standard_normal(shape)
    if n == 2:
        xi *= scales[:, None]
        eta *= scales[:, None]
        eta_norm = np.hypot(eta[:, 0], eta[:, 1])
    else:
        xi *= scales
        eta *= scales
        eta_norm = np.abs(eta)

    mu2 = measure.mass()
    lhs = (symbol(measure, xi + eta) + symbol(measure, xi - eta)
           - 2.0 * symbol(measure, xi))
    bound = 2.0 * eta_norm ** (2 * s) * mu2
    rel = (lhs - bound) / np.maximum(bound, 1e-300)
    i = int(np.argmax(rel))
    report = CertificateReport(
        ok=bool(rel[i] <= tol),
        n_trials=n_trials,
        max_slack=float(rel[i]),
        worst_case=(np.asarray(xi)[i].tolist(), np.asarray(eta)[i].tolist()),
        tolerance=tol,
    )
    if not report.ok:
        raise NumericalError(
            f"second-difference bound violated: relative slack "
            f"{report.max_slack:.3e} at (xi, eta) = {report.worst_case}")
    return report


# -- Weyl constant -----------------------------------------------------------


@dataclass
class WeylConstant:
    c0: float
    lower: float
    upper: float
    volume_sublevel: float      # |{ xi : A(xi) < 1 }|
    mc_sigma: float             # 1-sigma Monte Carlo error on c0 (0 if exact)
    mc_samples: int


def weyl_constant(measure, domain_volume, mc_samples=200_000, seed=0):
    """Leading eigenvalue-growth constant and its ellipticity sandwich.

    C0 = (2 pi)^{2s} |Omega|^{-2s/n} V_L^{-2s/n} with V_L the volume of the
    sublevel set {A < 1}.  The sandwich mu1 <= ... <= mu2 on the symbol gives

        v_n^{-2s/n} (2 pi)^{2s} |Omega|^{-2s/n} mu1
            <= C0 <=  (same) mu2,

    since A < 1 contains the ball of radius mu2^{-1/(2s)} and is contained in
    the one of radius mu1^{-1/(2s)}.  n=1 is exact; n=2 estimates V_L by
    seeded Monte Carlo over the bounding disk and propagates the 1-sigma
    binomial error to C0.  Raises NumericalError if the estimated C0 leaves
    the sandwich by more than 3 sigma.
    """
    n, s = measure.n, measure.s
    volume = float(domain_volume)
    if volume <= 0:
        raise ValidationError("domain volume must be positive")
    mu1, mu2 = ellipticity(measure)
    ball_vol = 2.0 if n == 1 else np.pi  # unit ball volume v_n
    pref = (2 * np.pi) ** (2 * s) * volume ** (-2 * s / n)
    lower = pref * ball_vol ** (-2 * s / n) * mu1
    upper = pref * ball_vol ** (-2 * s / n) * mu2

    if n == 1:
        v_l = 2.0 * measure.mass() ** (-1.0 / (2 * s))
        c0 = pref * v_l ** (-2 * s)
        return WeylConstant(c0, lower, upper, v_l, 0.0, 0)

    radius = mu1 ** (-1.0 / (2 * s))  # A < 1 fits inside this disk
    rng = np.random.default_rng(seed)
    r = radius * np.sqrt(rng.uniform(0.0, 1.0, mc_samples))
    phi = rng.uniform(0.0, TWO_PI, mc_samples)
    pts = np.column_stack((r * np.cos(phi), r * np.sin(phi)))
    inside = symbol(measure, pts) < 1.0
    p_hat = float(np.mean(inside))
    disk = np.pi * radius ** 2
    v_l = disk * p_hat
    sigma_v = disk * math.sqrt(max(p_hat * (1 - p_hat), 1e-30) / mc_samples)
    c0 = pref * v_l ** (-2 * s / n)
    sigma_c = c0 * (2 * s / n) * sigma_v / v_l
    if c0 < lower - 3 * sigma_c or c0 > upper + 3 * sigma_c:
        raise NumericalError(
            f"Weyl sandwich violated beyond 3 sigma: "
            f"{lower} <= {c0} +- {sigma_c} <= {upper} fails")
    return WeylConstant(c0, lower, upper, v_l, sigma_c, mc_samples)
