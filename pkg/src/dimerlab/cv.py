"""Continuous-variable analytics: potential surface, stationary points,
quadratic expansions, closed-form spectra and Hermite-Gauss eigenstates.

Coordinates are the population imbalances x = (n_L - n_R)/N_a and
y = (m_L - m_R)/N_b, each in [-1, 1].  The effective potential is

    V(x, y) = -gamma + (u_a/4)(1 + x^2) + (u_b/4)(1 + y^2)
              + (w/2)(1 + x y) - tau_a sqrt(1 - x^2) - tau_b sqrt(1 - y^2)

and the low-energy eigenproblem reduces, near a minimum (xb, yb), to two
decoupled oscillators in the rotated coordinates q = (x + y - xb - yb)/sqrt2,
p = (x - y - xb + yb)/sqrt2.  Conventions used throughout:

  * oscillator frequency  omega = 2*sqrt(mass_coeff * stiffness), where
    mass_coeff is the Laplacian prefactor (2*tau*eps^2 at the uniform
    point, 4*tau^2*eps^2/(|w|-u) at the split minima);
  * Gaussian width        width^2 = sqrt(mass_coeff / stiffness), so the
    ground density is exp(-q^2/width_q^2 - p^2/width_p^2);
  * the quantum number n always labels the q mode and m the p mode.  For
    w > 0 the p mode is the one that softens toward the critical point,
    for w < 0 it is the q mode; at |w| = u + 2*tau the soft frequency
    vanishes and the harmonic ladder in that mode is replaced by the
    quasicontinuous plane-wave branch E(n, k).

Symmetric-case closed forms (u_a = u_b = u, tau_a = tau_b = tau, eps = eps_a):
stationary points lie on y = -x for w > 0 and y = x for w < 0, at x = 0 and,
once |w| > u + 2*tau, at x = +-sqrt(1 - 4 tau^2/(|w| - u)^2).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .exact import AmplitudeGrid
from .fock import FockBasis
from .model import (
    CRITICAL,
    EffectiveParams,
    Regime,
    classify_regime,
    is_symmetric_case,
    symmetric_couplings,
)

__all__ = [
    "CVEigenstate",
    "CVLevel",
    "QuadraticForm",
    "StationaryPoint",
    "collapse_levels",
    "cv_eigenstate",
    "cv_levels",
    "default_seeds",
    "eigenfunction_density",
    "hermite",
    "hessian",
    "levels_to_csv",
    "newton_stationary_point",
    "population_residual",
    "potential",
    "potential_gradient",
    "quadratic_form",
    "stationary_points_general",
    "stationary_points_symmetric",
]

MINIMUM = "minimum"
SADDLE = "saddle"
MAXIMUM = "maximum"

UNIFORM = "uniform"
PLUS = "plus"
MINUS = "minus"

# stationary-point residual bound, scaled by (u + 2 tau + |w|)
STATIONARY_RTOL = 1e-10
# Newton iteration settings
NEWTON_MAX_ITER = 100
NEWTON_RTOL = 1e-12
# points closer than this are duplicates
DEDUP_DIST = 1e-8
# reject points this close to the square-root singularity at |x| = 1
EDGE_MARGIN = 1e-12


def _coupling_scale(e: EffectiveParams) -> float:
    return max(e.u_a, e.u_b) + e.tau_a + e.tau_b + abs(e.w)


def _check_domain(x: float, y: float) -> None:
    if abs(x) > 1.0 or abs(y) > 1.0:
        raise ValueError(f"imbalance ({x}, {y}) outside [-1, 1]^2")


def potential(e: EffectiveParams, x: float, y: float) -> float:
    """Effective potential V(x, y); see module docstring."""
    _check_domain(x, y)
    return (
        -e.gamma
        + 0.25 * e.u_a * (1.0 + x * x)
        + 0.25 * e.u_b * (1.0 + y * y)
        + 0.5 * e.w * (1.0 + x * y)
        - e.tau_a * math.sqrt(1.0 - x * x)
        - e.tau_b * math.sqrt(1.0 - y * y)
    )


def potential_gradient(e: EffectiveParams, x: float, y: float) -> tuple[float, float]:
    _check_domain(x, y)
    gx = 0.5 * e.u_a * x + 0.5 * e.w * y + e.tau_a * x / math.sqrt(1.0 - x * x)
    gy = 0.5 * e.u_b * y + 0.5 * e.w * x + e.tau_b * y / math.sqrt(1.0 - y * y)
    return gx, gy


def population_residual(e: EffectiveParams, x: float, y: float) -> tuple[float, float]:
    """Residuals of the boson-population equations (zero at stationary points).

    r1 = w y + u_a x + 2 tau_a x / sqrt(1 - x^2)
    r2 = w x + u_b y + 2 tau_b y / sqrt(1 - y^2)

    These are exactly twice the gradient of V.
    """
    gx, gy = potential_gradient(e, x, y)
    return 2.0 * gx, 2.0 * gy


def hessian(e: EffectiveParams, x: float, y: float) -> np.ndarray:
    _check_domain(x, y)
    vxx = 0.5 * e.u_a + e.tau_a / (1.0 - x * x) ** 1.5
    vyy = 0.5 * e.u_b + e.tau_b / (1.0 - y * y) ** 1.5
    vxy = 0.5 * e.w
    return np.array([[vxx, vxy], [vxy, vyy]])


@dataclass(frozen=True)
class StationaryPoint:
    """A root of the boson-population equations with its type and branch."""

    x: float
    y: float
    kind: str
    branch: str
    V_value: float


def _classify(e: EffectiveParams, x: float, y: float) -> str:
    eigs = np.linalg.eigvalsh(hessian(e, x, y))
    tol = 1e-12 * _coupling_scale(e)
    if np.all(eigs > -tol):  # zero curvature (critical flat direction) counts as minimum
        return MINIMUM
    if np.all(eigs < tol):
        return MAXIMUM
    return SADDLE


def _make_point(e: EffectiveParams, x: float, y: float, branch: str) -> StationaryPoint:
    r1, r2 = population_residual(e, x, y)
    scale = _coupling_scale(e)
    if max(abs(r1), abs(r2)) > STATIONARY_RTOL * scale:
        raise ValueError(f"point ({x}, {y}) is not stationary: residual {max(abs(r1), abs(r2)):.3e}")
    return StationaryPoint(x=x, y=y, kind=_classify(e, x, y), branch=branch, V_value=potential(e, x, y))


def stationary_points_symmetric(e: EffectiveParams) -> list[StationaryPoint]:
    """Closed-form stationary points in the symmetric case.

    Always contains the uniform point (0, 0).  When |w| > u + 2*tau the
    symmetric pair appears at x = +-sqrt(1 - 4 tau^2 / (|w| - u)^2), with
    y = -x for repulsive w and y = x for attractive w.
    """
    u, tau = symmetric_couplings(e)
    points = [_make_point(e, 0.0, 0.0, UNIFORM)]
    aw = abs(e.w)
    if aw > u + 2.0 * tau:
        x1 = math.sqrt(1.0 - (2.0 * tau / (aw - u)) ** 2)
        y_sign = 1.0 if e.w < 0.0 else -1.0
        points.append(_make_point(e, +x1, y_sign * x1, PLUS))
        points.append(_make_point(e, -x1, -y_sign * x1, MINUS))
    return points


def newton_stationary_point(
    e: EffectiveParams,
    x0: float,
    y0: float,
    max_iter: int = NEWTON_MAX_ITER,
    tol: float | None = None,
) -> tuple[float, float, float, bool]:
    """Damped Newton iteration on the population residuals with analytic Jacobian.

    Returns (x, y, residual_norm, converged).  The Jacobian is
    [[u_a + 2 tau_a (1-x^2)^{-3/2}, w], [w, u_b + 2 tau_b (1-y^2)^{-3/2}]].
    """
    if tol is None:
        tol = NEWTON_RTOL * max(1.0, _coupling_scale(e))
    x, y = float(x0), float(y0)
    cap = 1.0 - EDGE_MARGIN

    def norm(xx, yy):
        r1, r2 = population_residual(e, xx, yy)
        return math.hypot(r1, r2)

    res = norm(x, y)
    for _ in range(max_iter):
        if res <= tol:
            return x, y, res, True
        r1, r2 = population_residual(e, x, y)
        j11 = e.u_a + 2.0 * e.tau_a / (1.0 - x * x) ** 1.5
        j22 = e.u_b + 2.0 * e.tau_b / (1.0 - y * y) ** 1.5
        det = j11 * j22 - e.w * e.w
        if det == 0.0:
            break
        dx = (j22 * r1 - e.w * r2) / det
        dy = (j11 * r2 - e.w * r1) / det
        step = 1.0
        while step > 1e-6:
            xn = min(cap, max(-cap, x - step * dx))
            yn = min(cap, max(-cap, y - step * dy))
            new_res = norm(xn, yn)
            if new_res < res:
                x, y, res = xn, yn, new_res
                break
            step *= 0.5  # damp when the residual grows
        else:
            break
    return x, y, res, res <= tol


def default_seeds(e: EffectiveParams, grid: int = 11) -> list[tuple[float, float]]:
    """(0,0), the symmetrized closed-form points, and a coarse grid."""
    seeds = [(0.0, 0.0)]
    u = 0.5 * (e.u_a + e.u_b)
    tau = 0.5 * (e.tau_a + e.tau_b)
    aw = abs(e.w)
    if aw > u + 2.0 * tau:
        x1 = math.sqrt(1.0 - (2.0 * tau / (aw - u)) ** 2)
        y_sign = 1.0 if e.w < 0.0 else -1.0
        seeds += [(x1, y_sign * x1), (-x1, -y_sign * x1)]
    coords = np.linspace(-0.95, 0.95, grid)
    seeds += [(float(a), float(b)) for a in coords for b in coords]
    return seeds


def stationary_points_general(
    e: EffectiveParams,
    seeds: list[tuple[float, float]] | None = None,
    return_diagnostics: bool = False,
):
    """Newton search from many seeds; deduplicated, classified stationary points.

    Handles asymmetric couplings (u_a != u_b, tau_a != tau_b) where no
    closed form exists.  Non-converged seeds are dropped but counted in
    the diagnostics; points within EDGE_MARGIN of |x| = 1 are rejected.
    """
    if seeds is None:
        seeds = default_seeds(e)
    found: list[tuple[float, float]] = []
    failures = 0
    for x0, y0 in seeds:
        x, y, _res, ok = newton_stationary_point(e, x0, y0)
        if not ok:
            failures += 1
            continue
        if abs(x) >= 1.0 - EDGE_MARGIN or abs(y) >= 1.0 - EDGE_MARGIN:
            failures += 1
            continue
        if any(math.hypot(x - a, y - b) < DEDUP_DIST for a, b in found):
            continue
        found.append((x, y))

    points = []
    for x, y in sorted(found, key=lambda t: (-t[0], -t[1])):
        if abs(x) < DEDUP_DIST and abs(y) < DEDUP_DIST:
            branch = UNIFORM
        else:
            branch = PLUS if x > 0.0 else MINUS
        points.append(_make_point(e, x, y, branch))
    points.sort(key=lambda pt: (pt.V_value, -pt.x))
    if return_diagnostics:
        return points, {"seeds": len(seeds), "failed_seeds": failures, "distinct": len(points)}
    return points


@dataclass(frozen=True)
class QuadraticForm:
    """Local oscillator data at a stationary point: V ~ constant + s_q q^2 + s_p p^2
    with kinetic term -mass_coeff (d^2/dq^2 + d^2/dp^2)."""

    constant: float
    stiffness_q: float
    stiffness_p: float
    mass_coeff: float

    @property
    def omega_q(self) -> float:
        return 2.0 * math.sqrt(self.mass_coeff * self.stiffness_q)

    @property
    def omega_p(self) -> float:
        return 2.0 * math.sqrt(self.mass_coeff * max(self.stiffness_p, 0.0))

    @property
    def width_q(self) -> float:
        """Gaussian standard-deviation-like width: width^2 = sqrt(mass/stiffness)."""
        return (self.mass_coeff / self.stiffness_q) ** 0.25

    @property
    def width_p(self) -> float:
        if self.stiffness_p <= 0.0:
            raise ValueError("flat p direction has no Gaussian width")
        return (self.mass_coeff / self.stiffness_p) ** 0.25


def quadratic_form(e: EffectiveParams, pt: StationaryPoint) -> QuadraticForm:
    """Closed-form quadratic expansion at the uniform point or a split minimum.

    Uniform point: stiffness_q = (u + 2 tau + w)/4, stiffness_p = (u + 2 tau - w)/4
    (signed w, so for attractive coupling the q mode is the soft one) with
    mass 2 tau eps^2.  Split minima (|w| > u + 2 tau): the hard/soft
    stiffnesses are (u + |w|)/4 + (|w| - u)^3/(16 tau^2) and
    (u - |w|)/4 + (|w| - u)^3/(16 tau^2), assigned to q/p for w > 0 and
    swapped for w < 0, with mass 4 tau^2 eps^2 / (|w| - u).  The constant
    is V at the point in every case.
    """
    u, tau = symmetric_couplings(e)
    if pt.kind == SADDLE:
        raise ValueError("no oscillator expansion at a saddle point")
    eps = e.eps_a
    aw = abs(e.w)
    if pt.branch == UNIFORM:
        return QuadraticForm(
            constant=pt.V_value,
            stiffness_q=0.25 * (u + 2.0 * tau + e.w),
            stiffness_p=0.25 * (u + 2.0 * tau - e.w),
            mass_coeff=2.0 * tau * eps * eps,
        )
    hard = 0.25 * (u + aw) + (aw - u) ** 3 / (16.0 * tau * tau)
    soft = 0.25 * (u - aw) + (aw - u) ** 3 / (16.0 * tau * tau)
    s_q, s_p = (hard, soft) if e.w > 0.0 else (soft, hard)
    return QuadraticForm(
        constant=pt.V_value,
        stiffness_q=s_q,
        stiffness_p=s_p,
        mass_coeff=4.0 * tau * tau * eps * eps / (aw - u),
    )


@dataclass(frozen=True)
class CVLevel:
    """Closed-form level E(n, m); strong-regime levels are exact doublets.

    k is only set on the quasicontinuous branch at the critical point.
    """

    n: int
    m: int
    energy: float
    regime: Regime
    degeneracy: int = 1
    k: float | None = None


def _ground_form(e: EffectiveParams) -> tuple[QuadraticForm, Regime]:
    regime = classify_regime(e)
    points = stationary_points_symmetric(e)
    pt = points[1] if regime.is_strong else points[0]
    return quadratic_form(e, pt), regime


def cv_levels(e: EffectiveParams, n_max: int, m_max: int) -> list[CVLevel]:
    """All E(n, m) for 0 <= n <= n_max, 0 <= m <= m_max, sorted ascending.

    E(n, m) = constant + omega_q (n + 1/2) + omega_p (m + 1/2) built on the
    regime's minimum; strong-regime entries carry degeneracy 2 (one level
    per symmetric minimum, degenerate at this order).
    """
    if n_max < 0 or m_max < 0:
        raise ValueError("quantum-number caps must be >= 0")
    regime = classify_regime(e)
    if regime.is_critical:
        raise ValueError("critical point has no harmonic ladder; use collapse_levels")
    form, _ = _ground_form(e)
    degeneracy = 2 if regime.is_strong else 1
    levels = [
        CVLevel(
            n=n,
            m=m,
            energy=form.constant + form.omega_q * (n + 0.5) + form.omega_p * (m + 0.5),
            regime=regime,
            degeneracy=degeneracy,
        )
        for n in range(n_max + 1)
        for m in range(m_max + 1)
    ]
    levels.sort(key=lambda lv: lv.energy)
    return levels


def collapse_levels(e: EffectiveParams, n_max: int, k_values) -> list[CVLevel]:
    """Critical-point spectrum: harmonic ladder in the hard mode plus the
    plane-wave branch, E(n, k) = u - tau - gamma + 2 sqrt(tau eps^2 (u + 2 tau))
    (n + 1/2) + 2 tau eps^2 k (repulsive side; the attractive side is shifted
    by -|w| per the exact reflection identity)."""
    regime = classify_regime(e)
    if not regime.is_critical:
        raise ValueError("collapse_levels requires the critical regime")
    u, tau = symmetric_couplings(e)
    eps = e.eps_a
    constant = u - tau - e.gamma
    if regime.is_attractive:
        constant -= abs(e.w)
    step = 2.0 * math.sqrt(tau * eps * eps * (u + 2.0 * tau))
    free = 2.0 * tau * eps * eps
    levels = [
        CVLevel(n=n, m=0, energy=constant + step * (n + 0.5) + free * k, regime=regime, k=float(k))
        for n in range(n_max + 1)
        for k in k_values
    ]
    levels.sort(key=lambda lv: lv.energy)
    return levels


def hermite(n: int, z):
    """Physicists' Hermite polynomial H_n(z) by the three-term recurrence."""
    if n < 0:
        raise ValueError("order must be >= 0")
    z = np.asarray(z, dtype=float)
    h_prev = np.ones_like(z)
    if n == 0:
        return h_prev if h_prev.ndim else float(h_prev)
    h = 2.0 * z
    for kk in range(1, n):
        h, h_prev = 2.0 * z * h - 2.0 * kk * h_prev, h
    return h if h.ndim else float(h)


@dataclass(frozen=True)
class CVEigenstate:
    """Hermite-Gauss state labels and widths (lam for the q mode, nu for p).

    In the strong regime the state is the parity combination
    (Phi+ + r Phi-)/sqrt2 of oscillators sitting at the two minima, which
    are offset by +-2|x1| along x - y (repulsive) or x + y (attractive).
    """

    n: int
    m: int
    lam: float
    nu: float
    regime: Regime
    parity: int | None = None
    x1_abs: float | None = None

    def __post_init__(self):
        if self.n < 0 or self.m < 0:
            raise ValueError("quantum numbers must be >= 0")
        if self.lam <= 0.0 or self.nu <= 0.0:
            raise ValueError("widths must be positive")
        if self.regime.is_strong:
            if self.parity not in (+1, -1):
                raise ValueError("strong-regime states need parity r = +1 or -1")
            if not self.x1_abs or self.x1_abs <= 0.0:
                raise ValueError("strong-regime states need the minima offset |x1|")
        elif self.parity is not None:
            raise ValueError("parity only applies to strong-regime doublets")


def cv_eigenstate(e: EffectiveParams, n: int, m: int, parity: int | None = None) -> CVEigenstate:
    """Build the closed-form eigenstate for the current regime."""
    form, regime = _ground_form(e)
    if regime.is_critical:
        raise ValueError("critical-point states are plane waves in the soft mode, not normalizable")
    if regime.is_strong:
        if parity is None:
            parity = +1
        u, tau = symmetric_couplings(e)
        x1 = math.sqrt(1.0 - (2.0 * tau / (abs(e.w) - u)) ** 2)
        return CVEigenstate(n=n, m=m, lam=form.width_q, nu=form.width_p,
                            regime=regime, parity=parity, x1_abs=x1)
    if parity is not None:
        raise ValueError("parity only applies to strong-regime doublets")
    return CVEigenstate(n=n, m=m, lam=form.width_q, nu=form.width_p, regime=regime)


def eigenfunction_density(e: EffectiveParams, state: CVEigenstate, basis: FockBasis) -> AmplitudeGrid:
    """|Psi|^2 sampled on the occupation lattice and renormalized to sum 1.

    Lattice: x_L = i/N_a, y_L = j/N_b with x = 2 x_L - 1, y = 2 y_L - 1 and
    q = (x + y)/sqrt2, p = (x - y)/sqrt2, so grids are directly comparable
    with exact |c_ij|^2 grids.
    """
    if round(1.0 / e.eps_a) != basis.N_a or round(1.0 / e.eps_b) != basis.N_b:
        raise ValueError("basis boson numbers do not match the effective parameters")
    regime = classify_regime(e)
    if regime.strength != state.regime.strength or regime.interaction_sign != state.regime.interaction_sign:
        raise ValueError(f"state built for {state.regime}, parameters are {regime}")

    x = 2.0 * np.arange(basis.N_a + 1) / basis.N_a - 1.0
    y = 2.0 * np.arange(basis.N_b + 1) / basis.N_b - 1.0
    X, Y = np.meshgrid(x, y, indexing="ij")
    rt2 = math.sqrt(2.0)
    q = (X + Y) / rt2
    p = (X - Y) / rt2

    if state.regime.is_strong:
        # oscillators at the two minima: offset 2|x1| along x-y (w>0) or x+y (w<0)
        shift = rt2 * state.x1_abs
        if state.regime.is_attractive:
            plus = _hermite_gauss(state, q - shift, p)
            minus = _hermite_gauss(state, q + shift, p)
        else:
            plus = _hermite_gauss(state, q, p - shift)
            minus = _hermite_gauss(state, q, p + shift)
        psi = (plus + state.parity * minus) / rt2
    else:
        psi = _hermite_gauss(state, q, p)

    flags: tuple[str, ...] = ()
    spacing = min(2.0 / basis.N_a, 2.0 / basis.N_b) / rt2
    if state.lam < spacing or state.nu < spacing:
        flags = ("width-underflow",)
    return AmplitudeGrid(psi**2, flags=flags)


def levels_to_csv(levels: list[CVLevel], stream) -> None:
    """CSV export: header "n,m,energy,degeneracy,regime"."""
    stream.write("n,m,energy,degeneracy,regime\n")
    for lv in levels:
        stream.write(f"{lv.n},{lv.m},{lv.energy:.15g},{lv.degeneracy},{lv.regime}\n")


def _hermite_gauss(state: CVEigenstate, q: np.ndarray, p: np.ndarray) -> np.ndarray:
    norm = math.sqrt(
        math.pi * state.lam * state.nu * 2.0 ** (state.n + state.m)
        * math.factorial(state.n) * math.factorial(state.m)
    )
    return (
        np.exp(-0.5 * ((q / state.lam) ** 2 + (p / state.nu) ** 2))
        * hermite(state.n, q / state.lam)
        * hermite(state.m, p / state.nu)
        / norm
    )
