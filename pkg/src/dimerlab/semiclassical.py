"""Semiclassical dynamics of the dimer in imbalance/phase coordinates.

State is (x, y, theta_x, theta_y): the population imbalances and the
conjugate half phase differences (physics is periodic in theta mod pi).
The energy surface is

    H_s = (u_a/4)(1 + x^2) + (u_b/4)(1 + y^2) + (w/2)(1 + x y)
          - tau_a sqrt(1 - x^2) cos(2 theta_x)
          - tau_b sqrt(1 - y^2) cos(2 theta_y)

which equals the effective potential V plus gamma when both phases vanish.
Equations of motion (hbar = 1, bracket scale 1/N_k):

    N_a dtheta_x/dt = w y / 2 + u_a x / 2 + tau_a x cos(2 theta_x)/sqrt(1 - x^2)
    N_a dx/dt       = -2 tau_a sqrt(1 - x^2) sin(2 theta_x)

and the mirrored pair for (y, theta_y).  The sign of dx/dt is pinned by
requiring dH_s/dt = 0 to hold identically, which makes energy conservation
the ground truth the integrator is tested against.  Zero-phase fixed
points coincide with the stationary points of V.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .model import EffectiveParams, is_symmetric_case
from . import cv

__all__ = [
    "PhasePoint",
    "Trajectory",
    "fixed_points",
    "hamilton_rhs",
    "hs_energy",
    "integrate",
    "trajectory_to_csv",
    "wrap_angle",
]

# early-stop margin at the coordinate singularity |x| = 1
BOUNDARY_MARGIN = 1e-9


def wrap_angle(theta: float) -> float:
    """Reduce a phase to [0, pi)."""
    return theta % math.pi


@dataclass(frozen=True)
class PhasePoint:
    """Phase-space state; angles stored unwrapped (the physics is mod pi)."""

    x: float
    y: float
    theta_x: float = 0.0
    theta_y: float = 0.0

    def __post_init__(self):
        if abs(self.x) >= 1.0 or abs(self.y) >= 1.0:
            raise ValueError("imbalances must lie strictly inside (-1, 1)")


@dataclass(frozen=True)
class Trajectory:
    """Sampled orbit: times, states (x, y, theta_x, theta_y) and energies."""

    times: np.ndarray
    states: np.ndarray
    energies: np.ndarray
    dt: float
    scheme: str = "rk4"
    boundary_hit: bool = False
    max_rel_drift: float = field(default=0.0)

    def __len__(self) -> int:
        return len(self.times)

    def point(self, i: int) -> PhasePoint:
        x, y, tx, ty = self.states[i]
        return PhasePoint(x=x, y=y, theta_x=tx, theta_y=ty)


def hs_energy(e: EffectiveParams, pt: PhasePoint) -> float:
    return (
        0.25 * e.u_a * (1.0 + pt.x * pt.x)
        + 0.25 * e.u_b * (1.0 + pt.y * pt.y)
        + 0.5 * e.w * (1.0 + pt.x * pt.y)
        - e.tau_a * math.sqrt(1.0 - pt.x * pt.x) * math.cos(2.0 * pt.theta_x)
        - e.tau_b * math.sqrt(1.0 - pt.y * pt.y) * math.cos(2.0 * pt.theta_y)
    )


def hamilton_rhs(e: EffectiveParams, pt: PhasePoint) -> tuple[float, float, float, float]:
    """(dx/dt, dy/dt, dtheta_x/dt, dtheta_y/dt); see module docstring."""
    return _rhs(e, pt.x, pt.y, pt.theta_x, pt.theta_y)


def _rhs(e: EffectiveParams, x, y, tx, ty):
    N_a = 1.0 / e.eps_a
    N_b = 1.0 / e.eps_b
    sx = math.sqrt(1.0 - x * x)
    sy = math.sqrt(1.0 - y * y)
    xdot = -2.0 * e.tau_a * sx * math.sin(2.0 * tx) / N_a
    ydot = -2.0 * e.tau_b * sy * math.sin(2.0 * ty) / N_b
    txdot = (0.5 * e.w * y + 0.5 * e.u_a * x + e.tau_a * x * math.cos(2.0 * tx) / sx) / N_a
    tydot = (0.5 * e.w * x + 0.5 * e.u_b * y + e.tau_b * y * math.cos(2.0 * ty) / sy) / N_b
    return xdot, ydot, txdot, tydot


def integrate(
    e: EffectiveParams,
    start: PhasePoint,
    t_end: float,
    dt: float,
    sample_every: int = 1,
) -> Trajectory:
    """Fixed-step RK4 integration; stops early if |x| or |y| reaches 1 - 1e-9.

    Energy drift relative to the initial energy is monitored and stored; the
    fixed step keeps runs bit-reproducible.
    """
    if dt <= 0.0 or t_end <= 0.0:
        raise ValueError("dt and t_end must be positive")
    if sample_every < 1:
        raise ValueError("sample_every must be >= 1")
    n_steps = int(round(t_end / dt))

    x, y, tx, ty = start.x, start.y, start.theta_x, start.theta_y
    e0 = hs_energy(e, start)
    denom = max(1.0, abs(e0))

    times = [0.0]
    states = [(x, y, tx, ty)]
    energies = [e0]
    boundary_hit = False
    max_drift = 0.0
    half = 0.5 * dt
    sixth = dt / 6.0
    cap = 1.0 - BOUNDARY_MARGIN

    for step in range(1, n_steps + 1):
        try:
            k1 = _rhs(e, x, y, tx, ty)
            k2 = _rhs(e, x + half * k1[0], y + half * k1[1], tx + half * k1[2], ty + half * k1[3])
            k3 = _rhs(e, x + half * k2[0], y + half * k2[1], tx + half * k2[2], ty + half * k2[3])
            xe, ye = x + dt * k3[0], y + dt * k3[1]
            if abs(xe) >= cap or abs(ye) >= cap:
                boundary_hit = True
                break
            k4 = _rhs(e, xe, ye, tx + dt * k3[2], ty + dt * k3[3])
        except ValueError:  # an RK stage left the domain: treat as a boundary hit
            boundary_hit = True
            break
        x += sixth * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0])
        y += sixth * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1])
        tx += sixth * (k1[2] + 2.0 * k2[2] + 2.0 * k3[2] + k4[2])
        ty += sixth * (k1[3] + 2.0 * k2[3] + 2.0 * k3[3] + k4[3])
        if abs(x) >= cap or abs(y) >= cap:
            boundary_hit = True
            break
        if step % sample_every == 0 or step == n_steps:
            energy = hs_energy(e, PhasePoint(x, y, tx, ty))
            max_drift = max(max_drift, abs(energy - e0) / denom)
            times.append(step * dt)
            states.append((x, y, tx, ty))
            energies.append(energy)

    return Trajectory(
        times=np.array(times),
        states=np.array(states),
        energies=np.array(energies),
        dt=dt,
        boundary_hit=boundary_hit,
        max_rel_drift=max_drift,
    )


def fixed_points(e: EffectiveParams) -> list[PhasePoint]:
    """Zero-phase fixed points of the flow: the stationary points of V.

    Cross-checked so that the full right-hand side vanishes there.
    """
    if is_symmetric_case(e):
        stationary = cv.stationary_points_symmetric(e)
    else:
        stationary = cv.stationary_points_general(e)
    scale = e.tau_a + e.tau_b + max(e.u_a, e.u_b) + abs(e.w)
    points = []
    for pt in stationary:
        candidate = PhasePoint(x=pt.x, y=pt.y, theta_x=0.0, theta_y=0.0)
        rhs = hamilton_rhs(e, candidate)
        if max(abs(v) for v in rhs) > 1e-10 * scale:
            raise RuntimeError(f"stationary point ({pt.x}, {pt.y}) does not annul the flow")
        points.append(candidate)
    return points


def trajectory_to_csv(traj: Trajectory, stream) -> None:
    """CSV export: header "t,x,y,theta_x,theta_y,energy"."""
    stream.write("t,x,y,theta_x,theta_y,energy\n")
    for t, (x, y, tx, ty), en in zip(traj.times, traj.states, traj.energies):
        stream.write(f"{t:.15g},{x:.15g},{y:.15g},{tx:.15g},{ty:.15g},{en:.15g}\n")
