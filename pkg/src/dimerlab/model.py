"""Microscopic and effective parameters of the two-species boson dimer.

Two bosonic species (a and b) hop between a left and a right well with
amplitudes J_a, J_b, repel within each species with U_a, U_b >= 0, and
couple across species with a signed density-density interaction W.  The
boson numbers N_a, N_b are conserved, so everything downstream lives at
fixed (N_a, N_b).

Energy unit is J_a (set J_a = 1 by default); hbar = 1 throughout.

The large-N analytics do not see the microscopic couplings directly but
only the effective combinations

    u_k   = N_k^2 U_k        (intraspecies)
    tau_k = N_k J_k          (hopping)
    w     = W N_a N_b        (interspecies, signed)
    gamma = (U_a N_a + U_b N_b)/2
    eps_k = 1/N_k

In the symmetric case (u_a = u_b, tau_a = tau_b) the single number that
decides the ground-state structure is |w| versus u + 2*tau: below it the
populations are delocalized (weak regime), above it they localize
(strong regime), and equality is the critical point where the low-energy
spectrum collapses.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

__all__ = [
    "ATTRACTIVE",
    "CRITICAL",
    "CRITICAL_RTOL",
    "REPULSIVE",
    "STRONG",
    "SYMMETRY_RTOL",
    "WEAK",
    "EffectiveParams",
    "ModelParams",
    "Regime",
    "classify_regime",
    "critical_coupling",
    "effective_params",
    "is_symmetric_case",
]

# relative tolerance for detecting u_a = u_b, tau_a = tau_b
SYMMETRY_RTOL = 1e-12
# criticality window |{|w|} - (u + 2 tau)| <= CRITICAL_RTOL * (u + 2 tau)
CRITICAL_RTOL = 1e-9

REPULSIVE = "repulsive"
ATTRACTIVE = "attractive"
WEAK = "weak"
STRONG = "strong"
CRITICAL = "critical"

_CONFIG_KEYS = ("J_a", "J_b", "U_a", "U_b", "W", "N_a", "N_b")


@dataclass(frozen=True)
class ModelParams:
    """Microscopic couplings of the two-species dimer (energy unit J_a)."""

    N_a: int
    N_b: int
    J_a: float = 1.0
    J_b: float | None = None
    U_a: float = 0.0
    U_b: float | None = None
    W: float = 0.0

    def __post_init__(self):
        if self.J_b is None:
            object.__setattr__(self, "J_b", float(self.J_a))
        if self.U_b is None:
            object.__setattr__(self, "U_b", float(self.U_a))
        object.__setattr__(self, "N_a", _as_count(self.N_a, "N_a"))
        object.__setattr__(self, "N_b", _as_count(self.N_b, "N_b"))
        for name in ("J_a", "J_b", "U_a", "U_b", "W"):
            object.__setattr__(self, name, float(getattr(self, name)))
        if not (self.J_a > 0.0 and self.J_b > 0.0):
            raise ValueError("hopping amplitudes J_a, J_b must be positive")
        if self.U_a < 0.0 or self.U_b < 0.0:
            raise ValueError("intraspecies interactions U_a, U_b must be >= 0")

    @classmethod
    def twin(cls, N_total: int, J: float = 1.0, U: float = 0.0, W: float = 0.0) -> "ModelParams":
        """Twin species sharing one well pair: N_a = N_b = N_total/2, equal J and U."""
        if N_total % 2 != 0:
            raise ValueError("twin case needs an even total boson number")
        half = N_total // 2
        return cls(N_a=half, N_b=half, J_a=J, J_b=J, U_a=U, U_b=U, W=W)

    @classmethod
    def from_dict(cls, config: dict) -> "ModelParams":
        """Build from a JSON-style dict; missing J_b/U_b (and N_b) default to the species-a values."""
        unknown = set(config) - set(_CONFIG_KEYS)
        if unknown:
            raise ValueError(f"unknown parameter keys: {sorted(unknown)}")
        if "N_a" not in config:
            raise ValueError("config must provide N_a")
        return cls(
            N_a=config["N_a"],
            N_b=config.get("N_b", config["N_a"]),
            J_a=config.get("J_a", 1.0),
            J_b=config.get("J_b"),
            U_a=config.get("U_a", 0.0),
            U_b=config.get("U_b"),
            W=config.get("W", 0.0),
        )

    @classmethod
    def from_json(cls, text: str) -> "ModelParams":
        return cls.from_dict(json.loads(text))

    def replace_W(self, W: float) -> "ModelParams":
        return ModelParams(
            N_a=self.N_a, N_b=self.N_b, J_a=self.J_a, J_b=self.J_b,
            U_a=self.U_a, U_b=self.U_b, W=W,
        )

    @property
    def is_twin(self) -> bool:
        return (
            self.N_a == self.N_b
            and abs(self.J_a - self.J_b) <= SYMMETRY_RTOL * max(self.J_a, self.J_b)
            and abs(self.U_a - self.U_b) <= SYMMETRY_RTOL * max(self.U_a, self.U_b, 1e-300)
        )


@dataclass(frozen=True)
class EffectiveParams:
    """Effective couplings seen by the large-N (continuous-variable) analytics."""

    u_a: float
    u_b: float
    tau_a: float
    tau_b: float
    w: float
    gamma: float
    eps_a: float
    eps_b: float

    def __post_init__(self):
        if self.u_a < 0.0 or self.u_b < 0.0:
            raise ValueError("u_k must be >= 0")
        if not (self.tau_a > 0.0 and self.tau_b > 0.0):
            raise ValueError("tau_k must be positive")
        if not (self.eps_a > 0.0 and self.eps_b > 0.0):
            raise ValueError("eps_k must be positive")


@dataclass(frozen=True)
class Regime:
    """Interaction regime: sign of w and its strength relative to u + 2*tau."""

    interaction_sign: str
    strength: str

    def __post_init__(self):
        if self.interaction_sign not in (REPULSIVE, ATTRACTIVE):
            raise ValueError(f"bad interaction sign {self.interaction_sign!r}")
        if self.strength not in (WEAK, STRONG, CRITICAL):
            raise ValueError(f"bad strength {self.strength!r}")

    @property
    def is_weak(self) -> bool:
        return self.strength == WEAK

    @property
    def is_strong(self) -> bool:
        return self.strength == STRONG

    @property
    def is_critical(self) -> bool:
        return self.strength == CRITICAL

    @property
    def is_attractive(self) -> bool:
        return self.interaction_sign == ATTRACTIVE

    def __str__(self) -> str:
        return f"{self.interaction_sign}/{self.strength}"


def effective_params(p: ModelParams) -> EffectiveParams:
    """Map microscopic couplings to the effective ones (u_k, tau_k, w, gamma, eps_k)."""
    return EffectiveParams(
        u_a=p.N_a**2 * p.U_a,
        u_b=p.N_b**2 * p.U_b,
        tau_a=p.J_a * p.N_a,
        tau_b=p.J_b * p.N_b,
        w=p.W * p.N_a * p.N_b,
        gamma=(p.U_a * p.N_a + p.U_b * p.N_b) / 2.0,
        eps_a=1.0 / p.N_a,
        eps_b=1.0 / p.N_b,
    )


def is_symmetric_case(e: EffectiveParams, rtol: float = SYMMETRY_RTOL) -> bool:
    """True iff u_a = u_b and tau_a = tau_b within relative tolerance.

    Many distinct microscopic parameter sets land here: any rescaling with
    N_a^2 U_a = N_b^2 U_b and J_a N_a = J_b N_b qualifies, not just twins.
    """
    u_ok = abs(e.u_a - e.u_b) <= rtol * max(abs(e.u_a), abs(e.u_b), 1e-300)
    tau_ok = abs(e.tau_a - e.tau_b) <= rtol * max(e.tau_a, e.tau_b)
    return u_ok and tau_ok


def critical_coupling(p: ModelParams) -> float:
    """Critical interspecies coupling W_c = 4J/N + U for twin species (N = N_a + N_b).

    Equivalent to w = u + 2*tau in effective parameters.  Only the twin
    case has this closed form; non-twin parameters go through
    classify_regime on their effective couplings instead.
    """
    if not p.is_twin:
        raise ValueError("critical_coupling requires twin species (equal J, U, N)")
    return 4.0 * p.J_a / (p.N_a + p.N_b) + p.U_a


def classify_regime(e: EffectiveParams, crit_rtol: float = CRITICAL_RTOL) -> Regime:
    """Classify symmetric effective parameters as weak/strong/critical, repulsive/attractive."""
    if not is_symmetric_case(e):
        raise ValueError("classify_regime requires the symmetric case (u_a=u_b, tau_a=tau_b)")
    u, tau = e.u_a, e.tau_a
    threshold = u + 2.0 * tau
    sign = ATTRACTIVE if e.w < 0.0 else REPULSIVE
    if abs(abs(e.w) - threshold) <= crit_rtol * threshold:
        return Regime(sign, CRITICAL)
    if abs(e.w) < threshold:
        return Regime(sign, WEAK)
    return Regime(sign, STRONG)


def symmetric_couplings(e: EffectiveParams) -> tuple[float, float]:
    """Return (u, tau) after checking the symmetric case."""
    if not is_symmetric_case(e):
        raise ValueError("symmetric case required (u_a=u_b, tau_a=tau_b)")
    return e.u_a, e.tau_a


def _as_count(value, name: str) -> int:
    count = int(value)
    if count != value:
        raise ValueError(f"{name} must be an integer, got {value!r}")
    if count < 1:
        raise ValueError(f"{name} must be >= 1, got {count}")
    return count
