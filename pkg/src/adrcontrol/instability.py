"""Spatially homogeneous reaction model: steady state and explicit Euler demo.

For the ODE  dphi/dt = lam*exp(phi) - C  the steady state is
phi_s = ln(C/lam).  It is unstable: the reaction rate grows exponentially in
phi, so explicit Euler iterates started above phi_s race to overflow in a
handful of steps while iterates started below drift down monotonically.  The
trajectory helper records the blow-up honestly, in base-10 magnitude, instead
of propagating inf.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

from .errors import ConfigurationError

__all__ = ["ReactionParams", "TrajectoryEntry", "steady_state", "euler_iterate"]

_LOG10_E = math.log10(math.e)


@dataclass(frozen=True)
class ReactionParams:
    """Euler demo settings: phi_0 = steady state + dphi, then ``steps`` updates."""

    C: float = 1.0
    lam: float = 1.0
    dphi: float = 0.1
    dt: float = 1.0
    steps: int = 12

    def __post_init__(self):
        for name in ("C", "lam", "dt"):
            v = getattr(self, name)
            if not (isinstance(v, (int, float)) and math.isfinite(v) and v > 0.0):
                raise ConfigurationError(f"{name} must be a positive finite number")
        if not (isinstance(self.dphi, (int, float)) and math.isfinite(self.dphi)):
            raise ConfigurationError("dphi must be a finite number")
        if not isinstance(self.steps, int) or isinstance(self.steps, bool) or self.steps < 0:
            raise ConfigurationError("steps must be an integer >= 0")


@dataclass(frozen=True)
class TrajectoryEntry:
    """One Euler iterate: either a finite value or the overflow magnitude.

    Exactly one of ``phi`` and ``log10_magnitude`` is set.  When exp(phi)
    overflows, the doomed iterate is essentially lam*dt*exp(phi_prev), whose
    base-10 magnitude is phi_prev*log10(e) up to a few digits of prefactor;
    that leading-order magnitude is what gets recorded.
    """

    n: int
    phi: Optional[float]
    log10_magnitude: Optional[float] = None

    def __post_init__(self):
        if (self.phi is None) == (self.log10_magnitude is None):
            raise ValueError("exactly one of phi and log10_magnitude must be set")


def steady_state(C, lam):
    """Equilibrium phi_s = ln(C/lam) of dphi/dt = lam*exp(phi) - C."""
    if not (C > 0.0 and lam > 0.0):
        raise ConfigurationError("C and lam must be positive")
    return math.log(C / lam)


def euler_iterate(params):
    """Explicit Euler trajectory from phi_0 = phi_s + dphi.

    Returns the list of TrajectoryEntry starting at n = 0.  Iteration stops
    after the first overflow entry or after ``steps`` updates, whichever
    comes first.
    """
    phi = steady_state(params.C, params.lam) + params.dphi
    entries = [TrajectoryEntry(n=0, phi=phi)]
    for n in range(1, params.steps + 1):
        try:
            nxt = phi + params.dt * (params.lam * math.exp(phi) - params.C)
        except OverflowError:
            nxt = math.inf
        if not math.isfinite(nxt):
            entries.append(TrajectoryEntry(n=n, phi=None, log10_magnitude=phi * _LOG10_E))
            break
        entries.append(TrajectoryEntry(n=n, phi=nxt))
        phi = nxt
    return entries
