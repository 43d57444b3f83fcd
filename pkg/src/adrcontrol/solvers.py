"""Explicit time stepping for the state, adjoint, and perturbation systems.

All three solvers march the same five-point explicit stencil; they differ in
the sign of the advection term, the direction of time, and the source terms.
Arrays carry two ghost rows (spatial index -1 and H+1) that close the
Neumann-type boundary conditions, so a field over nodes j = 0..H is stored in
rows 1..H+1 of an array with H+3 rows.

State trajectory, forward in time, n = 0..N:

    y[j, n+1] = y[j, n] + dt*( mu*(y[j+1,n] - 2y[j,n] + y[j-1,n])/h^2
                               - eps*(y[j+1,n] - y[j,n])/h + y[j, n] ) + source

The boundary flux controls enter only through the ghost fill
y[-1, n] = y[0, n] + (h/mu)*v[0, n] and y[H+1, n] = y[H, n] + (h/mu)*v[M, n].
Each interior control k contributes dt*v[k, n]/h at its node, the grid form
of a point source of strength v[k, n].

Adjoint trajectory, backward from p[., N] = k2*y[., N+1]:

    p[j, n-1] = p[j, n] + dt*( mu*(p[j+1,n] - 2p[j,n] + p[j-1,n])/h^2
                               + eps*(p[j+1,n] - p[j,n])/h + p[j, n] + k1*y[j, n] )

with ghost fill p[-1, n] = mu*p[0, n]/(mu - eps*h) and
p[H+1, n] = (mu - eps*h)*p[H, n]/mu, filled for every stored level including
n = 0.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .discretization import control_indices
from .errors import SolverBlowUpError

__all__ = [
    "BLOWUP_LIMIT",
    "ControlField",
    "StateField",
    "AdjointField",
    "solve_state",
    "solve_adjoint",
    "solve_perturbation",
]

# Magnitudes beyond this abort the march; far above any meaningful solution
# yet far below float overflow, so the guard fires before inf/nan spread.
BLOWUP_LIMIT = 1e150


@dataclass(frozen=True)
class ControlField:
    """Control samples values[k, n] for signals k = 0..M at times n = 0..N."""

    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.ndim != 2 or v.shape[0] < 2 or v.shape[1] < 1:
            raise ValueError(f"control array must be (M+1, N+1), got shape {v.shape}")
        if not np.all(np.isfinite(v)):
            raise ValueError("control values must be finite")
        object.__setattr__(self, "values", v)

    @classmethod
    def zeros(cls, grid):
        return cls(np.zeros((grid.M + 1, grid.N + 1)))


@dataclass(frozen=True)
class StateField:
    """State trajectory with ghost rows: values is (H+3, N+2).

    Row r holds spatial node j = r - 1; rows 0 and H+2 are the ghost nodes.
    Columns are time levels n = 0..N+1.  Ghost columns are filled for n <= N,
    the levels at which the scheme actually reads them; the final column has
    zero ghosts.
    """

    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.ndim != 2 or v.shape[0] < 4 or v.shape[1] < 2:
            raise ValueError(f"state array must be (H+3, N+2), got shape {v.shape}")
        object.__setattr__(self, "values", v)

    @property
    def interior(self):
        """View of the physical nodes j = 0..H, shape (H+1, N+2)."""
        return self.values[1:-1, :]

    @property
    def terminal(self):
        """Final time level over physical nodes, shape (H+1,)."""
        return self.values[1:-1, -1]

    @property
    def left_ghost(self):
        return self.values[0, :]

    @property
    def right_ghost(self):
        return self.values[-1, :]


@dataclass(frozen=True)
class AdjointField:
    """Adjoint trajectory with ghost rows: values is (H+3, N+1).

    Same row layout as StateField; columns are time levels n = 0..N and the
    ghost rows are filled at every level.
    """

    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.ndim != 2 or v.shape[0] < 4 or v.shape[1] < 1:
            raise ValueError(f"adjoint array must be (H+3, N+1), got shape {v.shape}")
        object.__setattr__(self, "values", v)

    @property
    def interior(self):
        return self.values[1:-1, :]

    @property
    def left_ghost(self):
        return self.values[0, :]

    @property
    def right_ghost(self):
        return self.values[-1, :]


def _checked_controls(grid, control):
    v = control.values
    expected = (grid.M + 1, grid.N + 1)
    if v.shape != expected:
        raise ValueError(f"control field shape {v.shape} does not match grid {expected}")
    return v


def solve_state(problem, y0, control):
    """March the controlled state forward and return the full trajectory.

    Parameters
    ----------
    problem : DiscreteProblem
    y0 : array_like, shape (H+1,)
        Initial state at the physical nodes.
    control : ControlField
        Boundary fluxes (signals 0 and M) and interior sources (1..M-1).

    Returns
    -------
    StateField
        Trajectory over n = 0..N+1 including ghost rows.

    Raises
    ------
    SolverBlowUpError
        If any node magnitude exceeds BLOWUP_LIMIT; the exception carries the
        offending time step.
    """
    g, p = problem.grid, problem.phys
    H, N, M = g.H, g.N, g.M
    h, dt = g.h, g.dt
    mu, eps = p.mu, p.eps

    y0 = np.asarray(y0, dtype=float)
    if y0.shape != (H + 1,):
        raise ValueError(f"initial state must have shape ({H + 1},), got {y0.shape}")
    if not np.all(np.isfinite(y0)):
        raise ValueError("initial state must be finite")
    v = _checked_controls(g, control)
    interior_nodes = np.asarray(control_indices(g)[1:-1], dtype=int)

    # Time-major work array: work[n, r] with r the ghosted spatial index.
    work = np.zeros((N + 2, H + 3))
    work[0, 1:-1] = y0
    for n in range(N + 1):
        row = work[n]
        row[0] = row[1] + (h / mu) * v[0, n]
        row[-1] = row[-2] + (h / mu) * v[M, n]
        diffusion = (row[2:] - 2.0 * row[1:-1] + row[:-2]) / h**2
        advection = (row[2:] - row[1:-1]) / h
        nxt = row[1:-1] + dt * (mu * diffusion - eps * advection + row[1:-1])
        if interior_nodes.size:
            nxt[interior_nodes] += (dt / h) * v[1:M, n]
        if not np.all(np.abs(nxt) <= BLOWUP_LIMIT):
            raise SolverBlowUpError(step=n + 1)
        work[n + 1, 1:-1] = nxt
    return StateField(work.T)


def solve_adjoint(problem, state):
    """March the adjoint backward from the terminal state penalty.

    The terminal condition is p[., N] = k2 * y[., N+1]; the running penalty
    k1 * y[., n] acts as a source while stepping from level n to n - 1.

    Parameters
    ----------
    problem : DiscreteProblem
    state : StateField
        Trajectory produced by solve_state on the same problem.

    Returns
    -------
    AdjointField
    """
    g, p = problem.grid, problem.phys
    H, N = g.H, g.N
    h, dt = g.h, g.dt
    mu, eps = p.mu, p.eps
    k1, k2 = p.k1, p.k2

    y = state.values
    if y.shape != (H + 3, N + 2):
        raise ValueError(f"state shape {y.shape} does not match grid ({H + 3}, {N + 2})")

    left_gain = mu / (mu - eps * h)
    right_gain = (mu - eps * h) / mu

    work = np.zeros((N + 1, H + 3))
    work[N, 1:-1] = k2 * y[1:-1, N + 1]
    for n in range(N, 0, -1):
        row = work[n]
        row[0] = left_gain * row[1]
        row[-1] = right_gain * row[-2]
        diffusion = (row[2:] - 2.0 * row[1:-1] + row[:-2]) / h**2
        advection = (row[2:] - row[1:-1]) / h
        prev = row[1:-1] + dt * (mu * diffusion + eps * advection + row[1:-1] + k1 * y[1:-1, n])
        if not np.all(np.abs(prev) <= BLOWUP_LIMIT):
            raise SolverBlowUpError(step=n - 1)
        work[n - 1, 1:-1] = prev
    work[0, 0] = left_gain * work[0, 1]
    work[0, -1] = right_gain * work[0, -2]
    return AdjointField(work.T)


def solve_perturbation(problem, control):
    """State response to a control increment from a zero initial state.

    The scheme is linear, so this is solve_state with y0 = 0; having it as a
    named operation keeps optimizer code close to its derivation.
    """
    return solve_state(problem, np.zeros(problem.grid.H + 1), control)
