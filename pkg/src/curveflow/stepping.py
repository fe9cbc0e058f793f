"""Semi-implicit time stepping of the flowing-finite-volume curve system.

One step solves, for every node i with periodic wraparound,

    (X_i^{n+1} - X_i^n)/tau
        = 2/(d_i+d_{i+1}) * ( (X_{i+1}^{n+1}-X_i^{n+1})/d_{i+1}
                             - (X_i^{n+1}-X_{i-1}^{n+1})/d_i )
          + F^n * (X^perp_{i+1} - X^perp_{i-1})^n / (d_i+d_{i+1}),

with the segment lengths d_i, the forcing F and the normal term all lagged
at time n.  The implicit part makes each planar coordinate an M x M cyclic
tridiagonal system with strictly dominant matrix; both coordinates share
one factorization per step.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import NamedTuple

import numpy as np
from numpy.typing import NDArray
from scipy.linalg import solve_banded

from .errors import DegenerateSegmentError, LinearSolverError
from .flows import FlowModel, forcing_value
from .geometry import (
    EPSILON_GEOM,
    CurveState,
    discrete_curvature,
    enclosed_area,
    segment_lengths,
)

FloatArray = NDArray[np.float64]

#: A run is flagged extinct when the total length falls below this multiple
#: of the degeneracy threshold.
EXTINCTION_LENGTH_FACTOR = 100.0


@dataclass(frozen=True)
class SolverConfig:
    """Time-stepper parameters; ``model`` picks the normal-velocity law."""

    model: FlowModel
    t_final: float
    tau: float = 1e-4
    snapshot_every: int = 100
    epsilon_geom: float = EPSILON_GEOM

    def __post_init__(self):
        if not (np.isfinite(self.tau) and self.tau > 0):
            raise ValueError("tau > 0")
        if not (np.isfinite(self.t_final) and self.t_final >= 0):
            raise ValueError("t_final >= 0")
        if not (isinstance(self.snapshot_every, int) and self.snapshot_every >= 1):
            raise ValueError("snapshot_every >= 1")
        if not (np.isfinite(self.epsilon_geom) and self.epsilon_geom > 0):
            raise ValueError("epsilon_geom > 0")


class DiagnosticsRow(NamedTuple):
    t: float
    length: float
    area: float
    forcing: float
    isoperimetric_ratio: float
    uniformity_ratio: float
    min_segment: float


class TrajectoryStatus(Enum):
    COMPLETED = "completed"
    EXTINCT = "extinct"
    ABORTED = "aborted"


@dataclass
class Trajectory:
    """Time-ordered snapshots plus per-recorded-step scalar diagnostics."""

    snapshots: list[tuple[float, CurveState]]
    diagnostics: list[DiagnosticsRow]
    status: TrajectoryStatus = TrajectoryStatus.COMPLETED
    extinction_time: float | None = None
    error: str | None = None

    @property
    def final_time(self) -> float:
        return self.snapshots[-1][0]

    @property
    def final_state(self) -> CurveState:
        return self.snapshots[-1][1]

    @property
    def times(self) -> list[float]:
        return [t for t, _ in self.snapshots]


def solve_cyclic_tridiagonal(sub, diag, sup, corner_pair, rhs) -> FloatArray:
    """Solve a strictly diagonally dominant cyclic tridiagonal system.

    The matrix has bands ``sub`` (M-1 entries, below the diagonal), ``diag``
    (M entries) and ``sup`` (M-1 entries, above), plus the periodic corner
    entries ``corner_pair = (top_right, bottom_left)``.  ``rhs`` may be a
    vector of length M or an (M, k) stack of right-hand sides, all solved
    with one factorization.

    Uses a rank-one (Sherman-Morrison) correction of a plain tridiagonal
    solve.  Raises LinearSolverError on a dominance violation or when the
    arithmetic produces non-finite values.
    """
    diag = np.asarray(diag, dtype=np.float64)
    sub = np.asarray(sub, dtype=np.float64)
    sup = np.asarray(sup, dtype=np.float64)
    m = diag.shape[0]
    if m < 4:
        raise ValueError("system size must be >= 4")
    if sub.shape != (m - 1,) or sup.shape != (m - 1,):
        raise ValueError("sub and sup must have length M-1")
    alpha, beta = (float(c) for c in corner_pair)

    rhs = np.asarray(rhs, dtype=np.float64)
    if rhs.ndim not in (1, 2):
        raise ValueError("rhs must be a vector or a matrix of columns")
    single = rhs.ndim == 1
    b = rhs[:, None] if single else rhs
    if b.shape[0] != m:
        raise ValueError("rhs size does not match the system")

    off_sum = np.zeros(m)
    off_sum[0] = np.abs(sup[0]) + np.abs(alpha)
    off_sum[-1] = np.abs(sub[-1]) + np.abs(beta)
    off_sum[1:-1] = np.abs(sub[:-1]) + np.abs(sup[1:])
    # Strict dominance up to roundoff of the row sums: rows like 1 + |a| + |c|
    # with |a| ~ 1e16 compute a margin of exactly 0 even though the exact
    # matrix is strictly dominant.
    margin = np.abs(diag) - off_sum
    tol = 8.0 * np.finfo(np.float64).eps * (np.abs(diag) + off_sum)
    if not np.all(margin > -tol):
        raise LinearSolverError("matrix is not strictly diagonally dominant")

    bands = np.zeros((3, m))
    bands[0, 1:] = sup
    bands[2, :-1] = sub

    if alpha == 0.0 and beta == 0.0:
        bands[1, :] = diag
        x = solve_banded((1, 1), bands, b, check_finite=False)
    else:
        # A = T + u v^T with u = gamma*e_0 + beta*e_{M-1}, v = e_0 + (alpha/gamma)*e_{M-1}
        gamma = -diag[0]
        t_diag = diag.copy()
        t_diag[0] -= gamma
        t_diag[-1] -= alpha * beta / gamma
        bands[1, :] = t_diag
        u = np.zeros((m, 1))
        u[0, 0] = gamma
        u[-1, 0] = beta
        y = solve_banded((1, 1), bands, np.hstack([b, u]), check_finite=False)
        z = y[:, -1]
        y = y[:, :-1]
        denom = 1.0 + z[0] + (alpha / gamma) * z[-1]
        if not np.isfinite(denom) or abs(denom) < 1e-300:
            raise LinearSolverError("rank-one correction is singular")
        factor = (y[0, :] + (alpha / gamma) * y[-1, :]) / denom
        x = y - z[:, None] * factor[None, :]

    if not np.isfinite(x).all():
        raise LinearSolverError("solver produced non-finite values")
    return x[:, 0] if single else x


def step(curve: CurveState, config: SolverConfig) -> CurveState:
    """Advance the curve by one semi-implicit backward-Euler step.

    Geometry is recomputed from the input curve; raises
    DegenerateSegmentError when a segment is below config.epsilon_geom and
    LinearSolverError when the implicit solve fails.
    """
    nodes = curve.nodes
    d = segment_lengths(curve, config.epsilon_geom)
    d_next = np.roll(d, -1)
    span = d + d_next
    kappa = discrete_curvature(curve, d)
    force = forcing_value(config.model, kappa, d)

    tau = config.tau
    lower = -2.0 * tau / (span * d)       # couples X_{i-1}
    upper = -2.0 * tau / (span * d_next)  # couples X_{i+1}
    main = 1.0 - lower - upper

    chord = np.roll(nodes, -1, axis=0) - np.roll(nodes, 1, axis=0)
    normal_term = np.stack([chord[:, 1], -chord[:, 0]], axis=1) / span[:, None]
    rhs = nodes + (tau * force) * normal_term

    solution = solve_cyclic_tridiagonal(
        lower[1:], main, upper[:-1], (lower[0], upper[-1]), rhs
    )
    try:
        return CurveState(solution)
    except ValueError as exc:
        raise DegenerateSegmentError(f"step produced an invalid curve: {exc}") from exc


def _diagnostics_row(t: float, curve: CurveState, model: FlowModel) -> DiagnosticsRow:
    # Tolerant recording path: must not raise even for near-extinct or
    # clockwise states, hence the |area| in the isoperimetric ratio.
    nodes = curve.nodes
    d = np.linalg.norm(nodes - np.roll(nodes, 1, axis=0), axis=1)
    kappa = discrete_curvature(curve, d)
    length = float(np.sum(d))
    area = enclosed_area(curve)
    return DiagnosticsRow(
        t=t,
        length=length,
        area=area,
        forcing=forcing_value(model, kappa, d),
        isoperimetric_ratio=length * length / (4.0 * np.pi * abs(area)),
        uniformity_ratio=float(d.max() / d.min()),
        min_segment=float(d.min()),
    )


def evolve(initial: CurveState, config: SolverConfig) -> Trajectory:
    """Run the time loop from t=0 until t >= t_final (overshooting if needed).

    Snapshots and diagnostics are recorded at t=0, every
    ``config.snapshot_every`` steps, and at the final time.  A run whose
    total length falls below 100*epsilon_geom terminates cleanly as
    ``EXTINCT`` with the extinction time; degenerate-segment and
    linear-solver failures abort the run, keeping the last valid state as
    the final snapshot.
    """
    snapshots = [(0.0, initial)]
    diagnostics = [_diagnostics_row(0.0, initial, config.model)]
    trajectory = Trajectory(snapshots, diagnostics)

    extinction_length = EXTINCTION_LENGTH_FACTOR * config.epsilon_geom
    if diagnostics[0].length < extinction_length:
        trajectory.status = TrajectoryStatus.EXTINCT
        trajectory.extinction_time = 0.0
        return trajectory
    if config.t_final == 0.0:
        return trajectory

    n_steps = math.ceil(config.t_final / config.tau - 1e-9)
    state = initial
    recorded_step = 0
    for k in range(1, n_steps + 1):
        try:
            state = step(state, config)
        except (DegenerateSegmentError, LinearSolverError) as exc:
            trajectory.status = TrajectoryStatus.ABORTED
            trajectory.error = str(exc)
            if recorded_step != k - 1:  # keep the last valid state on record
                t_prev = (k - 1) * config.tau
                snapshots.append((t_prev, state))
                diagnostics.append(_diagnostics_row(t_prev, state, config.model))
            return trajectory
        t = k * config.tau

        gaps = np.linalg.norm(state.nodes - np.roll(state.nodes, 1, axis=0), axis=1)
        extinct = float(np.sum(gaps)) < extinction_length
        if extinct or k % config.snapshot_every == 0 or k == n_steps:
            snapshots.append((t, state))
            diagnostics.append(_diagnostics_row(t, state, config.model))
            recorded_step = k
        if extinct:
            trajectory.status = TrajectoryStatus.EXTINCT
            trajectory.extinction_time = t
            return trajectory
    return trajectory
