"""Instantaneous eigenframes along a time grid and the geometric connection matrix.

The connection A_nm(t) = <v_n | i d/dt v_m> is computed either from
model-supplied analytic eigenvector derivatives or by second-order finite
differences of continuity-gauged numeric frames.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Callable, Optional

import numpy as np
from scipy.optimize import linear_sum_assignment

from .errors import EigenGapTooSmallError, NotHermitianError
from .numerics import HERMITICITY_RTOL, max_abs

GAP_FLOOR_RTOL = 1e-10
ORTHONORMALITY_TOL = 1e-10


@dataclass(frozen=True)
class TimeGrid:
    """Uniform grid of steps+1 sample times on [t_start, t_end] (hbar = 1 units)."""

    t_start: float
    t_end: float
    steps: int

    def __post_init__(self):
        if self.steps < 1:
            raise ValueError("steps must be a positive integer")
        if not self.t_end > self.t_start:
            raise ValueError("t_end must exceed t_start")

    @property
    def dt(self) -> float:
        return (self.t_end - self.t_start) / self.steps

    @property
    def times(self) -> np.ndarray:
        return np.linspace(self.t_start, self.t_end, self.steps + 1)

    def same_as(self, other: "TimeGrid") -> bool:
        return (
            self.t_start == other.t_start
            and self.t_end == other.t_end
            and self.steps == other.steps
        )


# An analytic frame callable maps t -> (energies (N,), eigenvector columns (N, N),
# eigenvector time-derivative columns (N, N)).
AnalyticFrame = Callable[[float], tuple[np.ndarray, np.ndarray, np.ndarray]]


@dataclass(frozen=True)
class HamiltonianSpec:
    """Time-dependent N x N Hermitian matrix, optionally with analytic eigenframes."""

    dim: int
    evaluate: Callable[[float], np.ndarray]
    analytic_frame: Optional[AnalyticFrame] = None


class Gauge(Enum):
    CONTINUITY = "continuity"
    MODEL_ANALYTIC = "model_analytic"


@dataclass(frozen=True)
class FrameTrajectory:
    """Gauge-fixed instantaneous eigenframes sampled on a time grid.

    vectors[k, :, n] is level n at grid time k; for MODEL_ANALYTIC frames
    vector_derivatives holds the matching d/dt columns.
    """

    grid: TimeGrid
    energies: np.ndarray
    vectors: np.ndarray
    gauge: Gauge
    vector_derivatives: Optional[np.ndarray] = None

    @property
    def dim(self) -> int:
        return self.energies.shape[1]


@dataclass(frozen=True)
class ConnectionMatrix:
    """Geometric connection A(t) sampled on the grid, shape (steps+1, N, N)."""

    grid: TimeGrid
    values: np.ndarray


def _check_gaps(energies: np.ndarray, scale: float) -> None:
    gaps = np.diff(np.sort(energies, axis=1), axis=1)
    floor = GAP_FLOOR_RTOL * scale
    if gaps.size and np.min(gaps) < floor:
        k = int(np.argmin(np.min(gaps, axis=1)))
        raise EigenGapTooSmallError(
            f"adjacent-level gap {np.min(gaps):.3e} below {floor:.3e} at grid index {k}"
        )


def _check_orthonormal(vectors: np.ndarray) -> None:
    eye = np.eye(vectors.shape[-1])
    defect = np.max(np.abs(np.einsum("kij,kil->kjl", vectors.conj(), vectors) - eye))
    if defect > ORTHONORMALITY_TOL:
        raise ValueError(f"frames not orthonormal: defect {defect:.3e}")


def build_frames(spec: HamiltonianSpec, grid: TimeGrid) -> FrameTrajectory:
    """Instantaneous eigenframes at every grid time.

    With model-supplied analytic frames they are taken verbatim. Otherwise
    each grid point is eigendecomposed and levels are matched to the previous
    frame by maximal overlap, with each eigenvector phase rotated so the
    overlap with its predecessor is real and non-negative (continuity gauge).

    Raises EigenGapTooSmallError when any adjacent-level gap falls below
    1e-10 * ||H||_max (level crossings are unsupported).
    """
    times = grid.times
    n = spec.dim

    if spec.analytic_frame is not None:
        energies = np.empty((len(times), n))
        vectors = np.empty((len(times), n, n), dtype=complex)
        derivs = np.empty((len(times), n, n), dtype=complex)
        for k, t in enumerate(times):
            e, v, dv = spec.analytic_frame(t)
            energies[k] = e
            vectors[k] = v
            derivs[k] = dv
        _check_orthonormal(vectors)
        _check_gaps(energies, float(np.max(np.abs(energies))))
        return FrameTrajectory(grid, energies, vectors, Gauge.MODEL_ANALYTIC, derivs)

    hams = np.empty((len(times), n, n), dtype=complex)
    for k, t in enumerate(times):
        hams[k] = spec.evaluate(t)
    scale = max_abs(hams)
    defect = np.max(np.abs(hams - hams.conj().transpose(0, 2, 1)))
    if defect > HERMITICITY_RTOL * scale:
        raise NotHermitianError(
            f"spec.evaluate not Hermitian on grid: defect {defect:.3e} vs scale {scale:.3e}"
        )

    energies, vectors = np.linalg.eigh(hams)
    _check_gaps(energies, scale)

    # Sequential continuity gauge: match levels by maximal overlap, then fix phases.
    for k in range(1, len(times)):
        overlap = vectors[k - 1].conj().T @ vectors[k]
        _, cols = linear_sum_assignment(-np.abs(overlap))
        vectors[k] = vectors[k][:, cols]
        energies[k] = energies[k][cols]
        diag = np.einsum("in,in->n", vectors[k - 1].conj(), vectors[k])
        mag = np.abs(diag)
        phase = np.where(mag > 0, diag / np.where(mag > 0, mag, 1.0), 1.0)
        vectors[k] = vectors[k] * phase.conj()

    return FrameTrajectory(grid, energies, vectors, Gauge.CONTINUITY)


def _time_derivative(vectors: np.ndarray, dt: float) -> np.ndarray:
    """Central differences inside, second-order one-sided stencils at the ends."""
    dv = np.empty_like(vectors)
    dv[1:-1] = (vectors[2:] - vectors[:-2]) / (2 * dt)
    dv[0] = (-3 * vectors[0] + 4 * vectors[1] - vectors[2]) / (2 * dt)
    dv[-1] = (3 * vectors[-1] - 4 * vectors[-2] + vectors[-3]) / (2 * dt)
    return dv


def connection(frames: FrameTrajectory) -> ConnectionMatrix:
    """Geometric connection A_nm(t) = <v_n(t) | i d/dt v_m(t)> on the frame grid."""
    if frames.grid.steps < 2:
        raise ValueError("connection needs at least 2 grid steps")
    if frames.gauge is Gauge.MODEL_ANALYTIC:
        dv = frames.vector_derivatives
    else:
        dv = _time_derivative(frames.vectors, frames.grid.dt)
    values = 1j * np.einsum("kin,kim->knm", frames.vectors.conj(), dv)
    return ConnectionMatrix(frames.grid, values)
