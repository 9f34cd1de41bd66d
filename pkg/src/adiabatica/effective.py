"""Effective Hamiltonian in the instantaneous basis and adiabaticity criteria.

The coefficient matrix is M_nm(t) = E_n(t) delta_nm - A_nm(t) (hbar = 1): the
instantaneous energies on the diagonal minus the geometric connection. Its
diagonal dominance is quantified by three worst-case-over-time ratios.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import GridMismatchError
from .spectral import ConnectionMatrix, FrameTrajectory, TimeGrid

DEGENERATE_DENOMINATOR = 1e-14


def accumulate_trapezoid(values: np.ndarray, dt: float) -> np.ndarray:
    """Cumulative trapezoid quadrature on a uniform grid; result[0] = 0."""
    out = np.zeros(len(values), dtype=np.result_type(values, float))
    np.cumsum((values[1:] + values[:-1]) * (dt / 2), out=out[1:])
    return out


@dataclass(frozen=True)
class EffectiveHamiltonian:
    """M(t) sampled per grid time, plus the frames and connection it came from."""

    grid: TimeGrid
    values: np.ndarray
    frames: FrameTrajectory
    connection: ConnectionMatrix


def build_effective(frames: FrameTrajectory, conn: ConnectionMatrix) -> EffectiveHamiltonian:
    """Assemble M_nm(t) = E_n delta_nm - A_nm at every grid point."""
    if not frames.grid.same_as(conn.grid):
        raise GridMismatchError("frames and connection use different grids")
    n = frames.dim
    values = -conn.values.copy()
    idx = np.arange(n)
    values[:, idx, idx] += frames.energies
    return EffectiveHamiltonian(frames.grid, values, frames, conn)


@dataclass(frozen=True)
class CriteriaReport:
    """Diagonal-dominance ratios with their worst-case witnesses.

    Each ratio is a global maximum of the off-diagonal connection magnitude
    over the grid divided by a global minimum denominator: bare level
    differences (r_naive), differences of the effective diagonal (r_gap), or
    magnitudes of the effective diagonal shifted by energy_offset (r_level).
    A verdict is True when its ratio is below epsilon. Denominators smaller
    than 1e-14 yield an infinite ratio and a False verdict.
    """

    r_naive: float
    r_gap: float
    r_level: float
    epsilon: float
    energy_offset: float
    verdicts: dict = field(default_factory=dict)
    witnesses: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "r_naive": self.r_naive,
            "r_gap": self.r_gap,
            "r_level": self.r_level,
            "epsilon": self.epsilon,
            "verdicts": dict(self.verdicts),
            "witnesses": self.witnesses,
            "energy_offset": self.energy_offset,
        }


def _argmin_witness(values: np.ndarray, times: np.ndarray, pairs: list) -> tuple[float, dict]:
    flat = int(np.argmin(values))
    k, p = divmod(flat, values.shape[1])
    return float(values[k, p]), {"time": float(times[k]), "levels": list(pairs[p])}


def criteria(
    eff: EffectiveHamiltonian, epsilon: float = 0.1, energy_offset: float = 0.0
) -> CriteriaReport:
    """Evaluate the naive and precise adiabaticity criteria for M(t).

    The numerator is max over grid times and level pairs n' != m' of
    |A_n'm'(t)|; each denominator is minimized over grid times and levels.
    energy_offset shifts only the r_level denominator, honoring the free
    choice of energy origin.
    """
    n = eff.frames.dim
    if n < 2:
        raise ValueError("criteria needs at least two levels")
    times = eff.grid.times
    A = eff.connection.values
    E = eff.frames.energies
    diag = np.einsum("kii->ki", eff.values)

    pairs = [(i, j) for i in range(n) for j in range(n) if i != j]
    pi = np.array([p[0] for p in pairs])
    pj = np.array([p[1] for p in pairs])

    offdiag = np.abs(A[:, pi, pj])
    flat = int(np.argmax(offdiag))
    k, p = divmod(flat, len(pairs))
    numerator = float(offdiag[k, p])
    witnesses = {"numerator": {"time": float(times[k]), "levels": list(pairs[p])}}

    naive_den, w = _argmin_witness(np.abs(E[:, pi] - E[:, pj]), times, pairs)
    witnesses["naive_denominator"] = w
    gap_den, w = _argmin_witness(np.abs(diag[:, pi] - diag[:, pj]), times, pairs)
    witnesses["gap_denominator"] = w
    level_den, w = _argmin_witness(
        np.abs(diag + energy_offset), times, [(i,) for i in range(n)]
    )
    witnesses["level_denominator"] = w

    def ratio(den: float) -> float:
        return numerator / den if den >= DEGENERATE_DENOMINATOR else float("inf")

    r_naive, r_gap, r_level = ratio(naive_den), ratio(gap_den), ratio(level_den)
    verdicts = {
        "naive": bool(r_naive < epsilon),
        "gap": bool(r_gap < epsilon),
        "level": bool(r_level < epsilon),
    }
    return CriteriaReport(
        r_naive=r_naive,
        r_gap=r_gap,
        r_level=r_level,
        epsilon=epsilon,
        energy_offset=energy_offset,
        verdicts=verdicts,
        witnesses=witnesses,
    )


def adiabatic_amplitude(
    frames: FrameTrajectory, conn: ConnectionMatrix, level: int
) -> np.ndarray:
    """Adiabatic-approximation amplitude v_n(t) exp{-i int [E_n - A_nn] dt'}.

    The phase integral uses trapezoid quadrature; the connection diagonal is
    real up to discretization noise, so its real part enters the phase.
    """
    dt = frames.grid.dt
    integrand = frames.energies[:, level] - conn.values[:, level, level].real
    phase = accumulate_trapezoid(integrand, dt)
    return frames.vectors[:, :, level] * np.exp(-1j * phase)[:, None]
