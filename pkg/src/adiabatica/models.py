"""Built-in two-level model Hamiltonians with analytic eigenframes.

All energies are angular frequencies (hbar = 1). Level index 0 carries each
model's conventional "+" label: for the rotating-field model that is the
spin-aligned state with energy -mu_B, for the driven two-axis model it is the
upper level +|R(t)|.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .propagation import stepping_propagators
from .spectral import HamiltonianSpec, TimeGrid

SIGMA_X = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
SIGMA_Y = np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex)
SIGMA_Z = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex)


def _dot_sigma(r: np.ndarray) -> np.ndarray:
    return r[0] * SIGMA_X + r[1] * SIGMA_Y + r[2] * SIGMA_Z


@dataclass(frozen=True)
class RotatingModelParams:
    """Spin in a magnetic field of fixed polar angle rotating uniformly about z.

    mu_B is the product of moment and field strength (angular frequency),
    theta the cone angle in (0, pi), omega the nonzero drive frequency.
    """

    mu_B: float
    theta: float
    omega: float

    def __post_init__(self):
        if not self.mu_B > 0:
            raise ValueError("mu_B must be positive")
        if not 0 < self.theta < math.pi:
            raise ValueError("theta must lie in (0, pi)")
        if self.omega == 0:
            raise ValueError("omega must be nonzero")

    @property
    def period(self) -> float:
        return 2 * math.pi / abs(self.omega)


def mixing_angle(params: RotatingModelParams) -> float:
    """Constant frame-mixing angle that diagonalizes the effective Hamiltonian.

    alpha = atan2(omega sin theta, 2 mu_B + omega cos theta), the branch
    continuous in omega with alpha(0) = 0; it satisfies
    2 mu_B sin(alpha) = omega sin(theta - alpha).
    """
    return math.atan2(
        params.omega * math.sin(params.theta),
        2 * params.mu_B + params.omega * math.cos(params.theta),
    )


def rotating_model(params: RotatingModelParams) -> HamiltonianSpec:
    """H(t) = -mu_B * (unit field direction(t) . sigma), with analytic frames."""
    muB, theta, omega = params.mu_B, params.theta, params.omega
    ct, st = math.cos(theta), math.sin(theta)
    ch, sh = math.cos(theta / 2), math.sin(theta / 2)

    def evaluate(t: float) -> np.ndarray:
        phi = omega * t
        direction = np.array([st * math.cos(phi), st * math.sin(phi), ct])
        return -muB * _dot_sigma(direction)

    def frame(t: float):
        e = np.exp(-1j * omega * t)
        vectors = np.array([[ch * e, sh * e], [sh, -ch]])
        derivs = np.array([[-1j * omega * ch * e, -1j * omega * sh * e], [0.0, 0.0]])
        return np.array([-muB, muB]), vectors, derivs

    return HamiltonianSpec(dim=2, evaluate=evaluate, analytic_frame=frame)


def _mixed_frame(params: RotatingModelParams, alpha: float, t: float) -> np.ndarray:
    half = (params.theta - alpha) / 2
    e = np.exp(-1j * params.omega * t)
    return np.array(
        [[math.cos(half) * e, math.sin(half) * e], [math.sin(half), -math.cos(half)]]
    )


def _mixed_energies(params: RotatingModelParams, alpha: float) -> np.ndarray:
    muB, omega = params.mu_B, params.omega
    c = math.cos(params.theta - alpha)
    return np.array(
        [
            -muB * math.cos(alpha) - (omega / 2) * (1 + c),
            +muB * math.cos(alpha) - (omega / 2) * (1 - c),
        ]
    )


def rotating_exact_solution(
    params: RotatingModelParams, level: int, t: float, alpha: Optional[float] = None
) -> np.ndarray:
    """Closed-form solution of the rotating-field Schroedinger equation.

    The state is the constant-mixing-angle frame vector times a constant-rate
    phase; exact for all drive speeds. Passing alpha overrides the solved
    mixing angle (useful for limit studies).
    """
    if alpha is None:
        alpha = mixing_angle(params)
    w = _mixed_frame(params, alpha, t)[:, level]
    return w * np.exp(-1j * _mixed_energies(params, alpha)[level] * t)


def rotating_exact_derivative(
    params: RotatingModelParams, level: int, t: float, alpha: Optional[float] = None
) -> np.ndarray:
    """Analytic d/dt of rotating_exact_solution."""
    if alpha is None:
        alpha = mixing_angle(params)
    w = _mixed_frame(params, alpha, t)[:, level]
    wdot = w * np.array([-1j * params.omega, 0.0])
    energy = _mixed_energies(params, alpha)[level]
    return (wdot - 1j * energy * w) * np.exp(-1j * energy * t)


def rotating_geometric_phase(params: RotatingModelParams, level: int = 0) -> float:
    """Geometric part of the exact phase accumulated over one drive period.

    Equals pi * (1 +/- cos(theta - alpha)): the Berry value pi (1 +/- cos theta)
    in the slow-drive limit and 0 mod 2*pi in the fast-drive limit.
    """
    c = math.cos(params.theta - mixing_angle(params))
    sign = 1.0 if level == 0 else -1.0
    return math.pi * (1 + sign * c)


def rotating_dynamical_phase(params: RotatingModelParams, level: int = 0) -> float:
    """Dynamical part of the exact phase accumulated over one drive period."""
    sign = 1.0 if level == 0 else -1.0
    return -sign * params.mu_B * math.cos(mixing_angle(params)) * params.period


def barred_model(base: HamiltonianSpec, grid: TimeGrid) -> HamiltonianSpec:
    """Reversed-conjugated dynamics -U(t)^dag H(t) U(t) over a stored stepping run.

    U is accumulated at half steps of the grid so the returned spec can be
    evaluated both at grid points and at the midpoints the integrator uses;
    other times raise ValueError. When the base supplies analytic frames, the
    returned spec does too: vectors U^dag v_n with energies -E_n.
    """
    half_grid = TimeGrid(grid.t_start, grid.t_end, 2 * grid.steps)
    table = stepping_propagators(base, half_grid)
    half_dt = half_grid.dt

    def locate(t: float) -> int:
        j = round((t - grid.t_start) / half_dt)
        if not 0 <= j <= half_grid.steps or abs(
            grid.t_start + j * half_dt - t
        ) > 1e-9 * max(1.0, abs(t)):
            raise ValueError(f"time {t} is outside the stored propagator table")
        return j

    def evaluate(t: float) -> np.ndarray:
        U = table[locate(t)]
        return -U.conj().T @ base.evaluate(t) @ U

    frame = None
    if base.analytic_frame is not None:

        def frame(t: float):
            energies, vectors, derivs = base.analytic_frame(t)
            U = table[locate(t)]
            barred_vectors = U.conj().T @ vectors
            # d/dt (U^dag v_n) = i E_n U^dag v_n + U^dag dv_n/dt
            barred_derivs = U.conj().T @ (1j * vectors * energies + derivs)
            return -energies, barred_vectors, barred_derivs

    return HamiltonianSpec(dim=base.dim, evaluate=evaluate, analytic_frame=frame)


@dataclass(frozen=True)
class MSSecondModelParams:
    """Two-level model with drive 2*pi/tau and fast internal frequency omega_0.

    The published regime ties them as omega_0 = 2 n omega; pass regime_n to
    enforce that relation.
    """

    omega_0: float
    tau: float
    regime_n: Optional[int] = None

    def __post_init__(self):
        if not self.omega_0 > 0:
            raise ValueError("omega_0 must be positive")
        if not self.tau > 0:
            raise ValueError("tau must be positive")
        if self.regime_n is not None:
            expected = 2 * self.regime_n * self.omega
            if not math.isclose(self.omega_0, expected, rel_tol=1e-12):
                raise ValueError(
                    f"omega_0 = {self.omega_0} does not equal 2 * n * omega = {expected}"
                )

    @property
    def omega(self) -> float:
        return 2 * math.pi / self.tau

    @classmethod
    def from_regime(cls, n: int, tau: float) -> "MSSecondModelParams":
        return cls(omega_0=2 * n * (2 * math.pi / tau), tau=tau, regime_n=n)


def _ms_field(params: MSSecondModelParams, t: float) -> tuple[np.ndarray, np.ndarray]:
    """Field vector R(t) and its analytic time derivative."""
    w0, w = params.omega_0, params.omega
    s2, c2 = math.sin(2 * w0 * t), math.cos(2 * w0 * t)
    s, c = math.sin(w * t), math.cos(w * t)
    r = np.array(
        [
            w0 * c - 0.5 * w * s * s2,
            w0 * s + 0.5 * w * c * s2,
            w * math.sin(w0 * t) ** 2,
        ]
    )
    rdot = np.array(
        [
            -w0 * w * s - 0.5 * w * (w * c * s2 + 2 * w0 * s * c2),
            w0 * w * c + 0.5 * w * (-w * s * s2 + 2 * w0 * c * c2),
            w * w0 * s2,
        ]
    )
    return r, rdot


def ms_second_model(params: MSSecondModelParams) -> HamiltonianSpec:
    """H(t) = R(t) . sigma with |R| = sqrt(omega_0^2 + omega^2 sin^2(omega_0 t)).

    Analytic frames come from the spherical angles of R(t) (azimuth taken
    continuously in t through its derivative), with energies +/-|R(t)|.
    """

    def evaluate(t: float) -> np.ndarray:
        r, _ = _ms_field(params, t)
        return _dot_sigma(r)

    def frame(t: float):
        r, rdot = _ms_field(params, t)
        rn = float(np.linalg.norm(r))
        rndot = float(r @ rdot) / rn
        rho = math.hypot(r[0], r[1])  # >= omega_0 > 0, no polar singularity
        big_theta = math.acos(r[2] / rn)
        theta_dot = (r[2] * rndot - rdot[2] * rn) / (rn * rn * (rho / rn))
        phi = math.atan2(r[1], r[0])
        phi_dot = (r[0] * rdot[1] - r[1] * rdot[0]) / (rho * rho)

        e = np.exp(-1j * phi)
        ch, sh = math.cos(big_theta / 2), math.sin(big_theta / 2)
        vectors = np.array([[ch * e, sh * e], [sh, -ch]])
        derivs = np.array(
            [
                [
                    (-0.5 * theta_dot * sh - 1j * phi_dot * ch) * e,
                    (0.5 * theta_dot * ch - 1j * phi_dot * sh) * e,
                ],
                [0.5 * theta_dot * ch, 0.5 * theta_dot * sh],
            ]
        )
        return np.array([rn, -rn]), vectors, derivs

    return HamiltonianSpec(dim=2, evaluate=evaluate, analytic_frame=frame)


def ms_candidate_evolution(
    params: MSSecondModelParams,
    t2: float,
    t1: float,
    fixed_direction: Optional[np.ndarray] = None,
) -> np.ndarray:
    """Two-time candidate evolution exp{-i omega_0 (t2-t1) n(t2-t1) . sigma}.

    The published form depends only on the elapsed time, with the in-plane
    axis n(s) = (cos(omega s), sin(omega s), 0); that reading is exactly what
    the composition-law check interrogates. fixed_direction freezes the axis
    to a constant unit vector instead.
    """
    s = t2 - t1
    if fixed_direction is None:
        axis = np.array([math.cos(params.omega * s), math.sin(params.omega * s), 0.0])
    else:
        axis = np.asarray(fixed_direction, dtype=float)
        axis = axis / np.linalg.norm(axis)
    angle = params.omega_0 * s
    return math.cos(angle) * np.eye(2, dtype=complex) - 1j * math.sin(angle) * _dot_sigma(axis)
