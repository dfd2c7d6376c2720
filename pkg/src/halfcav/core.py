"""Shared domain types and numerical primitives.

Everything downstream works in natural units: the free-space atomic decay
rate gamma0 sets the unit of inverse time and the speed of light is 1, so
lengths and times share a unit and mirror displacements are reported as
fractions of the transition wavelength.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

TWO_PI = 2.0 * math.pi

# An envelope counts as normalized when |∫|xi|^2 dt - 1| is below this.
NORM_TOL = 1e-9


@dataclass(frozen=True)
class MemoryConfig:
    """Physical constants of the atom-mirror system.

    gamma_prime + gamma_p must equal gamma0 (decay into the uncovered
    environment plus decay into the mirror-covered pulse mode).  The default
    memory mode covers the full solid angle: gamma_prime = 0, gamma_p = gamma0.

    The round trip tau = 2L/c is rounded to the nearest value with
    omega_a * tau an integer multiple of 2*pi, so that the mirror rest
    position l = 0 puts the atom exactly at a node of the standing wave.
    The rounding offset is kept in ``tau_adjustment``.
    """

    gamma0: float = 1.0
    gamma_prime: float = 0.0
    omega_a: float = 500.0
    tau: float = TWO_PI * 5.0 / 500.0
    markov_limit: float = 0.1
    tau_adjustment: float = field(default=0.0, compare=False)

    def __post_init__(self):
        if self.gamma0 <= 0:
            raise ValueError("gamma0 must be positive")
        if not 0.0 <= self.gamma_prime <= self.gamma0:
            raise ValueError("gamma_prime must lie in [0, gamma0]")
        if self.omega_a <= 0:
            raise ValueError("omega_a must be positive")
        if self.tau <= 0:
            raise ValueError("tau must be positive")
        # Snap omega_a*tau to a multiple of 2*pi (node at rest position).
        cycles = max(1, round(self.omega_a * self.tau / TWO_PI))
        tau_commensurate = TWO_PI * cycles / self.omega_a
        object.__setattr__(self, "tau_adjustment", tau_commensurate - self.tau)
        object.__setattr__(self, "tau", tau_commensurate)
        if self.gamma0 * self.tau > self.markov_limit:
            raise ValueError(
                f"gamma0*tau = {self.gamma0 * self.tau:.3g} exceeds the Markov "
                f"limit {self.markov_limit}; shorten the round trip"
            )

    @property
    def gamma_p(self) -> float:
        """Decay rate into the pulse mode, gamma0 - gamma_prime."""
        return self.gamma0 - self.gamma_prime

    @property
    def cap(self) -> float:
        """Largest attainable decay rate, 2*gamma0 (atom at an antinode)."""
        return 2.0 * self.gamma0

    @property
    def wavelength(self) -> float:
        """Transition wavelength 2*pi*c/omega_a in natural units (c = 1)."""
        return TWO_PI / self.omega_a


@dataclass(frozen=True)
class TimeGrid:
    """Uniform time grid with n samples on [t_start, t_end]."""

    t_start: float
    t_end: float
    n: int

    def __post_init__(self):
        if self.n < 2:
            raise ValueError("grid needs at least two samples")
        if not self.t_end > self.t_start:
            raise ValueError("t_end must exceed t_start")

    @property
    def dt(self) -> float:
        return (self.t_end - self.t_start) / (self.n - 1)

    @cached_property
    def times(self) -> np.ndarray:
        t = np.linspace(self.t_start, self.t_end, self.n)
        t.setflags(write=False)
        return t

    def index_of(self, t: float) -> int:
        """Nearest grid index for time t (t must lie on the grid span)."""
        if t < self.t_start - 0.5 * self.dt or t > self.t_end + 0.5 * self.dt:
            raise ValueError(f"t={t} outside grid [{self.t_start}, {self.t_end}]")
        return int(round((t - self.t_start) / self.dt))


def _freeze(a: np.ndarray) -> np.ndarray:
    a = np.asarray(a)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class ComplexEnvelope:
    """Sampled complex temporal envelope xi(t) on a uniform grid.

    Amplitudes carry units of gamma0^(1/2) so that ∫|xi|^2 dt is a
    dimensionless (photon-number) weight.  ``carrier_phase`` records the
    constant phase factor split off when an emitted envelope is returned in
    the frame rotating at the atomic frequency.
    """

    grid: TimeGrid
    samples: np.ndarray
    carrier_phase: complex = 1.0

    def __post_init__(self):
        samples = np.asarray(self.samples, dtype=np.complex128)
        if samples.shape != (self.grid.n,):
            raise ValueError(
                f"expected {self.grid.n} samples, got shape {samples.shape}"
            )
        if not np.all(np.isfinite(samples.view(np.float64))):
            raise ValueError("envelope samples must be finite")
        object.__setattr__(self, "samples", _freeze(samples))

    @property
    def is_normalized(self) -> bool:
        return abs(squared_norm(self) - 1.0) < NORM_TOL

    def with_samples(self, samples: np.ndarray) -> "ComplexEnvelope":
        return ComplexEnvelope(self.grid, samples, self.carrier_phase)


def cumtrapz(values: np.ndarray, grid: TimeGrid) -> np.ndarray:
    """Running trapezoidal integral of a sampled series; entry 0 is 0."""
    values = np.asarray(values)
    if values.shape != (grid.n,):
        raise ValueError(f"expected {grid.n} values, got shape {values.shape}")
    out = np.empty(grid.n, dtype=np.result_type(values.dtype, np.float64))
    out[0] = 0.0
    np.cumsum(0.5 * grid.dt * (values[1:] + values[:-1]), out=out[1:])
    return out


def trapz(values: np.ndarray, grid: TimeGrid):
    """Trapezoidal integral over the full grid."""
    values = np.asarray(values)
    if values.shape != (grid.n,):
        raise ValueError(f"expected {grid.n} values, got shape {values.shape}")
    result = np.trapezoid(values, dx=grid.dt)
    return complex(result) if np.iscomplexobj(values) else float(result)


def squared_norm(env: ComplexEnvelope) -> float:
    """∫|xi(t)|^2 dt by the trapezoid rule."""
    intensity = np.abs(env.samples) ** 2
    return float(np.trapezoid(intensity, dx=env.grid.dt))
