"""Signal containers: complex envelopes on uniform time grids and
continuous-spectrum samples on uniform nonlinear-frequency grids."""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .errors import GridError

PHYSICAL = "physical"
NORMALIZED = "normalized"


def _check_finite(x, what):
    if not np.all(np.isfinite(x)):
        raise GridError(f"{what} contains non-finite samples")


@dataclass(frozen=True)
class TimeSignal:
    """Complex envelope on a uniform time grid.

    ``dt``/``t0`` are in seconds for ``unit_tag='physical'`` and in
    dimensionless retarded time for ``unit_tag='normalized'``.
    """

    samples: np.ndarray
    dt: float
    t0: float
    unit_tag: str = NORMALIZED

    def __post_init__(self):
        object.__setattr__(
            self, "samples", np.ascontiguousarray(self.samples, dtype=np.complex128)
        )
        if self.dt <= 0:
            raise GridError("dt must be positive")
        if self.unit_tag not in (PHYSICAL, NORMALIZED):
            raise GridError(f"unknown unit tag {self.unit_tag!r}")
        _check_finite(self.samples, "TimeSignal")

    @property
    def n(self):
        return self.samples.size

    @property
    def t(self):
        return self.t0 + self.dt * np.arange(self.n)

    def energy(self):
        return float(np.sum(np.abs(self.samples) ** 2) * self.dt)

    def power_peak(self):
        return float(np.max(np.abs(self.samples) ** 2)) if self.n else 0.0

    def with_samples(self, samples):
        return replace(self, samples=samples)


@dataclass(frozen=True)
class CsSignal:
    """Continuous-spectrum samples rho on a uniform real lambda grid."""

    rho: np.ndarray
    lambda0: float
    dlambda: float
    z: float = 0.0
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(
            self, "rho", np.ascontiguousarray(self.rho, dtype=np.complex128)
        )
        if self.dlambda <= 0:
            raise GridError("dlambda must be positive")
        _check_finite(self.rho, "CsSignal")

    @property
    def n(self):
        return self.rho.size

    @property
    def lam(self):
        return self.lambda0 + self.dlambda * np.arange(self.n)

    def energy(self):
        return float(np.sum(np.abs(self.rho) ** 2) * self.dlambda)

    def with_rho(self, rho, z=None):
        return replace(self, rho=rho, z=self.z if z is None else z)


@dataclass(frozen=True)
class GlmKernelSignal:
    """Samples of the GLM kernel F(t), the linear inverse Fourier transform
    of the continuous spectrum. Always dimensionless."""

    F: np.ndarray
    dt: float
    t0: float

    def __post_init__(self):
        object.__setattr__(self, "F", np.ascontiguousarray(self.F, dtype=np.complex128))
        if self.dt <= 0:
            raise GridError("dt must be positive")
        _check_finite(self.F, "GlmKernelSignal")

    @property
    def n(self):
        return self.F.size

    @property
    def t(self):
        return self.t0 + self.dt * np.arange(self.n)

    def energy(self):
        return float(np.sum(np.abs(self.F) ** 2) * self.dt)


def centered_time_grid(half_width, dt, pow2=True):
    """Uniform grid covering [-half_width, half_width]; sample count rounded
    up to a power of two when ``pow2`` (FFT-friendly propagation grids)."""
    n = int(np.ceil(2 * half_width / dt)) + 1
    if pow2:
        n = 1 << int(np.ceil(np.log2(max(n, 2))))
    t0 = -dt * (n - 1) / 2.0
    return t0, n


def embed(signal: TimeSignal, t0, n) -> TimeSignal:
    """Zero-pad ``signal`` onto the larger grid (t0, n) with identical dt.
    The source grid must be commensurate with the target."""
    k = (signal.t0 - t0) / signal.dt
    k0 = int(round(k))
    if abs(k - k0) > 1e-6 or k0 < 0 or k0 + signal.n > n:
        raise GridError("embedding target grid does not contain the source grid")
    out = np.zeros(n, dtype=np.complex128)
    out[k0 : k0 + signal.n] = signal.samples
    return TimeSignal(out, signal.dt, t0, signal.unit_tag)
