"""Physical fiber parameters and the bidirectional normalization between the
physical NLS (engineering convention, beta2 < 0) and the dimensionless
focusing NLS the rest of the toolkit works in."""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .errors import ConfigError, UnitTagError
from .signals import NORMALIZED, PHYSICAL, TimeSignal

PLANCK_J_S = 6.62607015e-34

# SSMF-typical defaults; the reference link never states its own values, so
# these are overridable through the run configuration.
DEFAULT_BETA2_S2_PER_KM = -21.67e-24  # -21.67 ps^2/km
DEFAULT_GAMMA_PER_W_KM = 1.27
DEFAULT_ALPHA_DB_PER_KM = 0.2
DEFAULT_CARRIER_HZ = 193.55e12
DEFAULT_K_T = 1.13
DEFAULT_T0_S = 0.1e-9


def alpha_db_to_per_km(alpha_db):
    return alpha_db * math.log(10.0) / 10.0


@dataclass(frozen=True)
class FiberParams:
    """Link parameters. Loss enters only through the ASE density; the
    propagation model itself assumes ideal distributed amplification."""

    beta2: float = DEFAULT_BETA2_S2_PER_KM  # s^2/km, negative (focusing)
    gamma: float = DEFAULT_GAMMA_PER_W_KM  # 1/(W km)
    alpha: float = alpha_db_to_per_km(DEFAULT_ALPHA_DB_PER_KM)  # 1/km
    h_nu: float = PLANCK_J_S * DEFAULT_CARRIER_HZ  # J
    K_T: float = DEFAULT_K_T
    length_km: float = 2000.0
    T0: float = DEFAULT_T0_S  # s

    def __post_init__(self):
        vals = (self.beta2, self.gamma, self.alpha, self.h_nu, self.K_T,
                self.length_km, self.T0)
        if not all(math.isfinite(v) for v in vals):
            raise ConfigError("non-finite fiber parameter")
        if self.beta2 >= 0:
            raise ConfigError("beta2 must be negative (focusing fiber)")
        if self.T0 <= 0 or self.length_km <= 0 or self.gamma <= 0:
            raise ConfigError("T0, length_km and gamma must be positive")
        if self.alpha < 0 or self.h_nu <= 0 or self.K_T < 0:
            raise ConfigError("alpha, h_nu, K_T must be non-negative")

    def with_length(self, length_km):
        return replace(self, length_km=length_km)


@dataclass(frozen=True)
class NormalizationMap:
    """Scale factors between physical and dimensionless domains:
    q = sqrt(gamma L_D) Q, t = T/T0, z = l/(2 L_D), L_D = T0^2/|beta2|."""

    L_D: float  # km
    T0: float  # s
    amp_scale: float  # 1/sqrt(W)

    def z_of_l(self, l_km):
        return l_km / (2.0 * self.L_D)

    def l_of_z(self, z):
        return z * 2.0 * self.L_D


def make_normalization(params: FiberParams) -> NormalizationMap:
    L_D = params.T0**2 / abs(params.beta2)
    return NormalizationMap(L_D=L_D, T0=params.T0, amp_scale=math.sqrt(params.gamma * L_D))


def ase_density(params: FiberParams):
    """Accumulated ASE spectral density N_ASE = alpha L h nu K_T (W/Hz) and
    the per-km density N_ASE/L entering the white-noise autocorrelation."""
    n_ase = params.alpha * params.length_km * params.h_nu * params.K_T
    return n_ase, n_ase / params.length_km


def normalized_noise_density(params: FiberParams, norm: NormalizationMap | None = None):
    """Noise variance density D_n of the dimensionless channel, defined by
    E{n(t,z) n*(t',z')} = D_n delta(t-t') delta(z-z').

    Follows from pushing the physical autocorrelation through the amplitude
    scale sqrt(gamma L_D), time scale T0 and length scale 2 L_D:
    D_n = 2 gamma L_D^2 (N_ASE/L) / T0. Independent of L.
    """
    norm = norm or make_normalization(params)
    _, per_km = ase_density(params)
    return 2.0 * params.gamma * norm.L_D**2 * per_km / params.T0


def normalize_signal(Q: TimeSignal, norm: NormalizationMap) -> TimeSignal:
    if Q.unit_tag != PHYSICAL:
        raise UnitTagError("normalize_signal expects a physical-units signal")
    return TimeSignal(Q.samples * norm.amp_scale, Q.dt / norm.T0, Q.t0 / norm.T0,
                      NORMALIZED)


def denormalize_signal(q: TimeSignal, norm: NormalizationMap) -> TimeSignal:
    if q.unit_tag != NORMALIZED:
        raise UnitTagError("denormalize_signal expects a normalized signal")
    return TimeSignal(q.samples / norm.amp_scale, q.dt * norm.T0, q.t0 * norm.T0,
                      PHYSICAL)


def physical_energy_of_normalized(q: TimeSignal, norm: NormalizationMap):
    """Energy bookkeeping: integral |Q|^2 dT = (T0/(gamma L_D)) integral |q|^2 dt."""
    if q.unit_tag != NORMALIZED:
        raise UnitTagError("expected a normalized signal")
    return q.energy() * norm.T0 / norm.amp_scale**2


def grid_bandwidth_hz(dt_normalized, norm: NormalizationMap):
    """Full simulation bandwidth of a normalized grid in physical Hz."""
    return 1.0 / (dt_normalized * norm.T0)


def physical_launch_power_w(q: TimeSignal, norm: NormalizationMap, duration=None):
    """Mean launch power over ``duration`` (defaults to the 99.5% width is
    the caller's business; here the full grid span)."""
    e = physical_energy_of_normalized(q, norm)
    dur = duration if duration is not None else q.n * q.dt * norm.T0
    return e / dur


def cs_width_to_bandwidth_hz(spectral_width, norm: NormalizationMap):
    """Linear-regime bandwidth of a packet occupying nonlinear spectral width
    Lambda. A CS component at lambda rides exp(-2 j lambda t), so lambda in
    [-Lambda/2, Lambda/2] spans physical frequencies +-Lambda/(2 pi T0):
    full width Lambda/(pi T0). (Lambda=8, T0=0.1 ns -> 25.5 GHz.)"""
    return np.asarray(spectral_width) / (np.pi * norm.T0)
