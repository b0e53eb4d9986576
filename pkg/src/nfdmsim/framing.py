"""Symbol-to-waveform shaping in both signaling spaces, ring constellations,
temporal/spectral width measurement, and the dispersion trade-off that fixes
the optimal nonlinear spectral width."""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .errors import ConfigError, GridError
from .signals import CsSignal, GlmKernelSignal

# Energy label E of a packet is ENERGY_CAL * mean squared symbol modulus;
# the constant is calibrated so equal-occupancy rings of radii (0.8, 1.6)
# carry the label E = 2.
ENERGY_CAL = 1.25


def symbol_points(K, spectral_width):
    i = np.arange(1, K + 1)
    return -spectral_width / 2.0 + (2 * i - 1) * spectral_width / (2.0 * K)


def gray_code(n_bits):
    k = np.arange(1 << n_bits)
    return k ^ (k >> 1)


@dataclass(frozen=True)
class Constellation:
    """Ring constellation: points grouped by ring, Gray-coded ring and phase
    bits (ring bit(s) first, then phase bits)."""

    points: np.ndarray
    bit_labels: np.ndarray  # (n_points, bits_per_symbol) of 0/1
    ring_radii: np.ndarray
    ring_phases: np.ndarray  # phase offset per ring
    points_per_ring: int
    name: str = ""

    @property
    def n_points(self):
        return self.points.size

    @property
    def bits_per_symbol(self):
        return self.bit_labels.shape[1]

    @property
    def ring_of_point(self):
        return np.repeat(np.arange(self.ring_radii.size), self.points_per_ring)

    def mean_square_radius(self):
        return float(np.mean(np.abs(self.points) ** 2))

    def energy_label(self):
        return ENERGY_CAL * self.mean_square_radius()

    def scaled_to_energy(self, E):
        if E < 0:
            raise ConfigError("energy must be non-negative")
        ms = self.mean_square_radius()
        if ms == 0.0:
            raise ConfigError("cannot scale a degenerate constellation")
        s = np.sqrt(E / (ENERGY_CAL * ms))
        return replace(self, points=self.points * s, ring_radii=self.ring_radii * s)


def make_ring_constellation(radii, points_per_ring, ring_phase_offsets=None,
                            name="") -> Constellation:
    radii = np.asarray(radii, dtype=float)
    n_rings = radii.size
    if ring_phase_offsets is None:
        ring_phase_offsets = np.zeros(n_rings)
    ring_phase_offsets = np.asarray(ring_phase_offsets, dtype=float)
    n_ring_bits = int(np.log2(n_rings)) if n_rings > 1 else 0
    n_phase_bits = int(np.log2(points_per_ring))
    if (1 << n_ring_bits) != n_rings or (1 << n_phase_bits) != points_per_ring:
        raise ConfigError("ring count and points per ring must be powers of two")
    gray_r = gray_code(n_ring_bits) if n_ring_bits else np.zeros(1, dtype=int)
    gray_p = gray_code(n_phase_bits)
    pts = []
    labels = []
    for r_idx in range(n_rings):
        for p_idx in range(points_per_ring):
            th = ring_phase_offsets[r_idx] + 2 * np.pi * p_idx / points_per_ring
            pts.append(radii[r_idx] * np.exp(1j * th))
            bits_r = [(gray_r[r_idx] >> k) & 1 for k in reversed(range(n_ring_bits))]
            bits_p = [(gray_p[p_idx] >> k) & 1 for k in reversed(range(n_phase_bits))]
            labels.append(bits_r + bits_p)
    return Constellation(
        points=np.array(pts, dtype=np.complex128),
        bit_labels=np.array(labels, dtype=np.uint8),
        ring_radii=radii,
        ring_phases=ring_phase_offsets,
        points_per_ring=points_per_ring,
        name=name,
    )


def preset_constellation(name, E=2.0) -> Constellation:
    """Two-ring presets: (I) 4 phases per ring aligned; (II) outer ring
    shifted by pi/4; (III) 8 phases per ring. Radii ratio 1:2, scaled so the
    energy label equals E. 'qpsk' is a single ring with 4 phases."""
    if name == "I":
        c = make_ring_constellation([1.0, 2.0], 4, [0.0, 0.0], name="I")
    elif name == "II":
        c = make_ring_constellation([1.0, 2.0], 4, [0.0, np.pi / 4], name="II")
    elif name == "III":
        c = make_ring_constellation([1.0, 2.0], 8, [0.0, 0.0], name="III")
    elif name == "qpsk":
        c = make_ring_constellation([1.0], 4, [0.0], name="qpsk")
    else:
        raise ConfigError(f"unknown constellation {name!r}")
    return c.scaled_to_energy(E)


def draw_symbols(constellation: Constellation, K, rng):
    idx = rng.integers(0, constellation.n_points, size=K)
    return idx, constellation.points[idx]


def scale_to_energy(symbols, E):
    """Uniformly rescale a symbol array so its packet energy label
    ENERGY_CAL * mean |D|^2 equals E."""
    symbols = np.asarray(symbols, dtype=np.complex128)
    if E == 0:
        return np.zeros_like(symbols)
    ms = float(np.mean(np.abs(symbols) ** 2))
    if ms == 0.0:
        raise ConfigError("cannot scale an all-zero packet to nonzero energy")
    return symbols * np.sqrt(E / (ENERGY_CAL * ms))


@dataclass(frozen=True)
class PacketSpec:
    K: int
    spectral_width: float  # Lambda
    oversampling: int = 16
    energy: float = 2.0
    margin: float = 1.25  # shaping grid extends margin*Lambda/2 past the band

    def __post_init__(self):
        if self.K < 1 or self.spectral_width <= 0:
            raise ConfigError("K >= 1 and spectral_width > 0 required")
        if self.oversampling < 8:
            raise ConfigError("oversampling >= 8 required")


def cs_grid(spec: PacketSpec):
    """Uniform lambda grid with spacing Lambda/(K*oversampling), aligned so
    every symbol point is an exact grid hit, extending ``margin`` past the
    occupied band."""
    dlam = spec.spectral_width / (spec.K * spec.oversampling)
    lam1 = symbol_points(spec.K, spec.spectral_width)[0]
    lo = -spec.margin * spec.spectral_width / 2.0
    hi = spec.margin * spec.spectral_width / 2.0
    n_left = int(np.ceil((lam1 - lo) / dlam))
    lam0 = lam1 - n_left * dlam
    n = int(np.floor((hi - lam0) / dlam)) + 1
    return lam0, dlam, n


def margin_taper(lam, spectral_width, margin):
    """Raised-cosine roll-off across the margin band: 1 on the occupied band
    [-Lambda/2, Lambda/2], cos^2 flank to zero at the grid edge. A hard edge
    would leave slowly-decaying ringing on the GLM kernel; the taper keeps
    the kernel compact while leaving every symbol point untouched."""
    half = spectral_width / 2.0
    flank = max((margin - 1.0) * half, 1e-12)
    x = (np.abs(lam) - half) / flank
    w = np.ones_like(lam)
    run = (x > 0) & (x < 1)
    w[run] = np.cos(0.5 * np.pi * x[run]) ** 2
    w[x >= 1] = 0.0
    return w


def shape_cs(symbols, spec: PacketSpec, taper=True) -> CsSignal:
    """Sinc superposition rho0(lam) = sum_i D_i sinc(K lam / Lambda + K/2 -
    (2i-1)/2), evaluated on the aligned oversampled grid. Evaluating at the
    symbol points returns the symbols exactly (sinc orthogonality)."""
    symbols = np.asarray(symbols, dtype=np.complex128)
    if symbols.size != spec.K:
        raise ConfigError("symbol count does not match the packet spec")
    lam0, dlam, n = cs_grid(spec)
    lam = lam0 + dlam * np.arange(n)
    i = np.arange(1, spec.K + 1)
    arg = (spec.K / spec.spectral_width) * lam[:, None] + (spec.K / 2.0) \
        - (2.0 * i[None, :] - 1.0) / 2.0
    rho = np.sinc(arg) @ symbols
    if taper:
        rho = rho * margin_taper(lam, spec.spectral_width, spec.margin)
    return CsSignal(rho, lam0, dlam, z=0.0)


def glm_kernel_exact(symbols, K, spectral_width, t0, dt, n):
    """Closed-form GLM kernel of the sinc-shaped packet: the inverse Fourier
    transform of each sinc is a boxcar riding e^{+j lam_i t}, so

        F0(t) = Lambda/(2 pi K) * 1[|t| <= pi K / Lambda] * sum_i D_i e^{j lam_i t}.

    Used on the transmit side, where it avoids spectral-truncation error."""
    symbols = np.asarray(symbols, dtype=np.complex128)
    t = t0 + dt * np.arange(n)
    lam_i = symbol_points(K, spectral_width)
    box = np.abs(t) <= np.pi * K / spectral_width
    F = np.zeros(n, dtype=np.complex128)
    if np.any(box):
        F[box] = (spectral_width / (2 * np.pi * K)) * (
            np.exp(1j * np.outer(t[box], lam_i)) @ symbols
        )
    return GlmKernelSignal(F, dt, float(t0))


def pulse_centers(K, tau):
    i = np.arange(1, K + 1)
    return -tau / 2.0 + (2 * i - 1) * tau / (2.0 * K)


def shape_glm(symbols, K, tau, t0, dt, n) -> GlmKernelSignal:
    """Time-domain sinc superposition F0(t) = sum_i D_i sinc(K t / tau + K/2
    - (2i-1)/2) sampled on (t0, dt, n); symbol values sit at pulse centers."""
    symbols = np.asarray(symbols, dtype=np.complex128)
    if symbols.size != K:
        raise ConfigError("symbol count does not match K")
    t = t0 + dt * np.arange(n)
    i = np.arange(1, K + 1)
    arg = (K / tau) * t[:, None] + K / 2.0 - (2.0 * i[None, :] - 1.0) / 2.0
    return GlmKernelSignal(np.sinc(arg) @ symbols, dt, float(t0))


@dataclass(frozen=True)
class WidthReport:
    width: float
    lo: float
    hi: float
    fraction: float
    r: float = field(default=np.nan)


def measure_width(axis, power, fraction=0.995) -> WidthReport:
    """Smallest interval holding ``fraction`` of the energy (two-pointer scan
    over the cumulative energy). ``power`` is |amplitude|^2 on the uniform
    ``axis``; each sample owns one grid cell."""
    power = np.asarray(power, dtype=float)
    total = power.sum()
    if total <= 0:
        raise GridError("zero-energy input to measure_width")
    d = axis[1] - axis[0]
    cum = np.concatenate(([0.0], np.cumsum(power)))
    target = fraction * total
    n = power.size
    best = (np.inf, 0, n - 1)
    j = 0
    for i in range(n):
        if j < i:
            j = i
        while j < n and cum[j + 1] - cum[i] < target:
            j += 1
        if j == n:
            break
        w = (j - i + 1) * d
        if w < best[0]:
            best = (w, i, j)
    w, i, j = best
    return WidthReport(width=float(w), lo=float(axis[i] - d / 2),
                       hi=float(axis[j] + d / 2), fraction=fraction)


def width_ratio_r(initial_width, K, spectral_width):
    """r = measured initial width / linear-regime estimate pi K / Lambda
    (both in the same units; in physical units the estimate carries T0)."""
    return initial_width * spectral_width / (np.pi * K)


def predict_width(r, K, spectral_width, z, T0=1.0):
    """Asymptotic received temporal width r T0 pi K / Lambda + 4 z T0 Lambda.
    With T0 = 1 the result is in normalized time units."""
    return r * T0 * np.pi * K / spectral_width + 4.0 * z * T0 * spectral_width


def optimal_lambda(r, K, z):
    """Closed-form minimizer sqrt(r pi K / (4 z)) of the width law."""
    return float(np.sqrt(r * np.pi * K / (4.0 * z)))
