"""The four transceiver chains: direct mapping on the continuous spectrum,
VNT-designed nonuniform rings, direct mapping with CS-domain linear
filtering, and GLM-kernel signaling. Encode maps symbols to a launch
waveform; detect maps a received waveform back to symbol indices."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad
from scipy.optimize import brentq

from . import framing, inft, nft
from .errors import ConfigError, FitError, GridError
from .framing import ENERGY_CAL, PacketSpec
from .signals import NORMALIZED, CsSignal, TimeSignal
from .stats import NoiseModel

GLM_SCAN_SPACING = 0.01  # receiver CS sampling step h; denser samples are correlated
GLM_SCAN_FRACTION = 0.96  # scanned CS width as a fraction of Lambda
GLM_DATA_FRACTION = 0.95  # data band kept inside the scan with a guard sliver
FILTER_OVERSAMPLING = 20


# ---------------------------------------------------------------------------
# variance-normalizing transform


@dataclass(frozen=True)
class VntTransform:
    """T(u) = integral_0^u dv / sqrt(f(v)); strictly increasing with a finite
    plateau when f grows faster than quadratically."""

    u_grid: np.ndarray
    T_values: np.ndarray
    T_inf: float

    def transform(self, u):
        return np.interp(u, self.u_grid, self.T_values)

    def inverse(self, y):
        y = np.asarray(y, dtype=float)
        if np.any(y > self.T_inf):
            raise ConfigError("inverse VNT evaluated beyond the plateau")
        return np.interp(y, self.T_values, self.u_grid)


def build_vnt(noise_model: NoiseModel, u_max, n_grid=1024, rel_tol=1e-8) -> VntTransform:
    """Integrate 1/sqrt(f) cumulatively on a dense amplitude grid (adaptive
    quadrature per interval)."""
    u = np.linspace(0.0, u_max, n_grid)
    fvals = noise_model.f(u)
    if np.any(fvals <= 0):
        raise FitError("fitted variance is non-positive inside [0, u_max]")
    integrand = lambda v: 1.0 / np.sqrt(noise_model.f(v))
    T = np.zeros(n_grid)
    for i in range(1, n_grid):
        seg, _ = quad(integrand, u[i - 1], u[i], epsrel=rel_tol, limit=100)
        T[i] = T[i - 1] + seg
    return VntTransform(u_grid=u, T_values=T, T_inf=float(T[-1]))


@dataclass(frozen=True)
class RingDesign:
    radii: np.ndarray
    boundaries: np.ndarray  # decision thresholds between consecutive radii
    points_per_ring: int
    phase_offsets: np.ndarray

    def __post_init__(self):
        r = self.radii
        b = self.boundaries
        if not (np.all(np.diff(r) > 0) and b.size == r.size - 1):
            raise ConfigError("radii must increase; need len(radii)-1 boundaries")
        if not np.all((b > r[:-1]) & (b < r[1:])):
            raise ConfigError("boundaries must interleave the radii")


def design_levels(vnt: VntTransform, n_levels, headroom, points_per_ring=4,
                  phase_offsets=None) -> RingDesign:
    """Uniform levels headroom*k/n (k=1..n) in the transformed domain, mapped
    back through the inverse VNT; decision boundaries are the inverse images
    of the transformed-domain midpoints."""
    if n_levels < 2:
        raise ConfigError("need at least two levels")
    if headroom >= vnt.T_inf:
        raise ConfigError(f"headroom {headroom:g} >= plateau {vnt.T_inf:g}")
    k = np.arange(1, n_levels + 1)
    radii = vnt.inverse(headroom * k / n_levels)
    bounds = vnt.inverse(headroom * (k[:-1] + 0.5) / n_levels)
    if phase_offsets is None:
        phase_offsets = np.zeros(n_levels)
    return RingDesign(radii=radii, boundaries=bounds,
                      points_per_ring=points_per_ring,
                      phase_offsets=np.asarray(phase_offsets, dtype=float))


def design_levels_for_energy(vnt: VntTransform, n_levels, energy,
                             points_per_ring=4) -> RingDesign:
    """Pick the transformed-domain headroom so the equal-occupancy ring set
    carries the requested energy label."""
    def label(h):
        r = vnt.inverse(h * np.arange(1, n_levels + 1) / n_levels)
        return ENERGY_CAL * float(np.mean(r**2)) - energy

    hi = vnt.T_inf * (1.0 - 1e-9)
    if label(hi) < 0:
        raise ConfigError(
            f"energy {energy:g} not reachable below the VNT plateau"
        )
    h = brentq(label, vnt.T_inf * 1e-6, hi, xtol=1e-10)
    return design_levels(vnt, n_levels, h, points_per_ring)


def constellation_from_design(design: RingDesign, name="vnt") -> framing.Constellation:
    c = framing.make_ring_constellation(design.radii, design.points_per_ring,
                                        design.phase_offsets, name=name)
    return c


# ---------------------------------------------------------------------------
# ring detection


def midpoint_boundaries(radii):
    radii = np.asarray(radii, dtype=float)
    return 0.5 * (radii[:-1] + radii[1:])


def detect_rings(received, constellation: framing.Constellation,
                 boundaries=None):
    """Minimum-distance ring/phase detector. Ring decided by modulus against
    the boundaries (a modulus exactly on a boundary goes to the lower ring);
    phase decided by the nearest constellation phase on that ring with ties
    toward the lower index."""
    received = np.asarray(received, dtype=np.complex128)
    if boundaries is None:
        boundaries = midpoint_boundaries(constellation.ring_radii)
    ring = np.searchsorted(boundaries, np.abs(received), side="left")
    ppr = constellation.points_per_ring
    step = 2.0 * np.pi / ppr
    theta = np.angle(received) - constellation.ring_phases[ring]
    k = np.ceil(theta / step - 0.5).astype(int) % ppr
    return ring * ppr + k


# ---------------------------------------------------------------------------
# CS-domain linear filtering (conjugate-grid FFT pair)


def cs_to_time(cs: CsSignal):
    """u(t) = (1/2pi) integral rho e^{+j lam t} dlam on the FFT-conjugate time
    grid (dt = 2pi/(N dlambda), centered). Exact inverse of time_to_cs."""
    n = cs.n
    dt = 2.0 * np.pi / (n * cs.dlambda)
    t0 = -np.pi / cs.dlambda
    k = np.arange(n)
    pre = cs.rho * np.exp(1j * k * cs.dlambda * t0)
    u = n * np.fft.ifft(pre)
    t = t0 + dt * k
    u *= (cs.dlambda / (2.0 * np.pi)) * np.exp(1j * cs.lambda0 * t)
    return u, t0, dt


def time_to_cs(u, t0, dt, lambda0, dlambda) -> np.ndarray:
    n = u.size
    m = np.arange(n)
    pre = u * np.exp(-1j * lambda0 * (t0 + dt * m))
    spec = np.fft.fft(pre)
    lam = lambda0 + dlambda * np.arange(n)
    return dt * spec * np.exp(-1j * lam * t0)


def filter_cs(cs_noisy: CsSignal, window_lo, window_hi) -> CsSignal:
    """Constant-gain rectangular time windowing of the oversampled CS (the
    linear-FFT receiver filter): IFFT, zero outside [window_lo, window_hi],
    FFT back."""
    u, t0, dt = cs_to_time(cs_noisy)
    n = cs_noisy.n
    t = t0 + dt * np.arange(n)
    if window_lo < t[0] - dt or window_hi > t[-1] + dt:
        raise GridError("filter window wider than the IFFT grid span")
    u = np.where((t >= window_lo) & (t <= window_hi), u, 0.0)
    rho = time_to_cs(u, t0, dt, cs_noisy.lambda0, cs_noisy.dlambda)
    return cs_noisy.with_rho(rho)


def reference_window(cs0: CsSignal, fraction=0.995):
    """Side information for the filtering receiver: the 99.5%-energy window
    of IFFT{rho0}, measured on the noiseless transmit packet."""
    u, t0, dt = cs_to_time(cs0)
    t = t0 + dt * np.arange(u.size)
    rep = framing.measure_width(t, np.abs(u) ** 2, fraction)
    return rep.lo, rep.hi


# ---------------------------------------------------------------------------
# encode / detect chains


def _aligned_start(lo, dt):
    return np.floor(lo / dt) * dt


def _glm_encode_kernel(F_vals, f_t0, h, b_supp, tail_rel, tail_cap) -> TimeSignal:
    """Shared GLM inversion driver for the transmit side: solve the core
    region, then extend the slowly-decaying left tail (the genuine nonlinear
    width expansion of CS-only signals lands on this side) chunk by chunk
    until it drops below tail_rel of the peak or reaches tail_cap."""
    x_hi = b_supp / 2.0 + 2.0
    x0 = _aligned_start(-b_supp / 2.0 - 2.0, h)
    nx = int(np.ceil((x_hi - x0) / h)) + 1
    q = inft._glm_solve(F_vals, f_t0, h, x0, nx, b_supp, 8 * h)
    peak = np.max(np.abs(q)) if q.size else 0.0
    chunks, starts = [q], [x0]
    x_cur = x0
    while peak > 0 and x_cur > tail_cap:
        x_cur = x_cur - 16 * h
        qc = inft._glm_solve(F_vals, f_t0, h, x_cur, 16, b_supp, 8 * h)
        chunks.insert(0, qc)
        starts.insert(0, x_cur)
        if np.max(np.abs(qc)) < tail_rel * peak:
            break
    return TimeSignal(np.concatenate(chunks), h, starts[0], NORMALIZED)


def encode_cs_packet(symbols, spec: PacketSpec, dt, h_factor=1,
                     tail_rel=1e-3, tail_depth=6.0) -> TimeSignal:
    """Launch waveform for CS-mapped schemes: closed-form GLM kernel of the
    sinc packet, GLM inversion on a grid of step h = h_factor*dt, band-limited
    upsampling back to dt when h_factor > 1.

    tail_rel sets where the left tail capture stops (relative to the peak);
    tighten it for transform-accuracy studies, the default suits Monte-Carlo
    trials where channel noise dominates. tail_depth caps the extent in units
    of the kernel half-support."""
    K, lam_w = spec.K, spec.spectral_width
    b_supp = np.pi * K / lam_w
    h = h_factor * dt
    tail_cap = -b_supp / 2.0 - tail_depth * b_supp
    f_t0 = 2.0 * _aligned_start(tail_cap, h)
    nf = int(np.ceil((b_supp + 8 * h - f_t0) / h)) + 1
    F0 = framing.glm_kernel_exact(symbols, K, lam_w, f_t0, h, nf)
    sig = _glm_encode_kernel(F0.F, f_t0, h, b_supp, tail_rel, tail_cap)
    if h_factor > 1:
        sig = upsample(sig, h_factor)
    return sig


def upsample(sig: TimeSignal, m) -> TimeSignal:
    """Band-limited upsampling by an integer factor (FFT zero padding); valid
    because encode outputs decay to ~0 at their grid ends."""
    n = sig.n
    spec = np.fft.fft(sig.samples)
    out = np.zeros(n * m, dtype=np.complex128)
    half = n // 2
    out[:half] = spec[:half]
    out[-(n - half):] = spec[half:]
    q = np.fft.ifft(out) * m
    return TimeSignal(q[: (n - 1) * m + 1], sig.dt / m, sig.t0, sig.unit_tag)


def window_received(q: TimeSignal, half_width, center=0.0) -> TimeSignal:
    lo = center - half_width
    hi = center + half_width
    i0 = max(0, int(np.ceil((lo - q.t0) / q.dt)))
    i1 = min(q.n, int(np.floor((hi - q.t0) / q.dt)) + 1)
    if i1 - i0 < 2:
        raise GridError("receiver window does not overlap the grid")
    return TimeSignal(q.samples[i0:i1], q.dt, q.t0 + i0 * q.dt, NORMALIZED)


def direct_detect_cs(q_rx: TimeSignal, z, spec: PacketSpec) -> np.ndarray:
    """NFT at the K symbol points and channel-phase removal; returns the
    noisy CS symbol estimates."""
    lam = framing.symbol_points(spec.K, spec.spectral_width)
    _, cs = nft.forward_nft(q_rx, lam, check_tails=False)
    cs = nft.remove_phase_evolution(cs, z)
    return cs.rho


def direct_detect(q_rx, z, spec, constellation, boundaries=None):
    est = direct_detect_cs(q_rx, z, spec)
    return est, detect_rings(est, constellation, boundaries)


def filter_detect_cs(q_rx: TimeSignal, z, spec: PacketSpec, window,
                     oversampling=FILTER_OVERSAMPLING) -> np.ndarray:
    """Oversampled NFT, phase removal, rectangular time windowing in the
    linear-FFT domain, then sampling at the symbol points."""
    fspec = PacketSpec(spec.K, spec.spectral_width, oversampling,
                       spec.energy, spec.margin)
    lam0, dlam, n = framing.cs_grid(fspec)
    lam = lam0 + dlam * np.arange(n)
    _, cs = nft.forward_nft(q_rx, lam, check_tails=False)
    cs = nft.remove_phase_evolution(cs, z)
    cs = filter_cs(cs, window[0], window[1])
    return nft.sample_symbols(cs, spec.K, spec.spectral_width)


def filter_detect(q_rx, z, spec, constellation, window, boundaries=None,
                  oversampling=FILTER_OVERSAMPLING):
    est = filter_detect_cs(q_rx, z, spec, window, oversampling)
    return est, detect_rings(est, constellation, boundaries)


def glm_tau(spec: PacketSpec):
    """Kernel-domain signaling window: data band GLM_DATA_FRACTION*Lambda
    sits just inside the receiver's scanned band."""
    return 2.0 * np.pi * spec.K / (GLM_DATA_FRACTION * spec.spectral_width)


def glm_symbol_scale(spec: PacketSpec, energy):
    """Mean squared kernel-domain symbol modulus giving the same integrated
    CS energy as a CS-mapped packet of the same energy label:
    mean|D|^2 = Lambda * Lambda_data * (E/cal) / (4 pi^2 K)."""
    lam_w = spec.spectral_width
    return lam_w * (GLM_DATA_FRACTION * lam_w) * (energy / ENERGY_CAL) / (
        4.0 * np.pi**2 * spec.K
    )


def glm_scaled_constellation(name, spec: PacketSpec, energy):
    base = framing.preset_constellation(name, E=2.0)
    ms = glm_symbol_scale(spec, energy)
    return base.scaled_to_energy(ENERGY_CAL * ms)


def glm_encode(symbols, spec: PacketSpec, dt, h_factor=1, tail_rel=1e-3,
               tail_depth=6.0) -> TimeSignal:
    """Kernel-domain packet (Eq-16-style sinc superposition in time) pushed
    through the GLM inversion; the inverse Fourier stage of the usual INFT
    moves to the receiver."""
    tau = glm_tau(spec)
    h = h_factor * dt
    b_supp = spec.margin * tau / 2.0
    tail_cap = -b_supp / 2.0 - tail_depth * b_supp
    f_t0 = 2.0 * _aligned_start(tail_cap, h)
    nf = int(np.ceil((b_supp + 8 * h - f_t0) / h)) + 1
    F0 = framing.shape_glm(symbols, spec.K, tau, f_t0, h, nf)
    # raised-cosine roll-off over the margin band keeps the truncated kernel
    # smooth (pulse-center samples untouched)
    w = framing.margin_taper(F0.t, tau, spec.margin)
    sig = _glm_encode_kernel(F0.F * w, f_t0, h, b_supp, tail_rel, tail_cap)
    if h_factor > 1:
        sig = upsample(sig, h_factor)
    return sig


def glm_scan_grid(spec: PacketSpec, h=GLM_SCAN_SPACING):
    kappa = int(round(GLM_SCAN_FRACTION * spec.spectral_width / h))
    lam = (np.arange(kappa) - (kappa - 1) / 2.0) * h
    return lam, kappa


def glm_detect_kernel(q_rx: TimeSignal, z, spec: PacketSpec,
                      h=GLM_SCAN_SPACING) -> np.ndarray:
    """NFT on the dense scan grid, phase removal, then the receiver-side
    inverse Fourier transform evaluated at the pulse centers."""
    lam, kappa = glm_scan_grid(spec, h)
    _, cs = nft.forward_nft(q_rx, lam, check_tails=False)
    cs = nft.remove_phase_evolution(cs, z)
    tau = glm_tau(spec)
    centers = framing.pulse_centers(spec.K, tau)
    F = inft.rho_to_F(cs, centers[0], tau / spec.K, spec.K)
    return F.F


def glm_detect(q_rx, z, spec, constellation, h=GLM_SCAN_SPACING,
               boundaries=None):
    est = glm_detect_kernel(q_rx, z, spec, h)
    return est, detect_rings(est, constellation, boundaries)
