"""Noise characterization in the nonlinear spectral domain and error
counting. The central object is the fitted variance law f(u) = E{|eta|^2} as
a degree-4 polynomial of the transmitted CS amplitude u = |rho0|."""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy import stats as sps

from .errors import FitError

MIN_BIN_COUNT = 100
N_BINS = 40
WILSON_Z = 1.959963984540054  # 95%


@dataclass(frozen=True)
class NoiseModel:
    """Degree-4 polynomial fit of the CS noise variance vs. input amplitude,
    plus the per-bin measurements it was fitted from. ``var_re``/``var_im``
    are the absolute-frame quadrature variances; ``var_rad``/``var_tan`` the
    components along/across the transmitted phasor."""

    poly4: np.ndarray  # c0..c4, ascending
    fit_domain: tuple
    n_samples: int
    bin_u: np.ndarray = field(default=None, repr=False)
    bin_var: np.ndarray = field(default=None, repr=False)
    bin_count: np.ndarray = field(default=None, repr=False)
    var_re: np.ndarray = field(default=None, repr=False)
    var_im: np.ndarray = field(default=None, repr=False)
    var_rad: np.ndarray = field(default=None, repr=False)
    var_tan: np.ndarray = field(default=None, repr=False)

    def f(self, u):
        u = np.asarray(u, dtype=float)
        return np.polynomial.polynomial.polyval(u, self.poly4)

    def mean_f(self, u_samples):
        return float(np.mean(self.f(np.abs(u_samples))))


def _central_var(x):
    return float(np.var(x.real) + np.var(x.imag))


def fit_noise_model(rho0, received, n_bins=N_BINS, min_count=MIN_BIN_COUNT,
                    degree=4) -> NoiseModel:
    """Fit f from an ensemble of (sent, received) CS samples at symbol
    points.

    Noise is taken about the per-bin mean in the frame rotated by the sent
    phase (the channel is phase-covariant), which separates the stochastic
    spread from any deterministic distortion bias. The polynomial is plain
    least squares in the bin centers, refitted under a positivity constraint
    on the fit domain if the unconstrained fit dips below zero.
    """
    rho0 = np.asarray(rho0).ravel()
    received = np.asarray(received).ravel()
    if rho0.size != received.size:
        raise FitError("sent/received length mismatch")
    u = np.abs(rho0)
    phase = np.where(u > 0, rho0 / np.where(u > 0, u, 1.0), 1.0)
    eta = received - rho0
    eta_rot = eta * np.conj(phase)

    edges = np.linspace(0.0, u.max() * (1 + 1e-12), n_bins + 1)
    which = np.clip(np.digitize(u, edges) - 1, 0, n_bins - 1)
    rows = []
    for b in range(n_bins):
        sel = which == b
        cnt = int(sel.sum())
        if cnt < min_count:
            if cnt > 0:
                warnings.warn(f"dropping amplitude bin {b} with {cnt} samples")
            continue
        e = eta[sel]
        er = eta_rot[sel]
        rows.append((
            0.5 * (edges[b] + edges[b + 1]), cnt, _central_var(e),
            float(np.var(e.real)), float(np.var(e.imag)),
            float(np.var(er.real)), float(np.var(er.imag)),
        ))
    if not rows:
        raise FitError("all amplitude bins dropped (insufficient samples)")
    bu, cnt, var, vre, vim, vrad, vtan = map(np.array, zip(*rows))

    V = np.vander(bu, degree + 1, increasing=True)
    w = np.sqrt(cnt)
    coef, *_ = np.linalg.lstsq(V * w[:, None], var * w, rcond=None)
    dom = (0.0, float(u.max()))
    dense = np.linspace(dom[0], dom[1], 512)
    floor = 1e-12 + 1e-3 * float(np.median(var))
    if np.polynomial.polynomial.polyval(dense, coef).min() < floor:
        from scipy.optimize import minimize

        Vd = np.vander(dense, degree + 1, increasing=True)
        res = minimize(
            lambda c: np.sum((V @ c - var) ** 2 * cnt),
            coef,
            jac=lambda c: 2.0 * V.T @ (((V @ c) - var) * cnt),
            constraints=[{"type": "ineq", "fun": lambda c: Vd @ c - floor}],
            method="SLSQP",
            options={"maxiter": 200},
        )
        if not res.success:
            raise FitError(f"constrained variance fit failed: {res.message}")
        coef = res.x

    return NoiseModel(
        poly4=np.asarray(coef, dtype=float), fit_domain=dom,
        n_samples=int(rho0.size), bin_u=bu, bin_var=var, bin_count=cnt,
        var_re=vre, var_im=vim, var_rad=vrad, var_tan=vtan,
    )


def glm_variance_prediction(h, kappa, model: NoiseModel, rho0_samples):
    """Per-quadrature variance of the kernel-domain noise from the white-CS
    model: Var(Re Gamma) ~= h * span / (16 pi^2) * E{f(|rho0|)} with span =
    kappa * h the scanned CS width."""
    span = kappa * h
    return h * span / (16.0 * np.pi**2) * model.mean_f(rho0_samples)


def glm_variance_direct_sum(f_at_lam, lam, h, t):
    """Discretized double-sum form of the same variance at time t (the sums
    collapse on the white-noise delta): (1/2)(h/2pi)^2 sum_k f_k cos^2(lam_k t)."""
    f_at_lam = np.asarray(f_at_lam, dtype=float)
    lam = np.asarray(lam, dtype=float)
    return 0.5 * (h / (2 * np.pi)) ** 2 * float(np.sum(f_at_lam * np.cos(lam * t) ** 2))


@dataclass(frozen=True)
class SnrCurves:
    u: np.ndarray
    snr_rho: np.ndarray
    snr_glm: np.ndarray
    argmax_rho: float


def snr_curves(model: NoiseModel, glm_variance_full, n=400) -> SnrCurves:
    """SNR_rho(u) = u^2 / f(u) and SNR_F(u) = u^2 / E{|Gamma|^2}; the latter
    takes the full complex kernel-noise variance (twice the per-quadrature
    value)."""
    lo, hi = model.fit_domain
    u = np.linspace(lo + (hi - lo) / n, hi, n)
    s_rho = u**2 / model.f(u)
    s_glm = u**2 / glm_variance_full
    return SnrCurves(u=u, snr_rho=s_rho, snr_glm=s_glm,
                     argmax_rho=float(u[np.argmax(s_rho)]))


@dataclass(frozen=True)
class GaussianityReport:
    excess_kurtosis: float
    cdf_distance: float
    n: int

    def passes(self, kurtosis_tol=0.5, ks_level_factor=1.63):
        # 1.63/sqrt(n) is the classic 1% KS critical value
        return (abs(self.excess_kurtosis) < kurtosis_tol
                and self.cdf_distance < ks_level_factor / np.sqrt(self.n))


def gaussianity(samples) -> GaussianityReport:
    x = np.asarray(samples, dtype=float).ravel()
    if x.size < 1000:
        raise FitError("need at least 1e3 samples for normality diagnostics")
    z = (x - x.mean()) / x.std()
    ks = sps.kstest(z, "norm").statistic
    return GaussianityReport(
        excess_kurtosis=float(sps.kurtosis(x, fisher=True)),
        cdf_distance=float(ks), n=x.size,
    )


def wilson_interval(k, n, z=WILSON_Z):
    if n == 0:
        return (0.0, 1.0)
    p = k / n
    den = 1.0 + z**2 / n
    center = (p + z**2 / (2 * n)) / den
    half = z * np.sqrt(p * (1 - p) / n + z**2 / (4 * n**2)) / den
    return (max(0.0, center - half), min(1.0, center + half))


@dataclass(frozen=True)
class ErrorCount:
    trials: int
    symbol_errors: int
    bit_errors: int
    bits_total: int
    ser: float
    ber: float
    ser_ci: tuple
    ber_ci: tuple

    @staticmethod
    def merge(counts):
        trials = sum(c.trials for c in counts)
        se = sum(c.symbol_errors for c in counts)
        be = sum(c.bit_errors for c in counts)
        bt = sum(c.bits_total for c in counts)
        return ErrorCount(
            trials=trials, symbol_errors=se, bit_errors=be, bits_total=bt,
            ser=se / trials if trials else 0.0,
            ber=be / bt if bt else 0.0,
            ser_ci=wilson_interval(se, trials),
            ber_ci=wilson_interval(be, bt),
        )


def count_errors(sent_idx, detected_idx, bit_labels) -> ErrorCount:
    """Exact symbol/bit error counts with Wilson 95% intervals. Indices refer
    to rows of ``bit_labels`` (shape (n_points, bits_per_symbol))."""
    sent_idx = np.asarray(sent_idx)
    detected_idx = np.asarray(detected_idx)
    if sent_idx.shape != detected_idx.shape:
        raise FitError("sent/detected length mismatch")
    n = sent_idx.size
    se = int(np.count_nonzero(sent_idx != detected_idx))
    bits = bit_labels.shape[1]
    be = int(np.sum(bit_labels[sent_idx] != bit_labels[detected_idx]))
    return ErrorCount(
        trials=n, symbol_errors=se, bit_errors=be, bits_total=n * bits,
        ser=se / n if n else 0.0, ber=be / (n * bits) if n else 0.0,
        ser_ci=wilson_interval(se, n), ber_ci=wilson_interval(be, n * bits),
    )
