"""Forward nonlinear Fourier transform on the real axis.

Solves the Zakharov-Shabat problem
    v1' = -j lam v1 + q v2,   v2' = -conj(q) v1 + j lam v2
with v -> (1,0) e^{-j lam t} as t -> -inf, and returns a(lam), b(lam) and the
continuous spectrum rho = b/a. Conventions are fixed so that in the
low-amplitude limit rho(lam) -> -integral conj(q(t)) e^{-2 j lam t} dt, which
pairs with the GLM kernel F(t) = (1/2 pi) integral rho e^{+j lam t} dlam used
by the inverse transform.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kern
from .errors import GridError
from .signals import NORMALIZED, CsSignal, TimeSignal

SINGULARITY_ABS_A = 1e-10
DEFAULT_TAIL_ENERGY = 1e-3


@dataclass(frozen=True)
class ScatteringCoeffs:
    a: np.ndarray
    b: np.ndarray
    lam: np.ndarray

    def unimodularity_defect(self):
        """max | |a|^2 (1+|rho|^2) - 1 | over the grid; discrete analogue of
        |a|^2 + |b|^2 = 1 for CS-only signals."""
        return float(np.max(np.abs(np.abs(self.a) ** 2 + np.abs(self.b) ** 2 - 1.0)))


def uniform_lambda_grid(lam_min, lam_max, n):
    if n < 2 or lam_max <= lam_min:
        raise GridError("bad lambda grid spec")
    return np.linspace(lam_min, lam_max, n)


def tail_energy_fraction(q: TimeSignal, fraction=0.05):
    """Energy in the outermost ``fraction`` of samples on each side, relative
    to the total. Used as the time-limited-input check."""
    p = np.abs(q.samples) ** 2
    tot = float(p.sum())
    if tot == 0.0:
        return 0.0
    k = max(1, int(round(fraction * q.n)))
    return float(p[:k].sum() + p[-k:].sum()) / tot


def forward_nft(q: TimeSignal, lam, scheme="al", check_tails=True,
                tail_tol=DEFAULT_TAIL_ENERGY):
    """Scattering coefficients and CS of a time-limited normalized signal.

    Parameters
    ----------
    q : TimeSignal (normalized units)
    lam : array of real spectral points (uniform grid for the CsSignal view)
    scheme : 'al' (Ablowitz-Ladik, default) or 'bo' (frozen-potential
        exponential; exact for piecewise-constant q)

    Returns (ScatteringCoeffs, CsSignal). Spectral points where |a| falls
    below 1e-10 are flagged in the CsSignal meta (detection unreliable there).
    """
    if q.unit_tag != NORMALIZED:
        raise GridError("forward_nft expects normalized-units input")
    lam = np.ascontiguousarray(lam, dtype=np.float64)
    if check_tails:
        frac = tail_energy_fraction(q)
        if frac > tail_tol:
            raise GridError(
                f"input not time-limited: tail energy fraction {frac:.3e} > {tail_tol:g}"
            )
    sch = _kern.SCHEME_AL if scheme == "al" else _kern.SCHEME_BO
    a, b = _kern.zs_scan(q.samples, q.dt, q.t0, lam, sch)
    small = np.abs(a) < SINGULARITY_ABS_A
    rho = np.empty_like(b)
    np.divide(b, np.where(small, 1.0, a), out=rho)
    rho[small] = 0.0
    meta = {"z": 0.0, "singular": np.flatnonzero(small)}
    dlam = float(lam[1] - lam[0]) if lam.size > 1 else 1.0
    cs = CsSignal(rho, float(lam[0]), dlam, z=0.0, meta=meta)
    return ScatteringCoeffs(a=a, b=b, lam=lam), cs


def symbol_points(K, spectral_width):
    """lambda_i = -Lambda/2 + (2i-1) Lambda / (2K), i = 1..K."""
    i = np.arange(1, K + 1)
    return -spectral_width / 2.0 + (2 * i - 1) * spectral_width / (2.0 * K)


def sample_symbols(cs: CsSignal, K, spectral_width):
    """rho at the K symbol points; exact grid hits on aligned grids, cubic
    interpolation otherwise (diagnostics only)."""
    pts = symbol_points(K, spectral_width)
    lam = cs.lam
    if pts[0] < lam[0] - 1e-9 * cs.dlambda or pts[-1] > lam[-1] + 1e-9 * cs.dlambda:
        raise GridError("lambda grid does not cover the symbol points")
    idx = (pts - cs.lambda0) / cs.dlambda
    near = np.round(idx)
    if np.max(np.abs(idx - near)) < 1e-6:
        return cs.rho[near.astype(int)]
    from scipy.interpolate import CubicSpline

    re = CubicSpline(lam, cs.rho.real)
    im = CubicSpline(lam, cs.rho.imag)
    return re(pts) + 1j * im(pts)


def remove_phase_evolution(cs: CsSignal, z) -> CsSignal:
    """Undo the channel phase rho(lam, z) = rho(lam, 0) e^{-4 j lam^2 z}."""
    lam = cs.lam
    return cs.with_rho(cs.rho * np.exp(4j * lam**2 * z), z=cs.z - z)


def linear_spectrum(q: TimeSignal, lam):
    """Low-amplitude limit of rho: -integral conj(q) e^{-2 j lam t} dt,
    evaluated by direct quadrature (reference for convention tests)."""
    lam = np.asarray(lam, dtype=float)
    t = q.t
    ker = np.exp(-2j * np.outer(lam, t))
    return -(ker @ np.conj(q.samples)) * q.dt
