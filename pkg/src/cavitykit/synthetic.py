"""Synthetic fixture datasets: decay traces, detuning sweeps, spectra, field maps.

These generators stand in for measured data and for the (unavailable)
solver field maps.  Without an rng they are exact model evaluations, so
fits against them are zero-residual round trips; with an rng they add the
appropriate noise (Poisson counts for traces, Gaussian otherwise).

The default parameter set matches the device regime this package targets:
g0/2pi = 0.57 GHz, kappa/2pi = 940 GHz, tau1 = 15.9 ns (so C ~ 0.14) and
1.28 ns time bins.
"""

from __future__ import annotations

import numpy as np

from .dynamics import AtomCavityParams, DecayTrace, analytic_total_rate, tau_of_detuning
from .coupling import FieldGrid

__all__ = [
    "DEFAULT_ATOM_CAVITY", "TIME_BIN_S", "DEFAULT_DETUNING_STEPS",
    "synthetic_decay_trace", "synthetic_tau_detuning", "synthetic_spectrum",
    "synthetic_field_grid",
]

DEFAULT_ATOM_CAVITY = AtomCavityParams(
    g0_hz=0.57e9, kappa_hz=940e9, gamma1=1.0 / 15.9e-9)

#: Photon-counting bin width of the targeted time tagger setup.
TIME_BIN_S = 1.28e-9

#: Detunings for sweep fixtures, in units of kappa.
DEFAULT_DETUNING_STEPS = (-2.0, -1.0, -0.5, -0.25, 0.0, 0.25, 0.5, 1.0, 2.0)


def _as_rng(rng):
    if rng is None or isinstance(rng, np.random.Generator):
        return rng
    return np.random.default_rng(int(rng))


def synthetic_decay_trace(params: AtomCavityParams = DEFAULT_ATOM_CAVITY,
                          n_bins: int = 200, bin_width_s: float = TIME_BIN_S,
                          peak_counts: float = 1e4,
                          background_counts: float = 0.0,
                          rng=None) -> DecayTrace:
    """Measured-like counts trace decaying at the analytic cavity-enhanced rate."""
    if n_bins < 2:
        raise ValueError("need at least 2 bins")
    rng = _as_rng(rng)
    rate = analytic_total_rate(params)
    t = np.arange(n_bins) * bin_width_s
    expected = peak_counts * np.exp(-rate * t) + background_counts
    counts = rng.poisson(expected).astype(float) if rng is not None else expected
    return DecayTrace(
        times=t, values=counts, kind="measured", bin_width_s=bin_width_s,
        meta={"g0_hz": params.g0_hz, "kappa_hz": params.kappa_hz,
              "gamma1_per_s": params.gamma1, "delta_hz": params.delta_hz,
              "peak_counts": peak_counts,
              "background_counts": background_counts,
              "rate_per_s": rate})


def synthetic_tau_detuning(c: float = 0.14, kappa_hz: float = 940e9,
                           tau1_s: float = 15.9e-9, deltas_hz=None,
                           sigma_frac: float = 0.02, rng=None) -> np.ndarray:
    """Rows of (delta_hz, tau_s, sigma_s) along a detuning sweep.

    sigma_frac sets the quoted error bars relative to tau; noise of that
    size is only added when an rng is supplied.
    """
    rng = _as_rng(rng)
    if deltas_hz is None:
        deltas_hz = kappa_hz * np.asarray(DEFAULT_DETUNING_STEPS)
    deltas_hz = np.asarray(deltas_hz, dtype=float)
    tau = tau_of_detuning(c, kappa_hz, tau1_s, deltas_hz)
    sigma = sigma_frac * tau
    if rng is not None and sigma_frac > 0.0:
        tau = tau + rng.normal(0.0, sigma)
    return np.column_stack([deltas_hz, tau, sigma])


def synthetic_spectrum(n: int = 240, lambda_range_nm=(630.0, 645.0),
                       cavity=(120.0, 638.2, 0.64),
                       zpl=(260.0, 637.0, 0.12),
                       baseline=(40.0, -0.05),
                       noise_frac: float = 0.0, rng=None) -> np.ndarray:
    """Rows of (wavelength_nm, intensity): cavity Lorentzian (height, center,
    half width) + ZPL Gaussian (height, center, sigma) + linear baseline
    (offset at 0, slope per nm).  noise_frac sets the relative per-point
    noise level (multiplicative intensity fluctuations).
    """
    rng = _as_rng(rng)
    lam = np.linspace(*lambda_range_nm, n)
    a_c, x_c, w_c = cavity
    a_z, x_z, s_z = zpl
    b0, b1 = baseline
    inten = (a_c / (1.0 + ((lam - x_c) / w_c) ** 2)
             + a_z * np.exp(-0.5 * ((lam - x_z) / s_z) ** 2)
             + b0 + b1 * lam)
    if rng is not None and noise_frac > 0.0:
        inten = inten * (1.0 + rng.normal(0.0, noise_frac, size=n))
    return np.column_stack([lam, inten])


def synthetic_field_grid(dims=(61, 31, 25),
                         extent_m=(1.2e-6, 3.6e-7, 2.4e-7),
                         wave_period_m: float = 4.4e-7,
                         envelope_m=(3.0e-7, 8.0e-8, 6.0e-8),
                         eps_slab: float = 5.7,
                         slab_halfwidth_m=(1.5e-7, 1.0e-7),
                         uniform_eps: bool = False) -> FieldGrid:
    """Apodized standing-wave mode profile on a regular grid.

    The dominant y polarization is a cos standing wave along x under a
    Gaussian envelope, with weaker antisymmetric x and z components; the
    permittivity is eps_slab inside a rectangular slab (|y|, |z| below the
    slab half widths) and 1 outside, or eps_slab everywhere when
    uniform_eps is set (handy for convergence studies).  Odd point counts
    put a sample exactly on the field maximum at the origin.
    """
    nx, ny, nz = dims
    spans = tuple(float(e) for e in extent_m)
    spacing = tuple(spans[i] / (dims[i] - 1) for i in range(3))
    origin = tuple(-0.5 * spans[i] for i in range(3))
    x = origin[0] + spacing[0] * np.arange(nx)
    y = origin[1] + spacing[1] * np.arange(ny)
    z = origin[2] + spacing[2] * np.arange(nz)
    xg, yg, zg = np.meshgrid(x, y, z, indexing="ij")

    sx, sy, sz = envelope_m
    env = np.exp(-0.5 * ((xg / sx) ** 2 + (yg / sy) ** 2 + (zg / sz) ** 2))
    phase = 2.0 * np.pi * xg / wave_period_m
    e = np.zeros(dims + (3,))
    e[..., 1] = np.cos(phase) * env
    e[..., 0] = 0.2 * np.sin(phase) * (yg / sy) * env
    e[..., 2] = 0.1 * np.sin(phase) * (zg / sz) * env

    if uniform_eps:
        eps = np.full(dims, eps_slab)
    else:
        inside = (np.abs(yg) <= slab_halfwidth_m[0]) & (np.abs(zg) <= slab_halfwidth_m[1])
        eps = np.where(inside, eps_slab, 1.0)
    return FieldGrid(e_field=e, eps_rel=eps, spacing_m=spacing, origin_m=origin)
