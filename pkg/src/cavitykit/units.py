"""Physical constants, frequency/time quantity types and unit conversions.

Lightweight module, safe to import from anywhere. Two conventions are used
throughout the package and are worth stating once:

* Ordinary frequencies (Hz): every user-facing linewidth, coupling rate or
  detuning is an ordinary frequency, i.e. the "omega / 2pi" value that
  experiments report (kappa/2pi, g0/2pi, ...).  Angular frequencies (rad/s)
  appear only inside formulas that need them and are converted at module
  boundaries with :func:`to_angular` / :func:`to_ordinary`.
* dB values are power dB throughout: dB = 10 log10(linear).

Constants (CODATA 2018):

    hbar    1.054571817e-34   J s
    eps0    8.8541878128e-12  F / m
    c       299792458         m / s   (exact)
    debye   3.335640951981e-30 C m    (1 D = 1e-21 / c)

Note on NV transition frequencies: the ZPL wavelength 637 nm corresponds to
c / lambda = 470.6 THz, while 475 THz (= 631.1 nm) is also in common use for
the optical transition frequency.  The two differ by about 1%.  Nothing in
this package hardcodes either value; pass whichever frequency your analysis
uses and be consistent.
"""

from __future__ import annotations

import math
from dataclasses import dataclass


@dataclass(frozen=True)
class PhysicalConstants:
    """CODATA 2018 values, SI units. Immutable."""

    hbar: float = 1.054571817e-34     # J s
    eps0: float = 8.8541878128e-12    # F / m
    c: float = 299792458.0            # m / s
    debye: float = 3.335640951981e-30  # C m per Debye


CONSTANTS = PhysicalConstants()

HBAR = CONSTANTS.hbar
EPS0 = CONSTANTS.eps0
C0 = CONSTANTS.c
DEBYE = CONSTANTS.debye

TWO_PI = 2.0 * math.pi


class OrdinaryFrequency(float):
    """A frequency in Hz (the nu = omega/2pi reporting convention).

    Detunings are signed, so only finiteness is enforced here; call sites
    that require a linewidth or rate check non-negativity themselves.
    """

    def __new__(cls, value: float) -> "OrdinaryFrequency":
        v = float(value)
        if not math.isfinite(v):
            raise ValueError(f"frequency must be finite, got {value!r}")
        return super().__new__(cls, v)

    def to_angular(self) -> "AngularFrequency":
        return AngularFrequency(TWO_PI * self)


class AngularFrequency(float):
    """An angular frequency in rad/s; exactly 2*pi times the ordinary value."""

    def __new__(cls, value: float) -> "AngularFrequency":
        v = float(value)
        if not math.isfinite(v):
            raise ValueError(f"angular frequency must be finite, got {value!r}")
        return super().__new__(cls, v)

    def to_ordinary(self) -> OrdinaryFrequency:
        return OrdinaryFrequency(self / TWO_PI)


class Duration(float):
    """A strictly positive time in seconds (lifetimes, bin widths)."""

    def __new__(cls, value: float) -> "Duration":
        v = float(value)
        if not (math.isfinite(v) and v > 0.0):
            raise ValueError(f"duration must be positive and finite, got {value!r}")
        return super().__new__(cls, v)


class Efficiency(float):
    """A dimensionless linear power ratio in [0, 1]."""

    def __new__(cls, value: float) -> "Efficiency":
        v = float(value)
        if not (math.isfinite(v) and 0.0 <= v <= 1.0):
            raise ValueError(f"efficiency must lie in [0, 1], got {value!r}")
        return super().__new__(cls, v)


def to_angular(nu_hz: float) -> float:
    """Ordinary frequency (Hz) -> angular frequency (rad/s)."""
    return TWO_PI * nu_hz


def to_ordinary(omega: float) -> float:
    """Angular frequency (rad/s) -> ordinary frequency (Hz)."""
    return omega / TWO_PI


def linear_to_db(linear: float) -> float:
    """Linear power ratio -> power dB. Requires linear > 0."""
    if not (linear > 0.0):
        raise ValueError(f"linear ratio must be > 0 to convert to dB, got {linear!r}")
    return 10.0 * math.log10(linear)


def db_to_linear(db: float) -> float:
    """Power dB -> linear power ratio."""
    return 10.0 ** (db / 10.0)


def quality_factor(nu_c_hz: float, kappa_hz: float) -> float:
    """Q = nu_c / kappa, both as ordinary frequencies."""
    if not (kappa_hz > 0.0):
        raise ValueError(f"kappa must be > 0, got {kappa_hz!r}")
    return nu_c_hz / kappa_hz


def wavelength_to_frequency(wavelength_m: float) -> float:
    """Vacuum wavelength (m) -> ordinary frequency (Hz)."""
    if not (wavelength_m > 0.0):
        raise ValueError(f"wavelength must be > 0, got {wavelength_m!r}")
    return C0 / wavelength_m


def frequency_to_wavelength(nu_hz: float) -> float:
    """Ordinary frequency (Hz) -> vacuum wavelength (m)."""
    if not (nu_hz > 0.0):
        raise ValueError(f"frequency must be > 0, got {nu_hz!r}")
    return C0 / nu_hz
