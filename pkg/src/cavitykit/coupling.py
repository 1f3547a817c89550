"""Vacuum coupling-rate estimation from sampled cavity field maps.

The chain implemented here goes: field map -> mode volume -> zero-point
field amplitude, lifetime -> transition dipole moment, and their product
-> ideal vacuum coupling rate g0.  For an emitter ensemble distributed
over the cavity, a spatially averaged weighting factor F in (0, 1/sqrt(3)]
rescales the ideal g0.

Field maps are real-valued amplitude snapshots on a regular grid with an
arbitrary linear scale; every output is built scale invariant, so the
normalization convention of whatever solver produced the map is
irrelevant.  All sums are cell-centered midpoint sums with no
interpolation, matching the usual FDTD export convention.
"""

from __future__ import annotations

import json
import math
import warnings
from dataclasses import dataclass

import numpy as np

from .units import C0, DEBYE, EPS0, HBAR, to_angular

__all__ = [
    "FieldGrid", "EmitterDipole", "WeightingConfig", "CouplingEstimate",
    "mode_volume", "normalized_mode_volume", "zero_point_field",
    "dipole_from_lifetime", "to_debye", "g0_ideal", "ideal_coupling",
    "ensemble_weighting_factor", "effective_g0",
    "save_field_grid", "load_field_grid", "DEFAULT_REGION_M",
]

#: Default averaging region (m): a box around the cavity center.
DEFAULT_REGION_M = ((-400e-9, 400e-9), (-150e-9, 150e-9), (-100e-9, 100e-9))


@dataclass(frozen=True)
class FieldGrid:
    """Sampled cavity mode: E field (nx, ny, nz, 3) and relative permittivity.

    Sample points sit at origin + index * spacing on each axis and own one
    cell of volume dx*dy*dz each (cell-centered convention).
    """

    e_field: np.ndarray
    eps_rel: np.ndarray
    spacing_m: tuple
    origin_m: tuple = (0.0, 0.0, 0.0)

    def __post_init__(self):
        e = np.asarray(self.e_field, dtype=float)
        eps = np.asarray(self.eps_rel, dtype=float)
        if e.ndim != 4 or e.shape[-1] != 3:
            raise ValueError(f"e_field must have shape (nx, ny, nz, 3), got {e.shape}")
        if eps.shape != e.shape[:3]:
            raise ValueError("eps_rel shape must match the grid dims")
        if any(n < 2 for n in e.shape[:3]):
            raise ValueError(f"grid must have >= 2 points per axis, got {e.shape[:3]}")
        if len(self.spacing_m) != 3 or any(not (s > 0.0) for s in self.spacing_m):
            raise ValueError(f"spacing must be three positive lengths, got {self.spacing_m}")
        if not (np.all(np.isfinite(e)) and np.all(np.isfinite(eps))):
            raise ValueError("field and permittivity must be finite")
        if np.any(eps < 1.0):
            raise ValueError("relative permittivity must be >= 1 everywhere")
        e.flags.writeable = False
        eps.flags.writeable = False
        object.__setattr__(self, "e_field", e)
        object.__setattr__(self, "eps_rel", eps)
        object.__setattr__(self, "spacing_m", tuple(float(s) for s in self.spacing_m))
        object.__setattr__(self, "origin_m", tuple(float(o) for o in self.origin_m))
        if self.e_mag2.max() > 0.0 and (
                np.argmax(self.energy_density) != np.argmax(self.e_mag2)):
            warnings.warn(
                "maximum of eps*|E|^2 and maximum of |E| sit at different grid "
                "points; the zero-point normalization assumes they coincide",
                stacklevel=2)

    @property
    def dims(self) -> tuple:
        return self.e_field.shape[:3]

    @property
    def e_mag2(self) -> np.ndarray:
        return np.sum(self.e_field ** 2, axis=-1)

    @property
    def energy_density(self) -> np.ndarray:
        """eps * |E|^2 on the grid (arbitrary units)."""
        return self.eps_rel * self.e_mag2

    @property
    def cell_volume_m3(self) -> float:
        dx, dy, dz = self.spacing_m
        return dx * dy * dz

    def axes(self):
        return tuple(self.origin_m[i] + self.spacing_m[i] * np.arange(self.dims[i])
                     for i in range(3))

    def argmax_energy(self) -> tuple:
        """Grid index of max eps*|E|^2; ties break at the lowest linear index."""
        return np.unravel_index(int(np.argmax(self.energy_density)), self.dims)


@dataclass(frozen=True)
class EmitterDipole:
    """Transition dipole data derived from a lifetime and transition frequency."""

    tau1_s: float
    nu_hz: float
    eta_dw: float

    def __post_init__(self):
        if not (self.tau1_s > 0.0 and self.nu_hz > 0.0):
            raise ValueError("lifetime and frequency must be > 0")
        if not (0.0 < self.eta_dw <= 1.0):
            raise ValueError(f"eta_dw must lie in (0, 1], got {self.eta_dw!r}")

    @property
    def d_perp_cm(self) -> float:
        """Total transition dipole moment in C m."""
        return dipole_from_lifetime(self.tau1_s, self.nu_hz)

    @property
    def d_perp_zpl_cm(self) -> float:
        """ZPL-projected dipole moment, sqrt(eta_dw) * d_perp."""
        return math.sqrt(self.eta_dw) * self.d_perp_cm

    @property
    def d_perp_debye(self) -> float:
        return to_debye(self.d_perp_cm)

    @property
    def d_perp_zpl_debye(self) -> float:
        return to_debye(self.d_perp_zpl_cm)


@dataclass(frozen=True)
class WeightingConfig:
    """Threshold model for the ensemble average: emitters below
    threshold_fraction * |E_max| get zero weight; the average runs over an
    axis-aligned box (region_m) around the cavity center."""

    threshold_fraction: float = 0.0
    region_m: tuple = DEFAULT_REGION_M

    def __post_init__(self):
        if not (0.0 <= self.threshold_fraction < 1.0):
            raise ValueError(
                f"threshold_fraction must lie in [0, 1), got {self.threshold_fraction!r}")
        if len(self.region_m) != 3 or any(len(b) != 2 or not (b[0] < b[1])
                                          for b in self.region_m):
            raise ValueError("region_m must be ((x0,x1),(y0,y1),(z0,z1)) with lo < hi")


def mode_volume(grid: FieldGrid) -> float:
    """V = sum(eps |E|^2 dV) / max(eps |E|^2), midpoint sum over all cells."""
    w = grid.energy_density
    w_max = float(np.max(w))
    if w_max <= 0.0:
        raise ValueError("field is identically zero; mode volume undefined")
    return float(np.sum(w)) * grid.cell_volume_m3 / w_max


def normalized_mode_volume(v_m3: float, wavelength_m: float, n_index: float) -> float:
    """Mode volume in units of (lambda/n)^3."""
    if not (wavelength_m > 0.0 and n_index > 0.0):
        raise ValueError("wavelength and index must be > 0")
    return v_m3 / (wavelength_m / n_index) ** 3


def zero_point_field(nu_c_hz: float, eps_rel_at_max: float, v_mode_m3: float) -> float:
    """E_zpf = sqrt(hbar w_c / (2 eps eps0 V_mode)) in V/m."""
    if not (nu_c_hz > 0.0 and eps_rel_at_max > 0.0 and v_mode_m3 > 0.0):
        raise ValueError("frequency, permittivity and mode volume must be > 0")
    omega = to_angular(nu_c_hz)
    return math.sqrt(HBAR * omega / (2.0 * eps_rel_at_max * EPS0 * v_mode_m3))


def dipole_from_lifetime(tau1_s: float, nu_hz: float) -> float:
    """Transition dipole moment (C m) from the spontaneous-emission rate.

    d = sqrt(3 pi eps0 hbar c^3 gamma1 / omega^3) with gamma1 = 1/tau1.
    """
    if not (tau1_s > 0.0 and nu_hz > 0.0):
        raise ValueError("lifetime and frequency must be > 0")
    gamma1 = 1.0 / tau1_s
    omega = to_angular(nu_hz)
    return math.sqrt(3.0 * math.pi * EPS0 * HBAR * C0 ** 3 * gamma1 / omega ** 3)


def to_debye(d_cm: float) -> float:
    """Dipole moment C m -> Debye."""
    return d_cm / DEBYE


def g0_ideal(d_zpl_cm: float, e_zpf_v_per_m: float) -> float:
    """Ideal vacuum coupling rate as an ordinary frequency: d E / (2 pi hbar)."""
    if d_zpl_cm < 0.0 or e_zpf_v_per_m < 0.0:
        raise ValueError("dipole moment and field amplitude must be >= 0")
    return d_zpl_cm * e_zpf_v_per_m / (2.0 * math.pi * HBAR)


@dataclass(frozen=True)
class CouplingEstimate:
    """Composed dipole -> E_zpf -> g0 chain for one eta_dw value."""

    d_perp_cm: float
    d_zpl_cm: float
    e_zpf_v_per_m: float
    g0_hz: float
    v_mode_m3: float


def ideal_coupling(tau1_s: float, nu_hz: float, eta_dw: float,
                   v_mode_m3: float | None = None,
                   v_mode_normalized: float | None = None,
                   eps_rel_at_max: float = 5.7) -> CouplingEstimate:
    """Full chain from (lifetime, frequency, eta_dw, mode volume) to g0.

    The mode volume may be given in m^3 or in units of (lambda/n)^3 with
    n = sqrt(eps_rel_at_max); exactly one of the two must be supplied.
    """
    if (v_mode_m3 is None) == (v_mode_normalized is None):
        raise ValueError("give exactly one of v_mode_m3 or v_mode_normalized")
    if v_mode_m3 is None:
        lam = C0 / nu_hz
        v_mode_m3 = v_mode_normalized * (lam / math.sqrt(eps_rel_at_max)) ** 3
    dip = EmitterDipole(tau1_s=tau1_s, nu_hz=nu_hz, eta_dw=eta_dw)
    e_zpf = zero_point_field(nu_hz, eps_rel_at_max, v_mode_m3)
    return CouplingEstimate(
        d_perp_cm=dip.d_perp_cm, d_zpl_cm=dip.d_perp_zpl_cm,
        e_zpf_v_per_m=e_zpf, g0_hz=g0_ideal(dip.d_perp_zpl_cm, e_zpf),
        v_mode_m3=v_mode_m3)


def ensemble_weighting_factor(grid: FieldGrid, cfg: WeightingConfig) -> float:
    """Spatially averaged coupling reduction F in (0, 1/sqrt(3)].

    With f_i = E(r_i)/E_max componentwise, weights
    w_i = max(|E_i| - threshold*E_max, 0)/E_max and p_i = w_i/sum(w), the
    factor is sqrt(sum_i p_i (f_x^2 + f_y^2 + f_z^2)/3).  The 1/3 comes from
    an isotropic dipole-orientation average, which caps F at 1/sqrt(3).
    """
    axes = grid.axes()
    masks = [(ax >= lo) & (ax <= hi) for ax, (lo, hi) in zip(axes, cfg.region_m)]
    if not all(m.any() for m in masks):
        raise ValueError("averaging region does not intersect the grid")
    sub_e2 = grid.e_mag2[np.ix_(*masks)]
    sub_energy = grid.energy_density[np.ix_(*masks)]
    # E_max is read at the energy-density maximum (first index on ties)
    e_max = math.sqrt(float(sub_e2.reshape(-1)[int(np.argmax(sub_energy))]))
    if e_max <= 0.0:
        raise ValueError("field is zero everywhere in the region")
    e_mag = np.sqrt(sub_e2.reshape(-1))
    w = np.maximum(e_mag - cfg.threshold_fraction * e_max, 0.0) / e_max
    w_sum = float(np.sum(w))
    if w_sum <= 0.0:
        raise ValueError("threshold excludes all emitters in the region")
    p = w / w_sum
    f2 = (e_mag / e_max) ** 2
    return float(math.sqrt(float(np.sum(p * f2)) / 3.0))


def effective_g0(g0_hz: float, weighting: float) -> float:
    """Ensemble-effective coupling rate g0 * F."""
    if not (0.0 <= weighting <= 1.0):
        raise ValueError(f"weighting factor must lie in [0, 1], got {weighting!r}")
    if g0_hz < 0.0:
        raise ValueError("g0 must be >= 0")
    return g0_hz * weighting


# ---------------------------------------------------------------------------
# Field-map file format: one JSON header line, then (ex, ey, ez, eps_rel)
# per grid point in C order, as CSV text or raw little-endian float64.
# ---------------------------------------------------------------------------

def save_field_grid(grid: FieldGrid, path, encoding: str = "f64"):
    if encoding not in ("f64", "csv"):
        raise ValueError(f"encoding must be 'f64' or 'csv', got {encoding!r}")
    header = {
        "schema_version": 1,
        "dims": list(grid.dims),
        "spacing_m": list(grid.spacing_m),
        "origin_m": list(grid.origin_m),
        "encoding": encoding,
        "columns": ["ex", "ey", "ez", "eps_rel"],
        "units": {"e": "arbitrary", "eps_rel": "dimensionless", "length": "m"},
    }
    body = np.concatenate(
        [grid.e_field.reshape(-1, 3), grid.eps_rel.reshape(-1, 1)], axis=1)
    with open(path, "wb") as fh:
        fh.write((json.dumps(header, sort_keys=True) + "\n").encode())
        if encoding == "f64":
            fh.write(body.astype("<f8").tobytes())
        else:
            lines = [",".join(repr(float(x)) for x in row) for row in body]
            fh.write(("\n".join(lines) + "\n").encode())


def load_field_grid(path) -> FieldGrid:
    with open(path, "rb") as fh:
        raw = fh.read()
    nl = raw.find(b"\n")
    if nl < 0:
        raise ValueError("missing header line")
    try:
        header = json.loads(raw[:nl].decode())
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise ValueError(f"line 1: malformed JSON header ({exc})") from None
    for key in ("dims", "spacing_m", "encoding"):
        if key not in header:
            raise ValueError(f"line 1: header missing required key {key!r}")
    nx, ny, nz = (int(n) for n in header["dims"])
    n_points = nx * ny * nz
    body = raw[nl + 1:]
    if header["encoding"] == "f64":
        expected = n_points * 4 * 8
        if len(body) != expected:
            raise ValueError(
                f"body holds {len(body)} bytes, expected exactly {expected} "
                f"({n_points} points x 4 float64 columns)")
        data = np.frombuffer(body, dtype="<f8").reshape(n_points, 4)
    elif header["encoding"] == "csv":
        rows = []
        for lineno, line in enumerate(body.decode().splitlines(), start=2):
            if not line.strip():
                continue
            parts = line.split(",")
            if len(parts) != 4:
                raise ValueError(
                    f"line {lineno}: expected 4 comma-separated values, got {len(parts)}")
            try:
                rows.append([float(p) for p in parts])
            except ValueError:
                bad = next(i for i, p in enumerate(parts)
                           if not _is_float(p))
                raise ValueError(
                    f"line {lineno}, column {bad + 1}: not a number: {parts[bad]!r}"
                ) from None
        if len(rows) != n_points:
            raise ValueError(
                f"body holds {len(rows)} rows, expected exactly {n_points}")
        data = np.array(rows)
    else:
        raise ValueError(f"line 1: unknown encoding {header['encoding']!r}")
    return FieldGrid(
        e_field=data[:, :3].reshape(nx, ny, nz, 3),
        eps_rel=data[:, 3].reshape(nx, ny, nz),
        spacing_m=tuple(header["spacing_m"]),
        origin_m=tuple(header.get("origin_m", (0.0, 0.0, 0.0))))


def _is_float(s: str) -> bool:
    try:
        float(s)
        return True
    except ValueError:
        return False
