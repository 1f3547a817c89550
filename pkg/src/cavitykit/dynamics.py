"""Open-system dynamics of a two-level emitter coupled to a lossy cavity.

The model is the damped Jaynes-Cummings system in the frame rotating at the
cavity frequency,

    H/hbar = -Delta_a s+ s  +  g0 (s+ c + s c+),      Delta_a = w_c - w_a,

with Lindblad dissipators gamma1 D[s] (emitter decay), 2 gamma_phi D[s+ s]
(pure dephasing) and kappa D[c] (cavity loss).  The excited-state
population <s+ s>(t) starting from |e, 0> is the simulated observable.

Frequency conventions: g0, kappa and the detuning are ordinary frequencies
in Hz (the values experiments report as g0/2pi etc.) and are multiplied by
2pi internally; gamma1 and gamma_phi are plain rates in 1/s.  Getting this
wrong changes the cooperativity C = 4 g0^2/(kappa gamma1) by 2pi, so the
conversion lives in exactly one place: the Liouvillian builder.

The generator is time independent and tiny, so the default propagation is
an exact matrix exponential per unique grid spacing.  An adaptive
Dormand-Prince 5(4) path (method="rk45") and a fixed-step fallback at
dt = 0.1/kappa (method="fixed") integrate the same Liouvillian and are
cross-checked in the test suite; they are the right tool when kappa is not
many orders above gamma1.
"""

from __future__ import annotations

import ast
import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np
from scipy.linalg import expm

from .ode import IntegrationError, integrate_adaptive, integrate_fixed
from .units import to_angular

__all__ = [
    "AtomCavityParams", "DensityState", "DecayTrace", "RateEstimate",
    "evolve_master_equation", "analytic_total_rate", "tau_of_detuning",
    "extract_decay_rate", "sweep_detunings", "save_decay_trace",
    "load_decay_trace", "decay_trace_to_csv", "decay_trace_from_csv",
]


@dataclass(frozen=True)
class AtomCavityParams:
    """Emitter-cavity model parameters.

    g0_hz, kappa_hz, delta_hz are ordinary frequencies (Hz); delta_hz is the
    signed cavity-minus-emitter detuning.  gamma1 and gamma_phi are rates in
    1/s.  The transverse decoherence rate gamma2 = gamma1/2 + gamma_phi is
    derived, never stored.
    """

    g0_hz: float
    kappa_hz: float
    gamma1: float
    gamma_phi: float = 0.0
    delta_hz: float = 0.0

    def __post_init__(self):
        for name in ("g0_hz", "kappa_hz", "gamma1", "gamma_phi"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v >= 0.0):
                raise ValueError(f"{name} must be finite and >= 0, got {v!r}")
        if not math.isfinite(self.delta_hz):
            raise ValueError(f"delta_hz must be finite, got {self.delta_hz!r}")

    @property
    def gamma2(self) -> float:
        return 0.5 * self.gamma1 + self.gamma_phi

    @property
    def tau1_s(self) -> float:
        if self.gamma1 <= 0.0:
            raise ValueError("gamma1 is zero; lifetime undefined")
        return 1.0 / self.gamma1

    @property
    def cooperativity(self) -> float:
        """C = 4 g0^2 / (kappa gamma1), with g0 and kappa as angular rates."""
        if self.kappa_hz <= 0.0 or self.gamma1 <= 0.0:
            raise ValueError("cooperativity requires kappa > 0 and gamma1 > 0")
        g = to_angular(self.g0_hz)
        k = to_angular(self.kappa_hz)
        return 4.0 * g * g / (k * self.gamma1)

    def detuned(self, delta_hz: float) -> "AtomCavityParams":
        return AtomCavityParams(self.g0_hz, self.kappa_hz, self.gamma1,
                                self.gamma_phi, delta_hz)


@dataclass(frozen=True)
class DensityState:
    """Density matrix on (two-level atom) x (Fock space truncated at n_max)."""

    matrix: np.ndarray
    n_max: int

    def trace_deviation(self) -> float:
        return abs(complex(np.trace(self.matrix)) - 1.0)

    def hermiticity_deviation(self) -> float:
        return float(np.max(np.abs(self.matrix - self.matrix.conj().T)))

    def min_eigenvalue(self) -> float:
        return float(np.linalg.eigvalsh(0.5 * (self.matrix + self.matrix.conj().T))[0])

    def validate(self, tol: float = 1e-9):
        problems = []
        if self.trace_deviation() > 10.0 * tol:
            problems.append(f"trace deviates by {self.trace_deviation():.3e}")
        if self.hermiticity_deviation() > 10.0 * tol:
            problems.append(f"non-Hermitian by {self.hermiticity_deviation():.3e}")
        if self.min_eigenvalue() < -100.0 * tol:
            problems.append(f"negative eigenvalue {self.min_eigenvalue():.3e}")
        if problems:
            raise ValueError("invalid density matrix: " + "; ".join(problems))


@dataclass(frozen=True)
class DecayTrace:
    """Time-binned excited-state population (simulated) or counts (measured)."""

    times: np.ndarray
    values: np.ndarray
    kind: str = "simulated"
    bin_width_s: float | None = None
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        t = np.asarray(self.times, dtype=float)
        v = np.asarray(self.values, dtype=float)
        if t.ndim != 1 or t.shape != v.shape or len(t) == 0:
            raise ValueError("times and values must be equal-length 1-D arrays")
        if np.any(~np.isfinite(t)) or np.any(~np.isfinite(v)):
            raise ValueError("times and values must be finite")
        if np.any(np.diff(t) <= 0.0):
            raise ValueError("times must be strictly increasing")
        if self.kind not in ("simulated", "measured"):
            raise ValueError(f"kind must be 'simulated' or 'measured', got {self.kind!r}")
        if np.any(v < -1e-9 * max(1.0, float(np.max(np.abs(v))))):
            raise ValueError("values must be >= 0")
        v = np.maximum(v, 0.0)
        if self.kind == "simulated" and np.any(v > 1.0 + 1e-6):
            raise ValueError("simulated populations must be <= 1")
        if self.bin_width_s is not None and not (self.bin_width_s > 0.0):
            raise ValueError("bin_width_s must be > 0 when given")
        t.flags.writeable = False
        v.flags.writeable = False
        object.__setattr__(self, "times", t)
        object.__setattr__(self, "values", v)

    def __len__(self) -> int:
        return len(self.times)


# ---------------------------------------------------------------------------
# Liouvillian construction
# ---------------------------------------------------------------------------

def _operators(n_max: int):
    """(sigma, sigma+sigma, c) on the product space, atom basis (g, e)."""
    dim_c = n_max + 1
    lower_atom = np.array([[0.0, 1.0], [0.0, 0.0]], dtype=complex)  # |g><e|
    a = np.diag(np.sqrt(np.arange(1, dim_c)), 1).astype(complex)
    eye_c = np.eye(dim_c, dtype=complex)
    eye_a = np.eye(2, dtype=complex)
    sigma = np.kron(lower_atom, eye_c)
    c = np.kron(eye_a, a)
    return sigma, sigma.conj().T @ sigma, c


def _lindblad_term(op: np.ndarray) -> np.ndarray:
    """Row-stacking superoperator matrix of D[op]."""
    d = op.shape[0]
    eye = np.eye(d, dtype=complex)
    opd_op = op.conj().T @ op
    return (np.kron(op, op.conj())
            - 0.5 * np.kron(opd_op, eye)
            - 0.5 * np.kron(eye, opd_op.T))


def liouvillian(params: AtomCavityParams, n_max: int) -> np.ndarray:
    """Master-equation generator as a matrix acting on row-stacked rho."""
    if n_max < 1:
        raise ValueError(f"n_max must be >= 1, got {n_max}")
    sigma, proj_e, c = _operators(n_max)
    g = to_angular(params.g0_hz)
    kappa = to_angular(params.kappa_hz)
    delta = to_angular(params.delta_hz)
    h = -delta * proj_e + g * (sigma.conj().T @ c + sigma @ c.conj().T)
    d = h.shape[0]
    eye = np.eye(d, dtype=complex)
    liou = -1j * (np.kron(h, eye) - np.kron(eye, h.T))
    liou += params.gamma1 * _lindblad_term(sigma)
    if params.gamma_phi > 0.0:
        liou += 2.0 * params.gamma_phi * _lindblad_term(proj_e)
    if kappa > 0.0:
        liou += kappa * _lindblad_term(c)
    return liou


def _initial_state(n_max: int) -> np.ndarray:
    """|e, 0><e, 0| as a density matrix."""
    dim = 2 * (n_max + 1)
    rho0 = np.zeros((dim, dim), dtype=complex)
    rho0[n_max + 1, n_max + 1] = 1.0  # atom excited, cavity vacuum
    return rho0


def _propagate_expm(liou, v0, t_grid):
    out = np.empty((len(t_grid), len(v0)), dtype=complex)
    out[0] = v0
    props = {}
    v = v0
    for i, dt in enumerate(np.diff(np.asarray(t_grid, dtype=float))):
        key = float(np.format_float_scientific(dt, precision=12))
        prop = props.get(key)
        if prop is None:
            prop = expm(liou * dt)
            props[key] = prop
        v = prop @ v
        out[i + 1] = v
    return out


def evolve_master_equation(params: AtomCavityParams, n_max: int = 1,
                           t_grid=None, rel_tol: float = 1e-8,
                           method: str = "auto", return_states: bool = False,
                           max_steps: int = 2_000_000):
    """Excited-state population <s+ s>(t) from |e, 0> on the given time grid.

    method:
      "auto"/"expm"  exact matrix-exponential propagation (default)
      "rk45"         adaptive Dormand-Prince 5(4) at relative tolerance rel_tol
      "fixed"        fixed-step sweep at dt = 0.1 / kappa (angular)

    The trace of rho is checked to 10*rel_tol at every output time.  With
    return_states=True, also returns the list of DensityState snapshots.
    """
    if not (rel_tol > 0.0):
        raise ValueError("rel_tol must be > 0")
    if t_grid is None:
        t_grid = np.linspace(0.0, 5.0 * params.tau1_s, 251)
    t_grid = np.asarray(t_grid, dtype=float)
    if t_grid.ndim != 1 or len(t_grid) < 2:
        raise ValueError("t_grid must contain at least two times")
    if np.any(np.diff(t_grid) <= 0.0):
        raise ValueError("t_grid must be strictly increasing")

    liou = liouvillian(params, n_max)
    rho0 = _initial_state(n_max)
    v0 = rho0.reshape(-1)

    if method in ("auto", "expm"):
        vs = _propagate_expm(liou, v0, t_grid)
    elif method == "rk45":
        vs = integrate_adaptive(lambda t, y: liou @ y, v0, t_grid,
                                rtol=rel_tol, atol=1e-3 * rel_tol,
                                max_steps=max_steps)
    elif method == "fixed":
        scale = max(to_angular(params.kappa_hz), to_angular(params.g0_hz),
                    params.gamma1 + 2.0 * params.gamma_phi,
                    1.0 / (t_grid[-1] - t_grid[0]))
        vs = integrate_fixed(lambda t, y: liou @ y, v0, t_grid,
                             dt=0.1 / scale, max_steps=max_steps)
    else:
        raise ValueError(f"unknown method {method!r}")

    dim = rho0.shape[0]
    rhos = vs.reshape(len(t_grid), dim, dim)
    traces = np.einsum("kii->k", rhos).real
    if np.max(np.abs(traces - 1.0)) > 10.0 * rel_tol:
        worst = int(np.argmax(np.abs(traces - 1.0)))
        raise IntegrationError(
            f"trace not preserved: |tr rho - 1| = {abs(traces[worst]-1.0):.3e} "
            f"at t = {t_grid[worst]:.6e}", last_time=float(t_grid[worst]))

    excited = np.arange(n_max + 1, dim)
    values = np.einsum("kii->ki", rhos)[:, excited].sum(axis=1).real
    values = np.clip(values, 0.0, None)

    diffs = np.diff(t_grid)
    bin_width = float(diffs[0]) if np.allclose(diffs, diffs[0], rtol=1e-9) else None
    trace = DecayTrace(
        times=t_grid, values=np.minimum(values, 1.0), kind="simulated",
        bin_width_s=bin_width,
        meta={"g0_hz": params.g0_hz, "kappa_hz": params.kappa_hz,
              "gamma1_per_s": params.gamma1, "gamma_phi_per_s": params.gamma_phi,
              "delta_hz": params.delta_hz, "n_max": n_max, "rel_tol": rel_tol,
              "method": method})
    if return_states:
        states = [DensityState(matrix=rhos[i], n_max=n_max)
                  for i in range(len(t_grid))]
        return trace, states
    return trace


def analytic_total_rate(params: AtomCavityParams) -> float:
    """Weak-excitation population decay rate gamma1 + g^2 kappa / ((kappa/2)^2 + Delta^2).

    All frequencies enter as angular rates; the cavity is adiabatically
    eliminated, which is accurate for kappa well above g0 and gamma1.
    """
    if params.kappa_hz <= 0.0:
        raise ValueError("analytic rate requires kappa > 0")
    g = to_angular(params.g0_hz)
    k = to_angular(params.kappa_hz)
    d = to_angular(params.delta_hz)
    return params.gamma1 + g * g * k / ((0.5 * k) ** 2 + d ** 2)


def tau_of_detuning(c: float, kappa_hz: float, tau1_s: float, delta_hz):
    """tau(Delta) = tau1 / (C f(Delta) + 1) with f = 1 / (1 + 4 Delta^2/kappa^2).

    delta_hz may be a scalar or an array; kappa and Delta only enter as a
    ratio, so any consistent frequency convention works.
    """
    if not (c >= 0.0):
        raise ValueError(f"C must be >= 0, got {c!r}")
    if not (kappa_hz > 0.0):
        raise ValueError(f"kappa must be > 0, got {kappa_hz!r}")
    if not (tau1_s > 0.0):
        raise ValueError(f"tau1 must be > 0, got {tau1_s!r}")
    delta = np.asarray(delta_hz, dtype=float)
    f = 1.0 / (1.0 + 4.0 * (delta / kappa_hz) ** 2)
    tau = tau1_s / (c * f + 1.0)
    return float(tau) if np.isscalar(delta_hz) else tau


def sweep_detunings(params: AtomCavityParams, deltas_hz, **kwargs) -> dict:
    """Independent evolutions per detuning, keyed by the detuning value."""
    return {float(d): evolve_master_equation(params.detuned(float(d)), **kwargs)
            for d in deltas_hz}


# ---------------------------------------------------------------------------
# Rate extraction from traces
# ---------------------------------------------------------------------------

class RateEstimate(NamedTuple):
    rate: float           # 1/s
    stderr: float         # 1/s
    window: tuple         # (t_start, t_end) actually used
    n_points: int
    curved: bool          # True when log-residual curvature is significant
    warnings: tuple = ()


def _weighted_polyfit(u, ly, w, order):
    """Weighted LS fit of ly on powers of u; returns (coeffs, stderr, chisq)."""
    x = np.vander(u, order + 1, increasing=True)
    sw = np.sqrt(w)
    coeffs, *_ = np.linalg.lstsq(sw[:, None] * x, sw * ly, rcond=None)
    resid = ly - x @ coeffs
    chisq = float(np.sum(w * resid ** 2))
    dof = max(len(u) - (order + 1), 1)
    cov = np.linalg.pinv(x.T @ (w[:, None] * x)) * (chisq / dof)
    return coeffs, np.sqrt(np.maximum(np.diag(cov), 0.0)), chisq


def _coarse_lifetime(t, y):
    pos = y > max(1e-3 * float(np.max(y)), 0.0)
    if pos.sum() < 3:
        pos = y > 0
    if pos.sum() < 2:
        return t[-1] - t[0]
    slope = np.polyfit(t[pos], np.log(y[pos]), 1)[0]
    if slope >= 0.0:
        return t[-1] - t[0]
    return min(-1.0 / slope, (t[-1] - t[0]))


def extract_decay_rate(trace: DecayTrace, window=None,
                       on_nonpositive: str = "shrink") -> RateEstimate:
    """Decay rate from a weighted linear regression of log(values).

    The default window is [0.5, 3] times a coarse single-exponential
    lifetime estimate.  Measured traces get Poisson-motivated weights
    (w = counts, since var log y ~ 1/y); simulated traces are unweighted.
    Non-positive samples inside the window are dropped with a warning, or
    raise when on_nonpositive="error".  A significant quadratic term in the
    log-residuals sets ``curved`` (single-exponential model inadequate).
    """
    t = trace.times
    y = trace.values
    if window is None:
        tau_est = _coarse_lifetime(t, y)
        window = (t[0] + 0.5 * tau_est, t[0] + 3.0 * tau_est)
    t0, t1 = float(window[0]), float(window[1])
    sel = (t >= t0) & (t <= t1)
    notes = []
    bad = sel & (y <= 0.0)
    if np.any(bad):
        if on_nonpositive == "error":
            raise ValueError(f"{int(bad.sum())} non-positive samples in window")
        notes.append(f"dropped {int(bad.sum())} non-positive samples in window")
        sel &= y > 0.0
    if int(sel.sum()) < 10:
        raise ValueError("window must contain at least 10 positive samples")

    tt = t[sel]
    ly = np.log(y[sel])
    w = y[sel].copy() if trace.kind == "measured" else np.ones(int(sel.sum()))

    # center and scale the abscissa so the quadratic fit stays conditioned
    t_mid = 0.5 * (tt[0] + tt[-1])
    t_scale = max(0.5 * (tt[-1] - tt[0]), 1e-300)
    u = (tt - t_mid) / t_scale

    lin, lin_err, _ = _weighted_polyfit(u, ly, w, order=1)
    slope = lin[1] / t_scale
    slope_err = lin_err[1] / t_scale

    quad, quad_err, _ = _weighted_polyfit(u, ly, w, order=2)
    c2 = quad[2] / t_scale ** 2
    c2_err = quad_err[2] / t_scale ** 2
    span = tt[-1] - tt[0]
    # flag when the local slope varies by > 5% across the window and the
    # quadratic term is statistically significant
    curved = (abs(2.0 * c2 * span) > 0.05 * abs(slope)
              and abs(c2) > 3.0 * c2_err)

    return RateEstimate(rate=-slope, stderr=slope_err,
                        window=(t0, t1), n_points=int(sel.sum()),
                        curved=bool(curved), warnings=tuple(notes))


# ---------------------------------------------------------------------------
# DecayTrace CSV round-trip
# ---------------------------------------------------------------------------

def decay_trace_to_csv(trace: DecayTrace) -> str:
    lines = ["# decay-trace schema_version=1",
             f"# kind={trace.kind}"]
    if trace.bin_width_s is not None:
        lines.append(f"# bin_width_s={float(trace.bin_width_s)!r}")
    for key in sorted(trace.meta):
        val = trace.meta[key]
        if isinstance(val, (float, np.floating)):
            val = float(val)
        elif isinstance(val, (int, np.integer)):
            val = int(val)
        lines.append(f"# {key}={val!r}")
    lines.append("time_s,value")
    for t, v in zip(trace.times, trace.values):
        lines.append(f"{float(t)!r},{float(v)!r}")
    return "\n".join(lines) + "\n"


def decay_trace_from_csv(text: str) -> DecayTrace:
    kind = "simulated"
    bin_width = None
    meta = {}
    times, values = [], []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            body = line[1:].strip()
            if "=" in body and not body.startswith("decay-trace"):
                key, _, val = body.partition("=")
                key = key.strip()
                if key == "kind":
                    kind = val.strip()
                elif key == "bin_width_s":
                    bin_width = float(val)
                else:
                    try:
                        meta[key] = ast.literal_eval(val.strip())
                    except (ValueError, SyntaxError):
                        meta[key] = val.strip()
            continue
        if line.lower().startswith("time_s"):
            continue
        parts = line.split(",")
        if len(parts) != 2:
            raise ValueError(f"line {lineno}: expected 'time_s,value', got {raw!r}")
        try:
            times.append(float(parts[0]))
            values.append(float(parts[1]))
        except ValueError as exc:
            raise ValueError(f"line {lineno}: {exc}") from None
    if not times:
        raise ValueError("no data rows found")
    return DecayTrace(times=np.array(times), values=np.array(values),
                      kind=kind, bin_width_s=bin_width, meta=meta)


def save_decay_trace(trace: DecayTrace, path):
    with open(path, "w") as fh:
        fh.write(decay_trace_to_csv(trace))


def load_decay_trace(path) -> DecayTrace:
    with open(path) as fh:
        return decay_trace_from_csv(fh.read())
