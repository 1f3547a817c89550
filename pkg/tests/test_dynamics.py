import math

import numpy as np
import pytest

from cavitykit.dynamics import (
    AtomCavityParams, DecayTrace, analytic_total_rate, decay_trace_from_csv,
    decay_trace_to_csv, evolve_master_equation, extract_decay_rate,
    sweep_detunings, tau_of_detuning,
)
from cavitykit.ode import IntegrationError

# device-regime reference parameters used throughout
P_REF = AtomCavityParams(g0_hz=0.57e9, kappa_hz=940e9, gamma1=1.0 / 15.9e-9)


def test_params_derived_quantities():
    p = AtomCavityParams(g0_hz=1e9, kappa_hz=1e12, gamma1=5e7, gamma_phi=2e7)
    assert p.gamma2 == pytest.approx(0.5 * 5e7 + 2e7, rel=1e-15)
    assert p.tau1_s == pytest.approx(2e-8, rel=1e-15)
    assert p.detuned(3e9).delta_hz == 3e9
    assert p.detuned(3e9).g0_hz == p.g0_hz


def test_params_validation():
    with pytest.raises(ValueError):
        AtomCavityParams(g0_hz=-1.0, kappa_hz=1e9, gamma1=1e7)
    with pytest.raises(ValueError):
        AtomCavityParams(g0_hz=1e9, kappa_hz=1e9, gamma1=-1e7)
    with pytest.raises(ValueError):
        AtomCavityParams(g0_hz=1e9, kappa_hz=1e9, gamma1=1e7,
                         delta_hz=float("nan"))


def test_cooperativity_uses_angular_convention():
    # C = 4 (2 pi g0)^2 / ((2 pi kappa) gamma1), written out independently
    g_ang = 2.0 * math.pi * P_REF.g0_hz
    k_ang = 2.0 * math.pi * P_REF.kappa_hz
    expected = 4.0 * g_ang ** 2 / (k_ang * P_REF.gamma1)
    assert P_REF.cooperativity == pytest.approx(expected, rel=1e-14)
    assert P_REF.cooperativity == pytest.approx(0.14, rel=0.02)


def test_uncoupled_atom_decays_exponentially():
    p = AtomCavityParams(g0_hz=0.0, kappa_hz=940e9, gamma1=1.0 / 15.9e-9)
    t = np.linspace(0.0, 5 * 15.9e-9, 128)
    trace = evolve_master_equation(p, t_grid=t, rel_tol=1e-9)
    assert np.max(np.abs(trace.values - np.exp(-p.gamma1 * t))) < 1e-8


def test_uncoupled_atom_rk45():
    # moderate kappa keeps the explicit integrator honest and quick
    p = AtomCavityParams(g0_hz=0.0, kappa_hz=30e6, gamma1=1.0 / 50e-9)
    t = np.linspace(0.0, 5 * 50e-9, 64)
    trace = evolve_master_equation(p, t_grid=t, method="rk45", rel_tol=1e-10)
    assert np.max(np.abs(trace.values - np.exp(-p.gamma1 * t))) < 1e-8


def test_single_excitation_closure():
    # the initial state holds one excitation and nothing pumps the system,
    # so truncating the Fock space at 1 or 2 photons cannot differ
    t = np.linspace(0.0, 4 * P_REF.tau1_s, 64)
    tr1 = evolve_master_equation(P_REF.detuned(200e9), n_max=1, t_grid=t)
    tr2 = evolve_master_equation(P_REF.detuned(200e9), n_max=2, t_grid=t)
    assert np.max(np.abs(tr1.values - tr2.values)) < 1e-8


def test_rk45_and_fixed_match_expm():
    p = AtomCavityParams(g0_hz=5e6, kappa_hz=1e9, gamma1=1e7, delta_hz=3e8)
    t = np.linspace(0.0, 2e-7, 41)
    ref = evolve_master_equation(p, t_grid=t, method="expm")
    rk = evolve_master_equation(p, t_grid=t, method="rk45", rel_tol=1e-9)
    assert np.max(np.abs(ref.values - rk.values)) < 1e-7
    fixed = evolve_master_equation(p, t_grid=t[:11], method="fixed")
    assert np.max(np.abs(ref.values[:11] - fixed.values)) < 1e-7


def test_rk45_step_budget_error():
    p = AtomCavityParams(g0_hz=5e6, kappa_hz=1e9, gamma1=1e7)
    with pytest.raises(IntegrationError) as err:
        evolve_master_equation(p, t_grid=np.linspace(0.0, 1e-6, 8),
                               method="rk45", max_steps=10)
    assert err.value.last_time < 1e-6


def test_structural_invariants_on_random_parameters():
    rng = np.random.default_rng(3)
    rel_tol = 1e-8
    for _ in range(6):
        p = AtomCavityParams(
            g0_hz=rng.uniform(0.0, 5e7),
            kappa_hz=rng.uniform(1e8, 5e9),
            gamma1=rng.uniform(1e6, 5e7),
            gamma_phi=rng.uniform(0.0, 2e7),
            delta_hz=rng.uniform(-1e9, 1e9))
        t = np.linspace(0.0, 3.0 * p.tau1_s, 24)
        _, states = evolve_master_equation(p, n_max=2, t_grid=t,
                                           rel_tol=rel_tol, return_states=True)
        for state in states:
            assert state.trace_deviation() < 10 * rel_tol
            assert state.hermiticity_deviation() < 10 * rel_tol
            assert state.min_eigenvalue() > -100 * rel_tol


def test_analytic_rate_on_resonance():
    # gamma1 + 4 g^2/kappa in angular units, written out independently
    g_ang = 2.0 * math.pi * P_REF.g0_hz
    k_ang = 2.0 * math.pi * P_REF.kappa_hz
    expected = P_REF.gamma1 + 4.0 * g_ang ** 2 / k_ang
    assert analytic_total_rate(P_REF) == pytest.approx(expected, rel=1e-14)


def test_analytic_rate_limits():
    assert analytic_total_rate(
        AtomCavityParams(g0_hz=0.0, kappa_hz=1e12, gamma1=5e7)) == 5e7
    far = P_REF.detuned(100.0 * P_REF.kappa_hz)
    c = P_REF.cooperativity
    assert analytic_total_rate(far) == pytest.approx(
        P_REF.gamma1 * (1.0 + c / 40001.0), rel=1e-12)
    with pytest.raises(ValueError):
        analytic_total_rate(AtomCavityParams(g0_hz=1e9, kappa_hz=0.0, gamma1=5e7))


def test_master_equation_matches_analytic_rate_across_detunings():
    c = P_REF.cooperativity
    for ratio in (0.0, 0.25, 0.5, 1.0, 2.0):
        p = P_REF.detuned(ratio * P_REF.kappa_hz)
        trace = evolve_master_equation(p, t_grid=np.linspace(0, 5 * P_REF.tau1_s, 256))
        rate = extract_decay_rate(trace).rate
        assert rate == pytest.approx(analytic_total_rate(p), rel=0.02), ratio
    assert c < 0.5  # the regime where the adiabatic elimination is validated


def test_tau_of_detuning_pins():
    tau = tau_of_detuning(0.14, 940e9, 15.9e-9, 0.0)
    assert tau == pytest.approx(15.9e-9 / 1.14, rel=1e-12)
    assert tau == pytest.approx(13.95e-9, rel=1e-3)
    # half width: f(kappa/2) = 1/2
    half = tau_of_detuning(0.14, 940e9, 15.9e-9, 470e9)
    assert half == pytest.approx(15.9e-9 / 1.07, rel=1e-12)
    assert half == pytest.approx(14.86e-9, rel=1e-3)
    assert tau_of_detuning(0.14, 940e9, 15.9e-9, 1e18) == pytest.approx(
        15.9e-9, rel=1e-9)


def test_tau_of_detuning_even_and_monotone():
    deltas = np.linspace(0.0, 5 * 940e9, 40)
    taus = tau_of_detuning(0.14, 940e9, 15.9e-9, deltas)
    taus_neg = tau_of_detuning(0.14, 940e9, 15.9e-9, -deltas)
    assert np.array_equal(taus, taus_neg)
    assert np.all(np.diff(taus) >= 0.0)
    assert taus[0] == pytest.approx(15.9e-9 / 1.14, rel=1e-12)


def test_tau_of_detuning_validation():
    with pytest.raises(ValueError):
        tau_of_detuning(-0.1, 940e9, 15.9e-9, 0.0)
    with pytest.raises(ValueError):
        tau_of_detuning(0.1, 0.0, 15.9e-9, 0.0)
    with pytest.raises(ValueError):
        tau_of_detuning(0.1, 940e9, 0.0, 0.0)


def test_extract_rate_from_pure_exponential():
    tau = 16e-9
    t = np.arange(200) * 1.28e-9
    trace = DecayTrace(times=t, values=np.exp(-t / tau))
    est = extract_decay_rate(trace)
    assert est.rate == pytest.approx(1.0 / tau, rel=1e-9)
    assert not est.curved
    assert est.stderr < 1e-3 * est.rate


def test_extract_rate_flags_background_curvature():
    tau = 16e-9
    t = np.arange(200) * 1.28e-9
    trace = DecayTrace(times=t, values=0.9 * np.exp(-t / tau) + 0.05)
    est = extract_decay_rate(trace)
    assert est.curved
    assert est.rate < 0.98 / tau  # biased slow by the flat background


def test_extract_rate_window_handling():
    t = np.arange(40) * 1e-9
    vals = np.exp(-t / 8e-9)
    vals[25:] = 0.0  # dead tail
    trace = DecayTrace(times=t, values=vals, kind="measured")
    est = extract_decay_rate(trace, window=(0.0, 39e-9))
    assert est.warnings and "non-positive" in est.warnings[0]
    with pytest.raises(ValueError):
        extract_decay_rate(trace, window=(0.0, 39e-9), on_nonpositive="error")
    with pytest.raises(ValueError):
        extract_decay_rate(trace, window=(26e-9, 39e-9))  # < 10 usable samples


def test_extract_rate_poisson_counts():
    rng = np.random.default_rng(5)
    tau = 14e-9
    t = np.arange(220) * 1.28e-9
    counts = rng.poisson(2e4 * np.exp(-t / tau)).astype(float)
    trace = DecayTrace(times=t, values=counts, kind="measured")
    est = extract_decay_rate(trace)
    assert est.rate == pytest.approx(1.0 / tau, rel=0.03)


def test_sweep_detunings_keyed_and_order_independent():
    deltas = [0.0, 470e9, -470e9]
    out = sweep_detunings(P_REF, deltas, t_grid=np.linspace(0, 3e-8, 16))
    out_rev = sweep_detunings(P_REF, deltas[::-1], t_grid=np.linspace(0, 3e-8, 16))
    assert set(out) == {0.0, 470e9, -470e9}
    for key, trace in out.items():
        assert np.array_equal(trace.values, out_rev[key].values)


def test_default_grid_runs_five_lifetimes():
    trace = evolve_master_equation(P_REF)
    assert len(trace) == 251
    assert trace.times[-1] == pytest.approx(5 * P_REF.tau1_s, rel=1e-12)
    assert trace.bin_width_s == pytest.approx(trace.times[1] - trace.times[0])
    assert trace.kind == "simulated"
    assert trace.values[0] == pytest.approx(1.0, abs=1e-12)


def test_decay_trace_validation():
    t = np.array([0.0, 1.0, 2.0])
    with pytest.raises(ValueError):
        DecayTrace(times=np.array([0.0, 1.0, 1.0]), values=np.ones(3))
    with pytest.raises(ValueError):
        DecayTrace(times=t, values=np.array([1.0, -0.5, 0.0]))
    with pytest.raises(ValueError):
        DecayTrace(times=t, values=np.array([1.0, 1.5, 0.5]))  # simulated > 1
    with pytest.raises(ValueError):
        DecayTrace(times=t, values=np.ones(3), kind="other")
    # measured counts above 1 are fine
    DecayTrace(times=t, values=np.array([100.0, 30.0, 7.0]), kind="measured")


def test_decay_trace_csv_round_trip():
    trace = evolve_master_equation(P_REF, t_grid=np.linspace(0, 2e-8, 16))
    text = decay_trace_to_csv(trace)
    back = decay_trace_from_csv(text)
    assert np.array_equal(back.times, trace.times)
    assert np.array_equal(back.values, trace.values)
    assert back.kind == trace.kind
    assert back.bin_width_s == pytest.approx(trace.bin_width_s, rel=1e-15)
    assert back.meta["g0_hz"] == trace.meta["g0_hz"]
    assert back.meta["n_max"] == 1


def test_decay_trace_csv_reports_bad_line():
    with pytest.raises(ValueError, match="line 3"):
        decay_trace_from_csv("# kind=measured\ntime_s,value\n0.0,oops\n")
