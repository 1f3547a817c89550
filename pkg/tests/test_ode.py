import numpy as np
import pytest

from cavitykit.ode import IntegrationError, integrate_adaptive, integrate_fixed


def test_scalar_exponential_decay():
    rate = 3.0
    t = np.linspace(0.0, 4.0, 33)
    ys = integrate_adaptive(lambda _t, y: -rate * y, np.array([1.0]), t,
                            rtol=1e-10, atol=1e-13)
    assert np.max(np.abs(ys[:, 0] - np.exp(-rate * t))) < 1e-8


def test_complex_rotation_preserves_amplitude():
    omega = 5.0
    t = np.linspace(0.0, 10.0, 41)
    ys = integrate_adaptive(lambda _t, y: 1j * omega * y,
                            np.array([1.0 + 0.0j]), t, rtol=1e-9, atol=1e-12)
    exact = np.exp(1j * omega * t)
    assert np.max(np.abs(ys[:, 0] - exact)) < 1e-6


def test_tighter_tolerance_reduces_error():
    rate = 2.0
    t = np.linspace(0.0, 5.0, 11)
    errs = []
    for rtol in (1e-4, 1e-8):
        ys = integrate_adaptive(lambda _t, y: -rate * y, np.array([1.0]), t,
                                rtol=rtol, atol=rtol * 1e-3)
        errs.append(np.max(np.abs(ys[:, 0] - np.exp(-rate * t))))
    assert errs[1] < errs[0]
    assert errs[1] < 1e-7


def test_step_budget_exhaustion_carries_last_time():
    # a harmonic oscillator cannot cross 10 periods in 5 steps
    with pytest.raises(IntegrationError) as err:
        integrate_adaptive(lambda _t, y: 1j * 50.0 * y, np.array([1.0 + 0j]),
                           np.array([0.0, 10.0]), rtol=1e-10, atol=1e-13,
                           max_steps=5)
    assert 0.0 <= err.value.last_time < 10.0


def test_fixed_step_matches_adaptive():
    rate = 1.5
    t = np.linspace(0.0, 3.0, 7)
    ya = integrate_adaptive(lambda _t, y: -rate * y, np.array([1.0]), t,
                            rtol=1e-10, atol=1e-13)
    yf = integrate_fixed(lambda _t, y: -rate * y, np.array([1.0]), t, dt=1e-3)
    assert np.max(np.abs(ya - yf)) < 1e-9


def test_matrix_system():
    # 2x2 linear system against its eigen-decomposition solution
    a = np.array([[-1.0, 0.5], [0.0, -2.0]])
    t = np.linspace(0.0, 2.0, 9)
    y0 = np.array([1.0, 1.0])
    ys = integrate_adaptive(lambda _t, y: a @ y, y0, t, rtol=1e-10, atol=1e-13)
    w, v = np.linalg.eig(a)
    coef = np.linalg.solve(v, y0)
    exact = np.real([v @ (coef * np.exp(w * ti)) for ti in t])
    assert np.max(np.abs(ys - exact)) < 1e-8


def test_grid_validation():
    f = lambda _t, y: -y
    with pytest.raises(ValueError):
        integrate_adaptive(f, np.array([1.0]), np.array([0.0, 2.0, 1.0]))
    with pytest.raises(ValueError):
        integrate_fixed(f, np.array([1.0]), np.array([0.0, 1.0]), dt=0.0)


def test_single_output_time_returns_initial_state():
    ys = integrate_adaptive(lambda _t, y: -y, np.array([2.0]), np.array([0.0]))
    assert ys.shape == (1, 1)
    assert ys[0, 0] == 2.0
