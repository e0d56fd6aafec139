import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from alpha_envelope.scalar import (
    chord_consistency,
    chord_derivative,
    chord_value,
    chord_values,
    eta_solution,
    eta_value,
    make_alpha,
    maximal_interval,
    ode_residual,
)

E = math.e
alphas01 = st.floats(0.05, 0.95)
vals = st.floats(-5, 5, allow_nan=False)
ts = st.floats(0, 1)


@pytest.mark.parametrize("a,k", [(0.5, 1.0), (1.0, 0.0), (0.25, 3.0)])
def test_make_alpha(a, k):
    assert make_alpha(a).k_alpha == k


def test_alpha_zero_is_tagged():
    al = make_alpha(0.0)
    assert al.is_quasiconvex and math.isnan(al.k_alpha)


@pytest.mark.parametrize("bad", [-0.1, 1.01, float("nan")])
def test_make_alpha_rejects(bad):
    with pytest.raises(ValueError):
        make_alpha(bad)


def test_chord_examples():
    assert chord_value(0.5, 0, 1, 0.5) == pytest.approx(math.log((1 + E) / 2), abs=1e-15)
    assert chord_value(1.0, 0, 1, 0.25) == 0.25
    assert chord_value(0.25, 0, 1, 0.5) == pytest.approx(math.log((1 + E**3) / 2) / 3, abs=1e-14)
    for al in (0.0, 0.3, 1.0):
        assert chord_value(al, 2.5, 2.5, 0.7) == 2.5


def test_alpha_zero_max_convention():
    assert chord_value(0.0, 0, 1, 0.25) == 1
    assert chord_value(0.0, 0, 1, 0.0) == 0
    assert chord_value(0.0, 1, 0, 0.5) == 1
    with pytest.raises((ValueError, NotImplementedError)):
        chord_value(0.0, 0, 1, 1.5)


def test_chord_outside_interval_rejected():
    lo, _ = maximal_interval(0.5, 0, 1)
    with pytest.raises(ValueError):
        chord_value(0.5, 0, 1, lo - 0.01)
    # inside the extension interval is fine
    assert np.isfinite(chord_value(0.5, 0, 1, lo + 0.01))


def test_no_overflow_small_alpha():
    v = chord_value(1e-3, 0.0, 10.0, 0.5)
    assert 9.99 < v <= 10.0
    assert chord_value(1e-3, 10.0, 0.0, 0.5) == pytest.approx(v, abs=1e-12)


def test_near_one_branch_continuous():
    a, b, t = -0.3, 0.7, 0.4
    close = [chord_value(1 - e, a, b, t) for e in (1e-6, 1e-9, 1e-12)]
    aff = a + (b - a) * t
    assert abs(close[-1] - aff) < 1e-11
    assert close[0] >= aff - 1e-15  # concave chord lies above the affine one


def test_derivative_examples():
    assert chord_derivative(0.5, 0, 1, 0) == pytest.approx(E - 1, abs=1e-12)
    assert chord_derivative(1.0, 2, 5, 0.3) == 3
    assert chord_derivative(0.5, 0, 0, 0.3) == 0
    fd = (chord_value(0.5, 0, 1, 1e-6) - chord_value(0.5, 0, 1, -1e-6)) / 2e-6
    assert fd == pytest.approx(chord_derivative(0.5, 0, 1, 0), abs=1e-8)


def test_maximal_interval():
    lo, hi = maximal_interval(0.5, 0, 1)
    assert lo == pytest.approx(-1 / (E - 1)) and hi == math.inf
    assert maximal_interval(1.0, 0, 1) == (-math.inf, math.inf)
    lo, _ = maximal_interval(0.25, 0, 1)
    assert lo == pytest.approx(-1 / (E**3 - 1), rel=1e-12)
    lo, hi = maximal_interval(0.5, 1, 0)
    assert lo == -math.inf and hi == pytest.approx(1 + 1 / (E - 1))
    with pytest.raises(NotImplementedError):
        maximal_interval(0.0, 0, 1)


def test_consistency_examples():
    assert chord_consistency(0.5, 0, 1, 0, 0.5, 1) == pytest.approx(0.6201145069582775, abs=1e-14)
    assert chord_consistency(1.0, 0, 1, 0.25, 0.75, 0.5) == pytest.approx(0.5, abs=1e-15)
    assert chord_consistency(0.25, 0, 1, 0.2, 0.8, 0.5) == pytest.approx(chord_value(0.25, 0, 1, 0.5), abs=1e-12)


def test_vectorized_matches_scalar():
    t = np.linspace(0, 1, 17)
    for al in (0.0, 0.2, 0.5, 1.0):
        ref = [chord_value(al, 1.5, -2.0, x) for x in t]
        np.testing.assert_allclose(chord_values(al, 1.5, -2.0, t), ref, atol=1e-14)


@given(alphas01, vals, vals, ts)
def test_symmetry(al, a, b, t):
    assert chord_value(al, a, b, t) == pytest.approx(chord_value(al, b, a, 1 - t), abs=1e-13)


@given(alphas01, vals, vals)
def test_endpoints(al, a, b):
    assert chord_value(al, a, b, 0.0) == a
    assert chord_value(al, a, b, 1.0) == b


@given(vals, vals, st.floats(0.01, 0.99))
def test_monotone_in_alpha(a, b, t):
    seq = [chord_value(al, a, b, t) for al in (0.0, 0.1, 0.3, 0.5, 0.8, 1.0)]
    assert all(y <= x + 1e-12 for x, y in zip(seq, seq[1:]))


@given(vals, vals, ts, st.floats(0, 3), st.floats(0, 3), alphas01)
def test_comparison(a, b, t, da, db, al):
    assert chord_value(al, a, b, t) <= chord_value(al, a + da, b + db, t) + 1e-12


@given(alphas01, vals, vals)
def test_concavity(al, a, b):
    t = np.linspace(0, 1, 201)
    v = chord_values(al, a, b, t)
    assert np.all(v[2:] - 2 * v[1:-1] + v[:-2] <= 1e-10)


@given(alphas01, vals, vals, st.floats(0, 0.99), st.floats(0.01, 1), ts)
def test_cocycle(al, a, b, s, s2, t):
    if s2 <= s:
        s, s2 = s2, s
    if s2 - s < 1e-6:
        return
    ref = chord_value(al, a, b, s + t * (s2 - s))
    assert chord_consistency(al, a, b, s, s2, t) == pytest.approx(ref, abs=1e-12)


def test_limits():
    a, b, t = 0.2, 1.7, 0.35
    near1 = [abs(chord_value(1 - e, a, b, t) - (a + (b - a) * t)) for e in (1e-1, 1e-2, 1e-3, 1e-4)]
    near0 = [abs(chord_value(e, a, b, t) - max(a, b)) for e in (1e-1, 1e-2, 1e-3, 1e-4)]
    assert near1 == sorted(near1, reverse=True) and near1[-1] < 1e-3
    assert near0 == sorted(near0, reverse=True) and near0[-1] < 1e-2


def test_ode_residual_examples():
    h = 1e-3
    t = np.arange(0.1, 0.9 + h / 2, h)
    v = [(x, chord_value(0.5, 0, 1, x)) for x in t]
    assert ode_residual(0.5, v, h) <= 1e-6
    # affine samples on a dyadic grid: second differences are exact in floating point
    hd = 2.0**-10
    td = hd * np.arange(103, 922)
    assert ode_residual(1.0, [(x, x) for x in td], hd) <= 1e-12
    assert ode_residual(1.0, [(x, 2 + 3 * x) for x in t], h) <= 1e-8
    assert ode_residual(1.0, [(x, x * x) for x in t], h) == pytest.approx(2, abs=1e-8)
    with pytest.raises(ValueError):
        ode_residual(0.5, v[:2], h)


def test_eta_examples():
    sol = eta_solution(0.5, 0, 1, 0.1)
    assert sol.residual() <= 1e-12 * E
    assert eta_value(sol, 0) == pytest.approx(0, abs=1e-10)
    assert eta_value(sol, 1) == pytest.approx(1, abs=1e-10)
    mid = eta_value(sol, 0.5)
    assert 0.6201145069582775 < mid < 1
    fine = eta_solution(0.5, 0, 1, 0.01)
    assert abs(eta_value(fine, 0.5) - 0.6201145069582775) <= 1e-3


def test_eta_reflected_and_large():
    sol = eta_solution(0.3, 2.0, -1.0, 0.05)
    assert eta_value(sol, 0) == pytest.approx(2.0, abs=1e-10)
    assert eta_value(sol, 1) == pytest.approx(-1.0, abs=1e-10)
    with pytest.raises(ValueError):
        eta_solution(0.5, 0, 1, 2.0)  # omega >= pi/2
    with pytest.raises(ValueError):
        eta_solution(1.0, 0, 1, 0.1)
