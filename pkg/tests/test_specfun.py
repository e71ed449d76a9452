import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import special

from phaseless.errors import DomainError
from phaseless.specfun import (
    CONSTANTS,
    CROSSOVER,
    _asymptotic,
    _series,
    bessel_j0,
    bessel_j1,
    cylinder_functions,
    funk_hecke,
    hankel1_0,
    hankel1_1,
)

# (t, J0, J1, Y0, Y1) from mpmath at 40 digits
FROZEN = [
    (0.5, 0.93846980724081290423, 0.24226845767487388638, -0.44451873350670655715, -1.4714723926702430692),
    (1.0, 0.76519768655796655145, 0.44005058574493351596, 0.088256964215676957983, -0.78121282130028871655),
    (5.0, -0.17759677131433830435, -0.32757913759146522204, -0.30851762524903378007, 0.1478631433912268448),
    (11.9, 0.02504944169958964508, -0.22898324966192405505, -0.22983321394337506407, -0.034711498334030609833),
    (12.0, 0.047689310796833536624, -0.22344710449062761237, -0.22523731263436143369, -0.05709921826089652105),
    (12.1, 0.069666773606807311849, -0.21574897337692480827, -0.21843838055092548565, -0.078736931451395745616),
    (50.0, 0.055812327669251815005, -0.097511828125175137661, -0.098064995470077079029, -0.056795668562014767942),
    (300.0, -0.033298554876305668007, -0.031887431377499950314, -0.031831889730003398015, 0.033245548121310216056),
]
J0_FIRST_ZERO = 2.404825557695773


@pytest.mark.parametrize("t, j0, j1, y0, y1", FROZEN)
def test_frozen_values(t, j0, j1, y0, y1):
    got = cylinder_functions(t)
    assert got == pytest.approx((j0, j1, y0, y1), abs=1e-12)


def test_against_scipy_on_dense_grid():
    t = np.linspace(1e-3, 1000.0, 200001)
    j0, j1, y0, y1 = cylinder_functions(t)
    assert np.max(np.abs(j0 - special.j0(t))) < 1e-12
    assert np.max(np.abs(j1 - special.j1(t))) < 1e-12
    # relative accuracy target for the second-kind functions
    assert np.max(np.abs(y0 - special.y0(t)) / np.maximum(1.0, np.abs(special.y0(t)))) < 1e-10
    assert np.max(np.abs(y1 - special.y1(t)) / np.maximum(1.0, np.abs(special.y1(t)))) < 1e-10


def test_branches_agree_at_crossover():
    t = np.array([CROSSOVER])
    s = _series(t, True)
    a0, b0 = _asymptotic(t, 0)
    a1, b1 = _asymptotic(t, 1)
    assert np.max(np.abs(np.array(s).ravel() - np.array([a0, a1, b0, b1]).ravel())) < 1e-12


def test_j0_basic_values():
    assert bessel_j0(0.0) == 1.0
    assert abs(bessel_j0(J0_FIRST_ZERO)) < 1e-15
    t = np.linspace(0, J0_FIRST_ZERO, 2000)
    assert np.all(np.diff(bessel_j0(t)) < 0)


def test_j0_large_argument_envelope():
    t = 50.0
    approx = np.sqrt(2 / (np.pi * t)) * np.cos(t - np.pi / 4)
    assert abs(bessel_j0(t) - approx) < 1.0 / t


def test_j1_basic_values():
    assert bessel_j1(0.0) == 0.0
    h = 1e-5
    fd = -(bessel_j0(10 + h) - bessel_j0(10 - h)) / (2 * h)
    assert abs(bessel_j1(10.0) - fd) < 1e-8


def test_constants():
    assert CONSTANTS.t1 == pytest.approx(1.8411837813406593026, abs=1e-13)
    assert CONSTANTS.j1_at_t1 == pytest.approx(0.58186522428159637933, abs=1e-13)
    h = 1e-5
    deriv = (bessel_j1(CONSTANTS.t1 + h) - bessel_j1(CONSTANTS.t1 - h)) / (2 * h)
    assert abs(deriv) < 1e-10
    # quoted values are truncated to three digits
    assert abs(CONSTANTS.j1_at_t1 - 0.581) < 1e-3
    assert abs(CONSTANTS.t1 - 1.84) < 1e-2


def test_hankel_real_part_and_wronskian():
    assert hankel1_0(1.0).real == pytest.approx(bessel_j0(1.0), abs=1e-15)
    t = 0.5
    _, _, y0, y1 = cylinder_functions(t)
    assert abs(bessel_j1(t) * y0 - bessel_j0(t) * y1 - 2 / (np.pi * t)) < 1e-10
    assert hankel1_1(t).real == pytest.approx(bessel_j1(t), abs=1e-15)


def test_hankel_small_argument_log_growth():
    for t in (1e-4, 1e-6, 1e-8):
        lead = (2 / np.pi) * (np.log(t / 2) + 0.57721566490153286)
        assert abs(hankel1_0(t).imag - lead) < 10 * t


@pytest.mark.parametrize("bad", [0.0, -1.0])
def test_hankel_domain(bad):
    with pytest.raises(DomainError):
        hankel1_0(bad)
    with pytest.raises(DomainError):
        hankel1_1(bad)


@pytest.mark.parametrize("bad", [np.nan, np.inf, 2e4])
def test_non_finite_or_huge_rejected(bad):
    with pytest.raises(DomainError):
        bessel_j0(bad)
    with pytest.raises(DomainError):
        bessel_j1(bad)


def test_grid_invariants():
    t = np.linspace(0, 100, 10_000)
    assert np.all(np.abs(bessel_j0(t)) <= 1.0)
    assert np.all(np.abs(bessel_j1(t)) <= 0.6)
    tt = np.linspace(0.1, 100, 5000)
    h = 1e-5
    fd = (bessel_j0(tt + h) - bessel_j0(tt - h)) / (2 * h)
    assert np.max(np.abs(fd + bessel_j1(tt))) < 1e-7


@settings(max_examples=200, deadline=None)
@given(st.floats(min_value=1e-6, max_value=100.0))
def test_wronskian_property(t):
    j0, j1, y0, y1 = cylinder_functions(t)
    assert abs(j1 * y0 - j0 * y1 - 2 / (np.pi * t)) < 1e-9


def _trapezoid_circle(k, x, n):
    theta = 2 * np.pi * np.arange(n) / n
    d = np.stack([np.cos(theta), np.sin(theta)], axis=-1)
    return (2 * np.pi / n) * np.exp(1j * k * (np.atleast_2d(x) @ d.T)).sum(axis=-1)


def test_funk_hecke_examples():
    assert funk_hecke(1.0, (0.0, 0.0)) == pytest.approx(2 * np.pi, abs=1e-15)
    assert abs(funk_hecke(1.0, (J0_FIRST_ZERO, 0.0))) < 1e-9
    assert funk_hecke(2.0, (1.0, 1.0)) == pytest.approx(-1.2349481043575393655, abs=1e-12)


@pytest.mark.parametrize("n", [360, 720])
def test_funk_hecke_matches_quadrature(n):
    rng = np.random.default_rng(11)
    k = rng.uniform(0.5, 20.0, 50)
    r = rng.uniform(0, 40.0, 50) / k
    phi = rng.uniform(0, 2 * np.pi, 50)
    x = np.stack([r * np.cos(phi), r * np.sin(phi)], axis=-1)
    for kk, xx in zip(k, x):
        quad = _trapezoid_circle(kk, xx, n)[0]
        assert abs(funk_hecke(kk, xx) - quad) < 1e-10


@pytest.mark.parametrize("k", [0.0, -1.0])
def test_funk_hecke_domain(k):
    with pytest.raises(DomainError):
        funk_hecke(k, (1.0, 0.0))
