import io
import math
import warnings

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.special import j0

from semidirac.dynamics import holonomy_character, torus_constant_field_d
from semidirac.torus import (
    TorusConfig,
    TruncationError,
    TruncationWarning,
    brute_force_eigenvalues,
    closed_form_eigenvalues,
    counting_function,
    exact_eigenvalues,
    exact_mean_density,
    mean_counting,
    orbit_lengths,
    orbit_sum_exact,
    orbit_sum_semiclassical,
    orbit_weight,
    smoothed_compare,
    special_eigenvalue,
)

SPECIAL = TorusConfig()
GOLDEN = (1 + math.sqrt(5)) / 2


def test_special_examples():
    assert special_eigenvalue(0, 0, +1, SPECIAL) == 1.0
    assert special_eigenvalue(0, 0, -1, SPECIAL) == 0.0
    assert special_eigenvalue(1, 0, +1, SPECIAL) == pytest.approx(GOLDEN, abs=1e-15)
    assert special_eigenvalue(1, 0, -1, SPECIAL) == pytest.approx(GOLDEN - 1, abs=1e-15)
    assert special_eigenvalue(1, 0, +1, SPECIAL) == pytest.approx(1.6180340, abs=5e-8)


def test_special_eigenvalue_needs_special_mode():
    cfg = TorusConfig(mode="general", A1=(1, 0, 0), A2=(0, 1, 0))
    with pytest.raises(ValueError):
        special_eigenvalue(0, 0, 1, cfg)


@pytest.mark.parametrize("cfg", [
    SPECIAL,
    TorusConfig(L1=3.0, L2=5.0, hbar=0.7, g=1.4, A=0.6),
    TorusConfig(mode="general", A1=(0.3, -0.8, 0.5), A2=(1.1, 0.2, -0.4), g=1.3, hbar=0.7, L1=4.0, L2=6.5),
    TorusConfig(mode="general", A1=(1.0, 0.0, 0.0), A2=(2.0, 0.0, 0.0)),
])
def test_closed_form_matches_brute_force(cfg):
    table = exact_eigenvalues(cfg, 12)
    assert len(table) == 2 * 25**2
    assert table.max_residual < 1e-12
    assert np.all(np.diff(table.lam) >= 0)


def test_special_reduces_from_general():
    gen = TorusConfig(mode="general", A1=(1.0, 0, 0), A2=(0, 1.0, 0))
    p = SPECIAL.momenta(np.arange(-3, 4), np.arange(3, -4, -1))
    lp, lm = closed_form_eigenvalues(p, gen)
    lp2 = [special_eigenvalue(a, b, 1, SPECIAL) for a, b in zip(range(-3, 4), range(3, -4, -1))]
    lm2 = [special_eigenvalue(a, b, -1, SPECIAL) for a, b in zip(range(-3, 4), range(3, -4, -1))]
    assert np.allclose(lp, lp2, atol=1e-14) and np.allclose(lm, lm2, atol=1e-14)


@settings(max_examples=40, deadline=None)
@given(st.lists(st.floats(-2, 2), min_size=6, max_size=6), st.floats(-3, 3), st.floats(-3, 3))
def test_closed_form_property(A, p1, p2):
    cfg = TorusConfig(mode="general", A1=tuple(A[:3]), A2=tuple(A[3:]), g=0.9, hbar=1.1)
    lp, lm = closed_form_eigenvalues(np.array([[p1, p2]]), cfg)
    ev = brute_force_eigenvalues(np.array([[p1, p2]]), cfg)[0]
    assert np.allclose(ev, [-lp[0], -lm[0], lm[0], lp[0]], atol=1e-11)


def test_free_spectrum_degenerate():
    table = exact_eigenvalues(TorusConfig(A=0.0), 3)
    assert np.all(table.degenerate == 1)
    p = TorusConfig(A=0.0).momenta(table.n1, table.n2)
    assert np.allclose(table.lam, np.hypot(p[:, 0], p[:, 1]), atol=1e-15)


def test_spectrum_table_zero_mode_and_csv():
    table = exact_eigenvalues(SPECIAL, 2)
    assert len(table) == 50
    assert table.lam[0] == 0.0 and table.branch[0] == -1
    buf = io.StringIO()
    table.to_csv(buf)
    lines = buf.getvalue().splitlines()
    assert lines[0] == "n1,n2,branch,lambda,oracle_residual,degenerate"
    assert len(lines) == 51
    # zero mode, four lambda_- = 0.618, four diagonal lambda_- = 1 and lambda_+(0) = 1
    assert table.counting(1.0) == 10


def test_exact_eigenvalues_validation():
    with pytest.raises(ValueError):
        exact_eigenvalues(SPECIAL, -1)


# Weyl term

def test_mean_density_examples():
    assert exact_mean_density(0.0, SPECIAL) == pytest.approx(math.pi, abs=1e-15)
    assert exact_mean_density(0.3, SPECIAL) == pytest.approx(2 * math.pi * 0.8, rel=1e-15)
    assert exact_mean_density(0.3, SPECIAL) == pytest.approx(5.0265, abs=5e-5)


@pytest.mark.parametrize("lam", [10.0, 100.0, 1000.0])
def test_mean_density_large_lambda(lam):
    free = SPECIAL.area * lam / (math.pi * SPECIAL.hbar**2)
    assert exact_mean_density(lam, SPECIAL) == pytest.approx(free, rel=1e-15)


def test_mean_counting_is_integral_of_density():
    from scipy.integrate import quad

    for lam in (0.4, 1.0, 2.5):
        val, _ = quad(exact_mean_density, 0, lam, args=(SPECIAL,), points=[SPECIAL.a] if lam > SPECIAL.a else None)
        assert mean_counting(lam, SPECIAL) == pytest.approx(val, rel=1e-12)


def test_counting_function_has_no_drift():
    grid = np.linspace(0.5, 10.0, 96)
    N, Nbar = counting_function(SPECIAL, grid)
    fluct = (N - Nbar) / np.sqrt(Nbar)
    # fluctuations stay bounded and show no trend across the range
    assert np.abs(fluct).max() < 3.0
    slope = np.polyfit(grid, N / Nbar, 1)[0]
    assert abs(slope) < 5e-3


# orbits

def test_orbit_lengths():
    q, m = orbit_lengths(SPECIAL, 1)
    assert np.allclose(q, [2 * math.pi, 2 * math.sqrt(2) * math.pi])
    assert list(m) == [4, 4]
    q, m = orbit_lengths(TorusConfig(L1=1.0, L2=2.0), 3)
    assert m.sum() == 48
    assert orbit_lengths(SPECIAL, 0)[0].size == 0


@pytest.mark.parametrize("x", np.linspace(0, 500, 41))
def test_bessel_j0_against_mpmath(x):
    assert abs(j0(x) - float(mpmath.besselj(0, x))) < 1e-12


def test_orbit_weight_is_half_the_holonomy_character():
    q = 2 * math.pi
    w = orbit_weight(q, SPECIAL)
    tr = holonomy_character(torus_constant_field_d([1.0, 0.0], q, SPECIAL.g, SPECIAL.A))
    assert w == pytest.approx(-1.0, abs=1e-15)
    assert w == pytest.approx(0.5 * tr, abs=1e-14)
    assert np.all(orbit_weight(np.linspace(1, 30, 7), TorusConfig(A=0.0)) == 1.0)


def test_orbit_sum_free_reduces_to_bessel_formula():
    cfg = TorusConfig(A=0.0)
    lam = np.linspace(0.5, 3.0, 6)
    q, m = orbit_lengths(cfg, 5)
    expected = cfg.area / (2 * math.pi) * 2 * lam * (j0(np.outer(lam, q)) @ m)
    assert np.allclose(orbit_sum_exact(lam, cfg, 5), expected, rtol=1e-13)


def test_orbit_sum_single_term_arguments():
    lam = 2.3
    cfg = TorusConfig(L2=1e9)  # only k = (+-1, 0) contribute at kmax = 1 up to tiny terms
    q = 2 * math.pi
    a = cfg.a
    term = (lam - a / 2) * j0(q * math.sqrt(lam * (lam - a))) + (lam + a / 2) * j0(q * math.sqrt(lam * (lam + a)))
    val = orbit_sum_exact(lam, cfg, 1)
    rest = val - 2 * cfg.area / (2 * math.pi) * term
    assert abs(rest) < 1e-3 * abs(val)


def test_orbit_sum_semiclassical_hbar_scaling():
    lam = np.linspace(2.0, 3.0, 2001)
    hs = np.array([0.5, 0.25, 0.125, 0.0625])
    devs = []
    for hb in hs:
        cfg = TorusConfig(hbar=hb)
        amp = cfg.area / (math.pi * hb) ** 1.5 * np.sqrt(lam / math.pi)
        diff = orbit_sum_exact(lam, cfg, 1) - orbit_sum_semiclassical(lam, cfg, 1)
        devs.append(np.max(np.abs(diff) / amp))
    order = np.polyfit(np.log(hs), np.log(devs), 1)[0]
    assert order == pytest.approx(1.0, abs=0.15)


def test_orbit_sum_validation():
    with pytest.raises(ValueError):
        orbit_sum_exact(0.0, SPECIAL, 3)
    with pytest.raises(ValueError):
        orbit_lengths(SPECIAL, -1)
    gen = TorusConfig(mode="general", A1=(1, 0, 0), A2=(0, 1, 0))
    with pytest.raises(ValueError):
        orbit_sum_exact(1.0, gen, 3)


# smoothed comparison

def test_smoothed_compare_free():
    table = smoothed_compare(TorusConfig(A=0.0), np.linspace(1, 5, 41), 0.2, 60, 40)
    assert table.max_rel_dev < 1e-2
    assert table.diagnostics["truncation"] == []


@pytest.mark.parametrize("cfg", [SPECIAL, TorusConfig(L1=5.0, L2=7.0, A=0.7, hbar=0.8)])
def test_smoothed_compare_special(cfg):
    table = smoothed_compare(cfg, np.linspace(1.5, 5, 15), 0.2, 60, 40)
    assert table.max_rel_dev < 1e-2


def test_weyl_term_alone_misses_oscillations():
    table = smoothed_compare(SPECIAL, np.linspace(1.5, 5, 36), 0.2, 60, 40)
    assert np.max(np.abs(table.weyl - table.exact_smoothed) / table.exact_smoothed) > 0.05


def test_kmax_zero_gives_weyl_only():
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", TruncationWarning)
        table = smoothed_compare(SPECIAL, np.linspace(1.5, 3, 4), 0.2, 30, 0)
    assert np.array_equal(table.weyl, table.weyl_plus_orbits)


def test_truncation_warning_and_strict():
    grid = np.linspace(1.5, 5, 4)
    with pytest.warns(TruncationWarning, match="nmax"):
        smoothed_compare(SPECIAL, grid, 0.2, 4, 40)
    with pytest.raises(TruncationError, match="kmax"):
        smoothed_compare(SPECIAL, grid, 0.2, 60, 2, strict=True)


def test_smoothed_compare_rejects_zero_width():
    with pytest.raises(ValueError, match="width"):
        smoothed_compare(SPECIAL, [1.0], 0.0, 10, 5)


def test_torus_config_validation():
    with pytest.raises(ValueError):
        TorusConfig(L1=0.0)
    with pytest.raises(ValueError):
        TorusConfig(mode="general")
    with pytest.raises(ValueError):
        TorusConfig(mode="weird")
