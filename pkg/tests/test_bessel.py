import cmath
import csv
import math
from importlib import resources

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dhardy.bessel import (
    ComplexScaled,
    bessel_i,
    bessel_i_quadrature,
    bessel_i_scaled,
    bessel_ratio,
    gaussian_limit_error,
    kapteyn_logs,
    log_ratio_orders,
    log_tails,
    majorant_logs,
    quadrature_with_scale,
    scaled_orders,
)
from dhardy.errors import DomainError, RangeError

# frozen from mpmath at 40 digits
I1_2_SCALED = 0.21526928924893765
RATIO_5_100 = 0.8819631028423183
LIMIT_HALF_32 = 2.529565025301327e-04
LIMIT_ONE_32 = 2.5510592121597627e-04

EPS = np.finfo(float).eps


def golden_rows():
    text = resources.files("dhardy").joinpath("data/bessel_golden.csv").read_text()
    return list(csv.DictReader(text.splitlines()))


def rel(a, b):
    return abs(a - b) / abs(b)


def test_trivial_values():
    assert bessel_i_scaled(0, 0) == ComplexScaled(0.0, 0.0)
    assert bessel_i_scaled(3, 0).is_zero
    assert bessel_i_scaled(3, 0).phase == 0.0
    assert bessel_i_quadrature(0, 0) == pytest.approx(1.0, abs=1e-15)


def test_i1_at_2_matches_frozen_value():
    assert rel(bessel_i_scaled(1, 2).to_complex(), I1_2_SCALED) < 1e-13


@pytest.mark.parametrize("row", golden_rows(), ids=lambda r: f"k{r['k']}_z{r['re_z']}{r['im_z']}j")
def test_golden_table(row):
    k = int(row["k"])
    z = complex(float(row["re_z"]), float(row["im_z"]))
    want = complex(float(row["re_val"]), float(row["im_val"]))
    assert rel(bessel_i(k, z), want) < 1e-12


def test_golden_table_provenance_recorded():
    rows = golden_rows()
    assert len(rows) >= 30
    assert all(r["provenance"].split(";")[0] in ("quadrature-richardson", "mpmath-40digits") for r in rows)


def test_quadrature_cross_check_2_1plus1i():
    q = bessel_i_quadrature(2, 1 + 1j)
    s = bessel_i_scaled(2, 1 + 1j).shifted(1.0).to_complex()
    assert rel(s, q) < 1e-9


def test_quadrature_parity():
    assert bessel_i_quadrature(-3, 5) == bessel_i_quadrature(3, 5)


def test_quadrature_range_error():
    with pytest.raises(RangeError, match="700"):
        bessel_i_quadrature(0, 701)
    with pytest.raises(RangeError):
        quadrature_with_scale(1, complex(-800, 3))


def test_non_finite_argument_rejected():
    with pytest.raises(DomainError):
        bessel_i_scaled(1, complex(math.inf, 0))
    with pytest.raises(DomainError):
        bessel_i_scaled(1, complex(math.nan, 1))


def test_underflowed_orders_are_zero_not_errors():
    v = bessel_i_scaled(5000, 0.5)
    assert v.is_zero or v.log_mag < -20000


def test_huge_argument_stays_finite():
    # I_0(2000) overflows doubles; the scaled form does not
    v = bessel_i_scaled(0, 2000)
    assert math.isfinite(v.log_mag)
    assert v.log_mag == pytest.approx(-0.5 * math.log(2 * math.pi * 2000), abs=1e-4)


def test_large_imaginary_argument_matches_asymptotics():
    # |J_0(x)| envelope sqrt(2/(pi x)) at x = 3200
    lm, _ = scaled_orders(10, 3200j)
    assert np.max(lm) < 0.5 * math.log(2 / (math.pi * 3200)) + 1e-3


def test_orders_agree_with_single_calls():
    z = 7.5 - 3j
    lm, ph = scaled_orders(20, z)
    for k in (0, 5, 20):
        v = bessel_i_scaled(k, z)
        assert rel(cmath.rect(math.exp(lm[k]), ph[k]), v.to_complex()) < 1e-13


def test_bessel_ratio_examples():
    assert bessel_ratio(0, 3.7) == 1.0
    assert bessel_ratio(3, 1e-9) < 1e-25
    assert rel(bessel_ratio(5, 100), RATIO_5_100) < 1e-13
    with pytest.raises(DomainError):
        bessel_ratio(1, 0.0)
    with pytest.raises(DomainError):
        bessel_ratio(1, -2.0)


def test_ratio_large_argument_is_cheap_and_sane():
    logs = log_ratio_orders(1e7, 50)
    assert np.all(np.diff(logs) <= 0)
    # I_k(x)/I_0(x) ~ exp(-k^2/2x)
    assert logs[50] == pytest.approx(-50**2 / 2e7, rel=1e-3)


@given(st.floats(0.01, 5000), st.integers(1, 200))
@settings(max_examples=40, deadline=None)
def test_ratio_monotone_in_order(x, nmax):
    logs = log_ratio_orders(x, nmax)
    assert logs[0] == 0.0
    assert np.all(np.diff(logs) <= 1e-15)


def test_gaussian_limit_examples():
    xs = np.linspace(1 / 64, 1, 64)
    assert gaussian_limit_error(1.0, 8, xs) < gaussian_limit_error(1.0, 4, xs)
    assert gaussian_limit_error(1.0, 4, [0.0]) == 0.0


def test_gaussian_limit_frozen_values():
    xs = np.linspace(-4, 4, 64)
    assert rel(gaussian_limit_error(0.5, 32, xs), LIMIT_HALF_32) < 1e-10
    assert rel(gaussian_limit_error(1.0, 32, xs), LIMIT_ONE_32) < 1e-10


def test_gaussian_limit_domain():
    with pytest.raises(DomainError):
        gaussian_limit_error(0.0, 4, [0.5])
    with pytest.raises(DomainError):
        gaussian_limit_error(1.0, 0, [0.5])
    with pytest.raises(DomainError):
        gaussian_limit_error(1.0, 4, [])


def test_majorant_and_tails():
    x = 30.0
    logs = majorant_logs(x, 200)
    direct = np.log([abs(bessel_i(n, x)) for n in range(201)])
    assert np.max(np.abs(logs - direct)) < 1e-11
    tails = log_tails(logs)
    assert tails[150] == pytest.approx(np.logaddexp.reduce(logs[151:]), abs=1e-10)
    assert majorant_logs(0.0, 3)[0] == 0.0


def test_kapteyn_bound_holds():
    x = 300.0
    n = np.arange(301, 500)
    lm, _ = scaled_orders(499, 1j * x)
    assert np.all(lm[301:] <= kapteyn_logs(x, n) + 1e-9)
    with pytest.raises(DomainError):
        kapteyn_logs(10.0, [5])


# --- ComplexScaled -----------------------------------------------------------

def test_complex_scaled_zero_and_phase_wrap():
    z = ComplexScaled(-math.inf, 2.0)
    assert z.is_zero and z.phase == 0.0 and z.to_complex() == 0
    assert ComplexScaled(0.0, -math.pi).phase == math.pi
    assert ComplexScaled(0.0, 3 * math.pi).phase == pytest.approx(math.pi)
    with pytest.raises(DomainError):
        ComplexScaled(math.nan)
    with pytest.raises(DomainError):
        ComplexScaled(math.inf)


def test_complex_scaled_arithmetic():
    a = ComplexScaled.from_complex(3 - 4j)
    b = ComplexScaled.from_complex(-2j)
    assert (a * b).to_complex() == pytest.approx((3 - 4j) * (-2j), rel=1e-15)
    assert (a / b).to_complex() == pytest.approx((3 - 4j) / (-2j), rel=1e-15)
    assert (2 * a).to_complex() == pytest.approx(6 - 8j, rel=1e-15)
    assert (a * 0).is_zero
    with pytest.raises(ZeroDivisionError):
        a / 0


finite_mags = st.floats(1e-300, 1e300)


@given(finite_mags, st.floats(-math.pi, math.pi))
@settings(max_examples=200)
def test_complex_scaled_round_trip(mag, phase):
    value = cmath.rect(mag, phase)
    if value == 0:
        return
    back = ComplexScaled.from_complex(value).to_complex()
    # exp(log) amplifies the rounding of a log of size L by ~L ulp
    lm = abs(math.log(abs(value)))
    assert abs(back - value) <= 4 * EPS * max(1.0, lm) * abs(value)


# --- identities ------------------------------------------------------------

small_complex = st.complex_numbers(max_magnitude=20, allow_nan=False, allow_infinity=False)


def neumann_residual(u, v, k, m=80):
    """``|sum_m I_m(u) I_{k-m}(v) - I_k(u+v)|`` over the scale ``I_k(|u|+|v|)``
    that bounds the sum of moduli of its terms."""
    lu, pu = scaled_orders(m + abs(k), u)
    lv, pv = scaled_orders(2 * m + abs(k), v)
    iu = np.exp(lu + u.real) * np.exp(1j * pu)
    iv = np.exp(lv + v.real) * np.exp(1j * pv)
    total = sum(iu[abs(j)] * iv[abs(k - j)] for j in range(-m, m + 1))
    scale = bessel_i(k, abs(u) + abs(v)).real
    return abs(total - bessel_i(k, u + v)) / max(1.0, scale)


@given(small_complex, small_complex, st.integers(-40, 40))
@settings(max_examples=60, deadline=None)
def test_neumann_addition(u, v, k):
    assert neumann_residual(u, v, k) <= 1e-10


@pytest.mark.parametrize("x", [1.0, 10.0, 100.0, 1000.0])
def test_generating_identity(x):
    lm, _ = scaled_orders(int(2 * x + 60), x)
    vals = np.exp(lm)
    assert abs(vals[0] + 2 * vals[1:].sum() - 1.0) <= 1e-12


@given(st.integers(0, 60), st.complex_numbers(max_magnitude=300, allow_nan=False, allow_infinity=False))
@settings(max_examples=80, deadline=None)
def test_modulus_bound(k, z):
    if z == 0:
        return
    lhs = bessel_i_scaled(k, z).shifted(z.real).log_mag
    rhs = bessel_i_scaled(k, abs(z)).shifted(abs(z)).log_mag
    assert lhs <= rhs + 1e-12 * max(1.0, abs(rhs))


@given(st.integers(0, 50), small_complex)
@settings(max_examples=40, deadline=None)
def test_order_symmetry_exact(k, z):
    assert bessel_i_scaled(-k, z) == bessel_i_scaled(k, z)
    if abs(z.real) <= 700:
        assert bessel_i_quadrature(-k, z) == bessel_i_quadrature(k, z)


@given(st.integers(0, 30), st.complex_numbers(max_magnitude=50, allow_nan=False, allow_infinity=False))
@settings(max_examples=60, deadline=None)
def test_oracle_agreement(k, z):
    if z == 0 and k > 0:
        return
    q = bessel_i_quadrature(k, z)
    s = bessel_i_scaled(k, z).shifted(z.real).to_complex()
    assert abs(s - q) <= 1e-9 * abs(q)


def test_reflection_negative_real_part():
    z = -12.0 + 4.0j
    for k in (0, 1, 7):
        want = (-1) ** k * bessel_i(k, -z)
        assert rel(bessel_i(k, z), want) < 1e-13
