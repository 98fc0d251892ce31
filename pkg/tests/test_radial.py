import cmath
import json
import math
import warnings

import pytest
from hypothesis import example, given, settings
from hypothesis import strategies as st

import oracles
from cartan_motion import spherical
from cartan_motion.spherical import (
    LogComplex,
    QuadratureAccuracyWarning,
    default_nodes,
    load_constants,
    phi_asymptotic,
    phi_eval,
    phi_radial,
    radial_quadrature,
)


def _rel(lc: LogComplex, z: complex) -> float:
    return lc.relative_difference(LogComplex.from_complex(z))


@pytest.mark.parametrize("n", [2, 3, 5, 8])
@pytest.mark.parametrize("s", [0.3, 2j, 1 - 1j])
def test_zero_radius_is_one(n, s):
    v = phi_radial(n, s, 0.0)
    assert v.log_magnitude == 0.0 and v.phase == 0.0


def test_n3_closed_form_example():
    assert abs(phi_radial(3, 1, 2).to_complex() - math.sinh(2) / 2) <= 1e-10 * math.sinh(2) / 2


@pytest.mark.parametrize("s", [0.5, 1, 2j, 1 + 1j, -3 + 0.5j])
@pytest.mark.parametrize("r", [0.1, 1, 5, 20, 300])
def test_n3_sinh_oracle(s, r):
    ref = oracles.log_sinhc(s * r)
    got = phi_radial(3, s, r)
    assert abs(got.log_magnitude - ref.real) <= 1e-10
    assert abs(cmath.exp(1j * (got.phase - ref.imag)) - 1) <= 1e-10


@pytest.mark.parametrize("r", [0.5, 2, 5, 10, 30])
def test_n2_bessel_series(r):
    ref = oracles.bessel_series(0, r)
    assert abs(phi_radial(2, 1j, r).to_complex() - ref) <= 1e-9


def test_n2_real_s_is_modified_bessel():
    for r in (0.5, 3.0, 12.0):
        ref = oracles.bessel_i0_series(r)
        assert _rel(phi_radial(2, 1.0, r), ref) <= 1e-10


@pytest.mark.parametrize("n", [2, 4, 5, 7])
@pytest.mark.parametrize("s,r", [(0.7 + 0.4j, 3.0), (2j, 4.0), (1.5, 6.0)])
def test_against_mpmath_quadrature(n, s, r):
    assert _rel(phi_radial(n, s, r), oracles.radial_mpmath(n, s, r)) <= 1e-10


def test_even_in_s():
    a = phi_radial(4, 1 + 2j, 3)
    b = phi_radial(4, -1 - 2j, 3)
    assert a.relative_difference(b) <= 1e-12


@settings(max_examples=40, deadline=None)
@given(n=st.integers(2, 8), im=st.floats(-20, 20), r=st.floats(0, 30))
def test_modulus_bound_for_imaginary_s(n, im, r):
    v = phi_radial(n, 1j * im, r)
    assert abs(v) <= 1 + 5e-9


@settings(max_examples=30, deadline=None)
@given(n=st.integers(2, 8), re=st.floats(-5, 5), im=st.floats(-5, 5), r=st.floats(0.01, 10))
@example(n=8, re=0.0, im=3.0, r=9.0)
def test_even_symmetry_property(n, re, im, r):
    s = complex(re, im)
    assert phi_radial(n, s, r).relative_difference(phi_radial(n, -s, r)) <= 1e-12


def test_large_argument_stays_finite():
    v = phi_radial(5, 1.0, 5000.0)
    assert math.isfinite(v.log_magnitude) and v.log_magnitude > 4900


def test_explicit_nodes_warns_when_underresolved():
    with pytest.warns(QuadratureAccuracyWarning):
        radial_quadrature(3, 50j, 10.0, nodes=16)
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        radial_quadrature(3, 1j, 1.0, nodes=256)
    with pytest.raises(ValueError):
        radial_quadrature(3, 1, 1.0, nodes=4)


def test_default_nodes_heuristic():
    assert default_nodes(1j, 1.0) == 64
    assert default_nodes(100j, 10.0) == 4 * 1000 + 32


def test_invalid_arguments():
    with pytest.raises(ValueError):
        phi_radial(1, 1, 1)
    with pytest.raises(ValueError):
        phi_radial(3, 1, -1)


# -- asymptotic law ---------------------------------------------------------------


def test_gamma_constants_match_half_integer_recursion():
    for n2 in range(1, 30):
        assert math.exp(math.lgamma(n2 / 2)) == pytest.approx(oracles.half_integer_gamma(n2), rel=1e-13)


def test_asymptotic_n3():
    v = phi_asymptotic(3, 1, 10)
    assert v.log_magnitude == pytest.approx(10 - math.log(20), abs=1e-13)
    assert v.phase == 0


def test_asymptotic_n2():
    v = phi_asymptotic(2, 1, 10)
    assert v.log_magnitude == pytest.approx(10 - 0.5 * math.log(2 * math.pi * 10), abs=1e-13)


def test_asymptotic_domain():
    with pytest.raises(ValueError):
        phi_asymptotic(3, 1j, 10)
    with pytest.raises(ValueError):
        phi_asymptotic(3, -1, 10)
    with pytest.raises(ValueError):
        phi_asymptotic(3, 1, 0)


@pytest.mark.parametrize("n", [2, 4, 6])
def test_ratio_tends_to_one(n):
    diffs = [phi_radial(n, 1 + 1j, r).relative_difference(phi_asymptotic(n, 1 + 1j, r))
             for r in (50.0, 500.0, 5000.0)]
    assert diffs[0] > diffs[1] > diffs[2]


def test_n3_asymptotic_exact_up_to_far_endpoint():
    # sinh(z)/z = e^z/(2z) (1 - e^{-2z})
    for r in (50.0, 500.0, 5000.0):
        assert phi_radial(3, 1 + 1j, r).relative_difference(phi_asymptotic(3, 1 + 1j, r)) <= 1e-12


# -- dispatcher ---------------------------------------------------------------------


def test_eval_small_is_quadrature():
    res = phi_eval(3, 1, 0.5)
    assert res.branch == "quadrature"
    assert _rel(res.value, math.sinh(0.5) / 0.5) <= 1e-12


def test_eval_large_is_asymptotic():
    res = phi_eval(3, 1, 800)
    assert res.branch == "asymptotic"
    assert res.value.log_magnitude == pytest.approx(800 - math.log(1600), abs=1e-12)


def test_eval_imaginary_escalates():
    res = phi_eval(2, 1j, 1e4)
    assert res.branch == "quadrature-escalated"
    assert abs(res.value.to_complex()) <= 1e-2


def test_constants_file_is_consistent():
    table = load_constants()
    assert table["version"] == "1"
    assert set(table["crossover_abs_sr"]) == {str(n) for n in range(2, 9)}
    # at and beyond each crossover the two branches agree to the stored tolerance
    for n, cross in table["crossover_abs_sr"].items():
        r = max(cross, table["min_re_sr"]) * 1.5
        d = phi_radial(int(n), 1.0, r).relative_difference(phi_asymptotic(int(n), 1.0, r))
        assert d <= table["agreement_tol"]


def test_constants_override(tmp_path, monkeypatch):
    path = tmp_path / "c.json"
    table = dict(load_constants())
    table["crossover_abs_sr"] = {"3": 1e12}
    path.write_text(json.dumps(table))
    monkeypatch.setenv("MH_CONSTANTS_PATH", str(path))
    assert phi_eval(3, 1, 800).branch.startswith("quadrature")
    monkeypatch.delenv("MH_CONSTANTS_PATH")
    assert phi_eval(3, 1, 800).branch == "asymptotic"


# -- LogComplex ---------------------------------------------------------------------


def test_logcomplex_arithmetic():
    a = LogComplex.from_complex(-2 + 1j)
    b = LogComplex.from_complex(0.5j)
    assert (a * b).to_complex() == pytest.approx((-2 + 1j) * 0.5j)
    assert (a / b).to_complex() == pytest.approx((-2 + 1j) / 0.5j)
    assert -math.pi < LogComplex(0.0, 7 * math.pi).phase <= math.pi
    assert LogComplex.from_complex(0).to_complex() == 0


def test_logcomplex_beyond_overflow():
    a = LogComplex(2000.0, 0.3)
    b = LogComplex(2000.0 + math.log1p(1e-9), 0.3)
    assert a.relative_difference(b) == pytest.approx(1e-9, rel=1e-5)


def test_node_cap_constant():
    assert spherical.NODE_CAP == 2**20
