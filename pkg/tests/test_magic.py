from fractions import Fraction

import mpmath as mp
import pytest

from packbound.magic import (
    CertifiedValue, ExactConst, MagicError, MagicFunctionSpec, magic_eval,
    ce_bound_from_function, eigenfunction_eval, legendre_nodes, magic_spec,
    radial_fourier_oracle, taylor_quadratic,
)


def test_legendre_nodes_integrate_polynomial():
    xs, ws = legendre_nodes(8, 30)
    with mp.workdps(30):
        val = sum(w * x ** 6 for x, w in zip(xs, ws))
        assert abs(val - mp.mpf(2) / 7) < 1e-25


def test_combination_constants_8(spec8):
    assert spec8.A == ExactConst(Fraction(-1, 2160), 1)
    assert spec8.B == ExactConst(Fraction(-1, 120), -1)
    # the minus-side magnitude is half the published one; only the product
    # with the minus kernel enters the function, and the Taylor/root tests
    # below pin the product
    assert spec8.beta_table_ratio == Fraction(1, 2)


def test_combination_constants_24(spec24):
    assert spec24.A == ExactConst(Fraction(1, 28304640), 1)
    assert spec24.B == ExactConst(Fraction(-1, 65520), -1)
    assert spec24.beta_table_ratio == 1


def test_normalization_at_zero_8(spec8):
    for side in ("f", "f_hat"):
        v = spec8.eval(side, 0)
        assert abs(v.value - 1) < 1e-30
        assert v.error < 1e-30


def test_normalization_at_zero_24(spec24):
    for side in ("f", "f_hat"):
        v = spec24.eval(side, 0)
        assert abs(v.value - 1) < 1e-30


def test_roots_at_vector_lengths_8(spec8):
    with mp.workdps(70):
        for r in (mp.sqrt(2), mp.mpf(2), mp.sqrt(6), mp.sqrt(8)):
            for side in ("f", "f_hat"):
                v = spec8.eval(side, r)
                assert abs(v.value) < 1e-12


def test_roots_at_vector_lengths_24(spec24):
    with mp.workdps(70):
        for r in (mp.mpf(2), mp.sqrt(6), mp.sqrt(8), mp.sqrt(10)):
            for side in ("f", "f_hat"):
                v = spec24.eval(side, r)
                assert abs(v.value) < 1e-12


def test_simple_root_slope_8(spec8):
    with mp.workdps(70):
        d = spec8.derivative("f", mp.sqrt(2))
        # exact slope of the leading pole term: -sqrt(2)/60
        assert abs(d.value + mp.sqrt(2) / 60) < 1e-10
        assert abs(d.value) > 1e-2
        dd = spec8.derivative("f", 2)
        assert abs(dd.value) < 1e-10


def test_simple_root_slope_24(spec24):
    with mp.workdps(70):
        d = spec24.derivative("f", 2)
        assert abs(d.value + Fraction(1, 16380)) < 1e-10
        dd = spec24.derivative("f", mp.sqrt(6))
        assert abs(dd.value) < 1e-10


def test_fhat_double_root_at_r1(spec8):
    with mp.workdps(70):
        d = spec8.derivative("f_hat", mp.sqrt(2))
        assert abs(d.value) < 1e-10


def test_taylor_quadratic_8(spec8):
    t_f = taylor_quadratic("f", 8, spec8)
    t_fh = taylor_quadratic("f_hat", 8, spec8)
    assert abs(t_f.value - Fraction(-27, 10)) < 1e-6
    assert abs(t_fh.value - Fraction(-3, 2)) < 1e-6


def test_taylor_quadratic_24(spec24):
    t_f = taylor_quadratic("f", 24, spec24)
    t_fh = taylor_quadratic("f_hat", 24, spec24)
    assert abs(t_f.value - Fraction(-14347, 5460)) < 1e-6
    assert abs(t_fh.value - Fraction(-205, 156)) < 1e-6


def test_value_at_sqrt2_24(spec24):
    # below the minimal length both sides equal A kappa1 G1[-8] / 4 = 1/156
    with mp.workdps(70):
        v = spec24.eval("f", mp.sqrt(2))
        w = spec24.eval("f_hat", mp.sqrt(2))
        assert abs(v.value - Fraction(1, 156)) < 1e-12
        assert abs(w.value - Fraction(1, 156)) < 1e-12


def test_sign_conditions_coarse_grid(spec8):
    with mp.workdps(70):
        r = mp.sqrt(2)
        while r <= 8:
            v = spec8.eval("f", r)
            assert v.value <= v.error + 1e-9
            r += mp.mpf(1) / 4
        r = mp.mpf(0)
        while r <= 8:
            v = spec8.eval("f_hat", r)
            assert v.value >= -(v.error + 1e-9)
            r += mp.mpf(1) / 4


def test_minus_eigenfunction_at_sqrt2(spec8):
    # the pole of the transform meets the double zero of the sine factor:
    # the limit is finite (zero value, transversal slope)
    with mp.workdps(70):
        v = spec8.eigenfunction("-", mp.sqrt(2))
        assert mp.isfinite(v.value)
        assert abs(v.value) < 1e-12
        h = mp.mpf("1e-4")
        lo = spec8.eigenfunction("-", mp.sqrt(2) - h).value
        hi = spec8.eigenfunction("-", mp.sqrt(2) + h).value
        extrapolated = (lo + hi) / 2
        assert abs(extrapolated - v.value) < 1e-6
        slope = (hi - lo) / (2 * h)
        assert abs(slope) > 1


def test_split_point_consistency():
    # same values with the integral split at 3/4, 1, 3/2
    vals = []
    for tstar in (Fraction(3, 4), Fraction(1), Fraction(3, 2)):
        spec = MagicFunctionSpec(8, trunc=300, dps=40, tstar=tstar,
                                 quad_orders=(24, 48))
        v = spec.eval("f", mp.mpf("1.3"))
        vals.append(v)
    for v in vals[1:]:
        assert abs(v.value - vals[0].value) <= v.error + vals[0].error + mp.mpf("1e-25")


def test_quadrature_order_insensitivity(spec8):
    alt = MagicFunctionSpec(8, trunc=300, dps=60, quad_orders=(40, 80))
    for r in (mp.mpf("0.7"), mp.mpf("2.9")):
        a = spec8.eval("f", r)
        b = alt.eval("f", r)
        assert abs(a.value - b.value) < 1e-40


def test_gaussian_is_fourier_fixed_point():
    with mp.workdps(30):
        v = radial_fourier_oracle(8, lambda r: mp.exp(-mp.pi * r * r), 1,
                                  dps=20, order=10)
        assert abs(v - mp.exp(-mp.pi)) < 1e-12
        v0 = radial_fourier_oracle(8, lambda r: mp.exp(-mp.pi * r * r), 0,
                                   dps=20, order=10)
        assert abs(v0 - 1) < 1e-12


@pytest.mark.slow
def test_eigenfunction_identities_sampled(spec8):
    # transform of the plus kernel is itself; of the minus kernel, its negative
    with mp.workdps(30):
        for u in (mp.mpf(1), mp.sqrt(2), mp.mpf(2)):
            for sign, eig in (("+", 1), ("-", -1)):
                direct = spec8.eigenfunction(sign, u).value
                oracle = radial_fourier_oracle(
                    8, lambda r: spec8.eigenfunction(sign, r).value, u,
                    dps=20, order=10)
                assert abs(oracle - eig * direct) < 1e-4


def test_ce_bound_requires_certificate(spec8):
    with pytest.raises(MagicError):
        ce_bound_from_function(8, spec8)


def test_ce_bound_unverified_8(spec8):
    with mp.workdps(70):
        b = ce_bound_from_function(8, spec8, allow_unverified=True)
        target = mp.pi ** 4 / 384
        assert abs(b.value - target) / target < 1e-9


def test_ce_bound_unverified_24(spec24):
    with mp.workdps(70):
        b = ce_bound_from_function(24, spec24, allow_unverified=True)
        target = mp.pi ** 12 / mp.factorial(12)
        assert abs(b.value - target) / target < 1e-9


def test_module_level_wrappers(spec8):
    v = magic_eval("f", 8, 0, spec8)
    assert abs(v.value - 1) < 1e-20
    e = eigenfunction_eval("-", 8, 2, spec8)
    assert isinstance(e, CertifiedValue)


def test_invalid_dimension():
    with pytest.raises(MagicError):
        magic_spec(9)
