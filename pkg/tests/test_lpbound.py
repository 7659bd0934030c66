import math
from fractions import Fraction

import mpmath as mp
import pytest

from packbound.lattices import standard_lattice, vectors_by_norm
from packbound.lpbound import (
    LpError, RadialAnsatz, SosCertificate, ansatz_eval, build_toy_certificate,
    default_samples, export_sos_sdp, forced_roots_solve, laguerre_coeffs,
    laguerre_value, laguerre_zero_value, newton_refine, sampled_lp,
    verify_sos,
)
from packbound.magic import radial_fourier_oracle
from packbound.simplex import Infeasible, solve_min

OPT8 = math.pi ** 4 / 384


# -- Laguerre -----------------------------------------------------------------

def test_laguerre_base_cases():
    assert laguerre_value(0, Fraction(3), Fraction(7)) == 1
    x = Fraction(2, 3)
    assert laguerre_value(1, Fraction(1, 2), x) == 1 + Fraction(1, 2) - x


def test_laguerre_at_zero():
    # L_2^3(0) = C(5, 2) = 10
    assert laguerre_value(2, Fraction(3), Fraction(0)) == 10
    assert laguerre_zero_value(2, Fraction(3)) == 10


def test_laguerre_coeffs_match_recurrence():
    alpha = Fraction(3)
    for k in (1, 2, 5):
        coeffs = laguerre_coeffs(k, alpha)
        x = Fraction(7, 11)
        direct = sum(c * x ** j for j, c in enumerate(coeffs))
        assert direct == laguerre_value(k, alpha, x)


# -- ansatz -------------------------------------------------------------------

def test_zero_ansatz_is_gaussian():
    with mp.workdps(30):
        for r in (0, mp.mpf("0.7"), 2):
            f = ansatz_eval("f", 8, 3, [0, 0, 0], r)
            h = ansatz_eval("f_hat", 8, 3, [0, 0, 0], r)
            g = mp.exp(-mp.pi * mp.mpf(r) ** 2)
            assert abs(f - g) < 1e-25
            assert abs(h - g) < 1e-25


def test_ansatz_value_at_zero():
    with mp.workdps(30):
        a = [mp.mpf("0.3"), mp.mpf("0.1")]
        ans = RadialAnsatz(8, 2)
        expected = 1 + sum(ak * ck for ak, ck in zip(a, ans.f0_coeffs()))
        assert abs(ansatz_eval("f", 8, 2, a, 0) - expected) < 1e-25


def test_fourier_pairing_oracle():
    with mp.workdps(25):
        a = [mp.mpf("0.013"), mp.mpf("-0.008"), mp.mpf("0.004")]
        for n in (1, 8):
            f = lambda r: ansatz_eval("f", n, 3, a, r)
            for u in (0, mp.mpf("0.5"), 1, 2):
                oracle = radial_fourier_oracle(n, f, u, dps=20, order=10)
                direct = ansatz_eval("f_hat", n, 3, a, u)
                assert abs(oracle - direct) < 1e-6, (n, u)


def test_poisson_pairing_on_e8():
    # sum over the lattice of f_a equals the dual sum for a unimodular
    # lattice, up to Gaussian-tail truncation at squared length 50
    with mp.workdps(40):
        a = [mp.mpf("0.02"), mp.mpf("0.007"), mp.mpf("0.001")]
        table = vectors_by_norm(standard_lattice("e8"), 50, budget=Fraction(50))
        s_f = mp.mpf(0)
        s_h = mp.mpf(0)
        for v, cnt in table.counts:
            if cnt == 0:
                continue
            r = mp.sqrt(mp.mpf(v.numerator) / v.denominator)
            s_f += cnt * ansatz_eval("f", 8, 3, a, r)
            s_h += cnt * ansatz_eval("f_hat", 8, 3, a, r)
        assert abs(s_f - s_h) < 1e-10


# -- sampled LP ----------------------------------------------------------------

def test_sampled_lp_dimension_one():
    res = sampled_lp(1, 6)
    assert res["bound"] >= 1  # density of the integer packing
    assert res["feasible_report"]["feasible"]


def test_sampled_lp_monotone_in_samples():
    base = default_samples(1, 4)[::4]
    small = sampled_lp(1, 4, samples=base, refine_rounds=0)
    big = sampled_lp(1, 4, samples=default_samples(1, 4), refine_rounds=0)
    # supersets of constraints cannot lower the minimum
    assert big["f0_lp_exact"] >= small["f0_lp_exact"] - Fraction(1, 10 ** 9)


@pytest.mark.slow
def test_sampled_lp_e8_window():
    res = sampled_lp(8, 30)
    assert res["feasible_report"]["feasible"], res["feasible_report"]
    assert OPT8 <= res["bound"] <= 1.5 * OPT8


# -- forced roots and refinement -------------------------------------------------

def test_forced_roots_residuals():
    sol = forced_roots_solve(8, 5, 1.0, [2.0], [math.sqrt(2)], dps=40)
    assert sol["residual"] < 1e-30
    with mp.workdps(40):
        ans = RadialAnsatz(8, 5)
        a = sol["a"]
        assert abs(ans.f_value(a, 1.0)) < 1e-25
        assert abs(ans.f_value(a, 2.0)) < 1e-25
        assert abs(ans.f_deriv(a, 2.0)) < 1e-20


def test_forced_roots_count_mismatch():
    with pytest.raises(LpError):
        forced_roots_solve(8, 6, 1.0, [2.0], [1.5])


@pytest.mark.slow
def test_newton_refine_e8_close_to_optimal():
    res = newton_refine(8, 45, [math.sqrt(2 + j) for j in range(11)],
                        [math.sqrt(1 + j) for j in range(11)], dps=60)
    assert res["bound"] <= 1.01 * OPT8
    assert res["bound"] >= OPT8
    assert res["violations"][0] < 1e-6


@pytest.mark.slow
def test_newton_refine_leech_within_factor():
    opt24 = math.pi ** 12 / math.factorial(12)
    res = newton_refine(24, 45, [], [], dps=60)
    assert res["bound"] <= 1.05 * opt24
    assert res["bound"] >= opt24


# -- simplex ---------------------------------------------------------------------

def test_simplex_small():
    r = solve_min([1], [[-1]], [-3])
    assert r["x"] == [Fraction(3)] and r["objective"] == 3


def test_simplex_infeasible():
    with pytest.raises(Infeasible):
        solve_min([1], [[1]], [-1])  # x <= -1 with x >= 0


# -- SOS certificates ------------------------------------------------------------

@pytest.fixture(scope="module")
def toy_cert():
    return build_toy_certificate()


def test_toy_certificate_accepted(toy_cert):
    assert verify_sos(toy_cert).status == "verified"


def test_toy_certificate_bound(toy_cert):
    bound, p0 = toy_cert.bound()
    assert bound >= 1  # valid bound for dimension 1
    assert p0 > 0


def test_tampering_rejected(toy_cert):
    cert = toy_cert
    perturb = Fraction(1, 7)
    for which in ("q1", "q2"):
        q = getattr(cert, which)
        for i in range(len(q)):
            for j in range(i, len(q)):
                newq = [list(row) for row in q]
                newq[i][j] += perturb
                newq[j][i] = newq[i][j]
                fields = {"n": cert.n, "d": cert.d, "a": cert.a,
                          "y0": cert.y0, "q1": cert.q1, "q2": cert.q2}
                fields[which] = tuple(tuple(r) for r in newq)
                tampered = SosCertificate(**fields)
                assert verify_sos(tampered).status == "refuted", (which, i, j)


def test_identity_gram_is_psd():
    from packbound.exact import ldlt_psd
    ok, pivots = ldlt_psd([[Fraction(1), Fraction(0)],
                           [Fraction(0), Fraction(1)]])
    assert ok and all(p == 1 for p in pivots)


def test_bad_endpoint_rejected(toy_cert):
    cert = SosCertificate(toy_cert.n, toy_cert.d, toy_cert.a,
                          Fraction(16, 5), toy_cert.q1, toy_cert.q2)
    result = verify_sos(cert)
    assert result.status == "refuted"
    assert any("pi" in s["statement"] and not s["passed"] for s in result.log)


def test_sdpa_export_deterministic_and_structured():
    text1 = export_sos_sdp(1, 4)
    text2 = export_sos_sdp(1, 4)
    assert text1 == text2
    lines = text1.strip().splitlines()
    assert lines[1].endswith("= mDIM")
    assert lines[2] == "3 = nBLOCK"
    nvar = int(lines[1].split()[0])
    assert nvar == 4 + 3 * 4 // 2 + 2 * 3 // 2
    # every data line parses as "matno block i j value"
    for line in lines[5:]:
        parts = line.split()
        assert len(parts) == 5
        int(parts[0]), int(parts[1]), int(parts[2]), int(parts[3])
        float(parts[4])


def test_accepted_certificate_implies_grid_signs(toy_cert):
    # certificate soundness, checked empirically: the certified profile is
    # nonpositive on a dense grid of [y0, 40]
    from packbound.exact import poly_eval
    poly = toy_cert.polynomial()
    y = toy_cert.y0
    while y <= 40:
        assert poly_eval(poly, y) <= 0
        y += Fraction(1, 8)


def test_sos_json_roundtrip(toy_cert):
    from packbound.cli import sos_certificate_from_json, sos_certificate_to_json
    again = sos_certificate_from_json(sos_certificate_to_json(toy_cert))
    assert again == toy_cert
    assert verify_sos(again).status == "verified"
