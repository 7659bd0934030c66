from fractions import Fraction

import pytest

from packbound.codes import golay24, hamming8, zero_code
from packbound.lattices import (
    EnumerationBudgetError, SymbolicVolume, ball_volume, construction_a,
    covolume, density, dual_lattice, lattice_properties, standard_lattice,
    theta_coefficients, vectors_by_norm,
)


def test_ball_volume_unit_disc():
    v = ball_volume(2, 1)
    assert v.coefficient == 1 and v.pi_power == 1 and v.radicand == 1


def test_ball_volume_interval():
    v = ball_volume(1, Fraction(1, 4))
    assert v.is_rational() and v.rational_value() == 1


def test_ball_volume_dim8():
    v = ball_volume(8, 1)
    assert v.coefficient == Fraction(1, 24) and v.pi_power == 4


def test_construction_a_e8_covolume_and_min():
    e8 = construction_a(hamming8())
    assert covolume(e8).is_rational()
    assert covolume(e8).rational_value() == 1
    props = lattice_properties(e8)
    assert props["min_sq_norm"] == 2


def test_construction_a_zero_code():
    lat = construction_a(zero_code(1))
    cv = covolume(lat)
    assert cv.coefficient == 1 and cv.radicand == 2  # sqrt(2) Z
    assert str(cv) == "sqrt(2)"


def test_e8_properties():
    e8 = standard_lattice("e8")
    props = lattice_properties(e8)
    assert props == {"even": True, "unimodular": True,
                     "min_sq_norm": 2, "kissing": 240}


def test_e8_theta_counts():
    e8 = standard_lattice("e8")
    t = vectors_by_norm(e8, 6)
    assert t.as_dict() == {Fraction(0): 1, Fraction(2): 240,
                           Fraction(4): 2160, Fraction(6): 6720}


def test_l24_covolume():
    l24 = standard_lattice("l24")
    assert covolume(l24).rational_value() == 1
    props = lattice_properties(l24)
    assert props["min_sq_norm"] == 2 and props["kissing"] == 48


def test_leech_lattice():
    leech = standard_lattice("leech")
    assert covolume(leech).rational_value() == 1
    props = lattice_properties(leech)
    assert props == {"even": True, "unimodular": True,
                     "min_sq_norm": 4, "kissing": 196560}


def test_leech_has_no_norm2_vectors():
    leech = standard_lattice("leech")
    t = vectors_by_norm(leech, 6)
    assert t.as_dict() == {Fraction(0): 1, Fraction(2): 0,
                           Fraction(4): 196560, Fraction(6): 16773120}


def test_leech_accepted_shift_is_validated():
    leech = standard_lattice("leech")
    assert leech.metadata["shift_scale_exp"] == 3
    report = leech.metadata["scaling_report"]
    assert all(fails for s, fails in report.items() if s != 3)


def test_zn_density_is_one():
    z1 = standard_lattice("zn", 1)
    d = density(z1)
    assert d.is_rational() and d.rational_value() == 1


def test_e8_density():
    d = density(standard_lattice("e8"))
    assert d.coefficient == Fraction(1, 384) and d.pi_power == 4
    assert str(d) == "pi^4/384"
    assert abs(d.to_float() - 0.2536695079) < 1e-9


def test_leech_density():
    d = density(standard_lattice("leech"))
    assert d.coefficient == Fraction(1, 479001600) and d.pi_power == 12


def test_dual_of_e8_is_e8():
    e8 = standard_lattice("e8")
    d = dual_lattice(e8)
    assert covolume(d).rational_value() == 1
    dprops = lattice_properties(d)
    assert dprops["min_sq_norm"] == 2 and dprops["kissing"] == 240


def test_dual_of_zn():
    z3 = standard_lattice("zn", 3)
    d = dual_lattice(z3)
    assert d.gram == z3.gram


def test_dual_scaled_z():
    lat = construction_a(zero_code(1))  # sqrt(2) Z
    d = dual_lattice(lat)
    cv_prod = covolume(lat) * covolume(d)
    assert cv_prod.is_rational() and cv_prod.rational_value() == 1
    assert d.gram[0][0] == Fraction(1, 2)


def test_covolume_product_with_dual():
    for lat in (standard_lattice("e8"), standard_lattice("zn", 4),
                construction_a(zero_code(2))):
        prod = covolume(lat) * covolume(dual_lattice(lat))
        assert prod.is_rational() and prod.rational_value() == 1


def test_counts_are_centrally_symmetric():
    for lat in (standard_lattice("e8"), standard_lattice("zn", 3)):
        t = vectors_by_norm(lat, 5)
        for v, c in t.counts:
            if v > 0:
                assert c % 2 == 0


def test_zn2_properties():
    props = lattice_properties(standard_lattice("zn", 2))
    assert props == {"even": False, "unimodular": True,
                     "min_sq_norm": 1, "kissing": 4}


def test_generic_counting_agrees_with_diagonal():
    # exercise the recursive path on a small construction-A lattice by
    # stripping its counting hint
    e8 = standard_lattice("e8")
    stripped = type(e8)(e8.dimension, e8.scale_exp, e8.scaled_basis, e8.gram,
                        counting=("generic",))
    a = vectors_by_norm(stripped, 4).as_dict()
    b = vectors_by_norm(e8, 4).as_dict()
    assert a == b


def test_enumeration_budget():
    with pytest.raises(EnumerationBudgetError):
        vectors_by_norm(standard_lattice("e8"), 1000)


def test_doubly_even_self_dual_gives_even_unimodular():
    # cross-module property: Construction A on both named codes
    for code in (hamming8(), golay24()):
        lat = construction_a(code)
        props = lattice_properties(lat)
        assert props["even"] and props["unimodular"]


def test_theta_coefficients_e8():
    e8 = standard_lattice("e8")
    assert theta_coefficients(e8, 5) == [1, 240, 2160, 6720, 17520, 30240]


def test_norm_table_csv():
    t = vectors_by_norm(standard_lattice("zn", 2), 2)
    assert t.to_csv() == "sq_norm,count\n0,1\n1,4\n2,4\n"


def test_lattice_json_shape():
    import json
    e8 = standard_lattice("e8")
    obj = json.loads(e8.to_json())
    assert obj["dimension"] == 8 and obj["scale_exponent"] == 1
    assert len(obj["scaled_basis"]) == 8


def test_symbolic_volume_str():
    assert str(SymbolicVolume(Fraction(3, 4), Fraction(2))) == "3*pi^2/4"
    assert str(SymbolicVolume(Fraction(2))) == "2"
