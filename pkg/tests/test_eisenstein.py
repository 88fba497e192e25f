import random
from fractions import Fraction

import pytest

from weilforms.eisenstein import (KroneckerCharacter, QExpansion, eisenstein_qexp,
                                  fundamental_discriminant_of,
                                  generalized_bernoulli, kronecker,
                                  modularity_residual)
from weilforms.errors import UnsupportedWeightError
from weilforms.quadmod import EvenLattice, discriminant_module, module_dual_coset


def sigma(n, k):
    return sum(d ** k for d in range(1, n + 1) if n % d == 0)


@pytest.fixture(scope="module")
def det16_expansion():
    L = EvenLattice(((0, 0, 2), (0, -4, 0), (2, 0, 0)))
    return eisenstein_qexp(L, Fraction(5, 2), 3)


def test_e4_classical_oracle():
    E = eisenstein_qexp(EvenLattice(()), 4, 6)
    assert E.coefficient((), 0) == 1
    for n in range(1, 6):
        assert E.coefficient((), n) == 240 * sigma(n, 3)


def test_e6_classical_oracle():
    E = eisenstein_qexp(EvenLattice(()), 6, 6)
    for n in range(1, 6):
        assert E.coefficient((), n) == -504 * sigma(n, 5)


def test_constant_term():
    L = EvenLattice(((2, 1), (1, 2)))
    E = eisenstein_qexp(L, 3, 3)
    A = E.module
    assert E.coefficient(A.zero(), 0) == 1
    for g in A.elements():
        if g != A.zero():
            assert E.coefficient(g, 0) == 0


def test_antisymmetric_weight_gives_zero():
    L = EvenLattice(((2, 1), (1, 2)))  # signature 2: weight 4 is antisymmetric
    E = eisenstein_qexp(L, 4, 5)
    assert E.is_zero() and not E.coeffs


def test_weight_below_five_halves_rejected():
    with pytest.raises(UnsupportedWeightError):
        eisenstein_qexp(EvenLattice(((2,),)), 2, 5)


def test_known_weight3_expansion():
    # A2 root lattice at weight 3
    L = EvenLattice(((2, 1), (1, 2)))
    E = eisenstein_qexp(L, 3, 4)
    A = E.module
    g0 = A.zero()
    g1 = module_dual_coset(A, (Fraction(1, 3), Fraction(1, 3)))
    assert dict(E.component(g0))[Fraction(1)] == 72
    assert dict(E.component(g0))[Fraction(2)] == 270
    assert dict(E.component(g0))[Fraction(3)] == 720
    comp = dict(E.component(g1))
    assert comp[Fraction(2, 3)] == 27
    assert comp[Fraction(5, 3)] == 216
    assert comp[Fraction(8, 3)] == 459
    assert comp[Fraction(11, 3)] == 1080
    # symmetric coefficient law
    for (g, n), v in E.coeffs.items():
        assert E.coefficient(A.neg(A.element(g)), n) == v


def test_known_half_integral_expansion(det16_expansion):
    # rank 3 lattice of determinant 16 at weight 5/2
    E = det16_expansion
    A = E.module

    def comp(v):
        return dict(E.component(module_dual_coset(A, [Fraction(x) for x in v])))

    c0 = comp((0, 0, 0))
    assert c0[Fraction(1)] == -8 and c0[Fraction(2)] == -102
    c1 = comp((0, Fraction(3, 4), 0))
    assert c1[Fraction(1, 8)] == -1 and c1[Fraction(9, 8)] == -25
    assert c1[Fraction(17, 8)] == -48
    c2 = comp((0, Fraction(1, 2), 0))
    assert c2[Fraction(1, 2)] == -14 and c2[Fraction(3, 2)] == -16
    c3 = comp((Fraction(1, 2), Fraction(3, 4), Fraction(1, 2)))
    assert c3[Fraction(5, 8)] == -8 and c3[Fraction(13, 8)] == -40


def test_known_weight5_det12_expansion():
    # nontrivial character with denominator 11 in every nonconstant term
    L = EvenLattice(((2, 0), (0, 6)))
    E = eisenstein_qexp(L, 5, 2)
    A = E.module

    def comp(v):
        return dict(E.component(module_dual_coset(A, [Fraction(x) for x in v])))

    F = Fraction
    assert comp((0, 0)) == {F(0): 1, F(1): F(-1280, 11)}
    assert comp((0, F(1, 6))) == {F(11, 12): F(-915, 11), F(23, 12): -1590}
    assert comp((0, F(1, 3))) == {F(2, 3): F(-255, 11), F(5, 3): F(-9984, 11)}
    assert comp((0, F(1, 2))) == {F(1, 4): F(-5, 11), F(5, 4): F(-3198, 11)}
    assert comp((F(1, 2), 0)) == {F(3, 4): F(-410, 11), F(7, 4): F(-12010, 11)}
    assert comp((F(1, 2), F(1, 6))) == {F(2, 3): F(-240, 11),
                                        F(5, 3): F(-10608, 11)}
    assert comp((F(1, 2), F(1, 3))) == {F(5, 12): F(-39, 11),
                                        F(17, 12): F(-5220, 11)}
    assert comp((F(1, 2), F(1, 2))) == {F(1): F(-1360, 11)}


def test_common_denominator_recorded():
    L = EvenLattice(((2, 0), (0, 6)))
    E = eisenstein_qexp(L, 5, 3)
    den = E.common_denominator()
    assert den >= 1
    assert all((v * den).denominator == 1 for v in E.coeffs.values())
    assert any(v.denominator == den for v in E.coeffs.values())


def test_generalized_bernoulli_examples():
    triv = KroneckerCharacter(1)
    assert generalized_bernoulli(triv, 2) == Fraction(1, 6)
    chi4 = KroneckerCharacter(-4)
    assert generalized_bernoulli(chi4, 1) == Fraction(-1, 2)
    rng = random.Random(2)
    for disc in (-3, -4, 5, 8, -8, 12, 13):
        chi = KroneckerCharacter(disc)
        for n in range(1, 6):
            if (disc < 0) != (n % 2 == 1):
                assert generalized_bernoulli(chi, n) == 0


def test_kronecker_symbol_against_legendre():
    for p in (3, 5, 7, 11, 13):
        squares = {x * x % p for x in range(1, p)}
        for a in range(1, p):
            want = 1 if a in squares else -1
            assert kronecker(a, p) == want
    assert kronecker(2, 0) == 0 and kronecker(1, 0) == 1
    assert fundamental_discriminant_of(Fraction(8)) == 8
    assert fundamental_discriminant_of(Fraction(-1)) == -4
    assert fundamental_discriminant_of(Fraction(18)) == 8
    assert fundamental_discriminant_of(Fraction(1, 2)) == 8
    assert fundamental_discriminant_of(Fraction(9)) == 1


def test_modularity_residual_e4():
    E = eisenstein_qexp(EvenLattice(()), 4, 12)
    assert modularity_residual(E, (1j,)) < 1e-6
    assert modularity_residual(E) < 1e-6


def test_modularity_residual_nontrivial_module_prec10():
    # the series handed to the cusp generator must pass the numeric law
    L = EvenLattice(((2, 1), (1, 2)))
    E = eisenstein_qexp(L, 3, 10)
    assert modularity_residual(E) < 1e-4


def test_modularity_residual_zero_expansion():
    L = EvenLattice(((2, 1), (1, 2)))
    E = eisenstein_qexp(L, 4, 5)
    assert modularity_residual(E) == 0


def test_modularity_residual_detects_perturbation(det16_expansion):
    # a unit bump at a low fractional exponent is loud at the sample points
    E = det16_expansion
    key = min(E.coeffs, key=lambda k: k[1] if k[1] > 0 else Fraction(99))
    bad = dict(E.coeffs)
    bad[key] += 1
    Ebad = QExpansion(E.module, E.weight, E.prec, bad)
    assert modularity_residual(Ebad) > 1e-2
    # integral-exponent bumps are quieter but still visible
    E4 = eisenstein_qexp(EvenLattice(()), 4, 12)
    bad4 = dict(E4.coeffs)
    bad4[((), Fraction(1))] += 1
    assert modularity_residual(QExpansion(E4.module, E4.weight, E4.prec, bad4)) > 1e-4


def test_qexpansion_json_round_trip(det16_expansion):
    E = det16_expansion
    L = E.module.lattice
    data = E.to_json_dict()
    E2 = QExpansion.from_json_dict(data)
    assert E2.coeffs == E.coeffs
    assert E2.weight == E.weight and E2.prec == E.prec
    assert E2.module.lattice.gram == L.gram


def test_from_json_rejects_bad_exponent_class():
    E = eisenstein_qexp(EvenLattice(((2, 1), (1, 2))), 3, 3)
    data = E.to_json_dict()
    data["coeffs"].append({"gamma": [1, 1], "n": "1/7", "c": "3/1"})
    with pytest.raises(Exception):
        QExpansion.from_json_dict(data)


def test_parallel_map_determinism():
    from weilforms.eisenstein import _eisenstein_orbit_worker

    def fake_pool_map(func, items):
        return [func(x) for x in reversed(list(items))][::-1]

    L = EvenLattice(((2, 1), (1, 2)))
    seq = eisenstein_qexp(L, 3, 4)
    par = eisenstein_qexp(L, 3, 4, parallel_map=fake_pool_map)
    assert seq.coeffs == par.coeffs
