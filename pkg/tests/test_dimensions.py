import math
import random
from fractions import Fraction

import pytest

from weilforms.dimensions import dim_antisymmetric, gauss_sum, sawtooth
from weilforms.errors import WrongParityError
from weilforms.quadmod import EvenLattice, cyclic_module, discriminant_module


def test_sawtooth_values():
    assert sawtooth(0) == 0
    assert sawtooth(Fraction(1, 2)) == 0
    rng = random.Random(3)
    for _ in range(20):
        x = Fraction(rng.randrange(-50, 50), rng.randrange(1, 20))
        assert sawtooth(x + 1) == sawtooth(x)
        assert sawtooth(-x) == -sawtooth(x)


def test_gauss_sum_examples():
    triv = discriminant_module(EvenLattice(()))
    assert abs(gauss_sum(1, triv) - 1) < 1e-12
    rng = random.Random(4)
    for gram in [((2,),), ((-4,),), ((2, 1), (1, -2)), ((2, 0), (0, 6))]:
        A = discriminant_module(EvenLattice(gram))
        g1 = gauss_sum(1, A)
        want = math.sqrt(A.order) * complex(
            math.cos(2 * math.pi * A.signature_mod8 / 8),
            math.sin(2 * math.pi * A.signature_mod8 / 8))
        assert abs(g1 - want) < 1e-9
        for _ in range(3):
            a = rng.randrange(1, 12)
            assert abs(gauss_sum(-a, A) - gauss_sum(a, A).conjugate()) < 1e-9


def test_dimension_anchors():
    A = discriminant_module(EvenLattice(((-2, -1), (-1, 2))))
    rep = dim_antisymmetric(A, 5)
    assert rep.dim_s == 1 and rep.numeric_residual < 1e-6

    A2 = discriminant_module(EvenLattice(((-4,),)))
    rep = dim_antisymmetric(A2, Fraction(11, 2))
    assert rep.dim_s == 1 and rep.numeric_residual < 1e-6

    for n in (5, 9):
        M, _ = cyclic_module(n)
        rep = dim_antisymmetric(M, 3)
        assert rep.dim_s == 0 and rep.numeric_residual < 1e-6


def test_wrong_parity_raises():
    A = discriminant_module(EvenLattice(((-2, -1), (-1, 2))))
    with pytest.raises(WrongParityError):
        dim_antisymmetric(A, 4)
    with pytest.raises(WrongParityError):
        dim_antisymmetric(A, Fraction(9, 2))
    with pytest.raises(WrongParityError):
        dim_antisymmetric(A, 1)


@pytest.mark.parametrize("gram,k", [
    (((-4,),), Fraction(11, 2)),
    (((2,),), Fraction(9, 2)),
    (((2, 1), (1, 2)), 4),
    (((-2, -1), (-1, 2)), 5),
    (((2, 0), (0, 6)), 4),
])
def test_dimensions_nonnegative_and_monotone(gram, k):
    A = discriminant_module(EvenLattice(gram))
    rep = dim_antisymmetric(A, k)
    rep12 = dim_antisymmetric(A, k + 12)
    assert rep.dim_m >= rep.dim_s >= 0
    assert rep12.dim_s >= rep.dim_s
