import random
from fractions import Fraction

import pytest

from weilforms.eisenstein import good_prime_local_factor
from weilforms.localdensity import (DensityCache, DensityEngine, VClassMeasure,
                                    count_solutions_bruteforce, local_density)
from weilforms.quadmod import EvenLattice


def test_spec_rank_one_density():
    rec = local_density(3, EvenLattice(((2,),)), Fraction(1), (0,))
    assert rec.value == 2
    assert rec.prime == 3


def test_stabilization_witness():
    # counts at the recorded exponent and the next one must agree
    rng = random.Random(9)
    grams = [((2,),), ((-4,),), ((2, 1), (1, -2)), ((2, 0), (0, 6))]
    for _ in range(50):
        gram = rng.choice(grams)
        eng = DensityEngine(gram, rng.randrange(0, 2))
        p = rng.choice([2, 3])
        n = Fraction(rng.randrange(1, 5))
        rec = eng.density(p, n, tuple(Fraction(0) for _ in gram))
        nu = rec.stabilized_at
        c1 = eng.count(p, n, tuple(Fraction(0) for _ in gram), nu)
        c2 = eng.count(p, n, tuple(Fraction(0) for _ in gram), nu + 1)
        r = eng.rank
        assert Fraction(c1, p ** (nu * (r - 1))) == Fraction(c2, p ** ((nu + 1) * (r - 1)))
        assert rec.value == Fraction(c1, p ** (nu * (r - 1)))


def test_good_prime_closed_form_random():
    # stabilized counting equals the closed-form Euler factor at good primes
    from weilforms import _linalg
    rng = random.Random(17)
    pool = [(), ((2,),), ((-2,),), ((4,),), ((2, 1), (1, -2))]
    cases = 0
    while cases < 100:
        core = rng.choice(pool)
        j = rng.randrange(0, 3)
        rank = len(core) + 2 * j
        if rank < 2:
            continue
        eng = DensityEngine(core, j)
        det_core = _linalg.det([list(r) for r in core]) if core else 1
        det_m = det_core * (-1) ** j
        p = rng.choice([3, 5, 7, 11])
        if (2 * eng.dets) % p == 0:
            continue
        n = Fraction(rng.randrange(1, 40))
        scale = rng.random()
        if scale < 0.3:
            n *= p
        elif scale < 0.45 and p <= 5:
            n *= p * p
        rec = eng.density(p, n, tuple(Fraction(0) for _ in core))
        want = good_prime_local_factor(p, n, rank, det_m)
        assert rec.value == want, (core, j, p, n, rec.value, want)
        cases += 1


def test_good_prime_factor_rank_eight_unimodular():
    # split unimodular lattice of rank 8: Euler factor matches the count
    eng = DensityEngine((), 4)
    for p in (3, 5):
        for n in (Fraction(1), Fraction(2), Fraction(p), Fraction(3 * p)):
            rec = eng.density(p, n, ())
            assert rec.value == good_prime_local_factor(p, n, 8, 1)


def test_engine_matches_bruteforce_with_shifts():
    cases = [
        (((-4,),), 1, (Fraction(3, 4),)),
        (((2, 1), (1, -2)), 1, (Fraction(2, 5), Fraction(1, 5))),
        (((2, 0), (0, 6)), 0, (Fraction(1, 2), Fraction(1, 6))),
    ]
    for gram, j, gamma in cases:
        eng = DensityEngine(gram, j)
        n0 = len(gram)
        q = sum(Fraction(gamma[i]) * gram[i][k] * Fraction(gamma[k])
                for i in range(n0) for k in range(n0)) / 2
        n = (-q) % 1
        if n == 0:
            n = Fraction(1)
        for p in (2, 3):
            for nu in (1, 2):
                big = [list(r) + [0] * (2 * j) for r in gram]
                for t in range(j):
                    r1 = [0] * (n0 + 2 * j)
                    r2 = [0] * (n0 + 2 * j)
                    r1[n0 + 2 * t + 1] = 1
                    r2[n0 + 2 * t] = 1
                    big.append(r1)
                    big.append(r2)
                if (p ** nu) ** len(big) > 1 << 22:
                    continue
                got = eng.count(p, n, gamma, nu)
                want = count_solutions_bruteforce(big, p, n,
                                                  list(gamma) + [0] * 2 * j, nu)
                assert got == want


def test_vclass_measures_match_bruteforce():
    for nu in (1, 2, 3):
        for p in (2, 3, 5):
            meas = VClassMeasure.hyperbolic(p, nu)
            modulus = p ** nu
            brute = [0] * modulus
            for x in range(modulus):
                for y in range(modulus):
                    brute[x * y % modulus] += 1
            assert meas.value_array() == brute
    for nu in (1, 2, 3, 4):
        meas = VClassMeasure.norm_form(nu)
        modulus = 2 ** nu
        brute = [0] * modulus
        for x in range(modulus):
            for y in range(modulus):
                brute[(x * x + x * y + y * y) % modulus] += 1
        assert meas.value_array() == brute


def test_density_cache_round_trip(tmp_path):
    cache = DensityCache(str(tmp_path / "cache"))
    eng = DensityEngine(((2, 1), (1, -2)), 1, cache=cache)
    rec1 = eng.density(2, Fraction(1), (Fraction(0), Fraction(0)))
    cache2 = DensityCache(str(tmp_path / "cache"))
    eng2 = DensityEngine(((2, 1), (1, -2)), 1, cache=cache2)
    rec2 = eng2.density(2, Fraction(1), (Fraction(0), Fraction(0)))
    assert rec1 == rec2
    # stale schema versions are ignored, not deleted
    key = cache.key(eng.core, 1, 2, Fraction(1), (Fraction(0), Fraction(0)))
    path = tmp_path / "cache" / (key + ".json")
    path.write_text('{"schema": 999, "p": 2, "stabilized_at": 1, "value": "7/1"}')
    cache3 = DensityCache(str(tmp_path / "cache"))
    eng3 = DensityEngine(((2, 1), (1, -2)), 1, cache=cache3)
    rec3 = eng3.density(2, Fraction(1), (Fraction(0), Fraction(0)))
    assert rec3.value == rec1.value


def test_decomposition_fuzz_against_bruteforce():
    # random small even lattices: block decomposition + measures vs naive count
    rng = random.Random(31)
    trials = 0
    while trials < 30:
        rank = rng.choice([1, 2, 2, 3])
        gram = [[0] * rank for _ in range(rank)]
        for i in range(rank):
            gram[i][i] = 2 * rng.randrange(-3, 4)
            for j in range(i):
                gram[i][j] = gram[j][i] = rng.randrange(-2, 3)
        from weilforms import _linalg
        if _linalg.det(gram) == 0:
            continue
        gram = tuple(tuple(r) for r in gram)
        j_pad = rng.randrange(0, 2)
        eng = DensityEngine(gram, j_pad)
        p = rng.choice([2, 2, 3, 5])
        # draw gamma from the actual dual lattice
        from weilforms.quadmod import EvenLattice, discriminant_module
        module = discriminant_module(EvenLattice(gram))
        elems = list(module.elements())
        gamma = tuple(module.dual_vector(rng.choice(elems)))
        q = sum(gamma[i] * gram[i][k] * gamma[k]
                for i in range(rank) for k in range(rank)) / 2
        n = (-q) % 1
        n = n + rng.randrange(0, 2)
        if n <= 0:
            n += 1
        nu = rng.choice([1, 2])
        big = [list(r) + [0] * (2 * j_pad) for r in gram]
        for t in range(j_pad):
            r1 = [0] * (rank + 2 * j_pad)
            r2 = [0] * (rank + 2 * j_pad)
            r1[rank + 2 * t + 1] = 1
            r2[rank + 2 * t] = 1
            big.append(r1)
            big.append(r2)
        if (p ** nu) ** len(big) > 1 << 17:
            continue
        got = eng.count(p, n, gamma, nu)
        want = count_solutions_bruteforce(big, p, n,
                                          list(gamma) + [0] * 2 * j_pad, nu)
        assert got == want, (gram, j_pad, p, str(n), gamma, nu, got, want)
        trials += 1


def test_non_dual_gamma_rejected():
    from weilforms.errors import NotInDualError
    eng = DensityEngine(((-6, -2), (-2, 2)), 0)
    with pytest.raises(NotInDualError):
        eng.count(5, Fraction(8, 5), (Fraction(2, 5), Fraction(1, 5)), 1)
