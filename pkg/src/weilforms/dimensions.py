"""Dimensions of spaces of antisymmetric vector-valued modular forms.

The formula evaluates Gauss sums over the discriminant group in floating
point and rounds; the rounding residual is recorded and checked.  Valid for
weights k > 2 with k + sig/2 an odd integer.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction

from .errors import NumericInconsistencyError, WrongParityError
from .quadmod import FiniteQuadraticModule, _e

RESIDUAL_TOLERANCE = 1e-4


def sawtooth(x) -> Fraction:
    """B(x) = x - (floor(x) - floor(-x)) / 2, the odd 1-periodic sawtooth."""
    x = Fraction(x)
    return x - Fraction(math.floor(x) - math.floor(-x), 2)


def gauss_sum(a: int, module: FiniteQuadraticModule) -> complex:
    """G(a, A) = sum over gamma of e(a Q(gamma)), at double precision."""
    total = 0j
    for gamma in module.elements():
        total += _e(a * module.qvalue(gamma))
    return total


@dataclass(frozen=True)
class DimensionReport:
    weight: Fraction
    dim_m: int
    dim_s: int
    alpha4_tilde: int
    b1: Fraction
    b2: Fraction
    d_pairs: int
    numeric_residual: float


def dim_antisymmetric(module: FiniteQuadraticModule, weight) -> DimensionReport:
    """dim M_k and dim S_k for an antisymmetric weight k > 2."""
    k = Fraction(weight)
    if k <= 2:
        raise WrongParityError("the dimension formula needs weight > 2")
    sig = module.signature_mod8
    parity = 2 * k + sig
    if parity.denominator != 1 or int(parity) % 4 != 2:
        raise WrongParityError(
            "weight %s is not antisymmetric for signature %d" % (k, sig))
    b1 = Fraction(0)
    b2 = Fraction(0)
    alpha4 = 0
    d_pairs = 0
    seen = set()
    for gamma in module.elements():
        q = module.qvalue(gamma)
        b1 += sawtooth(q)
        neg = module.neg(gamma)
        if neg == gamma:
            b2 += sawtooth(q)
        else:
            rep = min(gamma.coords, neg.coords)
            if rep not in seen:
                seen.add(rep)
                d_pairs += 1
                if q == 0:
                    alpha4 += 1
    order = module.order
    g2 = gauss_sum(2, module)
    g1 = gauss_sum(1, module)
    gm3 = gauss_sum(-3, module)
    total = complex(d_pairs * float(k - 1) / 12)
    total += _e(Fraction(int(2 * (k + 1)) + sig, 8)) * g2.imag / (4 * math.sqrt(order))
    total -= (_e(Fraction(int(4 * k) + 3 * sig - 10, 24)) * (g1 - gm3)).real \
        / (3 * math.sqrt(3 * order))
    total += float(alpha4 + b1 - b2) / 2
    dim_m = round(total.real)
    residual = abs(total.real - dim_m) + abs(total.imag)
    if residual > RESIDUAL_TOLERANCE:
        raise NumericInconsistencyError(
            "dimension formula residual %.3g exceeds tolerance" % residual)
    dim_s = dim_m - alpha4
    if dim_m < 0 or dim_s < 0:
        raise NumericInconsistencyError("negative dimension computed")
    return DimensionReport(weight=k, dim_m=dim_m, dim_s=dim_s,
                           alpha4_tilde=alpha4, b1=b1, b2=b2,
                           d_pairs=d_pairs, numeric_residual=residual)
