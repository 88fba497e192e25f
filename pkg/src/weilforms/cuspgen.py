"""Antisymmetric cusp forms from Jacobi Eisenstein coefficients.

The cusp form attached to an index (m, beta) is assembled from the
Eisenstein series of the enlarged lattice: the coefficient of q^n e_gamma
is (1/2m) times the sum over r in Z - <gamma, beta> with r^2 <= 4mn of
r times the enlarged-lattice Eisenstein coefficient at exponent n - r^2/4m
and coset (gamma - (r/2m) beta, r/2m).  Spanning sets iterate indices until
the exact coefficient rank reaches the dimension of the cusp space.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .classnum import hurwitz, unit_orbit_correction
from .dimensions import dim_antisymmetric
from .eisenstein import QExpansion, eisenstein_qexp, exponents_for
from .errors import (ExhaustionError, IndexMismatchError, UnsupportedModuleError,
                     UnsupportedWeightError, WrongParityError)
from .quadmod import (EvenLattice, FqmElement, _mod1, cyclic_module,
                      discriminant_module, enlarge_lattice, module_dual_coset)


@dataclass(frozen=True)
class CuspIndex:
    m: Fraction
    beta: FqmElement

    def __post_init__(self):
        object.__setattr__(self, "m", Fraction(self.m))


@dataclass(frozen=True)
class JacobiCoefficientView:
    """One term of the inner r-sum: the two-variable coefficient c(n, r, gamma)
    read off the enlarged lattice at exponent n - r^2/4m and its coset."""

    n: Fraction
    r: Fraction
    gamma: FqmElement
    value: Fraction


def jacobi_coefficients(module, idx: CuspIndex, gamma: FqmElement, n, eis,
                        beta_vec=None):
    """The finitely many views entering the coefficient of q^n e_gamma."""
    n = Fraction(n)
    m = idx.m
    beta_vec = beta_vec if beta_vec is not None else module.dual_vector(idx.beta)
    gamma_vec = module.dual_vector(gamma)
    emod = eis.module
    out = []
    r0 = _mod1(-module.bilinear(gamma, idx.beta))
    for r in coset_window(r0, 4 * m * n):
        w_vec = tuple(gv - (r / (2 * m)) * bv
                      for gv, bv in zip(gamma_vec, beta_vec)) + (r / (2 * m),)
        w = module_dual_coset(emod, w_vec)
        out.append(JacobiCoefficientView(
            n=n, r=r, gamma=gamma,
            value=eis.coefficient(w, n - r * r / (4 * m))))
    return out


def coset_window(r0: Fraction, bound: Fraction):
    """All r in r0 + Z with r^2 <= bound, ascending."""
    out = []
    if bound < 0:
        return out
    ab = bound.numerator * bound.denominator
    s = Fraction(math.isqrt(ab) + 1, bound.denominator)  # s >= sqrt(bound)
    t = math.ceil(-r0 - s)
    r = r0 + t
    while r * r > bound:
        r += 1
        if r > s:
            return out
    while r * r <= bound:
        out.append(r)
        r += 1
    return out


def _validate_index(module, idx: CuspIndex):
    if idx.m <= 0:
        raise IndexMismatchError("index m must be positive")
    if _mod1(idx.m + module.qvalue(idx.beta)) != 0:
        raise IndexMismatchError("m + Q(beta) must be integral")


def r_series(lattice: EvenLattice, weight, idx: CuspIndex, prec,
             cache=None, parallel_map=None, _eis=None) -> QExpansion:
    """The antisymmetric cusp form attached to (m, beta), exact coefficients."""
    weight = Fraction(weight)
    prec = Fraction(prec)
    module = discriminant_module(lattice)
    _validate_index(module, idx)
    parity = 2 * weight + module.signature_mod8
    if parity.denominator != 1 or int(parity) % 4 != 2:
        raise WrongParityError("weight %s is not antisymmetric for this module"
                               % weight)
    if weight < 4:
        raise UnsupportedWeightError("the Eisenstein route needs weight >= 4")
    m = idx.m
    beta_vec = module.dual_vector(idx.beta)
    enlarged = enlarge_lattice(lattice, m, beta_vec)
    eis = _eis if _eis is not None else eisenstein_qexp(
        enlarged, weight - Fraction(3, 2), prec, cache=cache,
        parallel_map=parallel_map)
    coeffs = {}
    for gamma in module.orbit_reps():
        if module.is_self_negative(gamma):
            continue
        for n in exponents_for(module, gamma, prec):
            views = jacobi_coefficients(module, idx, gamma, n, eis,
                                        beta_vec=beta_vec)
            total = sum((v.r * v.value for v in views), Fraction(0)) / (2 * m)
            if total:
                neg = module.neg(gamma)
                coeffs[(gamma.coords, n)] = total
                coeffs[(neg.coords, n)] = -total
    return QExpansion(module, weight, prec, coeffs)


def candidate_indices(module, m_cutoff):
    """Index iteration order: m ascending, beta by orbit-rep lex order."""
    out = []
    for beta in module.orbit_reps():
        if module.is_self_negative(beta):
            continue
        m = _mod1(-module.qvalue(beta))
        if m == 0:
            m = Fraction(1)
        while m <= m_cutoff:
            out.append(CuspIndex(m, beta))
            m += 1
    out.sort(key=lambda ix: (ix.m, ix.beta.coords))
    return out


class _RankAccumulator:
    """Incremental exact row echelon over Q."""

    def __init__(self):
        self.rows = []
        self.pivots = []

    def add(self, row):
        row = list(row)
        for piv, prow in zip(self.pivots, self.rows):
            if row[piv]:
                f = row[piv] / prow[piv]
                row = [x - f * y for x, y in zip(row, prow)]
        piv = next((i for i, x in enumerate(row) if x), None)
        if piv is None:
            return False
        self.rows.append(row)
        self.pivots.append(piv)
        return True

    @property
    def rank(self):
        return len(self.rows)


def cusp_basis(lattice: EvenLattice, weight, prec=None, cache=None,
               parallel_map=None):
    """A basis of the antisymmetric cusp space as (index, series) pairs.

    Iterates indices until the exact coefficient rank reaches the cusp-space
    dimension; retries once with doubled working precision and a larger
    index cutoff before raising ExhaustionError.  Truncation can only lower
    the rank, so stopping at the target dimension is rigorous.
    """
    weight = Fraction(weight)
    module = discriminant_module(lattice)
    report = dim_antisymmetric(module, weight)
    target = report.dim_s
    if target == 0:
        return []
    work_prec = Fraction(math.ceil(weight / 12) + 2)
    m_cutoff = Fraction(target + 3)
    picked = None
    for _ in range(2):
        picked = _cusp_basis_attempt(lattice, module, weight, target, work_prec,
                                     m_cutoff, cache, parallel_map)
        if picked is not None:
            break
        work_prec *= 2
        m_cutoff += 2
    if picked is None:
        raise ExhaustionError(
            "rank %d not reached for weight %s (cutoff m <= %s, prec %s)"
            % (target, weight, m_cutoff, work_prec))
    out_prec = Fraction(prec) if prec is not None else work_prec
    return [(idx, r_series(lattice, weight, idx, out_prec, cache=cache,
                           parallel_map=parallel_map))
            for idx in picked]


def _cusp_basis_attempt(lattice, module, weight, target, work_prec, m_cutoff,
                        cache, parallel_map):
    keys = []
    for gamma in module.orbit_reps():
        if module.is_self_negative(gamma):
            continue
        for n in exponents_for(module, gamma, work_prec):
            keys.append((gamma.coords, n))
    acc = _RankAccumulator()
    picked = []
    for idx in candidate_indices(module, m_cutoff):
        series = r_series(lattice, weight, idx, work_prec, cache=cache,
                          parallel_map=parallel_map)
        if acc.add([series.coefficient(g, n) for (g, n) in keys]):
            picked.append(idx)
        if acc.rank == target:
            return picked
    return None


def weight3_cyclic(n_disc: int, prec) -> QExpansion:
    """The weight 3 form at index (1/N, 1/N) on the cyclic module of order N.

    Coefficients combine the Hurwitz class number part with the exact
    real-quadratic unit correction.  N must be 1 mod 4; beyond the square
    discriminants only N = 5 carries the needed ideal data.
    """
    prec = Fraction(prec)
    if n_disc % 2 == 0 or n_disc % 4 != 1:
        raise UnsupportedModuleError("cyclic weight-3 family needs odd N = 1 mod 4")
    module, gen = cyclic_module(n_disc)
    coeffs = {}
    for g in range(1, (n_disc + 1) // 2):
        gamma = module.element(tuple(g * c for c in gen.coords))
        base = _mod1(Fraction(g * g, n_disc))
        n = base if base else Fraction(1)
        while n < prec:
            val = _weight3_hol_part(n, g, n_disc) + unit_orbit_correction(n, g, n_disc)
            if val:
                neg = module.neg(gamma)
                coeffs[(gamma.coords, n)] = val
                coeffs[(neg.coords, n)] = -val
            n += 1
    return QExpansion(module, Fraction(3), prec, coeffs)


def _weight3_hol_part(n: Fraction, g: int, n_disc: int) -> Fraction:
    """-6N sum over r in Z + 2g/N, N r^2 <= 4n, of r H(4n - N r^2)."""
    total = Fraction(0)
    for r in coset_window(Fraction(2 * g, n_disc), 4 * n / n_disc):
        arg = 4 * n - n_disc * r * r
        if arg.denominator != 1:
            raise UnsupportedModuleError("non-integral class number argument")
        total += r * hurwitz(int(arg))
    return -6 * n_disc * total
