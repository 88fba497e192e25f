"""Even lattices, their discriminant groups, and the dual Weil representation.

All bookkeeping is exact: Gram matrices are integer matrices, dual vectors
and values of the quadratic form are Fractions.  Only signature detection
and the Weil matrices themselves use floating point.
"""

from __future__ import annotations

import cmath
import itertools
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import _linalg
from .errors import (DegenerateModuleError, IndexMismatchError, NotInDualError,
                     NumericInconsistencyError)

SIGNATURE_TOLERANCE = 1e-6


def _e(x):
    """exp(2 pi i x)."""
    return cmath.exp(2j * cmath.pi * float(x))


def _mod1(x: Fraction) -> Fraction:
    return x - Fraction(math.floor(x))


@dataclass(frozen=True)
class EvenLattice:
    """Nondegenerate even lattice given by its integer Gram matrix."""

    gram: tuple

    def __post_init__(self):
        g = tuple(tuple(int(x) for x in row) for row in self.gram)
        object.__setattr__(self, "gram", g)
        n = len(g)
        if any(len(row) != n for row in g):
            raise DegenerateModuleError("Gram matrix must be square")
        for i in range(n):
            if g[i][i] % 2:
                raise DegenerateModuleError("Gram diagonal must be even")
            for j in range(n):
                if g[i][j] != g[j][i]:
                    raise DegenerateModuleError("Gram matrix must be symmetric")
        if n and _linalg.det(g) == 0:
            raise DegenerateModuleError("Gram matrix is singular")

    @property
    def rank(self) -> int:
        return len(self.gram)

    def det(self) -> int:
        return _linalg.det(self.gram) if self.rank else 1

    def qvalue(self, v) -> Fraction:
        """Q(v) = v^T G v / 2 for a rational vector v in basis coordinates."""
        v = [Fraction(x) for x in v]
        total = Fraction(0)
        for i in range(self.rank):
            for j in range(self.rank):
                total += v[i] * self.gram[i][j] * v[j]
        return total / 2

    def pairing(self, v, w) -> Fraction:
        v = [Fraction(x) for x in v]
        w = [Fraction(x) for x in w]
        return sum(v[i] * self.gram[i][j] * w[j]
                   for i in range(self.rank) for j in range(self.rank))

    def in_dual(self, v) -> bool:
        """v lies in the dual lattice iff G v is integral."""
        gv = _linalg.mat_vec(self.gram, [Fraction(x) for x in v])
        return all(x.denominator == 1 for x in map(Fraction, gv))


@dataclass(frozen=True)
class FqmElement:
    """Element of a finite quadratic module in generator coordinates."""

    coords: tuple

    def __post_init__(self):
        object.__setattr__(self, "coords", tuple(int(c) for c in self.coords))


class FiniteQuadraticModule:
    """Discriminant group A = L'/L with its Q/Z valued quadratic form.

    Generators come from the Smith normal form of the Gram matrix; each
    generator is sign-normalized so that its canonical dual representative
    in [0,1)^n is the lexicographically larger of the two choices +-w.
    """

    def __init__(self, lattice: EvenLattice):
        self.lattice = lattice
        n = lattice.rank
        if n == 0:
            self.generator_orders = ()
            self.to_dual = ()
            self._vinv = ()
            self._all_orders = ()
            self._kept = ()
            self.q_matrix = ()
        else:
            d, u, v = _linalg.smith_normal_form(lattice.gram)
            kept = tuple(i for i in range(n) if d[i] > 1)
            cols = [[Fraction(v[r][i], d[i]) for r in range(n)] for i in range(n)]
            vmat = [list(row) for row in v]
            for i in kept:
                w = tuple(_mod1(x) for x in cols[i])
                wneg = tuple(_mod1(-x) for x in cols[i])
                if wneg > w:
                    for r in range(n):
                        cols[i][r] = -cols[i][r]
                        vmat[r][i] = -vmat[r][i]
            self._all_orders = tuple(d)
            self._kept = kept
            self.generator_orders = tuple(d[i] for i in kept)
            self.to_dual = tuple(tuple(cols[i]) for i in kept)
            vinv = _linalg.inverse(vmat)
            self._vinv = tuple(tuple(x for x in row) for row in vinv)
            qm = []
            for a, wa in enumerate(self.to_dual):
                row = []
                for b, wb in enumerate(self.to_dual):
                    if a == b:
                        row.append(_mod1(lattice.qvalue(wa)))
                    else:
                        row.append(_mod1(lattice.pairing(wa, wb)))
                qm.append(tuple(row))
            self.q_matrix = tuple(qm)
        self.order = 1
        for d_i in self.generator_orders:
            self.order *= d_i
        if self.order != abs(lattice.det()):
            raise DegenerateModuleError("group order does not match |det|")
        self.signature_mod8 = self._milgram_signature()

    # -- elements ----------------------------------------------------------

    def zero(self) -> FqmElement:
        return FqmElement(tuple(0 for _ in self.generator_orders))

    def element(self, coords) -> FqmElement:
        return FqmElement(tuple(c % d for c, d in zip(coords, self.generator_orders)))

    def elements(self):
        for coords in itertools.product(*(range(d) for d in self.generator_orders)):
            yield FqmElement(coords)

    def neg(self, gamma: FqmElement) -> FqmElement:
        return self.element(tuple(-c for c in gamma.coords))

    def add(self, a: FqmElement, b: FqmElement) -> FqmElement:
        return self.element(tuple(x + y for x, y in zip(a.coords, b.coords)))

    def is_self_negative(self, gamma: FqmElement) -> bool:
        return self.neg(gamma) == gamma

    def orbit_rep(self, gamma: FqmElement) -> FqmElement:
        """Lexicographically smaller of gamma, -gamma."""
        neg = self.neg(gamma)
        return gamma if gamma.coords <= neg.coords else neg

    def orbit_reps(self):
        seen = set()
        for gamma in self.elements():
            rep = self.orbit_rep(gamma)
            if rep.coords not in seen:
                seen.add(rep.coords)
                yield rep

    def dual_vector(self, gamma: FqmElement):
        """Canonical dual-lattice representative of gamma (may be any coset rep)."""
        n = self.lattice.rank
        out = [Fraction(0)] * n
        for c, w in zip(gamma.coords, self.to_dual):
            for r in range(n):
                out[r] += c * w[r]
        return tuple(out)

    def element_order(self, gamma: FqmElement) -> int:
        out = 1
        for c, d in zip(gamma.coords, self.generator_orders):
            g = math.gcd(c, d)
            out = out * (d // g) // math.gcd(out, d // g)
        return out

    # -- quadratic form ----------------------------------------------------

    def qvalue(self, gamma: FqmElement) -> Fraction:
        total = Fraction(0)
        c = gamma.coords
        for i in range(len(c)):
            total += c[i] * c[i] * self.q_matrix[i][i]
            for j in range(i + 1, len(c)):
                total += c[i] * c[j] * self.q_matrix[i][j]
        return _mod1(total)

    def bilinear(self, a: FqmElement, b: FqmElement) -> Fraction:
        return _mod1(self.qvalue(self.add(a, b)) - self.qvalue(a) - self.qvalue(b))

    def _milgram_signature(self) -> int:
        total = 0j
        for gamma in self.elements():
            total += _e(self.qvalue(gamma))
        modulus = abs(total)
        if abs(modulus - math.sqrt(self.order)) > SIGNATURE_TOLERANCE * self.order:
            raise DegenerateModuleError("Gauss sum modulus violates nondegeneracy")
        phase = cmath.phase(total) / (2 * math.pi) * 8
        nearest = round(phase)
        if abs(phase - nearest) > 1e-3:
            raise NumericInconsistencyError(
                "Gauss sum phase %r is not close to a multiple of 1/8" % phase)
        return nearest % 8

    def __eq__(self, other):
        return (isinstance(other, FiniteQuadraticModule)
                and self.lattice.gram == other.lattice.gram)

    def __repr__(self):
        return "FiniteQuadraticModule(orders=%r, sig=%d)" % (
            list(self.generator_orders), self.signature_mod8)


# -- module-level operations ------------------------------------------------


def discriminant_module(lattice: EvenLattice) -> FiniteQuadraticModule:
    return FiniteQuadraticModule(lattice)


def qvalue(module: FiniteQuadraticModule, gamma: FqmElement) -> Fraction:
    return module.qvalue(gamma)


def bilinear(module: FiniteQuadraticModule, a: FqmElement, b: FqmElement) -> Fraction:
    return module.bilinear(a, b)


def signature(module: FiniteQuadraticModule) -> int:
    return module.signature_mod8


def weil_matrices(module: FiniteQuadraticModule):
    """Matrices of rho*(S) and rho*(T) in the basis e_gamma, lex order."""
    elems = list(module.elements())
    n = len(elems)
    index = {g.coords: i for i, g in enumerate(elems)}
    rho_t = np.zeros((n, n), dtype=complex)
    for i, g in enumerate(elems):
        rho_t[i, i] = _e(-module.qvalue(g))
    rho_s = np.zeros((n, n), dtype=complex)
    phase = _e(Fraction(module.signature_mod8, 8)) / math.sqrt(module.order)
    for j, g in enumerate(elems):
        for i, b in enumerate(elems):
            rho_s[i, j] = phase * _e(module.bilinear(g, b))
    del index
    return rho_s, rho_t


def enlarge_lattice(lattice: EvenLattice, m: Fraction, beta) -> EvenLattice:
    """Rank n+1 even lattice on L + Z with Q(v, t) = Q(v + t*beta) + m t^2."""
    m = Fraction(m)
    beta = tuple(Fraction(x) for x in beta)
    if m <= 0:
        raise IndexMismatchError("index m must be positive")
    if not lattice.in_dual(beta):
        raise IndexMismatchError("beta is not in the dual lattice")
    qbeta = lattice.qvalue(beta)
    corner = qbeta + m
    if corner.denominator != 1:
        raise IndexMismatchError("m + Q(beta) must be integral")
    n = lattice.rank
    gbeta = _linalg.mat_vec([list(r) for r in lattice.gram], list(beta)) if n else []
    gbeta = [Fraction(x) for x in gbeta]
    if any(x.denominator != 1 for x in gbeta):
        raise IndexMismatchError("beta is not in the dual lattice")
    rows = []
    for i in range(n):
        rows.append(tuple(lattice.gram[i]) + (int(gbeta[i]),))
    rows.append(tuple(int(x) for x in gbeta) + (2 * int(corner),))
    return EvenLattice(tuple(rows))


def dual_coset(lattice: EvenLattice, v) -> FqmElement:
    """Canonical coordinates of v + L in the discriminant group."""
    module = discriminant_module(lattice)
    return module_dual_coset(module, v)


def module_dual_coset(module: FiniteQuadraticModule, v) -> FqmElement:
    v = [Fraction(x) for x in v]
    lat = module.lattice
    if len(v) != lat.rank:
        raise NotInDualError("wrong vector length")
    if not lat.in_dual(v):
        raise NotInDualError("vector does not pair integrally with the lattice")
    if lat.rank == 0:
        return module.zero()
    t = _linalg.mat_vec([list(r) for r in module._vinv], v)
    coords = []
    for i in module._kept:
        c = Fraction(t[i]) * module._all_orders[i]
        if c.denominator != 1:
            raise NotInDualError("vector does not lie in the dual lattice")
        coords.append(int(c) % module._all_orders[i])
    return FqmElement(tuple(coords))


def cyclic_module(n_disc: int):
    """The cyclic module of order N with Q(x) = -N x^2 on (1/N)Z/Z, N odd.

    Returns (module, generator) where Q(generator) = -1/N mod 1.
    Realized as the discriminant module of a rank-2 lattice of determinant -N.
    """
    if n_disc % 2 == 0:
        raise DegenerateModuleError("cyclic module with even N is degenerate")
    if n_disc % 4 != 1:
        raise DegenerateModuleError("realizing lattice needs N = 1 mod 4")
    lat = EvenLattice((((1 - n_disc) // 2, 1), (1, 2)))
    module = discriminant_module(lat)
    target = _mod1(Fraction(-1, n_disc))
    gen = None
    for gamma in module.elements():
        if module.element_order(gamma) == n_disc and module.qvalue(gamma) == target:
            gen = gamma
            break
    if gen is None:
        raise DegenerateModuleError("no generator with Q = -1/N found")
    return module, gen
