"""Exact Fourier coefficients of vector-valued Eisenstein series.

The weight k series attached to e_0 for the dual Weil representation of an
even lattice L is assembled coefficient by coefficient as

    c(n, gamma) = eps * (archimedean factor) * prod_p (local density at p)

where the infinite product over good primes collapses, via the functional
equation, to special values L(1-s, chi) of quadratic Dirichlet L-functions
given exactly by generalized Bernoulli numbers.  Densities at bad primes
(p | 2 det) are counted directly; the counting lattice is (-L) + U^j padded
with hyperbolic planes U to rank 2k.  The sign eps is +1 when
2k + sig(A, Q) = 0 mod 8 and -1 when it is 4 mod 8.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .errors import (NumericInconsistencyError, PrecisionError,
                     UnsupportedWeightError)
from .localdensity import DensityEngine, LocalDensityRecord, local_density, _vp
from .quadmod import (EvenLattice, FiniteQuadraticModule, FqmElement, _mod1,
                      discriminant_module, weil_matrices)
from . import _linalg

# -- elementary number theory ----------------------------------------------


@lru_cache(maxsize=None)
def _bernoulli_list(n):
    """Bernoulli numbers B_0..B_n (B_1 = -1/2)."""
    out = [Fraction(1)]
    for m in range(1, n + 1):
        acc = Fraction(0)
        for j in range(m):
            acc += Fraction(math.comb(m + 1, j)) * out[j]
        out.append(-acc / (m + 1))
    return out


def bernoulli_number(n: int) -> Fraction:
    return _bernoulli_list(n)[n]


def bernoulli_poly(n: int, x: Fraction) -> Fraction:
    x = Fraction(x)
    bs = _bernoulli_list(n)
    return sum(Fraction(math.comb(n, k)) * bs[k] * x ** (n - k) for k in range(n + 1))


def factorize(m: int):
    """Trial-division factorization of |m| as a list of (p, e)."""
    m = abs(int(m))
    out = []
    d = 2
    while d * d <= m:
        if m % d == 0:
            e = 0
            while m % d == 0:
                m //= d
                e += 1
            out.append((d, e))
        d += 1 if d == 2 else 2
    if m > 1:
        out.append((m, 1))
    return out


def prime_divisors(m: int):
    return [p for p, _ in factorize(m)]


def squarefree_kernel(m: int) -> int:
    sign = -1 if m < 0 else 1
    out = 1
    for p, e in factorize(m):
        if e % 2:
            out *= p
    return sign * out


def fundamental_discriminant_of(x) -> int:
    """Fundamental discriminant of the square class of a nonzero rational."""
    x = Fraction(x)
    s = squarefree_kernel(x.numerator * x.denominator)
    return s if s % 4 == 1 else 4 * s


def _jacobi(a: int, n: int) -> int:
    # n odd positive
    a %= n
    result = 1
    while a:
        while a % 2 == 0:
            a //= 2
            if n % 8 in (3, 5):
                result = -result
        a, n = n, a
        if a % 4 == 3 and n % 4 == 3:
            result = -result
        a %= n
    return result if n == 1 else 0


def kronecker(a: int, n: int) -> int:
    if n == 0:
        return 1 if abs(a) == 1 else 0
    result = 1
    if n < 0:
        n = -n
        if a < 0:
            result = -result
    e = 0
    while n % 2 == 0:
        n //= 2
        e += 1
    if e:
        if a % 2 == 0:
            return 0
        if e % 2 == 1 and a % 8 in (3, 5):
            result = -result
    return result * _jacobi(a, n)


class KroneckerCharacter:
    """The real character attached to a fundamental discriminant."""

    def __init__(self, disc: int):
        self.disc = int(disc)
        self.conductor = max(abs(self.disc), 1)

    def __call__(self, m: int) -> int:
        return kronecker(self.disc, m)

    @property
    def is_odd(self) -> bool:
        return self.disc < 0

    def __repr__(self):
        return "KroneckerCharacter(%d)" % self.disc


def generalized_bernoulli(chi: KroneckerCharacter, n: int) -> Fraction:
    """B_{n,chi}, so that L(1-n, chi) = -B_{n,chi} / n."""
    if n < 1:
        raise ValueError("n must be >= 1")
    f = chi.conductor
    total = Fraction(0)
    for a in range(1, f + 1):
        ca = chi(a)
        if ca:
            total += ca * bernoulli_poly(n, Fraction(a, f))
    return Fraction(f) ** (n - 1) * total


def lvalue_at_negative(chi: KroneckerCharacter, n: int) -> Fraction:
    """L(1 - n, chi), exact."""
    return -generalized_bernoulli(chi, n) / n


def _gamma_quotient(kappa: int, delta: int) -> Fraction:
    # (-1)^g 4^g g! / ((2g)! (g + delta - 1)!) with g = (kappa - delta)/2
    g = (kappa - delta) // 2
    num = Fraction((-1) ** g * 4 ** g * math.factorial(g))
    return num / (math.factorial(2 * g) * math.factorial(g + delta - 1))


def sqrt_exact(x) -> Fraction:
    x = Fraction(x)
    if x < 0:
        raise ValueError("negative radicand")
    a = math.isqrt(x.numerator)
    b = math.isqrt(x.denominator)
    if a * a != x.numerator or b * b != x.denominator:
        raise ValueError("%s is not a rational square" % x)
    return Fraction(a, b)


# -- good-prime Euler factors ------------------------------------------------


def good_prime_local_factor(p: int, n, rank: int, det_m: int) -> Fraction:
    """Closed-form local density at p for p not dividing 2 * det * den(n).

    `det_m` is the determinant (with sign) of the counting lattice of the
    given rank.
    """
    n = Fraction(n)
    if n.denominator % p == 0 or (2 * det_m) % p == 0:
        raise ValueError("p is not a good prime here")
    lam = 0
    num = n.numerator
    while num % p == 0:
        num //= p
        lam += 1
    if rank % 2 == 0:
        kappa = rank // 2
        chi_p = kronecker(fundamental_discriminant_of(Fraction((-1) ** kappa * det_m)), p)
        x = Fraction(chi_p, p ** (kappa - 1))
        return (1 - Fraction(chi_p, p ** kappa)) * sum(x ** j for j in range(lam + 1))
    kappa = (rank - 1) // 2
    w = Fraction(1, p ** (2 * kappa - 1))
    total = Fraction(1)
    total += (1 - Fraction(1, p)) * sum(w ** t for t in range(1, lam // 2 + 1))
    if lam % 2 == 0:
        unit = n / p ** lam
        chi_p = kronecker(fundamental_discriminant_of((-1) ** kappa * 2 * unit * det_m), p)
        total += chi_p * Fraction(1, p ** kappa) * w ** (lam // 2)
    else:
        total -= Fraction(1, p) * w ** ((lam + 1) // 2)
    return total


# -- q-expansions ------------------------------------------------------------


@dataclass
class QExpansion:
    """Vector-valued q-series with exact rational coefficients.

    Keys of `coeffs` are (gamma coordinates, exponent); exponents satisfy
    n + Q(gamma) integral and 0 <= n < prec.  Missing keys below prec are
    zero coefficients.
    """

    module: FiniteQuadraticModule
    weight: Fraction
    prec: Fraction
    coeffs: dict = field(default_factory=dict)

    def coefficient(self, gamma, n) -> Fraction:
        coords = gamma.coords if isinstance(gamma, FqmElement) else tuple(gamma)
        return self.coeffs.get((coords, Fraction(n)), Fraction(0))

    def is_zero(self) -> bool:
        return all(v == 0 for v in self.coeffs.values())

    def support(self):
        return sorted((g, n) for (g, n), v in self.coeffs.items() if v)

    def __add__(self, other):
        if self.module != other.module or self.weight != other.weight:
            raise ValueError("incompatible expansions")
        out = dict(self.coeffs)
        for key, val in other.coeffs.items():
            out[key] = out.get(key, Fraction(0)) + val
        return QExpansion(self.module, self.weight, min(self.prec, other.prec), out)

    def scale(self, a):
        a = Fraction(a)
        return QExpansion(self.module, self.weight, self.prec,
                          {k: a * v for k, v in self.coeffs.items()})

    __rmul__ = scale

    def common_denominator(self) -> int:
        out = 1
        for v in self.coeffs.values():
            out = out * v.denominator // math.gcd(out, v.denominator)
        return out

    def component(self, gamma):
        coords = gamma.coords if isinstance(gamma, FqmElement) else tuple(gamma)
        items = [(n, v) for (g, n), v in self.coeffs.items() if g == coords and v]
        return sorted(items)

    def evaluate(self, tau: complex):
        """Value of the truncated series at tau, components in lex order."""
        elems = list(self.module.elements())
        index = {g.coords: i for i, g in enumerate(elems)}
        out = np.zeros(max(len(elems), 1), dtype=complex)
        for (g, n), v in self.coeffs.items():
            out[index[g]] += float(v) * cmath.exp(2j * cmath.pi * float(n) * tau)
        return out

    def to_json_dict(self):
        items = []
        for (g, n), v in sorted(self.coeffs.items()):
            if v:
                items.append({"gamma": list(g), "n": _frs(n), "c": _frs(v)})
        return {
            "gram": [list(r) for r in self.module.lattice.gram],
            "weight": _frs(self.weight),
            "prec": _frs(self.prec),
            "coeffs": items,
        }

    def validate(self):
        """Check the key invariants: n + Q(gamma) integral, 0 <= n < prec."""
        for (g, n), _ in self.coeffs.items():
            if not (0 <= n < self.prec):
                raise PrecisionError("exponent %s outside [0, %s)" % (n, self.prec))
            q = self.module.qvalue(self.module.element(g))
            if (n + q).denominator != 1:
                raise NumericInconsistencyError(
                    "exponent %s is not in Z - Q(gamma) for gamma %s" % (n, g))
        return self

    @classmethod
    def from_json_dict(cls, data):
        lattice = EvenLattice(tuple(tuple(r) for r in data["gram"]))
        module = discriminant_module(lattice)
        coeffs = {}
        for item in data["coeffs"]:
            key = (tuple(int(x) for x in item["gamma"]), _frp(item["n"]))
            coeffs[key] = _frp(item["c"])
        return cls(module, _frp(data["weight"]), _frp(data["prec"]),
                   coeffs).validate()


def _frs(x: Fraction) -> str:
    x = Fraction(x)
    return "%d/%d" % (x.numerator, x.denominator)


def _frp(s: str) -> Fraction:
    return Fraction(s)


# -- the Eisenstein series ----------------------------------------------------


def exponents_for(module, gamma, prec, include_zero=False):
    """Exponents n in Z - Q(gamma) with 0 <= n < prec (n > 0 unless asked)."""
    base = _mod1(-module.qvalue(gamma))
    out = []
    n = base
    if base == 0 and not include_zero:
        n = base + 1
    while n < prec:
        out.append(n)
        n += 1
    return out


def eisenstein_qexp(lattice: EvenLattice, weight, prec, cache=None,
                    parallel_map=None) -> QExpansion:
    """Eisenstein series attached to e_0 for the dual Weil representation.

    Returns the zero expansion for antisymmetric weights.  Exact rational
    coefficients at every exponent below prec.
    """
    weight = Fraction(weight)
    prec = Fraction(prec)
    module = discriminant_module(lattice)
    if weight < Fraction(5, 2):
        raise UnsupportedWeightError("Eisenstein weight must be at least 5/2")
    sig = module.signature_mod8
    parity = 2 * weight + sig
    if parity.denominator != 1 or int(parity) % 4 != 0:
        return QExpansion(module, weight, prec, {})
    pad2 = 2 * weight - lattice.rank
    if pad2.denominator != 1 or int(pad2) < 0 or int(pad2) % 2:
        raise UnsupportedWeightError(
            "weight %s is not reachable from rank %d by hyperbolic padding"
            % (weight, lattice.rank))
    j_pad = int(pad2) // 2
    core = tuple(tuple(-x for x in row) for row in lattice.gram)
    engine = DensityEngine(core, j_pad, cache=cache)
    eps = 1 if int(parity) % 8 == 0 else -1
    det_core = _linalg.det(core) if core else 1
    det_m = det_core * (-1) ** j_pad
    dets = abs(det_m)
    bad = prime_divisors(2 * dets)

    coeffs = {}
    if prec > 0:
        coeffs[(module.zero().coords, Fraction(0))] = Fraction(1)

    tasks = []
    for gamma in module.orbit_reps():
        ns = exponents_for(module, gamma, prec)
        if ns:
            tasks.append((gamma, ns))

    if parallel_map is None:
        results = [_orbit_coefficients(engine, weight, eps, det_m, bad,
                                       module.dual_vector(g), ns)
                   for g, ns in tasks]
    else:
        cache_dir = cache.directory if cache is not None else None
        payloads = [(core, j_pad, weight, eps, det_m, bad,
                     module.dual_vector(g), ns, cache_dir) for g, ns in tasks]
        results = parallel_map(_eisenstein_orbit_worker, payloads)
    for (gamma, _), row in zip(tasks, results):
        neg = module.neg(gamma)
        for n, val in row:
            if val:
                coeffs[(gamma.coords, n)] = val
                coeffs[(neg.coords, n)] = val
    return QExpansion(module, weight, prec, coeffs)


def _orbit_coefficients(engine, weight, eps, det_m, bad, gvec, ns):
    out = []
    for n in ns:
        dens = {p: engine.density(p, n, gvec).value for p in bad}
        out.append((n, _assemble(weight, eps, det_m, abs(det_m), bad, dens, n)))
    return out


def _eisenstein_orbit_worker(payload):
    """Top-level worker so process pools can map coefficient tasks."""
    from .localdensity import DensityCache
    core, j_pad, weight, eps, det_m, bad, gvec, ns, cache_dir = payload
    cache = DensityCache(cache_dir) if cache_dir is not None else None
    engine = DensityEngine(core, j_pad, cache=cache)
    return _orbit_coefficients(engine, weight, eps, det_m, bad, gvec, ns)


def _assemble(weight, eps, det_m, dets, bad, dens, n) -> Fraction:
    """Combine bad-prime densities with the good-prime L-value closed form."""
    n = Fraction(n)
    if weight.denominator == 1:
        kappa = int(weight)
        d_form = (-1) ** kappa * det_m
        assert d_form % 4 in (0, 1)
        chi = KroneckerCharacter(fundamental_discriminant_of(Fraction(d_form)))
        f = chi.conductor
        assert chi.is_odd == bool(kappa % 2)
        s0 = sqrt_exact(Fraction(dets, f))
        cquot = _gamma_quotient(kappa, 1 if chi.is_odd else 0)
        lval = lvalue_at_negative(chi, kappa)
        base = Fraction(2 ** kappa) * Fraction(f) ** (kappa - 1) \
            / (math.factorial(kappa - 1) * cquot * lval * s0)
        val = eps * base * n ** (kappa - 1)
        for p in bad:
            val *= dens[p] / (1 - Fraction(chi(p), p ** kappa))
        for p, e in factorize(n.numerator):
            if (2 * dets) % p:
                x = Fraction(chi(p), p ** (kappa - 1))
                val *= sum(x ** t for t in range(e + 1))
        return val
    kappa = int(weight - Fraction(1, 2))
    d_class = Fraction((-1) ** kappa * 2) * n * det_m
    chi = KroneckerCharacter(fundamental_discriminant_of(d_class))
    f = chi.conductor
    assert chi.is_odd == bool(kappa % 2)
    s = sqrt_exact(2 * n * dets / f)
    delta = kappa % 2
    cquot = _gamma_quotient(kappa, delta)
    lval = lvalue_at_negative(chi, kappa)
    b2k = abs(bernoulli_number(2 * kappa))
    base = Fraction(2 ** (kappa + 2)) * math.factorial(kappa) * cquot \
        * (n / f) ** kappa * lval / (s * b2k)
    val = eps * base
    for p in bad:
        val *= dens[p] * (1 - Fraction(chi(p), p ** kappa)) \
            / (1 - Fraction(1, p ** (2 * kappa)))
    for p, e in factorize(n.numerator):
        if (2 * dets) % p:
            alpha = good_prime_local_factor(p, n, 2 * kappa + 1, det_m)
            val *= alpha * (1 - Fraction(chi(p), p ** kappa)) \
                / (1 - Fraction(1, p ** (2 * kappa)))
    return val


# -- numeric modularity check -------------------------------------------------

DEFAULT_TAU_SAMPLES = (1j, 0.28 + 0.96j, -0.35 + 1.05j)


def modularity_residual(f: QExpansion, tau_samples=None) -> float:
    """Max deviation from the S and T transformation laws at sample points.

    Uses the truncated series on both sides, so it is meaningful only when
    prec is large enough that tails are below the reporting threshold
    (samples are kept at im(tau) >= 0.8 and im(-1/tau) >= 0.8).
    """
    if tau_samples is None:
        tau_samples = DEFAULT_TAU_SAMPLES
    module = f.module
    rho_s, rho_t = weil_matrices(module)
    k = float(f.weight)
    worst = 0.0
    for tau in tau_samples:
        tau = complex(tau)
        value = f.evaluate(tau)
        s_lhs = f.evaluate(-1 / tau)
        s_rhs = cmath.exp(k * cmath.log(tau)) * (rho_s @ value)
        t_lhs = f.evaluate(tau + 1)
        t_rhs = rho_t @ value
        worst = max(worst,
                    float(np.max(np.abs(s_lhs - s_rhs))),
                    float(np.max(np.abs(t_lhs - t_rhs))))
    return worst
