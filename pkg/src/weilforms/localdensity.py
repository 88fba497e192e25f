"""p-adic representation densities by stabilized counting.

The density of an even lattice M at p is

    lim_nu  p^(-nu(rank-1)) #{x in M/p^nu M : Q(x + gamma) = n mod p^nu},

computed by counting at nu0, nu0+1, ... until two consecutive values agree.

Counting never enumerates the full residue space.  The form is split into
one- and two-dimensional p-adic blocks; p-integral shift components are
absorbed (shifting by a p-adic integer is a bijection of residues), blocks
with no remaining shift have closed-form value distributions constant on
valuation classes (hyperbolic xy and norm-form x^2+xy+y^2 types, any scale),
and only genuinely fractional blocks are enumerated, as residue histograms
that are merged by a single convolution pass.
"""

from __future__ import annotations

import hashlib
import json
import os
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import _linalg
from .errors import StabilizationError

CACHE_ENV_VAR = "WEILFORMS_CACHE_DIR"
CACHE_DEFAULT = ".weilforms-cache"
CACHE_SCHEMA = 1

_MAX_DIST1 = 1 << 18      # largest modulus for a one-variable histogram
_MAX_DIST2 = 1 << 13      # largest modulus for a two-variable histogram
_MAX_CONV = 1 << 15       # largest modulus when histograms must be convolved
_MAX_MEASURE = 1 << 26    # largest modulus for pure class-measure evaluation


@dataclass(frozen=True)
class LocalDensityRecord:
    prime: int
    stabilized_at: int
    value: Fraction


def _vp(x, p) -> int:
    """p-adic valuation; raises on 0."""
    x = Fraction(x)
    if x == 0:
        raise ZeroDivisionError("valuation of zero")
    v = 0
    num, den = x.numerator, x.denominator
    while num % p == 0:
        num //= p
        v += 1
    while den % p == 0:
        den //= p
        v -= 1
    return v


def _den_exp(x, p) -> int:
    den = Fraction(x).denominator
    e = 0
    while den % p == 0:
        den //= p
        e += 1
    return e


def _int_mod(x: Fraction, modulus: int, p: int) -> int:
    """Reduce a p-integral rational mod p^W."""
    x = Fraction(x)
    den = x.denominator
    if den % p == 0:
        raise ValueError("rational is not p-integral")
    return x.numerator * pow(den, -1, modulus) % modulus if modulus > 1 else 0


def _fractional_part(s: Fraction, p: int) -> Fraction:
    """The part of s with negative valuation: s minus a p-adic integer."""
    s = Fraction(s)
    a = _den_exp(s, p)
    if a == 0:
        return Fraction(0)
    pa = p ** a
    m = s.denominator // pa
    num = s.numerator * pow(m, -1, pa) % pa
    return Fraction(num, pa)


# -- p-adic block diagonalization -------------------------------------------


def _padic_block_decomposition(gram, p):
    """Split Q = x^T G x / 2 into one- and two-dimensional p-adic blocks.

    Returns (blocks, binv): blocks is a list of ('one', h) with
    q(x) = h x^2 / 2, or ('two', (a, b, c)) with q(x, y) = (a x^2 + 2 b x y
    + c y^2)/2 and b of strictly minimal valuation (p = 2 only); binv is the
    inverse base change with entries in Z_(p), so shifts transform by
    gamma' = binv * gamma.
    """
    n = len(gram)
    h = [[Fraction(x) for x in row] for row in gram]
    basis = _linalg.identity(n)

    def add_col(dst, src, coef):
        for r in range(n):
            h[r][dst] += coef * h[r][src]
        for c in range(n):
            h[dst][c] += coef * h[src][c]
        for r in range(n):
            basis[r][dst] += coef * basis[r][src]

    def swap(i, j):
        if i == j:
            return
        for r in range(n):
            h[r][i], h[r][j] = h[r][j], h[r][i]
        h[i], h[j] = h[j], h[i]
        for r in range(n):
            basis[r][i], basis[r][j] = basis[r][j], basis[r][i]

    blocks = []
    i = 0
    while i < n:
        vmin, rmin, cmin = None, None, None
        for r in range(i, n):
            for c in range(r, n):
                if h[r][c]:
                    v = _vp(h[r][c], p)
                    if vmin is None or v < vmin:
                        vmin, rmin, cmin = v, r, c
        if vmin is None:
            raise StabilizationError("degenerate block in p-adic reduction")
        diag = next((t for t in range(i, n)
                     if h[t][t] != 0 and _vp(h[t][t], p) == vmin), None)
        if diag is not None:
            swap(i, diag)
            piv = h[i][i]
            for j in range(i + 1, n):
                if h[i][j]:
                    add_col(j, i, -h[i][j] / piv)
            blocks.append(("one", h[i][i]))
            i += 1
            continue
        if p != 2:
            add_col(cmin, rmin, 1)
            if h[cmin][cmin] == 0 or _vp(h[cmin][cmin], p) != vmin:
                add_col(cmin, rmin, -2)
            assert h[cmin][cmin] != 0 and _vp(h[cmin][cmin], p) == vmin
            continue
        swap(i, rmin)
        cmin = rmin if cmin == i else cmin
        swap(i + 1, cmin)
        a, b, d = h[i][i], h[i][i + 1], h[i + 1][i + 1]
        detb = a * d - b * b
        for j in range(i + 2, n):
            u, w = h[i][j], h[i + 1][j]
            if u or w:
                add_col(j, i, -(d * u - b * w) / detb)
                add_col(j, i + 1, -(a * w - b * u) / detb)
        blocks.append(("two", (h[i][i], h[i][i + 1], h[i + 1][i + 1])))
        i += 2
    pos = 0
    for kind, _ in blocks:
        width = 1 if kind == "one" else 2
        for r in range(pos, pos + width):
            for c in range(pos + width, n):
                assert h[r][c] == 0
        pos += width
    binv = _linalg.inverse(basis)
    return blocks, binv


# -- valuation-class measures -------------------------------------------------


class VClassMeasure:
    """A function on Z/p^nu constant on valuation classes.

    vals[a] is the per-residue value on {t : v_p(t) = a} for a < nu;
    zero_val the value at t = 0 (that is, on v_p >= nu).
    """

    def __init__(self, p, nu, vals, zero_val):
        self.p = p
        self.nu = nu
        self.vals = list(vals)
        self.zero_val = zero_val

    @classmethod
    def delta(cls, p, nu):
        return cls(p, nu, [0] * nu, 1)

    @classmethod
    def hyperbolic(cls, p, nu):
        """Counts of x y = t over (x, y) mod p^nu."""
        if nu == 0:
            return cls(p, 0, [], 1)
        unit_count = p ** (nu - 1) * (p - 1)
        vals = [(a + 1) * unit_count for a in range(nu)]
        return cls(p, nu, vals, nu * unit_count + p ** nu)

    @classmethod
    def norm_form(cls, nu):
        """Counts of x^2 + x y + y^2 = t over (x, y) mod 2^nu."""
        if nu == 0:
            return cls(2, 0, [], 1)
        vals = [3 * 2 ** (nu - 1) if a % 2 == 0 else 0 for a in range(nu)]
        return cls(2, nu, vals, 4 ** (nu // 2))

    def rescale(self, e):
        """Measure of p^e * q over the same domain, at the same modulus."""
        p, nu = self.p, self.nu
        if e == 0:
            return self
        if e >= nu:
            return VClassMeasure(p, nu, [0] * nu, p ** (2 * nu))
        # p^e q = t iff p^e | t and q = t / p^e mod p^(nu-e); the truncated
        # histogram already counts over the full (x, y) mod p^nu domain
        base = _truncate_measure(self, nu - e)
        return VClassMeasure(p, nu, [0] * e + base.vals, base.zero_val)

    def value(self, t):
        t %= self.p ** self.nu
        if t == 0:
            return self.zero_val
        a = 0
        while t % self.p == 0:
            t //= self.p
            a += 1
        return self.vals[a]

    def value_array(self):
        """Per-residue values as a list indexed by t mod p^nu."""
        p, nu = self.p, self.nu
        modulus = p ** nu
        out = [None] * modulus
        out[0] = self.zero_val
        for a in range(nu):
            step = p ** a
            val = self.vals[a]
            for u in range(1, modulus // step):
                if u % p:
                    out[u * step] = val
        return out

    def convolve(self, other):
        """Convolution over Z/p^nu; closed under valuation-class functions."""
        p, nu = self.p, self.nu
        assert other.p == p and other.nu == nu
        modulus = p ** nu
        if modulus > _MAX_MEASURE:
            raise StabilizationError("class-measure modulus too large")
        f_arr = self.value_array()
        g_arr = other.value_array()
        out = []
        for t in [p ** c for c in range(nu)] + [0]:
            out.append(sum(f_arr[s] * g_arr[(t - s) % modulus]
                           for s in range(modulus)))
        return VClassMeasure(p, nu, out[:nu], out[nu])

    def total(self):
        sizes = [self.p ** (self.nu - a - 1) * (self.p - 1) for a in range(self.nu)]
        return sum(v * s for v, s in zip(self.vals, sizes)) + self.zero_val


def _truncate_measure(meas, nu_new):
    """Restrict a class measure on Z/p^nu to Z/p^nu_new (nu_new <= nu).

    Only valid when the underlying distribution is a genuine value histogram
    of some map into Z/p^nu: counts of the reduction add over lifted classes.
    """
    p = meas.p
    if nu_new == meas.nu:
        return meas
    assert nu_new < meas.nu
    lift = p ** (meas.nu - nu_new)
    vals = [meas.vals[a] * lift for a in range(nu_new)]
    zero = meas.zero_val
    for a in range(nu_new, meas.nu):
        zero += meas.vals[a] * (p ** (meas.nu - a - 1)) * (p - 1)
    return VClassMeasure(p, nu_new, vals, zero)


def block_measure(kind, data, p, nu):
    """Closed-form value distribution of an unshifted block mod p^nu."""
    if kind == "one":
        raise ValueError("one-dimensional blocks are enumerated")
    a, b, c = data
    e = _vp(b, p)
    det_unit = (a * c - b * b) / Fraction(p ** (2 * e))
    assert _vp(det_unit, p) == 0
    if p != 2:
        raise ValueError("two-dimensional blocks only occur at p = 2")
    cls = int(_int_mod(det_unit, 8, 2))
    if cls == 7:
        base = VClassMeasure.hyperbolic(2, nu)
    elif cls == 3:
        base = VClassMeasure.norm_form(nu)
    else:
        raise AssertionError("impossible unimodular binary determinant %d" % cls)
    return base.rescale(e)


# -- residue histograms for fractional blocks ---------------------------------


def _dist_one(coeffs, p, w_exp):
    """Counts of c0 + c1 x + c2 x^2 mod p^W over x mod p^W."""
    modulus = p ** w_exp
    if modulus > _MAX_DIST1:
        raise StabilizationError("counting modulus %d too large" % modulus)
    c0, c1, c2 = (_int_mod(c, modulus, p) for c in coeffs)
    x = np.arange(modulus, dtype=np.int64)
    vals = ((c2 * x % modulus) * x + c1 * x + c0) % modulus
    return [int(v) for v in np.bincount(vals, minlength=modulus)]


def _dist_two(coeffs, p, w_exp):
    """Counts of a two-variable quadratic mod p^W over (x, y) mod p^W."""
    modulus = p ** w_exp
    if modulus > _MAX_DIST2:
        raise StabilizationError("2-dim counting modulus %d too large" % modulus)
    c0, cx, cy, cxx, cxy, cyy = (_int_mod(c, modulus, p) for c in coeffs)
    y = np.arange(modulus, dtype=np.int64)
    base = ((cyy * y % modulus) * y + cy * y + c0) % modulus
    counts = np.zeros(modulus, dtype=np.int64)
    chunk = max(1, (1 << 22) // modulus)
    for x0 in range(0, modulus, chunk):
        xs = np.arange(x0, min(x0 + chunk, modulus), dtype=np.int64)
        quad = ((cxx * xs % modulus) * xs + cx * xs) % modulus
        lin = (cxy * xs) % modulus
        vals = (quad[:, None] + lin[:, None] * y[None, :] + base[None, :]) % modulus
        counts += np.bincount(vals.ravel(), minlength=modulus)
    return [int(v) for v in counts]


def _convolve_mod(d1, d2, modulus):
    """Circular convolution of two count vectors mod `modulus`."""
    m1 = max(d1) if d1 else 0
    m2 = max(d2) if d2 else 0
    if m1 * m2 * modulus < (1 << 62):
        a = np.asarray(d1, dtype=np.int64)
        b = np.asarray(d2, dtype=np.int64)
        full = np.convolve(a, b)
        out = full[:modulus].copy()
        out[:full.size - modulus] += full[modulus:]
        return [int(v) for v in out]
    out = [0] * modulus
    for i, x in enumerate(d1):
        if x:
            for j, y in enumerate(d2):
                if y:
                    k = i + j
                    if k >= modulus:
                        k -= modulus
                    out[k] += x * y
    return out


# -- the engine ----------------------------------------------------------------


class DensityEngine:
    """Counts representation numbers for core_gram plus j hyperbolic planes."""

    def __init__(self, core_gram, j_pad, cache=None):
        self.core = tuple(tuple(int(x) for x in row) for row in core_gram)
        self.j_pad = int(j_pad)
        self.rank = len(self.core) + 2 * self.j_pad
        self.dets = abs(_linalg.det(self.core)) if self.core else 1
        self.cache = cache
        self._decomp = {}
        self._dist_cache = {}
        self._measure_cache = {}

    def _blocks(self, p):
        if p not in self._decomp:
            self._decomp[p] = _padic_block_decomposition(self.core, p)
        return self._decomp[p]

    def _check_dual(self, gamma):
        # the count is well-defined on L/p^nu L only for gamma in the dual
        for row in self.core:
            pairing = sum(Fraction(a) * Fraction(g) for a, g in zip(row, gamma))
            if pairing.denominator != 1:
                from .errors import NotInDualError
                raise NotInDualError("gamma does not pair integrally with the lattice")

    def _plan(self, p, gamma):
        """Split blocks into enumerated (fractional) and closed-form parts."""
        blocks, binv = self._blocks(p)
        shifts = _linalg.mat_vec([list(r) for r in binv],
                                 [Fraction(x) for x in gamma]) if self.core else []
        shifts = [_fractional_part(Fraction(s), p) for s in shifts]
        enum_polys = []
        measured = []
        pos = 0
        for kind, data in blocks:
            if kind == "one":
                hcoef = data
                s = shifts[pos]
                enum_polys.append(("one", (hcoef / 2 * s * s, hcoef * s, hcoef / 2)))
                pos += 1
            else:
                a, b, c = data
                s, t = shifts[pos], shifts[pos + 1]
                if s == 0 and t == 0:
                    measured.append((kind, data))
                else:
                    enum_polys.append(("two", (a / 2 * s * s + b * s * t + c / 2 * t * t,
                                               a * s + b * t, b * s + c * t,
                                               a / 2, b, c / 2)))
                pos += 2
        return enum_polys, measured

    def _pad_measure(self, p, nu, measured_key, measured_blocks):
        key = (p, nu, measured_key)
        if key not in self._measure_cache:
            out = VClassMeasure.delta(p, nu)
            single = VClassMeasure.hyperbolic(p, nu)
            for _ in range(self.j_pad):
                out = out.convolve(single)
            for kind, data in measured_blocks:
                out = out.convolve(block_measure(kind, data, p, nu))
            self._measure_cache[key] = out
        return self._measure_cache[key]

    def count(self, p, n, gamma, nu):
        """#{x mod p^nu : Q(x + gamma) = n mod p^nu} for the padded lattice."""
        n = Fraction(n)
        self._check_dual(gamma)
        enum_polys, measured = self._plan(p, gamma)
        scale = _den_exp(n, p)
        for _, coeffs in enum_polys:
            for c in coeffs:
                scale = max(scale, _den_exp(c, p))
        if not enum_polys and _den_exp(n, p) > 0:
            return 0
        mkey = tuple(sorted(str(b) for b in measured))
        pad = self._pad_measure(p, nu, mkey, measured)
        if not enum_polys:
            return pad.value(_int_mod(n, p ** nu, p) if nu else 0)
        w_exp = nu + scale
        modulus = p ** w_exp
        pscale = p ** scale
        dists = []
        for kind, coeffs in enum_polys:
            key = (p, w_exp, kind, tuple(Fraction(c) * pscale for c in coeffs))
            if key not in self._dist_cache:
                scaled = key[3]
                if kind == "one":
                    self._dist_cache[key] = _dist_one(scaled, p, w_exp)
                else:
                    self._dist_cache[key] = _dist_two(scaled, p, w_exp)
            dists.append(self._dist_cache[key])
        if len(dists) > 1 and modulus > _MAX_CONV:
            raise StabilizationError("convolution modulus %d too large" % modulus)
        conv = dists[0]
        for d in dists[1:]:
            conv = _convolve_mod(conv, d, modulus)
        target = _int_mod(n * pscale, modulus, p)
        enum_rank = sum(1 if kind == "one" else 2 for kind, _ in enum_polys)
        if self.j_pad == 0 and not measured:
            total = conv[target]
        else:
            nu_mod = p ** nu
            total = 0
            for t_val, cnt in enumerate(conv):
                if cnt:
                    u = (target - t_val) % modulus
                    if u % pscale == 0:
                        total += cnt * pad.value((u // pscale) % nu_mod)
        overcount = pscale ** enum_rank
        assert total % overcount == 0
        return total // overcount

    def max_feasible_exponent(self, p, gamma, n):
        """Largest nu the counting caps allow for this configuration."""
        enum_polys, _ = self._plan(p, gamma)
        scale = _den_exp(Fraction(n), p)
        for _, coeffs in enum_polys:
            for c in coeffs:
                scale = max(scale, _den_exp(c, p))
        if not enum_polys:
            cap = _MAX_MEASURE
        else:
            cap = _MAX_CONV if len(enum_polys) > 1 else _MAX_DIST1
            for kind, _ in enum_polys:
                if kind == "two":
                    cap = min(cap, _MAX_DIST2)
        w_max = 0
        while p ** (w_max + 1) <= cap:
            w_max += 1
        return w_max - scale

    def density(self, p, n, gamma):
        """Stabilized local density with its witness exponent.

        Counting starts at the conservative exponent
        nu0 = v_p(4 den(n) num(4 n det) det) + 3 and requires agreement of
        two consecutive values; if the counting caps make nu0 unreachable the
        start is lowered and three consecutive agreements are required.
        """
        n = Fraction(n)
        gamma = tuple(Fraction(x) for x in gamma)
        cache_key = None
        if self.cache is not None:
            cache_key = self.cache.key(self.core, self.j_pad, p, n, gamma)
            hit = self.cache.get(cache_key)
            if hit is not None:
                return hit
        four_n_det = 4 * n * self.dets
        nu0 = _vp(4 * n.denominator * abs(four_n_det.numerator) * self.dets, p) + 3
        needed = 2
        nu_max = self.max_feasible_exponent(p, gamma, n)
        if nu0 + 1 > nu_max:
            nu0 = nu_max - 2
            needed = 3
            if nu0 < 1:
                raise StabilizationError(
                    "no feasible counting exponent at p=%d" % p)
        streak = 0
        prev = None
        record = None
        first_nu = None
        for nu in range(nu0, min(nu0 + 9, nu_max + 1)):
            cnt = self.count(p, n, gamma, nu)
            val = Fraction(cnt, p ** (nu * (self.rank - 1)))
            if prev is not None and val == prev:
                streak += 1
                if first_nu is None:
                    first_nu = nu - 1
                if streak >= needed - 1:
                    record = LocalDensityRecord(prime=p, stabilized_at=first_nu,
                                                value=val)
                    break
            else:
                streak = 0
                first_nu = None
            prev = val
        if record is None:
            raise StabilizationError(
                "local density did not stabilize at p=%d by nu=%d" % (p, nu0 + 8))
        if self.cache is not None:
            self.cache.put(cache_key, record)
        return record


class DensityCache:
    """On-disk memo for stabilized densities, keyed by content hash."""

    def __init__(self, directory=None):
        if directory is None:
            directory = os.environ.get(CACHE_ENV_VAR, CACHE_DEFAULT)
        self.directory = directory
        self._mem = {}

    def key(self, core, j_pad, p, n, gamma):
        n = Fraction(n)
        payload = json.dumps({
            "gram": [list(r) for r in core],
            "pad": j_pad,
            "p": p,
            "n": "%d/%d" % (n.numerator, n.denominator),
            "gamma": ["%d/%d" % (Fraction(g).numerator, Fraction(g).denominator)
                      for g in gamma],
        }, sort_keys=True)
        return hashlib.sha256(payload.encode()).hexdigest()

    def _path(self, key):
        return os.path.join(self.directory, key + ".json")

    def get(self, key):
        if key in self._mem:
            return self._mem[key]
        path = self._path(key)
        if not os.path.exists(path):
            return None
        try:
            with open(path) as fh:
                data = json.load(fh)
        except (OSError, ValueError):
            return None
        if data.get("schema") != CACHE_SCHEMA:
            return None
        num, den = data["value"].split("/")
        rec = LocalDensityRecord(prime=data["p"],
                                 stabilized_at=data["stabilized_at"],
                                 value=Fraction(int(num), int(den)))
        self._mem[key] = rec
        return rec

    def put(self, key, record):
        self._mem[key] = record
        try:
            os.makedirs(self.directory, exist_ok=True)
            path = self._path(key)
            tmp = path + ".tmp"
            with open(tmp, "w") as fh:
                json.dump({
                    "schema": CACHE_SCHEMA,
                    "p": record.prime,
                    "stabilized_at": record.stabilized_at,
                    "value": "%d/%d" % (record.value.numerator,
                                        record.value.denominator),
                }, fh)
            os.replace(tmp, path)
        except OSError:
            pass


def local_density(p, lattice, n, gamma, cache=None) -> LocalDensityRecord:
    """Stabilized local density of an even lattice at p.

    `gamma` is a dual vector in basis coordinates; `n` a positive rational
    with n + Q(gamma) integral.
    """
    engine = DensityEngine(lattice.gram, 0, cache=cache)
    return engine.density(p, n, tuple(Fraction(x) for x in gamma))


def count_solutions_bruteforce(gram, p, n, gamma, nu):
    """Naive full-enumeration count, for small cross-checks only."""
    n = Fraction(n)
    rank = len(gram)
    modulus = p ** nu
    if modulus ** rank > 1 << 24:
        raise ValueError("brute-force domain too large")
    gamma = [Fraction(x) for x in gamma]
    total = 0
    import itertools
    for x in itertools.product(range(modulus), repeat=rank):
        q = Fraction(0)
        for i in range(rank):
            for j in range(rank):
                q += (x[i] + gamma[i]) * gram[i][j] * (x[j] + gamma[j])
        diff = q / 2 - n
        if diff.denominator % p == 0:
            continue
        if diff.numerator % modulus == 0:
            total += 1
    return total
