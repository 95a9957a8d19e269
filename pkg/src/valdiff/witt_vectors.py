"""Truncated Witt vectors W_N(k) over the finite-field tower.

Ring operations evaluate the Witt structure polynomials at the given
components through their defining recursion: components are lifted to the
unramified ring (Z/p^N)[x]/(f), ghost components are combined, and the
result components are recovered one stage at a time with an exact division
by p^k at stage k. Whole polynomial expressions can stay in ghost
coordinates and convert back once (``WittVector.polynomial_value``).
``witt_structure_polys`` builds the same polynomials
symbolically over Z for inspection and cross-checking.
"""

from functools import lru_cache
from math import comb

from .errors import (InexactDivision, MixedContext, NotDivisible, NotHomogeneous,
                     PrecisionExhausted, UsageError, ZeroArgument)
from .residue_fields import FiniteFieldTower, FqElement, defining_polynomial, fq_from_json
from .sigma_polynomials import MultiIndex, SigmaPolynomial


# ---------------------------------------------------------------------------
# Lifted arithmetic in (Z/p^N)[x]/(f).

class _LiftRing:
    def __init__(self, p, m, modulus):
        self.p, self.m, self.mod = p, m, modulus
        self.f = defining_polynomial(p, m)

    def lift(self, x):
        return x.coords[0] if self.m == 1 else x.coords

    def add(self, a, b):
        if self.m == 1:
            return (a + b) % self.mod
        return tuple((x + y) % self.mod for x, y in zip(a, b))

    def sub(self, a, b):
        if self.m == 1:
            return (a - b) % self.mod
        return tuple((x - y) % self.mod for x, y in zip(a, b))

    def scale(self, a, k):
        if self.m == 1:
            return a * k % self.mod
        return tuple(x * k % self.mod for x in a)

    def combine(self, values):
        """sum of p^i * values[i]."""
        p, mod = self.p, self.mod
        if self.m == 1:
            acc, scale = 0, 1
            for v in values:
                acc += scale * v
                scale *= p
            return acc % mod
        acc, scale = [0] * self.m, 1
        for v in values:
            for j, c in enumerate(v):
                acc[j] += scale * c
            scale *= p
        return tuple(c % mod for c in acc)

    def mul(self, a, b):
        if self.m == 1:
            return a * b % self.mod
        m, f, mod = self.m, self.f, self.mod
        if m == 2:
            # x^2 = -f0 - f1 x
            a0, a1 = a
            b0, b1 = b
            hi = a1 * b1
            return ((a0 * b0 - hi * f[0]) % mod, (a0 * b1 + a1 * b0 - hi * f[1]) % mod)
        prod = [0] * (2 * m - 1)
        for i, x in enumerate(a):
            if x:
                for j, y in enumerate(b):
                    prod[i + j] += x * y
        for k in range(2 * m - 2, m - 1, -1):
            c = prod[k]
            if c:
                base = k - m
                for i in range(m):
                    prod[base + i] -= c * f[i]
        return tuple(x % mod for x in prod[:m])

    def power_p(self, a):
        p, mod = self.p, self.mod
        if self.m == 1:
            return pow(a, p, mod)
        if self.m == 2 and p == 2:
            a0, a1 = a
            hi = a1 * a1
            f = self.f
            return ((a0 * a0 - hi * f[0]) % mod, (2 * a0 * a1 - hi * f[1]) % mod)
        return self.power(a, p)

    def divide_reduce(self, a, k):
        """Exact division by p^k followed by reduction mod p."""
        q, p = self.p ** k, self.p
        if self.m == 1:
            if a % q:
                raise InexactDivision(f"ghost recursion not divisible by p^{k}")
            return ((a // q) % p,)
        if any(v % q for v in a):
            raise InexactDivision(f"ghost recursion not divisible by p^{k}")
        return tuple((v // q) % p for v in a)

    def power(self, a, e):
        if self.m == 1:
            return pow(a, e, self.mod)
        if e == 0:
            return (1,) + (0,) * (self.m - 1)
        result = None
        while True:
            if e & 1:
                result = a if result is None else self.mul(result, a)
            e >>= 1
            if not e:
                return result
            a = self.mul(a, a)


_LIFT_RINGS = {}


def _lift_ring(p, m, n):
    key = (p, m, n)
    ring = _LIFT_RINGS.get(key)
    if ring is None:
        ring = _LIFT_RINGS.setdefault(key, _LiftRing(p, m, p ** n))
    return ring


def _ghost(lr, lifted, n):
    """Ghost components W_k(lifted) mod p^n for k < n."""
    power_p, combine = lr.power_p, lr.combine
    current = []  # current[i] = lifted[i]^(p^(k-i))
    ghosts = []
    for k in range(n):
        current = [power_p(x) for x in current]
        current.append(lifted[k])
        ghosts.append(combine(current))
    return ghosts


def _from_ghost(lr, ghosts):
    """Recover reduced components from ghost components (the S_k recursion).

    Also returns the ghost components of the reduced lift, which the
    recursion computes along the way.
    """
    p, scalar = lr.p, lr.m == 1
    power_p, combine, sub, add, scale = lr.power_p, lr.combine, lr.sub, lr.add, lr.scale
    comps, current, canonical = [], [], []
    for k, ghost in enumerate(ghosts):
        if current:
            current = [power_p(x) for x in current]
            lower = combine(current)
            comp = lr.divide_reduce(sub(ghost, lower), k)
        else:
            lower = None
            comp = lr.divide_reduce(ghost, k)
        comps.append(comp)
        lifted = comp[0] if scalar else comp
        current.append(lifted)
        own = scale(lifted, p ** k) if k else lifted
        canonical.append(own if lower is None else add(own, lower))
    return comps, canonical


# ---------------------------------------------------------------------------
# The ring and its elements.

class WittRing:
    """Context for W_N(k): prime, precision and residue field handle."""

    name = "witt"

    def __init__(self, p, N, field=None, tower_bound=None):
        if N < 1:
            raise UsageError("precision must be positive")
        self.p, self.N = p, N
        self.residue_field = field or FiniteFieldTower(p, tower_bound=tower_bound)
        if self.residue_field.characteristic != p:
            raise MixedContext("residue field characteristic differs from p")

    @property
    def precision(self):
        return self.N

    def with_precision(self, N):
        return WittRing(self.p, N, self.residue_field)

    def __eq__(self, other):
        return (isinstance(other, WittRing) and other.p == self.p
                and other.N == self.N and other.residue_field == self.residue_field)

    def __hash__(self):
        return hash(("witt", self.p, self.N))

    def __repr__(self):
        return f"WittRing(p={self.p}, N={self.N})"

    def element(self, components):
        comps = [c if isinstance(c, FqElement) else self.residue_field.from_int(c)
                 for c in components]
        if len(comps) != self.N:
            raise UsageError(f"expected {self.N} components, got {len(comps)}")
        return WittVector(self, comps)

    def zero(self):
        return WittVector(self, [self.residue_field.zero()] * self.N)

    def one(self):
        return self.teichmuller(self.residue_field.one())

    def teichmuller(self, r):
        return WittVector(self, [r] + [r * 0] * (self.N - 1))

    def from_int(self, n):
        return witt_from_integer(n, self)

    def coerce(self, c):
        if isinstance(c, WittVector):
            return c
        if isinstance(c, int):
            return self.from_int(c)
        if isinstance(c, FqElement):
            return self.teichmuller(c)
        raise UsageError(f"cannot coerce {c!r} into {self!r}")

    # valued-field interface used by the Hensel and pc engines
    def valuation(self, x):
        return witt_valuation(x)

    def residue(self, x):
        return witt_pi(x)

    def ac(self, x):
        return witt_ac(x)

    def cross_section(self, gamma):
        return witt_cross_section(gamma, self)

    def lift(self, r):
        return self.teichmuller(r)

    def is_integral(self, x):
        return True

    def divide_exact(self, x, y):
        """x / y for v(x) >= v(y); precision drops by v(y)."""
        v = witt_valuation(y)
        if v is None:
            raise ZeroArgument("division by an element that is zero at precision")
        vx = witt_valuation(x)
        if vx is not None and vx < v:
            raise NotDivisible("quotient leaves the valuation ring")
        for _ in range(v):
            x, y = witt_div_p(x), witt_div_p(y)
        return x * witt_unit_inverse(y)

    def pad(self, x):
        """Extend a lower-precision vector to this precision with zero components."""
        if x.N > self.N:
            return x.truncate(self.N)
        zero = self.residue_field.zero()
        return WittVector(self, list(x.components) + [zero] * (self.N - x.N))

    def to_json(self, x):
        return x.to_json()

    def from_json(self, data):
        return witt_from_json(data, self.residue_field)

    def descriptor(self):
        return {"backend": "witt", "p": self.p, "N": self.N}


class WittVector:
    """Length-N Witt vector with components in a common tower level."""

    __slots__ = ("ring", "components", "level", "_ghost_cache")

    def __init__(self, ring, components):
        comps = list(components)
        level = 1
        for c in comps:
            level = level * c.m // _gcd(level, c.m)
        self.components = tuple(c.embed(level) for c in comps)
        self.level = level
        self.ring = ring
        self._ghost_cache = {}

    @property
    def p(self):
        return self.ring.p

    @property
    def N(self):
        return len(self.components)

    def _check(self, other):
        if isinstance(other, int):
            return witt_from_integer(other, self.ring)
        if isinstance(other, FqElement):
            return self.ring.teichmuller(other)
        if not isinstance(other, WittVector):
            return NotImplemented
        if other.ring.p != self.ring.p or other.N != self.N:
            raise MixedContext(f"W_{self.N} vs W_{other.N} over p={self.p}/{other.p}")
        return other

    def _ghosts(self, level):
        """Ghost components of the reduced lift at the given tower level, cached."""
        ghosts = self._ghost_cache.get(level)
        if ghosts is None:
            lr = _lift_ring(self.p, level, self.N)
            ghosts = _ghost(lr, [lr.lift(c.embed(level)) for c in self.components], self.N)
            self._ghost_cache[level] = ghosts
        return ghosts

    def _ghost_pair(self, other):
        level = self.level * other.level // _gcd(self.level, other.level)
        lr = _lift_ring(self.p, level, self.N)
        return lr, level, self._ghosts(level), other._ghosts(level)

    def _from(self, lr, level, ghosts):
        comps, canonical = _from_ghost(lr, ghosts)
        out = WittVector._at_level(self.ring, [FqElement(self.p, level, c) for c in comps], level)
        out._ghost_cache[level] = canonical
        return out

    @classmethod
    def _at_level(cls, ring, components, level):
        """Constructor for components already at one common level."""
        out = cls.__new__(cls)
        out.components = tuple(components)
        out.level, out.ring, out._ghost_cache = level, ring, {}
        return out

    def __add__(self, other):
        other = self._check(other)
        if other is NotImplemented:
            return other
        lr, level, ga, gb = self._ghost_pair(other)
        return self._from(lr, level, [lr.add(x, y) for x, y in zip(ga, gb)])

    __radd__ = __add__

    def __sub__(self, other):
        other = self._check(other)
        if other is NotImplemented:
            return other
        lr, level, ga, gb = self._ghost_pair(other)
        return self._from(lr, level, [lr.sub(x, y) for x, y in zip(ga, gb)])

    def __rsub__(self, other):
        return (-self) + other

    def __neg__(self):
        lr = _lift_ring(self.p, self.level, self.N)
        ga = self._ghosts(self.level)
        zero = lr.sub(ga[0], ga[0])
        return self._from(lr, self.level, [lr.sub(zero, x) for x in ga])

    def __mul__(self, other):
        other = self._check(other)
        if other is NotImplemented:
            return other
        lr, level, ga, gb = self._ghost_pair(other)
        return self._from(lr, level, [lr.mul(x, y) for x, y in zip(ga, gb)])

    __rmul__ = __mul__

    def __pow__(self, e):
        if e < 0:
            return witt_unit_inverse(self) ** (-e)
        lr = _lift_ring(self.p, self.level, self.N)
        ga = self._ghosts(self.level)
        return self._from(lr, self.level, [lr.power(x, e) for x in ga])

    def __eq__(self, other):
        if isinstance(other, int):
            other = witt_from_integer(other, self.ring)
        if not isinstance(other, WittVector):
            return NotImplemented
        return (self.p == other.p and self.N == other.N
                and all(a == b for a, b in zip(self.components, other.components)))

    def __hash__(self):
        return hash((self.p, self.components))

    def is_zero(self):
        return all(c.is_zero() for c in self.components)

    def __bool__(self):
        return not self.is_zero()

    def sigma(self):
        return witt_frobenius(self)

    def polynomial_value(self, terms, values):
        """sum c_l * prod values[k]^l_k, with self as the zero of the sum.

        Works on ghost components throughout and converts back once. Returns
        None when some value or coefficient is not a Witt vector of this
        precision, leaving the caller to use ring operations.
        """
        N, level = self.N, self.level
        terms = list(terms)
        for v in values:
            if not isinstance(v, WittVector) or v.N != N or v.p != self.p:
                return None
            level = level * v.level // _gcd(level, v.level)
        for _, c in terms:
            if isinstance(c, WittVector):
                if c.N != N or c.p != self.p:
                    return None
                level = level * c.level // _gcd(level, c.level)
            elif not isinstance(c, int):
                return None
        lr = _lift_ring(self.p, level, N)
        ghosts = [v._ghosts(level) for v in values]
        acc = list(self._ghosts(level))
        powers = {}
        for idx, c in terms:
            term = (c if isinstance(c, WittVector) else witt_from_integer(c, self.ring))._ghosts(level)
            for k, e in enumerate(idx):
                if e:
                    key = (k, e)
                    if key not in powers:
                        powers[key] = [lr.power(g, e) for g in ghosts[k]]
                    term = [lr.mul(x, y) for x, y in zip(term, powers[key])]
            acc = [lr.add(x, y) for x, y in zip(acc, term)]
        return self._from(lr, level, acc)

    def sigma_inverse(self):
        return WittVector(self.ring, [c.pth_root() for c in self.components])

    def truncate(self, n):
        if n > self.N:
            raise PrecisionExhausted(f"cannot raise precision {self.N} to {n}")
        ring = self.ring if n == self.ring.N else self.ring.with_precision(n)
        return WittVector(ring, self.components[:n])

    def times_p(self):
        """p * self, gaining one component of precision."""
        ring = self.ring.with_precision(self.N + 1)
        zero = self.components[0] * 0
        return WittVector(ring, [zero] + [c.frobenius() for c in self.components])

    def to_json(self):
        return {"p": self.p, "N": self.N, "k": self.ring.residue_field.descriptor(),
                "components": [c.to_json() for c in self.components]}

    def __repr__(self):
        return f"WittVector({self})"

    def __str__(self):
        return "(" + ",".join(str(c) for c in self.components) + ")"


def _gcd(a, b):
    while b:
        a, b = b, a % b
    return a


def witt_from_json(data, field=None):
    field = field or FiniteFieldTower(data["p"])
    ring = WittRing(data["p"], data["N"], field)
    return WittVector(ring, [fq_from_json(c) for c in data["components"]])


# ---------------------------------------------------------------------------
# Public operations.

def _same_context(a, b):
    if a.p != b.p or a.N != b.N or a.ring.residue_field != b.ring.residue_field:
        raise MixedContext("Witt vectors from different rings")


def witt_add(a, b):
    _same_context(a, b)
    return a + b


def witt_mul(a, b):
    _same_context(a, b)
    return a * b


def witt_neg(a):
    return -a


def witt_from_integer(m, ring):
    """Image of the integer m, by double-and-add on the unit."""
    return _integer_image(ring, m)


@lru_cache(maxsize=4096)
def _integer_image(ring, m):
    acc = ring.zero()
    base = ring.one()
    k = abs(m)
    while k:
        if k & 1:
            acc = acc + base
        base = base + base
        k >>= 1
    return -acc if m < 0 else acc


def witt_frobenius(a):
    return WittVector(a.ring, [c.frobenius() for c in a.components])


def witt_valuation(a):
    """Index of the first nonzero component, or None when zero at precision."""
    for i, c in enumerate(a.components):
        if not c.is_zero():
            return i
    return None


def witt_div_p(a):
    if not a.components[0].is_zero():
        raise NotDivisible("leading component is nonzero")
    if a.N == 1:
        raise PrecisionExhausted("no precision left after dividing by p")
    ring = a.ring.with_precision(a.N - 1)
    return WittVector(ring, [c.pth_root() for c in a.components[1:]])


def witt_pi(a):
    return a.components[0]


def witt_ac(a):
    v = witt_valuation(a)
    if v is None:
        raise ZeroArgument("angular component of zero")
    r = a.components[v]
    for _ in range(v):
        r = r.pth_root()
    return r


def witt_cross_section(gamma, ring):
    """p^gamma for gamma >= 0."""
    if gamma < 0:
        raise UsageError("cross-section is defined for nonnegative values here")
    one = ring.residue_field.one()
    zero = ring.residue_field.zero()
    return WittVector(ring, [one if i == gamma else zero for i in range(ring.N)])


def witt_unit_inverse(u):
    """Inverse of a unit by Newton iteration x <- x(2 - ux)."""
    if u.components[0].is_zero():
        raise ZeroArgument("not a unit")
    x = u.ring.teichmuller(u.components[0].inverse())
    prec = 1
    while prec < u.N:
        x = x * (2 - u * x)
        prec *= 2
    return x


def teichmuller(r, ring):
    return ring.teichmuller(r)


def del_components(a, n):
    """Return [d_0(a), ..., d_n(a)], d_k at precision N - k."""
    N = a.N
    if n >= N:
        raise PrecisionExhausted(f"stage {n} needs precision above {N}")
    dels = [a]
    sig = a
    for k in range(1, n + 1):
        sig = witt_frobenius(sig)
        acc = sig
        for i in range(k):
            term = dels[i] ** (a.p ** (k - i))
            for _ in range(i):
                term = term.times_p()
            acc = acc - term
        for _ in range(k):
            acc = witt_div_p(acc)
        dels.append(acc)
    return dels


def ghost_polynomial_value(values, p, k, scale=None):
    """W_k(values) for generic ring elements.

    ``scale(x, i)`` computes p^i * x; Witt vectors use ``times_p`` so that
    lower-precision inputs regain precision.
    """
    terms = []
    for i in range(k + 1):
        term = values[i] ** (p ** (k - i))
        terms.append(scale(term, i) if scale is not None else term * (p ** i))
    if scale is not None:
        # each term is exact at its own precision; the sum only at the smallest
        width = min(t.N for t in terms)
        terms = [t.truncate(width) for t in terms]
    acc = terms[0]
    for term in terms[1:]:
        acc = acc + term
    return acc


def _witt_scale(x, i):
    for _ in range(i):
        x = x.times_p()
    return x


def d_transform(y, p=None):
    """(W_0(y), ..., W_n(y))."""
    if p is None:
        p = y[0].p
    scale = _witt_scale if isinstance(y[0], WittVector) else None
    return [ghost_polynomial_value(y, p, k, scale) for k in range(len(y))]


# ---------------------------------------------------------------------------
# Integer polynomials: structure polynomials and D-transforms of forms.

def _zadd(f, g, sign=1):
    out = dict(f)
    for k, v in g.items():
        c = out.get(k, 0) + sign * v
        if c:
            out[k] = c
        else:
            out.pop(k, None)
    return out


def _zmul(f, g):
    out = {}
    for k1, v1 in f.items():
        for k2, v2 in g.items():
            k = tuple(a + b for a, b in zip(k1, k2))
            out[k] = out.get(k, 0) + v1 * v2
    return {k: v for k, v in out.items() if v}


def _zpow(f, e, nvars):
    result = {(0,) * nvars: 1}
    base = f
    while e:
        if e & 1:
            result = _zmul(result, base)
        e >>= 1
        if e:
            base = _zmul(base, base)
    return result


def _zscale(f, c):
    return {k: v * c for k, v in f.items()} if c else {}


def _var(i, nvars):
    return {tuple(1 if j == i else 0 for j in range(nvars)): 1}


def witt_polynomial(p, k, variables, nvars):
    """W_k as an integer polynomial in the given variable indices."""
    out = {}
    for i in range(k + 1):
        out = _zadd(out, _zscale(_zpow(_var(variables[i], nvars), p ** (k - i), nvars), p ** i))
    return out


class WittStructurePolys:
    """S_0..S_n and P_0..P_n over Z in variables y_0..y_n, z_0..z_n."""

    def __init__(self, p, n, sums, products):
        self.p, self.n = p, n
        self.sums, self.products = sums, products

    def evaluate(self, which, k, y, z, one=1):
        poly = (self.sums if which == "S" else self.products)[k]
        return evaluate_int_poly(poly, list(y[:self.n + 1]) + list(z[:self.n + 1]), one)


_STRUCTURE = {}


def witt_structure_polys(p, n):
    key = (p, n)
    cached = _STRUCTURE.get(key)
    if cached is not None:
        return cached
    nvars = 2 * (n + 1)
    ys = list(range(n + 1))
    zs = list(range(n + 1, 2 * n + 2))
    sums, products = [], []
    for k in range(n + 1):
        wy = witt_polynomial(p, k, ys, nvars)
        wz = witt_polynomial(p, k, zs, nvars)
        for target, combined in ((sums, _zadd(wy, wz)), (products, _zmul(wy, wz))):
            acc = combined
            for i in range(k):
                acc = _zadd(acc, _zscale(_zpow(target[i], p ** (k - i), nvars), p ** i), -1)
            q = p ** k
            if any(v % q for v in acc.values()):
                raise InexactDivision(f"structure recursion not divisible at stage {k}")
            target.append({m: v // q for m, v in acc.items()})
    result = WittStructurePolys(p, n, sums, products)
    return _STRUCTURE.setdefault(key, result)


def evaluate_int_poly(poly, point, one=1):
    """Evaluate a dict polynomial, grouping terms by the first variable's degree."""
    groups = {}
    for mono, c in poly.items():
        groups.setdefault(mono[0], []).append((mono[1:], c))
    x0 = point[0]
    acc = None
    top = max(groups) if groups else 0
    for d in range(top, -1, -1):
        inner = one * 0
        for rest, c in groups.get(d, ()):
            term = one * c
            for x, e in zip(point[1:], rest):
                if e:
                    term = term * (x ** e)
            inner = inner + term
        acc = inner if acc is None else acc * x0 + inner
    return acc if acc is not None else one * 0


_FORM_CACHE = {}


def _d_transform_monomial(p, exps):
    key = (p, exps)
    cached = _FORM_CACHE.get(key)
    if cached is None:
        nvars = len(exps)
        out = {(0,) * nvars: 1}
        for k, e in enumerate(exps):
            if e:
                out = _zmul(out, _zpow(witt_polynomial(p, k, list(range(k + 1)), nvars), e, nvars))
        cached = _FORM_CACHE.setdefault(key, out)
    return cached


def d_transform_of_form(F, p):
    """F(D(y_0, ..., y_n)) for a homogeneous form F of positive degree.

    F is a SigmaPolynomial (or a mapping from exponent tuples to
    coefficients). The result is a SigmaPolynomial whose variables are read
    as y_0..y_n, with each coefficient an integer combination of those of F.
    """
    terms = F.terms if isinstance(F, SigmaPolynomial) else {MultiIndex(k): v for k, v in F.items()}
    degrees = {sum(idx) for idx in terms}
    if len(degrees) != 1 or 0 in degrees:
        raise NotHomogeneous("form must be homogeneous of positive degree")
    width = max(len(idx) for idx in terms)
    out = {}
    for idx, coeff in terms.items():
        exps = tuple(idx) + (0,) * (width - len(idx))
        for mono, c in _d_transform_monomial(p, exps).items():
            term = coeff * c
            out[mono] = out[mono] + term if mono in out else term
    return SigmaPolynomial({MultiIndex(k): v for k, v in out.items()})


def binom_over_p(p, i):
    """a(p, i) = binom(p, i) / p."""
    return comb(p, i) // p
