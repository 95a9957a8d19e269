"""Residue difference fields.

Two concrete fields are provided:

* ``FqElement``: elements of a finite field of order p^m living in a lazily
  grown tower of extensions of F_p, with Frobenius as the difference operator.
* ``RatShiftElement``: rational functions in ``s`` over Q with the shift
  ``s -> s + 1`` as the difference operator.

Both are wrapped by a small handle object (``FiniteFieldTower`` and
``RationalShiftField``) exposing the operations the valued backends need,
including a solver for inhomogeneous linear difference equations.
"""

from fractions import Fraction
from itertools import product
from math import gcd, lcm

from .errors import (BadCoordinateLength, NonPrimeModulus, NoSolutionWithinBound,
                     NoWitnessFound, UsageError)


def is_prime(n):
    if n < 2:
        return False
    i = 2
    while i * i <= n:
        if n % i == 0:
            return False
        i += 1
    return True


def _prime_factors(n):
    out, q = [], 2
    while q * q <= n:
        if n % q == 0:
            out.append(q)
            while n % q == 0:
                n //= q
        q += 1
    if n > 1:
        out.append(n)
    return out


# ---------------------------------------------------------------------------
# Dense polynomials over F_p, coefficient lists low degree first.

def _trim(f):
    while f and f[-1] == 0:
        f.pop()
    return f


def _pmul(f, g, p):
    if not f or not g:
        return []
    out = [0] * (len(f) + len(g) - 1)
    for i, a in enumerate(f):
        if a:
            for j, b in enumerate(g):
                out[i + j] += a * b
    return _trim([c % p for c in out])


def _pdivmod(f, g, p):
    f = list(f)
    inv_lead = pow(g[-1], -1, p)
    q = [0] * max(len(f) - len(g) + 1, 0)
    while len(f) >= len(g) and f:
        shift = len(f) - len(g)
        c = f[-1] * inv_lead % p
        q[shift] = c
        for i, b in enumerate(g):
            f[shift + i] = (f[shift + i] - c * b) % p
        _trim(f)
    return _trim(q), f


def _pgcd(f, g, p):
    f, g = _trim(list(f)), _trim(list(g))
    while g:
        f, g = g, _pdivmod(f, g, p)[1]
    if f:
        inv = pow(f[-1], -1, p)
        f = [c * inv % p for c in f]
    return f


def _ppowmod(f, e, mod, p):
    result, base = [1], _pdivmod(f, mod, p)[1]
    while e:
        if e & 1:
            result = _pdivmod(_pmul(result, base, p), mod, p)[1]
        base = _pdivmod(_pmul(base, base, p), mod, p)[1]
        e >>= 1
    return result


def _is_irreducible(f, p):
    """Rabin's test for a monic polynomial over F_p."""
    m = len(f) - 1
    x = [0, 1]

    def frob_iter(k):
        y = x
        for _ in range(k):
            y = _ppowmod(y, p, f, p)
        return y

    if _trim([(a - b) % p for a, b in zip(frob_iter(m) + [0] * (m + 2), x + [0] * (m + 2))]):
        return False
    for q in _prime_factors(m):
        y = frob_iter(m // q)
        diff = _trim([(a - b) % p for a, b in zip(y + [0] * (m + 2), x + [0] * (m + 2))])
        if len(_pgcd(f, diff, p)) != 1:
            return False
    return True


_DEFINING = {}


def defining_polynomial(p, m):
    """Lexicographically smallest monic irreducible of degree m over F_p.

    Coefficients are compared from the highest non-leading degree downwards;
    the returned list is low degree first and includes the leading 1.
    """
    key = (p, m)
    poly = _DEFINING.get(key)
    if poly is None:
        if not is_prime(p):
            raise NonPrimeModulus(f"{p} is not prime")
        for digits in product(range(p), repeat=m):
            cand = list(reversed(digits)) + [1]
            if m == 1 or (cand[0] != 0 and _is_irreducible(cand, p)):
                poly = cand
                break
        poly = _DEFINING.setdefault(key, poly)
    return poly


class _Level:
    """Arithmetic tables for one level of the tower."""

    def __init__(self, p, m):
        self.p, self.m = p, m
        self.modulus = defining_polynomial(p, m)
        self.zero = (0,) * m
        self.one = (1,) + (0,) * (m - 1)
        frob_cols = []
        for j in range(m):
            basis = [0] * j + [1]
            img = _ppowmod(basis, p, self.modulus, p)
            frob_cols.append(tuple(img + [0] * (m - len(img))))
        self.frob = frob_cols
        cols = [tuple(1 if i == j else 0 for i in range(m)) for j in range(m)]
        for _ in range(m - 1):
            cols = [self.apply(frob_cols, c) for c in cols]
        self.root = cols

    def apply(self, columns, v):
        p, out = self.p, [0] * self.m
        for c, col in zip(v, columns):
            if c:
                for i, e in enumerate(col):
                    out[i] += c * e
        return tuple(x % p for x in out)

    def mul(self, a, b):
        p, m = self.p, self.m
        prod = [0] * (2 * m - 1)
        for i, x in enumerate(a):
            if x:
                for j, y in enumerate(b):
                    prod[i + j] += x * y
        mod = self.modulus
        for k in range(2 * m - 2, m - 1, -1):
            c = prod[k] % p
            if c:
                base = k - m
                for i in range(m):
                    prod[base + i] -= c * mod[i]
        return tuple(x % p for x in prod[:m])


_LEVELS = {}


def _level(p, m):
    lv = _LEVELS.get((p, m))
    if lv is None:
        lv = _LEVELS.setdefault((p, m), _Level(p, m))
    return lv


def colex_index(coords, p):
    """Position of a coordinate vector in colexicographic enumeration."""
    return sum(c * p ** i for i, c in enumerate(coords))


class FqElement:
    """An element of the level-m field of the tower over F_p."""

    __slots__ = ("p", "m", "coords", "_minpoly")

    def __init__(self, p, m, coords):
        self.p, self.m = p, m
        self.coords = tuple(coords)
        self._minpoly = None

    # -- coercion helpers
    def _same_level(self, other):
        if isinstance(other, FqElement):
            if other.p != self.p:
                raise UsageError("elements of different characteristic")
            if other.m == self.m:
                return self, other
            top = lcm(self.m, other.m)
            return self.embed(top), other.embed(top)
        if isinstance(other, int):
            return self, self._from_int(other)
        return NotImplemented

    def _from_int(self, n):
        return FqElement(self.p, self.m, (n % self.p,) + (0,) * (self.m - 1))

    def _new(self, coords):
        return FqElement(self.p, self.m, coords)

    def embed(self, level):
        if level == self.m:
            return self
        if level % self.m:
            raise UsageError(f"level {self.m} does not divide {level}")
        return FqElement(self.p, level, embed_coords(self.p, self.m, level, self.coords))

    # -- ring operations
    def __add__(self, other):
        if type(other) is FqElement and other.m == self.m and other.p == self.p:
            p = self.p
            return FqElement(p, self.m, [(x + y) % p for x, y in zip(self.coords, other.coords)])
        pair = self._same_level(other)
        if pair is NotImplemented:
            return pair
        a, b = pair
        return a._new((x + y) % a.p for x, y in zip(a.coords, b.coords))

    __radd__ = __add__

    def __neg__(self):
        return self._new((-x) % self.p for x in self.coords)

    def __sub__(self, other):
        pair = self._same_level(other)
        if pair is NotImplemented:
            return pair
        a, b = pair
        return a._new((x - y) % a.p for x, y in zip(a.coords, b.coords))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if type(other) is FqElement and other.m == self.m and other.p == self.p:
            return FqElement(self.p, self.m, _level(self.p, self.m).mul(self.coords, other.coords))
        pair = self._same_level(other)
        if pair is NotImplemented:
            return pair
        a, b = pair
        return a._new(_level(a.p, a.m).mul(a.coords, b.coords))

    __rmul__ = __mul__

    def __pow__(self, e):
        if e < 0:
            return self.inverse() ** (-e)
        lv = _level(self.p, self.m)
        result, base = None, self.coords
        while e:
            if e & 1:
                result = base if result is None else lv.mul(result, base)
            e >>= 1
            if e:
                base = lv.mul(base, base)
        return self._new(lv.one if result is None else result)

    def inverse(self):
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero in a finite field")
        return self ** (self.p ** self.m - 2)

    def __truediv__(self, other):
        pair = self._same_level(other)
        if pair is NotImplemented:
            return pair
        a, b = pair
        return a * b.inverse()

    def __rtruediv__(self, other):
        return self.inverse() * other

    def is_zero(self):
        return not any(self.coords)

    def __bool__(self):
        return not self.is_zero()

    def __eq__(self, other):
        if isinstance(other, (FqElement, int)):
            a, b = self._same_level(other)
            return a.coords == b.coords
        return NotImplemented

    def __hash__(self):
        return hash((self.p, tuple(self.minimal_polynomial())))

    # -- difference structure
    def frobenius(self):
        lv = _level(self.p, self.m)
        return self._new(lv.apply(lv.frob, self.coords))

    sigma = frobenius

    def pth_root(self):
        lv = _level(self.p, self.m)
        return self._new(lv.apply(lv.root, self.coords))

    sigma_inverse = pth_root

    def residue(self):
        return self

    def minimal_polynomial(self):
        """Minimal polynomial over F_p, low degree first (level independent)."""
        if self._minpoly is None:
            conj, x = [self], self.frobenius()
            while x != self:
                conj.append(x)
                x = x.frobenius()
            poly = [self._from_int(1)]
            for r in conj:
                shifted = [self._from_int(0)] + poly
                for i, c in enumerate(poly):
                    shifted[i] = shifted[i] - r * c
                poly = shifted
            self._minpoly = [c.coords[0] for c in poly]
        return self._minpoly

    def to_json(self):
        return {"p": self.p, "m": self.m, "coords": list(self.coords)}

    def __repr__(self):
        return f"FqElement({self.p}, {self.m}, {list(self.coords)})"

    def __str__(self):
        return format_fq(self)


def fq_make(p, m, coords):
    if not is_prime(p):
        raise NonPrimeModulus(f"{p} is not prime")
    if m < 1 or len(coords) != m:
        raise BadCoordinateLength(f"expected {m} coordinates, got {len(coords)}")
    if any(not 0 <= c < p for c in coords):
        raise BadCoordinateLength("coordinates must lie in [0, p)")
    _level(p, m)
    return FqElement(p, m, coords)


def fq_frobenius(x):
    return x.frobenius()


def fq_pth_root(x):
    return x.pth_root()


def fq_generator(p, m):
    """The class of the variable modulo the level-m defining polynomial."""
    if m == 1:
        raise UsageError("level 1 has no generator beyond F_p")
    return fq_make(p, m, [0, 1] + [0] * (m - 2))


def fq_from_json(data):
    return fq_make(data["p"], data["m"], data["coords"])


def format_fq(x):
    """Render as a polynomial in w_m, using plain ``w`` at level 2."""
    if x.m == 1:
        return str(x.coords[0])
    name = "w" if x.m == 2 else f"w_{x.m}"
    parts = []
    for i, c in enumerate(x.coords):
        if not c:
            continue
        if i == 0:
            parts.append(str(c))
            continue
        mono = name if i == 1 else f"{name}^{i}"
        parts.append(mono if c == 1 else f"{c}*{mono}")
    return " + ".join(parts) if parts else "0"


# ---------------------------------------------------------------------------
# Tower embeddings.

def _poly_over_fq_mod(f, mod):
    """Remainder of f by monic mod, both lists of same-level FqElements."""
    f = list(f)
    while len(f) >= len(mod):
        c = f[-1]
        shift = len(f) - len(mod)
        if not c.is_zero():
            for i, b in enumerate(mod):
                f[shift + i] = f[shift + i] - c * b
        f.pop()
    while f and f[-1].is_zero():
        f.pop()
    return f


def _poly_over_fq_mul(f, g, zero):
    if not f or not g:
        return []
    out = [zero] * (len(f) + len(g) - 1)
    for i, a in enumerate(f):
        if not a.is_zero():
            for j, b in enumerate(g):
                out[i + j] = out[i + j] + a * b
    return out


def _poly_over_fq_add(f, g, zero):
    n = max(len(f), len(g))
    f = list(f) + [zero] * (n - len(f))
    g = list(g) + [zero] * (n - len(g))
    return [a + b for a, b in zip(f, g)]


def _poly_over_fq_gcd(f, g):
    f = list(f)
    g = list(g)
    while g and g[-1].is_zero():
        g.pop()
    while g:
        inv = g[-1].inverse()
        monic = [c * inv for c in g]
        f, g = g, _poly_over_fq_mod(f, monic)
    inv = f[-1].inverse()
    return [c * inv for c in f]


def _poly_over_fq_div(f, g):
    """Exact quotient f / g for monic g."""
    f = list(f)
    q = [None] * (len(f) - len(g) + 1)
    for shift in range(len(f) - len(g), -1, -1):
        c = f[shift + len(g) - 1]
        q[shift] = c
        for i, b in enumerate(g):
            f[shift + i] = f[shift + i] - c * b
    return q


def _find_root(f, p, level):
    """One root of a monic f over level ``level`` that splits into distinct linears."""
    zero = FqElement(p, level, (0,) * level)
    one = zero + 1
    while len(f) > 2:
        for coords in product(range(p), repeat=level):
            delta = FqElement(p, level, coords)
            if p == 2:
                y = _poly_over_fq_mod([zero, delta], f)
                acc = list(y)
                for _ in range(level - 1):
                    y = _poly_over_fq_mod(_poly_over_fq_mul(y, y, zero), f)
                    acc = _poly_over_fq_add(acc, y, zero)
                test = acc
            else:
                e = (p ** level - 1) // 2
                result, base = [one], _poly_over_fq_mod([delta, one], f)
                while e:
                    if e & 1:
                        result = _poly_over_fq_mod(_poly_over_fq_mul(result, base, zero), f)
                    base = _poly_over_fq_mod(_poly_over_fq_mul(base, base, zero), f)
                    e >>= 1
                test = list(result) or [zero]
                test[0] = test[0] - 1
            while test and test[-1].is_zero():
                test.pop()
            if not test:
                continue
            h = _poly_over_fq_gcd(f, test)
            if 1 < len(h) < len(f):
                f = h if len(h) <= len(f) - len(h) + 1 else _poly_over_fq_div(f, h)
                break
        else:
            raise RuntimeError("root search failed")
    return -f[0] * f[1].inverse()


_GEN_IMAGE = {}
_EMBED_BASIS = {}


def _eval_coords_at(p, level, coords, point):
    """Evaluate sum coords[i] * point^i where point lives at ``level``."""
    acc = FqElement(p, level, (0,) * level)
    for c in reversed(coords):
        acc = acc * point + c
    return acc


def _generator_image(p, d, level):
    """Image of the level-d generator inside ``level`` (d | level, d > 1)."""
    key = (p, d, level)
    img = _GEN_IMAGE.get(key)
    if img is not None:
        return img
    if d == level:
        img = FqElement(p, level, (0, 1) + (0,) * (level - 2))
    else:
        maximal = sorted(level // q for q in _prime_factors(level))
        if d in maximal:
            img = _choose_maximal_root(p, d, level, maximal)
        else:
            via = min(e for e in maximal if e % d == 0)
            inner = _generator_image(p, d, via)
            img = FqElement(p, level, embed_coords(p, via, level, inner.coords))
    return _GEN_IMAGE.setdefault(key, img)


def _choose_maximal_root(p, e, level, maximal):
    f = [FqElement(p, level, (c,) + (0,) * (level - 1)) for c in defining_polynomial(p, e)]
    r = _find_root(f, p, level)
    roots = [r]
    for _ in range(e - 1):
        roots.append(roots[-1].frobenius())
    roots.sort(key=lambda x: colex_index(x.coords, p))
    earlier = [x for x in maximal if x < e]
    for cand in roots:
        ok = True
        for other in earlier:
            g = gcd(e, other)
            if g == 1:
                continue
            via_cand = _eval_coords_at(p, level, _generator_image(p, g, e).coords, cand)
            via_other = FqElement(p, level, embed_coords(
                p, other, level, _generator_image(p, g, other).coords))
            if via_cand != via_other:
                ok = False
                break
        if ok:
            return cand
    raise RuntimeError("no compatible embedding found")


def embed_coords(p, m, level, coords):
    """Coordinates of a level-m element after the canonical embedding into ``level``."""
    if m == level:
        return tuple(coords)
    if m == 1:
        return (coords[0],) + (0,) * (level - 1)
    key = (p, m, level)
    basis = _EMBED_BASIS.get(key)
    if basis is None:
        g = _generator_image(p, m, level)
        powers, cur = [], FqElement(p, level, (1,) + (0,) * (level - 1))
        for _ in range(m):
            powers.append(cur.coords)
            cur = cur * g
        basis = _EMBED_BASIS.setdefault(key, powers)
    out = [0] * level
    for c, col in zip(coords, basis):
        if c:
            for i, e in enumerate(col):
                out[i] += c * e
    return tuple(x % p for x in out)


# ---------------------------------------------------------------------------
# Linear algebra over a field.

def solve_linear_system(rows, rhs, inverse, is_zero):
    """Solve rows * x = rhs by Gaussian elimination; free variables set to zero.

    ``inverse`` and ``is_zero`` specialise the routine to F_p or Q.
    Returns the solution list or ``None`` when inconsistent.
    """
    n_rows = len(rows)
    n_cols = len(rows[0]) if rows else 0
    mat = [list(r) + [b] for r, b in zip(rows, rhs)]
    pivots, row = [], 0
    for col in range(n_cols):
        pivot = next((r for r in range(row, n_rows) if not is_zero(mat[r][col])), None)
        if pivot is None:
            continue
        mat[row], mat[pivot] = mat[pivot], mat[row]
        inv = inverse(mat[row][col])
        mat[row] = [x * inv for x in mat[row]]
        for r in range(n_rows):
            if r != row and not is_zero(mat[r][col]):
                factor = mat[r][col]
                mat[r] = [x - factor * y for x, y in zip(mat[r], mat[row])]
        pivots.append(col)
        row += 1
        if row == n_rows:
            break
    for r in range(row, n_rows):
        if not is_zero(mat[r][-1]):
            return None
    sol = [0] * n_cols
    for r, col in enumerate(pivots):
        sol[col] = mat[r][-1]
    return sol


def _solve_mod_p(rows, rhs, p):
    sol = solve_linear_system(
        [[x % p for x in r] for r in rows], [b % p for b in rhs],
        lambda a: pow(a, -1, p), lambda a: a % p == 0)
    if sol is None:
        return None
    return [x % p for x in sol]


# ---------------------------------------------------------------------------
# Residue equation solvers.

def _normalize_additive(alphas, p):
    if isinstance(alphas, dict):
        out = {}
        for exponent, coeff in alphas.items():
            k, e = 0, exponent
            while e > 1 and e % p == 0:
                e //= p
                k += 1
            if e != 1:
                raise UsageError(f"exponent {exponent} is not a power of {p}")
            out[k] = coeff
        size = max(out) + 1 if out else 0
        return [out.get(k, 0) for k in range(size)]
    return list(alphas)


def solve_additive_equation(alphas, max_level, p=None):
    """Solve 1 + sum_i alphas[i] * x^(p^i) = 0 in the tower.

    ``alphas`` is a sequence indexed by i, or a mapping from exponents p^i to
    coefficients. The map x -> sum alphas[i] x^(p^i) is F_p-linear, so each
    candidate level is handled by one linear system over F_p.
    """
    elems = [a for a in (alphas.values() if isinstance(alphas, dict) else alphas)
             if isinstance(a, FqElement)]
    if p is None:
        if not elems:
            raise UsageError("characteristic unknown: pass p")
        p = elems[0].p
    coeffs = _normalize_additive(alphas, p)
    base = 1
    for a in coeffs:
        if isinstance(a, FqElement):
            base = lcm(base, a.m)
    if all((a == 0) if isinstance(a, int) else a.is_zero() for a in coeffs):
        raise UsageError("all coefficients vanish")
    level = base
    while level <= max_level:
        lv = _level(p, level)
        alph = [a.embed(level) if isinstance(a, FqElement)
                else FqElement(p, level, (a % p,) + (0,) * (level - 1)) for a in coeffs]
        columns = []
        for j in range(level):
            col = [0] * level
            basis = tuple(1 if i == j else 0 for i in range(level))
            power = basis
            for a in alph:
                if not a.is_zero():
                    term = lv.mul(a.coords, power)
                    col = [x + y for x, y in zip(col, term)]
                power = lv.apply(lv.frob, power)
            columns.append(col)
        rows = [[columns[j][i] for j in range(level)] for i in range(level)]
        rhs = [(-1) % p] + [0] * (level - 1)
        sol = _solve_mod_p(rows, rhs, p)
        if sol is not None:
            x = FqElement(p, level, sol)
            check = FqElement(p, level, lv.one)
            power = x
            for a in alph:
                check = check + a * power
                power = power.frobenius()
            assert check.is_zero()
            return x
        level += base
    raise NoSolutionWithinBound(
        f"no root of the additive equation at any level <= {max_level}")


# ---------------------------------------------------------------------------
# Polynomials over Q and the field Q(s).

class QPoly:
    """Dense univariate polynomial in s with Fraction coefficients."""

    __slots__ = ("c",)

    def __init__(self, coeffs=()):
        c = [Fraction(x) for x in coeffs]
        while c and c[-1] == 0:
            c.pop()
        self.c = tuple(c)

    @classmethod
    def s(cls):
        return cls((0, 1))

    def degree(self):
        return len(self.c) - 1

    def is_zero(self):
        return not self.c

    def lead(self):
        return self.c[-1]

    def __add__(self, other):
        n = max(len(self.c), len(other.c))
        a = self.c + (0,) * (n - len(self.c))
        b = other.c + (0,) * (n - len(other.c))
        return QPoly(x + y for x, y in zip(a, b))

    def __neg__(self):
        return QPoly(-x for x in self.c)

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return QPoly(x * other for x in self.c)
        if not self.c or not other.c:
            return QPoly()
        out = [Fraction(0)] * (len(self.c) + len(other.c) - 1)
        for i, x in enumerate(self.c):
            if x:
                for j, y in enumerate(other.c):
                    out[i + j] += x * y
        return QPoly(out)

    __rmul__ = __mul__

    def divmod(self, other):
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        rem = list(self.c)
        q = [Fraction(0)] * max(len(rem) - len(other.c) + 1, 0)
        lead = other.lead()
        while len(rem) >= len(other.c) and rem:
            shift = len(rem) - len(other.c)
            f = rem[-1] / lead
            q[shift] = f
            for i, y in enumerate(other.c):
                rem[shift + i] -= f * y
            rem.pop()
            while rem and rem[-1] == 0:
                rem.pop()
        return QPoly(q), QPoly(rem)

    def monic(self):
        return self * (1 / self.lead()) if self.c else self

    def gcd(self, other):
        a, b = self, other
        while not b.is_zero():
            a, b = b, a.divmod(b)[1]
        return a.monic()

    def shift(self, k):
        """Return f(s + k)."""
        acc = QPoly()
        lin = QPoly((k, 1))
        for x in reversed(self.c):
            acc = acc * lin + QPoly((x,))
        return acc

    def __call__(self, value):
        acc = Fraction(0)
        for x in reversed(self.c):
            acc = acc * value + x
        return acc

    def __eq__(self, other):
        return isinstance(other, QPoly) and self.c == other.c

    def __hash__(self):
        return hash(self.c)

    def __repr__(self):
        return f"QPoly({[str(x) for x in self.c]})"


def _frac_json(x):
    return x.numerator if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


class RatShiftElement:
    """Canonical rational function num/den in s with monic, coprime den."""

    __slots__ = ("num", "den")

    def __init__(self, num, den=None, _canonical=False):
        num = num if isinstance(num, QPoly) else QPoly(num)
        den = QPoly((1,)) if den is None else (den if isinstance(den, QPoly) else QPoly(den))
        if not _canonical:
            if den.is_zero():
                raise ZeroDivisionError("zero denominator")
            if num.is_zero():
                den = QPoly((1,))
            else:
                g = num.gcd(den)
                if g.degree() > 0:
                    num, den = num.divmod(g)[0], den.divmod(g)[0]
                lead = den.lead()
                num, den = num * (1 / lead), den * (1 / lead)
        self.num, self.den = num, den

    @classmethod
    def constant(cls, value):
        return cls(QPoly((value,)), QPoly((1,)), _canonical=True)

    @classmethod
    def s(cls):
        return cls(QPoly.s(), QPoly((1,)), _canonical=True)

    def _coerce(self, other):
        if isinstance(other, RatShiftElement):
            return other
        if isinstance(other, (int, Fraction)):
            return RatShiftElement.constant(other)
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        if self.den == o.den:
            return RatShiftElement(self.num + o.num, self.den)
        return RatShiftElement(self.num * o.den + o.num * self.den, self.den * o.den)

    __radd__ = __add__

    def __neg__(self):
        return RatShiftElement(-self.num, self.den, _canonical=True)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self + (-o)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return RatShiftElement(self.num * o.num, self.den * o.den)

    __rmul__ = __mul__

    def inverse(self):
        if self.num.is_zero():
            raise ZeroDivisionError("inverse of zero in Q(s)")
        return RatShiftElement(self.den, self.num)

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self * o.inverse()

    def __rtruediv__(self, other):
        return self.inverse() * other

    def __pow__(self, e):
        if e < 0:
            return self.inverse() ** (-e)
        result, base = RatShiftElement.constant(1), self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def is_zero(self):
        return self.num.is_zero()

    def __bool__(self):
        return not self.is_zero()

    def __eq__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self.num == o.num and self.den == o.den

    def __hash__(self):
        return hash((self.num, self.den))

    def shift(self, k=1):
        return RatShiftElement(self.num.shift(k), self.den.shift(k), _canonical=True)

    def sigma(self):
        return self.shift(1)

    def sigma_inverse(self):
        return self.shift(-1)

    def residue(self):
        return self

    def to_json(self):
        return {"num": [_frac_json(x) for x in self.num.c],
                "den": [_frac_json(x) for x in self.den.c]}

    def __repr__(self):
        return f"RatShiftElement({self})"

    def __str__(self):
        num = format_qpoly(self.num)
        if self.den.degree() == 0:
            return num
        return f"({num})/({format_qpoly(self.den)})"


def format_qpoly(f):
    if f.is_zero():
        return "0"
    parts = []
    for i, c in enumerate(f.c):
        if not c:
            continue
        coeff = str(c)
        if i == 0:
            parts.append(coeff if c.denominator == 1 else f"({coeff})")
            continue
        mono = "s" if i == 1 else f"s^{i}"
        if c == 1:
            parts.append(mono)
        elif c == -1:
            parts.append(f"-{mono}")
        elif c.denominator == 1:
            parts.append(f"{coeff}*{mono}")
        else:
            parts.append(f"({coeff})*{mono}")
    return " + ".join(parts)


def ratshift_from_json(data):
    return RatShiftElement(QPoly(Fraction(x) for x in data["num"]),
                           QPoly(Fraction(x) for x in data["den"]))


def _cauchy_bound(f):
    lead = abs(f.lead())
    return 1 + max((abs(x) / lead for x in f.c[:-1]), default=0)


def universal_denominator(a0, ar, order, h_cap=500):
    """Denominator bound for rational solutions of sum a_j(s) y(s+j) = b(s)."""
    A, B = ar.shift(-order), a0
    bound = int(_cauchy_bound(A) + _cauchy_bound(B)) + order + 1
    dispersions = [h for h in range(min(bound, h_cap) + 1)
                   if A.gcd(B.shift(h)).degree() > 0]
    U = QPoly((1,))
    for h in reversed(dispersions):
        d = A.gcd(B.shift(h))
        if d.degree() <= 0:
            continue
        A = A.divmod(d)[0]
        B = B.divmod(d.shift(-h))[0]
        for i in range(h + 1):
            U = U * d.shift(-i)
    return U


def solve_linear_sigma_shift(alphas, degree_bound):
    """Solve 1 + sum_i alphas[i](s) * x(s+i) = 0 over Q(s).

    The search is partial: a denominator candidate is computed from the
    outer coefficients, then a numerator is found by undetermined
    coefficients. Solutions whose numerator or denominator degree exceeds
    ``degree_bound`` are rejected.
    """
    coeffs = [a if isinstance(a, RatShiftElement) else RatShiftElement.constant(a)
              for a in alphas]
    nonzero = [i for i, a in enumerate(coeffs) if not a.is_zero()]
    if not nonzero:
        raise UsageError("all coefficients vanish")
    lo, hi = nonzero[0], nonzero[-1]
    work = coeffs[lo:hi + 1]
    order = hi - lo
    if order == 0:
        y = -work[0].inverse()
    else:
        D = QPoly((1,))
        for a in work:
            D = D * a.den.divmod(D.gcd(a.den))[0]
        polys = [a.num * D.divmod(a.den)[0] for a in work]
        rhs = -D
        U = universal_denominator(polys[0], polys[-1], order)
        shifted_U = [U.shift(j) for j in range(order + 1)]
        M = QPoly((1,))
        for u in shifted_U:
            M = M * u.divmod(M.gcd(u))[0]
        cofactors = [p * M.divmod(u)[0] for p, u in zip(polys, shifted_U)]
        dz = degree_bound + U.degree()
        columns = []
        for k in range(dz + 1):
            col = QPoly()
            mono = QPoly((0,) * k + (1,))
            for j, cf in enumerate(cofactors):
                col = col + cf * mono.shift(j)
            columns.append(col)
        target = rhs * M
        height = max([c.degree() for c in columns] + [target.degree(), 0]) + 1
        rows = [[c.c[i] if i < len(c.c) else Fraction(0) for c in columns]
                for i in range(height)]
        rhs_vec = [target.c[i] if i < len(target.c) else Fraction(0) for i in range(height)]
        sol = solve_linear_system(rows, rhs_vec, lambda v: 1 / v, lambda v: v == 0)
        if sol is None:
            raise NoSolutionWithinBound("no rational solution with the bounded denominator")
        y = RatShiftElement(QPoly(sol), U)
    x = y.shift(-lo)
    if x.num.degree() > degree_bound or x.den.degree() > degree_bound:
        raise NoSolutionWithinBound(
            f"solution needs degree above {degree_bound}")
    check = RatShiftElement.constant(1)
    for i, a in enumerate(coeffs):
        if not a.is_zero():
            check = check + a * x.shift(i)
    assert check.is_zero()
    return x


# ---------------------------------------------------------------------------
# Difference-field handles.

class DifferenceField:
    """Capability record used by the valued backends.

    Subclasses provide ``zero``, ``one``, ``from_int``, ``characteristic``,
    ``enumerate`` and ``solve_linear_sigma``. Arithmetic delegates to the
    element operators.
    """

    characteristic = 0
    has_pth_root = False

    def add(self, x, y):
        return x + y

    def neg(self, x):
        return -x

    def mul(self, x, y):
        return x * y

    def inv(self, x):
        return x.inverse()

    def is_zero(self, x):
        return x.is_zero()

    def sigma(self, x):
        return x.sigma()

    def sigma_inverse(self, x):
        return x.sigma_inverse()

    def sigma_power(self, x, k):
        step = self.sigma if k >= 0 else self.sigma_inverse
        for _ in range(abs(k)):
            x = step(x)
        return x

    def pth_root(self, x):
        raise NotImplementedError("field is not of positive characteristic")


class FiniteFieldTower(DifferenceField):
    """The tower of finite fields over F_p with Frobenius."""

    has_pth_root = True

    def __init__(self, p, base_level=1, tower_bound=None):
        if not is_prime(p):
            raise NonPrimeModulus(f"{p} is not prime")
        self.p = p
        self.characteristic = p
        self.base_level = base_level
        self.tower_bound = tower_bound or 12 * base_level

    def zero(self, level=None):
        m = level or self.base_level
        return FqElement(self.p, m, (0,) * m)

    def one(self, level=None):
        m = level or self.base_level
        return FqElement(self.p, m, (1,) + (0,) * (m - 1))

    def from_int(self, n):
        return self.one() * (n % self.p)

    def element(self, coords, level=None):
        return fq_make(self.p, level or len(coords), list(coords))

    def generator(self, level=2):
        return fq_generator(self.p, level)

    def pth_root(self, x):
        return x.pth_root()

    def solve_linear_sigma(self, coeffs, budget=None):
        return solve_additive_equation(coeffs, budget or self.tower_bound, p=self.p)

    def enumerate(self, budget):
        count, level = 0, 1
        while True:
            for coords in product(range(self.p), repeat=level):
                if count >= budget:
                    return
                yield FqElement(self.p, level, tuple(reversed(coords)))
                count += 1
            level += 1

    def from_json(self, data):
        return fq_from_json(data)

    def descriptor(self):
        return {"type": "fq", "p": self.p}

    def __eq__(self, other):
        return isinstance(other, FiniteFieldTower) and other.p == self.p

    def __hash__(self):
        return hash(("fq", self.p))


def _signed_order(h):
    out = [0]
    for k in range(1, h + 1):
        out += [k, -k]
    return out


class RationalShiftField(DifferenceField):
    """Q(s) with the shift automorphism s -> s + 1."""

    def __init__(self, degree_bound=3):
        self.degree_bound = degree_bound

    def zero(self):
        return RatShiftElement.constant(0)

    def one(self):
        return RatShiftElement.constant(1)

    def from_int(self, n):
        return RatShiftElement.constant(n)

    def s(self):
        return RatShiftElement.s()

    def sigma_power(self, x, k):
        return x.shift(k)

    def solve_linear_sigma(self, coeffs, budget=None):
        return solve_linear_sigma_shift(coeffs, budget or self.degree_bound)

    def enumerate(self, budget):
        """Polynomials with integer coefficients by increasing height."""
        count = 0
        if budget <= 0:
            return
        yield self.zero()
        count += 1
        h = 1
        while True:
            for deg in range(h):
                cap = h - deg
                values = _signed_order(cap)
                for coeffs in product(values, repeat=deg + 1):
                    coeffs = tuple(reversed(coeffs))
                    if coeffs[-1] == 0 or max(abs(c) for c in coeffs) != cap:
                        continue
                    if count >= budget:
                        return
                    yield RatShiftElement(QPoly(coeffs))
                    count += 1
            h += 1

    def from_json(self, data):
        return ratshift_from_json(data)

    def descriptor(self):
        return {"type": "ratshift"}

    def __eq__(self, other):
        return isinstance(other, RationalShiftField)

    def __hash__(self):
        return hash("ratshift")


def has_sigma_identity_witness(d, e, field, budget):
    """Return y with sigma^d(y) != y^(p^e) (or != y in characteristic 0)."""
    if d == 0:
        raise UsageError("d must be nonzero")
    p = field.characteristic
    if p and e < 1:
        raise UsageError("e must be positive in positive characteristic")
    for y in field.enumerate(budget):
        lhs = field.sigma_power(y, d)
        rhs = y ** (p ** e) if p else y
        if lhs != rhs:
            return y
    raise NoWitnessFound(f"no witness for d={d} within {budget} elements")


def field_from_descriptor(data, **kwargs):
    if data.get("type") == "fq":
        return FiniteFieldTower(data["p"], **kwargs)
    if data.get("type") == "ratshift":
        return RationalShiftField(**kwargs)
    raise UsageError(f"unknown field descriptor {data!r}")
