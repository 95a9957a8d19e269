"""Truncated Hahn series k((t^Z)) over a difference residue field.

A nonzero series stores its valuation ``v0`` and the coefficients of
t^v0 .. t^(prec-1); everything from t^prec on is unknown. The relative
width prec - v0 never exceeds the context width N. Two kinds of zero exist:
the exact zero (``prec`` is None) and a zero known only below t^prec.
"""

from fractions import Fraction

from .errors import (DivisionByZeroAtPrecision, MixedContext, NotDivisible,
                     NotInValuationRing, PrecisionExhausted, UsageError, ZeroArgument)
from .residue_fields import FqElement, RatShiftElement, field_from_descriptor


class HahnRing:
    """Context for series with window width N over ``field``."""

    name = "hahn"

    def __init__(self, field, N):
        if N < 1:
            raise UsageError("window width must be positive")
        self.residue_field = field
        self.N = N

    @property
    def precision(self):
        return self.N

    @property
    def p(self):
        return self.residue_field.characteristic

    def with_precision(self, N):
        return HahnRing(self.residue_field, N)

    def __eq__(self, other):
        return (isinstance(other, HahnRing) and other.N == self.N
                and other.residue_field == self.residue_field)

    def __hash__(self):
        return hash(("hahn", self.N, self.residue_field))

    def __repr__(self):
        return f"HahnRing({self.residue_field.descriptor()}, N={self.N})"

    # -- constructors
    def zero(self):
        return HahnSeries(self, None, (), None)

    def zero_at(self, prec):
        return HahnSeries(self, None, (), prec)

    def one(self):
        return self.lift(self.residue_field.one())

    def t(self, k=1):
        return self.cross_section(k)

    def residue_constant(self, c):
        field = self.residue_field
        if isinstance(c, Fraction):
            if isinstance(field.zero(), RatShiftElement):
                return RatShiftElement.constant(c)
            return field.from_int(c.numerator) / field.from_int(c.denominator)
        if isinstance(c, int):
            return field.from_int(c)
        if isinstance(c, (FqElement, RatShiftElement)):
            return c
        raise UsageError(f"cannot use {c!r} as a coefficient")

    def element(self, coeffs, v0=0, prec=None):
        """Series sum coeffs[i] t^(v0+i), known up to ``prec`` (default v0 + N)."""
        coeffs = [self.residue_constant(c) for c in coeffs]
        if prec is None:
            prec = v0 + max(self.N, len(coeffs))
        coeffs += [self.residue_field.zero()] * (prec - v0 - len(coeffs))
        return _canonical(self, v0, coeffs[:prec - v0], prec)

    def from_int(self, n):
        return self.lift(self.residue_field.from_int(n)) if n else self.zero()

    def coerce(self, c):
        if isinstance(c, HahnSeries):
            if c.ring.N != self.N:
                raise MixedContext(f"window {c.ring.N} vs {self.N}")
            return c
        if isinstance(c, (int, Fraction)) and c == 0:
            return self.zero()
        return self.lift(self.residue_constant(c))

    # -- valued-field interface
    def valuation(self, x):
        return hahn_valuation(x)

    def residue(self, x):
        return hahn_pi(x)

    def ac(self, x):
        return hahn_ac(x)

    def cross_section(self, gamma):
        return hahn_cross_section(gamma, self)

    def lift(self, r):
        if r.is_zero():
            return self.zero()
        return self.element([r], 0)

    def is_integral(self, x):
        v = hahn_valuation(x)
        return v is None or v >= 0

    def divide_exact(self, x, y):
        vy = hahn_valuation(y)
        if vy is None:
            raise ZeroArgument("division by a series that is zero at precision")
        vx = hahn_valuation(x)
        if vx is not None and vx < vy:
            raise NotDivisible("quotient leaves the valuation ring")
        return x * hahn_inv(y)

    def pad(self, x):
        """Extend the known window of x to the full width with zeros."""
        if x.v0 is None:
            return x
        zero = self.residue_field.zero()
        coeffs = list(x.coeffs) + [zero] * (self.N - len(x.coeffs))
        return HahnSeries(self, x.v0, tuple(coeffs[:self.N]), x.v0 + self.N)

    def to_json(self, x):
        return x.to_json()

    def from_json(self, data):
        return hahn_from_json(data, self)

    def descriptor(self):
        return {"backend": "hahn", "N": self.N, "k": self.residue_field.descriptor()}


def _canonical(ring, low, coeffs, prec):
    """Strip leading zeros and cap the relative width at N."""
    start = 0
    while start < len(coeffs) and coeffs[start].is_zero():
        start += 1
    if start == len(coeffs):
        return HahnSeries(ring, None, (), prec)
    v0 = low + start
    if prec is None:
        prec = low + len(coeffs)
    prec = min(prec, v0 + ring.N)
    return HahnSeries(ring, v0, tuple(coeffs[start:prec - low]), prec)


def _min_prec(a, b):
    if a is None:
        return b
    if b is None:
        return a
    return min(a, b)


class HahnSeries:
    __slots__ = ("ring", "v0", "coeffs", "prec")

    def __init__(self, ring, v0, coeffs, prec):
        self.ring = ring
        self.v0 = v0
        self.coeffs = coeffs
        self.prec = prec

    @property
    def N(self):
        return self.ring.N

    def is_exact_zero(self):
        return self.v0 is None and self.prec is None

    def is_zero(self):
        return self.v0 is None

    def __bool__(self):
        return not self.is_zero()

    def coefficient(self, k):
        """Coefficient of t^k; raises if k lies beyond the known window."""
        if self.prec is not None and k >= self.prec:
            raise PrecisionExhausted(f"coefficient of t^{k} is beyond the window")
        if self.v0 is None or k < self.v0:
            return self.ring.residue_field.zero()
        return self.coeffs[k - self.v0]

    def _check(self, other):
        if isinstance(other, HahnSeries):
            if other.ring.N != self.ring.N or other.ring.residue_field != self.ring.residue_field:
                raise MixedContext("series from different contexts")
            return other
        try:
            return self.ring.coerce(other)
        except UsageError:
            return NotImplemented

    def __add__(self, other):
        other = self._check(other)
        if other is NotImplemented:
            return other
        return hahn_add(self, other)

    __radd__ = __add__

    def __neg__(self):
        if self.v0 is None:
            return self
        return HahnSeries(self.ring, self.v0, tuple(-c for c in self.coeffs), self.prec)

    def __sub__(self, other):
        other = self._check(other)
        if other is NotImplemented:
            return other
        return hahn_add(self, -other)

    def __rsub__(self, other):
        other = self._check(other)
        if other is NotImplemented:
            return other
        return hahn_add(other, -self)

    def __mul__(self, other):
        other = self._check(other)
        if other is NotImplemented:
            return other
        return hahn_mul(self, other)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = self._check(other)
        if other is NotImplemented:
            return other
        return hahn_mul(self, hahn_inv(other))

    def __rtruediv__(self, other):
        other = self._check(other)
        if other is NotImplemented:
            return other
        return hahn_mul(other, hahn_inv(self))

    def __pow__(self, e):
        if e < 0:
            return hahn_inv(self) ** (-e)
        result = self.ring.one()
        base = self
        while e:
            if e & 1:
                result = result * base
            e >>= 1
            if e:
                base = base * base
        return result

    def __eq__(self, other):
        other = self._check(other)
        if other is NotImplemented:
            return False
        return (self - other).is_zero()

    def __hash__(self):
        return hash((self.v0, self.coeffs))

    def inverse(self):
        return hahn_inv(self)

    def sigma(self):
        return hahn_sigma(self)

    def sigma_inverse(self):
        if self.v0 is None:
            return self
        return HahnSeries(self.ring, self.v0, tuple(c.sigma_inverse() for c in self.coeffs), self.prec)

    def to_json(self):
        return {"v0": self.v0, "coeffs": [c.to_json() for c in self.coeffs],
                "prec": self.prec, "k": self.ring.residue_field.descriptor()}

    def __repr__(self):
        return f"HahnSeries({self})"

    def __str__(self):
        return format_series(self)


def format_series(x):
    parts = []
    if x.v0 is not None:
        for i, c in enumerate(x.coeffs):
            if c.is_zero():
                continue
            k = x.v0 + i
            text = str(c)
            if k == 0:
                parts.append(f"({text})")
            else:
                power = "t" if k == 1 else f"t^{k}"
                parts.append(power if text == "1" else f"({text})*{power}")
    if x.prec is not None:
        parts.append(f"O(t^{x.prec})")
    return " + ".join(parts) if parts else "0"


# ---------------------------------------------------------------------------
# Operations.

def hahn_add(x, y):
    if x.is_exact_zero():
        return y
    if y.is_exact_zero():
        return x
    ring = x.ring
    prec = _min_prec(x.prec, y.prec)
    starts = [s.v0 for s in (x, y) if s.v0 is not None]
    if not starts:
        return ring.zero_at(prec)
    low = min(starts)
    if prec is not None and prec <= low:
        return ring.zero_at(prec)
    top = prec if prec is not None else max(s.v0 + len(s.coeffs) for s in (x, y) if s.v0 is not None)
    zero = ring.residue_field.zero()
    coeffs = [zero] * (top - low)
    for s in (x, y):
        if s.v0 is None:
            continue
        for i, c in enumerate(s.coeffs):
            k = s.v0 + i - low
            if k < len(coeffs):
                coeffs[k] = coeffs[k] + c
    return _canonical(ring, low, coeffs, prec)


def hahn_neg(x):
    return -x


def hahn_mul(x, y):
    ring = x.ring
    if x.is_exact_zero() or y.is_exact_zero():
        return ring.zero()
    if x.v0 is None or y.v0 is None:
        bound_x = x.v0 if x.v0 is not None else x.prec
        bound_y = y.v0 if y.v0 is not None else y.prec
        return ring.zero_at(bound_x + bound_y)
    v0 = x.v0 + y.v0
    prec = _min_prec(None if y.prec is None else x.v0 + y.prec,
                     None if x.prec is None else y.v0 + x.prec)
    width = ring.N if prec is None else min(ring.N, prec - v0)
    out = [None] * width
    ys = [(j, b) for j, b in enumerate(y.coeffs[:width]) if not b.is_zero()]
    for i, a in enumerate(x.coeffs[:width]):
        if a.is_zero():
            continue
        for j, b in ys:
            k = i + j
            if k >= width:
                break
            prod = a * b
            out[k] = prod if out[k] is None else out[k] + prod
    zero = ring.residue_field.zero()
    out = [zero if c is None else c for c in out]
    return _canonical(ring, v0, out, v0 + width)


def hahn_inv(x):
    if x.v0 is None:
        raise DivisionByZeroAtPrecision("inverse of a series that is zero at precision")
    ring = x.ring
    width = len(x.coeffs) if x.prec is not None else ring.N
    coeffs = list(x.coeffs) + [ring.residue_field.zero()] * (width - len(x.coeffs))
    lead_inv = coeffs[0].inverse()
    out = [lead_inv]
    for k in range(1, width):
        acc = coeffs[k] * out[0]
        for i in range(1, k):
            acc = acc + coeffs[k - i] * out[i]
        out.append(-(acc * lead_inv))
    return _canonical(ring, -x.v0, out, -x.v0 + width)


def hahn_sigma(x):
    if x.v0 is None:
        return x
    return HahnSeries(x.ring, x.v0, tuple(c.sigma() for c in x.coeffs), x.prec)


def hahn_valuation(x):
    """The valuation, or None when x is zero at precision."""
    return x.v0


def hahn_pi(x):
    if x.v0 is None:
        if x.prec is not None and x.prec <= 0:
            raise PrecisionExhausted("residue of a zero whose window ends below t^1")
        return x.ring.residue_field.zero()
    if x.v0 < 0:
        raise NotInValuationRing(f"valuation {x.v0} is negative")
    return x.coefficient(0)


def hahn_ac(x):
    if x.v0 is None:
        raise ZeroArgument("angular component of zero")
    return x.coeffs[0]


def hahn_cross_section(gamma, ring):
    return ring.element([1], gamma)


def hahn_from_json(data, ring=None):
    if ring is None:
        field = field_from_descriptor(data["k"])
        width = data.get("N") or max(1, len(data["coeffs"]))
        ring = HahnRing(field, width)
    field = ring.residue_field
    if data.get("v0") is None:
        return ring.zero_at(data.get("prec")) if data.get("prec") is not None else ring.zero()
    coeffs = [field.from_json(c) for c in data["coeffs"]]
    return ring.element(coeffs, data["v0"], data.get("prec"))
