"""Sparse sigma-polynomials F(x) = f(x, sigma(x), ..., sigma^n(x)).

A polynomial is a map from multi-indices (i_0, ..., i_n) to coefficients,
denoting sum a_i * x^i_0 * sigma(x)^i_1 * ... * sigma^n(x)^i_n. Coefficients
may be Python integers or Fractions, residue-field elements, or elements of a
valued backend; a single polynomial should not mix backends.
"""

from fractions import Fraction
from math import comb, prod

from .errors import AllCoefficientsZero

NEG_INF = float("-inf")


def is_zero_coeff(c):
    if isinstance(c, (int, Fraction)):
        return c == 0
    return c.is_zero()


def apply_sigma(c, k=1):
    """sigma^k on a coefficient; plain numbers are sigma-fixed."""
    if isinstance(c, (int, Fraction)):
        return c
    for _ in range(k):
        c = c.sigma()
    return c


class MultiIndex(tuple):
    """Exponent vector with trailing zeros stripped (so (1, 0) == (1,))."""

    def __new__(cls, entries=()):
        entries = list(entries)
        while entries and entries[-1] == 0:
            entries.pop()
        if any(e < 0 for e in entries):
            raise ValueError("multi-index entries must be nonnegative")
        return super().__new__(cls, entries)

    @classmethod
    def unit(cls, k):
        return cls([0] * k + [1])

    def weight(self):
        return sum(self)

    def padded(self, n):
        return tuple(self) + (0,) * (n + 1 - len(self))

    def __le__(self, other):
        n = max(len(self), len(other))
        return all(a <= b for a, b in zip(self.padded(n), other.padded(n)))

    def __add__(self, other):
        n = max(len(self), len(other))
        return MultiIndex(a + b for a, b in zip(self.padded(n), MultiIndex(other).padded(n)))

    def __sub__(self, other):
        n = max(len(self), len(other))
        return MultiIndex(a - b for a, b in zip(self.padded(n), MultiIndex(other).padded(n)))

    def binom(self, other):
        """prod binom(self_k, other_k); zero unless other <= self."""
        n = max(len(self), len(other))
        return prod(comb(a, b) for a, b in zip(self.padded(n), MultiIndex(other).padded(n)))

    def lex_key(self, n=None):
        n = len(self) - 1 if n is None else n
        return self.padded(n)


def _lex_sorted(keys):
    width = max((len(k) for k in keys), default=0)
    return sorted(keys, key=lambda k: k.padded(width - 1) if width else ())


class SigmaPolynomial:
    """Immutable sparse sigma-polynomial in one variable x."""

    __slots__ = ("terms",)

    def __init__(self, terms=None):
        clean = {}
        for idx, c in (terms or {}).items():
            idx = MultiIndex(idx)
            if not is_zero_coeff(c):
                clean[idx] = c
        self.terms = {k: clean[k] for k in _lex_sorted(list(clean))}

    # -- constructors
    @classmethod
    def constant(cls, c):
        return cls({MultiIndex(): c})

    @classmethod
    def x(cls, k=0):
        """The polynomial sigma^k(x)."""
        return cls({MultiIndex.unit(k): 1})

    # -- structure
    def is_zero(self):
        return not self.terms

    def is_constant(self):
        return all(idx.weight() == 0 for idx in self.terms)

    def constant_term(self):
        return self.terms.get(MultiIndex(), 0)

    def order(self):
        """Largest k with sigma^k(x) occurring, or None for constants."""
        orders = [len(idx) - 1 for idx in self.terms if idx]
        return max(orders) if orders else None

    def degree(self):
        if not self.terms:
            return None
        return max(idx.weight() for idx in self.terms)

    def width(self):
        return max((len(idx) for idx in self.terms), default=0)

    def coefficients(self):
        return list(self.terms.values())

    def map_coefficients(self, fn):
        return SigmaPolynomial({k: fn(v) for k, v in self.terms.items()})

    # -- arithmetic
    def _coerce(self, other):
        if isinstance(other, SigmaPolynomial):
            return other
        return SigmaPolynomial.constant(other)

    def __add__(self, other):
        other = self._coerce(other)
        out = dict(self.terms)
        for k, v in other.terms.items():
            out[k] = out[k] + v if k in out else v
        return SigmaPolynomial(out)

    __radd__ = __add__

    def __neg__(self):
        return SigmaPolynomial({k: -v for k, v in self.terms.items()})

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        other = self._coerce(other)
        out = {}
        for k1, v1 in self.terms.items():
            for k2, v2 in other.terms.items():
                k = k1 + k2
                term = v1 * v2
                out[k] = out[k] + term if k in out else term
        return SigmaPolynomial(out)

    __rmul__ = __mul__

    def __pow__(self, e):
        if e < 0:
            raise ValueError("negative powers of sigma-polynomials are not defined")
        result = SigmaPolynomial.constant(1)
        base = self
        while e:
            if e & 1:
                result = result * base
            e >>= 1
            if e:
                base = base * base
        return result

    def apply_sigma(self):
        """sigma(F(x)) as a polynomial in x: coefficients shifted, iterates raised."""
        return SigmaPolynomial({MultiIndex((0,) + tuple(k)): apply_sigma(v)
                                for k, v in self.terms.items()})

    def __eq__(self, other):
        if not isinstance(other, SigmaPolynomial):
            other = SigmaPolynomial.constant(other)
        if self.terms.keys() != other.terms.keys():
            return False
        return all(is_zero_coeff(self.terms[k] - other.terms[k]) for k in self.terms)

    def __hash__(self):
        return hash(tuple(self.terms))

    def __repr__(self):
        return f"SigmaPolynomial({self})"

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for idx, c in self.terms.items():
            factors = []
            for k, e in enumerate(idx):
                if e:
                    base = "x" if k == 0 else ("s(x)" if k == 1 else f"s^{k}(x)")
                    factors.append(base if e == 1 else f"{base}^{e}")
            mono = "*".join(factors)
            if not mono:
                parts.append(f"({c})")
            elif isinstance(c, (int, Fraction)) and c == 1:
                parts.append(mono)
            else:
                parts.append(f"({c})*{mono}")
        return " + ".join(parts)


def complexity(F):
    """(order, degree in the top iterate, total degree) with -inf conventions."""
    if F.is_zero():
        return (NEG_INF, NEG_INF, NEG_INF)
    n = F.order()
    if n is None:
        return (NEG_INF, 0, 0)
    top = max(idx[n] if len(idx) > n else 0 for idx in F.terms)
    return (n, top, F.degree())


def sigma_iterates(a, n):
    out = [a]
    for _ in range(n):
        out.append(out[-1].sigma())
    return out


def evaluate_monomials(F, values, zero):
    """sum a_l * prod values[k]^l_k with ``zero`` as the additive identity."""
    fast = getattr(zero, "polynomial_value", None)
    if fast is not None:
        value = fast(F.terms.items(), values)
        if value is not None:
            return value
    acc = zero
    cache = {}
    for idx, c in F.terms.items():
        term = None
        for k, e in enumerate(idx):
            if e:
                key = (k, e)
                if key not in cache:
                    cache[key] = values[k] ** e
                term = cache[key] if term is None else term * cache[key]
        if term is None:
            acc = acc + c
        else:
            acc = acc + term * c if isinstance(c, (int, Fraction)) else acc + c * term
    return acc


def evaluate(F, a):
    """F(a) = f(a, sigma(a), ..., sigma^n(a)) using the element's own sigma."""
    n = F.order() or 0
    return evaluate_monomials(F, sigma_iterates(a, n), a * 0)


def evaluate_at(F, values, zero):
    """Evaluate F as an ordinary polynomial at the tuple ``values``."""
    return evaluate_monomials(F, values, zero)


def taylor_coefficient(F, i):
    """F_(i) with F(x + y) = sum_i F_(i)(x) * sigma(y)^i."""
    i = MultiIndex(i)
    out = {}
    for l, c in F.terms.items():
        if i <= l:
            b = l.binom(i)
            out[l - i] = c * b
    result = SigmaPolynomial(out)
    if i.weight() >= 1 and not F.is_zero() and not result.is_zero():
        assert result.degree() < F.degree()
    return result


def multi_indices_of_weight(m, n):
    """All multi-indices (i_0..i_n) with |i| = m, in lexicographic order."""
    if n < 0:
        return [MultiIndex()] if m == 0 else []
    out = []

    def rec(prefix, remaining, slots):
        if slots == 1:
            out.append(MultiIndex(prefix + [remaining]))
            return
        for v in range(remaining + 1):
            rec(prefix + [v], remaining - v, slots - 1)

    rec([], m, n + 1)
    return sorted(out, key=lambda k: k.padded(n))


class HomogeneousPart:
    """G_m = G_(l*)(a) * g_m with the chosen index l* and normalised g_m."""

    def __init__(self, m, part, l_star, lead, normalized):
        self.m = m
        self.part = part
        self.l_star = l_star
        self.lead = lead
        self.normalized = normalized

    def __iter__(self):
        return iter((self.part, self.l_star, self.normalized))


def homogeneous_part_at(G, a, m, ring):
    """Weight-m part of the Taylor expansion of G at a.

    Returns a ``HomogeneousPart`` whose ``part`` has coefficients G_(l)(a),
    ``l_star`` minimises v(G_(l)(a)) with lexicographic tie-break, and
    ``normalized`` is g_m = part / G_(l*)(a), whose l*-coefficient is 1.
    """
    if m < 1:
        raise ValueError("m must be at least 1")
    n = G.order() or 0
    coeffs = {}
    for l in multi_indices_of_weight(m, n):
        T = taylor_coefficient(G, l)
        if T.is_zero():
            continue
        val = evaluate(T, a)
        if not is_zero_coeff(val):
            coeffs[l] = val
    if not coeffs:
        raise AllCoefficientsZero(f"G_{m} vanishes at this point")
    part = SigmaPolynomial(coeffs)
    best = None
    for l, c in part.terms.items():
        v = ring.valuation(c)
        if v is None:
            continue
        if best is None or v < best[0]:
            best = (v, l)
    if best is None:
        raise AllCoefficientsZero(f"G_{m} is zero at working precision")
    l_star = best[1]
    lead = part.terms[l_star]
    normalized = SigmaPolynomial({l: ring.divide_exact(c, lead) for l, c in part.terms.items()})
    return HomogeneousPart(m, part, l_star, lead, normalized)


def sigma_shift_coefficients(F):
    """F^sigma: apply sigma to every coefficient."""
    return F.map_coefficients(apply_sigma)


def shifted_evaluation(F, a):
    """F evaluated at (sigma(a), ..., sigma^(n+1)(a))."""
    n = F.order() or 0
    return evaluate_monomials(F, sigma_iterates(a, n + 1)[1:], a * 0)
