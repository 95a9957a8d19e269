"""Newton-Hensel root finding for sigma-polynomials over a valued backend.

Backends are the Witt and Hahn rings; both expose ``valuation`` (None for
zero at precision), ``residue``, ``ac``, ``cross_section``, ``lift``,
``divide_exact`` and ``pad``. Residue equations are handed to the residue
field's ``solve_linear_sigma``.
"""

from dataclasses import dataclass, field

from .errors import (CoefficientNotIntegral, ExactRootAlready, MaxStepsExceeded,
                     NoSolutionWithinBound, NotApplicable, NotInValuationRing,
                     PostconditionViolation, PrecisionExhausted, ResidueEquationUnsolvable)
from .sigma_polynomials import (MultiIndex, SigmaPolynomial, evaluate,
                                multi_indices_of_weight, taylor_coefficient)
from .witt_vectors import WittVector, witt_div_p, witt_unit_inverse, witt_valuation

HENSELIAN_AT = "HenselianAt"
CONFIGURATION = "Configuration"
EXACT_ROOT = "ExactRoot"
NOT_APPLICABLE = "NotApplicable"


def _check(condition, message):
    if not condition:
        raise PostconditionViolation(message)


def _greater(u, v):
    """u > v where None stands for 'zero at precision', i.e. +infinity."""
    if u is None:
        return True
    if v is None:
        return False
    return u > v


def coerce_polynomial(G, ring):
    return G.map_coefficients(ring.coerce)


def _require_integral(G, a, ring):
    for c in G.coefficients():
        if not ring.is_integral(c):
            raise CoefficientNotIntegral(f"coefficient {c} has negative valuation")
    if not ring.is_integral(a):
        raise NotInValuationRing("starting point has negative valuation")


def _order(G):
    return G.order() or 0


def first_order_indices(G):
    return [MultiIndex.unit(k) for k in range(_order(G) + 1)]


def _taylor_value(G, index, a):
    T = taylor_coefficient(G, index)
    if T.is_zero():
        return None
    return evaluate(T, a)


# ---------------------------------------------------------------------------
# Reports.

@dataclass
class HenselConfigReport:
    kind: str
    gamma: int = None
    argmin_index: tuple = None
    witness_valuations: dict = field(default_factory=dict)
    value_at_start: int = None
    precision_caveat: bool = False

    def to_json(self):
        return {"kind": self.kind, "gamma": self.gamma,
                "argmin_index": list(self.argmin_index) if self.argmin_index is not None else None,
                "vG": self.value_at_start,
                "witness_valuations": {",".join(map(str, k)) or "0": v
                                       for k, v in self.witness_valuations.items()},
                "precision_caveat": self.precision_caveat}


@dataclass
class NewtonStep:
    a: object
    vG: int
    u_bar: object

    def to_json(self):
        return {"a": self.a.to_json(), "vG": self.vG, "u_bar": self.u_bar.to_json()}


@dataclass
class NewtonTrace:
    kind: str
    steps: list = field(default_factory=list)
    gamma: int = None
    scale: object = None
    root: object = None

    def valuations(self):
        return [s.vG for s in self.steps]

    def to_json(self):
        out = {"kind": self.kind, "gamma": self.gamma,
               "steps": [s.to_json() for s in self.steps],
               "root": self.root.to_json() if self.root is not None else None}
        if self.scale is not None:
            out["scale"] = self.scale.to_json()
        return out


# ---------------------------------------------------------------------------
# Detection.

def _linear_valuations(G, a, ring):
    vals = {}
    caveat = False
    for idx in first_order_indices(G):
        value = _taylor_value(G, idx, a)
        if value is None:
            continue
        v = ring.valuation(value)
        if v is None:
            caveat = True
        vals[tuple(idx.padded(_order(G)))] = v
    return vals, caveat


def is_sigma_henselian_at(G, a, ring=None):
    ring = ring or a.ring
    G = coerce_polynomial(G, ring)
    _require_integral(G, a, ring)
    vG = ring.valuation(evaluate(G, a))
    vals, caveat = _linear_valuations(G, a, ring)
    if vG is None:
        return HenselConfigReport(EXACT_ROOT, witness_valuations=vals, precision_caveat=True)
    known = {k: v for k, v in vals.items() if v is not None}
    argmin = min(known, key=lambda k: (known[k], k)) if known else None
    kind = HENSELIAN_AT if vG > 0 and argmin is not None and known[argmin] == 0 else NOT_APPLICABLE
    return HenselConfigReport(kind, gamma=vG if kind == HENSELIAN_AT else None,
                              argmin_index=argmin, witness_valuations=vals,
                              value_at_start=vG, precision_caveat=caveat)


def hensel_configuration(G, a, ring=None):
    """Find gamma with v(G(a)) = min_1 + gamma < v(G_(j)(a)) + |j| gamma for |j| > 1."""
    ring = ring or a.ring
    G = coerce_polynomial(G, ring)
    vG = ring.valuation(evaluate(G, a))
    vals, caveat = _linear_valuations(G, a, ring)
    if vG is None:
        return HenselConfigReport(EXACT_ROOT, witness_valuations=vals, precision_caveat=True)
    known = {k: v for k, v in vals.items() if v is not None}
    if not known:
        return HenselConfigReport(NOT_APPLICABLE, witness_valuations=vals,
                                  value_at_start=vG, precision_caveat=caveat)
    argmin = min(known, key=lambda k: (known[k], k))
    gamma = vG - known[argmin]
    n = _order(G)
    ok = True
    for m in range(2, (G.degree() or 0) + 1):
        for idx in multi_indices_of_weight(m, n):
            value = _taylor_value(G, idx, a)
            if value is None:
                continue
            v = ring.valuation(value)
            vals[tuple(idx.padded(n))] = v
            if v is None:
                caveat = True
            elif not vG < v + m * gamma:
                ok = False
    return HenselConfigReport(CONFIGURATION if ok else NOT_APPLICABLE,
                              gamma=gamma if ok else None, argmin_index=argmin,
                              witness_valuations=vals, value_at_start=vG,
                              precision_caveat=caveat)


# ---------------------------------------------------------------------------
# Fraction-field elements p^e * u of the Witt ring.

class ScaledWitt:
    """p^exponent * unit, or a zero known below p^bound (bound None: exact)."""

    __slots__ = ("ring", "exponent", "unit", "bound")

    def __init__(self, ring, exponent, unit, bound=None):
        self.ring, self.exponent, self.unit, self.bound = ring, exponent, unit, bound

    @classmethod
    def from_witt(cls, x, shift=0):
        v = witt_valuation(x)
        if v is None:
            return cls(x.ring, None, None, x.N + shift)
        unit = x
        for _ in range(v):
            unit = witt_div_p(unit)
        return cls(x.ring, v + shift, unit)

    def _coerce(self, other):
        if isinstance(other, ScaledWitt):
            return other
        if isinstance(other, int) and other == 0:
            return ScaledWitt(self.ring, None, None, None)
        return ScaledWitt.from_witt(self.ring.coerce(other))

    def is_zero(self):
        return self.exponent is None

    def valuation(self):
        return self.exponent

    def absolute_precision(self):
        return self.bound if self.is_zero() else self.exponent + self.unit.N

    def __add__(self, other):
        other = self._coerce(other)
        if self.is_zero() and self.bound is None:
            return other
        if other.is_zero() and other.bound is None:
            return self
        precs = [x.absolute_precision() for x in (self, other)]
        prec = min(precs)
        live = [x for x in (self, other) if not x.is_zero()]
        if not live:
            return ScaledWitt(self.ring, None, None, prec)
        low = min(x.exponent for x in live)
        rel = prec - low
        if rel <= 0:
            return ScaledWitt(self.ring, None, None, prec)
        total = None
        for x in live:
            shift = x.exponent - low
            if shift >= rel:
                continue
            term = x.unit.truncate(rel - shift)
            for _ in range(shift):
                term = term.times_p()
            total = term if total is None else total + term
        if total is None:
            return ScaledWitt(self.ring, None, None, prec)
        return ScaledWitt.from_witt(total, low)

    __radd__ = __add__

    def __neg__(self):
        if self.is_zero():
            return self
        return ScaledWitt(self.ring, self.exponent, -self.unit)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        other = self._coerce(other)
        if self.is_zero() or other.is_zero():
            bounds = []
            for x, y in ((self, other), (other, self)):
                if x.is_zero() and x.bound is not None:
                    bounds.append(x.bound + (y.exponent if not y.is_zero() else y.bound or 0))
            return ScaledWitt(self.ring, None, None, min(bounds) if bounds else None)
        n = min(self.unit.N, other.unit.N)
        return ScaledWitt(self.ring, self.exponent + other.exponent,
                          self.unit.truncate(n) * other.unit.truncate(n))

    __rmul__ = __mul__

    def inverse(self):
        if self.is_zero():
            raise PrecisionExhausted("inverse of a zero at precision")
        return ScaledWitt(self.ring, -self.exponent, witt_unit_inverse(self.unit))

    def __truediv__(self, other):
        return self * self._coerce(other).inverse()

    def __pow__(self, e):
        if e < 0:
            return self.inverse() ** (-e)
        result = ScaledWitt.from_witt(self.ring.one())
        for _ in range(e):
            result = result * self
        return result

    def sigma(self):
        if self.is_zero():
            return self
        return ScaledWitt(self.ring, self.exponent, self.unit.sigma())

    def __eq__(self, other):
        return (self - self._coerce(other)).is_zero()

    def __hash__(self):
        return hash((self.exponent, self.unit))

    def to_json(self):
        if self.is_zero():
            return {"zero_below": self.bound}
        return {"p_exponent": self.exponent, "unit": self.unit.to_json()}

    def __repr__(self):
        if self.is_zero():
            return f"O(p^{self.bound})"
        return f"p^{self.exponent}*{self.unit}"


def _to_field(ring, x):
    if isinstance(x, WittVector):
        return ScaledWitt.from_witt(x)
    return x


def _field_valuation(ring, x):
    if isinstance(x, ScaledWitt):
        return x.valuation()
    return ring.valuation(x)


def _uniformizer_power(ring, gamma):
    if ring.name == "witt":
        return ScaledWitt(ring, gamma, ring.one())
    return ring.cross_section(gamma)


def rescale(G, a, ring=None):
    """H(x) = G(c x)/G(a) and alpha = a/c with c a sigma-fixed element of value gamma(G, a)."""
    ring = ring or a.ring
    G = coerce_polynomial(G, ring)
    report = hensel_configuration(G, a, ring)
    if report.kind == EXACT_ROOT:
        raise ExactRootAlready("G(a) vanishes at working precision")
    if report.kind != CONFIGURATION:
        raise NotApplicable("(G, a) is not in sigma-hensel configuration", report)
    gamma = report.gamma
    c = _uniformizer_power(ring, gamma)
    Ga = _to_field(ring, evaluate(G, a))
    H = SigmaPolynomial({idx: _to_field(ring, coeff) * c ** idx.weight() / Ga
                         for idx, coeff in G.terms.items()})
    alpha = _to_field(ring, a) / c
    one = _to_field(ring, ring.one())
    _check(evaluate(H, alpha) == one, "H(alpha) differs from 1")
    n = _order(G)
    linear = [_field_valuation(ring, v) for v in
              (_taylor_value(H, idx, alpha) for idx in first_order_indices(H)) if v is not None]
    linear = [v for v in linear if v is not None]
    _check(bool(linear) and min(linear) == 0, "linear Taylor coefficients of H do not attain 0")
    for m in range(2, (G.degree() or 0) + 1):
        for idx in multi_indices_of_weight(m, n):
            value = _taylor_value(H, idx, alpha)
            if value is None:
                continue
            v = _field_valuation(ring, value)
            _check(v is None or v > 0, f"H_{tuple(idx)}(alpha) is not in the maximal ideal")
    return H, alpha, c


# ---------------------------------------------------------------------------
# Newton iteration.

def residue_equation(G, a, ring, value=None):
    """Coefficients (c_0, ..., c_n) of 1 + sum c_k sigma^k(x) = 0 for the step at a."""
    value = evaluate(G, a) if value is None else value
    field_ = ring.residue_field
    ac = ring.ac(value)
    coeffs = []
    shifted = ac
    for idx in first_order_indices(G):
        T = _taylor_value(G, idx, a)
        coeff = field_.zero() if T is None else ring.residue(T)
        coeffs.append(coeff * shifted / ac)
        shifted = shifted.sigma()
    return coeffs


def _solve_residue(coeffs, ring, trace=None):
    try:
        return ring.residue_field.solve_linear_sigma(coeffs)
    except NoSolutionWithinBound as exc:
        equation = {"coefficients": [str(c) for c in coeffs]}
        raise ResidueEquationUnsolvable(f"residue equation unsolved: {exc}", equation, trace) from exc


def _newton_update(G, a, ring, trace=None):
    value = evaluate(G, a)
    vG = ring.valuation(value)
    if vG is None:
        raise PrecisionExhausted("G(a) is zero at precision; the step needs its valuation")
    coeffs = residue_equation(G, a, ring, value)
    u_bar = _solve_residue(coeffs, ring, trace)
    b = a + value * ring.lift(u_bar)
    return b, u_bar, vG


def newton_step(G, a, ring=None):
    """One step from a henselian start: returns (b, u_bar) with v(a - b) = v(G(a))."""
    ring = ring or a.ring
    G = coerce_polynomial(G, ring)
    report = is_sigma_henselian_at(G, a, ring)
    if report.kind == EXACT_ROOT:
        raise PrecisionExhausted("G(a) is zero at precision; no step is defined")
    if report.kind != HENSELIAN_AT:
        raise NotApplicable("G is not sigma-henselian at the start", report)
    b, u_bar, vG = _newton_update(G, a, ring)
    _check_step(G, a, b, vG, ring)
    return b, u_bar


def _check_step(G, a, b, vG, ring):
    _check(ring.valuation(a - b) == vG, "v(a - b) differs from v(G(a))")
    vGb = ring.valuation(evaluate(G, b))
    _check(_greater(vGb, vG), "v(G(b)) did not increase")
    if vGb is not None:
        after = is_sigma_henselian_at(G, b, ring)
        _check(after.kind in (HENSELIAN_AT, EXACT_ROOT), "G is no longer henselian at b")


def _iterate(G, start, ring, target, max_steps, trace, first_unit_step=False):
    current = start
    while True:
        value = evaluate(G, current)
        vG = ring.valuation(value)
        if vG is None or vG >= target:
            return current
        if len(trace.steps) >= max_steps:
            raise MaxStepsExceeded(f"no root within {max_steps} steps")
        if not first_unit_step and vG <= 0:
            raise PostconditionViolation("Newton iteration left the henselian region")
        b, u_bar, _ = _newton_update(G, current, ring, trace)
        _check_step(G, current, b, vG, ring)
        trace.steps.append(NewtonStep(current, vG, u_bar))
        current = b
        first_unit_step = False


def solve(G, a, ring=None, max_steps=None, target_valuation=None):
    """Iterate Newton steps to a root at working precision; returns (root, trace)."""
    ring = ring or a.ring
    G = coerce_polynomial(G, ring)
    target = ring.precision if target_valuation is None else target_valuation
    max_steps = target + 2 if max_steps is None else max_steps
    vG = ring.valuation(evaluate(G, a))
    if vG is None or vG >= target:
        return a, NewtonTrace(EXACT_ROOT, root=a)
    report = is_sigma_henselian_at(G, a, ring)
    if report.kind == HENSELIAN_AT:
        trace = NewtonTrace(HENSELIAN_AT, gamma=vG)
        root = _iterate(G, a, ring, target, max_steps, trace)
        trace.root = root
        return root, trace
    config = hensel_configuration(G, a, ring)
    if config.kind != CONFIGURATION:
        raise NotApplicable("start is neither henselian nor in configuration", config)
    return _solve_configuration(G, a, ring, config, target, max_steps)


def _solve_configuration(G, a, ring, config, target, max_steps):
    gamma = config.gamma
    if ring.name == "witt" and gamma < 0:
        raise NotApplicable("the root would have negative valuation", config)
    c = ring.cross_section(gamma)
    Ga = evaluate(G, a)
    vG = ring.valuation(Ga)
    # P(x) = G(a + c x) / G(a), which has integral coefficients and P(0) = 1.
    n = _order(G)
    terms = {}
    for m in range((G.degree() or 0) + 1):
        for idx in multi_indices_of_weight(m, n):
            value = _taylor_value(G, idx, a)
            if value is None:
                continue
            coeff = ring.pad(ring.divide_exact(value * c ** m, Ga))
            if not coeff.is_zero():
                terms[idx] = coeff
    P = SigmaPolynomial(terms)
    trace = NewtonTrace(CONFIGURATION, gamma=gamma, scale=c)
    x = _iterate(P, ring.zero(), ring, target - vG, max_steps, trace, first_unit_step=True)
    root = a + c * x
    _check(ring.valuation(a - root) == gamma, "v(a - root) differs from gamma(G, a)")
    trace.root = root
    return root, trace


def solve_report(G, a, ring=None, **options):
    root, trace = solve(G, a, ring, **options)
    return trace.to_json()


__all__ = [
    "HenselConfigReport", "NewtonStep", "NewtonTrace", "ScaledWitt",
    "is_sigma_henselian_at", "hensel_configuration", "rescale", "residue_equation",
    "newton_step", "solve", "solve_report", "coerce_polynomial", "first_order_indices",
]
