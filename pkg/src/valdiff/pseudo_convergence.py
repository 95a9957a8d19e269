"""Finite pc-sequences: detection, pseudolimits, equivalence and refinement.

"Eventually" is read on the tail [rho0, L): every eventual claim is checked
at each tail index, and tails too short to separate the competing affine
value maps raise InconclusiveTail.

Refinement replaces a_rho by b_rho = a_rho + theta_rho * mu_rho, where
theta_rho is the sigma-fixed cross-section of gamma_rho = v(a_rho - a) and
mu_rho is the first enumerated candidate that keeps every tracked value
map at its predicted valuation.
"""

from dataclasses import dataclass, field
from itertools import product

from .errors import (AxiomThreeFailure, CandidateExhausted, InconclusiveTail,
                     NoWitnessFound, NotWittBackend, PostconditionViolation,
                     PrecisionExhausted, UsageError)
from .residue_fields import FiniteFieldTower, FqElement, has_sigma_identity_witness
from .sigma_hensel import CONFIGURATION, coerce_polynomial, hensel_configuration, solve
from .sigma_polynomials import (MultiIndex, SigmaPolynomial, evaluate, evaluate_at,
                                multi_indices_of_weight, taylor_coefficient)
from .witt_vectors import d_transform_of_form, del_components

DEFAULT_BUDGET = 4096
WITT_MARGIN = 1
MIN_TAIL = 3


def _identical(x, y):
    if hasattr(x, "coeffs"):
        return (x.v0, x.prec, x.coeffs) == (y.v0, y.prec, y.coeffs)
    return x == y


def _difference_valuation(x, y, ring):
    """v(x - y); None when x and y are the same element."""
    v = ring.valuation(x - y)
    if v is None and not _identical(x, y):
        raise PrecisionExhausted("difference vanishes at working precision")
    return v


# ---------------------------------------------------------------------------
# Sequences.

@dataclass
class PcCheck:
    is_pc: bool
    rho0: int
    gammas: list
    steps: list

    def to_json(self):
        return {"is_pc": self.is_pc, "rho0": self.rho0, "gammas": self.gammas}


class PcSequence:
    def __init__(self, elements, ring=None):
        elements = list(elements)
        if len(elements) < 3:
            raise UsageError("a pc-sequence needs at least three terms")
        self.elements = elements
        self.ring = ring or elements[0].ring
        self._check = None

    def __len__(self):
        return len(self.elements)

    def __getitem__(self, i):
        return self.elements[i]

    def check(self):
        if self._check is None:
            self._check = check_pc(self)
        return self._check

    @property
    def rho0(self):
        return self.check().rho0

    @property
    def gammas(self):
        return self.check().gammas

    def to_json(self):
        return {"elements": [x.to_json() for x in self.elements]}


def check_pc(seq):
    """Smallest rho0 with gamma_rho = v(a_(rho+1) - a_rho) strictly increasing from rho0 on."""
    if not isinstance(seq, PcSequence):
        seq = PcSequence(seq)
    ring, elems = seq.ring, seq.elements
    steps = [_difference_valuation(elems[i + 1], elems[i], ring) for i in range(len(elems) - 1)]
    rho0 = len(steps) - 1
    while rho0 > 0 and steps[rho0 - 1] is not None and steps[rho0] is not None \
            and steps[rho0 - 1] < steps[rho0]:
        rho0 -= 1
    tail = steps[rho0:]
    ok = (len(tail) >= 2 and all(g is not None for g in tail)
          and all(x < y for x, y in zip(tail, tail[1:])))
    if not ok:
        return PcCheck(False, None, [], steps)
    return PcCheck(True, rho0, tail, steps)


def width_threshold(seq):
    """Smallest value exceeding every observed gamma_rho."""
    check = seq.check()
    if not check.is_pc:
        return None
    return check.gammas[-1] + 1


@dataclass
class LimitCheck:
    is_limit: bool
    ladder: list

    def to_json(self):
        return {"is_limit": self.is_limit, "ladder": self.ladder}


def pseudolimit_check(seq, a):
    if not isinstance(seq, PcSequence):
        seq = PcSequence(seq)
    check = seq.check()
    if not check.is_pc:
        return LimitCheck(False, [])
    ladder = [_difference_valuation(a, seq[r], seq.ring) for r in range(check.rho0, len(seq))]
    ok = all(v is not None for v in ladder) and all(x < y for x, y in zip(ladder, ladder[1:]))
    return LimitCheck(ok, ladder)


def equivalent(seq1, seq2, a):
    if not (seq1.check().is_pc and seq2.check().is_pc):
        return False
    if width_threshold(seq1) != width_threshold(seq2):
        return False
    return pseudolimit_check(seq1, a).is_limit and pseudolimit_check(seq2, a).is_limit


# ---------------------------------------------------------------------------
# Affine value maps gamma -> m * gamma + offset and their tail ordering.

def _ordered_at(maps, gamma, ring_name):
    values = [m * gamma + w for m, w in maps]
    order = tuple(sorted(range(len(maps)), key=lambda i: values[i]))
    ranked = [values[i] for i in order]
    gap = WITT_MARGIN if ring_name == "witt" else 0
    if any(y - x <= gap for x, y in zip(ranked, ranked[1:])):
        return None
    return order


def tail_ordering(maps, gammas, ring_name):
    """(start, index of the least map) for the first suffix of ``gammas`` on which
    the maps are pairwise separated and keep one strict order.

    ``maps`` is a list of (slope, offset) pairs. On the Witt backend the
    separation must exceed the ramification margin. The suffix must keep at
    least MIN_TAIL points.
    """
    orders = [_ordered_at(maps, g, ring_name) for g in gammas]
    start = len(orders)
    while start > 0 and orders[start - 1] is not None and \
            (start == len(orders) or orders[start - 1] == orders[start]):
        start -= 1
    if len(orders) - start < MIN_TAIL:
        raise InconclusiveTail("the value maps do not settle into one order on the observed tail")
    return start, orders[start][0]


# ---------------------------------------------------------------------------
# Per-target data.

@dataclass
class ValueMap:
    """The weight-m part G_m = lead * g_m of a target at a."""

    m: int
    l_star: tuple
    lead: object
    form: SigmaPolynomial          # g_m, or g_m^D on the Witt path
    offset: int                    # v(lead), plus v(lambda_m) on the Witt path
    scale_valuation: int = 0       # v(lambda_m)


@dataclass
class TargetData:
    polynomial: SigmaPolynomial
    text: str
    maps: list
    m0: int = None
    l_m0: tuple = None
    offset_m0: int = None
    ladder: list = field(default_factory=list)
    chosen: ValueMap = None

    def to_json(self):
        return {"target": self.text, "m0": self.m0,
                "l_m0": list(self.l_m0) if self.l_m0 is not None else None,
                "offset": self.offset_m0, "ladder": self.ladder,
                "lambda_valuations": {str(vm.m): vm.scale_valuation for vm in self.maps}}


def _padded(ring, F):
    return F.map_coefficients(ring.pad)


def _min_valuation_term(F, ring):
    best = None
    for idx, c in F.terms.items():
        v = ring.valuation(c)
        if v is not None and (best is None or v < best[0]):
            best = (v, idx)
    return best


def _weight_parts(H, a, ring, n):
    """{m: ({l: H_(l)(a)}, l*, lead)} for every m >= 1 with a nonzero part."""
    parts = {}
    for m in range(1, (H.degree() or 0) + 1):
        coeffs = {}
        for idx in multi_indices_of_weight(m, n):
            T = taylor_coefficient(H, idx)
            if T.is_zero():
                continue
            value = evaluate(T, a)
            if not value.is_zero():
                coeffs[idx] = value
        if not coeffs:
            continue
        part = SigmaPolynomial(coeffs)
        best = _min_valuation_term(part, ring)
        if best is None:
            continue
        parts[m] = (part, best[1], part.terms[best[1]])
    return parts


def _basic_maps(H, a, ring, n):
    maps = []
    for m, (part, l_star, lead) in _weight_parts(H, a, ring, n).items():
        g = _padded(ring, SigmaPolynomial({l: ring.divide_exact(c, lead) for l, c in part.terms.items()}))
        maps.append(ValueMap(m, tuple(l_star), lead, g, ring.valuation(lead)))
    return maps


def _witt_maps(H, a, ring, n):
    """g_m(D(y)) = lambda_m * g_m^D(y) with g_m^D integral and one coefficient 1."""
    maps = []
    for m, (part, l_star, lead) in _weight_parts(H, a, ring, n).items():
        g = _padded(ring, SigmaPolynomial({l: ring.divide_exact(c, lead) for l, c in part.terms.items()}))
        composed = d_transform_of_form(_full_width(g, n), ring.p)
        best = _min_valuation_term(composed, ring)
        if best is None:
            raise PrecisionExhausted(f"g_{m}(D(y)) vanishes at working precision")
        lam = composed.terms[best[1]]
        gD = _padded(ring, SigmaPolynomial({j: ring.divide_exact(c, lam)
                                            for j, c in composed.terms.items()}))
        maps.append(ValueMap(m, tuple(l_star), lead, gD,
                             ring.valuation(lead) + best[0], best[0]))
    return maps


def _full_width(F, n):
    """Pad exponent tuples so that d_transform_of_form sees n + 1 variables."""
    return {tuple(idx.padded(n)): c for idx, c in F.terms.items()}


def _witt_part_transforms(G, a, ring, n):
    """B_m(y) = G_m(D(y)) with its least coefficient b_(j(m), m) and h_m = B_m / b."""
    maps = []
    for m, (part, _l_star, _lead) in _weight_parts(G, a, ring, n).items():
        B = d_transform_of_form(_full_width(part, n), ring.p)
        best = _min_valuation_term(B, ring)
        if best is None:
            continue
        b = B.terms[best[1]]
        h = _padded(ring, SigmaPolynomial({j: ring.divide_exact(c, b) for j, c in B.terms.items()}))
        maps.append(ValueMap(m, tuple(best[1]), b, h, best[0]))
    return maps


def _lambda_targets(G, n, p):
    """The sigma-polynomials Lambda_(j,m)(G(m, x)) for 1 <= m <= deg G."""
    out = []
    for m in range(1, (G.degree() or 0) + 1):
        form = {}
        for idx in multi_indices_of_weight(m, n):
            T = taylor_coefficient(G, idx)
            if not T.is_zero():
                form[tuple(idx.padded(n))] = T
        if not form:
            continue
        out.extend(d_transform_of_form(form, p).terms.values())
    return out


def _derivative_targets(G, n):
    out = []
    for m in range(1, (G.degree() or 0) + 1):
        for idx in multi_indices_of_weight(m, n):
            T = taylor_coefficient(G, idx)
            if not T.is_zero():
                out.append(T)
    return out


# ---------------------------------------------------------------------------
# Reports.

@dataclass
class RefinementReport:
    original: PcSequence
    refined: PcSequence
    limit: object
    rho0: int
    gammas: list
    thetas: list
    ds: list
    mus: list
    mu_residues: list
    targets: list
    threshold: int
    mode: dict = None

    def ladders(self):
        return {t.text: t.ladder for t in self.targets}

    def to_json(self):
        out = {"gammas": self.gammas, "threshold": self.threshold,
               "rho0": self.rho0,
               "m0": {t.text: t.m0 for t in self.targets},
               "l_m0": {t.text: list(t.l_m0) if t.l_m0 is not None else None for t in self.targets},
               "ladders": self.ladders(),
               "targets": [t.to_json() for t in self.targets],
               "mu_residues": [str(m) for m in self.mu_residues],
               "refined": [b.to_json() for b in self.refined.elements]}
        if self.mode is not None:
            out["mode"] = self.mode
        return out


def _label(F):
    return None if F is None else _text(F)


def _text(F):
    return str(F)


# ---------------------------------------------------------------------------
# Candidate enumeration.

def _witt_candidates(ring, n, budget):
    """Residue tuples (mu_0..mu_n), sweeping each tower level before the next."""
    field_ = ring.residue_field
    p = ring.p
    count = 0
    level = 1
    while True:
        elems = [FqElement(p, level, tuple(reversed(c))) for c in product(range(p), repeat=level)]
        for combo in product(elems, repeat=n + 1):
            if level > 1 and all(_in_lower_level(x, level) for x in combo):
                continue
            if count >= budget:
                return
            count += 1
            yield list(combo)
        level += 1
        if level > field_.tower_bound:
            return


def _in_lower_level(x, level):
    for d in range(1, level):
        if level % d == 0 and x ** (x.p ** d) == x:
            return True
    return False


def _valuation_is_zero(ring, x):
    return ring.valuation(x) == 0


def _common_truncation(values, n):
    prec = min(v.N for v in values) if values else n
    return [v.truncate(prec) for v in values], prec


def _evaluate_on_dels(form, dels, ring):
    """Evaluate a polynomial in y_0..y_n at the del-components, at their common precision."""
    values, prec = _common_truncation(dels, 0)
    sub = ring.with_precision(prec)
    trimmed = form.map_coefficients(lambda c: c.truncate(prec) if c.N > prec else c)
    return evaluate_at(trimmed, values, sub.zero())


# ---------------------------------------------------------------------------
# Refinement.

def _prepare(seq, a, ring, targets):
    check = seq.check()
    if not check.is_pc:
        raise UsageError("input is not a pc-sequence")
    limit = pseudolimit_check(seq, a)
    if not limit.is_limit:
        raise UsageError("the given element is not a pseudolimit of the sequence")
    rho0 = check.rho0
    gammas = limit.ladder
    thetas, ds = [], []
    for r, gamma in zip(range(rho0, len(seq)), gammas):
        theta = ring.cross_section(gamma)
        thetas.append(theta)
        ds.append(ring.pad(ring.divide_exact(seq[r] - a, theta)))
    polys = [coerce_polynomial(T, ring) for T in targets]
    return rho0, gammas, thetas, ds, polys


def _axiom_three_precheck(field_, n, budget):
    p = field_.characteristic
    for d in range(1, n + 1):
        for e in (range(1, n + 1) if p else [0]):
            try:
                has_sigma_identity_witness(d, e, field_, budget)
            except NoWitnessFound as exc:
                raise AxiomThreeFailure(
                    f"residue field has sigma-identity sigma^{d}(y) = y^(p^{e})") from exc


def _order_of(polys):
    return max([P.order() or 0 for P in polys] + [0])


@dataclass
class _Plan:
    seq: PcSequence
    limit: object
    ring: object
    rho0: int
    tail: list
    gammas: list
    thetas: list
    ds: list
    datas: list
    state: object


def _make_plan(seq, a, ring, polys, maps_for, G=None, mode_maps=None, G_label=None):
    """Fix each target's eventually least value map and the common tail it needs."""
    labels = [_text(P) for P in polys]
    rho0, gammas, thetas, ds, polys = _prepare(seq, a, ring, polys)
    datas = [TargetData(P, label, maps_for(P)) for label, P in zip(labels, polys)
             if not P.is_constant()]
    datas = [d for d in datas if d.maps]
    start = 0
    for data in datas:
        s, idx = tail_ordering([(vm.m, vm.offset) for vm in data.maps], gammas, ring.name)
        data.chosen = data.maps[idx]
        start = max(start, s)
    chosen_mode = None
    if G is not None:
        s, idx = tail_ordering([(vm.m, vm.offset) for vm in mode_maps], gammas, ring.name)
        chosen_mode = mode_maps[idx]
        start = max(start, s)
    tail = list(range(rho0 + start, len(seq)))
    gammas, thetas, ds = gammas[start:], thetas[start:], ds[start:]
    state = None
    if G is not None:
        state = _ModeState(G, G_label, mode_maps, chosen_mode, seq, ring, tail, gammas, thetas)
    return _Plan(seq, a, ring, rho0, tail, gammas, thetas, ds, datas, state)


def _finish_target(data, plan, refined):
    ring, a = plan.ring, plan.limit
    chosen = data.chosen
    data.m0, data.l_m0, data.offset_m0 = chosen.m, chosen.l_star, chosen.offset
    value_at_a = evaluate(data.polynomial, a)
    ladder = []
    for r, gamma in zip(plan.tail, plan.gammas):
        v = ring.valuation(evaluate(data.polynomial, refined[r]) - value_at_a)
        if v is None:
            raise PrecisionExhausted("target difference vanishes at working precision")
        if v != chosen.m * gamma + chosen.offset:
            raise PostconditionViolation(
                f"v(H(b) - H(a)) = {v}, expected {chosen.m * gamma + chosen.offset} for {data.text}")
        ladder.append(v)
    if any(x >= y for x, y in zip(ladder, ladder[1:])):
        raise PostconditionViolation(f"ladder of {data.text} is not strictly increasing")
    data.ladder = ladder


class _ModeState:
    """Bookkeeping for the refinement that also drives G(b_rho) towards 0."""

    def __init__(self, G, text, maps, chosen, seq, ring, tail, gammas, thetas):
        self.G, self.text, self.maps, self.chosen = G, text, maps, chosen
        self.collision_c = {}
        self.values_a = {}
        m0, w0 = chosen.m, chosen.offset
        for r, gamma, theta in zip(tail, gammas, thetas):
            Ga = evaluate(G, seq[r])
            vGa = ring.valuation(Ga)
            if vGa is None:
                raise PrecisionExhausted("G(a_rho) vanishes at working precision")
            self.values_a[r] = vGa
            if vGa == m0 * gamma + w0:
                c = ring.divide_exact((-theta) ** m0 * chosen.lead, Ga)
                self.collision_c[r] = ring.pad(c)

    def accepts(self, r, values, ring):
        """values[i] is the i-th normalised form evaluated at the candidate."""
        if not all(_valuation_is_zero(ring, v) for v in values):
            return False
        c = self.collision_c.get(r)
        if c is None:
            return True
        h0 = values[self.maps.index(self.chosen)]
        if hasattr(h0, "N") and h0.N < c.N:
            c = c.truncate(h0.N)
        return _valuation_is_zero(ring, 1 - c * h0)

    def ladder(self, refined, plan):
        ring = plan.ring
        m0, w0 = self.chosen.m, self.chosen.offset
        out = []
        for r, gamma in zip(plan.tail, plan.gammas):
            v = ring.valuation(evaluate(self.G, refined[r]))
            expected = min(self.values_a[r], m0 * gamma + w0)
            if v is None:
                raise PrecisionExhausted("G(b_rho) vanishes at working precision")
            if v != expected:
                raise InconclusiveTail(f"v(G(b_rho)) = {v}, expected {expected}; tail not yet eventual")
            out.append(v)
        if any(x >= y for x, y in zip(out, out[1:])):
            raise InconclusiveTail("v(G(b_rho)) is not increasing on this tail")
        return out

    def to_json(self, ladder):
        return {"polynomial": self.text, "m0": self.chosen.m,
                "offset": self.chosen.offset, "l_m0": list(self.chosen.l_star),
                "collisions": sorted(self.collision_c),
                "vG_a": [self.values_a[r] for r in sorted(self.values_a)],
                "vG_b": ladder}


def refine_basic(seq, a, targets, main_polynomial=None, budget=DEFAULT_BUDGET):
    """Equivalent sequence b_rho with H(b_rho) pseudoconverging to H(a) for each target.

    With ``main_polynomial`` G (assumed to satisfy G(a_rho) -> 0 and the
    non-degeneracy hypothesis, which are not verified), the refinement also
    forces G(b_rho) -> 0.
    """
    if not isinstance(seq, PcSequence):
        seq = PcSequence(seq)
    ring = seq.ring
    field_ = ring.residue_field
    G = coerce_polynomial(main_polynomial, ring) if main_polynomial is not None else None
    polys = list(targets)
    if G is not None:
        polys += _derivative_targets(main_polynomial, G.order() or 0)
    n = _order_of(polys + ([G] if G is not None else []))
    _axiom_three_precheck(field_, n, budget)
    mode_maps = _basic_maps(G, a, ring, G.order() or 0) if G is not None else None
    plan = _make_plan(seq, a, ring, polys, lambda P: _basic_maps(P, a, ring, P.order() or 0),
                      G, mode_maps, _label(main_polynomial))

    mus, residues = [], []
    for r, d in zip(plan.tail, plan.ds):
        chosen = None
        for cand in field_.enumerate(budget):
            if cand.is_zero():
                continue
            mu = ring.lift(cand)
            z = mu + d
            if not _valuation_is_zero(ring, z):
                continue
            if not all(_valuation_is_zero(ring, evaluate(vm.form, z))
                       for data in plan.datas for vm in data.maps):
                continue
            if plan.state is not None and not plan.state.accepts(
                    r, [evaluate(vm.form, mu) for vm in plan.state.maps], ring):
                continue
            chosen = (mu, cand)
            break
        if chosen is None:
            raise CandidateExhausted(f"no admissible mu at index {r} within {budget} candidates")
        mus.append(chosen[0])
        residues.append(chosen[1])
    return _assemble(plan, mus, residues)


def _assemble(plan, mus, residues):
    seq, ring = plan.seq, plan.ring
    elements = list(seq.elements)
    for r, theta, mu in zip(plan.tail, plan.thetas, mus):
        elements[r] = seq[r] + theta * mu
    refined = PcSequence(elements, ring)
    for r, gamma in zip(plan.tail, plan.gammas):
        if ring.valuation(refined[r] - seq[r]) != gamma:
            raise PostconditionViolation("v(b_rho - a_rho) differs from gamma_rho")
    for data in plan.datas:
        _finish_target(data, plan, refined)
    if not equivalent(seq, refined, plan.limit):
        raise PostconditionViolation("refined sequence is not equivalent to the input")
    mode = None
    if plan.state is not None:
        mode = plan.state.to_json(plan.state.ladder(refined, plan))
    return RefinementReport(seq, refined, plan.limit, plan.tail[0], plan.gammas, plan.thetas,
                            plan.ds, mus, residues, plan.datas, width_threshold(seq), mode)


def refine_witt(seq, a, targets, main_polynomial=None, budget=DEFAULT_BUDGET):
    """The Witt-case refinement: candidates sweep del-coordinates, tests use g_m^D."""
    if not isinstance(seq, PcSequence):
        seq = PcSequence(seq)
    ring = seq.ring
    if ring.name != "witt":
        raise NotWittBackend("refine_witt needs a Witt backend")
    G = coerce_polynomial(main_polynomial, ring) if main_polynomial is not None else None
    polys = list(targets)
    if G is not None:
        polys += [T for T in _lambda_targets(main_polynomial, G.order() or 0, ring.p)
                  if isinstance(T, SigmaPolynomial)]
    n = _order_of(polys + ([G] if G is not None else []))
    mode_maps = _witt_part_transforms(G, a, ring, n) if G is not None else None
    plan = _make_plan(seq, a, ring, polys, lambda P: _witt_maps(P, a, ring, n), G, mode_maps,
                      _label(main_polynomial))
    if ring.N - max(plan.gammas) <= n:
        raise PrecisionExhausted("precision too small for the del-coordinates of d_rho")

    zero = ring.residue_field.zero()
    mus, residues = [], []
    for r, d in zip(plan.tail, plan.ds):
        chosen = None
        for combo in _witt_candidates(ring, n, budget):
            if combo[0].is_zero():
                continue
            mu = ring.element(combo + [zero] * (ring.N - n - 1))
            z = mu + d
            if z.components[0].is_zero():
                continue
            if plan.datas:
                dels_z = del_components(z, n)
                if not all(_valuation_is_zero(ring, _evaluate_on_dels(vm.form, dels_z, ring))
                           for data in plan.datas for vm in data.maps):
                    continue
            if plan.state is not None:
                dels_mu = del_components(mu, n)
                values = [_evaluate_on_dels(vm.form, dels_mu, ring) for vm in plan.state.maps]
                if not plan.state.accepts(r, values, ring):
                    continue
            chosen = (mu, combo)
            break
        if chosen is None:
            raise CandidateExhausted(f"no admissible mu at index {r} within {budget} candidates")
        mus.append(chosen[0])
        residues.append("(" + ",".join(str(c) for c in chosen[1]) + ")")
    return _assemble(plan, mus, residues)


def refine(seq, a, targets, main_polynomial=None, budget=DEFAULT_BUDGET):
    """Dispatch on the backend."""
    if not isinstance(seq, PcSequence):
        seq = PcSequence(seq)
    if seq.ring.name == "witt":
        return refine_witt(seq, a, targets, main_polynomial, budget)
    return refine_basic(seq, a, targets, main_polynomial, budget)


# ---------------------------------------------------------------------------
# Pipeline into the Hensel solver.

@dataclass
class ConfigurationCheck:
    in_configuration: bool
    gamma: int
    exceeds_tail: bool
    report: object

    def to_json(self):
        return {"in_configuration": self.in_configuration, "gamma": self.gamma,
                "exceeds_tail": self.exceeds_tail, "report": self.report.to_json()}


def configuration_check(report, G):
    """After a refinement towards G(b_rho) -> 0: is (G, a) configured with gamma above the tail?"""
    ring = report.refined.ring
    conf = hensel_configuration(coerce_polynomial(G, ring), report.limit, ring)
    ok = conf.kind == CONFIGURATION
    exceeds = ok and all(conf.gamma > g for g in report.gammas)
    return ConfigurationCheck(ok, conf.gamma, exceeds, conf)


def refine_and_solve(seq, a, G, targets=(), budget=DEFAULT_BUDGET):
    """Refine towards G(b_rho) -> 0, confirm configuration, then solve G from a."""
    report = refine(seq, a, targets, main_polynomial=G, budget=budget)
    check = configuration_check(report, G)
    if not check.exceeds_tail:
        raise InconclusiveTail("configuration gamma does not exceed the tail values")
    root, trace = solve(G, a)
    limit = pseudolimit_check(report.refined, root)
    original = pseudolimit_check(seq if isinstance(seq, PcSequence) else PcSequence(seq), root)
    return {"report": report, "check": check, "root": root, "trace": trace,
            "root_is_limit": limit.is_limit and original.is_limit}


__all__ = [
    "PcSequence", "PcCheck", "LimitCheck", "RefinementReport", "TargetData", "ValueMap",
    "check_pc", "width_threshold", "pseudolimit_check", "equivalent", "tail_ordering",
    "refine_basic", "refine_witt", "refine", "configuration_check", "refine_and_solve",
    "MultiIndex",
]
