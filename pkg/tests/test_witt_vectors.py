from math import comb

import pytest
import sympy
from hypothesis import given, settings, strategies as st

from valdiff.errors import (MixedContext, NotDivisible, NotHomogeneous, PrecisionExhausted,
                            ZeroArgument)
from valdiff.residue_fields import FiniteFieldTower
from valdiff.sigma_polynomials import SigmaPolynomial
from valdiff.witt_vectors import (WittRing, binom_over_p, d_transform, d_transform_of_form,
                                  del_components, ghost_polynomial_value, teichmuller, witt_ac,
                                  witt_add, witt_cross_section, witt_div_p, witt_frobenius,
                                  witt_from_integer, witt_from_json, witt_mul, witt_neg, witt_pi,
                                  witt_structure_polys, witt_valuation)

from conftest import random_fq, random_witt


def teichmuller_digits(m, p, N):
    """Components of m in W_N(F_p) = Z/p^N: m = sum p^i tau(a_i) with tau the Teichmuller lift."""
    mod = p ** N
    x = m % mod
    digits = []
    for i in range(N):
        a = x % p
        tau = pow(a, p ** N, mod)
        digits.append(a)
        x = ((x - tau) % mod) // p
        mod //= p
    return digits


def components_as_ints(x):
    return [c.coords[0] if c.m == 1 else None for c in x.components]


def witt_fp(p, N):
    return WittRing(p, N, FiniteFieldTower(p))


# -- the Z/p^N oracle

@pytest.mark.parametrize("p,N", [(2, 3), (2, 6), (3, 4), (5, 3)])
def test_from_integer_matches_teichmuller_digits(p, N):
    R = witt_fp(p, N)
    for m in range(p ** N):
        assert components_as_ints(witt_from_integer(m, R)) == teichmuller_digits(m, p, N)


@pytest.mark.parametrize("p,N", [(2, 6), (3, 5), (5, 4)])
def test_oracle_equivalence(p, N, rng):
    R = witt_fp(p, N)
    mod = p ** N
    cache = {}

    def image(m):
        if m not in cache:
            cache[m] = witt_from_integer(m, R)
        return cache[m]

    for _ in range(300):
        a, b = rng.randrange(mod), rng.randrange(mod)
        assert witt_add(image(a), image(b)) == image((a + b) % mod)
        assert witt_mul(image(a), image(b)) == image((a * b) % mod)


def test_from_integer_bijective():
    R = witt_fp(3, 3)
    images = {tuple(components_as_ints(witt_from_integer(m, R))) for m in range(27)}
    assert len(images) == 27


def test_integer_examples():
    R = witt_fp(2, 3)
    assert witt_from_integer(1, R) + witt_from_integer(1, R) == R.element([0, 1, 0])
    assert witt_from_integer(3, R) * witt_from_integer(3, R) == witt_from_integer(1, R)
    assert witt_from_integer(0, R).is_zero()
    assert witt_from_integer(8, R).is_zero()
    R5 = witt_fp(5, 4)
    assert witt_from_integer(5, R5) == R5.element([0, 1, 0, 0])
    assert witt_valuation(witt_from_integer(25, R5)) == 2


# -- structure polynomials: symbolic recursion done independently in sympy

def _sympy_structure(p, n):
    ys = sympy.symbols(f"y0:{n + 1}")
    zs = sympy.symbols(f"z0:{n + 1}")

    def W(xs, k):
        return sum(p ** i * xs[i] ** (p ** (k - i)) for i in range(k + 1))

    S, P = [], []
    for k in range(n + 1):
        for out, combined in ((S, W(ys, k) + W(zs, k)), (P, W(ys, k) * W(zs, k))):
            rest = sum(p ** i * out[i] ** (p ** (k - i)) for i in range(k))
            out.append(sympy.expand((combined - rest) / p ** k))
    return ys, zs, S, P


def test_first_sum_polynomial_p2():
    ys, zs, S, _ = _sympy_structure(2, 1)
    y0, y1 = ys
    z0, z1 = zs
    assert sympy.expand(S[1] - (y1 + z1 - y0 * z0)) == 0
    ours = witt_structure_polys(2, 1)
    assert ours.sums[1] == {(0, 1, 0, 0): 1, (0, 0, 0, 1): 1, (1, 0, 1, 0): -1}
    assert ours.sums[0] == {(1, 0, 0, 0): 1, (0, 0, 1, 0): 1}


@pytest.mark.parametrize("p", [2, 3, 5, 7])
def test_first_sum_polynomial_correction_term(p):
    S1 = witt_structure_polys(p, 1).sums[1]
    for i in range(1, p):
        assert S1[(i, 0, p - i, 0)] == -binom_over_p(p, i) == -(comb(p, i) // p)


@pytest.mark.parametrize("p,n", [(2, 3), (3, 2)])
def test_structure_polys_match_independent_expansion(p, n, rng):
    ys, zs, S, P = _sympy_structure(p, n)
    ours = witt_structure_polys(p, n)
    for _ in range(20):
        y = [rng.randint(-5, 5) for _ in range(n + 1)]
        z = [rng.randint(-5, 5) for _ in range(n + 1)]
        subs = dict(zip(ys + zs, y + z))
        for k in range(n + 1):
            assert ours.evaluate("S", k, y, z) == S[k].subs(subs)
            assert ours.evaluate("P", k, y, z) == P[k].subs(subs)


@pytest.mark.parametrize("p,n", [(2, 4), (3, 3), (5, 2)])
def test_structure_polys_defining_identities(p, n, rng):
    polys = witt_structure_polys(p, n)
    for _ in range(30):
        y = [rng.randint(-20, 20) for _ in range(n + 1)]
        z = [rng.randint(-20, 20) for _ in range(n + 1)]
        s = [polys.evaluate("S", k, y, z) for k in range(n + 1)]
        q = [polys.evaluate("P", k, y, z) for k in range(n + 1)]
        for k in range(n + 1):
            wy, wz = ghost_polynomial_value(y, p, k), ghost_polynomial_value(z, p, k)
            assert wy + wz == ghost_polynomial_value(s, p, k)
            assert wy * wz == ghost_polynomial_value(q, p, k)


def test_ghost_route_agrees_with_structure_polynomials(rng):
    """Ring operations (ghost recursion over lifts) against S/P evaluated in the residue field."""
    R = WittRing(2, 4, FiniteFieldTower(2))
    polys = witt_structure_polys(2, 3)
    one = R.residue_field.one(2)
    for _ in range(20):
        a, b = random_witt(rng, R), random_witt(rng, R)
        ya, yb = a.components, b.components
        assert list((a + b).components) == [polys.evaluate("S", k, ya, yb, one) for k in range(4)]
        assert list((a * b).components) == [polys.evaluate("P", k, ya, yb, one) for k in range(4)]


# -- ring structure over F_4

def test_ring_laws(rng, f4_witt6):
    R = f4_witt6
    for _ in range(40):
        a, b, c = (random_witt(rng, R) for _ in range(3))
        assert (a + b) + c == a + (b + c)
        assert a * (b + c) == a * b + a * c
        assert (a * b) * c == a * (b * c)
        assert a + b == b + a and a * b == b * a
        assert witt_add(a, witt_neg(a)).is_zero()
        assert a * R.one() == a
        assert a + R.zero() == a


def test_teichmuller_multiplicativity(rng):
    R = WittRing(3, 3, FiniteFieldTower(3))
    for _ in range(20):
        x, y = random_fq(rng, 3, 2), random_fq(rng, 3, 2)
        assert R.teichmuller(x) * R.teichmuller(y) == R.teichmuller(x * y)
        assert all(c.is_zero() for c in teichmuller(x, R).components[1:])


def test_mixed_context_rejected():
    a = witt_fp(2, 3).one()
    b = witt_fp(2, 4).one()
    with pytest.raises(MixedContext):
        witt_add(a, b)
    with pytest.raises(MixedContext):
        witt_mul(a, witt_fp(3, 3).one())


# -- frobenius, valuation, pi, ac, cross-section

def test_frobenius(rng, f4_witt6):
    R3 = witt_fp(3, 4)
    x = witt_from_integer(17, R3)
    assert witt_frobenius(x) == x
    for _ in range(20):
        a, b = random_witt(rng, f4_witt6), random_witt(rng, f4_witt6)
        assert witt_frobenius(a + b) == witt_frobenius(a) + witt_frobenius(b)
        assert witt_frobenius(a * b) == witt_frobenius(a) * witt_frobenius(b)
        assert witt_valuation(witt_frobenius(a) - a ** 2) is None or \
            witt_valuation(witt_frobenius(a) - a ** 2) >= 1
        assert witt_frobenius(a).sigma_inverse() == a


def test_valuation_examples(f4_witt6):
    R = f4_witt6
    assert witt_valuation(R.one()) == 0
    assert witt_valuation(R.zero()) is None
    assert witt_valuation(witt_from_integer(4, R)) == 2


def test_div_p(omega):
    R = witt_fp(2, 5)
    q = witt_div_p(witt_from_integer(2, R))
    assert q.N == 4 and q == witt_from_integer(1, witt_fp(2, 4))
    F = FiniteFieldTower(2)
    R4 = WittRing(2, 4, F)
    z = R4.element([0, omega, 0, 0])
    d = witt_div_p(z)
    assert d.components[0] ** 2 == omega
    assert d.times_p() == z
    with pytest.raises(NotDivisible):
        witt_div_p(R4.one())


def test_pi_ac_cross_section(rng, f4_witt6):
    R = f4_witt6
    p = witt_from_integer(2, R)
    assert witt_ac(p) == 1
    for _ in range(20):
        u = random_witt(rng, R)
        if u.components[0].is_zero():
            continue
        assert witt_ac(u) == witt_pi(u)
        assert witt_ac(p * u) == witt_pi(u)
        v = random_witt(rng, R)
        if witt_valuation(v) is None or witt_valuation(u * v) is None:
            continue
        assert witt_ac(u * v) == witt_ac(u) * witt_ac(v)
        assert witt_ac(v.sigma()) == witt_ac(v).frobenius()
    with pytest.raises(ZeroArgument):
        witt_ac(R.zero())
    for g1 in range(3):
        for g2 in range(3):
            c = witt_cross_section(g1 + g2, R)
            assert witt_valuation(c) == g1 + g2
            assert c == witt_cross_section(g1, R) * witt_cross_section(g2, R)
            assert c.sigma() == c


# -- del operators and the D-transform

def _del_one(a):
    return del_components(a, 1)[1]


def test_del_ring_axioms(rng):
    R = WittRing(2, 5, FiniteFieldTower(2))
    R4 = R.with_precision(4)
    assert _del_one(R.one()).is_zero()
    for _ in range(60):
        a, b = random_witt(rng, R), random_witt(rng, R)
        da, db = _del_one(a), _del_one(b)
        at, bt = a.truncate(4), b.truncate(4)
        correction = sum((binom_over_p(2, i) * at ** i * bt ** (2 - i) for i in range(1, 2)), R4.zero())
        assert _del_one(a + b) == da + db - correction
        assert _del_one(a * b) == at ** 2 * db + bt ** 2 * da + 2 * da * db


def test_del_components_precision_and_first_values(rng, f4_witt6):
    a = random_witt(rng, f4_witt6)
    dels = del_components(a, 3)
    assert [d.N for d in dels] == [6, 5, 4, 3]
    assert dels[0] == a
    expected = witt_div_p(a.sigma() - a ** 2)
    assert dels[1] == expected
    with pytest.raises(PrecisionExhausted):
        del_components(a, 6)


@pytest.mark.parametrize("n", [1, 2, 3])
def test_sigma_powers_from_dels(n, rng, f4_witt6):
    for _ in range(15):
        a = random_witt(rng, f4_witt6)
        dels = del_components(a, n)
        target = a
        for _ in range(n):
            target = target.sigma()
        D = d_transform(dels, 2)
        assert D[n] == target.truncate(D[n].N)
        assert D[n].N >= f4_witt6.N - n


def test_del_realises_integer_digits():
    """Over F_p with sigma = id the reduced dels give the W(F_p) vector of the integer."""
    p, N = 3, 4
    R = witt_fp(p, N)
    for m in [0, 1, 5, 26, 40, 80]:
        a = witt_from_integer(m, R)
        dels = del_components(a, N - 1)
        assert [d.components[0] for d in dels] == list(a.components)


def test_d_transform_examples(rng):
    R = WittRing(3, 6, FiniteFieldTower(3))
    a = random_witt(rng, R)
    assert d_transform([a]) == [a]
    dels = del_components(a, 1)
    D = d_transform(dels)
    assert D[0] == a and D[1] == a.sigma()
    y0 = R.teichmuller(random_fq(rng, 3, 2))
    D = d_transform([y0, R.zero(), R.zero()])
    assert D[1] == y0 ** 3 and D[2] == y0 ** 9


def test_d_transform_of_form_examples():
    x0 = SigmaPolynomial.x(0)
    x1 = SigmaPolynomial.x(1)
    assert d_transform_of_form(x0, 2) == x0
    assert d_transform_of_form(x1, 2) == x0 ** 2 + 2 * x1
    with pytest.raises(NotHomogeneous):
        d_transform_of_form(x0 + x1 ** 2, 2)


def _random_form(rng, m, n):
    from valdiff.sigma_polynomials import multi_indices_of_weight
    terms = {}
    for idx in multi_indices_of_weight(m, n):
        if rng.random() < 0.5:
            terms[idx] = rng.randint(-3, 3)
    if not any(terms.values()):
        terms[multi_indices_of_weight(m, n)[0]] = 1
    return SigmaPolynomial(terms)


def test_d_transform_of_form_bounds_and_linearity(rng):
    for _ in range(50):
        p = rng.choice([2, 3])
        m, n = rng.randint(1, 2), rng.randint(0, 2)
        F = _random_form(rng, m, n)
        T = d_transform_of_form(F, p)
        assert T.constant_term() == 0
        assert T.degree() <= m * p ** n
        G = _random_form(rng, m, n)
        a, b = rng.randint(-3, 3), rng.randint(-3, 3)
        combo = F * a + G * b
        if not combo.is_zero():
            assert d_transform_of_form(combo, p) == d_transform_of_form(F, p) * a + d_transform_of_form(G, p) * b


def test_d_transform_of_form_evaluates_to_composition(rng):
    """F(D(y)) computed symbolically agrees with F evaluated at the numbers D(y)."""
    from valdiff.sigma_polynomials import evaluate_at
    for _ in range(30):
        p = rng.choice([2, 3])
        m, n = rng.randint(1, 3), rng.randint(0, 2)
        F = _random_form(rng, m, n)
        y = [rng.randint(-4, 4) for _ in range(n + 1)]
        D = [ghost_polynomial_value(y, p, k) for k in range(n + 1)]
        assert evaluate_at(d_transform_of_form(F, p), y, 0) == evaluate_at(F, D, 0)


def test_json_round_trip(rng, f4_witt6):
    a = random_witt(rng, f4_witt6)
    data = a.to_json()
    assert set(data) == {"p", "N", "k", "components"}
    assert witt_from_json(data) == a


@given(st.integers(0, 2 ** 12 - 1), st.integers(0, 2 ** 12 - 1))
@settings(max_examples=50, deadline=None)
def test_subtraction_matches_integers(a, b):
    R = witt_fp(2, 12)
    assert witt_from_integer(a, R) - witt_from_integer(b, R) == witt_from_integer((a - b) % 2 ** 12, R)


def test_ghost_evaluation_matches_ring_operations(rng, f4_witt6):
    from test_sigma_polynomials import random_sparse
    from valdiff.sigma_polynomials import evaluate
    for _ in range(20):
        F = random_sparse(rng, order=2, degree=3)
        a = random_witt(rng, f4_witt6)
        iterates = [a, a.sigma(), a.sigma().sigma()]
        expected = f4_witt6.zero()
        for idx, c in F.terms.items():
            term = witt_from_integer(c, f4_witt6)
            for k, e in enumerate(idx):
                for _ in range(e):
                    term = term * iterates[k]
            expected = expected + term
        assert evaluate(F, a) == expected
