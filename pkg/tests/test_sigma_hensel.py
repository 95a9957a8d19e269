import pytest

from valdiff.errors import CoefficientNotIntegral, ExactRootAlready, NotApplicable
from valdiff.hahn_series import HahnRing
from valdiff.residue_fields import FiniteFieldTower, RatShiftElement
from valdiff.sigma_hensel import (CONFIGURATION, EXACT_ROOT, HENSELIAN_AT, NOT_APPLICABLE,
                                  ScaledWitt, hensel_configuration, is_sigma_henselian_at,
                                  newton_step, rescale, solve)
from valdiff.sigma_polynomials import SigmaPolynomial, evaluate
from valdiff.witt_vectors import WittRing, witt_from_integer

from conftest import random_fq, random_hahn

X = SigmaPolynomial.x
LINEAR_DIFFERENCE = X(1) - X(0)
FROBENIUS_DIFFERENCE = X(1) - X(0) ** 2


@pytest.fixture
def w4():
    return WittRing(2, 4, FiniteFieldTower(2))


def _in_prime_field(x):
    return all(c == c.frobenius() for c in x.components)


# -- detection

def test_linear_difference_is_henselian(w4, omega):
    a = w4.element([1, omega, 0, 0])
    report = is_sigma_henselian_at(LINEAR_DIFFERENCE, a)
    assert report.kind == HENSELIAN_AT
    assert report.witness_valuations == {(1, 0): 0, (0, 1): 0}
    assert report.argmin_index == (0, 1)
    assert report.value_at_start == 1


def test_frobenius_difference_is_henselian(rng, f4_witt6):
    for _ in range(10):
        a = f4_witt6.element([random_fq(rng, 2, 2) for _ in range(6)])
        report = is_sigma_henselian_at(FROBENIUS_DIFFERENCE, a)
        # sigma lifts Frobenius, so v(G(a)) >= 1 is automatic
        assert report.kind in (HENSELIAN_AT, EXACT_ROOT)
        if report.kind == HENSELIAN_AT:
            assert report.witness_valuations[(0, 1)] == 0
            assert report.witness_valuations[(1, 0)] >= 1


def test_exact_root_detected(w4):
    assert is_sigma_henselian_at(LINEAR_DIFFERENCE, w4.one()).kind == EXACT_ROOT
    assert hensel_configuration(LINEAR_DIFFERENCE, w4.one()).kind == EXACT_ROOT


def test_non_integral_coefficient_rejected(hahn_f4):
    G = X(0) * hahn_f4.t(-1)
    with pytest.raises(CoefficientNotIntegral):
        is_sigma_henselian_at(G, hahn_f4.one())


# -- configuration

def test_henselian_implies_configuration(rng, w4, omega):
    starts = [w4.element([1, omega, 0, 0]), w4.element([omega, omega, 1, 0])]
    for a in starts:
        for G in (LINEAR_DIFFERENCE, FROBENIUS_DIFFERENCE):
            h = is_sigma_henselian_at(G, a)
            if h.kind != HENSELIAN_AT:
                continue
            c = hensel_configuration(G, a)
            assert c.kind == CONFIGURATION and c.gamma == h.value_at_start


def test_configuration_gamma_for_linear_difference(hahn_ratshift):
    s = RatShiftElement.s()
    a = hahn_ratshift.element([s], 3)
    report = hensel_configuration(LINEAR_DIFFERENCE, a)
    assert report.kind == CONFIGURATION and report.gamma == 3


def test_configuration_rejects_zero_gamma(w4, omega):
    G = X(1) - X(0) + X(0) ** 2
    a = w4.teichmuller(omega)
    report = hensel_configuration(G, a)
    # v(G(a)) = 0 = min linear valuation, so gamma = 0 and 0 < 0 + 2*0 fails
    assert report.kind == NOT_APPLICABLE
    assert report.witness_valuations[(2, 0)] == 0
    with pytest.raises(NotApplicable):
        solve(G, a)
    at_p = hensel_configuration(G, witt_from_integer(2, w4))
    assert at_p.kind == CONFIGURATION and at_p.gamma == 2


def test_configuration_inequality_holds(rng, hahn_f4):
    for _ in range(40):
        G = (X(1) - X(0)) * hahn_f4.t(rng.randint(0, 2)) + X(0) ** 2 * hahn_f4.t(rng.randint(0, 3)) \
            + hahn_f4.t(rng.randint(1, 5))
        a = random_hahn(rng, hahn_f4, v0_range=(0, 2))
        report = hensel_configuration(G, a)
        if report.kind != CONFIGURATION:
            continue
        lin = min(report.witness_valuations[k] for k in [(1, 0), (0, 1)]
                  if report.witness_valuations.get(k) is not None)
        assert report.value_at_start == lin + report.gamma
        for idx, v in report.witness_valuations.items():
            if sum(idx) > 1 and v is not None:
                assert report.value_at_start < v + sum(idx) * report.gamma


# -- rescale

def test_rescale_hahn(hahn_ratshift):
    R = hahn_ratshift
    s = RatShiftElement.s()
    G = LINEAR_DIFFERENCE * R.t() - R.t(3)
    a = R.element([s], 1)
    H, alpha, c = rescale(G, a)
    assert c == R.t(1)
    assert evaluate(H, alpha) == R.one()
    assert c * alpha == a


def test_rescale_witt_leaves_valuation_ring():
    R = WittRing(2, 6, FiniteFieldTower(2))
    G = LINEAR_DIFFERENCE * 2 - 8
    a = R.one()
    H, alpha, c = rescale(G, a)
    assert isinstance(alpha, ScaledWitt) and alpha.valuation() == -2
    assert c.valuation() == 2
    assert c * alpha == ScaledWitt.from_witt(a)
    assert evaluate(H, alpha) == ScaledWitt.from_witt(R.one())


def test_rescale_random_configured(rng, hahn_f4):
    seen = 0
    for _ in range(60):
        G = LINEAR_DIFFERENCE * hahn_f4.t(rng.randint(0, 2)) + X(0) ** 2 + hahn_f4.t(rng.randint(1, 4))
        a = random_hahn(rng, hahn_f4, v0_range=(1, 3))
        if hensel_configuration(G, a).kind != CONFIGURATION:
            continue
        H, alpha, c = rescale(G, a)
        assert evaluate(H, alpha) == hahn_f4.one()
        assert c * alpha == a
        seen += 1
    assert seen >= 10


def test_rescale_exact_root(w4):
    with pytest.raises(ExactRootAlready):
        rescale(LINEAR_DIFFERENCE, w4.one())


# -- Newton steps

def test_newton_step_linear_difference(w4, omega):
    a = w4.element([1, omega, 0, 0])
    Ga = evaluate(LINEAR_DIFFERENCE, a)
    b, u_bar = newton_step(LINEAR_DIFFERENCE, a)
    assert w4.valuation(a - b) == 1
    assert w4.valuation(evaluate(LINEAR_DIFFERENCE, b)) > 1
    # every residue u in F_4 that improves the value is a valid step
    good = []
    for coords in [(0, 0), (1, 0), (0, 1), (1, 1)]:
        u = w4.residue_field.element(coords)
        v = w4.valuation(evaluate(LINEAR_DIFFERENCE, a + Ga * w4.lift(u)))
        if v is None or v > 1:
            good.append(u)
    assert u_bar in good


def test_newton_step_at_last_valuation(w4, omega):
    a = w4.one() + witt_from_integer(8, w4) * w4.teichmuller(omega)
    assert w4.valuation(evaluate(LINEAR_DIFFERENCE, a)) == 3
    b, _ = newton_step(LINEAR_DIFFERENCE, a)
    assert evaluate(LINEAR_DIFFERENCE, b).is_zero()


def test_newton_step_contract_random(rng, f4_witt6):
    R = f4_witt6
    checked = 0
    for _ in range(40):
        G = LINEAR_DIFFERENCE + (X(0) * X(1) * rng.randint(0, 3) + X(0) ** 2 * rng.randint(0, 3)) * 2
        a = R.element([random_fq(rng, 2, 1)] + [random_fq(rng, 2, 2) for _ in range(5)])
        if is_sigma_henselian_at(G, a).kind != HENSELIAN_AT:
            continue
        vG = R.valuation(evaluate(G, a))
        b, _ = newton_step(G, a)
        assert R.valuation(a - b) == vG
        vb = R.valuation(evaluate(G, b))
        assert vb is None or vb > vG
        assert is_sigma_henselian_at(G, b).kind in (HENSELIAN_AT, EXACT_ROOT)
        checked += 1
    assert checked >= 15


def test_teichmuller_is_exact_root_of_frobenius_difference(w4, omega):
    a = w4.teichmuller(omega)
    root, trace = solve(FROBENIUS_DIFFERENCE, a)
    assert trace.kind == EXACT_ROOT and not trace.steps and root == a


# -- solve

def test_solve_linear_difference_lands_in_fixed_field(w4, omega):
    a = w4.element([1, omega, 0, 0])
    root, trace = solve(LINEAR_DIFFERENCE, a)
    assert root.sigma() == root
    assert _in_prime_field(root)
    assert w4.residue(root) == 1
    vals = trace.valuations()
    assert vals == sorted(set(vals))
    for step, nxt in zip(trace.steps, trace.steps[1:] + [None]):
        target = nxt.a if nxt is not None else root
        assert w4.valuation(step.a - target) == step.vG


def test_solve_frobenius_difference_finds_teichmuller(w4, omega):
    beta = omega + 1
    a = w4.element([omega, beta, 0, 0])
    root, _ = solve(FROBENIUS_DIFFERENCE, a)
    assert root == w4.teichmuller(omega)


def test_solve_hahn_telescoping(hahn_ratshift):
    R = hahn_ratshift
    t = R.t()
    G = LINEAR_DIFFERENCE - t
    root, trace = solve(G, R.zero())
    s = RatShiftElement.s()
    assert root == R.element([s], 1)
    assert evaluate(G, root).is_zero()
    assert trace.valuations() == [1]


def test_solve_hahn_coefficientwise(hahn_ratshift):
    """Root of sigma(x) - x = t + t^2 matched against per-exponent telescoping sums."""
    R = hahn_ratshift
    G = LINEAR_DIFFERENCE - R.t() - R.t(2)
    root, _ = solve(G, R.zero())
    s = RatShiftElement.s()
    for k in (1, 2):
        c = root.coefficient(k)
        assert c.sigma() - c == 1
    assert root.coefficient(1) == s and root.coefficient(2) == s
    assert evaluate(G, root).is_zero()


def test_solve_is_idempotent(w4, omega):
    root, _ = solve(LINEAR_DIFFERENCE, w4.element([1, omega, 0, 0]))
    again, trace = solve(LINEAR_DIFFERENCE, root)
    assert again == root and not trace.steps


def test_solve_configuration_path(hahn_ratshift):
    R = hahn_ratshift
    s = RatShiftElement.s()
    G = LINEAR_DIFFERENCE * R.t() - R.t(3)
    a = R.element([s], 1)
    root, trace = solve(G, a)
    assert trace.kind == CONFIGURATION and trace.gamma == 1
    assert R.valuation(a - root) == 1
    v = R.valuation(evaluate(G, root))
    assert v is None or v >= R.N


def test_ordinary_hensel_lifting():
    """A sigma-free polynomial: square root of 7 in Z/3^5."""
    R = WittRing(3, 5, FiniteFieldTower(3))
    G = X(0) ** 2 - 7
    root, trace = solve(G, R.one())
    assert trace.kind == HENSELIAN_AT
    assert (root * root) == witt_from_integer(7, R)
    roots = [m for m in range(3 ** 5) if (m * m - 7) % 3 ** 5 == 0 and m % 3 == 1]
    assert root == witt_from_integer(roots[0], R)


def test_trace_json(w4, omega):
    _, trace = solve(LINEAR_DIFFERENCE, w4.element([1, omega, 0, 0]))
    data = trace.to_json()
    assert data["kind"] == HENSELIAN_AT
    assert [s["vG"] for s in data["steps"]] == trace.valuations()
    assert {"a", "vG", "u_bar"} == set(data["steps"][0])


def test_hahn_over_finite_field():
    R = HahnRing(FiniteFieldTower(2), 5)
    G = FROBENIUS_DIFFERENCE - R.t()
    root, _ = solve(G, R.zero())
    assert evaluate(G, root).is_zero()
