import pytest

from valdiff.errors import (AxiomThreeFailure, CandidateExhausted, InconclusiveTail,
                            NotWittBackend, PrecisionExhausted, UsageError)
from valdiff.hahn_series import HahnRing, hahn_inv
from valdiff.pseudo_convergence import (PcSequence, _witt_candidates, check_pc,
                                        configuration_check, equivalent, pseudolimit_check,
                                        refine, refine_and_solve, refine_basic, refine_witt,
                                        tail_ordering, width_threshold)
from valdiff.residue_fields import FiniteFieldTower, RationalShiftField, RatShiftElement
from valdiff.sigma_polynomials import SigmaPolynomial, evaluate
from valdiff.witt_vectors import WittRing, d_transform_of_form, witt_from_integer

from pc_fixtures import (hahn_fixture, hahn_pipeline_fixture, witt_fixture,
                         witt_pipeline_fixture)

X = SigmaPolynomial.x


def geometric(ring, L=6):
    return PcSequence([ring.element([1] * (r + 1), 0) for r in range(L)], ring)


@pytest.fixture
def hahn_q():
    return HahnRing(RationalShiftField(), 10)


# -- detection

def test_geometric_partial_sums(hahn_q):
    check = check_pc(geometric(hahn_q))
    assert check.is_pc and check.rho0 == 0
    assert check.gammas == [1, 2, 3, 4, 5]
    assert width_threshold(geometric(hahn_q)) == 6


def test_constant_tail_is_not_pc(hahn_q):
    t = hahn_q.t()
    seq = PcSequence([hahn_q.one(), hahn_q.one() + t, hahn_q.one() + t, hahn_q.one() + t], hahn_q)
    assert not check_pc(seq).is_pc
    assert width_threshold(seq) is None


def test_late_start_detected(hahn_q):
    t = hahn_q.t()
    elems = [hahn_q.zero(), t ** 3, t, t + t ** 2, t + t ** 2 + t ** 4]
    check = check_pc(PcSequence(elems, hahn_q))
    # steps are 3, 1, 2, 4: the first step breaks the increase
    assert check.is_pc and check.rho0 == 1 and check.gammas == [1, 2, 4]


@pytest.mark.parametrize("p", [2, 3])
def test_witt_integer_sums(p):
    R = WittRing(p, 8, FiniteFieldTower(p))
    seq = PcSequence([witt_from_integer(sum(p ** i for i in range(r + 1)), R) for r in range(6)], R)
    check = check_pc(seq)
    assert check.is_pc and check.gammas == [r + 1 for r in range(5)]
    # sum of p^i tends to -1/(p-1)
    limit = witt_from_integer(-1, R) if p == 2 else None
    if limit is not None:
        assert pseudolimit_check(seq, limit).ladder == [r + 1 for r in range(6)]


def test_short_sequence_rejected(hahn_q):
    with pytest.raises(UsageError):
        PcSequence([hahn_q.one(), hahn_q.t()], hahn_q)


def test_zero_difference_at_precision(hahn_q):
    # t^2 known only below t^5 agrees with t^2 + t^7 as far as anything is known
    coarse = hahn_q.element([1], 2, prec=5)
    seq = PcSequence([hahn_q.zero(), coarse, hahn_q.t(2) + hahn_q.t(7)], hahn_q)
    with pytest.raises(PrecisionExhausted):
        check_pc(seq)


# -- pseudolimits and equivalence

def test_geometric_limit(hahn_q):
    seq = geometric(hahn_q)
    a = hahn_inv(hahn_q.one() - hahn_q.t())
    result = pseudolimit_check(seq, a)
    assert result.is_limit and result.ladder == [1, 2, 3, 4, 5, 6]


def test_member_is_not_limit(hahn_q):
    seq = geometric(hahn_q)
    assert not pseudolimit_check(seq, seq[len(seq) - 1]).is_limit


def test_width_law(hahn_q):
    seq = geometric(hahn_q)
    a = hahn_inv(hahn_q.one() - hahn_q.t())
    threshold = width_threshold(seq)
    for extra in range(threshold, threshold + 3):
        b = a + hahn_q.t(extra) * hahn_q.lift(RatShiftElement.s())
        assert hahn_q.valuation(a - b) >= threshold
        assert pseudolimit_check(seq, b).is_limit


def test_equivalence_examples(hahn_q):
    seq = geometric(hahn_q)
    a = hahn_inv(hahn_q.one() - hahn_q.t())
    assert equivalent(seq, seq, a)
    faster = PcSequence([hahn_q.element([1] * (2 * r + 1), 0) for r in range(6)], hahn_q)
    assert not equivalent(seq, faster, a)


# -- tail ordering

def test_tail_ordering():
    assert tail_ordering([(1, 3), (2, 0)], [1, 2, 5, 6, 7], "hahn") == (2, 0)
    # gamma + 1 and 2 gamma touch at gamma = 1; the suffix after it is ordered
    start, idx = tail_ordering([(1, 1), (2, 0)], [1, 2, 3, 4], "hahn")
    assert (start, idx) == (1, 0)
    # on Witt the gap must exceed 1
    start, _ = tail_ordering([(1, 1), (2, 0)], [1, 2, 3, 4, 5], "witt")
    assert start == 2
    with pytest.raises(InconclusiveTail):
        tail_ordering([(1, 3), (2, 0)], [1, 2, 3, 4], "hahn")


# -- refinement

def test_refine_identity_target():
    seq, a, _ = hahn_fixture(0)
    report = refine_basic(seq, a, [X(0)])
    assert report.ladders()[str(X(0))] == report.gammas
    assert equivalent(seq, report.refined, a)


def test_refine_hahn_product_target():
    seq, a, _ = hahn_fixture(0)
    report = refine_basic(seq, a, [X(0) * X(1)])
    (data,) = report.targets
    assert data.m0 == 1
    ladder = data.ladder
    assert ladder == sorted(set(ladder))
    value_at_a = evaluate(data.polynomial, a)
    ring = seq.ring
    for r, gamma, v in zip(range(report.rho0, len(seq)), report.gammas, ladder):
        assert ring.valuation(evaluate(data.polynomial, report.refined[r]) - value_at_a) == v
        assert v == data.m0 * gamma + data.offset_m0
        assert ring.valuation(report.refined[r] - seq[r]) == gamma


def test_refine_skips_constant_targets():
    seq, a, _ = hahn_fixture(0)
    report = refine_basic(seq, a, [SigmaPolynomial.constant(5), X(0)])
    assert [t.text for t in report.targets] == [str(X(0))]


def test_refine_witt_linear_difference_small():
    R = WittRing(2, 6, FiniteFieldTower(2))
    a = R.teichmuller(R.residue_field.element((0, 1)))
    seq = PcSequence([a + witt_from_integer(2 ** (r + 1), R) for r in range(4)], R)
    report = refine_witt(seq, a, [X(1) - X(0)])
    (data,) = report.targets
    assert data.ladder == sorted(set(data.ladder))
    assert equivalent(seq, report.refined, a)


def test_refine_witt_deterministic():
    seq, a, targets = witt_fixture(0)
    first = refine_witt(seq, a, targets).to_json()
    second = refine_witt(seq, a, targets).to_json()
    assert first == second


def test_witt_candidates_sweep_levels():
    R = WittRing(2, 6, FiniteFieldTower(2, tower_bound=2))
    combos = list(_witt_candidates(R, 1, 10 ** 6))
    levels = [max(c.m for c in combo) for combo in combos]
    assert levels == sorted(levels)
    assert levels.count(1) == 4
    # F_4 x F_4 minus the tuples lying in F_2 x F_2
    assert levels.count(2) == 16 - 4
    keys = {tuple(c.embed(2).coords for c in combo) for combo in combos}
    assert len(keys) == len(combos) == 16


def test_d_transformed_form_has_unit_coefficient():
    seq, a, targets = witt_fixture(1)
    report = refine_witt(seq, a, targets)
    for data in report.targets:
        for vm in data.maps:
            assert any(seq.ring.valuation(c) == 0 for c in vm.form.coefficients())
            assert any(c == seq.ring.one() for c in vm.form.coefficients())
            assert vm.offset >= vm.scale_valuation


def test_d_transform_matches_raw_form():
    # x_0 x_1 after D: y_0 (y_0^2 + 2 y_1), whose minimal coefficient is already a unit
    T = d_transform_of_form(X(0) * X(1), 2)
    assert T == X(0) ** 3 + X(0) * X(1) * 2


def test_refine_witt_rejects_hahn():
    seq, a, targets = hahn_fixture(0)
    with pytest.raises(NotWittBackend):
        refine_witt(seq, a, targets)


def test_refine_basic_axiom_three_on_finite_residue():
    seq, a, targets = witt_fixture(0)
    with pytest.raises(AxiomThreeFailure):
        refine_basic(seq, a, targets)


def test_candidate_budget():
    seq, a, targets = witt_fixture(1)
    with pytest.raises(CandidateExhausted):
        refine_witt(seq, a, targets, budget=1)


def test_report_json_schema():
    seq, a, targets = hahn_fixture(3)
    data = refine(seq, a, targets).to_json()
    assert {"gammas", "threshold", "m0", "l_m0", "ladders"} <= set(data)
    assert set(data["ladders"]) == {str(T) for T in targets}


# -- mode and the pipeline into the solver

def test_mode_drives_value_up():
    seq, a, G = hahn_pipeline_fixture(0)
    report = refine_basic(seq, a, [], main_polynomial=G)
    ladder = report.mode["vG_b"]
    assert ladder == sorted(set(ladder))
    assert report.mode["collisions"]


def test_pipeline_hahn():
    seq, a, G = hahn_pipeline_fixture(0)
    out = refine_and_solve(seq, a, G)
    assert out["check"].in_configuration and out["check"].gamma == 9
    assert out["check"].exceeds_tail
    assert out["root_is_limit"]
    assert out["root"] == seq.ring.element([RatShiftElement.s()], 1)


def test_pipeline_witt():
    seq, a, G = witt_pipeline_fixture(1)
    out = refine_and_solve(seq, a, G)
    assert out["check"].gamma == 11
    assert out["root_is_limit"]
    root = out["root"]
    assert root.ring.valuation(root - a) == 11


def test_configuration_check_without_mode():
    seq, a, _ = hahn_pipeline_fixture(1)
    report = refine_basic(seq, a, [X(0)])
    check = configuration_check(report, X(1) - X(0))
    assert check.in_configuration
