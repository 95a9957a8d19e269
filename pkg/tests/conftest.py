import random
import sys
from fractions import Fraction

import pytest
import sympy

from valdiff.hahn_series import HahnRing
from valdiff.residue_fields import (FiniteFieldTower, FqElement, QPoly, RationalShiftField,
                                    RatShiftElement, fq_generator)
from valdiff.witt_vectors import WittRing

S = sympy.Symbol("s")


def random_fq(rng, p, m):
    return FqElement(p, m, tuple(rng.randrange(p) for _ in range(m)))


def random_qpoly(rng, degree, height=3):
    return QPoly([Fraction(rng.randint(-height, height), rng.randint(1, 2)) for _ in range(degree + 1)])


def random_ratshift(rng, degree=2):
    num = random_qpoly(rng, rng.randint(0, degree))
    while True:
        den = random_qpoly(rng, rng.randint(0, 1))
        if not den.is_zero():
            return RatShiftElement(num, den)


def qpoly_to_sympy(f):
    return sum(sympy.Rational(c.numerator, c.denominator) * S ** i for i, c in enumerate(f.c))


def ratshift_to_sympy(x):
    return qpoly_to_sympy(x.num) / qpoly_to_sympy(x.den)


def random_witt(rng, ring, level=None):
    level = level or 2
    return ring.element([random_fq(rng, ring.p, level) for _ in range(ring.N)])


def random_hahn(rng, ring, v0_range=(-2, 3), nonzero=False):
    field = ring.residue_field
    v0 = rng.randint(*v0_range)
    coeffs = []
    for _ in range(ring.N):
        if isinstance(field, FiniteFieldTower):
            coeffs.append(random_fq(rng, field.p, 2))
        else:
            coeffs.append(random_ratshift(rng, 1))
    if nonzero and coeffs[0].is_zero():
        coeffs[0] = field.one()
    return ring.element(coeffs, v0)


@pytest.fixture
def rng():
    return random.Random(20240611)


@pytest.fixture
def f4_witt6():
    return WittRing(2, 6, FiniteFieldTower(2))


@pytest.fixture
def hahn_ratshift():
    return HahnRing(RationalShiftField(), 6)


@pytest.fixture
def hahn_f4():
    return HahnRing(FiniteFieldTower(2), 6)


@pytest.fixture
def omega():
    return fq_generator(2, 2)


def pytest_terminal_summary(terminalreporter):
    module = sys.modules.get("test_acceptance")
    if module is None or not module.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in module.summary_lines():
        terminalreporter.write_line(line)
