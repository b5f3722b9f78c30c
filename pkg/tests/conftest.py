import random

import pytest
from gmpy2 import mpq
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from hyperholo.chartcalc import Chart, form, multivec, real_chart
from hyperholo.scalars import GaussRat, Scalar

settings.register_profile("default", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

VARS4 = ("x0", "x1", "x2", "x3")

rationals = st.builds(mpq, st.integers(-6, 6), st.integers(1, 4))
gauss = st.builds(GaussRat, rationals, rationals)


@st.composite
def scalars(draw, vars=VARS4, max_terms=3, max_exp=2, complex_coeffs=True):
    n = len(vars)
    terms = {}
    for _ in range(draw(st.integers(0, max_terms))):
        exp = tuple(draw(st.integers(0, max_exp)) for _ in range(n))
        c = draw(gauss if complex_coeffs else rationals)
        terms[exp] = c
    return Scalar(vars, terms)


@st.composite
def forms(draw, chart: Chart, degree: int, max_terms=2, complex_coeffs=False):
    from itertools import combinations

    idx = list(combinations(range(chart.dim), degree))
    comps = {}
    for key in draw(st.lists(st.sampled_from(idx), max_size=3, unique=True)) if idx else []:
        comps[key] = draw(scalars(chart.vars, max_terms, 2, complex_coeffs))
    return form(chart, degree, comps)


@st.composite
def multivecs(draw, chart: Chart, degree: int, max_terms=2):
    from itertools import combinations

    idx = list(combinations(range(chart.dim), degree))
    comps = {}
    for key in draw(st.lists(st.sampled_from(idx), max_size=2, unique=True)):
        comps[key] = draw(scalars(chart.vars, max_terms, 2, False))
    return multivec(chart, degree, comps)


def random_scalar(rng: random.Random, vars, max_terms=3, max_exp=2) -> Scalar:
    terms = {}
    for _ in range(rng.randint(1, max_terms)):
        exp = tuple(rng.randint(0, max_exp) for _ in vars)
        terms[exp] = GaussRat(mpq(rng.randint(-5, 5), rng.randint(1, 3)), mpq(rng.randint(-2, 2), rng.randint(1, 2)))
    s = Scalar(vars, terms)
    return s if not s.is_zero() else Scalar.one(vars)


@pytest.fixture
def rng():
    return random.Random(20261018)


@pytest.fixture(scope="session")
def chart4():
    return real_chart(4)
