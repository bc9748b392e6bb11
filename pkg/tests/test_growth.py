import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from rescomp.core import GrowthClass, classify_growth, growth_leq
from rescomp.errors import GrowthError

CLASSES = [
    GrowthClass.constant(),
    GrowthClass.logarithmic(),
    *(GrowthClass.polynomial(d) for d in range(1, 7)),
    GrowthClass.exponential(),
]


def test_classes_are_ordered():
    for smaller, larger in zip(CLASSES, CLASSES[1:]):
        assert growth_leq(smaller, larger)
        assert not growth_leq(larger, smaller)


@given(st.sampled_from(CLASSES), st.sampled_from(CLASSES), st.sampled_from(CLASSES))
def test_growth_leq_is_a_total_preorder(f, g, h):
    assert growth_leq(f, f)
    assert growth_leq(f, g) or growth_leq(g, f)
    if growth_leq(f, g) and growth_leq(g, h):
        assert growth_leq(f, h)


def test_tags():
    assert GrowthClass.polynomial(2).tag == "poly:2"
    assert str(GrowthClass.exponential()) == "exp"
    assert GrowthClass.from_tag("poly:3") == GrowthClass.polynomial(3)
    assert GrowthClass.from_tag("const") == GrowthClass.constant()
    with pytest.raises(GrowthError):
        GrowthClass.from_tag("cubic")


def test_polynomial_needs_degree():
    with pytest.raises(ValueError):
        GrowthClass.polynomial(0)
    with pytest.raises(ValueError):
        GrowthClass(kind="exp", degree=2)


def test_classify_constant():
    assert classify_growth([(n, 5) for n in range(1, 9)]) == GrowthClass.constant()


def test_classify_logarithmic():
    samples = [(n, 3 + 2 * math.log(n)) for n in range(1, 13)]
    assert classify_growth(samples) == GrowthClass.logarithmic()


@pytest.mark.parametrize("degree", [1, 2, 3])
def test_classify_polynomial(degree):
    samples = [(n, 7 * n**degree) for n in range(1, 11)]
    assert classify_growth(samples) == GrowthClass.polynomial(degree)


def test_classify_exponential():
    samples = [(n, 2**n) for n in range(1, 13)]
    assert classify_growth(samples) == GrowthClass.exponential()


def test_classify_quadratic_with_offset():
    samples = [(b, 1 + 8 * b * b) for b in range(2, 11)]
    assert classify_growth(samples) == GrowthClass.polynomial(2)


def test_classify_insufficient_samples():
    with pytest.raises(GrowthError, match="insufficient samples"):
        classify_growth([(1, 1), (2, 4), (3, 9), (3, 10)])


def test_classify_rejects_bad_amounts():
    with pytest.raises(GrowthError):
        classify_growth([(1, 1), (2, math.inf), (3, 9), (4, 16)])
    with pytest.raises(GrowthError):
        classify_growth([(1, 1), (2, -4), (3, 9), (4, 16)])
