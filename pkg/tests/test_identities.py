import random

import pytest

from detsing import identities
from detsing.identities import IDENTITIES, random_germ, run_identity, run_suite


def test_random_germ_shape_and_constants():
    rng = random.Random(3)
    for _ in range(20):
        g = random_germ(rng)
        assert g.n in identities.NS and g.r in identities.RS and g.p == g.n + 1
        for _, _, p in g.matrix.cells():
            assert p.constant_term() == 0
            assert p.total_degree() <= identities.MAX_DEGREE if not p.is_zero() else True


def test_suite_is_reproducible():
    a = [r.failures for r in run_suite(seed=4, cases=5)]
    b = [r.failures for r in run_suite(seed=4, cases=5)]
    assert a == b == [0] * len(IDENTITIES)


@pytest.mark.parametrize("name", sorted(IDENTITIES))
def test_each_identity_small_sample(name):
    r = run_identity(name, seed=11, cases=15)
    assert r.failures == 0, r.failing_cases


def test_broken_identity_is_reported(monkeypatch):
    monkeypatch.setitem(IDENTITIES, "laplace", (lambda g, rng: g.n == 1, identities.NS))
    r = run_identity("laplace", seed=0, cases=30)
    assert 0 < r.failures < 30
    assert r.failing_cases and "matrix" in r.failing_cases[0]


def test_exception_counts_as_failure(monkeypatch):
    def boom(g, rng):
        raise ZeroDivisionError("boom")

    monkeypatch.setitem(IDENTITIES, "laplace", (boom, identities.NS))
    r = run_identity("laplace", seed=0, cases=3)
    assert r.failures == 3
    assert "ZeroDivisionError" in r.failing_cases[0]["error"]


def test_unknown_identity():
    with pytest.raises(ValueError):
        run_suite(names=["nope"])
