import math

import numpy as np
import pytest
from systems import random_affine_ifs, swap_pair_cf, triple_diag_ifs

from selfaffine import (
    NaturalCylinderFunction,
    ProductCylinderFunction,
    verify_axioms,
    words_of_length,
)


def test_natural_rejects_expanding_maps():
    with pytest.raises(ValueError, match="not contractive"):
        NaturalCylinderFunction(np.stack([np.diag([1.5, 0.5])]))


def test_product_rejects_bad_weights():
    with pytest.raises(ValueError):
        ProductCylinderFunction([0.5, 1.0])
    with pytest.raises(ValueError):
        ProductCylinderFunction([])


def test_product_value():
    cf = ProductCylinderFunction([0.5, 0.5])
    assert cf.value(1.0, (0, 1, 0, 1, 1)) == pytest.approx(2.0**-5, rel=1e-14)


def test_natural_value_diag():
    cf = NaturalCylinderFunction(np.stack([np.diag([0.5, 0.25])] * 2))
    # word (0,0) has matrix diag(1/4, 1/16); alpha^1.5 = 0.25 * 0.25
    assert cf.value(1.5, (0, 0)) == pytest.approx(0.0625, rel=1e-13)
    assert cf.value(0.0, (1,)) == 1.0


def test_value_rejects_bad_words():
    cf = ProductCylinderFunction([0.5, 0.5])
    with pytest.raises(ValueError):
        cf.value(1.0, ())
    with pytest.raises(ValueError):
        cf.value(1.0, (0, 2))


def test_tail_is_accepted_and_ignored():
    cf = swap_pair_cf()
    w = (0, 1, 0)
    assert cf.value(1.3, w, tail=(0, 0)) == cf.value(1.3, w, tail=(1, 1, 1))


def test_constants_product():
    assert ProductCylinderFunction([0.3, 0.5]).constants(1.7) == (1.0, 0.3, 0.5)


def test_constants_natural():
    k_t, s_lo, s_hi = swap_pair_cf().constants(1.0)
    assert k_t == 1.0
    assert s_lo == pytest.approx(0.25, abs=1e-14)
    assert s_hi == pytest.approx(0.5, abs=1e-14)
    conformal = NaturalCylinderFunction(np.stack([0.5 * np.eye(2)]))
    assert conformal.constants(2.0) == pytest.approx((1.0, 0.5, 0.5), abs=1e-14)


@pytest.mark.parametrize("depth", [0, 1, 3])
def test_block_values_match_per_word(depth):
    for cf in (swap_pair_cf(), ProductCylinderFunction([0.3, 0.6])):
        for prefix in [(0,), (1, 0)]:
            block = cf.log_value_block(1.3, prefix, depth)
            direct = [cf.log_value(1.3, prefix + s) for s in words_of_length(2, depth)]
            assert np.allclose(block, direct, rtol=0, atol=1e-12)


def test_chain_rule_equality_product():
    rng = np.random.default_rng(10)
    cf = ProductCylinderFunction([0.3, 0.5, 0.7])
    for _ in range(300):
        i = tuple(rng.integers(0, 3, size=rng.integers(1, 6)))
        j = tuple(rng.integers(0, 3, size=rng.integers(1, 6)))
        t = float(rng.uniform(0, 3))
        lhs = cf.value(t, i + j)
        rhs = cf.value(t, i) * cf.value(t, j)
        assert lhs == pytest.approx(rhs, rel=1e-12)


def test_subchain_rule_natural():
    rng = np.random.default_rng(11)
    for _ in range(20):
        cf = NaturalCylinderFunction(random_affine_ifs(rng, 2, 3))
        for _ in range(50):
            i = tuple(rng.integers(0, 3, size=rng.integers(1, 5)))
            j = tuple(rng.integers(0, 3, size=rng.integers(1, 5)))
            t = float(rng.uniform(0, 3))
            assert cf.value(t, i + j) <= cf.value(t, i) * cf.value(t, j) * (1 + 1e-12)


def test_parameter_bound_two_sided():
    rng = np.random.default_rng(12)
    delta = 0.25
    for cf in (swap_pair_cf(), ProductCylinderFunction([0.3, 0.6])):
        for _ in range(200):
            w = tuple(rng.integers(0, 2, size=rng.integers(1, 8)))
            t = float(rng.uniform(0, 2.5))
            _, s_lo, s_hi = cf.constants(t)
            base = cf.log_value(t, w)
            shifted = cf.log_value(t + delta, w)
            assert shifted >= base + delta * len(w) * math.log(s_lo) - 1e-10
            assert shifted <= base + delta * len(w) * math.log(s_hi) + 1e-10


def test_verify_axioms_product_chain_rule_is_tight():
    report = verify_axioms(ProductCylinderFunction([0.4, 0.6]), [0.5, 1.0, 1.5], samples=400, seed=3)
    assert report.bvp_max_ratio == 1.0
    assert abs(report.worst_subchain_violation) <= 1e-12
    assert report.worst_param_violation <= 1e-10
    assert report.passed()


def test_verify_axioms_natural_random_maps():
    rng = np.random.default_rng(13)
    cf = NaturalCylinderFunction(random_affine_ifs(rng, 2, 2))
    report = verify_axioms(cf, [0.5, 1.0, 1.5, 2.0, 2.5], n_max=10, samples=1000, seed=7)
    assert report.worst_subchain_violation <= 1e-12
    assert report.worst_param_violation <= 1e-10
    assert report.passed()
    assert report.samples == 1000


def test_verify_axioms_deterministic():
    cf = swap_pair_cf()
    a = verify_axioms(cf, [0.5, 1.0], samples=100, seed=42)
    b = verify_axioms(cf, [0.5, 1.0], samples=100, seed=42)
    assert a == b


def test_content_hash_distinguishes_content():
    a = ProductCylinderFunction([0.5, 0.5])
    b = ProductCylinderFunction([0.5, 0.25])
    assert a.content_hash() != b.content_hash()
    assert a.content_hash() == ProductCylinderFunction([0.5, 0.5]).content_hash()
    n1 = NaturalCylinderFunction(triple_diag_ifs())
    assert n1.content_hash() == NaturalCylinderFunction(triple_diag_ifs()).content_hash()
    assert n1.content_hash() != a.content_hash()
