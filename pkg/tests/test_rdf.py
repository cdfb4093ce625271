import numpy as np
import pytest

from muckenhoupt.characteristics import a1_characteristic
from muckenhoupt.exceptions import CertificateFailure, NonNegativityViolation
from muckenhoupt.grid import lp_norm, make_weight
from muckenhoupt.maximal import MaximalOperator
from muckenhoupt.rdf import RdFParams, a1_properties, build_dual_majorant, build_majorant, terms_needed

OP = MaximalOperator()


def test_terms_needed_is_least():
    for eps in (0.1, 0.5, 0.9):
        K = terms_needed(eps, 1.0, 1e-9, 10**6)
        assert (1 + eps) ** (-(K - 1)) / eps <= 1e-9
        assert K == 1 or (1 + eps) ** (-(K - 2)) / eps > 1e-9
    assert terms_needed(0.5, 1.0, 1e-9, 7) == 7
    assert terms_needed(0.5, 1e-12, 1e-9, 100) == 1


@pytest.mark.parametrize("p", [1.5, 2.0, 3.0])
@pytest.mark.parametrize("eps", [0.1, 0.5])
def test_primal_properties(p, eps, rng):
    w = make_weight("random_flat:0.05,4", 128)
    g = rng.random(128) ** 3
    params = RdFParams(epsilon=eps, budget=400)
    maj = build_majorant(g, p, w, OP, params)
    R = maj.values.values
    assert np.all(R >= g)
    assert lp_norm(R, p, w) <= (1 + eps) / eps * lp_norm(g, p, w) + maj.tail_bound
    chk = a1_properties(maj, w, params, OP)
    assert chk.holds
    assert chk.bound == pytest.approx((1 + eps) * maj.norm_used)


@pytest.mark.parametrize("q", [1.5, 2.0, 3.0])
def test_dual_properties(q, rng):
    w = make_weight("random_flat:0.05,5", 128)
    h = rng.random(128)
    params = RdFParams(epsilon=0.5, budget=400)
    maj = build_dual_majorant(h, q, w, OP, params)
    R = maj.values.values
    assert maj.dual
    assert np.all(R >= h)
    assert lp_norm(R, q, w) <= 1.5 / 0.5 * lp_norm(h, q, w) + maj.tail_bound
    chk = a1_properties(maj, w, params, OP)
    assert chk.holds
    with pytest.raises(ValueError):
        a1_properties(maj, None, params, OP)


def test_constant_source_uses_fixed_point():
    w = np.ones(32)
    maj = build_majorant(np.ones(32), 2.0, w, OP, RdFParams(epsilon=0.5), norm=1.0)
    # M1 = 1, so R = sum_k (1.5)^-k truncated at K terms
    K = maj.terms_used
    expect = (1 - 1.5 ** -(K + 1)) / (1 - 1 / 1.5)
    np.testing.assert_allclose(maj.values.values, expect, rtol=1e-13)
    assert a1_characteristic(maj.values).value == pytest.approx(1.0)


def test_low_norm_triggers_safety_retry():
    w = np.ones(64)
    g = np.zeros(64)
    g[10] = 1.0
    maj = build_majorant(g, 2.0, w, OP, RdFParams(epsilon=0.5, max_retries=6), norm=0.3)
    # the iterates witness a larger norm, so one rebuild suffices
    assert maj.retries == 1
    assert maj.safety > 1.0
    ratios = [b / a for a, b in zip(maj.term_norms, maj.term_norms[1:])]
    assert maj.norm_used == pytest.approx(max(ratios), rel=1e-9)
    assert all(nk <= maj.norm_used**k * maj.term_norms[0] * (1 + 1e-12) for k, nk in enumerate(maj.term_norms))


def test_certificate_failure_after_retries():
    g = np.zeros(64)
    g[10] = 1.0
    with pytest.raises(CertificateFailure):
        build_majorant(g, 2.0, np.ones(64), OP, RdFParams(epsilon=0.5, max_retries=0), norm=0.3)


def test_rejects_bad_sources():
    with pytest.raises(NonNegativityViolation):
        build_majorant(-np.ones(8), 2.0, np.ones(8), OP, norm=1.0)
    with pytest.raises(NonNegativityViolation):
        build_majorant(np.zeros(8), 2.0, np.ones(8), OP, norm=1.0)
    with pytest.raises(ValueError):
        RdFParams(epsilon=0.0)


def test_sidecar_keys():
    maj = build_majorant(np.ones(16), 2.0, np.ones(16), OP, norm=1.0)
    assert set(maj.sidecar()) == {"epsilon", "terms_used", "norm_used", "tail_bound", "dual"}
