import numpy as np
import pytest

from muckenhoupt.grid import IntervalFamily
from muckenhoupt.maximal import MaximalOperator
from muckenhoupt.operators import OPERATORS, hilbert_matrix, make_operator


def test_registry():
    for name in OPERATORS:
        op = make_operator(name)
        assert op.name == name
        assert op(np.ones(16)).shape == (16,)
    with pytest.raises(ValueError):
        make_operator("fourier")


def test_identity_zero_maximal(rng):
    x = rng.standard_normal(32)
    np.testing.assert_array_equal(make_operator("identity")(x), x)
    np.testing.assert_array_equal(make_operator("zero")(x), np.zeros(32))
    fam = IntervalFamily.dyadic()
    np.testing.assert_array_equal(make_operator("maximal", fam)(x), MaximalOperator(fam).values(x))


def test_hilbert_kernel(rng):
    H = hilbert_matrix(8)
    assert np.all(np.diag(H) == 0)
    np.testing.assert_allclose(H, -H.T)
    assert H[0, 1] == pytest.approx(-1 / np.pi)
    x = rng.standard_normal(8)
    np.testing.assert_allclose(make_operator("hilbert")(x), H @ x)


def test_rough_truncation_is_projection(rng):
    T = make_operator("rough_truncation")
    x = rng.standard_normal(64)
    np.testing.assert_allclose(T(T(x)), T(x), atol=1e-12)
    assert np.linalg.norm(T(x)) <= np.linalg.norm(x) + 1e-12
