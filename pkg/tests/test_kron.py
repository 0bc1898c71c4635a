from __future__ import annotations

import numpy as np
import pytest

from permclass.errors import BadDimension, NotSeparable, NotUnitary
from permclass.kron import factor_unitary, rearrange, singular_ratio

from oracles import haar_unitary

SPLITS = [(2, 2), (2, 4), (4, 2), (4, 4), (1, 4), (4, 1)]


def test_rearrangement_of_product_is_rank_one():
    rng = np.random.default_rng(0)
    A, B = rng.standard_normal((2, 2)), rng.standard_normal((3, 3))
    R = rearrange(np.kron(A, B), 2, 3)
    assert np.allclose(R, np.outer(A.reshape(-1), B.reshape(-1)))


@pytest.mark.parametrize("nV,nW", SPLITS)
def test_products_factor_exactly(nV, nW):
    rng = np.random.default_rng(nV * 10 + nW)
    for _ in range(20):
        A, B = haar_unitary(nV, rng), haar_unitary(nW, rng)
        f = factor_unitary(np.kron(A, B), nV, nW)
        assert f.residual < 1e-9
        assert np.allclose(np.kron(f.V, f.W), np.kron(A, B), atol=1e-10)
        assert np.allclose(f.V @ f.V.conj().T, np.eye(nV), atol=1e-10)
        assert np.allclose(f.W @ f.W.conj().T, np.eye(nW), atol=1e-10)


def test_phase_convention_first_large_entry_of_w_is_positive():
    rng = np.random.default_rng(3)
    A, B = haar_unitary(2, rng), haar_unitary(4, rng)
    f = factor_unitary(np.exp(1.1j) * np.kron(A, B), 2, 4)
    flat = f.W.reshape(-1)
    pivot = flat[np.argmax(np.abs(flat) > 0.5 / 2)]
    assert abs(pivot.imag) < 1e-12 and pivot.real > 0


def test_identity_factors_into_identities():
    f = factor_unitary(np.eye(8), 2, 4)
    assert np.allclose(f.V, np.eye(2)) and np.allclose(f.W, np.eye(4))


def test_haar_unitaries_rejected():
    rng = np.random.default_rng(4)
    for nV, nW in [(2, 2), (2, 4), (4, 4)]:
        U = haar_unitary(nV * nW, rng)
        with pytest.raises(NotSeparable) as info:
            factor_unitary(U, nV, nW)
        assert info.value.ratio > 1e-3
        assert singular_ratio(U, nV, nW) == pytest.approx(info.value.ratio)


def test_cx_not_separable():
    cx = np.eye(4)[:, [0, 1, 3, 2]]
    with pytest.raises(NotSeparable):
        factor_unitary(cx, 2, 2)


def test_bad_inputs():
    with pytest.raises(BadDimension):
        factor_unitary(np.eye(6), 4, 2)
    with pytest.raises(NotUnitary):
        factor_unitary(2 * np.eye(4), 2, 2)
