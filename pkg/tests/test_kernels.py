import numpy as np
import pytest

from geography4 import kernels
from geography4.classes import pairing_gram
from geography4.exterior import KVector
from geography4.linalg import bareiss_det


@pytest.fixture
def batch():
    r = np.random.default_rng(0)
    return r.integers(-2, 3, size=(40, 70)).astype(np.int64)


def test_gram_batch_matches_exact(batch):
    grams = kernels.gram_batch(8, batch, use_numba=False)
    for row, g in zip(batch, grams):
        exact = pairing_gram(KVector(8, 4, [int(x) for x in row])).form.gram
        assert g.tolist() == [list(r) for r in exact]


@pytest.mark.skipif(not kernels.HAVE_NUMBA, reason="numba unavailable")
def test_numba_and_numpy_agree(batch):
    g1 = kernels.gram_batch(8, batch, use_numba=True)
    g2 = kernels.gram_batch(8, batch, use_numba=False)
    assert np.array_equal(g1, g2)
    d1 = kernels.det_mod_p_batch(g1, use_numba=True)
    d2 = kernels.det_mod_p_batch(g2, use_numba=False)
    assert np.array_equal(d1, d2)


def test_det_mod_p_matches_bareiss(batch):
    grams = kernels.gram_batch(8, batch, use_numba=False)
    dets = kernels.det_mod_p_batch(grams, use_numba=False)
    for g, d in zip(grams, dets):
        assert int(d) == bareiss_det(g.tolist()) % kernels.SCREEN_PRIME


def test_small_prime_screen():
    g = np.array([[[0, 1], [1, 0]], [[2, 0], [0, 2]]], dtype=np.int64)
    assert kernels.det_mod_p_batch(g, p=3, use_numba=False).tolist() == [2, 1]
