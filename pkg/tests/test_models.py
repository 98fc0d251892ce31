import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cartan_motion.groups import haar_sample
from cartan_motion.models import RankOneModel, SLFlatModel, model_from_string


@pytest.mark.parametrize("model", [RankOneModel(3), RankOneModel(4, "SU(2)"), RankOneModel(4, "Sp(1)"),
                                   SLFlatModel(2), SLFlatModel(3)])
def test_action_preserves_norm(model):
    rng = np.random.default_rng(0)
    ks = haar_sample(model.group, 1, 100)
    for k in ks:
        Y = model.random_vector(rng)
        assert abs(np.linalg.norm(model.action(k, Y)) - np.linalg.norm(Y)) <= 1e-12


def test_rank_one_weyl_orbit():
    orbit = RankOneModel(3).weyl_orbit([2 + 1j])
    assert {complex(x[0]) for x in orbit} == {2 + 1j, -2 - 1j}


def test_rank_one_slice_pairing():
    m = RankOneModel(5)
    assert m.pairing([2 - 1j], m.embed_a([0.7])) == pytest.approx((2 - 1j) * 0.7)


def test_sl_action_keeps_symmetric_traceless():
    m = SLFlatModel(3)
    rng = np.random.default_rng(2)
    for k in haar_sample("SO(3)", 3, 20):
        M = m.to_matrix(m.action(k, m.random_vector(rng)))
        assert abs(np.trace(M)) <= 1e-12
        assert np.abs(M - M.T).max() <= 1e-12


def test_sl_basis_orthonormal():
    m = SLFlatModel(4)
    gram = np.einsum("aij,bij->ab", m.basis, m.basis)
    assert np.allclose(gram, np.eye(m.dim_p), atol=1e-14)


def test_sl_weyl_orbit_size():
    m = SLFlatModel(3)
    assert len(m.weyl_orbit([1.0, 0.3])) == 6
    assert len(m.weyl_orbit([1.0, 1.0])) <= 6


def test_sl_pairing_at_identity():
    m = SLFlatModel(3)
    h = np.array([0.4, -1.1])
    lam = np.array([1.0 + 0.5j, 0.3])
    Y = m.embed_a(h)
    expected = lam[0] * h[0] + lam[1] * h[1] + (-lam.sum()) * (-h.sum())
    assert m.pairing(lam, Y) == pytest.approx(expected)
    assert m.orbit_pairing(lam, np.eye(3)[None], Y)[0] == pytest.approx(expected)


@pytest.mark.parametrize("model", [RankOneModel(3), SLFlatModel(3), SLFlatModel(4)])
def test_weyl_covariance_on_basis(model):
    lam = np.array([0.7 - 0.2j, 1.3, 0.1][: model.rank])
    for image, k0 in model.weyl_action(lam):
        assert np.linalg.det(k0) == pytest.approx(1.0)
        for Y in np.eye(model.dim_p):
            assert model.pairing(image, Y) == pytest.approx(model.pairing(lam, model.action(k0, Y)), abs=1e-12)


@settings(max_examples=25, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), lam=st.floats(-5, 5))
def test_real_lambda_integrand_unimodular(seed, lam):
    m = SLFlatModel(3)
    rng = np.random.default_rng(seed)
    Y = m.random_vector(rng)
    ks = haar_sample("SO(3)", seed, 8)
    vals = np.exp(1j * m.orbit_pairing([lam, -0.5 * lam], ks, Y))
    assert np.abs(np.abs(vals) - 1).max() <= 1e-14


def test_complex_lambda_modulus():
    m = RankOneModel(3)
    ks = haar_sample("SO(3)", 4, 10)
    Y = np.array([0.3, -1.0, 0.8])
    p = m.orbit_pairing([0.5 + 0.7j], ks, Y)
    assert np.allclose(np.abs(np.exp(1j * p)), np.exp(-p.imag), rtol=1e-14)


def test_model_from_string():
    assert model_from_string("rank1:4:SU(2)").name == "rank1:4:SU(2)"
    assert model_from_string("sl:3").dim_p == 5
    with pytest.raises(ValueError):
        model_from_string("foo:3")
    with pytest.raises(ValueError):
        model_from_string("rank1:3:SU(2)")
