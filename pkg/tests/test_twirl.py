import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from honest_noise import honesty, zoo
from honest_noise.channels import kraus_to_chi
from honest_noise.twirl import group_average_twirl, pauli_twirl, twirl_equivalence_check

from conftest import random_channel

seeds = st.integers(0, 2**32 - 1)


def test_rotation_twirls_to_dephasing():
    tw = pauli_twirl(zoo.reference_channels()["3,0"])
    p = np.sin(0.01) ** 2
    assert np.allclose(kraus_to_chi(tw).chi, kraus_to_chi(zoo.make_dephasing_z(p)).chi, atol=1e-15)


def test_pauli_channel_is_fixed():
    ch = zoo.reference_channels()["2"]
    assert np.allclose(kraus_to_chi(pauli_twirl(ch)).chi, kraus_to_chi(ch).chi, atol=1e-15)


@settings(max_examples=20)
@given(seeds, st.sampled_from([2, 4]))
def test_twirl_properties(seed, d):
    ch = random_channel(d, np.random.default_rng(seed))
    chi = kraus_to_chi(ch)
    tw = pauli_twirl(ch)
    tchi = kraus_to_chi(tw)
    # a valid Pauli channel keeping the diagonal, and chi00 in particular
    assert np.allclose(tchi.chi, np.diag(np.diag(tchi.chi)), atol=1e-12)
    assert tchi.diag.min() >= -1e-14 and tchi.diag.sum() == pytest.approx(1, abs=1e-12)
    assert np.allclose(tchi.diag, chi.diag, atol=1e-12)
    assert tchi.diag[0] == pytest.approx(chi.diag[0], abs=1e-14)
    # idempotent
    assert np.allclose(kraus_to_chi(pauli_twirl(tw)).chi, tchi.chi, atol=1e-12)


@settings(max_examples=10)
@given(seeds)
def test_group_average_agrees(seed):
    ch = random_channel(2, np.random.default_rng(seed))
    assert twirl_equivalence_check(ch, n_samples=100, seed=seed % 100) <= 1e-10


def test_two_qubit_group_average_agrees():
    ch = zoo.reference_two_qubit_channel()
    assert twirl_equivalence_check(ch, n_samples=50) <= 1e-10
    assert len(group_average_twirl(ch).kraus) == 16 * len(ch.kraus)


def test_twirl_label():
    assert pauli_twirl(zoo.make_preset("depolarizing", {"p": 0.1})).label.startswith("twirl")


@pytest.mark.parametrize("row", ["3,0", "3,1", "3,2"])
def test_twirl_of_rotation_is_dishonest(row):
    ch = zoo.reference_channels()[row]
    rep = honesty.empirical_honesty_check(pauli_twirl(ch), ch, n_samples=10_000, seed=0)
    assert rep.max_violation > 1e-6


def test_twirl_distance_of_z_rotation_closed_form():
    from honest_noise.diamond import diamond_distance
    for theta in (0.02, 0.3, 1.2):
        ch = zoo.make_rotation(theta, [0, 0, 1])
        assert diamond_distance(ch, pauli_twirl(ch)) == pytest.approx(abs(np.sin(theta)), abs=1e-7)
