import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from oracles import bicm_llr_oracle, close, msd_llr_oracle
from polarssk.errors import InvalidArgumentError
from polarssk.ssk import (
    SskConfig,
    bicm_llr,
    bicm_llr_from_metrics,
    bits_to_labels,
    draw_channel,
    label_bits,
    log_metrics,
    map_bits,
    msd_llr,
    msd_llr_from_metrics,
    transmit,
    unmap_bits,
)


class TestConfig:
    def test_derived_quantities(self):
        cfg = SskConfig(16, 4, es_n0_db=10.0)
        assert cfg.m == 4
        assert cfg.n0 == pytest.approx(0.1)
        assert cfg.noise_var == pytest.approx(0.05)
        assert SskConfig(16, 4, 10.0, noise_scale=1.0).noise_var == pytest.approx(0.1)
        assert cfg.at(0.0).n0 == 1.0 and cfg.at(0.0).nr == 4

    @pytest.mark.parametrize("nt, nr, scale", [(3, 1, 0.5), (1, 1, 0.5), (4, 0, 0.5), (4, 1, 0.0)])
    def test_invalid(self, nt, nr, scale):
        with pytest.raises(InvalidArgumentError):
            SskConfig(nt, nr, noise_scale=scale)


def test_map_examples():
    assert map_bits([0, 0, 0, 0]) == 1
    assert map_bits([1, 1, 1, 1]) == 16
    assert map_bits([1, 0, 0, 0]) == 2  # b^0 is least significant
    assert map_bits([0, 0, 0, 1]) == 9


@pytest.mark.parametrize("m", range(1, 7))
def test_map_is_bijection(m):
    seen = {map_bits(b) for b in label_bits(m)}
    assert seen == set(range(1, (1 << m) + 1))
    for k in range(1, (1 << m) + 1):
        assert map_bits(unmap_bits(k, m)) == k


def test_map_rejects_non_bits():
    with pytest.raises(InvalidArgumentError):
        map_bits([0, 2])
    with pytest.raises(InvalidArgumentError):
        map_bits([])
    with pytest.raises(InvalidArgumentError):
        unmap_bits(17, 4)


def test_bits_to_labels_vectorised(rng):
    b = rng.integers(0, 2, size=(7, 5, 4))
    labels = bits_to_labels(b)
    for idx in np.ndindex(7, 5):
        assert labels[idx] == map_bits(b[idx]) - 1


class TestTransmit:
    def test_noiseless(self, rng):
        H = draw_channel(rng, 4, 16)
        assert np.array_equal(transmit(5, H, 0.0, rng), H[:, 4])

    def test_out_of_range(self, rng):
        H = draw_channel(rng, 2, 4)
        for k in (0, 5):
            with pytest.raises(InvalidArgumentError):
                transmit(k, H, 1.0, rng)

    def test_noise_statistics(self):
        rng = np.random.default_rng(7)
        nr, nv, n = 3, 0.4, 100_000
        H = draw_channel(rng, nr, 4)
        y = np.stack([transmit(2, H, nv, rng) for _ in range(n)])
        err = y - H[:, 1]
        assert np.mean(np.sum(np.abs(err) ** 2, axis=1)) == pytest.approx(nr * nv, rel=0.02)
        se = np.sqrt(nv / 2 / n)
        assert np.all(np.abs(err.mean(axis=0).real) < 3 * se)
        assert np.all(np.abs(err.mean(axis=0).imag) < 3 * se)

    def test_channel_shape_and_power(self, rng):
        H = draw_channel(rng, 4, 16, size=5000)
        assert H.shape == (5000, 4, 16)
        assert np.mean(np.abs(H) ** 2) == pytest.approx(1.0, rel=0.01)


def test_two_antenna_msd_formula(rng):
    for _ in range(50):
        H = draw_channel(rng, 2, 2)
        y = transmit(int(rng.integers(1, 3)), H, 0.3, rng)
        d = [np.sum(np.abs(y - H[:, k]) ** 2) for k in range(2)]
        want = (d[1] - d[0]) / 0.3
        assert msd_llr(y, H, 0.3, 1) == pytest.approx(np.clip(want, -40, 40), rel=1e-12)
        assert bicm_llr(y, H, 0.3)[0] == pytest.approx(msd_llr(y, H, 0.3, 1), rel=1e-12)


@pytest.mark.parametrize("nr", [1, 4])
def test_msd_matches_enumeration(nr, rng):
    for _ in range(100):
        H = draw_channel(rng, nr, 16)
        nv = 10 ** (-rng.uniform(-10, 15) / 10)
        y = transmit(int(rng.integers(1, 17)), H, nv, rng)
        level = int(rng.integers(1, 5))
        prior = rng.integers(0, 2, size=level - 1).tolist()
        assert close(msd_llr(y, H, nv, level, prior), msd_llr_oracle(y, H, nv, level, prior))


@pytest.mark.parametrize("nr", [1, 4])
def test_bicm_matches_enumeration(nr, rng):
    for _ in range(100):
        H = draw_channel(rng, nr, 16)
        nv = 10 ** (-rng.uniform(-10, 15) / 10)
        y = transmit(int(rng.integers(1, 17)), H, nv, rng)
        got = bicm_llr(y, H, nv)
        for g, w in zip(got, bicm_llr_oracle(y, H, nv)):
            assert close(g, w)


def test_complementing_priors_negates(rng):
    # flipping the current bit of every label swaps S_0 and S_1
    H = draw_channel(rng, 2, 8)
    y = transmit(3, H, 0.5, rng)
    flip = np.arange(8) ^ 0b010
    a = msd_llr(y, H, 0.5, 2, [1])
    b = msd_llr(y, H[:, flip], 0.5, 2, [1])
    assert b == pytest.approx(-a, rel=1e-12)


def test_bicm_relabeling_invariance(rng):
    # relabel by XOR with a constant mask and flip the LLR signs of the masked bits
    H = draw_channel(rng, 2, 16)
    y = transmit(11, H, 0.2, rng)
    mask = 0b1010
    perm = np.arange(16) ^ mask
    a = bicm_llr(y, H, 0.2)
    b = bicm_llr(y, H[:, perm], 0.2)
    signs = 1 - 2 * ((mask >> np.arange(4)) & 1)
    assert np.allclose(b, a * signs, rtol=1e-12)


def test_last_level_is_pairwise(rng):
    H = draw_channel(rng, 2, 16)
    y = transmit(6, H, 0.7, rng)
    prior = [1, 0, 1]  # label low bits 0b101 -> antennas 6 (bit3=0) and 14 (bit3=1)
    d = [np.sum(np.abs(y - H[:, k - 1]) ** 2) for k in (6, 14)]
    assert msd_llr(y, H, 0.7, 4, prior) == pytest.approx((d[1] - d[0]) / 0.7, rel=1e-12)


def test_noiseless_signs_match_label(rng):
    for k in range(1, 17):
        H = draw_channel(rng, 2, 16)
        y = H[:, k - 1].copy()
        bits = unmap_bits(k, 4)
        llr = bicm_llr(y, H, 0.0)
        assert np.all(np.sign(llr) == 1 - 2 * bits.astype(int))
        for level in range(1, 5):
            v = msd_llr(y, H, 0.0, level, bits[: level - 1])
            assert np.sign(v) == 1 - 2 * int(bits[level - 1])


@given(st.floats(1e-300, 1e6), st.integers(0, 2**32 - 1))
def test_outputs_finite_and_clamped(nv, seed):
    rng = np.random.default_rng(seed)
    H = draw_channel(rng, 2, 16) * 100
    y = transmit(int(rng.integers(1, 17)), H, nv, rng)
    m = log_metrics(y, H, nv)
    out = np.concatenate([bicm_llr_from_metrics(m), [msd_llr_from_metrics(m, i) for i in range(1, 5)]])
    assert np.all(np.isfinite(out)) and np.all(np.abs(out) <= 40.0)


def test_maxlog_variant(rng):
    H = draw_channel(rng, 1, 4)
    y = transmit(2, H, 0.5, rng)
    m = log_metrics(y, H, 0.5)
    got = msd_llr_from_metrics(m, 1, maxlog=True)
    assert got == pytest.approx(np.clip(max(m[0], m[2]) - max(m[1], m[3]), -40, 40))


def test_batch_priors(rng):
    H = draw_channel(rng, 2, 16, size=30)
    y = H[np.arange(30), :, 5] + 0.1
    m = log_metrics(y, H, 0.3)
    prior = rng.integers(0, 4, size=30)
    batch = msd_llr_from_metrics(m, 3, prior)
    for t in range(30):
        assert batch[t] == msd_llr_from_metrics(m[t], 3, int(prior[t]))


def test_prior_validation():
    with pytest.raises(InvalidArgumentError):
        msd_llr(np.zeros(1), np.ones((1, 4)), 1.0, 2, [])
    with pytest.raises(InvalidArgumentError):
        msd_llr_from_metrics(np.zeros(4), 3)
    with pytest.raises(InvalidArgumentError):
        msd_llr_from_metrics(np.zeros(4), 2, 2)
