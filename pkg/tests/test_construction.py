import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from polarssk.capacity import CapacityReport, estimate_capacities
from polarssk.construction import (
    RateAllocation,
    ReliabilityProfile,
    allocate_rates,
    estimate_reliabilities,
    most_reliable,
    segregate,
)
from polarssk.errors import EstimationError, InvalidArgumentError
from polarssk.ssk import SskConfig

# Genie-aided error probabilities of the length-4 natural-order code at
# 3.29 dB (noise variance 0.5 * 10^-0.329), from closed-form node LLRs
# f(f(L1,L3), f(L2,L4)), f(L1,L3) + f(L2,L4), f(L1+L3, L2+L4), L1+L2+L3+L4
# averaged over 10^6 independent draws.
ORACLE_N4 = np.array([0.17202242, 0.02482714, 0.01441326, 0.00018345])


def profile(p, N_levels=None):
    return ReliabilityProfile(np.asarray(p, dtype=float), 0.0, 10_000, 0)


def test_length_four_matches_oracle():
    prof = estimate_reliabilities(4, 3.29, samples=100_000, seed=1)
    se = np.sqrt(ORACLE_N4 * (1 - ORACLE_N4) / 100_000)
    assert np.all(np.abs(prof.error_prob - ORACLE_N4) < 4 * se + 1e-4)
    assert np.all(np.abs(prof.counted_error_prob - ORACLE_N4) < 4 * se + 1e-4)
    p = prof.error_prob
    assert p[0] > p[1] and p[1] >= p[2] and p[2] > p[3]


def test_length_two_polarizes():
    p = estimate_reliabilities(2, 0.0, samples=10_000).error_prob
    assert p[0] > p[1]


def test_noiseless_limit():
    prof = estimate_reliabilities(64, 400.0, samples=10_000)
    assert np.all(prof.error_prob < 1e-12)
    assert not prof.counted_error_prob.any()


def test_values_are_probabilities():
    prof = estimate_reliabilities(256, -3.0, samples=10_000)
    assert np.all(prof.error_prob >= 0) and np.all(prof.error_prob <= 0.5 + 1e-12)
    assert np.all(prof.counted_error_prob <= 0.5 + 0.05)


def test_polarization_contrast():
    p = estimate_reliabilities(256, 0.0, samples=10_000).error_prob
    assert p.min() * 10 < p.max()


def test_monotone_in_snr():
    a = estimate_reliabilities(64, 0.0, samples=100_000, seed=2).error_prob
    b = estimate_reliabilities(64, 3.0, samples=100_000, seed=2).error_prob
    assert np.median(b) <= np.median(a)
    assert np.mean(b <= a) > 0.95


def test_worker_count_does_not_change_profile():
    a = estimate_reliabilities(128, 1.0, samples=10_000, seed=5, workers=1)
    b = estimate_reliabilities(128, 1.0, samples=10_000, seed=5, workers=2)
    assert np.array_equal(a.error_prob, b.error_prob)
    assert np.array_equal(a.counted_error_prob, b.counted_error_prob)


@pytest.mark.parametrize(
    "kwargs",
    [dict(samples=0), dict(samples=9_999), dict(total_length=1), dict(total_length=12)],
)
def test_invalid_arguments(kwargs):
    args = dict(total_length=8, design_snr_db=0.0, samples=10_000) | kwargs
    with pytest.raises(InvalidArgumentError):
        estimate_reliabilities(**args)


class TestAllocate:
    def test_published_rates_16x1(self):
        # 1.65 bpcu cell: every entry rounds as tabulated
        assert allocate_rates([0.2037, 0.3232, 0.4809, 0.6456], 256).K == (52, 83, 123, 165)

    def test_half_up(self):
        assert allocate_rates([0.5 / 8, 1.5 / 8, 2.49 / 8], 8).K == (1, 2, 2)

    def test_zero_and_clamp(self):
        assert allocate_rates([0.0, 0.0], 256).K == (0, 0)
        assert allocate_rates([1.2, -0.001], 16, std_errors=[0.01, 0.01]).K == (16, 0)

    def test_negative_capacity_rejected(self):
        with pytest.raises(EstimationError):
            allocate_rates([0.3, -0.05], 64, std_errors=[0.01, 0.01])
        with pytest.raises(EstimationError):
            allocate_rates([0.3, np.nan], 64)

    def test_from_report(self):
        rep = estimate_capacities(SskConfig(16, 1, 3.29), frames=10_000)
        alloc = allocate_rates(rep, 256)
        assert alloc.K == tuple(int(np.floor(c * 256 + 0.5)) for c in rep.level_capacity)
        assert isinstance(rep, CapacityReport)

    def test_allocation_fields(self):
        alloc = RateAllocation((3, 5), 8)
        assert alloc.total == 8 and alloc.rates == (3 / 8, 5 / 8)
        assert alloc.rate == 8 / 16


class TestSegregate:
    def test_worked_example(self):
        codes = segregate(profile([0.4, 0.1, 0.3, 0.05]), RateAllocation((1, 1), 2))
        assert [c.info_set for c in codes] == [(1,), (1,)]  # 1-based {2} and {2}

    def test_full_and_empty(self):
        prof = profile(np.linspace(0.5, 0.0, 16))
        assert all(c.K == 4 for c in segregate(prof, RateAllocation((4,) * 4, 4)))
        assert all(c.K == 0 for c in segregate(prof, RateAllocation((0,) * 4, 4)))

    def test_ties_go_to_smaller_index(self):
        codes = segregate(profile([0.2, 0.1, 0.1, 0.1]), RateAllocation((2,), 4))
        assert codes[0].info_set == (1, 2)

    @given(st.lists(st.floats(0, 0.5), min_size=32, max_size=32), st.lists(st.integers(0, 8), min_size=4, max_size=4))
    def test_counts_and_membership(self, p, K):
        prof = profile(p)
        codes = segregate(prof, RateAllocation(tuple(K), 8))
        assert sum(c.K for c in codes) == sum(K)
        for i, (c, k) in enumerate(zip(codes, K)):
            block = np.asarray(p[i * 8 : (i + 1) * 8])
            chosen = block[list(c.info_set)]
            rest = np.delete(block, list(c.info_set))
            assert len(chosen) == k
            if k and rest.size:
                assert chosen.max() <= rest.min()

    def test_errors(self):
        with pytest.raises(InvalidArgumentError):
            segregate(profile(np.zeros(16)), RateAllocation((5, 1, 1, 1), 4))
        with pytest.raises(InvalidArgumentError):
            segregate(profile(np.zeros(16)), RateAllocation((1, 1), 4))


def test_unresolved_indices_ordered_by_mean_llr():
    prof = ReliabilityProfile(
        np.array([1e-30, 0.2, 1e-40, 0.01]), 0.0, 10_000, 0, mean_llr=np.array([50.0, 1.0, 40.0, 9.0])
    )
    # 1e-30 and 1e-40 are both below 1/samples: the larger mean LLR wins
    assert prof.order().tolist() == [0, 2, 3, 1]
    assert [c.info_set for c in segregate(prof, RateAllocation((1, 1), 2))] == [(0,), (0,)]
    assert prof.order(slice(2, 4)).tolist() == [0, 1]


def test_mean_llr_grows_with_reliability():
    prof = estimate_reliabilities(64, 2.0, samples=10_000)
    assert np.corrcoef(np.log(prof.error_prob + 1e-300), prof.mean_llr)[0, 1] < -0.5


def test_most_reliable_global_choice():
    code = most_reliable(profile([0.4, 0.1, 0.3, 0.05]), 2)
    assert code.info_set == (1, 3) and code.N == 4
    with pytest.raises(InvalidArgumentError):
        most_reliable(profile([0.1, 0.2]), 3)
