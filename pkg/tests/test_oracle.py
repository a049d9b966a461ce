"""Measurement front-end tests: query semantics, budget accounting, noise
statistics, the ledger, and reporting metrics.

Noise expectations come from direct Monte-Carlo sample means; power values
from closed-form magnitudes computed in-test.
"""

import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from chanzo.channels import CascadedChannel, gen_cascaded_channel, gen_path_set
from chanzo.errors import BudgetExceededError
from chanzo.oracle import COHERENT, POWER, PilotOracle, snr_of, true_power


def two_element_oracle(**kw):
    return PilotOracle(CascadedChannel(np.array([1.0 + 0j, 1.0j])), **kw)


# -------------------------------------------------------------- query values


def test_power_query_aligned_two_elements():
    # coeffs [1, j] at phases [0, -pi/2] sum to magnitude 2 -> power 4
    oracle = two_element_oracle()
    assert_allclose(oracle.query(np.array([0.0, -np.pi / 2])), 4.0, atol=1e-12)


def test_power_query_nonnegative_and_counts():
    oracle = two_element_oracle(noise_var=0.0)
    rng = np.random.default_rng(0)
    for i in range(10):
        v = oracle.query(rng.uniform(0, 2 * np.pi, 2))
        assert v >= 0.0
        assert oracle.used == i + 1


def test_noise_only_power_mean():
    # P = 0 leaves pure noise; mean of |n|^2 is the noise variance
    oracle = two_element_oracle(tx_power=0.0, noise_var=1.0)
    vals = oracle.query_many(np.zeros((100_000, 2)))
    assert_allclose(np.mean(vals), 1.0, rtol=0.02)


def test_coherent_mode_returns_exact_baseband():
    chan = CascadedChannel(np.array([0.3 - 0.4j, 0.8 + 0.1j]), direct=0.2 + 0.2j)
    oracle = PilotOracle(chan, tx_power=4.0, mode=COHERENT)
    phases = np.array([0.5, 1.7])
    expected = 2.0 * (
        chan.direct
        + chan.coeffs[0] * np.exp(1j * 0.5)
        + chan.coeffs[1] * np.exp(1j * 1.7)
    )
    assert_allclose(oracle.query(phases), expected, rtol=1e-12)


def test_noiseless_queries_repeatable():
    oracle = two_element_oracle()
    a = np.array([1.0, 2.0])
    assert oracle.query(a) == oracle.query(a)


def test_ma_oracle_queries_positions():
    ps = gen_path_set(3, seed=1)
    oracle = PilotOracle(ps, budget=4)
    v = oracle.query(np.array([0.5, 0.5]))
    assert v >= 0.0 and oracle.used == 1


def test_dimension_mismatch_rejected():
    oracle = two_element_oracle()
    with pytest.raises(ValueError):
        oracle.query(np.zeros(3))


def test_constructor_validation():
    chan = CascadedChannel(np.array([1.0 + 0j]))
    with pytest.raises(TypeError):
        PilotOracle("not a scenario")
    with pytest.raises(ValueError):
        PilotOracle(chan, tx_power=-1.0)
    with pytest.raises(ValueError):
        PilotOracle(chan, noise_var=-0.1)
    with pytest.raises(ValueError):
        PilotOracle(chan, mode="magnitude")
    with pytest.raises(ValueError):
        PilotOracle(chan, avg_len=0)


# ------------------------------------------------------------------- budget


def test_budget_exhaustion_is_terminal():
    oracle = two_element_oracle(budget=3)
    for _ in range(3):
        oracle.query(np.zeros(2))
    with pytest.raises(BudgetExceededError):
        oracle.query(np.zeros(2))
    assert oracle.used == 3  # the failed call is not charged


def test_remaining_tracks_used():
    oracle = two_element_oracle(budget=5)
    assert oracle.remaining == 5
    oracle.query(np.zeros(2))
    assert oracle.remaining == 4
    assert two_element_oracle().remaining is None


def test_query_many_respects_budget():
    oracle = two_element_oracle(budget=4)
    with pytest.raises(BudgetExceededError):
        oracle.query_many(np.zeros((5, 2)))
    assert oracle.used == 0  # rejected wholesale before any charge


def test_avg_len_charges_per_pilot():
    oracle = two_element_oracle(budget=6, avg_len=3)
    v = oracle.query(np.array([0.0, -np.pi / 2]))
    assert oracle.used == 3
    assert_allclose(v, 4.0, atol=1e-12)  # noiseless average equals one pilot
    assert len(oracle.ledger.rows) == 3


# ------------------------------------------------------------------ quantizer


def test_quantizer_snaps_queries_to_book():
    oracle = two_element_oracle(quantizer_bits=2)
    # phases snap to the nearest of {0, pi/2, pi, 3pi/2} before evaluating
    v = oracle.query(np.array([0.1, 3 * np.pi / 2 + 0.05]))
    expected = abs(1.0 + 1.0j * np.exp(1j * 3 * np.pi / 2)) ** 2
    assert_allclose(v, expected, rtol=1e-12)


def test_quantizer_idempotent_on_grid_values():
    oracle = two_element_oracle(quantizer_bits=2)
    on_grid = np.array([np.pi / 2, np.pi])
    assert oracle.query(on_grid) == oracle.query(on_grid.copy())


# ------------------------------------------------------------------- ledger


def test_ledger_records_every_query():
    oracle = two_element_oracle(noise_var=0.5, budget=8, noise_seed=3)
    rng = np.random.default_rng(1)
    for _ in range(8):
        oracle.query(rng.uniform(0, 2 * np.pi, 2))
    assert len(oracle.ledger.rows) == 8
    assert [r.query_index for r in oracle.ledger.rows] == list(range(8))


def test_ledger_replay_on_clone_is_bit_exact():
    oracle = two_element_oracle(noise_var=0.5, budget=8, noise_seed=3)
    rng = np.random.default_rng(1)
    for _ in range(8):
        oracle.query(rng.uniform(0, 2 * np.pi, 2))
    assert oracle.ledger.replay(oracle.clone())


def test_ledger_csv_header_and_power_rows():
    oracle = two_element_oracle(budget=1)
    oracle.query(np.zeros(2))
    lines = oracle.ledger.to_csv_string().splitlines()
    assert lines[0] == "query_index,scenario,variable,value_re,value_im,value_power"
    fields = lines[1].split(",")
    # POWER rows leave the complex fields empty
    assert fields[0] == "0" and fields[1] == "ris"
    assert fields[-3] == "" and fields[-2] == ""


def test_ledger_coherent_rows_carry_complex_value():
    oracle = two_element_oracle(budget=1, mode=COHERENT)
    y = oracle.query(np.zeros(2))
    fields = oracle.ledger.to_csv_string().splitlines()[1].split(",")
    assert float(fields[-3]) == y.real and float(fields[-2]) == y.imag


def test_query_many_matches_sequential_queries():
    oracle = two_element_oracle(noise_var=0.3, budget=12, noise_seed=9)
    mat = np.random.default_rng(2).uniform(0, 2 * np.pi, (6, 2))
    batch = oracle.query_many(mat)
    seq = np.array([oracle.clone().query(mat[0])])
    single = oracle.clone()
    seq = np.array([single.query(row) for row in mat])
    assert np.array_equal(batch, seq)


# --------------------------------------------------------------- information


def test_oracle_hides_the_scenario():
    oracle = two_element_oracle()
    public = [n for n in vars(oracle) if not n.startswith("_")]
    for name in public:
        assert not isinstance(getattr(oracle, name), (CascadedChannel,)), name
    assert not hasattr(oracle, "scenario")
    assert oracle.scenario_kind == "ris" and oracle.dim == 2


# ----------------------------------------------------------------- reporting


def test_true_power_and_snr_are_ledger_exempt():
    oracle = two_element_oracle(noise_var=1.0, budget=2)
    p = true_power(oracle, np.array([0.0, -np.pi / 2]))
    s = snr_of(oracle, np.array([0.0, -np.pi / 2]))
    assert oracle.used == 0 and len(oracle.ledger.rows) == 0
    assert_allclose(p, 4.0, atol=1e-12)


def test_snr_trivial_ratios():
    # P|H|^2 = 1 against sigma^2 = 1 -> 0 dB; sigma^2 = 0.01 -> 20 dB
    chan = CascadedChannel(np.array([1.0 + 0j]))
    assert_allclose(snr_of(PilotOracle(chan, noise_var=1.0), np.zeros(1)), 0.0, atol=1e-12)
    assert_allclose(snr_of(PilotOracle(chan, noise_var=1.0), np.zeros(1), noise_var=0.01),
                    20.0, atol=1e-9)


def test_snr_two_element_aligned():
    # perfect alignment of [1, j] gives power 4 -> 10 log10(4) dB
    oracle = two_element_oracle(noise_var=1.0)
    got = snr_of(oracle, np.array([0.0, -np.pi / 2]))
    assert_allclose(got, 10.0 * math.log10(4.0), atol=1e-9)
